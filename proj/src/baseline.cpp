#include "zreach/baseline.hpp"

#include <string>

namespace zreach
{

MatrixZonotope batch_ls_model_set(const DataBatch& data, const Zonotope& noise, bool affine, bool allow_rank_deficient)
{
    if (data.size() == 0)
        throw PreconditionError("batch LS: no data");
    if (noise.dim() != data.state_dim())
        throw DimensionError("batch LS: noise dimension " + std::to_string(noise.dim()) + " differs from state dimension " +
                             std::to_string(data.state_dim()));
    const Matrix d = data.data_matrix(affine);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(d);
    if (cod.rank() < d.rows() && !allow_rank_deficient)
        throw PreconditionError("batch LS: data matrix has rank " + std::to_string(cod.rank()) + " < " +
                                std::to_string(d.rows()) + " (data not exciting enough)");
    const Matrix pinv = cod.pseudoInverse();

    const Matrix center = (data.x_plus.colwise() - noise.center()) * pinv;
    std::vector<Matrix> gens;
    gens.reserve(static_cast<std::size_t>(noise.num_generators() * data.size()));
    for (Index i = 0; i < noise.num_generators(); ++i)
        for (Index t = 0; t < data.size(); ++t)
            gens.push_back(-noise.generators().col(i) * pinv.row(t));
    return MatrixZonotope(center, gens);
}

MatrixZonotope batch_ls_model_set(const SlidingWindow& window, const Zonotope& noise, bool affine)
{
    if (!window.full())
        throw PreconditionError("batch LS: window holds " + std::to_string(window.fill()) + " of " +
                                std::to_string(window.capacity()) + " transitions");
    return batch_ls_model_set(window.batch(), noise, affine);
}

} // namespace zreach
