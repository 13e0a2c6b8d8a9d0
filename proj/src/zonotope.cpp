#include "zreach/zonotope.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace zreach
{

namespace
{

Matrix drop_zero_columns(const Matrix& g)
{
    std::vector<Index> keep;
    keep.reserve(static_cast<std::size_t>(g.cols()));
    for (Index j = 0; j < g.cols(); ++j)
        if ((g.col(j).array() != 0.0).any())
            keep.push_back(j);
    if (static_cast<Index>(keep.size()) == g.cols())
        return g;
    Matrix out(g.rows(), static_cast<Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        out.col(static_cast<Index>(j)) = g.col(keep[j]);
    return out;
}

std::string shape(Index r, Index c)
{
    return std::to_string(r) + "x" + std::to_string(c);
}

} // namespace

Zonotope::Zonotope(Vector center) : center_(std::move(center)), generators_(center_.size(), 0) {}

Zonotope::Zonotope(Vector center, const Matrix& generators) : center_(std::move(center))
{
    if (generators.rows() != center_.size() && !(generators.cols() == 0))
        throw DimensionError("zonotope: center has dimension " + std::to_string(center_.size()) +
                             " but generators have " + std::to_string(generators.rows()) + " rows");
    if (generators.cols() == 0)
        generators_ = Matrix(center_.size(), 0);
    else
        generators_ = drop_zero_columns(generators);
}

Zonotope Zonotope::from_box(const Vector& lower, const Vector& upper)
{
    if (lower.size() != upper.size())
        throw DimensionError("from_box: bound sizes differ");
    if ((lower.array() > upper.array()).any())
        throw PreconditionError("from_box: lower bound exceeds upper bound");
    const Vector radius = 0.5 * (upper - lower);
    return Zonotope(0.5 * (upper + lower), Matrix(radius.asDiagonal()));
}

IntervalMatrix::IntervalMatrix(Matrix lower, Matrix upper) : lower_(std::move(lower)), upper_(std::move(upper))
{
    if (lower_.rows() != upper_.rows() || lower_.cols() != upper_.cols())
        throw DimensionError("interval matrix: bound shapes differ");
    if ((lower_.array() > upper_.array()).any())
        throw PreconditionError("interval matrix: lower bound exceeds upper bound");
}

MatrixZonotope::MatrixZonotope(Matrix center) : center_(std::move(center)) {}

MatrixZonotope::MatrixZonotope(Matrix center, const std::vector<Matrix>& generators) : center_(std::move(center))
{
    generators_.reserve(generators.size());
    for (const auto& g : generators) {
        if (g.rows() != center_.rows() || g.cols() != center_.cols())
            throw DimensionError("matrix zonotope: generator shape " + shape(g.rows(), g.cols()) +
                                 " differs from center shape " + shape(center_.rows(), center_.cols()));
        if ((g.array() != 0.0).any())
            generators_.push_back(g);
    }
}

MatrixZonotope MatrixZonotope::transposed() const
{
    std::vector<Matrix> gens;
    gens.reserve(generators_.size());
    for (const auto& g : generators_)
        gens.push_back(g.transpose());
    return MatrixZonotope(center_.transpose(), gens);
}

Zonotope linear_map(const Matrix& map, const Zonotope& z)
{
    if (map.cols() != z.dim())
        throw DimensionError("linear_map: map is " + shape(map.rows(), map.cols()) + " but zonotope has dimension " +
                             std::to_string(z.dim()));
    return Zonotope(map * z.center(), map * z.generators());
}

Zonotope translate(const Zonotope& z, const Vector& offset)
{
    if (offset.size() != z.dim())
        throw DimensionError("translate: offset dimension mismatch");
    return Zonotope(z.center() + offset, z.generators());
}

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b)
{
    if (a.dim() != b.dim())
        throw DimensionError("minkowski_sum: dimensions " + std::to_string(a.dim()) + " and " +
                             std::to_string(b.dim()) + " differ");
    Matrix g(a.dim(), a.num_generators() + b.num_generators());
    g << a.generators(), b.generators();
    return Zonotope(a.center() + b.center(), g);
}

Zonotope cartesian_product(const Zonotope& a, const Zonotope& b)
{
    const Index n = a.dim() + b.dim();
    Vector c(n);
    c << a.center(), b.center();
    Matrix g = Matrix::Zero(n, a.num_generators() + b.num_generators());
    g.topLeftCorner(a.dim(), a.num_generators()) = a.generators();
    g.bottomRightCorner(b.dim(), b.num_generators()) = b.generators();
    return Zonotope(c, g);
}

IntervalMatrix interval_hull(const Zonotope& z)
{
    const Vector radius = z.generators().cwiseAbs().rowwise().sum();
    return IntervalMatrix(z.center() - radius, z.center() + radius);
}

Zonotope reduce(const Zonotope& z, Index max_generators, ReductionMethod method)
{
    const Index n = z.dim();
    if (max_generators < n)
        throw PreconditionError("reduce: order " + std::to_string(max_generators) + " below dimension " +
                                std::to_string(n));
    const Index count = z.num_generators();
    if (count <= max_generators)
        return z;

    const Matrix& g = z.generators();
    std::vector<Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), Index{0});
    const Vector norms = g.colwise().norm().transpose();
    // Stable so that ties keep their original order; the result is then fully
    // determined by the input.
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });

    const Index kept = max_generators - n;
    Matrix out(n, kept + n);
    Matrix rest(n, count - kept);
    for (Index i = 0; i < count; ++i) {
        const Index j = order[static_cast<std::size_t>(i)];
        if (i < kept)
            out.col(i) = g.col(j);
        else
            rest.col(i - kept) = g.col(j);
    }
    if (method == ReductionMethod::Box) {
        out.rightCols(n) = rest.cwiseAbs().rowwise().sum().asDiagonal();
    }
    else {
        Eigen::JacobiSVD<Matrix> svd(rest, Eigen::ComputeFullU);
        const Matrix& u = svd.matrixU();
        const Vector half_widths = (u.transpose() * rest).cwiseAbs().rowwise().sum();
        out.rightCols(n) = u * half_widths.asDiagonal();
    }
    return Zonotope(z.center(), out);
}

Zonotope reduce_in_frame(const Zonotope& z, Index max_generators, const Matrix& frame)
{
    const Index n = z.dim();
    if (frame.rows() != n || frame.cols() != n)
        throw DimensionError("reduce_in_frame: frame must be " + std::to_string(n) + "x" + std::to_string(n));
    if (max_generators < n)
        throw PreconditionError("reduce_in_frame: order " + std::to_string(max_generators) + " below dimension " +
                                std::to_string(n));
    const Index count = z.num_generators();
    if (count <= max_generators)
        return z;
    Eigen::PartialPivLU<Matrix> lu(frame);
    const Matrix local = lu.solve(z.generators());
    std::vector<Index> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), Index{0});
    const Vector norms = local.colwise().norm().transpose();
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });
    const Index kept = max_generators - n;
    Matrix out(n, kept + n);
    Vector box = Vector::Zero(n);
    for (Index i = 0; i < count; ++i) {
        const Index j = order[static_cast<std::size_t>(i)];
        if (i < kept)
            out.col(i) = z.generators().col(j);
        else
            box += local.col(j).cwiseAbs();
    }
    out.rightCols(n) = frame * box.asDiagonal();
    return Zonotope(z.center(), out);
}

Vector sample(const Zonotope& z, Rng& rng, SamplingMode mode)
{
    Vector beta(z.num_generators());
    for (Index i = 0; i < beta.size(); ++i)
        beta(i) = mode == SamplingMode::Uniform ? rng.uniform(-1.0, 1.0) : (rng.uniform() < 0.5 ? -1.0 : 1.0);
    return z.center() + z.generators() * beta;
}

Zonotope vectorize(const MatrixZonotope& m)
{
    Matrix g(m.center().size(), m.num_generators());
    for (Index i = 0; i < m.num_generators(); ++i)
        g.col(i) = vec(m.generators()[static_cast<std::size_t>(i)]);
    return Zonotope(vec(m.center()), g);
}

MatrixZonotope unvectorize(const Zonotope& z, Index rows, Index cols)
{
    if (rows * cols != z.dim())
        throw DimensionError("unvectorize: shape " + shape(rows, cols) + " does not match dimension " +
                             std::to_string(z.dim()));
    std::vector<Matrix> gens;
    gens.reserve(static_cast<std::size_t>(z.num_generators()));
    for (Index i = 0; i < z.num_generators(); ++i)
        gens.push_back(unvec(z.generators().col(i), rows, cols));
    return MatrixZonotope(unvec(z.center(), rows, cols), gens);
}

MatrixZonotope minkowski_sum(const MatrixZonotope& a, const MatrixZonotope& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("minkowski_sum: matrix zonotope shapes differ");
    std::vector<Matrix> gens = a.generators();
    gens.insert(gens.end(), b.generators().begin(), b.generators().end());
    return MatrixZonotope(a.center() + b.center(), gens);
}

MatrixZonotope reduce(const MatrixZonotope& m, Index max_generators, ReductionMethod method)
{
    if (max_generators < m.center().size())
        throw PreconditionError("reduce: order " + std::to_string(max_generators) + " below entry count " +
                                std::to_string(m.center().size()));
    if (m.num_generators() <= max_generators)
        return m;
    return unvectorize(reduce(vectorize(m), max_generators, method), m.rows(), m.cols());
}

Matrix sample(const MatrixZonotope& m, Rng& rng, SamplingMode mode)
{
    Matrix out = m.center();
    for (const auto& g : m.generators()) {
        const double b = mode == SamplingMode::Uniform ? rng.uniform(-1.0, 1.0) : (rng.uniform() < 0.5 ? -1.0 : 1.0);
        out += b * g;
    }
    return out;
}

IntervalMatrix interval_matrix(const MatrixZonotope& m)
{
    Matrix radius = Matrix::Zero(m.rows(), m.cols());
    for (const auto& g : m.generators())
        radius += g.cwiseAbs();
    return IntervalMatrix(m.center() - radius, m.center() + radius);
}

double interval_frobenius(const IntervalMatrix& im)
{
    return (im.midpoint().cwiseAbs() + im.radius()).norm();
}

Zonotope multiply(const MatrixZonotope& m, const Zonotope& z)
{
    if (m.cols() != z.dim())
        throw DimensionError("multiply: matrix zonotope is " + shape(m.rows(), m.cols()) +
                             " but zonotope has dimension " + std::to_string(z.dim()));
    const Index block = 1 + z.num_generators();
    Matrix g(m.rows(), z.num_generators() + m.num_generators() * block);
    g.leftCols(z.num_generators()) = m.center() * z.generators();
    Index col = z.num_generators();
    for (const auto& a : m.generators()) {
        g.col(col) = a * z.center();
        g.middleCols(col + 1, z.num_generators()) = a * z.generators();
        col += block;
    }
    return Zonotope(m.center() * z.center(), g);
}

double hull_radius_sum(const Zonotope& z)
{
    return z.generators().cwiseAbs().sum();
}

} // namespace zreach
