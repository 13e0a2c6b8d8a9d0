#include "zreach/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace zreach
{

namespace
{

constexpr double kRankWarnThreshold = 1e-10;
constexpr double kDefiniteTol = 1e-9;

std::string shape(Index r, Index c)
{
    return std::to_string(r) + "x" + std::to_string(c);
}

void check_positive_definite(const Matrix& p, const char* what)
{
    if (p.rows() != p.cols())
        throw DimensionError(std::string(what) + ": covariance must be square");
    if (!p.allFinite())
        throw NumericError(std::string(what) + ": covariance has non-finite entries");
    const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * (1.0 + p.cwiseAbs().maxCoeff()))
        throw PreconditionError(std::string(what) + ": covariance is not symmetric");
    Eigen::LLT<Matrix> llt(p);
    if (llt.info() != Eigen::Success)
        throw PreconditionError(std::string(what) + ": covariance is not positive definite");
}

} // namespace

SingleEntryBasis::SingleEntryBasis(Index rows, Index cols, double sigma) : rows_(rows), cols_(cols), sigma_(sigma)
{
    if (rows < 1 || cols < 1)
        throw PreconditionError("single-entry basis: dimensions must be positive");
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
        throw PreconditionError("single-entry basis: sigma must be finite and nonnegative");
}

std::vector<Matrix> SingleEntryBasis::matrices() const
{
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(rows_ * cols_));
    for (Index j = 0; j < cols_; ++j)
        for (Index i = 0; i < rows_; ++i) {
            Matrix e = Matrix::Zero(rows_, cols_);
            e(i, j) = sigma_;
            out.push_back(std::move(e));
        }
    return out;
}

Matrix SingleEntryBasis::outer_sum() const
{
    Matrix s = Matrix::Zero(rows_, rows_);
    for (const auto& b : matrices())
        s += b * b.transpose();
    return s;
}

EstimatorState init(Matrix center, std::vector<Matrix> generators, Matrix covariance, double lambda,
                    NoiseStructure noise, DriftStructure drift, Index reduction_order)
{
    const Index n = center.rows();
    const Index m = center.cols();
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw PreconditionError("estimator init: lambda must lie in (0, 1], got " + std::to_string(lambda));
    if (covariance.rows() != n)
        throw DimensionError("estimator init: covariance is " + shape(covariance.rows(), covariance.cols()) +
                             ", expected " + shape(n, n));
    check_positive_definite(covariance, "estimator init");
    if (noise.cols() != m)
        throw DimensionError("estimator init: noise structure has " + std::to_string(noise.cols()) +
                             " columns, parameters have " + std::to_string(m));
    if (drift.rows() != n || drift.cols() != m)
        throw DimensionError("estimator init: drift structure shape differs from parameter shape");

    Matrix stacked(n * m, static_cast<Index>(generators.size()));
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (generators[i].rows() != n || generators[i].cols() != m)
            throw DimensionError("estimator init: generator " + std::to_string(i) + " is " +
                                 shape(generators[i].rows(), generators[i].cols()) + ", expected " + shape(n, m));
        stacked.col(static_cast<Index>(i)) = vec(generators[i]);
    }
    if (Eigen::FullPivLU<Matrix>(stacked).rank() < n * m)
        throw PreconditionError("estimator init: initial generators have rank below n*m = " + std::to_string(n * m));

    if (reduction_order == 0)
        reduction_order = 5 * n * m;
    if (reduction_order < n * m)
        throw PreconditionError("estimator init: reduction order " + std::to_string(reduction_order) +
                                " below n*m = " + std::to_string(n * m));

    EstimatorState s;
    s.center_ = std::move(center);
    s.covariance_ = std::move(covariance);
    s.factor_ = Eigen::LLT<Matrix>(s.covariance_).matrixL();
    s.lambda_ = lambda;
    s.noise_ = noise;
    s.drift_ = drift;
    s.reduction_order_ = reduction_order;
    const MatrixZonotope reduced = reduce(MatrixZonotope(s.center_, generators), reduction_order, ReductionMethod::Pca);
    s.generators_ = reduced.generators();
    return s;
}

EstimatorState init_default(Index n, Index m, double lambda, NoiseStructure noise, DriftStructure drift, double tau,
                            double g0_scale, Index reduction_order)
{
    if (!(tau > 0.0))
        throw PreconditionError("estimator init: tau must be positive");
    std::vector<Matrix> g0 = SingleEntryBasis(n, m, g0_scale).matrices();
    return init(Matrix::Zero(n, m), std::move(g0), tau * Matrix::Identity(n, n), lambda, noise, drift,
                reduction_order);
}

Matrix warm_start_center(std::span<const Matrix> regressors, std::span<const Matrix> outputs)
{
    if (regressors.empty() || regressors.size() != outputs.size())
        throw PreconditionError("warm start: need equally many regressors and outputs");
    const Index n = regressors.front().cols();
    const Index m = outputs.front().cols();
    Index rows = 0;
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        if (regressors[i].cols() != n || outputs[i].cols() != m || regressors[i].rows() != outputs[i].rows())
            throw DimensionError("warm start: inconsistent snapshot shapes at index " + std::to_string(i));
        rows += regressors[i].rows();
    }
    Matrix phi(rows, n);
    Matrix y(rows, m);
    Index r = 0;
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        phi.middleRows(r, regressors[i].rows()) = regressors[i];
        y.middleRows(r, outputs[i].rows()) = outputs[i];
        r += regressors[i].rows();
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(phi);
    if (cod.rank() < n)
        throw PreconditionError("warm start: stacked regressors have rank " + std::to_string(cod.rank()) +
                                " below " + std::to_string(n));
    return cod.solve(y);
}

Gain optimal_gain(const Matrix& covariance, const Matrix& phi, double lambda, const Matrix& q)
{
    const Index n = covariance.rows();
    const Index p = phi.rows();
    if (covariance.cols() != n || phi.cols() != n)
        throw DimensionError("optimal_gain: phi is " + shape(phi.rows(), phi.cols()) + ", covariance is " +
                             shape(covariance.rows(), covariance.cols()));
    if (q.rows() != p || q.cols() != p)
        throw DimensionError("optimal_gain: Q must be " + shape(p, p));

    const Matrix pt = covariance * phi.transpose();
    Matrix innovation = phi * pt + lambda * q;
    innovation = 0.5 * (innovation + innovation.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> eig(innovation);
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double emin = eig.eigenvalues().minCoeff();
    if (!(emin > std::numeric_limits<double>::epsilon() * static_cast<double>(p) * emax) || !(emax > 0.0))
        throw NumericError("optimal_gain: innovation matrix phi P phi^T + lambda Q is singular (lambda_min = " +
                           std::to_string(emin) + ")");
    // K = P phi^T Lambda^-1, via K^T = Lambda^-1 phi P.
    Matrix gain = innovation.llt().solve(pt.transpose()).transpose();
    return Gain{std::move(gain), std::move(innovation)};
}

EstimatorState update(const EstimatorState& state, const Matrix& phi, const Matrix& y)
{
    const Index n = state.param_rows();
    const Index m = state.param_cols();
    const Index p = state.noise().rows();
    if (phi.rows() != p || phi.cols() != n)
        throw DimensionError("update: regressor is " + shape(phi.rows(), phi.cols()) + ", expected " + shape(p, n));
    if (y.rows() != p || y.cols() != m)
        throw DimensionError("update: measurement is " + shape(y.rows(), y.cols()) + ", expected " + shape(p, m));
    if (!phi.allFinite() || !y.allFinite())
        throw NumericError("update: non-finite regressor or measurement at step " + std::to_string(state.step()));

    // Square-root array step: with pre = [R^1/2  phi S; 0  S], R = lambda Q and
    // P = S S^T, an orthogonal transform gives pre Theta = [L^1/2 0; Kb St]
    // with L = phi P phi^T + R, K = Kb L^-1/2 and St St^T = (I - K phi) P.
    const Matrix& s_old = state.covariance_factor();
    const Matrix r = state.lambda() * state.noise().q_matrix();
    Matrix pre = Matrix::Zero(p + n, p + n);
    Eigen::LLT<Matrix> r_llt(r);
    if (r_llt.info() == Eigen::Success)
        pre.topLeftCorner(p, p) = r_llt.matrixL();
    pre.topRightCorner(p, n) = phi * s_old;
    pre.bottomRightCorner(n, n) = s_old;
    Eigen::HouseholderQR<Matrix> qr(pre.transpose());
    const Matrix post = qr.matrixQR().triangularView<Eigen::Upper>().toDenseMatrix().transpose();
    const Matrix l11 = post.topLeftCorner(p, p);
    Eigen::FullPivLU<Matrix> l11_lu(l11.transpose());
    if (!l11_lu.isInvertible())
        throw NumericError("update: innovation matrix phi P phi^T + lambda Q is singular at step " +
                           std::to_string(state.step()));
    const Matrix gain = l11_lu.solve(post.bottomLeftCorner(n, p).transpose()).transpose();
    const Matrix transition = Matrix::Identity(n, n) - gain * phi;

    EstimatorState next = state;
    next.center_ = transition * state.center() + gain * y;

    const double inflate = 1.0 / std::sqrt(state.lambda());
    std::vector<Matrix> gens;
    gens.reserve(state.generators().size() + static_cast<std::size_t>(p * m));
    for (const auto& gi : state.generators())
        gens.push_back(inflate * (transition * gi));
    for (const auto& qv : state.noise().matrices())
        gens.push_back(-(gain * qv));
    if (state.drift().sigma() > 0.0)
        for (const auto& gt : state.drift().matrices())
            gens.push_back(transition * gt);

    next.factor_ = post.bottomRightCorner(n, n) * inflate;
    Matrix cov = next.factor_ * next.factor_.transpose();
    cov = 0.5 * (cov + cov.transpose());
    next.covariance_ = cov;

    UpdateDiagnostics diag;
    Eigen::JacobiSVD<Matrix> svd(transition);
    const auto& sv = svd.singularValues();
    diag.transition_rcond = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
    if (!(diag.transition_rcond > 0.0))
        throw NumericError("update: I - K phi is singular at step " + std::to_string(state.step()));
    diag.rank_warning = diag.transition_rcond <= kRankWarnThreshold;

    if (!cov.allFinite())
        throw NumericError("update: covariance became non-finite at step " + std::to_string(state.step()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    diag.min_covariance_eig = eig.eigenvalues().minCoeff();
    const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (diag.min_covariance_eig <= -kDefiniteTol * emax || !(emax > 0.0))
        throw NumericError("update: covariance lost positive definiteness at step " + std::to_string(state.step()) +
                           " (lambda_min = " + std::to_string(diag.min_covariance_eig) +
                           ", lambda_max = " + std::to_string(emax) + ")");

    MatrixZonotope set(next.center_, gens);
    diag.generators_before_reduction = set.num_generators();
    // Reduce in covariance-whitened coordinates, one factor block per column.
    Matrix frame = Matrix::Zero(n * m, n * m);
    for (Index j = 0; j < m; ++j)
        frame.block(j * n, j * n, n, n) = next.factor_;
    next.generators_ = unvectorize(reduce_in_frame(vectorize(set), state.reduction_order(), frame), n, m).generators();
    next.step_ = state.step() + 1;
    next.diagnostics_ = diag;
    return next;
}

MatrixZonotope model_set(const EstimatorState& state, bool transposed)
{
    MatrixZonotope m(state.center(), state.generators());
    return transposed ? m.transposed() : m;
}

Excitation pe_check(std::span<const Matrix> regressors, Index window)
{
    if (regressors.empty())
        throw PreconditionError("pe_check: no regressors");
    if (window < 1 || static_cast<std::size_t>(window) > regressors.size())
        throw PreconditionError("pe_check: window length must be in [1, " + std::to_string(regressors.size()) + "]");
    const Index n = regressors.front().cols();
    Excitation out;
    out.alpha = std::numeric_limits<double>::infinity();
    const std::size_t w = static_cast<std::size_t>(window);
    for (std::size_t j = 0; j + w <= regressors.size(); ++j) {
        Matrix gram = Matrix::Zero(n, n);
        for (std::size_t i = j; i < j + w; ++i) {
            if (regressors[i].cols() != n)
                throw DimensionError("pe_check: regressor " + std::to_string(i) + " has the wrong width");
            gram += regressors[i].transpose() * regressors[i];
        }
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
        out.alpha = std::min(out.alpha, eig.eigenvalues().minCoeff());
        out.beta = std::max(out.beta, eig.eigenvalues().maxCoeff());
    }
    // Rounding leaves tiny nonzero eigenvalues on rank-deficient sums.
    if (out.alpha <= 1e-12 * std::max(1.0, out.beta))
        out.alpha = 0.0;
    return out;
}

Json estimator_to_json(const EstimatorState& state)
{
    Json gens = Json::array();
    for (const auto& g : state.generators())
        gens.push_back(to_json(g));
    auto basis = [](const SingleEntryBasis& b) {
        return Json{{"rows", b.rows()}, {"cols", b.cols()}, {"sigma", b.sigma()}};
    };
    return Json{{"center", to_json(state.center())},
                {"generators", std::move(gens)},
                {"covariance", to_json(state.covariance())},
                {"covariance_factor", to_json(state.covariance_factor())},
                {"lambda", state.lambda()},
                {"step", state.step()},
                {"reduction_order", state.reduction_order()},
                {"noise", basis(state.noise())},
                {"drift", basis(state.drift())}};
}

EstimatorState estimator_from_json(const Json& j)
{
    auto field = [&](const char* key) -> const Json& {
        if (!j.contains(key))
            throw FormatError(std::string("estimator.") + key + ": missing");
        return j.at(key);
    };
    auto basis = [&](const char* key) {
        const Json& b = field(key);
        return SingleEntryBasis(b.at("rows").get<Index>(), b.at("cols").get<Index>(), b.at("sigma").get<double>());
    };
    EstimatorState s;
    s.center_ = matrix_from_json(field("center"), "estimator.center");
    for (std::size_t i = 0; i < field("generators").size(); ++i) {
        Matrix g = matrix_from_json(field("generators")[i], "estimator.generators[" + std::to_string(i) + "]");
        s.generators_.push_back(std::move(g));
    }
    s.covariance_ = matrix_from_json(field("covariance"), "estimator.covariance");
    Eigen::LLT<Matrix> llt(s.covariance_);
    if (s.covariance_.rows() != s.covariance_.cols() || llt.info() != Eigen::Success)
        throw FormatError("estimator.covariance: not symmetric positive definite");
    if (j.contains("covariance_factor")) {
        s.factor_ = matrix_from_json(j.at("covariance_factor"), "estimator.covariance_factor");
        if (s.factor_.rows() != s.covariance_.rows() || s.factor_.cols() != s.covariance_.cols())
            throw FormatError("estimator.covariance_factor: shape does not match covariance");
    }
    else {
        s.factor_ = llt.matrixL();
    }
    s.lambda_ = field("lambda").get<double>();
    s.step_ = field("step").get<Index>();
    s.reduction_order_ = field("reduction_order").get<Index>();
    const SingleEntryBasis nb = basis("noise");
    const SingleEntryBasis db = basis("drift");
    s.noise_ = NoiseStructure(nb.rows(), nb.cols(), nb.sigma());
    s.drift_ = DriftStructure(db.rows(), db.cols(), db.sigma());
    if (!(s.lambda_ > 0.0 && s.lambda_ <= 1.0))
        throw FormatError("estimator.lambda: must lie in (0, 1]");
    if (s.covariance_.rows() != s.center_.rows() || s.covariance_.cols() != s.center_.rows())
        throw FormatError("estimator.covariance: shape does not match center");
    for (const auto& g : s.generators_)
        if (g.rows() != s.center_.rows() || g.cols() != s.center_.cols())
            throw FormatError("estimator.generators: shape does not match center");
    return s;
}

} // namespace zreach
