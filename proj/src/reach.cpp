#include "zreach/reach.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace zreach
{

namespace
{

double squared_distance(const Vector& a, const Vector& b)
{
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double d = a(i) - b(i);
        s += d * d;
    }
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Json optional_vector(const std::optional<Vector>& v)
{
    return v ? to_json(*v) : Json(nullptr);
}

} // namespace

void ReachConfig::validate(Index state_dim, Index input_dim) const
{
    if (horizon < 1)
        throw PreconditionError("reach: horizon must be at least 1");
    if (!(sigma >= 0.0))
        throw PreconditionError("reach: drift bound must be nonnegative");
    if (initial_set.dim() != state_dim)
        throw DimensionError("reach: initial set has dimension " + std::to_string(initial_set.dim()) + ", expected " +
                             std::to_string(state_dim));
    if (noise_set.dim() != state_dim)
        throw DimensionError("reach: noise set has dimension " + std::to_string(noise_set.dim()) + ", expected " +
                             std::to_string(state_dim));
    if (static_cast<Index>(input_sets.size()) != horizon)
        throw DimensionError("reach: need " + std::to_string(horizon) + " input sets, got " +
                             std::to_string(input_sets.size()));
    for (std::size_t k = 0; k < input_sets.size(); ++k)
        if (input_sets[k].dim() != input_dim)
            throw DimensionError("reach: input set " + std::to_string(k) + " has dimension " +
                                 std::to_string(input_sets[k].dim()) + ", expected " + std::to_string(input_dim));
    if (reduction_order < state_dim)
        throw PreconditionError("reach: reduction order must be at least the state dimension");
}

MatrixZonotope perturbation_matzono(Index k, double mu, Index rows, Index cols)
{
    if (k < 0 || !(mu >= 0.0))
        throw PreconditionError("perturbation_matzono: need k >= 0 and mu >= 0");
    std::vector<Matrix> gens;
    const double v = static_cast<double>(k) * mu;
    if (v > 0.0) {
        gens.reserve(static_cast<std::size_t>(rows * cols));
        for (Index j = 0; j < cols; ++j)
            for (Index i = 0; i < rows; ++i) {
                Matrix e = Matrix::Zero(rows, cols);
                e(i, j) = v;
                gens.push_back(std::move(e));
            }
    }
    return MatrixZonotope(Matrix::Zero(rows, cols), gens);
}

double covering_radius(std::span<const Vector> points)
{
    const std::size_t n = points.size();
    if (n < 2)
        throw PreconditionError("covering_radius: need at least 2 points");
    const Index dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim)
            throw DimensionError("covering_radius: points differ in dimension");

    // Sweep along the first coordinate; a neighbor search stops once the
    // coordinate gap alone exceeds the best distance found.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a](0) < points[b](0); });

    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const Vector& p = points[order[r]];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t s = r + 1; s < n; ++s) {
            const double gap = points[order[s]](0) - p(0);
            if (gap * gap > best)
                break;
            best = std::min(best, squared_distance(p, points[order[s]]));
        }
        for (std::size_t s = r; s-- > 0;) {
            const double gap = p(0) - points[order[s]](0);
            if (gap * gap > best)
                break;
            best = std::min(best, squared_distance(p, points[order[s]]));
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

Zonotope epsilon_zonotope(double i_m_max, double delta_hat, Index n)
{
    if (!(i_m_max >= 0.0) || !(delta_hat >= 0.0))
        throw PreconditionError("epsilon_zonotope: inputs must be nonnegative");
    return Zonotope(Vector::Zero(n), (0.5 * i_m_max * delta_hat) * Matrix::Identity(n, n));
}

ReachResult reach_ltv(const MatrixZonotope& model, double delta_hat, const ReachConfig& cfg, double prior_i_m_max)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Index nx = model.rows();
    const Index nu = model.cols() - nx;
    if (nu < 0)
        throw DimensionError("reach_ltv: model must be n_x x (n_x + n_u)");
    cfg.validate(nx, nu);
    if (!(delta_hat >= 0.0))
        throw PreconditionError("reach_ltv: covering radius must be nonnegative");

    std::vector<MatrixZonotope> models;
    models.reserve(static_cast<std::size_t>(cfg.horizon));
    double i_m_max = prior_i_m_max;
    for (Index k = 0; k < cfg.horizon; ++k) {
        models.push_back(minkowski_sum(model, perturbation_matzono(k, cfg.sigma, nx, nx + nu)));
        i_m_max = std::max(i_m_max, interval_frobenius(interval_matrix(models.back())));
    }
    const Zonotope z_eps = epsilon_zonotope(i_m_max, delta_hat, nx);
    const Zonotope inflation = minkowski_sum(z_eps, cfg.noise_set);

    ReachResult out;
    out.diagnostics.delta_hat = delta_hat;
    out.diagnostics.i_m_max = i_m_max;
    out.sets.push_back(cfg.initial_set);
    out.diagnostics.generators.push_back(cfg.initial_set.num_generators());
    out.diagnostics.unreduced.push_back(cfg.initial_set.num_generators());
    for (Index k = 0; k < cfg.horizon; ++k) {
        const auto s = static_cast<std::size_t>(k);
        const Zonotope next = minkowski_sum(multiply(models[s], cartesian_product(out.sets.back(), cfg.input_sets[s])),
                                            inflation);
        out.diagnostics.unreduced.push_back(next.num_generators());
        out.sets.push_back(reduce(next, cfg.reduction_order));
        out.diagnostics.generators.push_back(out.sets.back().num_generators());
    }
    out.diagnostics.wall_seconds = seconds_since(t0);
    return out;
}

ReachResult reach_ltv(const EstimatorState& estimator, const SlidingWindow& window, const ReachConfig& cfg)
{
    if (window.empty())
        throw PreconditionError("reach_ltv: window is empty");
    const MatrixZonotope m = model_set(estimator, true);
    if (m.rows() != window.state_dim() || m.cols() != window.state_dim() + window.input_dim())
        throw DimensionError("reach_ltv: estimator set is " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) + " but the window implies " +
                             std::to_string(window.state_dim()) + "x" +
                             std::to_string(window.state_dim() + window.input_dim()));
    const auto points = window.batch().points();
    const double delta = points.size() < 2 ? 0.0 : covering_radius(points);
    return reach_ltv(m, delta, cfg);
}

std::pair<Vector, Vector> lagrange_bounds(const DataBatch& data, const Matrix& c_m)
{
    if (data.size() == 0)
        throw PreconditionError("lagrange_bounds: empty window");
    const Index nx = data.state_dim();
    if (c_m.rows() != nx || c_m.cols() != 1 + nx + data.input_dim())
        throw DimensionError("lagrange_bounds: model center must be n_x x (1 + n_x + n_u)");
    const Matrix residuals = data.x_plus - c_m * data.data_matrix(true);
    return {residuals.rowwise().minCoeff(), residuals.rowwise().maxCoeff()};
}

Zonotope remainder_zonotope(const Vector& lo, const Vector& hi)
{
    if (lo.size() != hi.size())
        throw DimensionError("remainder_zonotope: bound lengths differ");
    if ((lo.array() > hi.array()).any())
        throw PreconditionError("remainder_zonotope: lower bound exceeds upper bound");
    return Zonotope::from_box(lo, hi);
}

Vector lipschitz_estimate(const DataBatch& data)
{
    const Index n = data.size();
    if (n < 2)
        throw PreconditionError("lipschitz_estimate: need at least 2 data points");
    const auto z = data.points();
    Vector l = Vector::Zero(data.state_dim());
    bool any = false;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double dist = std::sqrt(squared_distance(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]));
            if (dist < 1e-12)
                continue;
            any = true;
            for (Index o = 0; o < l.size(); ++o)
                l(o) = std::max(l(o), std::abs(data.x_plus(o, i) - data.x_plus(o, j)) / dist);
        }
    if (!any)
        throw PreconditionError("lipschitz_estimate: all regressor points coincide");
    return l;
}

Zonotope eps_bar_zonotope(const Vector& l_hat, double delta_hat)
{
    if ((l_hat.array() < 0.0).any() || !(delta_hat >= 0.0))
        throw PreconditionError("eps_bar_zonotope: inputs must be nonnegative");
    return Zonotope(Vector::Zero(l_hat.size()), Matrix((0.5 * delta_hat * l_hat).asDiagonal()));
}

LipschitzTerms lipschitz_terms(const DataBatch& data, const Matrix& c_m)
{
    LipschitzTerms t;
    std::tie(t.l_lo, t.l_hi) = lagrange_bounds(data, c_m);
    t.l_hat = lipschitz_estimate(data);
    t.delta_hat = covering_radius(data.points());
    return t;
}

ReachResult reach_lipschitz(const MatrixZonotope& model, const LipschitzTerms& terms, const ReachConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Index nx = model.rows();
    const Index nu = model.cols() - 1 - nx;
    if (nu < 0)
        throw DimensionError("reach_lipschitz: model must be n_x x (1 + n_x + n_u)");
    cfg.validate(nx, nu);
    if (terms.l_lo.size() != nx || terms.l_hi.size() != nx || terms.l_hat.size() != nx)
        throw DimensionError("reach_lipschitz: remainder terms must have the state dimension");

    const Zonotope inflation = minkowski_sum(
        minkowski_sum(remainder_zonotope(terms.l_lo, terms.l_hi), eps_bar_zonotope(terms.l_hat, terms.delta_hat)),
        cfg.noise_set);
    const Zonotope one(Vector::Ones(1));

    ReachResult out;
    out.diagnostics.delta_hat = terms.delta_hat;
    out.diagnostics.l_lo = terms.l_lo;
    out.diagnostics.l_hi = terms.l_hi;
    out.diagnostics.l_hat = terms.l_hat;
    out.sets.push_back(cfg.initial_set);
    out.diagnostics.generators.push_back(cfg.initial_set.num_generators());
    out.diagnostics.unreduced.push_back(cfg.initial_set.num_generators());
    for (Index k = 0; k < cfg.horizon; ++k) {
        const MatrixZonotope mk = minkowski_sum(model, perturbation_matzono(k, cfg.sigma, nx, 1 + nx + nu));
        const Zonotope aug =
            cartesian_product(one, cartesian_product(out.sets.back(), cfg.input_sets[static_cast<std::size_t>(k)]));
        const Zonotope next = minkowski_sum(multiply(mk, aug), inflation);
        out.diagnostics.unreduced.push_back(next.num_generators());
        out.sets.push_back(reduce(next, cfg.reduction_order));
        out.diagnostics.generators.push_back(out.sets.back().num_generators());
    }
    out.diagnostics.wall_seconds = seconds_since(t0);
    return out;
}

ReachResult reach_lipschitz(const EstimatorState& estimator, const SlidingWindow& window, const ReachConfig& cfg)
{
    const MatrixZonotope m = model_set(estimator, true);
    if (m.rows() != window.state_dim() || m.cols() != 1 + window.state_dim() + window.input_dim())
        throw DimensionError("reach_lipschitz: estimator set shape does not match the affine regressor of the window");
    return reach_lipschitz(m, lipschitz_terms(window.batch(), m.center()), cfg);
}

Json reach_to_json(const ReachResult& r, bool include_timing)
{
    Json sets = Json::array();
    for (const auto& z : r.sets)
        sets.push_back(to_json(z));
    Json diag{{"generators", r.diagnostics.generators},
              {"unreduced_generators", r.diagnostics.unreduced},
              {"delta_hat", r.diagnostics.delta_hat},
              {"i_m_max", r.diagnostics.i_m_max},
              {"l_lo", optional_vector(r.diagnostics.l_lo)},
              {"l_hi", optional_vector(r.diagnostics.l_hi)},
              {"l_hat", optional_vector(r.diagnostics.l_hat)}};
    if (include_timing)
        diag["wall_seconds"] = r.diagnostics.wall_seconds;
    return Json{{"sets", std::move(sets)}, {"diagnostics", std::move(diag)}};
}

ReachResult reach_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("sets") || !j.at("sets").is_array())
        throw FormatError("reach: missing \"sets\" array");
    ReachResult r;
    const Json& sets = j.at("sets");
    for (std::size_t k = 0; k < sets.size(); ++k)
        r.sets.push_back(zonotope_from_json(sets[k], "reach.sets[" + std::to_string(k) + "]"));
    if (j.contains("diagnostics")) {
        const Json& d = j.at("diagnostics");
        auto opt = [&](const char* key) -> std::optional<Vector> {
            if (!d.contains(key) || d.at(key).is_null())
                return std::nullopt;
            return vector_from_json(d.at(key), std::string("reach.diagnostics.") + key);
        };
        if (d.contains("generators"))
            r.diagnostics.generators = d.at("generators").get<std::vector<Index>>();
        if (d.contains("unreduced_generators"))
            r.diagnostics.unreduced = d.at("unreduced_generators").get<std::vector<Index>>();
        r.diagnostics.delta_hat = d.value("delta_hat", 0.0);
        r.diagnostics.i_m_max = d.value("i_m_max", 0.0);
        r.diagnostics.wall_seconds = d.value("wall_seconds", 0.0);
        r.diagnostics.l_lo = opt("l_lo");
        r.diagnostics.l_hi = opt("l_hi");
        r.diagnostics.l_hat = opt("l_hat");
    }
    return r;
}

void write_bounds_csv(const std::filesystem::path& path, const ReachResult& r)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError(path.string() + ": cannot write");
    out.precision(17);
    out << "step,dim,lower,upper\n";
    for (std::size_t k = 0; k < r.sets.size(); ++k) {
        const IntervalMatrix h = interval_hull(r.sets[k]);
        for (Index i = 0; i < h.rows(); ++i)
            out << k << ',' << i << ',' << h.lower()(i, 0) << ',' << h.upper()(i, 0) << '\n';
    }
}

} // namespace zreach
