#include "zreach/containment.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace zreach
{

namespace lp
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-11;
constexpr double kFeasTol = 1e-9;

enum class Status : unsigned char
{
    Basic,
    AtLower,
    AtUpper
};

} // namespace

BoxFeasibility box_equality_feasible(const Matrix& a_in, const Vector& b_in, double bound)
{
    if (a_in.rows() != b_in.size())
        throw DimensionError("box_equality_feasible: row count mismatch");
    if (!(bound >= 0.0))
        throw PreconditionError("box_equality_feasible: bound must be nonnegative");

    const Index cols = a_in.cols();
    BoxFeasibility out;
    out.witness = Vector::Zero(cols);

    // Row scaling; an all-zero row is either trivially satisfied or infeasible.
    std::vector<Index> rows_kept;
    const double b_scale = 1.0 + b_in.cwiseAbs().maxCoeff();
    for (Index i = 0; i < a_in.rows(); ++i) {
        const double s = cols > 0 ? a_in.row(i).cwiseAbs().maxCoeff() : 0.0;
        if (s > 0.0)
            rows_kept.push_back(i);
        else if (std::abs(b_in(i)) > kFeasTol * b_scale) {
            out.infeasibility = std::abs(b_in(i));
            return out;
        }
    }
    const Index m = static_cast<Index>(rows_kept.size());
    if (m == 0) {
        out.feasible = true;
        return out;
    }
    Matrix a(m, cols);
    Vector b(m);
    for (Index r = 0; r < m; ++r) {
        const Index i = rows_kept[static_cast<std::size_t>(r)];
        const double s = a_in.row(i).cwiseAbs().maxCoeff();
        a.row(r) = a_in.row(i) / s;
        b(r) = b_in(i) / s;
    }

    // Variables: [0, cols) structural in [-bound, bound]; [cols, cols + m)
    // artificial in [0, inf). Start with structurals at their lower bound and
    // the artificial basis absorbing the residual.
    const Index total = cols + m;
    std::vector<double> lower(static_cast<std::size_t>(total), 0.0);
    std::vector<double> upper(static_cast<std::size_t>(total), kInf);
    std::vector<Status> status(static_cast<std::size_t>(total), Status::AtLower);
    for (Index j = 0; j < cols; ++j) {
        lower[static_cast<std::size_t>(j)] = -bound;
        upper[static_cast<std::size_t>(j)] = bound;
    }

    const Vector residual = b + bound * a.rowwise().sum();
    Matrix tab(m, total);
    Vector xb(m);
    std::vector<Index> basis(static_cast<std::size_t>(m));
    tab.setZero();
    for (Index r = 0; r < m; ++r) {
        const double sign = residual(r) >= 0.0 ? 1.0 : -1.0;
        tab.row(r).head(cols) = sign * a.row(r);
        tab(r, cols + r) = 1.0;
        xb(r) = std::abs(residual(r));
        basis[static_cast<std::size_t>(r)] = cols + r;
        status[static_cast<std::size_t>(cols + r)] = Status::Basic;
    }

    // Reduced costs for the phase-I objective sum(artificials).
    RowVector cost = RowVector::Zero(total);
    cost.tail(m).setOnes();
    RowVector reduced = cost - RowVector::Ones(m) * tab;

    const int max_iter = static_cast<int>(50 * (total + 10));
    const int bland_after = static_cast<int>(5 * (total + 10));
    int it = 0;
    for (; it < max_iter; ++it) {
        const bool bland = it >= bland_after;
        Index enter = -1;
        double dir = 0.0;
        double best = 0.0;
        for (Index j = 0; j < total; ++j) {
            const Status s = status[static_cast<std::size_t>(j)];
            if (s == Status::Basic)
                continue;
            const double d = reduced(j);
            double gain = 0.0;
            double jdir = 0.0;
            if (s == Status::AtLower && d < -kCostTol) {
                gain = -d;
                jdir = 1.0;
            }
            else if (s == Status::AtUpper && d > kCostTol) {
                gain = d;
                jdir = -1.0;
            }
            if (gain > 0.0 && (gain > best || (bland && enter < 0))) {
                best = gain;
                enter = j;
                dir = jdir;
                if (bland)
                    break;
            }
        }
        if (enter < 0)
            break;

        const std::size_t ej = static_cast<std::size_t>(enter);
        double step = upper[ej] - lower[ej];
        Index leave = -1;
        for (Index r = 0; r < m; ++r) {
            const double delta = dir * tab(r, enter);
            const std::size_t bj = static_cast<std::size_t>(basis[static_cast<std::size_t>(r)]);
            double limit = kInf;
            if (delta > kPivotTol)
                limit = (xb(r) - lower[bj]) / delta;
            else if (delta < -kPivotTol && upper[bj] < kInf)
                limit = (upper[bj] - xb(r)) / (-delta);
            else
                continue;
            if (limit < 0.0)
                limit = 0.0;
            if (limit < step || (limit == step && leave >= 0 && bland && basis[static_cast<std::size_t>(r)] <
                                                                             basis[static_cast<std::size_t>(leave)])) {
                step = limit;
                leave = r;
            }
        }
        if (step == kInf)
            break; // cannot happen for a bounded-below objective; bail out

        const double start = status[ej] == Status::AtLower ? lower[ej] : upper[ej];
        xb -= (step * dir) * tab.col(enter);
        const double entered_value = start + dir * step;

        if (leave < 0) {
            status[ej] = status[ej] == Status::AtLower ? Status::AtUpper : Status::AtLower;
            continue;
        }

        const std::size_t lj = static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)]);
        status[lj] = dir * tab(leave, enter) > 0.0 ? Status::AtLower : Status::AtUpper;
        status[ej] = Status::Basic;
        basis[static_cast<std::size_t>(leave)] = enter;
        xb(leave) = entered_value;

        const double pivot = tab(leave, enter);
        tab.row(leave) /= pivot;
        for (Index r = 0; r < m; ++r) {
            if (r == leave)
                continue;
            const double f = tab(r, enter);
            if (f != 0.0)
                tab.row(r) -= f * tab.row(leave);
        }
        const double f = reduced(enter);
        reduced -= f * tab.row(leave);
    }
    out.iterations = it;

    // Assemble the structural solution and measure the phase-I objective.
    double infeasibility = 0.0;
    for (Index j = 0; j < total; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        if (status[sj] == Status::Basic)
            continue;
        const double v = status[sj] == Status::AtLower ? lower[sj] : upper[sj];
        if (j < cols)
            out.witness(j) = v;
        else
            infeasibility += v;
    }
    for (Index r = 0; r < m; ++r) {
        const Index j = basis[static_cast<std::size_t>(r)];
        if (j < cols)
            out.witness(j) = std::min(bound, std::max(-bound, xb(r)));
        else
            infeasibility += std::max(0.0, xb(r));
    }
    out.infeasibility = infeasibility;
    // Confirm against the scaled system directly rather than trusting the
    // incrementally updated basic values.
    const double direct = (a * out.witness - b).cwiseAbs().sum();
    out.feasible = infeasibility <= kFeasTol * static_cast<double>(m) && direct <= 1e-8 * static_cast<double>(m);
    return out;
}

} // namespace lp

bool contains_point(const Zonotope& z, const Vector& x, double tol)
{
    if (x.size() != z.dim())
        throw DimensionError("contains_point: point dimension mismatch");
    if (!(tol >= 0.0))
        throw PreconditionError("contains_point: tolerance must be nonnegative");
    if (!x.allFinite())
        return false;
    const Vector d = x - z.center();
    const double scale = 1.0 + z.center().cwiseAbs().maxCoeff() + x.cwiseAbs().maxCoeff();
    if (z.is_singleton())
        return d.cwiseAbs().maxCoeff() <= 1e-12 * scale;
    // Cheap rejection outside the slack-inflated interval hull.
    const Vector radius = z.generators().cwiseAbs().rowwise().sum() * (1.0 + tol);
    if ((d.cwiseAbs().array() > radius.array() + 1e-12 * scale).any())
        return false;
    return lp::box_equality_feasible(z.generators(), d, 1.0 + tol).feasible;
}

bool contains_matrix(const MatrixZonotope& m, const Matrix& x, double tol)
{
    if (x.rows() != m.rows() || x.cols() != m.cols())
        throw DimensionError("contains_matrix: shape mismatch");
    return contains_point(vectorize(m), vec(x), tol);
}

std::optional<double> containment_gauge(const Zonotope& z, const Vector& x, double rel_tol)
{
    if (x.size() != z.dim())
        throw DimensionError("containment_gauge: point dimension mismatch");
    const Vector d = x - z.center();
    if (d.isZero(0.0))
        return 0.0;
    if (z.is_singleton())
        return std::nullopt;
    double hi = 1.0;
    while (!lp::box_equality_feasible(z.generators(), d, hi).feasible) {
        hi *= 4.0;
        if (hi > 1e12)
            return std::nullopt;
    }
    double lo = 0.0;
    while (hi - lo > rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (lp::box_equality_feasible(z.generators(), d, mid).feasible)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

} // namespace zreach
