#ifndef ZREACH_CONTAINMENT_HPP
#define ZREACH_CONTAINMENT_HPP

#include "zreach/zonotope.hpp"

#include <optional>

namespace zreach
{

/// Default slack on the factor bound, |b_i| <= 1 + tol.
inline constexpr double kContainmentTol = 1e-7;

/// True iff some b with |b_i| <= 1 + tol satisfies c + G b = x.
///
/// Decided as a linear feasibility problem; this is equivalent to asking
/// whether min ||b||_inf subject to c + G b = x is at most 1 + tol.
bool contains_point(const Zonotope& z, const Vector& x, double tol = kContainmentTol);

/// contains_point on the vectorized set and matrix.
bool contains_matrix(const MatrixZonotope& m, const Matrix& x, double tol = kContainmentTol);

/// min ||b||_inf subject to c + G b = x, or nullopt when x is off the affine
/// hull of z. Computed by bisection on the feasibility problem; meant for
/// diagnostics and tests, not hot loops.
std::optional<double> containment_gauge(const Zonotope& z, const Vector& x, double rel_tol = 1e-9);

namespace lp
{

struct BoxFeasibility
{
    bool feasible = false;
    Vector witness;          ///< candidate solution, clamped to the box
    double infeasibility = 0; ///< phase-I objective at termination (scaled rows)
    int iterations = 0;
};

/// Is there x with A x = b and -bound <= x_i <= bound? Bounded-variable
/// primal simplex, phase I only, Dantzig pricing with a Bland fallback.
BoxFeasibility box_equality_feasible(const Matrix& a, const Vector& b, double bound);

} // namespace lp

} // namespace zreach

#endif
