#ifndef ZREACH_REACH_HPP
#define ZREACH_REACH_HPP

#include "zreach/estimator.hpp"
#include "zreach/serialization.hpp"
#include "zreach/window.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace zreach
{

/// Horizon N, per-step model drift bound sigma (sigma_AB for the linear
/// model, sigma_M for the affine one), U_0..U_{N-1}, Z_w, X_0 and the
/// generator limit applied to every reachable set.
struct ReachConfig
{
    Index horizon = 1;
    double sigma = 0.0;
    std::vector<Zonotope> input_sets;
    Zonotope noise_set;
    Zonotope initial_set;
    Index reduction_order = 60;

    /// Throws DimensionError/PreconditionError on inconsistent fields.
    void validate(Index state_dim, Index input_dim) const;
};

using LtvReachConfig = ReachConfig;
using LipReachConfig = ReachConfig;

struct ReachDiagnostics
{
    std::vector<Index> generators;   ///< per step, after reduction
    std::vector<Index> unreduced;    ///< per step, before reduction
    double delta_hat = 0.0;
    double i_m_max = 0.0;            ///< linear model only
    std::optional<Vector> l_lo;      ///< affine model only
    std::optional<Vector> l_hi;
    std::optional<Vector> l_hat;
    double wall_seconds = 0.0;
};

struct ReachResult
{
    std::vector<Zonotope> sets; ///< R_0 .. R_N
    ReachDiagnostics diagnostics;
};

/// <0, {k mu E_s}> over every entry position s of a rows x cols matrix.
MatrixZonotope perturbation_matzono(Index k, double mu, Index rows, Index cols);

/// max_i min_{j != i} ||z_i - z_j||.
double covering_radius(std::span<const Vector> points);

/// <0, (i_m_max delta_hat / 2) I>.
Zonotope epsilon_zonotope(double i_m_max, double delta_hat, Index n);

/// Linear-model recursion R_{k+1} = M_k (R_k x U_k) + Z_eps + Z_w with
/// M_k = model + perturbation_matzono(k, sigma). model is n_x x (n_x + n_u).
/// prior_i_m_max seeds the running supremum of the interval Frobenius norm.
ReachResult reach_ltv(const MatrixZonotope& model, double delta_hat, const ReachConfig& cfg,
                      double prior_i_m_max = 0.0);

/// Uses the transposed estimator set and the window's covering radius.
ReachResult reach_ltv(const EstimatorState& estimator, const SlidingWindow& window, const ReachConfig& cfg);

/// Elementwise min and max over the data of x+_j - C_M [1; x_j; u_j].
std::pair<Vector, Vector> lagrange_bounds(const DataBatch& data, const Matrix& c_m);

/// Box [lo, hi] as a zonotope.
Zonotope remainder_zonotope(const Vector& lo, const Vector& hi);

/// Per output o, max over pairs of |x+_{o,i} - x+_{o,j}| / ||z_i - z_j||,
/// skipping pairs closer than 1e-12.
Vector lipschitz_estimate(const DataBatch& data);

/// <0, diag(l_hat delta_hat / 2)>.
Zonotope eps_bar_zonotope(const Vector& l_hat, double delta_hat);

struct LipschitzTerms
{
    Vector l_lo;
    Vector l_hi;
    Vector l_hat;
    double delta_hat = 0.0;
};

/// Remainder bounds for the affine model c_m plus the Lipschitz and
/// covering-radius estimates, all from the same data.
LipschitzTerms lipschitz_terms(const DataBatch& data, const Matrix& c_m);

/// Affine-model recursion R_{k+1} = M_k ({1} x R_k x U_k) + Z_L + Z_epsbar + Z_w
/// with M_k = model + perturbation_matzono(k, sigma). model is
/// n_x x (1 + n_x + n_u). The terms stay fixed over the horizon.
ReachResult reach_lipschitz(const MatrixZonotope& model, const LipschitzTerms& terms, const ReachConfig& cfg);

/// Uses the transposed estimator set, with terms from the window.
ReachResult reach_lipschitz(const EstimatorState& estimator, const SlidingWindow& window, const ReachConfig& cfg);

/// {"sets": [...], "diagnostics": {...}}. Wall time is omitted unless asked
/// for, so that repeated runs serialize identically.
Json reach_to_json(const ReachResult& r, bool include_timing = false);
ReachResult reach_from_json(const Json& j);
/// Interval-hull bounds, columns step,dim,lower,upper.
void write_bounds_csv(const std::filesystem::path& path, const ReachResult& r);

} // namespace zreach

#endif
