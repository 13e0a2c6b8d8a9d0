#ifndef ZREACH_ESTIMATOR_HPP
#define ZREACH_ESTIMATOR_HPP

#include "zreach/serialization.hpp"
#include "zreach/zonotope.hpp"

#include <span>
#include <vector>

namespace zreach
{

/// rows*cols single-entry matrices with value sigma, one per position,
/// enumerated column-major.
class SingleEntryBasis
{
public:
    SingleEntryBasis() = default;
    SingleEntryBasis(Index rows, Index cols, double sigma);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    double sigma() const { return sigma_; }

    std::vector<Matrix> matrices() const;
    /// sum_l B_l B_l^T over the basis.
    Matrix outer_sum() const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    double sigma_ = 0.0;
};

/// Measurement noise v_k in <0, {Q_v^(l)}>, p x m, |v_ij| <= sigma_v.
class NoiseStructure : public SingleEntryBasis
{
public:
    using SingleEntryBasis::SingleEntryBasis;
    /// Q = m sigma_v^2 I_p, i.e. outer_sum() of the basis.
    Matrix q_matrix() const { return cols() * sigma() * sigma() * Matrix::Identity(rows(), rows()); }
};

/// Parameter drift per step in <0, {G_theta^(l)}>, n x m, |d_ij| <= sigma_theta.
class DriftStructure : public SingleEntryBasis
{
public:
    using SingleEntryBasis::SingleEntryBasis;
};

struct UpdateDiagnostics
{
    /// sigma_min(I - K phi) / sigma_max(I - K phi).
    double transition_rcond = 1.0;
    bool rank_warning = false;
    double min_covariance_eig = 0.0;
    Index generators_before_reduction = 0;
};

/// State of the exponentially forgetting zonotopic RLS recursion for
/// y_k = phi_k theta_k + v_k with theta (n x m), phi (p x n), y (p x m).
class EstimatorState
{
public:
    const Matrix& center() const { return center_; }
    const std::vector<Matrix>& generators() const { return generators_; }
    const Matrix& covariance() const { return covariance_; }
    /// Square-root factor S with S S^T = covariance().
    const Matrix& covariance_factor() const { return factor_; }
    double lambda() const { return lambda_; }
    const NoiseStructure& noise() const { return noise_; }
    const DriftStructure& drift() const { return drift_; }
    Index reduction_order() const { return reduction_order_; }
    Index step() const { return step_; }
    const UpdateDiagnostics& last_update() const { return diagnostics_; }

    Index param_rows() const { return center_.rows(); }
    Index param_cols() const { return center_.cols(); }

    friend EstimatorState init(Matrix, std::vector<Matrix>, Matrix, double, NoiseStructure, DriftStructure, Index);
    friend EstimatorState update(const EstimatorState&, const Matrix&, const Matrix&);
    friend EstimatorState estimator_from_json(const Json&);

private:
    Matrix center_;
    std::vector<Matrix> generators_;
    Matrix covariance_;
    Matrix factor_;
    double lambda_ = 1.0;
    NoiseStructure noise_;
    DriftStructure drift_;
    Index reduction_order_ = 0;
    Index step_ = 0;
    UpdateDiagnostics diagnostics_;
};

/// Validated initial state. Requires P0 symmetric positive definite,
/// lambda in (0, 1], rank of the vectorized G0 >= n m, and a reduction order
/// of at least n m (0 selects the default 5 n m).
EstimatorState init(Matrix center, std::vector<Matrix> generators, Matrix covariance, double lambda,
                    NoiseStructure noise, DriftStructure drift, Index reduction_order = 0);

/// C0 = 0, P0 = tau I, G0 = {g0 E_i} over all n m positions.
EstimatorState init_default(Index n, Index m, double lambda, NoiseStructure noise, DriftStructure drift,
                            double tau = 1e7, double g0_scale = 1.5, Index reduction_order = 0);

/// Batch warm start C0 = Phi^+ Y from stacked regressors/outputs.
/// Requires Phi to have full column rank.
Matrix warm_start_center(std::span<const Matrix> regressors, std::span<const Matrix> outputs);

struct Gain
{
    Matrix gain;       ///< K, n x p
    Matrix innovation; ///< Lambda = phi P phi^T + lambda Q, p x p
};

/// K = P phi^T (phi P phi^T + lambda Q)^-1. Throws NumericError when the
/// innovation matrix is singular.
Gain optimal_gain(const Matrix& covariance, const Matrix& phi, double lambda, const Matrix& q);

/// One recursion step with regressor phi (p x n) and measurement y (p x m).
/// Old generators are scaled by lambda^-1/2 (I - K phi) and joined by
/// -K Q_v^(l); with sigma_theta > 0 the drift terms (I - K phi) G_theta^(l)
/// are kept as generators too. The set then contains the parameter behind y
/// whenever the previous set held the one before the drift.
EstimatorState update(const EstimatorState& state, const Matrix& phi, const Matrix& y);

/// <C_k, G_k>, or its transpose (the [A B] = theta^T convention).
MatrixZonotope model_set(const EstimatorState& state, bool transposed = false);

struct Excitation
{
    double alpha = 0.0; ///< min over windows of lambda_min(sum phi^T phi)
    double beta = 0.0;  ///< max over windows of lambda_max(sum phi^T phi)
    bool persistent() const { return alpha > 0.0; }
};

/// Persistent-excitation bounds over all windows of length window.
Excitation pe_check(std::span<const Matrix> regressors, Index window);

Json estimator_to_json(const EstimatorState& state);
EstimatorState estimator_from_json(const Json& j);

} // namespace zreach

#endif
