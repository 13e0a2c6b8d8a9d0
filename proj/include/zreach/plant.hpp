#ifndef ZREACH_PLANT_HPP
#define ZREACH_PLANT_HPP

#include "zreach/rng.hpp"
#include "zreach/window.hpp"
#include "zreach/zonotope.hpp"

#include <optional>
#include <string>
#include <vector>

namespace zreach
{

enum class PlantKind
{
    Ltv,
    Cstr
};

/// x+ = A x + B u.
struct LtvModel
{
    Matrix a;
    Matrix b;
    /// [A B], n_x x (n_x + n_u).
    Matrix ab() const;
};

/// Two-state exothermic reactor (concentration x1, temperature x2), explicit
/// Euler step of length dt:
///   r   = k0 exp(-e / (x2 + t0)) x1
///   x1+ = x1 + dt (q (c_feed - x1) - r + u1)
///   x2+ = x2 + dt (q (t_feed - x2) + h r + rho u2)
struct CstrParams
{
    double dt = 0.1;
    double t0 = 20.0;
    double e = 30.0;
    double k0 = 2.0;
    double q = 1.0;
    double h = 2.0;
    double rho = 1.0;
    double c_feed = 1.0;
    double t_feed = 10.0;

    /// Feed values that make (x_eq, u_eq) an equilibrium of the map.
    CstrParams with_equilibrium(const Vector& x_eq, const Vector& u_eq) const;
};

struct PlantSpec
{
    PlantKind kind = PlantKind::Ltv;
    /// LTV model at step 0.
    LtvModel model;
    /// Deterministic per-step increments of A and B (may be empty = zero).
    Matrix delta_a;
    Matrix delta_b;
    /// Per-entry bound of an additional uniformly random increment each step.
    double random_drift = 0.0;
    /// Declared bound on ||[dA dB]||_max; negative means undeclared.
    double drift_bound = -1.0;
    CstrParams cstr;
    Zonotope noise;
    SamplingMode noise_mode = SamplingMode::Uniform;
    double dt = 0.1;

    Index state_dim() const;
    Index input_dim() const;
    bool drifts() const;
    /// Checks shapes and the declared drift bound; throws on violation.
    void validate() const;
};

/// Time-varying part of the plant state.
struct PlantClock
{
    Index step = 0;
    LtvModel model;
};

PlantClock start_clock(const PlantSpec& plant);

/// Noise-free one-step map under the current model.
Vector dynamics(const PlantSpec& plant, const LtvModel& model, const Vector& x, const Vector& u);

/// One simulated step. Samples noise from the plant's noise set, advances the
/// clock (and the drifting model), and reports the noise drawn.
Vector advance(const PlantSpec& plant, PlantClock& clock, const Vector& x, const Vector& u, Rng& rng,
               Vector* noise_out = nullptr);

struct Trajectory
{
    std::vector<Vector> states; ///< x_0 .. x_T
    std::vector<Vector> inputs; ///< u_0 .. u_{T-1}
    std::vector<Vector> noises; ///< w_0 .. w_{T-1} (simulation only)
    std::vector<Matrix> models; ///< true [A B] used at each step (LTV only)
    bool diverged = false;

    Index transitions() const { return static_cast<Index>(inputs.size()); }
    /// All transitions in shifted form.
    DataBatch batch() const;
};

/// Simulates from x0 under the given inputs. A non-finite state truncates the
/// trajectory and sets diverged.
Trajectory simulate(const PlantSpec& plant, const Vector& x0, const std::vector<Vector>& inputs, Rng& rng,
                    std::optional<PlantClock> clock = std::nullopt);

/// exp([Ac Bc; 0 0] dt) blocks: the zero-order-hold discretization.
LtvModel discretize(const Matrix& ac, const Matrix& bc, double dt);

/// Stable 5-state, 1-input system: two damped oscillators and a real mode,
/// unit input coupling, discretized at dt. Noise set <0, noise_scale I5>.
PlantSpec five_state_plant(double dt = 0.1, double noise_scale = 0.005);

/// Reactor with the given parameters and noise <0, noise_scale I2>.
PlantSpec cstr_plant(const CstrParams& params, double noise_scale = 0.003);

std::string to_string(PlantKind kind);
PlantKind plant_kind_from_string(const std::string& s);

} // namespace zreach

#endif
