#ifndef ZREACH_VALIDATION_HPP
#define ZREACH_VALIDATION_HPP

#include "zreach/containment.hpp"
#include "zreach/plant.hpp"
#include "zreach/reach.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace zreach
{

struct Violation
{
    Index trajectory = 0;
    Index step = 0;
    Vector state;
    std::uint64_t seed = 0; ///< seed of the trajectory's random stream
};

struct ValidationReport
{
    std::uint64_t seed = 0;
    Index trajectories_sampled = 0;
    Index containment_checks = 0;
    Index diverged = 0;
    std::vector<Violation> violations;
    std::vector<double> per_step_set_radius;
    /// Filled by compare_with_baseline.
    std::vector<double> baseline_set_radius;
    std::vector<double> radius_delta; ///< baseline minus ours, per step

    bool passed() const { return violations.empty(); }
};

struct ValidationOptions
{
    SamplingMode sampling = SamplingMode::Uniform;
    /// Plant time and model at the start of the horizon; defaults to step 0.
    std::optional<PlantClock> clock;
    double tol = kContainmentTol;
    /// When set, receives every simulated trajectory.
    std::vector<Trajectory>* sampled = nullptr;
};

/// Samples x_0 in x0_set, u_k in input_sets[k] and the plant's noise, runs
/// the plant, and checks x_k in reach.sets[k] for every step. Trajectory i
/// draws from rng.substream(i), so reports do not depend on evaluation order.
ValidationReport validate_reach(const ReachResult& reach, const PlantSpec& plant, const Zonotope& x0_set,
                                const std::vector<Zonotope>& input_sets, Index n_traj, const Rng& rng,
                                const ValidationOptions& options = {});

/// Per-set sum of interval-hull half-widths.
std::vector<double> conservatism_metric(const std::vector<Zonotope>& sets);

void compare_with_baseline(ValidationReport& report, const std::vector<Zonotope>& baseline_sets);

Json report_to_json(const ValidationReport& r);
ValidationReport report_from_json(const Json& j);
/// One row per step: step,radius,baseline_radius,delta.
void write_report_csv(const std::filesystem::path& path, const ValidationReport& r);

} // namespace zreach

#endif
