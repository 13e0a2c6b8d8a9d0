#ifndef ZREACH_SCENARIO_HPP
#define ZREACH_SCENARIO_HPP

#include "zreach/estimator.hpp"
#include "zreach/plant.hpp"
#include "zreach/reach.hpp"
#include "zreach/validation.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace zreach
{

enum class Mode
{
    Ltv,
    Lipschitz
};

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

/// Offline data for the batch least-squares comparison. With zero
/// trajectories the first `length` transitions of the online stream are used.
struct BaselineConfig
{
    bool enabled = true;
    Index trajectories = 0;
    Index length = 0;
    std::optional<Zonotope> initial_set;
    std::optional<Zonotope> input_set;
};

struct ScenarioConfig
{
    std::string name = "scenario";
    Mode mode = Mode::Ltv;
    std::uint64_t seed = 1;

    PlantSpec plant;
    Zonotope initial_set;
    Zonotope input_set;
    Zonotope noise_set;
    /// Start of the online stream; defaults to the center of the initial set.
    std::optional<Vector> start_state;
    /// Inputs applied while streaming; defaults to the input set.
    std::optional<Zonotope> excitation_set;

    double lambda = 1.0;
    double tau = 1e7;
    double g0_scale = 1.5;
    Index estimator_order = 0;
    /// Per-entry measurement noise bound; defaults to the largest half-width
    /// of the noise set's interval hull.
    std::optional<double> sigma_v;

    Index horizon = 10;
    Index window = 30;
    double sigma = 0.0;
    Index reach_order = 60;

    Index steps = 60;
    Index first_trigger = 0; ///< 0 selects the warm-up length
    Index stride = 1;

    Index n_traj = 100;
    Index warmup = 0; ///< 0 selects the window length
    SamplingMode sampling = SamplingMode::Uniform;

    BaselineConfig baseline;

    Index state_dim() const { return plant.state_dim(); }
    Index input_dim() const { return plant.input_dim(); }
    Index effective_warmup() const { return warmup > 0 ? warmup : window; }
    Index effective_first_trigger() const { return std::max(first_trigger, effective_warmup()); }
    double effective_sigma_v() const;
    ReachConfig reach_config() const;
    /// Cross-field consistency; throws with the field name.
    void validate() const;
};

/// Parses a scenario document. Errors name the offending field.
ScenarioConfig scenario_from_json(const Json& j);
ScenarioConfig load_scenario(const std::filesystem::path& path);
Json scenario_to_json(const ScenarioConfig& c);

struct TriggerRecord
{
    Index time = 0;
    ReachResult reach;
    ValidationReport validation;
    std::optional<ReachResult> baseline;
    std::optional<ValidationReport> baseline_validation;
    std::optional<Matrix> truth; ///< true [A B] at the trigger (linear plants)
    std::vector<Trajectory> samples;
};

struct RunSummary
{
    Mode mode = Mode::Ltv;
    std::uint64_t seed = 0;
    Index steps = 0;
    Index n_traj = 0; ///< validation trajectories per trigger
    std::vector<TriggerRecord> triggers;
    Index estimator_checks = 0;
    Index estimator_failures = 0;
    Index rank_warnings = 0;
    Json final_estimator;
    double wall_seconds = 0.0;

    Index violations() const;
    Index baseline_violations() const;
};

struct RunOptions
{
    std::optional<Mode> mode;
    std::optional<std::uint64_t> seed;
    std::optional<Index> stride;
    std::optional<Index> n_traj;
    /// Replace simulation with a recorded trajectory.
    std::optional<std::filesystem::path> trajectory_csv;
    bool validate = true;
    std::function<void(const std::string&)> log;
};

/// Streams the scenario: one transition, one estimator update, and at every
/// trigger the N-step reachable sets, the baseline sets and a validation pass.
RunSummary run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// The plant state used to validate a trigger at time t: the recorded model
/// when available, otherwise deterministic drift from step 0.
PlantClock clock_at(const PlantSpec& plant, Index time, const std::optional<Matrix>& truth = std::nullopt);

/// Repeats the validation pass of the trigger at `time` with the random
/// streams the run used for seed `seed`, so an untouched result reproduces
/// the stored report.
ValidationReport revalidate(const ScenarioConfig& cfg, const ReachResult& reach, Index time,
                            const std::optional<Matrix>& truth, std::uint64_t seed, Index n_traj,
                            std::vector<Trajectory>* sampled = nullptr);

/// reach_<t>.json, bounds_<t>.csv, validation_<t>.json/csv, samples_<t>.csv
/// (and baseline_* counterparts) plus manifest.json. Timings go to timing.json
/// only, so every other file is reproducible.
void write_run_outputs(const RunSummary& run, const ScenarioConfig& cfg, const std::filesystem::path& dir);

} // namespace zreach

#endif
