#include "zreach/validation.hpp"

#include <algorithm>
#include <fstream>

namespace zreach
{

ValidationReport validate_reach(const ReachResult& reach, const PlantSpec& plant, const Zonotope& x0_set,
                                const std::vector<Zonotope>& input_sets, Index n_traj, const Rng& rng,
                                const ValidationOptions& options)
{
    if (reach.sets.empty())
        throw PreconditionError("validate_reach: no reachable sets");
    const Index horizon = static_cast<Index>(reach.sets.size()) - 1;
    if (static_cast<Index>(input_sets.size()) < horizon)
        throw DimensionError("validate_reach: need " + std::to_string(horizon) + " input sets");
    if (x0_set.dim() != plant.state_dim() || reach.sets.front().dim() != plant.state_dim())
        throw DimensionError("validate_reach: set and plant dimensions differ");

    ValidationReport report;
    report.seed = rng.seed();
    report.per_step_set_radius = conservatism_metric(reach.sets);
    for (Index t = 0; t < n_traj; ++t) {
        Rng stream = rng.substream(static_cast<std::uint64_t>(t));
        const Vector x0 = sample(x0_set, stream, options.sampling);
        std::vector<Vector> inputs;
        inputs.reserve(static_cast<std::size_t>(horizon));
        for (Index k = 0; k < horizon; ++k)
            inputs.push_back(sample(input_sets[static_cast<std::size_t>(k)], stream, options.sampling));
        const Trajectory traj = simulate(plant, x0, inputs, stream, options.clock);
        ++report.trajectories_sampled;
        if (traj.diverged)
            ++report.diverged;
        for (std::size_t k = 0; k < traj.states.size(); ++k) {
            ++report.containment_checks;
            if (!contains_point(reach.sets[k], traj.states[k], options.tol))
                report.violations.push_back(Violation{t, static_cast<Index>(k), traj.states[k], stream.seed()});
        }
        if (options.sampled)
            options.sampled->push_back(traj);
    }
    return report;
}

std::vector<double> conservatism_metric(const std::vector<Zonotope>& sets)
{
    std::vector<double> out;
    out.reserve(sets.size());
    for (const auto& z : sets)
        out.push_back(hull_radius_sum(z));
    return out;
}

void compare_with_baseline(ValidationReport& report, const std::vector<Zonotope>& baseline_sets)
{
    report.baseline_set_radius = conservatism_metric(baseline_sets);
    report.radius_delta.clear();
    const std::size_t n = std::min(report.baseline_set_radius.size(), report.per_step_set_radius.size());
    for (std::size_t k = 0; k < n; ++k)
        report.radius_delta.push_back(report.baseline_set_radius[k] - report.per_step_set_radius[k]);
}

Json report_to_json(const ValidationReport& r)
{
    Json violations = Json::array();
    for (const auto& v : r.violations)
        violations.push_back(
            Json{{"trajectory", v.trajectory}, {"step", v.step}, {"state", to_json(v.state)}, {"seed", v.seed}});
    return Json{{"seed", r.seed},
                {"trajectories_sampled", r.trajectories_sampled},
                {"containment_checks", r.containment_checks},
                {"diverged", r.diverged},
                {"violation_count", r.violations.size()},
                {"violations", std::move(violations)},
                {"per_step_set_radius", r.per_step_set_radius},
                {"baseline_set_radius", r.baseline_set_radius},
                {"radius_delta", r.radius_delta}};
}

ValidationReport report_from_json(const Json& j)
{
    auto field = [&](const char* key) -> const Json& {
        if (!j.is_object() || !j.contains(key))
            throw FormatError(std::string("report.") + key + ": missing");
        return j.at(key);
    };
    ValidationReport r;
    try {
        r.seed = field("seed").get<std::uint64_t>();
        r.trajectories_sampled = field("trajectories_sampled").get<Index>();
        r.containment_checks = field("containment_checks").get<Index>();
        r.diverged = j.value("diverged", Index{0});
        for (const auto& v : field("violations"))
            r.violations.push_back(Violation{v.at("trajectory").get<Index>(), v.at("step").get<Index>(),
                                             vector_from_json(v.at("state"), "report.violations.state"),
                                             v.at("seed").get<std::uint64_t>()});
        r.per_step_set_radius = field("per_step_set_radius").get<std::vector<double>>();
        r.baseline_set_radius = j.value("baseline_set_radius", std::vector<double>{});
        r.radius_delta = j.value("radius_delta", std::vector<double>{});
    }
    catch (const Json::exception& e) {
        throw FormatError(std::string("report: ") + e.what());
    }
    return r;
}

void write_report_csv(const std::filesystem::path& path, const ValidationReport& r)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError(path.string() + ": cannot write");
    out.precision(17);
    out << "step,radius,baseline_radius,delta\n";
    for (std::size_t k = 0; k < r.per_step_set_radius.size(); ++k) {
        out << k << ',' << r.per_step_set_radius[k] << ',';
        if (k < r.baseline_set_radius.size())
            out << r.baseline_set_radius[k];
        out << ',';
        if (k < r.radius_delta.size())
            out << r.radius_delta[k];
        out << '\n';
    }
}

} // namespace zreach
