#include "cli.hpp"

#include "zreach/geometry.hpp"
#include "zreach/scenario.hpp"
#include "zreach/serialization.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace zreach::cli
{

namespace fs = std::filesystem;

namespace
{

struct Failure
{
    int code;
    std::string message;
};

std::optional<std::string> env(const char* name)
{
    const char* v = std::getenv(name);
    if (!v || !*v)
        return std::nullopt;
    return std::string(v);
}

std::uint64_t parse_seed(const std::string& s, const std::string& source)
{
    try {
        if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front())))
            throw std::invalid_argument(s);
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size())
            throw std::invalid_argument(s);
        return v;
    }
    catch (const std::exception&) {
        throw Failure{kBadInput, source + ": not an unsigned integer: " + s};
    }
}

std::pair<Index, Index> parse_dims(const std::string& s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw Failure{kBadInput, "--dims: expected i,j, got " + s};
    try {
        const long a = std::stol(s.substr(0, comma));
        const long b = std::stol(s.substr(comma + 1));
        if (a < 0 || b < 0 || a == b)
            throw std::invalid_argument(s);
        return {a, b};
    }
    catch (const std::exception&) {
        throw Failure{kBadInput, "--dims: expected two distinct nonnegative indices, got " + s};
    }
}

Json read_required(const fs::path& path)
{
    if (!fs::exists(path))
        throw Failure{kBadInput, path.string() + ": missing"};
    return read_json_file(path);
}

std::vector<Index> trigger_times(const Json& manifest, const fs::path& dir)
{
    std::vector<Index> times;
    if (!manifest.contains("triggers") || !manifest.at("triggers").is_array())
        throw Failure{kBadInput, (dir / "manifest.json").string() + ": no trigger list"};
    for (const auto& t : manifest.at("triggers"))
        times.push_back(t.at("time").get<Index>());
    return times;
}

struct StoredReach
{
    ReachResult result;
    std::optional<Matrix> truth;
};

StoredReach load_reach(const fs::path& path)
{
    const Json doc = read_required(path);
    StoredReach r;
    if (!doc.contains("result"))
        throw FormatError(path.string() + ": missing result");
    r.result = reach_from_json(doc.at("result"));
    if (doc.contains("truth"))
        r.truth = matrix_from_json(doc.at("truth"), "truth");
    return r;
}

void write_polygon(const fs::path& path, const std::vector<Point2>& poly)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError(path.string() + ": cannot write");
    out.precision(17);
    out << "x,y\n";
    for (const auto& p : poly)
        out << p.x() << ',' << p.y() << '\n';
}

/// Projects samples_<t>.csv (traj,step,x1..) onto dims.
Index project_samples(const fs::path& in_path, const fs::path& out_path, std::pair<Index, Index> dims)
{
    std::ifstream in(in_path);
    if (!in)
        return 0;
    std::ofstream out(out_path);
    if (!out)
        throw FormatError(out_path.string() + ": cannot write");
    out.precision(17);
    out << "traj,step,x,y\n";
    std::string line;
    std::getline(in, line);
    Index rows = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');)
            cells.push_back(c);
        const std::size_t need = static_cast<std::size_t>(std::max(dims.first, dims.second)) + 3;
        if (cells.size() < need)
            throw FormatError(in_path.string() + ": row has " + std::to_string(cells.size()) + " fields");
        out << cells[0] << ',' << cells[1] << ',' << cells[static_cast<std::size_t>(dims.first) + 2] << ','
            << cells[static_cast<std::size_t>(dims.second) + 2] << '\n';
        ++rows;
    }
    return rows;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& mode,
            const std::optional<std::string>& out_flag, const std::optional<std::string>& seed_flag,
            const std::optional<std::string>& traj, std::optional<Index> stride, std::optional<Index> n_traj,
            Json& status, std::ostream& err)
{
    const ScenarioConfig cfg = load_scenario(config_path);
    RunOptions options;
    if (mode)
        options.mode = mode_from_string(*mode);
    if (seed_flag)
        options.seed = parse_seed(*seed_flag, "--seed");
    else if (auto s = env("ZREACH_SEED"))
        options.seed = parse_seed(*s, "ZREACH_SEED");
    if (traj)
        options.trajectory_csv = fs::path(*traj);
    options.stride = stride;
    options.n_traj = n_traj;
    options.log = [&err](const std::string& msg) { err << msg << '\n'; };

    const fs::path out_dir = out_flag ? fs::path(*out_flag) : fs::path(env("ZREACH_OUT").value_or("results/" + cfg.name));

    RunSummary run = run_scenario(cfg, options);
    write_run_outputs(run, cfg, out_dir);
    err << "wrote " << run.triggers.size() << " triggers to " << out_dir.string() << '\n';
    status["out"] = out_dir.string();
    status["mode"] = to_string(run.mode);
    status["seed"] = run.seed;
    status["triggers"] = run.triggers.size();
    status["violations"] = run.violations();
    status["baseline_violations"] = run.baseline_violations();
    status["estimator_failures"] = run.estimator_failures;
    return kOk;
}

int cmd_validate(const fs::path& dir, const std::optional<std::string>& config_path,
                 const std::optional<std::string>& seed_flag, std::optional<Index> n_traj, Json& status,
                 std::ostream& err)
{
    if (!fs::is_directory(dir))
        throw Failure{kBadInput, dir.string() + ": not a result directory"};
    const Json manifest = read_required(dir / "manifest.json");
    const ScenarioConfig cfg =
        config_path ? load_scenario(*config_path) : scenario_from_json(manifest.at("config"));
    std::uint64_t seed = manifest.at("seed").get<std::uint64_t>();
    if (seed_flag)
        seed = parse_seed(*seed_flag, "--seed");
    else if (auto s = env("ZREACH_SEED"))
        seed = parse_seed(*s, "ZREACH_SEED");
    const Index trajectories = n_traj.value_or(manifest.value("trajectories", cfg.n_traj));

    Index violations = 0;
    Index checks = 0;
    Json per_trigger = Json::array();
    for (Index t : trigger_times(manifest, dir)) {
        const StoredReach stored = load_reach(dir / ("reach_" + std::to_string(t) + ".json"));
        const ValidationReport report = revalidate(cfg, stored.result, t, stored.truth, seed, trajectories);
        write_json_file(dir / ("revalidation_" + std::to_string(t) + ".json"), report_to_json(report));
        for (const auto& v : report.violations)
            err << "violation: t=" << t << " trajectory " << v.trajectory << " step " << v.step << " state ["
                << v.state.transpose() << "]\n";
        violations += static_cast<Index>(report.violations.size());
        checks += report.containment_checks;
        per_trigger.push_back(Json{{"time", t}, {"violations", report.violations.size()}});
    }
    status["dir"] = dir.string();
    status["seed"] = seed;
    status["checks"] = checks;
    status["violations"] = violations;
    status["triggers"] = std::move(per_trigger);
    return violations > 0 ? kViolations : kOk;
}

int cmd_export_plot(const fs::path& dir, const std::string& dims_text, const std::optional<std::string>& out_flag,
                    Json& status, std::ostream& err)
{
    const auto dims = parse_dims(dims_text);
    if (!fs::is_directory(dir))
        throw Failure{kBadInput, dir.string() + ": not a result directory"};
    const Json manifest = read_required(dir / "manifest.json");
    const fs::path out_dir = out_flag ? fs::path(*out_flag) : dir / "plot";
    fs::create_directories(out_dir);

    Index polygons = 0;
    Index points = 0;
    for (Index t : trigger_times(manifest, dir)) {
        const std::string ts = std::to_string(t);
        const auto emit = [&](const fs::path& reach_path, const std::string& prefix) {
            const StoredReach stored = load_reach(reach_path);
            for (std::size_t k = 0; k < stored.result.sets.size(); ++k) {
                const Zonotope& z = stored.result.sets[k];
                if (dims.first >= z.dim() || dims.second >= z.dim())
                    throw Failure{kBadInput, "--dims: index out of range for " + std::to_string(z.dim()) +
                                                 "-dimensional sets"};
                write_polygon(out_dir / (prefix + ts + "_" + std::to_string(k) + ".csv"), vertices_2d(z, dims));
                ++polygons;
            }
        };
        emit(dir / ("reach_" + ts + ".json"), "set_");
        if (fs::exists(dir / ("baseline_reach_" + ts + ".json")))
            emit(dir / ("baseline_reach_" + ts + ".json"), "baseline_set_");
        points += project_samples(dir / ("samples_" + ts + ".csv"), out_dir / ("samples_" + ts + ".csv"), dims);
    }
    err << "wrote " << polygons << " polygons and " << points << " sample points to " << out_dir.string() << '\n';
    status["out"] = out_dir.string();
    status["polygons"] = polygons;
    status["points"] = points;
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Online data-driven reachability with zonotopes"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> config_opt, mode, out_dir, seed, traj, dims;
    std::optional<Index> stride, n_traj;
    std::string result_dir;

    auto* run_cmd = app.add_subcommand("run", "Stream a scenario and compute reachable sets");
    run_cmd->add_option("--config", config_path, "Scenario JSON")->required();
    run_cmd->add_option("--mode", mode, "ltv or lipschitz (overrides the config)");
    run_cmd->add_option("--out", out_dir, "Output directory (env ZREACH_OUT)");
    run_cmd->add_option("--seed", seed, "Random seed (env ZREACH_SEED)");
    run_cmd->add_option("--traj", traj, "Trajectory CSV replacing simulation");
    run_cmd->add_option("--stride", stride, "Steps between reach computations");
    run_cmd->add_option("--n-traj", n_traj, "Validation trajectories per trigger");

    auto* val_cmd = app.add_subcommand("validate", "Re-check stored reachable sets by simulation");
    val_cmd->add_option("dir", result_dir, "Result directory")->required();
    val_cmd->add_option("--config", config_opt, "Scenario JSON (defaults to the one in the manifest)");
    val_cmd->add_option("--seed", seed, "Random seed (env ZREACH_SEED)");
    val_cmd->add_option("--n-traj", n_traj, "Trajectories per trigger");

    auto* plot_cmd = app.add_subcommand("export-plot", "Write 2-D polygon CSVs of stored sets");
    plot_cmd->add_option("dir", result_dir, "Result directory")->required();
    plot_cmd->add_option("--dims", dims, "Projection dimensions i,j")->required();
    plot_cmd->add_option("--out", out_dir, "Plot directory (defaults to <dir>/plot)");

    Json status{{"status", "error"}};
    auto finish = [&](int code) {
        status["exit_code"] = code;
        out << status.dump() << std::endl;
        return code;
    };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp& e) {
        err << app.help();
        status["status"] = "ok";
        status["command"] = "help";
        return finish(kOk);
    }
    catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        status["message"] = e.what();
        return finish(kBadInput);
    }

    const std::string command = run_cmd->parsed() ? "run" : val_cmd->parsed() ? "validate" : "export-plot";
    status["command"] = command;
    int code = kOk;
    try {
        if (command == "run")
            code = cmd_run(config_path, mode, out_dir, seed, traj, stride, n_traj, status, err);
        else if (command == "validate")
            code = cmd_validate(result_dir, config_opt, seed, n_traj, status, err);
        else
            code = cmd_export_plot(result_dir, *dims, out_dir, status, err);
        status["status"] = code == kOk ? "ok" : "violations";
        return finish(code);
    }
    catch (const Failure& f) {
        err << "error: " << f.message << '\n';
        status["message"] = f.message;
        return finish(f.code);
    }
    catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        status["message"] = e.what();
        return finish(kNumeric);
    }
    catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        status["message"] = e.what();
        return finish(kBadInput);
    }
    catch (const std::invalid_argument& e) {
        // DimensionError and PreconditionError: inconsistent input.
        err << "error: " << e.what() << '\n';
        status["message"] = e.what();
        return finish(kBadInput);
    }
    catch (const Json::exception& e) {
        err << "error: " << e.what() << '\n';
        status["message"] = e.what();
        return finish(kBadInput);
    }
    catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        status["message"] = e.what();
        return finish(kBadInput);
    }
    catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        status["message"] = e.what();
        return finish(kNumeric);
    }
}

} // namespace zreach::cli
