#include "zreach/scenario.hpp"

#include "zreach/baseline.hpp"
#include "zreach/containment.hpp"
#include "zreach/trajectory_io.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

namespace zreach
{

namespace
{

/// Cursor into a JSON document that remembers its field path for messages.
class Node
{
public:
    Node(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const Json& json() const { return *j_; }
    const std::string& path() const { return path_; }
    bool has(const char* key) const { return j_->is_object() && j_->contains(key) && !j_->at(key).is_null(); }

    Node at(const char* key) const
    {
        if (!j_->is_object())
            throw FormatError(path_ + ": expected an object");
        if (!has(key))
            throw FormatError(child(key) + ": missing");
        return Node(j_->at(key), child(key));
    }

    double number(const char* key, double fallback) const { return has(key) ? at(key).as_number() : fallback; }
    double number(const char* key) const { return at(key).as_number(); }

    Index integer(const char* key, Index fallback, Index min_value = 0) const
    {
        if (!has(key))
            return fallback;
        const Node n = at(key);
        if (!n.json().is_number_integer())
            throw FormatError(n.path() + ": expected an integer");
        const auto v = n.json().get<long long>();
        if (v < min_value)
            throw FormatError(n.path() + ": must be at least " + std::to_string(min_value));
        return static_cast<Index>(v);
    }

    std::string string(const char* key, const std::string& fallback) const
    {
        if (!has(key))
            return fallback;
        const Node n = at(key);
        if (!n.json().is_string())
            throw FormatError(n.path() + ": expected a string");
        return n.json().get<std::string>();
    }

    bool boolean(const char* key, bool fallback) const
    {
        if (!has(key))
            return fallback;
        const Node n = at(key);
        if (!n.json().is_boolean())
            throw FormatError(n.path() + ": expected true or false");
        return n.json().get<bool>();
    }

    double as_number() const
    {
        if (!j_->is_number())
            throw FormatError(path_ + ": expected a number");
        const double v = j_->get<double>();
        if (!std::isfinite(v))
            throw FormatError(path_ + ": must be finite");
        return v;
    }

    Zonotope zonotope() const { return zonotope_from_json(*j_, path_); }
    Vector vector() const { return vector_from_json(*j_, path_); }

    /// A matrix, or a number filling a rows x cols matrix.
    Matrix matrix(Index rows, Index cols) const
    {
        if (j_->is_number())
            return Matrix::Constant(rows, cols, as_number());
        Matrix m = matrix_from_json(*j_, path_);
        if (m.rows() != rows || m.cols() != cols)
            throw FormatError(path_ + ": expected a " + std::to_string(rows) + "x" + std::to_string(cols) +
                              " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        return m;
    }

private:
    std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    const Json* j_;
    std::string path_;
};

SamplingMode sampling_from_string(const std::string& s, const std::string& path)
{
    if (s == "uniform")
        return SamplingMode::Uniform;
    if (s == "vertex")
        return SamplingMode::Vertex;
    throw FormatError(path + ": expected \"uniform\" or \"vertex\", got \"" + s + "\"");
}

std::string to_string(SamplingMode m)
{
    return m == SamplingMode::Vertex ? "vertex" : "uniform";
}

CstrParams cstr_from_json(const Node& n)
{
    CstrParams p;
    p.dt = n.number("dt", p.dt);
    p.t0 = n.number("t0", p.t0);
    p.e = n.number("e", p.e);
    p.k0 = n.number("k0", p.k0);
    p.q = n.number("q", p.q);
    p.h = n.number("h", p.h);
    p.rho = n.number("rho", p.rho);
    p.c_feed = n.number("c_feed", p.c_feed);
    p.t_feed = n.number("t_feed", p.t_feed);
    return p;
}

PlantSpec plant_from_json(const Node& n, const std::optional<Zonotope>& fallback_noise)
{
    PlantSpec p;
    const std::string kind = n.string("kind", "ltv");
    try {
        p.kind = plant_kind_from_string(kind);
    }
    catch (const PreconditionError& e) {
        throw FormatError(n.path() + ".kind: " + e.what());
    }

    if (p.kind == PlantKind::Cstr) {
        CstrParams params = n.has("params") ? cstr_from_json(n.at("params")) : CstrParams{};
        if (n.has("equilibrium")) {
            const Node eq = n.at("equilibrium");
            const Vector xs = eq.at("state").vector();
            const Vector us = eq.at("input").vector();
            if (xs.size() != 2 || us.size() != 2)
                throw FormatError(eq.path() + ": state and input must have 2 entries");
            params = params.with_equilibrium(xs, us);
        }
        p = cstr_plant(params, 0.0);
    }
    else {
        const std::string preset = n.string("preset", "");
        const double dt = n.number("dt", 0.1);
        if (preset == "five_state")
            p = five_state_plant(dt, 0.0);
        else if (!preset.empty())
            throw FormatError(n.path() + ".preset: unknown preset \"" + preset + "\"");
        else {
            p.dt = dt;
            const Matrix a = matrix_from_json(n.at("a").json(), n.path() + ".a");
            const Matrix b = matrix_from_json(n.at("b").json(), n.path() + ".b");
            if (a.rows() != a.cols() || a.rows() == 0)
                throw FormatError(n.path() + ".a: must be a nonempty square matrix");
            if (b.rows() != a.rows())
                throw FormatError(n.path() + ".b: must have " + std::to_string(a.rows()) + " rows");
            if (n.boolean("continuous", false))
                p.model = discretize(a, b, dt);
            else
                p.model = LtvModel{a, b};
        }
        const Index nx = p.model.a.rows();
        const Index nu = p.model.b.cols();
        if (n.has("delta_a"))
            p.delta_a = n.at("delta_a").matrix(nx, nx);
        if (n.has("delta_b"))
            p.delta_b = n.at("delta_b").matrix(nx, nu);
        p.random_drift = n.number("random_drift", 0.0);
        p.drift_bound = n.number("drift_bound", -1.0);
    }

    if (n.has("noise"))
        p.noise = n.at("noise").zonotope();
    else if (fallback_noise)
        p.noise = *fallback_noise;
    else
        throw FormatError(n.path() + ".noise: missing (and no sets.noise to fall back on)");
    p.noise_mode = sampling_from_string(n.string("noise_sampling", "uniform"), n.path() + ".noise_sampling");
    try {
        p.validate();
    }
    catch (const std::invalid_argument& e) {
        throw FormatError(n.path() + ": " + e.what());
    }
    return p;
}

Json plant_to_json(const PlantSpec& p)
{
    Json j{{"kind", to_string(p.kind)}, {"noise", to_json(p.noise)}, {"noise_sampling", to_string(p.noise_mode)}};
    if (p.kind == PlantKind::Cstr) {
        const CstrParams& c = p.cstr;
        j["params"] = Json{{"dt", c.dt}, {"t0", c.t0}, {"e", c.e},     {"k0", c.k0},         {"q", c.q},
                           {"h", c.h},   {"rho", c.rho}, {"c_feed", c.c_feed}, {"t_feed", c.t_feed}};
        return j;
    }
    j["dt"] = p.dt;
    j["a"] = to_json(p.model.a);
    j["b"] = to_json(p.model.b);
    if (p.delta_a.size() > 0)
        j["delta_a"] = to_json(p.delta_a);
    if (p.delta_b.size() > 0)
        j["delta_b"] = to_json(p.delta_b);
    j["random_drift"] = p.random_drift;
    j["drift_bound"] = p.drift_bound;
    return j;
}

Matrix regressor(const Vector& x, const Vector& u, bool affine)
{
    const Index off = affine ? 1 : 0;
    Matrix phi(1, off + x.size() + u.size());
    if (affine)
        phi(0, 0) = 1.0;
    phi.block(0, off, 1, x.size()) = x.transpose();
    phi.block(0, off + x.size(), 1, u.size()) = u.transpose();
    return phi;
}

void log_to(const RunOptions& o, const std::string& msg)
{
    if (o.log)
        o.log(msg);
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<Trajectory>& samples)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError(path.string() + ": cannot write");
    out.precision(17);
    const Index nx = samples.empty() || samples.front().states.empty() ? 0 : samples.front().states.front().size();
    out << "traj,step";
    for (Index i = 0; i < nx; ++i)
        out << ",x" << i + 1;
    out << '\n';
    for (std::size_t t = 0; t < samples.size(); ++t)
        for (std::size_t k = 0; k < samples[t].states.size(); ++k) {
            out << t << ',' << k;
            for (Index i = 0; i < nx; ++i)
                out << ',' << samples[t].states[k](i);
            out << '\n';
        }
}

Rng validation_rng(const Rng& master, Index time)
{
    return master.substream(1000 + static_cast<std::uint64_t>(time));
}

} // namespace

std::string to_string(Mode mode)
{
    return mode == Mode::Lipschitz ? "lipschitz" : "ltv";
}

Mode mode_from_string(const std::string& s)
{
    if (s == "ltv")
        return Mode::Ltv;
    if (s == "lipschitz")
        return Mode::Lipschitz;
    throw PreconditionError("unknown mode \"" + s + "\" (expected ltv or lipschitz)");
}

double ScenarioConfig::effective_sigma_v() const
{
    if (sigma_v)
        return *sigma_v;
    const IntervalMatrix h = interval_hull(noise_set);
    return h.radius().maxCoeff();
}

ReachConfig ScenarioConfig::reach_config() const
{
    ReachConfig rc;
    rc.horizon = horizon;
    rc.sigma = sigma;
    rc.input_sets.assign(static_cast<std::size_t>(horizon), input_set);
    rc.noise_set = noise_set;
    rc.initial_set = initial_set;
    rc.reduction_order = reach_order;
    return rc;
}

void ScenarioConfig::validate() const
{
    const Index nx = state_dim();
    const Index nu = input_dim();
    auto check_dim = [](const Zonotope& z, Index n, const std::string& field) {
        if (z.dim() != n)
            throw FormatError(field + ": dimension " + std::to_string(z.dim()) + " does not match " + std::to_string(n));
    };
    check_dim(initial_set, nx, "sets.initial");
    check_dim(input_set, nu, "sets.input");
    check_dim(noise_set, nx, "sets.noise");
    if (excitation_set)
        check_dim(*excitation_set, nu, "sets.excitation");
    if (start_state && start_state->size() != nx)
        throw FormatError("stream.start_state: expected " + std::to_string(nx) + " entries");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw FormatError("estimator.lambda: must lie in (0, 1]");
    if (!(tau > 0.0))
        throw FormatError("estimator.tau: must be positive");
    if (!(g0_scale > 0.0))
        throw FormatError("estimator.g0_scale: must be positive");
    if (sigma_v && !(*sigma_v >= 0.0))
        throw FormatError("estimator.sigma_v: must be nonnegative");
    if (!(sigma >= 0.0))
        throw FormatError("reach.sigma: must be nonnegative");
    if (horizon < 1)
        throw FormatError("reach.horizon: must be at least 1");
    if (window < 2)
        throw FormatError("reach.window: must be at least 2");
    if (reach_order < nx)
        throw FormatError("reach.reduction_order: must be at least the state dimension " + std::to_string(nx));
    if (stride < 1)
        throw FormatError("stream.stride: must be at least 1");
    if (steps < 1)
        throw FormatError("stream.steps: must be at least 1");
    if (baseline.initial_set)
        check_dim(*baseline.initial_set, nx, "baseline.initial");
    if (baseline.input_set)
        check_dim(*baseline.input_set, nu, "baseline.input");
}

ScenarioConfig scenario_from_json(const Json& j)
{
    const Node root(j, "");
    if (!j.is_object())
        throw FormatError("config: expected a JSON object");
    ScenarioConfig c;
    c.name = root.string("name", c.name);
    try {
        c.mode = mode_from_string(root.string("mode", "ltv"));
    }
    catch (const PreconditionError& e) {
        throw FormatError(std::string("mode: ") + e.what());
    }
    if (root.has("seed")) {
        const Node s = root.at("seed");
        if (!s.json().is_number_unsigned() && !(s.json().is_number_integer() && s.json().get<long long>() >= 0))
            throw FormatError("seed: expected a nonnegative integer");
        c.seed = s.json().get<std::uint64_t>();
    }

    const Node sets = root.at("sets");
    std::optional<Zonotope> set_noise;
    if (sets.has("noise"))
        set_noise = sets.at("noise").zonotope();
    c.plant = plant_from_json(root.at("plant"), set_noise);
    c.noise_set = set_noise ? *set_noise : c.plant.noise;
    c.initial_set = sets.at("initial").zonotope();
    c.input_set = sets.at("input").zonotope();
    if (sets.has("excitation"))
        c.excitation_set = sets.at("excitation").zonotope();

    if (root.has("estimator")) {
        const Node e = root.at("estimator");
        c.lambda = e.number("lambda", c.lambda);
        c.tau = e.number("tau", c.tau);
        c.g0_scale = e.number("g0_scale", c.g0_scale);
        c.estimator_order = e.integer("reduction_order", c.estimator_order);
        if (e.has("sigma_v"))
            c.sigma_v = e.number("sigma_v");
    }
    if (root.has("reach")) {
        const Node r = root.at("reach");
        c.horizon = r.integer("horizon", c.horizon, 1);
        c.window = r.integer("window", c.window, 2);
        c.sigma = r.number("sigma", c.sigma);
        c.reach_order = r.integer("reduction_order", c.reach_order, 1);
    }
    if (root.has("stream")) {
        const Node s = root.at("stream");
        c.steps = s.integer("steps", c.steps, 1);
        c.first_trigger = s.integer("first_trigger", c.first_trigger);
        c.stride = s.integer("stride", c.stride, 1);
        if (s.has("start_state"))
            c.start_state = s.at("start_state").vector();
    }
    if (root.has("validation")) {
        const Node v = root.at("validation");
        c.n_traj = v.integer("trajectories", c.n_traj);
        c.warmup = v.integer("warmup", c.warmup);
        c.sampling = sampling_from_string(v.string("sampling", "uniform"), v.path() + ".sampling");
    }
    if (root.has("baseline")) {
        const Node b = root.at("baseline");
        c.baseline.enabled = b.boolean("enabled", true);
        c.baseline.trajectories = b.integer("trajectories", 0);
        c.baseline.length = b.integer("length", 0);
        if (b.has("initial"))
            c.baseline.initial_set = b.at("initial").zonotope();
        if (b.has("input"))
            c.baseline.input_set = b.at("input").zonotope();
    }
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    const Json j = read_json_file(path);
    try {
        return scenario_from_json(j);
    }
    catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

Json scenario_to_json(const ScenarioConfig& c)
{
    Json sets{{"initial", to_json(c.initial_set)}, {"input", to_json(c.input_set)}, {"noise", to_json(c.noise_set)}};
    if (c.excitation_set)
        sets["excitation"] = to_json(*c.excitation_set);
    Json estimator{{"lambda", c.lambda}, {"tau", c.tau}, {"g0_scale", c.g0_scale}, {"reduction_order", c.estimator_order}};
    if (c.sigma_v)
        estimator["sigma_v"] = *c.sigma_v;
    Json stream{{"steps", c.steps}, {"first_trigger", c.first_trigger}, {"stride", c.stride}};
    if (c.start_state)
        stream["start_state"] = to_json(*c.start_state);
    Json baseline{{"enabled", c.baseline.enabled}, {"trajectories", c.baseline.trajectories}, {"length", c.baseline.length}};
    if (c.baseline.initial_set)
        baseline["initial"] = to_json(*c.baseline.initial_set);
    if (c.baseline.input_set)
        baseline["input"] = to_json(*c.baseline.input_set);
    return Json{{"name", c.name},
                {"mode", to_string(c.mode)},
                {"seed", c.seed},
                {"plant", plant_to_json(c.plant)},
                {"sets", std::move(sets)},
                {"estimator", std::move(estimator)},
                {"reach",
                 {{"horizon", c.horizon}, {"window", c.window}, {"sigma", c.sigma}, {"reduction_order", c.reach_order}}},
                {"stream", std::move(stream)},
                {"validation", {{"trajectories", c.n_traj}, {"warmup", c.warmup}, {"sampling", to_string(c.sampling)}}},
                {"baseline", std::move(baseline)}};
}

Index RunSummary::violations() const
{
    Index n = 0;
    for (const auto& t : triggers)
        n += static_cast<Index>(t.validation.violations.size());
    return n;
}

Index RunSummary::baseline_violations() const
{
    Index n = 0;
    for (const auto& t : triggers)
        if (t.baseline_validation)
            n += static_cast<Index>(t.baseline_validation->violations.size());
    return n;
}

PlantClock clock_at(const PlantSpec& plant, Index time, const std::optional<Matrix>& truth)
{
    PlantClock c = start_clock(plant);
    c.step = time;
    if (plant.kind != PlantKind::Ltv)
        return c;
    const Index nx = plant.state_dim();
    if (truth) {
        if (truth->rows() != nx || truth->cols() != nx + plant.input_dim())
            throw DimensionError("clock_at: recorded model has the wrong shape");
        c.model.a = truth->leftCols(nx);
        c.model.b = truth->rightCols(plant.input_dim());
        return c;
    }
    const double t = static_cast<double>(time);
    if (plant.delta_a.size() > 0)
        c.model.a += t * plant.delta_a;
    if (plant.delta_b.size() > 0)
        c.model.b += t * plant.delta_b;
    return c;
}

RunSummary run_scenario(const ScenarioConfig& cfg, const RunOptions& options)
{
    const auto t_start = std::chrono::steady_clock::now();
    cfg.validate();
    RunSummary run;
    run.mode = options.mode.value_or(cfg.mode);
    run.seed = options.seed.value_or(cfg.seed);
    const Index stride = options.stride.value_or(cfg.stride);
    const Index n_traj = options.n_traj.value_or(cfg.n_traj);
    if (stride < 1)
        throw FormatError("stride: must be at least 1");

    const bool affine = run.mode == Mode::Lipschitz;
    const Index nx = cfg.state_dim();
    const Index nu = cfg.input_dim();
    const Index n = (affine ? 1 : 0) + nx + nu;
    const ReachConfig rc = cfg.reach_config();
    const Rng master(run.seed);
    Rng data_rng = master.substream(1);

    EstimatorState est = init_default(n, nx, cfg.lambda, NoiseStructure(1, nx, cfg.effective_sigma_v()),
                                      DriftStructure(n, nx, cfg.sigma), cfg.tau, cfg.g0_scale, cfg.estimator_order);
    SlidingWindow window(cfg.window, nx, nu);

    // Data source: a recorded trajectory or the simulated plant.
    std::optional<Trajectory> recorded;
    if (options.trajectory_csv) {
        CsvTrajectory csv = read_trajectory_csv(*options.trajectory_csv);
        for (const auto& w : csv.warnings)
            log_to(options, "warning: " + w);
        if (csv.state_dim != nx || csv.input_dim != nu)
            throw FormatError(options.trajectory_csv->string() + ": has " + std::to_string(csv.state_dim) +
                              " states and " + std::to_string(csv.input_dim) + " inputs, config expects " +
                              std::to_string(nx) + " and " + std::to_string(nu));
        recorded = std::move(csv.trajectory);
    }
    const bool simulated = !recorded;
    const Index steps = simulated ? cfg.steps : recorded->transitions();
    PlantClock clock = start_clock(cfg.plant);
    Vector x = simulated ? cfg.start_state.value_or(cfg.initial_set.center()) : recorded->states.front();
    const Zonotope excitation = cfg.excitation_set.value_or(cfg.input_set);

    // Offline data for the batch baseline.
    const Index offline_length = cfg.baseline.length > 0 ? cfg.baseline.length : cfg.window;
    std::vector<DataBatch> offline_parts;
    if (cfg.baseline.enabled && cfg.baseline.trajectories > 0) {
        Rng off_rng = master.substream(2);
        const Zonotope x0s = cfg.baseline.initial_set.value_or(cfg.initial_set);
        const Zonotope us = cfg.baseline.input_set.value_or(cfg.input_set);
        for (Index i = 0; i < cfg.baseline.trajectories; ++i) {
            const Vector x0 = sample(x0s, off_rng);
            std::vector<Vector> inputs;
            for (Index k = 0; k < offline_length; ++k)
                inputs.push_back(sample(us, off_rng));
            const Trajectory tr = simulate(cfg.plant, x0, inputs, off_rng);
            if (tr.diverged)
                throw NumericError("baseline: offline trajectory " + std::to_string(i) + " diverged");
            offline_parts.push_back(tr.batch());
        }
    }
    std::vector<Vector> prefix_x, prefix_u, prefix_xp;
    std::optional<MatrixZonotope> baseline_model;
    std::optional<LipschitzTerms> baseline_terms;
    auto build_baseline = [&](const DataBatch& data) {
        if (affine) {
            const MatrixZonotope ls = batch_ls_model_set(data, cfg.noise_set, true);
            baseline_model = MatrixZonotope(ls.center());
            baseline_terms = lipschitz_terms(data, ls.center());
        }
        else {
            baseline_model = batch_ls_model_set(data, cfg.noise_set, false);
        }
        log_to(options, "baseline model built from " + std::to_string(data.size()) + " transitions");
    };
    if (!offline_parts.empty())
        build_baseline(DataBatch::concatenate(offline_parts));

    const Index first_trigger = cfg.effective_first_trigger();
    const Matrix wc = cfg.noise_set.center().transpose();
    for (Index t = 0; t < steps; ++t) {
        Vector u, x_next;
        const Matrix generating = cfg.plant.kind == PlantKind::Ltv ? clock.model.ab() : Matrix();
        if (simulated) {
            u = sample(excitation, data_rng);
            x_next = advance(cfg.plant, clock, x, u, data_rng);
            if (!x_next.allFinite())
                throw NumericError("plant state became non-finite at step " + std::to_string(t));
        }
        else {
            u = recorded->inputs[static_cast<std::size_t>(t)];
            x_next = recorded->states[static_cast<std::size_t>(t + 1)];
        }

        const Matrix phi = regressor(x, u, affine);
        const Matrix y = x_next.transpose() - wc;
        est = update(est, phi, y);
        if (est.last_update().rank_warning)
            ++run.rank_warnings;
        window.push(x, u, x_next);

        if (cfg.baseline.enabled && cfg.baseline.trajectories == 0 && !baseline_model) {
            prefix_x.push_back(x);
            prefix_u.push_back(u);
            prefix_xp.push_back(x_next);
            if (static_cast<Index>(prefix_x.size()) == offline_length) {
                Matrix xm(nx, offline_length), um(nu, offline_length), xp(nx, offline_length);
                for (Index j = 0; j < offline_length; ++j) {
                    xm.col(j) = prefix_x[static_cast<std::size_t>(j)];
                    um.col(j) = prefix_u[static_cast<std::size_t>(j)];
                    xp.col(j) = prefix_xp[static_cast<std::size_t>(j)];
                }
                build_baseline(DataBatch(xm, um, xp));
            }
        }

        // The set after processing transition t must hold the model that produced it.
        if (simulated && !affine && cfg.plant.kind == PlantKind::Ltv && t >= 1) {
            ++run.estimator_checks;
            if (!contains_matrix(model_set(est), generating.transpose()))
                ++run.estimator_failures;
        }
        x = x_next;

        const Index time = t + 1;
        if (time < first_trigger || (time - first_trigger) % stride != 0 || !window.full())
            continue;

        TriggerRecord rec;
        rec.time = time;
        rec.reach = affine ? reach_lipschitz(est, window, rc) : reach_ltv(est, window, rc);
        const PlantClock vclock = simulated ? clock : clock_at(cfg.plant, time);
        if (cfg.plant.kind == PlantKind::Ltv)
            rec.truth = vclock.model.ab();
        if (baseline_model) {
            ReachConfig brc = rc;
            brc.sigma = 0.0;
            rec.baseline = affine ? reach_lipschitz(*baseline_model, *baseline_terms, brc)
                                  : reach_ltv(*baseline_model, 0.0, brc);
        }
        if (options.validate) {
            const Rng vrng = validation_rng(master, time);
            ValidationOptions vo;
            vo.sampling = cfg.sampling;
            vo.clock = vclock;
            vo.sampled = &rec.samples;
            rec.validation = validate_reach(rec.reach, cfg.plant, cfg.initial_set, rc.input_sets, n_traj, vrng, vo);
            if (rec.baseline) {
                vo.sampled = nullptr;
                rec.baseline_validation =
                    validate_reach(*rec.baseline, cfg.plant, cfg.initial_set, rc.input_sets, n_traj, vrng, vo);
                compare_with_baseline(rec.validation, rec.baseline->sets);
            }
        }
        log_to(options, "t=" + std::to_string(time) + ": " + std::to_string(rec.validation.violations.size()) +
                            " violations in " + std::to_string(rec.validation.containment_checks) + " checks" +
                            (rec.baseline_validation
                                 ? ", baseline " + std::to_string(rec.baseline_validation->violations.size())
                                 : std::string()));
        run.triggers.push_back(std::move(rec));
    }
    run.steps = steps;
    run.n_traj = n_traj;
    run.final_estimator = estimator_to_json(est);
    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return run;
}

ValidationReport revalidate(const ScenarioConfig& cfg, const ReachResult& reach, Index time,
                            const std::optional<Matrix>& truth, std::uint64_t seed, Index n_traj,
                            std::vector<Trajectory>* sampled)
{
    const ReachConfig rc = cfg.reach_config();
    ValidationOptions vo;
    vo.sampling = cfg.sampling;
    vo.clock = clock_at(cfg.plant, time, truth);
    vo.sampled = sampled;
    return validate_reach(reach, cfg.plant, cfg.initial_set, rc.input_sets, n_traj, validation_rng(Rng(seed), time), vo);
}

void write_run_outputs(const RunSummary& run, const ScenarioConfig& cfg, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    Json triggers = Json::array();
    Json timing{{"total_seconds", run.wall_seconds}, {"reach_seconds", Json::array()}};
    for (const auto& rec : run.triggers) {
        const std::string t = std::to_string(rec.time);
        Json reach{{"time", rec.time}, {"mode", to_string(run.mode)}, {"result", reach_to_json(rec.reach)}};
        if (rec.truth)
            reach["truth"] = to_json(*rec.truth);
        write_json_file(dir / ("reach_" + t + ".json"), reach);
        write_bounds_csv(dir / ("bounds_" + t + ".csv"), rec.reach);
        write_json_file(dir / ("validation_" + t + ".json"), report_to_json(rec.validation));
        write_report_csv(dir / ("validation_" + t + ".csv"), rec.validation);
        write_samples_csv(dir / ("samples_" + t + ".csv"), rec.samples);
        Json entry{{"time", rec.time},
                   {"violations", rec.validation.violations.size()},
                   {"checks", rec.validation.containment_checks},
                   {"set_radius", rec.validation.per_step_set_radius}};
        timing["reach_seconds"].push_back(rec.reach.diagnostics.wall_seconds);
        if (rec.baseline) {
            Json b{{"time", rec.time}, {"mode", to_string(run.mode)}, {"result", reach_to_json(*rec.baseline)}};
            if (rec.truth)
                b["truth"] = to_json(*rec.truth);
            write_json_file(dir / ("baseline_reach_" + t + ".json"), b);
            write_bounds_csv(dir / ("baseline_bounds_" + t + ".csv"), *rec.baseline);
            entry["baseline_set_radius"] = rec.validation.baseline_set_radius;
            if (rec.baseline_validation) {
                write_json_file(dir / ("baseline_validation_" + t + ".json"), report_to_json(*rec.baseline_validation));
                entry["baseline_violations"] = rec.baseline_validation->violations.size();
            }
        }
        triggers.push_back(std::move(entry));
    }
    Json manifest{{"name", cfg.name},
                  {"mode", to_string(run.mode)},
                  {"seed", run.seed},
                  {"steps", run.steps},
                  {"trajectories", run.n_traj},
                  {"triggers", std::move(triggers)},
                  {"violations", run.violations()},
                  {"baseline_violations", run.baseline_violations()},
                  {"estimator",
                   {{"containment_checks", run.estimator_checks},
                    {"containment_failures", run.estimator_failures},
                    {"rank_warnings", run.rank_warnings}}},
                  {"config", scenario_to_json(cfg)}};
    write_json_file(dir / "manifest.json", manifest);
    write_json_file(dir / "estimator.json", run.final_estimator);
    write_json_file(dir / "timing.json", timing);
}

} // namespace zreach
