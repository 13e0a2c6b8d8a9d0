#include "zreach/plant.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace zreach
{

Matrix LtvModel::ab() const
{
    Matrix out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

CstrParams CstrParams::with_equilibrium(const Vector& x_eq, const Vector& u_eq) const
{
    if (x_eq.size() != 2 || u_eq.size() != 2)
        throw DimensionError("reactor equilibrium: state and input must be 2-vectors");
    CstrParams p = *this;
    const double r = k0 * std::exp(-e / (x_eq(1) + t0)) * x_eq(0);
    p.c_feed = x_eq(0) + (r - u_eq(0)) / q;
    p.t_feed = x_eq(1) - (h * r + rho * u_eq(1)) / q;
    return p;
}

Index PlantSpec::state_dim() const
{
    return kind == PlantKind::Cstr ? 2 : model.a.rows();
}

Index PlantSpec::input_dim() const
{
    return kind == PlantKind::Cstr ? 2 : model.b.cols();
}

bool PlantSpec::drifts() const
{
    auto nonzero = [](const Matrix& m) { return m.size() > 0 && m.cwiseAbs().maxCoeff() > 0.0; };
    return kind == PlantKind::Ltv && (nonzero(delta_a) || nonzero(delta_b) || random_drift > 0.0);
}

void PlantSpec::validate() const
{
    const Index n = state_dim();
    if (noise.dim() != n)
        throw DimensionError("plant: noise set has dimension " + std::to_string(noise.dim()) + ", state dimension is " +
                             std::to_string(n));
    if (!(dt > 0.0))
        throw PreconditionError("plant: dt must be positive");
    if (kind == PlantKind::Cstr)
        return;
    if (model.a.rows() != model.a.cols() || n < 1)
        throw DimensionError("plant: A must be square and nonempty");
    if (model.b.rows() != n)
        throw DimensionError("plant: B must have as many rows as A");
    if (delta_a.size() > 0 && (delta_a.rows() != n || delta_a.cols() != n))
        throw DimensionError("plant: delta_a must match A");
    if (delta_b.size() > 0 && (delta_b.rows() != n || delta_b.cols() != model.b.cols()))
        throw DimensionError("plant: delta_b must match B");
    if (random_drift < 0.0)
        throw PreconditionError("plant: random drift bound must be nonnegative");
    if (drift_bound >= 0.0) {
        double worst = random_drift;
        double det = 0.0;
        if (delta_a.size() > 0)
            det = std::max(det, delta_a.cwiseAbs().maxCoeff());
        if (delta_b.size() > 0)
            det = std::max(det, delta_b.cwiseAbs().maxCoeff());
        worst += det;
        if (worst > drift_bound * (1.0 + 1e-12))
            throw PreconditionError("plant: per-step drift " + std::to_string(worst) + " exceeds declared bound " +
                                    std::to_string(drift_bound));
    }
}

PlantClock start_clock(const PlantSpec& plant)
{
    return PlantClock{0, plant.model};
}

Vector dynamics(const PlantSpec& plant, const LtvModel& model, const Vector& x, const Vector& u)
{
    if (x.size() != plant.state_dim() || u.size() != plant.input_dim())
        throw DimensionError("dynamics: state/input dimension mismatch");
    if (plant.kind == PlantKind::Ltv)
        return model.a * x + model.b * u;
    const CstrParams& p = plant.cstr;
    const double r = p.k0 * std::exp(-p.e / (x(1) + p.t0)) * x(0);
    Vector next(2);
    next(0) = x(0) + p.dt * (p.q * (p.c_feed - x(0)) - r + u(0));
    next(1) = x(1) + p.dt * (p.q * (p.t_feed - x(1)) + p.h * r + p.rho * u(1));
    return next;
}

Vector advance(const PlantSpec& plant, PlantClock& clock, const Vector& x, const Vector& u, Rng& rng, Vector* noise_out)
{
    const Vector w = sample(plant.noise, rng, plant.noise_mode);
    const Vector next = dynamics(plant, clock.model, x, u) + w;
    if (noise_out)
        *noise_out = w;
    if (plant.kind == PlantKind::Ltv) {
        if (plant.delta_a.size() > 0)
            clock.model.a += plant.delta_a;
        if (plant.delta_b.size() > 0)
            clock.model.b += plant.delta_b;
        if (plant.random_drift > 0.0) {
            for (Index j = 0; j < clock.model.a.cols(); ++j)
                for (Index i = 0; i < clock.model.a.rows(); ++i)
                    clock.model.a(i, j) += rng.uniform(-plant.random_drift, plant.random_drift);
            for (Index j = 0; j < clock.model.b.cols(); ++j)
                for (Index i = 0; i < clock.model.b.rows(); ++i)
                    clock.model.b(i, j) += rng.uniform(-plant.random_drift, plant.random_drift);
        }
    }
    ++clock.step;
    return next;
}

DataBatch Trajectory::batch() const
{
    const Index t = transitions();
    if (t == 0)
        return DataBatch();
    const Index nx = states.front().size();
    const Index nu = inputs.front().size();
    Matrix xm(nx, t), um(nu, t), xp(nx, t);
    for (Index k = 0; k < t; ++k) {
        const auto s = static_cast<std::size_t>(k);
        xm.col(k) = states[s];
        um.col(k) = inputs[s];
        xp.col(k) = states[s + 1];
    }
    return DataBatch(std::move(xm), std::move(um), std::move(xp));
}

Trajectory simulate(const PlantSpec& plant, const Vector& x0, const std::vector<Vector>& inputs, Rng& rng,
                    std::optional<PlantClock> clock)
{
    if (x0.size() != plant.state_dim())
        throw DimensionError("simulate: initial state has dimension " + std::to_string(x0.size()) + ", expected " +
                             std::to_string(plant.state_dim()));
    PlantClock c = clock ? *clock : start_clock(plant);
    Trajectory traj;
    traj.states.push_back(x0);
    for (const auto& u : inputs) {
        if (u.size() != plant.input_dim())
            throw DimensionError("simulate: input dimension mismatch");
        if (plant.kind == PlantKind::Ltv)
            traj.models.push_back(c.model.ab());
        Vector w;
        Vector next = advance(plant, c, traj.states.back(), u, rng, &w);
        if (!next.allFinite()) {
            traj.diverged = true;
            if (!traj.models.empty())
                traj.models.pop_back();
            break;
        }
        traj.inputs.push_back(u);
        traj.noises.push_back(std::move(w));
        traj.states.push_back(std::move(next));
    }
    return traj;
}

LtvModel discretize(const Matrix& ac, const Matrix& bc, double dt)
{
    const Index n = ac.rows();
    const Index m = bc.cols();
    if (ac.cols() != n || bc.rows() != n)
        throw DimensionError("discretize: A must be square and B must match its rows");
    Matrix aug = Matrix::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = ac * dt;
    aug.topRightCorner(n, m) = bc * dt;
    const Matrix e = aug.exp();
    return LtvModel{e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

PlantSpec five_state_plant(double dt, double noise_scale)
{
    Matrix ac(5, 5);
    ac << -1, -4, 0, 0, 0,
          4, -1, 0, 0, 0,
          0, 0, -3, 1, 0,
          0, 0, -1, -3, 0,
          0, 0, 0, 0, -2;
    PlantSpec p;
    p.kind = PlantKind::Ltv;
    p.model = discretize(ac, Matrix::Ones(5, 1), dt);
    p.dt = dt;
    p.noise = Zonotope(Vector::Zero(5), noise_scale * Matrix::Identity(5, 5));
    return p;
}

PlantSpec cstr_plant(const CstrParams& params, double noise_scale)
{
    PlantSpec p;
    p.kind = PlantKind::Cstr;
    p.cstr = params;
    p.dt = params.dt;
    p.noise = Zonotope(Vector::Zero(2), noise_scale * Matrix::Identity(2, 2));
    return p;
}

std::string to_string(PlantKind kind)
{
    return kind == PlantKind::Cstr ? "cstr" : "ltv";
}

PlantKind plant_kind_from_string(const std::string& s)
{
    if (s == "ltv")
        return PlantKind::Ltv;
    if (s == "cstr")
        return PlantKind::Cstr;
    throw PreconditionError("unknown plant kind \"" + s + "\" (expected ltv or cstr)");
}

} // namespace zreach
