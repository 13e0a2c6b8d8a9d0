#include "support.hpp"

#include "zreach/containment.hpp"
#include "zreach/plant.hpp"
#include "zreach/reach.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace zreach;
using namespace zreach::test;

namespace
{

ReachConfig config(Index horizon, const Zonotope& x0, const Zonotope& u, const Zonotope& w, Index order = 200)
{
    ReachConfig c;
    c.horizon = horizon;
    c.initial_set = x0;
    c.input_sets.assign(static_cast<std::size_t>(horizon), u);
    c.noise_set = w;
    c.reduction_order = order;
    return c;
}

/// Model-based propagation written out directly: c+ = A c + B c_u + d,
/// G+ = [A G, B G_u], returned as per-step (center, hull radius).
std::vector<std::pair<Vector, Vector>> propagate(const Matrix& a, const Matrix& b, const Vector& offset,
                                                 const Zonotope& x0, const Zonotope& u, Index steps)
{
    std::vector<std::pair<Vector, Vector>> out;
    Vector c = x0.center();
    Matrix g = x0.generators();
    out.emplace_back(c, g.cwiseAbs().rowwise().sum());
    for (Index k = 0; k < steps; ++k) {
        c = a * c + b * u.center() + offset;
        Matrix next(a.rows(), g.cols() + u.num_generators());
        next << a * g, b * u.generators();
        g = next;
        out.emplace_back(c, g.cwiseAbs().rowwise().sum());
    }
    return out;
}

DataBatch random_batch(Rng& rng, Index n, Index nx, Index nu)
{
    return DataBatch(random_matrix(rng, nx, n), random_matrix(rng, nu, n), random_matrix(rng, nx, n));
}

} // namespace

TEST(Perturbation, Formula)
{
    EXPECT_EQ(perturbation_matzono(0, 0.1, 2, 3).num_generators(), 0);
    EXPECT_EQ(perturbation_matzono(4, 0.0, 2, 3).num_generators(), 0);
    const MatrixZonotope p = perturbation_matzono(3, 0.1, 1, 2);
    ASSERT_EQ(p.num_generators(), 2);
    EXPECT_NEAR(p.generators()[0](0, 0), 0.3, 1e-15);
    EXPECT_EQ(p.generators()[0](0, 1), 0.0);
    EXPECT_NEAR(p.generators()[1](0, 1), 0.3, 1e-15);
    EXPECT_EQ(p.center(), Matrix::Zero(1, 2));
}

TEST(Perturbation, ContainsAccumulatedDrift)
{
    Rng rng(1);
    const double mu = 0.05;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index k = random_index(rng, 1, 6);
        Matrix sum = Matrix::Zero(2, 2);
        for (Index s = 0; s < k; ++s)
            sum += random_matrix(rng, 2, 2, mu);
        ASSERT_TRUE(contains_matrix(perturbation_matzono(k, mu, 2, 2), sum));
    }
}

TEST(CoveringRadius, Examples)
{
    std::vector<Vector> two = {Vector::Zero(2), (Vector(2) << 1, 0).finished()};
    EXPECT_DOUBLE_EQ(covering_radius(two), 1.0);
    std::vector<Vector> grid;
    for (int i = 0; i < 11; ++i)
        grid.push_back(Vector::Constant(1, 0.25 * i));
    EXPECT_DOUBLE_EQ(covering_radius(grid), 0.25);
    EXPECT_THROW(covering_radius(std::vector<Vector>{Vector::Zero(2)}), PreconditionError);
}

TEST(CoveringRadius, MatchesBruteForce)
{
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = random_index(rng, 2, 40);
        const Index dim = random_index(rng, 1, 5);
        std::vector<Vector> pts;
        for (Index i = 0; i < n; ++i)
            pts.push_back(random_vector(rng, dim));
        if (trial % 10 == 0)
            pts.push_back(pts.front());
        double oracle = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < pts.size(); ++j)
                if (j != i)
                    nearest = std::min(nearest, distance(pts[i], pts[j]));
            oracle = std::max(oracle, nearest);
        }
        ASSERT_EQ(covering_radius(pts), oracle);
    }
}

TEST(EpsilonZonotope, Formula)
{
    EXPECT_TRUE(epsilon_zonotope(3.0, 0.0, 2).is_singleton());
    const Zonotope z = epsilon_zonotope(2.0, 1.0, 2);
    EXPECT_EQ(z.generators(), Matrix::Identity(2, 2));
    const IntervalMatrix h = interval_hull(epsilon_zonotope(1.5, 0.4, 3));
    EXPECT_NEAR(h.radius().maxCoeff(), 0.3, 1e-15);
    EXPECT_NEAR(h.radius().minCoeff(), 0.3, 1e-15);
    EXPECT_THROW(epsilon_zonotope(-1.0, 1.0, 2), PreconditionError);
}

TEST(ReachLtv, DegenerateModelIsExactPropagation)
{
    Rng rng(3);
    const Matrix a = 0.4 * random_matrix(rng, 3, 3);
    const Matrix b = random_matrix(rng, 3, 2);
    Matrix ab(3, 5);
    ab << a, b;
    const Zonotope x0 = random_zonotope(rng, 3, 3, 0.2);
    const Zonotope u = random_zonotope(rng, 2, 2, 0.1);
    const ReachResult r = reach_ltv(MatrixZonotope(ab), 0.0, config(20, x0, u, Zonotope(Vector::Zero(3))));
    const auto oracle = propagate(a, b, Vector::Zero(3), x0, u, 20);
    ASSERT_EQ(r.sets.size(), 21u);
    for (std::size_t k = 0; k < r.sets.size(); ++k) {
        const IntervalMatrix h = interval_hull(r.sets[k]);
        EXPECT_LT((r.sets[k].center() - oracle[k].first).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((h.radius().col(0) - oracle[k].second).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(ReachLtv, InitialSetAndShapes)
{
    Rng rng(4);
    const Zonotope x0 = random_zonotope(rng, 2, 2);
    const ReachConfig c = config(3, x0, random_zonotope(rng, 1, 1), Zonotope(Vector::Zero(2)));
    const ReachResult r = reach_ltv(MatrixZonotope(random_matrix(rng, 2, 3)), 0.1, c);
    EXPECT_EQ(r.sets.front().center(), x0.center());
    EXPECT_EQ(r.sets.front().generators(), x0.generators());
    EXPECT_THROW(reach_ltv(MatrixZonotope(random_matrix(rng, 2, 4)), 0.1, c), DimensionError);
    ReachConfig short_inputs = c;
    short_inputs.input_sets.pop_back();
    EXPECT_THROW(reach_ltv(MatrixZonotope(random_matrix(rng, 2, 3)), 0.1, short_inputs), std::invalid_argument);
}

TEST(ReachLtv, EpsilonUsesIntervalFrobeniusSupremum)
{
    Rng rng(5);
    const MatrixZonotope model = random_matrix_zonotope(rng, 2, 3, 2, 0.2);
    ReachConfig c = config(4, random_zonotope(rng, 2, 1), random_zonotope(rng, 1, 1), Zonotope(Vector::Zero(2)));
    c.sigma = 0.01;
    const ReachResult r = reach_ltv(model, 0.3, c);
    double sup = 0.0;
    for (Index k = 0; k < 4; ++k)
        sup = std::max(sup, interval_frobenius(interval_matrix(minkowski_sum(model, perturbation_matzono(k, 0.01, 2, 3)))));
    EXPECT_NEAR(r.diagnostics.i_m_max, sup, 1e-12);
    EXPECT_DOUBLE_EQ(r.diagnostics.delta_hat, 0.3);
    EXPECT_GE(reach_ltv(model, 0.3, c, 100.0).diagnostics.i_m_max, 100.0);
}

TEST(ReachLtv, InflationIsMonotone)
{
    Rng rng(6);
    const MatrixZonotope model = random_matrix_zonotope(rng, 2, 3, 2, 0.1);
    const Zonotope x0 = random_zonotope(rng, 2, 2, 0.1);
    const Zonotope u = random_zonotope(rng, 1, 1, 0.1);
    const Zonotope w_small(Vector::Zero(2), 0.01 * Matrix::Identity(2, 2));
    const Zonotope w_large(Vector::Zero(2), 0.02 * Matrix::Identity(2, 2));
    ReachConfig base = config(5, x0, u, w_small, 5000);
    ReachConfig more_drift = base;
    more_drift.sigma = 0.01;
    ReachConfig more_noise = config(5, x0, u, w_large, 5000);
    const ReachResult a = reach_ltv(model, 0.1, base);
    for (const ReachResult& b : {reach_ltv(model, 0.1, more_drift), reach_ltv(model, 0.1, more_noise)})
        for (std::size_t k = 0; k < a.sets.size(); ++k) {
            const IntervalMatrix ha = interval_hull(a.sets[k]), hb = interval_hull(b.sets[k]);
            EXPECT_TRUE((hb.lower().array() <= ha.lower().array() + 1e-12).all());
            EXPECT_TRUE((hb.upper().array() >= ha.upper().array() - 1e-12).all());
        }
}

TEST(ReachLtv, ContainsTrueTrajectoriesFromLearnedModel)
{
    // Two-state plant, estimator trained online, then Monte-Carlo containment.
    Rng rng(7);
    PlantSpec plant;
    plant.kind = PlantKind::Ltv;
    plant.model.a = (Matrix(2, 2) << 0.9, 0.2, -0.1, 0.8).finished();
    plant.model.b = (Matrix(2, 1) << 0.5, 1.0).finished();
    plant.noise = Zonotope(Vector::Zero(2), 0.01 * Matrix::Identity(2, 2));

    const Zonotope u_set(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 0.5));
    const Zonotope x0(Vector::Constant(2, 1.0), 0.1 * Matrix::Identity(2, 2));
    EstimatorState est = init_default(3, 2, 1.0, NoiseStructure(1, 2, 0.01), DriftStructure(3, 2, 0.0));
    SlidingWindow window(20, 2, 1);
    PlantClock clock = start_clock(plant);
    Vector x = x0.center();
    for (int t = 0; t < 40; ++t) {
        const Vector u = sample(u_set, rng);
        const Vector xn = advance(plant, clock, x, u, rng);
        Matrix phi(1, 3);
        phi << x.transpose(), u.transpose();
        est = update(est, phi, xn.transpose());
        window.push(x, u, xn);
        x = xn;
    }
    const ReachResult r = reach_ltv(est, window, config(6, x0, u_set, plant.noise, 100));
    Index checks = 0;
    for (int i = 0; i < 200; ++i) {
        Rng stream = rng.substream(static_cast<std::uint64_t>(i));
        std::vector<Vector> inputs;
        for (int k = 0; k < 6; ++k)
            inputs.push_back(sample(u_set, stream));
        const Trajectory tr = simulate(plant, sample(x0, stream), inputs, stream);
        for (std::size_t k = 0; k < tr.states.size(); ++k, ++checks)
            ASSERT_TRUE(contains_point(r.sets[k], tr.states[k])) << "trajectory " << i << " step " << k;
    }
    EXPECT_GE(checks, 1000);
}

TEST(LagrangeBounds, Examples)
{
    Rng rng(8);
    const Matrix cm = random_matrix(rng, 2, 4);
    DataBatch d(random_matrix(rng, 2, 6), random_matrix(rng, 1, 6), Matrix::Zero(2, 6));
    d.x_plus = cm * d.data_matrix(true);
    const auto [lo, hi] = lagrange_bounds(d, cm);
    EXPECT_LT(lo.cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(hi.cwiseAbs().maxCoeff(), 1e-14);

    const DataBatch one = random_batch(rng, 1, 2, 1);
    const auto [l1, h1] = lagrange_bounds(one, cm);
    EXPECT_EQ(l1, h1);

    const DataBatch many = random_batch(rng, 9, 2, 1);
    const auto [lm, hm] = lagrange_bounds(many, cm);
    for (Index o = 0; o < 2; ++o) {
        double mn = std::numeric_limits<double>::infinity(), mx = -mn;
        for (Index j = 0; j < 9; ++j) {
            double pred = cm(o, 0);
            for (Index i = 0; i < 2; ++i)
                pred += cm(o, 1 + i) * many.x_minus(i, j);
            pred += cm(o, 3) * many.u_minus(0, j);
            const double r = many.x_plus(o, j) - pred;
            mn = std::min(mn, r);
            mx = std::max(mx, r);
        }
        EXPECT_NEAR(lm(o), mn, 1e-14);
        EXPECT_NEAR(hm(o), mx, 1e-14);
    }
    EXPECT_THROW(lagrange_bounds(DataBatch(Matrix(2, 0), Matrix(1, 0), Matrix(2, 0)), cm), PreconditionError);
}

TEST(RemainderZonotope, BoxAndResidualCoverage)
{
    const Vector c = (Vector(2) << 1, 2).finished();
    EXPECT_TRUE(remainder_zonotope(c, c).is_singleton());
    const Zonotope box = remainder_zonotope(-Vector::Ones(2), Vector::Ones(2));
    EXPECT_EQ(box.center(), Vector::Zero(2));
    EXPECT_EQ(box.generators(), Matrix::Identity(2, 2));
    EXPECT_THROW(remainder_zonotope(Vector::Ones(2), -Vector::Ones(2)), PreconditionError);

    Rng rng(9);
    const DataBatch d = random_batch(rng, 12, 2, 2);
    const Matrix cm = random_matrix(rng, 2, 5);
    const auto [lo, hi] = lagrange_bounds(d, cm);
    const Zonotope zl = remainder_zonotope(lo, hi);
    const Matrix residuals = d.x_plus - cm * d.data_matrix(true);
    for (Index j = 0; j < d.size(); ++j)
        EXPECT_TRUE(contains_point(zl, residuals.col(j)));
}

TEST(RemainderZonotope, GrowsOnlyWithOutsideResiduals)
{
    Rng rng(10);
    const Matrix cm = random_matrix(rng, 1, 3);
    DataBatch d = random_batch(rng, 5, 1, 1);
    const auto [lo, hi] = lagrange_bounds(d, cm);

    // A point whose residual sits inside the current bounds.
    DataBatch inside(d.x_minus.leftCols(1), d.u_minus.leftCols(1), Matrix::Zero(1, 1));
    inside.x_plus = cm * inside.data_matrix(true) + Vector::Constant(1, 0.5 * (lo(0) + hi(0)));
    const auto [li, hi_in] = lagrange_bounds(DataBatch::concatenate({d, inside}), cm);
    EXPECT_EQ(li, lo);
    EXPECT_EQ(hi_in, hi);

    DataBatch outside = inside;
    outside.x_plus = cm * outside.data_matrix(true) + Vector::Constant(1, hi(0) + 1.0);
    const auto [lo2, hi2] = lagrange_bounds(DataBatch::concatenate({d, outside}), cm);
    EXPECT_EQ(lo2, lo);
    EXPECT_GT(hi2(0), hi(0));
}

TEST(LipschitzEstimate, Examples)
{
    Matrix xm(1, 5), um = Matrix::Zero(0, 5);
    xm << 0, 0.5, 1, 2, 3.5;
    EXPECT_NEAR(lipschitz_estimate(DataBatch(xm, um, 2 * xm))(0), 2.0, 1e-15);
    EXPECT_EQ(lipschitz_estimate(DataBatch(xm, um, Matrix::Constant(1, 5, 4.0)))(0), 0.0);
    EXPECT_THROW(lipschitz_estimate(DataBatch(Matrix::Zero(1, 3), um.leftCols(3), Matrix::Ones(1, 3))),
                 PreconditionError);
}

TEST(LipschitzEstimate, MatchesBruteForce)
{
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = random_index(rng, 2, 25);
        DataBatch d = random_batch(rng, n, random_index(rng, 1, 3), random_index(rng, 1, 2));
        if (trial % 7 == 0) {
            d.x_minus.col(1) = d.x_minus.col(0);
            d.u_minus.col(1) = d.u_minus.col(0);
        }
        Vector oracle = Vector::Zero(d.state_dim());
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) {
                if (i == j)
                    continue;
                Vector zi(d.state_dim() + d.input_dim()), zj(zi.size());
                zi << d.x_minus.col(i), d.u_minus.col(i);
                zj << d.x_minus.col(j), d.u_minus.col(j);
                const double dist = distance(zi, zj);
                if (dist < 1e-12)
                    continue;
                for (Index o = 0; o < d.state_dim(); ++o)
                    oracle(o) = std::max(oracle(o), std::abs(d.x_plus(o, i) - d.x_plus(o, j)) / dist);
            }
        ASSERT_EQ(lipschitz_estimate(d), oracle);
    }
}

TEST(EpsBar, FormulaAndShrinkingGrids)
{
    EXPECT_TRUE(eps_bar_zonotope((Vector(2) << 2, 4).finished(), 0.0).is_singleton());
    const Zonotope z = eps_bar_zonotope((Vector(2) << 2, 4).finished(), 1.0);
    EXPECT_EQ(z.generators(), (Matrix(2, 2) << 1, 0, 0, 2).finished());

    double previous = std::numeric_limits<double>::infinity();
    for (int n : {5, 10, 20, 40, 80}) {
        std::vector<Vector> grid;
        for (int i = 0; i <= n; ++i)
            grid.push_back(Vector::Constant(1, static_cast<double>(i) / n));
        const double delta = covering_radius(grid);
        const Zonotope e = eps_bar_zonotope(Vector::Constant(2, 3.0), delta);
        const double volume = e.generators().determinant() * 4.0;
        EXPECT_LT(volume, previous);
        previous = volume;
    }
    EXPECT_LT(previous, 1e-2);
}

TEST(ReachLipschitz, DegenerateAffineModelIsExactPropagation)
{
    Rng rng(12);
    const Matrix a = 0.5 * random_matrix(rng, 2, 2);
    const Matrix b = random_matrix(rng, 2, 1);
    const Vector d = random_vector(rng, 2);
    Matrix cm(2, 4);
    cm << d, a, b;
    LipschitzTerms terms;
    terms.l_lo = terms.l_hi = Vector::Zero(2);
    terms.l_hat = Vector::Constant(2, 5.0);
    terms.delta_hat = 0.0;
    const Zonotope x0 = random_zonotope(rng, 2, 2, 0.2);
    const Zonotope u = random_zonotope(rng, 1, 1, 0.1);
    const ReachResult r = reach_lipschitz(MatrixZonotope(cm), terms, config(8, x0, u, Zonotope(Vector::Zero(2))));
    const auto oracle = propagate(a, b, d, x0, u, 8);
    for (std::size_t k = 0; k < r.sets.size(); ++k) {
        EXPECT_LT((r.sets[k].center() - oracle[k].first).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT((interval_hull(r.sets[k]).radius().col(0) - oracle[k].second).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(ReachLipschitz, AffinePlantCollapsesRemainder)
{
    // Noise-free affine data: the converged estimator leaves almost no residual.
    Rng rng(13);
    Matrix cm(2, 4);
    cm << 0.3, -0.2, 0.5, 0.9, 0.1, 0.7, 0.4, -0.6;
    EstimatorState est = init_default(4, 2, 0.95, NoiseStructure(1, 2, 1e-9), DriftStructure(4, 2, 0.0));
    SlidingWindow w(5, 2, 1);
    for (int t = 0; t < 60; ++t) {
        const Vector x = random_vector(rng, 2), u = random_vector(rng, 1);
        Vector z(3);
        z << x, u;
        const Vector xn = cm.col(0) + cm.rightCols(3) * z;
        Matrix phi(1, 4);
        phi << 1.0, z.transpose();
        est = update(est, phi, xn.transpose());
        w.push(x, u, xn);
    }
    const LipschitzTerms t = lipschitz_terms(w.batch(), model_set(est, true).center());
    EXPECT_LT((t.l_hi - t.l_lo).maxCoeff(), 1e-6);
    EXPECT_LT((model_set(est, true).center() - cm).norm(), 1e-6);
}

TEST(ReachLipschitz, ZeroDriftBranchChangesNothing)
{
    Rng rng(14);
    const MatrixZonotope model = random_matrix_zonotope(rng, 2, 4, 3, 0.1);
    LipschitzTerms terms;
    terms.l_lo = -0.01 * Vector::Ones(2);
    terms.l_hi = 0.02 * Vector::Ones(2);
    terms.l_hat = Vector::Constant(2, 0.5);
    terms.delta_hat = 0.1;
    ReachConfig c = config(4, random_zonotope(rng, 2, 2, 0.1), random_zonotope(rng, 1, 1, 0.1),
                           Zonotope(Vector::Zero(2), 0.003 * Matrix::Identity(2, 2)), 40);
    c.sigma = 0.0;
    const ReachResult r = reach_lipschitz(model, terms, c);
    // Same recursion written without any drift term.
    Zonotope set = c.initial_set;
    const Zonotope inflation = minkowski_sum(minkowski_sum(remainder_zonotope(terms.l_lo, terms.l_hi),
                                                           eps_bar_zonotope(terms.l_hat, terms.delta_hat)),
                                             c.noise_set);
    for (Index k = 0; k < 4; ++k) {
        const Zonotope aug = cartesian_product(Zonotope(Vector::Ones(1)), cartesian_product(set, c.input_sets[0]));
        set = reduce(minkowski_sum(multiply(model, aug), inflation), 40);
        EXPECT_EQ(set.center(), r.sets[static_cast<std::size_t>(k + 1)].center());
        EXPECT_EQ(set.generators(), r.sets[static_cast<std::size_t>(k + 1)].generators());
    }
    EXPECT_EQ(r.sets.front().generators(), c.initial_set.generators());
    ASSERT_TRUE(r.diagnostics.l_hat.has_value());
    EXPECT_EQ(*r.diagnostics.l_hat, terms.l_hat);
}

TEST(ReachResultIo, JsonRoundTripAndBoundsCsv)
{
    Rng rng(15);
    const ReachResult r = reach_ltv(MatrixZonotope(random_matrix(rng, 2, 3)), 0.1,
                                    config(3, random_zonotope(rng, 2, 2), random_zonotope(rng, 1, 1),
                                           Zonotope(Vector::Zero(2), 0.01 * Matrix::Identity(2, 2))));
    const Json j = reach_to_json(r);
    EXPECT_FALSE(j.at("diagnostics").contains("wall_seconds"));
    const ReachResult back = reach_from_json(Json::parse(j.dump()));
    ASSERT_EQ(back.sets.size(), r.sets.size());
    for (std::size_t k = 0; k < r.sets.size(); ++k) {
        EXPECT_EQ(back.sets[k].center(), r.sets[k].center());
        EXPECT_EQ(back.sets[k].generators(), r.sets[k].generators());
    }
    EXPECT_EQ(back.diagnostics.delta_hat, r.diagnostics.delta_hat);

    const auto path = std::filesystem::temp_directory_path() / "zreach_bounds_test.csv";
    write_bounds_csv(path, r);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "step,dim,lower,upper");
    Index rows = 0;
    for (std::string line; std::getline(in, line);)
        ++rows;
    EXPECT_EQ(rows, 4 * 2);
    std::filesystem::remove(path);
}
