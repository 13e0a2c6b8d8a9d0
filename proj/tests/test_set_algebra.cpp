#include "support.hpp"

#include "zreach/containment.hpp"
#include "zreach/geometry.hpp"
#include "zreach/serialization.hpp"

#include <gtest/gtest.h>

using namespace zreach;
using namespace zreach::test;

namespace
{

Matrix mat(std::initializer_list<std::initializer_list<double>> rows)
{
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& r : rows) {
        Index j = 0;
        for (double v : r)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

Vector vecof(std::initializer_list<double> v)
{
    Vector x(static_cast<Index>(v.size()));
    Index i = 0;
    for (double e : v)
        x(i++) = e;
    return x;
}

} // namespace

TEST(Zonotope, DropsZeroGeneratorColumns)
{
    const Zonotope z(vecof({1, 2}), mat({{1, 0, 0}, {0, 0, 2}}));
    EXPECT_EQ(z.num_generators(), 2);
    EXPECT_TRUE(Zonotope(vecof({1, 2}), Matrix::Zero(2, 3)).is_singleton());
}

TEST(Zonotope, ShapeMismatchThrows)
{
    EXPECT_THROW(Zonotope(vecof({1, 2}), Matrix::Ones(3, 1)), DimensionError);
    EXPECT_THROW(linear_map(Matrix::Identity(3, 3), Zonotope(vecof({1, 2}))), DimensionError);
    EXPECT_THROW(minkowski_sum(Zonotope(vecof({1})), Zonotope(vecof({1, 2}))), DimensionError);
}

TEST(LinearMap, IdentityAndScaling)
{
    const Zonotope z(vecof({1, 2}), Matrix::Identity(2, 2));
    const Zonotope same = linear_map(Matrix::Identity(2, 2), z);
    EXPECT_EQ(same.center(), z.center());
    EXPECT_EQ(same.generators(), z.generators());

    const Zonotope w = linear_map(mat({{2, 0}, {0, 3}}), Zonotope(vecof({1, 1}), mat({{1}, {1}})));
    EXPECT_EQ(w.center(), vecof({2, 3}));
    EXPECT_EQ(w.generators(), mat({{2}, {3}}));
}

TEST(LinearMap, SampledImagesContained)
{
    Rng rng(11);
    const Zonotope z = random_zonotope(rng, 3, 5);
    const Matrix l = random_matrix(rng, 2, 3);
    const Zonotope image = linear_map(l, z);
    for (int i = 0; i < 1000; ++i)
        ASSERT_TRUE(contains_point(image, l * sample(z, rng), 1e-9));
}

TEST(MinkowskiSum, DirectFormula)
{
    const Zonotope a(vecof({0}), mat({{1}}));
    const Zonotope s = minkowski_sum(a, a);
    EXPECT_EQ(s.num_generators(), 2);
    const IntervalMatrix h = interval_hull(s);
    EXPECT_DOUBLE_EQ(h.lower()(0), -2.0);
    EXPECT_DOUBLE_EQ(h.upper()(0), 2.0);

    const Zonotope t = minkowski_sum(Zonotope(vecof({1}), mat({{2}})), Zonotope(vecof({2}), mat({{3}})));
    EXPECT_EQ(t.center(), vecof({3}));
    EXPECT_EQ(t.generators(), mat({{2, 3}}));
}

TEST(MinkowskiSum, HullIsSumOfHulls)
{
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const Zonotope a = random_zonotope(rng, 3, 4);
        const Zonotope b = random_zonotope(rng, 3, 2);
        const auto [alo, ahi] = hull_by_vertices(a);
        const auto [blo, bhi] = hull_by_vertices(b);
        const IntervalMatrix h = interval_hull(minkowski_sum(a, b));
        EXPECT_LT((h.lower().col(0) - (alo + blo)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((h.upper().col(0) - (ahi + bhi)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(MinkowskiSum, SampledSumsContained)
{
    Rng rng(13);
    const Zonotope a = random_zonotope(rng, 2, 3);
    const Zonotope b = random_zonotope(rng, 2, 4);
    const Zonotope s = minkowski_sum(a, b);
    for (int i = 0; i < 1000; ++i)
        ASSERT_TRUE(contains_point(s, sample(a, rng) + sample(b, rng), 1e-9));
}

TEST(CartesianProduct, Formula)
{
    const Zonotope s = cartesian_product(Zonotope(vecof({1})), Zonotope(vecof({2})));
    EXPECT_TRUE(s.is_singleton());
    EXPECT_EQ(s.center(), vecof({1, 2}));

    const Zonotope p = cartesian_product(Zonotope(vecof({0}), mat({{1}})), Zonotope(vecof({5}), mat({{2}})));
    EXPECT_EQ(p.center(), vecof({0, 5}));
    EXPECT_EQ(p.generators(), mat({{1, 0}, {0, 2}}));
}

TEST(CartesianProduct, ProjectionRecoversFirstBlock)
{
    Rng rng(14);
    const Zonotope a = random_zonotope(rng, 2, 3);
    const Zonotope b = random_zonotope(rng, 3, 2);
    const Zonotope p = cartesian_product(a, b);
    Matrix proj = Matrix::Zero(2, 5);
    proj.leftCols(2) = Matrix::Identity(2, 2);
    const Zonotope back = linear_map(proj, p);
    for (int i = 0; i < 300; ++i) {
        Vector x(5);
        x << sample(a, rng), sample(b, rng);
        ASSERT_TRUE(contains_point(p, x, 1e-9));
        ASSERT_TRUE(contains_point(a, sample(back, rng), 1e-9));
    }
}

TEST(IntervalHull, RowSums)
{
    const IntervalMatrix h = interval_hull(Zonotope(Vector::Zero(2), mat({{1, -1}, {0, 2}})));
    EXPECT_EQ(h.lower().col(0), vecof({-2, -2}));
    EXPECT_EQ(h.upper().col(0), vecof({2, 2}));
    const IntervalMatrix s = interval_hull(Zonotope(vecof({3, 4})));
    EXPECT_EQ(s.lower(), s.upper());
}

TEST(IntervalHull, MatchesVertexEnumeration)
{
    Rng rng(15);
    for (int trial = 0; trial < 100; ++trial) {
        const Zonotope z = random_zonotope(rng, random_index(rng, 1, 4), random_index(rng, 0, 7));
        const auto [lo, hi] = hull_by_vertices(z);
        const IntervalMatrix h = interval_hull(z);
        EXPECT_LT((h.lower().col(0) - lo).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((h.upper().col(0) - hi).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Reduce, NoOpWhenSmall)
{
    Rng rng(16);
    const Zonotope z = random_zonotope(rng, 2, 3);
    const Zonotope r = reduce(z, 5);
    EXPECT_EQ(r.generators(), z.generators());
    EXPECT_THROW(reduce(z, 1), PreconditionError);
}

TEST(Reduce, SampledPointsStayInside)
{
    Rng rng(17);
    for (auto method : {ReductionMethod::Box, ReductionMethod::Pca}) {
        const Zonotope z = random_zonotope(rng, 2, 10);
        const Zonotope r = reduce(z, 4, method);
        EXPECT_LE(r.num_generators(), 4);
        for (int i = 0; i < 1000; ++i)
            ASSERT_TRUE(contains_point(r, sample(z, rng, SamplingMode::Vertex), 1e-7));
    }
}

TEST(Reduce, BoxKeepsIntervalHull)
{
    Rng rng(18);
    for (int trial = 0; trial < 30; ++trial) {
        const Zonotope z = random_zonotope(rng, 3, 12);
        const IntervalMatrix a = interval_hull(z);
        const IntervalMatrix b = interval_hull(reduce(z, 5));
        EXPECT_LT((a.lower() - b.lower()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((a.upper() - b.upper()).cwiseAbs().maxCoeff(), 1e-12);
    }
    // Axis-aligned generators are a fixed point.
    const Zonotope box(vecof({1, -1}), mat({{2, 0}, {0, 0.5}}));
    EXPECT_EQ(reduce(box, 2).generators(), box.generators());
}

TEST(Reduce, InFrameContainsOriginal)
{
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const Zonotope z = random_zonotope(rng, 3, 15);
        Matrix frame = random_matrix(rng, 3, 3) + 2.0 * Matrix::Identity(3, 3);
        const Zonotope r = reduce_in_frame(z, 6, frame);
        EXPECT_LE(r.num_generators(), 6);
        for (int i = 0; i < 200; ++i)
            ASSERT_TRUE(contains_point(r, sample(z, rng, SamplingMode::Vertex), 1e-7));
    }
}

TEST(Containment, Basics)
{
    const Zonotope line(vecof({0}), mat({{1}}));
    EXPECT_TRUE(contains_point(line, vecof({0})));
    EXPECT_TRUE(contains_point(line, vecof({1})));
    EXPECT_FALSE(contains_point(line, vecof({1.5})));
    // Off the affine hull of a flat set.
    const Zonotope flat(vecof({0, 0}), mat({{1}, {1}}));
    EXPECT_TRUE(contains_point(flat, vecof({0.5, 0.5})));
    EXPECT_FALSE(contains_point(flat, vecof({0.5, 0.4})));
    EXPECT_TRUE(contains_point(Zonotope(vecof({2, 3})), vecof({2, 3})));
    EXPECT_FALSE(contains_point(Zonotope(vecof({2, 3})), vecof({2, 3.1})));
}

TEST(Containment, ConstructiveWitnessAndSeparation)
{
    Rng rng(20);
    for (int trial = 0; trial < 300; ++trial) {
        const Index n = random_index(rng, 1, 4);
        const Zonotope z = random_zonotope(rng, n, random_index(rng, 1, 8));
        const Vector b = random_factors(rng, z.num_generators());
        ASSERT_TRUE(contains_point(z, member(z, b)));

        // Push a member past the support in a random direction: certified outside.
        const Vector d = random_vector(rng, n).normalized();
        const double h = support(z, d);
        const Vector out = member(z, b) + (h - d.dot(member(z, b)) + 0.05) * d;
        ASSERT_FALSE(contains_point(z, out));
    }
}

TEST(Containment, GaugeMatchesScaledWitness)
{
    // For a point t * v on the boundary of a box, the gauge is t.
    const Zonotope box(Vector::Zero(2), Matrix::Identity(2, 2));
    const auto g = containment_gauge(box, vecof({0.7, -0.3}));
    ASSERT_TRUE(g.has_value());
    EXPECT_NEAR(*g, 0.7, 1e-8);
    EXPECT_FALSE(containment_gauge(Zonotope(vecof({0, 0}), mat({{1}, {0}})), vecof({0, 1})).has_value());
}

TEST(Sample, StaysInsideAndCoversExtremes)
{
    Rng rng(21);
    const Zonotope single(vecof({4, 5}));
    EXPECT_EQ(sample(single, rng), single.center());

    const Zonotope line(vecof({0}), mat({{1}}));
    double lo = 1.0, hi = -1.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = sample(line, rng)(0);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    EXPECT_LE(lo, -0.99);
    EXPECT_GE(hi, 0.99);
    EXPECT_GE(lo, -1.0);
    EXPECT_LE(hi, 1.0);

    const Zonotope z = random_zonotope(rng, 3, 6);
    for (int i = 0; i < 500; ++i)
        ASSERT_TRUE(contains_point(z, sample(z, rng), 1e-9));
}

TEST(Vertices2d, BoxSegmentAndArea)
{
    const auto box = vertices_2d(Zonotope(Vector::Zero(2), Matrix::Identity(2, 2)), {0, 1});
    ASSERT_EQ(box.size(), 4u);
    for (const auto& v : box)
        EXPECT_DOUBLE_EQ(std::abs(v.x()) + std::abs(v.y()), 2.0);
    const auto seg = vertices_2d(Zonotope(Vector::Zero(2), mat({{1}, {2}})), {0, 1});
    EXPECT_EQ(seg.size(), 2u);

    Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const Zonotope z = random_zonotope(rng, 2, random_index(rng, 2, 7));
        const auto poly = vertices_2d(z, {0, 1});
        EXPECT_LE(static_cast<Index>(poly.size()), 2 * z.num_generators());
        double expected = 0.0;
        const Matrix& g = z.generators();
        for (Index i = 0; i < g.cols(); ++i)
            for (Index j = i + 1; j < g.cols(); ++j)
                expected += 4.0 * std::abs(g(0, i) * g(1, j) - g(1, i) * g(0, j));
        EXPECT_NEAR(polygon_area(poly), expected, 1e-9 * std::max(1.0, expected));
        for (int i = 0; i < 200; ++i) {
            const Vector p = sample(z, rng);
            ASSERT_TRUE(point_in_convex_polygon(poly, Point2(p(0), p(1)), 1e-9));
        }
    }
}

TEST(Vertices2d, ProjectionOfHigherDimension)
{
    Rng rng(23);
    const Zonotope z = random_zonotope(rng, 4, 6);
    const auto poly = vertices_2d(z, {1, 3});
    for (int i = 0; i < 300; ++i) {
        const Vector p = sample(z, rng);
        ASSERT_TRUE(point_in_convex_polygon(poly, Point2(p(1), p(3)), 1e-9));
    }
}

TEST(MatrixZonotope, VecUnvecRoundTrip)
{
    Rng rng(24);
    const MatrixZonotope m = random_matrix_zonotope(rng, 3, 2, 5);
    const MatrixZonotope back = unvectorize(vectorize(m), 3, 2);
    EXPECT_EQ(back.center(), m.center());
    ASSERT_EQ(back.num_generators(), m.num_generators());
    for (Index i = 0; i < m.num_generators(); ++i)
        EXPECT_EQ(back.generators()[static_cast<std::size_t>(i)], m.generators()[static_cast<std::size_t>(i)]);
    EXPECT_THROW(unvectorize(vectorize(m), 4, 2), DimensionError);

    const MatrixZonotope scalar(mat({{2}}), {mat({{3}})});
    const Zonotope v = vectorize(scalar);
    EXPECT_EQ(v.center(), vecof({2}));
    EXPECT_EQ(v.generators(), mat({{3}}));
}

TEST(MatrixZonotope, VecOfSumIsSumOfVecs)
{
    Rng rng(25);
    const MatrixZonotope a = random_matrix_zonotope(rng, 2, 3, 3);
    const MatrixZonotope b = random_matrix_zonotope(rng, 2, 3, 2);
    const Zonotope lhs = vectorize(minkowski_sum(a, b));
    const Zonotope rhs = minkowski_sum(vectorize(a), vectorize(b));
    EXPECT_EQ(lhs.center(), rhs.center());
    EXPECT_EQ(lhs.generators(), rhs.generators());
}

TEST(MatrixZonotope, ReduceContainsMembers)
{
    Rng rng(26);
    const MatrixZonotope m = random_matrix_zonotope(rng, 2, 2, 12);
    EXPECT_EQ(reduce(m, 20).num_generators(), 12);
    EXPECT_THROW(reduce(m, 3), PreconditionError);
    const MatrixZonotope r = reduce(m, 6);
    EXPECT_LE(r.num_generators(), 6);
    for (int i = 0; i < 500; ++i)
        ASSERT_TRUE(contains_matrix(r, sample(m, rng, SamplingMode::Vertex), 1e-7));
}

TEST(MatrixZonotope, IntervalAndFrobenius)
{
    const MatrixZonotope point(mat({{3, 4}}));
    const IntervalMatrix pi = interval_matrix(point);
    EXPECT_EQ(pi.lower(), pi.upper());
    EXPECT_DOUBLE_EQ(interval_frobenius(pi), 5.0);

    const IntervalMatrix s = interval_matrix(MatrixZonotope(mat({{0}}), {mat({{2}})}));
    EXPECT_DOUBLE_EQ(s.lower()(0, 0), -2.0);
    EXPECT_DOUBLE_EQ(s.upper()(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(interval_frobenius(s), 2.0);

    Rng rng(27);
    const MatrixZonotope m = random_matrix_zonotope(rng, 3, 3, 4);
    const double bound = interval_frobenius(interval_matrix(m));
    for (int i = 0; i < 1000; ++i)
        ASSERT_LE(sample(m, rng, SamplingMode::Vertex).norm(), bound * (1 + 1e-12));
}

TEST(Multiply, DegenerateCases)
{
    Rng rng(28);
    const Zonotope z = random_zonotope(rng, 3, 4);
    const Matrix c = random_matrix(rng, 2, 3);
    const Zonotope a = multiply(MatrixZonotope(c), z);
    const Zonotope b = linear_map(c, z);
    EXPECT_EQ(a.center(), b.center());
    EXPECT_EQ(a.generators(), b.generators());

    // Singleton operand: exactly { A c : A in M }.
    const MatrixZonotope m = random_matrix_zonotope(rng, 2, 3, 3);
    const Vector x = random_vector(rng, 3);
    const Zonotope img = multiply(m, Zonotope(x));
    EXPECT_EQ(img.num_generators(), 3);
    for (Index i = 0; i < 3; ++i)
        EXPECT_LT((img.generators().col(i) - m.generators()[static_cast<std::size_t>(i)] * x).norm(), 1e-14);
}

TEST(Multiply, SampledProductsContained)
{
    Rng rng(29);
    const MatrixZonotope m = random_matrix_zonotope(rng, 2, 3, 3);
    const Zonotope z = random_zonotope(rng, 3, 3);
    const Zonotope p = multiply(m, z);
    for (int i = 0; i < 1000; ++i)
        ASSERT_TRUE(contains_point(p, sample(m, rng) * sample(z, rng), 1e-9));
}

TEST(Serialization, RoundTripsExactly)
{
    Rng rng(30);
    const Zonotope z = random_zonotope(rng, 3, 4);
    const Zonotope back = zonotope_from_json(Json::parse(to_json(z).dump()), "z");
    EXPECT_EQ(back.center(), z.center());
    EXPECT_EQ(back.generators(), z.generators());

    const MatrixZonotope m = random_matrix_zonotope(rng, 2, 3, 2);
    const MatrixZonotope mb = matrix_zonotope_from_json(Json::parse(to_json(m).dump()), "m");
    EXPECT_EQ(mb.center(), m.center());
    EXPECT_EQ(mb.generators()[1], m.generators()[1]);

    EXPECT_THROW(zonotope_from_json(Json::parse(R"({"center": [1, 2], "generators": [[1]]})"), "z"), FormatError);
    EXPECT_THROW(zonotope_from_json(Json::parse(R"({"generators": []})"), "z"), FormatError);
}
