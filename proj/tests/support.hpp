#ifndef ZREACH_TESTS_SUPPORT_HPP
#define ZREACH_TESTS_SUPPORT_HPP

#include "zreach/rng.hpp"
#include "zreach/types.hpp"
#include "zreach/zonotope.hpp"

#include <cmath>
#include <vector>

namespace zreach::test
{

inline Matrix random_matrix(Rng& rng, Index rows, Index cols, double scale = 1.0)
{
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = rng.uniform(-scale, scale);
    return m;
}

inline Vector random_vector(Rng& rng, Index n, double scale = 1.0)
{
    return random_matrix(rng, n, 1, scale).col(0);
}

inline Index random_index(Rng& rng, Index lo, Index hi)
{
    return lo + static_cast<Index>(rng.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Zonotope random_zonotope(Rng& rng, Index n, Index gens, double scale = 1.0)
{
    return Zonotope(random_vector(rng, n, 3.0 * scale), random_matrix(rng, n, gens, scale));
}

inline MatrixZonotope random_matrix_zonotope(Rng& rng, Index rows, Index cols, Index gens, double scale = 1.0)
{
    std::vector<Matrix> g;
    for (Index i = 0; i < gens; ++i)
        g.push_back(random_matrix(rng, rows, cols, scale));
    return MatrixZonotope(random_matrix(rng, rows, cols, 2.0 * scale), g);
}

/// Factors in [-1, 1], with some pinned to the bounds.
inline Vector random_factors(Rng& rng, Index n)
{
    Vector b(n);
    for (Index i = 0; i < n; ++i) {
        const double u = rng.uniform();
        b(i) = u < 0.15 ? -1.0 : u < 0.3 ? 1.0 : rng.uniform(-1.0, 1.0);
    }
    return b;
}

/// Member with known factors.
inline Vector member(const Zonotope& z, const Vector& factors)
{
    Vector x = z.center();
    for (Index i = 0; i < z.num_generators(); ++i)
        x += factors(i) * z.generators().col(i);
    return x;
}

inline Matrix member(const MatrixZonotope& m, const Vector& factors)
{
    Matrix a = m.center();
    for (Index i = 0; i < m.num_generators(); ++i)
        a += factors(i) * m.generators()[static_cast<std::size_t>(i)];
    return a;
}

/// Support function h(d) = d^T c + sum_i |d^T g_i|, summed term by term.
inline double support(const Zonotope& z, const Vector& d)
{
    double h = 0.0;
    for (Index i = 0; i < z.dim(); ++i)
        h += d(i) * z.center()(i);
    for (Index j = 0; j < z.num_generators(); ++j) {
        double s = 0.0;
        for (Index i = 0; i < z.dim(); ++i)
            s += d(i) * z.generators()(i, j);
        h += std::abs(s);
    }
    return h;
}

/// Interval hull by enumerating all 2^g factor vertices (small g only).
inline std::pair<Vector, Vector> hull_by_vertices(const Zonotope& z)
{
    const Index g = z.num_generators();
    Vector lo = Vector::Constant(z.dim(), std::numeric_limits<double>::infinity());
    Vector hi = -lo;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g); ++mask) {
        Vector b(g);
        for (Index i = 0; i < g; ++i)
            b(i) = (mask >> i) & 1 ? 1.0 : -1.0;
        const Vector v = member(z, b);
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    if (g == 0)
        lo = hi = z.center();
    return {lo, hi};
}

/// Plain-loop Euclidean distance.
inline double distance(const Vector& a, const Vector& b)
{
    double s = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double d = a(i) - b(i);
        s += d * d;
    }
    return std::sqrt(s);
}

inline Matrix random_spd(Rng& rng, Index n, double floor = 0.1)
{
    const Matrix a = random_matrix(rng, n, n);
    return a * a.transpose() + floor * Matrix::Identity(n, n);
}

/// Tr(W P+(K)) with P+(K) = lambda^-1 (I - K phi) P (I - K phi)^T + K Q K^T.
inline double cost(const Matrix& k, const Matrix& p, const Matrix& phi, double lambda, const Matrix& q, const Matrix& w)
{
    const Matrix t = Matrix::Identity(p.rows(), p.rows()) - k * phi;
    return (w * (t * p * t.transpose() / lambda + k * q * k.transpose())).trace();
}

/// Minimizer of the quadratic cost from its finite-difference gradient and
/// Hessian at K = 0. Central differences of a quadratic are exact, so only
/// rounding separates this from the true minimizer.
inline Matrix minimize_numerically(const Matrix& p, const Matrix& phi, double lambda, const Matrix& q, const Matrix& w)
{
    const Index n = p.rows();
    const Index d = n * phi.rows();
    const double h = 1.0;
    auto j = [&](const Vector& kv) { return cost(unvec(kv, n, phi.rows()), p, phi, lambda, q, w); };
    const Vector zero = Vector::Zero(d);
    Vector grad(d);
    Matrix hess(d, d);
    for (Index a = 0; a < d; ++a) {
        Vector ea = Vector::Zero(d);
        ea(a) = h;
        grad(a) = (j(zero + ea) - j(zero - ea)) / (2 * h);
        for (Index b = 0; b < d; ++b) {
            Vector eb = Vector::Zero(d);
            eb(b) = h;
            hess(a, b) = (j(ea + eb) - j(ea - eb) - j(eb - ea) + j(-ea - eb)) / (4 * h * h);
        }
    }
    return unvec(-hess.ldlt().solve(grad), n, phi.rows());
}

} // namespace zreach::test

#endif
