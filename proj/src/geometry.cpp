#include "zreach/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zreach
{

namespace
{

double cross(const Point2& a, const Point2& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

} // namespace

std::vector<Point2> vertices_2d(const Zonotope& z, std::pair<Index, Index> dims)
{
    const auto [i, j] = dims;
    if (i < 0 || j < 0 || i >= z.dim() || j >= z.dim() || i == j)
        throw DimensionError("vertices_2d: invalid projection dims (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") for dimension " + std::to_string(z.dim()));

    const Point2 c(z.center()(i), z.center()(j));
    std::vector<Point2> gens;
    for (Index k = 0; k < z.num_generators(); ++k) {
        Point2 g(z.generators()(i, k), z.generators()(j, k));
        if (g.x() == 0.0 && g.y() == 0.0)
            continue;
        // Flip into the upper half-plane so that angles lie in [0, pi).
        if (g.y() < 0.0 || (g.y() == 0.0 && g.x() < 0.0))
            g = -g;
        gens.push_back(g);
    }
    if (gens.empty())
        return {c};

    std::sort(gens.begin(), gens.end(),
              [](const Point2& a, const Point2& b) { return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x()); });

    std::vector<Point2> merged;
    for (const auto& g : gens) {
        if (!merged.empty()) {
            Point2& last = merged.back();
            const double scale = last.norm() * g.norm();
            if (std::abs(cross(last, g)) <= 1e-12 * scale && last.dot(g) > 0.0) {
                last += g;
                continue;
            }
        }
        merged.push_back(g);
    }

    Point2 p = c;
    for (const auto& g : merged)
        p -= g;
    std::vector<Point2> verts;
    verts.reserve(2 * merged.size());
    for (const auto& g : merged) {
        verts.push_back(p);
        p += 2.0 * g;
    }
    for (const auto& g : merged) {
        verts.push_back(p);
        p -= 2.0 * g;
    }
    return verts;
}

double polygon_area(const std::vector<Point2>& poly)
{
    double a = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k)
        a += cross(poly[k], poly[(k + 1) % poly.size()]);
    return 0.5 * std::abs(a);
}

bool point_in_convex_polygon(const std::vector<Point2>& poly, const Point2& p, double tol)
{
    if (poly.empty())
        return false;
    if (poly.size() == 1)
        return (p - poly[0]).norm() <= tol;
    if (poly.size() == 2) {
        const Point2 d = poly[1] - poly[0];
        const double len = d.norm();
        const double t = (p - poly[0]).dot(d) / (len * len);
        const Point2 nearest = poly[0] + std::clamp(t, 0.0, 1.0) * d;
        return (p - nearest).norm() <= tol;
    }
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Point2& a = poly[k];
        const Point2& b = poly[(k + 1) % poly.size()];
        const Point2 e = b - a;
        const double len = e.norm();
        if (len == 0.0)
            continue;
        if (cross(e, p - a) / len < -tol)
            return false;
    }
    return true;
}

} // namespace zreach
