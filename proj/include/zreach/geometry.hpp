#ifndef ZREACH_GEOMETRY_HPP
#define ZREACH_GEOMETRY_HPP

#include "zreach/zonotope.hpp"

#include <utility>
#include <vector>

namespace zreach
{

using Point2 = Eigen::Vector2d;

/// Vertices of the projection of z onto dimensions (dims.first, dims.second),
/// counter-clockwise. Parallel projected generators are merged, so the count
/// is at most twice the number of distinct nonzero directions. A singleton
/// projects to one vertex, a single direction to a two-vertex segment.
std::vector<Point2> vertices_2d(const Zonotope& z, std::pair<Index, Index> dims);

/// Shoelace area of a simple polygon given in order.
double polygon_area(const std::vector<Point2>& poly);

/// Point in a convex counter-clockwise polygon, with absolute slack tol.
/// Degenerate polygons (point, segment) are handled as such.
bool point_in_convex_polygon(const std::vector<Point2>& poly, const Point2& p, double tol = 1e-9);

} // namespace zreach

#endif
