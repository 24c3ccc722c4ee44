#pragma once

#include <utility>
#include <vector>

namespace scsl {

using Point = std::pair<double, double>;

// Ray-casting point-in-polygon test over a closed simple polygon.
// Points exactly on an edge count as inside.
bool point_in_polygon(const Point& p, const std::vector<Point>& polygon);

bool point_on_segment(const Point& p, const Point& a, const Point& b);

double euclidean_distance(const Point& a, const Point& b);

} // namespace scsl
