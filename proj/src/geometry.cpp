#include "scsl/geometry.hpp"

#include <cmath>

namespace scsl {

double euclidean_distance(const Point& a, const Point& b) {
  return std::hypot(a.first - b.first, a.second - b.second);
}

bool point_on_segment(const Point& p, const Point& a, const Point& b) {
  const double cross =
      (b.first - a.first) * (p.second - a.second) - (b.second - a.second) * (p.first - a.first);
  if (std::abs(cross) > 1e-9) return false;
  const double dot =
      (p.first - a.first) * (b.first - a.first) + (p.second - a.second) * (b.second - a.second);
  if (dot < -1e-9) return false;
  const double len2 = (b.first - a.first) * (b.first - a.first) +
                      (b.second - a.second) * (b.second - a.second);
  return dot <= len2 + 1e-9;
}

bool point_in_polygon(const Point& p, const std::vector<Point>& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (point_on_segment(p, poly[i], poly[(i + 1) % n])) return true;

  // cast a ray in +x direction, counting edge crossings; the half-open rule
  // [y_low, y_high) avoids double counting at vertices
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = poly[i].first, yi = poly[i].second;
    const double xj = poly[j].first, yj = poly[j].second;
    const bool crosses = (yi > p.second) != (yj > p.second);
    if (!crosses) continue;
    const double x_at = xi + (p.second - yi) / (yj - yi) * (xj - xi);
    if (p.first < x_at) inside = !inside;
  }
  return inside;
}

} // namespace scsl
