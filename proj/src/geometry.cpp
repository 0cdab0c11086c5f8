#include "vemhyper/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vemhyper {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

double min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto angle = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), u.dot(v));
  };
  return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

}  // namespace

double signed_area(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

Vec2 centroid(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  // Shift to the first vertex so large offsets do not cost precision.
  const Vec2 o = poly[0];
  double a2 = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i] - o, q = poly[(i + 1) % n] - o;
    const double w = cross(p, q);
    a2 += w;
    c += w * (p + q);
  }
  return o + c / (3.0 * a2);
}

double diameter(std::span<const Vec2> poly) {
  double d = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i)
    for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, (poly[i] - poly[j]).norm());
  return d;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = orient(c, d, a), d2 = orient(c, d, b);
  const double d3 = orient(a, b, c), d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

bool is_simple(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (poly[i] == poly[j]) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      const Vec2& c = poly[j];
      const Vec2& d = poly[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges may only share their common vertex; folding back
        // onto each other is a degeneracy.
        const Vec2& shared = (j == i + 1) ? b : a;
        const Vec2& other1 = (j == i + 1) ? a : b;
        const Vec2& other2 = (j == i + 1) ? d : c;
        if (orient(other1, shared, other2) == 0.0 && (other1 - shared).dot(other2 - shared) > 0)
          return false;
        continue;
      }
      if (segments_intersect(a, b, c, d)) return false;
    }
  }
  return true;
}

bool is_concave(std::span<const Vec2> poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = poly[(i + n - 1) % n];
    const Vec2& cur = poly[i];
    const Vec2& next = poly[(i + 1) % n];
    if (orient(prev, cur, next) < 0) return true;
  }
  return false;
}

std::vector<std::array<int, 3>> triangulate(std::span<const Vec2> poly) {
  const int n = static_cast<int>(poly.size());
  if (n < 3 || !is_simple(poly)) throw InvalidInput("triangulate: polygon is not simple");
  const double area = signed_area(poly);
  if (!(area > 0)) throw InvalidInput("triangulate: polygon is not counter-clockwise");

  std::vector<int> ring(n);
  std::iota(ring.begin(), ring.end(), 0);
  std::vector<std::array<int, 3>> out;
  out.reserve(n - 2);
  // Ears thinner than this relative to the polygon are treated as collinear.
  const double area_floor = 1e-14 * area;

  while (ring.size() > 3) {
    const int m = static_cast<int>(ring.size());
    int best = -1;
    double best_quality = -1.0;
    for (int k = 0; k < m; ++k) {
      const int ia = ring[(k + m - 1) % m], ib = ring[k], ic = ring[(k + 1) % m];
      const Vec2 &a = poly[ia], &b = poly[ib], &c = poly[ic];
      if (orient(a, b, c) <= 2.0 * area_floor) continue;
      bool blocked = false;
      for (int r = 0; r < m && !blocked; ++r) {
        const int ip = ring[r];
        if (ip == ia || ip == ib || ip == ic) continue;
        const Vec2& p = poly[ip];
        blocked = orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0;
      }
      if (blocked) continue;
      if (m == 4) {
        // The last triangle must not collapse onto a straight edge.
        const int id = ring[(k + 2) % m];
        if (orient(a, c, poly[id]) <= 2.0 * area_floor) continue;
      }
      const double q = min_angle(a, b, c);
      if (q > best_quality) {
        best_quality = q;
        best = k;
      }
    }
    if (best < 0) throw InvalidInput("triangulate: no ear found (degenerate polygon)");
    out.push_back({ring[(best + m - 1) % m], ring[best], ring[(best + 1) % m]});
    ring.erase(ring.begin() + best);
  }
  if (orient(poly[ring[0]], poly[ring[1]], poly[ring[2]]) <= 2.0 * area_floor)
    throw InvalidInput("triangulate: degenerate final triangle");
  out.push_back({ring[0], ring[1], ring[2]});
  return out;
}

}  // namespace vemhyper
