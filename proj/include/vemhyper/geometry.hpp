#pragma once

#include "vemhyper/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace vemhyper {

using Polygon = std::vector<Vec2>;
using Triangle = std::array<Vec2, 3>;

/// Shoelace area; positive for counter-clockwise vertex order.
double signed_area(std::span<const Vec2> poly);

Vec2 centroid(std::span<const Vec2> poly);

/// Largest distance between any two vertices.
double diameter(std::span<const Vec2> poly);

/// True when no two non-adjacent edges intersect and no vertex repeats.
/// Collinear neighbours (straight angles) are allowed.
bool is_simple(std::span<const Vec2> poly);

/// True when some vertex has an interior angle greater than pi (CCW input).
bool is_concave(std::span<const Vec2> poly);

/// Closed segment intersection test, robust to collinear overlap.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// Triangulates a simple CCW polygon by ear clipping. Returns n-2 triangles
/// given as vertex-index triples into `poly`, each with strictly positive
/// area. Among the available ears the one with the largest minimum angle is
/// clipped first, which keeps slivers away from collinear vertex runs.
/// Throws InvalidInput for non-simple or clockwise input.
std::vector<std::array<int, 3>> triangulate(std::span<const Vec2> poly);

}  // namespace vemhyper
