#pragma once

#include "vemhyper/geometry.hpp"
#include "vemhyper/types.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace vemhyper {

/// Boundary tags assigned by the generators, one per side of the domain
/// quadrilateral (corner order: bottom-left, bottom-right, top-right, top-left).
enum BoundaryTag : int { kBottom = 1, kRight = 2, kTop = 3, kLeft = 4 };

/// Convex, positively oriented quadrilateral. Structured generators build on
/// the unit square and map through the bilinear (transfinite) corner map.
class Domain {
 public:
  enum class Kind { UnitSquare, Rectangle, TaperedQuad };

  static Domain unit_square();
  static Domain rectangle(double width, double height);
  /// Corners counter-clockwise starting at the bottom-left one.
  static Domain tapered(const std::array<Vec2, 4>& corners);

  Kind kind() const { return kind_; }
  const std::array<Vec2, 4>& corners() const { return corners_; }
  double area() const;

  /// Bilinear map from the parameter square [0,1]^2.
  Vec2 map(const Vec2& st) const;
  /// Jacobian of `map`, columns d/ds and d/dt.
  Mat2 map_jacobian(const Vec2& st) const;
  /// Newton inversion of `map`. Throws InvalidInput outside the domain.
  Vec2 inverse_map(const Vec2& x, double tol = 1e-12) const;
  bool contains(const Vec2& x, double rel_tol = 1e-10) const;

  std::string describe() const;

 private:
  Domain(Kind kind, const std::array<Vec2, 4>& corners);
  Kind kind_;
  std::array<Vec2, 4> corners_;
};

enum class MeshFamily { SQ1, DQ2S, SunStar, InterlockingSunStar, Voronoi };

std::string to_string(MeshFamily family);
MeshFamily mesh_family_from_string(const std::string& name);

/// Polygonal mesh with counter-clockwise vertex cycles. Once built the mesh
/// is immutable; generators are deterministic in their inputs.
struct PolygonalMesh {
  std::vector<Vec2> vertices;
  std::vector<std::vector<int>> elements;
  /// Boundary edge (i, j) in element orientation, mapped to its tag.
  std::map<std::pair<int, int>, int> boundary_edges;
  Domain domain = Domain::unit_square();

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_elements() const { return elements.size(); }
  Polygon element_polygon(std::size_t e) const;
  double element_area(std::size_t e) const;
  double total_area() const;

  /// Vertices touching any boundary edge carrying `tag`.
  std::vector<int> boundary_vertices(int tag) const;
  std::vector<int> all_boundary_vertices() const;
  /// Index of the vertex located at `x`, or -1.
  int find_vertex(const Vec2& x, double tol = 1e-9) const;
};

/// Result of the structural checks applied to every generated mesh.
struct MeshReport {
  bool ok = true;
  std::vector<std::string> problems;
};

/// Checks simplicity and orientation of each element, tiling of the domain,
/// and edge-sharing (interior edges shared by exactly two elements in
/// opposite orientation, boundary edges tagged exactly once).
MeshReport validate(const PolygonalMesh& mesh);

PolygonalMesh generate_sq1(int level, const Domain& domain);

/// Distorted quadrilaterals with edge-midpoint nodes (8 vertices per element).
/// Interior grid corners are perturbed by up to `distortion` times the cell
/// size in parameter space; failed attempts retry with 0.8x the perturbation.
PolygonalMesh generate_dq2s(int level, const Domain& domain, double distortion,
                            std::uint64_t seed);

/// Shape controls for sun-and-star meshes, as fractions of the cell size.
struct SunStarShape {
  /// Distance from a grid corner to the star's arm tips along grid lines.
  double arm = 0.35;
  /// Diagonal offset of the star's reflex notch (the serration depth).
  double depth = 0.15;
};

/// Sun cells (convex 12-gons) with star cells at grid vertices. With
/// `interlocking`, each sun is split into two point-symmetric hooked halves.
PolygonalMesh generate_sun_star(int level, const Domain& domain, bool interlocking,
                                const SunStarShape& shape = {});

/// Voronoi mesh of 2^(2N) seeds after `lloyd_iters` centroidal relaxation
/// sweeps, clipped to the domain.
/// Final Voronoi sites; element i of generate_voronoi is the cell of site i.
std::vector<Vec2> voronoi_sites(int level, const Domain& domain, int lloyd_iters, std::uint64_t seed);
PolygonalMesh generate_voronoi(int level, const Domain& domain, int lloyd_iters,
                               std::uint64_t seed);

struct MeshOptions {
  double distortion = 0.3;
  std::uint64_t seed = 1;
  int lloyd_iters = 10;
  SunStarShape sun_star{};
};

PolygonalMesh generate(MeshFamily family, int level, const Domain& domain,
                       const MeshOptions& options = {});

/// Arithmetic mean of element diameters.
double mean_diameter(const PolygonalMesh& mesh);

/// "VPOLY 1" text format; 17 significant digits so reads round-trip exactly.
void write_vpoly(std::ostream& os, const PolygonalMesh& mesh);
PolygonalMesh read_vpoly(std::istream& is);

}  // namespace vemhyper
