#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace monofem {

// Conforming P1 triangulation of a polygonal approximation of the domain.
// Boundary edges are stored as ordered node pairs forming counterclockwise
// loops, so the outward normal of edge (a,b) is the direction (b-a) rotated
// by -90 degrees. Immutable after finalize(); safe to share across threads.
struct Mesh {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;     // CCW node triples
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<int> region_label;                 // per-triangle tag

  // Derived connectivity, built by finalize().
  std::vector<double> tri_area;
  std::vector<Eigen::Vector2d> tri_centroid;
  // grad[t][i] is the gradient of the P1 basis function of local node i.
  std::vector<std::array<Eigen::Vector2d, 3>> tri_grad;
  // neighbor across local edge i = (node i, node i+1); -1 on the boundary.
  std::vector<std::array<int, 3>> tri_neighbor;
  std::vector<int> boundary_edge_tri;            // owning triangle
  std::vector<double> boundary_edge_len;
  std::vector<bool> node_on_boundary;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_boundary_edges() const { return static_cast<int>(boundary_edges.size()); }
  double total_area() const;
  double boundary_length() const;
  Eigen::Vector2d edge_outward_normal(int be) const;

  // Builds derived data and validates the structural invariants
  // (positive areas, closed boundary loops, each boundary edge on exactly
  // one triangle, indices in range). Throws std::runtime_error on failure.
  void finalize();
};

// Non-empty open piece of the boundary, as a set of whole boundary edges.
struct GammaSpec {
  std::vector<int> edge_indices;  // into Mesh::boundary_edges
  double arc_length = 0.0;
  int size() const { return static_cast<int>(edge_indices.size()); }
};

// Element subset of the mesh; one flag per triangle.
struct RegionMask {
  std::vector<bool> flags;

  int size() const { return static_cast<int>(flags.size()); }
  int count() const;
  bool empty() const { return count() == 0; }
  bool operator[](int t) const { return flags[t]; }

  static RegionMask none(const Mesh& mesh);
  static RegionMask all(const Mesh& mesh);
  RegionMask operator&(const RegionMask& o) const;
  RegionMask operator|(const RegionMask& o) const;
  RegionMask operator-(const RegionMask& o) const;  // set difference
  RegionMask complement() const;
  bool is_subset_of(const RegionMask& o) const;
  bool operator==(const RegionMask& o) const { return flags == o.flags; }
};

struct DomainSpec {
  enum class Kind { Disk, Rectangle };
  Kind kind = Kind::Disk;
  double radius = 1.0;                       // disk
  Eigen::Vector2d center{0.0, 0.0};          // disk
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;  // rectangle

  static DomainSpec disk(double radius, Eigen::Vector2d center = {0.0, 0.0});
  static DomainSpec rectangle(double x0, double x1, double y0, double y1);
};

// Conforming triangulation with max edge length <= 1.5*h.
// Disk: concentric rings with 6k nodes on ring k. Rectangle: structured
// grid with alternating diagonals. Throws std::invalid_argument for
// non-positive h or degenerate extents.
Mesh build_mesh(const DomainSpec& spec, double h);

// Boundary-piece predicates used by select_gamma.
struct GammaPredicate {
  enum class Kind { Full, AngleInterval, Box };
  Kind kind = Kind::Full;
  // Angle interval (from, to) in radians, measured at the edge midpoint
  // around `center`; wraps modulo 2*pi when from > to.
  double from = 0.0, to = 0.0;
  Eigen::Vector2d center{0.0, 0.0};
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;  // box on edge midpoints

  static GammaPredicate full();
  static GammaPredicate angle_interval(double from, double to,
                                       Eigen::Vector2d center = {0.0, 0.0});
  static GammaPredicate box(double xmin, double xmax, double ymin, double ymax);
};

// Selects the boundary edges satisfying the predicate. Throws
// std::invalid_argument if the selection is empty ("empty Gamma").
GammaSpec select_gamma(const Mesh& mesh, const GammaPredicate& pred);

// Point-in-set tests evaluated at triangle centroids.
struct MaskPredicate {
  enum class Kind { Ball, Halfplane, Box, Annulus, Never, Always };
  Kind kind = Kind::Never;
  Eigen::Vector2d center{0.0, 0.0};
  double radius = 0.0, inner_radius = 0.0;
  Eigen::Vector2d direction{1.0, 0.0};  // halfplane: direction.dot(x) <= offset
  double offset = 0.0;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;

  static MaskPredicate ball(Eigen::Vector2d center, double radius);
  static MaskPredicate halfplane(Eigen::Vector2d direction, double offset);
  static MaskPredicate box(double xmin, double xmax, double ymin, double ymax);
  static MaskPredicate annulus(Eigen::Vector2d center, double inner_radius,
                               double outer_radius);
  static MaskPredicate never();
  static MaskPredicate always();

  bool contains(const Eigen::Vector2d& p) const;
};

RegionMask mask_from_predicate(const Mesh& mesh, const MaskPredicate& pred);

// Inner approximation: flags only triangles whose three vertices and
// centroid all satisfy the predicate. The complement is then an outer
// approximation of the complement set, which makes energy functionals over
// the two regions conservative (numerator from below, leak from above).
RegionMask mask_fully_inside(const Mesh& mesh, const MaskPredicate& pred);

double mask_area(const Mesh& mesh, const RegionMask& mask);

// True iff the unflagged triangles together with the exterior form a single
// connected component. Adjacency is through shared edges; the exterior is
// reachable through any boundary edge.
bool connected_complement(const Mesh& mesh, const RegionMask& mask);

// D plus every component of its complement that cannot reach the exterior.
// Idempotent and monotone; the result always has a connected complement.
RegionMask outer_shape(const Mesh& mesh, const RegionMask& mask);

struct AdmissibilityReport {
  bool admissible = false;
  bool compactly_contained = false;  // no triangle of C touches the boundary
  bool complement_connected = false;
  bool boundary_clear_of_m = false;  // no triangle of M touches the edge-boundary of C
  bool nonempty = false;
  std::vector<std::string> reasons;
};

// Discrete test of the admissible-inclusion criteria: C compactly
// contained, complement connected, and the edge-boundary of C away from M.
AdmissibilityReport admissible_test_inclusion(const Mesh& mesh,
                                              const RegionMask& C,
                                              const RegionMask& M);

// Extra regularity surrogate used by the extreme solvers: the mask has no
// pinch vertices (at every node the incident flagged triangles are
// edge-connected), and the same holds for the complement.
bool mask_edge_boundary_regular(const Mesh& mesh, const RegionMask& mask);

// --- mask/topology helpers shared by several modules ---

// Interior edges with exactly one side flagged, as (inside_tri, outside_tri).
std::vector<std::pair<int, int>> mask_edge_boundary(const Mesh& mesh,
                                                    const RegionMask& mask);

// Flags every triangle within graph distance k (shared-edge hops) of the
// seed set, including the seeds.
RegionMask dilate(const Mesh& mesh, const RegionMask& seed, int k);

// Connected components of the flagged set (edge adjacency); returns a
// per-triangle component id, -1 outside the mask, plus the component count.
std::pair<std::vector<int>, int> mask_components(const Mesh& mesh,
                                                 const RegionMask& mask);

// True if some flagged triangle owns a boundary edge listed in gamma.
bool mask_touches_gamma(const Mesh& mesh, const RegionMask& mask,
                        const GammaSpec& gamma);

}  // namespace monofem
