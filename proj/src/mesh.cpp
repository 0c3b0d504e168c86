#include "monofem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <stdexcept>

namespace monofem {

namespace {

constexpr double kPi = std::numbers::pi;

double signed_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                   const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (b.y() - a.y()) * (c.x() - a.x()));
}

}  // namespace

double Mesh::total_area() const {
  double s = 0.0;
  for (double a : tri_area) s += a;
  return s;
}

double Mesh::boundary_length() const {
  double s = 0.0;
  for (double l : boundary_edge_len) s += l;
  return s;
}

Eigen::Vector2d Mesh::edge_outward_normal(int be) const {
  const auto& e = boundary_edges[be];
  Eigen::Vector2d d = nodes[e[1]] - nodes[e[0]];
  Eigen::Vector2d n(d.y(), -d.x());
  return n / n.norm();
}

void Mesh::finalize() {
  const int nn = n_nodes();
  const int nt = n_triangles();
  const int nb = n_boundary_edges();
  if (nn < 3 || nt < 1) throw std::runtime_error("mesh: too few nodes/triangles");
  if (region_label.empty()) region_label.assign(nt, 0);
  if (static_cast<int>(region_label.size()) != nt)
    throw std::runtime_error("mesh: region_label size mismatch");

  tri_area.resize(nt);
  tri_centroid.resize(nt);
  tri_grad.resize(nt);
  tri_neighbor.assign(nt, {-1, -1, -1});

  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      int v = triangles[t][i];
      if (v < 0 || v >= nn) throw std::runtime_error("mesh: node index out of range");
    }
    const Eigen::Vector2d& a = nodes[triangles[t][0]];
    const Eigen::Vector2d& b = nodes[triangles[t][1]];
    const Eigen::Vector2d& c = nodes[triangles[t][2]];
    double area = signed_area(a, b, c);
    if (!(area > 0.0)) throw std::runtime_error("mesh: non-positive triangle area");
    tri_area[t] = area;
    tri_centroid[t] = (a + b + c) / 3.0;
    // grad of basis i: rotate the opposite edge by 90 degrees / (2 area)
    const Eigen::Vector2d p[3] = {a, b, c};
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d& pj = p[(i + 1) % 3];
      const Eigen::Vector2d& pk = p[(i + 2) % 3];
      tri_grad[t][i] =
          Eigen::Vector2d(pj.y() - pk.y(), pk.x() - pj.x()) / (2.0 * area);
    }
  }

  // Edge-to-triangle incidence.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_map;
  for (int t = 0; t < nt; ++t) {
    for (int i = 0; i < 3; ++i) {
      int a = triangles[t][i], b = triangles[t][(i + 1) % 3];
      edge_map[{std::min(a, b), std::max(a, b)}].push_back({t, i});
    }
  }
  for (const auto& [key, tris] : edge_map) {
    if (tris.size() > 2)
      throw std::runtime_error("mesh: edge shared by more than two triangles");
    if (tris.size() == 2) {
      tri_neighbor[tris[0].first][tris[0].second] = tris[1].first;
      tri_neighbor[tris[1].first][tris[1].second] = tris[0].first;
    }
  }

  boundary_edge_tri.assign(nb, -1);
  boundary_edge_len.assign(nb, 0.0);
  node_on_boundary.assign(nn, false);
  std::vector<int> out_deg(nn, 0), in_deg(nn, 0);
  for (int e = 0; e < nb; ++e) {
    int a = boundary_edges[e][0], b = boundary_edges[e][1];
    if (a < 0 || a >= nn || b < 0 || b >= nn)
      throw std::runtime_error("mesh: boundary edge index out of range");
    auto it = edge_map.find({std::min(a, b), std::max(a, b)});
    if (it == edge_map.end() || it->second.size() != 1)
      throw std::runtime_error("mesh: boundary edge not on exactly one triangle");
    boundary_edge_tri[e] = it->second[0].first;
    boundary_edge_len[e] = (nodes[b] - nodes[a]).norm();
    node_on_boundary[a] = node_on_boundary[b] = true;
    out_deg[a]++;
    in_deg[b]++;
  }
  // Closed loops: every boundary node has one incoming and one outgoing edge,
  // and every once-shared mesh edge is listed.
  for (int v = 0; v < nn; ++v) {
    if (node_on_boundary[v] && (out_deg[v] != 1 || in_deg[v] != 1))
      throw std::runtime_error("mesh: boundary loops not closed");
  }
  int once_shared = 0;
  for (const auto& [key, tris] : edge_map)
    if (tris.size() == 1) ++once_shared;
  if (once_shared != nb)
    throw std::runtime_error("mesh: boundary edge list incomplete");
}

int RegionMask::count() const {
  return static_cast<int>(std::count(flags.begin(), flags.end(), true));
}

RegionMask RegionMask::none(const Mesh& mesh) {
  return {std::vector<bool>(mesh.n_triangles(), false)};
}

RegionMask RegionMask::all(const Mesh& mesh) {
  return {std::vector<bool>(mesh.n_triangles(), true)};
}

RegionMask RegionMask::operator&(const RegionMask& o) const {
  RegionMask r = *this;
  for (size_t i = 0; i < flags.size(); ++i) r.flags[i] = flags[i] && o.flags[i];
  return r;
}

RegionMask RegionMask::operator|(const RegionMask& o) const {
  RegionMask r = *this;
  for (size_t i = 0; i < flags.size(); ++i) r.flags[i] = flags[i] || o.flags[i];
  return r;
}

RegionMask RegionMask::operator-(const RegionMask& o) const {
  RegionMask r = *this;
  for (size_t i = 0; i < flags.size(); ++i) r.flags[i] = flags[i] && !o.flags[i];
  return r;
}

RegionMask RegionMask::complement() const {
  RegionMask r = *this;
  for (size_t i = 0; i < flags.size(); ++i) r.flags[i] = !flags[i];
  return r;
}

bool RegionMask::is_subset_of(const RegionMask& o) const {
  for (size_t i = 0; i < flags.size(); ++i)
    if (flags[i] && !o.flags[i]) return false;
  return true;
}

DomainSpec DomainSpec::disk(double radius, Eigen::Vector2d center) {
  DomainSpec s;
  s.kind = Kind::Disk;
  s.radius = radius;
  s.center = center;
  return s;
}

DomainSpec DomainSpec::rectangle(double x0, double x1, double y0, double y1) {
  DomainSpec s;
  s.kind = Kind::Rectangle;
  s.x0 = x0;
  s.x1 = x1;
  s.y0 = y0;
  s.y1 = y1;
  return s;
}

namespace {

Mesh build_disk(double radius, Eigen::Vector2d center, double h) {
  if (!(radius > 0.0)) throw std::invalid_argument("build_mesh: radius must be positive");
  const int K = std::max(2, static_cast<int>(std::ceil(radius / h)));
  const double dr = radius / K;

  Mesh mesh;
  auto ring_start = [](int k) { return 1 + 3 * k * (k - 1); };
  mesh.nodes.push_back(center);
  for (int k = 1; k <= K; ++k) {
    const int nk = 6 * k;
    for (int j = 0; j < nk; ++j) {
      double th = 2.0 * kPi * j / nk;
      mesh.nodes.push_back(center + k * dr * Eigen::Vector2d(std::cos(th), std::sin(th)));
    }
  }
  // Innermost fan.
  for (int j = 0; j < 6; ++j)
    mesh.triangles.push_back({0, 1 + j, 1 + (j + 1) % 6});
  // Strips between consecutive rings, woven sector by sector.
  for (int k = 2; k <= K; ++k) {
    const int si = ring_start(k - 1), ni = 6 * (k - 1);
    const int so = ring_start(k), no = 6 * k;
    for (int s = 0; s < 6; ++s) {
      auto inner = [&](int t) { return si + (s * (k - 1) + t) % ni; };
      auto outer = [&](int t) { return so + (s * k + t) % no; };
      for (int t = 0; t < k; ++t)
        mesh.triangles.push_back({outer(t), outer(t + 1), inner(std::min(t, k - 1))});
      for (int t = 0; t + 1 < k; ++t)
        mesh.triangles.push_back({inner(t), outer(t + 1), inner(t + 1)});
    }
  }
  const int so = ring_start(K), no = 6 * K;
  for (int j = 0; j < no; ++j)
    mesh.boundary_edges.push_back({so + j, so + (j + 1) % no});
  mesh.finalize();
  return mesh;
}

Mesh build_rect(double x0, double x1, double y0, double y1, double h) {
  if (!(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("build_mesh: degenerate rectangle extents");
  const int nx = std::max(1, static_cast<int>(std::ceil((x1 - x0) / h)));
  const int ny = std::max(1, static_cast<int>(std::ceil((y1 - y0) / h)));
  const double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny;

  Mesh mesh;
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.push_back({x0 + i * dx, y0 + j * dy});
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        mesh.triangles.push_back({a, b, c});
        mesh.triangles.push_back({a, c, d});
      } else {
        mesh.triangles.push_back({a, b, d});
        mesh.triangles.push_back({b, c, d});
      }
    }
  }
  for (int i = 0; i < nx; ++i) mesh.boundary_edges.push_back({id(i, 0), id(i + 1, 0)});
  for (int j = 0; j < ny; ++j) mesh.boundary_edges.push_back({id(nx, j), id(nx, j + 1)});
  for (int i = nx; i > 0; --i) mesh.boundary_edges.push_back({id(i, ny), id(i - 1, ny)});
  for (int j = ny; j > 0; --j) mesh.boundary_edges.push_back({id(0, j), id(0, j - 1)});
  mesh.finalize();
  return mesh;
}

}  // namespace

Mesh build_mesh(const DomainSpec& spec, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("build_mesh: h must be positive");
  switch (spec.kind) {
    case DomainSpec::Kind::Disk:
      return build_disk(spec.radius, spec.center, h);
    case DomainSpec::Kind::Rectangle:
      return build_rect(spec.x0, spec.x1, spec.y0, spec.y1, h);
  }
  throw std::invalid_argument("build_mesh: unknown domain kind");
}

GammaPredicate GammaPredicate::full() { return {}; }

GammaPredicate GammaPredicate::angle_interval(double from, double to,
                                              Eigen::Vector2d center) {
  GammaPredicate p;
  p.kind = Kind::AngleInterval;
  p.from = from;
  p.to = to;
  p.center = center;
  return p;
}

GammaPredicate GammaPredicate::box(double xmin, double xmax, double ymin,
                                   double ymax) {
  GammaPredicate p;
  p.kind = Kind::Box;
  p.xmin = xmin;
  p.xmax = xmax;
  p.ymin = ymin;
  p.ymax = ymax;
  return p;
}

GammaSpec select_gamma(const Mesh& mesh, const GammaPredicate& pred) {
  GammaSpec g;
  for (int e = 0; e < mesh.n_boundary_edges(); ++e) {
    const auto& be = mesh.boundary_edges[e];
    Eigen::Vector2d mid = 0.5 * (mesh.nodes[be[0]] + mesh.nodes[be[1]]);
    bool take = false;
    switch (pred.kind) {
      case GammaPredicate::Kind::Full:
        take = true;
        break;
      case GammaPredicate::Kind::AngleInterval: {
        Eigen::Vector2d d = mid - pred.center;
        double th = std::atan2(d.y(), d.x());
        auto wrap = [](double x) {
          double w = std::fmod(x, 2.0 * kPi);
          return w < 0.0 ? w + 2.0 * kPi : w;
        };
        double a = wrap(pred.from), b = wrap(pred.to), t = wrap(th);
        if (pred.to - pred.from >= 2.0 * kPi) {
          take = true;
        } else if (a <= b) {
          take = (t > a && t < b);
        } else {
          take = (t > a || t < b);
        }
        break;
      }
      case GammaPredicate::Kind::Box:
        take = mid.x() >= pred.xmin && mid.x() <= pred.xmax &&
               mid.y() >= pred.ymin && mid.y() <= pred.ymax;
        break;
    }
    if (take) {
      g.edge_indices.push_back(e);
      g.arc_length += mesh.boundary_edge_len[e];
    }
  }
  if (g.edge_indices.empty())
    throw std::invalid_argument("select_gamma: empty Gamma");
  return g;
}

MaskPredicate MaskPredicate::ball(Eigen::Vector2d center, double radius) {
  MaskPredicate p;
  p.kind = Kind::Ball;
  p.center = center;
  p.radius = radius;
  return p;
}

MaskPredicate MaskPredicate::halfplane(Eigen::Vector2d direction, double offset) {
  MaskPredicate p;
  p.kind = Kind::Halfplane;
  p.direction = direction;
  p.offset = offset;
  return p;
}

MaskPredicate MaskPredicate::box(double xmin, double xmax, double ymin, double ymax) {
  MaskPredicate p;
  p.kind = Kind::Box;
  p.xmin = xmin;
  p.xmax = xmax;
  p.ymin = ymin;
  p.ymax = ymax;
  return p;
}

MaskPredicate MaskPredicate::annulus(Eigen::Vector2d center, double inner_radius,
                                     double outer_radius) {
  MaskPredicate p;
  p.kind = Kind::Annulus;
  p.center = center;
  p.inner_radius = inner_radius;
  p.radius = outer_radius;
  return p;
}

MaskPredicate MaskPredicate::never() { return {}; }

MaskPredicate MaskPredicate::always() {
  MaskPredicate p;
  p.kind = Kind::Always;
  return p;
}

bool MaskPredicate::contains(const Eigen::Vector2d& p) const {
  switch (kind) {
    case Kind::Ball:
      return (p - center).norm() <= radius;
    case Kind::Halfplane:
      return direction.dot(p) <= offset;
    case Kind::Box:
      return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
    case Kind::Annulus: {
      double r = (p - center).norm();
      return r >= inner_radius && r <= radius;
    }
    case Kind::Never:
      return false;
    case Kind::Always:
      return true;
  }
  return false;
}

RegionMask mask_from_predicate(const Mesh& mesh, const MaskPredicate& pred) {
  RegionMask m = RegionMask::none(mesh);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    m.flags[t] = pred.contains(mesh.tri_centroid[t]);
  return m;
}

RegionMask mask_fully_inside(const Mesh& mesh, const MaskPredicate& pred) {
  RegionMask m = RegionMask::none(mesh);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    bool in = pred.contains(mesh.tri_centroid[t]);
    for (int v : mesh.triangles[t]) in = in && pred.contains(mesh.nodes[v]);
    m.flags[t] = in;
  }
  return m;
}

double mask_area(const Mesh& mesh, const RegionMask& mask) {
  double s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (mask[t]) s += mesh.tri_area[t];
  return s;
}

namespace {

// BFS over the unflagged triangles, seeded from the exterior (all unflagged
// triangles owning a boundary edge). Returns the visited set.
std::vector<bool> reach_from_exterior(const Mesh& mesh, const RegionMask& mask) {
  std::vector<bool> visited(mesh.n_triangles(), false);
  std::deque<int> queue;
  for (int e = 0; e < mesh.n_boundary_edges(); ++e) {
    int t = mesh.boundary_edge_tri[e];
    if (!mask[t] && !visited[t]) {
      visited[t] = true;
      queue.push_back(t);
    }
  }
  while (!queue.empty()) {
    int t = queue.front();
    queue.pop_front();
    for (int n : mesh.tri_neighbor[t]) {
      if (n >= 0 && !mask[n] && !visited[n]) {
        visited[n] = true;
        queue.push_back(n);
      }
    }
  }
  return visited;
}

}  // namespace

bool connected_complement(const Mesh& mesh, const RegionMask& mask) {
  auto visited = reach_from_exterior(mesh, mask);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (!mask[t] && !visited[t]) return false;
  return true;
}

RegionMask outer_shape(const Mesh& mesh, const RegionMask& mask) {
  auto visited = reach_from_exterior(mesh, mask);
  RegionMask out = RegionMask::none(mesh);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    out.flags[t] = mask[t] || !visited[t];
  return out;
}

std::vector<std::pair<int, int>> mask_edge_boundary(const Mesh& mesh,
                                                    const RegionMask& mask) {
  std::vector<std::pair<int, int>> edges;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!mask[t]) continue;
    for (int n : mesh.tri_neighbor[t])
      if (n >= 0 && !mask[n]) edges.push_back({t, n});
  }
  return edges;
}

AdmissibilityReport admissible_test_inclusion(const Mesh& mesh,
                                              const RegionMask& C,
                                              const RegionMask& M) {
  AdmissibilityReport rep;
  rep.nonempty = !C.empty();
  if (!rep.nonempty) rep.reasons.push_back("empty test inclusion");

  rep.compactly_contained = true;
  for (int t = 0; t < mesh.n_triangles() && rep.compactly_contained; ++t) {
    if (!C[t]) continue;
    for (int v : mesh.triangles[t])
      if (mesh.node_on_boundary[v]) {
        rep.compactly_contained = false;
        break;
      }
  }
  if (!rep.compactly_contained) rep.reasons.push_back("not compactly contained");

  rep.complement_connected = connected_complement(mesh, C);
  if (!rep.complement_connected) rep.reasons.push_back("complement not connected");

  rep.boundary_clear_of_m = true;
  for (const auto& [tin, tout] : mask_edge_boundary(mesh, C)) {
    if (M[tin] || M[tout]) {
      rep.boundary_clear_of_m = false;
      break;
    }
  }
  if (!rep.boundary_clear_of_m)
    rep.reasons.push_back("boundary of C intersects M");

  rep.admissible = rep.nonempty && rep.compactly_contained &&
                   rep.complement_connected && rep.boundary_clear_of_m;
  return rep;
}

namespace {

// At every node, the incident triangles with the given flag value must be
// edge-connected within the one-ring; otherwise the node pinches the set.
bool no_pinch(const Mesh& mesh, const RegionMask& mask, bool value) {
  std::vector<std::vector<int>> star(mesh.n_nodes());
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int v : mesh.triangles[t]) star[v].push_back(t);
  for (int v = 0; v < mesh.n_nodes(); ++v) {
    std::vector<int> local;
    for (int t : star[v])
      if (mask[t] == value) local.push_back(t);
    if (local.size() <= 1) continue;
    // BFS inside the star set.
    std::vector<bool> seen(local.size(), false);
    std::deque<int> queue{0};
    seen[0] = true;
    int reached = 1;
    while (!queue.empty()) {
      int li = queue.front();
      queue.pop_front();
      for (size_t lj = 0; lj < local.size(); ++lj) {
        if (seen[lj]) continue;
        for (int n : mesh.tri_neighbor[local[li]]) {
          if (n == local[lj]) {
            seen[lj] = true;
            queue.push_back(static_cast<int>(lj));
            ++reached;
            break;
          }
        }
      }
    }
    if (reached != static_cast<int>(local.size())) return false;
  }
  return true;
}

}  // namespace

bool mask_edge_boundary_regular(const Mesh& mesh, const RegionMask& mask) {
  return no_pinch(mesh, mask, true) && no_pinch(mesh, mask, false);
}

RegionMask dilate(const Mesh& mesh, const RegionMask& seed, int k) {
  RegionMask cur = seed;
  for (int step = 0; step < k; ++step) {
    RegionMask next = cur;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      if (!cur[t]) continue;
      for (int n : mesh.tri_neighbor[t])
        if (n >= 0) next.flags[n] = true;
    }
    cur = next;
  }
  return cur;
}

std::pair<std::vector<int>, int> mask_components(const Mesh& mesh,
                                                 const RegionMask& mask) {
  std::vector<int> comp(mesh.n_triangles(), -1);
  int n_comp = 0;
  for (int t0 = 0; t0 < mesh.n_triangles(); ++t0) {
    if (!mask[t0] || comp[t0] >= 0) continue;
    std::deque<int> queue{t0};
    comp[t0] = n_comp;
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      for (int n : mesh.tri_neighbor[t]) {
        if (n >= 0 && mask[n] && comp[n] < 0) {
          comp[n] = n_comp;
          queue.push_back(n);
        }
      }
    }
    ++n_comp;
  }
  return {comp, n_comp};
}

bool mask_touches_gamma(const Mesh& mesh, const RegionMask& mask,
                        const GammaSpec& gamma) {
  for (int e : gamma.edge_indices)
    if (mask[mesh.boundary_edge_tri[e]]) return true;
  return false;
}

}  // namespace monofem
