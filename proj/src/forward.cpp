#include "monofem/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace monofem {

namespace {

double gamma_length(const Mesh& mesh, const GammaSpec& gamma) {
  double s = 0.0;
  for (int e : gamma.edge_indices) s += mesh.boundary_edge_len[e];
  return s;
}

}  // namespace

double gamma_weighted_mean(const Mesh& mesh, const GammaSpec& gamma,
                           const Eigen::VectorXcd& values) {
  cplx s = 0.0;
  for (int i = 0; i < gamma.size(); ++i)
    s += mesh.boundary_edge_len[gamma.edge_indices[i]] * values[i];
  return std::abs(s) / gamma_length(mesh, gamma);
}

double current_l2_norm(const Mesh& mesh, const GammaSpec& gamma,
                       const BoundaryCurrent& f) {
  double s = 0.0;
  for (int i = 0; i < gamma.size(); ++i)
    s += mesh.boundary_edge_len[gamma.edge_indices[i]] * std::norm(f.values[i]);
  return std::sqrt(s);
}

bool is_mean_free(const Mesh& mesh, const GammaSpec& gamma,
                  const Eigen::VectorXcd& values, double rel_tol) {
  cplx s = 0.0;
  double scale = 0.0;
  for (int i = 0; i < gamma.size(); ++i) {
    double len = mesh.boundary_edge_len[gamma.edge_indices[i]];
    s += len * values[i];
    scale += len * std::abs(values[i]);
  }
  return std::abs(s) <= rel_tol * std::max(scale, 1e-300);
}

BoundaryCurrent project_mean_free(const Mesh& mesh, const GammaSpec& gamma,
                                  const Eigen::VectorXcd& raw) {
  cplx s = 0.0;
  for (int i = 0; i < gamma.size(); ++i)
    s += mesh.boundary_edge_len[gamma.edge_indices[i]] * raw[i];
  cplx mean = s / gamma_length(mesh, gamma);
  BoundaryCurrent f;
  f.values = raw.array() - mean;
  return f;
}

BoundaryCurrent fourier_current(const Mesh& mesh, const GammaSpec& gamma,
                                int n, bool sine, Eigen::Vector2d center) {
  Eigen::VectorXcd raw(gamma.size());
  for (int i = 0; i < gamma.size(); ++i) {
    const auto& be = mesh.boundary_edges[gamma.edge_indices[i]];
    Eigen::Vector2d mid = 0.5 * (mesh.nodes[be[0]] + mesh.nodes[be[1]]) - center;
    double th = std::atan2(mid.y(), mid.x());
    raw[i] = sine ? std::sin(n * th) : std::cos(n * th);
  }
  return project_mean_free(mesh, gamma, raw);
}

BoundaryCurrent random_current(const Mesh& mesh, const GammaSpec& gamma,
                               std::mt19937_64& rng, bool complex_valued) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXcd raw(gamma.size());
  for (int i = 0; i < gamma.size(); ++i) {
    double re = dist(rng);
    double im = complex_valued ? dist(rng) : 0.0;
    raw[i] = cplx(re, im);
  }
  return project_mean_free(mesh, gamma, raw);
}

Eigen::Vector2cd FieldSolution::gradient(const Mesh& mesh, int t) const {
  Eigen::Vector2cd g = Eigen::Vector2cd::Zero();
  for (int i = 0; i < 3; ++i)
    g += nodal[mesh.triangles[t][i]] * mesh.tri_grad[t][i].cast<cplx>();
  return g;
}

namespace {

struct DofMap {
  std::vector<int> dof_of_node;
  int n_dofs = 0;
  std::vector<bool> skip_element;
};

DofMap standard_dofs(const Mesh& mesh) {
  DofMap m;
  m.dof_of_node.resize(mesh.n_nodes());
  for (int v = 0; v < mesh.n_nodes(); ++v) m.dof_of_node[v] = v;
  m.n_dofs = mesh.n_nodes();
  m.skip_element.assign(mesh.n_triangles(), false);
  return m;
}

void check_extreme_region(const Mesh& mesh, const RegionMask& C) {
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!C[t]) continue;
    for (int v : mesh.triangles[t])
      if (mesh.node_on_boundary[v])
        throw std::invalid_argument("solve_extreme: C touches the boundary");
  }
  if (!mask_edge_boundary_regular(mesh, C))
    throw std::invalid_argument("solve_extreme: C has a pinch vertex");
}

DofMap insulating_dofs(const Mesh& mesh, const RegionMask& C) {
  check_extreme_region(mesh, C);
  RegionMask kept = C.complement();
  auto [comp, n_comp] = mask_components(mesh, kept);
  if (n_comp != 1)
    throw std::invalid_argument("solve_extreme: removing C disconnects the domain");
  DofMap m;
  m.dof_of_node.assign(mesh.n_nodes(), -1);
  m.skip_element.assign(mesh.n_triangles(), false);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (C[t]) {
      m.skip_element[t] = true;
      continue;
    }
    for (int v : mesh.triangles[t]) m.dof_of_node[v] = 0;
  }
  int next = 0;
  for (int v = 0; v < mesh.n_nodes(); ++v)
    if (m.dof_of_node[v] == 0) m.dof_of_node[v] = next++;
  m.n_dofs = next;
  return m;
}

DofMap conducting_dofs(const Mesh& mesh, const RegionMask& C) {
  check_extreme_region(mesh, C);
  auto [comp, n_comp] = mask_components(mesh, C);
  DofMap m;
  m.dof_of_node.assign(mesh.n_nodes(), -1);
  m.skip_element.assign(mesh.n_triangles(), false);
  // Nodes of C elements share the dof of their component.
  std::vector<int> node_comp(mesh.n_nodes(), -1);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!C[t]) continue;
    m.skip_element[t] = true;
    for (int v : mesh.triangles[t]) {
      if (node_comp[v] >= 0 && node_comp[v] != comp[t])
        throw std::invalid_argument("solve_extreme: C components share a node");
      node_comp[v] = comp[t];
    }
  }
  int next = 0;
  for (int v = 0; v < mesh.n_nodes(); ++v)
    if (node_comp[v] < 0) m.dof_of_node[v] = next++;
  std::vector<int> comp_dof(n_comp);
  for (int c = 0; c < n_comp; ++c) comp_dof[c] = next++;
  for (int v = 0; v < mesh.n_nodes(); ++v)
    if (node_comp[v] >= 0) m.dof_of_node[v] = comp_dof[node_comp[v]];
  m.n_dofs = next;
  return m;
}

}  // namespace

struct FactorizedSystem::Builder {
  static FactorizedSystem build(const Mesh& mesh, const MatrixField& a,
                                const GammaSpec& gamma, DofMap dofs);
};

FactorizedSystem FactorizedSystem::Builder::build(const Mesh& mesh,
                                                  const MatrixField& a,
                                                  const GammaSpec& gamma,
                                                  DofMap dofs) {
  FactorizedSystem sys;
  sys.mesh_ = &mesh;
  sys.gamma_ = gamma;
  sys.n_dofs_ = dofs.n_dofs;
  sys.dof_of_node_ = std::move(dofs.dof_of_node);
  const int n = sys.n_dofs_;

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<size_t>(mesh.n_triangles()) * 9 + 2 * gamma.size() * 2);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (dofs.skip_element[t]) continue;
    const double area = mesh.tri_area[t];
    const Matrix2c& at = a.value(t);
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector2cd agj = at * mesh.tri_grad[t][j].cast<cplx>();
      int cj = sys.dof_of_node_[mesh.triangles[t][j]];
      for (int i = 0; i < 3; ++i) {
        int ri = sys.dof_of_node_[mesh.triangles[t][i]];
        cplx kij = area * (agj.x() * mesh.tri_grad[t][i].x() +
                           agj.y() * mesh.tri_grad[t][i].y());
        trip.emplace_back(ri, cj, kij);
      }
    }
  }
  // Trace-mean gauge on Gamma as one Lagrange multiplier.
  for (int e : gamma.edge_indices) {
    const auto& be = mesh.boundary_edges[e];
    double half = 0.5 * mesh.boundary_edge_len[e];
    for (int v : {be[0], be[1]}) {
      int d = sys.dof_of_node_[v];
      if (d < 0) throw std::invalid_argument("assembly: Gamma node was removed");
      trip.emplace_back(d, n, cplx(half, 0.0));
      trip.emplace_back(n, d, cplx(half, 0.0));
    }
  }
  sys.k_.resize(n + 1, n + 1);
  sys.k_.setFromTriplets(trip.begin(), trip.end());
  sys.k_.makeCompressed();

  std::vector<Eigen::Triplet<double>> ttrip;
  for (int i = 0; i < gamma.size(); ++i) {
    const auto& be = mesh.boundary_edges[gamma.edge_indices[i]];
    double half = 0.5 * mesh.boundary_edge_len[gamma.edge_indices[i]];
    ttrip.emplace_back(i, sys.dof_of_node_[be[0]], half);
    ttrip.emplace_back(i, sys.dof_of_node_[be[1]], half);
  }
  sys.trace_map_.resize(gamma.size(), n + 1);
  sys.trace_map_.setFromTriplets(ttrip.begin(), ttrip.end());
  sys.trace_map_.makeCompressed();

  sys.lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<cplx>>>();
  sys.lu_->compute(sys.k_);
  if (sys.lu_->info() != Eigen::Success)
    throw SolverError("assembly: singular factorization (inadmissible coefficient or broken mesh)");
  return sys;
}

FactorizedSystem assemble_and_factor(const Mesh& mesh, const MatrixField& a,
                                     const GammaSpec& gamma) {
  if (a.size() != mesh.n_triangles())
    throw std::invalid_argument("assembly: coefficient size mismatch");
  if (!check_admissible_field(a, 1e-12))
    throw std::invalid_argument("assembly: coefficient is not admissible (A^R not positive definite)");
  return FactorizedSystem::Builder::build(mesh, a, gamma, standard_dofs(mesh));
}

FactorizedSystem assemble_extreme(const Mesh& mesh, const MatrixField& a0,
                                  const RegionMask& C, ExtremeKind kind,
                                  const GammaSpec& gamma) {
  if (!a0.is_self_adjoint(1e-12))
    throw std::invalid_argument("solve_extreme: background must be self-adjoint");
  if (!check_admissible_field(a0, 1e-12))
    throw std::invalid_argument("solve_extreme: background not admissible");
  if (C.empty()) return FactorizedSystem::Builder::build(mesh, a0, gamma, standard_dofs(mesh));
  DofMap dofs = kind == ExtremeKind::Insulating ? insulating_dofs(mesh, C)
                                                : conducting_dofs(mesh, C);
  return FactorizedSystem::Builder::build(mesh, a0, gamma, std::move(dofs));
}

Eigen::VectorXcd FactorizedSystem::solve_dofs(const Eigen::VectorXcd& rhs) const {
  const double rhs_norm = rhs.norm();
  Eigen::VectorXcd x = lu_->solve(rhs);
  if (rhs_norm == 0.0) return x;
  // One or two refinement passes keep the residual near machine precision
  // even for strongly contrasted coefficients.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXcd r = rhs - k_ * x;
    if (r.norm() <= 1e-13 * rhs_norm) break;
    x += lu_->solve(r).eval();
  }
  if ((rhs - k_ * x).norm() > 1e-10 * rhs_norm)
    throw SolverError("solve: residual above tolerance");
  return x;
}

FieldSolution FactorizedSystem::solve(const BoundaryCurrent& f) const {
  if (f.size() != gamma_.size())
    throw std::invalid_argument("solve: current size does not match Gamma");
  if (!is_mean_free(*mesh_, gamma_, f.values))
    throw std::invalid_argument("solve: current is not mean-free");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n_dofs_ + 1);
  for (int i = 0; i < trace_map_.outerSize(); ++i)
    for (Eigen::SparseMatrix<double>::InnerIterator it(trace_map_, i); it; ++it)
      rhs[it.col()] += it.value() * f.values[it.row()];
  Eigen::VectorXcd x = solve_dofs(rhs);
  FieldSolution u;
  u.nodal = Eigen::VectorXcd::Zero(mesh_->n_nodes());
  for (int v = 0; v < mesh_->n_nodes(); ++v)
    if (dof_of_node_[v] >= 0) u.nodal[v] = x[dof_of_node_[v]];
  return u;
}

FieldSolution FactorizedSystem::solve_load(const Eigen::VectorXcd& nodal_load) const {
  if (nodal_load.size() != mesh_->n_nodes())
    throw std::invalid_argument("solve_load: load size mismatch");
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n_dofs_ + 1);
  for (int v = 0; v < mesh_->n_nodes(); ++v)
    if (dof_of_node_[v] >= 0) rhs[dof_of_node_[v]] += nodal_load[v];
  Eigen::VectorXcd x = solve_dofs(rhs);
  FieldSolution u;
  u.current_chi = f.values;
  u.source = this;
  u.nodal = Eigen::VectorXcd::Zero(mesh_->n_nodes());
  for (int v = 0; v < mesh_->n_nodes(); ++v)
    if (dof_of_node_[v] >= 0) u.nodal[v] = x[dof_of_node_[v]];
  return u;
}

Eigen::MatrixXcd FactorizedSystem::solve_many(const Eigen::MatrixXcd& currents_chi) const {
  Eigen::MatrixXcd out(mesh_->n_nodes(), currents_chi.cols());
  BoundaryCurrent f;
  for (int c = 0; c < currents_chi.cols(); ++c) {
    f.values = currents_chi.col(c);
    out.col(c) = solve(f).nodal;
  }
  return out;
}

Eigen::VectorXcd FactorizedSystem::trace_integrals(const Eigen::VectorXcd& nodal) const {
  Eigen::VectorXcd t = Eigen::VectorXcd::Zero(gamma_.size());
  for (int i = 0; i < gamma_.size(); ++i) {
    const auto& be = mesh_->boundary_edges[gamma_.edge_indices[i]];
    t[i] = 0.5 * mesh_->boundary_edge_len[gamma_.edge_indices[i]] *
           (nodal[be[0]] + nodal[be[1]]);
  }
  return t;
}

FieldSolution solve_neumann(const FactorizedSystem& system,
                            const BoundaryCurrent& f) {
  return system.solve(f);
}

FieldSolution solve_extreme(const Mesh& mesh, const MatrixField& a0,
                            const RegionMask& C, ExtremeKind kind,
                            const BoundaryCurrent& f, const GammaSpec& gamma) {
  return assemble_extreme(mesh, a0, C, kind, gamma).solve(f);
}

cplx energy_integral(const Mesh& mesh, const FieldSolution& u,
                     const FieldSolution& v, const MatrixField& m,
                     const RegionMask& region) {
  if (u.nodal.size() != mesh.n_nodes() || v.nodal.size() != mesh.n_nodes())
    throw std::invalid_argument("energy_integral: mesh mismatch");
  cplx s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!region[t]) continue;
    Eigen::Vector2cd gu = u.gradient(mesh, t);
    Eigen::Vector2cd gv = v.gradient(mesh, t);
    Eigen::Vector2cd mg = m.value(t) * gu;
    s += mesh.tri_area[t] *
         (mg.x() * std::conj(gv.x()) + mg.y() * std::conj(gv.y()));
  }
  return s;
}

cplx boundary_pairing(const Mesh& mesh, const GammaSpec& gamma,
                      const BoundaryCurrent& f, const FieldSolution& u) {
  cplx s = 0.0;
  for (int i = 0; i < gamma.size(); ++i) {
    const auto& be = mesh.boundary_edges[gamma.edge_indices[i]];
    cplx edge_int = 0.5 * mesh.boundary_edge_len[gamma.edge_indices[i]] *
                    (u.nodal[be[0]] + u.nodal[be[1]]);
    s += f.values[i] * std::conj(edge_int);
  }
  return s;
}

cplx interface_flux(const Mesh& mesh, const MatrixField& a,
                    const FieldSolution& u, const RegionMask& C) {
  std::vector<bool> in_c(mesh.n_nodes(), false), out_c(mesh.n_nodes(), false);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int v : mesh.triangles[t]) (C[t] ? in_c : out_c)[v] = true;
  cplx s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (C[t]) continue;
    Eigen::Vector2cd gu = u.gradient(mesh, t);
    Eigen::Vector2cd gv = Eigen::Vector2cd::Zero();
    for (int i = 0; i < 3; ++i) {
      int v = mesh.triangles[t][i];
      if (in_c[v] && out_c[v]) gv += mesh.tri_grad[t][i].cast<cplx>();
    }
    Eigen::Vector2cd ag = a.value(t) * gu;
    s += mesh.tri_area[t] * (ag.x() * gv.x() + ag.y() * gv.y());
  }
  return s;
}

}  // namespace monofem
