#include "monofem/verify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <cmath>
#include <stdexcept>

#include "monofem/ndmap.hpp"

namespace monofem {

namespace {

Matrix2c skew_part(const Matrix2c& x) {
  return cplx(0, -0.5) * (x - x.adjoint());  // (X - X^H)/(2i)
}

double real_checked(cplx z, double scale, double* imag_residual) {
  if (imag_residual)
    *imag_residual = std::max(*imag_residual,
                              std::abs(z.imag()) / std::max(scale, 1e-300));
  return z.real();
}

}  // namespace

double h1_seminorm(const Mesh& mesh, const FieldSolution& u,
                   const RegionMask& region) {
  double s = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!region[t]) continue;
    s += mesh.tri_area[t] * u.gradient(mesh, t).squaredNorm();
  }
  return std::sqrt(s);
}

MonoBoundsReport general_mono_bounds(const MatrixField& a1, const MatrixField& a2,
                                     const BoundaryCurrent& f, const Mesh& mesh,
                                     const GammaSpec& gamma, double rel_tol) {
  FactorizedSystem s1 = assemble_and_factor(mesh, a1, gamma);
  FactorizedSystem s2 = assemble_and_factor(mesh, a2, gamma);
  FieldSolution u1 = s1.solve(f);
  FieldSolution u2 = s2.solve(f);

  MonoBoundsReport rep;
  cplx p1 = boundary_pairing(mesh, gamma, f, u1);
  cplx p2 = boundary_pairing(mesh, gamma, f, u2);
  rep.lhs = p1.real() - p2.real();

  std::vector<Matrix2c> low_main(mesh.n_triangles()), low_skew(mesh.n_triangles());
  std::vector<Matrix2c> up_main(mesh.n_triangles()), up_skew(mesh.n_triangles());
  std::vector<Matrix2c> up_mixed(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const Matrix2c& r1 = a1.self_adjoint(t);
    const Matrix2c& r2 = a2.self_adjoint(t);
    const Matrix2c& i1 = a1.skew(t);
    const Matrix2c& i2 = a2.skew(t);
    Matrix2c inv1 = r1.inverse();
    low_main[t] = r2 - r1;
    low_skew[t] = -(i1 * inv1 * i1);
    up_main[t] = r2 * inv1 * (r2 - r1);
    up_skew[t] = i2 * inv1 * i2;
    up_mixed[t] = -2.0 * skew_part(r2 * inv1 * i2);
  }
  RegionMask all = RegionMask::all(mesh);
  auto integ = [&](std::vector<Matrix2c>& w) {
    return energy_integral(mesh, u2, u2, MatrixField(std::move(w)), all);
  };
  double scale = std::abs(rep.lhs) + 1e-12;
  rep.lower_main = real_checked(integ(low_main), scale, &rep.imag_residual);
  rep.lower_skew = real_checked(integ(low_skew), scale, &rep.imag_residual);
  rep.upper_main = real_checked(integ(up_main), scale, &rep.imag_residual);
  rep.upper_skew = real_checked(integ(up_skew), scale, &rep.imag_residual);
  rep.upper_mixed = real_checked(integ(up_mixed), scale, &rep.imag_residual);
  rep.lower = rep.lower_main + rep.lower_skew;
  rep.upper = rep.upper_main + rep.upper_skew + rep.upper_mixed;
  rep.margin_lower = rep.lhs - rep.lower;
  rep.margin_upper = rep.upper - rep.lhs;

  // Anchor the tolerance to the solution energy so that vanishing bounds do
  // not demand impossible absolute precision.
  const double energy =
      energy_integral(mesh, u2, u2, a2.self_adjoint_field(), all).real();
  const double tol = rel_tol * std::max({std::abs(rep.lhs), std::abs(rep.lower),
                                         std::abs(rep.upper), std::abs(energy),
                                         1e-12});
  rep.ok = rep.margin_lower >= -tol && rep.margin_upper >= -tol;
  return rep;
}

MonoBoundsReport improved_mono_bounds(const MatrixField& a1, const MatrixField& a2,
                                      const BoundaryCurrent& f, const Mesh& mesh,
                                      const GammaSpec& gamma, double rel_tol) {
  FactorizedSystem s1 = assemble_and_factor(mesh, a1, gamma);
  FactorizedSystem s2 = assemble_and_factor(mesh, a2, gamma);
  FieldSolution u1 = s1.solve(f);
  FieldSolution u2 = s2.solve(f);

  MonoBoundsReport rep;
  cplx p1 = boundary_pairing(mesh, gamma, f, u1);
  cplx p2 = boundary_pairing(mesh, gamma, f, u2);
  rep.lhs = p1.real() - p2.real();

  std::vector<Matrix2c> low_main(mesh.n_triangles()), up_main(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const Matrix2c& r1 = a1.self_adjoint(t);
    const Matrix2c& r2 = a2.self_adjoint(t);
    low_main[t] = r2 - r1;
    up_main[t] = r2 * r1.inverse() * (r2 - r1);
  }
  RegionMask all = RegionMask::all(mesh);
  double scale = std::abs(rep.lhs) + 1e-12;
  rep.lower_main = real_checked(
      energy_integral(mesh, u2, u2, MatrixField(std::move(low_main)), all),
      scale, &rep.imag_residual);
  rep.upper_main = real_checked(
      energy_integral(mesh, u2, u2, MatrixField(std::move(up_main)), all),
      scale, &rep.imag_residual);
  rep.cross_lower =
      2.0 * energy_integral(mesh, u1, u2, a1.skew_field(), all).imag();
  rep.cross_upper =
      2.0 * energy_integral(mesh, u1, u2, a2.skew_field(), all).imag();
  rep.lower = rep.lower_main + rep.cross_lower;
  rep.upper = rep.upper_main + rep.cross_upper;
  rep.lower_skew = rep.cross_lower;
  rep.upper_skew = rep.cross_upper;
  rep.margin_lower = rep.lhs - rep.lower;
  rep.margin_upper = rep.upper - rep.lhs;

  // Mixed-energy identities behind the proof, exact for Galerkin pairs.
  cplx m1_lhs = energy_integral(mesh, u1, u2, a1.self_adjoint_field(), all);
  cplx e22 = energy_integral(mesh, u2, u2, a2.self_adjoint_field(), all);
  cplx c1 = energy_integral(mesh, u1, u2, a1.skew_field(), all);
  double id1 = std::abs(m1_lhs.real() - (e22.real() + c1.imag()));
  cplx m2_lhs = energy_integral(mesh, u1, u2, a2.self_adjoint_field(), all);
  cplx e11 = energy_integral(mesh, u1, u1, a1.self_adjoint_field(), all);
  cplx c2 = energy_integral(mesh, u1, u2, a2.skew_field(), all);
  double id2 = std::abs(m2_lhs.real() - (e11.real() - c2.imag()));
  double id_scale = std::max({std::abs(e22.real()), std::abs(e11.real()), 1e-12});
  rep.mixed_identity_residual = std::max(id1, id2) / id_scale;

  const double tol = rel_tol * std::max({std::abs(rep.lhs), std::abs(rep.lower),
                                         std::abs(rep.upper),
                                         std::abs(e22.real()), 1e-12});
  rep.ok = rep.margin_lower >= -tol && rep.margin_upper >= -tol &&
           rep.mixed_identity_residual <= 1e-9;
  return rep;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre01: n >= 1 required");
  // Golub-Welsch: eigenvalues of the Jacobi matrix on [-1,1].
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k - 1, k) = b;
    j(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<double> nodes(n), weights(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = 0.5 * (es.eigenvalues()[k] + 1.0);
    double v = es.eigenvectors()(0, k);
    weights[k] = v * v;  // sums to 1 on [0,1]
  }
  return {nodes, weights};
}

namespace {

// Boundary-node load vector of a Gamma current: l[n] = int_Gamma f phi_n ds.
Eigen::VectorXcd boundary_load(const Mesh& mesh, const GammaSpec& gamma,
                               const Eigen::VectorXcd& f_chi,
                               const std::vector<int>& bnode_index, int n_b) {
  Eigen::VectorXcd l = Eigen::VectorXcd::Zero(n_b);
  for (int i = 0; i < gamma.size(); ++i) {
    const auto& be = mesh.boundary_edges[gamma.edge_indices[i]];
    const double half = 0.5 * mesh.boundary_edge_len[gamma.edge_indices[i]];
    l[bnode_index[be[0]]] += half * f_chi[i];
    l[bnode_index[be[1]]] += half * f_chi[i];
  }
  return l;
}

struct TraceNorms {
  Eigen::MatrixXd s_half;   // Schur complement of the H1 inner product
  Eigen::MatrixXd s_energy; // Schur complement of the Dirichlet energy
  std::vector<int> bnode_index;  // node -> boundary slot (-1 interior)
  std::vector<int> bnodes;
  Eigen::VectorXd gamma_weights;  // int_Gamma phi_n ds per boundary slot
};

TraceNorms build_trace_norms(const Mesh& mesh, const GammaSpec& gamma) {
  TraceNorms tn;
  const int nn = mesh.n_nodes();
  tn.bnode_index.assign(nn, -1);
  for (int v = 0; v < nn; ++v)
    if (mesh.node_on_boundary[v]) {
      tn.bnode_index[v] = static_cast<int>(tn.bnodes.size());
      tn.bnodes.push_back(v);
    }
  const int n_b = static_cast<int>(tn.bnodes.size());
  const int n_i = nn - n_b;
  std::vector<int> inode_index(nn, -1);
  {
    int next = 0;
    for (int v = 0; v < nn; ++v)
      if (tn.bnode_index[v] < 0) inode_index[v] = next++;
  }

  // P1 stiffness (A = I) and mass matrices.
  std::vector<Eigen::Triplet<double>> kt, mt;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double area = mesh.tri_area[t];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double kij = area * mesh.tri_grad[t][i].dot(mesh.tri_grad[t][j]);
        double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
        kt.emplace_back(mesh.triangles[t][i], mesh.triangles[t][j], kij);
        mt.emplace_back(mesh.triangles[t][i], mesh.triangles[t][j], mij);
      }
    }
  }
  Eigen::SparseMatrix<double> k(nn, nn), m(nn, nn);
  k.setFromTriplets(kt.begin(), kt.end());
  m.setFromTriplets(mt.begin(), mt.end());

  auto schur = [&](const Eigen::SparseMatrix<double>& a) {
    Eigen::MatrixXd a_bb = Eigen::MatrixXd::Zero(n_b, n_b);
    Eigen::MatrixXd a_ib = Eigen::MatrixXd::Zero(n_i, n_b);
    std::vector<Eigen::Triplet<double>> iit;
    for (int col = 0; col < a.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
        int r = static_cast<int>(it.row()), c = col;
        bool rb = tn.bnode_index[r] >= 0, cb = tn.bnode_index[c] >= 0;
        if (rb && cb)
          a_bb(tn.bnode_index[r], tn.bnode_index[c]) += it.value();
        else if (!rb && cb)
          a_ib(inode_index[r], tn.bnode_index[c]) += it.value();
        else if (!rb && !cb)
          iit.emplace_back(inode_index[r], inode_index[c], it.value());
      }
    }
    if (n_i == 0) return a_bb;
    Eigen::SparseMatrix<double> a_ii(n_i, n_i);
    a_ii.setFromTriplets(iit.begin(), iit.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a_ii);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("trace norms: interior block factorization failed");
    Eigen::MatrixXd e = ldlt.solve(a_ib);
    return Eigen::MatrixXd(a_bb - a_ib.transpose() * e);
  };

  Eigen::SparseMatrix<double> h1 = k + m;
  tn.s_half = schur(h1);
  tn.s_energy = schur(k);

  tn.gamma_weights = Eigen::VectorXd::Zero(n_b);
  for (int e : gamma.edge_indices) {
    const auto& be = mesh.boundary_edges[e];
    const double half = 0.5 * mesh.boundary_edge_len[e];
    tn.gamma_weights[tn.bnode_index[be[0]]] += half;
    tn.gamma_weights[tn.bnode_index[be[1]]] += half;
  }
  return tn;
}

}  // namespace

RemainderReport remainder_chain_check(const MatrixField& a1, const MatrixField& a2,
                                      int j, const BoundaryCurrent& f,
                                      const Mesh& mesh, const GammaSpec& gamma,
                                      int n_quad, std::optional<RegionMask> w_set) {
  if (j != 1 && j != 2)
    throw std::invalid_argument("remainder_chain_check: j must be 1 or 2");
  if (n_quad < 2)
    throw std::invalid_argument("remainder_chain_check: n_quad >= 2 required");
  const MatrixField& aj = (j == 1) ? a1 : a2;

  FactorizedSystem s1 = assemble_and_factor(mesh, a1, gamma);
  FactorizedSystem s2 = assemble_and_factor(mesh, a2, gamma);
  FieldSolution u1 = s1.solve(f);
  FieldSolution u2 = s2.solve(f);

  RemainderReport rep;
  rep.n_quad = n_quad;
  RegionMask all = RegionMask::all(mesh);
  rep.cross_term = energy_integral(mesh, u1, u2, aj.skew_field(), all).imag();
  rep.im_u2_term = energy_integral(mesh, u2, u2, aj.skew_field(), all).imag();

  // Difference field and the W that contains its support.
  std::vector<Matrix2c> dv(mesh.n_triangles());
  RegionMask supp_diff = RegionMask::none(mesh);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    dv[t] = a2.value(t) - a1.value(t);
    supp_diff.flags[t] = dv[t].cwiseAbs().maxCoeff() > 1e-14;
  }
  MatrixField diff(std::move(dv));
  RegionMask w = w_set.value_or(dilate(mesh, supp_diff, 1));
  w = w | supp_diff;

  CoefficientBounds jb = joint_bounds(a1, a2, mesh);
  const double alpha = jb.alpha;

  auto [nodes, weights] = gauss_legendre01(n_quad);
  rep.t_nodes = nodes;
  Eigen::VectorXcd qsum = Eigen::VectorXcd::Zero(mesh.n_nodes());
  rep.wt_bounds_ok = true;
  const double norm_diff_w =
      w.empty() ? 0.0 : bounds_estimate(diff, mesh, w).h_norm;
  double wt_w_integral = 0.0;  // int_0^1 |grad w_t|_{L2(W)} dt (quadrature)
  for (int k = 0; k < n_quad; ++k) {
    const double t = nodes[k];
    std::vector<Matrix2c> atv(mesh.n_triangles());
    for (int e = 0; e < mesh.n_triangles(); ++e)
      atv[e] = a2.value(e) + t * (a1.value(e) - a2.value(e));
    MatrixField at(std::move(atv));
    FactorizedSystem st = assemble_and_factor(mesh, at, gamma);
    FieldSolution ut = st.solve(f);
    // load(v) = int (A2 - A1) grad u_t . grad v, assembled per element
    Eigen::VectorXcd load = Eigen::VectorXcd::Zero(mesh.n_nodes());
    for (int e = 0; e < mesh.n_triangles(); ++e) {
      if (!supp_diff[e]) continue;
      Eigen::Vector2cd dg = diff.value(e) * ut.gradient(mesh, e);
      for (int i = 0; i < 3; ++i)
        load[mesh.triangles[e][i]] +=
            mesh.tri_area[e] * (dg.x() * mesh.tri_grad[e][i].x() +
                                dg.y() * mesh.tri_grad[e][i].y());
    }
    FieldSolution wt = st.solve_load(load);
    qsum += weights[k] * wt.nodal;

    const double wt_norm_w = h1_seminorm(mesh, wt, w);
    const double ut_norm_w = h1_seminorm(mesh, ut, w);
    const double bound = norm_diff_w / alpha * ut_norm_w;
    rep.wt_norms.push_back(wt_norm_w);
    rep.wt_bound_slack.push_back(bound - wt_norm_w);
    if (wt_norm_w > bound * (1.0 + 1e-12) + 1e-14)
      rep.wt_bounds_ok = false;
    wt_w_integral += weights[k] * wt_norm_w;
  }

  FieldSolution taylor_err{u1.nodal - u2.nodal - qsum};
  rep.taylor_rel_err = h1_seminorm(mesh, taylor_err, all) /
                       std::max(h1_seminorm(mesh, u1, all), 1e-300);

  // Discrete trace constants.
  TraceNorms tn = build_trace_norms(mesh, gamma);
  const int n_b = static_cast<int>(tn.bnodes.size());

  // C1: sup |tr v|_{1/2,h} / |grad v|, over traces with the Gamma-mean gauge.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(tn.gamma_weights);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd z = q.rightCols(n_b - 1);
  {
    Eigen::MatrixXd num = z.transpose() * tn.s_half * z;
    Eigen::MatrixXd den = z.transpose() * tn.s_energy * z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(
        num, den, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    rep.c1 = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  // C2: sup |l_g|_{-1/2,h} / |A2 grad u_g| over the mean-free current space.
  {
    NDResult nd2 = compute_nd_with_solutions(s2);
    NDBasis basis = make_nd_basis(mesh, gamma);
    const int dim = basis.dim();
    Eigen::MatrixXcd loads(n_b, dim);
    for (int c = 0; c < dim; ++c)
      loads.col(c) = boundary_load(mesh, gamma, basis.b.col(c).cast<cplx>(),
                                   tn.bnode_index, n_b);
    Eigen::LLT<Eigen::MatrixXd> llt(tn.s_half);
    if (llt.info() != Eigen::Success)
      throw SolverError("remainder chain: trace norm not positive definite");
    Eigen::MatrixXcd x = llt.solve(loads.real()).cast<cplx>() +
                         cplx(0, 1) * llt.solve(loads.imag()).cast<cplx>();
    Eigen::MatrixXcd num = loads.adjoint() * x;
    // Flux-energy Gram: F(i,j) = int (A2 grad u_j) . conj(A2 grad u_i).
    Eigen::MatrixXcd fgram = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<FieldSolution> sols(dim);
    for (int c = 0; c < dim; ++c) sols[c].nodal = nd2.nodal.col(c);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const double area = mesh.tri_area[t];
      std::vector<Eigen::Vector2cd> ag(dim);
      for (int c = 0; c < dim; ++c)
        ag[c] = a2.value(t) * sols[c].gradient(mesh, t);
      for (int cj = 0; cj < dim; ++cj)
        for (int ci = cj; ci < dim; ++ci)
          fgram(ci, cj) += area * (ag[cj].x() * std::conj(ag[ci].x()) +
                                   ag[cj].y() * std::conj(ag[ci].y()));
    }
    mirror_hermitian(fgram);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        num, fgram, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    rep.c2 = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  auto final_bound_for = [&](const RegionMask& wset) {
    RegionMask m_supp = skew_support(aj);
    RegionMask wm = wset & m_supp;
    double norm_skew_wm = wm.empty() ? 0.0
                                     : bounds_estimate(aj, mesh, wm).bounds.eta;
    double norm_diff_w =
        wset.empty() ? 0.0 : bounds_estimate(diff, mesh, wset).h_norm;
    double norm_a2 = bounds_estimate(a2, mesh, all).h_norm;
    double u2_all = h1_seminorm(mesh, u2, all);
    double u2_wm = h1_seminorm(mesh, u2, wm);
    return rep.c1 * rep.c2 / (alpha * alpha) * norm_skew_wm * norm_diff_w *
           norm_a2 * u2_all * u2_wm;
  };
  rep.final_bound = final_bound_for(w);
  rep.final_bound_full = final_bound_for(all);
  rep.slack = rep.final_bound_full / std::max(std::abs(rep.cross_term), 1e-300);
  rep.ok = rep.wt_bounds_ok &&
           std::abs(rep.cross_term) <= rep.final_bound_full * (1.0 + 1e-9) + 1e-14 &&
           std::abs(rep.im_u2_term) <=
               1e-10 * std::max(1.0, std::abs(rep.cross_term));
  return rep;
}

LoewnerReport loewner_product_check(const MatrixField& a1, const MatrixField& a2,
                                    const Mesh& mesh, const RegionMask& v_set,
                                    double c, LoewnerCase which) {
  LoewnerReport rep;
  if (v_set.empty())
    throw std::invalid_argument("loewner_product_check: empty region");
  double alpha = std::numeric_limits<double>::infinity();
  double beta = 0.0;
  rep.isotropic = true;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!v_set[t]) continue;
    if (spectral_norm(a1.skew(t)) > 1e-12 || spectral_norm(a2.skew(t)) > 1e-12)
      throw std::invalid_argument("loewner_product_check: fields must be self-adjoint on V");
    alpha = std::min(alpha, hermitian_eig_bounds(a2.self_adjoint(t)).first);
    beta = std::max(beta, hermitian_eig_bounds(a1.self_adjoint(t)).second);
    auto iso = [](const Matrix2c& x) {
      return std::abs(x(0, 1)) < 1e-12 && std::abs(x(1, 0)) < 1e-12 &&
             std::abs(x(0, 0) - x(1, 1)) < 1e-12;
    };
    rep.isotropic = rep.isotropic && iso(a1.value(t)) && iso(a2.value(t));
  }
  rep.alpha = alpha;
  rep.beta = beta;

  rep.hypothesis_ok = true;
  rep.conclusion_ok = true;
  rep.sharper_ok = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double tol = 1e-10 * std::max({1.0, beta, c});
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!v_set[t]) continue;
    Matrix2c d = a2.self_adjoint(t) - a1.self_adjoint(t);
    Matrix2c prod = a2.self_adjoint(t) * a1.self_adjoint(t).inverse() * d;
    prod = 0.5 * (prod + prod.adjoint());
    auto [dlo, dhi] = hermitian_eig_bounds(d);
    auto [plo, phi] = hermitian_eig_bounds(prod);
    if (which == LoewnerCase::PositiveJump) {
      if (dlo < c - tol) rep.hypothesis_ok = false;
      double margin = plo - c;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < -tol) rep.conclusion_ok = false;
    } else {
      if (dhi > -c + tol) rep.hypothesis_ok = false;
      const double factor = (alpha / beta) * (alpha / beta);
      double margin = -c * factor - phi;
      rep.worst_margin = std::min(rep.worst_margin, margin);
      if (margin < -tol) rep.conclusion_ok = false;
      if (phi > -c * (alpha / beta) + tol) rep.sharper_ok = false;
    }
  }
  if (which == LoewnerCase::PositiveJump) rep.sharper_ok = rep.conclusion_ok;
  return rep;
}

MatrixField random_admissible_field(const Mesh& mesh, std::mt19937_64& rng,
                                    double alpha, double beta, double eta_max,
                                    bool piecewise) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&]() {
    // Random Hermitian-positive part via a random unitary conjugation.
    Matrix2c g;
    g << cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng)),
        cplx(gauss(rng), gauss(rng)), cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix2c> qr(g);
    Matrix2c qmat = qr.householderQ();
    Eigen::Vector2d ev(alpha + (beta - alpha) * uni(rng),
                       alpha + (beta - alpha) * uni(rng));
    Matrix2c ar = qmat * ev.cast<cplx>().asDiagonal() * qmat.adjoint();
    ar = 0.5 * (ar + ar.adjoint());
    Matrix2c ai;
    ai << cplx(gauss(rng), 0.0), cplx(gauss(rng), gauss(rng)), cplx(0, 0),
        cplx(gauss(rng), 0.0);
    ai(1, 0) = std::conj(ai(0, 1));
    double nrm = spectral_norm(ai);
    if (nrm > 0.0) ai *= (eta_max * uni(rng)) / nrm;
    return Matrix2c(ar + cplx(0, 1) * ai);
  };
  std::vector<Matrix2c> values(mesh.n_triangles());
  if (piecewise) {
    for (auto& v : values) v = draw();
  } else {
    Matrix2c v = draw();
    for (auto& x : values) x = v;
  }
  return MatrixField(std::move(values));
}

}  // namespace monofem
