#include "monofem/ndmap.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "monofem/kernels.hpp"

namespace monofem {

NDBasis make_nd_basis(const Mesh& mesh, const GammaSpec& gamma) {
  NDBasis basis;
  const int m = gamma.size();
  if (m < 2)
    throw std::invalid_argument("nd basis: Gamma must contain at least two edges");
  basis.len.resize(m);
  for (int i = 0; i < m; ++i)
    basis.len[i] = mesh.boundary_edge_len[gamma.edge_indices[i]];
  basis.total_len = 0.0;
  for (double l : basis.len) basis.total_len += l;

  basis.b = Eigen::MatrixXd::Zero(m, m - 1);
  for (int j = 0; j < m - 1; ++j) {
    for (int i = 0; i < m; ++i) basis.b(i, j) = -basis.len[j] / basis.total_len;
    basis.b(j, j) += 1.0;
  }
  Eigen::VectorXd lenv =
      Eigen::Map<const Eigen::VectorXd>(basis.len.data(), m);
  basis.gram = basis.b.transpose() * lenv.asDiagonal() * basis.b;
  return basis;
}

Eigen::VectorXcd NDBasis::to_psi(const Eigen::VectorXcd& chi) const {
  const int m = static_cast<int>(len.size());
  Eigen::VectorXcd weighted(m);
  for (int i = 0; i < m; ++i) weighted[i] = len[i] * chi[i];
  Eigen::VectorXcd rhs = b.transpose().cast<cplx>() * weighted;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  Eigen::VectorXcd out(dim());
  out.real() = ldlt.solve(rhs.real().eval());
  out.imag() = ldlt.solve(rhs.imag().eval());
  return out;
}

Eigen::VectorXcd NDBasis::to_chi(const Eigen::VectorXcd& psi) const {
  return b.cast<cplx>() * psi;
}

NDOperator NDOperator::operator+(const NDOperator& o) const {
  return {matrix + o.matrix, gram};
}

NDOperator NDOperator::operator-(const NDOperator& o) const {
  return {matrix - o.matrix, gram};
}

NDOperator NDOperator::scaled(double s) const { return {s * matrix, gram}; }

cplx NDOperator::pair(const Eigen::VectorXcd& f_psi,
                      const Eigen::VectorXcd& g_psi) const {
  return f_psi.dot(matrix * g_psi);  // Eigen's dot conjugates the first factor
}

std::pair<NDOperator, NDOperator> hermitian_split(const NDOperator& op) {
  Eigen::MatrixXcd adj = op.matrix.adjoint();
  NDOperator re{0.5 * (op.matrix + adj), op.gram};
  NDOperator im{cplx(0, -0.5) * (op.matrix - adj), op.gram};
  return {re, im};
}

Eigen::VectorXd generalized_eigenvalues(const NDOperator& op) {
  Eigen::MatrixXcd h = 0.5 * (op.matrix + op.matrix.adjoint());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      h, op.gram.cast<cplx>(), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw SolverError("generalized eigenvalue solve failed");
  return es.eigenvalues();
}

double operator_scale(const NDOperator& op) {
  Eigen::VectorXd ev = generalized_eigenvalues(op);
  return std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

double operator_norm(const NDOperator& op) {
  Eigen::LLT<Eigen::MatrixXd> llt(op.gram);
  if (llt.info() != Eigen::Success)
    throw SolverError("operator_norm: Gram not positive definite");
  Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXcd w = l.cast<cplx>().triangularView<Eigen::Lower>().solve(op.matrix);
  Eigen::MatrixXcd wt = l.cast<cplx>().triangularView<Eigen::Lower>().solve(w.adjoint());
  return wt.adjoint().jacobiSvd().singularValues()[0];
}

NDResult compute_nd_with_solutions(const FactorizedSystem& system) {
  const Mesh& mesh = system.mesh();
  const GammaSpec& gamma = system.gamma();
  NDBasis basis = make_nd_basis(mesh, gamma);
  const int m = gamma.size();

  NDResult res;
  res.nodal = system.solve_many(basis.b.cast<cplx>());
  Eigen::MatrixXcd traces(m, m - 1);  // int_e u_j ds per edge
  for (int j = 0; j < m - 1; ++j)
    traces.col(j) = system.trace_integrals(res.nodal.col(j));
  res.op.matrix = basis.b.transpose().cast<cplx>() * traces;
  res.op.gram = basis.gram;
  return res;
}

NDOperator compute_nd(const FactorizedSystem& system) {
  return compute_nd_with_solutions(system).op;
}

GradientTable build_gradient_table(const Mesh& mesh,
                                   const Eigen::MatrixXcd& nodal,
                                   std::vector<int> elems) {
  GradientTable table;
  table.elems = std::move(elems);
  const int ne = table.n_elems();
  const int ns = static_cast<int>(nodal.cols());
  table.gx.resize(ne, ns);
  table.gy.resize(ne, ns);
  for (int k = 0; k < ne; ++k) {
    const int t = table.elems[k];
    const auto& tri = mesh.triangles[t];
    const auto& grad = mesh.tri_grad[t];
    for (int j = 0; j < ns; ++j) {
      cplx gx = 0.0, gy = 0.0;
      for (int i = 0; i < 3; ++i) {
        const cplx u = nodal(tri[i], j);
        gx += u * grad[i].x();
        gy += u * grad[i].y();
      }
      table.gx(k, j) = gx;
      table.gy(k, j) = gy;
    }
  }
  return table;
}

WeightTable build_weight_table(const Mesh& mesh, const MatrixField& weight,
                               const std::vector<int>& elems) {
  WeightTable w;
  const int ne = static_cast<int>(elems.size());
  w.w00.resize(ne);
  w.w01.resize(ne);
  w.w10.resize(ne);
  w.w11.resize(ne);
  for (int k = 0; k < ne; ++k) {
    const int t = elems[k];
    const Matrix2c wa = mesh.tri_area[t] * weight.value(t);
    w.w00[k] = wa(0, 0);
    w.w01[k] = wa(0, 1);
    w.w10[k] = wa(1, 0);
    w.w11[k] = wa(1, 1);
  }
  return w;
}

void accumulate_quadform(const GradientTable& grads, const WeightTable& weights,
                         int lo, int hi, double sign, Eigen::MatrixXcd& q) {
  const int ns = grads.n_solutions();
  const int n = hi - lo;
  if (n <= 0) return;
  Eigen::VectorXcd hx(n), hy(n);
  for (int j = 0; j < ns; ++j) {
    kernels::apply_weight(n, weights.w00.data() + lo, weights.w01.data() + lo,
                          weights.w10.data() + lo, weights.w11.data() + lo,
                          grads.gx.col(j).data() + lo,
                          grads.gy.col(j).data() + lo, hx.data(), hy.data());
    for (int i = j; i < ns; ++i) {
      q(i, j) += sign * kernels::cdotc2(n, grads.gx.col(i).data() + lo,
                                        grads.gy.col(i).data() + lo, hx.data(),
                                        hy.data());
    }
  }
}

void mirror_hermitian(Eigen::MatrixXcd& q) {
  const int n = static_cast<int>(q.rows());
  for (int j = 0; j < n; ++j) {
    q(j, j) = cplx(q(j, j).real(), 0.0);
    for (int i = j + 1; i < n; ++i) q(j, i) = std::conj(q(i, j));
  }
}

void accumulate_region_quadform(const Mesh& mesh, const Eigen::MatrixXcd& nodal,
                                const MatrixField& weight,
                                const std::vector<int>& elems, int lo, int hi,
                                double sign, Eigen::MatrixXcd& q, int chunk) {
  for (int pos = lo; pos < hi; pos += chunk) {
    const int end = std::min(hi, pos + chunk);
    std::vector<int> slice(elems.begin() + pos, elems.begin() + end);
    GradientTable grads = build_gradient_table(mesh, nodal, std::move(slice));
    WeightTable weights = build_weight_table(mesh, weight, grads.elems);
    accumulate_quadform(grads, weights, 0, grads.n_elems(), sign, q);
  }
}

namespace {

void require_hermitian_weight(const MatrixField& weight, const RegionMask& region) {
  for (int t = 0; t < weight.size(); ++t) {
    if (!region[t]) continue;
    if (spectral_norm(weight.skew(t)) >
        1e-10 * std::max(1.0, spectral_norm(weight.value(t))))
      throw std::invalid_argument("form operator: weight must be Hermitian");
  }
}

}  // namespace

NDOperator assemble_form_operator(const Mesh& mesh, const NDBasis& basis,
                                  const Eigen::MatrixXcd& nodal,
                                  const MatrixField& weight,
                                  const RegionMask& region, double sign) {
  require_hermitian_weight(weight, region);
  std::vector<int> elems;
  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (region[t]) elems.push_back(t);
  NDOperator op;
  op.gram = basis.gram;
  op.matrix = Eigen::MatrixXcd::Zero(nodal.cols(), nodal.cols());
  if (!elems.empty()) {
    accumulate_region_quadform(mesh, nodal, weight, elems, 0,
                               static_cast<int>(elems.size()), sign, op.matrix);
    mirror_hermitian(op.matrix);
  }
  return op;
}

NDOperator frechet_derivative_operator(const Mesh& mesh, const NDBasis& basis,
                                       const Eigen::MatrixXcd& nodal,
                                       const MatrixField& h,
                                       const RegionMask& region) {
  return assemble_form_operator(mesh, basis, nodal, h, region, -1.0);
}

MatrixField skew_square_weight(const MatrixField& a) {
  std::vector<Matrix2c> w(a.size());
  for (int t = 0; t < a.size(); ++t) {
    const Matrix2c& ai = a.skew(t);
    w[t] = ai * a.self_adjoint(t).inverse() * ai;
  }
  return MatrixField(std::move(w));
}

RegionMask skew_support(const MatrixField& a, double tol) {
  RegionMask m;
  m.flags.resize(a.size());
  for (int t = 0; t < a.size(); ++t)
    m.flags[t] = spectral_norm(a.skew(t)) > tol;
  return m;
}

NonlinearTestOperators nonlinear_test_operators(const Mesh& mesh,
                                                const MatrixField& a0,
                                                const RegionMask& C,
                                                const CoefficientBounds& bounds,
                                                const GammaSpec& gamma) {
  if (C.size() != mesh.n_triangles())
    throw std::invalid_argument("nonlinear test operators: C is not a mask on this mesh");
  if (!bounds.valid())
    throw std::invalid_argument("nonlinear test operators: invalid bounds");
  NonlinearTestOperators ops;
  MatrixField a_minus = build_test_coeff(a0, C, bounds, TestSign::Minus);
  MatrixField a_plus = build_test_coeff(a0, C, bounds, TestSign::Plus);
  ops.lambda_minus = compute_nd(assemble_and_factor(mesh, a_minus, gamma));
  NDResult plus = compute_nd_with_solutions(assemble_and_factor(mesh, a_plus, gamma));
  ops.lambda_plus = plus.op;
  NDBasis basis = make_nd_basis(mesh, gamma);
  RegionMask m_minus_c = skew_support(a0) - C;
  ops.d_m_minus_c = assemble_form_operator(mesh, basis, plus.nodal,
                                           skew_square_weight(a0), m_minus_c,
                                           -1.0);
  return ops;
}

LinearizedBase make_linearized_base(const Mesh& mesh, const MatrixField& a0,
                                    const GammaSpec& gamma) {
  LinearizedBase base;
  base.basis = make_nd_basis(mesh, gamma);
  NDResult res = compute_nd_with_solutions(
      assemble_and_factor(mesh, a0.self_adjoint_field(), gamma));
  base.lambda0 = res.op;
  base.nodal = std::move(res.nodal);
  return base;
}

LinearizedTestOperators linearized_test_operators(const LinearizedBase& base,
                                                  const Mesh& mesh,
                                                  const MatrixField& a0,
                                                  const RegionMask& C,
                                                  const CoefficientBounds& bounds) {
  if (!bounds.valid())
    throw std::invalid_argument("linearized test operators: invalid bounds");
  const double plus_level = bounds.beta + bounds.eta * bounds.eta / bounds.alpha;
  const double minus_level = bounds.beta * bounds.beta / bounds.alpha;

  std::vector<Matrix2c> wplus(a0.size()), wminus(a0.size());
  for (int t = 0; t < a0.size(); ++t) {
    wplus[t] = plus_level * Matrix2c::Identity() - a0.self_adjoint(t);
    wminus[t] = a0.self_adjoint(t) - minus_level * Matrix2c::Identity();
  }
  LinearizedTestOperators ops;
  ops.d_plus = assemble_form_operator(mesh, base.basis, base.nodal,
                                      MatrixField(std::move(wplus)), C, -1.0);
  ops.d_minus = assemble_form_operator(mesh, base.basis, base.nodal,
                                       MatrixField(std::move(wminus)), C, -1.0);
  RegionMask m_minus_c = skew_support(a0) - C;
  ops.d_m_minus_c = assemble_form_operator(mesh, base.basis, base.nodal,
                                           skew_square_weight(a0), m_minus_c,
                                           -1.0);
  return ops;
}

ExtremeOperators extreme_operators(const Mesh& mesh, const MatrixField& a0,
                                   const RegionMask& C, const GammaSpec& gamma) {
  ExtremeOperators ops;
  ops.insulating =
      compute_nd(assemble_extreme(mesh, a0, C, ExtremeKind::Insulating, gamma));
  ops.conducting =
      compute_nd(assemble_extreme(mesh, a0, C, ExtremeKind::Conducting, gamma));
  return ops;
}

}  // namespace monofem
