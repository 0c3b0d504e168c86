#include "monofem/locpot.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

namespace monofem {

NDOperator gradient_energy_form(const Mesh& mesh, const NDBasis& basis,
                                const Eigen::MatrixXcd& nodal,
                                const RegionMask& region) {
  return assemble_form_operator(mesh, basis, nodal,
                                MatrixField::identity(mesh), region, 1.0);
}

LocpotResult localized_current(const Mesh& mesh, const MatrixField& a,
                               const GammaSpec& gamma, const RegionMask& u_set,
                               const RegionMask& b_set, double reg,
                               const std::string& ucp_condition) {
  if (!(reg > 0.0))
    throw std::invalid_argument("localized_current: reg must be positive");
  if (!b_set.is_subset_of(u_set))
    throw std::invalid_argument("localized_current: B must be contained in U");
  if (b_set.empty())
    throw std::invalid_argument("localized_current: B is empty");
  auto [comp, n_comp] = mask_components(mesh, u_set);
  if (n_comp != 1)
    throw std::invalid_argument("localized_current: U must be connected");
  if (!mask_touches_gamma(mesh, u_set, gamma))
    throw std::invalid_argument("localized_current: U does not reach Gamma");

  FactorizedSystem sys = assemble_and_factor(mesh, a, gamma);
  NDResult nd = compute_nd_with_solutions(sys);
  NDBasis basis = make_nd_basis(mesh, gamma);

  NDOperator e_b = gradient_energy_form(mesh, basis, nd.nodal, b_set);
  NDOperator e_out =
      gradient_energy_form(mesh, basis, nd.nodal, u_set.complement());

  Eigen::MatrixXcd denom =
      e_out.matrix + reg * basis.gram.cast<cplx>();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      e_b.matrix, denom, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw SolverError("localized_current: eigensolve failed");

  const int last = static_cast<int>(es.eigenvalues().size()) - 1;
  Eigen::VectorXcd f_psi = es.eigenvectors().col(last);

  LocpotResult res;
  res.rayleigh = es.eigenvalues()[last];
  res.ucp_condition = ucp_condition;

  Eigen::VectorXcd f_chi = basis.to_chi(f_psi);
  BoundaryCurrent f{f_chi};
  double nrm = current_l2_norm(mesh, gamma, f);
  f.values /= nrm;
  f_psi /= nrm;
  res.current = f;
  res.energy_in_b = std::real(f_psi.dot(e_b.matrix * f_psi));
  res.energy_outside_u = std::real(f_psi.dot(e_out.matrix * f_psi));
  res.ratio = res.energy_in_b / std::max(res.energy_outside_u, 1e-300);
  return res;
}

}  // namespace monofem
