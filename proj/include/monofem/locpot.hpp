#pragma once

#include <string>

#include "monofem/ndmap.hpp"

namespace monofem {

struct LocpotResult {
  BoundaryCurrent current;       // optimal f, unit L2(Gamma) norm
  double energy_in_b = 0.0;      // int_B |grad u_f|^2
  double energy_outside_u = 0.0; // int_{Omega\U} |grad u_f|^2
  double ratio = 0.0;            // energy_in_b / max(energy_outside_u, floor)
  double rayleigh = 0.0;         // maximized quotient incl. regularizer
  int iterations = 1;            // dense generalized eigensolve
  std::string ucp_condition = "assumed";
};

// Boundary current concentrating gradient energy in B while suppressing it
// outside U: maximizes E_B(f) / (E_{Omega\U}(f) + reg*||f||^2) over the
// mean-free currents, computed as the top generalized eigenvector of the
// two Hermitian boundary-space forms. Preconditions: B inside U, U
// edge-connected and reaching Gamma, A admissible, reg > 0. The unique
// continuation hypothesis behind the divergence statement is assumed; the
// flag records which sufficient condition the caller invokes.
LocpotResult localized_current(const Mesh& mesh, const MatrixField& a,
                               const GammaSpec& gamma, const RegionMask& u_set,
                               const RegionMask& b_set, double reg,
                               const std::string& ucp_condition = "d=2 real A^R");

// E_V(f) = int_V |grad u_f|^2 as a Hermitian form on the mean-free basis.
NDOperator gradient_energy_form(const Mesh& mesh, const NDBasis& basis,
                                const Eigen::MatrixXcd& nodal,
                                const RegionMask& region);

}  // namespace monofem
