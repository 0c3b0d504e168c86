#pragma once

#include <random>
#include <vector>

#include "monofem/forward.hpp"
#include "monofem/mesh.hpp"

namespace monofem {

// Two-sided interior bounds for the Hermitian-part ND difference
// <f,(Lambda_1^R - Lambda_2^R) f>, evaluated on explicit solution pairs.
// All quantities are Hermitian forms and therefore real up to roundoff.
struct MonoBoundsReport {
  double lhs = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  // breakdown
  double lower_main = 0.0;   // int (A2^R - A1^R) |grad u2|^2-type term
  double lower_skew = 0.0;   // skew-square term (or lower cross term)
  double upper_main = 0.0;   // int A2^R (A1^R)^-1 (A2^R - A1^R) ...
  double upper_skew = 0.0;   // skew-square term (or upper cross term)
  double upper_mixed = 0.0;  // -2 [A2^R (A1^R)^-1 A2^I]^I term (general only)
  double cross_lower = 0.0;  // 2 Im int A1^I grad u1 . conj grad u2 (improved)
  double cross_upper = 0.0;  // 2 Im int A2^I grad u1 . conj grad u2 (improved)
  double mixed_identity_residual = 0.0;  // worst defect of the two identities
  double imag_residual = 0.0;
  double margin_lower = 0.0;  // lhs - lower
  double margin_upper = 0.0;  // upper - lhs
  bool ok = false;            // lower <= lhs <= upper within tolerance
};

// Bounds with the skew-square terms that stay nonzero even for A1 = A2.
MonoBoundsReport general_mono_bounds(const MatrixField& a1, const MatrixField& a2,
                                     const BoundaryCurrent& f, const Mesh& mesh,
                                     const GammaSpec& gamma,
                                     double rel_tol = 1e-9);

// Bounds with cross terms of u1 and u2 that vanish when A1 = A2 or the skew
// parts vanish; also verifies the two mixed-energy identities.
MonoBoundsReport improved_mono_bounds(const MatrixField& a1, const MatrixField& a2,
                                      const BoundaryCurrent& f, const Mesh& mesh,
                                      const GammaSpec& gamma,
                                      double rel_tol = 1e-9);

struct RemainderReport {
  double cross_term = 0.0;     // Im int A_j^I grad u1 . conj grad u2
  double im_u2_term = 0.0;     // Im int A_j^I grad u2 . conj grad u2 (== 0)
  int n_quad = 0;
  double taylor_rel_err = 0.0; // |u1 - u2 - int_0^1 w_t dt|_{H1} / |u1|_{H1}
  std::vector<double> t_nodes;
  std::vector<double> wt_norms;       // |grad w_t|_{L2(W)} at the nodes
  std::vector<double> wt_bound_slack; // bound - norm at each node
  bool wt_bounds_ok = false;
  double c1 = 0.0;             // discrete Dirichlet-trace operator norm
  double c2 = 0.0;             // discrete normal-trace operator norm
  double final_bound = 0.0;      // with the configured W
  double final_bound_full = 0.0; // with W = Omega (the rigorous closure)
  double slack = 0.0;            // final_bound_full / |cross_term|
  bool ok = false;
};

// Verifies the Taylor-remainder control of the cross term: reconstructs
// u1 - u2 from the derivative solutions w_t by Gauss-Legendre quadrature,
// checks the intermediate energy bound at each node, estimates the two
// trace constants discretely, and checks the final displayed bound. The set
// W is widened to contain supp(A1 - A2); the closure |cross| <= bound is
// asserted with W = Omega.
RemainderReport remainder_chain_check(const MatrixField& a1, const MatrixField& a2,
                                      int j, const BoundaryCurrent& f,
                                      const Mesh& mesh, const GammaSpec& gamma,
                                      int n_quad,
                                      std::optional<RegionMask> w_set = {});

enum class LoewnerCase { PositiveJump, NegativeJump };  // (i) and (ii)

struct LoewnerReport {
  bool hypothesis_ok = false;
  bool conclusion_ok = false;
  bool isotropic = false;
  bool sharper_ok = false;   // isotropic-only alpha/beta constant
  double alpha = 0.0, beta = 0.0;
  double worst_margin = 0.0;
};

// Element-wise check of the product bound: A2 - A1 >= cI on V implies
// A2 A1^-1 (A2 - A1) >= cI (case i), and A2 - A1 <= -cI implies
// <= -c (alpha/beta)^2 I (case ii, alpha/beta for isotropic input).
LoewnerReport loewner_product_check(const MatrixField& a1, const MatrixField& a2,
                                    const Mesh& mesh, const RegionMask& v_set,
                                    double c, LoewnerCase which);

// Random admissible field: per-element Hermitian-positive A^R with spectrum
// in [alpha, beta] plus a Hermitian skew factor with norm <= eta_max.
MatrixField random_admissible_field(const Mesh& mesh, std::mt19937_64& rng,
                                    double alpha, double beta, double eta_max,
                                    bool piecewise = true);

// Gauss-Legendre nodes/weights on (0,1) (Golub-Welsch).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n);

// sqrt(int_region |grad u|^2).
double h1_seminorm(const Mesh& mesh, const FieldSolution& u,
                   const RegionMask& region);

}  // namespace monofem
