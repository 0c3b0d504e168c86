#pragma once

#include <Eigen/Dense>

#include "monofem/coeff.hpp"
#include "monofem/forward.hpp"
#include "monofem/mesh.hpp"

namespace monofem {

// Mean-free current basis on the Gamma edges: psi_j = chi_j - (l_j/L)*1
// for j = 0..m-2, orthogonalized against constants through the boundary
// Gram matrix. All Loewner comparisons are generalized eigenvalue tests
// against `gram`.
struct NDBasis {
  std::vector<double> len;  // per Gamma edge
  double total_len = 0.0;
  Eigen::MatrixXd b;        // m x (m-1), chi coordinates of psi_j
  Eigen::MatrixXd gram;     // (m-1) x (m-1), SPD

  int dim() const { return static_cast<int>(b.cols()); }
  // Coordinates of a mean-free chi-vector in the psi basis (Gram projection).
  Eigen::VectorXcd to_psi(const Eigen::VectorXcd& chi) const;
  Eigen::VectorXcd to_chi(const Eigen::VectorXcd& psi) const;
};

NDBasis make_nd_basis(const Mesh& mesh, const GammaSpec& gamma);

// Matrix G of a boundary operator on the mean-free basis, paired as
// pair(f,g) = f^H G g. For a self-adjoint coefficient G is Hermitian; its
// Hermitian part has the quadratic form int A^R grad u . conj(grad u).
struct NDOperator {
  Eigen::MatrixXcd matrix;
  Eigen::MatrixXd gram;

  int dim() const { return static_cast<int>(matrix.rows()); }
  NDOperator operator+(const NDOperator& o) const;
  NDOperator operator-(const NDOperator& o) const;
  NDOperator scaled(double s) const;
  cplx pair(const Eigen::VectorXcd& f_psi, const Eigen::VectorXcd& g_psi) const;
};

// Hermitian and skew parts (L + L^H)/2 and (L - L^H)/(2i); both Hermitian.
std::pair<NDOperator, NDOperator> hermitian_split(const NDOperator& op);

// All generalized eigenvalues of (Hermitian(op), gram), ascending.
Eigen::VectorXd generalized_eigenvalues(const NDOperator& op);
// max |generalized eigenvalue|; the natural operator scale for tolerances.
double operator_scale(const NDOperator& op);
// Gram-weighted operator 2-norm ||L^-1 G L^-H||_2 with gram = L L^H.
double operator_norm(const NDOperator& op);

struct NDResult {
  NDOperator op;
  Eigen::MatrixXcd nodal;  // solutions for each psi basis current, per column
};

// Discrete local ND map of the factorized system: one solve per mean-free
// basis current, traces paired back through the boundary Gram structure.
NDResult compute_nd_with_solutions(const FactorizedSystem& system);
NDOperator compute_nd(const FactorizedSystem& system);

// --- kernel-backed assembly of interior quadratic-form operators ---

// Packed per-element constant gradients of a solution set over a fixed
// element list; feeds the accumulation kernels.
struct GradientTable {
  std::vector<int> elems;
  Eigen::MatrixXcd gx, gy;  // n_elems x n_solutions
  int n_elems() const { return static_cast<int>(elems.size()); }
  int n_solutions() const { return static_cast<int>(gx.cols()); }
};

GradientTable build_gradient_table(const Mesh& mesh,
                                   const Eigen::MatrixXcd& nodal,
                                   std::vector<int> elems);

// Element weights (Hermitian matrix times element area) in kernel layout.
struct WeightTable {
  Eigen::VectorXcd w00, w01, w10, w11;
};

WeightTable build_weight_table(const Mesh& mesh, const MatrixField& weight,
                               const std::vector<int>& elems);

// q(i,j) += sign * sum_{e in [lo,hi)} (W_e grad u_j) . conj(grad u_i) for
// the lower triangle i >= j; mirror_hermitian completes the matrix.
void accumulate_quadform(const GradientTable& grads, const WeightTable& weights,
                         int lo, int hi, double sign, Eigen::MatrixXcd& q);
void mirror_hermitian(Eigen::MatrixXcd& q);

// Same accumulation over elems[lo..hi), building the gradient tables in
// bounded chunks so large regions never hold the full table in memory.
void accumulate_region_quadform(const Mesh& mesh, const Eigen::MatrixXcd& nodal,
                                const MatrixField& weight,
                                const std::vector<int>& elems, int lo, int hi,
                                double sign, Eigen::MatrixXcd& q,
                                int chunk = 8192);

// Operator with sesquilinear form sign * int_region (W grad u_g).conj(grad u_f)
// over the solution set; W must be Hermitian element-wise.
NDOperator assemble_form_operator(const Mesh& mesh, const NDBasis& basis,
                                  const Eigen::MatrixXcd& nodal,
                                  const MatrixField& weight,
                                  const RegionMask& region, double sign);

// Frechet derivative of the ND map at the coefficient behind `nodal`, in
// direction H (Hermitian field): quadratic form -int H grad u . conj(grad u).
NDOperator frechet_derivative_operator(const Mesh& mesh, const NDBasis& basis,
                                       const Eigen::MatrixXcd& nodal,
                                       const MatrixField& h,
                                       const RegionMask& region);

// Per-element A^I (A^R)^-1 A^I (Hermitian, PSD).
MatrixField skew_square_weight(const MatrixField& a);
// supp(A^I) as an element mask.
RegionMask skew_support(const MatrixField& a, double tol = 1e-14);

// --- test operators ---

struct NonlinearTestOperators {
  NDOperator lambda_minus;  // Lambda(A_C^-)
  NDOperator lambda_plus;   // Lambda(A_C^+)
  NDOperator d_m_minus_c;   // derivative term on M\C from the A_C^+ solves
};

NonlinearTestOperators nonlinear_test_operators(const Mesh& mesh,
                                                const MatrixField& a0,
                                                const RegionMask& C,
                                                const CoefficientBounds& bounds,
                                                const GammaSpec& gamma);

// Shared solves with coefficient A0^R, reused across candidates.
struct LinearizedBase {
  NDBasis basis;
  NDOperator lambda0;       // Lambda(A0^R), Hermitian
  Eigen::MatrixXcd nodal;   // base solution set
};

LinearizedBase make_linearized_base(const Mesh& mesh, const MatrixField& a0,
                                    const GammaSpec& gamma);

struct LinearizedTestOperators {
  NDOperator d_plus;        // bracket (beta + eta^2/alpha) I - A0^R on C
  NDOperator d_minus;       // bracket A0^R - (beta^2/alpha) I on C
  NDOperator d_m_minus_c;   // skew-square bracket on M\C
};

LinearizedTestOperators linearized_test_operators(const LinearizedBase& base,
                                                  const Mesh& mesh,
                                                  const MatrixField& a0,
                                                  const RegionMask& C,
                                                  const CoefficientBounds& bounds);

struct ExtremeOperators {
  NDOperator insulating;  // Lambda_C^0
  NDOperator conducting;  // Lambda_0^C
};

ExtremeOperators extreme_operators(const Mesh& mesh, const MatrixField& a0,
                                   const RegionMask& C, const GammaSpec& gamma);

}  // namespace monofem
