#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "monofem/mesh.hpp"

namespace monofem {

using Matrix2c = Eigen::Matrix2cd;
using cplx = std::complex<double>;

// lambda_min / lambda_max of a Hermitian 2x2 matrix (closed form).
std::pair<double, double> hermitian_eig_bounds(const Matrix2c& h);
// Spectral norm of a general complex 2x2 matrix.
double spectral_norm(const Matrix2c& a);

// Piecewise-constant 2x2 complex matrix coefficient with cached
// self-adjoint part (A + A*)/2 and skew factor (A - A*)/(2i), both
// Hermitian per element. Immutable after construction.
class MatrixField {
 public:
  MatrixField() = default;
  explicit MatrixField(std::vector<Matrix2c> values);
  static MatrixField constant(const Mesh& mesh, const Matrix2c& value);
  static MatrixField identity(const Mesh& mesh, double scale = 1.0);

  int size() const { return static_cast<int>(a_.size()); }
  const Matrix2c& value(int t) const { return a_[t]; }
  const Matrix2c& self_adjoint(int t) const { return ar_[t]; }
  const Matrix2c& skew(int t) const { return ai_[t]; }

  MatrixField self_adjoint_field() const { return MatrixField(ar_); }
  MatrixField skew_field() const { return MatrixField(ai_); }
  bool is_self_adjoint(double tol = 1e-12) const;

  // Replaces values on masked elements.
  MatrixField with_value_on(const RegionMask& mask, const Matrix2c& value) const;
  MatrixField with_field_on(const RegionMask& mask, const MatrixField& other) const;

 private:
  std::vector<Matrix2c> a_, ar_, ai_;
};

// A = A^R + i A^I with both parts Hermitian.
std::pair<MatrixField, MatrixField> decompose(const MatrixField& a);

// True iff lambda_min(A^R) >= c_min on every element.
bool check_admissible_field(const MatrixField& a, double c_min);

struct CoefficientBounds {
  double alpha = 1.0;  // min over region of lambda_min(A^R)
  double beta = 1.0;   // max over region of lambda_max(A^R)
  double eta = 0.0;    // max over region of ||A^I||_2
  bool valid() const { return alpha > 0.0 && beta >= alpha && eta >= 0.0; }
};

struct BoundsReport {
  CoefficientBounds bounds;
  double h_norm = 0.0;       // sup over region of ||A(x)||_2
  double h_norm_skew = 0.0;  // sup over region of ||A^I(x)||_2 (== bounds.eta)
};

// Throws std::invalid_argument on an empty region.
BoundsReport bounds_estimate(const MatrixField& a, const Mesh& mesh,
                             const RegionMask& region);
// Joint bounds covering two fields on the full domain (Assumption-style).
CoefficientBounds joint_bounds(const MatrixField& a0, const MatrixField& ad,
                               const Mesh& mesh);

enum class TestSign { Minus, Plus };

// Self-adjoint test coefficient: alpha*I on C (minus) or
// (beta + eta^2/alpha)*I on C (plus); A0^R off C.
MatrixField build_test_coeff(const MatrixField& a0, const RegionMask& C,
                             const CoefficientBounds& bounds, TestSign sign);

// Truncated coefficient: A0 off C, (1/epsilon)*A_D^R on C.
MatrixField build_truncated_coeff(const MatrixField& a0, const MatrixField& ad_r,
                                  const RegionMask& C, double epsilon);

// Largest epsilon for which the truncation estimate applies:
// 1 / (1 + (eta/alpha)^2).
double truncation_epsilon_threshold(const CoefficientBounds& bounds);

struct PhantomPiece {
  MaskPredicate region;
  std::optional<RegionMask> mask;  // explicit mask wins over the predicate
  Matrix2c value;
};

struct PhantomSpec {
  Matrix2c background = Matrix2c::Identity();
  std::vector<PhantomPiece> pieces;
  std::optional<double> tau_plus;   // declared definiteness margins
  std::optional<double> tau_minus;
};

struct Phantom {
  MatrixField a0;       // background field
  MatrixField ad;       // perturbed field
  RegionMask d;         // supp(A_D - A0)
  RegionMask m;         // supp(A0^I)
  std::optional<double> tau_declared_plus;
  std::optional<double> tau_declared_minus;
};

// Throws std::invalid_argument when overlapping pieces disagree.
Phantom build_phantom(const PhantomSpec& spec, const Mesh& mesh);

struct AssumptionReport {
  CoefficientBounds bounds;
  bool case_a = false;         // A_D^R - A0^R >= tau+ I on the collar
  bool case_b = false;         // A_D^R - A0^R <= -tau- I on the collar
  double tau_plus_required = 0.0;   // (beta^2/alpha^3)*||A0^I||^2_{H(V)}
  double tau_minus_required = 0.0;  // (1/alpha)*||A_D^I||^2_{H(V)}
  double margin_a = 0.0;       // min over B of (lambda_min(jump) - tau+)
  double margin_b = 0.0;       // min over B of (-lambda_max(jump) - tau-)
  bool s_reaches_gamma = false;  // component of Omega\(D u M) along bdry D*
  bool s_covers_outer_boundary = false;
  std::string ucp = "assumed, not checked";
  bool definiteness_ok = false;
  std::vector<std::string> notes;
};

// Evaluates the reconstruction assumptions on a collar V around the outer
// shape boundary (elements of D* within graph-distance collar_k of the
// edge-boundary) and a ball B (defaults to V). Report-only; never throws.
AssumptionReport check_assumptions(const Phantom& phantom, const Mesh& mesh,
                                   const GammaSpec& gamma, int collar_k = 2,
                                   const std::optional<RegionMask>& ball = {});

}  // namespace monofem
