#include "monofem/coeff.hpp"

#include <cmath>
#include <stdexcept>

namespace monofem {

std::pair<double, double> hermitian_eig_bounds(const Matrix2c& h) {
  const double a = h(0, 0).real();
  const double d = h(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h(0, 1)));
  return {mean - rad, mean + rad};
}

double spectral_norm(const Matrix2c& a) {
  Matrix2c h = a.adjoint() * a;
  return std::sqrt(std::max(0.0, hermitian_eig_bounds(h).second));
}

MatrixField::MatrixField(std::vector<Matrix2c> values) : a_(std::move(values)) {
  ar_.resize(a_.size());
  ai_.resize(a_.size());
  const cplx half_i(0.0, 0.5);
  for (size_t t = 0; t < a_.size(); ++t) {
    Matrix2c adj = a_[t].adjoint();
    ar_[t] = 0.5 * (a_[t] + adj);
    ai_[t] = -half_i * (a_[t] - adj);  // (A - A*)/(2i)
  }
}

MatrixField MatrixField::constant(const Mesh& mesh, const Matrix2c& value) {
  return MatrixField(std::vector<Matrix2c>(mesh.n_triangles(), value));
}

MatrixField MatrixField::identity(const Mesh& mesh, double scale) {
  return constant(mesh, scale * Matrix2c::Identity());
}

bool MatrixField::is_self_adjoint(double tol) const {
  for (const auto& s : ai_)
    if (spectral_norm(s) > tol) return false;
  return true;
}

MatrixField MatrixField::with_value_on(const RegionMask& mask,
                                       const Matrix2c& value) const {
  std::vector<Matrix2c> v = a_;
  for (size_t t = 0; t < v.size(); ++t)
    if (mask[static_cast<int>(t)]) v[t] = value;
  return MatrixField(std::move(v));
}

MatrixField MatrixField::with_field_on(const RegionMask& mask,
                                       const MatrixField& other) const {
  std::vector<Matrix2c> v = a_;
  for (size_t t = 0; t < v.size(); ++t)
    if (mask[static_cast<int>(t)]) v[t] = other.value(static_cast<int>(t));
  return MatrixField(std::move(v));
}

std::pair<MatrixField, MatrixField> decompose(const MatrixField& a) {
  return {a.self_adjoint_field(), a.skew_field()};
}

bool check_admissible_field(const MatrixField& a, double c_min) {
  if (!(c_min > 0.0))
    throw std::invalid_argument("check_admissible_field: c_min must be positive");
  for (int t = 0; t < a.size(); ++t)
    if (hermitian_eig_bounds(a.self_adjoint(t)).first < c_min) return false;
  return true;
}

BoundsReport bounds_estimate(const MatrixField& a, const Mesh& mesh,
                             const RegionMask& region) {
  if (region.empty())
    throw std::invalid_argument("bounds_estimate: empty region");
  BoundsReport rep;
  double alpha = std::numeric_limits<double>::infinity();
  double beta = 0.0, eta = 0.0, hn = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!region[t]) continue;
    auto [lo, hi] = hermitian_eig_bounds(a.self_adjoint(t));
    alpha = std::min(alpha, lo);
    beta = std::max(beta, hi);
    eta = std::max(eta, spectral_norm(a.skew(t)));
    hn = std::max(hn, spectral_norm(a.value(t)));
  }
  rep.bounds = {alpha, beta, eta};
  rep.h_norm = hn;
  rep.h_norm_skew = eta;
  return rep;
}

CoefficientBounds joint_bounds(const MatrixField& a0, const MatrixField& ad,
                               const Mesh& mesh) {
  RegionMask all = RegionMask::all(mesh);
  auto b0 = bounds_estimate(a0, mesh, all).bounds;
  auto bd = bounds_estimate(ad, mesh, all).bounds;
  return {std::min(b0.alpha, bd.alpha), std::max(b0.beta, bd.beta),
          std::max(b0.eta, bd.eta)};
}

MatrixField build_test_coeff(const MatrixField& a0, const RegionMask& C,
                             const CoefficientBounds& bounds, TestSign sign) {
  if (!bounds.valid())
    throw std::invalid_argument("build_test_coeff: invalid bounds");
  const double level = sign == TestSign::Minus
                           ? bounds.alpha
                           : bounds.beta + bounds.eta * bounds.eta / bounds.alpha;
  return a0.self_adjoint_field().with_value_on(C, level * Matrix2c::Identity());
}

MatrixField build_truncated_coeff(const MatrixField& a0, const MatrixField& ad_r,
                                  const RegionMask& C, double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("build_truncated_coeff: epsilon must be positive");
  std::vector<Matrix2c> v(a0.size());
  for (int t = 0; t < a0.size(); ++t)
    v[t] = C[t] ? Matrix2c((1.0 / epsilon) * ad_r.value(t)) : a0.value(t);
  return MatrixField(std::move(v));
}

double truncation_epsilon_threshold(const CoefficientBounds& bounds) {
  const double r = bounds.eta / bounds.alpha;
  return 1.0 / (1.0 + r * r);
}

Phantom build_phantom(const PhantomSpec& spec, const Mesh& mesh) {
  const int nt = mesh.n_triangles();
  std::vector<Matrix2c> values(nt, spec.background);
  std::vector<bool> touched(nt, false);
  for (const auto& piece : spec.pieces) {
    RegionMask mask = piece.mask ? *piece.mask
                                 : mask_from_predicate(mesh, piece.region);
    if (mask.size() != nt)
      throw std::invalid_argument("build_phantom: piece mask size mismatch");
    for (int t = 0; t < nt; ++t) {
      if (!mask[t]) continue;
      if (touched[t] && (values[t] - piece.value).cwiseAbs().maxCoeff() > 0.0)
        throw std::invalid_argument(
            "build_phantom: overlapping pieces with contradictory values");
      values[t] = piece.value;
      touched[t] = true;
    }
  }

  Phantom ph;
  ph.a0 = MatrixField::constant(mesh, spec.background);
  ph.ad = MatrixField(std::move(values));
  ph.tau_declared_plus = spec.tau_plus;
  ph.tau_declared_minus = spec.tau_minus;
  ph.d = RegionMask::none(mesh);
  ph.m = RegionMask::none(mesh);
  for (int t = 0; t < nt; ++t) {
    ph.d.flags[t] =
        (ph.ad.value(t) - ph.a0.value(t)).cwiseAbs().maxCoeff() > 1e-14;
    ph.m.flags[t] = spectral_norm(ph.a0.skew(t)) > 1e-14;
  }
  return ph;
}

AssumptionReport check_assumptions(const Phantom& phantom, const Mesh& mesh,
                                   const GammaSpec& gamma, int collar_k,
                                   const std::optional<RegionMask>& ball) {
  AssumptionReport rep;
  rep.bounds = joint_bounds(phantom.a0, phantom.ad, mesh);
  const double alpha = rep.bounds.alpha, beta = rep.bounds.beta;

  RegionMask dstar = outer_shape(mesh, phantom.d);
  if (dstar.empty()) {
    rep.notes.push_back("empty inclusion; definiteness assumptions vacuous");
    rep.definiteness_ok = false;
    return rep;
  }

  // Collar V inside D*: elements of D* within graph distance collar_k of the
  // edge-boundary of D*.
  RegionMask rim = RegionMask::none(mesh);
  for (const auto& [tin, tout] : mask_edge_boundary(mesh, dstar))
    rim.flags[tin] = true;
  RegionMask collar = dilate(mesh, rim, std::max(0, collar_k - 1)) & dstar;
  if (collar.empty()) collar = dstar;
  RegionMask B = ball.value_or(collar);

  double skew0 = 0.0, skewd = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!collar[t]) continue;
    skew0 = std::max(skew0, spectral_norm(phantom.a0.skew(t)));
    skewd = std::max(skewd, spectral_norm(phantom.ad.skew(t)));
  }
  rep.tau_plus_required = beta * beta / (alpha * alpha * alpha) * skew0 * skew0;
  rep.tau_minus_required = skewd * skewd / alpha;

  double min_jump_v = std::numeric_limits<double>::infinity();
  double max_jump_v = -std::numeric_limits<double>::infinity();
  double min_jump_b = std::numeric_limits<double>::infinity();
  double max_jump_b = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (!collar[t] && !(B[t])) continue;
    Matrix2c jump = phantom.ad.self_adjoint(t) - phantom.a0.self_adjoint(t);
    auto [lo, hi] = hermitian_eig_bounds(jump);
    if (collar[t]) {
      min_jump_v = std::min(min_jump_v, lo);
      max_jump_v = std::max(max_jump_v, hi);
    }
    if (B[t]) {
      min_jump_b = std::min(min_jump_b, lo);
      max_jump_b = std::max(max_jump_b, hi);
    }
  }

  // A declared margin must itself satisfy the threshold; default to it.
  const double tp = std::max(
      phantom.tau_declared_plus.value_or(rep.tau_plus_required),
      rep.tau_plus_required);
  const double tm = std::max(
      phantom.tau_declared_minus.value_or(rep.tau_minus_required),
      rep.tau_minus_required);
  rep.margin_a = min_jump_b - tp;
  rep.case_a = min_jump_v >= tp && rep.margin_a > 0.0;
  rep.margin_b = -max_jump_b - tm;
  rep.case_b = max_jump_v <= -tm && rep.margin_b > 0.0;
  rep.definiteness_ok = rep.case_a || rep.case_b;

  // Component S of Omega \ (D u M) covering the outer-shape boundary and
  // reaching Gamma.
  RegionMask free_region = (phantom.d | phantom.m).complement();
  auto [comp, n_comp] = mask_components(mesh, free_region);
  auto edge_bdry = mask_edge_boundary(mesh, dstar);
  std::vector<bool> covers(n_comp, true);
  bool any_outside = false;
  for (const auto& [tin, tout] : edge_bdry) {
    any_outside = true;
    int c = comp[tout];  // -1 when the outer side lies in D or M
    for (int ci = 0; ci < n_comp; ++ci)
      covers[ci] = covers[ci] && (ci == c);
  }
  // The outer shape must not touch the domain boundary.
  for (int e = 0; e < mesh.n_boundary_edges() && any_outside; ++e) {
    if (dstar[mesh.boundary_edge_tri[e]]) {
      std::fill(covers.begin(), covers.end(), false);
      rep.notes.push_back("outer shape touches the domain boundary");
      break;
    }
  }
  rep.s_covers_outer_boundary = false;
  rep.s_reaches_gamma = false;
  if (any_outside) {
    for (int ci = 0; ci < n_comp; ++ci) {
      if (!covers[ci]) continue;
      rep.s_covers_outer_boundary = true;
      RegionMask s_mask = RegionMask::none(mesh);
      for (int t = 0; t < mesh.n_triangles(); ++t)
        s_mask.flags[t] = comp[t] == ci;
      rep.s_reaches_gamma = mask_touches_gamma(mesh, s_mask, gamma);
      break;
    }
  }
  if (!rep.s_covers_outer_boundary)
    rep.notes.push_back("no single component of Omega\\(D u M) covers the outer boundary");
  return rep;
}

}  // namespace monofem
