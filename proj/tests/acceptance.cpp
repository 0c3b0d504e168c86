// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Run through ctest or directly from the build tree.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "monofem/io.hpp"
#include "monofem/locpot.hpp"
#include "monofem/mono.hpp"
#include "monofem/verify.hpp"

using namespace monofem;
using namespace std::complex_literals;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string details;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

struct Scene {
  Mesh mesh;
  GammaSpec gamma;
};

Scene disk(double h) {
  Scene s;
  s.mesh = build_mesh(DomainSpec::disk(1.0), h);
  s.gamma = select_gamma(s.mesh, GammaPredicate::full());
  return s;
}

// ---- criterion 1: ND analytic oracle --------------------------------------

Outcome nd_oracle() {
  auto t0 = std::chrono::steady_clock::now();
  Scene s = disk(0.02);
  NDOperator nd = compute_nd(
      assemble_and_factor(s.mesh, MatrixField::identity(s.mesh), s.gamma));
  Eigen::VectorXd ev = generalized_eigenvalues(nd);
  const double runtime = seconds_since(t0);

  Outcome out;
  double worst = 0.0;
  const int m = static_cast<int>(ev.size());
  for (int k = 0; k < 8; ++k) {
    const double expect = 1.0 / (k / 2 + 1);
    const double rel = std::abs(ev[m - 1 - k] - expect) / expect;
    worst = std::max(worst, rel);
  }
  out.pass = worst < 0.02 && runtime < 60.0;
  std::ostringstream os;
  os << "worst rel err " << worst << " (< 0.02), runtime " << runtime
     << " s (< 60)";
  out.details = os.str();
  return out;
}

// ---- criterion 2: adjoint identity ----------------------------------------

Outcome adjoint_identity() {
  Scene s = disk(0.15);
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.8);
    std::vector<Matrix2c> adj(a.size());
    for (int t = 0; t < a.size(); ++t) adj[t] = a.value(t).adjoint();
    NDOperator nd = compute_nd(assemble_and_factor(s.mesh, a, s.gamma));
    NDOperator nd_star = compute_nd(
        assemble_and_factor(s.mesh, MatrixField(std::move(adj)), s.gamma));
    NDOperator diff{nd_star.matrix - nd.matrix.adjoint(), nd.gram};
    worst = std::max(worst, operator_norm(diff));
  }
  Outcome out;
  out.pass = worst <= 1e-10;
  out.details = "worst Gram-weighted norm " + io::format_double(worst) +
                " (<= 1e-10)";
  return out;
}

// ---- criterion 3: quadratic-form identities --------------------------------

Outcome quadratic_forms() {
  Scene s = disk(0.15);
  std::mt19937_64 rng(1002);
  RegionMask all = RegionMask::all(s.mesh);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.8);
    FactorizedSystem sys = assemble_and_factor(s.mesh, a, s.gamma);
    BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
    FieldSolution u = sys.solve(f);
    cplx pairing = boundary_pairing(s.mesh, s.gamma, f, u);
    double er = energy_integral(s.mesh, u, u, a.self_adjoint_field(), all).real();
    double ei = energy_integral(s.mesh, u, u, a.skew_field(), all).real();
    const double scale = std::abs(pairing) + 1e-12;
    worst = std::max(worst, std::abs(pairing.real() - er) / scale);
    worst = std::max(worst, std::abs(pairing.imag() - ei) / scale);
  }
  Outcome out;
  out.pass = worst <= 1e-10;
  out.details = "worst relative defect " + io::format_double(worst) +
                " (<= 1e-10)";
  return out;
}

// ---- criterion 4: general monotonicity bounds ------------------------------

Outcome general_bounds() {
  Scene coarse = disk(0.2);
  std::mt19937_64 rng(1003);
  double worst_margin = 0.0;
  bool all_ok = true;
  for (int pair = 0; pair < 100; ++pair) {
    MatrixField a1 = random_admissible_field(coarse.mesh, rng, 0.5, 2.0, 0.7);
    MatrixField a2 = random_admissible_field(coarse.mesh, rng, 0.5, 2.0, 0.7);
    for (int c = 0; c < 10; ++c) {
      BoundaryCurrent f = random_current(coarse.mesh, coarse.gamma, rng);
      MonoBoundsReport rep =
          general_mono_bounds(a1, a2, f, coarse.mesh, coarse.gamma);
      const double scale = std::max(
          {std::abs(rep.lhs), std::abs(rep.lower), std::abs(rep.upper), 1e-12});
      worst_margin = std::min(
          {worst_margin, rep.margin_lower / scale, rep.margin_upper / scale});
      all_ok = all_ok && rep.ok;
    }
  }

  Scene fine = disk(0.02);
  MonoBoundsReport an = general_mono_bounds(
      MatrixField::identity(fine.mesh), MatrixField::identity(fine.mesh, 2.0),
      fourier_current(fine.mesh, fine.gamma, 1), fine.mesh, fine.gamma);
  const double e_low = std::abs(an.lower - kPi / 4.0) / (kPi / 4.0);
  const double e_lhs = std::abs(an.lhs - kPi / 2.0) / (kPi / 2.0);
  const double e_up = std::abs(an.upper - kPi / 2.0) / (kPi / 2.0);
  const double analytic = std::max({e_low, e_lhs, e_up});

  Outcome out;
  out.pass = all_ok && worst_margin >= -1e-9 && analytic <= 0.03;
  std::ostringstream os;
  os << "1000 samples, worst margin " << worst_margin
     << " (>= -1e-9); analytic disk err " << analytic << " (<= 0.03)";
  out.details = os.str();
  return out;
}

// ---- criterion 5: improved-bound optimality --------------------------------

Outcome improved_optimality() {
  Scene s = disk(0.1);
  MatrixField a = MatrixField::constant(
      s.mesh, Matrix2c::Identity() + 0.5i * Matrix2c::Identity());
  BoundaryCurrent f = fourier_current(s.mesh, s.gamma, 1);
  MonoBoundsReport imp = improved_mono_bounds(a, a, f, s.mesh, s.gamma);
  MonoBoundsReport gen = general_mono_bounds(a, a, f, s.mesh, s.gamma);
  Outcome out;
  out.pass = std::abs(imp.lower) <= 1e-9 && std::abs(imp.upper) <= 1e-9 &&
             std::abs(gen.lower) >= 0.01 && std::abs(gen.upper) >= 0.01 &&
             imp.mixed_identity_residual <= 1e-10;
  std::ostringstream os;
  os << "improved bounds (" << imp.lower << ", " << imp.upper
     << ") ~ 0; general bounds (" << gen.lower << ", " << gen.upper
     << ") stay >= 0.01; mixed identity residual "
     << imp.mixed_identity_residual;
  out.details = os.str();
  return out;
}

// ---- criterion 6: Taylor remainder chain -----------------------------------

Outcome remainder_chain() {
  Scene s = disk(0.2);
  std::mt19937_64 rng(1004);
  MatrixField a1 = random_admissible_field(s.mesh, rng, 0.6, 1.8, 0.5);
  MatrixField a2 = random_admissible_field(s.mesh, rng, 0.6, 1.8, 0.5);
  BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);

  bool decreasing = true;
  double prev = 1e300, final_err = 1e300;
  for (int nq : {2, 4, 8, 16}) {
    RemainderReport rep = remainder_chain_check(a1, a2, 1, f, s.mesh, s.gamma, nq);
    decreasing = decreasing && rep.taylor_rel_err <= prev * (1.0 + 1e-12);
    prev = rep.taylor_rel_err;
    final_err = rep.taylor_rel_err;
  }

  bool closures = true;
  for (int pair = 0; pair < 20; ++pair) {
    MatrixField b1 = random_admissible_field(s.mesh, rng, 0.6, 1.8, 0.5);
    MatrixField b2 = random_admissible_field(s.mesh, rng, 0.6, 1.8, 0.5);
    BoundaryCurrent g = random_current(s.mesh, s.gamma, rng);
    RemainderReport rep =
        remainder_chain_check(b1, b2, (pair % 2) + 1, g, s.mesh, s.gamma, 8);
    closures = closures && rep.ok &&
               std::abs(rep.cross_term) <= rep.final_bound_full;
  }

  Outcome out;
  out.pass = decreasing && final_err <= 1e-8 && closures;
  std::ostringstream os;
  os << "taylor error decreasing to " << final_err
     << " (<= 1e-8); 20/20 chains closed: " << (closures ? "yes" : "no");
  out.details = os.str();
  return out;
}

// ---- criterion 7: soundness of the four methods ----------------------------

struct SoundPhantom {
  std::string name;
  Phantom phantom;
  std::vector<Method> methods;
};

Outcome soundness() {
  Scene s = disk(0.1);
  Matrix2c jmat;
  jmat << 0.0, -1.0i, 1.0i, 0.0;

  std::vector<SoundPhantom> phantoms;
  auto ball_phantom = [&](Matrix2c value) {
    PhantomSpec spec;
    spec.pieces.push_back({MaskPredicate::ball({0.1, 0.0}, 0.3), {}, value});
    return build_phantom(spec, s.mesh);
  };
  const std::vector<Method> all_methods = {Method::Nonlinear, Method::Linearized,
                                           Method::Corollary, Method::Extreme};
  phantoms.push_back({"jump up", ball_phantom(2.0 * Matrix2c::Identity()),
                      all_methods});
  phantoms.push_back({"jump down", ball_phantom(0.5 * Matrix2c::Identity()),
                      all_methods});
  Matrix2c aniso;
  aniso << 2.5, 0.4, 0.4, 1.8;
  phantoms.push_back({"complex anisotropic",
                      ball_phantom(aniso + 1.0i * (0.4 * jmat) +
                                   0.3i * Matrix2c::Identity()),
                      all_methods});
  {
    // complex background: skew support on a ring away from the inclusion
    Phantom ph = ball_phantom(2.0 * Matrix2c::Identity());
    RegionMask ring =
        mask_from_predicate(s.mesh, MaskPredicate::annulus({0, 0}, 0.72, 0.82));
    Matrix2c complex_v = Matrix2c::Identity() + 1.0i * (0.25 * jmat);
    MatrixField a0 = ph.a0.with_value_on(ring, complex_v);
    MatrixField ad = ph.ad.with_value_on(ring, complex_v);
    phantoms.push_back({"complex background",
                        Phantom{a0, ad, ph.d, skew_support(a0), {}, {}},
                        {Method::Nonlinear, Method::Linearized}});
  }
  {
    PhantomSpec spec;
    spec.pieces.push_back({MaskPredicate::ball({-0.35, 0.1}, 0.2), {},
                           2.5 * Matrix2c::Identity()});
    spec.pieces.push_back({MaskPredicate::ball({0.35, -0.1}, 0.2), {},
                           0.5 * Matrix2c::Identity()});
    phantoms.push_back({"two inclusions", build_phantom(spec, s.mesh),
                        all_methods});
  }

  Outcome out;
  int tested = 0;
  std::string failure;
  for (const auto& sp : phantoms) {
    NDOperator data =
        compute_nd(assemble_and_factor(s.mesh, sp.phantom.ad, s.gamma));
    TestContext ctx = make_test_context(
        s.mesh, sp.phantom.a0, s.gamma,
        joint_bounds(sp.phantom.a0, sp.phantom.ad, s.mesh));
    CandidateSet cands = generate_candidates(s.mesh, ctx.m, {8, 8, 0.08});
    const double tol = default_tolerance(data);
    for (const auto& cand : cands.kept) {
      if (!sp.phantom.d.is_subset_of(cand.mask)) continue;
      for (Method m : sp.methods) {
        TestReport rep = run_inclusion_test(m, data, cand.mask, ctx, tol);
        ++tested;
        if (!rep.pass && failure.empty()) {
          double worst = 0.0;
          for (const auto& iq : rep.inequalities)
            worst = std::min(worst, iq.min_eig);
          failure = sp.name + "/" + method_name(m) + " candidate " +
                    std::to_string(cand.id) + " min eig " +
                    io::format_double(worst);
        }
        out.pass = out.pass && rep.pass;
      }
    }
  }
  std::ostringstream os;
  os << tested << " (phantom, method, superset-candidate) tests, ";
  os << (out.pass ? "zero false negatives" : "FAILED: " + failure);
  out.details = os.str();
  return out;
}

// ---- criterion 8: detection under refinement -------------------------------

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  int k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= static_cast<int>(t) && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0)
      --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  return hull;
}

bool point_in_hull(const std::vector<Eigen::Vector2d>& hull,
                   const Eigen::Vector2d& p) {
  for (size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d& a = hull[i];
    const Eigen::Vector2d& b = hull[(i + 1) % hull.size()];
    if ((b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x()) <
        -1e-12)
      return false;
  }
  return true;
}

double dist_to_hull(const std::vector<Eigen::Vector2d>& hull,
                    const Eigen::Vector2d& p) {
  if (point_in_hull(hull, p)) return 0.0;
  double d = 1e300;
  for (size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d& a = hull[i];
    Eigen::Vector2d seg = hull[(i + 1) % hull.size()] - a;
    double s = std::clamp((p - a).dot(seg) / seg.squaredNorm(), 0.0, 1.0);
    d = std::min(d, (p - a - s * seg).norm());
  }
  return d;
}

Outcome detection() {
  auto t0 = std::chrono::steady_clock::now();
  const double h = 0.02;
  Scene s = disk(h);
  PhantomSpec spec;
  spec.pieces.push_back({MaskPredicate::ball({0.0, 0.0}, 0.35), {},
                         2.0 * Matrix2c::Identity()});
  Phantom ph = build_phantom(spec, s.mesh);
  NDOperator data = compute_nd(assemble_and_factor(s.mesh, ph.ad, s.gamma));
  NDOperator background =
      compute_nd(assemble_and_factor(s.mesh, ph.a0, s.gamma));
  TestContext ctx = make_test_context(s.mesh, ph.a0, s.gamma,
                                      joint_bounds(ph.a0, ph.ad, s.mesh));
  CandidateSet cands = generate_candidates(s.mesh, ctx.m, {16, 48, 0.05});
  // Noise-floor tolerance from the known-background run; hull-sharp
  // reconstruction needs the tolerance below the thinnest cap violations.
  const double tol = calibrate_tolerance(Method::Linearized, background, cands,
                                         ctx, OneSided::Both, 4);
  ReconResult res = reconstruct(Method::Linearized, data, cands, ctx, tol,
                                OneSided::Both, 4);

  // every cap cutting at least 25% of the inclusion must fail its upper test
  const double d_area = mask_area(s.mesh, ph.d);
  bool detection_ok = true;
  double worst_gap = 1e300;
  int must_fail = 0;
  for (size_t i = 0; i < cands.kept.size(); ++i) {
    const double covered = mask_area(s.mesh, cands.kept[i].mask & ph.d);
    if (covered > 0.75 * d_area) continue;
    ++must_fail;
    double upper_min = 1e300;
    for (const auto& iq : res.reports[i].inequalities)
      if (iq.name.find("d_plus") != std::string::npos)
        upper_min = std::min(upper_min, iq.min_eig);
    worst_gap = std::min(worst_gap, -upper_min / (10.0 * tol));
    detection_ok = detection_ok && upper_min < -10.0 * tol;
  }

  // mask covers D and tracks the convex hull of D
  const bool covers = ph.d.is_subset_of(res.mask);
  std::vector<Eigen::Vector2d> d_pts;
  for (int t = 0; t < s.mesh.n_triangles(); ++t)
    if (ph.d[t]) d_pts.push_back(s.mesh.tri_centroid[t]);
  auto hull = convex_hull(d_pts);
  double hausdorff = 0.0;
  for (int t = 0; t < s.mesh.n_triangles(); ++t) {
    if (res.mask[t])
      hausdorff = std::max(hausdorff, dist_to_hull(hull, s.mesh.tri_centroid[t]));
    // the other direction: hull points inside the reconstruction come free
    // from covers (recon contains D, and the hull of D-centroids only adds
    // points between D elements); check it anyway via containment below.
  }
  bool hull_in_mask = true;
  for (int t = 0; t < s.mesh.n_triangles(); ++t)
    if (point_in_hull(hull, s.mesh.tri_centroid[t]) && !res.mask[t])
      hull_in_mask = false;

  const double runtime = seconds_since(t0);
  Outcome out;
  out.pass = detection_ok && covers && hull_in_mask && hausdorff <= 2.0 * h &&
             runtime < 600.0;
  std::ostringstream os;
  os << must_fail << " caps must fail (worst strength " << worst_gap
     << "x, calibrated tol " << tol << "); recon covers D: "
     << (covers && hull_in_mask ? "yes" : "NO") << "; hausdorff to hull "
     << hausdorff << " (<= " << 2.0 * h << "); runtime " << runtime
     << " s (< 600, 4 workers)";
  out.details = os.str();
  return out;
}

// ---- criterion 9: extreme-operator limit -----------------------------------

Outcome extreme_limit() {
  Scene s = disk(0.05);
  RegionMask c = mask_from_predicate(s.mesh, MaskPredicate::ball({0.2, 0.0}, 0.3));
  PhantomSpec spec;
  spec.pieces.push_back({MaskPredicate::ball({0.2, 0.0}, 0.25), {},
                         2.0 * Matrix2c::Identity() + 0.3i * Matrix2c::Identity()});
  Phantom ph = build_phantom(spec, s.mesh);

  auto ops = extreme_operators(s.mesh, ph.a0, c, s.gamma);
  const double cond_norm = operator_norm(ops.conducting);

  bool decreasing = true;
  double prev = 1e300, last = 1e300;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    MatrixField a_eps =
        build_truncated_coeff(ph.a0, ph.ad.self_adjoint_field(), c, eps);
    NDOperator nd_eps = compute_nd(assemble_and_factor(s.mesh, a_eps, s.gamma));
    last = operator_norm(nd_eps - ops.conducting);
    decreasing = decreasing && last < prev;
    prev = last;
  }

  NDOperator data = compute_nd(assemble_and_factor(s.mesh, ph.ad, s.gamma));
  NDOperator data_r = hermitian_split(data).first;
  const double tol = 1e-9 * operator_scale(data_r);
  const double ins_min =
      generalized_eigenvalues(ops.insulating - data_r).minCoeff();
  const double con_min =
      generalized_eigenvalues(data_r - ops.conducting).minCoeff();

  Outcome out;
  out.pass = decreasing && last <= 1e-3 * cond_norm && ins_min >= -tol &&
             con_min >= -tol;
  std::ostringstream os;
  os << "truncation gap strictly decreasing to " << last << " (<= "
     << 1e-3 * cond_norm << "); ordering margins " << ins_min << ", " << con_min
     << " (>= " << -tol << ")";
  out.details = os.str();
  return out;
}

// ---- criterion 10: localized potentials ------------------------------------

Outcome localized_potentials() {
  double prev = 0.0;
  bool monotone = true;
  for (double h : {0.1, 0.05, 0.025}) {
    Scene s = disk(h);
    RegionMask u_set =
        mask_fully_inside(s.mesh, MaskPredicate::halfplane({-1, 0}, 0.0));
    RegionMask b_set =
        mask_fully_inside(s.mesh, MaskPredicate::ball({0.4, 0.0}, 0.15));
    LocpotResult res = localized_current(s.mesh, MatrixField::identity(s.mesh),
                                         s.gamma, u_set, b_set, 1e-8);
    monotone = monotone && res.ratio >= prev * (1.0 - 1e-10);
    prev = res.ratio;
  }

  Scene fine = disk(0.02);
  RegionMask u_set =
      mask_fully_inside(fine.mesh, MaskPredicate::halfplane({-1, 0}, 0.0));
  RegionMask b_set =
      mask_fully_inside(fine.mesh, MaskPredicate::ball({0.4, 0.0}, 0.15));
  LocpotResult res = localized_current(fine.mesh, MatrixField::identity(fine.mesh),
                                       fine.gamma, u_set, b_set, 1e-8);

  Outcome out;
  out.pass = monotone && res.ratio >= 1e3;
  std::ostringstream os;
  os << "ratio non-decreasing over refinement: " << (monotone ? "yes" : "NO")
     << "; ratio at h=0.02: " << res.ratio << " (>= 1e3)";
  out.details = os.str();
  return out;
}

// ---- criterion 11: Frechet-derivative consistency --------------------------

Outcome frechet_consistency() {
  Scene s = disk(0.05);
  MatrixField a0 = MatrixField::identity(s.mesh);
  RegionMask c = mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.4));
  CoefficientBounds bounds{1.0, 2.0, 0.5};
  const double level = bounds.beta + bounds.eta * bounds.eta / bounds.alpha;

  LinearizedBase base = make_linearized_base(s.mesh, a0, s.gamma);
  std::vector<Matrix2c> hv(s.mesh.n_triangles(), Matrix2c::Zero());
  for (int t = 0; t < s.mesh.n_triangles(); ++t)
    if (c[t]) hv[t] = -(level * Matrix2c::Identity() - a0.self_adjoint(t));
  MatrixField h(std::move(hv));
  NDOperator deriv =
      frechet_derivative_operator(s.mesh, base.basis, base.nodal, h, c);
  const double dn = operator_norm(deriv);

  Outcome out;
  std::ostringstream os;
  double prev = 1e300;
  os << "FD errors:";
  for (double t : {1e-2, 1e-3, 1e-4}) {
    std::vector<Matrix2c> pv(s.mesh.n_triangles());
    for (int e = 0; e < s.mesh.n_triangles(); ++e)
      pv[e] = a0.self_adjoint(e) + t * h.value(e);
    NDOperator nd_t = compute_nd(
        assemble_and_factor(s.mesh, MatrixField(std::move(pv)), s.gamma));
    NDOperator fd{(nd_t.matrix - base.lambda0.matrix) / t, base.lambda0.gram};
    const double err = operator_norm(fd - deriv) / dn;
    os << " " << err;
    out.pass = out.pass && err < 0.4 * prev;
    prev = err;
  }
  os << " (each step < 0.4x the previous)";
  out.details = os.str();
  return out;
}

// ---- criterion 12: CLI determinism -----------------------------------------

int run_cli(const std::string& args) {
  std::string cmd = std::string(MONOFEM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "monofem_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  io::json cfg;
  cfg["seed"] = 11;
  cfg["mesh"] = {{"kind", "disk"}, {"radius", 1.0}, {"h", 0.1}};
  cfg["gamma"] = {{"kind", "full"}};
  cfg["background"] = {1, 0, 0, 0, 0, 0, 1, 0};
  cfg["pieces"] = io::json::array(
      {{{"mask", {{"kind", "ball"}, {"center", {0.0, 0.0}}, {"radius", 0.3}}},
        {"matrix", {2, 0, 0, 0, 0, 0, 2, 0}}}});
  cfg["method"] = "linearized";
  cfg["dictionary"] = {{"kind", "halfspace_caps"},
                       {"n_dirs", 6},
                       {"n_offsets", 6},
                       {"margin", 0.1}};
  io::write_text(dir / "config.json", cfg.dump(2) + "\n");

  Outcome out;
  out.pass =
      run_cli("reconstruct -c " + (dir / "config.json").string() + " -o " +
              (dir / "out1").string() + " -j 1") == 0 &&
      run_cli("reconstruct -c " + (dir / "config.json").string() + " -o " +
              (dir / "out2").string() + " -j 4") == 0;
  int identical = 0;
  const std::vector<std::string> names = {"recon.json", "recon_mask.csv",
                                          "recon_mask.pgm", "candidates.csv"};
  if (out.pass) {
    for (const auto& name : names)
      if (io::read_text(dir / "out1" / name) == io::read_text(dir / "out2" / name))
        ++identical;
    out.pass = identical == static_cast<int>(names.size());
  }
  out.details = "jobs=1 vs jobs=4: " + std::to_string(identical) + "/" +
                std::to_string(names.size()) + " artifacts byte-identical";
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const std::vector<Entry> criteria = {
      {1, "ND analytic oracle (disk spectrum 1/n, h=0.02)", nd_oracle},
      {2, "adjoint identity for 20 random complex fields", adjoint_identity},
      {3, "quadratic-form identities for 20 random samples", quadratic_forms},
      {4, "two-sided monotonicity bounds (1000 samples + analytic)", general_bounds},
      {5, "improved-bound optimality on the fixed witness", improved_optimality},
      {6, "Taylor remainder chain closure", remainder_chain},
      {7, "soundness of all four methods (zero false negatives)", soundness},
      {8, "detection under refinement and hull-accurate reconstruction", detection},
      {9, "extreme-operator truncation limit and ordering", extreme_limit},
      {10, "localized potentials concentration", localized_potentials},
      {11, "Frechet-derivative finite-difference consistency", frechet_consistency},
      {12, "byte-identical outputs across worker counts", determinism},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
      out = entry.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.details = std::string("exception: ") + e.what();
    }
    const double dt = seconds_since(t0);
    std::printf("[%s] criterion %2d: %s — %s (%.1f s)\n",
                out.pass ? "PASS" : "FAIL", entry.id, entry.name,
                out.details.c_str(), dt);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
