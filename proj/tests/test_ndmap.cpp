#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "monofem/io.hpp"
#include "monofem/ndmap.hpp"
#include "monofem/verify.hpp"

using namespace monofem;
using namespace std::complex_literals;

namespace {

struct Setup {
  Mesh mesh;
  GammaSpec gamma;
};

Setup disk(double h) {
  Setup s;
  s.mesh = build_mesh(DomainSpec::disk(1.0), h);
  s.gamma = select_gamma(s.mesh, GammaPredicate::full());
  return s;
}

MatrixField adjoint_field(const MatrixField& a) {
  std::vector<Matrix2c> v(a.size());
  for (int t = 0; t < a.size(); ++t) v[t] = a.value(t).adjoint();
  return MatrixField(std::move(v));
}

}  // namespace

TEST_CASE("pairing contract against direct solves") {
  Setup s = disk(0.15);
  std::mt19937_64 rng(21);
  MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.6);
  FactorizedSystem sys = assemble_and_factor(s.mesh, a, s.gamma);
  NDOperator nd = compute_nd(sys);
  NDBasis basis = make_nd_basis(s.mesh, s.gamma);

  for (int trial = 0; trial < 5; ++trial) {
    BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
    BoundaryCurrent g = random_current(s.mesh, s.gamma, rng);
    cplx via_matrix = nd.pair(basis.to_psi(f.values), basis.to_psi(g.values));
    cplx direct = std::conj(boundary_pairing(s.mesh, s.gamma, f, sys.solve(g)));
    CHECK(std::abs(via_matrix - direct) <= 1e-10 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("adjoint coefficient transposes the ND matrix") {
  Setup s = disk(0.15);
  std::mt19937_64 rng(22);
  MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.7);
  NDOperator nd = compute_nd(assemble_and_factor(s.mesh, a, s.gamma));
  NDOperator nd_star =
      compute_nd(assemble_and_factor(s.mesh, adjoint_field(a), s.gamma));
  NDOperator diff{nd_star.matrix - nd.matrix.adjoint(), nd.gram};
  CHECK(operator_norm(diff) <= 1e-10 * operator_norm(nd));
}

TEST_CASE("coefficient scaling halves the operator") {
  Setup s = disk(0.2);
  MatrixField a = MatrixField::identity(s.mesh);
  MatrixField a2 = MatrixField::identity(s.mesh, 2.0);
  NDOperator nd = compute_nd(assemble_and_factor(s.mesh, a, s.gamma));
  NDOperator nd2 = compute_nd(assemble_and_factor(s.mesh, a2, s.gamma));
  CHECK((nd2.matrix - 0.5 * nd.matrix).cwiseAbs().maxCoeff() <=
        1e-12 * nd.matrix.cwiseAbs().maxCoeff());
}

TEST_CASE("disk spectrum approximates 1/n") {
  Setup s = disk(0.1);
  NDOperator nd = compute_nd(
      assemble_and_factor(s.mesh, MatrixField::identity(s.mesh), s.gamma));
  Eigen::VectorXd ev = generalized_eigenvalues(nd);
  const int m = static_cast<int>(ev.size());
  // descending: 1, 1, 1/2, 1/2, 1/3, 1/3
  const double expect[6] = {1.0, 1.0, 0.5, 0.5, 1.0 / 3.0, 1.0 / 3.0};
  for (int k = 0; k < 6; ++k)
    CHECK(ev[m - 1 - k] == doctest::Approx(expect[k]).epsilon(0.05));
}

TEST_CASE("hermitian split forms match the interior energies") {
  Setup s = disk(0.15);
  std::mt19937_64 rng(23);
  MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.7);
  FactorizedSystem sys = assemble_and_factor(s.mesh, a, s.gamma);
  NDOperator nd = compute_nd(sys);
  auto [ndr, ndi] = hermitian_split(nd);
  NDBasis basis = make_nd_basis(s.mesh, s.gamma);
  RegionMask all = RegionMask::all(s.mesh);

  for (int trial = 0; trial < 4; ++trial) {
    BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
    Eigen::VectorXcd fp = basis.to_psi(f.values);
    FieldSolution u = sys.solve(f);
    double qr = std::real(ndr.pair(fp, fp));
    double qi = std::real(ndi.pair(fp, fp));
    double er = energy_integral(s.mesh, u, u, a.self_adjoint_field(), all).real();
    double ei = energy_integral(s.mesh, u, u, a.skew_field(), all).real();
    CHECK(qr == doctest::Approx(er).epsilon(1e-9));
    CHECK(qi == doctest::Approx(-ei).epsilon(1e-9));
  }

  MatrixField sa = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.0);
  NDOperator nd_sa = compute_nd(assemble_and_factor(s.mesh, sa, s.gamma));
  auto [r2, i2] = hermitian_split(nd_sa);
  CHECK(operator_norm(i2) <= 1e-10 * operator_norm(nd_sa));
}

TEST_CASE("nonlinear test operators: empty skew support") {
  Setup s = disk(0.15);
  MatrixField a0 = MatrixField::identity(s.mesh);
  RegionMask c = mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.4));
  CoefficientBounds bounds{1.0, 2.0, 0.0};
  auto ops = nonlinear_test_operators(s.mesh, a0, c, bounds, s.gamma);
  CHECK(ops.d_m_minus_c.matrix.cwiseAbs().maxCoeff() == 0.0);

  // M inside C also deactivates the derivative term.
  MatrixField complex_core = a0.with_value_on(
      mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.2)),
      Matrix2c::Identity() + 0.3i * Matrix2c::Identity());
  auto ops2 = nonlinear_test_operators(s.mesh, complex_core, c,
                                       {1.0, 2.0, 0.3}, s.gamma);
  CHECK(ops2.d_m_minus_c.matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("derivative operators are negative semidefinite Hermitian squares") {
  Setup s = disk(0.12);
  // background with skew support on a ring away from the candidate
  RegionMask ring =
      mask_from_predicate(s.mesh, MaskPredicate::annulus({0, 0}, 0.55, 0.7));
  Matrix2c jmat;
  jmat << 0.0, -1.0i, 1.0i, 0.0;
  MatrixField a0 = MatrixField::identity(s.mesh).with_value_on(
      ring, Matrix2c::Identity() + 1.0i * (0.3 * jmat));
  RegionMask c = mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.35));
  auto ops = nonlinear_test_operators(s.mesh, a0, c, {1.0, 2.0, 0.3}, s.gamma);
  Eigen::VectorXd ev = generalized_eigenvalues(ops.d_m_minus_c);
  CHECK(ev.maxCoeff() <= 1e-10);
}

TEST_CASE("linearized operators vanish when the brackets vanish") {
  Setup s = disk(0.15);
  MatrixField a0 = MatrixField::identity(s.mesh);
  LinearizedBase base = make_linearized_base(s.mesh, a0, s.gamma);

  auto ops_empty = linearized_test_operators(base, s.mesh, a0,
                                             RegionMask::none(s.mesh),
                                             {1.0, 2.0, 0.5});
  CHECK(ops_empty.d_plus.matrix.cwiseAbs().maxCoeff() == 0.0);
  CHECK(ops_empty.d_minus.matrix.cwiseAbs().maxCoeff() == 0.0);

  RegionMask c = mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.4));
  auto ops_id = linearized_test_operators(base, s.mesh, a0, c, {1.0, 1.0, 0.0});
  CHECK(ops_id.d_plus.matrix.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("assembled Frechet derivative matches finite differences") {
  Setup s = disk(0.12);
  MatrixField a0 = MatrixField::identity(s.mesh);
  RegionMask c = mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.4));
  CoefficientBounds bounds{1.0, 2.0, 0.5};
  const double level = bounds.beta + bounds.eta * bounds.eta / bounds.alpha;

  LinearizedBase base = make_linearized_base(s.mesh, a0, s.gamma);
  // direction H = -[(beta + eta^2/alpha) I - A0^R] chi_C
  std::vector<Matrix2c> hv(s.mesh.n_triangles(), Matrix2c::Zero());
  for (int t = 0; t < s.mesh.n_triangles(); ++t)
    if (c[t]) hv[t] = -(level * Matrix2c::Identity() - a0.self_adjoint(t));
  MatrixField h(std::move(hv));
  NDOperator deriv =
      frechet_derivative_operator(s.mesh, base.basis, base.nodal, h, c);

  double prev_err = 1e300;
  for (double t : {1e-2, 1e-3}) {
    std::vector<Matrix2c> pv(s.mesh.n_triangles());
    for (int e = 0; e < s.mesh.n_triangles(); ++e)
      pv[e] = a0.self_adjoint(e) + t * h.value(e);
    NDOperator nd_t = compute_nd(
        assemble_and_factor(s.mesh, MatrixField(std::move(pv)), s.gamma));
    NDOperator fd{(nd_t.matrix - base.lambda0.matrix) / t, base.lambda0.gram};
    double err = operator_norm(fd - deriv);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err <= 2e-3 * operator_norm(deriv));
}

TEST_CASE("extreme operators: identity at empty C and interlacing order") {
  Setup s = disk(0.12);
  MatrixField a0 = MatrixField::identity(s.mesh);
  NDOperator nd0 = compute_nd(assemble_and_factor(s.mesh, a0, s.gamma));

  auto at_empty = extreme_operators(s.mesh, a0, RegionMask::none(s.mesh), s.gamma);
  CHECK(operator_norm(at_empty.insulating - nd0) <= 1e-10 * operator_norm(nd0));
  CHECK(operator_norm(at_empty.conducting - nd0) <= 1e-10 * operator_norm(nd0));

  RegionMask c = mask_from_predicate(s.mesh, MaskPredicate::ball({0.2, 0}, 0.3));
  auto ops = extreme_operators(s.mesh, a0, c, s.gamma);
  const double tol = 1e-9 * operator_scale(nd0);
  CHECK(generalized_eigenvalues(ops.insulating - nd0).minCoeff() >= -tol);
  CHECK(generalized_eigenvalues(nd0 - ops.conducting).minCoeff() >= -tol);
}

TEST_CASE("test operators are monotone in the candidate") {
  Setup s = disk(0.15);
  MatrixField a0 = MatrixField::identity(s.mesh);
  CoefficientBounds bounds{0.5, 2.0, 0.3};
  RegionMask c1 = mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.25));
  RegionMask c2 = mask_from_predicate(s.mesh, MaskPredicate::ball({0, 0}, 0.45));
  auto ops1 = nonlinear_test_operators(s.mesh, a0, c1, bounds, s.gamma);
  auto ops2 = nonlinear_test_operators(s.mesh, a0, c2, bounds, s.gamma);
  const double tol = 1e-9 * operator_scale(ops1.lambda_minus);
  // growing C lowers the minus coefficient, raising the map, and raises the
  // plus coefficient, lowering the map
  CHECK(generalized_eigenvalues(ops2.lambda_minus - ops1.lambda_minus).minCoeff() >= -tol);
  CHECK(generalized_eigenvalues(ops1.lambda_plus - ops2.lambda_plus).minCoeff() >= -tol);
}

TEST_CASE("operator csv roundtrip") {
  Setup s = disk(0.25);
  std::mt19937_64 rng(31);
  MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.4);
  NDOperator nd = compute_nd(assemble_and_factor(s.mesh, a, s.gamma));
  auto dir = std::filesystem::temp_directory_path() / "monofem_test_ndmap";
  std::filesystem::create_directories(dir);
  io::write_nd_operator(dir / "nd.csv", dir / "gram.csv", nd);
  NDOperator back = io::read_nd_operator(dir / "nd.csv", dir / "gram.csv");
  CHECK((back.matrix - nd.matrix).cwiseAbs().maxCoeff() <=
        1e-11 * nd.matrix.cwiseAbs().maxCoeff());
  CHECK((back.gram - nd.gram).cwiseAbs().maxCoeff() <=
        1e-11 * nd.gram.cwiseAbs().maxCoeff());
}
