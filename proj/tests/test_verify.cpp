#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "monofem/verify.hpp"

using namespace monofem;
using namespace std::complex_literals;

namespace {
constexpr double kPi = std::numbers::pi;

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
}  // namespace

TEST_CASE("general bounds: analytic disk pair") {
  Scene s = disk(0.05);
  MatrixField a1 = MatrixField::identity(s.mesh);
  MatrixField a2 = MatrixField::identity(s.mesh, 2.0);
  BoundaryCurrent f = fourier_current(s.mesh, s.gamma, 1);
  MonoBoundsReport rep = general_mono_bounds(a1, a2, f, s.mesh, s.gamma);
  CHECK(rep.ok);
  CHECK(rep.lower == doctest::Approx(kPi / 4.0).epsilon(0.05));
  CHECK(rep.lhs == doctest::Approx(kPi / 2.0).epsilon(0.05));
  CHECK(rep.upper == doctest::Approx(kPi / 2.0).epsilon(0.05));
}

TEST_CASE("general bounds: equal self-adjoint fields collapse to zero") {
  Scene s = disk(0.15);
  std::mt19937_64 rng(41);
  MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.0);
  BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
  MonoBoundsReport rep = general_mono_bounds(a, a, f, s.mesh, s.gamma);
  double scale = std::abs(rep.lhs) + 1.0;
  CHECK(std::abs(rep.lhs) <= 1e-10 * scale);
  CHECK(std::abs(rep.lower) <= 1e-10 * scale);
  CHECK(std::abs(rep.upper) <= 1e-10 * scale);
  CHECK(rep.ok);
}

TEST_CASE("general bounds stay strictly open for equal complex fields") {
  Scene s = disk(0.15);
  MatrixField a = MatrixField::constant(
      s.mesh, Matrix2c::Identity() + 0.5i * Matrix2c::Identity());
  BoundaryCurrent f = fourier_current(s.mesh, s.gamma, 1);
  MonoBoundsReport rep = general_mono_bounds(a, a, f, s.mesh, s.gamma);
  CHECK(rep.ok);
  CHECK(std::abs(rep.lhs) <= 1e-10);
  CHECK(rep.lower < -0.01);
  CHECK(rep.upper > 0.01);
}

TEST_CASE("improved bounds vanish exactly when the coefficients coincide") {
  Scene s = disk(0.15);
  std::mt19937_64 rng(42);
  MatrixField a = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.6);
  BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
  MonoBoundsReport rep = improved_mono_bounds(a, a, f, s.mesh, s.gamma);
  double scale = 1.0;
  CHECK(std::abs(rep.lhs) <= 1e-9 * scale);
  CHECK(std::abs(rep.lower) <= 1e-9 * scale);
  CHECK(std::abs(rep.upper) <= 1e-9 * scale);
  CHECK(rep.mixed_identity_residual <= 1e-10);
  CHECK(rep.ok);
}

TEST_CASE("improved bounds reduce to the general ones for self-adjoint pairs") {
  Scene s = disk(0.15);
  std::mt19937_64 rng(43);
  MatrixField a1 = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.0);
  MatrixField a2 = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.0);
  BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
  MonoBoundsReport g = general_mono_bounds(a1, a2, f, s.mesh, s.gamma);
  MonoBoundsReport m = improved_mono_bounds(a1, a2, f, s.mesh, s.gamma);
  double scale = std::abs(g.lhs) + 1.0;
  CHECK(std::abs(g.lower - m.lower) <= 1e-10 * scale);
  CHECK(std::abs(g.upper - m.upper) <= 1e-10 * scale);
  CHECK(std::abs(g.lhs - m.lhs) <= 1e-12 * scale);
  CHECK(m.ok);
}

TEST_CASE("both bound sets hold for random complex pairs") {
  Scene s = disk(0.2);
  std::mt19937_64 rng(44);
  for (int pair = 0; pair < 20; ++pair) {
    MatrixField a1 = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.6);
    MatrixField a2 = random_admissible_field(s.mesh, rng, 0.5, 2.0, 0.6);
    for (int c = 0; c < 3; ++c) {
      BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
      CHECK(general_mono_bounds(a1, a2, f, s.mesh, s.gamma).ok);
      CHECK(improved_mono_bounds(a1, a2, f, s.mesh, s.gamma).ok);
    }
  }
}

TEST_CASE("remainder chain: trivial cases") {
  Scene s = disk(0.2);
  MatrixField a = MatrixField::constant(
      s.mesh, Matrix2c::Identity() + 0.4i * Matrix2c::Identity());
  BoundaryCurrent f = fourier_current(s.mesh, s.gamma, 1);

  RemainderReport same = remainder_chain_check(a, a, 1, f, s.mesh, s.gamma, 4);
  CHECK(std::abs(same.cross_term) <= 1e-12);
  CHECK(same.taylor_rel_err <= 1e-12);
  CHECK(same.final_bound_full <= 1e-12);
  CHECK(same.ok);

  MatrixField b1 = MatrixField::identity(s.mesh);
  MatrixField b2 = MatrixField::identity(s.mesh, 2.0);
  RemainderReport sa = remainder_chain_check(b1, b2, 1, f, s.mesh, s.gamma, 8);
  CHECK(std::abs(sa.cross_term) <= 1e-12);
  CHECK(sa.final_bound_full >= 0.0);
  CHECK(sa.ok);
}

TEST_CASE("remainder chain: quadrature converges and the bound closes") {
  Scene s = disk(0.15);
  std::mt19937_64 rng(45);
  MatrixField a1 = random_admissible_field(s.mesh, rng, 0.6, 1.8, 0.5);
  MatrixField a2 = random_admissible_field(s.mesh, rng, 0.6, 1.8, 0.5);
  BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);

  double prev = 1e300;
  for (int nq : {2, 4, 8}) {
    RemainderReport rep = remainder_chain_check(a1, a2, 2, f, s.mesh, s.gamma, nq);
    CHECK(rep.taylor_rel_err <= prev * (1.0 + 1e-12));
    CHECK(rep.wt_bounds_ok);
    CHECK(std::abs(rep.cross_term) <= rep.final_bound_full);
    CHECK(std::abs(rep.im_u2_term) <= 1e-12);
    prev = rep.taylor_rel_err;
  }
  CHECK(prev <= 1e-8);
}

TEST_CASE("loewner product: worked scalar and anisotropic cases") {
  Scene s = disk(0.3);
  RegionMask v = RegionMask::all(s.mesh);

  // A1 = I, A2 = 2I, c = 1: product is 2I
  auto rep = loewner_product_check(MatrixField::identity(s.mesh),
                                   MatrixField::identity(s.mesh, 2.0), s.mesh, v,
                                   1.0, LoewnerCase::PositiveJump);
  CHECK(rep.hypothesis_ok);
  CHECK(rep.conclusion_ok);
  CHECK(rep.worst_margin == doctest::Approx(1.0));

  // A1 = 2I, A2 = I, c = 1: product is -I/2, bound -c (alpha/beta)^2 = -1/4
  auto rep2 = loewner_product_check(MatrixField::identity(s.mesh, 2.0),
                                    MatrixField::identity(s.mesh), s.mesh, v, 1.0,
                                    LoewnerCase::NegativeJump);
  CHECK(rep2.hypothesis_ok);
  CHECK(rep2.conclusion_ok);
  CHECK(rep2.isotropic);
  CHECK(rep2.sharper_ok);  // -1/2 <= -c alpha/beta = -1/2
  CHECK(rep2.alpha == doctest::Approx(1.0));
  CHECK(rep2.beta == doctest::Approx(2.0));

  Matrix2c d12 = Matrix2c::Zero(), d34 = Matrix2c::Zero();
  d12(0, 0) = 1.0;
  d12(1, 1) = 2.0;
  d34(0, 0) = 3.0;
  d34(1, 1) = 4.0;
  auto rep3 = loewner_product_check(MatrixField::constant(s.mesh, d12),
                                    MatrixField::constant(s.mesh, d34), s.mesh, v,
                                    1.0, LoewnerCase::PositiveJump);
  CHECK(rep3.hypothesis_ok);
  CHECK(rep3.conclusion_ok);
  CHECK_FALSE(rep3.isotropic);

  // violated hypothesis is reported, not thrown
  auto rep4 = loewner_product_check(MatrixField::identity(s.mesh, 2.0),
                                    MatrixField::identity(s.mesh), s.mesh, v, 1.0,
                                    LoewnerCase::PositiveJump);
  CHECK_FALSE(rep4.hypothesis_ok);
}

TEST_CASE("loewner product on random self-adjoint pairs") {
  Scene s = disk(0.3);
  RegionMask v = RegionMask::all(s.mesh);
  std::mt19937_64 rng(46);
  int tested = 0;
  for (int trial = 0; trial < 50; ++trial) {
    MatrixField a1 = random_admissible_field(s.mesh, rng, 0.5, 1.0, 0.0);
    MatrixField a2 = random_admissible_field(s.mesh, rng, 1.5, 2.5, 0.0);
    auto rep = loewner_product_check(a1, a2, s.mesh, v, 0.5,
                                     LoewnerCase::PositiveJump);
    if (!rep.hypothesis_ok) continue;  // spectra guarantee this holds
    CHECK(rep.conclusion_ok);
    ++tested;
  }
  CHECK(tested == 50);
}

TEST_CASE("the skew-square term of the general upper bound vanishes as stated") {
  Scene s = disk(0.25);
  std::mt19937_64 rng(47);
  // isotropic pair: the mixed term vanishes by commutativity
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_real_distribution<double> uni(0.5, 2.0);
    MatrixField a1 = MatrixField::identity(s.mesh, uni(rng));
    Matrix2c v2 = uni(rng) * Matrix2c::Identity() +
                  0.4i * uni(rng) * Matrix2c::Identity();
    MatrixField a2 = MatrixField::constant(s.mesh, v2);
    BoundaryCurrent f = random_current(s.mesh, s.gamma, rng);
    MonoBoundsReport rep = general_mono_bounds(a1, a2, f, s.mesh, s.gamma);
    CHECK(std::abs(rep.upper_mixed) <= 1e-12 * (1.0 + std::abs(rep.upper)));
    CHECK(rep.ok);
  }
}

TEST_CASE("gauss-legendre nodes integrate polynomials exactly") {
  auto [nodes, weights] = gauss_legendre01(4);
  REQUIRE(nodes.size() == 4);
  double sum = 0.0, m7 = 0.0;
  for (int k = 0; k < 4; ++k) {
    sum += weights[k];
    m7 += weights[k] * std::pow(nodes[k], 7);
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m7 == doctest::Approx(1.0 / 8.0).epsilon(1e-12));  // int_0^1 x^7 dx
}
