#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "juliadyn/conjugacy.hpp"
#include "juliadyn/poly.hpp"

using juliadyn::cplx;
using juliadyn::ConjugacyEvaluator;
using juliadyn::Family;
using juliadyn::MultiIndex;
using juliadyn::RationalAngle;
using juliadyn::SeriesConfig;

namespace {
const cplx kOne{1.0, 0.0};
double dist(cplx a, cplx b) { return std::abs(a - b); }
}  // namespace

TEST_CASE("quadratic coefficient functions at the fixed point are Catalan numbers") {
  // phi_n(1) = -Catalan(n-1): the series Phi(1) = 1 + sum phi_n(1) c^n must
  // reproduce beta(c) = (1 + sqrt(1-4c))/2 whose Taylor coefficients are
  // (negative) Catalan numbers.
  const double catalan[6] = {1.0, 1.0, 2.0, 5.0, 14.0, 42.0};

  ConjugacyEvaluator eval(SeriesConfig{Family::Quadratic, 6});
  auto phis = eval.phi_all_at(kOne);  // generic telescoping path
  REQUIRE(phis.size() == 6);
  for (int n = 1; n <= 6; ++n) {
    CHECK(phis[n - 1].real() == doctest::Approx(-catalan[n - 1]).epsilon(1e-10));
    CHECK(std::abs(phis[n - 1].imag()) < 1e-10);
  }

  // The bottom-up fixed-point recursion must agree with the telescoping sum.
  eval.build_table(2);
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(dist(eval.phi_at_one(k), phis[k]) < 1e-10);
}

TEST_CASE("quadratic closed-form coefficient functions at distinguished points") {
  // phi1(-1) = +1, phi1(i) = 0, phi2(1) = -1.
  CHECK(juliadyn::phi1_quadratic({-1.0, 0.0}).real() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(juliadyn::phi1_quadratic({0.0, 1.0})) < 1e-12);
  CHECK(juliadyn::phi2_quadratic(kOne).real() ==
        doctest::Approx(-1.0).epsilon(1e-10));

  // The generic solver reproduces the closed forms away from special points.
  // At floating circle points the accuracy floor is the angle-doubling
  // rounding against a nowhere-smooth coefficient function, ~1e-10; exact
  // rational angles (tested elsewhere) do better.
  for (double turns : {0.137, 0.388, 0.729}) {
    cplx z = juliadyn::circle_point(turns);
    CHECK(dist(juliadyn::solve_phi_generic(Family::Quadratic, {1, 0}, z, 60),
               juliadyn::phi1_quadratic(z)) < 1e-10);
    CHECK(dist(juliadyn::solve_phi_generic(Family::Quadratic, {2, 0}, z, 60),
               juliadyn::phi2_quadratic(z)) < 1e-9);
  }
}

TEST_CASE("cubic coefficient functions at the fixed point") {
  // Fixed-point values F_alpha = phi_alpha(1) of the cubic family, derived
  // from the order-by-order recursion F = -Q(1)/2 by hand:
  //   F10 = F01 = F11 = F21 = -1/2, F20 = -1/8, F02 = -3/8,
  //   F12 = -15/16, F22 = -105/64.
  ConjugacyEvaluator eval(SeriesConfig{Family::Cubic, 4});
  auto phis = eval.phi_all_at(kOne);
  auto at = [&](int i, int j) { return phis[eval.order_position({i, j})]; };

  CHECK(at(1, 0).real() == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(at(0, 1).real() == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(at(1, 1).real() == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(at(2, 1).real() == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(at(2, 0).real() == doctest::Approx(-0.125).epsilon(1e-10));
  CHECK(at(0, 2).real() == doctest::Approx(-0.375).epsilon(1e-10));
  CHECK(at(1, 2).real() == doctest::Approx(-15.0 / 16).epsilon(1e-10));
  CHECK(at(2, 2).real() == doctest::Approx(-105.0 / 64).epsilon(1e-10));
  for (const auto& v : phis) CHECK(std::abs(v.imag()) < 1e-10);

  // Bottom-up recursion path agrees.
  eval.build_table(2);
  for (std::size_t k = 0; k < phis.size(); ++k)
    CHECK(dist(eval.phi_at_one(k), phis[k]) < 1e-10);
}

TEST_CASE("cubic linear coefficient functions at the level-0 node") {
  // phi10(-1) = +1/2 and phi01(-1) = -1/2: the degenerate limit at symbol 2
  // sees the fixed point continuing z = -1, whose first-order motion is
  // (a1 - a0)/2 ... with these two values as the linear responses.
  ConjugacyEvaluator eval(SeriesConfig{Family::Cubic, 4});
  auto phis = eval.phi_all_at(cplx{-1.0, 0.0});
  CHECK(phis[eval.order_position({1, 0})].real() ==
        doctest::Approx(0.5).epsilon(1e-10));
  CHECK(phis[eval.order_position({0, 1})].real() ==
        doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("cylinder tables agree with the generic evaluator at exact angles") {
  ConjugacyEvaluator quad(SeriesConfig{Family::Quadratic, 6});
  quad.build_table(6);
  // Node (level 4, index 5) has angle 11/32.
  auto generic = quad.phi_all_at(RationalAngle{11, 32});
  for (std::size_t k = 0; k < generic.size(); ++k)
    CHECK(dist(quad.table_phi(k, 4, 5), generic[k]) < 1e-9);
  CHECK(dist(quad.table_z(4, 5), juliadyn::circle_point(11.0 / 32)) < 1e-12);

  ConjugacyEvaluator cubic(SeriesConfig{Family::Cubic, 3});
  cubic.build_table(3);
  // Node (level 2, index 4) has angle 9/18 = 1/2.
  auto generic3 = cubic.phi_all_at(RationalAngle{9, 18});
  for (std::size_t k = 0; k < generic3.size(); ++k)
    CHECK(dist(cubic.table_phi(k, 2, 4), generic3[k]) < 1e-9);
}

TEST_CASE("rational-angle evaluation matches floating circle points") {
  ConjugacyEvaluator eval(SeriesConfig{Family::Quadratic, 5});
  RationalAngle angle{3, 7};
  auto exact = eval.phi_all_at(angle);
  auto floating = eval.phi_all_at(juliadyn::circle_point(3.0 / 7));
  REQUIRE(exact.size() == floating.size());
  for (std::size_t k = 0; k < exact.size(); ++k)
    CHECK(dist(exact[k], floating[k]) < 1e-10);
}

TEST_CASE("coefficient functions have real Laurent coefficients") {
  // phi_alpha(conj z) = conj(phi_alpha(z)): real parameters give maps that
  // commute with complex conjugation.
  for (Family family : {Family::Quadratic, Family::Cubic}) {
    ConjugacyEvaluator eval(SeriesConfig{family, 4});
    cplx z = juliadyn::circle_point(0.2137);
    auto plus = eval.phi_all_at(z);
    auto minus = eval.phi_all_at(std::conj(z));
    for (std::size_t k = 0; k < plus.size(); ++k)
      CHECK(dist(minus[k], std::conj(plus[k])) < 1e-12);
  }
}

TEST_CASE("telescoping tail depth is converged at the default") {
  SeriesConfig shallow{Family::Quadratic, 4, 48};
  SeriesConfig deep{Family::Quadratic, 4, 64};
  ConjugacyEvaluator a(shallow), b(deep);
  cplx z = juliadyn::circle_point(0.61);
  auto va = a.phi_all_at(z), vb = b.phi_all_at(z);
  for (std::size_t k = 0; k < va.size(); ++k) CHECK(dist(va[k], vb[k]) < 1e-12);
}

TEST_CASE("functional equation residual is small on random circle points") {
  ConjugacyEvaluator quad(SeriesConfig{Family::Quadratic, 6});
  auto rep = juliadyn::conjugacy_residual(quad, {cplx{0.05, 0.0}}, 100, 42);
  CHECK(rep.n_samples == 100);
  CHECK(rep.sup_residual < 1e-6);

  // Complex parameter of the same modulus behaves alike.
  auto rep_b = juliadyn::conjugacy_residual(quad, {cplx{0.03, 0.04}}, 100, 43);
  CHECK(rep_b.sup_residual < 1e-6);

  ConjugacyEvaluator cubic(SeriesConfig{Family::Cubic, 5});
  auto rep3 = juliadyn::conjugacy_residual(
      cubic, {cplx{0.05, 0.0}, cplx{0.05, 0.0}}, 200, 7);
  CHECK(rep3.sup_residual < 1e-5);
}

TEST_CASE("series value at angle 0 continues the beta fixed point") {
  ConjugacyEvaluator eval(SeriesConfig{Family::Quadratic, 6});

  auto poly05 = juliadyn::MonicCenteredPolynomial::quadratic({0.05, 0.0});
  cplx beta05 = juliadyn::beta_fixed_point(poly05);
  CHECK(dist(eval.evaluate_Phi({cplx{0.05, 0.0}}, kOne), beta05) < 5e-7);

  auto poly10 = juliadyn::MonicCenteredPolynomial::quadratic({0.1, 0.0});
  cplx beta10 = juliadyn::beta_fixed_point(poly10);
  CHECK(beta10.real() == doctest::Approx(0.8872983346207417).epsilon(1e-12));
  CHECK(dist(eval.evaluate_Phi({cplx{0.1, 0.0}}, kOne), beta10) < 5e-5);
}

TEST_CASE("forward normal form near infinity is a conjugacy") {
  auto poly = juliadyn::MonicCenteredPolynomial::quadratic({0.05, 0.0});
  cplx w{3.0, 0.5};
  cplx lhs = juliadyn::boettcher_forward(poly, poly(w));
  cplx rhs = juliadyn::boettcher_forward(poly, w);
  CHECK(dist(lhs, rhs * rhs) < 1e-9);

  auto cubic = juliadyn::MonicCenteredPolynomial::cubic({0.05, 0.0}, {0.05, 0.0});
  cplx lhs3 = juliadyn::boettcher_forward(cubic, cubic(w));
  cplx rhs3 = juliadyn::boettcher_forward(cubic, w);
  CHECK(dist(lhs3, rhs3 * rhs3 * rhs3) < 1e-9);
}

TEST_CASE("cubic order enumeration is total-degree ordered and complete") {
  ConjugacyEvaluator eval(SeriesConfig{Family::Cubic, 4});
  const auto& orders = eval.orders();
  CHECK(orders.size() == 14);  // all (i, j) with 1 <= i+j <= 4
  int last_total = 0;
  for (const auto& alpha : orders) {
    CHECK(alpha.total() >= last_total);
    last_total = alpha.total();
    CHECK(eval.order_position(alpha) < orders.size());
  }
  CHECK_THROWS_AS(eval.order_position({5, 0}), juliadyn::Error);
}
