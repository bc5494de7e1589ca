#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "juliadyn/poly.hpp"

using juliadyn::cplx;

namespace {
double dist(cplx a, cplx b) { return std::abs(a - b); }
}  // namespace

TEST_CASE("normalize kills the subleading term and tracks the conjugacy") {
  // z^2 + 0.2 z + 0.1: centering z -> z - 0.1 gives c = 0.1 + 0.1 - 0.01.
  auto [poly, map] = juliadyn::normalize({{0.1, 0.0}, {0.2, 0.0}, {1.0, 0.0}});
  CHECK(poly.degree == 2);
  CHECK(poly.c().real() == doctest::Approx(0.19).epsilon(1e-12));
  CHECK(poly.c().imag() == doctest::Approx(0.0));

  // Conjugacy identity Q(T(z)) = T(P(z)) at a few points.
  auto q = [&](cplx z) { return cplx{0.1, 0.0} + cplx{0.2, 0.0} * z + z * z; };
  for (cplx z : {cplx{0.3, -0.2}, cplx{1.1, 0.7}, cplx{-0.4, 0.05}}) {
    CHECK(dist(q(map(z)), map(poly(z))) < 1e-12);
  }
}

TEST_CASE("normalize and denormalize are inverse for a scaled cubic") {
  const std::vector<cplx> coeffs = {
      {0.02, -0.01}, {-0.3, 0.1}, {0.05, 0.0}, {2.0, 0.5}};
  auto [poly, map] = juliadyn::normalize(coeffs);
  CHECK(poly.degree == 3);
  auto back = juliadyn::denormalize(poly, map);
  REQUIRE(back.size() == coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    CHECK(dist(back[k], coeffs[k]) < 1e-10);
}

TEST_CASE("normalize rejects a zero leading coefficient") {
  CHECK_THROWS_AS(juliadyn::normalize({{1.0, 0.0}, {0.0, 0.0}}), juliadyn::Error);
  try {
    juliadyn::normalize({{1.0, 0.0}, {2.0, 0.0}, {0.0, 0.0}});
  } catch (const juliadyn::Error& e) {
    CHECK(e.code() == juliadyn::ErrorCode::ZeroLeadingCoefficient);
  }
}

TEST_CASE("critical points of the centered families") {
  auto quad = juliadyn::MonicCenteredPolynomial::quadratic({0.1, 0.05});
  auto qc = juliadyn::critical_points(quad);
  REQUIRE(qc.size() == 1);
  CHECK(std::abs(qc[0]) < 1e-12);

  auto cubic = juliadyn::MonicCenteredPolynomial::cubic({-0.12, 0.0}, {0.03, 0.0});
  auto cc = juliadyn::critical_points(cubic);
  REQUIRE(cc.size() == 2);
  // roots of 3 z^2 + a1: +/- sqrt(0.04) = +/- 0.2
  std::sort(cc.begin(), cc.end(),
            [](cplx a, cplx b) { return a.real() < b.real(); });
  CHECK(dist(cc[0], {-0.2, 0.0}) < 1e-10);
  CHECK(dist(cc[1], {0.2, 0.0}) < 1e-10);
}

TEST_CASE("polynomial_roots solves a factored cubic") {
  // (z-1)(z-2)(z-3) = z^3 - 6 z^2 + 11 z - 6
  auto roots = juliadyn::polynomial_roots(
      {{-6.0, 0.0}, {11.0, 0.0}, {-6.0, 0.0}, {1.0, 0.0}});
  REQUIRE(roots.size() == 3);
  std::sort(roots.begin(), roots.end(),
            [](cplx a, cplx b) { return a.real() < b.real(); });
  CHECK(dist(roots[0], {1.0, 0.0}) < 1e-10);
  CHECK(dist(roots[1], {2.0, 0.0}) < 1e-10);
  CHECK(dist(roots[2], {3.0, 0.0}) < 1e-10);
}

TEST_CASE("preimages land on the fiber for both degrees") {
  auto quad = juliadyn::MonicCenteredPolynomial::quadratic({0.05, -0.02});
  const cplx w{0.7, 0.3};
  auto pre2 = juliadyn::preimages(quad, w);
  REQUIRE(pre2.size() == 2);
  for (cplx z : pre2) CHECK(dist(quad(z), w) < 1e-11);

  auto cubic = juliadyn::MonicCenteredPolynomial::cubic({0.04, 0.01}, {-0.03, 0.02});
  auto pre3 = juliadyn::preimages(cubic, w);
  REQUIRE(pre3.size() == 3);
  for (cplx z : pre3) CHECK(dist(cubic(z), w) < 1e-11);
  // The three preimages are distinct.
  CHECK(dist(pre3[0], pre3[1]) > 1e-6);
  CHECK(dist(pre3[0], pre3[2]) > 1e-6);
  CHECK(dist(pre3[1], pre3[2]) > 1e-6);
}

TEST_CASE("beta fixed point matches the closed form of the quadratic family") {
  // beta(c) = (1 + sqrt(1-4c)) / 2, the fixed point continuing z = 1.
  auto poly = juliadyn::MonicCenteredPolynomial::quadratic({0.1, 0.0});
  cplx beta = juliadyn::beta_fixed_point(poly);
  CHECK(beta.real() == doctest::Approx(0.8872983346207417).epsilon(1e-12));
  CHECK(std::abs(beta.imag()) < 1e-12);
  CHECK(dist(poly(beta), beta) < 1e-12);
}

TEST_CASE("hyperbolicity classification on known members") {
  using juliadyn::HyperbolicityVerdict;
  auto at = [](double re, double im) {
    return juliadyn::MonicCenteredPolynomial::quadratic({re, im});
  };

  auto center = juliadyn::classify_hyperbolic(at(0.0, 0.0));
  CHECK(center.verdict == HyperbolicityVerdict::HyperbolicConnected);
  REQUIRE(center.attracting_period.has_value());
  CHECK(*center.attracting_period == 1);
  CHECK(center.cycle_multiplier < 1e-6);

  auto near_center = juliadyn::classify_hyperbolic(at(0.05, 0.03));
  CHECK(near_center.verdict == HyperbolicityVerdict::HyperbolicConnected);
  CHECK(near_center.attracting_period.value_or(-1) == 1);

  // Superattracting 2-cycle 0 -> -1 -> 0.
  auto basilica = juliadyn::classify_hyperbolic(at(-1.0, 0.0));
  CHECK(basilica.verdict == HyperbolicityVerdict::HyperbolicConnected);
  REQUIRE(basilica.attracting_period.has_value());
  CHECK(*basilica.attracting_period == 2);

  auto escaping = juliadyn::classify_hyperbolic(at(3.0, 0.0));
  CHECK(escaping.verdict == HyperbolicityVerdict::Escaping);

  CHECK(juliadyn::in_family(at(0.05, 0.0)));
  CHECK_FALSE(juliadyn::in_family(at(3.0, 0.0)));
}

TEST_CASE("inverse-iteration cloud lies on the unit circle at the center") {
  auto poly = juliadyn::MonicCenteredPolynomial::quadratic({0.0, 0.0});
  auto cloud = juliadyn::julia_cloud(poly, 500, 11);
  REQUIRE(cloud.points.size() == 500);
  for (const auto& z : cloud.points)
    CHECK(std::abs(std::abs(z) - 1.0) < 1e-9);
}

TEST_CASE("cloud points are near-invariant and deterministic per seed") {
  auto poly = juliadyn::MonicCenteredPolynomial::quadratic({0.08, 0.04});
  auto a = juliadyn::julia_cloud(poly, 400, 3);
  auto b = juliadyn::julia_cloud(poly, 400, 3);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t k = 0; k < a.points.size(); ++k)
    CHECK(dist(a.points[k], b.points[k]) == 0.0);

  auto other = juliadyn::julia_cloud(poly, 400, 4);
  double total = 0.0;
  for (std::size_t k = 0; k < a.points.size(); ++k)
    total += dist(a.points[k], other.points[k]);
  CHECK(total > 1e-6);  // a different seed gives a different cloud

  // Forward invariance: P maps cloud points into a small neighbourhood of
  // the cloud (both sample the Julia set).
  double worst = 0.0;
  for (std::size_t k = 0; k < 50; ++k) {
    cplx image = poly(a.points[k]);
    double best = 1e9;
    for (const auto& z : a.points) best = std::min(best, dist(image, z));
    worst = std::max(worst, best);
  }
  CHECK(worst < 0.05);
}

TEST_CASE("escape radius bounds the Julia set") {
  auto cubic = juliadyn::MonicCenteredPolynomial::cubic({0.3, -0.2}, {0.1, 0.4});
  CHECK(cubic.escape_radius() ==
        doctest::Approx(2.0));  // 1 + |a1| + |a0| < 2 here
  auto wide = juliadyn::MonicCenteredPolynomial::cubic({2.0, 0.0}, {1.5, 0.0});
  CHECK(wide.escape_radius() == doctest::Approx(4.5));
}
