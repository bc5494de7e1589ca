#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "juliadyn/brackets.hpp"
#include "juliadyn/coding.hpp"
#include "juliadyn/conjugacy.hpp"
#include "juliadyn/series.hpp"

using juliadyn::AtomProduct;
using juliadyn::BracketGroup;
using juliadyn::ComplexParamPolynomial;
using juliadyn::ConjugacyEvaluator;
using juliadyn::cplx;
using juliadyn::Family;
using juliadyn::RealParamPolynomial;
using juliadyn::SeriesConfig;
using juliadyn::TruncatedSeries2;

namespace {

// Sum of all bracket groups at one circle point: the per-variable-capped
// expansion of log|Phi(z)| in the parameters.
double groups_value(Family family, const std::vector<juliadyn::MultiIndex>& orders,
                    const std::vector<cplx>& w_values,
                    const std::vector<cplx>& params) {
  double total = 0.0;
  for (const auto& group : juliadyn::expansion_groups(family))
    total += juliadyn::evaluate_group(group, orders, w_values, params);
  return total;
}

// Reference value through the truncated power series: log|Phi| =
// Re log(1 + sum_alpha w_alpha param^alpha), caps 2 per complex variable.
double series_value(Family family, const ConjugacyEvaluator& eval,
                    const std::vector<cplx>& w_values,
                    const std::vector<cplx>& params) {
  const int cap2 = family == Family::Cubic ? 2 : 0;
  TruncatedSeries2 s = TruncatedSeries2::constant({1.0, 0.0}, 2, cap2);
  const auto& orders = eval.orders();
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k].i > 2 || orders[k].j > cap2) continue;
    s.at(orders[k].i, orders[k].j) += w_values[k];
  }
  TruncatedSeries2 lg = s.log();
  cplx total{0.0, 0.0};
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= cap2; ++j) {
      if (i == 0 && j == 0) continue;
      cplx mono = std::pow(params[0], i);
      if (family == Family::Cubic) mono *= std::pow(params[1], j);
      total += lg.at(i, j) * mono;
    }
  return total.real();
}

std::vector<cplx> w_at(const ConjugacyEvaluator& eval, cplx z) {
  auto phis = eval.phi_all_at(z);
  for (auto& v : phis) v *= std::conj(z);
  return phis;
}

struct PointIntegrator final : juliadyn::AtomIntegrator {
  const ConjugacyEvaluator* eval = nullptr;
  const std::vector<cplx>* w = nullptr;
  double apply(const AtomProduct& product) override {
    double value = 1.0;
    for (const auto& [alpha, part] : product.atoms) {
      cplx v = (*w)[eval->order_position(alpha)];
      value *= part == juliadyn::Part::Re ? v.real() : v.imag();
    }
    return value;
  }
};

}  // namespace

TEST_CASE("real parameter polynomial algebra") {
  auto p = RealParamPolynomial::zero(Family::Quadratic);
  p.add({0, 0, 0, 0}, 1.0);
  p.add({1, 0, 0, 0}, 1.0);  // 1 + x
  auto q = RealParamPolynomial::zero(Family::Quadratic);
  q.add({0, 0, 0, 0}, 1.0);
  q.add({1, 0, 0, 0}, -1.0);  // 1 - x
  auto prod = p * q;
  prod.prune();
  CHECK(prod.coeff_or_zero({0, 0, 0, 0}) == doctest::Approx(1.0));
  CHECK(prod.coeff_or_zero({2, 0, 0, 0}) == doctest::Approx(-1.0));
  CHECK(prod.coeff_or_zero({1, 0, 0, 0}) == doctest::Approx(0.0));
  CHECK(prod.evaluate({0.3, 0.0, 0.0, 0.0}) == doctest::Approx(1.0 - 0.09));
  CHECK(prod.monomial_name({2, 0, 0, 0}) == "c_re*c_re");
}

TEST_CASE("complex parameter monomials split into real components") {
  auto mono = ComplexParamPolynomial::monomial(Family::Cubic, {2, 1});
  const cplx a1{0.03, -0.02}, a0{-0.01, 0.04};
  const std::array<double, 4> x = {a1.real(), a1.imag(), a0.real(), a0.imag()};
  cplx direct = a1 * a1 * a0;
  CHECK(mono.re.evaluate(x) == doctest::Approx(direct.real()).epsilon(1e-14));
  CHECK(mono.im.evaluate(x) == doctest::Approx(direct.imag()).epsilon(1e-14));

  auto lin = ComplexParamPolynomial::monomial(Family::Quadratic, {1, 0});
  CHECK(lin.re.coeff_or_zero({1, 0, 0, 0}) == doctest::Approx(1.0));
  CHECK(lin.im.coeff_or_zero({0, 1, 0, 0}) == doctest::Approx(1.0));
}

TEST_CASE("bracket groups match the truncated log series at random nodes") {
  ConjugacyEvaluator quad(SeriesConfig{Family::Quadratic, 6});
  for (double turns : {0.137, 0.52, 0.81}) {
    cplx z = juliadyn::circle_point(turns);
    auto w = w_at(quad, z);
    const std::vector<cplx> params = {cplx{0.021, -0.017}};
    double via_groups = groups_value(Family::Quadratic, quad.orders(), w, params);
    double via_series = series_value(Family::Quadratic, quad, w, params);
    CHECK(via_groups == doctest::Approx(via_series).epsilon(1e-12));
  }

  ConjugacyEvaluator cubic(SeriesConfig{Family::Cubic, 4});
  for (double turns : {0.23, 0.64}) {
    cplx z = juliadyn::circle_point(turns);
    auto w = w_at(cubic, z);
    const std::vector<cplx> params = {cplx{0.018, 0.011}, cplx{-0.013, 0.009}};
    double via_groups = groups_value(Family::Cubic, cubic.orders(), w, params);
    double via_series = series_value(Family::Cubic, cubic, w, params);
    CHECK(via_groups == doctest::Approx(via_series).epsilon(1e-12));
  }
}

TEST_CASE("group inventory covers per-variable caps") {
  auto quad_groups = juliadyn::expansion_groups(Family::Quadratic);
  CHECK(quad_groups.size() == 2);
  auto cubic_groups = juliadyn::expansion_groups(Family::Cubic);
  CHECK(cubic_groups.size() == 8);
  for (const auto& g : cubic_groups) {
    CHECK(g.order.i <= 2);
    CHECK(g.order.j <= 2);
    CHECK(g.order.total() >= 1);
  }
}

TEST_CASE("symbolic expansion realized at a point matches direct evaluation") {
  for (Family family : {Family::Quadratic, Family::Cubic}) {
    const int order = family == Family::Quadratic ? 6 : 4;
    ConjugacyEvaluator eval(SeriesConfig{family, order});
    cplx z = juliadyn::circle_point(0.377);
    auto w = w_at(eval, z);

    auto groups = juliadyn::expansion_groups(family);
    auto sym = juliadyn::expand_groups_symbolically(family, groups);
    PointIntegrator integrator;
    integrator.eval = &eval;
    integrator.w = &w;
    auto poly = juliadyn::realize_expansion(family, sym, integrator);

    const std::vector<cplx> params =
        family == Family::Quadratic
            ? std::vector<cplx>{cplx{0.014, -0.022}}
            : std::vector<cplx>{cplx{0.016, 0.012}, cplx{-0.011, 0.007}};
    std::array<double, 4> x{};
    x[0] = params[0].real();
    x[1] = params[0].imag();
    if (family == Family::Cubic) {
      x[2] = params[1].real();
      x[3] = params[1].imag();
    }
    double via_poly = poly.evaluate(x);
    double via_groups = groups_value(family, eval.orders(), w, params);
    CHECK(via_poly == doctest::Approx(via_groups).epsilon(1e-12));
  }
}

TEST_CASE("degenerate-limit bracket coefficients at angle 0") {
  // At z = 1 the atoms are the fixed-point values; the realized polynomial is
  // the expansion of log|Phi(1)| whose low-order coefficients are known in
  // closed form.  The exponent is -log(d) minus these values.
  {
    ConjugacyEvaluator eval(SeriesConfig{Family::Quadratic, 6});
    auto w = w_at(eval, {1.0, 0.0});
    auto sym = juliadyn::expand_groups_symbolically(
        Family::Quadratic, juliadyn::expansion_groups(Family::Quadratic));
    PointIntegrator integrator;
    integrator.eval = &eval;
    integrator.w = &w;
    auto poly = juliadyn::realize_expansion(Family::Quadratic, sym, integrator);
    CHECK(poly.coeff_or_zero({1, 0, 0, 0}) == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(poly.coeff_or_zero({2, 0, 0, 0}) == doctest::Approx(-1.5).epsilon(1e-10));
    CHECK(poly.coeff_or_zero({0, 2, 0, 0}) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(std::abs(poly.coeff_or_zero({1, 1, 0, 0})) < 1e-10);
    // Harmonic pair: the x^2 and y^2 coefficients are opposite.
    CHECK(poly.coeff_or_zero({2, 0, 0, 0}) + poly.coeff_or_zero({0, 2, 0, 0}) ==
          doctest::Approx(0.0).epsilon(1e-10));
  }
  {
    ConjugacyEvaluator eval(SeriesConfig{Family::Cubic, 4});
    auto w = w_at(eval, {1.0, 0.0});
    auto sym = juliadyn::expand_groups_symbolically(
        Family::Cubic, juliadyn::expansion_groups(Family::Cubic));
    PointIntegrator integrator;
    integrator.eval = &eval;
    integrator.w = &w;
    auto poly = juliadyn::realize_expansion(Family::Cubic, sym, integrator);
    // log(1 + F10 a1 + F01 a0 + ...): linear terms F10 = F01 = -1/2; the
    // a1 a0 coefficient is F11 - F10 F01 = -3/4.
    CHECK(poly.coeff_or_zero({1, 0, 0, 0}) == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(poly.coeff_or_zero({0, 0, 1, 0}) == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(poly.coeff_or_zero({1, 0, 1, 0}) == doctest::Approx(-0.75).epsilon(1e-10));
    CHECK(poly.coeff_or_zero({0, 1, 0, 1}) == doctest::Approx(0.75).epsilon(1e-10));
  }
}

TEST_CASE("first-order atom integrates to zero under the uniform measure") {
  // The circle mean of phi_1(z)/z vanishes: phi_1/z is a Laurent series in
  // 1/z with no constant term.  This is why equidistributed weights keep the
  // exponent exactly at -log d.
  auto rule = juliadyn::build_quadrature(juliadyn::BernoulliWeights::uniform(2), 12);
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    cplx z = juliadyn::circle_point(rule.nodes[k]);
    acc += rule.weights[k] * std::conj(z) * juliadyn::phi1_quadratic(z);
  }
  CHECK(std::abs(acc) < 1e-10);
}
