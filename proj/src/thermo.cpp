#include "juliadyn/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace juliadyn {

namespace {

MonicCenteredPolynomial family_polynomial(const ConjugacyEvaluator& eval,
                                          const std::vector<cplx>& params) {
  if (eval.config().family == Family::Quadratic) {
    require(params.size() == 1, ErrorCode::InvalidInput,
            "quadratic family takes one parameter");
    require(std::abs(params[0]) < 1.0, ErrorCode::OutOfFamily, "|c| must be < 1");
    return MonicCenteredPolynomial::quadratic(params[0]);
  }
  require(params.size() == 2, ErrorCode::InvalidInput,
          "cubic family takes parameters {a1, a0}");
  require(std::abs(params[0]) < 1.0 && std::abs(params[1]) < 1.0,
          ErrorCode::OutOfFamily, "|a1| and |a0| must be < 1");
  return MonicCenteredPolynomial::cubic(params[0], params[1]);
}

// P^n(z) and (P^n)'(z) by the chain rule along the orbit.
std::pair<cplx, cplx> iterate_with_derivative(const MonicCenteredPolynomial& poly,
                                              cplx z, int n) {
  cplx deriv{1.0, 0.0};
  for (int k = 0; k < n; ++k) {
    deriv *= poly.derivative_at(z);
    z = poly(z);
  }
  return {z, deriv};
}

std::vector<cplx> convolve(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> out(a.size() + b.size() - 1, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == cplx{0.0, 0.0}) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Ascending coefficients of P^n(z) - z.
std::vector<cplx> iterate_coefficients(const MonicCenteredPolynomial& poly, int n) {
  std::vector<cplx> q{cplx{0.0, 0.0}, cplx{1.0, 0.0}};  // q(z) = z
  for (int rep = 0; rep < n; ++rep) {
    std::vector<cplx> next = convolve(q, q);
    if (poly.degree == 3) next = convolve(next, q);
    if (poly.degree == 2) {
      next[0] += poly.c();
    } else {
      for (std::size_t k = 0; k < q.size(); ++k) next[k] += poly.a1() * q[k];
      next[0] += poly.a0();
    }
    q = std::move(next);
  }
  q[1] -= 1.0;
  return q;
}

void check_distinct(const std::vector<cplx>& pts) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].real() < pts[b].real();
  });
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t k = i + 1; k < idx.size(); ++k) {
      if (pts[idx[k]].real() - pts[idx[i]].real() >= 1e-9) break;
      require(std::abs(pts[idx[k]] - pts[idx[i]]) >= 1e-9,
              ErrorCode::RootCountMismatch,
              "two circle codes collapsed onto one periodic point");
    }
  }
}

}  // namespace

int default_pressure_depth(int degree) { return degree == 2 ? 14 : 9; }

PeriodicOrbitSet periodic_points(const ConjugacyEvaluator& eval,
                                 const std::vector<cplx>& params, int n,
                                 OrbitMethod method) {
  const int d = family_degree(eval.config().family);
  require(n >= 1 && n <= 30, ErrorCode::InvalidInput,
          "period must lie in [1, 30]");
  const MonicCenteredPolynomial poly = family_polynomial(eval, params);

  std::int64_t total = 1;
  for (int k = 0; k < n; ++k) {
    total *= d;
    require(total <= (1 << 22), ErrorCode::BudgetExceeded,
            "too many periodic points at this period");
  }
  const std::int64_t count = total - 1;
  require(method != OrbitMethod::NewtonFromAngles || total <= 400000,
          ErrorCode::BudgetExceeded,
          "period too deep for the seeded Newton solve");
  require(method != OrbitMethod::PolynomialRoots || total <= 4096,
          ErrorCode::BudgetExceeded,
          "period too deep for the simultaneous root solve");

  PeriodicOrbitSet out;
  out.period = n;
  out.alphabet = d;
  out.points.resize(count);

  if (method == OrbitMethod::NewtonFromAngles) {
    // Conjugacy-series seeds for every angle j / count.
    for (std::int64_t j = 0; j < count; ++j) {
      const RationalAngle angle{j, count};
      const std::vector<cplx> phis = eval.phi_all_at(angle);
      out.points[j] = eval.evaluate_Phi_from(phis, params, angle.point());
    }
    // Coded inverse-iteration sweeps: the point of angle theta is a preimage
    // of the point of angle d*theta, and on a hyperbolic Julia set pulling
    // back contracts distances uniformly.  This repairs seeds that series
    // truncation placed outside the (tiny) Newton basins of deep periodic
    // points; the branch is resolved by proximity to the current estimate.
    for (int sweep = 0; sweep < 200; ++sweep) {
      double moved = 0.0;
      for (std::int64_t j = 0; j < count; ++j) {
        const cplx target = out.points[(d * j) % count];
        cplx best = out.points[j];
        double best_dist = 1e300;
        for (const cplx& pre : preimages(poly, target)) {
          const double dist = std::abs(pre - out.points[j]);
          if (dist < best_dist) {
            best_dist = dist;
            best = pre;
          }
        }
        moved = std::max(moved, std::abs(best - out.points[j]));
        out.points[j] = best;
      }
      if (moved < 1e-12) break;
    }
    // Newton polish to full accuracy.
    for (std::int64_t j = 0; j < count; ++j) {
      cplx w = out.points[j];
      bool settled = false;
      for (int it = 0; it < 50; ++it) {
        const auto [pw, dpw] = iterate_with_derivative(poly, w, n);
        const cplx f = pw - w;
        const cplx df = dpw - 1.0;
        require(std::abs(df) > 1e-14, ErrorCode::NewtonDivergence,
                "degenerate periodic-point equation");
        const cplx dz = f / df;
        w -= dz;
        require(std::isfinite(w.real()) && std::isfinite(w.imag()),
                ErrorCode::NewtonDivergence, "periodic-point iteration diverged");
        if (std::abs(dz) < 1e-13 * (1.0 + std::abs(w))) {
          settled = true;
          break;
        }
      }
      const auto [pw, dpw] = iterate_with_derivative(poly, w, n);
      require(settled && std::abs(pw - w) < 1e-9 * (1.0 + std::abs(w)),
              ErrorCode::NewtonDivergence,
              "periodic-point iteration did not converge");
      out.points[j] = w;
    }
  } else {
    const std::vector<cplx> coeffs = iterate_coefficients(poly, n);
    const std::vector<cplx> roots = polynomial_roots(coeffs);
    const JuliaCloud cloud = julia_cloud(poly, 8000, 11);
    std::vector<cplx> kept;
    for (const cplx& r : roots) {
      const auto [pr, dpr] = iterate_with_derivative(poly, r, n);
      (void)pr;
      if (std::abs(dpr) <= 1.0) continue;  // attracting/indifferent: not coded
      double dist = 1e300;
      for (const cplx& q : cloud.points) dist = std::min(dist, std::abs(r - q));
      require(dist < 0.02, ErrorCode::RootCountMismatch,
              "repelling root of the iterate lies off the Julia set cloud");
      kept.push_back(r);
    }
    require(static_cast<std::int64_t>(kept.size()) == count,
            ErrorCode::RootCountMismatch,
            "unexpected number of repelling roots of the iterate");
    // Assign each root its circle code by proximity to the conjugacy image.
    std::vector<bool> used(kept.size(), false);
    for (std::int64_t j = 0; j < count; ++j) {
      const RationalAngle angle{j, count};
      const std::vector<cplx> phis = eval.phi_all_at(angle);
      const cplx seed = eval.evaluate_Phi_from(phis, params, angle.point());
      double best = 1e300;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < kept.size(); ++k) {
        const double dist = std::abs(kept[k] - seed);
        if (dist < best) {
          best = dist;
          best_k = k;
        }
      }
      require(best < 0.2 && !used[best_k], ErrorCode::RootCountMismatch,
              "circle codes and iterate roots do not match one-to-one");
      used[best_k] = true;
      out.points[j] = kept[best_k];
    }
  }

  out.multipliers.resize(count);
  out.itineraries.resize(count);
  std::vector<std::int64_t> dpow(n, 1);
  for (int k = 1; k < n; ++k) dpow[k] = dpow[k - 1] * d;
  double max_shift_gap = 0.0;
  for (std::int64_t j = 0; j < count; ++j) {
    const auto [pj, mult] = iterate_with_derivative(poly, out.points[j], n);
    (void)pj;
    out.multipliers[j] = mult;
    require(std::abs(mult) > 1.0, ErrorCode::OutOfFamily,
            "coded periodic point is not repelling");
    std::vector<int> word(n);
    for (int k = 0; k < n; ++k)
      word[k] = static_cast<int>((j / dpow[n - 1 - k]) % d) + 1;
    out.itineraries[j] = std::move(word);
    const std::int64_t js = (j * d) % count;
    max_shift_gap = std::max(max_shift_gap,
                             std::abs(poly(out.points[j]) - out.points[js]));
  }
  require(max_shift_gap < 1e-7, ErrorCode::VerificationFailed,
          "periodic set is not closed under the shift");
  check_distinct(out.points);
  return out;
}

double pressure_at(const PeriodicOrbitSet& orbits, const PotentialSpec& pot) {
  require(!orbits.points.empty(), ErrorCode::InvalidInput, "empty orbit set");
  std::vector<double> logp;
  if (pot.weights) {
    require(pot.weights->alphabet() == orbits.alphabet,
            ErrorCode::AlphabetMismatch,
            "weight vector size must equal the orbit alphabet");
    logp.reserve(pot.weights->p.size());
    for (double p : pot.weights->p) logp.push_back(std::log(p));
  }
  std::vector<double> terms(orbits.points.size());
  for (std::size_t k = 0; k < orbits.points.size(); ++k) {
    double t = -pot.s * std::log(std::abs(orbits.multipliers[k]));
    if (pot.weights)
      for (int sym : orbits.itineraries[k]) t += logp[sym - 1];
    terms[k] = t;
  }
  const double m = *std::max_element(terms.begin(), terms.end());
  double z = 0.0;
  for (double t : terms) z += std::exp(t - m);
  return (m + std::log(z)) / orbits.period;
}

OrbitCache::OrbitCache(const ConjugacyEvaluator& eval, std::vector<cplx> params)
    : eval_(eval), params_(std::move(params)) {
  family_polynomial(eval_, params_);  // validates now rather than on first use
}

const PeriodicOrbitSet& OrbitCache::get(int n) {
  auto it = sets_.find(n);
  if (it == sets_.end())
    it = sets_.emplace(n, periodic_points(eval_, params_, n)).first;
  return it->second;
}

namespace {

// One Aitken delta-squared step; entries where the second difference
// vanishes (already converged) are passed through.
std::vector<double> aitken_step(const std::vector<double>& x) {
  std::vector<double> out(x.size() - 2);
  for (std::size_t k = 0; k + 2 < x.size(); ++k) {
    const double denom = x[k + 2] - 2.0 * x[k + 1] + x[k];
    const double num = x[k + 2] - x[k + 1];
    if (std::abs(denom) < 1e-15 * (std::abs(x[k + 2]) + 1.0)) {
      out[k] = x[k + 2];
    } else {
      out[k] = x[k + 2] - num * num / denom;
    }
  }
  return out;
}

}  // namespace

PressureLimit pressure_limit(OrbitCache& cache, const PotentialSpec& pot,
                             int n_min, int n_max, double tol) {
  const int d = cache.degree();
  if (n_max <= 0) n_max = default_pressure_depth(d);
  require(n_min >= 2 && n_max <= 20 && n_min + 3 <= n_max,
          ErrorCode::InvalidInput, "need 2 <= n_min, n_min + 3 <= n_max <= 20");

  PressureLimit out;
  out.n_min = n_min;
  out.n_max = n_max;
  for (int n = n_min; n <= n_max; ++n)
    out.finite_scale.push_back(pressure_at(cache.get(n), pot));

  // D_n = (n+1) P_{n+1} - n P_n = log(Z_{n+1}/Z_n) converges geometrically.
  for (int k = 0; k + 1 < static_cast<int>(out.finite_scale.size()); ++k) {
    const double n = n_min + k;
    out.ratio_diffs.push_back((n + 1) * out.finite_scale[k + 1] -
                              n * out.finite_scale[k]);
  }

  std::vector<double> col = out.ratio_diffs;
  for (int depth = 0; depth < 3 && col.size() >= 3; ++depth) col = aitken_step(col);
  out.accelerated = col;
  out.value = col.back();
  out.error_estimate = col.size() >= 2
                           ? std::abs(col.back() - col[col.size() - 2])
                           : std::abs(out.ratio_diffs.back() -
                                      out.ratio_diffs[out.ratio_diffs.size() - 2]);
  out.error_estimate += 1e-14;
  out.converged = out.error_estimate <= tol;
  for (std::size_t k = 0; k + 2 < out.ratio_diffs.size(); ++k) {
    const double g0 = std::abs(out.ratio_diffs[k + 1] - out.ratio_diffs[k]);
    const double g1 = std::abs(out.ratio_diffs[k + 2] - out.ratio_diffs[k + 1]);
    if (g1 > 1.5 * g0 + 1e-13) out.monotone_gaps = false;
  }
  return out;
}

DimensionResult hausdorff_dimension(OrbitCache& cache, double tol, int n_min,
                                    int n_max) {
  const int d = cache.degree();
  if (n_max <= 0) n_max = default_pressure_depth(d);
  require(tol >= 1e-10 && tol <= 0.1, ErrorCode::InvalidInput,
          "dimension tolerance must lie in [1e-10, 0.1]");
  const auto pressure = [&](double s) {
    return pressure_limit(cache, PotentialSpec{s, std::nullopt}, n_min, n_max);
  };
  double lo = 0.0, hi = 2.0;
  require(pressure(lo).value > 0.0 && pressure(hi).value < 0.0,
          ErrorCode::BracketFailure,
          "pressure does not change sign on [0, 2]");
  for (int it = 0; it < 80 && (hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (pressure(mid).value > 0.0 ? lo : hi) = mid;
  }
  DimensionResult out;
  out.dimension = 0.5 * (lo + hi);
  const PressureLimit at_root = pressure(out.dimension);
  out.pressure_at_root = at_root.value;
  out.n_max = n_max;
  // |dP/ds| is the exponent of the conformal measure, >= ~log d here.
  out.error_estimate = 0.5 * (hi - lo) +
                       (std::abs(at_root.value) + at_root.error_estimate) /
                           (0.5 * std::log(double(d)));
  return out;
}

DerivativeCheck pressure_derivative_check(OrbitCache& cache,
                                          const LyapunovEngine& engine,
                                          const BernoulliWeights& weights,
                                          double step, int n_min, int n_max) {
  require(step >= 1e-5 && step <= 0.1, ErrorCode::InvalidInput,
          "derivative step must lie in [1e-5, 0.1]");
  const PressureLimit up = pressure_limit(
      cache, PotentialSpec{step, weights}, n_min, n_max);
  const PressureLimit down = pressure_limit(
      cache, PotentialSpec{-step, weights}, n_min, n_max);
  DerivativeCheck out;
  out.step = step;
  out.fd_derivative = (up.value - down.value) / (2.0 * step);
  out.quadrature_value =
      engine.conjugacy_quadrature(cache.params(), weights).value;
  out.gap = std::abs(out.fd_derivative - out.quadrature_value);
  return out;
}

HessianReport hessian_report(const LyapunovEngine& engine, HessianMode mode,
                             const std::optional<BernoulliWeights>& weights,
                             double step, cplx center) {
  require(engine.family() == Family::Quadratic, ErrorCode::InvalidInput,
          "the parameter Hessian is a quadratic-family diagnostic");
  require(step >= 1e-3 && step <= 5e-2, ErrorCode::InvalidInput,
          "Hessian step must lie in [1e-3, 5e-2]");
  require(mode != HessianMode::Quadrature || weights.has_value(),
          ErrorCode::InvalidInput, "quadrature mode needs a weight vector");

  std::function<double(cplx)> f;
  switch (mode) {
    case HessianMode::Quadrature:
      f = [&](cplx c) {
        return engine.conjugacy_quadrature({c}, *weights).value;
      };
      break;
    case HessianMode::DiracSeries: {
      const ConjugacyEvaluator& eval = engine.tabled_conjugacy();
      std::vector<cplx> phis(eval.orders().size());
      for (std::size_t k = 0; k < phis.size(); ++k) phis[k] = eval.phi_at_one(k);
      f = [&eval, phis](cplx c) {
        return -std::log(2.0) -
               std::log(std::abs(eval.evaluate_Phi_from(phis, {c}, cplx{1.0, 0.0})));
      };
      break;
    }
    case HessianMode::BetaOracle:
      f = [&](cplx c) { return engine.dirac_closed_form({c}, 1).value; };
      break;
  }

  const double h = step;
  const cplx ex{1.0, 0.0}, ey{0.0, 1.0};
  const double f0 = f(center);
  HessianReport out;
  out.mode = mode;
  out.step = step;
  out.dxx = (f(center + h * ex) - 2.0 * f0 + f(center - h * ex)) / (h * h);
  out.dyy = (f(center + h * ey) - 2.0 * f0 + f(center - h * ey)) / (h * h);
  out.dxy = (f(center + h * ex + h * ey) - f(center + h * ex - h * ey) -
             f(center - h * ex + h * ey) + f(center - h * ex - h * ey)) /
            (4.0 * h * h);
  out.det = out.dxx * out.dyy - out.dxy * out.dxy;
  out.harmonic_gap = std::abs(out.dxx + out.dyy);
  return out;
}

Theta2Scan theta2_scan(const LyapunovEngine& engine, cplx c,
                       const std::vector<double>& p1_grid) {
  require(engine.family() == Family::Quadratic, ErrorCode::InvalidInput,
          "the second-order scan is a quadratic-family diagnostic");
  require(!p1_grid.empty(), ErrorCode::InvalidInput, "empty weight grid");
  Theta2Scan out;
  out.c = c;
  for (double p1 : p1_grid) {
    require(p1 > 0.0 && p1 < 1.0, ErrorCode::InvalidInput,
            "weights must be strictly inside (0, 1)");
    const double v = engine.quadratic_second_order_integral(
        c, BernoulliWeights::of({p1, 1.0 - p1}));
    out.rows.emplace_back(p1, v);
  }
  return out;
}

}  // namespace juliadyn
