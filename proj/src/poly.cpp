#include "juliadyn/poly.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace juliadyn {

cplx MonicCenteredPolynomial::operator()(cplx z) const {
  // Horner over [1, 0, lower...] descending: z^d + sum lower[k] z^k.
  cplx acc = z;  // coefficient of z^{d-1} is zero: acc = z*1 + 0
  for (int k = degree - 2; k >= 0; --k) acc = acc * z + lower[k];
  return acc;
}

cplx MonicCenteredPolynomial::derivative_at(cplx z) const {
  // P'(z) = d z^{d-1} + sum_{k>=1} k a_k z^{k-1}; the two leading Horner
  // steps collapse to d*z because P has no z^{d-1} term.
  cplx acc = static_cast<double>(degree) * z;
  for (int k = degree - 2; k >= 1; --k)
    acc = acc * z + static_cast<double>(k) * lower[k];
  return acc;
}

double MonicCenteredPolynomial::escape_radius() const {
  double s = 1.0;
  for (const cplx& a : lower) s += std::abs(a);
  return std::max(2.0, s);
}

namespace {

// Multiplies poly (ascending coeffs) by (s*z + t).
std::vector<cplx> mul_linear(const std::vector<cplx>& p, cplx s, cplx t) {
  std::vector<cplx> out(p.size() + 1, cplx{0.0, 0.0});
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[k] += p[k] * t;
    out[k + 1] += p[k] * s;
  }
  return out;
}

std::vector<cplx> compose_affine(const std::vector<cplx>& q, cplx s, cplx t) {
  // Coefficients of Q(s*z + t), Horner on the descending coefficients.
  std::vector<cplx> acc{q.back()};
  for (int k = static_cast<int>(q.size()) - 2; k >= 0; --k) {
    acc = mul_linear(acc, s, t);
    acc[0] += q[k];
  }
  return acc;
}

}  // namespace

std::pair<MonicCenteredPolynomial, AffineMap> normalize(
    const std::vector<cplx>& coeffs) {
  require(coeffs.size() >= 3, ErrorCode::InvalidInput,
          "normalize needs degree >= 2");
  const int d = static_cast<int>(coeffs.size()) - 1;
  const cplx bd = coeffs.back();
  require(std::abs(bd) > 0.0, ErrorCode::ZeroLeadingCoefficient,
          "leading coefficient is zero");

  // T(z) = s z + t with s^{d-1} b_d = 1 (principal root) and t chosen to
  // cancel the z^{d-1} coefficient of the conjugated polynomial.
  const cplx s = std::exp(-std::log(bd) / static_cast<double>(d - 1));
  const cplx t = -coeffs[d - 1] / (static_cast<double>(d) * bd);

  std::vector<cplx> comp = compose_affine(coeffs, s, t);  // Q(s z + t)
  comp[0] -= t;
  for (cplx& v : comp) v /= s;  // (Q(s z + t) - t)/s

  require(std::abs(comp[d] - 1.0) < 1e-9, ErrorCode::VerificationFailed,
          "normal form is not monic");
  require(std::abs(comp[d - 1]) < 1e-9, ErrorCode::VerificationFailed,
          "normal form is not centered");

  MonicCenteredPolynomial poly;
  poly.degree = d;
  poly.lower.assign(comp.begin(), comp.begin() + (d - 1));
  const AffineMap map{s, t};

  // Conjugacy check Q(T(z)) = T(P(z)) on a ring of sample points.
  for (int k = 0; k < 16; ++k) {
    const cplx z = 1.3 * circle_point(k / 16.0);
    cplx qt{0.0, 0.0};
    for (int j = d; j >= 0; --j) qt = qt * map(z) + coeffs[j];
    const cplx tp = map(poly(z));
    require(std::abs(qt - tp) < 1e-10 * (1.0 + std::abs(qt)),
            ErrorCode::VerificationFailed, "affine conjugacy check failed");
  }
  return {poly, map};
}

std::vector<cplx> denormalize(const MonicCenteredPolynomial& poly,
                              const AffineMap& map) {
  // T o P o T^{-1}: compose P with T^{-1}(z) = (z - shift)/scale, then apply T.
  std::vector<cplx> p(poly.degree + 1, cplx{0.0, 0.0});
  for (int k = 0; k < poly.degree - 1; ++k) p[k] = poly.lower[k];
  p[poly.degree] = 1.0;
  std::vector<cplx> comp =
      compose_affine(p, 1.0 / map.scale, -map.shift / map.scale);
  for (cplx& v : comp) v *= map.scale;
  comp[0] += map.shift;
  return comp;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs,
                                   int max_iter) {
  require(coeffs.size() >= 2, ErrorCode::InvalidInput, "degree must be >= 1");
  require(std::abs(coeffs.back()) > 0.0, ErrorCode::ZeroLeadingCoefficient,
          "leading coefficient is zero");
  const int n = static_cast<int>(coeffs.size()) - 1;

  // Cauchy-style inclusion radius.
  double r = 0.0;
  for (int k = 0; k < n; ++k)
    r = std::max(r, std::abs(coeffs[k] / coeffs.back()));
  r = 1.0 + r;

  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k)
    z[k] = 0.7 * r * circle_point((k + 0.25) / n + 1e-3 * k);

  const auto eval = [&](cplx x, cplx& val, cplx& der) {
    val = coeffs[n];
    der = {0.0, 0.0};
    for (int k = n - 1; k >= 0; --k) {
      der = der * x + val;
      val = val * x + coeffs[k];
    }
  };

  for (int it = 0; it < max_iter; ++it) {
    double moved = 0.0;
    for (int k = 0; k < n; ++k) {
      cplx val, der;
      eval(z[k], val, der);
      if (std::abs(val) == 0.0) continue;
      cplx sum{0.0, 0.0};
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const cplx nr = val / der;
      const cplx step = nr / (1.0 - nr * sum);
      z[k] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved < 1e-14 * (1.0 + r)) break;
  }
  // Newton polish.
  for (int k = 0; k < n; ++k) {
    for (int it = 0; it < 4; ++it) {
      cplx val, der;
      eval(z[k], val, der);
      if (std::abs(der) == 0.0) break;
      z[k] -= val / der;
    }
  }
  return z;
}

std::vector<cplx> preimages(const MonicCenteredPolynomial& poly, cplx w) {
  if (poly.degree == 2) {
    const cplx r = std::sqrt(w - poly.c());
    return {r, -r};
  }
  if (poly.degree == 3) {
    // z^3 + a1 z + (a0 - w) = 0, depressed cubic via Cardano.
    const cplx p = poly.a1();
    const cplx q = poly.a0() - w;
    const cplx disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    cplx u3 = -q / 2.0 + disc;
    if (std::abs(u3) < std::abs(-q / 2.0 - disc)) u3 = -q / 2.0 - disc;
    std::vector<cplx> roots;
    if (std::abs(u3) < 1e-300) {
      // p ~ 0 and q ~ 0: triple root at 0 perturbed by cube roots of -q.
      const cplx r = std::pow(-q, 1.0 / 3.0);
      for (int k = 0; k < 3; ++k)
        roots.push_back(r * circle_point(k / 3.0));
    } else {
      const cplx u = std::pow(u3, 1.0 / 3.0);
      for (int k = 0; k < 3; ++k) {
        const cplx uk = u * circle_point(k / 3.0);
        roots.push_back(uk - p / (3.0 * uk));
      }
    }
    // Newton polish against the exact equation.
    for (cplx& z : roots) {
      for (int it = 0; it < 3; ++it) {
        const cplx f = poly(z) - w;
        const cplx df = poly.derivative_at(z);
        if (std::abs(df) == 0.0) break;
        z -= f / df;
      }
    }
    return roots;
  }
  std::vector<cplx> coeffs(poly.degree + 1, cplx{0.0, 0.0});
  for (int k = 0; k < poly.degree - 1; ++k) coeffs[k] = poly.lower[k];
  coeffs[0] -= w;
  coeffs[poly.degree] = 1.0;
  return polynomial_roots(coeffs);
}

cplx beta_fixed_point(const MonicCenteredPolynomial& poly) {
  cplx z{1.0, 0.0};
  for (int it = 0; it < 100; ++it) {
    const cplx f = poly(z) - z;
    const cplx df = poly.derivative_at(z) - 1.0;
    require(std::abs(df) > 0.0, ErrorCode::NewtonDivergence,
            "singular Newton step for the fixed point at z=1");
    const cplx step = f / df;
    z -= step;
    if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  require(std::abs(poly(z) - z) < 1e-10, ErrorCode::NewtonDivergence,
          "fixed-point Newton did not converge from z=1");
  return z;
}

HyperbolicityCertificate classify_hyperbolic(const MonicCenteredPolynomial& poly,
                                             long max_iter) {
  const double radius = poly.escape_radius();
  constexpr long kTransient = 1000;
  constexpr double kCycleTol = 1e-9;

  HyperbolicityCertificate cert;
  long used = 0;

  for (const cplx& crit : critical_points(poly)) {
    cplx z = crit;
    long it = 0;
    // Transient phase: escape test only.
    for (; it < std::min(kTransient, max_iter); ++it) {
      if (std::abs(z) > radius) {
        cert.verdict = HyperbolicityVerdict::Escaping;
        cert.iterations_used = std::max(cert.iterations_used, used + it + 1);
        return cert;
      }
      z = poly(z);
    }
    // Brent cycle search: compare against a fixed tortoise, doubling the
    // window.  The scan order is deterministic, so verdicts only strengthen
    // as max_iter grows.
    cplx tortoise = z;
    cplx hare = z;
    long power = 1, lam = 0;
    bool found = false;
    while (it < max_iter) {
      hare = poly(hare);
      ++it;
      ++lam;
      if (std::abs(hare) > radius) {
        cert.verdict = HyperbolicityVerdict::Escaping;
        cert.iterations_used = std::max(cert.iterations_used, used + it);
        return cert;
      }
      if (std::abs(hare - tortoise) < kCycleTol) {
        found = true;
        break;
      }
      if (lam == power) {
        tortoise = hare;
        power *= 2;
        lam = 0;
      }
    }
    used += it;
    if (!found) {
      cert.verdict = HyperbolicityVerdict::Undecided;
      cert.iterations_used = used;
      return cert;
    }
    // Multiplier of the candidate cycle (period lam, points from hare).
    cplx mult{1.0, 0.0};
    cplx w = hare;
    for (long k = 0; k < lam; ++k) {
      mult *= poly.derivative_at(w);
      w = poly(w);
    }
    if (std::abs(mult) >= 1.0) {
      cert.verdict = HyperbolicityVerdict::Undecided;
      cert.iterations_used = used;
      return cert;
    }
    // Reduce to the minimal period within the detected cycle.
    int period = static_cast<int>(lam);
    for (int m = 1; m <= static_cast<int>(lam); ++m) {
      if (lam % m != 0) continue;
      cplx v = hare;
      for (int k = 0; k < m; ++k) v = poly(v);
      if (std::abs(v - hare) < kCycleTol) {
        period = m;
        break;
      }
    }
    if (!cert.attracting_period || period < *cert.attracting_period) {
      cert.attracting_period = period;
      cplx pmult{1.0, 0.0};
      cplx v = hare;
      for (int k = 0; k < period; ++k) {
        pmult *= poly.derivative_at(v);
        v = poly(v);
      }
      cert.cycle_multiplier = std::abs(pmult);
    }
  }
  cert.verdict = HyperbolicityVerdict::HyperbolicConnected;
  cert.iterations_used = used;
  return cert;
}

std::vector<cplx> critical_points(const MonicCenteredPolynomial& poly) {
  if (poly.degree == 2) return {cplx{0.0, 0.0}};
  if (poly.degree == 3) {
    const cplx r = std::sqrt(-poly.a1() / 3.0);
    return {r, -r};
  }
  std::vector<cplx> dcoeffs(poly.degree, cplx{0.0, 0.0});
  for (int k = 1; k < poly.degree - 1; ++k)
    dcoeffs[k - 1] = static_cast<double>(k) * poly.lower[k];
  dcoeffs[poly.degree - 1] = static_cast<double>(poly.degree);
  return polynomial_roots(dcoeffs);
}

bool in_family(const MonicCenteredPolynomial& poly, long max_iter) {
  for (const cplx& a : poly.lower)
    if (std::abs(a) >= 1.0) return false;
  return classify_hyperbolic(poly, max_iter).verdict ==
         HyperbolicityVerdict::HyperbolicConnected;
}

JuliaCloud julia_cloud(const MonicCenteredPolynomial& poly, int n_points,
                       std::uint64_t seed) {
  require(n_points > 0, ErrorCode::InvalidInput, "n_points must be positive");
  std::mt19937_64 rng(seed);
  JuliaCloud cloud;
  cloud.seed = seed;
  cloud.points.reserve(n_points);
  cplx z = beta_fixed_point(poly);
  constexpr int kDiscard = 100;
  for (int k = 0; k < kDiscard + n_points; ++k) {
    const std::vector<cplx> pre = preimages(poly, z);
    const std::size_t pick = rng() % pre.size();
    z = pre[pick];
    require(std::isfinite(z.real()) && std::isfinite(z.imag()),
            ErrorCode::BranchFailure, "inverse iteration produced non-finite point");
    if (k >= kDiscard) cloud.points.push_back(z);
  }
  return cloud;
}

}  // namespace juliadyn
