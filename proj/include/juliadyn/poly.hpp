#pragma once
// Monic centered polynomial dynamics: evaluation, normalization of general
// polynomials to the monic centered form, hyperbolicity classification via
// critical orbits, Julia-set point clouds by inverse iteration, and root
// finding utilities (preimages, simultaneous root solving).

#include <optional>
#include <utility>
#include <vector>

#include "juliadyn/common.hpp"

namespace juliadyn {

// P(z) = z^d + a_{d-2} z^{d-2} + ... + a_1 z + a_0 (no z^{d-1} term).
// `lower[k]` is the coefficient of z^k, k = 0..d-2.
struct MonicCenteredPolynomial {
  int degree = 2;
  std::vector<cplx> lower;

  static MonicCenteredPolynomial quadratic(cplx c) { return {2, {c}}; }
  static MonicCenteredPolynomial cubic(cplx a1, cplx a0) { return {3, {a0, a1}}; }

  cplx operator()(cplx z) const;
  cplx derivative_at(cplx z) const;

  // max(2, 1 + sum |a_k|): outside this radius orbits provably escape.
  double escape_radius() const;

  bool is_quadratic() const { return degree == 2; }
  cplx c() const { return lower[0]; }                  // degree 2
  cplx a1() const { return lower[1]; }                 // degree 3
  cplx a0() const { return lower[0]; }                 // degree 3
};

// Affine change of variable T(z) = scale*z + shift.
struct AffineMap {
  cplx scale{1.0, 0.0};
  cplx shift{0.0, 0.0};
  cplx operator()(cplx z) const { return scale * z + shift; }
  cplx inverse(cplx w) const { return (w - shift) / scale; }
};

// Conjugates a general polynomial (coeffs[k] = coefficient of z^k, leading
// coefficient nonzero) to its monic centered normal form P = T^{-1} o Q o T.
// The returned map satisfies Q(T(z)) = T(P(z)); this identity is verified by
// sampling before returning.
std::pair<MonicCenteredPolynomial, AffineMap> normalize(
    const std::vector<cplx>& coeffs);

// Coefficients (ascending) of T o P o T^{-1}; inverse of `normalize`.
std::vector<cplx> denormalize(const MonicCenteredPolynomial& poly,
                              const AffineMap& map);

// All roots of P' with multiplicity (size degree-1).
std::vector<cplx> critical_points(const MonicCenteredPolynomial& poly);

// All complex roots of sum coeffs[k] z^k (ascending, leading nonzero),
// by Aberth-Ehrlich simultaneous iteration with a Newton polish.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs,
                                   int max_iter = 200);

// The d preimages of w: roots of P(z) = w.  Closed form for degrees 2 and 3
// (with a Newton polish), general root solver otherwise.
std::vector<cplx> preimages(const MonicCenteredPolynomial& poly, cplx w);

// Repelling fixed point reached by Newton iteration seeded at z = 1.
cplx beta_fixed_point(const MonicCenteredPolynomial& poly);

enum class HyperbolicityVerdict { HyperbolicConnected, Escaping, Undecided };

struct HyperbolicityCertificate {
  HyperbolicityVerdict verdict = HyperbolicityVerdict::Undecided;
  std::optional<int> attracting_period;   // set when HyperbolicConnected
  double cycle_multiplier = 0.0;          // |(P^period)'| on the found cycle
  long iterations_used = 0;
};

// Tracks every critical orbit: escape beyond the escape radius yields
// Escaping; a recurrence within 1e-9 after a 1000-step transient, confirmed
// by a contracting cycle multiplier, yields HyperbolicConnected.  The verdict
// is monotone in max_iter (a larger budget never weakens it).
HyperbolicityCertificate classify_hyperbolic(const MonicCenteredPolynomial& poly,
                                             long max_iter = 100000);

// Parameter moduli < 1 and certified HyperbolicConnected.
bool in_family(const MonicCenteredPolynomial& poly, long max_iter = 100000);

struct JuliaCloud {
  std::vector<cplx> points;
  std::uint64_t seed = 0;
};

// Inverse iteration from the beta fixed point with uniformly random branch
// choices; the first 100 points are discarded.  Deterministic given the seed.
JuliaCloud julia_cloud(const MonicCenteredPolynomial& poly, int n_points,
                       std::uint64_t seed);

}  // namespace juliadyn
