#pragma once
// Thermodynamic formalism over periodic orbits: topological pressure of
// potentials -s log|P'| (+ an optional locally constant part from Bernoulli
// weights), pressure limits with ratio + Aitken acceleration, Hausdorff
// dimension of the Julia set by the root of the pressure function, and
// finite-difference diagnostics (pressure derivative against the Lyapunov
// quadrature, Hessian of the exponent in the parameter).

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "juliadyn/coding.hpp"
#include "juliadyn/common.hpp"
#include "juliadyn/conjugacy.hpp"
#include "juliadyn/lyapunov.hpp"
#include "juliadyn/poly.hpp"

namespace juliadyn {

// The d^n - 1 fixed points of P^n coded by the circle fixed points of
// z -> z^(d^n), with multipliers and symbolic itineraries.  Point j continues
// the circle point at angle j / (d^n - 1); its itinerary is the n-digit
// base-d expansion of j (most significant digit first, symbols 1..d), and the
// set is closed under the shift: P(point[j]) = point[j*d mod (d^n - 1)].
struct PeriodicOrbitSet {
  int period = 1;
  int alphabet = 2;  // = degree of the polynomial
  std::vector<cplx> points;
  std::vector<cplx> multipliers;            // (P^n)'
  std::vector<std::vector<int>> itineraries;
};

enum class OrbitMethod {
  NewtonFromAngles,  // Newton on P^n(z) = z seeded through the conjugacy
  PolynomialRoots,   // simultaneous root solve of P^n(z) - z, then filtering
};

PeriodicOrbitSet periodic_points(const ConjugacyEvaluator& eval,
                                 const std::vector<cplx>& params, int n,
                                 OrbitMethod method = OrbitMethod::NewtonFromAngles);

// Potential g + (-s) log|P'| with g the locally constant function
// log p_{symbol} when weights are given (absent: pure geometric potential).
struct PotentialSpec {
  double s = 0.0;
  std::optional<BernoulliWeights> weights;
};

// Finite-scale pressure (1/n) log sum_orbits exp(S_n potential).
double pressure_at(const PeriodicOrbitSet& orbits, const PotentialSpec& pot);

// Periodic orbit sets for one parameter point, built on demand and reused
// across pressure evaluations (they do not depend on the potential).
class OrbitCache {
 public:
  OrbitCache(const ConjugacyEvaluator& eval, std::vector<cplx> params);
  const PeriodicOrbitSet& get(int n);
  const std::vector<cplx>& params() const { return params_; }
  int degree() const { return family_degree(eval_.config().family); }

 private:
  const ConjugacyEvaluator& eval_;
  std::vector<cplx> params_;
  std::map<int, PeriodicOrbitSet> sets_;
};

int default_pressure_depth(int degree);  // 14 for d=2, 9 for d=3

struct PressureLimit {
  double value = 0.0;
  double error_estimate = 0.0;  // gap between the last two accelerated terms
  bool converged = false;
  bool monotone_gaps = true;    // successive ratio differences kept shrinking
  int n_min = 0;
  int n_max = 0;
  std::vector<double> finite_scale;  // P_n, n = n_min..n_max
  std::vector<double> ratio_diffs;   // D_n = (n+1) P_{n+1} - n P_n
  std::vector<double> accelerated;   // deepest Aitken column
};

// Extrapolated pressure: the ratio differences D_n converge geometrically to
// the limit, and iterated Aitken steps remove the leading geometric error.
PressureLimit pressure_limit(OrbitCache& cache, const PotentialSpec& pot,
                             int n_min = 4, int n_max = 0, double tol = 1e-9);

struct DimensionResult {
  double dimension = 0.0;
  double pressure_at_root = 0.0;  // residual pressure at the returned s
  double error_estimate = 0.0;
  int n_max = 0;
};

// Root of s -> P(-s log|P'|) in [0, 2] by bisection (Bowen's equation).
DimensionResult hausdorff_dimension(OrbitCache& cache, double tol = 1e-6,
                                    int n_min = 4, int n_max = 0);

struct DerivativeCheck {
  double fd_derivative = 0.0;    // d/dt P(g + t (-log|P'|)) at t = 0
  double quadrature_value = 0.0; // Lyapunov quadrature for the same measure
  double gap = 0.0;
  double step = 0.0;
};

// The pressure derivative in the direction of the geometric potential must
// equal the (negative) exponent of the Bernoulli equilibrium state.
DerivativeCheck pressure_derivative_check(OrbitCache& cache,
                                          const LyapunovEngine& engine,
                                          const BernoulliWeights& weights,
                                          double step = 1e-3, int n_min = 4,
                                          int n_max = 0);

enum class HessianMode {
  Quadrature,    // full quadrature value at the given weights
  DiracSeries,   // degenerate-limit value through the conjugacy series
  BetaOracle,    // degenerate-limit value through the fixed point directly
};

struct HessianReport {
  HessianMode mode = HessianMode::Quadrature;
  double dxx = 0.0;
  double dyy = 0.0;
  double dxy = 0.0;
  double det = 0.0;
  double harmonic_gap = 0.0;  // |dxx + dyy| (the exponent is harmonic in c)
  double step = 0.0;
};

// Central second differences of c -> exponent around c = center (quadratic
// family).  Step must lie in [1e-3, 5e-2].
HessianReport hessian_report(const LyapunovEngine& engine, HessianMode mode,
                             const std::optional<BernoulliWeights>& weights,
                             double step = 1e-2, cplx center = cplx{0.0, 0.0});

// Measure dependence of the order-2 expansion coefficient group: rows
// (p1, integral of the second-order bracket under weights {p1, 1-p1}).
// The integral vanishes at p1 = 1/2, and the curve is symmetric under
// p1 <-> 1-p1: complementing every digit conjugates the circle point, and
// the bracket is invariant under conjugation.  The zero at 1/2 is therefore
// quadratic, not a sign change.
struct Theta2Scan {
  cplx c;
  std::vector<std::pair<double, double>> rows;
};

Theta2Scan theta2_scan(const LyapunovEngine& engine, cplx c,
                       const std::vector<double>& p1_grid);

}  // namespace juliadyn
