#pragma once
// Power-series conjugacy between z -> z^d on the unit circle and the monic
// centered polynomial on its Julia set.  The series
//     Phi(z) = z + sum_alpha phi_alpha(z) * param^alpha
// solves Phi(z^d) = P(Phi(z)) order by order; each coefficient function
// phi_alpha satisfies the linear functional equation
//     phi_alpha(z^d) = d z^{d-1} phi_alpha(z) + Q_alpha(z)
// whose bounded solution on the circle is the telescoping series
//     phi_alpha(z) = - sum_{n>=0} Q_alpha(z^{d^n}) / (d^{n+1} z^{d^{n+1}-1}).
//
// Two evaluation paths are provided: a generic per-point evaluator (backward
// recurrence along the forward orbit of z with a zero tail seed, error
// O(d^-tail_depth)), and parameter-independent tables of phi_alpha on all
// cylinder-midpoint nodes up to a chosen level, filled bottom-up from the
// fixed-point values (exact, no tail truncation).

#include <optional>
#include <vector>

#include "juliadyn/coding.hpp"
#include "juliadyn/common.hpp"
#include "juliadyn/poly.hpp"

namespace juliadyn {

enum class Family { Quadratic, Cubic };

inline int family_degree(Family f) { return f == Family::Quadratic ? 2 : 3; }

// Exponent of the parameter monomial: quadratic uses c^i (j = 0), cubic uses
// a1^i a0^j.
struct MultiIndex {
  int i = 0;
  int j = 0;
  int total() const { return i + j; }
  bool operator==(const MultiIndex&) const = default;
};

struct SeriesConfig {
  Family family = Family::Quadratic;
  int order_total = 0;  // 0: default (6 for quadratic, 4 for cubic)
  int tail_depth = 48;  // telescoping terms kept in the generic evaluator

  int resolved_order() const {
    if (order_total > 0) return order_total;
    return family == Family::Quadratic ? 6 : 4;
  }
};

// Closed-form first and second order coefficient functions of the quadratic
// family (lacunary series truncated after M terms):
//   phi1(z) = -z sum_{i>=1} 2^-i z^{-2^i}
//   phi2(z) = -z sum_{i3>=1} 2^-i3 sum_{i2>=1} sum_{i1=1..i2}
//               2^-(i2+1) z^{-(2^{i3-1+i1} + 2^{i3+i2-i1})}
cplx phi1_quadratic(cplx z, int terms = 60);
cplx phi2_quadratic(cplx z, int terms = 60);

class ConjugacyEvaluator {
 public:
  explicit ConjugacyEvaluator(SeriesConfig config);

  const SeriesConfig& config() const { return config_; }
  int degree() const { return family_degree(config_.family); }
  const std::vector<MultiIndex>& orders() const { return orders_; }
  std::size_t order_position(MultiIndex alpha) const;  // throws if absent

  // phi_alpha(z) for every order, generic circle point.
  std::vector<cplx> phi_all_at(cplx z) const;
  // Same along an exact rational angle (the orbit angles stay exact).
  std::vector<cplx> phi_all_at(const RationalAngle& angle) const;

  cplx phi_at(MultiIndex alpha, cplx z) const;

  // Phi(z) = z + sum phi_alpha(z) param^alpha.  params: {c} or {a1, a0}.
  cplx evaluate_Phi(const std::vector<cplx>& params, cplx z) const;
  cplx evaluate_Phi_from(const std::vector<cplx>& phis,
                         const std::vector<cplx>& params, cplx z) const;

  // --- cylinder-midpoint tables -------------------------------------------
  // Values of every phi_alpha at the midpoint node (level, index) for all
  // levels <= max_level, plus the angle-0 fixed point.  Parameter independent.
  void build_table(int max_level);
  bool has_table(int max_level) const {
    return table_levels_ >= std::max(max_level, 0);
  }
  int table_levels() const { return table_levels_; }

  // order_idx positions follow orders().
  cplx table_phi(std::size_t order_idx, int level, std::int64_t index) const {
    return table_[order_idx][level_offset_[level] + index];
  }
  cplx table_z(int level, std::int64_t index) const {
    return node_z_[level_offset_[level] + index];
  }
  // phi_alpha at angle 0 (z = 1), from the fixed-point formula.
  cplx phi_at_one(std::size_t order_idx) const { return phi_one_[order_idx]; }

  // Q_alpha(z) given the values of the lower-order phis at the same point
  // (positions follow orders()).  Exposed for residual diagnostics and tests.
  cplx assemble_Q(std::size_t order_idx, cplx z,
                  const std::vector<cplx>& phis_at_z) const;

 private:
  void build_orders();
  void ensure_params(const std::vector<cplx>& params) const;

  SeriesConfig config_;
  std::vector<MultiIndex> orders_;
  // Precomputed decompositions per order: ordered pairs and (cubic) ordered
  // triples of lower orders summing to alpha, plus direct-term markers.
  std::vector<std::vector<std::pair<int, int>>> pair_decomp_;
  std::vector<std::vector<std::array<int, 3>>> triple_decomp_;
  std::vector<int> shift_source_;  // cubic: position of (i-1, j), else -1

  int table_levels_ = -1;
  std::vector<std::int64_t> level_offset_;  // node storage offset per level
  std::vector<cplx> node_z_;
  std::vector<std::vector<cplx>> table_;  // [order][node]
  std::vector<cplx> phi_one_;
};

// Spec-level convenience wrapper: one coefficient function at one point via
// the telescoping series with M terms.
cplx solve_phi_generic(Family family, MultiIndex alpha, cplx z, int M);

struct ResidualReport {
  double sup_residual = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

// sup over random circle points of |Phi(z^d) - P(Phi(z))|.
ResidualReport conjugacy_residual(const ConjugacyEvaluator& eval,
                                  const std::vector<cplx>& params,
                                  int n_samples, std::uint64_t seed);

// Forward normal form near infinity: the limit (P^n(w))^{d^-n}, computed as
// w * prod_n (P^{n+1}(w) / P^n(w)^d)^{d^-(n+1)} with principal branches.
// Requires |w| > escape_radius; throws BranchAmbiguity if a factor strays
// too far from 1 for the principal branch to be trustworthy.
cplx boettcher_forward(const MonicCenteredPolynomial& poly, cplx w,
                       int n_iters = 60);

}  // namespace juliadyn
