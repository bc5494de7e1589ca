#pragma once
// Lyapunov exponents of monic centered polynomials on their Julia sets under
// pushed Bernoulli measures, through four independent routes:
//   * quadrature of the conjugacy series (exact integrand, or the first-order
//     derivative model that drops the chain-rule correction term),
//   * the truncated order-by-order expansion in the parameters,
//   * Birkhoff averages along measure-distributed backward orbits,
//   * closed-form evaluation at the fixed point for degenerate (Dirac) limits,
// plus extraction of expansion coefficients by two independent strategies.
//
// Sign convention: `value` is -integral log|P'| d(mu), which is negative for
// the families treated here; `positive_exponent` = -value.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "juliadyn/brackets.hpp"
#include "juliadyn/coding.hpp"
#include "juliadyn/common.hpp"
#include "juliadyn/conjugacy.hpp"
#include "juliadyn/poly.hpp"

namespace juliadyn {

enum class LyapMethod {
  ConjugacyQuadrature,
  TruncatedExpansion,
  BirkhoffMC,
  DiracClosedForm,
};

const char* lyap_method_name(LyapMethod m);

// Exact: the full pullback integrand log|P'(Phi)|.
// FirstOrder: log(d) + log|Phi| (exact for degree 2; for degree 3 it drops
// the bounded correction log|1 + a1/(3 Phi^2)| and therefore differs from the
// exact value at first order in a1 -- both are computed and compared).
enum class ExpansionMode { FirstOrder, Exact };

const char* expansion_mode_name(ExpansionMode m);

struct LyapunovEstimate {
  double value = 0.0;
  LyapMethod method = LyapMethod::ConjugacyQuadrature;
  double error_estimate = 0.0;
  double positive_exponent = 0.0;
  int quadrature_level = 0;  // when applicable
};

struct McOptions {
  int n_chains = 64;
  int orbit_length = 20000;
  int burn_in = 1000;
  std::uint64_t seed = 1;
};

// Either a fixed Bernoulli weight vector or the degenerate limit p_symbol->1.
struct MeasureSpec {
  enum class Kind { Fixed, DiracLimit };
  Kind kind = Kind::Fixed;
  BernoulliWeights weights;  // Fixed
  int dirac_symbol = 1;      // DiracLimit
  int alphabet = 2;

  static MeasureSpec fixed(BernoulliWeights w);
  static MeasureSpec dirac(int alphabet, int symbol);
};

struct CoefficientRow {
  std::string monomial;
  RealParamPolynomial::Expo expo{};
  double pointwise = 0.0;      // strategy (a): symbolic/pointwise algebra
  double fit = 0.0;            // strategy (b): least-squares over a grid
  std::optional<double> reference;  // printed target when one exists
  double strategy_gap_rel = 0.0;
  std::optional<double> reference_gap_rel;
  std::string status;  // "pass", "fail" or "flagged"
};

struct ExpansionReport {
  Family family = Family::Quadratic;
  ExpansionMode mode = ExpansionMode::FirstOrder;
  MeasureSpec measure;
  double fit_radius = 0.0;
  RealParamPolynomial pointwise_poly;  // includes the constant term
  RealParamPolynomial fit_poly;
  std::optional<RealParamPolynomial> reference_poly;
  std::vector<CoefficientRow> rows;
  double fit_condition = 0.0;
  double fit_rms_residual = 0.0;
  double max_extraneous_coeff = 0.0;  // largest fitted coeff outside the basis
  bool strategies_agree = false;      // all rows within the 1% consistency gate
  bool all_reference_pass = false;
};

struct CubicExpansionTerms {
  std::map<std::string, double> group_integrals;  // label -> integral value
  double total = 0.0;                             // -log 3 - sum of integrals
  double error_estimate = 0.0;
};

struct ModeGapRow {
  std::string monomial;
  double first_order_coeff = 0.0;
  double exact_coeff = 0.0;
  double gap = 0.0;
};

struct ModeGapReport {
  std::vector<ModeGapRow> rows;
  double max_abs_gap = 0.0;
};

class LyapunovEngine {
 public:
  explicit LyapunovEngine(Family family, SeriesConfig config = {},
                          int table_level = 0);

  Family family() const { return config_.family; }
  int degree() const { return family_degree(config_.family); }
  const ConjugacyEvaluator& conjugacy() const { return eval_; }
  // As above, but with the cylinder tables guaranteed to be filled.
  const ConjugacyEvaluator& tabled_conjugacy() const {
    ensure_table();
    return eval_;
  }
  int table_level() const { return table_level_; }

  MonicCenteredPolynomial polynomial(const std::vector<cplx>& params) const;

  // Quadrature of the conjugacy series against the pushed measure.
  LyapunovEstimate conjugacy_quadrature(const std::vector<cplx>& params,
                                        const BernoulliWeights& weights,
                                        ExpansionMode mode = ExpansionMode::Exact,
                                        IntegrateOptions opts = {}) const;

  // Order-2 (quadratic) truncated expansion value.
  LyapunovEstimate expansion_value_quadratic(cplx c, const BernoulliWeights& weights,
                                             IntegrateOptions opts = {}) const;

  // Per-group integrals of the cubic expansion brackets.
  CubicExpansionTerms expansion_terms_cubic(cplx a1, cplx a0,
                                            const BernoulliWeights& weights,
                                            IntegrateOptions opts = {}) const;

  // Birkhoff average along a backward orbit distributed by the measure.
  LyapunovEstimate birkhoff_mc(const std::vector<cplx>& params,
                               const BernoulliWeights& weights,
                               const McOptions& mc = {}) const;

  // Degenerate limit: -log|P'| at the fixed point that continues the circle
  // fixed point of the symbol's constant word.
  LyapunovEstimate dirac_closed_form(const std::vector<cplx>& params,
                                     int symbol) const;

  // Expansion coefficients by strategy (a) (pointwise/symbolic) and strategy
  // (b) (least-squares over a parameter grid of radius fit_radius).
  ExpansionReport extract_coefficients(const MeasureSpec& measure,
                                       ExpansionMode mode,
                                       double fit_radius = 0.02) const;

  // First-order-model vs exact coefficient gap (strategy (a), same measure).
  ModeGapReport mode_gap_report(const MeasureSpec& measure) const;

  // Integral of the second-order bracket group for the quadratic family
  // (the order-c^2 part of the expansion of the exponent).
  double quadratic_second_order_integral(cplx c, const BernoulliWeights& weights,
                                         IntegrateOptions opts = {}) const;

  // Printed expansion target for the measure, when one exists: the fixed-
  // point polynomial for the Dirac limit at angle 0, the zero polynomial for
  // equidistributed weights.
  std::optional<RealParamPolynomial> reference_polynomial(
      const MeasureSpec& measure, ExpansionMode mode) const;

 private:
  LyapunovEstimate quadrature_estimate(const std::vector<cplx>& params,
                                       const BernoulliWeights& weights,
                                       ExpansionMode mode,
                                       IntegrateOptions opts) const;
  RealParamPolynomial pointwise_polynomial(const MeasureSpec& measure,
                                           ExpansionMode mode) const;
  struct FitGrid {
    std::vector<std::array<double, 4>> points;  // scaled coordinates
    std::vector<double> values;                 // exponent at rho * point
  };
  FitGrid fit_grid(const MeasureSpec& measure, ExpansionMode mode,
                   double rho) const;
  RealParamPolynomial fit_solve(const FitGrid& grid, double rho,
                                const std::vector<RealParamPolynomial::Expo>& basis,
                                double* condition, double* rms) const;
  double truncation_bound(const std::vector<cplx>& params) const;
  void ensure_table() const;  // tables are filled on first use

  SeriesConfig config_;
  // Lazily tabled: quadrature-backed operations fill the cylinder tables on
  // first use; orbit-based and closed-form operations never pay for them.
  mutable ConjugacyEvaluator eval_;
  int table_level_ = 0;
  std::vector<BracketGroup> groups_;
  SymbolicExpansion symbolic_;
};

// Basis exponents: the printed monomial set for the family plus the constant.
std::vector<RealParamPolynomial::Expo> reference_basis(Family family);
// All exponents with per-variable degree <= 2 and total degree <= 4.
std::vector<RealParamPolynomial::Expo> full_basis(Family family);

}  // namespace juliadyn
