#pragma once
// Order-by-order expansion of log|Phi| in the real and imaginary parts of the
// family parameters.  Each expansion group is a bracket: a sum of products of
// factors of the form Re(param^alpha * conj(z) * phi_alpha(z)) or
// Im(param^alpha * conj(z) * phi_alpha(z)).  The groups are stored as data so
// they can be both evaluated numerically (term by term under the integral)
// and expanded symbolically into a polynomial in the real parameter
// components, with each coefficient a finite combination of measure integrals
// of products of the component functions u_alpha = Re(conj(z) phi_alpha) and
// v_alpha = Im(conj(z) phi_alpha).

#include <array>
#include <map>
#include <string>
#include <vector>

#include "juliadyn/coding.hpp"
#include "juliadyn/common.hpp"
#include "juliadyn/conjugacy.hpp"

namespace juliadyn {

// Polynomial with real coefficients in the real parameter components.
// Variable slots: quadratic {c_re, c_im}, cubic {a1_re, a1_im, a0_re, a0_im};
// unused slots stay at exponent 0.
struct RealParamPolynomial {
  using Expo = std::array<int, 4>;
  std::vector<std::string> variables;
  std::map<Expo, double> terms;

  static RealParamPolynomial zero(Family family);
  double& coeff(Expo e) { return terms[e]; }
  double coeff_or_zero(Expo e) const {
    auto it = terms.find(e);
    return it == terms.end() ? 0.0 : it->second;
  }
  double evaluate(const std::array<double, 4>& x) const;
  void add(const Expo& e, double v);
  void prune(double eps = 1e-13);
  RealParamPolynomial& operator+=(const RealParamPolynomial& o);
  friend RealParamPolynomial operator*(const RealParamPolynomial& a,
                                       const RealParamPolynomial& b);
  std::string monomial_name(const Expo& e) const;
};

// Complex polynomial in the parameters, split into real/imaginary real-
// coefficient parts.  Used to expand param^alpha into the component algebra.
struct ComplexParamPolynomial {
  RealParamPolynomial re, im;
  static ComplexParamPolynomial monomial(Family family, MultiIndex alpha);
};

enum class Part { Re, Im };

struct BracketFactor {
  Part part = Part::Re;
  MultiIndex alpha;  // both the parameter power and the phi index
};

struct BracketTerm {
  double coeff = 1.0;
  std::vector<BracketFactor> factors;
};

struct BracketGroup {
  std::string label;      // monomial group, e.g. "a1sq_a0"
  MultiIndex order;       // total parameter order of the group
  std::vector<BracketTerm> terms;
};

// The expansion groups of log|Phi| (not of the Lyapunov exponent itself,
// which is -log(d) minus the integral of these).
std::vector<BracketGroup> expansion_groups(Family family);

// Numeric value of one group at a point, given w_alpha = conj(z) phi_alpha(z)
// in order positions of `orders` and the complex parameters.
double evaluate_group(const BracketGroup& group,
                      const std::vector<MultiIndex>& orders,
                      const std::vector<cplx>& w_values,
                      const std::vector<cplx>& params);

// A product of component functions u_alpha / v_alpha (sorted canonical key).
struct AtomProduct {
  std::vector<std::pair<MultiIndex, Part>> atoms;  // sorted
  bool operator<(const AtomProduct& o) const;
};

// Symbolic expansion: polynomial in the real parameter components whose
// coefficients are linear combinations of atom products.
struct SymbolicExpansion {
  std::map<std::pair<RealParamPolynomial::Expo, AtomProduct>, double> entries;
};

SymbolicExpansion expand_groups_symbolically(Family family,
                                             const std::vector<BracketGroup>& groups);

// Turns a symbolic expansion into a numeric polynomial by applying a linear
// functional to every atom product: either integration against a measure
// (via the conjugacy tables) or point evaluation at a Dirac angle.
class AtomIntegrator {
 public:
  virtual ~AtomIntegrator() = default;
  virtual double apply(const AtomProduct& atoms) = 0;
  // Batched variant so quadrature-backed integrators can share one node walk.
  virtual std::vector<double> apply_many(const std::vector<AtomProduct>& products) {
    std::vector<double> out;
    out.reserve(products.size());
    for (const AtomProduct& p : products) out.push_back(apply(p));
    return out;
  }
};

RealParamPolynomial realize_expansion(Family family, const SymbolicExpansion& sym,
                                      AtomIntegrator& integrator);

}  // namespace juliadyn
