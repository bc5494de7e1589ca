#include "juliadyn/brackets.hpp"

#include <algorithm>
#include <cmath>

namespace juliadyn {

RealParamPolynomial RealParamPolynomial::zero(Family family) {
  RealParamPolynomial p;
  p.variables = family == Family::Quadratic
                    ? std::vector<std::string>{"c_re", "c_im"}
                    : std::vector<std::string>{"a1_re", "a1_im", "a0_re", "a0_im"};
  return p;
}

double RealParamPolynomial::evaluate(const std::array<double, 4>& x) const {
  double acc = 0.0;
  for (const auto& [e, v] : terms) {
    double m = v;
    for (int k = 0; k < 4; ++k)
      for (int t = 0; t < e[k]; ++t) m *= x[k];
    acc += m;
  }
  return acc;
}

void RealParamPolynomial::add(const Expo& e, double v) {
  if (v == 0.0) return;
  terms[e] += v;
}

void RealParamPolynomial::prune(double eps) {
  for (auto it = terms.begin(); it != terms.end();)
    it = std::abs(it->second) < eps ? terms.erase(it) : std::next(it);
}

RealParamPolynomial& RealParamPolynomial::operator+=(const RealParamPolynomial& o) {
  for (const auto& [e, v] : o.terms) add(e, v);
  return *this;
}

RealParamPolynomial operator*(const RealParamPolynomial& a,
                              const RealParamPolynomial& b) {
  RealParamPolynomial out;
  out.variables = a.variables;
  for (const auto& [ea, va] : a.terms)
    for (const auto& [eb, vb] : b.terms) {
      RealParamPolynomial::Expo e{};
      for (int k = 0; k < 4; ++k) e[k] = ea[k] + eb[k];
      out.add(e, va * vb);
    }
  return out;
}

std::string RealParamPolynomial::monomial_name(const Expo& e) const {
  std::string s;
  for (std::size_t k = 0; k < variables.size(); ++k) {
    for (int t = 0; t < e[k]; ++t) {
      if (!s.empty()) s += "*";
      s += variables[k];
    }
  }
  return s.empty() ? "1" : s;
}

ComplexParamPolynomial ComplexParamPolynomial::monomial(Family family,
                                                        MultiIndex alpha) {
  ComplexParamPolynomial acc;
  acc.re = RealParamPolynomial::zero(family);
  acc.im = RealParamPolynomial::zero(family);
  acc.re.add({0, 0, 0, 0}, 1.0);

  const auto mul_var = [&](int re_slot) {
    // acc *= (x_{re_slot} + i x_{re_slot+1})
    ComplexParamPolynomial next;
    next.re = RealParamPolynomial::zero(family);
    next.im = RealParamPolynomial::zero(family);
    const auto bump = [&](RealParamPolynomial& dst, const RealParamPolynomial& src,
                          int slot, double sign) {
      for (const auto& [e, v] : src.terms) {
        RealParamPolynomial::Expo ne = e;
        ne[slot] += 1;
        dst.add(ne, sign * v);
      }
    };
    bump(next.re, acc.re, re_slot, 1.0);
    bump(next.re, acc.im, re_slot + 1, -1.0);
    bump(next.im, acc.im, re_slot, 1.0);
    bump(next.im, acc.re, re_slot + 1, 1.0);
    acc = next;
  };

  for (int t = 0; t < alpha.i; ++t) mul_var(0);
  if (family == Family::Cubic)
    for (int t = 0; t < alpha.j; ++t) mul_var(2);
  return acc;
}

namespace {

BracketTerm term(double coeff, std::vector<BracketFactor> factors) {
  return {coeff, std::move(factors)};
}

BracketFactor re(int i, int j = 0) { return {Part::Re, {i, j}}; }
BracketFactor im(int i, int j = 0) { return {Part::Im, {i, j}}; }

}  // namespace

std::vector<BracketGroup> expansion_groups(Family family) {
  std::vector<BracketGroup> groups;
  if (family == Family::Quadratic) {
    groups.push_back({"c", {1, 0}, {term(1.0, {re(1)})}});
    groups.push_back({"c2",
                      {2, 0},
                      {term(1.0, {re(2)}),
                       term(-0.5, {re(1), re(1)}),
                       term(0.5, {im(1), im(1)})}});
    return groups;
  }
  // Cubic: factor shorthand by phi index (the parameter power always equals
  // the phi index).
  const auto A_re = re(1, 0), A_im = im(1, 0);   // a1 * conj(z) phi_{1,0}
  const auto C_re = re(0, 1), C_im = im(0, 1);   // a0 ... phi_{0,1}
  const auto E_re = re(1, 1), E_im = im(1, 1);   // a1 a0 ... phi_{1,1}
  const auto D_re = re(2, 0), D_im = im(2, 0);   // a1^2 ... phi_{2,0}
  const auto H_re = re(0, 2), H_im = im(0, 2);   // a0^2 ... phi_{0,2}
  const auto G_re = re(2, 1), G_im = im(2, 1);   // a1^2 a0 ... phi_{2,1}
  const auto B_re = re(1, 2), B_im = im(1, 2);   // a1 a0^2 ... phi_{1,2}
  const auto K_re = re(2, 2);                    // a1^2 a0^2 ... phi_{2,2}

  groups.push_back({"a1", {1, 0}, {term(1.0, {A_re})}});
  groups.push_back({"a0", {0, 1}, {term(1.0, {C_re})}});
  groups.push_back({"a1_a0",
                    {1, 1},
                    {term(1.0, {E_re}),
                     term(-1.0, {A_re, C_re}),
                     term(1.0, {A_im, C_im})}});
  groups.push_back({"a1sq",
                    {2, 0},
                    {term(1.0, {D_re}),
                     term(-0.5, {A_re, A_re}),
                     term(0.5, {A_im, A_im})}});
  groups.push_back({"a0sq",
                    {0, 2},
                    {term(1.0, {H_re}),
                     term(-0.5, {C_re, C_re}),
                     term(0.5, {C_im, C_im})}});
  groups.push_back({"a1sq_a0",
                    {2, 1},
                    {term(1.0, {G_re}),
                     term(-1.0, {A_re, E_re}),
                     term(1.0, {C_im, D_im}),
                     term(1.0, {A_im, E_im}),
                     term(-1.0, {C_re, D_re}),
                     term(1.0, {A_re, A_re, C_re}),
                     term(-1.0, {C_re, A_im, A_im}),
                     term(-2.0, {A_re, A_im, C_im})}});
  groups.push_back({"a1_a0sq",
                    {1, 2},
                    {term(1.0, {B_re}),
                     term(-1.0, {A_re, C_im, C_im}),
                     term(-1.0, {A_re, H_re}),
                     term(-1.0, {C_re, E_re}),
                     term(1.0, {C_im, E_im}),
                     term(1.0, {C_re, C_re, A_re}),
                     term(1.0, {A_im, H_im}),
                     term(-2.0, {C_re, C_im, A_im})}});
  groups.push_back(
      {"a1sq_a0sq",
       {2, 2},
       {term(1.0, {K_re}),
        term(-0.5, {E_re, E_re}),
        term(0.5, {E_im, E_im}),
        term(-1.0, {A_re, B_re}),
        term(1.0, {A_im, B_im}),
        term(-1.0, {C_re, G_re}),
        term(1.0, {C_im, G_im}),
        term(-1.0, {D_re, H_re}),
        term(1.0, {D_im, H_im}),
        term(1.0, {A_re, A_re, H_re}),
        term(1.0, {C_re, C_re, D_re}),
        term(2.0, {A_re, C_re, E_re}),
        term(-2.0, {A_re, A_im, H_im}),
        term(-2.0, {A_re, C_im, E_im}),
        term(-2.0, {C_re, A_im, E_im}),
        term(-2.0, {C_re, C_im, D_im}),
        term(-2.0, {E_re, A_im, C_im}),
        term(-1.0, {D_re, C_im, C_im}),
        term(-1.0, {H_re, A_im, A_im}),
        term(-1.5, {A_re, A_re, C_re, C_re}),
        term(-1.5, {A_im, A_im, C_im, C_im}),
        term(1.5, {A_re, A_re, C_im, C_im}),
        term(1.5, {C_re, C_re, A_im, A_im}),
        term(6.0, {A_re, C_re, A_im, C_im})}});
  return groups;
}

double evaluate_group(const BracketGroup& group,
                      const std::vector<MultiIndex>& orders,
                      const std::vector<cplx>& w_values,
                      const std::vector<cplx>& params) {
  const auto pos_of = [&](MultiIndex a) -> std::size_t {
    for (std::size_t k = 0; k < orders.size(); ++k)
      if (orders[k] == a) return k;
    fail(ErrorCode::InvalidInput, "bracket references an order outside the series");
  };
  double acc = 0.0;
  for (const BracketTerm& t : group.terms) {
    double prod = t.coeff;
    for (const BracketFactor& f : t.factors) {
      cplx mono{1.0, 0.0};
      for (int k = 0; k < f.alpha.i; ++k) mono *= params[0];
      if (params.size() > 1)
        for (int k = 0; k < f.alpha.j; ++k) mono *= params[1];
      const cplx val = mono * w_values[pos_of(f.alpha)];
      prod *= f.part == Part::Re ? val.real() : val.imag();
    }
    acc += prod;
  }
  return acc;
}

bool AtomProduct::operator<(const AtomProduct& o) const {
  return std::lexicographical_compare(
      atoms.begin(), atoms.end(), o.atoms.begin(), o.atoms.end(),
      [](const auto& a, const auto& b) {
        if (a.first.i != b.first.i) return a.first.i < b.first.i;
        if (a.first.j != b.first.j) return a.first.j < b.first.j;
        return a.second < b.second;
      });
}

SymbolicExpansion expand_groups_symbolically(
    Family family, const std::vector<BracketGroup>& groups) {
  SymbolicExpansion out;
  using Key = std::pair<RealParamPolynomial::Expo, AtomProduct>;

  for (const BracketGroup& g : groups) {
    for (const BracketTerm& t : g.terms) {
      // Running product over factors: map from (exponent, atoms) to coeff.
      std::map<Key, double> acc{{Key{{0, 0, 0, 0}, AtomProduct{}}, t.coeff}};
      for (const BracketFactor& f : t.factors) {
        const ComplexParamPolynomial mono =
            ComplexParamPolynomial::monomial(family, f.alpha);
        // Re(mono * w) = mono.re * u - mono.im * v
        // Im(mono * w) = mono.re * v + mono.im * u
        std::map<Key, double> next;
        const auto emit = [&](const Key& base, double cv,
                              const RealParamPolynomial& poly, Part atom_part,
                              double sign) {
          for (const auto& [e, v] : poly.terms) {
            Key k = base;
            for (int q = 0; q < 4; ++q) k.first[q] += e[q];
            auto atoms = k.second.atoms;
            atoms.push_back({f.alpha, atom_part});
            std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
              if (a.first.i != b.first.i) return a.first.i < b.first.i;
              if (a.first.j != b.first.j) return a.first.j < b.first.j;
              return a.second < b.second;
            });
            k.second.atoms = std::move(atoms);
            next[k] += sign * cv * v;
          }
        };
        for (const auto& [key, cv] : acc) {
          if (f.part == Part::Re) {
            emit(key, cv, mono.re, Part::Re, 1.0);   // mono.re * u
            emit(key, cv, mono.im, Part::Im, -1.0);  // -mono.im * v
          } else {
            emit(key, cv, mono.re, Part::Im, 1.0);   // mono.re * v
            emit(key, cv, mono.im, Part::Re, 1.0);   // mono.im * u
          }
        }
        acc = std::move(next);
      }
      for (const auto& [key, cv] : acc)
        if (cv != 0.0) out.entries[key] += cv;
    }
  }
  return out;
}

RealParamPolynomial realize_expansion(Family family, const SymbolicExpansion& sym,
                                      AtomIntegrator& integrator) {
  std::map<AtomProduct, double> cache;
  for (const auto& [key, cv] : sym.entries) cache.emplace(key.second, 0.0);
  std::vector<AtomProduct> products;
  products.reserve(cache.size());
  for (const auto& [p, v] : cache) products.push_back(p);
  const std::vector<double> values = integrator.apply_many(products);
  for (std::size_t k = 0; k < products.size(); ++k) cache[products[k]] = values[k];

  RealParamPolynomial out = RealParamPolynomial::zero(family);
  for (const auto& [key, cv] : sym.entries)
    out.add(key.first, cv * cache[key.second]);
  out.prune();
  return out;
}

}  // namespace juliadyn
