#include "juliadyn/conjugacy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace juliadyn {

namespace {
cplx unit_project(cplx z) { return z / std::abs(z); }
}  // namespace

cplx phi1_quadratic(cplx z, int terms) {
  // -z sum_{i>=1} 2^-i z^{-2^i}.  Circle evaluator: powers of z^{-1} come
  // from repeated squaring, re-projected to unit modulus each step so the
  // huge exponents cannot let rounding drift blow up.
  cplx zpow = unit_project(1.0 / (z * z));  // z^{-2^1}
  double w = 0.5;
  cplx sum{0.0, 0.0};
  for (int i = 1; i <= terms; ++i) {
    sum += w * zpow;
    zpow = unit_project(zpow * zpow);
    w *= 0.5;
  }
  return -z * sum;
}

cplx phi2_quadratic(cplx z, int terms) {
  // -z sum_{i3>=1} 2^-i3 sum_{i2>=1} sum_{i1=1..i2} 2^-(i2+1)
  //      z^-(2^{i3-1+i1} + 2^{i3+i2-i1}).  Circle evaluator, as above.
  // pow2[k] = z^{-2^k}
  std::vector<cplx> pow2(2 * terms + 2);
  pow2[0] = unit_project(1.0 / z);
  for (std::size_t k = 1; k < pow2.size(); ++k)
    pow2[k] = unit_project(pow2[k - 1] * pow2[k - 1]);

  cplx sum{0.0, 0.0};
  double w3 = 1.0;
  for (int i3 = 1; i3 <= terms; ++i3) {
    w3 *= 0.5;
    double w2 = 0.5;
    cplx inner{0.0, 0.0};
    for (int i2 = 1; i2 <= terms; ++i2) {
      w2 *= 0.5;
      for (int i1 = 1; i1 <= i2; ++i1)
        inner += w2 * (pow2[i3 - 1 + i1] * pow2[i3 + i2 - i1]);
    }
    sum += w3 * inner;
  }
  return -z * sum;
}

ConjugacyEvaluator::ConjugacyEvaluator(SeriesConfig config) : config_(config) {
  require(config_.tail_depth >= 4, ErrorCode::InvalidInput,
          "tail_depth must be at least 4");
  build_orders();
}

void ConjugacyEvaluator::build_orders() {
  const int n = config_.resolved_order();
  require(n >= 1, ErrorCode::InvalidInput, "order must be >= 1");
  orders_.clear();
  if (config_.family == Family::Quadratic) {
    for (int k = 1; k <= n; ++k) orders_.push_back({k, 0});
  } else {
    for (int total = 1; total <= n; ++total)
      for (int i = total; i >= 0; --i) orders_.push_back({i, total - i});
  }

  const auto pos_of = [&](MultiIndex a) -> int {
    for (std::size_t k = 0; k < orders_.size(); ++k)
      if (orders_[k] == a) return static_cast<int>(k);
    return -1;
  };

  pair_decomp_.assign(orders_.size(), {});
  triple_decomp_.assign(orders_.size(), {});
  shift_source_.assign(orders_.size(), -1);
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    const MultiIndex a = orders_[k];
    for (std::size_t b = 0; b < orders_.size(); ++b) {
      const MultiIndex mb = orders_[b];
      const MultiIndex mc{a.i - mb.i, a.j - mb.j};
      if (mc.i < 0 || mc.j < 0 || mc.total() < 1) continue;
      const int cpos = pos_of(mc);
      if (cpos >= 0) pair_decomp_[k].push_back({static_cast<int>(b), cpos});
    }
    if (config_.family == Family::Cubic) {
      for (std::size_t b = 0; b < orders_.size(); ++b)
        for (std::size_t c = 0; c < orders_.size(); ++c) {
          const MultiIndex mb = orders_[b], mc = orders_[c];
          const MultiIndex md{a.i - mb.i - mc.i, a.j - mb.j - mc.j};
          if (md.i < 0 || md.j < 0 || md.total() < 1) continue;
          const int dpos = pos_of(md);
          if (dpos >= 0)
            triple_decomp_[k].push_back(
                {static_cast<int>(b), static_cast<int>(c), dpos});
        }
      if (a.i >= 1 && a.i - 1 + a.j >= 1) shift_source_[k] = pos_of({a.i - 1, a.j});
    }
  }
}

std::size_t ConjugacyEvaluator::order_position(MultiIndex alpha) const {
  for (std::size_t k = 0; k < orders_.size(); ++k)
    if (orders_[k] == alpha) return k;
  fail(ErrorCode::InvalidInput, "multi-index outside the configured order set");
}

cplx ConjugacyEvaluator::assemble_Q(std::size_t order_idx, cplx z,
                                    const std::vector<cplx>& phis_at_z) const {
  const MultiIndex a = orders_[order_idx];
  cplx q{0.0, 0.0};
  if (config_.family == Family::Quadratic) {
    if (a.i == 1) q += 1.0;
    for (const auto& [b, c] : pair_decomp_[order_idx])
      q += phis_at_z[b] * phis_at_z[c];
  } else {
    if (a == MultiIndex{1, 0}) q += z;
    if (a == MultiIndex{0, 1}) q += 1.0;
    if (shift_source_[order_idx] >= 0) q += phis_at_z[shift_source_[order_idx]];
    cplx pair{0.0, 0.0};
    for (const auto& [b, c] : pair_decomp_[order_idx])
      pair += phis_at_z[b] * phis_at_z[c];
    q += 3.0 * z * pair;
    cplx triple{0.0, 0.0};
    for (const auto& [b, c, e] : triple_decomp_[order_idx])
      triple += phis_at_z[b] * phis_at_z[c] * phis_at_z[e];
    q += triple;
  }
  return q;
}

std::vector<cplx> ConjugacyEvaluator::phi_all_at(cplx z) const {
  require(std::abs(std::abs(z) - 1.0) < 1e-6, ErrorCode::InvalidInput,
          "phi evaluation requires a point on the unit circle");
  const int d = degree();
  const int length = config_.tail_depth + 16;

  // Forward orbit under z -> z^d, projected back to the circle each step so
  // modulus drift cannot compound.
  std::vector<cplx> orbit(length + 1);
  orbit[0] = unit_project(z);
  for (int m = 0; m < length; ++m) {
    cplx p = orbit[m];
    cplx pw = p * p;
    if (d == 3) pw *= p;
    orbit[m + 1] = unit_project(pw);
  }

  // Backward recurrence phi(z_m) = (phi(z_{m+1}) - Q(z_m)) / (d z_m^{d-1})
  // with a zero seed at the end; the seed error decays by 1/d per step.
  std::vector<std::vector<cplx>> phi(orders_.size(),
                                     std::vector<cplx>(length + 1, cplx{0.0, 0.0}));
  std::vector<cplx> lower(orders_.size());
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    for (int m = length - 1; m >= 0; --m) {
      for (std::size_t b = 0; b < k; ++b) lower[b] = phi[b][m];
      const cplx q = assemble_Q(k, orbit[m], lower);
      cplx zpow = orbit[m];
      if (d == 3) zpow *= orbit[m];
      phi[k][m] = (phi[k][m + 1] - q) / (static_cast<double>(d) * zpow);
    }
  }
  std::vector<cplx> out(orders_.size());
  for (std::size_t k = 0; k < orders_.size(); ++k) out[k] = phi[k][0];
  return out;
}

std::vector<cplx> ConjugacyEvaluator::phi_all_at(const RationalAngle& angle) const {
  const int d = degree();
  const int length = config_.tail_depth + 16;
  std::vector<cplx> orbit(length + 1);
  RationalAngle a = angle;
  for (int m = 0; m <= length; ++m) {
    orbit[m] = a.point();
    a = a.times(d);
  }
  std::vector<std::vector<cplx>> phi(orders_.size(),
                                     std::vector<cplx>(length + 1, cplx{0.0, 0.0}));
  std::vector<cplx> lower(orders_.size());
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    for (int m = length - 1; m >= 0; --m) {
      for (std::size_t b = 0; b < k; ++b) lower[b] = phi[b][m];
      const cplx q = assemble_Q(k, orbit[m], lower);
      cplx zpow = orbit[m];
      if (d == 3) zpow *= orbit[m];
      phi[k][m] = (phi[k][m + 1] - q) / (static_cast<double>(d) * zpow);
    }
  }
  std::vector<cplx> out(orders_.size());
  for (std::size_t k = 0; k < orders_.size(); ++k) out[k] = phi[k][0];
  return out;
}

cplx ConjugacyEvaluator::phi_at(MultiIndex alpha, cplx z) const {
  return phi_all_at(z)[order_position(alpha)];
}

void ConjugacyEvaluator::ensure_params(const std::vector<cplx>& params) const {
  const std::size_t want = config_.family == Family::Quadratic ? 1 : 2;
  require(params.size() == want, ErrorCode::InvalidInput,
          "parameter count does not match the family");
  for (const cplx& p : params)
    require(std::abs(p) < 1.0, ErrorCode::OutOfFamily,
            "parameter modulus must be < 1");
}

cplx ConjugacyEvaluator::evaluate_Phi_from(const std::vector<cplx>& phis,
                                           const std::vector<cplx>& params,
                                           cplx z) const {
  cplx acc = z;
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    const MultiIndex a = orders_[k];
    cplx mono{1.0, 0.0};
    for (int t = 0; t < a.i; ++t) mono *= params[0];
    if (config_.family == Family::Cubic)
      for (int t = 0; t < a.j; ++t) mono *= params[1];
    acc += phis[k] * mono;
  }
  return acc;
}

cplx ConjugacyEvaluator::evaluate_Phi(const std::vector<cplx>& params,
                                      cplx z) const {
  ensure_params(params);
  return evaluate_Phi_from(phi_all_at(z), params, z);
}

void ConjugacyEvaluator::build_table(int max_level) {
  require(max_level >= 1, ErrorCode::InvalidInput, "table level must be >= 1");
  if (table_levels_ >= max_level) return;
  const int d = degree();
  require(std::pow(static_cast<double>(d), max_level) <= static_cast<double>(1 << 24),
          ErrorCode::BudgetExceeded, "d^max_level exceeds the 2^24 node budget");

  level_offset_.assign(max_level + 1, 0);
  std::int64_t total = 0;
  std::int64_t count = 1;
  for (int k = 0; k <= max_level; ++k) {
    level_offset_[k] = total;
    total += count;
    count *= d;
  }
  node_z_.assign(total, cplx{0.0, 0.0});
  table_.assign(orders_.size(), std::vector<cplx>(total, cplx{0.0, 0.0}));

  // Angle 0 (z = 1 is fixed): phi_alpha(1) = -Q_alpha(1) / (d-1).
  phi_one_.assign(orders_.size(), cplx{0.0, 0.0});
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    const cplx q = assemble_Q(k, cplx{1.0, 0.0}, phi_one_);
    phi_one_[k] = -q / static_cast<double>(d - 1);
  }

  std::vector<cplx> scratch(orders_.size());

  // Level 0: the single midpoint 1/2 (z = -1).  For even d its image is
  // angle 0; for odd d it is itself a fixed point.
  node_z_[0] = cplx{-1.0, 0.0};
  for (std::size_t k = 0; k < orders_.size(); ++k) {
    for (std::size_t b = 0; b < k; ++b) scratch[b] = table_[b][0];
    const cplx q = assemble_Q(k, node_z_[0], scratch);
    if (d % 2 == 0) {
      // phi(z^d) = phi(1); z^{d-1} = -1 for even d at z = -1.
      table_[k][0] = (phi_one_[k] - q) / (static_cast<double>(d) * cplx{-1.0, 0.0});
    } else {
      // Fixed point with z^{d-1} = 1: phi = d*phi + Q.
      table_[k][0] = -q / static_cast<double>(d - 1);
    }
  }

  // Levels 1..max_level: node (k, j) has angle (2j+1)/(2 d^k); multiplying by
  // d gives the node (k-1, j mod d^{k-1}), so phi there is already known.
  std::int64_t parent_count = 1;
  for (int k = 1; k <= max_level; ++k) {
    const std::int64_t n = parent_count * d;
    const std::int64_t off = level_offset_[k];
    const std::int64_t poff = level_offset_[k - 1];
    const double denom = 2.0 * static_cast<double>(n);
    for (std::int64_t j = 0; j < n; ++j) {
      const cplx z = circle_point((2.0 * j + 1.0) / denom);
      node_z_[off + j] = z;
      const std::int64_t succ = poff + (j % parent_count);
      cplx zpow = z;
      if (d == 3) zpow *= z;
      const cplx denom_c = static_cast<double>(d) * zpow;
      for (std::size_t oi = 0; oi < orders_.size(); ++oi) {
        for (std::size_t b = 0; b < oi; ++b) scratch[b] = table_[b][off + j];
        const cplx q = assemble_Q(oi, z, scratch);
        table_[oi][off + j] = (table_[oi][succ] - q) / denom_c;
      }
    }
    parent_count = n;
  }
  table_levels_ = max_level;
}

cplx solve_phi_generic(Family family, MultiIndex alpha, cplx z, int M) {
  SeriesConfig cfg;
  cfg.family = family;
  cfg.order_total = std::max(1, alpha.total());
  cfg.tail_depth = std::max(4, M - 16);  // evaluator adds 16 positions back
  ConjugacyEvaluator eval(cfg);
  return eval.phi_at(alpha, z);
}

ResidualReport conjugacy_residual(const ConjugacyEvaluator& eval,
                                  const std::vector<cplx>& params,
                                  int n_samples, std::uint64_t seed) {
  const int d = eval.degree();
  MonicCenteredPolynomial poly =
      eval.config().family == Family::Quadratic
          ? MonicCenteredPolynomial::quadratic(params[0])
          : MonicCenteredPolynomial::cubic(params[0], params[1]);
  std::mt19937_64 rng(seed);
  ResidualReport rep;
  rep.n_samples = n_samples;
  rep.seed = seed;
  for (int s = 0; s < n_samples; ++s) {
    const double t = unit_double(rng());
    const cplx z = circle_point(t);
    const cplx zd = circle_point(std::fmod(d * t, 1.0));
    const cplx left = eval.evaluate_Phi(params, zd);
    const cplx right = poly(eval.evaluate_Phi(params, z));
    rep.sup_residual = std::max(rep.sup_residual, std::abs(left - right));
  }
  return rep;
}

cplx boettcher_forward(const MonicCenteredPolynomial& poly, cplx w, int n_iters) {
  require(std::abs(w) > poly.escape_radius(), ErrorCode::InvalidInput,
          "boettcher_forward needs |w| beyond the escape radius");
  cplx log_acc = std::log(w);
  cplx p = w;
  double scale = 1.0;
  for (int t = 0; t < n_iters; ++t) {
    scale /= poly.degree;
    cplx pd{1.0, 0.0};
    for (int k = 0; k < poly.degree; ++k) pd *= p;
    const cplx next = poly(p);
    const cplx factor = next / pd;
    require(std::abs(std::arg(factor)) < std::numbers::pi / 2.0,
            ErrorCode::BranchAmbiguity,
            "normal-form branch argument jumped by more than pi/2");
    log_acc += scale * std::log(factor);
    p = next;
    if (std::abs(factor - 1.0) < 1e-16 || std::abs(p) > 1e60) break;
  }
  return std::exp(log_acc);
}

}  // namespace juliadyn
