#include "juliadyn/coding.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace juliadyn {

BernoulliWeights BernoulliWeights::of(std::vector<double> p) {
  require(p.size() >= 2, ErrorCode::InvalidInput,
          "a weight vector needs at least two entries");
  double sum = 0.0;
  for (double v : p) {
    require(v > 0.0, ErrorCode::InvalidInput, "weights must be strictly positive");
    sum += v;
  }
  require(std::abs(sum - 1.0) <= 1e-12, ErrorCode::InvalidInput,
          "weights must sum to 1 within 1e-12");
  BernoulliWeights w;
  w.p = std::move(p);
  return w;
}

BernoulliWeights BernoulliWeights::uniform(int d) {
  require(d >= 2, ErrorCode::InvalidInput, "alphabet must have >= 2 symbols");
  BernoulliWeights w;
  w.p.assign(d, 1.0 / d);
  return w;
}

double cylinder_measure(const Word& word, const BernoulliWeights& weights) {
  require(word.alphabet == weights.alphabet(), ErrorCode::AlphabetMismatch,
          "word alphabet differs from weight alphabet");
  double m = 1.0;
  for (int s : word.symbols) {
    require(s >= 1 && s <= word.alphabet, ErrorCode::InvalidInput,
            "symbol out of range");
    m *= weights.p[s - 1];
  }
  return m;
}

double entropy(const BernoulliWeights& weights) {
  double h = 0.0;
  for (double v : weights.p) h -= v * std::log(v);
  return h;
}

double angle_of_word_prefix(const Word& word) {
  // Horner from the last digit keeps the rounding error at a few ulps.
  double t = 0.0;
  for (auto it = word.symbols.rbegin(); it != word.symbols.rend(); ++it) {
    require(*it >= 1 && *it <= word.alphabet, ErrorCode::InvalidInput,
            "symbol out of range");
    t = (t + (*it - 1)) / word.alphabet;
  }
  return t;
}

double dirac_limit_angle(int alphabet, int symbol) {
  require(symbol >= 1 && symbol <= alphabet, ErrorCode::InvalidInput,
          "symbol out of range");
  // Fixed angle of t -> d t - (symbol-1): t = (symbol-1)/(d-1); symbol d
  // gives t = 1, identified with 0.
  const double t = static_cast<double>(symbol - 1) / (alphabet - 1);
  return t >= 1.0 ? 0.0 : t;
}

QuadratureRule build_quadrature(const BernoulliWeights& weights, int level,
                                NodeRepresentative rep) {
  const int d = weights.alphabet();
  require(level >= 0, ErrorCode::InvalidInput, "level must be >= 0");
  double count = std::pow(static_cast<double>(d), level);
  require(count <= static_cast<double>(1 << 24), ErrorCode::BudgetExceeded,
          "d^level exceeds the 2^24 node budget");
  const std::int64_t n = static_cast<std::int64_t>(count + 0.5);

  QuadratureRule rule;
  rule.level = level;
  rule.representative = rep;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  const double denom = std::pow(static_cast<double>(d), level);
  for (std::int64_t j = 0; j < n; ++j) {
    double w = 1.0;
    std::int64_t rest = j;
    for (int k = 0; k < level; ++k) {
      // digits from least significant; the product is order independent
      w *= weights.p[rest % d];
      rest /= d;
    }
    const double angle = rep == NodeRepresentative::Midpoint
                             ? (2.0 * j + 1.0) / (2.0 * denom)
                             : j / denom;
    rule.nodes.push_back(angle);
    rule.weights.push_back(w);
  }
  return rule;
}

int default_max_level(int alphabet) { return alphabet == 2 ? 18 : 12; }

namespace {

// Deepest level the walker may ever reach; keeps cylinder indices well inside
// int64 and midpoint angles resolvable in double precision.
int hard_level_cap(int d) { return d == 2 ? 40 : 26; }

// Number of level-L cylinders whose own mass clears the prune floor.  The
// walk visits a cylinder exactly when its own mass does (ancestors are always
// at least as heavy), so these multinomial counts are an exact cost model.
double pruned_level_count(int d, const BernoulliWeights& weights, double floor,
                          int L) {
  const double log_floor = std::log(floor);
  double lp[3] = {0.0, 0.0, 0.0};
  for (int s = 0; s < d; ++s) lp[s] = std::log(weights.p[s]);
  const double lg_total = std::lgamma(L + 1.0);
  double count = 0.0;
  for (int k1 = 0; k1 <= L; ++k1) {
    if (d == 2) {
      const int k2 = L - k1;
      if (k1 * lp[0] + k2 * lp[1] < log_floor) continue;
      count += std::exp(lg_total - std::lgamma(k1 + 1.0) - std::lgamma(k2 + 1.0));
    } else {
      for (int k2 = 0; k1 + k2 <= L; ++k2) {
        const int k3 = L - k1 - k2;
        if (k1 * lp[0] + k2 * lp[1] + k3 * lp[2] < log_floor) continue;
        count += std::exp(lg_total - std::lgamma(k1 + 1.0) -
                          std::lgamma(k2 + 1.0) - std::lgamma(k3 + 1.0));
      }
    }
  }
  return count;
}

// Adaptive depth: the deepest level whose cumulative pruned node count stays
// within the cost of a full tree of base_level levels.  Uniform weights keep
// exactly the base depth; skewed weights -- where the midpoint rule converges
// slowest and pruning removes almost the whole tree -- get the extra depth
// they need at no extra cost.
int auto_max_level(int d, const BernoulliWeights& weights, double floor,
                   int base_level) {
  const int base = base_level > 0 ? base_level : default_max_level(d);
  double budget = 0.0;
  double full = 1.0;
  for (int l = 0; l <= base; ++l) {
    budget += full;
    full *= d;
  }
  double total = 1.0;  // the root
  int level = 1;
  for (int L = 1; L <= hard_level_cap(d); ++L) {
    total += pruned_level_count(d, weights, floor, L);
    if (total > budget) break;
    level = L;
  }
  return std::max(level, 1);
}

struct Walker {
  const std::vector<std::function<double(const NodeRef&)>>* fs;
  const BernoulliWeights* weights;
  int d = 2;
  int max_level = 0;
  double prune_floor = 0.0;
  std::vector<double> inv_count;  // 1 / d^k per level
  // level_sum[f][k]: level-k cylinder sum of integrand f.
  std::vector<std::vector<double>> level_sum;
  std::vector<std::vector<double>> level_comp;  // Kahan compensation
  // Mass of subtrees pruned at each level (missing from that level onward).
  std::vector<double> skipped_levels_mass;
  double max_abs_f = 0.0;

  void add(std::size_t fi, int level, double v) {
    double& sum = level_sum[fi][level];
    double& comp = level_comp[fi][level];
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }

  void visit(int level, std::int64_t index, double weight) {
    NodeRef node;
    node.level = level;
    node.index = index;
    node.angle = (2.0 * index + 1.0) * 0.5 * inv_count[level];
    node.z = circle_point(node.angle);
    for (std::size_t fi = 0; fi < fs->size(); ++fi) {
      const double v = (*fs)[fi](node);
      require(std::isfinite(v), ErrorCode::SingularIntegrand,
              "integrand is not finite at a quadrature node");
      max_abs_f = std::max(max_abs_f, std::abs(v));
      add(fi, level, weight * v);
    }
    if (level == max_level) return;
    for (int s = 0; s < d; ++s) {
      const double w = weight * weights->p[s];
      if (w < prune_floor) {
        skipped_levels_mass[level + 1] += w;
        continue;
      }
      visit(level + 1, index * d + s, w);
    }
  }
};

}  // namespace

std::vector<IntegrateResult> integrate_many(
    const std::vector<std::function<double(const NodeRef&)>>& fs,
    const BernoulliWeights& weights, const IntegrateOptions& opts) {
  const int d = weights.alphabet();
  const double floor =
      opts.prune_floor > 0.0 ? opts.prune_floor : std::min(1e-10, opts.tol * 1e-4);
  int max_level = opts.max_level;
  if (max_level <= 0) {
    max_level = auto_max_level(d, weights, floor, opts.auto_base_level);
  } else {
    require(max_level <= hard_level_cap(d), ErrorCode::BudgetExceeded,
            "max_level exceeds the hard depth cap");
    double total = 1.0;
    for (int L = 1; L <= max_level; ++L)
      total += pruned_level_count(d, weights, floor, L);
    require(total <= static_cast<double>(1 << 26), ErrorCode::BudgetExceeded,
            "requested depth visits more than 2^26 quadrature nodes");
  }

  Walker w;
  w.fs = &fs;
  w.weights = &weights;
  w.d = d;
  w.max_level = max_level;
  w.prune_floor = floor;
  w.inv_count.resize(max_level + 1);
  w.inv_count[0] = 1.0;
  for (int k = 1; k <= max_level; ++k) w.inv_count[k] = w.inv_count[k - 1] / d;
  w.level_sum.assign(fs.size(), std::vector<double>(max_level + 1, 0.0));
  w.level_comp.assign(fs.size(), std::vector<double>(max_level + 1, 0.0));
  w.skipped_levels_mass.assign(max_level + 2, 0.0);
  w.visit(0, 0, 1.0);

  // Accumulate skipped mass per level (a subtree skipped at level k is
  // missing from every level >= k).
  std::vector<double> missing(max_level + 1, 0.0);
  double run = 0.0;
  for (int k = 0; k <= max_level; ++k) {
    run += w.skipped_levels_mass[k];
    missing[k] = run;
  }

  std::vector<IntegrateResult> out(fs.size());
  const int min_level = std::max(1, std::min(opts.min_level, max_level));
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    IntegrateResult r;
    r.skipped_mass = missing[max_level];
    int lvl = max_level;
    bool conv = false;
    // Convergence needs TWO consecutive small inter-level differences.  A
    // single one is not evidence: integrands built from the lacunary
    // conjugacy coefficients can vanish on every node of two consecutive
    // dyadic levels (Re(conj(z) phi_1) is zero at all angles of denominator
    // 4 and 8), which would fake agreement far from the limit.
    for (int k = min_level; k + 1 <= max_level; ++k) {
      const double d1 = std::abs(w.level_sum[fi][k] - w.level_sum[fi][k - 1]);
      const double d2 = std::abs(w.level_sum[fi][k + 1] - w.level_sum[fi][k]);
      if (d1 < opts.tol && d2 < opts.tol) {
        lvl = k + 1;
        conv = true;
        break;
      }
    }
    r.level_used = lvl;
    r.converged = conv;
    r.value = w.level_sum[fi][lvl];
    r.error_estimate = std::abs(w.level_sum[fi][lvl] - w.level_sum[fi][lvl - 1]) +
                       missing[lvl] * w.max_abs_f;
    out[fi] = r;
  }
  return out;
}

IntegrateResult integrate(const std::function<double(const NodeRef&)>& f,
                          const BernoulliWeights& weights,
                          const IntegrateOptions& opts) {
  std::vector<std::function<double(const NodeRef&)>> fs{f};
  return integrate_many(fs, weights, opts)[0];
}

std::vector<double> sample_angles(const BernoulliWeights& weights, int n,
                                  int word_length, std::uint64_t seed) {
  const int d = weights.alphabet();
  require(word_length * std::log2(static_cast<double>(d)) >= 32.0,
          ErrorCode::InvalidInput,
          "word_length too small to resolve 32 bits of angle");
  std::mt19937_64 rng(seed);
  std::vector<double> cdf(weights.p.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.p.size(); ++k) {
    acc += weights.p[k];
    cdf[k] = acc;
  }
  std::vector<double> out;
  out.reserve(n);
  std::vector<int> word(word_length);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < word_length; ++k) {
      const double u = unit_double(rng());
      int s = 0;
      while (s + 1 < d && u >= cdf[s]) ++s;
      word[k] = s;
    }
    double t = 0.0;
    for (int k = word_length - 1; k >= 0; --k) t = (t + word[k]) / d;
    out.push_back(t);
  }
  return out;
}

}  // namespace juliadyn
