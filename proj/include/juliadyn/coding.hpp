#pragma once
// Symbolic coding of the unit circle by base-d digits and Bernoulli measures
// on the coding space, pushed to the circle.  Provides cylinder quadrature:
// level-n rules whose nodes are cylinder midpoints and whose weights are the
// cylinder measures, with adaptive refinement and weight-floor pruning for
// nearly degenerate weight vectors.

#include <functional>
#include <vector>

#include "juliadyn/common.hpp"

namespace juliadyn {

// Finite word over the alphabet {1, ..., alphabet}.
struct Word {
  int alphabet = 2;
  std::vector<int> symbols;
};

struct BernoulliWeights {
  std::vector<double> p;

  // Validates strict positivity and sum 1 within 1e-12.
  static BernoulliWeights of(std::vector<double> p);
  int alphabet() const { return static_cast<int>(p.size()); }
  static BernoulliWeights uniform(int d);
};

double cylinder_measure(const Word& word, const BernoulliWeights& weights);
double entropy(const BernoulliWeights& weights);

// Left endpoint of the cylinder of `word`: sum (symbol_k - 1) d^{-k}.
double angle_of_word_prefix(const Word& word);

// Angle of the constant word on `symbol` (the Dirac limit of the pushed
// measure as p_symbol -> 1): the fixed angle t with d*t = t + (symbol-1).
double dirac_limit_angle(int alphabet, int symbol);

enum class NodeRepresentative { Midpoint, LeftEndpoint };

struct QuadratureRule {
  int level = 0;
  NodeRepresentative representative = NodeRepresentative::Midpoint;
  std::vector<double> nodes;    // angles in turns
  std::vector<double> weights;  // cylinder measures, sum 1
};

// Materialized level-n rule; d^level must stay <= 2^24.
QuadratureRule build_quadrature(const BernoulliWeights& weights, int level,
                                NodeRepresentative rep = NodeRepresentative::Midpoint);

// A quadrature node: midpoint of cylinder `index` at depth `level`, i.e.
// angle (2*index+1) / (2*d^level).
struct NodeRef {
  cplx z;
  int level = 0;
  std::int64_t index = 0;
  double angle = 0.0;
};

struct IntegrateOptions {
  double tol = 1e-8;
  int max_level = 0;         // 0: adaptive — deepest level whose pruned node
                             // count fits the uniform-weight budget below
  int min_level = 2;
  double prune_floor = 0.0;  // 0: min(1e-10, tol*1e-4); subtrees of smaller mass are skipped
  int auto_base_level = 0;   // budget for adaptive depth = total node count of a
                             // full tree of this many levels (0: 18 for d=2, 12 for d=3)
};

struct IntegrateResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |I_{level} - I_{level-1}| + skipped mass * max|F|
  int level_used = 0;
  bool converged = false;
  double skipped_mass = 0.0;
};

int default_max_level(int alphabet);

// Integrates f against the pushed Bernoulli measure, refining the cylinder
// level until successive level values differ by less than tol.  When the
// budget is exhausted the best value is still returned with converged=false.
IntegrateResult integrate(const std::function<double(const NodeRef&)>& f,
                          const BernoulliWeights& weights,
                          const IntegrateOptions& opts = {});

// Same walk evaluated for several integrands at once (shared nodes).
std::vector<IntegrateResult> integrate_many(
    const std::vector<std::function<double(const NodeRef&)>>& fs,
    const BernoulliWeights& weights, const IntegrateOptions& opts = {});

// n angles sampled from the pushed measure by drawing word_length i.i.d.
// digits each; word_length must satisfy d^word_length >= 2^32.
std::vector<double> sample_angles(const BernoulliWeights& weights, int n,
                                  int word_length, std::uint64_t seed);

}  // namespace juliadyn
