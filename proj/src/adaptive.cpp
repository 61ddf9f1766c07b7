#include "explab/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "explab/counter_rng.hpp"
#include "explab/errors.hpp"

namespace explab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kPrefixTarget = 64;
constexpr std::uint64_t kTrialBlock = 1024;

std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

// Smallest depth whose subtree count reaches kPrefixTarget (capped at n).
std::size_t split_depth(std::size_t branching, std::size_t n) {
  std::size_t d = 0;
  std::size_t count = 1;
  while (d < n && count < kPrefixTarget) {
    count *= branching;
    ++d;
  }
  return d;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

void check_prior(double prior) {
  if (!(prior > 0.0 && prior < 1.0)) throw DomainError("prior must lie in (0, 1)");
}

void check_input(std::size_t x, const ChannelPair& pair) {
  if (x >= pair.inputs()) throw DomainError("input index out of range");
}

struct Node {
  std::vector<Step> history;
  double w;
  double wbar;
};

class TranscriptWalker {
 public:
  TranscriptWalker(const Policy& policy, const ChannelPair& pair, std::size_t n)
      : policy_(policy), pair_(pair), n_(n) {}

  // Visits every positive-weight child of `node` in (input, output) order.
  template <class Visit>
  void children(const Node& node, Visit&& visit) const {
    std::vector<double> dist(pair_.inputs());
    policy_.input_distribution(node.history, dist);
    for (std::size_t x = 0; x < pair_.inputs(); ++x) {
      if (dist[x] == 0.0) continue;
      const auto w_row = pair_.w().row(x);
      const auto wbar_row = pair_.wbar().row(x);
      for (std::size_t y = 0; y < pair_.outputs(); ++y) {
        const double w = node.w * dist[x] * w_row[y];
        const double wbar = node.wbar * dist[x] * wbar_row[y];
        if (w == 0.0 && wbar == 0.0) continue;
        Node child{node.history, w, wbar};
        child.history.push_back({x, y});
        visit(child);
      }
    }
  }

  void prefixes(const Node& node, std::size_t depth, std::vector<Node>& out) const {
    if (node.history.size() == depth) {
      out.push_back(node);
      return;
    }
    children(node, [&](const Node& child) { prefixes(child, depth, out); });
  }

  void accumulate(const Node& node, const TestFunction& test, TranscriptMasses& masses) const {
    if (node.history.size() == n_) {
      const double f = test(node.history, node.w, node.wbar);
      masses.accept_w += node.w * f;
      masses.reject_w += node.w * (1.0 - f);
      masses.accept_wbar += node.wbar * f;
      masses.reject_wbar += node.wbar * (1.0 - f);
      return;
    }
    children(node, [&](const Node& child) { accumulate(child, test, masses); });
  }

 private:
  const Policy& policy_;
  const ChannelPair& pair_;
  std::size_t n_;
};

void check_policy(const Policy& policy, const ChannelPair& pair, std::size_t n) {
  if (policy.inputs() != pair.inputs()) throw AlphabetMismatch("policy input count does not match channel");
  if (const auto* tree = policy.tree()) {
    if (tree->outputs() != pair.outputs()) throw AlphabetMismatch("policy output count does not match channel");
    if (tree->horizon() < n) throw DomainError("policy tree is shallower than the horizon");
  }
}

// Output compositions of n over k symbols, in lexicographic order.
template <class Visit>
void for_each_composition(std::size_t n, std::size_t k, Visit&& visit) {
  std::vector<std::size_t> counts(k, 0);
  auto recurse = [&](auto&& self, std::size_t y, std::size_t remaining) -> void {
    if (y + 1 == k) {
      counts[y] = remaining;
      visit(counts);
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[y] = c;
      self(self, y + 1, remaining - c);
    }
  };
  recurse(recurse, 0, n);
}

struct TypeClass {
  double log_count;  // log multinomial coefficient
  double log_w;      // log W_x^n of one sequence
  double log_wbar;
};

std::vector<TypeClass> type_classes(std::size_t n, std::size_t x, const ChannelPair& pair) {
  check_input(x, pair);
  require_composition_scale(n, pair.outputs());
  const auto w_row = pair.w().row(x);
  const auto wbar_row = pair.wbar().row(x);
  std::vector<TypeClass> classes;
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  for_each_composition(n, pair.outputs(), [&](const std::vector<std::size_t>& counts) {
    TypeClass tc{log_n_fact, 0.0, 0.0};
    for (std::size_t y = 0; y < counts.size(); ++y) {
      if (counts[y] == 0) continue;
      const double c = static_cast<double>(counts[y]);
      tc.log_count -= std::lgamma(c + 1.0);
      tc.log_w += w_row[y] > 0.0 ? c * std::log(w_row[y]) : kNegInf;
      tc.log_wbar += wbar_row[y] > 0.0 ? c * std::log(wbar_row[y]) : kNegInf;
    }
    classes.push_back(tc);
  });
  return classes;
}

}  // namespace

// ---------------------------------------------------------------- PolicyTree

PolicyTree::PolicyTree(std::size_t inputs, std::size_t outputs, std::size_t horizon)
    : inputs_(inputs), outputs_(outputs) {
  if (inputs == 0 || outputs == 0) throw DomainError("policy tree needs nonempty alphabets");
  const std::size_t branching = inputs * outputs;
  double nodes = 1.0;
  levels_.resize(horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    if (nodes > kEnumerationLimit) throw ScaleError("policy tree exceeds the enumeration limit");
    const std::size_t count = int_pow(branching, k);
    levels_[k].assign(count * inputs, 0.0);
    for (std::size_t i = 0; i < count; ++i) levels_[k][i * inputs] = 1.0;
    nodes *= static_cast<double>(branching);
  }
}

PolicyTree PolicyTree::fixed_input(std::size_t input, std::size_t inputs, std::size_t outputs,
                                   std::size_t horizon) {
  if (input >= inputs) throw DomainError("fixed input out of range");
  PolicyTree tree(inputs, outputs, horizon);
  for (auto& level : tree.levels_) {
    for (std::size_t i = 0; i < level.size(); ++i) level[i] = (i % inputs == input) ? 1.0 : 0.0;
  }
  return tree;
}

std::size_t PolicyTree::index_of(History history) const { return transcript_index(history, inputs_, outputs_); }

std::span<double> PolicyTree::node(std::size_t depth, std::size_t index) {
  return std::span<double>(levels_.at(depth)).subspan(index * inputs_, inputs_);
}

std::span<const double> PolicyTree::node(std::size_t depth, std::size_t index) const {
  return std::span<const double>(levels_.at(depth)).subspan(index * inputs_, inputs_);
}

std::span<const double> PolicyTree::at(History history) const { return node(history.size(), index_of(history)); }

void PolicyTree::set(History history, std::span<const double> dist) {
  if (dist.size() != inputs_) throw InvalidDistribution("policy node: wrong number of inputs");
  validate_probabilities(dist, "policy node");
  auto target = node(history.size(), index_of(history));
  std::copy(dist.begin(), dist.end(), target.begin());
}

void PolicyTree::set_deterministic(History history, std::size_t input) {
  if (input >= inputs_) throw DomainError("policy node: input out of range");
  auto target = node(history.size(), index_of(history));
  std::fill(target.begin(), target.end(), 0.0);
  target[input] = 1.0;
}

std::size_t transcript_index(History transcript, std::size_t inputs, std::size_t outputs) {
  std::size_t index = 0;
  for (const auto& step : transcript) {
    if (step.input >= inputs || step.output >= outputs) throw DomainError("history step out of range");
    index = index * inputs * outputs + step.input * outputs + step.output;
  }
  return index;
}

// -------------------------------------------------------------------- Policy

std::size_t Policy::inputs() const {
  if (const auto* t = std::get_if<PolicyTree>(&impl_)) return t->inputs();
  return std::get<CallbackPolicy>(impl_).inputs;
}

void Policy::input_distribution(History history, std::span<double> out) const {
  if (const auto* t = std::get_if<PolicyTree>(&impl_)) {
    const auto dist = t->at(history);
    std::copy(dist.begin(), dist.end(), out.begin());
    return;
  }
  std::get<CallbackPolicy>(impl_).callback(history, out);
}

// -------------------------------------------------------------- TestFunction

TestFunction TestFunction::constant(double accept) {
  if (!(accept >= 0.0 && accept <= 1.0)) throw DomainError("test value must lie in [0, 1]");
  return TestFunction([accept](History, double, double) { return accept; });
}

TestFunction TestFunction::likelihood_ratio(double prior) {
  check_prior(prior);
  return TestFunction([prior](History, double w, double wbar) {
    return prior * w < (1.0 - prior) * wbar ? 1.0 : 0.0;
  });
}

TestFunction TestFunction::table(std::size_t inputs, std::size_t outputs, std::vector<double> accept) {
  for (double v : accept) {
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("test table entries must lie in [0, 1]");
  }
  return TestFunction([inputs, outputs, accept = std::move(accept)](History t, double, double) {
    return accept.at(transcript_index(t, inputs, outputs));
  });
}

double TestFunction::operator()(History transcript, double weight_w, double weight_wbar) const {
  const double f = fn_(transcript, weight_w, weight_wbar);
  if (!(f >= 0.0 && f <= 1.0)) throw DomainError("test function left [0, 1]");
  return f;
}

// --------------------------------------------------------------- Enumeration

void require_enumeration_scale(const ChannelPair& pair, std::size_t n) {
  const double branching = static_cast<double>(pair.inputs() * pair.outputs());
  if (std::pow(branching, static_cast<double>(n)) > kEnumerationLimit) {
    throw ScaleError("transcript tree exceeds the enumeration limit of 1e7 leaves");
  }
}

TranscriptMasses transcript_masses(const Policy& policy, const TestFunction& test, std::size_t n,
                                   const ChannelPair& pair, Exec exec) {
  check_policy(policy, pair, n);
  require_enumeration_scale(pair, n);
  const TranscriptWalker walker(policy, pair, n);
  std::vector<Node> prefixes;
  walker.prefixes(Node{{}, 1.0, 1.0}, split_depth(pair.inputs() * pair.outputs(), n), prefixes);
  std::vector<TranscriptMasses> partial(prefixes.size());
  for_each_index(prefixes.size(), [&](std::size_t i) { walker.accumulate(prefixes[i], test, partial[i]); }, exec);
  TranscriptMasses total;
  for (const auto& m : partial) {
    total.accept_w += m.accept_w;
    total.reject_w += m.reject_w;
    total.accept_wbar += m.accept_wbar;
    total.reject_wbar += m.reject_wbar;
  }
  return total;
}

ErrorPair exact_errors(const Policy& policy, const TestFunction& test, std::size_t n,
                       const ChannelPair& pair, Exec exec) {
  const auto m = transcript_masses(policy, test, n, pair, exec);
  return {m.accept_w, m.reject_wbar, n};
}

std::vector<std::pair<double, double>> depth_weight_sums(const Policy& policy, std::size_t n,
                                                         const ChannelPair& pair) {
  check_policy(policy, pair, n);
  require_enumeration_scale(pair, n);
  const TranscriptWalker walker(policy, pair, n);
  std::vector<std::pair<double, double>> sums(n + 1, {0.0, 0.0});
  auto recurse = [&](auto&& self, const Node& node) -> void {
    auto& slot = sums[node.history.size()];
    slot.first += node.w;
    slot.second += node.wbar;
    if (node.history.size() == n) return;
    walker.children(node, [&](const Node& child) { self(self, child); });
  };
  recurse(recurse, Node{{}, 1.0, 1.0});
  return sums;
}

// ----------------------------------------------------------- Dynamic program

namespace {

class BayesProgram {
 public:
  BayesProgram(const ChannelPair& pair, std::size_t n, double prior, PolicyTree& policy)
      : pair_(pair), n_(n), prior_(prior), policy_(policy),
        branching_(pair.inputs() * pair.outputs()) {}

  double solve(std::size_t depth, std::size_t index, double w, double wbar) {
    if (depth == n_) return std::min(prior_ * w, (1.0 - prior_) * wbar);
    // A zero-weight hypothesis makes every leaf below cost nothing.
    if (prior_ * w == 0.0 || (1.0 - prior_) * wbar == 0.0) return 0.0;
    double best = kInf;
    std::size_t best_x = 0;
    for (std::size_t x = 0; x < pair_.inputs(); ++x) {
      const auto w_row = pair_.w().row(x);
      const auto wbar_row = pair_.wbar().row(x);
      double sum = 0.0;
      for (std::size_t y = 0; y < pair_.outputs(); ++y) {
        const std::size_t child = index * branching_ + x * pair_.outputs() + y;
        sum += solve(depth + 1, child, w * w_row[y], wbar * wbar_row[y]);
      }
      if (sum < best) {
        best = sum;
        best_x = x;
      }
    }
    auto slot = policy_.node(depth, index);
    std::fill(slot.begin(), slot.end(), 0.0);
    slot[best_x] = 1.0;
    return best;
  }

  // Same recursion for the top `depth` levels, reading subtree values at
  // `depth` from `frontier`.
  double solve_top(std::size_t level, std::size_t depth, std::size_t index, double w, double wbar,
                   const std::vector<double>& frontier) {
    if (level == depth) return frontier[index];
    if (level == n_) return std::min(prior_ * w, (1.0 - prior_) * wbar);
    if (prior_ * w == 0.0 || (1.0 - prior_) * wbar == 0.0) return 0.0;
    double best = kInf;
    std::size_t best_x = 0;
    for (std::size_t x = 0; x < pair_.inputs(); ++x) {
      const auto w_row = pair_.w().row(x);
      const auto wbar_row = pair_.wbar().row(x);
      double sum = 0.0;
      for (std::size_t y = 0; y < pair_.outputs(); ++y) {
        const std::size_t child = index * branching_ + x * pair_.outputs() + y;
        sum += solve_top(level + 1, depth, child, w * w_row[y], wbar * wbar_row[y], frontier);
      }
      if (sum < best) {
        best = sum;
        best_x = x;
      }
    }
    auto slot = policy_.node(level, index);
    std::fill(slot.begin(), slot.end(), 0.0);
    slot[best_x] = 1.0;
    return best;
  }

  std::pair<double, double> weights_of(std::size_t depth, std::size_t index) const {
    double w = 1.0;
    double wbar = 1.0;
    for (std::size_t k = 0; k < depth; ++k) {
      const std::size_t digit = index % branching_;
      index /= branching_;
      const std::size_t x = digit / pair_.outputs();
      const std::size_t y = digit % pair_.outputs();
      w *= pair_.w().row(x)[y];
      wbar *= pair_.wbar().row(x)[y];
    }
    return {w, wbar};
  }

 private:
  const ChannelPair& pair_;
  std::size_t n_;
  double prior_;
  PolicyTree& policy_;
  std::size_t branching_;
};

}  // namespace

AdaptiveBayesResult optimal_adaptive_bayes(std::size_t n, const ChannelPair& pair, double prior, Exec exec) {
  check_prior(prior);
  require_enumeration_scale(pair, n);
  PolicyTree policy(pair.inputs(), pair.outputs(), n);
  BayesProgram program(pair, n, prior, policy);
  const std::size_t branching = pair.inputs() * pair.outputs();
  const std::size_t depth = split_depth(branching, n);
  const std::size_t frontier_size = int_pow(branching, depth);
  std::vector<double> frontier(frontier_size);
  for_each_index(frontier_size, [&](std::size_t i) {
    const auto [w, wbar] = program.weights_of(depth, i);
    frontier[i] = program.solve(depth, i, w, wbar);
  }, exec);
  const double error = program.solve_top(0, depth, 0, 1.0, 1.0, frontier);
  return {error, std::move(policy), TestFunction::likelihood_ratio(prior)};
}

// ---------------------------------------------------------------- Type classes

void require_composition_scale(std::size_t n, std::size_t outputs) {
  // log C(n + k - 1, k - 1)
  const double k = static_cast<double>(outputs);
  const double nn = static_cast<double>(n);
  const double log_count = std::lgamma(nn + k) - std::lgamma(nn + 1.0) - std::lgamma(k);
  if (log_count > std::log(kEnumerationLimit) + 1e-9) {
    throw ScaleError("type-class enumeration exceeds the limit of 1e7 compositions");
  }
}

double log_optimal_fixed_input_bayes(std::size_t n, std::size_t x, const ChannelPair& pair, double prior) {
  check_prior(prior);
  const double log_prior = std::log(prior);
  const double log_rest = std::log1p(-prior);
  double total = kNegInf;
  for (const auto& tc : type_classes(n, x, pair)) {
    total = log_add(total, tc.log_count + std::min(log_prior + tc.log_w, log_rest + tc.log_wbar));
  }
  return total;
}

double optimal_fixed_input_bayes(std::size_t n, std::size_t x, const ChannelPair& pair, double prior) {
  return std::exp(log_optimal_fixed_input_bayes(n, x, pair, prior));
}

InputValue best_fixed_input_bayes(std::size_t n, const ChannelPair& pair, double prior) {
  InputValue best{optimal_fixed_input_bayes(n, 0, pair, prior), 0};
  for (std::size_t x = 1; x < pair.inputs(); ++x) {
    const double v = optimal_fixed_input_bayes(n, x, pair, prior);
    if (v < best.value) best = {v, x};
  }
  return best;
}

double log_neyman_pearson_exact(std::size_t n, std::size_t x, const ChannelPair& pair, double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("neyman_pearson_exact: epsilon must be nonnegative");
  auto classes = type_classes(n, x, pair);
  if (epsilon >= 1.0) return kNegInf;
  // Reject the null on classes with the largest W̄/W ratio first; classes the
  // null never produces are rejected for free.
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), 0);
  auto llr = [&](const TypeClass& tc) {
    if (tc.log_w == kNegInf) return kInf;
    return tc.log_wbar - tc.log_w;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return llr(classes[a]) > llr(classes[b]); });
  double budget = epsilon;
  double log_beta = kNegInf;
  bool filled = false;
  for (std::size_t idx : order) {
    const auto& tc = classes[idx];
    const double log_q = tc.log_count + tc.log_wbar;
    if (filled) {
      log_beta = log_add(log_beta, log_q);
      continue;
    }
    if (tc.log_w == kNegInf) continue;
    const double mass = std::exp(tc.log_count + tc.log_w);
    if (mass <= budget) {
      budget -= mass;
      continue;
    }
    // Boundary class: reject with probability budget / mass.
    const double keep = 1.0 - budget / mass;
    if (keep > 0.0) log_beta = log_add(log_beta, log_q + std::log(keep));
    filled = true;
  }
  return log_beta;
}

double neyman_pearson_exact(std::size_t n, std::size_t x, const ChannelPair& pair, double epsilon) {
  return std::exp(log_neyman_pearson_exact(n, x, pair, epsilon));
}

// ---------------------------------------------------------------- Monte Carlo

namespace {

std::size_t sample_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    cumulative += probs[i];
    if (u < cumulative) return i;
  }
  return last_positive;
}

struct BlockSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

}  // namespace

ErrorEstimate monte_carlo_errors(const Policy& policy, const TestFunction& test, std::size_t n,
                                 const ChannelPair& pair, std::uint64_t trials, std::uint64_t seed,
                                 Exec exec) {
  if (trials < 1) throw DomainError("monte_carlo_errors: trials must be at least 1");
  check_policy(policy, pair, n);
  const CounterRng rng(seed);
  const std::size_t blocks = block_count(trials, kTrialBlock);

  // stream 0 simulates under W and scores f; stream 1 under W̄ and scores 1 - f.
  auto run = [&](std::uint64_t stream) {
    const Channel& truth = stream == 0 ? pair.w() : pair.wbar();
    std::vector<BlockSums> sums(blocks);
    for_each_index(blocks, [&](std::size_t b) {
      std::vector<Step> transcript;
      std::vector<double> dist(pair.inputs());
      const std::uint64_t first = static_cast<std::uint64_t>(b) * kTrialBlock;
      const std::uint64_t last = std::min<std::uint64_t>(trials, first + kTrialBlock);
      BlockSums acc;
      for (std::uint64_t t = first; t < last; ++t) {
        transcript.clear();
        double w = 1.0;
        double wbar = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
          policy.input_distribution(transcript, dist);
          const std::size_t x = sample_index(dist, rng.uniform(stream, t, 2 * k));
          const std::size_t y = sample_index(truth.row(x), rng.uniform(stream, t, 2 * k + 1));
          w *= dist[x] * pair.w().row(x)[y];
          wbar *= dist[x] * pair.wbar().row(x)[y];
          transcript.push_back({x, y});
        }
        const double f = test(transcript, w, wbar);
        const double score = stream == 0 ? f : 1.0 - f;
        acc.sum += score;
        acc.sum_sq += score * score;
      }
      sums[b] = acc;
    }, exec);
    BlockSums total;
    for (const auto& s : sums) {
      total.sum += s.sum;
      total.sum_sq += s.sum_sq;
    }
    const double count = static_cast<double>(trials);
    const double mean = total.sum / count;
    double half_width = kInf;
    if (trials >= 2) {
      const double var = std::max(0.0, (total.sum_sq - count * mean * mean) / (count - 1.0));
      half_width = 1.96 * std::sqrt(var / count);
    }
    return std::pair{mean, half_width};
  };

  const auto [alpha, hw_alpha] = run(0);
  const auto [beta, hw_beta] = run(1);
  return {alpha, beta, hw_alpha, hw_beta, n, trials, seed};
}

// ------------------------------------------------------------------ Converses

CheckResult converse_check(const Policy& policy, const TestFunction& test, std::size_t n,
                           const ChannelPair& pair, double s) {
  if (!(s <= 0.0)) throw DomainError("converse_check: s must be nonpositive");
  const double envelope = channel_phi(s, pair).value;
  const auto m = transcript_masses(policy, test, n, pair);
  if (envelope == kInf || m.reject_w == 0.0) return {true, kInf};
  const double lhs = (1.0 - s) * std::log(m.reject_w);
  const double wbar_term = s == 0.0 ? 0.0 : -s * std::log(m.reject_wbar);
  const double slack = wbar_term + static_cast<double>(n) * envelope - lhs;
  return {slack >= -kConverseSlackTolerance, slack};
}

CheckResult weak_converse_check(const Policy& policy, const TestFunction& test, std::size_t n,
                                const ChannelPair& pair) {
  const auto m = transcript_masses(policy, test, n, pair);
  if (m.reject_w == 0.0) return {true, kInf};
  const double stein = stein_channel(pair).value;
  const double p = std::min(1.0, m.reject_w);
  double entropy = 0.0;
  if (p > 0.0 && p < 1.0) entropy = -p * std::log(p) - (1.0 - p) * std::log1p(-p);
  const double rhs = (stein + entropy / static_cast<double>(n)) / p;
  if (rhs == kInf) return {true, kInf};
  const double lhs = -std::log(m.reject_wbar) / static_cast<double>(n);
  const double slack = rhs - lhs;
  return {slack >= -kConverseSlackTolerance, slack};
}

}  // namespace explab
