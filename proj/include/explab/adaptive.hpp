#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "explab/channel.hpp"
#include "explab/parallel.hpp"

namespace explab {

// One channel use: the chosen input and the observed output (indices).
struct Step {
  std::size_t input = 0;
  std::size_t output = 0;
  friend bool operator==(const Step&, const Step&) = default;
};

using History = std::span<const Step>;

// Largest transcript tree (|X||Y|)^n that exact enumeration will walk.
inline constexpr double kEnumerationLimit = 1e7;

/// Explicit decision tree: one input distribution per history of length
/// 0..n-1. Histories are indexed in base |X||Y| with digit x |Y| + y, first
/// step most significant. Every node starts as "input 0 with probability 1".
class PolicyTree {
 public:
  PolicyTree(std::size_t inputs, std::size_t outputs, std::size_t horizon);

  static PolicyTree fixed_input(std::size_t input, std::size_t inputs, std::size_t outputs,
                                std::size_t horizon);

  std::size_t inputs() const { return inputs_; }
  std::size_t outputs() const { return outputs_; }
  std::size_t horizon() const { return levels_.size(); }

  std::span<const double> at(History history) const;
  // Validates `dist` as a probability vector over inputs.
  void set(History history, std::span<const double> dist);
  void set_deterministic(History history, std::size_t input);

  // Raw access by (depth, history index) for the dynamic program.
  std::span<double> node(std::size_t depth, std::size_t index);
  std::span<const double> node(std::size_t depth, std::size_t index) const;
  std::size_t index_of(History history) const;

  friend bool operator==(const PolicyTree&, const PolicyTree&) = default;

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<std::vector<double>> levels_;
};

/// Adaptive input strategy: an explicit tree, or a callback that writes the
/// input distribution for a history into `out`. Callbacks must be pure.
class Policy {
 public:
  using Callback = std::function<void(History history, std::span<double> out)>;

  Policy(PolicyTree tree) : impl_(std::move(tree)) {}
  Policy(std::size_t inputs, Callback callback) : impl_(CallbackPolicy{inputs, std::move(callback)}) {}

  std::size_t inputs() const;
  void input_distribution(History history, std::span<double> out) const;
  const PolicyTree* tree() const { return std::get_if<PolicyTree>(&impl_); }

 private:
  struct CallbackPolicy {
    std::size_t inputs;
    Callback callback;
  };
  std::variant<PolicyTree, CallbackPolicy> impl_;
};

/// Probability f_n of accepting W̄ given the full transcript. Tests also see
/// the transcript's probabilities under W and W̄ (policy included).
class TestFunction {
 public:
  using Fn = std::function<double(History transcript, double weight_w, double weight_wbar)>;

  explicit TestFunction(Fn fn) : fn_(std::move(fn)) {}

  static TestFunction constant(double accept);
  // Bayes test: accept W̄ iff prior weight_w < (1 - prior) weight_wbar.
  static TestFunction likelihood_ratio(double prior);
  // Indexed by transcript index (base |X||Y|, first step most significant).
  static TestFunction table(std::size_t inputs, std::size_t outputs, std::vector<double> accept);

  // Throws DomainError if the underlying function leaves [0, 1].
  double operator()(History transcript, double weight_w, double weight_wbar) const;

 private:
  Fn fn_;
};

std::size_t transcript_index(History transcript, std::size_t inputs, std::size_t outputs);

// E_W f, E_W (1-f), E_W̄ f, E_W̄ (1-f).
struct TranscriptMasses {
  double accept_w = 0.0;
  double reject_w = 0.0;
  double accept_wbar = 0.0;
  double reject_wbar = 0.0;
};

struct ErrorPair {
  double alpha = 0.0;  // E_W f
  double beta = 0.0;   // E_W̄ (1 - f)
  std::size_t n = 0;
};

// Throws ScaleError when (|X||Y|)^n exceeds kEnumerationLimit.
void require_enumeration_scale(const ChannelPair& pair, std::size_t n);

TranscriptMasses transcript_masses(const Policy& policy, const TestFunction& test, std::size_t n,
                                   const ChannelPair& pair, Exec exec = Exec::parallel);
ErrorPair exact_errors(const Policy& policy, const TestFunction& test, std::size_t n,
                       const ChannelPair& pair, Exec exec = Exec::parallel);

// Total transcript probability under W and W̄ at each depth 0..n.
std::vector<std::pair<double, double>> depth_weight_sums(const Policy& policy, std::size_t n,
                                                         const ChannelPair& pair);

struct AdaptiveBayesResult {
  double error = 0.0;  // prior alpha + (1 - prior) beta
  PolicyTree policy;
  TestFunction test;
};

// Exact optimum over adaptive policies and tests by backward induction on the
// transcript tree. Ties pick the smallest input index.
AdaptiveBayesResult optimal_adaptive_bayes(std::size_t n, const ChannelPair& pair, double prior,
                                           Exec exec = Exec::parallel);

// Throws ScaleError when C(n+|Y|-1, |Y|-1) exceeds kEnumerationLimit.
void require_composition_scale(std::size_t n, std::size_t outputs);

// Bayes error (and its logarithm) of repeating input x n times with the best test.
double optimal_fixed_input_bayes(std::size_t n, std::size_t x, const ChannelPair& pair, double prior);
double log_optimal_fixed_input_bayes(std::size_t n, std::size_t x, const ChannelPair& pair, double prior);

// min over x of optimal_fixed_input_bayes, with the attaining input.
InputValue best_fixed_input_bayes(std::size_t n, const ChannelPair& pair, double prior);

// beta*_n(epsilon) for input x repeated n times (randomized boundary class).
double neyman_pearson_exact(std::size_t n, std::size_t x, const ChannelPair& pair, double epsilon);
double log_neyman_pearson_exact(std::size_t n, std::size_t x, const ChannelPair& pair, double epsilon);

struct ErrorEstimate {
  double alpha = 0.0;
  double beta = 0.0;
  double half_width_alpha = 0.0;  // 95% normal-approximation half-width
  double half_width_beta = 0.0;
  std::size_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// Trials are grouped in fixed blocks and reduced in block order, so the
// estimate depends only on the seed.
ErrorEstimate monte_carlo_errors(const Policy& policy, const TestFunction& test, std::size_t n,
                                 const ChannelPair& pair, std::uint64_t trials, std::uint64_t seed,
                                 Exec exec = Exec::parallel);

struct CheckResult {
  bool holds = true;
  double slack = 0.0;  // right side minus left side
};

// (1-s) log E_W(1-f) <= -s log E_W̄(1-f) + n channel_phi(s), s <= 0.
CheckResult converse_check(const Policy& policy, const TestFunction& test, std::size_t n,
                           const ChannelPair& pair, double s);

// -(1/n) log E_W̄(1-f) <= (D̄ + h(E_W(1-f)) / n) / E_W(1-f).
CheckResult weak_converse_check(const Policy& policy, const TestFunction& test, std::size_t n,
                                const ChannelPair& pair);

// Tolerance below zero that the converse checks still accept.
inline constexpr double kConverseSlackTolerance = 1e-9;

}  // namespace explab
