#pragma once

#include <string>
#include <vector>

#include "explab/distribution.hpp"
#include "explab/divergence.hpp"
#include "explab/exponents.hpp"
#include "explab/parallel.hpp"

namespace explab {

/// Row-stochastic matrix over labeled input and output alphabets.
class Channel {
 public:
  Channel(std::vector<std::string> input_labels, std::vector<std::string> output_labels,
          std::vector<std::vector<double>> rows);

  std::size_t inputs() const { return rows_.size(); }
  std::size_t outputs() const { return output_labels_.size(); }
  const std::vector<std::string>& input_labels() const { return input_labels_; }
  const std::vector<std::string>& output_labels() const { return output_labels_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::span<const double> row(std::size_t x) const { return rows_[x]; }
  Distribution row_distribution(std::size_t x) const;

  friend bool operator==(const Channel&, const Channel&) = default;

 private:
  std::vector<std::string> input_labels_;
  std::vector<std::string> output_labels_;
  std::vector<std::vector<double>> rows_;
};

/// The two hypotheses W (null) and W̄ over shared alphabets, with the per-row
/// log-domain kernels cached.
class ChannelPair {
 public:
  ChannelPair(Channel w, Channel wbar);

  const Channel& w() const { return w_; }
  const Channel& wbar() const { return wbar_; }
  std::size_t inputs() const { return w_.inputs(); }
  std::size_t outputs() const { return w_.outputs(); }
  const LogPair& row_pair(std::size_t x) const { return kernels_[x]; }

  // Same channels with only the listed inputs kept, in the given order.
  ChannelPair restricted(const std::vector<std::size_t>& inputs) const;

 private:
  Channel w_;
  Channel wbar_;
  std::vector<LogPair> kernels_;
};

// A channel-level value together with the input that attains it.
struct InputValue {
  double value = 0.0;
  std::size_t input = 0;
};

// max_x phi(s | W_x || W̄_x); smallest index on ties.
InputValue channel_phi(double s, const ChannelPair& pair);

InputValue stein_channel(const ChannelPair& pair);
InputValue chernoff_channel(const ChannelPair& pair, Exec exec = Exec::parallel);
InputValue hoeffding_channel(double r, const ChannelPair& pair, Exec exec = Exec::parallel);

// Behaviour of the envelope as s -> -inf: slope min_x R_x and the threshold
// past which the Han-Kobayashi bound is linear. `input` is the row that
// dominates the envelope there.
struct EnvelopeAsymptote {
  double slope_R = 0.0;
  double r0 = 0.0;
  std::size_t input = 0;
};
EnvelopeAsymptote envelope_asymptote(const ChannelPair& pair);

// sup_{s<=0} (-s r - channel_phi(s)) / (1 - s).
BoundResult hk_channel(double r, const ChannelPair& pair, Exec exec = Exec::parallel);

struct TwoPointInput {
  std::size_t x_plus = 0;
  std::size_t x_minus = 0;
  double lambda = 1.0;  // weight on x_plus
};

struct BestPairResult {
  TwoPointInput input;
  double value = 0.0;
};

// Best input distribution supported on at most two inputs for the
// Han-Kobayashi objective with the mixed cumulant log(lambda Phi+ + (1-lambda) Phi-).
// Endpoint optima are reported as degenerate pairs (x, x, 1).
BestPairResult hk_best_pair(double r, const ChannelPair& pair, Exec exec = Exec::parallel);

struct RegularityReport {
  double epsilon = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double sup_phi_second = 0.0;  // +inf for rows with an infinite cumulant below zero
  double stein_slope_gap = 0.0;
  bool regular = true;
};

// Sup of phi'' over inputs and a 512-point grid on [-epsilon, 0], and the gap
// |channel_phi(-epsilon) / epsilon - sup_x D(W_x || W̄_x)|.
RegularityReport regularity_check(const ChannelPair& pair, double epsilon);

// Two-input binary example: W0 = (ap, 1-ap), W̄0 = (p, 1-p), W1 = (bq, 1-bq), W̄1 = (q, 1-q).
ChannelPair sec4_example(double a, double b, double p, double q);

}  // namespace explab
