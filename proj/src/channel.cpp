#include "explab/channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "explab/errors.hpp"
#include "explab/scalar_search.hpp"

namespace explab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kLambdaCells = 200;
constexpr std::size_t kExhaustivePairLimit = 64;
constexpr std::size_t kRegularityPoints = 512;

// log(lambda e^a + (1 - lambda) e^b) with exact endpoints.
double mixed_phi(double lambda, double a, double b) {
  if (lambda == 1.0) return a;
  if (lambda == 0.0) return b;
  if (a == kInf || b == kInf) return kInf;
  if (a == kNegInf) return std::log1p(-lambda) + b;
  if (b == kNegInf) return std::log(lambda) + a;
  // log(lambda e^a + (1 - lambda) e^b), exact when a == b.
  return a >= b ? a + std::log1p((1.0 - lambda) * std::expm1(b - a)) : b + std::log1p(lambda * std::expm1(a - b));
}

double hk_objective(double s, double r, double phi_value) {
  if (phi_value == kInf) return kNegInf;
  return (-s * r - phi_value) / (1.0 - s);
}

}  // namespace

Channel::Channel(std::vector<std::string> input_labels, std::vector<std::string> output_labels,
                 std::vector<std::vector<double>> rows)
    : input_labels_(std::move(input_labels)),
      output_labels_(std::move(output_labels)),
      rows_(std::move(rows)) {
  if (rows_.empty()) throw InvalidDistribution("channel: at least one input is required");
  if (input_labels_.size() != rows_.size()) {
    throw InvalidDistribution("channel: input label count does not match row count");
  }
  if (std::set<std::string>(input_labels_.begin(), input_labels_.end()).size() != input_labels_.size() ||
      std::set<std::string>(output_labels_.begin(), output_labels_.end()).size() != output_labels_.size()) {
    throw InvalidDistribution("channel: labels must be unique");
  }
  for (const auto& row : rows_) {
    if (row.size() != output_labels_.size()) {
      throw InvalidDistribution("channel: row length does not match output alphabet");
    }
    validate_probabilities(row, "channel row");
  }
}

Distribution Channel::row_distribution(std::size_t x) const { return Distribution(output_labels_, rows_.at(x)); }

ChannelPair::ChannelPair(Channel w, Channel wbar) : w_(std::move(w)), wbar_(std::move(wbar)) {
  if (w_.input_labels() != wbar_.input_labels() || w_.output_labels() != wbar_.output_labels()) {
    throw AlphabetMismatch("channel pair: W and W̄ must share input and output labels");
  }
  kernels_.reserve(w_.inputs());
  for (std::size_t x = 0; x < w_.inputs(); ++x) kernels_.emplace_back(w_.row(x), wbar_.row(x));
}

ChannelPair ChannelPair::restricted(const std::vector<std::size_t>& inputs) const {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> w_rows;
  std::vector<std::vector<double>> wbar_rows;
  for (std::size_t x : inputs) {
    labels.push_back(w_.input_labels().at(x));
    w_rows.push_back(w_.rows().at(x));
    wbar_rows.push_back(wbar_.rows().at(x));
  }
  return ChannelPair(Channel(labels, w_.output_labels(), std::move(w_rows)),
                     Channel(labels, w_.output_labels(), std::move(wbar_rows)));
}

InputValue channel_phi(double s, const ChannelPair& pair) {
  InputValue best{pair.row_pair(0).phi(s), 0};
  for (std::size_t x = 1; x < pair.inputs(); ++x) {
    const double v = pair.row_pair(x).phi(s);
    if (v > best.value) best = {v, x};
  }
  return best;
}

InputValue stein_channel(const ChannelPair& pair) {
  InputValue best{pair.row_pair(0).relative_entropy(), 0};
  for (std::size_t x = 1; x < pair.inputs(); ++x) {
    const double v = pair.row_pair(x).relative_entropy();
    if (v > best.value) best = {v, x};
  }
  return best;
}

InputValue chernoff_channel(const ChannelPair& pair, Exec exec) {
  InputValue best{chernoff(pair.row_pair(0), exec).value, 0};
  for (std::size_t x = 1; x < pair.inputs(); ++x) {
    const double v = chernoff(pair.row_pair(x), exec).value;
    if (v > best.value) best = {v, x};
  }
  return best;
}

InputValue hoeffding_channel(double r, const ChannelPair& pair, Exec exec) {
  InputValue best{hoeffding(r, pair.row_pair(0), exec).value, 0};
  for (std::size_t x = 1; x < pair.inputs(); ++x) {
    const double v = hoeffding(r, pair.row_pair(x), exec).value;
    if (v > best.value) best = {v, x};
  }
  return best;
}

EnvelopeAsymptote envelope_asymptote(const ChannelPair& pair) {
  // As s -> -inf each row behaves like s R_x + c_x; the envelope follows the
  // steepest slope, and among equally steep rows the largest intercept.
  EnvelopeAsymptote best{pair.row_pair(0).slope_R(), pair.row_pair(0).r0(), 0};
  double best_intercept = pair.row_pair(0).asymptotic_intercept();
  for (std::size_t x = 1; x < pair.inputs(); ++x) {
    const auto& row = pair.row_pair(x);
    const double slope = row.slope_R();
    const double intercept = row.asymptotic_intercept();
    if (slope < best.slope_R || (slope == best.slope_R && intercept > best_intercept)) {
      best = {slope, row.r0(), x};
      best_intercept = intercept;
    }
  }
  return best;
}

BoundResult hk_channel(double r, const ChannelPair& pair, Exec exec) {
  if (std::isnan(r)) throw DomainError("hk_channel: rate r is NaN");
  if (r <= stein_channel(pair).value) return {0.0, 0.0, Regime::boundary_s0};
  const auto asym = envelope_asymptote(pair);
  auto phi = [&](double s) { return channel_phi(s, pair).value; };
  if (r > asym.r0) {
    const auto at_r0 = sup_nonpositive_tilt(asym.r0, phi, asym.slope_R, exec);
    return {at_r0.value + (r - asym.r0), kNegInf, Regime::beyond_r0};
  }
  return sup_nonpositive_tilt(r, phi, asym.slope_R, exec);
}

BestPairResult hk_best_pair(double r, const ChannelPair& pair, Exec exec) {
  if (std::isnan(r)) throw DomainError("hk_best_pair: rate r is NaN");
  const std::size_t n_inputs = pair.inputs();

  std::vector<std::size_t> candidates;
  if (n_inputs <= kExhaustivePairLimit) {
    for (std::size_t x = 0; x < n_inputs; ++x) candidates.push_back(x);
  } else {
    std::set<std::size_t> attained;
    for (std::size_t i = 0; i < 64; ++i) {
      const double t = static_cast<double>(i) / 64.0;
      attained.insert(channel_phi(-t / (1.0 - t), pair).input);
    }
    attained.insert(envelope_asymptote(pair).input);
    candidates.assign(attained.begin(), attained.end());
  }

  // Per-row cumulants on the shared compact grid t_i = i / cells, s = -t / (1 - t).
  const std::size_t cells = kTiltGridCells;
  std::vector<double> s_grid(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(cells);
    s_grid[i] = -t / (1.0 - t);
  }
  std::vector<std::vector<double>> row_phi(candidates.size(), std::vector<double>(cells));
  for_each_index(candidates.size() * cells, [&](std::size_t k) {
    const std::size_t c = k / cells;
    const std::size_t i = k % cells;
    row_phi[c][i] = pair.row_pair(candidates[c]).phi(s_grid[i]);
  }, exec);

  // The envelope maximizer is always among the inner candidates, so every
  // mixture value is at least hk_channel(r).
  const BoundResult envelope = hk_channel(r, pair, exec);

  auto inner_sup = [&](std::size_t a, std::size_t b, double lambda) {
    const auto& pa = pair.row_pair(candidates[a]);
    const auto& pb = pair.row_pair(candidates[b]);
    std::vector<double> values(cells);
    for (std::size_t i = 0; i < cells; ++i) {
      values[i] = hk_objective(s_grid[i], r, mixed_phi(lambda, row_phi[a][i], row_phi[b][i]));
    }
    const auto grid_best = first_argmax(values);
    double best = grid_best.value;
    auto objective_t = [&](double t) {
      const double s = -t / (1.0 - t);
      return hk_objective(s, r, mixed_phi(lambda, pa.phi(s), pb.phi(s)));
    };
    if (std::isfinite(best)) {
      const std::size_t lo = grid_best.index == 0 ? 0 : grid_best.index - 1;
      const std::size_t hi = std::min(grid_best.index + 1, cells - 1);
      if (lo < hi) {
        const double lo_t = static_cast<double>(lo) / static_cast<double>(cells);
        const double hi_t = static_cast<double>(hi) / static_cast<double>(cells);
        best = std::max(best, golden_maximize(objective_t, lo_t, hi_t).value);
      }
    }
    double slope;
    if (lambda == 1.0) {
      slope = pa.slope_R();
    } else if (lambda == 0.0) {
      slope = pb.slope_R();
    } else {
      slope = std::min(pa.slope_R(), pb.slope_R());
    }
    best = std::max({best, r + slope, 0.0});  // s = 0 gives exactly zero
    if (std::isfinite(envelope.argmax_s)) {
      const double s = envelope.argmax_s;
      best = std::max(best, hk_objective(s, r, mixed_phi(lambda, pa.phi(s), pb.phi(s))));
    }
    return best;
  };

  struct PairCandidate {
    std::size_t a, b;
  };
  std::vector<PairCandidate> pairs;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    pairs.push_back({a, a});
    for (std::size_t b = a + 1; b < candidates.size(); ++b) pairs.push_back({a, b});
  }

  // The mixed objective is convex in lambda: grid on 1/200 steps, then golden
  // section on the neighbouring cells.
  const std::size_t lambda_points = kLambdaCells + 1;
  std::vector<double> grid_values(pairs.size() * lambda_points, kInf);
  for_each_index(grid_values.size(), [&](std::size_t k) {
    const auto& pc = pairs[k / lambda_points];
    const std::size_t j = k % lambda_points;
    if (pc.a == pc.b && j != kLambdaCells) return;
    const double lambda = static_cast<double>(j) / static_cast<double>(kLambdaCells);
    grid_values[k] = inner_sup(pc.a, pc.b, lambda);
  }, exec);

  std::vector<BestPairResult> per_pair(pairs.size());
  for_each_index(pairs.size(), [&](std::size_t k) {
    const auto& pc = pairs[k];
    const double* vals = &grid_values[k * lambda_points];
    std::size_t arg = 0;
    for (std::size_t j = 1; j < lambda_points; ++j) {
      if (vals[j] < vals[arg]) arg = j;
    }
    double lambda = static_cast<double>(arg) / static_cast<double>(kLambdaCells);
    double value = vals[arg];
    if (pc.a != pc.b && std::isfinite(value)) {
      const double lo = static_cast<double>(arg == 0 ? 0 : arg - 1) / kLambdaCells;
      const double hi = static_cast<double>(std::min(arg + 1, kLambdaCells)) / kLambdaCells;
      const auto polished =
          golden_maximize([&](double l) { return -inner_sup(pc.a, pc.b, l); }, lo, hi, 1e-10);
      if (-polished.value < value) {
        value = -polished.value;
        lambda = polished.x;
      }
    }
    per_pair[k] = {{candidates[pc.a], candidates[pc.b], lambda}, value};
  }, exec);

  BestPairResult best = per_pair.front();
  for (std::size_t k = 1; k < per_pair.size(); ++k) {
    if (per_pair[k].value < best.value) best = per_pair[k];
  }
  auto& in = best.input;
  if (in.x_plus == in.x_minus) {
    in.lambda = 1.0;
  } else if (in.lambda == 1.0) {
    in.x_minus = in.x_plus;
  } else if (in.lambda == 0.0) {
    in = {in.x_minus, in.x_minus, 1.0};
  }
  return best;
}

RegularityReport regularity_check(const ChannelPair& pair, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("regularity_check: epsilon must lie in (0, 1)");
  RegularityReport report;
  report.epsilon = epsilon;
  report.window_lo = -epsilon;
  report.window_hi = 0.0;
  const auto grid = linear_grid(-epsilon, 0.0, kRegularityPoints);
  for (std::size_t x = 0; x < pair.inputs(); ++x) {
    const auto& row = pair.row_pair(x);
    if (!std::isfinite(row.phi(-epsilon))) {
      report.regular = false;
      report.sup_phi_second = kInf;
      report.stein_slope_gap = kInf;
      return report;
    }
    for (double s : grid) report.sup_phi_second = std::max(report.sup_phi_second, row.derivatives(s).second);
  }
  const double envelope = channel_phi(-epsilon, pair).value;
  report.stein_slope_gap = std::abs(envelope / epsilon - stein_channel(pair).value);
  return report;
}

ChannelPair sec4_example(double a, double b, double p, double q) {
  if (!(a >= 1.0 && b >= 1.0)) throw DomainError("sec4_example: a and b must be at least 1");
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) throw DomainError("sec4_example: p and q must lie in (0, 1)");
  if (a * p > 1.0 || b * q > 1.0) throw DomainError("sec4_example: a p and b q must not exceed 1");
  const std::vector<std::string> inputs{"0", "1"};
  const std::vector<std::string> outputs{"0", "1"};
  Channel w(inputs, outputs, {{a * p, 1.0 - a * p}, {b * q, 1.0 - b * q}});
  Channel wbar(inputs, outputs, {{p, 1.0 - p}, {q, 1.0 - q}});
  return ChannelPair(std::move(w), std::move(wbar));
}

}  // namespace explab
