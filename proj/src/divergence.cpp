#include "explab/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "explab/errors.hpp"

namespace explab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// Log-ratios this close to the minimum count as ties (log p̄ - log p carries
// rounding from both logarithms).
constexpr double kTieTolerance = 1e-12;

}  // namespace

LogPair::LogPair(std::span<const double> p, std::span<const double> pbar) {
  if (p.size() != pbar.size()) throw AlphabetMismatch("pair: alphabets differ in size");
  log_p_.reserve(p.size());
  log_pbar_.reserve(p.size());
  for (std::size_t y = 0; y < p.size(); ++y) {
    log_p_.push_back(safe_log(p[y]));
    log_pbar_.push_back(safe_log(pbar[y]));
    same_support_ = same_support_ && ((p[y] > 0.0) == (pbar[y] > 0.0));
  }
}

double LogPair::phi_near_zero(double s) const {
  // log(1 + sum_y p (e^{s llr} - 1)): exact for identical pairs, and free of the
  // cancellation in log(sum) when Phi(s) is close to one.
  double acc = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    if (log_p_[y] == kNegInf) continue;
    acc += std::exp(log_p_[y]) * std::expm1(s * (log_pbar_[y] - log_p_[y]));
  }
  return std::log1p(acc);
}

template <class Term>
double LogPair::log_sum(Term&& term) const {
  // Two passes: find the max log-term, then accumulate exp(term - max).
  double top = kNegInf;
  const std::size_t n = size();
  for (std::size_t y = 0; y < n; ++y) {
    double t = term(y);
    if (std::isnan(t)) continue;
    if (t == kInf) return kInf;
    top = std::max(top, t);
  }
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    double t = term(y);
    if (std::isnan(t) || t == kNegInf) continue;
    acc += std::exp(t - top);
  }
  return top + std::log(acc);
}

double LogPair::phi(double s) const {
  if (s == 0.0 || s == 1.0) return 0.0;  // sum of p, or of p̄, under 0^0 = 1
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double value = log_sum([&](std::size_t y) -> double {
    const double lp = log_p_[y];
    const double lq = log_pbar_[y];
    const bool p_zero = lp == kNegInf;
    const bool q_zero = lq == kNegInf;
    if (p_zero && q_zero) return nan;
    if (p_zero) {
      if (s < 1.0) return nan;
      return s == 1.0 ? lq : kInf;
    }
    if (q_zero) {
      if (s > 0.0) return nan;
      return s == 0.0 ? lp : kInf;
    }
    return (1.0 - s) * lp + s * lq;
  });
  if (same_support_ && std::abs(value) < 0.5) return phi_near_zero(s);
  return value;
}

double LogPair::phi_unit(double s) const {
  if (same_support_) return phi(s);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return log_sum([&](std::size_t y) -> double {
    const double lp = log_p_[y];
    const double lq = log_pbar_[y];
    if (lp == kNegInf || lq == kNegInf) return nan;
    return (1.0 - s) * lp + s * lq;
  });
}

LogPair::Derivatives LogPair::derivatives(double s) const {
  const double value = phi(s);
  if (!std::isfinite(value)) throw UndefinedError("phi is not finite at the requested tilt");
  std::vector<double> weights(size());
  tilt(s, weights);
  double mean = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    if (weights[y] == 0.0) continue;
    const double ratio = log_pbar_[y] - log_p_[y];
    if (!std::isfinite(ratio)) {
      throw UndefinedError("log-likelihood ratio is infinite on the support of the tilted law");
    }
    mean += weights[y] * ratio;
  }
  double var = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    if (weights[y] == 0.0) continue;
    const double d = (log_pbar_[y] - log_p_[y]) - mean;
    var += weights[y] * d * d;
  }
  return {mean, var};
}

void LogPair::tilt(double s, std::span<double> out) const {
  const double norm = phi(s);
  if (!std::isfinite(norm)) throw UndefinedError("tilted law undefined: phi is not finite");
  double total = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    const double lp = log_p_[y];
    const double lq = log_pbar_[y];
    double term;
    if (lp == kNegInf && lq == kNegInf) {
      term = kNegInf;
    } else if (lp == kNegInf) {
      term = s == 1.0 ? lq : kNegInf;
    } else if (lq == kNegInf) {
      term = s == 0.0 ? lp : kNegInf;
    } else {
      term = (1.0 - s) * lp + s * lq;
    }
    out[y] = term == kNegInf ? 0.0 : std::exp(term - norm);
    total += out[y];
  }
  for (double& v : out) v /= total;
}

double LogPair::divergence_to_pbar(double s) const {
  const auto d = derivatives(s);
  return (s - 1.0) * d.first - phi(s);
}

double LogPair::relative_entropy() const {
  double acc = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    if (log_p_[y] == kNegInf) continue;
    if (log_pbar_[y] == kNegInf) return kInf;
    acc += std::exp(log_p_[y]) * (log_p_[y] - log_pbar_[y]);
  }
  return acc;
}

double LogPair::reverse_relative_entropy() const {
  double acc = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    if (log_pbar_[y] == kNegInf) continue;
    if (log_p_[y] == kNegInf) return kInf;
    acc += std::exp(log_pbar_[y]) * (log_pbar_[y] - log_p_[y]);
  }
  return acc;
}

double LogPair::slope_R() const {
  double best = kInf;
  for (std::size_t y = 0; y < size(); ++y) {
    if (log_p_[y] == kNegInf) continue;
    best = std::min(best, log_pbar_[y] - log_p_[y]);
  }
  return best;
}

std::vector<double> LogPair::minus_infinity_law() const {
  const double slope = slope_R();
  std::vector<double> law(size(), 0.0);
  double total = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    if (log_p_[y] == kNegInf) continue;
    if (log_pbar_[y] - log_p_[y] <= slope + kTieTolerance) {
      law[y] = std::exp(log_p_[y]);
      total += law[y];
    }
  }
  for (double& v : law) v /= total;
  return law;
}

double LogPair::asymptotic_intercept() const {
  const double slope = slope_R();
  double mass = 0.0;
  for (std::size_t y = 0; y < size(); ++y) {
    if (log_p_[y] == kNegInf) continue;
    if (log_pbar_[y] - log_p_[y] <= slope + kTieTolerance) mass += std::exp(log_p_[y]);
  }
  return std::log(mass);
}

double LogPair::r0() const {
  const auto law = minus_infinity_law();
  std::vector<double> pbar(size());
  for (std::size_t y = 0; y < size(); ++y) pbar[y] = std::exp(log_pbar_[y]);
  return explab::relative_entropy(law, pbar);
}

double relative_entropy(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw AlphabetMismatch("relative entropy: alphabets differ in size");
  double acc = 0.0;
  for (std::size_t y = 0; y < p.size(); ++y) {
    if (p[y] == 0.0) continue;
    if (q[y] == 0.0) return kInf;
    acc += p[y] * (std::log(p[y]) - std::log(q[y]));
  }
  return acc;
}

double relative_entropy(const Distribution& p, const Distribution& pbar) {
  require_same_alphabet(p, pbar);
  return relative_entropy(p.probs(), pbar.probs());
}

double phi(const Distribution& p, const Distribution& pbar, double s) {
  require_same_alphabet(p, pbar);
  return LogPair(p.probs(), pbar.probs()).phi(s);
}

LogPair::Derivatives phi_derivatives(const Distribution& p, const Distribution& pbar, double s) {
  require_same_alphabet(p, pbar);
  return LogPair(p.probs(), pbar.probs()).derivatives(s);
}

Distribution tilted(const Distribution& p, const Distribution& pbar, double s) {
  require_same_alphabet(p, pbar);
  std::vector<double> out(p.size());
  LogPair(p.probs(), pbar.probs()).tilt(s, out);
  return Distribution(p.labels(), std::move(out));
}

LlrStats llr_stats(const Distribution& p, const Distribution& pbar) {
  require_same_alphabet(p, pbar);
  LogPair pair(p.probs(), pbar.probs());
  Distribution law(p.labels(), pair.minus_infinity_law());
  const double r0 = relative_entropy(law.probs(), pbar.probs());
  return {pair.slope_R(), r0, std::move(law)};
}

}  // namespace explab
