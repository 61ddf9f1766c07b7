#pragma once

#include <span>
#include <vector>

#include "explab/distribution.hpp"

namespace explab {

/// Log-domain view of an ordered pair (P, P̄) over a shared finite alphabet.
///
/// Caches log p and log p̄ (log 0 is stored as -inf, never produced by
/// underflow) so the cumulant function
///
///     phi(s) = log sum_y p(y)^(1-s) p̄(y)^s
///
/// can be evaluated at many tilts by log-sum-exp. Conventions follow the
/// finite-alphabet specialization of the integral: 0 log 0 = 0 and 0^0 = 1.
/// For s < 0 an outcome with p > 0 = p̄ makes phi infinite; for s > 1 an
/// outcome with p̄ > 0 = p does.
class LogPair {
 public:
  LogPair(std::span<const double> p, std::span<const double> pbar);

  std::size_t size() const { return log_p_.size(); }
  std::span<const double> log_p() const { return log_p_; }
  std::span<const double> log_pbar() const { return log_pbar_; }

  // phi(s) with the conventions above; may return +inf.
  double phi(double s) const;

  // The continuous extension of phi on [0, 1]: only the common support
  // contributes, so the endpoints are the one-sided limits
  // log P(supp P̄) and log P̄(supp P). Equal to phi(s) on (0, 1) and at the
  // endpoints whenever the supports coincide. Returns -inf for disjoint supports.
  double phi_unit(double s) const;

  struct Derivatives {
    double first;   // E_{P_s}[log(p̄/p)]
    double second;  // Var_{P_s}[log(p̄/p)]
  };
  // Throws UndefinedError if phi(s) is infinite or the log-ratio is not
  // finite on the support of P_s.
  Derivatives derivatives(double s) const;

  // Tilted law P_s(y) = p^(1-s) p̄^s / Phi(s), written into `out`.
  void tilt(double s, std::span<double> out) const;

  // D(P_s || P̄) via (s-1) phi'(s) - phi(s).
  double divergence_to_pbar(double s) const;

  double relative_entropy() const;          // D(P || P̄)
  double reverse_relative_entropy() const;  // D(P̄ || P)

  // log min{p̄/p : p > 0}; -inf if some p > 0 has p̄ = 0.
  double slope_R() const;
  // log P(argmin set of p̄/p): the intercept of phi(s) ~ s R + c as s -> -inf.
  double asymptotic_intercept() const;
  // P_{-inf}: p restricted to the argmin set of p̄/p (log-ratios within 1e-12
  // of the minimum) and renormalized.
  std::vector<double> minus_infinity_law() const;
  // D(P_{-inf} || P̄).
  double r0() const;

 private:
  // Shared log-sum-exp; `term` returns the log of each summand or NaN to skip.
  template <class Term>
  double log_sum(Term&& term) const;
  double phi_near_zero(double s) const;

  std::vector<double> log_p_;
  std::vector<double> log_pbar_;
  bool same_support_ = true;
};

// Span-level relative entropy with 0 log 0 = 0; +inf when p > 0 = q somewhere.
double relative_entropy(std::span<const double> p, std::span<const double> q);

// Distribution-level operations. All throw AlphabetMismatch on differing labels.
double relative_entropy(const Distribution& p, const Distribution& pbar);
double phi(const Distribution& p, const Distribution& pbar, double s);
LogPair::Derivatives phi_derivatives(const Distribution& p, const Distribution& pbar, double s);
Distribution tilted(const Distribution& p, const Distribution& pbar, double s);

struct LlrStats {
  double slope_R;  // lim_{s->-inf} phi(s)/s, nats
  double r0;       // D(P_{-inf} || P̄), nats
  Distribution p_minus_infinity;
};
LlrStats llr_stats(const Distribution& p, const Distribution& pbar);

}  // namespace explab
