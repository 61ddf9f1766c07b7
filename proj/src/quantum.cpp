#include "explab/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "explab/counter_rng.hpp"
#include "explab/divergence.hpp"
#include "explab/errors.hpp"
#include "explab/scalar_search.hpp"

namespace explab {

namespace {

using Complex = std::complex<double>;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::size_t kThetaPoints = 256;
constexpr std::size_t kPhiPoints = 128;
constexpr std::size_t kCoarseThetaPoints = 32;
constexpr std::size_t kCoarsePhiPoints = 16;
constexpr double kFineStep = 1e-10;
constexpr double kCoarseStep = 1e-8;
// Tilt grid for the LOCC bounds, where every point costs a measurement search.
constexpr std::size_t kMeasuredTiltCells = 512;

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Bloch vector (x, y, z) of a qubit matrix (I + x X + y Y + z Z) / 2.
struct Bloch {
  double x, y, z;
};

Bloch bloch_of(const ComplexMatrix& m) {
  return {2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(), (m(0, 0) - m(1, 1)).real()};
}

Eigen::Vector3d direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// A measurement objective evaluated on the induced pair of distributions.
using PairObjective = std::function<double(std::span<const double> p, std::span<const double> q)>;

struct Angles {
  double theta, phi, value;
};

class ProjectiveSearch {
 public:
  ProjectiveSearch(const DensityMatrix& rho, const DensityMatrix& sigma, const PairObjective& objective)
      : a_(bloch_of(rho.matrix())), b_(bloch_of(sigma.matrix())), objective_(objective) {}

  double evaluate(double theta, double phi) const {
    const auto n = direction(theta, phi);
    const double pa = 0.5 * (1.0 + n[0] * a_.x + n[1] * a_.y + n[2] * a_.z);
    const double pb = 0.5 * (1.0 + n[0] * b_.x + n[1] * b_.y + n[2] * b_.z);
    const double p[2] = {std::clamp(pa, 0.0, 1.0), 1.0 - std::clamp(pa, 0.0, 1.0)};
    const double q[2] = {std::clamp(pb, 0.0, 1.0), 1.0 - std::clamp(pb, 0.0, 1.0)};
    return objective_(p, q);
  }

  // theta_i = i pi / (T - 1), phi_j = 2 pi j / F; then pattern search.
  Angles run(std::size_t theta_points, std::size_t phi_points, double min_step, Exec exec) const {
    std::vector<double> values(theta_points * phi_points);
    const double dtheta = std::numbers::pi / static_cast<double>(theta_points - 1);
    const double dphi = 2.0 * std::numbers::pi / static_cast<double>(phi_points);
    evaluate_indexed(values, [&](std::size_t k) {
      return evaluate(dtheta * static_cast<double>(k / phi_points), dphi * static_cast<double>(k % phi_points));
    }, exec);
    const auto best = first_argmax(values);
    Angles at{dtheta * static_cast<double>(best.index / phi_points),
              dphi * static_cast<double>(best.index % phi_points), best.value};
    return polish(at, dtheta, dphi, min_step);
  }

  Angles polish(Angles at, double dtheta, double dphi, double min_step) const {
    if (!std::isfinite(at.value)) return at;
    while (dtheta > min_step || dphi > min_step) {
      bool moved = false;
      const double moves[4][2] = {{dtheta, 0.0}, {-dtheta, 0.0}, {0.0, dphi}, {0.0, -dphi}};
      for (const auto& mv : moves) {
        const double v = evaluate(at.theta + mv[0], at.phi + mv[1]);
        if (v > at.value) {
          at = {at.theta + mv[0], at.phi + mv[1], v};
          moved = true;
        }
      }
      if (!moved) {
        dtheta *= 0.5;
        dphi *= 0.5;
      }
    }
    return at;
  }

 private:
  Bloch a_;
  Bloch b_;
  const PairObjective& objective_;
};

// Rank-one POVM built from the columns of V: M_j = S^{-1/2} v_j v_j^† S^{-1/2}.
class RankOneFamily {
 public:
  RankOneFamily(const DensityMatrix& rho, const DensityMatrix& sigma, const PairObjective& objective)
      : rho_(rho.matrix()), sigma_(sigma.matrix()), objective_(objective) {}

  static ComplexMatrix columns(std::span<const double> params, std::size_t dim, std::size_t outcomes) {
    ComplexMatrix v(dim, outcomes);
    for (std::size_t j = 0; j < outcomes; ++j) {
      for (std::size_t i = 0; i < dim; ++i) {
        const std::size_t k = 2 * (j * dim + i);
        v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(params[k], params[k + 1]);
      }
    }
    return v;
  }

  // Returns false when S is numerically singular.
  static bool whitened(const ComplexMatrix& v, ComplexMatrix& out) {
    const ComplexMatrix s = v * v.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(s);
    const auto& lam = eig.eigenvalues();
    if (lam.minCoeff() <= 1e-12 * std::max(1.0, lam.maxCoeff())) return false;
    const Eigen::VectorXd inv_sqrt = lam.cwiseSqrt().cwiseInverse();
    out = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint() * v;
    return true;
  }

  double evaluate(std::span<const double> params, std::size_t dim, std::size_t outcomes) const {
    ComplexMatrix a;
    if (!whitened(columns(params, dim, outcomes), a)) return kNegInf;
    std::vector<double> p(outcomes);
    std::vector<double> q(outcomes);
    double sp = 0.0;
    double sq = 0.0;
    for (std::size_t j = 0; j < outcomes; ++j) {
      const auto col = a.col(static_cast<Eigen::Index>(j));
      p[j] = std::max(0.0, (col.adjoint() * rho_ * col)(0, 0).real());
      q[j] = std::max(0.0, (col.adjoint() * sigma_ * col)(0, 0).real());
      sp += p[j];
      sq += q[j];
    }
    for (std::size_t j = 0; j < outcomes; ++j) {
      p[j] /= sp;
      q[j] /= sq;
    }
    return objective_(p, q);
  }

  // Coordinate hill climb with step halving.
  double refine(std::vector<double>& params, std::size_t dim, std::size_t outcomes) const {
    double best = evaluate(params, dim, outcomes);
    if (!std::isfinite(best)) return best;
    for (double step = 0.05; step > 1e-6; step *= 0.5) {
      for (int sweep = 0; sweep < 8; ++sweep) {
        bool moved = false;
        for (std::size_t k = 0; k < params.size(); ++k) {
          for (double sign : {1.0, -1.0}) {
            const double saved = params[k];
            params[k] = saved + sign * step;
            const double v = evaluate(params, dim, outcomes);
            if (v > best) {
              best = v;
              moved = true;
            } else {
              params[k] = saved;
            }
          }
        }
        if (!moved) break;
      }
    }
    return best;
  }

 private:
  ComplexMatrix rho_;
  ComplexMatrix sigma_;
  const PairObjective& objective_;
};

std::vector<double> gaussian_params(std::size_t count, std::uint64_t seed, std::uint64_t index) {
  const CounterRng rng(seed);
  std::vector<double> params(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Box-Muller on two independent uniforms; 1 - u keeps the log finite.
    const double u1 = 1.0 - rng.uniform(index, k, 0);
    const double u2 = rng.uniform(index, k, 1);
    params[k] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  return params;
}

Povm povm_from_params(std::span<const double> params, std::size_t dim, std::size_t outcomes) {
  ComplexMatrix a;
  RankOneFamily::whitened(RankOneFamily::columns(params, dim, outcomes), a);
  std::vector<ComplexMatrix> elements;
  for (std::size_t j = 0; j < outcomes; ++j) {
    const auto col = a.col(static_cast<Eigen::Index>(j));
    ComplexMatrix m = col * col.adjoint();
    elements.push_back(0.5 * (m + m.adjoint()));
  }
  return Povm(std::move(elements));
}

std::size_t outcomes_for_restart(std::size_t dim, std::size_t restart) { return dim + 1 + restart % 2; }

enum class Depth { coarse, full };

// Maximizes `objective` over the measurement family. Coarse depth searches
// projective measurements on a reduced grid only.
MeasuredOptimum search(const DensityMatrix& rho, const DensityMatrix& sigma, const PairObjective& objective,
                       Depth depth, const SearchOptions& options, Exec exec) {
  const std::size_t dim = rho.dim();
  MeasuredOptimum best{kNegInf, Povm(), MeasurementFamily::projective};
  if (dim == 2) {
    const ProjectiveSearch projective(rho, sigma, objective);
    const Angles at = depth == Depth::coarse
                          ? projective.run(kCoarseThetaPoints, kCoarsePhiPoints, kCoarseStep, exec)
                          : projective.run(kThetaPoints, kPhiPoints, kFineStep, exec);
    const auto n = direction(at.theta, at.phi);
    best = {at.value, Povm::projective(n[0], n[1], n[2]), MeasurementFamily::projective};
  } else {
    for (const auto* state : {&rho, &sigma}) {
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(state->matrix());
      Povm m = Povm::basis(eig.eigenvectors());
      const auto p = measure(rho, m);
      const auto q = measure(sigma, m);
      const double v = objective(p.probs(), q.probs());
      if (v > best.value) best = {v, std::move(m), MeasurementFamily::eigenbasis};
    }
  }
  if (depth == Depth::coarse) return best;

  const RankOneFamily family(rho, sigma, objective);
  std::vector<double> values(options.restarts, kNegInf);
  std::vector<std::vector<double>> params(options.restarts);
  for_each_index(options.restarts, [&](std::size_t i) {
    const std::size_t outcomes = outcomes_for_restart(dim, i);
    params[i] = gaussian_params(2 * dim * outcomes, options.seed, i);
    values[i] = family.refine(params[i], dim, outcomes);
  }, exec);
  const auto top = first_argmax(values);
  // The richer family is reported only when it wins by a clear margin.
  if (options.restarts > 0 && top.value > best.value + 1e-12) {
    best = {top.value, povm_from_params(params[top.index], dim, outcomes_for_restart(dim, top.index)),
            MeasurementFamily::rank_one_povm};
  }
  return best;
}

PairObjective divergence_objective() {
  return [](std::span<const double> p, std::span<const double> q) { return relative_entropy(p, q); };
}

// Continuous extension of phi on [0, 1], or the plain cumulant elsewhere.
double pair_phi(std::span<const double> p, std::span<const double> q, double s, bool unit) {
  const LogPair pair(p, q);
  return unit ? pair.phi_unit(s) : pair.phi(s);
}

// log of the smallest generalized eigenvalue of (sigma, rho): the slope of
// the measured envelope as s -> -inf.
double measured_slope(const DensityMatrix& rho, const DensityMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho.matrix());
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  const ComplexMatrix w = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();
  const ComplexMatrix m = w * sigma.matrix() * w;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> gen(0.5 * (m + m.adjoint()));
  return std::log(gen.eigenvalues().minCoeff());
}

}  // namespace

// ------------------------------------------------------------------ Types

DensityMatrix::DensityMatrix(ComplexMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) throw InvalidDistribution("density matrix must be square and nonempty");
  if (max_abs(m_ - m_.adjoint()) > kHermitianTolerance) throw InvalidDistribution("density matrix is not Hermitian");
  if (std::abs(m_.trace() - Complex(1.0, 0.0)) > kHermitianTolerance) {
    throw InvalidDistribution("density matrix trace is not 1");
  }
  if (eigenvalues().minCoeff() < -kHermitianTolerance) throw InvalidDistribution("density matrix is not positive");
}

DensityMatrix DensityMatrix::from_bloch(double x, double y, double z) {
  if (std::sqrt(x * x + y * y + z * z) > 1.0 + kHermitianTolerance) {
    throw InvalidDistribution("Bloch vector longer than 1");
  }
  ComplexMatrix m(2, 2);
  m << Complex(0.5 * (1.0 + z), 0.0), Complex(0.5 * x, -0.5 * y), Complex(0.5 * x, 0.5 * y),
      Complex(0.5 * (1.0 - z), 0.0);
  return DensityMatrix(m);
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

Povm::Povm(std::vector<ComplexMatrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw InvalidDistribution("POVM needs at least one element");
  const auto d = elements_.front().rows();
  ComplexMatrix total = ComplexMatrix::Zero(d, d);
  for (const auto& e : elements_) {
    if (e.rows() != d || e.cols() != d) throw InvalidDistribution("POVM elements differ in dimension");
    if (max_abs(e - e.adjoint()) > kHermitianTolerance) throw InvalidDistribution("POVM element is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (e + e.adjoint()), Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kHermitianTolerance) throw InvalidDistribution("POVM element is not positive");
    total += e;
  }
  if (max_abs(total - ComplexMatrix::Identity(d, d)) > kPovmSumTolerance) {
    throw InvalidDistribution("POVM elements do not sum to the identity");
  }
}

Povm::Povm() : Povm(std::vector<ComplexMatrix>{ComplexMatrix::Identity(2, 2)}) {}

Povm Povm::projective(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(norm > 0.0)) throw DomainError("projective measurement needs a nonzero direction");
  x /= norm;
  y /= norm;
  z /= norm;
  ComplexMatrix plus(2, 2);
  plus << Complex(0.5 * (1.0 + z), 0.0), Complex(0.5 * x, -0.5 * y), Complex(0.5 * x, 0.5 * y),
      Complex(0.5 * (1.0 - z), 0.0);
  ComplexMatrix minus = ComplexMatrix::Identity(2, 2) - plus;
  return Povm({plus, minus});
}

Povm Povm::basis(const ComplexMatrix& unitary) {
  std::vector<ComplexMatrix> elements;
  for (Eigen::Index j = 0; j < unitary.cols(); ++j) {
    const auto col = unitary.col(j);
    elements.push_back(col * col.adjoint());
  }
  return Povm(std::move(elements));
}

Povm random_rank_one_povm(std::size_t dim, std::size_t outcomes, std::uint64_t seed, std::uint64_t index) {
  if (outcomes < dim) throw DomainError("rank-one POVM needs at least dim outcomes");
  return povm_from_params(gaussian_params(2 * dim * outcomes, seed, index), dim, outcomes);
}

Distribution measure(const DensityMatrix& rho, const Povm& m) {
  if (rho.dim() != m.dim()) throw AlphabetMismatch("measurement and state dimensions differ");
  std::vector<double> probs;
  probs.reserve(m.size());
  for (const auto& e : m.elements()) {
    double v = (e * rho.matrix()).trace().real();
    if (v < 0.0) {
      if (v < -1e-14) throw InvalidDistribution("measurement produced a negative probability");
      v = 0.0;
    }
    probs.push_back(v);
  }
  return Distribution::normalized(std::move(probs));
}

double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw AlphabetMismatch("state dimensions differ");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> er(rho.matrix());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sigma.matrix());
  const auto& lr = er.eigenvalues();
  const auto& ls = es.eigenvalues();
  const ComplexMatrix overlap = er.eigenvectors().adjoint() * es.eigenvectors();
  double total = 0.0;
  for (Eigen::Index i = 0; i < lr.size(); ++i) {
    if (lr[i] <= kHermitianTolerance) continue;
    total += lr[i] * std::log(lr[i]);
    for (Eigen::Index j = 0; j < ls.size(); ++j) {
      const double weight = lr[i] * std::norm(overlap(i, j));
      if (weight <= kHermitianTolerance) continue;
      if (ls[j] <= kHermitianTolerance) return kInf;
      total -= weight * std::log(ls[j]);
    }
  }
  return std::max(0.0, total);
}

bool commute(const DensityMatrix& rho, const DensityMatrix& sigma, double tol) {
  if (rho.dim() != sigma.dim()) return false;
  return max_abs(rho.matrix() * sigma.matrix() - sigma.matrix() * rho.matrix()) <= tol;
}

const char* to_string(MeasurementFamily family) {
  switch (family) {
    case MeasurementFamily::projective: return "projective";
    case MeasurementFamily::rank_one_povm: return "rank_one_povm";
    case MeasurementFamily::eigenbasis: return "eigenbasis";
  }
  return "projective";
}

// ----------------------------------------------------------------- Search

void require_search_mode(const DensityMatrix& rho, const DensityMatrix& sigma, SearchMode mode) {
  if (rho.dim() != sigma.dim()) throw AlphabetMismatch("state dimensions differ");
  if (mode == SearchMode::best_effort) return;
  if (rho.dim() != 2) throw UnsupportedError("certified measurement search supports qubits only");
  if (rho.eigenvalues().minCoeff() < kCertifiedMinEigenvalue ||
      sigma.eigenvalues().minCoeff() < kCertifiedMinEigenvalue) {
    throw UnsupportedError("certified measurement search needs strictly positive states");
  }
}

MeasuredOptimum max_measured_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        const SearchOptions& options, Exec exec) {
  require_search_mode(rho, sigma, options.mode);
  return search(rho, sigma, divergence_objective(), Depth::full, options, exec);
}

MeasuredOptimum measured_phi_sup(double s, const DensityMatrix& rho, const DensityMatrix& sigma,
                                 const SearchOptions& options, Exec exec) {
  if (!(s <= 0.0)) throw DomainError("measured_phi_sup: s must be nonpositive");
  require_search_mode(rho, sigma, options.mode);
  const PairObjective objective = [s](std::span<const double> p, std::span<const double> q) {
    return pair_phi(p, q, s, false);
  };
  return search(rho, sigma, objective, Depth::full, options, exec);
}

LoccBounds locc_bounds(const DensityMatrix& rho, const DensityMatrix& sigma, double r,
                       const SearchOptions& options, Exec exec) {
  if (!(r >= 0.0)) throw DomainError("locc_bounds: rate r must be nonnegative");
  // The s -> -inf slope needs rho^{-1}, so the bounds always run in certified mode.
  require_search_mode(rho, sigma, SearchMode::certified);
  LoccBounds out;
  out.r = r;
  out.search_based = !commute(rho, sigma);
  out.stein_measurement = max_measured_divergence(rho, sigma, options, exec);
  out.stein = out.stein_measurement.value;

  // Inner measurement optimum at a fixed tilt. Scans over s use the coarse
  // projective search; the chosen tilt is then re-evaluated with the full family.
  auto inner = [&](double s, bool minimize, Depth depth) {
    const bool unit = s >= 0.0;
    const PairObjective objective = [s, unit, minimize](std::span<const double> p, std::span<const double> q) {
      const double v = pair_phi(p, q, s, unit);
      return minimize ? -v : v;
    };
    const double v = search(rho, sigma, objective, depth, options, Exec::serial).value;
    return minimize ? -v : v;
  };

  // Chernoff: sup_s -min_M phi_M(s) over [0, 1].
  {
    auto objective = [&](double s) { return -inner(s, true, Depth::coarse); };
    const auto best = grid_then_golden(objective, linear_grid(0.0, 1.0, kMeasuredTiltCells + 1), exec);
    out.chernoff = std::max(best.value, -inner(best.x, true, Depth::full));
  }

  // Hoeffding: sup_{0<=s<1} (-s r - min_M phi_M(s)) / (1 - s).
  if (r >= out.stein) {
    out.hoeffding = 0.0;
  } else if (r == 0.0) {
    out.hoeffding = max_measured_divergence(sigma, rho, options, exec).value;
  } else {
    auto objective = [&](double s, Depth depth) { return (-s * r - inner(s, true, depth)) / (1.0 - s); };
    const auto best = grid_then_golden([&](double s) { return objective(s, Depth::coarse); },
                                       linear_grid(0.0, 1.0 - 1e-9, kMeasuredTiltCells + 1), exec);
    out.hoeffding = std::max(best.value, objective(best.x, Depth::full));
  }

  // Han-Kobayashi: the measurement maximization sits inside the sup over s.
  if (r <= out.stein) {
    out.han_kobayashi = 0.0;
  } else {
    const double slope = measured_slope(rho, sigma);
    const auto best = sup_nonpositive_tilt(r, [&](double s) { return inner(s, false, Depth::coarse); }, slope, exec,
                                           kMeasuredTiltCells);
    out.han_kobayashi = best.value;
    if (std::isfinite(best.argmax_s) && best.argmax_s < 0.0) {
      const double s = best.argmax_s;
      out.han_kobayashi = std::min(best.value, (-s * r - inner(s, false, Depth::full)) / (1.0 - s));
    }
  }
  return out;
}

}  // namespace explab
