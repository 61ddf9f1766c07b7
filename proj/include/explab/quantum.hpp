#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "explab/distribution.hpp"
#include "explab/exponents.hpp"
#include "explab/parallel.hpp"

namespace explab {

using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPovmSumTolerance = 1e-10;
// Certified qubit search requires both states to have eigenvalues at least this large.
inline constexpr double kCertifiedMinEigenvalue = 1e-9;

/// Hermitian, positive semidefinite, unit-trace matrix (validated on construction).
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix entries);

  // (I + x X + y Y + z Z) / 2 for |(x, y, z)| <= 1.
  static DensityMatrix from_bloch(double x, double y, double z);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  Eigen::VectorXd eigenvalues() const;

 private:
  ComplexMatrix m_;
};

/// Finite set of PSD operators summing to the identity (validated on construction).
class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> elements);
  // The trivial qubit measurement {I}.
  Povm();

  // Two-outcome projective measurement along the Bloch direction (x, y, z) (normalized here).
  static Povm projective(double x, double y, double z);
  // Projective measurement onto the columns of a unitary.
  static Povm basis(const ComplexMatrix& unitary);

  std::size_t dim() const { return static_cast<std::size_t>(elements_.front().rows()); }
  std::size_t size() const { return elements_.size(); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }

 private:
  std::vector<ComplexMatrix> elements_;
};

// Rank-one POVM S^{-1/2} v_j v_j^† S^{-1/2} from complex Gaussian vectors drawn
// from the counter generator at (seed, index).
Povm random_rank_one_povm(std::size_t dim, std::size_t outcomes, std::uint64_t seed, std::uint64_t index);

// probs[y] = Tr M_y rho; noise down to -1e-14 is clipped and the vector renormalized.
Distribution measure(const DensityMatrix& rho, const Povm& m);

// Tr rho (log rho - log sigma); +inf when supp rho is not inside supp sigma.
double quantum_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

bool commute(const DensityMatrix& rho, const DensityMatrix& sigma, double tol = 1e-12);

enum class MeasurementFamily { projective, rank_one_povm, eigenbasis };
const char* to_string(MeasurementFamily family);

// certified: qubits with both states strictly positive; best_effort: any
// dimension, with eigenbasis measurements and random POVMs only for dim > 2.
enum class SearchMode { certified, best_effort };

struct SearchOptions {
  SearchMode mode = SearchMode::certified;
  std::uint64_t seed = 0x243f6a8885a308d3ULL;
  std::size_t restarts = 200;
};

struct MeasuredOptimum {
  double value = 0.0;
  Povm measurement;
  MeasurementFamily family = MeasurementFamily::projective;
};

// Throws UnsupportedError when the pair is outside the chosen mode.
void require_search_mode(const DensityMatrix& rho, const DensityMatrix& sigma, SearchMode mode);

// max_M D(measure(rho, M) || measure(sigma, M)).
MeasuredOptimum max_measured_divergence(const DensityMatrix& rho, const DensityMatrix& sigma,
                                        const SearchOptions& options = {}, Exec exec = Exec::parallel);

// max_M phi(s | measure(rho, M) || measure(sigma, M)) for s <= 0.
MeasuredOptimum measured_phi_sup(double s, const DensityMatrix& rho, const DensityMatrix& sigma,
                                 const SearchOptions& options = {}, Exec exec = Exec::parallel);

struct LoccBounds {
  double r = 0.0;
  double stein = 0.0;
  double chernoff = 0.0;
  double hoeffding = 0.0;
  double han_kobayashi = 0.0;
  MeasuredOptimum stein_measurement;
  // Search-based values for non-commuting pairs are lower bounds on the true
  // POVM optimum (upper bounds for the Han-Kobayashi entry).
  bool search_based = false;
};

// Always certified: qubits with strictly positive states. options.mode is ignored.
LoccBounds locc_bounds(const DensityMatrix& rho, const DensityMatrix& sigma, double r,
                       const SearchOptions& options = {}, Exec exec = Exec::parallel);

}  // namespace explab
