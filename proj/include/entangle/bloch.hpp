#pragma once

// Hidden-measurement picture of a two-outcome qubit measurement, and the
// 15-dimensional Bloch representation of two qubits.
//
// A measurement with outcome directions n_+ = -n_- owns the diameter between
// them, parameterized here as lambda in [-1, 1] with n_- at -1 and n_+ at +1.
// Decoherence moves the state r onto the diameter at r_par = (r.n_+) n_+,
// which splits it into A_+ = [-1, 2 p_+ - 1) and A_- = [2 p_+ - 1, 1] with
// p_+ = (1 + r.n_+) / 2. The diameter then breaks at a random point lambda
// and the state collapses to n_+ iff lambda lies in A_+.

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "entangle/linalg.hpp"
#include "entangle/prob_core.hpp"
#include "entangle/quantum_ref.hpp"
#include "entangle/rng.hpp"

namespace entangle {

/// |r| <= 1 + 1e-12, throws std::invalid_argument otherwise.
class BlochVector3 {
 public:
  explicit BlochVector3(const Vec3& r);
  const Vec3& vec() const { return r_; }
  double length() const { return norm(r_); }

 private:
  Vec3 r_;
};

class MeasurementFrame {
 public:
  /// Throws std::invalid_argument unless |n_plus| = 1 within 1e-12.
  explicit MeasurementFrame(const Vec3& n_plus);
  const Vec3& n_plus() const { return n_plus_; }
  Vec3 n_minus() const { return {-n_plus_[0], -n_plus_[1], -n_plus_[2]}; }

 private:
  Vec3 n_plus_;
};

/// Break-point law on the diameter: uniform, or piecewise constant on K equal
/// cells with the given cell weights (cell k covers
/// [-1 + 2k/K, -1 + 2(k+1)/K)).
class BreakDistribution {
 public:
  static BreakDistribution uniform();
  /// Throws std::invalid_argument on empty, negative or unnormalized
  /// (|sum - 1| > 1e-12) weights.
  static BreakDistribution piecewise(std::vector<double> weights);
  /// Independent uniform(0,1) weights normalized to 1, drawn in cell order.
  static BreakDistribution random_piecewise(std::size_t cells, Stream& stream);

  bool is_uniform() const { return weights_.empty(); }
  std::size_t cells() const { return is_uniform() ? 1 : weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }

  /// Probability that lambda falls in A_+ for a given p_+ (exact: the sum of
  /// cell weights times the fraction of each cell inside A_+).
  double probability_plus(double p_plus) const;

  /// Draws lambda in [-1, 1).
  double sample(Stream& stream) const;

 private:
  std::vector<double> weights_;
};

/// (1 - tau) r + tau r_par. Throws std::invalid_argument for tau outside [0, 1].
BlochVector3 decohere(const BlochVector3& r, const MeasurementFrame& frame, double tau);

/// The on-diameter state r_par = r_+ n_+ + r_- n_-.
Vec3 parallel_state(const BlochVector3& r, const MeasurementFrame& frame);

struct OutcomeProbabilities {
  double plus;
  double minus;
};

/// p_+- = (1 +- r.n_+) / 2, the relative length of A_+- on the diameter.
OutcomeProbabilities outcome_probabilities(const BlochVector3& r, const MeasurementFrame& frame);

struct CollapseResult {
  Outcome outcome;
  double lambda;      // break point in [-1, 1)
  double split;       // 2 p_+ - 1, the boundary between A_+ and A_-
  Vec3 final_state;   // n_+ or n_-
};

/// lambda is mapped to u = (lambda + 1) / 2 in [0, 1) and the outcome is +
/// iff u < p_+; a break exactly on the split point gives -.
CollapseResult sample_collapse(const BlochVector3& r, const MeasurementFrame& frame, const BreakDistribution& dist,
                               Stream& stream);

struct CollapseCounts {
  unsigned long long plus = 0;
  unsigned long long minus = 0;
};

/// Sample i uses Stream::derived(seed, stream_domain::kBlochCollapse, i);
/// independent of `workers`.
CollapseCounts sample_collapses(const BlochVector3& r, const MeasurementFrame& frame, const BreakDistribution& dist,
                                unsigned long long trials, std::uint64_t seed, unsigned workers = 1);

/// Mean over `distributions` random piecewise-constant laws on `cells`
/// cells of the exact outcome probabilities. Distribution m is drawn from
/// Stream::derived(seed, stream_domain::kUniversalAverage, m). Throws
/// std::invalid_argument if cells or distributions is 0.
OutcomeProbabilities universal_average(const BlochVector3& r, const MeasurementFrame& frame, std::size_t cells,
                                       std::size_t distributions, std::uint64_t seed, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Two qubits: rho = 1/4 (I + sqrt(6) r . Lambda).

/// Lambda_1..3 = sigma_k (x) I / sqrt2, Lambda_4..6 = I (x) sigma_k / sqrt2,
/// Lambda_7..15 = sigma_j (x) sigma_k / sqrt2 in row-major (j, k) order.
const std::array<Matrix4, 15>& lambda_basis();

class BlochVector15 {
 public:
  explicit BlochVector15(const std::array<double, 15>& r) : r_(r) {}

  const std::array<double, 15>& components() const { return r_; }
  /// Full-length single-qubit Bloch vectors (components scaled by sqrt 3).
  Vec3 r_alice() const;
  Vec3 r_bob() const;
  /// Components 7..15; r_conn()[3 * (j - 1) + (k - 1)] pairs sigma_j with sigma_k.
  std::array<double, 9> r_conn() const;
  double length() const;

 private:
  std::array<double, 15> r_;
};

/// r_i = (2 / sqrt 6) Tr(rho Lambda_i).
BlochVector15 decompose(const TwoQubitState& state);

/// Raw decomposition of any matrix; throws InvariantError if it is not
/// Hermitian or not unit trace within 1e-12.
BlochVector15 decompose_matrix(const Matrix4& rho);

/// 1/4 (I + sqrt 6 r . Lambda); not checked for positivity.
Matrix4 reconstruct(const BlochVector15& r);

/// Frobenius distance from r_conn (as a 3x3 matrix) to its best rank-1
/// approximation. Zero for product states.
double connection_rank1_residual(const BlochVector15& r);

}  // namespace entangle
