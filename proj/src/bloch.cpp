#include "entangle/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "entangle/errors.hpp"
#include "entangle/parallel.hpp"

namespace entangle {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Break point in the unit coordinate u = (lambda + 1) / 2.
double sample_unit(const BreakDistribution& dist, Stream& stream) {
  if (dist.is_uniform()) return stream.uniform();
  const auto& w = dist.weights();
  const std::size_t k_cells = w.size();
  const double pick = stream.uniform();
  double acc = 0.0;
  std::size_t cell = k_cells;
  for (std::size_t k = 0; k < k_cells; ++k) {
    acc += w[k];
    if (pick < acc && w[k] > 0.0) {
      cell = k;
      break;
    }
  }
  if (cell == k_cells) {
    // pick landed in the rounding gap above the last partial sum
    cell = k_cells - 1;
    while (cell > 0 && w[cell] == 0.0) --cell;
  }
  const double k_total = static_cast<double>(k_cells);
  const double upper = std::nextafter((static_cast<double>(cell) + 1.0) / k_total, 0.0);
  return std::min((static_cast<double>(cell) + stream.uniform()) / k_total, upper);
}

}  // namespace

BlochVector3::BlochVector3(const Vec3& r) : r_(r) {
  if (!(norm(r) <= 1.0 + 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Bloch vector longer than 1 (|r| = " << norm(r) << ")";
    throw std::invalid_argument(msg.str());
  }
}

MeasurementFrame::MeasurementFrame(const Vec3& n_plus) : n_plus_(n_plus) {
  if (!(std::abs(norm(n_plus) - 1.0) <= 1e-12)) throw std::invalid_argument("measurement direction must be a unit vector");
}

BreakDistribution BreakDistribution::uniform() { return {}; }

BreakDistribution BreakDistribution::piecewise(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("piecewise break distribution needs at least one cell");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("cell weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("cell weights must sum to 1");
  BreakDistribution d;
  d.weights_ = std::move(weights);
  return d;
}

BreakDistribution BreakDistribution::random_piecewise(std::size_t cells, Stream& stream) {
  if (cells == 0) throw std::invalid_argument("cell count must be at least 1");
  std::vector<double> w(cells);
  for (auto& x : w) x = stream.uniform();
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) {
    std::fill(w.begin(), w.end(), 1.0);
    total = static_cast<double>(cells);
  }
  for (auto& x : w) x /= total;
  return piecewise(std::move(w));
}

double BreakDistribution::probability_plus(double p_plus) const {
  const double p = clamp01(p_plus);
  if (is_uniform()) return p;
  const double k_total = static_cast<double>(weights_.size());
  double prob = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double inside = clamp01(p * k_total - static_cast<double>(k));
    prob += weights_[k] * inside;
  }
  return clamp01(prob);
}

double BreakDistribution::sample(Stream& stream) const { return 2.0 * sample_unit(*this, stream) - 1.0; }

Vec3 parallel_state(const BlochVector3& r, const MeasurementFrame& frame) {
  const double c = dot(r.vec(), frame.n_plus());
  const Vec3& n = frame.n_plus();
  return {c * n[0], c * n[1], c * n[2]};
}

BlochVector3 decohere(const BlochVector3& r, const MeasurementFrame& frame, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("decoherence parameter tau must lie in [0, 1]");
  const Vec3 par = parallel_state(r, frame);
  const Vec3& v = r.vec();
  return BlochVector3(Vec3{(1.0 - tau) * v[0] + tau * par[0], (1.0 - tau) * v[1] + tau * par[1],
                           (1.0 - tau) * v[2] + tau * par[2]});
}

OutcomeProbabilities outcome_probabilities(const BlochVector3& r, const MeasurementFrame& frame) {
  const double c = std::clamp(dot(r.vec(), frame.n_plus()), -1.0, 1.0);
  return {0.5 * (1.0 + c), 0.5 * (1.0 - c)};
}

CollapseResult sample_collapse(const BlochVector3& r, const MeasurementFrame& frame, const BreakDistribution& dist,
                               Stream& stream) {
  const double p_plus = outcome_probabilities(r, frame).plus;
  const double u = sample_unit(dist, stream);
  const Outcome outcome = u < p_plus ? Outcome::plus : Outcome::minus;
  return {outcome, 2.0 * u - 1.0, 2.0 * p_plus - 1.0, outcome == Outcome::plus ? frame.n_plus() : frame.n_minus()};
}

CollapseCounts sample_collapses(const BlochVector3& r, const MeasurementFrame& frame, const BreakDistribution& dist,
                                unsigned long long trials, std::uint64_t seed, unsigned workers) {
  std::vector<CollapseCounts> partial(std::max(1u, workers));
  for_each_block(trials, workers, [&](std::size_t block, std::size_t begin, std::size_t end) {
    CollapseCounts local;
    for (std::size_t i = begin; i < end; ++i) {
      Stream stream = Stream::derived(seed, stream_domain::kBlochCollapse, i);
      if (sample_collapse(r, frame, dist, stream).outcome == Outcome::plus)
        ++local.plus;
      else
        ++local.minus;
    }
    partial[block] = local;
  });
  CollapseCounts total;
  for (const auto& p : partial) {
    total.plus += p.plus;
    total.minus += p.minus;
  }
  return total;
}

OutcomeProbabilities universal_average(const BlochVector3& r, const MeasurementFrame& frame, std::size_t cells,
                                       std::size_t distributions, std::uint64_t seed, unsigned workers) {
  if (cells == 0) throw std::invalid_argument("cell count must be at least 1");
  if (distributions == 0) throw std::invalid_argument("distribution count must be at least 1");
  const double p_plus = outcome_probabilities(r, frame).plus;

  // Per-distribution values are summed serially so the result does not
  // depend on the block split.
  std::vector<double> values(distributions);
  for_each_block(distributions, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      Stream stream = Stream::derived(seed, stream_domain::kUniversalAverage, m);
      values[m] = BreakDistribution::random_piecewise(cells, stream).probability_plus(p_plus);
    }
  });
  // Neumaier summation: M copies of one value average back to that value.
  double sum = 0.0, comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double mean = (sum + comp) / static_cast<double>(distributions);
  return {mean, 1.0 - mean};
}

const std::array<Matrix4, 15>& lambda_basis() {
  static const std::array<Matrix4, 15> basis = [] {
    std::array<Matrix4, 15> b;
    const cplx inv_sqrt2{1.0 / std::sqrt(2.0), 0.0};
    const Matrix2 id = pauli(0);
    for (int k = 1; k <= 3; ++k) {
      b[static_cast<std::size_t>(k - 1)] = kron(pauli(k), id) * inv_sqrt2;
      b[static_cast<std::size_t>(k + 2)] = kron(id, pauli(k)) * inv_sqrt2;
    }
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 3; ++k) b[static_cast<std::size_t>(6 + 3 * (j - 1) + (k - 1))] = kron(pauli(j), pauli(k)) * inv_sqrt2;
    return b;
  }();
  return basis;
}

Vec3 BlochVector15::r_alice() const {
  const double s = std::sqrt(3.0);
  return {s * r_[0], s * r_[1], s * r_[2]};
}

Vec3 BlochVector15::r_bob() const {
  const double s = std::sqrt(3.0);
  return {s * r_[3], s * r_[4], s * r_[5]};
}

std::array<double, 9> BlochVector15::r_conn() const {
  std::array<double, 9> c;
  std::copy(r_.begin() + 6, r_.end(), c.begin());
  return c;
}

double BlochVector15::length() const {
  return std::sqrt(std::inner_product(r_.begin(), r_.end(), r_.begin(), 0.0));
}

BlochVector15 decompose_matrix(const Matrix4& rho) {
  if (!(rho.hermiticity_error() <= 1e-12)) throw InvariantError("cannot decompose a non-Hermitian matrix");
  if (!(std::abs(rho.trace() - cplx{1.0, 0.0}) <= 1e-12)) throw InvariantError("cannot decompose a matrix with trace != 1");
  const double scale = 2.0 / std::sqrt(6.0);
  std::array<double, 15> r;
  const auto& basis = lambda_basis();
  for (std::size_t i = 0; i < 15; ++i) r[i] = scale * trace_of_product(rho, basis[i]).real();
  return BlochVector15(r);
}

BlochVector15 decompose(const TwoQubitState& state) { return decompose_matrix(state.rho()); }

Matrix4 reconstruct(const BlochVector15& r) {
  Matrix4 sum = Matrix4::identity();
  const double s6 = std::sqrt(6.0);
  const auto& basis = lambda_basis();
  for (std::size_t i = 0; i < 15; ++i) sum += basis[i] * cplx{s6 * r.components()[i], 0.0};
  return sum * cplx{0.25, 0.0};
}

double connection_rank1_residual(const BlochVector15& r) {
  const auto m = r.r_conn();
  std::array<double, 9> gram{};
  double frob2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      frob2 += m[3 * i + j] * m[3 * i + j];
      for (std::size_t k = 0; k < 3; ++k) gram[3 * i + j] += m[3 * k + i] * m[3 * k + j];
    }
  const double top = symmetric_eigenvalues<3>(gram)[2];
  return std::sqrt(std::max(0.0, frob2 - top));
}

}  // namespace entangle
