#include "entangle/quantum_ref.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "entangle/errors.hpp"

namespace entangle {

namespace {

constexpr double kAxisTolerance = 1e-12;
constexpr double kStateTolerance = 1e-12;
constexpr double kPsdTolerance = 1e-10;

// Traces of products of projectors carry ~1e-16 rounding; pull values that
// are within that noise of [0, 1] back inside before validation.
double clamp_probability(double p) {
  constexpr double kSlack = 1e-12;
  if (p < 0.0 && p >= -kSlack) return 0.0;
  if (p > 1.0 && p <= 1.0 + kSlack) return 1.0;
  return p;
}

}  // namespace

Axis::Axis(const Vec3& v) : v_(v) {
  if (!(std::abs(norm(v) - 1.0) <= kAxisTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "axis is not a unit vector (norm = " << norm(v) << ")";
    throw std::invalid_argument(msg.str());
  }
}

Axis Axis::normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero or non-finite axis");
  return Axis(Vec3{v[0] / n, v[1] / n, v[2] / n});
}

Axis Axis::in_xz_plane(double theta) { return Axis(Vec3{std::sin(theta), 0.0, std::cos(theta)}); }

TwoQubitState::TwoQubitState(const Matrix4& rho) : rho_(rho) {
  const double herm = rho.hermiticity_error();
  if (!(herm <= kStateTolerance)) {
    std::ostringstream msg;
    msg << "density matrix is not Hermitian (max |rho - rho^dagger| = " << herm << ")";
    throw InvariantError(msg.str());
  }
  const cplx tr = rho.trace();
  if (!(std::abs(tr - cplx{1.0, 0.0}) <= kStateTolerance)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "density matrix trace is " << tr.real() << (tr.imag() >= 0 ? "+" : "") << tr.imag() << "i, expected 1";
    throw InvariantError(msg.str());
  }
  const double min_eig = hermitian_eigenvalues(rho)[0];
  if (!(min_eig >= -kPsdTolerance)) {
    std::ostringstream msg;
    msg << "density matrix is not positive semidefinite (min eigenvalue " << min_eig << ")";
    throw InvariantError(msg.str());
  }
}

TwoQubitState TwoQubitState::pure(const std::array<cplx, 4>& amplitudes) {
  double n2 = 0.0;
  for (const auto& z : amplitudes) n2 += std::norm(z);
  if (!(n2 > 0.0)) throw std::invalid_argument("zero state vector");
  const double inv = 1.0 / std::sqrt(n2);
  Matrix4 rho;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) rho(i, j) = amplitudes[i] * std::conj(amplitudes[j]) * inv * inv;
  return TwoQubitState(rho);
}

TwoQubitState singlet_state() {
  const double s = 1.0 / std::sqrt(2.0);
  return TwoQubitState::pure({cplx{0.0}, cplx{s}, cplx{-s}, cplx{0.0}});
}

TwoQubitState maximally_mixed_state() { return TwoQubitState(Matrix4::identity() * cplx{0.25}); }

Matrix2 qubit_density(const Vec3& r) {
  if (!(norm(r) <= 1.0 + 1e-12)) throw std::invalid_argument("Bloch vector longer than 1");
  return (Matrix2::identity() + pauli_dot(r)) * cplx{0.5};
}

TwoQubitState product_state(const Vec3& r_alice, const Vec3& r_bob) {
  return TwoQubitState(kron(qubit_density(r_alice), qubit_density(r_bob)));
}

Matrix2 reduced_alice(const Matrix4& rho) {
  Matrix2 out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) out(i, j) += rho(2 * i + k, 2 * j + k);
  return out;
}

Matrix2 reduced_bob(const Matrix4& rho) {
  Matrix2 out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k) out(i, j) += rho(2 * k + i, 2 * k + j);
  return out;
}

Matrix2 spin_projector(const Axis& n, Outcome sign) {
  const double s = sign == Outcome::plus ? 0.5 : -0.5;
  return Matrix2::identity() * cplx{0.5} + pauli_dot(n.vec()) * cplx{s};
}

JointDistribution joint_distribution(const TwoQubitState& state, const Axis& alice_axis, const Axis& bob_axis) {
  std::array<double, 4> p{};
  for (std::size_t cell = 0; cell < 4; ++cell) {
    const OutcomePair o = OutcomePair::from_index(cell);
    const Matrix4 proj = kron(spin_projector(alice_axis, o.alice), spin_projector(bob_axis, o.bob));
    p[cell] = clamp_probability(trace_of_product(state.rho(), proj).real());
  }
  return {p[0], p[1], p[2], p[3]};
}

ExperimentTable experiment_table(const TwoQubitState& state, const AxisQuad& axes) {
  return {joint_distribution(state, axes.a, axes.b), joint_distribution(state, axes.a, axes.b_prime),
          joint_distribution(state, axes.a_prime, axes.b), joint_distribution(state, axes.a_prime, axes.b_prime)};
}

ChshQuantities chsh_for_axes(const TwoQubitState& state, const AxisQuad& axes) {
  return chsh(experiment_table(state, axes));
}

AxisQuad coplanar_axes(double alpha) {
  const double half_pi = std::acos(0.0);
  return {Axis::in_xz_plane(0.0), Axis::in_xz_plane(half_pi), Axis::in_xz_plane(alpha),
          Axis::in_xz_plane(alpha + half_pi)};
}

std::vector<TsirelsonPoint> scan_tsirelson(const TwoQubitState& state, std::span<const double> angles) {
  if (angles.empty()) throw std::invalid_argument("angle grid must not be empty");
  std::vector<TsirelsonPoint> out;
  out.reserve(angles.size());
  for (double alpha : angles) {
    const ChshQuantities q = chsh_for_axes(state, coplanar_axes(alpha));
    out.push_back({alpha, q, q.max_abs()});
  }
  return out;
}

}  // namespace entangle
