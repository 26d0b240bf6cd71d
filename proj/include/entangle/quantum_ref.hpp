#pragma once

// Quantum-mechanical reference predictions for spin measurements on two
// qubits: Pr(i, j) = Tr[rho (P_i(a) (x) P_j(b))] with P_+-(n) = (I +- n.sigma)/2.

#include <span>
#include <vector>

#include "entangle/linalg.hpp"
#include "entangle/prob_core.hpp"

namespace entangle {

/// Unit direction of a Stern-Gerlach apparatus.
class Axis {
 public:
  /// Throws std::invalid_argument unless |v| = 1 within 1e-12.
  explicit Axis(const Vec3& v);
  /// Rescales a non-zero vector to unit length.
  static Axis normalized(const Vec3& v);
  /// (sin theta, 0, cos theta): angle theta from z in the x-z plane.
  static Axis in_xz_plane(double theta);

  const Vec3& vec() const { return v_; }

 private:
  Vec3 v_;
};

/// A validated two-qubit density matrix: Hermitian and unit trace within
/// 1e-12, smallest eigenvalue >= -1e-10. Violations throw InvariantError.
class TwoQubitState {
 public:
  explicit TwoQubitState(const Matrix4& rho);

  /// Normalizes the amplitude vector and forms |psi><psi|.
  static TwoQubitState pure(const std::array<cplx, 4>& amplitudes);

  const Matrix4& rho() const { return rho_; }

 private:
  Matrix4 rho_;
};

struct AxisQuad {
  Axis a;
  Axis a_prime;
  Axis b;
  Axis b_prime;
};

/// (|+-> - |-+>)/sqrt(2) in the z basis, |+> = (1, 0).
TwoQubitState singlet_state();
TwoQubitState maximally_mixed_state();
/// rho = 1/2 (I + sigma.r) for a Bloch vector with |r| <= 1.
Matrix2 qubit_density(const Vec3& r);
TwoQubitState product_state(const Vec3& r_alice, const Vec3& r_bob);

/// Tr over Bob (resp. Alice) by direct summation.
Matrix2 reduced_alice(const Matrix4& rho);
Matrix2 reduced_bob(const Matrix4& rho);

/// (I + sign * n.sigma) / 2
Matrix2 spin_projector(const Axis& n, Outcome sign);

JointDistribution joint_distribution(const TwoQubitState& state, const Axis& alice_axis, const Axis& bob_axis);

ExperimentTable experiment_table(const TwoQubitState& state, const AxisQuad& axes);

ChshQuantities chsh_for_axes(const TwoQubitState& state, const AxisQuad& axes);

/// Coplanar family in the x-z plane: A along z, B at alpha from A, A' at
/// pi/2 from A and B' at pi/2 from B (alpha + pi/2 from A). With
/// alpha = pi/4 this realizes the angle pattern (A,B) = (A',B) = pi/4,
/// (A,B') = 3 pi/4, (A,A') = (B,B') = pi/2; for the singlet it gives
/// B_CHSH = -2(cos alpha + sin alpha), i.e. -2 sqrt(2) at pi/4.
AxisQuad coplanar_axes(double alpha);

struct TsirelsonPoint {
  double angle;
  ChshQuantities chsh;
  double max_abs;  // max of the four |CHSH| values
};

/// Evaluates the coplanar family at every angle. Throws
/// std::invalid_argument for an empty grid.
std::vector<TsirelsonPoint> scan_tsirelson(const TwoQubitState& state, std::span<const double> angles);

}  // namespace entangle
