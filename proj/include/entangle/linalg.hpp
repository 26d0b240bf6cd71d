#pragma once

// Fixed-size dense complex matrices for one and two qubits.

#include <array>
#include <complex>
#include <cstddef>

namespace entangle {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

template <std::size_t N>
class CMatrix {
 public:
  static constexpr std::size_t size = N;

  CMatrix() { a_.fill(cplx{0.0, 0.0}); }

  static CMatrix identity() {
    CMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = 1.0;
    return m;
  }

  cplx& operator()(std::size_t r, std::size_t c) { return a_[r * N + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * N + c]; }

  CMatrix& operator+=(const CMatrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) a_[i] += o.a_[i];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    for (std::size_t i = 0; i < N * N; ++i) a_[i] -= o.a_[i];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& x : a_) x *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix l, const CMatrix& r) { return l += r; }
  friend CMatrix operator-(CMatrix l, const CMatrix& r) { return l -= r; }
  friend CMatrix operator*(CMatrix m, cplx s) { return m *= s; }
  friend CMatrix operator*(cplx s, CMatrix m) { return m *= s; }

  friend CMatrix operator*(const CMatrix& l, const CMatrix& r) {
    CMatrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const cplx lik = l(i, k);
        if (lik == cplx{}) continue;
        for (std::size_t j = 0; j < N; ++j) out(i, j) += lik * r(k, j);
      }
    return out;
  }

  CMatrix adjoint() const {
    CMatrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj((*this)(j, i));
    return out;
  }

  cplx trace() const {
    cplx t{};
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  /// Largest |a_ij - conj(a_ji)|.
  double hermiticity_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) worst = std::max(worst, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return worst;
  }

  /// Largest entrywise modulus of this - other.
  double max_abs_diff(const CMatrix& o) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < N * N; ++i) worst = std::max(worst, std::abs(a_[i] - o.a_[i]));
    return worst;
  }

 private:
  std::array<cplx, N * N> a_;
};

using Matrix2 = CMatrix<2>;
using Matrix4 = CMatrix<4>;

/// Tr(l * r) without forming the product.
template <std::size_t N>
cplx trace_of_product(const CMatrix<N>& l, const CMatrix<N>& r) {
  cplx t{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < N; ++k) t += l(i, k) * r(k, i);
  return t;
}

/// sigma_1, sigma_2, sigma_3 for k = 1, 2, 3; the identity for k = 0.
Matrix2 pauli(int k);

/// n . sigma
Matrix2 pauli_dot(const Vec3& n);

/// Kronecker product, first factor on the most significant index.
Matrix4 kron(const Matrix2& a, const Matrix2& b);

/// Eigenvalues (ascending) of a real symmetric matrix stored row-major, by
/// cyclic Jacobi rotations.
template <std::size_t N>
std::array<double, N> symmetric_eigenvalues(std::array<double, N * N> m);

/// Eigenvalues (ascending) of a Hermitian matrix. Uses the real symmetric
/// embedding [[Re, -Im], [Im, Re]], whose spectrum is that of the input
/// with every eigenvalue doubled.
template <std::size_t N>
std::array<double, N> hermitian_eigenvalues(const CMatrix<N>& m);

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);

extern template std::array<double, 3> symmetric_eigenvalues<3>(std::array<double, 9>);
extern template std::array<double, 4> symmetric_eigenvalues<4>(std::array<double, 16>);
extern template std::array<double, 8> symmetric_eigenvalues<8>(std::array<double, 64>);
extern template std::array<double, 2> hermitian_eigenvalues<2>(const Matrix2&);
extern template std::array<double, 4> hermitian_eigenvalues<4>(const Matrix4&);

}  // namespace entangle
