#include "entangle/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace entangle {

Matrix2 pauli(int k) {
  Matrix2 m;
  switch (k) {
    case 0: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 2: m(0, 1) = cplx{0.0, -1.0}; m(1, 0) = cplx{0.0, 1.0}; break;
    case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw std::out_of_range("Pauli index must be 0..3");
  }
  return m;
}

Matrix2 pauli_dot(const Vec3& n) {
  Matrix2 m;
  m(0, 0) = n[2];
  m(1, 1) = -n[2];
  m(0, 1) = cplx{n[0], -n[1]};
  m(1, 0) = cplx{n[0], n[1]};
  return m;
}

Matrix4 kron(const Matrix2& a, const Matrix2& b) {
  Matrix4 out;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

template <std::size_t N>
std::array<double, N> symmetric_eigenvalues(std::array<double, N * N> m) {
  auto at = [&](std::size_t r, std::size_t c) -> double& { return m[r * N + c]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) (i == j ? scale : off) += at(i, j) * at(i, j);
    if (off <= 1e-30 * std::max(scale, 1e-300)) break;

    for (std::size_t p = 0; p + 1 < N; ++p) {
      for (std::size_t q = p + 1; q < N; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < N; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < N; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }

  std::array<double, N> eig;
  for (std::size_t i = 0; i < N; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

template <std::size_t N>
std::array<double, N> hermitian_eigenvalues(const CMatrix<N>& h) {
  constexpr std::size_t M = 2 * N;
  std::array<double, M * M> real{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      // Symmetrize so tiny anti-Hermitian noise cannot break the embedding.
      const cplx v = 0.5 * (h(i, j) + std::conj(h(j, i)));
      real[i * M + j] = v.real();
      real[(i + N) * M + (j + N)] = v.real();
      real[i * M + (j + N)] = -v.imag();
      real[(i + N) * M + j] = v.imag();
    }
  const auto doubled = symmetric_eigenvalues<M>(real);
  std::array<double, N> eig;
  for (std::size_t i = 0; i < N; ++i) eig[i] = 0.5 * (doubled[2 * i] + doubled[2 * i + 1]);
  return eig;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

template std::array<double, 3> symmetric_eigenvalues<3>(std::array<double, 9>);
template std::array<double, 4> symmetric_eigenvalues<4>(std::array<double, 16>);
template std::array<double, 8> symmetric_eigenvalues<8>(std::array<double, 64>);
template std::array<double, 2> hermitian_eigenvalues<2>(const Matrix2&);
template std::array<double, 4> hermitian_eigenvalues<4>(const Matrix4&);

}  // namespace entangle
