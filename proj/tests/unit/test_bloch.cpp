#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "entangle/bloch.hpp"
#include "entangle/errors.hpp"
#include "oracles.hpp"

using namespace entangle;

namespace {

Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n(0, 1);
  Vec3 v{n(g), n(g), n(g)};
  const double l = norm(v);
  return {v[0] / l, v[1] / l, v[2] / l};
}

Vec3 scaled(const Vec3& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

Matrix4 random_density(std::mt19937_64& g, int rank) {
  std::normal_distribution<double> n(0, 1);
  Matrix4 rho;
  for (int k = 0; k < rank; ++k) {
    std::array<cplx, 4> v;
    for (auto& x : v) x = {n(g), n(g)};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) rho(i, j) += v[i] * std::conj(v[j]);
  }
  const cplx tr = rho.trace();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) rho(i, j) /= tr;
  return rho;
}

const double kInvSqrt3 = 1.0 / std::sqrt(3.0);

}  // namespace

TEST_SUITE("bloch") {
  TEST_CASE("type invariants") {
    CHECK_NOTHROW(BlochVector3({0, 0, 1}));
    CHECK_THROWS_AS(BlochVector3({0, 0, 1.001}), std::invalid_argument);
    CHECK_THROWS_AS(MeasurementFrame({0, 0, 0.9}), std::invalid_argument);
    CHECK(MeasurementFrame({0, 1, 0}).n_minus() == Vec3{0, -1, 0});
    CHECK_THROWS_AS(BreakDistribution::piecewise({}), std::invalid_argument);
    CHECK_THROWS_AS(BreakDistribution::piecewise({0.5, 0.6}), std::invalid_argument);
    CHECK_THROWS_AS(BreakDistribution::piecewise({1.5, -0.5}), std::invalid_argument);
    CHECK(BreakDistribution::piecewise({0.25, 0.75}).cells() == 2);
  }

  TEST_CASE("decoherence path") {
    const MeasurementFrame f({0, 0, 1});
    const BlochVector3 r({0.6, 0, 0.8});
    CHECK(decohere(r, f, 0).vec() == r.vec());
    const auto end = decohere(BlochVector3({0, 0, 1}), f, 1).vec();
    CHECK(end == Vec3{0, 0, 1});
    const auto mid = decohere(BlochVector3({1, 0, 0}), f, 1).vec();
    CHECK(norm(mid) < 1e-15);
    CHECK_THROWS_AS(decohere(r, f, 1.1), std::invalid_argument);
    CHECK_THROWS_AS(decohere(r, f, -0.1), std::invalid_argument);

    std::mt19937_64 g(41);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 100; ++i) {
      const MeasurementFrame fr(random_unit(g));
      const BlochVector3 s(scaled(random_unit(g), u(g)));
      const double t1 = u(g), t2 = u(g), lam = u(g);
      const auto a = decohere(s, fr, t1).vec(), b = decohere(s, fr, t2).vec();
      const auto c = decohere(s, fr, lam * t1 + (1 - lam) * t2).vec();
      for (int k = 0; k < 3; ++k) CHECK(std::abs(c[k] - (lam * a[k] + (1 - lam) * b[k])) < 1e-14);
      for (const auto& e : {fr.n_plus(), fr.n_minus()}) {
        const auto fixed = decohere(BlochVector3(e), fr, u(g)).vec();
        for (int k = 0; k < 3; ++k) CHECK(std::abs(fixed[k] - e[k]) < 1e-15);
      }
    }
  }

  TEST_CASE("outcome probability examples") {
    const MeasurementFrame f({0, 0, 1});
    CHECK(outcome_probabilities(BlochVector3({0, 0, 1}), f).plus == 1.0);
    CHECK(outcome_probabilities(BlochVector3({1, 0, 0}), f).plus == 0.5);
    const double th = 1.1;
    const auto p = outcome_probabilities(BlochVector3({std::sin(th), 0, std::cos(th)}), f);
    CHECK(p.plus == doctest::Approx((1 + std::cos(th)) / 2));
    CHECK(p.minus == doctest::Approx((1 - std::cos(th)) / 2));
  }

  TEST_CASE("outcome probabilities equal the spinor Born rule") {
    std::mt19937_64 g(42);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 r = random_unit(g), n = random_unit(g);
      const auto p = outcome_probabilities(BlochVector3(r), MeasurementFrame(n));
      const auto psi = oracle::spin_up(r);
      worst = std::max(worst, std::abs(p.plus - oracle::born(oracle::spin_up(n), psi)));
      worst = std::max(worst, std::abs(p.minus - oracle::born(oracle::spin_down(n), psi)));
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("piecewise probability_plus") {
    CHECK(BreakDistribution::uniform().probability_plus(0.3) == 0.3);
    const auto one = BreakDistribution::piecewise({1.0});
    CHECK(one.probability_plus(0.37) == doctest::Approx(0.37).epsilon(1e-15));
    const auto d = BreakDistribution::piecewise({0.5, 0.25, 0.25, 0.0});
    CHECK(d.probability_plus(0.0) == 0.0);
    CHECK(d.probability_plus(0.25) == 0.5);
    CHECK(d.probability_plus(0.375) == 0.625);
    CHECK(d.probability_plus(0.75) == 1.0);
    CHECK(d.probability_plus(1.0) == 1.0);
  }

  TEST_CASE("collapse: support inside A_+ gives + always") {
    const MeasurementFrame f({0, 0, 1});
    const BlochVector3 r({std::sqrt(1 - 0.25), 0, 0.5});  // p_+ = 0.75
    const auto d = BreakDistribution::piecewise({1.0, 0, 0, 0});
    Stream s(1);
    for (int i = 0; i < 2000; ++i) {
      const auto c = sample_collapse(r, f, d, s);
      CHECK(c.outcome == Outcome::plus);
      CHECK(c.lambda < -0.5);
      CHECK(c.final_state == f.n_plus());
    }
    const auto counts = sample_collapses(BlochVector3({0, 0, 1}), f, BreakDistribution::random_piecewise(8, s), 5000, 3);
    CHECK(counts.plus == 5000);
  }

  TEST_CASE("collapse: sampled lambda stays in its cell") {
    const auto d = BreakDistribution::piecewise({0, 0, 1.0, 0});
    Stream s(2);
    for (int i = 0; i < 5000; ++i) {
      const double l = d.sample(s);
      CHECK(l >= 0.0);
      CHECK(l < 0.5);
    }
  }

  TEST_CASE("collapse frequencies follow Born (2e5 samples, 20 states)") {
    std::mt19937_64 g(43);
    std::uniform_real_distribution<double> u(0, 1);
    const unsigned long long n = 200000;
    for (int i = 0; i < 20; ++i) {
      const BlochVector3 r(scaled(random_unit(g), u(g)));
      const MeasurementFrame f(random_unit(g));
      const auto c = sample_collapses(r, f, BreakDistribution::uniform(), n, 100 + i, 2);
      CHECK(c.plus + c.minus == n);
      const double freq = static_cast<double>(c.plus) / n;
      CHECK(std::abs(freq - outcome_probabilities(r, f).plus) < 4.0 / std::sqrt(double(n)));
    }
  }

  TEST_CASE("collapse with a piecewise law follows that law") {
    const MeasurementFrame f({0, 0, 1});
    const BlochVector3 r({0.8, 0, 0.6});
    const auto d = BreakDistribution::piecewise({0.1, 0.2, 0.3, 0.4});
    const unsigned long long n = 200000;
    const auto c = sample_collapses(r, f, d, n, 5);
    CHECK(std::abs(double(c.plus) / n - d.probability_plus(0.8)) < 4.0 / std::sqrt(double(n)));
  }

  TEST_CASE("sample_collapses is independent of workers") {
    const MeasurementFrame f({0, 1, 0});
    const BlochVector3 r({0, 0.3, 0.2});
    const auto a = sample_collapses(r, f, BreakDistribution::uniform(), 30001, 8, 1);
    const auto b = sample_collapses(r, f, BreakDistribution::uniform(), 30001, 8, 5);
    CHECK(a.plus == b.plus);
  }

  TEST_CASE("universal average") {
    const MeasurementFrame f({0, 0, 1});
    const BlochVector3 r({std::sqrt(0.75), 0, 0.5});
    const auto k1 = universal_average(r, f, 1, 1000, 1);
    CHECK(k1.plus == outcome_probabilities(r, f).plus);
    const auto eq = universal_average(BlochVector3({1, 0, 0}), f, 16, 20000, 2);
    CHECK(std::abs(eq.plus - 0.5) < 4.0 / std::sqrt(20000.0));
    const auto big = universal_average(r, f, 64, 20000, 3, 2);
    CHECK(std::abs(big.plus - 0.75) < 0.01);
    CHECK(universal_average(r, f, 64, 5001, 3, 1).plus == universal_average(r, f, 64, 5001, 3, 4).plus);
    CHECK_THROWS_AS(universal_average(r, f, 0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(universal_average(r, f, 4, 0, 1), std::invalid_argument);
  }

  TEST_CASE("lambda basis: 15 traceless Hermitian, orthogonal") {
    const auto& L = lambda_basis();
    CHECK(L.size() == 15);
    for (std::size_t i = 0; i < 15; ++i) {
      CHECK(std::abs(L[i].trace()) < 1e-15);
      CHECK(L[i].hermiticity_error() < 1e-15);
      for (std::size_t j = 0; j < 15; ++j) {
        const cplx t = trace_of_product(L[i], L[j]);
        CHECK(std::abs(t - cplx(i == j ? 2.0 : 0.0)) < 1e-14);
      }
    }
    // first and last generators
    const Matrix4 l1 = kron(pauli(1), pauli(0)) * cplx(1 / std::numbers::sqrt2);
    const Matrix4 l15 = kron(pauli(3), pauli(3)) * cplx(1 / std::numbers::sqrt2);
    CHECK(L[0].max_abs_diff(l1) < 1e-16);
    CHECK(L[14].max_abs_diff(l15) < 1e-16);
  }

  TEST_CASE("singlet decomposition") {
    const auto r = decompose(singlet_state());
    CHECK(norm(r.r_alice()) < 1e-15);
    CHECK(norm(r.r_bob()) < 1e-15);
    const auto c = r.r_conn();
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) CHECK(std::abs(c[3 * j + k] - (j == k ? -kInvSqrt3 : 0.0)) < 1e-15);
    CHECK(std::abs(r.length() - 1.0) < 1e-12);
    CHECK(connection_rank1_residual(r) > 0.1);
    CHECK(connection_rank1_residual(r) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  }

  TEST_CASE("maximally mixed decomposes to zero") {
    for (double x : decompose(maximally_mixed_state()).components()) CHECK(std::abs(x) < 1e-16);
  }

  TEST_CASE("components equal Pauli expectations over sqrt 3") {
    std::mt19937_64 g(44);
    for (int i = 0; i < 50; ++i) {
      const Matrix4 rho = random_density(g, 1 + i % 4);
      const auto r = decompose(TwoQubitState(rho)).components();
      for (int k = 1; k <= 3; ++k) {
        CHECK(std::abs(r[k - 1] - kInvSqrt3 * oracle::pauli_expectation(rho, k, 0)) < 1e-13);
        CHECK(std::abs(r[k + 2] - kInvSqrt3 * oracle::pauli_expectation(rho, 0, k)) < 1e-13);
      }
      for (int j = 1; j <= 3; ++j)
        for (int k = 1; k <= 3; ++k)
          CHECK(std::abs(r[6 + 3 * (j - 1) + (k - 1)] - kInvSqrt3 * oracle::pauli_expectation(rho, j, k)) < 1e-13);
    }
  }

  TEST_CASE("reconstruction round trip and pure-state norm") {
    std::mt19937_64 g(45);
    for (int i = 0; i < 100; ++i) {
      const int rank = 1 + i % 4;
      const Matrix4 rho = random_density(g, rank);
      const auto r = decompose(TwoQubitState(rho));
      CHECK(reconstruct(r).max_abs_diff(rho) < 1e-10);
      if (rank == 1)
        CHECK(std::abs(r.length() - 1.0) < 1e-10);
      else
        CHECK(r.length() < 1.0);
    }
  }

  TEST_CASE("product states have rank-1 connection with constant 1/sqrt 3") {
    std::mt19937_64 g(46);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 50; ++i) {
      const Vec3 a = scaled(random_unit(g), u(g)), b = scaled(random_unit(g), u(g));
      const auto r = decompose(product_state(a, b));
      const auto ra = r.r_alice(), rb = r.r_bob();
      for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(ra[k] - a[k]) < 1e-13);
        CHECK(std::abs(rb[k] - b[k]) < 1e-13);
      }
      const auto c = r.r_conn();
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) CHECK(std::abs(c[3 * j + k] - kInvSqrt3 * a[j] * b[k]) < 1e-13);
      CHECK(connection_rank1_residual(r) < 1e-7);
    }
  }

  TEST_CASE("decompose_matrix rejects bad input") {
    Matrix4 m = Matrix4::identity() * cplx(0.25);
    m(0, 1) = {0, 0.1};
    CHECK_THROWS_AS(decompose_matrix(m), InvariantError);
    CHECK_THROWS_AS(decompose_matrix(Matrix4::identity()), InvariantError);
  }
}
