#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "entangle/errors.hpp"
#include "entangle/quantum_ref.hpp"
#include "oracles.hpp"

using namespace entangle;

namespace {

Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> n(0, 1);
  Vec3 v{n(g), n(g), n(g)};
  const double l = norm(v);
  return {v[0] / l, v[1] / l, v[2] / l};
}

// Rodrigues rotation about a unit axis.
Vec3 rotate(const Vec3& v, const Vec3& k, double t) {
  const double c = std::cos(t), s = std::sin(t), d = dot(k, v);
  const Vec3 x{k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]};
  return {v[0] * c + x[0] * s + k[0] * d * (1 - c), v[1] * c + x[1] * s + k[1] * d * (1 - c),
          v[2] * c + x[2] * s + k[2] * d * (1 - c)};
}

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

const std::array<cplx, 4> kSingletAmps = {0.0, 1.0 / std::numbers::sqrt2, -1.0 / std::numbers::sqrt2, 0.0};

}  // namespace

TEST_SUITE("quantum_ref") {
  TEST_CASE("axis validation") {
    CHECK_NOTHROW(Axis({0, 0, 1}));
    CHECK_THROWS_AS(Axis({0, 0, 1.01}), std::invalid_argument);
    CHECK(norm(Axis::normalized({3, 4, 0}).vec()) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Axis::normalized({0, 0, 0}), std::invalid_argument);
  }

  TEST_CASE("state invariants throw InvariantError") {
    Matrix4 bad = maximally_mixed_state().rho();
    bad(0, 1) = {0.1, 0};
    CHECK_THROWS_AS((TwoQubitState(bad)), InvariantError);
    Matrix4 trace2 = Matrix4::identity() * cplx{0.5, 0};
    CHECK_THROWS_AS((TwoQubitState(trace2)), InvariantError);
    Matrix4 neg;
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS((TwoQubitState(neg)), InvariantError);
  }

  TEST_CASE("singlet basics") {
    const auto s = singlet_state();
    CHECK(std::abs(s.rho().trace() - cplx(1)) < 1e-15);
    CHECK(std::abs(trace_of_product(s.rho(), s.rho()) - cplx(1)) < 1e-14);
    const Matrix2 half = Matrix2::identity() * cplx{0.5, 0};
    CHECK(reduced_alice(s.rho()).max_abs_diff(half) < 1e-15);
    CHECK(reduced_bob(s.rho()).max_abs_diff(half) < 1e-15);
    // swapping the subsystems: rho(ab, cd) -> rho(ba, dc)
    Matrix4 swapped;
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t c = 0; c < 2; ++c)
          for (std::size_t d = 0; d < 2; ++d) swapped(2 * b + a, 2 * d + c) = s.rho()(2 * a + b, 2 * c + d);
    CHECK(swapped.max_abs_diff(s.rho()) < 1e-15);
  }

  TEST_CASE("joint distribution examples") {
    const auto s = singlet_state();
    const Axis z({0, 0, 1});
    const auto zz = joint_distribution(s, z, z).cells();
    const std::array<double, 4> anti = {0, 0.5, 0.5, 0};
    for (int k = 0; k < 4; ++k) CHECK(std::abs(zz[k] - anti[k]) < 1e-15);
    const auto e = correlation(joint_distribution(s, z, Axis::in_xz_plane(std::numbers::pi / 4)));
    CHECK(std::abs(e + std::numbers::sqrt2 / 2) < 1e-15);
    const auto up = product_state({0, 0, 1}, {0, 0, 1});
    const auto d = joint_distribution(up, z, z);
    CHECK(std::abs(d.pp() - 1.0) < 1e-15);
  }

  TEST_CASE("joint distribution matches the amplitude oracle") {
    std::mt19937_64 g(31);
    std::normal_distribution<double> n(0, 1);
    for (int i = 0; i < 200; ++i) {
      std::array<cplx, 4> psi;
      double l = 0;
      for (auto& x : psi) {
        x = {n(g), n(g)};
        l += std::norm(x);
      }
      for (auto& x : psi) x /= std::sqrt(l);
      const auto state = TwoQubitState::pure(psi);
      const Vec3 a = random_unit(g), b = random_unit(g);
      const auto ref = oracle::joint_from_amplitudes(psi, a, b);
      const auto got = joint_distribution(state, Axis(a), Axis(b)).cells();
      for (int k = 0; k < 4; ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-12);
    }
  }

  TEST_CASE("singlet correlation is -a.b") {
    std::mt19937_64 g(32);
    const auto s = singlet_state();
    for (int i = 0; i < 100; ++i) {
      const Vec3 a = random_unit(g), b = random_unit(g);
      CHECK(std::abs(correlation(joint_distribution(s, Axis(a), Axis(b))) + dot(a, b)) < 1e-12);
      const auto ref = oracle::joint_from_amplitudes(kSingletAmps, a, b);
      CHECK(std::abs(oracle::corr(ref) + dot(a, b)) < 1e-12);
    }
  }

  TEST_CASE("singlet marginals and rotational invariance") {
    std::mt19937_64 g(33);
    const auto s = singlet_state();
    for (int i = 0; i < 100; ++i) {
      const AxisQuad q{Axis(random_unit(g)), Axis(random_unit(g)), Axis(random_unit(g)), Axis(random_unit(g))};
      const auto t = experiment_table(s, q);
      CHECK(marginals(t, 1e-12).max_abs_residual < 1e-12);
      const Vec3 k = random_unit(g);
      const double ang = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(g);
      auto rot = [&](const Axis& x) { return Axis::normalized(rotate(x.vec(), k, ang)); };
      const AxisQuad r{rot(q.a), rot(q.a_prime), rot(q.b), rot(q.b_prime)};
      CHECK(experiment_table(s, r).max_abs_deviation(t) < 1e-10);
    }
  }

  TEST_CASE("coplanar family reproduces the angle pattern and -2 sqrt 2") {
    const auto q = coplanar_axes(std::numbers::pi / 4);
    auto angle = [](const Axis& x, const Axis& y) { return std::acos(std::clamp(dot(x.vec(), y.vec()), -1.0, 1.0)); };
    CHECK(angle(q.a, q.b) == doctest::Approx(std::numbers::pi / 4));
    CHECK(angle(q.a, q.b_prime) == doctest::Approx(3 * std::numbers::pi / 4));
    CHECK(angle(q.a_prime, q.b) == doctest::Approx(std::numbers::pi / 4));
    CHECK(angle(q.a, q.a_prime) == doctest::Approx(std::numbers::pi / 2));
    CHECK(angle(q.b, q.b_prime) == doctest::Approx(std::numbers::pi / 2));
    const auto c = chsh_for_axes(singlet_state(), q);
    CHECK(std::abs(c.b_chsh + 2 * std::numbers::sqrt2) < 1e-12);
    CHECK(std::abs(c.a_chsh) < 1e-12);
    CHECK(std::abs(c.c_chsh) < 1e-12);
    CHECK(std::abs(c.d_chsh) < 1e-12);
  }

  TEST_CASE("equal axes and the mixed state") {
    std::mt19937_64 g(34);
    const Axis n(random_unit(g));
    const auto s = singlet_state();
    const auto c = chsh_for_axes(s, {n, n, n, n});
    const double e = correlation(joint_distribution(s, n, n));
    for (double v : c.values()) CHECK(std::abs(v - 2 * e) < 1e-12);
    const auto m = chsh_for_axes(maximally_mixed_state(), coplanar_axes(0.3));
    for (double v : m.values()) CHECK(std::abs(v) < 1e-15);
  }

  TEST_CASE("tsirelson scan") {
    const auto s = singlet_state();
    std::vector<double> grid(10000);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = std::numbers::pi * i / (grid.size() - 1);
    const auto pts = scan_tsirelson(s, grid);
    double best = 0;
    for (const auto& p : pts) {
      CHECK(p.max_abs <= 2 * std::numbers::sqrt2 + 1e-9);
      CHECK(std::abs(p.chsh.b_chsh + 2 * (std::cos(p.angle) + std::sin(p.angle))) < 1e-12);
      best = std::max(best, p.max_abs);
    }
    CHECK(best == doctest::Approx(2 * std::numbers::sqrt2).epsilon(1e-7));
    const std::array<double, 3> probe = {0.0, std::numbers::pi / 4, std::numbers::pi / 2};
    const auto three = scan_tsirelson(s, probe);
    CHECK(std::abs(std::abs(three[0].chsh.b_chsh) - 2) < 1e-12);
    CHECK(std::abs(std::abs(three[1].chsh.b_chsh) - 2 * std::numbers::sqrt2) < 1e-12);
    CHECK(std::abs(std::abs(three[2].chsh.b_chsh) - 2) < 1e-12);
    CHECK_THROWS_AS(scan_tsirelson(s, std::span<const double>{}), std::invalid_argument);
  }

  TEST_CASE("hermitian eigenvalues agree with Eigen") {
    std::mt19937_64 g(35);
    for (int i = 0; i < 100; ++i) {
      const Matrix4 rho = random_density(g, 1 + i % 4);
      Eigen::Matrix4cd m;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = rho(r, c);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m);
      const auto ours = hermitian_eigenvalues<4>(rho);
      for (int k = 0; k < 4; ++k) CHECK(std::abs(ours[k] - es.eigenvalues()(k)) < 1e-12);
      CHECK_NOTHROW(TwoQubitState{rho});
    }
  }

  TEST_CASE("partial traces match Pauli expectations") {
    std::mt19937_64 g(36);
    for (int i = 0; i < 50; ++i) {
      const Matrix4 rho = random_density(g, 2);
      const Matrix2 ra = reduced_alice(rho), rb = reduced_bob(rho);
      for (int k = 1; k <= 3; ++k) {
        CHECK(std::abs(trace_of_product(ra, pauli(k)).real() - oracle::pauli_expectation(rho, k, 0)) < 1e-13);
        CHECK(std::abs(trace_of_product(rb, pauli(k)).real() - oracle::pauli_expectation(rho, 0, k)) < 1e-13);
      }
    }
  }
}
