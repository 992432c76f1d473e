#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "glab/error.hpp"
#include "glab/quaddiff.hpp"

using namespace glab;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<cplx> random_x(std::mt19937_64& rng, int N) {
  std::normal_distribution<double> n01;
  std::vector<cplx> x(N);
  for (auto& v : x) v = cplx(n01(rng), n01(rng));
  return x;
}

}  // namespace

TEST_CASE("basis differentials") {
  const std::vector<cplx> e1{1.0}, e2{0.0, 1.0};
  const QuadDifferential p1 = psi_from_x(e1), p2 = psi_from_x(e2);
  const cplx z(0.3, 0.4);
  CHECK(std::abs(p1(z) - 1.0 / kPi) < 1e-16);
  // Ordered-pair sum: only (2,2) contributes, sqrt(4)/pi z^2.
  CHECK(std::abs(p2(z) - 2.0 / kPi * z * z) < 1e-16);
  CHECK(std::abs(a1_norm(p2) - 1.0) < 1e-12);
}

TEST_CASE("A1 norm equals |x|^2 and psi = omega^2") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int N = 1 + trial % 16;
    const std::vector<cplx> x = random_x(rng, N);
    double n2 = 0.0;
    for (const auto& v : x) n2 += std::norm(v);
    const QuadDifferential psi = psi_from_x(x);
    CHECK(std::abs(a1_norm(psi) - n2) < 1e-10 * n2);
    for (cplx z : {cplx(0.1, 0.7), cplx(-0.95, 0.05), cplx(0.0, 0.0)}) {
      const cplx w = *psi.omega(z);
      CHECK(std::abs(psi(z) - w * w) < 1e-12 * std::max(1.0, std::abs(psi(z))));
    }
  }
}

TEST_CASE("concentrating kernels: closed-form normalization") {
  const cplx z0 = std::polar(1.0, 0.9);
  for (int p : {1, 3, 6, 10, 14}) {
    const QuadDifferential q = concentrating_sequence(z0, p);
    const double r = 1.0 - std::ldexp(1.0, -p);
    const double exact = (1 - r * r) * (1 - r * r) / kPi;
    CHECK(std::abs(q.kernel_scale() / exact - 1.0) < 1e-10);
    CHECK(std::abs(a1_norm(q) - 1.0) < 1e-9);
    CHECK(std::abs(q(0.0) - q.kernel_scale()) < 1e-20);
  }
}

TEST_CASE("Teichmueller coefficient k |psi| / psi") {
  const std::vector<cplx> e2{0.0, 1.0};
  const QuadDifferential psi = psi_from_x(e2);
  const BeltramiField mu = teichmuller_beltrami(psi, 0.4);
  CHECK(mu.sup_norm() == 0.4);
  const cplx z = std::polar(0.6, 1.1);
  CHECK(std::abs(mu(z) - 0.4 * std::polar(1.0, -2.2)) < 1e-15);
  CHECK(std::abs(std::abs(mu(0.0)) - 0.4) < 1e-15);  // zero of psi: nudged, still |mu| = k
  CHECK(mu.grid_max() <= 0.4 + 1e-15);
  CHECK_THROWS_AS(teichmuller_beltrami(psi, 1.0), InvalidArgument);
}

TEST_CASE("argument checks") {
  CHECK_THROWS_AS(psi_from_x(std::vector<cplx>{0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(concentrating_sequence(cplx(0.5, 0.0), 3), InvalidArgument);
  CHECK_THROWS_AS(concentrating_sequence(cplx(1.0, 0.0), 0), InvalidArgument);
  CHECK_THROWS_AS(QuadDifferential::cauchy_kernel(1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("a1_norm reports unconverged quadrature") {
  // |1 + z^300| oscillates faster than 256 angles resolve; doubling disagrees.
  std::vector<cplx> c(301);
  c[0] = c[300] = 1.0;
  CHECK_THROWS_AS(a1_norm(QuadDifferential::polynomial(c), 64), NumericalFailure);
  std::vector<cplx> d(41);
  d[40] = 1.0;
  CHECK(std::abs(a1_norm(QuadDifferential::polynomial(d), 64) - 2 * kPi / 42) < 1e-12);
}
