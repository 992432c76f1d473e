#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "glab/error.hpp"
#include "glab/quadrature.hpp"
#include "glab/scmap.hpp"

using namespace glab;

namespace {

constexpr double kPi = std::numbers::pi;

PolygonSpec rectangle(double a) {
  const std::vector<cplx> v{{a, 1}, {-a, 1}, {-a, -1}, {a, -1}};
  return PolygonSpec::from_vertices(v);
}

// Length of the image of the arc [t0, t1] for prevertices at the given
// angles, all exponents 1/2: int |prod (1 - e^{i(phi_j - t)})|^(1/2) dt.
// The smoothstep substitution removes the square-root endpoint behaviour.
double arc_length(const std::array<double, 4>& phi, double t0, double t1) {
  static const IntervalRule gl = gauss_legendre(200);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double u = 0.5 * (gl.nodes[i] + 1.0);
    const double t = t0 + (t1 - t0) * (3 * u * u - 2 * u * u * u);
    const double dt = (t1 - t0) * 6 * u * (1 - u);
    double f = 1.0;
    for (double p : phi) f *= std::sqrt(2.0 * std::abs(std::sin((t - p) / 2)));
    s += 0.5 * gl.weights[i] * f * dt;
  }
  return s;
}

// Gap g of the symmetric rectangle prevertices {0, g, pi, pi + g} matching
// the side ratio a, by bisection.
double rectangle_gap_oracle(double a) {
  double lo = 1e-6, hi = kPi - 1e-6;
  for (int it = 0; it < 200; ++it) {
    const double g = 0.5 * (lo + hi);
    const std::array<double, 4> phi{0.0, g, kPi, kPi + g};
    const double ratio = arc_length(phi, 0.0, g) / arc_length(phi, g, kPi);
    (ratio < a ? lo : hi) = g;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("polygon validation") {
  CHECK_NOTHROW(rectangle(2.0));
  const std::vector<cplx> collinear{{0, 0}, {1, 0}, {2, 0}, {1, 1}};
  const std::vector<cplx> clockwise{{1, -1}, {-1, -1}, {-1, 1}, {1, 1}};
  const std::vector<cplx> dup{{0, 0}, {0, 0}, {1, 1}, {0, 1}};
  const std::vector<cplx> dart{{0, 0}, {2, 0}, {0.5, 0.5}, {0, 2}};
  const std::vector<cplx> three{{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(PolygonSpec::from_vertices(collinear), InvalidArgument);
  CHECK_THROWS_AS(PolygonSpec::from_vertices(clockwise), InvalidArgument);
  CHECK_THROWS_AS(PolygonSpec::from_vertices(dup), InvalidArgument);
  CHECK_THROWS_AS(PolygonSpec::from_vertices(dart), InvalidArgument);
  CHECK_THROWS_AS(PolygonSpec::from_vertices(three), InvalidArgument);
  const auto al = rectangle(1.0).alpha();
  for (double a : al) CHECK(a == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("square: symmetric prevertices, capacity and b3 = 1/6") {
  const ExteriorMapSpec s = solve_parameters(rectangle(1.0));
  for (double g : s.gaps()) CHECK(std::abs(g - kPi / 2) < 1e-12);
  CHECK(std::abs(s.residue()) < 1e-12);
  // Capacity of a square of side L is Gamma(1/4)^2 L / (4 pi^{3/2}); here L = 2.
  const double cap = std::pow(std::tgamma(0.25), 2) * 2.0 / (4 * std::pow(kPi, 1.5));
  CHECK(std::abs(std::abs(s.d1) - cap) < 1e-10);
  const TruncatedSeries b = laurent_coeffs(s, 16);
  CHECK(std::abs(b[1] - 1.0) == 0.0);
  CHECK(std::abs(b[-3] - 1.0 / 6.0) < 1e-12);
  CHECK(std::abs(b[0]) < 1e-12);
}

TEST_CASE("rectangle gaps agree with a bisection oracle") {
  for (double a : {2.0, 3.0}) {
    const ExteriorMapSpec s = solve_parameters(rectangle(a));
    CHECK(s.residual < 1e-10);
    CHECK(std::abs(s.gaps()[0] - rectangle_gap_oracle(a)) < 1e-9);
    CHECK(boundary_deviation(s, rectangle(a), 256) < 1e-9);
  }
}

TEST_CASE("general quadrilateral maps onto its boundary") {
  const std::vector<cplx> v{{0.2, -1.0}, {1.5, 0.3}, {0.1, 1.2}, {-1.3, 0.0}};
  const PolygonSpec p = PolygonSpec::from_vertices(v);
  const ExteriorMapSpec s = solve_parameters(p);
  CHECK(s.residual < 1e-10);
  CHECK(boundary_deviation(s, p, 256) < 1e-9);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(evaluate(s, s.prevertices[j]) - v[j]) < 1e-9);
  // Path independence: evaluate along two homotopic paths.
  for (cplx z : {cplx(1.7, 0.4), cplx(-0.3, -2.5), cplx(0.0, 1.05)}) {
    CHECK(std::abs(evaluate(s, z) - evaluate_via(s, z, 2.0)) < 1e-10);
  }
  CHECK_THROWS_AS(evaluate(s, cplx(0.5, 0.0)), InvalidArgument);
}

TEST_CASE("Laurent coefficients: series route agrees with contour integrals") {
  const std::vector<cplx> v{{0.2, -1.0}, {1.5, 0.3}, {0.1, 1.2}, {-1.3, 0.0}};
  const ExteriorMapSpec s = solve_parameters(PolygonSpec::from_vertices(v));
  const TruncatedSeries a = laurent_coeffs(s, 20);
  const TruncatedSeries c = contour_laurent(MapSpec{s}, 20, 1.3, 2048);
  for (int n = 0; n <= 20; ++n) CHECK(std::abs(a[-n] - c[-n]) < 1e-9);
  // And the expansion reproduces F / d1 outside the disk.
  const cplx z(1.8, -2.2);
  CHECK(std::abs(evaluate(laurent_coeffs(s, 60, false), z) - evaluate(s, z) / s.d1) < 1e-10);
}

TEST_CASE("pre-Schwarzian and Schwarzian agree with Cauchy-integral derivatives") {
  const std::vector<cplx> v{{0.2, -1.0}, {1.5, 0.3}, {0.1, 1.2}, {-1.3, 0.0}};
  const ExteriorMapSpec s = solve_parameters(PolygonSpec::from_vertices(v));
  for (cplx z : {cplx(1.4, 0.3), cplx(-0.9, 1.1)}) {
    // F'' and F''' from the closed-form F' by trapezoid contour integration.
    const double r = 0.1;
    const int n = 128;
    cplx d1{}, d2{};
    for (int k = 0; k < n; ++k) {
      const cplx e = std::polar(1.0, 2 * kPi * k / n);
      const cplx fp = derivative(s, z + r * e);
      d1 += fp / (r * e) / double(n);
      d2 += 2.0 * fp / (r * r * e * e) / double(n);
    }
    const cplx fp = derivative(s, z);
    const cplx b = d1 / fp;
    const cplx S = d2 / fp - 1.5 * b * b;
    CHECK(std::abs(pre_schwarzian(s, z) - b) < 1e-10);
    CHECK(std::abs(schwarzian(s, z) - S) < 1e-9);
  }
}

TEST_CASE("Schwarzian at infinity: expansion and direct formula agree") {
  const ExteriorMapSpec s = solve_parameters(rectangle(2.0));
  for (double r : {0.2, 0.24, 0.26, 0.5}) {
    const cplx u = std::polar(r, 0.7);
    const cplx direct = schwarzian(MapSpec{s}, 1.0 / u) / std::pow(u, 4);
    CHECK(std::abs(schwarzian_at_inverse(s, u) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
  }
  CHECK(std::isfinite(std::abs(schwarzian_at_inverse(s, cplx{}))));
}

TEST_CASE("ellipse oracle: Schwarzian closed form and Bers norm 6|b|") {
  const EllipseOracle e{0.3};
  const cplx z(1.2, 0.8);
  CHECK(std::abs(schwarzian(e, z) + 6.0 * 0.3 / std::pow(z * z - 0.3, 2)) < 1e-13);
  const BNormEstimate bn = b_norm(MapSpec{e}, 64);
  CHECK(bn.refined <= 6 * 0.3 + 1e-12);
  CHECK(bn.refined > 6 * 0.3 - 1e-3);
  const TruncatedSeries l = laurent_coeffs(e, 5);
  CHECK(l[-1] == cplx(0.3));
  CHECK(l[-2] == cplx{});
}

TEST_CASE("square Bers norm reflects the corner angle 2(alpha^2 - 1) = 2.5") {
  const ExteriorMapSpec s = solve_parameters(rectangle(1.0));
  const BNormEstimate bn = b_norm(MapSpec{s}, 32);
  CHECK(bn.refined <= 2.5 + 1e-6);
  CHECK(bn.refined > 2.5 - 1e-2);
}
