#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "glab/beltrami.hpp"
#include "glab/error.hpp"
#include "glab/grunsky.hpp"

using namespace glab;

namespace {

constexpr double kPi = std::numbers::pi;

QuadDifferential const_psi() { return QuadDifferential::polynomial({1.0 / kPi}); }
QuadDifferential z2_psi() { return psi_from_x(std::vector<cplx>{0.0, 1.0}); }

std::vector<cplx> unit_x(std::mt19937_64& rng, int N) {
  std::normal_distribution<double> n01;
  std::vector<cplx> x(N);
  double s = 0.0;
  for (auto& v : x) {
    v = cplx(n01(rng), n01(rng));
    s += std::norm(v);
  }
  for (auto& v : x) v /= std::sqrt(s);
  return x;
}

// mu(z) = a + b z + c conj(z)^2 with |a| + |b| + |c| < 1.
BeltramiField poly_field(cplx a, cplx b, cplx c) {
  return BeltramiField::from_function([=](cplx z) { return a + b * z + c * std::conj(z * z); },
                                      BeltramiField::Tag::custom);
}

BeltramiField random_poly_field(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  return poly_field({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)});
}

PolygonSpec rectangle(double a) {
  const std::vector<cplx> v{{a, 1}, {-a, 1}, {-a, -1}, {a, -1}};
  return PolygonSpec::from_vertices(v);
}

}  // namespace

TEST_CASE("pairing examples") {
  const BeltramiField t = constant_field(cplx(0.3, -0.2));
  CHECK(std::abs(pairing(t, const_psi()) - cplx(0.3, -0.2)) < 1e-13);
  CHECK(std::abs(pairing(t, z2_psi())) < 1e-14);
  const BeltramiField tm = teichmuller_beltrami(z2_psi(), 0.3);
  CHECK(std::abs(pairing(tm, z2_psi()) - 0.3) < 1e-12);
}

TEST_CASE("Holder bound over random pairs") {
  std::mt19937_64 rng(99);
  const DiskRule& R = default_disk_rule();
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const BeltramiField mu = (i % 4 == 0) ? constant_field(cplx(0.5 * std::cos(i), 0.4 * std::sin(i)))
                                           : random_poly_field(rng);
    const QuadDifferential psi = psi_from_x(unit_x(rng, 1 + i % 6));
    const cplx p = pairing(mu, psi, R);
    CHECK(std::abs(p) <= mu.sup_norm() * a1_norm(psi, R) * (1 + 1e-12));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("moments") {
  const cplx t(0.2, 0.1);
  const MomentVector c = moments(constant_field(t), 6);
  CHECK(std::abs(c.c[0] - t) < 1e-14);
  for (int k = 1; k <= 6; ++k) CHECK(std::abs(c.c[k]) < 1e-15);

  const BeltramiField tz = BeltramiField::from_function([t](cplx z) { return t * std::conj(z); },
                                                        BeltramiField::Tag::custom);
  const MomentVector d = moments(tz, 4);
  CHECK(std::abs(d.c[1] - t / 2.0) < 1e-14);
  CHECK(std::abs(d.c[0]) < 1e-15);
  CHECK(std::abs(d.c[2]) < 1e-15);

  const MomentVector z = moments(zero_field(), 5);
  for (const auto& v : z.c) CHECK(v == cplx{});

  // Brute-force oracle on an unrelated rule.
  std::mt19937_64 rng(4);
  const BeltramiField mu = random_poly_field(rng);
  const MomentVector m = moments(mu, 8);
  const DiskRule R = polar_rule(40, 96);
  for (int k = 0; k <= 8; ++k) {
    cplx s{};
    for (std::size_t i = 0; i < R.size(); ++i) s += R.weights[i] * mu(R.nodes[i]) * std::pow(R.nodes[i], k);
    CHECK(std::abs(m.c[k] - s / kPi) < 1e-13);
  }
}

TEST_CASE("infinitesimal Grunsky norm") {
  CHECK(std::abs(infinitesimal_grunsky(constant_field(-0.45), 16) - 0.45) < 1e-12);
  CHECK(infinitesimal_grunsky(zero_field(), 8) == 0.0);

  const BeltramiField tm = teichmuller_beltrami(z2_psi(), 0.6);
  const MomentVector m = moments(tm, 62);
  double prev = 0.0;
  for (int N : {2, 4, 8, 16, 32}) {
    const double a = infinitesimal_grunsky(m, N);
    CHECK(a >= prev - 1e-14);
    CHECK(a <= 0.6 + 1e-12);
    prev = a;
  }
  // Brute-force sup over random unit x never exceeds sigma_max(H).
  const Eigen::MatrixXcd H = infinitesimal_grunsky_matrix(m, 6);
  std::mt19937_64 rng(8);
  double best = 0.0;
  for (int i = 0; i < 3000; ++i) {
    const auto x = unit_x(rng, 6);
    Eigen::VectorXcd v(6);
    for (int k = 0; k < 6; ++k) v(k) = x[k];
    best = std::max(best, std::abs(cplx((v.transpose() * H * v)(0, 0))));
  }
  CHECK(best <= infinitesimal_grunsky(m, 6) + 1e-14);
  const std::vector<cplx> tv = takagi_vector(H);
  Eigen::VectorXcd w(6);
  for (int k = 0; k < 6; ++k) w(k) = tv[k];
  CHECK(std::abs(std::abs(cplx((w.transpose() * H * w)(0, 0))) - infinitesimal_grunsky(m, 6)) < 1e-13);
  CHECK_THROWS_AS(infinitesimal_grunsky(moments(tm, 4), 8), InvalidArgument);
}

TEST_CASE("x^T H x is the pairing with psi_x") {
  std::mt19937_64 rng(12);
  const BeltramiField mu = random_poly_field(rng);
  const MomentVector m = moments(mu, 14);
  const Eigen::MatrixXcd H = infinitesimal_grunsky_matrix(m, 5);
  for (int i = 0; i < 10; ++i) {
    const auto x = unit_x(rng, 5);
    Eigen::VectorXcd v(5);
    for (int k = 0; k < 5; ++k) v(k) = x[k];
    const cplx q = (v.transpose() * H * v)(0, 0);
    CHECK(std::abs(q - pairing(mu, psi_from_x(x), default_disk_rule())) < 1e-13);
  }
}

TEST_CASE("first-order Grunsky variation carries the sign of the pairing") {
  // With alpha_11 = b_1 and b_n = s c_{n-1}, d/ds h_x = +<mu, psi_x>.
  std::mt19937_64 rng(31);
  const int N = 4;
  for (int i = 0; i < 5; ++i) {
    const BeltramiField mu = random_poly_field(rng);
    const MomentVector m = moments(mu, 2 * N - 2);
    const auto x = unit_x(rng, N);
    const double s = 1e-4;
    const cplx fd = h_x(grunsky_matrix(first_order_laurent(m, s, N), N), x) / s;
    const cplx pr = pairing(mu, psi_from_x(x), default_disk_rule());
    CHECK(std::abs(fd - pr) < 1e-3 * std::abs(pr) + 1e-12);
  }
}

TEST_CASE("extremality bracket") {
  const Bracket c = teich_norm_bracket(constant_field(0.35), 4);
  CHECK(c.lower >= 0.35 - 1e-6);
  CHECK(c.lower <= c.upper * (1 + 1e-12));
  CHECK(c.extremal);
  const Bracket z = teich_norm_bracket(zero_field(), 4);
  CHECK(z.lower == 0.0);
  CHECK(z.upper == 0.0);

  // A small harmonic coefficient is not extremal.
  const ExteriorMapSpec s = solve_parameters(rectangle(2.0));
  const BeltramiField aw = ahlfors_weill(MapSpec{s}, 0.2);
  const Bracket h = teich_norm_bracket(aw, 6);
  CHECK(h.lower < h.upper - 1e-3);
  CHECK(!h.extremal);
  CHECK(infinitesimal_grunsky(aw, 16) <= h.upper + 1e-9);
}

TEST_CASE("bracket is deterministic for a fixed seed") {
  const BeltramiField tm = teichmuller_beltrami(psi_from_x(std::vector<cplx>{0.3, 0.8, 0.2}), 0.4);
  BracketOptions o;
  o.restarts = 4;
  o.iterations = 60;
  o.seed = 5;
  const Bracket a = teich_norm_bracket(tm, 3, o), b = teich_norm_bracket(tm, 3, o);
  CHECK(a.lower == b.lower);
  CHECK(a.best == b.best);
}

TEST_CASE("chain rule") {
  const BeltramiField mu = teichmuller_beltrami(z2_psi(), 0.5);
  const cplx nu(0.2, -0.1);
  const BeltramiField s0 = chain_rule(nu, zero_field());
  CHECK(std::abs(s0(cplx(0.3, 0.2)) - nu) < 1e-15);
  const BeltramiField id = chain_rule(0.0, mu);
  for (cplx z : {cplx(0.1, 0.5), cplx(-0.7, 0.1)}) CHECK(std::abs(id(z) - mu(z)) < 1e-15);

  const BeltramiField c = chain_rule(0.2, constant_field(0.3));
  CHECK(std::abs(c(0.0) - 0.5 / 1.06) < 1e-15);
  CHECK(std::abs(c.sup_norm() - 0.5 / 1.06) < 1e-15);

  // Oracle: compose (z + m conj z) o (a z + b conj z) explicitly.
  const cplx m(0.1, 0.25), n(-0.3, 0.2);
  const AffineMap A = AffineMap::normalized(n);
  const cplx expect = (A.b + m * std::conj(A.a)) / (A.a + m * std::conj(A.b));
  CHECK(std::abs(chain_rule(A, constant_field(m))(0.4) - expect) < 1e-15);

  // Composition with the inverse affine map recovers mu.
  const BeltramiField there = chain_rule(A, mu);
  const BeltramiField back = chain_rule(A.inverse(), there);
  for (cplx z : {cplx(0.1, 0.5), cplx(-0.4, -0.3), cplx(0.05, 0.0)}) CHECK(std::abs(back(z) - mu(z)) < 1e-12);
  CHECK(there.sup_norm() < 1.0);
}

TEST_CASE("Ahlfors-Weill coefficients") {
  const BeltramiField z = ahlfors_weill(MapSpec{EllipseOracle{0.0}});
  CHECK(z.grid_max() == 0.0);

  const double b = 1e-3;
  const BeltramiField nu = ahlfors_weill(MapSpec{EllipseOracle{b}});
  const DiskRule& R = default_disk_rule();
  double res = 0.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    const double d = 1.0 - std::norm(R.nodes[i]);
    res = std::max(res, std::abs(nu.samples()[i] + 3 * b * d * d));
  }
  CHECK(res < 1e-5);
  CHECK(std::abs(pairing(nu, const_psi()) + b) < 1e-5);

  for (double bb : {0.1, 0.3}) {
    const MapSpec e{EllipseOracle{bb}};
    CHECK(ahlfors_weill(e).grid_max() <= 0.5 * b_norm(e).refined + 1e-12);
  }
  const MapSpec sq{solve_parameters(rectangle(1.0))};
  const double bn = b_norm(sq).refined;
  CHECK(ahlfors_weill(sq, 0.6).grid_max() <= 0.5 * 0.6 * bn + 1e-12);
  CHECK_THROWS_AS(ahlfors_weill(sq, 1.0), InvalidArgument);
}

TEST_CASE("boundary probes") {
  const cplx z0 = std::polar(1.0, 2.0);
  const ProbeResult c = boundary_probe(constant_field(0.4), z0, 10);
  for (int p = 1; p <= 10; ++p) {
    const double r = 1.0 - std::ldexp(1.0, -p);
    CHECK(std::abs(c.values[p - 1] - 0.4 * (1 - r * r) * (1 - r * r)) < 1e-10);
  }
  CHECK(c.limit < 1e-3);

  const ProbeResult z = boundary_probe(zero_field(), z0, 5);
  for (double v : z.values) CHECK(v == 0.0);

  const BeltramiField tm = teichmuller_beltrami(z2_psi(), 0.5);
  const ProbeResult t = boundary_probe(tm, z0, 12);
  CHECK(t.values.back() < 0.05 * 0.5);
  CHECK(t.limit < 0.05 * 0.5);

  const BeltramiField self = teichmuller_beltrami(concentrating_sequence(z0, 12), 0.5);
  const ProbeResult s = boundary_probe(self, z0, 12);
  CHECK(s.values.back() > 0.5 * (1 - 1e-8));
  CHECK(s.limit >= 0.9 * 0.5);
  CHECK_THROWS_AS(boundary_probe(tm, 0.5, 3), InvalidArgument);
}

TEST_CASE("affine family") {
  auto a = affine_family(1.0, 0.0);
  CHECK(a.k == 0.0);
  auto b = affine_family(1.0, 0.5);
  CHECK(b.k == 0.5);
  CHECK(b.mu(0.3) == cplx(0.5));
  auto c = affine_family(2.0, -0.6);
  CHECK(std::abs(c.mu(0.0) - (-0.3)) < 1e-16);
  CHECK(std::abs(c.k - 0.3) < 1e-16);
  CHECK_THROWS_AS(affine_family(1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(affine_family(0.0, 0.1), InvalidArgument);
}

TEST_CASE("radial reflection extension: k and a finite-difference Beltrami oracle") {
  for (double a : {1.0, 2.0}) {
    const PolygonSpec poly = rectangle(a);
    const ExteriorMapSpec s = solve_parameters(poly);
    const ReflectionExtension ext = reflection_extension(s, poly);
    CHECK(std::abs(ext.k_upper - std::max(a, 1.0) / std::sqrt(1 + a * a)) < 1e-15);
    CHECK(ext.mu.grid_max() <= ext.k_upper + 1e-12);
    CHECK(ext.mu.grid_max() > ext.k_upper - 1e-2);

    // G(z) = c + rho^2 / conj(F(1/conj z) - c); rho from ray/side intersection.
    auto G = [&](cplx z) {
      const cplx v = evaluate(s, 1.0 / std::conj(z)) - ext.center;
      const double th = std::arg(v);
      double rho = 1e300;
      const auto& V = poly.vertices();
      for (int j = 0; j < 4; ++j) {
        const cplx p = V[j] - ext.center, q = V[(j + 1) % 4] - ext.center;
        // Solve r e^{i th} = p + u (q - p).
        const cplx d = std::polar(1.0, th), e = q - p;
        const double det = d.real() * (-e.imag()) + e.real() * d.imag();
        if (std::abs(det) < 1e-14) continue;
        const double r = (p.real() * (-e.imag()) + e.real() * p.imag()) / det;
        const double u = (d.real() * p.imag() - d.imag() * p.real()) / det;
        if (r > 0 && u >= -1e-12 && u <= 1 + 1e-12) rho = std::min(rho, r);
      }
      return ext.center + rho * rho / std::conj(v);
    };
    for (cplx z : {cplx(0.3, 0.2), cplx(-0.5, 0.4), cplx(0.1, -0.8)}) {
      const double h = 1e-6;
      const cplx gx = (G(z + h) - G(z - h)) / (2 * h);
      const cplx gy = (G(z + cplx(0, h)) - G(z - cplx(0, h))) / (2 * h);
      const cplx gz = 0.5 * (gx - cplx(0, 1) * gy), gzb = 0.5 * (gx + cplx(0, 1) * gy);
      CHECK(std::abs(ext.mu(z) - gzb / gz) < 1e-6);
    }
  }
}

TEST_CASE("sample-only fields pair only on their own grid") {
  const DiskRule r = polar_rule(16, 32);
  const BeltramiField f = BeltramiField::from_samples(r, std::vector<cplx>(r.size(), 0.2),
                                                      BeltramiField::Tag::custom);
  CHECK(!f.has_evaluator());
  CHECK(std::abs(pairing(f, const_psi(), r) - 0.2) < 1e-14);
  CHECK_THROWS_AS(pairing(f, const_psi(), default_disk_rule()), InvalidArgument);
  CHECK_THROWS_AS(BeltramiField::from_samples(r, std::vector<cplx>(r.size(), 1.0), BeltramiField::Tag::custom),
                  InvalidArgument);
}
