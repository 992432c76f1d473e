#pragma once

// Exterior Schwarz-Christoffel maps of convex quadrilateral complements.
//
// The map F sends |z| > 1 onto the complement of the polygon with F(inf) = inf:
//
//   F(z) = d0 + d1 * int_{e_1}^{z} prod_j (1 - e_j / w)^{alpha_j - 1} dw,
//
// where pi alpha_j is the angle of the complement at A_j. The integrand is the
// usual prod (w - e_j)^{alpha_j - 1} / w^2 with the w^2 absorbed into the
// product (sum(alpha_j - 1) = 2), so it is single valued on |w| >= 1 with the
// principal branch and equals 1 + O(1/w^2) at infinity. The base point is the
// prevertex e_1 rather than 0, and d0 = A_1.
//
// F(z) = d1 z + O(1); the class-Sigma0 representative z + b0 + b1/z + ... is
// F / d1, and every Laurent/Grunsky quantity below refers to it.

#include <array>
#include <complex>
#include <span>
#include <variant>
#include <vector>

#include "glab/quadrature.hpp"
#include "glab/series.hpp"

namespace glab {

using cplx = std::complex<double>;

class PolygonSpec {
 public:
  // Validates: 4 distinct vertices, positive orientation, strictly convex.
  static PolygonSpec from_vertices(std::span<const cplx> vertices);

  const std::array<cplx, 4>& vertices() const noexcept { return vertices_; }
  // alpha_j = (angle of the complement at A_j) / pi, each in (1, 2).
  const std::array<double, 4>& alpha() const noexcept { return alpha_; }
  std::array<double, 4> side_lengths() const;
  // Distance from w to the polygon boundary.
  double boundary_distance(cplx w) const;

 private:
  std::array<cplx, 4> vertices_{};
  std::array<double, 4> alpha_{};
};

struct ExteriorMapSpec {
  std::array<cplx, 4> prevertices{};  // e_1 = 1, positive cyclic order
  std::array<double, 4> angles{};     // arg e_j in [0, 2 pi)
  std::array<double, 4> alpha{};
  cplx d0{};
  cplx d1{1.0, 0.0};
  // int_{e_1}^{e_j} of the integrand along the unit circle.
  std::array<cplx, 4> vertex_integrals{};
  // Max relative side-length error of the parameter solve.
  double residual = 0.0;
  int iterations = 0;
  // Gauss-Jacobi rules with a (1+x)^{alpha_j - 1} endpoint weight.
  std::array<IntervalRule, 4> endpoint_rules{};

  // sum_j (alpha_j - 1) e_j; zero for a single-valued map.
  cplx residue() const;
  std::array<double, 4> gaps() const;
};

// F(z) = z + b / z, |b| < 1. b = 0 is the identity. Closed-form oracle.
struct EllipseOracle {
  cplx b{};
};

using MapSpec = std::variant<ExteriorMapSpec, EllipseOracle>;

struct SolveOptions {
  double tol = 1e-12;
  int max_iterations = 100;
  int arc_nodes = 48;
};

// Solves the prevertex problem with e_1 = 1 pinned. Throws NumericalFailure
// (with the residual) when the side lengths cannot be matched to `tol`.
ExteriorMapSpec solve_parameters(const PolygonSpec& poly, const SolveOptions& opts = {});

// Product integrand prod (1 - e_j / z)^{alpha_j - 1}; equals F'(z) / d1.
cplx integrand(const ExteriorMapSpec& spec, cplx z);

// F(z) for |z| >= 1: boundary arc from the nearest prevertex, then radially.
cplx evaluate(const ExteriorMapSpec& spec, cplx z);
// Alternative homotopic path: boundary arc to angle pivot, radial segment to
// |z|, then the circle |w| = |z| to z. For path-independence checks.
cplx evaluate_via(const ExteriorMapSpec& spec, cplx z, double pivot_angle);
cplx evaluate(const EllipseOracle& map, cplx z);
cplx evaluate(const MapSpec& map, cplx z);

cplx derivative(const ExteriorMapSpec& spec, cplx z);
cplx derivative(const EllipseOracle& map, cplx z);

// Laurent coefficients of the Sigma0 map as a series on [-N, 1]:
// [1] = 1, [0] = b0, [-n] = b_n. For SC maps b_n (n >= 1) come from the
// binomial product expansion of the integrand, b0 from a contour mean, and
// orders up to 12 are cross-checked against contour integration on
// |z| = 1.2 and 1.5 (NumericalFailure on mismatch).
TruncatedSeries laurent_coeffs(const ExteriorMapSpec& spec, int N, bool cross_check = true);
TruncatedSeries laurent_coeffs(const EllipseOracle& map, int N);
TruncatedSeries laurent_coeffs(const MapSpec& map, int N);

// Trapezoidal contour extraction of the Sigma0 Laurent coefficients on |z| = rho.
TruncatedSeries contour_laurent(const MapSpec& map, int N, double rho, int samples = 1024);

// b_F = F''/F' and S_F = b_F' - b_F^2 / 2. Throw at a prevertex or |z| < 1.
cplx pre_schwarzian(const ExteriorMapSpec& spec, cplx z);
cplx pre_schwarzian(const EllipseOracle& map, cplx z);
cplx schwarzian(const ExteriorMapSpec& spec, cplx z);
cplx schwarzian(const EllipseOracle& map, cplx z);
cplx schwarzian(const MapSpec& map, cplx z);

// S_F(1/u) / u^4 for |u| <= 1; finite at u = 0 (uses the expansion at infinity).
cplx schwarzian_at_inverse(const ExteriorMapSpec& spec, cplx u);
cplx schwarzian_at_inverse(const EllipseOracle& map, cplx u);
cplx schwarzian_at_inverse(const MapSpec& map, cplx u);

struct BNormEstimate {
  double value = 0.0;    // grid sup at resolution `grid`
  double refined = 0.0;  // grid sup at resolution 2 * grid
  double delta() const { return refined - value; }
};

// sup over |z| > 1 of (|z|^2 - 1)^2 |S_F(z)| on a grid (a lower bound).
BNormEstimate b_norm(const MapSpec& map, int grid = 64);

// Max distance from F(e^{i theta_k}), k < samples, to the polygon boundary.
double boundary_deviation(const ExteriorMapSpec& spec, const PolygonSpec& poly,
                          int samples = 256);

}  // namespace glab
