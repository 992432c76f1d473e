#pragma once

// Grunsky coefficients, the truncated Grunsky operator and its norm.
//
// For F(z) = z + b0 + b1/z + ...,
//   log((F(z) - F(w)) / (z - w)) = -sum_{m,n>=1} alpha_mn z^-m w^-n,
// and B_mn = sqrt(mn) alpha_mn. B is complex symmetric, so
// sup_{|x|=1} |x^T B x| equals its largest singular value.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "glab/series.hpp"

namespace glab {

using cplx = std::complex<double>;

struct GrunskyMatrix {
  Eigen::MatrixXcd B;

  int N() const noexcept { return static_cast<int>(B.rows()); }
  double symmetry_defect() const { return (B - B.transpose()).cwiseAbs().maxCoeff(); }
};

// From Sigma0 Laurent data on [-(2N-1), 1] (layout of laurent_coeffs).
// The bivariate log is expanded in powers of 1/z with coefficients that are
// truncated series in 1/w.
GrunskyMatrix grunsky_matrix(const TruncatedSeries& laurent, int N);

// Closed form for z + b/z: alpha_mn = delta_mn b^m / m.
GrunskyMatrix ellipse_grunsky(cplx b, int N);

// Largest singular value: the truncation-N Grunsky norm kappa_N.
double grunsky_norm(const GrunskyMatrix& g);

// x^T B x for a unit vector x (x shorter than N is zero-padded).
cplx h_x(const GrunskyMatrix& g, std::span<const cplx> x);

// Unit x attaining |x^T B x| = kappa_N (Takagi vector).
std::vector<cplx> takagi_vector(const Eigen::MatrixXcd& B);

// Schwarz-lemma bound on the Grunsky norm given an extension with dilatation
// k and infinitesimal Grunsky value alpha <= k:
//   k (k + a) / (1 + a k),  a = alpha / k,
// which equals k exactly when alpha = k.
double lemma1_bound(double k, double alpha);

struct ConvergenceRow {
  int N = 0;
  double kappa = 0.0;
  double delta = 0.0;  // kappa_N - kappa_{previous N}
  bool monotone = true;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double extrapolated = 0.0;
  double uncertainty = 0.0;  // size of the last increment
  bool monotone = true;
};

ConvergenceReport convergence_report(const TruncatedSeries& laurent, std::vector<int> N_list);

}  // namespace glab
