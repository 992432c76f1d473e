#pragma once

// Conformal metrics on a disk of deformation parameters t: pullbacks of the
// hyperbolic metric under holomorphic probes h : {|t| < r} -> D, their upper
// envelope, a discrete generalized Laplacian, curvature certificates and the
// comparison lambda_inf <= lambda_kappa <= lambda_K.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "glab/beltrami_field.hpp"

namespace glab {

using cplx = std::complex<double>;

// Square lattice t = h (i + i j), -n <= i, j <= n, clipped to |t| < r_max.
// Nodes outside the disk are inactive (values NaN).
class DeformationGrid {
 public:
  explicit DeformationGrid(double r_max = 0.75, double spacing = 1.0 / 128.0);

  double r_max() const noexcept { return r_max_; }
  double spacing() const noexcept { return h_; }
  int half_width() const noexcept { return n_; }
  int side() const noexcept { return 2 * n_ + 1; }
  std::size_t size() const noexcept { return std::size_t(side()) * side(); }

  std::size_t index(int i, int j) const { return std::size_t(j + n_) * side() + (i + n_); }
  cplx node(int i, int j) const { return h_ * cplx(i, j); }
  cplx node(std::size_t k) const;
  bool active(int i, int j) const;
  bool active(std::size_t k) const;
  // Active with all four axis neighbours active.
  bool interior(int i, int j) const;

  const std::vector<cplx>& t_nodes() const noexcept { return t_; }

 private:
  double r_max_;
  double h_;
  int n_;
  std::vector<cplx> t_;
};

// h at every active node (NaN elsewhere). Throws InvalidArgument if |h| >= 1.
std::vector<cplx> sample_probe(const DeformationGrid& g, const std::function<cplx(cplx)>& h);

struct MetricSamples {
  std::vector<double> lambda;        // NaN at non-interior nodes
  double holomorphy_residual = 0.0;  // max |d_x h - (-i) d_y h|
};

// |h'| / (1 - |h|^2), h' from centred differences along both axes (averaged).
MetricSamples pullback_metric(const DeformationGrid& g, std::span<const cplx> h_values);
// Same with a closed-form derivative (no finite differences).
MetricSamples pullback_metric(const DeformationGrid& g, const std::function<cplx(cplx)>& h,
                              const std::function<cplx(cplx)>& dh);

// Pointwise max over the sets (NaN only where every set is NaN), then, if
// `regularize`, one 3x3 neighbourhood-max pass.
std::vector<double> envelope(const DeformationGrid& g,
                             const std::vector<std::vector<double>>& sets, bool regularize = true);

struct LaplacianEstimate {
  std::vector<double> per_radius;  // 4 (mean - u) / r^2 for each r
  double min = 0.0;
  double richardson = 0.0;  // from the two smallest radii
};

inline const std::vector<double>& default_radii() {
  static const std::vector<double> r{0.04, 0.02, 0.01};
  return r;
}

// Circle means by a 64-point trapezoid rule with bicubic (Keys) interpolation
// of the grid samples u. Throws InvalidArgument when a stencil leaves the
// region where u is finite.
LaplacianEstimate generalized_laplacian(const DeformationGrid& g, std::span<const double> u,
                                        int i, int j,
                                        const std::vector<double>& r_list = default_radii());
// Exact circle means of a callable u.
LaplacianEstimate generalized_laplacian(const std::function<double(cplx)>& u, cplx t,
                                        const std::vector<double>& r_list = default_radii());

struct CertificateOptions {
  double region = 0.5;   // test nodes with |t| <= region
  double floor = 1e-12;  // nodes with lambda < floor are excluded
  double tol = 1e-2;
};

struct Certificate {
  std::vector<double> margin;  // Delta log lambda - 4 lambda^2, NaN if not tested
  double min_margin = 0.0;
  int tested = 0;
  int violations = 0;  // margin < -tol
  int excluded = 0;    // lambda below floor (or non-finite) in the region
  bool pass() const { return tested > 0 && violations == 0; }
};

// Throws NumericalFailure if every node in the region is excluded.
Certificate curvature_certificate(const DeformationGrid& g, std::span<const double> lambda,
                                  const CertificateOptions& opts = {});

// A one-parameter family t -> F_t together with its Grunsky probes
// h_x(t) = x^T B(F_t) x, x a unit vector in C^N.
struct DirectionModel {
  std::string name;
  int N = 1;
  double mu_norm = 0.0;       // ||mu_hat||_inf of the direction
  double bracket_lower = 0.0; // infinitesimal Teichmueller lower bound at t = 0
  std::function<cplx(std::span<const cplx>, cplx)> h;
  std::function<cplx(std::span<const cplx>, cplx)> dh;
  std::vector<std::vector<cplx>> catalogue;   // probes defining lambda_inf
  std::vector<std::vector<cplx>> extra;       // further x for lambda_kappa (e.g. Takagi)
};

// z + b t / z: B(F_t) = diag((b t)^m).
DirectionModel ellipse_direction(cplx b, int N = 3);
DirectionModel zero_direction();
// Synthetic probe h(t) = t.
DirectionModel hyperbolic_direction();
// First-order model h_x(t) = t x^T H(mu) x for a Beltrami direction mu.
DirectionModel field_direction(const std::string& name, const BeltramiField& mu, int N = 8,
                               int bracket_degree = 6, std::uint64_t seed = 1);

struct ComparisonOptions {
  int random_x = 64;
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

struct Comparison {
  std::vector<double> lambda_inf;    // raw probe envelope
  std::vector<double> lambda_kappa;  // sup over sampled x
  std::vector<double> lower;         // lambda_K bracket
  std::vector<double> upper;
  int nodes = 0;
  int chain_violations = 0;  // lambda_inf > lambda_kappa + tol or lambda_kappa > upper + tol
  double max_excess = 0.0;   // largest violation amount (0 if none)
  // Values at t = 0.
  double inf0 = 0.0, kappa0 = 0.0, lower0 = 0.0, upper0 = 0.0;
};

// Throws NumericalFailure when the lambda_K bracket inverts (lower > upper + tol).
Comparison metric_comparison(const DeformationGrid& g, const DirectionModel& d,
                             const ComparisonOptions& opts = {});

// Pullback metrics of each catalogue probe (finite differences).
std::vector<MetricSamples> probe_metrics(const DeformationGrid& g, const DirectionModel& d);

}  // namespace glab
