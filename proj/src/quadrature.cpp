#include "glab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>

#include "glab/error.hpp"

namespace glab {

IntervalRule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("gauss_jacobi: n must be positive");
  if (a <= -1.0 || b <= -1.0) throw InvalidArgument("gauss_jacobi: exponents must exceed -1");

  // Three-term recurrence of the monic Jacobi polynomials.
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 1));
  const double ab = a + b;
  diag(0) = (b - a) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag(k) = (b * b - a * a) / (s * (s + 2.0));
    const double beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(beta);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));

  IntervalRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  if (n == 1) {
    rule.nodes[0] = diag(0);
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw NumericalFailure("gauss_jacobi: eigensolver failed", 0.0);
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

IntervalRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

DiskRule polar_rule(int radial_nodes, int angles) {
  if (radial_nodes < 1 || angles < 1) throw InvalidArgument("polar_rule: empty grid");
  const IntervalRule gl = gauss_legendre(radial_nodes);
  DiskRule rule;
  rule.tag = "polar:" + std::to_string(radial_nodes) + "x" + std::to_string(angles);
  rule.nodes.reserve(static_cast<std::size_t>(radial_nodes * angles));
  rule.weights.reserve(rule.nodes.capacity());
  const double dtheta = 2.0 * std::numbers::pi / angles;
  for (int i = 0; i < radial_nodes; ++i) {
    const double r = 0.5 * (gl.nodes[static_cast<std::size_t>(i)] + 1.0);
    const double wr = 0.5 * gl.weights[static_cast<std::size_t>(i)] * r;
    for (int j = 0; j < angles; ++j) {
      rule.nodes.push_back(std::polar(r, dtheta * j));
      rule.weights.push_back(wr * dtheta);
    }
  }
  return rule;
}

namespace {

struct Panel {
  double lo, hi;
};

void append_panel_nodes(const IntervalRule& gl, Panel p, std::vector<double>& x,
                        std::vector<double>& w) {
  const double half = 0.5 * (p.hi - p.lo);
  const double mid = 0.5 * (p.hi + p.lo);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    x.push_back(mid + half * gl.nodes[i]);
    w.push_back(half * gl.weights[i]);
  }
}

}  // namespace

DiskRule graded_rule(double theta0, int levels, int q) {
  if (levels < 1 || q < 1) throw InvalidArgument("graded_rule: levels and q must be positive");
  const IntervalRule gl = gauss_legendre(q);

  std::vector<double> rx, rw;
  for (int k = 0; k < levels; ++k) {
    append_panel_nodes(gl, {1.0 - std::ldexp(1.0, -k), 1.0 - std::ldexp(1.0, -k - 1)}, rx, rw);
  }
  append_panel_nodes(gl, {1.0 - std::ldexp(1.0, -levels), 1.0}, rx, rw);

  // Offsets in (-pi, pi] around theta0, breakpoints at +-pi 2^-k.
  std::vector<double> tx, tw;
  const double pi = std::numbers::pi;
  for (int k = 0; k < levels; ++k) {
    const double outer = pi * std::ldexp(1.0, -k);
    const double inner = pi * std::ldexp(1.0, -k - 1);
    append_panel_nodes(gl, {-outer, -inner}, tx, tw);
    append_panel_nodes(gl, {inner, outer}, tx, tw);
  }
  const double core = pi * std::ldexp(1.0, -levels);
  append_panel_nodes(gl, {-core, core}, tx, tw);

  DiskRule rule;
  rule.tag = "graded:" + std::to_string(theta0) + ":" + std::to_string(levels) + ":" +
             std::to_string(q);
  rule.nodes.reserve(rx.size() * tx.size());
  rule.weights.reserve(rx.size() * tx.size());
  for (std::size_t i = 0; i < rx.size(); ++i) {
    for (std::size_t j = 0; j < tx.size(); ++j) {
      rule.nodes.push_back(std::polar(rx[i], theta0 + tx[j]));
      rule.weights.push_back(rw[i] * rx[i] * tw[j]);
    }
  }
  return rule;
}

}  // namespace glab
