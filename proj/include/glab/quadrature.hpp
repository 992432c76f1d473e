#pragma once

#include <complex>
#include <string>
#include <vector>

namespace glab {

using cplx = std::complex<double>;

// Nodes and weights on [-1, 1].
struct IntervalRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Jacobi rule for weight (1-x)^a (1+x)^b, a, b > -1 (Golub-Welsch).
IntervalRule gauss_jacobi(int n, double a, double b);
IntervalRule gauss_legendre(int n);

// Tensor rule over the closed unit disk; weights include the area element,
// so sum(w_i f(z_i)) approximates the integral of f dx dy over the disk.
struct DiskRule {
  std::vector<cplx> nodes;
  std::vector<double> weights;
  // Identifies the construction; rules with equal tags have identical nodes.
  std::string tag;

  std::size_t size() const noexcept { return nodes.size(); }
};

// Gauss-Legendre in r (radial_nodes) times trapezoid in theta (angles).
DiskRule polar_rule(int radial_nodes = 64, int angles = 256);

// Composite rule refined geometrically toward the boundary point e^{i theta0}:
// radial panels [1 - 2^-k, 1 - 2^-(k+1)] and angular panels of width pi 2^-k
// around theta0, `levels` levels each, q Gauss-Legendre nodes per panel.
DiskRule graded_rule(double theta0, int levels, int q = 12);

}  // namespace glab
