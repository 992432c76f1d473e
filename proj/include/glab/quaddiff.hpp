#pragma once

// Integrable holomorphic quadratic differentials on the disk, chiefly the
// abelian ones psi = omega^2:
//
//   psi_x(z) = (1/pi) sum_{m,n>=1} sqrt(mn) x_m x_n z^{m+n-2}   (ordered pairs)
//   omega_x(z) = (1/sqrt(pi)) sum_n sqrt(n) x_n z^{n-1}
//
// so that psi_x = omega_x^2 and ||psi_x||_{A1} = ||x||^2.

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "glab/beltrami_field.hpp"
#include "glab/quadrature.hpp"

namespace glab {

using cplx = std::complex<double>;

class QuadDifferential {
 public:
  enum class Kind { abelian, kernel, polynomial };

  // Defining vector x, N = x.size(). Throws on the zero vector.
  static QuadDifferential abelian(std::vector<cplx> x);
  // c (1 - r conj(z0) z)^-4, |z0| = 1, 0 <= r < 1.
  static QuadDifferential cauchy_kernel(cplx z0, double r, double c);
  // sum_k a_k z^k.
  static QuadDifferential polynomial(std::vector<cplx> coeffs);

  cplx operator()(cplx z) const;
  // A holomorphic square root, when the kind provides one.
  std::optional<cplx> omega(cplx z) const;

  Kind kind() const noexcept { return kind_; }
  std::span<const cplx> x() const noexcept { return x_; }
  // Taylor coefficients of psi (abelian and polynomial kinds).
  std::span<const cplx> coefficients() const noexcept { return coeffs_; }
  cplx kernel_point() const noexcept { return z0_; }
  double kernel_radius() const noexcept { return r_; }
  double kernel_scale() const noexcept { return c_; }

  // Rule suited to integrating this differential: the polar default, or a
  // rule graded toward z0 for kernels.
  DiskRule preferred_rule() const;

 private:
  Kind kind_ = Kind::polynomial;
  std::vector<cplx> x_;
  std::vector<cplx> coeffs_;
  cplx z0_{1.0, 0.0};
  double r_ = 0.0;
  double c_ = 1.0;
};

QuadDifferential psi_from_x(std::span<const cplx> x);

// int_D |psi| dx dy on the given rule.
double a1_norm(const QuadDifferential& psi, const DiskRule& rule);
// Same on the preferred rule at refinement `quad_order` and at twice that;
// throws NumericalFailure when the two disagree beyond 1e-8 (relative).
double a1_norm(const QuadDifferential& psi, int quad_order = 64);

// psi_p = c_p (1 - r_p conj(z0) z)^-4 with r_p = 1 - 2^-p and c_p fixed by
// ||psi_p||_{A1} = 1 (quadrature).
QuadDifferential concentrating_sequence(cplx z0, int p);

// k |psi| / psi. Nodes at zeros of psi are nudged radially before evaluation.
BeltramiField teichmuller_beltrami(const QuadDifferential& psi, double k);

}  // namespace glab
