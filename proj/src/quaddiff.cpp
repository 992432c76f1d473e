#include "glab/quaddiff.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "glab/error.hpp"
#include "glab/kernels.hpp"

namespace glab {

namespace {

constexpr double kPi = std::numbers::pi;

cplx horner(std::span<const cplx> c, cplx z) {
  cplx s{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * z + *it;
  return s;
}

int kernel_levels(double r) {
  return static_cast<int>(std::ceil(-std::log2(std::max(1.0 - r, 1e-300))));
}

}  // namespace

QuadDifferential QuadDifferential::abelian(std::vector<cplx> x) {
  double n2 = 0.0;
  for (const cplx& v : x) n2 += std::norm(v);
  if (x.empty() || n2 == 0.0) throw InvalidArgument("psi_from_x: zero defining vector");
  QuadDifferential q;
  q.kind_ = Kind::abelian;
  const std::size_t N = x.size();
  q.coeffs_.assign(2 * N - 1, cplx{});
  // Brute-force ordered double sum over (m, n).
  for (std::size_t m = 1; m <= N; ++m) {
    for (std::size_t n = 1; n <= N; ++n) {
      q.coeffs_[m + n - 2] += std::sqrt(double(m * n)) * x[m - 1] * x[n - 1] / kPi;
    }
  }
  q.x_ = std::move(x);
  return q;
}

QuadDifferential QuadDifferential::cauchy_kernel(cplx z0, double r, double c) {
  if (std::abs(std::abs(z0) - 1.0) > 1e-12) throw InvalidArgument("cauchy_kernel: |z0| must be 1");
  if (!(r >= 0.0 && r < 1.0)) throw InvalidArgument("cauchy_kernel: r must lie in [0, 1)");
  QuadDifferential q;
  q.kind_ = Kind::kernel;
  q.z0_ = z0 / std::abs(z0);
  q.r_ = r;
  q.c_ = c;
  return q;
}

QuadDifferential QuadDifferential::polynomial(std::vector<cplx> coeffs) {
  if (coeffs.empty()) throw InvalidArgument("polynomial differential needs coefficients");
  QuadDifferential q;
  q.kind_ = Kind::polynomial;
  q.coeffs_ = std::move(coeffs);
  return q;
}

cplx QuadDifferential::operator()(cplx z) const {
  if (kind_ == Kind::kernel) {
    const cplx d = 1.0 - r_ * std::conj(z0_) * z;
    const cplx d2 = d * d;
    return c_ / (d2 * d2);
  }
  return horner(coeffs_, z);
}

std::optional<cplx> QuadDifferential::omega(cplx z) const {
  switch (kind_) {
    case Kind::abelian: {
      cplx s{};
      for (std::size_t n = x_.size(); n >= 1; --n) s = s * z + std::sqrt(double(n)) * x_[n - 1];
      return s / std::sqrt(kPi);
    }
    case Kind::kernel: {
      const cplx d = 1.0 - r_ * std::conj(z0_) * z;
      return std::sqrt(c_) / (d * d);
    }
    case Kind::polynomial:
      return std::nullopt;
  }
  return std::nullopt;
}

DiskRule QuadDifferential::preferred_rule() const {
  if (kind_ == Kind::kernel) return graded_rule(std::arg(z0_), kernel_levels(r_) + 8, 16);
  return default_disk_rule();
}

QuadDifferential psi_from_x(std::span<const cplx> x) {
  return QuadDifferential::abelian(std::vector<cplx>(x.begin(), x.end()));
}

double a1_norm(const QuadDifferential& psi, const DiskRule& rule) {
  return disk_integral(rule, [&](cplx z) { return cplx(std::abs(psi(z))); }).real();
}

double a1_norm(const QuadDifferential& psi, int quad_order) {
  if (quad_order < 8) throw InvalidArgument("a1_norm: quadrature order too small");
  auto rule_at = [&](int order) {
    if (psi.kind() == QuadDifferential::Kind::kernel) {
      const int extra = 4 + order / 16;
      return graded_rule(std::arg(psi.kernel_point()), kernel_levels(psi.kernel_radius()) + extra,
                         order / 4);
    }
    return polar_rule(order, 4 * order);
  };
  const double coarse = a1_norm(psi, rule_at(quad_order));
  const double fine = a1_norm(psi, rule_at(2 * quad_order));
  const double diff = std::abs(fine - coarse);
  if (diff > 1e-8 * std::max(1.0, std::abs(fine))) {
    throw NumericalFailure("a1_norm: quadrature not converged under order doubling", diff);
  }
  return fine;
}

QuadDifferential concentrating_sequence(cplx z0, int p) {
  if (p < 1) throw InvalidArgument("concentrating_sequence: p must be at least 1");
  if (std::abs(std::abs(z0) - 1.0) > 1e-12) {
    throw InvalidArgument("concentrating_sequence: z0 must lie on the unit circle");
  }
  const double r = 1.0 - std::ldexp(1.0, -p);
  const QuadDifferential unit = QuadDifferential::cauchy_kernel(z0, r, 1.0);
  const double norm = a1_norm(unit, unit.preferred_rule());
  return QuadDifferential::cauchy_kernel(z0, r, 1.0 / norm);
}

namespace {
std::atomic<long> zero_nudges{0};
}

BeltramiField teichmuller_beltrami(const QuadDifferential& psi, double k) {
  if (!(k > 0.0 && k < 1.0)) throw InvalidArgument("teichmuller_beltrami: k must lie in (0, 1)");
  auto f = [psi, k](cplx z) {
    cplx v = psi(z);
    if (v == cplx{}) {
      // Nudge off the zero along the ray (or off the origin).
      zero_nudges.fetch_add(1, std::memory_order_relaxed);
      const cplx zz = (z == cplx{}) ? cplx(1e-12, 0.0) : z * (1.0 - 1e-12);
      v = psi(zz);
      if (v == cplx{}) return cplx(k, 0.0);
    }
    return k * std::conj(v) / std::abs(v);
  };
  return BeltramiField::from_function(f, BeltramiField::Tag::teichmuller, k);
}

}  // namespace glab
