#pragma once

// Truncated Laurent/Taylor series with an explicit exponent window.
//
// A series stores coefficients a_lo .. a_hi densely. Every arithmetic
// operation takes or derives its output window explicitly; nothing is
// truncated implicitly.

#include <complex>
#include <span>
#include <vector>

namespace glab {

using cplx = std::complex<double>;

class TruncatedSeries {
 public:
  // Zero series on [lo, hi].
  TruncatedSeries(int lo, int hi);
  // Series with a_lo = coeffs[0], ..., window length = coeffs.size().
  TruncatedSeries(int lo, std::vector<cplx> coeffs);

  int lo() const noexcept { return lo_; }
  int hi() const noexcept { return lo_ + static_cast<int>(coeffs_.size()) - 1; }
  std::size_t size() const noexcept { return coeffs_.size(); }

  // Coefficient at exponent k; zero outside the window.
  // Returned const so that `s[k] = v` does not compile; use at() to write.
  const cplx operator[](int k) const noexcept {
    return (k < lo_ || k > hi()) ? cplx{} : coeffs_[static_cast<std::size_t>(k - lo_)];
  }
  // Mutable access; throws InvalidArgument outside the window.
  cplx& at(int k);

  std::span<const cplx> coeffs() const noexcept { return coeffs_; }

  // Same coefficients re-windowed to [lo, hi] (drops or zero-pads).
  TruncatedSeries window(int lo, int hi) const;

  friend bool operator==(const TruncatedSeries&, const TruncatedSeries&) = default;

 private:
  int lo_;
  std::vector<cplx> coeffs_;
};

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries scale(const TruncatedSeries& a, cplx s);

// Cauchy product restricted to exponents [lo, hi].
TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b, int lo, int hi);

// log(a) for a = 1 + (positive powers); result window [0, a.hi()].
// Solved from a * L' = a' term by term.
TruncatedSeries log_unit(const TruncatedSeries& a);

// exp(a) for a with zero constant term and no negative powers; window [0, a.hi()].
TruncatedSeries exp_unit(const TruncatedSeries& a);

// a^gamma for a = 1 + (positive powers), principal branch.
TruncatedSeries pow_unit(const TruncatedSeries& a, double gamma);

// Term-wise d/dz; window shifts down by one.
TruncatedSeries derivative(const TruncatedSeries& a);

// Term-wise antiderivative with zero constant; requires a_{-1} == 0.
TruncatedSeries antiderivative(const TruncatedSeries& a);

// Horner evaluation at z (z != 0 when lo < 0).
cplx evaluate(const TruncatedSeries& a, cplx z);

}  // namespace glab
