#include "glab/series.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "glab/error.hpp"

namespace glab {

namespace {

constexpr long kMaxWindow = 1L << 22;

void check_window(long lo, long hi) {
  if (lo > hi) {
    throw InvalidArgument("series window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] is empty");
  }
  if (hi - lo + 1 > kMaxWindow || lo < std::numeric_limits<int>::min() / 2 ||
      hi > std::numeric_limits<int>::max() / 2) {
    throw InvalidArgument("series window overflow");
  }
}

bool is_one(cplx c) { return std::abs(c - 1.0) <= 8 * std::numeric_limits<double>::epsilon(); }

void require_no_negative_powers(const TruncatedSeries& a, const char* op) {
  for (int k = a.lo(); k < 0; ++k) {
    if (a[k] != cplx{}) {
      throw InvalidArgument(std::string(op) + ": series has negative powers");
    }
  }
}

}  // namespace

TruncatedSeries::TruncatedSeries(int lo, int hi) : lo_(lo) {
  check_window(lo, hi);
  coeffs_.assign(static_cast<std::size_t>(hi - lo + 1), cplx{});
}

TruncatedSeries::TruncatedSeries(int lo, std::vector<cplx> coeffs)
    : lo_(lo), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw InvalidArgument("series needs at least one coefficient");
  check_window(lo, static_cast<long>(lo) + static_cast<long>(coeffs_.size()) - 1);
}

cplx& TruncatedSeries::at(int k) {
  if (k < lo_ || k > hi()) {
    throw InvalidArgument("exponent " + std::to_string(k) + " outside series window");
  }
  return coeffs_[static_cast<std::size_t>(k - lo_)];
}

TruncatedSeries TruncatedSeries::window(int lo, int hi) const {
  TruncatedSeries out(lo, hi);
  for (int k = lo; k <= hi; ++k) out.at(k) = (*this)[k];
  return out;
}

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
  for (int k = out.lo(); k <= out.hi(); ++k) out.at(k) = a[k] + b[k];
  return out;
}

TruncatedSeries scale(const TruncatedSeries& a, cplx s) {
  std::vector<cplx> c(a.coeffs().begin(), a.coeffs().end());
  for (auto& v : c) v *= s;
  return TruncatedSeries(a.lo(), std::move(c));
}

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b, int lo, int hi) {
  check_window(lo, hi);
  TruncatedSeries out(lo, hi);
  for (int k = lo; k <= hi; ++k) {
    // i ranges over a's window with k - i inside b's window.
    const int i0 = std::max(a.lo(), k - b.hi());
    const int i1 = std::min(a.hi(), k - b.lo());
    cplx s{};
    for (int i = i0; i <= i1; ++i) s += a[i] * b[k - i];
    out.at(k) = s;
  }
  return out;
}

TruncatedSeries log_unit(const TruncatedSeries& a) {
  require_no_negative_powers(a, "log_unit");
  if (!is_one(a[0])) throw InvalidArgument("log_unit: constant term must equal 1");
  const int n = std::max(a.hi(), 0);
  TruncatedSeries out(0, n);
  // k L_k = k a_k - sum_{j=1}^{k-1} j L_j a_{k-j}
  for (int k = 1; k <= n; ++k) {
    cplx s = static_cast<double>(k) * a[k];
    for (int j = 1; j < k; ++j) s -= static_cast<double>(j) * out[j] * a[k - j];
    out.at(k) = s / static_cast<double>(k);
  }
  return out;
}

TruncatedSeries exp_unit(const TruncatedSeries& a) {
  require_no_negative_powers(a, "exp_unit");
  if (a[0] != cplx{}) throw InvalidArgument("exp_unit: constant term must be zero");
  const int n = std::max(a.hi(), 0);
  TruncatedSeries out(0, n);
  out.at(0) = 1.0;
  // k E_k = sum_{j=1}^{k} j a_j E_{k-j}
  for (int k = 1; k <= n; ++k) {
    cplx s{};
    for (int j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * out[k - j];
    out.at(k) = s / static_cast<double>(k);
  }
  return out;
}

TruncatedSeries pow_unit(const TruncatedSeries& a, double gamma) {
  return exp_unit(scale(log_unit(a), gamma));
}

TruncatedSeries derivative(const TruncatedSeries& a) {
  TruncatedSeries out(a.lo() - 1, a.hi() - 1);
  for (int k = a.lo(); k <= a.hi(); ++k) out.at(k - 1) = static_cast<double>(k) * a[k];
  return out;
}

TruncatedSeries antiderivative(const TruncatedSeries& a) {
  if (a[-1] != cplx{}) throw InvalidArgument("antiderivative: z^-1 term has no antiderivative");
  TruncatedSeries out(a.lo() + 1, a.hi() + 1);
  for (int k = a.lo(); k <= a.hi(); ++k) {
    if (k != -1) out.at(k + 1) = a[k] / static_cast<double>(k + 1);
  }
  return out;
}

cplx evaluate(const TruncatedSeries& a, cplx z) {
  cplx s{};
  for (int k = a.hi(); k >= std::max(a.lo(), 0); --k) s = s * z + a[k];
  if (a.lo() < 0) {
    const cplx w = 1.0 / z;
    cplx t{};
    for (int k = a.lo(); k <= std::min(a.hi(), -1); ++k) t = t * w + a[k];
    s += t * w;
  }
  return s;
}

}  // namespace glab
