#include "glab/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "glab/error.hpp"

namespace glab {

namespace {

// Fixed block count so the reduction order is independent of thread count.
constexpr std::size_t kBlocks = 64;

void check_sizes(const DiskRule& rule, std::span<const cplx> values) {
  if (values.size() != rule.size()) {
    throw InvalidArgument("sample count does not match quadrature rule (grid mismatch)");
  }
}

}  // namespace

void set_thread_cap(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

std::vector<cplx> evaluate_batch(const PointFn& f, std::span<const cplx> points, Exec exec) {
  std::vector<cplx> out(points.size());
  for_each_index(points.size(), exec, [&](std::size_t i) { out[i] = f(points[i]); });
  return out;
}

cplx disk_integral(const DiskRule& rule, const PointFn& f, Exec exec) {
  const std::vector<cplx> values = evaluate_batch(f, rule.nodes, exec);
  return weighted_sum(rule, values);
}

cplx disk_integral_reference(const DiskRule& rule, const PointFn& f) {
  cplx s{};
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

cplx weighted_sum(const DiskRule& rule, std::span<const cplx> values) {
  check_sizes(rule, values);
  cplx s{};
  for (std::size_t i = 0; i < values.size(); ++i) s += rule.weights[i] * values[i];
  return s;
}

std::vector<cplx> power_moments(const DiskRule& rule, std::span<const cplx> values, int K,
                                Exec exec) {
  check_sizes(rule, values);
  if (K < 0) throw InvalidArgument("power_moments: negative order");
  const std::size_t n = values.size();
  const std::size_t kk = static_cast<std::size_t>(K) + 1;
  const std::size_t block = (n + kBlocks - 1) / kBlocks;
  std::vector<cplx> partial(kBlocks * kk);
  for_each_index(kBlocks, exec, [&](std::size_t b) {
    cplx* acc = partial.data() + b * kk;
    const std::size_t end = std::min(n, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) {
      cplx term = rule.weights[i] * values[i];
      const cplx z = rule.nodes[i];
      for (std::size_t k = 0; k < kk; ++k) {
        acc[k] += term;
        term *= z;
      }
    }
  });
  std::vector<cplx> out(kk);
  for (std::size_t b = 0; b < kBlocks; ++b) {
    for (std::size_t k = 0; k < kk; ++k) out[k] += partial[b * kk + k];
  }
  return out;
}

std::vector<cplx> power_moments_reference(const DiskRule& rule, std::span<const cplx> values,
                                          int K) {
  check_sizes(rule, values);
  std::vector<cplx> out(static_cast<std::size_t>(K) + 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    cplx zk = 1.0;
    for (auto& m : out) {
      m += rule.weights[i] * values[i] * zk;
      zk *= rule.nodes[i];
    }
  }
  return out;
}

}  // namespace glab
