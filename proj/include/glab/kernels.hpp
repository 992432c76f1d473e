#pragma once

// Data-parallel kernels shared by the numerical modules.
//
// Every kernel takes an Exec policy. Exec::parallel distributes independent
// work items over OpenMP threads and then reduces in a fixed order, so results
// do not depend on the thread count. The *_reference functions are plain
// serial loops kept for testing and benchmarking.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "glab/quadrature.hpp"

namespace glab {

using cplx = std::complex<double>;

enum class Exec { serial, parallel };

// Caps OpenMP parallelism; n <= 0 leaves the runtime default.
void set_thread_cap(int n);
int max_threads();

// Calls body(i) for i in [0, n). Iterations must be independent.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  const auto count = static_cast<long long>(n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
}

using PointFn = std::function<cplx(cplx)>;

// f evaluated at every point.
std::vector<cplx> evaluate_batch(const PointFn& f, std::span<const cplx> points,
                                 Exec exec = Exec::parallel);

// sum_i w_i f(z_i) over the rule.
cplx disk_integral(const DiskRule& rule, const PointFn& f, Exec exec = Exec::parallel);
cplx disk_integral_reference(const DiskRule& rule, const PointFn& f);

// sum_i w_i values_i (values sampled at the rule's nodes).
cplx weighted_sum(const DiskRule& rule, std::span<const cplx> values);

// m_k = sum_i w_i values_i z_i^k for k = 0..K.
std::vector<cplx> power_moments(const DiskRule& rule, std::span<const cplx> values, int K,
                                Exec exec = Exec::parallel);
std::vector<cplx> power_moments_reference(const DiskRule& rule, std::span<const cplx> values,
                                          int K);

}  // namespace glab
