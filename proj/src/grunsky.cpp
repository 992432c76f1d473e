#include "glab/grunsky.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

#include "glab/error.hpp"
#include "glab/kernels.hpp"

namespace glab {

GrunskyMatrix grunsky_matrix(const TruncatedSeries& laurent, int N) {
  if (N < 1) throw InvalidArgument("grunsky_matrix: N must be positive");
  if (laurent.lo() > -(2 * N - 1)) {
    throw InvalidArgument("grunsky_matrix: Laurent window must reach order " +
                          std::to_string(2 * N - 1));
  }
  if (std::abs(laurent[1] - 1.0) > 1e-12) {
    throw InvalidArgument("grunsky_matrix: map is not Sigma0-normalized (leading coefficient != 1)");
  }
  auto b = [&](int n) { return laurent[-n]; };

  // (F(z) - F(w)) / (z - w) = 1 + sum_i q_i(v) u^i with u = 1/z, v = 1/w and
  // q_i(v) = -sum_{j>=1} b_{i+j-1} v^j.
  std::vector<TruncatedSeries> q;
  q.reserve(static_cast<std::size_t>(N) + 1);
  q.emplace_back(0, N);
  for (int i = 1; i <= N; ++i) {
    TruncatedSeries qi(0, N);
    for (int j = 1; j <= N; ++j) qi.at(j) = -b(i + j - 1);
    q.push_back(std::move(qi));
  }
  // log in u with v-series coefficients: i L_i = i q_i - sum_{j<i} j L_j q_{i-j}.
  std::vector<TruncatedSeries> L;
  L.reserve(q.size());
  L.emplace_back(0, N);
  for (int i = 1; i <= N; ++i) {
    TruncatedSeries acc = scale(q[i], static_cast<double>(i));
    for (int j = 1; j < i; ++j) {
      acc = add(acc, scale(mul(L[j], q[i - j], 0, N), -static_cast<double>(j)));
    }
    L.push_back(scale(acc, 1.0 / i));
  }

  GrunskyMatrix g{Eigen::MatrixXcd::Zero(N, N)};
  for (int m = 1; m <= N; ++m) {
    for (int n = 1; n <= N; ++n) g.B(m - 1, n - 1) = -std::sqrt(double(m) * n) * L[m][n];
  }
  return g;
}

GrunskyMatrix ellipse_grunsky(cplx b, int N) {
  if (N < 1) throw InvalidArgument("ellipse_grunsky: N must be positive");
  GrunskyMatrix g{Eigen::MatrixXcd::Zero(N, N)};
  cplx p = b;
  for (int m = 0; m < N; ++m, p *= b) g.B(m, m) = p;
  return g;
}

double grunsky_norm(const GrunskyMatrix& g) {
  if (g.N() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g.B);
  return svd.singularValues()(0);
}

cplx h_x(const GrunskyMatrix& g, std::span<const cplx> x) {
  if (x.size() > static_cast<std::size_t>(g.N())) {
    throw InvalidArgument("h_x: direction longer than the truncation order");
  }
  double n2 = 0.0;
  for (const cplx& v : x) n2 += std::norm(v);
  if (std::abs(n2 - 1.0) > 1e-10) throw InvalidArgument("h_x: direction must be a unit vector");
  cplx s{};
  for (std::size_t m = 0; m < x.size(); ++m) {
    for (std::size_t n = 0; n < x.size(); ++n) s += g.B(m, n) * x[m] * x[n];
  }
  return s;
}

std::vector<cplx> takagi_vector(const Eigen::MatrixXcd& B) {
  const auto n = B.rows();
  std::vector<cplx> x(static_cast<std::size_t>(n));
  if (n == 0) return x;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double sigma = svd.singularValues()(0);
  const Eigen::VectorXcd v = svd.matrixV().col(0);
  if (sigma == 0.0) {
    x[0] = 1.0;
    return x;
  }
  // v -> conj(B v) / sigma is an antilinear involution on the top singular
  // subspace; its fixed vectors w satisfy w^T B w = sigma |w|^2.
  Eigen::VectorXcd w = v + (B * v).conjugate() / sigma;
  if (w.norm() < 1e-8) w = cplx(0.0, 1.0) * v;
  w.normalize();
  for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = w(i);
  return x;
}

double lemma1_bound(double k, double alpha) {
  if (!(k >= 0.0 && k < 1.0)) throw InvalidArgument("lemma1_bound: k must lie in [0, 1)");
  if (!(alpha >= 0.0 && alpha <= k * (1.0 + 1e-12) + 1e-15)) {
    throw InvalidArgument("lemma1_bound: alpha must lie in [0, k]");
  }
  if (k == 0.0) return 0.0;
  const double a = std::min(alpha / k, 1.0);
  return k * (k + a) / (1.0 + a * k);
}

ConvergenceReport convergence_report(const TruncatedSeries& laurent, std::vector<int> N_list) {
  if (N_list.empty()) throw InvalidArgument("convergence_report: empty N list");
  std::sort(N_list.begin(), N_list.end());
  ConvergenceReport rep;
  rep.rows.resize(N_list.size());
  for_each_index(N_list.size(), Exec::parallel, [&](std::size_t i) {
    rep.rows[i].N = N_list[i];
    rep.rows[i].kappa = grunsky_norm(grunsky_matrix(laurent, N_list[i]));
  });
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    rep.rows[i].delta = rep.rows[i].kappa - rep.rows[i - 1].kappa;
    rep.rows[i].monotone = rep.rows[i].delta >= -1e-12;
    rep.monotone = rep.monotone && rep.rows[i].monotone;
  }
  const double last = rep.rows.back().kappa;
  rep.extrapolated = last;
  rep.uncertainty = rep.rows.size() > 1 ? std::abs(rep.rows.back().delta) : 0.0;
  if (rep.rows.size() >= 3) {
    // Aitken delta^2 on the last three values, kept only when the increments
    // shrink geometrically; never below the last computed value.
    const double d1 = rep.rows[rep.rows.size() - 2].delta;
    const double d2 = rep.rows.back().delta;
    if (d1 > 0.0 && d2 > 0.0 && d2 < d1) {
      rep.extrapolated = std::max(last, last + d2 * d2 / (d1 - d2));
    }
  }
  return rep;
}

}  // namespace glab
