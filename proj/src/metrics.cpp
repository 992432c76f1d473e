#include "glab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "glab/beltrami.hpp"
#include "glab/error.hpp"
#include "glab/grunsky.hpp"
#include "glab/kernels.hpp"

namespace glab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Keys cubic convolution kernel, a = -1/2 (reproduces quadratics).
double keys(double x) {
  x = std::abs(x);
  if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
  if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
  return 0.0;
}

std::vector<cplx> unit(std::vector<cplx> x) {
  double n = 0.0;
  for (const cplx& v : x) n += std::norm(v);
  n = std::sqrt(n);
  for (cplx& v : x) v /= n;
  return x;
}

}  // namespace

DeformationGrid::DeformationGrid(double r_max, double spacing) : r_max_(r_max), h_(spacing) {
  if (!(r_max > 0.0 && r_max < 1.0)) throw InvalidArgument("DeformationGrid: r_max must lie in (0, 1)");
  if (!(spacing > 0.0 && spacing < r_max)) throw InvalidArgument("DeformationGrid: bad spacing");
  n_ = static_cast<int>(std::floor(r_max / spacing));
  t_.resize(size());
  for (int j = -n_; j <= n_; ++j)
    for (int i = -n_; i <= n_; ++i) t_[index(i, j)] = node(i, j);
}

cplx DeformationGrid::node(std::size_t k) const { return t_[k]; }

bool DeformationGrid::active(int i, int j) const {
  if (std::abs(i) > n_ || std::abs(j) > n_) return false;
  return std::abs(node(i, j)) < r_max_;
}

bool DeformationGrid::active(std::size_t k) const { return std::abs(t_[k]) < r_max_; }

bool DeformationGrid::interior(int i, int j) const {
  return active(i, j) && active(i + 1, j) && active(i - 1, j) && active(i, j + 1) && active(i, j - 1);
}

std::vector<cplx> sample_probe(const DeformationGrid& g, const std::function<cplx(cplx)>& h) {
  const cplx nan(kNaN, kNaN);
  std::vector<cplx> out(g.size(), nan);
  std::vector<char> bad(g.size(), 0);
  for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
    if (!g.active(k)) return;
    out[k] = h(g.node(k));
    if (!(std::abs(out[k]) < 1.0)) bad[k] = 1;
  });
  if (std::find(bad.begin(), bad.end(), 1) != bad.end()) {
    throw InvalidArgument("sample_probe: |h| >= 1 at a grid node");
  }
  return out;
}

MetricSamples pullback_metric(const DeformationGrid& g, std::span<const cplx> hv) {
  if (hv.size() != g.size()) throw InvalidArgument("pullback_metric: sample count does not match grid");
  MetricSamples out;
  out.lambda.assign(g.size(), kNaN);
  std::vector<double> resid(g.size(), 0.0);
  const int n = g.half_width();
  const double h = g.spacing();
  bool bad = false;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.active(k) && !(std::abs(hv[k]) < 1.0)) bad = true;
  }
  if (bad) throw InvalidArgument("pullback_metric: |h| >= 1 at a node");
  for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
    const int i = static_cast<int>(k % g.side()) - n;
    const int j = static_cast<int>(k / g.side()) - n;
    if (!g.interior(i, j)) return;
    const cplx dx = (hv[g.index(i + 1, j)] - hv[g.index(i - 1, j)]) / (2.0 * h);
    const cplx dy = (hv[g.index(i, j + 1)] - hv[g.index(i, j - 1)]) / (2.0 * h);
    const cplx d = 0.5 * (dx - cplx(0.0, 1.0) * dy);
    resid[k] = std::abs(dx + cplx(0.0, 1.0) * dy);
    out.lambda[k] = std::abs(d) / (1.0 - std::norm(hv[k]));
  });
  for (double r : resid) out.holomorphy_residual = std::max(out.holomorphy_residual, r);
  return out;
}

MetricSamples pullback_metric(const DeformationGrid& g, const std::function<cplx(cplx)>& h,
                              const std::function<cplx(cplx)>& dh) {
  MetricSamples out;
  out.lambda.assign(g.size(), kNaN);
  std::vector<char> bad(g.size(), 0);
  for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
    if (!g.active(k)) return;
    const cplx t = g.node(k);
    const cplx v = h(t);
    if (!(std::abs(v) < 1.0)) {
      bad[k] = 1;
      return;
    }
    out.lambda[k] = std::abs(dh(t)) / (1.0 - std::norm(v));
  });
  if (std::find(bad.begin(), bad.end(), 1) != bad.end()) {
    throw InvalidArgument("pullback_metric: |h| >= 1 at a node");
  }
  return out;
}

std::vector<double> envelope(const DeformationGrid& g, const std::vector<std::vector<double>>& sets,
                             bool regularize) {
  if (sets.empty()) throw InvalidArgument("envelope: need at least one metric");
  for (const auto& s : sets)
    if (s.size() != g.size()) throw InvalidArgument("envelope: grid mismatch");
  std::vector<double> env(g.size(), kNaN);
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (const auto& s : sets) {
      if (std::isnan(s[k])) continue;
      env[k] = std::isnan(env[k]) ? s[k] : std::max(env[k], s[k]);
    }
  }
  if (!regularize) return env;
  std::vector<double> reg(env);
  const int n = g.half_width();
  for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
    if (std::isnan(env[k])) return;
    const int i = static_cast<int>(k % g.side()) - n;
    const int j = static_cast<int>(k / g.side()) - n;
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const int a = i + di, b = j + dj;
        if (std::abs(a) > n || std::abs(b) > n) continue;
        const double v = env[g.index(a, b)];
        if (!std::isnan(v)) reg[k] = std::max(reg[k], v);
      }
  });
  return reg;
}

namespace {

LaplacianEstimate finish_laplacian(std::vector<double> per_r, const std::vector<double>& r_list) {
  LaplacianEstimate e;
  e.per_radius = std::move(per_r);
  e.min = *std::min_element(e.per_radius.begin(), e.per_radius.end());
  // Richardson on the two smallest radii: E(r) = L + a r^2 + ...
  std::size_t a = 0, b = 0;
  for (std::size_t k = 0; k < r_list.size(); ++k)
    if (r_list[k] < r_list[a]) a = k;
  b = (a == 0 && r_list.size() > 1) ? 1 : 0;
  for (std::size_t k = 0; k < r_list.size(); ++k)
    if (k != a && r_list[k] < r_list[b]) b = k;
  if (r_list.size() == 1) {
    e.richardson = e.per_radius[a];
  } else {
    const double q = (r_list[b] / r_list[a]) * (r_list[b] / r_list[a]);
    e.richardson = (q * e.per_radius[a] - e.per_radius[b]) / (q - 1.0);
  }
  return e;
}

constexpr int kCirclePoints = 64;

}  // namespace

LaplacianEstimate generalized_laplacian(const DeformationGrid& g, std::span<const double> u, int i,
                                        int j, const std::vector<double>& r_list) {
  if (u.size() != g.size()) throw InvalidArgument("generalized_laplacian: grid mismatch");
  if (r_list.empty()) throw InvalidArgument("generalized_laplacian: empty radius list");
  if (!g.active(i, j) || !std::isfinite(u[g.index(i, j)])) {
    throw InvalidArgument("generalized_laplacian: u not finite at the node");
  }
  const double h = g.spacing();
  const int n = g.half_width();
  const cplx t0 = g.node(i, j);
  auto interp = [&](cplx t) {
    const double x = t.real() / h, y = t.imag() / h;
    const int i0 = static_cast<int>(std::floor(x)), j0 = static_cast<int>(std::floor(y));
    double s = 0.0;
    for (int b = j0 - 1; b <= j0 + 2; ++b) {
      const double wy = keys(y - b);
      for (int a = i0 - 1; a <= i0 + 2; ++a) {
        if (std::abs(a) > n || std::abs(b) > n) throw InvalidArgument("generalized_laplacian: insufficient clearance");
        const double v = u[g.index(a, b)];
        if (!std::isfinite(v)) throw InvalidArgument("generalized_laplacian: insufficient clearance");
        s += keys(x - a) * wy * v;
      }
    }
    return s;
  };
  const double u0 = u[g.index(i, j)];
  std::vector<double> per_r;
  for (double r : r_list) {
    if (!(r > 0.0)) throw InvalidArgument("generalized_laplacian: radii must be positive");
    double mean = 0.0;
    for (int k = 0; k < kCirclePoints; ++k) {
      mean += interp(t0 + std::polar(r, 2.0 * std::numbers::pi * k / kCirclePoints));
    }
    mean /= kCirclePoints;
    per_r.push_back(4.0 * (mean - u0) / (r * r));
  }
  return finish_laplacian(std::move(per_r), r_list);
}

LaplacianEstimate generalized_laplacian(const std::function<double(cplx)>& u, cplx t,
                                        const std::vector<double>& r_list) {
  if (r_list.empty()) throw InvalidArgument("generalized_laplacian: empty radius list");
  const double u0 = u(t);
  if (!std::isfinite(u0)) throw InvalidArgument("generalized_laplacian: u not finite at the node");
  std::vector<double> per_r;
  for (double r : r_list) {
    double mean = 0.0;
    for (int k = 0; k < kCirclePoints; ++k) {
      mean += u(t + std::polar(r, 2.0 * std::numbers::pi * k / kCirclePoints));
    }
    mean /= kCirclePoints;
    per_r.push_back(4.0 * (mean - u0) / (r * r));
  }
  return finish_laplacian(std::move(per_r), r_list);
}

Certificate curvature_certificate(const DeformationGrid& g, std::span<const double> lambda,
                                  const CertificateOptions& opts) {
  if (lambda.size() != g.size()) throw InvalidArgument("curvature_certificate: grid mismatch");
  std::vector<double> u(g.size(), kNaN);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::isfinite(lambda[k]) && lambda[k] >= opts.floor) u[k] = std::log(lambda[k]);
  }
  Certificate c;
  c.margin.assign(g.size(), kNaN);
  std::vector<char> excluded(g.size(), 0);
  const int n = g.half_width();
  for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
    if (!g.active(k) || std::abs(g.node(k)) > opts.region) return;
    if (std::isnan(u[k])) {
      excluded[k] = 1;
      return;
    }
    const int i = static_cast<int>(k % g.side()) - n;
    const int j = static_cast<int>(k / g.side()) - n;
    try {
      const LaplacianEstimate e = generalized_laplacian(g, u, i, j);
      c.margin[k] = e.min - 4.0 * lambda[k] * lambda[k];
    } catch (const InvalidArgument&) {
      excluded[k] = 1;
    }
  });
  c.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.size(); ++k) {
    c.excluded += excluded[k];
    if (std::isnan(c.margin[k])) continue;
    ++c.tested;
    c.min_margin = std::min(c.min_margin, c.margin[k]);
    if (c.margin[k] < -opts.tol) ++c.violations;
  }
  if (c.tested == 0) throw NumericalFailure("curvature_certificate: every node excluded", 0.0);
  return c;
}

// ---------------------------------------------------------------------------
// Direction models

DirectionModel ellipse_direction(cplx b, int N) {
  if (!(std::abs(b) < 1.0)) throw InvalidArgument("ellipse_direction: |b| must be below 1");
  if (N < 3) throw InvalidArgument("ellipse_direction: N must be at least 3");
  DirectionModel d;
  d.name = "ellipse";
  d.N = N;
  d.mu_norm = std::abs(b);
  d.bracket_lower = teich_norm_bracket(constant_field(b), 2, {.restarts = 4, .iterations = 100}).lower;
  d.h = [b](std::span<const cplx> x, cplx t) {
    cplx s{}, p(1.0, 0.0);
    for (std::size_t m = 0; m < x.size(); ++m) {
      p *= b * t;
      s += x[m] * x[m] * p;
    }
    return s;
  };
  d.dh = [b](std::span<const cplx> x, cplx t) {
    cplx s{}, p(1.0, 0.0);  // p = (b t)^(m-1)
    for (std::size_t m = 0; m < x.size(); ++m) {
      s += double(m + 1) * x[m] * x[m] * b * p;
      p *= b * t;
    }
    return s;
  };
  auto pad = [N](std::vector<cplx> v) {
    v.resize(N);
    return v;
  };
  d.catalogue = {pad({1.0}), pad({std::sqrt(0.8), std::sqrt(0.2)}),
                 pad({std::sqrt(0.7), std::sqrt(0.2), std::sqrt(0.1)})};
  // Takagi vector of diag((bt)^m) for |bt| < 1.
  d.extra = {pad({1.0})};
  return d;
}

DirectionModel zero_direction() {
  DirectionModel d;
  d.name = "zero";
  d.N = 1;
  d.h = [](std::span<const cplx>, cplx) { return cplx{}; };
  d.dh = d.h;
  d.catalogue = {{1.0}};
  return d;
}

DirectionModel hyperbolic_direction() {
  DirectionModel d;
  d.name = "hyperbolic";
  d.N = 1;
  d.mu_norm = 1.0;
  d.bracket_lower = 1.0;
  d.h = [](std::span<const cplx>, cplx t) { return t; };
  d.dh = [](std::span<const cplx>, cplx) { return cplx(1.0, 0.0); };
  d.catalogue = {{1.0}};
  return d;
}

DirectionModel field_direction(const std::string& name, const BeltramiField& mu, int N,
                               int bracket_degree, std::uint64_t seed) {
  if (N < 2) throw InvalidArgument("field_direction: N must be at least 2");
  const Eigen::MatrixXcd H = infinitesimal_grunsky_matrix(moments(mu, 2 * N - 2), N);
  DirectionModel d;
  d.name = name;
  d.N = N;
  d.mu_norm = mu.sup_norm();
  BracketOptions bo;
  bo.seed = seed;
  d.bracket_lower = mu.sup_norm() > 0.0 ? teich_norm_bracket(mu, bracket_degree, bo).lower : 0.0;
  auto quad = [H](std::span<const cplx> x) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(H.rows());
    for (std::size_t k = 0; k < x.size() && k < std::size_t(H.rows()); ++k) v(k) = x[k];
    return cplx((v.transpose() * H * v)(0, 0));
  };
  d.h = [quad](std::span<const cplx> x, cplx t) { return t * quad(x); };
  d.dh = [quad](std::span<const cplx> x, cplx) { return quad(x); };
  for (int k = 0; k < std::min(N, 3); ++k) {
    std::vector<cplx> e(N);
    e[k] = 1.0;
    d.catalogue.push_back(e);
  }
  std::vector<cplx> mix(N);
  mix[0] = mix[1] = 1.0;
  d.catalogue.push_back(unit(mix));
  if (H.cwiseAbs().maxCoeff() > 0.0) d.extra.push_back(takagi_vector(H));
  return d;
}

// ---------------------------------------------------------------------------
// Comparison

Comparison metric_comparison(const DeformationGrid& g, const DirectionModel& d,
                             const ComparisonOptions& opts) {
  std::vector<std::vector<cplx>> xs = d.catalogue;
  const std::size_t n_cat = xs.size();
  xs.insert(xs.end(), d.extra.begin(), d.extra.end());
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < opts.random_x; ++r) {
    std::vector<cplx> x(d.N);
    for (cplx& v : x) v = cplx(gauss(rng), gauss(rng));
    xs.push_back(unit(std::move(x)));
  }

  Comparison c;
  c.lambda_inf.assign(g.size(), kNaN);
  c.lambda_kappa.assign(g.size(), kNaN);
  c.lower.assign(g.size(), kNaN);
  c.upper.assign(g.size(), kNaN);
  std::vector<char> bad(g.size(), 0);
  for_each_index(g.size(), Exec::parallel, [&](std::size_t k) {
    if (!g.active(k)) return;
    const cplx t = g.node(k);
    double inf = 0.0, kap = 0.0;
    for (std::size_t q = 0; q < xs.size(); ++q) {
      const cplx hv = d.h(xs[q], t);
      if (!(std::abs(hv) < 1.0)) {
        bad[k] = 1;
        return;
      }
      const double lam = std::abs(d.dh(xs[q], t)) / (1.0 - std::norm(hv));
      if (q < n_cat) inf = std::max(inf, lam);
      kap = std::max(kap, lam);
    }
    c.lambda_inf[k] = inf;
    c.lambda_kappa[k] = kap;
    c.lower[k] = (t == cplx{}) ? std::max(kap, d.bracket_lower) : kap;
    c.upper[k] = d.mu_norm / (1.0 - std::norm(t) * d.mu_norm * d.mu_norm);
  });
  if (std::find(bad.begin(), bad.end(), 1) != bad.end()) {
    throw InvalidArgument("metric_comparison: probe leaves the disk on the grid");
  }
  double worst_inversion = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    ++c.nodes;
    const double e1 = c.lambda_inf[k] - c.lambda_kappa[k];
    const double e2 = c.lambda_kappa[k] - c.upper[k];
    if (e1 > opts.tol || e2 > opts.tol) ++c.chain_violations;
    c.max_excess = std::max({c.max_excess, e1 > opts.tol ? e1 : 0.0, e2 > opts.tol ? e2 : 0.0});
    worst_inversion = std::max(worst_inversion, c.lower[k] - c.upper[k]);
  }
  const std::size_t k0 = g.index(0, 0);
  c.inf0 = c.lambda_inf[k0];
  c.kappa0 = c.lambda_kappa[k0];
  c.lower0 = c.lower[k0];
  c.upper0 = c.upper[k0];
  if (worst_inversion > opts.tol) {
    throw NumericalFailure("metric_comparison: lambda_K bracket inverted", worst_inversion);
  }
  return c;
}

std::vector<MetricSamples> probe_metrics(const DeformationGrid& g, const DirectionModel& d) {
  std::vector<MetricSamples> out;
  for (const auto& x : d.catalogue) {
    const auto hv = sample_probe(g, [&](cplx t) { return d.h(x, t); });
    out.push_back(pullback_metric(g, hv));
  }
  return out;
}

}  // namespace glab
