#include "glab/beltrami.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>

#include "glab/error.hpp"
#include "glab/kernels.hpp"

namespace glab {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const cplx& x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

BeltramiField zero_field() {
  return BeltramiField::from_function([](cplx) { return cplx{}; }, BeltramiField::Tag::zero, 0.0);
}

BeltramiField constant_field(cplx t) {
  if (!(std::abs(t) < 1.0)) throw InvalidArgument("constant_field: |t| must be below 1");
  return BeltramiField::from_function([t](cplx) { return t; }, BeltramiField::Tag::constant,
                                      std::abs(t));
}

cplx pairing(const BeltramiField& mu, const QuadDifferential& psi, const DiskRule& rule) {
  const std::vector<cplx> m = mu.sample(rule);
  const std::vector<cplx> p = evaluate_batch([&psi](cplx z) { return psi(z); }, rule.nodes);
  cplx s{};
  double a1 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    s += rule.weights[i] * m[i] * p[i];
    a1 += rule.weights[i] * std::abs(p[i]);
  }
  const double bound = std::max(mu.sup_norm(), max_abs(m)) * a1;
  if (!(std::abs(s) <= bound * (1.0 + 1e-9) + 1e-300)) {
    throw NumericalFailure("pairing: Holder bound violated", std::abs(s) - bound);
  }
  return s;
}

cplx pairing(const BeltramiField& mu, const QuadDifferential& psi) {
  if (mu.has_evaluator()) return pairing(mu, psi, psi.preferred_rule());
  return pairing(mu, psi, default_disk_rule());
}

MomentVector moments(const BeltramiField& mu, int K, Exec exec) {
  return moments(mu, K, default_disk_rule(), exec);
}

MomentVector moments(const BeltramiField& mu, int K, const DiskRule& rule, Exec exec) {
  if (K < 0) throw InvalidArgument("moments: K must be non-negative");
  const std::vector<cplx> vals = mu.sample(rule, exec);
  MomentVector out;
  out.c = power_moments(rule, vals, K, exec);
  const double sup = std::max(mu.sup_norm(), max_abs(vals));
  for (int k = 0; k <= K; ++k) {
    out.c[k] /= kPi;
    const double bound = sup * 2.0 / (k + 2);
    if (std::abs(out.c[k]) > bound * (1.0 + 1e-9) + 1e-15) {
      throw NumericalFailure("moments: Holder bound violated", std::abs(out.c[k]) - bound);
    }
  }
  return out;
}

Eigen::MatrixXcd infinitesimal_grunsky_matrix(const MomentVector& m, int N) {
  if (N < 1) throw InvalidArgument("infinitesimal_grunsky: N must be positive");
  if (m.K() < 2 * N - 2) throw InvalidArgument("infinitesimal_grunsky: need moments to order 2N-2");
  Eigen::MatrixXcd H(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) H(i, j) = std::sqrt(double((i + 1) * (j + 1))) * m.c[i + j];
  return H;
}

double infinitesimal_grunsky(const MomentVector& m, int N) {
  const Eigen::MatrixXcd H = infinitesimal_grunsky_matrix(m, N);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(H);
  return svd.singularValues()(0);
}

double infinitesimal_grunsky(const BeltramiField& mu, int N) {
  return infinitesimal_grunsky(moments(mu, 2 * N - 2), N);
}

TruncatedSeries first_order_laurent(const MomentVector& m, double s, int N) {
  const int order = 2 * N - 1;
  if (m.K() < order - 1) throw InvalidArgument("first_order_laurent: need moments to order 2N-2");
  TruncatedSeries f(-order, 1);
  f.at(1) = 1.0;
  for (int n = 1; n <= order; ++n) f.at(-n) = s * m.c[n - 1];
  return f;
}

// ---------------------------------------------------------------------------
// Extremality bracket

namespace {

struct AscentProblem {
  const DiskRule* rule;
  std::vector<cplx> m;  // int mu z^k (no 1/pi)
  std::vector<std::vector<cplx>> zk;  // zk[k][i] = z_i^k
  int M;

  AscentProblem(const DiskRule& r, std::span<const cplx> mu_vals, int M_) : rule(&r), M(M_) {
    m = power_moments(r, mu_vals, M, Exec::serial);
    zk.assign(M + 1, std::vector<cplx>(r.size(), cplx(1.0, 0.0)));
    for (int k = 1; k <= M; ++k)
      for (std::size_t i = 0; i < r.size(); ++i) zk[k][i] = zk[k - 1][i] * r.nodes[i];
  }

  // Objective and (optionally) its ascent direction.
  double value(const std::vector<cplx>& c, std::vector<cplx>* grad) const {
    cplx P{};
    for (int k = 0; k <= M; ++k) P += c[k] * m[k];
    double Nrm = 0.0;
    std::vector<cplx> G(M + 1);
    for (std::size_t i = 0; i < rule->size(); ++i) {
      cplx psi{};
      for (int k = M; k >= 0; --k) psi = psi * rule->nodes[i] + c[k];
      const double a = std::abs(psi);
      Nrm += rule->weights[i] * a;
      if (grad && a > 0.0) {
        const cplx u = rule->weights[i] * psi / a;
        for (int k = 0; k <= M; ++k) G[k] += u * std::conj(zk[k][i]);
      }
    }
    if (!(Nrm > 0.0)) return 0.0;
    const double absP = std::abs(P);
    if (grad) {
      grad->assign(M + 1, cplx{});
      const cplx phase = absP > 0.0 ? P / absP : cplx(1.0, 0.0);
      for (int k = 0; k <= M; ++k)
        (*grad)[k] = (std::conj(m[k]) * phase * Nrm - absP * G[k]) / (Nrm * Nrm);
    }
    return absP / Nrm;
  }
};

void normalize(std::vector<cplx>& c) {
  double n = 0.0;
  for (const cplx& v : c) n += std::norm(v);
  n = std::sqrt(n);
  if (n > 0.0)
    for (cplx& v : c) v /= n;
}

struct AscentResult {
  std::vector<cplx> c;
  bool improving = false;
};

AscentResult ascend(const AscentProblem& prob, std::vector<cplx> c, int iterations) {
  normalize(c);
  std::vector<cplx> g;
  double f = prob.value(c, &g);
  double step = 1.0;
  bool last_improved = false;
  for (int it = 0; it < iterations && step > 1e-14; ++it) {
    std::vector<cplx> trial(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) trial[k] = c[k] + step * g[k];
    normalize(trial);
    std::vector<cplx> gt;
    const double ft = prob.value(trial, &gt);
    if (ft > f) {
      last_improved = ft - f > 1e-15 * std::max(1.0, f);
      c = std::move(trial);
      g = std::move(gt);
      f = ft;
      step = std::min(step * 2.0, 1e3);
    } else {
      step *= 0.5;
      last_improved = false;
    }
  }
  return {c, last_improved};
}

}  // namespace

Bracket teich_norm_bracket(const BeltramiField& mu, int M, const BracketOptions& opts) {
  if (M < 1) throw InvalidArgument("teich_norm_bracket: M must be at least 1");
  if (opts.restarts < 1 || opts.iterations < 0) throw InvalidArgument("teich_norm_bracket: bad options");
  Bracket out;
  out.upper = mu.sup_norm();
  if (out.upper == 0.0) {
    out.best.assign(M + 1, cplx{});
    out.best[0] = 1.0;
    out.best_restart = 0;
    out.extremal = true;
    return out;
  }

  // Optimize on a coarse rule, score on the default one. Sample-only fields
  // live on the default rule and use it for both.
  const DiskRule& fine = default_disk_rule();
  static const DiskRule coarse = polar_rule(32, 128);
  const DiskRule& opt_rule = mu.has_evaluator() ? coarse : fine;
  const std::vector<cplx> opt_vals = mu.sample(opt_rule);
  const std::vector<cplx> fine_vals = mu.sample(fine);
  const AscentProblem prob(opt_rule, opt_vals, M);
  const AscentProblem final_prob(fine, fine_vals, M);

  std::vector<std::vector<cplx>> starts(opts.restarts, std::vector<cplx>(M + 1));
  starts[0][0] = 1.0;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 1; r < opts.restarts; ++r)
    for (int k = 0; k <= M; ++k) starts[r][k] = cplx(gauss(rng), gauss(rng));

  std::vector<AscentResult> results(opts.restarts);
  std::vector<double> scores(opts.restarts);
  for_each_index(opts.restarts, Exec::parallel, [&](std::size_t r) {
    results[r] = ascend(prob, starts[r], opts.iterations);
    scores[r] = final_prob.value(results[r].c, nullptr);
  });

  for (int r = 0; r < opts.restarts; ++r) {
    if (scores[r] > out.lower || out.best_restart < 0) {
      out.lower = scores[r];
      out.best = results[r].c;
      out.best_restart = r;
      out.improved_to_end = results[r].improving;
    }
  }
  out.extremal = out.upper - out.lower <= opts.extremal_tol;
  return out;
}

// ---------------------------------------------------------------------------
// Chain rule

AffineMap AffineMap::inverse() const {
  const double det = std::norm(a) - std::norm(b);
  if (!(det > 0.0)) throw InvalidArgument("AffineMap: not orientation preserving");
  // z = (conj(a) w - b conj(w)) / (|a|^2 - |b|^2)
  return AffineMap{std::conj(a) / det, -b / det};
}

AffineMap AffineMap::normalized(cplx nu) {
  if (!(std::abs(nu) < 1.0)) throw InvalidArgument("AffineMap: |nu| must be below 1");
  const double s = 1.0 + std::abs(nu);
  return AffineMap{cplx(1.0 / s, 0.0), nu / s};
}

namespace {
std::atomic<long> clamp_events{0};
}

long chain_rule_clamp_count() { return clamp_events.load(); }

BeltramiField chain_rule(const AffineMap& A, const BeltramiField& mu) {
  if (!(std::abs(A.b) < std::abs(A.a))) throw InvalidArgument("chain_rule: |nu| must be below 1");
  if (!mu.has_evaluator()) throw InvalidArgument("chain_rule: field needs a pointwise evaluator");
  const cplx nu = A.nu();
  const cplx theta = std::conj(A.a) / A.a;
  const bool constant = mu.tag() == BeltramiField::Tag::constant || mu.tag() == BeltramiField::Tag::zero;
  auto f = [A, nu, theta, mu](cplx z) {
    cplx w = A(z);
    const double r = std::abs(w);
    if (r > 1.0) {
      clamp_events.fetch_add(1, std::memory_order_relaxed);
      w /= r;
    }
    const cplx m1 = mu(w) * theta;
    return (nu + m1) / (1.0 + std::conj(nu) * m1);
  };
  std::optional<double> exact;
  if (constant) exact = std::abs(f(cplx{}));
  return BeltramiField::from_function(f, BeltramiField::Tag::chain, exact);
}

BeltramiField chain_rule(cplx nu, const BeltramiField& mu) {
  return chain_rule(AffineMap::normalized(nu), mu);
}

// ---------------------------------------------------------------------------
// Ahlfors-Weill

BeltramiField ahlfors_weill(const PointFn& phi_inv, double phi_bnorm, double s) {
  if (!(std::abs(s) * phi_bnorm < 2.0)) {
    throw InvalidArgument("ahlfors_weill: need ||s phi||_B < 2");
  }
  auto f = [phi_inv, s](cplx z) {
    const double d = 1.0 - std::norm(z);
    return 0.5 * d * d * s * phi_inv(std::conj(z));
  };
  return BeltramiField::from_function(f, BeltramiField::Tag::ahlfors_weill);
}

BeltramiField ahlfors_weill(const MapSpec& map, double s, int bnorm_grid) {
  const BNormEstimate bn = b_norm(map, bnorm_grid);
  const double bnorm = std::max(bn.value, bn.refined);
  return ahlfors_weill([map](cplx u) { return schwarzian_at_inverse(map, u); }, bnorm, s);
}

// ---------------------------------------------------------------------------
// Boundary probes

ProbeResult boundary_probe(const BeltramiField& mu, cplx z0, int p_max) {
  if (std::abs(std::abs(z0) - 1.0) > 1e-12) throw InvalidArgument("boundary_probe: |z0| must be 1");
  if (p_max < 1) throw InvalidArgument("boundary_probe: p_max must be positive");
  ProbeResult out;
  out.z0 = z0;
  for (int p = 1; p <= p_max; ++p) {
    const QuadDifferential psi = concentrating_sequence(z0, p);
    out.values.push_back(std::abs(pairing(mu, psi)));
  }
  out.max = *std::max_element(out.values.begin(), out.values.end());
  const std::size_t n = out.values.size();
  double lim = out.values.back();
  if (n >= 3) {
    const double x0 = out.values[n - 3], x1 = out.values[n - 2], x2 = out.values[n - 1];
    const double den = x2 - 2.0 * x1 + x0;
    if (std::abs(den) > 1e-14 * std::max(1.0, std::abs(x2))) lim = x2 - (x2 - x1) * (x2 - x1) / den;
  }
  out.limit = std::clamp(lim, 0.0, mu.sup_norm());
  return out;
}

AffineFamilyMember affine_family(double t1, double t2) {
  if (t1 == 0.0) throw InvalidArgument("affine_family: t1 must be non-zero");
  const double t = t2 / t1;
  if (!(std::abs(t) < 1.0)) throw InvalidArgument("affine_family: |t2/t1| must be below 1");
  AffineFamilyMember m{BeltramiField::from_function([t](cplx) { return cplx(t, 0.0); },
                                                    BeltramiField::Tag::affine, std::abs(t)),
                       std::abs(t)};
  return m;
}

// ---------------------------------------------------------------------------
// Radial reflection in a convex polygon

ReflectionExtension reflection_extension(const ExteriorMapSpec& spec, const PolygonSpec& poly) {
  const auto& V = poly.vertices();
  cplx c{};
  for (const cplx& v : V) c += v;
  c /= 4.0;
  // Supporting lines: outward normal angle beta_j and distance d_j from c.
  std::array<double, 4> beta{}, dist{};
  for (int j = 0; j < 4; ++j) {
    const cplx e = V[(j + 1) % 4] - V[j];
    const cplx n = -cplx(0.0, 1.0) * e / std::abs(e);  // outward for ccw order
    beta[j] = std::arg(n);
    dist[j] = std::real(std::conj(n) * (V[j] - c));
  }
  double k = 0.0;
  for (int j = 0; j < 4; ++j) {
    for (int v : {j, (j + 1) % 4}) {
      const double th = std::arg(V[v] - c);
      k = std::max(k, std::abs(std::sin(th - beta[j])));
    }
  }
  auto q_of = [beta, dist](double th) {
    double best = std::numeric_limits<double>::infinity();
    double q = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double cs = std::cos(th - beta[j]);
      if (cs <= 0.0) continue;
      const double rho = dist[j] / cs;
      if (rho < best) {
        best = rho;
        q = std::tan(th - beta[j]);
      }
    }
    return q;
  };
  auto f = [spec, c, q_of](cplx z) {
    if (std::abs(z) < 1e-12) z = cplx(1e-12, 0.0);
    const cplx zb = std::conj(z);
    const cplx zeta = 1.0 / zb;
    const cplx v = evaluate(spec, zeta) - c;
    const cplx H = -derivative(spec, zeta) / (zb * zb);
    const double q = q_of(std::arg(v));
    const cplx ratio = cplx(0.0, q) * std::conj(v) / (v * cplx(1.0, -q));
    return ratio * std::polar(1.0, 2.0 * std::arg(H));
  };
  return ReflectionExtension{BeltramiField::from_function(f, BeltramiField::Tag::reflection, k), k, c};
}

}  // namespace glab
