#include "glab/scmap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "glab/error.hpp"
#include "glab/kernels.hpp"

namespace glab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;

double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

// Wrap to (-pi, pi].
double wrap_pi(double a) {
  a = wrap_2pi(a);
  return a > kPi ? a - kTwoPi : a;
}

const IntervalRule& panel_rule() {
  static const IntervalRule rule = gauss_legendre(16);
  return rule;
}

void require_exterior(cplx z, const char* op) {
  if (std::abs(z) < 1.0 - 1e-12) {
    throw InvalidArgument(std::string(op) + ": point lies inside the unit disk");
  }
}

// int_{phi_k}^{phi_k + L} integrand(e^{i phi}) i e^{i phi} dphi with the
// |phi - phi_k|^{gamma_k} endpoint behavior absorbed into the Jacobi weight.
cplx partial_arc(const ExteriorMapSpec& spec, int k, double L) {
  if (L == 0.0) return {};
  const double gamma = spec.alpha[k] - 1.0;
  const IntervalRule& rule = spec.endpoint_rules[k];
  const double half = 0.5 * std::abs(L);
  cplx s{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double d = (1.0 + x) * half;
    const double phi = spec.angles[k] + std::copysign(d, L);
    const cplx w = std::polar(1.0, phi);
    s += rule.weights[i] * integrand(spec, w) * cplx(0.0, 1.0) * w / std::pow(d, gamma);
  }
  return 0.5 * L * std::pow(half, gamma) * s;
}

// Full arc from e_j to e_{j+1} with both endpoint weights.
cplx full_arc(std::span<const cplx> e, std::span<const double> angles,
              std::span<const double> gammas, const IntervalRule& rule, int j, double gap) {
  const int n = static_cast<int>(e.size());
  const int jn = (j + 1) % n;
  const double half = 0.5 * gap;
  cplx s{};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double d_from = (1.0 + x) * half;
    const double d_to = (1.0 - x) * half;
    const cplx w = std::polar(1.0, angles[j] + d_from);
    cplx f = 1.0;
    for (int k = 0; k < n; ++k) f *= std::pow(1.0 - e[k] / w, gammas[k]);
    s += rule.weights[i] * f * cplx(0.0, 1.0) * w /
         (std::pow(d_from, gammas[j]) * std::pow(d_to, gammas[jn]));
  }
  return half * std::pow(half, gammas[j] + gammas[jn]) * s;
}

// int_{e^{i phi}}^{e^{i phi} r} integrand, graded toward the circle.
cplx radial(const ExteriorMapSpec& spec, double phi, double r) {
  if (r <= 1.0) return {};
  const cplx dir = std::polar(1.0, phi);
  // Distance of the path start from the nearest prevertex sets the grading depth.
  double delta = kTwoPi;
  for (const cplx& e : spec.prevertices) delta = std::min(delta, std::abs(dir - e));
  const double floor = std::max(0.25 * delta, 1e-15);

  std::vector<double> breaks{1.0};
  const double span = std::min(r, 2.0) - 1.0;
  std::vector<double> inner;
  for (double h = span; h > floor; h *= 0.2) inner.push_back(1.0 + h);
  for (auto it = inner.rbegin(); it != inner.rend(); ++it) breaks.push_back(*it);
  if (breaks.back() < 1.0 + span) breaks.push_back(1.0 + span);
  while (breaks.back() < r) breaks.push_back(std::min(2.0 * breaks.back(), r));

  const IntervalRule& gl = panel_rule();
  cplx s{};
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p], b = breaks[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    cplx ps{};
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      ps += gl.weights[i] * integrand(spec, (mid + half * gl.nodes[i]) * dir);
    }
    s += half * ps;
  }
  return s * dir;
}

// int_{e_1}^{e^{i phi}} along the circle, starting from the nearest prevertex.
cplx boundary_integral(const ExteriorMapSpec& spec, double phi) {
  int best = 0;
  double best_l = wrap_pi(phi - spec.angles[0]);
  for (int k = 1; k < 4; ++k) {
    const double l = wrap_pi(phi - spec.angles[k]);
    if (std::abs(l) < std::abs(best_l)) {
      best = k;
      best_l = l;
    }
  }
  return spec.vertex_integrals[best] + partial_arc(spec, best, best_l);
}

// int along |w| = rho from angle a to angle b (rho > 1).
cplx circle_arc(const ExteriorMapSpec& spec, double rho, double a, double b) {
  const double len = b - a;
  if (len == 0.0) return {};
  const int panels = std::max(8, static_cast<int>(std::ceil(std::abs(len) * 8.0 / (rho - 1.0))));
  const IntervalRule& gl = panel_rule();
  cplx s{};
  const double h = len / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double t = mid + 0.5 * h * gl.nodes[i];
      const cplx w = std::polar(rho, t);
      s += 0.5 * h * gl.weights[i] * integrand(spec, w) * cplx(0.0, 1.0) * w;
    }
  }
  return s;
}

bool near_prevertex(const ExteriorMapSpec& spec, cplx z) {
  for (const cplx& e : spec.prevertices) {
    if (std::abs(z - e) < 1e-14) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- polygon

PolygonSpec PolygonSpec::from_vertices(std::span<const cplx> vertices) {
  if (vertices.size() != 4) throw InvalidArgument("polygon must have exactly 4 vertices");
  PolygonSpec p;
  std::copy(vertices.begin(), vertices.end(), p.vertices_.begin());
  double scale = 0.0;
  for (int j = 0; j < 4; ++j) {
    for (int k = j + 1; k < 4; ++k) scale = std::max(scale, std::abs(p.vertices_[j] - p.vertices_[k]));
  }
  for (int j = 0; j < 4; ++j) {
    for (int k = j + 1; k < 4; ++k) {
      if (std::abs(p.vertices_[j] - p.vertices_[k]) <= 1e-12 * scale) {
        throw InvalidArgument("polygon vertices must be distinct");
      }
    }
  }
  double area2 = 0.0;
  for (int j = 0; j < 4; ++j) {
    const cplx a = p.vertices_[j], b = p.vertices_[(j + 1) % 4];
    area2 += a.real() * b.imag() - a.imag() * b.real();
  }
  if (!(area2 > 1e-12 * scale * scale)) {
    throw InvalidArgument("polygon must have positive orientation and nonzero area");
  }
  for (int j = 0; j < 4; ++j) {
    const cplx prev = p.vertices_[(j + 3) % 4], cur = p.vertices_[j], next = p.vertices_[(j + 1) % 4];
    const double interior = std::arg((prev - cur) / (next - cur));
    if (!(interior > 1e-9 && interior < kPi - 1e-9)) {
      throw InvalidArgument("polygon must be strictly convex (vertex " + std::to_string(j + 1) + ")");
    }
    p.alpha_[j] = 2.0 - interior / kPi;
  }
  return p;
}

std::array<double, 4> PolygonSpec::side_lengths() const {
  std::array<double, 4> s{};
  for (int j = 0; j < 4; ++j) s[j] = std::abs(vertices_[(j + 1) % 4] - vertices_[j]);
  return s;
}

double PolygonSpec::boundary_distance(cplx w) const {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4; ++j) {
    const cplx a = vertices_[j], b = vertices_[(j + 1) % 4];
    const cplx ab = b - a;
    const double t = std::clamp(std::real((w - a) * std::conj(ab)) / std::norm(ab), 0.0, 1.0);
    best = std::min(best, std::abs(w - (a + t * ab)));
  }
  return best;
}

// ---------------------------------------------------------------- spec

cplx ExteriorMapSpec::residue() const {
  cplx r{};
  for (int j = 0; j < 4; ++j) r += (alpha[j] - 1.0) * prevertices[j];
  return r;
}

std::array<double, 4> ExteriorMapSpec::gaps() const {
  std::array<double, 4> g{};
  for (int j = 0; j < 4; ++j) g[j] = wrap_2pi(angles[(j + 1) % 4] - angles[j]);
  g[3] = kTwoPi - (g[0] + g[1] + g[2]);
  return g;
}

ExteriorMapSpec solve_parameters(const PolygonSpec& poly, const SolveOptions& opts) {
  if (!(opts.tol > 0)) throw InvalidArgument("solve_parameters: tol must be positive");
  const auto& A = poly.vertices();
  std::array<double, 4> gammas{};
  for (int j = 0; j < 4; ++j) gammas[j] = poly.alpha()[j] - 1.0;
  std::array<IntervalRule, 4> arc_rules;
  for (int j = 0; j < 4; ++j) {
    arc_rules[j] = gauss_jacobi(opts.arc_nodes, gammas[(j + 1) % 4], gammas[j]);
  }
  const auto sides = poly.side_lengths();

  struct Layout {
    std::array<double, 4> angles, gaps;
    std::array<cplx, 4> e;
  };
  auto layout = [](const Eigen::Vector3d& y) {
    Layout l;
    const double m = std::max(0.0, y.maxCoeff());
    double denom = std::exp(-m);
    for (int j = 0; j < 3; ++j) denom += std::exp(y(j) - m);
    for (int j = 0; j < 3; ++j) l.gaps[j] = kTwoPi * std::exp(y(j) - m) / denom;
    l.gaps[3] = kTwoPi * std::exp(-m) / denom;
    l.angles[0] = 0.0;
    for (int j = 1; j < 4; ++j) l.angles[j] = l.angles[j - 1] + l.gaps[j - 1];
    for (int j = 0; j < 4; ++j) l.e[j] = std::polar(1.0, l.angles[j]);
    return l;
  };
  auto arcs = [&](const Layout& l) {
    std::array<cplx, 4> I{};
    for (int j = 0; j < 4; ++j) I[j] = full_arc(l.e, l.angles, gammas, arc_rules[j], j, l.gaps[j]);
    return I;
  };
  auto residual = [&](const Eigen::Vector3d& y) {
    const auto I = arcs(layout(y));
    Eigen::Vector3d r;
    for (int j = 0; j < 3; ++j) {
      r(j) = std::log(std::abs(I[j + 1]) / std::abs(I[0])) - std::log(sides[j + 1] / sides[0]);
    }
    return r;
  };

  Eigen::Vector3d y = Eigen::Vector3d::Zero();
  Eigen::Vector3d r = residual(y);
  int it = 0;
  for (; it < opts.max_iterations && r.lpNorm<Eigen::Infinity>() > 1e-15; ++it) {
    Eigen::Matrix3d J;
    constexpr double h = 1e-6;
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3d yp = y, ym = y;
      yp(c) += h;
      ym(c) -= h;
      J.col(c) = (residual(yp) - residual(ym)) / (2 * h);
    }
    const Eigen::Vector3d step = J.colPivHouseholderQr().solve(-r);
    double lambda = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
      const Eigen::Vector3d yt = y + lambda * step;
      const Eigen::Vector3d rt = residual(yt);
      if (rt.allFinite() && rt.norm() < r.norm()) {
        y = yt;
        r = rt;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }

  const Layout l = layout(y);
  const auto I = arcs(l);
  ExteriorMapSpec spec;
  spec.prevertices = l.e;
  spec.angles = l.angles;
  spec.alpha = poly.alpha();
  spec.iterations = it;
  cplx num{};
  double den = 0.0;
  for (int j = 0; j < 4; ++j) {
    num += std::conj(I[j]) * (A[(j + 1) % 4] - A[j]);
    den += std::norm(I[j]);
  }
  spec.d1 = num / den;
  spec.d0 = A[0];
  spec.vertex_integrals[0] = 0.0;
  for (int j = 1; j < 4; ++j) spec.vertex_integrals[j] = spec.vertex_integrals[j - 1] + I[j - 1];
  double err = 0.0;
  for (int j = 0; j < 4; ++j) {
    err = std::max(err, std::abs(spec.d1 * I[j] - (A[(j + 1) % 4] - A[j])) / sides[j]);
  }
  spec.residual = err;
  if (!(err <= opts.tol)) {
    throw NumericalFailure("prevertex solve did not converge", err);
  }
  for (int j = 0; j < 4; ++j) {
    spec.endpoint_rules[j] = gauss_jacobi(opts.arc_nodes, 0.0, gammas[j]);
  }
  return spec;
}

// ---------------------------------------------------------------- evaluation

cplx integrand(const ExteriorMapSpec& spec, cplx z) {
  cplx f = 1.0;
  for (int k = 0; k < 4; ++k) f *= std::pow(1.0 - spec.prevertices[k] / z, spec.alpha[k] - 1.0);
  return f;
}

cplx evaluate(const ExteriorMapSpec& spec, cplx z) {
  require_exterior(z, "evaluate");
  const double r = std::abs(z);
  const double phi = wrap_2pi(std::arg(z));
  cplx I = boundary_integral(spec, phi);
  if (r > 1.0) I += radial(spec, phi, r);
  return spec.d0 + spec.d1 * I;
}

cplx evaluate_via(const ExteriorMapSpec& spec, cplx z, double pivot_angle) {
  require_exterior(z, "evaluate_via");
  const double r = std::abs(z);
  if (r <= 1.0 + 1e-12) return evaluate(spec, z);
  const double pivot = wrap_2pi(pivot_angle);
  const double target = pivot + wrap_pi(std::arg(z) - pivot);
  const cplx I = boundary_integral(spec, pivot) + radial(spec, pivot, r) +
                 circle_arc(spec, r, pivot, target);
  return spec.d0 + spec.d1 * I;
}

cplx evaluate(const EllipseOracle& map, cplx z) {
  require_exterior(z, "evaluate");
  return z + map.b / z;
}

cplx evaluate(const MapSpec& map, cplx z) {
  return std::visit([&](const auto& m) { return evaluate(m, z); }, map);
}

cplx derivative(const ExteriorMapSpec& spec, cplx z) {
  require_exterior(z, "derivative");
  return spec.d1 * integrand(spec, z);
}

cplx derivative(const EllipseOracle& map, cplx z) {
  require_exterior(z, "derivative");
  return 1.0 - map.b / (z * z);
}

// ---------------------------------------------------------------- Laurent data

TruncatedSeries contour_laurent(const MapSpec& map, int N, double rho, int samples) {
  if (N < 0 || samples < 2 * N + 4) throw InvalidArgument("contour_laurent: too few samples");
  if (!(rho > 1.0)) throw InvalidArgument("contour_laurent: radius must exceed 1");
  std::vector<cplx> pts(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) pts[j] = std::polar(rho, kTwoPi * j / samples);
  const cplx lead = std::holds_alternative<ExteriorMapSpec>(map)
                        ? std::get<ExteriorMapSpec>(map).d1
                        : cplx(1.0);
  const std::vector<cplx> vals =
      evaluate_batch([&](cplx z) { return evaluate(map, z) / lead; }, pts);
  TruncatedSeries out(-N, 1);
  for (int k = -N; k <= 1; ++k) {
    cplx s{};
    for (int j = 0; j < samples; ++j) s += vals[j] * std::polar(1.0, -k * kTwoPi * j / samples);
    out.at(k) = s / (static_cast<double>(samples) * std::pow(rho, k));
  }
  return out;
}

TruncatedSeries laurent_coeffs(const ExteriorMapSpec& spec, int N, bool cross_check) {
  if (N < 1) throw InvalidArgument("laurent_coeffs: N must be at least 1");
  // log f(u) = sum_k gamma_k log(1 - e_k u) = -sum_n (sum_k gamma_k e_k^n) u^n / n
  TruncatedSeries logf(0, N + 1);
  for (int n = 1; n <= N + 1; ++n) {
    cplx p{};
    for (int k = 0; k < 4; ++k) p += (spec.alpha[k] - 1.0) * std::pow(spec.prevertices[k], n);
    logf.at(n) = -p / static_cast<double>(n);
  }
  const TruncatedSeries f = exp_unit(logf);
  // G' = f(1/z) = 1 - sum m b_m z^{-m-1}
  TruncatedSeries out(-N, 1);
  out.at(1) = 1.0;
  for (int m = 1; m <= N; ++m) out.at(-m) = -f[m + 1] / static_cast<double>(m);

  const MapSpec map = spec;
  const TruncatedSeries c15 = contour_laurent(map, std::min(N, 12), 1.5);
  out.at(0) = c15[0];
  if (cross_check) {
    const TruncatedSeries c12 = contour_laurent(map, std::min(N, 12), 1.2);
    double worst = std::abs(c15[0] - c12[0]) + std::abs(c15[1] - 1.0) + std::abs(c12[1] - 1.0);
    for (int m = 1; m <= std::min(N, 12); ++m) {
      worst = std::max({worst, std::abs(c15[-m] - out[-m]), std::abs(c12[-m] - out[-m])});
    }
    if (worst > 1e-8) throw NumericalFailure("Laurent contour cross-check failed", worst);
  }
  return out;
}

TruncatedSeries laurent_coeffs(const EllipseOracle& map, int N) {
  if (N < 1) throw InvalidArgument("laurent_coeffs: N must be at least 1");
  TruncatedSeries out(-N, 1);
  out.at(1) = 1.0;
  out.at(-1) = map.b;
  return out;
}

TruncatedSeries laurent_coeffs(const MapSpec& map, int N) {
  return std::visit([&](const auto& m) { return laurent_coeffs(m, N); }, map);
}

// ---------------------------------------------------------------- Schwarzians

cplx pre_schwarzian(const ExteriorMapSpec& spec, cplx z) {
  require_exterior(z, "pre_schwarzian");
  if (near_prevertex(spec, z)) throw InvalidArgument("pre_schwarzian: evaluation at a prevertex");
  cplx b = -2.0 / z;
  for (int k = 0; k < 4; ++k) b += (spec.alpha[k] - 1.0) / (z - spec.prevertices[k]);
  return b;
}

cplx pre_schwarzian(const EllipseOracle& map, cplx z) {
  require_exterior(z, "pre_schwarzian");
  return 2.0 * map.b / (z * (z * z - map.b));
}

cplx schwarzian(const ExteriorMapSpec& spec, cplx z) {
  const cplx b = pre_schwarzian(spec, z);
  cplx db = 2.0 / (z * z);
  for (int k = 0; k < 4; ++k) {
    const cplx d = z - spec.prevertices[k];
    db -= (spec.alpha[k] - 1.0) / (d * d);
  }
  return db - 0.5 * b * b;
}

cplx schwarzian(const EllipseOracle& map, cplx z) {
  require_exterior(z, "schwarzian");
  const cplx d = z * z - map.b;
  return -6.0 * map.b / (d * d);
}

cplx schwarzian(const MapSpec& map, cplx z) {
  return std::visit([&](const auto& m) { return schwarzian(m, z); }, map);
}

cplx schwarzian_at_inverse(const ExteriorMapSpec& spec, cplx u) {
  if (std::abs(u) > 1.0 + 1e-12) throw InvalidArgument("schwarzian_at_inverse: |u| > 1");
  if (std::abs(u) >= 0.25) {
    const cplx z = 1.0 / u;
    const cplx z2 = z * z;
    return schwarzian(spec, z) * z2 * z2;
  }
  // Expansion valid when sum gamma_k e_k = 0:
  //   S(1/u) u^-4 = -sum g e^2 (3 - 2 e u)/(1 - e u)^2 - (sum g e / (1 - e u))^2 / 2
  cplx a{}, s1{};
  for (int k = 0; k < 4; ++k) {
    const double g = spec.alpha[k] - 1.0;
    const cplx e = spec.prevertices[k];
    const cplx q = 1.0 - e * u;
    a += g * e * e * (3.0 - 2.0 * e * u) / (q * q);
    s1 += g * e / q;
  }
  return -a - 0.5 * s1 * s1;
}

cplx schwarzian_at_inverse(const EllipseOracle& map, cplx u) {
  if (std::abs(u) > 1.0 + 1e-12) throw InvalidArgument("schwarzian_at_inverse: |u| > 1");
  const cplx d = 1.0 - map.b * u * u;
  return -6.0 * map.b / (d * d);
}

cplx schwarzian_at_inverse(const MapSpec& map, cplx u) {
  return std::visit([&](const auto& m) { return schwarzian_at_inverse(m, u); }, map);
}

namespace {

double b_norm_on_grid(const MapSpec& map, int grid) {
  std::vector<double> radii;
  for (int k = 0; k < grid; ++k) radii.push_back(static_cast<double>(k) / grid);
  // Stop well before 1 - 2^-j rounds to 1.
  for (int j = 1; j <= std::min(2 * grid / 3 + 10, 40); ++j) radii.push_back(1.0 - std::ldexp(1.0, -j));

  std::vector<double> thetas;
  const int nt = 4 * grid;
  for (int k = 0; k < nt; ++k) thetas.push_back(kTwoPi * k / nt);
  if (const auto* sc = std::get_if<ExteriorMapSpec>(&map)) {
    // u = 1/z, so prevertex e^{i phi} corresponds to angle -phi.
    for (double phi : sc->angles) {
      thetas.push_back(-phi);
      for (int j = 1; j <= grid / 4 + 4; ++j) {
        thetas.push_back(-phi + std::ldexp(1.0, -j));
        thetas.push_back(-phi - std::ldexp(1.0, -j));
      }
    }
  }
  std::vector<double> best(radii.size(), 0.0);
  for_each_index(radii.size(), Exec::parallel, [&](std::size_t i) {
    const double s = radii[i];
    double m = 0.0;
    for (double t : thetas) {
      const cplx u = std::polar(s, t);
      const double w = (1.0 - s * s);
      m = std::max(m, w * w * std::abs(schwarzian_at_inverse(map, u)));
      if (s == 0.0) break;
    }
    best[i] = m;
  });
  return *std::max_element(best.begin(), best.end());
}

}  // namespace

BNormEstimate b_norm(const MapSpec& map, int grid) {
  if (grid < 4) throw InvalidArgument("b_norm: grid too coarse");
  return {b_norm_on_grid(map, grid), b_norm_on_grid(map, 2 * grid)};
}

double boundary_deviation(const ExteriorMapSpec& spec, const PolygonSpec& poly, int samples) {
  std::vector<cplx> pts(static_cast<std::size_t>(samples));
  for (int j = 0; j < samples; ++j) pts[j] = std::polar(1.0, kTwoPi * (j + 0.5) / samples);
  const std::vector<cplx> w = evaluate_batch([&](cplx z) { return evaluate(spec, z); }, pts);
  double worst = 0.0;
  for (const cplx& v : w) worst = std::max(worst, poly.boundary_distance(v));
  return worst;
}

}  // namespace glab
