#include "glab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "glab/beltrami.hpp"
#include "glab/error.hpp"
#include "glab/grunsky.hpp"
#include "glab/kernels.hpp"
#include "glab/metrics.hpp"
#include "glab/quaddiff.hpp"
#include "glab/scmap.hpp"

namespace glab::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string input;
  std::string out;
  std::vector<int> N{8, 16, 32, 64};
  int grid = 128;
  double tol = 1e-12;
  std::uint64_t seed = 1;
  int probe_points = 8;
  int p_max = 12;
};

// Fixed tolerances used by the pipelines (reported verbatim).
constexpr double kSparsityTol = 1e-9;
constexpr double kTeichmullerProbeFraction = 0.05;
constexpr double kChainTol = 1e-9;
constexpr double kCurvatureTol = 1e-2;
constexpr double kExtremalTol = 1e-4;
constexpr int kBracketDegree = 6;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

cplx parse_complex(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw UsageError(std::string("expected a number or [re, im] for ") + what);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open input file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  if (!out) throw UsageError("cannot write " + p.string());
  out << s;
}

json config_json(const RunConfig& c) {
  return json{{"command", c.command}, {"input", c.input},        {"out", c.out},
              {"N", c.N},             {"grid", c.grid},          {"tol", c.tol},
              {"seed", c.seed},       {"probe_points", c.probe_points}, {"p_max", c.p_max}};
}

void write_report(const RunConfig& c, json body, const json& tolerances) {
  json r;
  r["version"] = GLAB_VERSION;
  r["modules"] = json{{"series", GLAB_VERSION}, {"scmap", GLAB_VERSION},
                      {"grunsky", GLAB_VERSION}, {"quaddiff", GLAB_VERSION},
                      {"beltrami", GLAB_VERSION}, {"metrics", GLAB_VERSION}};
  r["config"] = config_json(c);
  r["tolerances"] = tolerances;
  for (auto& [k, v] : body.items()) r[k] = v;
  write_text(fs::path(c.out) / "report.json", r.dump(2) + "\n");
}

std::vector<cplx> parse_vertices(const json& j) {
  if (!j.is_array()) throw UsageError("\"vertices\" must be an array of [x, y] pairs");
  std::vector<cplx> v;
  for (const auto& p : j) v.push_back(parse_complex(p, "vertex"));
  return v;
}

struct LoadedMap {
  MapSpec map;
  std::optional<PolygonSpec> poly;
  std::string kind;
};

LoadedMap load_map(const json& j, const RunConfig& c) {
  if (j.contains("vertices")) {
    const PolygonSpec poly = PolygonSpec::from_vertices(parse_vertices(j["vertices"]));
    SolveOptions opts;
    opts.tol = c.tol;
    return {solve_parameters(poly, opts), poly, "polygon"};
  }
  if (j.contains("oracle")) {
    const std::string o = j["oracle"].get<std::string>();
    if (o == "identity") return {EllipseOracle{0.0}, std::nullopt, "identity"};
    if (o == "ellipse") {
      if (!j.contains("b")) throw UsageError("ellipse oracle needs \"b\"");
      return {EllipseOracle{parse_complex(j["b"], "b")}, std::nullopt, "ellipse"};
    }
    throw UsageError("unknown oracle: " + o);
  }
  throw UsageError("input needs \"vertices\" or \"oracle\"");
}

int max_N(const RunConfig& c) { return *std::max_element(c.N.begin(), c.N.end()); }

// ---------------------------------------------------------------------------

int cmd_map(const RunConfig& c) {
  const json in = read_json(c.input);
  if (!in.contains("vertices")) throw UsageError("map needs a polygon with \"vertices\"");
  const PolygonSpec poly = PolygonSpec::from_vertices(parse_vertices(in["vertices"]));
  SolveOptions opts;
  opts.tol = c.tol;
  ExteriorMapSpec spec;
  try {
    spec = solve_parameters(poly, opts);
  } catch (const NumericalFailure& e) {
    write_report(c, json{{"status", "solver_failure"}, {"message", e.what()}, {"residual", e.residual()}},
                 json{{"solve", c.tol}});
    throw;
  }
  const int N = max_N(c);
  const TruncatedSeries b = laurent_coeffs(spec, N);
  std::string csv = "n,re,im\n";
  for (int n = 0; n <= N; ++n) csv += std::to_string(n) + "," + num(b[-n].real()) + "," + num(b[-n].imag()) + "\n";
  write_text(fs::path(c.out) / "laurent.csv", csv);

  json pre = json::array(), gaps = json::array();
  for (const cplx& e : spec.prevertices) pre.push_back(cjson(e));
  for (double g : spec.gaps()) gaps.push_back(g);
  json body{{"status", "ok"},
            {"prevertices", pre},
            {"angles", spec.angles},
            {"gaps", gaps},
            {"alpha", spec.alpha},
            {"d0", cjson(spec.d0)},
            {"d1", cjson(spec.d1)},
            {"residual", spec.residual},
            {"iterations", spec.iterations},
            {"residue", std::abs(spec.residue())},
            {"boundary_deviation", boundary_deviation(spec, poly, 256)},
            {"laurent_csv", "laurent.csv"}};
  write_report(c, body, json{{"solve", c.tol}, {"laurent_cross_check", 1e-8}});
  return 0;
}

int cmd_grunsky(const RunConfig& c) {
  const json in = read_json(c.input);
  const LoadedMap lm = load_map(in, c);
  const int N = max_N(c);
  const TruncatedSeries b = laurent_coeffs(lm.map, 2 * N - 1);
  const ConvergenceReport rep = convergence_report(b, c.N);

  std::string csv = "N,kappa,delta,monotone\n";
  json rows = json::array();
  for (const auto& r : rep.rows) {
    csv += std::to_string(r.N) + "," + num(r.kappa) + "," + num(r.delta) + "," + (r.monotone ? "1" : "0") + "\n";
    rows.push_back(json{{"N", r.N}, {"kappa", r.kappa}, {"delta", r.delta}, {"monotone", r.monotone}});
  }
  write_text(fs::path(c.out) / "convergence.csv", csv);

  // Which residues n mod 4 carry non-negligible Laurent coefficients.
  std::array<int, 4> residue_counts{};
  for (int n = 1; n <= 2 * N - 1; ++n)
    if (std::abs(b[-n]) > kSparsityTol) ++residue_counts[n % 4];
  const GrunskyMatrix g = grunsky_matrix(b, N);
  int nonzero = 0;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) nonzero += std::abs(g.B(i, j)) > kSparsityTol;

  json body{{"status", "ok"},
            {"map", lm.kind},
            {"rows", rows},
            {"extrapolated", rep.extrapolated},
            {"uncertainty", rep.uncertainty},
            {"monotone", rep.monotone},
            {"sparsity",
             json{{"laurent_nonzero_by_residue_mod4", residue_counts},
                  {"grunsky_nonzero_fraction", double(nonzero) / (double(N) * N)},
                  {"symmetry_defect", g.symmetry_defect()}}},
            {"convergence_csv", "convergence.csv"}};
  write_report(c, body, json{{"solve", c.tol}, {"laurent_cross_check", 1e-8}, {"sparsity", kSparsityTol}});
  return 0;
}

BeltramiField build_field(const json& j, const RunConfig& c) {
  const std::string type = j.value("type", "");
  if (type == "zero") return zero_field();
  if (type == "constant") {
    if (!j.contains("t")) throw UsageError("constant field needs \"t\"");
    return constant_field(parse_complex(j["t"], "t"));
  }
  if (type == "teichmuller") {
    const double k = j.value("k", 0.5);
    if (j.contains("coeffs")) {
      std::vector<cplx> a;
      for (const auto& v : j["coeffs"]) a.push_back(parse_complex(v, "coeffs"));
      return teichmuller_beltrami(QuadDifferential::polynomial(a), k);
    }
    std::vector<cplx> x{0.0, 1.0};  // the z^2 direction
    if (j.contains("x")) {
      x.clear();
      for (const auto& v : j["x"]) x.push_back(parse_complex(v, "x"));
    }
    return teichmuller_beltrami(psi_from_x(x), k);
  }
  if (type == "ahlfors-weill") {
    const double s = j.value("scale", 1.0);
    json src = j.contains("polygon") ? j["polygon"] : j.contains("map") ? j["map"] : json{};
    if (src.is_null()) throw UsageError("ahlfors-weill needs \"polygon\" or \"map\"");
    const LoadedMap lm = load_map(src, c);
    return ahlfors_weill(lm.map, s);
  }
  throw UsageError("unknown field type: \"" + type + "\"");
}

int cmd_extremality(const RunConfig& c) {
  const json in = read_json(c.input);
  const json& spec = in.contains("mu") ? in["mu"] : in;
  const BeltramiField mu = build_field(spec, c);

  json alpha = json::object();
  double alpha_N = 0.0;
  {
    const MomentVector m = moments(mu, 2 * max_N(c) - 2);
    for (int n : c.N) {
      alpha_N = infinitesimal_grunsky(m, n);
      alpha[std::to_string(n)] = alpha_N;
    }
  }
  BracketOptions bo;
  bo.seed = c.seed;
  bo.extremal_tol = kExtremalTol;
  const Bracket br = teich_norm_bracket(mu, kBracketDegree, bo);

  json probes = json::array();
  std::string csv = "probe,z0_re,z0_im,p,value\n";
  bool teich = true;
  for (int q = 0; q < c.probe_points; ++q) {
    const cplx z0 = std::polar(1.0, 2.0 * std::numbers::pi * q / c.probe_points);
    const ProbeResult pr = boundary_probe(mu, z0, c.p_max);
    for (std::size_t p = 0; p < pr.values.size(); ++p) {
      csv += std::to_string(q) + "," + num(z0.real()) + "," + num(z0.imag()) + "," + std::to_string(p + 1) +
             "," + num(pr.values[p]) + "\n";
    }
    probes.push_back(json{{"z0", cjson(z0)}, {"limit", pr.limit}, {"max", pr.max}, {"values", pr.values}});
    if (pr.limit >= kTeichmullerProbeFraction * mu.sup_norm() && mu.sup_norm() > 0.0) teich = false;
  }
  write_text(fs::path(c.out) / "probes.csv", csv);

  json warnings = json::array();
  if (br.improved_to_end) warnings.push_back("bracket optimizer still improving at the final iteration");
  json body{{"status", "ok"},
            {"field", to_string(mu.tag())},
            {"sup_norm", mu.sup_norm()},
            {"grid_max", mu.grid_max()},
            {"grid", mu.grid_tag()},
            {"alpha_N", alpha_N},
            {"alpha", alpha},
            {"bracket", json{{"lower", br.lower}, {"upper", br.upper}, {"extremal_flag", br.extremal},
                             {"degree", kBracketDegree}, {"best_restart", br.best_restart}}},
            {"probes", probes},
            {"extremal_flag", br.extremal},
            {"teichmuller_flag", teich},
            {"warnings", warnings},
            {"probes_csv", "probes.csv"}};
  write_report(c, body,
               json{{"extremal", kExtremalTol}, {"teichmuller_probe_fraction", kTeichmullerProbeFraction}});
  return 0;
}

DirectionModel build_direction(const json& j, const RunConfig& c) {
  const std::string d = j.value("direction", "");
  if (d == "ellipse") return ellipse_direction(parse_complex(j.value("b", json(0.5)), "b"));
  if (d == "zero") return zero_direction();
  if (d == "hyperbolic") return hyperbolic_direction();
  if (d == "fields") {
    if (!j.contains("mu")) throw UsageError("fields direction needs \"mu\"");
    return field_direction(j["mu"].value("type", "field"), build_field(j["mu"], c), 8, kBracketDegree, c.seed);
  }
  throw UsageError("unknown direction: \"" + d + "\"");
}

json certificate_json(const DeformationGrid& g, std::span<const double> lambda) {
  try {
    CertificateOptions o;
    o.tol = kCurvatureTol;
    const Certificate cert = curvature_certificate(g, lambda, o);
    return json{{"status", cert.pass() ? "pass" : "fail"}, {"min_margin", cert.min_margin},
                {"tested", cert.tested}, {"violations", cert.violations}, {"excluded", cert.excluded}};
  } catch (const NumericalFailure&) {
    return json{{"status", "all nodes excluded"}};
  }
}

int cmd_deform(const RunConfig& c) {
  const json in = read_json(c.input);
  const DirectionModel d = build_direction(in, c);
  const DeformationGrid g(in.value("r_max", 0.75), 1.0 / c.grid);

  const std::vector<MetricSamples> pm = probe_metrics(g, d);
  std::vector<std::vector<double>> sets;
  json probe_certs = json::array();
  for (const auto& m : pm) {
    sets.push_back(m.lambda);
    json pc = certificate_json(g, m.lambda);
    pc["holomorphy_residual"] = m.holomorphy_residual;
    probe_certs.push_back(pc);
  }
  // Certificates use the raw envelope; the neighbourhood-max pass only
  // matters on the crossing set and is reported alongside.
  const std::vector<double> env = envelope(g, sets, false);
  const std::vector<double> env_reg = envelope(g, sets, true);
  const json env_cert = certificate_json(g, env);

  ComparisonOptions co;
  co.seed = c.seed;
  co.tol = kChainTol;
  const Comparison cmp = metric_comparison(g, d, co);

  std::vector<double> margin(g.size(), std::nan(""));
  try {
    CertificateOptions o;
    o.tol = kCurvatureTol;
    margin = curvature_certificate(g, env, o).margin;
  } catch (const NumericalFailure&) {
  }
  std::string csv =
      "t_re,t_im,lambda_inf,lambda_kappa,lambda_K_lower,lambda_K_upper,envelope,envelope_usc,margin\n";
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    const cplx t = g.node(k);
    csv += num(t.real()) + "," + num(t.imag()) + "," + num(cmp.lambda_inf[k]) + "," + num(cmp.lambda_kappa[k]) +
           "," + num(cmp.lower[k]) + "," + num(cmp.upper[k]) + "," + num(env[k]) + "," + num(env_reg[k]) + "," +
           num(margin[k]) + "\n";
  }
  write_text(fs::path(c.out) / "metrics.csv", csv);

  const double spread0 = std::max({cmp.inf0, cmp.kappa0, cmp.upper0}) - std::min({cmp.inf0, cmp.kappa0, cmp.upper0});
  json body{{"status", "ok"},
            {"direction", d.name},
            {"r_max", g.r_max()},
            {"spacing", g.spacing()},
            {"mu_norm", d.mu_norm},
            {"bracket_lower", d.bracket_lower},
            {"at_origin", json{{"lambda_inf", cmp.inf0}, {"lambda_kappa", cmp.kappa0},
                               {"lambda_K_lower", cmp.lower0}, {"lambda_K_upper", cmp.upper0},
                               {"spread", spread0}}},
            {"chain", json{{"nodes", cmp.nodes}, {"violations", cmp.chain_violations},
                           {"max_excess", cmp.max_excess}, {"verdict", cmp.chain_violations == 0}}},
            {"probe_certificates", probe_certs},
            {"envelope_certificate", env_cert},
            {"metrics_csv", "metrics.csv"}};
  write_report(c, body, json{{"chain", kChainTol}, {"curvature", kCurvatureTol}});
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  if (const char* env = std::getenv("GRUNSKY_LAB_THREADS")) set_thread_cap(std::atoi(env));

  CLI::App app{"Numerical experiments with Grunsky and Teichmueller norms"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* s) {
    s->add_option("--input", cfg.input, "Input JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", cfg.out, "Output directory")->required();
    s->add_option("--N", cfg.N, "Truncation orders")->check(CLI::PositiveNumber);
    s->add_option("--grid", cfg.grid, "Deformation grid: nodes per unit length")->check(CLI::Range(8, 4096));
    s->add_option("--tol", cfg.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    s->add_option("--seed", cfg.seed, "Random seed");
    s->add_option("--probe-points", cfg.probe_points, "Boundary probe points")->check(CLI::Range(1, 1024));
    s->add_option("--p-max", cfg.p_max, "Concentration depth of boundary probes")->check(CLI::Range(3, 40));
  };
  CLI::App* map = app.add_subcommand("map", "Solve an exterior polygon map");
  CLI::App* gr = app.add_subcommand("grunsky", "Grunsky norm convergence table");
  CLI::App* ex = app.add_subcommand("extremality", "Extremality report for a Beltrami coefficient");
  CLI::App* de = app.add_subcommand("deform", "Metrics on a deformation disk");
  for (CLI::App* s : {map, gr, ex, de}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::sort(cfg.N.begin(), cfg.N.end());
    fs::create_directories(cfg.out);
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "map") return cmd_map(cfg);
    if (cfg.command == "grunsky") return cmd_grunsky(cfg);
    if (cfg.command == "extremality") return cmd_extremality(cfg);
    if (cfg.command == "deform") return cmd_deform(cfg);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace glab::cli
