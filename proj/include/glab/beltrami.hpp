#pragma once

// Beltrami coefficients on the disk: pairings with quadratic differentials,
// power moments, the infinitesimal Grunsky norm, the extremality bracket,
// Beltrami chain rule for affine maps, harmonic (Ahlfors-Weill) coefficients,
// boundary probes and the radial-reflection extension of polygon maps.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "glab/beltrami_field.hpp"
#include "glab/quaddiff.hpp"
#include "glab/scmap.hpp"
#include "glab/series.hpp"

namespace glab {

using cplx = std::complex<double>;

BeltramiField zero_field();
BeltramiField constant_field(cplx t);

// int_D mu psi dx dy on `rule`. Throws NumericalFailure if the Holder bound
// |<mu,psi>| <= ||mu|| ||psi||_{A1} is violated (it never should be).
cplx pairing(const BeltramiField& mu, const QuadDifferential& psi, const DiskRule& rule);
// Uses psi's preferred rule when mu has an evaluator, mu's own grid otherwise.
cplx pairing(const BeltramiField& mu, const QuadDifferential& psi);

struct MomentVector {
  std::vector<cplx> c;  // c_k = (1/pi) int_D mu z^k, k = 0..K
  int K() const noexcept { return static_cast<int>(c.size()) - 1; }
};

MomentVector moments(const BeltramiField& mu, int K, Exec exec = Exec::parallel);
MomentVector moments(const BeltramiField& mu, int K, const DiskRule& rule,
                     Exec exec = Exec::parallel);

// H_mn = sqrt(mn) c_{m+n-2}; <mu, psi_x> = x^T H x.
Eigen::MatrixXcd infinitesimal_grunsky_matrix(const MomentVector& m, int N);
// sigma_max(H): truncation-N infinitesimal Grunsky norm of mu.
double infinitesimal_grunsky(const MomentVector& m, int N);
double infinitesimal_grunsky(const BeltramiField& mu, int N);

// First-order Laurent data of the map with dilatation s mu:
// z + sum_n s c_{n-1} z^-n, on [-(2N-1), 1].
TruncatedSeries first_order_laurent(const MomentVector& m, double s, int N);

struct BracketOptions {
  int restarts = 16;
  int iterations = 500;
  std::uint64_t seed = 1;
  double extremal_tol = 1e-4;
};

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  bool extremal = false;          // upper - lower <= extremal_tol
  std::vector<cplx> best;         // maximizing polynomial coefficients
  int best_restart = -1;
  bool improved_to_end = false;   // ascent still improving at the last iteration
};

// lower = max |<mu, psi>| / ||psi|| over polynomial psi of degree <= M
// (projected gradient ascent), upper = ||mu||_inf.
Bracket teich_norm_bracket(const BeltramiField& mu, int M, const BracketOptions& opts = {});

// w = a z + b conj(z), |b| < |a|.
struct AffineMap {
  cplx a{1.0, 0.0};
  cplx b{};

  cplx operator()(cplx z) const { return a * z + b * std::conj(z); }
  cplx nu() const { return b / a; }
  AffineMap inverse() const;
  // (z + nu conj z) / (1 + |nu|), which maps the disk into itself.
  static AffineMap normalized(cplx nu);
};

// Beltrami coefficient of w^mu o A:
//   (nu + mu(A z) theta) / (1 + conj(nu) mu(A z) theta),  theta = conj(a) / a.
// Image points outside the closed disk are pulled back onto the circle; the
// number of such events is returned by chain_rule_clamp_count().
BeltramiField chain_rule(const AffineMap& A, const BeltramiField& mu);
BeltramiField chain_rule(cplx nu, const BeltramiField& mu);
long chain_rule_clamp_count();

// nu(z) = (1/2) (1 - |z|^2)^2 s phi(1/conj z) conj(z)^-4, where phi_inv(u)
// returns phi(1/u) u^-4. Throws InvalidArgument unless s * phi_bnorm < 2.
BeltramiField ahlfors_weill(const PointFn& phi_inv, double phi_bnorm, double s = 1.0);
// phi = S_F for a map; the Bers norm is the refined grid estimate.
BeltramiField ahlfors_weill(const MapSpec& map, double s = 1.0, int bnorm_grid = 64);

struct ProbeResult {
  cplx z0{1.0, 0.0};
  std::vector<double> values;  // |<mu, psi_p>|, p = 1..p_max
  double limit = 0.0;          // Aitken on the last three, clamped to [0, sup]
  double max = 0.0;
};

ProbeResult boundary_probe(const BeltramiField& mu, cplx z0, int p_max);

struct AffineFamilyMember {
  BeltramiField mu;
  double k = 0.0;
};

// w = t1 z + t2 conj(z): constant coefficient t2 / t1 with k = |t2 / t1|.
AffineFamilyMember affine_family(double t1, double t2);

// Quasiconformal extension of an exterior polygon map into the disk:
// G(z) = R(F(1/conj z)) with R the radial reflection in the polygon boundary
// about its vertex centroid, R(w) = c + rho(theta)^2 / conj(w - c).
struct ReflectionExtension {
  BeltramiField mu;
  double k_upper = 0.0;  // exact sup |mu|: max over sides of |sin(theta - beta)|
  cplx center{};
};

ReflectionExtension reflection_extension(const ExteriorMapSpec& spec, const PolygonSpec& poly);

}  // namespace glab
