#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "zklab/decomp.hpp"
#include "zklab/functionals.hpp"
#include "zklab/solver.hpp"

namespace zklab {

// One observed extremal value against its threshold.
struct SweepCell {
  std::string label;
  double observed = 0.0;
  double threshold = 0.0;
  std::string relation = "<=";  // "<=", ">=", "in"
  double threshold_hi = 0.0;    // upper end when relation is "in"
  std::uint64_t samples = 0;
  bool pass = true;
};

struct SweepReport {
  std::string name;
  std::string grid;
  std::uint64_t seed = 0;
  std::vector<SweepCell> cells;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> notes;

  bool pass() const;
  SweepCell& add(const std::string& label, double observed, const std::string& relation,
                 double threshold, std::uint64_t samples = 0, double threshold_hi = 0.0);
};

// ---- Pointwise bound on M3 -------------------------------------------------

// Strata: equal_scale, high_high_low, all_low, zero_min. Samples are split
// evenly. Throws VerificationFailure if a zero-minimum triple has M3 != 0.
SweepReport verify_fti1(const SymbolParams& p, std::uint64_t samples, std::uint64_t seed,
                        double cstar);

// ---- Differentiation identity ------------------------------------------------

struct DifferentiationCheck {
  double dt = 0.0;
  cplx lhs{};  // central difference of Lambda_k(M)
  cplx rhs{};
  double residual = 0.0;  // |lhs - rhs| / |rhs|, absolute when rhs vanishes
  double residual_abs = 0.0;
};

// Differentiation identity at the middle sample of `traj` (needs >= 3 uniformly
// spaced states). k = 2 uses M = m(z1)m(z2) and compares with
// (2i/3) Lambda_3(M3); k = 3 uses M = sigma3 and compares with
// Lambda_3(sigma3 h3) - 3i Lambda_4(X(sigma3)). Throws std::length_error when
// the exhaustive higher sum would exceed `budget` terms.
DifferentiationCheck differentiation_check(const Trajectory& traj, int k, const SymbolParams& p,
                                           std::uint64_t budget = kDefaultBudget);

// Generic k = 2 right side, Lambda_2(M h2) - 2i Lambda_3(X(M)) with the plain
// tuple sum; used to cross-check the specialised fast path.
cplx differentiation_rhs_generic_k2(const SpectralField& u, const SymbolParams& p);

struct RefinementStudy {
  std::vector<DifferentiationCheck> checks;
  double order = 0.0;  // least-squares slope of log residual vs log dt
};

// Solve from u0 with each dt for three steps and evaluate the identity.
RefinementStudy differentiation_refinement(const SpectralField& u0, const std::vector<double>& dts,
                                           int k, const SymbolParams& p, bool nonlinear = true,
                                           std::uint64_t budget = kDefaultBudget);

SweepReport verify_differentiation(const SpectralField& u0, const std::vector<double>& dts, int k,
                                   const SymbolParams& p, double residual_threshold,
                                   std::uint64_t budget = kDefaultBudget);

// ---- Almost conservation ---------------------------------------------------

struct ScanConfig {
  double box = 6.283185307179586;
  int modes = 128;
  std::vector<int> N_list{4, 8, 16, 32};
  double delta = 0.5;
  double dt = 5e-6;
  double s = -1.0 / 13.0;
  std::uint64_t seed = 1;
  double alpha = 1.0;       // |uhat| ~ <zeta>^{-alpha}
  double kmin = 1.0;        // band edges in frequency units
  double kmax = 0.0;        // 0 selects the dealias cutoff
  bool nonlinear = true;
  int ratio_samples = 0;    // > 0 enables the trilinear/quadrilinear ratio checks
};

struct ScanRow {
  int N = 0;
  double gamma0 = 0.0;
  double E1_start = 0.0;
  double E1_end = 0.0;
  double drift = 0.0;
  double E0_drift = 0.0;
  double resonant_integral = 0.0;      // |int (2i/3) Lambda_3(M3 1_res) dt|
  double quadrilinear_integral = 0.0;  // |int Lambda_4(X(sigma3)) dt|
  double trilinear_ratio = 0.0;
  double quadrilinear_ratio = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  double slope = 0.0;
  bool monotone = true;
  double max_phase_per_step = 0.0;
};

SpectralField scan_initial_data(const ScanConfig& cfg);
ScanResult almost_conservation_scan(const ScanConfig& cfg);
SweepReport scan_report(const ScanConfig& cfg, const ScanResult& r, double slope_threshold);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// |Lambda_3(sigma3)| / (gamma0^{-1} N^{-1} ||Iu||^3) over random fields.
SweepReport verify_correction_bound(double box, int modes, const std::vector<int>& N_list,
                                    double s, int samples, std::uint64_t seed, double cstar);

// ---- Bilinear Strichartz ---------------------------------------------------

struct StrichartzConfig {
  double box_scale = 48.0;    // box side = box_scale / N3
  int time_samples = 129;     // odd, Simpson rule
  double delta_scale = 8.0;   // delta = delta_scale / N1^2
  double packet_width = 0.25;  // frequency width of each packet relative to its shell
  int trials = 4;
  std::uint64_t seed = 1;
};

struct StrichartzSample {
  int N1 = 0, N3 = 0;
  int trial = 0;
  int fft_size = 0;
  double product_norm = 0.0;
  double data_norm1 = 0.0, data_norm3 = 0.0;
  double ratio = 0.0;
};

// Real wave packet centred at frequency zc with Gaussian width sigma, cut to
// the shell of N (core when N = 0), shifted in space by x0.
SpectralField shell_packet(const FrequencyLattice& lat, const FreqPoint& zc, double sigma, int N,
                           const FreqPoint& x0);

// ||v1 v3||_{L^2([0,delta] x box)} for free solutions; Simpson in time.
double free_product_norm(const SpectralField& phi1, const SpectralField& phi3, double delta,
                         int time_samples);

std::vector<StrichartzSample> bilinear_strichartz_samples(int N1, int N3,
                                                          const StrichartzConfig& cfg);
// Per (N1, N3) maximum ratio; cells check non-increase within 2x along the
// listed N1 at fixed N3.
SweepReport bilinear_strichartz_constant(const std::vector<std::pair<int, int>>& pairs,
                                         const StrichartzConfig& cfg, double growth_factor = 2.0);

// Smallest even size >= max(n, 4) with factors 2, 3, 5 only.
int fft_friendly_size(int n);

// ---- Transversality --------------------------------------------------------

struct SurfacePoint {
  double tau = 0.0, xi = 0.0, eta = 0.0;
  double c = 0.0;
  double residual() const { return tau - xi * xi * xi - eta * eta * eta - c; }
};
SurfacePoint surface_point(const FreqPoint& z, double c);

struct TransversalityDet {
  double unnormalized = 0.0;
  double normalized = 0.0;
};
TransversalityDet transversality_det(const SurfacePoint& p1, const SurfacePoint& p2,
                                     const SurfacePoint& p3);
// Unit normal of tau = xi^3 + eta^3 + c at z.
std::array<double, 3> unit_normal(const FreqPoint& z);

// |det| against 9 H3(z1,z2) H2(z1,z2) on random zero-sum integer triples with
// coordinates in [-coord_max, coord_max]; relative tolerance `tol`.
SweepReport transversality_sweep(std::uint64_t samples, std::uint64_t seed, double tol,
                                 std::int64_t coord_max = 1000);

// ---- Loomis-Whitney ----------------------------------------------------------

struct Box2 {
  double x0, x1, y0, y1;
  double width() const { return std::max(x1 - x0, y1 - y0); }
  FreqPoint center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

struct CertifiedD {
  double lower = 0.0;        // certified lower bound of |det N| over the patch triple
  double sampled_min = 0.0;  // smallest |det N| seen at evaluated points
  double sampled_max = 0.0;
  std::uint64_t nodes = 0;
  bool converged = false;
};

// Interval branch and bound over P1 x P2 x P3 for the unit normals of the
// cubic surfaces. Stops when lower >= tightness * sampled_min.
CertifiedD certify_transversality(const Box2& P1, const Box2& P2, const Box2& P3,
                                  double tightness = 0.8, std::uint64_t max_nodes = 2000000);

// Smooth test function on a patch: sum of Gaussian bumps placed in patch
// coordinates, so the same shape can be reused across patch sizes.
struct PatchFunction {
  struct Bump {
    double u, v, width, amp;
  };
  Box2 patch;
  std::vector<Bump> bumps;
  double operator()(const FreqPoint& z) const;
};
PatchFunction random_patch_function(const Box2& patch, int bumps, std::uint64_t seed);

struct LwGeometry {
  Box2 P1, P2, P3;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

// Nearly antipodal patches: z1* = r e(theta), z2* = -Rot(beta) z1*, square
// patches of half-width patch_fraction * r * beta, P3 the Minkowski sum.
LwGeometry near_antipodal_geometry(double r, double theta, double beta, double patch_fraction);

struct LwEvaluation {
  double conv_norm = 0.0;  // ||f*g||_{L^2(S3)}
  double f_norm = 0.0, g_norm = 0.0;
  double ratio() const { return f_norm > 0 && g_norm > 0 ? conv_norm / (f_norm * g_norm) : 0.0; }
};

struct LwQuadrature {
  int lines = 192;        // lines across the strip direction
  int scan = 4096;        // scan points per line when locating the strip
  int across = 96;        // quadrature points across the strip
  int patch_points = 64;  // per axis, for ||f||, ||g||
};

LwEvaluation lw_evaluate(const LwGeometry& geo, const PatchFunction& f, const PatchFunction& g,
                         const LwQuadrature& q = {});

struct LwConfig {
  double r = 1.0;
  double theta = 1.0471975511965976;  // pi/3
  std::vector<double> betas{0.005, 0.01, 0.02, 0.04, 0.08, 0.16};
  double patch_fraction = 0.1;
  double diameter_factor = 64.0;  // reject when diam(S_j) > factor * d
  int trials = 4;
  int bumps = 3;
  std::uint64_t seed = 1;
  LwQuadrature quad;
};

struct LwRow {
  double beta = 0.0;
  CertifiedD d;
  double diameter = 0.0;
  double max_ratio = 0.0;    // max over trials of ||f*g|| / (||f|| ||g||)
  double scaled = 0.0;       // max_ratio * sqrt(d)
};

std::vector<LwRow> loomis_whitney_rows(const LwConfig& cfg);
SweepReport loomis_whitney_empirical(const LwConfig& cfg, double slope_tolerance);

// Orthogonal coordinate planes (d = 1): ratio <= 1 by Cauchy-Schwarz.
double lw_planes_ratio(const PatchFunction& f, const PatchFunction& g, int points = 256);

// ---- Orthogonality ------------------------------------------------------------

struct OrthogonalityRow {
  double A = 0.0;
  TileIndex k1;
  std::uint64_t count = 0;
  std::uint64_t distinct_coarse = 0;
};

std::vector<OrthogonalityRow> orthogonality_ensemble(const WhitneyBoxConfig& cfg,
                                                     const std::vector<double>& scales, int tiles,
                                                     std::uint64_t seed);
SweepReport orthogonality_report(const WhitneyBoxConfig& cfg, const std::vector<OrthogonalityRow>& rows,
                                 double max_count, double max_scale_change);

}  // namespace zklab
