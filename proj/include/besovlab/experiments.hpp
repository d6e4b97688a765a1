#pragma once

// The six desk-scale experiments. Each returns an ExperimentReport holding
// every measured value next to its threshold; reports are deterministic for
// a given grid and parameter set.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "besovlab/evolution.hpp"
#include "besovlab/initial_data.hpp"
#include "besovlab/littlewood_paley.hpp"
#include "besovlab/pde_models.hpp"
#include "besovlab/report.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

struct Thresholds {
  double localization = 1e-10;     // identity residual and off-block leakage
  double decomposition = 1e-12;    // Delta_kn(u0^2) vs I1 + I2, relative to ||u0^2||
  double c_star = 1e-3;            // lower bounds r_n and rho_j
  double stability = 2.0;          // r_{n+1}/r_n within [1/x, x]
  double i2_margin = 4.0;          // ||I2||/||I1|| <= 2^{-k sigma} * margin
  double i2_bound = 1.0;           // ||I2|| 2^{k(n+1) sigma}
  double rho_variation = 4.0;      // max rho_j / min rho_j
  double remainder_window = 0.2;   // slope 2 +- window
  double first_window = 0.1;       // slope 1 +- window
  double c1 = 1e-3;                // D_n >= c1 eps
  double non_decay = 0.5;          // D_{n+1}/D_n
  double h1_drift = 1e-6;
  double momentum_drift = 1e-10;
  double refinement = 16.0;        // error ratio under dt halving
};

// Least-squares slope of log y against log x; NaN unless every value is positive.
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nan("");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nan("");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nan("");
  return (n * sxy - sx * sy) / den;
}

namespace detail {

inline std::string idx(const char* name, double v) { return std::string(name) + "=" + format_number(v); }
inline std::string idx(const char* name, int v) { return std::string(name) + "=" + std::to_string(v); }

inline ExperimentReport start_report(std::string name, std::string tag, const Grid& grid,
                                     const DyadicPartition& part) {
  ExperimentReport r;
  r.name = std::move(name);
  r.tag = std::move(tag);
  r.grid_fingerprint = grid.fingerprint();
  r.partition_fingerprint = part.fingerprint();
  r.parameters["grid_l"] = grid.length();
  r.parameters["grid_n"] = grid.size();
  return r;
}

inline void attach_warnings(ExperimentReport& r, const WarningCapture& cap) {
  std::set<std::string> seen;
  for (const auto& m : cap.messages()) {
    if (seen.insert(m).second) r.warnings.push_back(m);
  }
}

inline double norm_p(const SpectralField& f, double p) {
  if (p == 2.0) return l2_norm(f);
  return lp_norm(inverse_transform(f), p);
}

inline double scaled_block(const SpectralField& u, int j, double s, double p, const DyadicPartition& part) {
  return std::exp2(s * j) * block_lp_norm(u, j, p, part);
}

inline double besov_inf(const SpectralField& u, double s, double p, const DyadicPartition& part) {
  return besov_norm(u, BesovParams{s, p, kInfinity}, part);
}

inline std::string range_text(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "}";
}

inline void mechanism_note(ExperimentReport& r, const std::string& what) {
  r.notes.push_back(r.pass() ? "mechanism exhibited on tested range " + what
                             : "mechanism not exhibited on tested range " + what);
}

inline void require_nonempty(const std::vector<int>& v, const char* what) {
  if (v.empty()) fail(ErrorKind::Configuration, std::string(what) + " list is empty");
}

}  // namespace detail

// Datum of the CH lower-bound construction, sum_{n<=n_max} 2^{-kn sigma} f^k_n.
inline SpectralField ch_datum(const Grid& grid, int k, double sigma, int n_max, double p = 2.0) {
  const BumpProfile bump = make_bump(grid);
  return ch_data_spectrum(CHDataSpec{k, sigma, n_max, p}, bump);
}

// Power-law datum truncated to the cubic dealias band.
inline SpectralField novikov_datum(const Grid& grid, double sigma) {
  return dealias(novikov_data_spectrum(NovikovDataSpec{sigma}, grid), kCubicDealias);
}

// ---------------------------------------------------------------- localization

struct LocalizationParams {
  int k = 5;
  std::vector<int> n_list{2};
  std::optional<int> i;
  int sign = +1;
};

struct LocalizationResult {
  double residual = 0.0;  // ||Delta_b g - g|| / ||g||
  double leakage = 0.0;   // max_{j != b} ||Delta_j g|| / ||g||
  double support_lo = 0.0;
  double support_hi = 0.0;
};

inline LocalizationResult measure_localization(const SpectralField& g, int block, const DyadicPartition& part) {
  if (g.is_zero()) fail(ErrorKind::DegenerateInput, "localization of the zero field");
  const double norm = l2_norm(g);
  LocalizationResult out;
  out.residual = l2_norm(part.apply(g, block) - g) / norm;
  for (int j = -1; j <= part.j_max(); ++j) {
    if (j == block) continue;
    out.leakage = std::max(out.leakage, block_lp_norm(g, j, 2.0, part) / norm);
  }
  const Grid& grid = g.grid();
  const long nyq = static_cast<long>(grid.size() / 2);
  out.support_lo = kInfinity;
  for (long m = 0; m <= nyq; ++m) {
    if (g.at_mode(m) == complex{}) continue;
    const double xi = static_cast<double>(m) * grid.dxi();
    out.support_lo = std::min(out.support_lo, xi);
    out.support_hi = std::max(out.support_hi, xi);
  }
  return out;
}

inline ExperimentReport exp_localization(const Grid& grid, const LocalizationParams& prm,
                                         const Thresholds& th = {}) {
  WarningCapture cap;
  detail::require_nonempty(prm.n_list, "n");
  const DyadicPartition part(grid);
  ExperimentReport r = detail::start_report("localization", "Lemma 3.1", grid, part);
  r.parameters["k"] = prm.k;
  r.parameters["n"] = prm.n_list;
  r.parameters["i"] = prm.i ? nlohmann::json(*prm.i) : nlohmann::json(nullptr);
  r.parameters["sign"] = prm.sign;
  const BumpProfile bump = make_bump(grid);
  for (int n : prm.n_list) {
    const PacketSpec spec{prm.k, n, prm.i, prm.sign};
    const int block = spec.block();
    if (block > part.j_max()) {
      fail(ErrorKind::OutOfBand, "block " + std::to_string(block) + " exceeds j_max=" + std::to_string(part.j_max()));
    }
    const LocalizationResult res = measure_localization(packet_spectrum(spec, bump), block, part);
    const std::string id = detail::idx("n", n);
    r.measurements.push_back(at_most("identity_residual", id, res.residual, th.localization));
    r.measurements.push_back(at_most("off_block_leakage", id, res.leakage, th.localization));
    const double scale = std::ldexp(1.0, block);
    const bool contained = res.support_lo >= 33.0 / 24.0 * scale && res.support_hi <= 35.0 / 24.0 * scale;
    r.measurements.push_back(info("support_lo_over_2^kn", id, res.support_lo / scale));
    r.measurements.push_back(info("support_hi_over_2^kn", id, res.support_hi / scale));
    r.measurements.push_back(info("support_contained", id, contained ? 1.0 : 0.0));
    r.notes.push_back(id + ": support in [33/24, 35/24]*2^{kn} " + (contained ? "holds" : "does not hold"));
  }
  detail::attach_warnings(r, cap);
  return r;
}

// -------------------------------------------------------------- ch-lower-bound

struct ChLowerBoundParams {
  int k = 5;
  double sigma = 4.0;
  double p = 2.0;
  std::vector<int> n_list{1, 2};
};

inline ExperimentReport exp_ch_lower_bound(const Grid& grid, const ChLowerBoundParams& prm,
                                           const Thresholds& th = {}) {
  WarningCapture cap;
  detail::require_nonempty(prm.n_list, "n");
  check_exponent(prm.p);
  for (int n : prm.n_list) {
    if (n < 1) fail(ErrorKind::Precondition, "ch-lower-bound needs n >= 1");
  }
  const DyadicPartition part(grid);
  ExperimentReport r = detail::start_report("ch-lower-bound", "Lemma 3.2", grid, part);
  r.parameters["k"] = prm.k;
  r.parameters["sigma"] = prm.sigma;
  r.parameters["p"] = format_number(prm.p);
  r.parameters["n"] = prm.n_list;

  const int n_max = *std::max_element(prm.n_list.begin(), prm.n_list.end());
  const CHDataSpec data{prm.k, prm.sigma, n_max, prm.p};
  const BumpProfile bump = make_bump(grid);
  std::vector<RealField> packets;
  for (int n = 0; n <= n_max; ++n) packets.push_back(make_packet(PacketSpec{prm.k, n, std::nullopt, +1}, bump));
  const RealField u0 = make_ch_data(data, bump);
  const SpectralField u0sq = forward_transform(pointwise(u0, u0));
  const double u0sq_norm = detail::norm_p(u0sq, prm.p);

  std::vector<double> rs;
  for (int n : prm.n_list) {
    const int block = prm.k * n;
    if (block > part.j_max()) fail(ErrorKind::OutOfBand, "block k*n exceeds j_max");
    const SpectralField blk = part.apply(u0sq, block);
    const double rn = std::exp2(prm.sigma * block) * detail::norm_p(blk, prm.p);
    rs.push_back(rn);
    const std::string id = detail::idx("n", n);
    r.measurements.push_back(at_least("r_n", id, rn, th.c_star));

    // I1 = 2 c_0 c_n f_0 f_n, I2 = 2 sum_{0<i<n} c_i c_n f_i f_n.
    RealField i1 = pointwise(packets[0], packets[static_cast<std::size_t>(n)]);
    i1 *= 2.0 * data.coefficient(0) * data.coefficient(n);
    RealField i2(grid);
    for (int i = 1; i < n; ++i) {
      RealField term = pointwise(packets[static_cast<std::size_t>(i)], packets[static_cast<std::size_t>(n)]);
      term *= 2.0 * data.coefficient(i) * data.coefficient(n);
      i2 += term;
    }
    const double n1 = lp_norm(i1, prm.p);
    const double n2 = lp_norm(i2, prm.p);
    // Every other product misses block kn, so Delta_kn(u0^2) = Delta_kn(I1 + I2).
    const SpectralField i1_hat = forward_transform(i1);
    const SpectralField rest = blk - part.apply(i1_hat + forward_transform(i2), block);
    r.measurements.push_back(info("norm_I1", id, n1));
    r.measurements.push_back(info("norm_I2", id, n2));
    r.measurements.push_back(
        info("I1_outside_block", id, detail::norm_p(part.apply(i1_hat, block) - i1_hat, prm.p) / n1));
    // Relative to ||u0^2||: the product's rounding noise, not the tiny block, sets the floor.
    const double rest_norm = detail::norm_p(rest, prm.p);
    r.measurements.push_back(info("decomposition_residual_block", id, rest_norm / detail::norm_p(blk, prm.p)));
    r.measurements.push_back(
        at_most("decomposition_residual", id, rest_norm / u0sq_norm, th.decomposition));
    r.measurements.push_back(at_most("I2_over_I1", id, n2 / n1, std::exp2(-prm.k * prm.sigma) * th.i2_margin));
    r.measurements.push_back(at_most("I2_scaled", id, n2 * std::exp2(prm.k * (n + 1) * prm.sigma), th.i2_bound));
  }
  for (std::size_t a = 0; a + 1 < rs.size(); ++a) {
    r.measurements.push_back(within("r_ratio", detail::idx("n", prm.n_list[a + 1]), rs[a + 1] / rs[a],
                                    1.0 / th.stability, th.stability));
  }

  // Single-term datum: no cross term reaches block k, so the bound must fail.
  const RealField f0 = packets[0];
  const SpectralField f0sq = forward_transform(pointwise(f0, f0));
  const double control = std::exp2(prm.sigma * prm.k) * detail::norm_p(part.apply(f0sq, prm.k), prm.p);
  Measurement ctrl = at_least("control_r_single_term", "n=1", control, th.c_star);
  ctrl.expected_negative = true;
  r.measurements.push_back(ctrl);

  detail::mechanism_note(r, "n in " + detail::range_text(prm.n_list));
  detail::attach_warnings(r, cap);
  return r;
}

// --------------------------------------------------------- novikov-lower-bound

struct NovikovLowerBoundParams {
  double sigma = 4.0;
  std::vector<int> j_list{4, 5, 6, 7, 8};
};

struct DominationResult {
  double min_ratio_square = 0.0;  // (u0hat * u0hat) / (c (2+|xi|)^{-sigma-1/2})
  double min_ratio_cube = 0.0;    // (u0hat * u0hat * u0hat) / (c^2 (3+|xi|)^{-sigma-1/2})
  double ratio_at_zero = 0.0;     // (u0hat * u0hat)(0) / (c 2^{-sigma-1/2})
  double band_square = 0.0;
  double band_cube = 0.0;
};

// Convolutions are read off the products: u0hat * u0hat = 2 pi F(u0^2) and
// u0hat * u0hat * u0hat = (2 pi)^2 F(u0^3), with F(f)(xi_m) = L c_m(f).
inline DominationResult spectral_domination(const SpectralField& sq, const SpectralField& cube, double sigma) {
  const Grid& g = sq.grid();
  const double c = c_sigma(sigma);
  const double cutoff = dealias_cutoff(g, kCubicDealias);
  DominationResult out;
  out.band_square = cutoff - 1.0;
  out.band_cube = cutoff - 2.0;
  out.min_ratio_square = kInfinity;
  out.min_ratio_cube = kInfinity;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = std::abs(g.xi(i));
    if (xi <= out.band_square) {
      const double conv = two_pi * g.length() * sq[i].real();
      out.min_ratio_square = std::min(out.min_ratio_square, conv / (c * std::pow(2.0 + xi, -sigma - 0.5)));
    }
    if (xi <= out.band_cube) {
      const double conv = two_pi * two_pi * g.length() * cube[i].real();
      out.min_ratio_cube = std::min(out.min_ratio_cube, conv / (c * c * std::pow(3.0 + xi, -sigma - 0.5)));
    }
  }
  out.ratio_at_zero = two_pi * g.length() * sq[0].real() / (c * std::pow(2.0, -sigma - 0.5));
  return out;
}

inline ExperimentReport exp_novikov_lower_bound(const Grid& grid, const NovikovLowerBoundParams& prm,
                                                const Thresholds& th = {}) {
  WarningCapture cap;
  detail::require_nonempty(prm.j_list, "j");
  const DyadicPartition part(grid);
  for (int j : prm.j_list) {
    if (j < 0 || j > part.j_max() - 2) {
      fail(ErrorKind::Precondition,
           "j=" + std::to_string(j) + " outside [0, j_max-2] with j_max=" + std::to_string(part.j_max()));
    }
  }
  ExperimentReport r = detail::start_report("novikov-lower-bound", "Lemma 4.1", grid, part);
  r.parameters["sigma"] = prm.sigma;
  r.parameters["j"] = prm.j_list;
  r.parameters["c_sigma"] = c_sigma(prm.sigma);

  const RealField u0 = inverse_transform(novikov_datum(grid, prm.sigma));
  r.measurements.push_back(info("x_tail_fraction", "", tail_energy_fraction(u0)));
  const RealField sq = pointwise(u0, u0);
  const SpectralField f2 = dealias(forward_transform(sq), kCubicDealias);
  const SpectralField f3 = dealias(forward_transform(pointwise(sq, u0)), kCubicDealias);

  std::vector<double> rho;
  for (int j : prm.j_list) {
    const double v = detail::scaled_block(f3, j, prm.sigma, 2.0, part);
    rho.push_back(v);
    r.measurements.push_back(at_least("rho_j", detail::idx("j", j), v, th.c_star));
  }
  const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
  r.measurements.push_back(at_most("rho_variation", "", *hi / *lo, th.rho_variation));

  const DominationResult dom = spectral_domination(f2, f3, prm.sigma);
  r.measurements.push_back(at_least("domination_square_min_ratio", "", dom.min_ratio_square, 1.0));
  r.measurements.push_back(at_least("domination_cube_min_ratio", "", dom.min_ratio_cube, 1.0));
  r.measurements.push_back(at_least("domination_square_at_zero", "", dom.ratio_at_zero, 1.0));
  r.notes.push_back("domination checked on |xi| <= " + format_number(dom.band_square) + " (square) and |xi| <= " +
                    format_number(dom.band_cube) + " (cube)");
  detail::mechanism_note(r, "j in " + detail::range_text(prm.j_list));
  detail::attach_warnings(r, cap);
  return r;
}

// ------------------------------------------------------------------- remainder

struct RemainderParams {
  ModelKind model = CamassaHolm{};
  double sigma = 4.0;
  double p = 2.0;
  int k = 5;
  int n_max = 2;
  std::vector<double> t_list{1e-5, 1e-4, 1e-3};
  double cfl_safety = 0.3;
};

inline SpectralField model_datum(const Grid& grid, const ModelKind& model, int k, double sigma, int n_max,
                                 double p) {
  if (is_cubic(model)) {
    if (p != 2.0) fail(ErrorKind::Precondition, "the Novikov datum is only set up for p = 2");
    return novikov_datum(grid, sigma);
  }
  return ch_datum(grid, k, sigma, n_max, p);
}

inline void check_time_list(const std::vector<double>& ts) {
  if (ts.size() < 2) fail(ErrorKind::Configuration, "t_list needs at least two times");
  for (double t : ts) {
    if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorKind::Configuration, "t_list entries must be positive");
  }
  const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
  if (*hi / *lo < 100.0 * (1.0 - 1e-12)) fail(ErrorKind::Configuration, "t_list must span at least two decades");
}

inline ExperimentReport exp_remainder_scaling(const Grid& grid, const RemainderParams& prm,
                                              const Thresholds& th = {}) {
  WarningCapture cap;
  check_time_list(prm.t_list);
  check_exponent(prm.p);
  const DyadicPartition part(grid);
  const bool cubic = is_cubic(prm.model);
  ExperimentReport r =
      detail::start_report("remainder", cubic ? "Proposition 4.1" : "Proposition 3.2", grid, part);
  r.parameters["model"] = model_name(prm.model);
  r.parameters["sigma"] = prm.sigma;
  r.parameters["p"] = format_number(prm.p);
  r.parameters["t"] = prm.t_list;
  r.parameters["cfl_safety"] = prm.cfl_safety;
  if (!cubic) {
    r.parameters["k"] = prm.k;
    r.parameters["n_max"] = prm.n_max;
  }

  const SpectralField u0 = model_datum(grid, prm.model, prm.k, prm.sigma, prm.n_max, prm.p);
  EvolutionConfig cfg;
  cfg.dt_policy = CflStep{prm.cfl_safety};
  cfg.t_end = *std::max_element(prm.t_list.begin(), prm.t_list.end());
  const SpectralField v0 = tendency(u0, prm.model, cfg.dealias_for(prm.model));

  const double offsets[3] = {-3.0, -2.0, -1.0};
  std::vector<double> w_norm;
  std::vector<std::vector<double>> first(3);
  for (double t : prm.t_list) {
    const SpectralField delta = solve_increment(u0, t, prm.model, cfg);
    SpectralField w = delta;
    w.add_scaled(-t, v0);
    const std::string id = detail::idx("t", t);
    w_norm.push_back(detail::besov_inf(w, prm.sigma - 2.0, prm.p, part));
    r.measurements.push_back(info("remainder_norm_Bsigma-2", id, w_norm.back()));
    for (int a = 0; a < 3; ++a) {
      first[a].push_back(detail::besov_inf(delta, prm.sigma + offsets[a], prm.p, part));
      r.measurements.push_back(
          info("first_difference_norm_Bsigma" + format_number(offsets[a]), id, first[a].back()));
    }
  }
  r.measurements.push_back(within("remainder_slope", "", fit_loglog_slope(prm.t_list, w_norm),
                                  2.0 - th.remainder_window, 2.0 + th.remainder_window));
  for (int a = 0; a < 3; ++a) {
    r.measurements.push_back(within("first_difference_slope_Bsigma" + format_number(offsets[a]), "",
                                    fit_loglog_slope(prm.t_list, first[a]), 1.0 - th.first_window,
                                    1.0 + th.first_window));
  }
  detail::attach_warnings(r, cap);
  return r;
}

// --------------------------------------------------------------- discontinuity

struct DiscontinuityParams {
  ModelKind model = CamassaHolm{};
  int k = 5;
  std::vector<int> n_list{1, 2};
  std::vector<int> j_list{6, 8};  // Novikov
  double epsilon = 0.05;
  double sigma = 4.0;
  double p = 2.0;
  double cfl_safety = 0.3;
};

inline ExperimentReport exp_discontinuity(const Grid& grid, const DiscontinuityParams& prm,
                                          const Thresholds& th = {}) {
  WarningCapture cap;
  if (!(prm.epsilon >= 0.0) || !std::isfinite(prm.epsilon)) {
    fail(ErrorKind::InvalidParameter, "epsilon must be >= 0");
  }
  check_exponent(prm.p);
  const bool cubic = is_cubic(prm.model);
  const std::vector<int>& samples = cubic ? prm.j_list : prm.n_list;
  detail::require_nonempty(samples, cubic ? "j" : "n");
  const DyadicPartition part(grid);
  ExperimentReport r = detail::start_report("discontinuity", cubic ? "Theorem 1.2" : "Theorem 1.1", grid, part);
  r.parameters["model"] = model_name(prm.model);
  r.parameters["epsilon"] = prm.epsilon;
  r.parameters["sigma"] = prm.sigma;
  r.parameters["p"] = format_number(prm.p);
  r.parameters["cfl_safety"] = prm.cfl_safety;
  if (cubic) {
    r.parameters["j"] = prm.j_list;
  } else {
    r.parameters["k"] = prm.k;
    r.parameters["n"] = prm.n_list;
  }

  std::vector<int> blocks;
  for (int s : samples) {
    const int b = cubic ? s : prm.k * s;
    if (b < 0 || b > part.j_max()) fail(ErrorKind::OutOfBand, "sampled block exceeds j_max");
    blocks.push_back(b);
  }
  const int n_max = cubic ? 0 : *std::max_element(prm.n_list.begin(), prm.n_list.end());
  const SpectralField u0 = model_datum(grid, prm.model, prm.k, prm.sigma, n_max, prm.p);

  std::vector<double> ts;
  for (int b : blocks) ts.push_back(prm.epsilon * std::ldexp(1.0, -b));
  EvolutionConfig cfg;
  cfg.dt_policy = CflStep{prm.cfl_safety};
  cfg.t_end = *std::max_element(ts.begin(), ts.end());

  const char* label = cubic ? "j" : "n";
  std::vector<double> d;
  for (std::size_t a = 0; a < samples.size(); ++a) {
    const SpectralField delta = solve_increment(u0, ts[a], prm.model, cfg);
    const std::string id = detail::idx(label, samples[a]);
    d.push_back(detail::scaled_block(delta, blocks[a], prm.sigma, prm.p, part));
    r.measurements.push_back(info("t", id, ts[a]));
    r.measurements.push_back(info("D", id, d.back()));
    r.measurements.push_back(info("full_besov_norm", id, detail::besov_inf(delta, prm.sigma, prm.p, part)));
  }
  const double c1 = *std::min_element(d.begin(), d.end()) / prm.epsilon;
  r.measurements.push_back(at_least("c1", "", prm.epsilon > 0.0 ? c1 : 0.0, th.c1));
  for (std::size_t a = 0; a + 1 < d.size(); ++a) {
    r.measurements.push_back(
        at_least("non_decay_ratio", detail::idx(label, samples[a + 1]), d[a + 1] / d[a], th.non_decay));
  }

  if (prm.epsilon == 0.0) {
    r.degenerate = true;
    r.notes.push_back("epsilon = 0 gives t = 0 and D = 0; the lower bound is vacuous");
  } else {
    // Low-frequency control: single packet f_0, D should vanish linearly in t.
    const SpectralField f0 = packet_spectrum(PacketSpec{prm.k, 0, std::nullopt, +1}, make_bump(grid));
    const double t_top = cfg.t_end;
    const std::vector<double> ct{t_top / 100.0, t_top / 10.0, t_top};
    std::vector<double> cd;
    for (double t : ct) {
      cd.push_back(detail::besov_inf(solve_increment(f0, t, prm.model, cfg), prm.sigma, prm.p, part));
      r.measurements.push_back(info("control_D", detail::idx("t", t), cd.back()));
    }
    r.measurements.push_back(within("control_slope", "", fit_loglog_slope(ct, cd), 1.0 - th.first_window,
                                    1.0 + th.first_window));
  }
  r.notes.push_back("D is the block lower bound 2^{b sigma}||Delta_b(S_t u0 - u0)||_{L^p}; "
                    "full_besov_norm is the complete B^sigma_{p,inf} value");
  detail::mechanism_note(r, std::string(label) + " in " + detail::range_text(samples));
  detail::attach_warnings(r, cap);
  return r;
}

// ---------------------------------------------------------------- conservation

struct ConservationParams {
  ModelKind model = CamassaHolm{};
  double t_end = 0.01;
  int k = 5;
  int n_max = 2;
  double sigma = 4.0;
  double cfl_safety = 0.3;
  std::size_t probe_n = std::size_t{1} << 14;
};

inline constexpr double kProbeTime = 0.01;

inline double relative_drift(double now, double start, double scale) {
  return scale == 0.0 ? std::abs(now - start) : std::abs(now - start) / scale;
}

// Quadratic invariant in spectral form: H1 = L sum (1+xi^2)|c|^2 for CH, b = 2 and
// Novikov; int m v = L sum (1+xi^2)/(4+xi^2)|c|^2 with v = (4 - d_x^2)^{-1} u for b = 3.
inline std::optional<double> quadratic_invariant(const SpectralField& u, const ModelKind& model) {
  if (const auto* bf = std::get_if<BFamily>(&model)) {
    if (bf->b == 2.0) return h1_energy(u);
    if (bf->b != 3.0) return std::nullopt;
    const Grid& g = u.grid();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double xi2 = g.xi(i) * g.xi(i);
      sum += (1.0 + xi2) / (4.0 + xi2) * std::norm(u[i]);
    }
    return g.length() * sum;
  }
  return h1_energy(u);
}

inline ExperimentReport exp_conservation(const Grid& grid, const ConservationParams& prm,
                                         const Thresholds& th = {}) {
  WarningCapture cap;
  if (!(prm.t_end >= 0.0)) fail(ErrorKind::InvalidParameter, "t_end must be >= 0");
  const DyadicPartition part(grid);
  ExperimentReport r = detail::start_report("conservation", "Section 1 (conservation laws)", grid, part);
  r.parameters["model"] = model_name(prm.model);
  r.parameters["t_end"] = prm.t_end;
  r.parameters["sigma"] = prm.sigma;
  r.parameters["cfl_safety"] = prm.cfl_safety;
  r.parameters["probe_n"] = prm.probe_n;

  const bool cubic = is_cubic(prm.model);
  const bool keeps_h1 = !std::holds_alternative<BFamily>(prm.model);
  const SpectralField u0 = model_datum(grid, prm.model, prm.k, prm.sigma, prm.n_max, 2.0);
  EvolutionConfig cfg;
  cfg.dt_policy = CflStep{prm.cfl_safety};
  cfg.t_end = prm.t_end;
  const SpectralField u1 = u0 + solve_increment(u0, prm.t_end, prm.model, cfg);

  if (keeps_h1) {
    const double e0 = h1_energy(u0);
    r.measurements.push_back(at_most("h1_drift", "", relative_drift(h1_energy(u1), e0, e0), th.h1_drift));
  }
  if (!keeps_h1) {
    if (const auto q0 = quadratic_invariant(u0, prm.model)) {
      r.measurements.push_back(
          info("quadratic_invariant_drift", "", relative_drift(*quadratic_invariant(u1, prm.model), *q0, *q0)));
    }
  }
  if (!cubic) {
    r.measurements.push_back(at_most("momentum_drift", "",
                                     relative_drift(momentum_mean(u1), momentum_mean(u0), momentum_l1(u0)),
                                     th.momentum_drift));
  }

  if (prm.t_end == 0.0) {
    r.notes.push_back("t_end = 0: dt refinement skipped");
  } else {
    // Order check on an amplified datum where the drift clears roundoff.
    const Grid coarse(grid.length(), prm.probe_n);
    const SpectralField probe =
        cubic ? 20.0 * novikov_datum(coarse, prm.sigma) : 30.0 * ch_datum(coarse, prm.k, prm.sigma, 1);
    auto run = [&](int steps) {
      EvolutionConfig c;
      c.dt_policy = FixedStep{kProbeTime / steps};
      c.t_end = kProbeTime;
      return probe + solve_increment(probe, kProbeTime, prm.model, c);
    };
    double coarse_err = 0.0;
    double fine_err = 0.0;
    if (const auto e0 = quadratic_invariant(probe, prm.model)) {
      coarse_err = relative_drift(*quadratic_invariant(run(2), prm.model), *e0, *e0);
      fine_err = relative_drift(*quadratic_invariant(run(4), prm.model), *e0, *e0);
      r.notes.push_back("refinement: quadratic invariant drift of the amplified probe datum, 2 vs 4 fixed steps");
    } else {
      // int m is preserved to roundoff at any dt and no quadratic invariant is
      // known for this b; use the solution error instead.
      const SpectralField ref = run(32);
      coarse_err = l2_norm(run(2) - ref);
      fine_err = l2_norm(run(4) - ref);
      r.notes.push_back("refinement: L2 error of the amplified probe datum against 32 steps, 2 vs 4 fixed steps");
    }
    r.measurements.push_back(info("probe_error_dt", "steps=2", coarse_err));
    r.measurements.push_back(info("probe_error_dt/2", "steps=4", fine_err));
    r.measurements.push_back(at_least("refinement_ratio", "", coarse_err / fine_err, th.refinement));
  }
  detail::attach_warnings(r, cap);
  return r;
}

// --------------------------------------------------------------------- catalog

struct CatalogEntry {
  std::string name;
  std::string tag;
  std::string summary;
  nlohmann::json defaults;
};

inline std::vector<CatalogEntry> experiment_catalog() {
  return {
      {"localization", "Lemma 3.1", "packet f^k_n / g^k_{i,n} lies in the single block kn",
       {{"k", 5}, {"n", {2}}, {"i", nullptr}, {"sign", 1}}},
      {"ch-lower-bound", "Lemma 3.2", "||Delta_kn(u0^2)||_{L^p} 2^{kn sigma} bounded below; I1/I2 splitting",
       {{"k", 5}, {"sigma", 4.0}, {"p", "2"}, {"n", {1, 2}}}},
      {"novikov-lower-bound", "Lemma 4.1", "||Delta_j(u0^3)||_{L^2} 2^{sigma j} bounded below; spectral domination",
       {{"sigma", 4.0}, {"j", {4, 5, 6, 7, 8}}}},
      {"remainder", "Proposition 3.2 / 4.1", "remainder w(t) of order t^2 in B^{sigma-2}; first differences of order t",
       {{"model", "ch"}, {"sigma", 4.0}, {"p", "2"}, {"t", {1e-5, 1e-4, 1e-3}}}},
      {"discontinuity", "Theorem 1.1 / 1.2", "D_n = ||S_{t_n}u0 - u0||_{B^sigma} >= c1 eps at t_n = eps 2^{-kn}",
       {{"model", "ch"}, {"k", 5}, {"n", {1, 2}}, {"j", {6, 8}}, {"epsilon", 0.05}, {"sigma", 4.0}}},
      {"conservation", "Section 1 (conservation laws)", "H1 and int(u - u_xx) drift; order-4 dt refinement",
       {{"model", "ch"}, {"t_end", 0.01}}},
  };
}

}  // namespace besovlab
