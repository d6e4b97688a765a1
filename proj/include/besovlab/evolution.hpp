#pragma once

// Classical RK4 realization of the solution map S_t, the linear predictor
// v0 = du/dt at t = 0 and the remainder w(t) = S_t(u0) - u0 - t v0.
//
// The increment S_t(u0) - u0 is accumulated separately from u0, so small
// differences are not formed by cancelling two O(1) fields.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "besovlab/io.hpp"
#include "besovlab/pde_models.hpp"
#include "besovlab/spectral.hpp"

namespace besovlab {

struct FixedStep {
  double dt = 1e-3;
};
struct CflStep {
  double safety = 0.3;
};
using StepPolicy = std::variant<FixedStep, CflStep>;

struct EvolutionConfig {
  StepPolicy dt_policy = CflStep{};
  double t_end = 1.0;
  double quadratic_dealias = kQuadraticDealias;
  double cubic_dealias = kCubicDealias;
  std::size_t max_steps = 1'000'000;
  double blowup_growth = 10.0;  // max|u| growth factor treated as blow-up

  void validate() const {
    if (!(t_end >= 0.0)) fail(ErrorKind::InvalidParameter, "t_end must be >= 0");
    if (const auto* f = std::get_if<FixedStep>(&dt_policy); f && !(f->dt > 0.0)) {
      fail(ErrorKind::InvalidParameter, "fixed dt must be positive");
    }
    if (const auto* c = std::get_if<CflStep>(&dt_policy); c && !(c->safety > 0.0 && c->safety <= 1.0)) {
      fail(ErrorKind::InvalidParameter, "CFL safety must lie in (0, 1]");
    }
    if (max_steps == 0) fail(ErrorKind::InvalidParameter, "max_steps must be positive");
    if (!(blowup_growth > 0.0)) fail(ErrorKind::InvalidParameter, "blow-up growth factor must be positive");
  }

  double dealias_for(const ModelKind& model) const { return is_cubic(model) ? cubic_dealias : quadratic_dealias; }
};

struct Diagnostics {
  double h1 = 0.0;         // int u^2 + u_x^2
  double mean_m = 0.0;     // int (u - u_xx)
  double max_abs_u = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  RealField field;
  Diagnostics diagnostics;
};

inline double h1_energy(const SpectralField& u) {
  const Grid& g = u.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi = g.xi(i);
    sum += std::norm(u[i]) * (1.0 + xi * xi);
  }
  return g.length() * sum;
}

inline double momentum_mean(const SpectralField& u) { return u.grid().length() * u[0].real(); }

// int |u - u_xx| dx, the scale for the drift of int (u - u_xx) dx.
inline double momentum_l1(const SpectralField& u) { return lp_norm(inverse_transform(helmholtz(u)), 1.0); }

inline Diagnostics diagnostics(const SpectralField& u) {
  return {h1_energy(u), momentum_mean(u), inverse_transform(u).max_abs()};
}

inline double advective_speed(double max_abs_u, const ModelKind& model) {
  return is_cubic(model) ? max_abs_u * max_abs_u : max_abs_u;
}

inline double cfl_number(double dt, double speed, double dx) { return std::abs(dt) * speed / dx; }

namespace detail {

// Stage tendency; non-finite products inside a stage mean the step blew up.
inline SpectralField stage_tendency(const SpectralField& u, const ModelKind& model, double fraction) {
  try {
    return tendency(u, model, fraction);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidField || e.kind() == ErrorKind::Asymmetry) {
      fail(ErrorKind::BlowUp, std::string("non-finite values inside an RK4 stage (") + e.what() + ")");
    }
    throw;
  }
}

// delta + RK4 increment of du/dt = T(base + delta) over dt.
inline SpectralField rk4_increment(const SpectralField& base, const SpectralField& delta, double dt,
                                   const ModelKind& model, double fraction) {
  const SpectralField u = base + delta;
  const SpectralField k1 = stage_tendency(u, model, fraction);
  SpectralField stage = u;
  stage.add_scaled(0.5 * dt, k1);
  const SpectralField k2 = stage_tendency(stage, model, fraction);
  stage = u;
  stage.add_scaled(0.5 * dt, k2);
  const SpectralField k3 = stage_tendency(stage, model, fraction);
  stage = u;
  stage.add_scaled(dt, k3);
  const SpectralField k4 = stage_tendency(stage, model, fraction);

  SpectralField out = delta;
  const double w = dt / 6.0;
  out.add_scaled(w, k1).add_scaled(2.0 * w, k2).add_scaled(2.0 * w, k3).add_scaled(w, k4);
  return out;
}

inline bool finite_spectrum(const SpectralField& u) {
  for (const auto& c : u.coeffs()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  }
  return true;
}

}  // namespace detail

// One RK4 step (dt may be negative for a backward step). Rejects steps whose
// CFL number |dt| speed / dx exceeds cfl_limit.
inline SpectralField step_rk4(const SpectralField& u, double dt, const ModelKind& model, double fraction,
                              double cfl_limit = 1.0) {
  if (!(std::isfinite(dt)) || dt == 0.0) fail(ErrorKind::InvalidParameter, "step size must be finite and nonzero");
  const double speed = advective_speed(inverse_transform(u).max_abs(), model);
  const double cfl = cfl_number(dt, speed, u.grid().dx());
  if (cfl > cfl_limit) {
    fail(ErrorKind::CflViolation, "CFL number " + short_number(cfl) + " exceeds " + short_number(cfl_limit));
  }
  SpectralField out = u + detail::rk4_increment(u, SpectralField(u.grid()), dt, model, fraction);
  if (!detail::finite_spectrum(out)) fail(ErrorKind::BlowUp, "non-finite values after one step");
  return out;
}

inline SpectralField step_rk4(const SpectralField& u, double dt, const ModelKind& model) {
  return step_rk4(u, dt, model, default_dealias_fraction(model));
}

inline RealField step_rk4(const RealField& u, double dt, const ModelKind& model, double cfl_limit = 1.0) {
  return inverse_transform(
      step_rk4(forward_transform(u), dt, model, default_dealias_fraction(model), cfl_limit));
}

using Observer = std::function<void(double t, const SpectralField& u)>;

// S_t(u0) - u0. The final step is shortened to land exactly on t.
inline SpectralField solve_increment(const SpectralField& u0, double t, const ModelKind& model,
                                     const EvolutionConfig& cfg, const Observer& observe = {}) {
  cfg.validate();
  if (!(t >= 0.0)) fail(ErrorKind::InvalidParameter, "evolution time must be >= 0");
  if (t > cfg.t_end) {
    fail(ErrorKind::InvalidParameter, "requested time exceeds the configured t_end");
  }
  const Grid& g = u0.grid();
  const double fraction = cfg.dealias_for(model);
  const double initial_max = inverse_transform(u0).max_abs();
  SpectralField delta(g);
  if (observe) observe(0.0, u0);
  if (t == 0.0) return delta;

  double time = 0.0;
  double current_max = initial_max;
  std::size_t steps = 0;
  while (time < t) {
    const double remaining = t - time;
    const double speed = advective_speed(current_max, model);
    double dt = remaining;
    double limit = 1.0;
    if (const auto* fixed = std::get_if<FixedStep>(&cfg.dt_policy)) {
      dt = fixed->dt;
    } else {
      const double safety = std::get<CflStep>(cfg.dt_policy).safety;
      limit = safety;
      if (speed > 0.0) dt = safety * g.dx() / speed;
    }
    const bool last = dt >= remaining * (1.0 - 1e-12);
    if (last) dt = remaining;
    const double cfl = cfl_number(dt, speed, g.dx());
    if (cfl > limit * (1.0 + 1e-12)) {
      fail(ErrorKind::CflViolation, "CFL number " + short_number(cfl) + " exceeds " + short_number(limit) +
                                        " at t=" + short_number(time));
    }
    if (++steps > cfg.max_steps) {
      fail(ErrorKind::MaxSteps, "exceeded " + std::to_string(cfg.max_steps) + " steps at t=" +
                                    short_number(time));
    }
    delta = detail::rk4_increment(u0, delta, dt, model, fraction);
    time = last ? t : time + dt;

    const SpectralField u = u0 + delta;
    if (!detail::finite_spectrum(u)) {
      fail(ErrorKind::BlowUp, "non-finite values, reached t=" + short_number(time));
    }
    current_max = inverse_transform(u).max_abs();
    if (initial_max > 0.0 && current_max > cfg.blowup_growth * initial_max) {
      fail(ErrorKind::BlowUp, "max|u| grew by more than x" + short_number(cfg.blowup_growth) +
                                  ", reached t=" + short_number(time));
    }
    if (observe) observe(time, u);
  }
  return delta;
}

inline SpectralField solve(const SpectralField& u0, double t, const ModelKind& model, const EvolutionConfig& cfg) {
  return u0 + solve_increment(u0, t, model, cfg);
}

inline RealField solve(const RealField& u0, double t, const ModelKind& model, const EvolutionConfig& cfg) {
  if (t == 0.0) return u0;
  return inverse_transform(solve(forward_transform(u0), t, model, cfg));
}

inline SpectralField linear_predictor(const SpectralField& u0, const ModelKind& model) {
  return tendency(u0, model);
}

inline RealField linear_predictor(const RealField& u0, const ModelKind& model) { return tendency(u0, model); }

// Uses the same dealias fraction as the evolution so that t v0 is the first
// RK4 stage exactly.
inline SpectralField remainder(const SpectralField& u0, double t, const ModelKind& model,
                               const EvolutionConfig& cfg) {
  SpectralField w = solve_increment(u0, t, model, cfg);
  if (t == 0.0) return w;
  w.add_scaled(-t, tendency(u0, model, cfg.dealias_for(model)));
  return w;
}

inline RealField remainder(const RealField& u0, double t, const ModelKind& model, const EvolutionConfig& cfg) {
  return inverse_transform(remainder(forward_transform(u0), t, model, cfg));
}

inline std::vector<TrajectorySample> trajectory(const SpectralField& u0, double t, const ModelKind& model,
                                                const EvolutionConfig& cfg) {
  std::vector<TrajectorySample> out;
  solve_increment(u0, t, model, cfg, [&](double time, const SpectralField& u) {
    out.push_back({time, inverse_transform(u), diagnostics(u)});
  });
  return out;
}

inline std::string trajectory_csv(const std::vector<TrajectorySample>& samples) {
  std::ostringstream os;
  os.precision(17);
  os << "t,h1,mean_m,max_abs_u\n";
  for (const auto& s : samples) {
    os << s.t << ',' << s.diagnostics.h1 << ',' << s.diagnostics.mean_m << ',' << s.diagnostics.max_abs_u << '\n';
  }
  return os.str();
}

inline void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectorySample>& samples) {
  write_file_atomic(path, trajectory_csv(samples));
}

}  // namespace besovlab
