#include "solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "errors.hpp"
#include "profiles.hpp"

namespace socsim {

namespace {

// Euclidean norm with power-of-two prescaling: exact for well-scaled input
// and accurate (no squared underflow/overflow) for extreme magnitudes.
// Non-finite entries propagate instead of vanishing.
double vec_norm2(std::span<const double> v) {
  double mx = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;
    mx = std::max(mx, std::abs(x));
  }
  if (mx == 0.0) return 0.0;
  if (std::isinf(mx)) return mx;
  const int e = std::ilogb(mx);
  double s = 0.0;
  for (double x : v) {
    const double y = std::ldexp(x, -e);
    s += y * y;
  }
  return std::ldexp(std::sqrt(s), e);
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_zero(std::span<const double> v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

// Solves the implicit drift system
//   a .* u - dt * Lap(psi_lambda(u) + lambda * u) = rhs
// in the flux variable v = psi_lambda(u) + lambda*u. The map u -> v is
// strictly increasing (slope between lambda and 1/lambda + lambda), so u =
// g(v) with g piecewise linear, and the system becomes the gradient of the
// strongly convex piecewise-quadratic functional
//   Phi(v) = sum_i a_i*G(v_i) - rhs.v + (dt/2) v.(-Lap v),   G' = g.
// Newton directions come from the SPD system
//   (diag(a .* g'(v)) - dt*Lap) delta = -grad Phi,
// and a backtracking line search on Phi is globally convergent: no kink of
// the flux map can trap it, unlike a search on the residual norm. Once the
// active pattern settles the next full step lands on the solution exactly.
Field newton_drift_solve(const Grid& g, const Regularization& reg,
                         std::span<const double> a, std::span<const double> rhs,
                         double dt, const SolverOptions& opt,
                         StepDiagnostics& diag) {
  const int sz = g.size();
  const double scale = vec_norm2(rhs);
  if (scale == 0.0) return Field(sz, 0.0);
  const double tol = opt.newton_tol * scale;

  const double lam = reg.lambda;
  const double vk = 1.0 + lam * lam;  // flux value at the ramp corner |u|=lambda
  const double slope_core = lam / vk;
  auto g_of = [&](double v) {
    const double m = std::abs(v);
    const double u = (m <= vk) ? slope_core * m : (m - 1.0) / lam;
    return v < 0.0 ? -u : u;
  };
  auto gprime = [&](double v) {
    return (std::abs(v) <= vk) ? slope_core : 1.0 / lam;
  };
  // Antiderivative of g with G(0) = 0 (even function).
  auto g_anti = [&](double v) {
    const double m = std::abs(v);
    if (m <= vk) return 0.5 * slope_core * m * m;
    return 0.5 * lam * vk + ((m - 1.0) * (m - 1.0) - lam * lam * lam * lam) /
                                (2.0 * lam);
  };

  Field v(sz), u(sz), lap(sz), grad(sz), hdiag(sz), trial(sz), gtrial(sz);
  for (int i = 0; i < sz; ++i) {
    const double u0 = rhs[i] / a[i];
    v[i] = psi_lambda(u0, reg) + lam * u0;
  }

  // grad Phi(v) = a .* g(v) - dt*Lap(v) - rhs; Phi is evaluated alongside
  // since both need the same Laplacian.
  auto eval = [&](const Field& vv, Field& grad_out, double& phi_out) {
    laplacian_apply(g, vv, lap);
    double phi = 0.0;
    for (int i = 0; i < sz; ++i) {
      grad_out[i] = a[i] * g_of(vv[i]) - dt * lap[i] - rhs[i];
      phi += a[i] * g_anti(vv[i]) - rhs[i] * vv[i] - 0.5 * dt * lap[i] * vv[i];
    }
    phi_out = phi;
  };

  double phi = 0.0;
  eval(v, grad, phi);
  double res = vec_norm2(grad);
  // Inexact-Newton floor: the inner CG stops at a relative tolerance of its
  // own, so the outer gradient cannot be pushed arbitrarily far below it.
  // Where no descent is achievable anymore, a residual within the slack
  // band of the target is accepted as converged.
  const double band = tol * opt.newton_stall_slack;
  for (int iter = 1; iter <= opt.newton_max_iter; ++iter) {
    if (res <= tol) {
      diag.newton_iters = iter - 1;
      diag.residual = res;
      for (int i = 0; i < sz; ++i) u[i] = g_of(v[i]);
      return u;
    }
    for (int i = 0; i < sz; ++i) {
      hdiag[i] = a[i] * gprime(v[i]);
      grad[i] = -grad[i];
    }
    ShiftedSolveStats stats{};
    Field delta = solve_shifted(g, dt, hdiag, grad, &stats);
    diag.cg_iters += stats.iterations;
    double slope = 0.0;  // directional derivative grad.delta = -delta.H.delta
    for (int i = 0; i < sz; ++i) slope -= grad[i] * delta[i];

    double step = 1.0;
    double phi_new = 0.0;
    double res_new = 0.0;
    // When the predicted decrease is below the resolution of Phi (rounding
    // near the optimum, or Phi underflowing for near-extinct states), the
    // Armijo test is blind and would accept no-progress micro-steps. Switch
    // to the full Newton step under strict gradient decrease instead.
    const bool phi_blind = !(phi + 1e-4 * slope < phi);
    bool no_descent = false;
    if (phi_blind) {
      for (int i = 0; i < sz; ++i) trial[i] = v[i] + delta[i];
      eval(trial, gtrial, phi_new);
      res_new = vec_norm2(gtrial);
      no_descent = !(std::isfinite(res_new) && res_new < res);
    } else {
      for (;;) {
        for (int i = 0; i < sz; ++i) trial[i] = v[i] + step * delta[i];
        eval(trial, gtrial, phi_new);
        res_new = vec_norm2(gtrial);
        if (std::isfinite(phi_new) && phi_new <= phi + 1e-4 * step * slope)
          break;
        step *= 0.5;
        if (step < 1e-12) {
          // Phi is formally decreasing but the search cannot find a usable
          // step; fall back to the full step if it reduces the gradient.
          for (int i = 0; i < sz; ++i) trial[i] = v[i] + delta[i];
          eval(trial, gtrial, phi_new);
          res_new = vec_norm2(gtrial);
          no_descent = !(std::isfinite(res_new) && res_new < res);
          break;
        }
      }
    }
    if (no_descent) {
      if (res <= band) {
        diag.newton_iters = iter;
        diag.residual = res;
        for (int i = 0; i < sz; ++i) u[i] = g_of(v[i]);
        return u;
      }
      throw NumericalError(
          "implicit drift solve: line search found no descent at relative "
          "residual " +
              std::to_string(res / scale),
          res / scale);
    }
    v.swap(trial);
    grad.swap(gtrial);
    phi = phi_new;
    res = res_new;
    diag.newton_iters = iter;
  }
  if (res <= band) {
    diag.residual = res;
    for (int i = 0; i < sz; ++i) u[i] = g_of(v[i]);
    return u;
  }
  throw NumericalError(
      "implicit drift solve: Newton stalled at relative residual " +
          std::to_string(res / scale) + " after " +
          std::to_string(opt.newton_max_iter) + " iterations",
      res / scale);
}

// Positivity floor + denormal flush; records the pre-floor minimum and the
// removed mass.
void apply_floor(const Grid& g, Field& u, const SolverOptions& opt,
                 StepDiagnostics& diag) {
  double mn = 0.0;
  double clamped = 0.0;
  for (double& v : u) {
    mn = std::min(mn, v);
    if (opt.clamp_negative && v < 0.0) {
      clamped -= v;
      v = 0.0;
    } else if (v != 0.0 && std::abs(v) < opt.snap_threshold) {
      v = 0.0;
    }
  }
  diag.pre_clamp_min = mn;
  diag.clamped_mass = clamped * g.cell_volume;
}

}  // namespace

StepDiagnostics step_direct(const Grid& g, const Regularization& reg,
                            const NoiseModel& model, Field& x, double dt,
                            std::span<const double> increments,
                            const SolverOptions& opt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_direct: dt must be > 0");
  if (static_cast<int>(increments.size()) != model.modes())
    throw std::invalid_argument("step_direct: one increment per noise mode");

  StepDiagnostics diag;
  const int sz = g.size();

  // Left-point (Ito) multiplicative noise enters through the right-hand side.
  Field rhs = x;
  for (int k = 0; k < model.modes(); ++k) {
    const double c = model.mu[k] * increments[k];
    const Field& e = model.shapes[k].values;
    for (int i = 0; i < sz; ++i) rhs[i] += c * e[i] * x[i];
  }
  if (!all_finite(rhs))
    throw NumericalError("step_direct: state is not finite");

  const Field a(sz, 1.0);
  Field u = newton_drift_solve(g, reg, a, rhs, dt, opt, diag);
  if (!all_finite(u))
    throw NumericalError("step_direct: solution is not finite");
  apply_floor(g, u, opt, diag);
  x.swap(u);
  return diag;
}

StepDiagnostics step_transformed(const Grid& g, const Regularization& reg,
                                 const NoiseModel& model,
                                 std::span<const double> damping, Field& y,
                                 double dt, std::span<const double> beta_left,
                                 const SolverOptions& opt) {
  if (!(dt > 0.0))
    throw std::invalid_argument("step_transformed: dt must be > 0");
  if (static_cast<int>(damping.size()) != g.size())
    throw std::invalid_argument("step_transformed: damping field size mismatch");

  StepDiagnostics diag;
  const int sz = g.size();

  const Field mu_n = mu_field(model, beta_left);
  Field a(sz), b(sz);
  for (int i = 0; i < sz; ++i) {
    a[i] = 1.0 + 0.5 * dt * damping[i];
    b[i] = std::exp(-mu_n[i]) * y[i];
  }
  if (!all_finite(b))
    throw NumericalError("step_transformed: state is not finite");

  Field z;
  if (opt.diffusion_enabled) {
    z = newton_drift_solve(g, reg, a, b, dt, opt, diag);
  } else {
    z.resize(sz);
    for (int i = 0; i < sz; ++i) z[i] = b[i] / a[i];
  }
  if (!all_finite(z))
    throw NumericalError("step_transformed: solution is not finite");

  // In the frozen frame z is the plain-scheme state; the positivity floor and
  // its bookkeeping act there.
  apply_floor(g, z, opt, diag);
  for (int i = 0; i < sz; ++i) y[i] = std::exp(mu_n[i]) * z[i];
  return diag;
}

Field shift_to_origin(std::span<const double> x_raw,
                      std::span<const double> xc) {
  if (x_raw.size() != xc.size())
    throw std::invalid_argument("shift_to_origin: size mismatch");
  Field out(x_raw.size());
  for (size_t i = 0; i < x_raw.size(); ++i) {
    if (x_raw[i] < xc[i])
      throw std::invalid_argument(
          "initial datum below the critical state at grid index " +
          std::to_string(i));
    out[i] = x_raw[i] - xc[i];
  }
  return out;
}

Problem build_problem(const RunConfig& cfg) {
  Problem p;
  p.grid = build_grid(cfg.dim, cfg.extent, cfg.n);
  p.reg = make_regularization(cfg.lambda);
  p.model = cfg.noise.uniform
                ? make_noise_model_uniform(p.grid, cfg.noise.mu)
                : make_noise_model(p.grid, cfg.noise.mu, cfg.noise.modes);
  p.damping = tilde_mu(p.model);

  const Field x_raw = build_profile(p.grid, cfg.x0);
  const Field xc = build_profile(p.grid, cfg.xc);
  p.x0 = shift_to_origin(x_raw, xc);

  const double peak = norm_linf(p.x0);
  p.delta_abs = peak > 0.0 ? cfg.delta_crit * peak : cfg.delta_crit;

  for (const auto& ci : cfg.compacts)
    p.compacts.push_back(build_compact(p.grid, p.model, ci.inner, ci.outer));

  const double steps = cfg.t_end / cfg.dt;
  p.n_steps = static_cast<int>(std::llround(steps));
  if (std::abs(p.n_steps - steps) > 1e-6)
    throw ConfigError({"t_end must be an integer multiple of dt (got " +
                       std::to_string(steps) + " steps)"});
  return p;
}

RunOutput run_path(const RunConfig& cfg, std::uint64_t path_seed,
                   int path_index, const BrownianPath* shared) {
  const auto t_start = std::chrono::steady_clock::now();
  Problem p = build_problem(cfg);
  const int n_modes = p.model.modes();

  BrownianPath local;
  const BrownianPath* path = nullptr;
  if (p.n_steps > 0) {
    if (shared) {
      if (shared->n_steps != p.n_steps || shared->n_modes != n_modes ||
          std::abs(shared->dt - cfg.dt) > 1e-12 * cfg.dt)
        throw std::invalid_argument(
            "run_path: supplied Brownian path does not match the config");
      path = shared;
    } else {
      local = sample_path(path_seed, n_modes, cfg.dt, p.n_steps);
      path = &local;
    }
  }

  const bool use_direct =
      cfg.scheme == Scheme::direct || cfg.scheme == Scheme::both;
  const bool use_transformed =
      cfg.scheme == Scheme::transformed || cfg.scheme == Scheme::both;

  Field x = use_direct ? p.x0 : Field{};
  Field y = use_transformed ? p.x0 : Field{};  // mu(0) = 0, so Y(0) = X(0)

  RunOutput out;
  out.diag.x0_linf = norm_linf(p.x0);
  out.diag.x0_l2 = norm_l2(p.grid, p.x0);
  out.diag.pre_clamp_min = 0.0;

  std::vector<double> beta_now(n_modes, 0.0);
  Field x_view(p.grid.size());  // transformed runs: recovered plain state

  auto record_at = [&](int j) {
    for (int k = 0; k < n_modes; ++k)
      beta_now[k] = path ? path->value(j, k) : 0.0;

    const Field* state = nullptr;
    if (use_direct) {
      state = &x;
    } else {
      const Field mu_j = mu_field(p.model, beta_now);
      for (int i = 0; i < p.grid.size(); ++i)
        x_view[i] = std::exp(-mu_j[i]) * y[i];
      state = &x_view;
    }

    ObservableRecord r;
    r.t = j * cfg.dt;
    r.Z = mass(p.grid, *state);
    r.l2 = norm_l2(p.grid, *state);
    r.l2Y = use_transformed ? norm_l2(p.grid, y) : 0.0;
    r.m_noncrit = critical_measure(p.grid, *state, p.delta_abs);
    double bsq = 0.0;
    for (double b : beta_now) bsq += b * b;
    r.beta_sumsq = bsq;
    for (const auto& c : p.compacts) {
      r.mass_K.push_back(mass_over(p.grid, *state, c.inner));
      r.bound_rhs.push_back(decay_bound_rhs(c, out.diag.x0_l2, bsq, r.t));
    }
    out.records.push_back(std::move(r));
  };

  record_at(0);

  std::vector<double> beta_left(n_modes, 0.0);
  bool absorbed = false;
  for (int j = 0; j < p.n_steps; ++j) {
    const double t_next = (j + 1) * cfg.dt;

    if (path_index >= 0 && path_index == cfg.debug_inject_nan_path && j == 0) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      if (use_direct) x[0] = nan;
      if (use_transformed) y[0] = nan;
    }

    if (!absorbed) {
      try {
        if (use_direct) {
          StepDiagnostics d = step_direct(
              p.grid, p.reg, p.model, x, cfg.dt,
              path ? std::span<const double>(
                         path->increments.data() +
                             static_cast<size_t>(j) * n_modes,
                         n_modes)
                   : std::span<const double>{});
          out.diag.pre_clamp_min =
              std::min(out.diag.pre_clamp_min, d.pre_clamp_min);
          out.diag.clamped_mass += d.clamped_mass;
          out.diag.max_newton_iters =
              std::max(out.diag.max_newton_iters, d.newton_iters);
          out.diag.total_cg_iters += d.cg_iters;
        }
        if (use_transformed) {
          for (int k = 0; k < n_modes; ++k) beta_left[k] = path->value(j, k);
          StepDiagnostics d =
              step_transformed(p.grid, p.reg, p.model, p.damping, y, cfg.dt,
                               beta_left);
          out.diag.pre_clamp_min =
              std::min(out.diag.pre_clamp_min, d.pre_clamp_min);
          out.diag.clamped_mass += d.clamped_mass;
          out.diag.max_newton_iters =
              std::max(out.diag.max_newton_iters, d.newton_iters);
          out.diag.total_cg_iters += d.cg_iters;
        }
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (t = " +
                                 std::to_string(t_next) + ")",
                             e.residual(), t_next);
      }
      // The zero state is absorbing (multiplicative noise): once every active
      // state is exactly zero, remaining steps are no-ops.
      absorbed = (!use_direct || all_zero(x)) &&
                 (!use_transformed || all_zero(y));
    }

    if ((j + 1) % cfg.record_stride == 0 || j + 1 == p.n_steps)
      record_at(j + 1);
  }

  if (cfg.scheme == Scheme::both) {
    for (int k = 0; k < n_modes; ++k)
      beta_now[k] = path ? path->value(p.n_steps, k) : 0.0;
    const Field mu_T = mu_field(p.model, beta_now);
    Field gap(p.grid.size());
    for (int i = 0; i < p.grid.size(); ++i)
      gap[i] = x[i] - std::exp(-mu_T[i]) * y[i];
    out.diag.final_scheme_gap = norm_l2(p.grid, gap);
  }

  out.diag.wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t_start)
          .count();
  return out;
}

}  // namespace socsim
