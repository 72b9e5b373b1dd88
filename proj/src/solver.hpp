#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "config.hpp"
#include "grid.hpp"
#include "noise.hpp"
#include "observables.hpp"
#include "regularization.hpp"

namespace socsim {

struct SolverOptions {
  double newton_tol = 1e-10;  // on the step residual, relative to the rhs
  int newton_max_iter = 50;
  // The inner linear solves are themselves iterative, so the outer residual
  // bottoms out near the inner tolerance. Once the objective is stationary
  // to rounding, a residual within newton_tol * stall_slack of the rhs is
  // accepted as converged; anything above still fails loudly.
  double newton_stall_slack = 100.0;
  bool clamp_negative = true;
  // Diagnostic switch: disables the whole diffusion drift so the transformed
  // step reduces to the pointwise damping ODE (used by tests only).
  bool diffusion_enabled = true;
  // Values with magnitude below this are flushed to exact zero after a step;
  // far below any observable scale, keeps post-extinction steps cheap.
  double snap_threshold = 1e-300;
};

struct StepDiagnostics {
  int newton_iters = 0;
  int cg_iters = 0;
  double residual = 0.0;       // final Newton residual (L2)
  double pre_clamp_min = 0.0;  // most negative state value before the floor
  double clamped_mass = 0.0;   // mass removed by the floor in this step
};

// Backward-Euler drift step with left-point (Ito) noise for the plain scheme:
// solves x_new - dt * Lap(psi_lambda(x_new) + lambda * x_new) =
//        x .* (1 + sum_k mu_k e_k dbeta_k)
// in place, then applies the positivity floor. `increments` holds one dbeta
// per noise mode. Throws NumericalError if Newton stalls or the state leaves
// the finite range.
StepDiagnostics step_direct(const Grid& g, const Regularization& reg,
                            const NoiseModel& model, Field& x, double dt,
                            std::span<const double> increments,
                            const SolverOptions& opt = {});

// Semi-implicit step for the transformed scheme: advances y across [t, t+dt]
// with the exponential factors frozen at the left endpoint (beta_left) and
// the damping reaction handled implicitly. `damping` is the stationary field
// from tilde_mu. In the frozen frame the plain-scheme state is z =
// exp(-mu) .* y; positivity bookkeeping applies to z.
StepDiagnostics step_transformed(const Grid& g, const Regularization& reg,
                                 const NoiseModel& model,
                                 std::span<const double> damping, Field& y,
                                 double dt, std::span<const double> beta_left,
                                 const SolverOptions& opt = {});

// x_raw - xc with the precondition x_raw >= xc pointwise; a violation is
// reported with the offending grid index.
Field shift_to_origin(std::span<const double> x_raw,
                      std::span<const double> xc);

struct PathDiagnostics {
  double pre_clamp_min = 0.0;   // most negative raw state over the whole run
  double clamped_mass = 0.0;    // total mass removed by the positivity floor
  int max_newton_iters = 0;
  long long total_cg_iters = 0;
  double x0_linf = 0.0;         // norms of the shifted initial datum
  double x0_l2 = 0.0;
  // L2 distance between the two scheme states at t_end (scheme = both only,
  // else -1).
  double final_scheme_gap = -1.0;
  double wall_ms = 0.0;
};

struct RunOutput {
  std::vector<ObservableRecord> records;
  PathDiagnostics diag;
};

// Everything a path run needs, materialized once per config.
struct Problem {
  Grid grid;
  Regularization reg;
  NoiseModel model;
  Field damping;               // tilde_mu
  Field x0;                    // shifted initial datum
  double delta_abs = 0.0;      // absolute critical threshold
  std::vector<CompactSpec> compacts;
  int n_steps = 0;
};

Problem build_problem(const RunConfig& cfg);

// Integrates one path from 0 to t_end, recording observables every
// record_stride steps (and at the final step). Fully deterministic in
// (cfg, path_seed). `path_index` feeds the NaN-injection test hook;
// `shared` optionally supplies the Brownian motion (it must match the
// config's dt and step count), for refinement studies on a common path.
RunOutput run_path(const RunConfig& cfg, std::uint64_t path_seed,
                   int path_index = -1, const BrownianPath* shared = nullptr);

}  // namespace socsim
