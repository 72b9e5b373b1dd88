#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "grid.hpp"

namespace socsim {

// One spatial noise shape. Either a Dirichlet eigenmode (k >= 1, lambda the
// continuum eigenvalue) or the uniform profile e == 1 (k = {0,0}, lambda = 0)
// used for the global-decay mode, where the shape floor keeps the damping
// field strictly positive on the whole domain.
struct NoiseShape {
  std::array<int, 2> k{0, 0};
  double lambda = 0.0;
  Field values;
};

struct NoiseModel {
  std::vector<double> mu;         // per-mode coefficients
  std::vector<NoiseShape> shapes;  // same length as mu
  double admissibility_sum = 0.0;  // sum of mu_k^2 * lambda_k^2
  int grid_size = 0;               // field length, kept even when mode-free

  int modes() const { return static_cast<int>(mu.size()); }
};

// Eigenmode shapes: one entry of `mode_indices` per coefficient; each entry
// holds dim indices (second entry ignored in 1-D).
NoiseModel make_noise_model(const Grid& g, std::span<const double> mu,
                            std::span<const std::array<int, 2>> mode_indices);

// Uniform-profile shapes (all modes share e == 1).
NoiseModel make_noise_model_uniform(const Grid& g, std::span<const double> mu);

// Deterministic hash of (master, salt) used everywhere a stream must be
// derived from a master seed: per-path seeds from the ensemble seed, per-mode
// streams from the path seed. Stable across platforms and versions.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t salt);

// Standard normal stream: mt19937_64 bits fed through Box-Muller. Hand-rolled
// so sampled paths are bitwise reproducible across standard libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : state_(seed) {}
  double next();

 private:
  double uniform();  // in (0,1]
  std::uint64_t next_bits();
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Sampled Brownian motion for all modes of one path. `values` holds the
// running sums beta_k(t_j) for j = 0..n_steps (step-major layout); the stored
// increments are the exact floating-point differences of consecutive values,
// so value(j+1,k) - value(j,k) == increment(j,k) bitwise.
struct BrownianPath {
  double dt = 0.0;
  int n_steps = 0;
  int n_modes = 0;
  std::vector<double> values;      // (n_steps+1) * n_modes
  std::vector<double> increments;  // n_steps * n_modes

  double value(int j, int k) const { return values[j * n_modes + k]; }
  double increment(int j, int k) const { return increments[j * n_modes + k]; }
};

// Reproducible path: mode k draws from a dedicated stream seeded with
// mix_seed(seed, k). Requires dt > 0 and n_steps >= 1; n_modes may be 0
// (deterministic runs).
BrownianPath sample_path(std::uint64_t seed, int n_modes, double dt,
                         int n_steps);

// Same Brownian motion on a coarser time grid: keeps every `factor`-th value
// bitwise and re-derives the increments. Requires n_steps % factor == 0.
BrownianPath coarsen(const BrownianPath& path, int factor);

// Pointwise field -sum_k mu_k e_k(xi) beta_k. beta must have one entry per mode.
Field mu_field(const NoiseModel& model, std::span<const double> beta);

// Stationary damping field sum_k mu_k^2 e_k(xi)^2 (time-invariant, >= 0).
Field tilde_mu(const NoiseModel& model);

struct NondegeneracyReport {
  double inf = 0.0;
  bool positive = false;
};

// Infimum of the damping field over the given grid-index subset; `positive`
// iff the infimum is > 0. Throws on an empty region.
NondegeneracyReport check_nondegeneracy(const NoiseModel& model,
                                        std::span<const int> region);

}  // namespace socsim
