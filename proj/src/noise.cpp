#include "noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace socsim {

NoiseModel make_noise_model(const Grid& g, std::span<const double> mu,
                            std::span<const std::array<int, 2>> mode_indices) {
  if (mu.size() != mode_indices.size())
    throw std::invalid_argument("noise model: one mode index entry per coefficient");
  NoiseModel m;
  m.grid_size = g.size();
  m.mu.assign(mu.begin(), mu.end());
  m.shapes.reserve(mu.size());
  for (size_t i = 0; i < mu.size(); ++i) {
    EigenMode em = eigenmode(g, std::span<const int>(mode_indices[i].data(), g.dim));
    NoiseShape s;
    s.k = em.k;
    s.lambda = em.lambda;
    s.values = std::move(em.values);
    m.admissibility_sum += mu[i] * mu[i] * s.lambda * s.lambda;
    m.shapes.push_back(std::move(s));
  }
  return m;
}

NoiseModel make_noise_model_uniform(const Grid& g, std::span<const double> mu) {
  NoiseModel m;
  m.grid_size = g.size();
  m.mu.assign(mu.begin(), mu.end());
  m.shapes.reserve(mu.size());
  for (size_t i = 0; i < mu.size(); ++i) {
    NoiseShape s;
    s.values.assign(g.size(), 1.0);
    m.shapes.push_back(std::move(s));
  }
  return m;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t salt) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t GaussianStream::next_bits() {
  // One splitmix64 step: a tiny, well-mixed generator whose exact output
  // sequence we control (no reliance on library distribution internals).
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double GaussianStream::uniform() {
  return ((next_bits() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
}

double GaussianStream::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

BrownianPath sample_path(std::uint64_t seed, int n_modes, double dt,
                         int n_steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_path: dt must be > 0");
  if (n_steps < 1) throw std::invalid_argument("sample_path: need n_steps >= 1");
  if (n_modes < 0) throw std::invalid_argument("sample_path: negative mode count");

  BrownianPath p;
  p.dt = dt;
  p.n_steps = n_steps;
  p.n_modes = n_modes;
  p.values.assign(static_cast<size_t>(n_steps + 1) * n_modes, 0.0);
  p.increments.resize(static_cast<size_t>(n_steps) * n_modes);

  const double root_dt = std::sqrt(dt);
  for (int k = 0; k < n_modes; ++k) {
    GaussianStream gs(mix_seed(seed, static_cast<std::uint64_t>(k)));
    double running = 0.0;
    for (int j = 0; j < n_steps; ++j) {
      const double prev = running;
      running += root_dt * gs.next();
      p.values[static_cast<size_t>(j + 1) * n_modes + k] = running;
      // Store the representable difference so path values and increments are
      // exactly consistent.
      p.increments[static_cast<size_t>(j) * n_modes + k] = running - prev;
    }
  }
  return p;
}

BrownianPath coarsen(const BrownianPath& path, int factor) {
  if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
  if (path.n_steps % factor != 0)
    throw std::invalid_argument("coarsen: step count " +
                                std::to_string(path.n_steps) +
                                " not divisible by " + std::to_string(factor));
  BrownianPath c;
  c.dt = path.dt * factor;
  c.n_steps = path.n_steps / factor;
  c.n_modes = path.n_modes;
  c.values.resize(static_cast<size_t>(c.n_steps + 1) * c.n_modes);
  c.increments.resize(static_cast<size_t>(c.n_steps) * c.n_modes);
  for (int j = 0; j <= c.n_steps; ++j)
    for (int k = 0; k < c.n_modes; ++k)
      c.values[static_cast<size_t>(j) * c.n_modes + k] =
          path.value(j * factor, k);
  for (int j = 0; j < c.n_steps; ++j)
    for (int k = 0; k < c.n_modes; ++k)
      c.increments[static_cast<size_t>(j) * c.n_modes + k] =
          c.value(j + 1, k) - c.value(j, k);
  return c;
}

Field mu_field(const NoiseModel& model, std::span<const double> beta) {
  if (static_cast<int>(beta.size()) != model.modes())
    throw std::invalid_argument("mu_field: expected " +
                                std::to_string(model.modes()) +
                                " beta values, got " +
                                std::to_string(beta.size()));
  const size_t sz = static_cast<size_t>(model.grid_size);
  Field out(sz, 0.0);
  for (int k = 0; k < model.modes(); ++k) {
    const double c = -model.mu[k] * beta[k];
    const Field& e = model.shapes[k].values;
    for (size_t i = 0; i < sz; ++i) out[i] += c * e[i];
  }
  return out;
}

Field tilde_mu(const NoiseModel& model) {
  const size_t sz = static_cast<size_t>(model.grid_size);
  Field out(sz, 0.0);
  for (int k = 0; k < model.modes(); ++k) {
    const double c = model.mu[k] * model.mu[k];
    const Field& e = model.shapes[k].values;
    for (size_t i = 0; i < sz; ++i) out[i] += c * e[i] * e[i];
  }
  return out;
}

NondegeneracyReport check_nondegeneracy(const NoiseModel& model,
                                        std::span<const int> region) {
  if (region.empty())
    throw std::invalid_argument("check_nondegeneracy: empty region");
  const Field f = tilde_mu(model);
  double inf = std::numeric_limits<double>::infinity();
  for (int idx : region) {
    if (idx < 0 || static_cast<size_t>(idx) >= f.size())
      throw std::invalid_argument("check_nondegeneracy: index out of range");
    inf = std::min(inf, f[idx]);
  }
  return {inf, inf > 0.0};
}

}  // namespace socsim
