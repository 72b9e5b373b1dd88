#pragma once

#include <optional>
#include <span>
#include <vector>

#include "grid.hpp"
#include "noise.hpp"

namespace socsim {

// One recorded state snapshot. mass_K / bound_rhs run over the configured
// compacts, in order. l2Y is 0 for runs without a transformed state.
struct ObservableRecord {
  double t = 0.0;
  double Z = 0.0;          // total mass
  double l2 = 0.0;         // L2 norm of the state
  double l2Y = 0.0;        // L2 norm of the transformed state
  double m_noncrit = 0.0;  // measure of {|X| > threshold}
  std::vector<double> mass_K;
  std::vector<double> bound_rhs;
  double beta_sumsq = 0.0;
};

// Index boxes for localized-decay diagnostics. `inner` is the probe region K,
// `outer` a compact neighborhood of it; the decay constant is the infimum of
// the damping field over the outer box, the amplification constant the
// supremum of its square root over the inner one.
struct CompactSpec {
  double inner_inset = 0.0;
  double outer_inset = 0.0;
  std::vector<int> inner;
  std::vector<int> outer;
  double c_k = 0.0;
  double sup_root_mu = 0.0;
  double measure_inner = 0.0;
};

// Builds the index boxes by fractional insets (per axis) and evaluates the
// damping-field constants. Throws if a box comes out empty.
CompactSpec build_compact(const Grid& g, const NoiseModel& model,
                          double inner_inset, double outer_inset);

// Cell-volume-weighted sum over all interior points.
double mass(const Grid& g, std::span<const double> field);

// Same, restricted to an index subset.
double mass_over(const Grid& g, std::span<const double> field,
                 std::span<const int> indices);

// cell_volume * #{ |field| > delta_abs }: the measure of the region still
// away from the critical (zero) state. delta_abs must be > 0.
double critical_measure(const Grid& g, std::span<const double> field,
                        double delta_abs);

// Localized decay bound at time t for a path with initial L2 norm x_l2 and
// running squared-path-sum beta_sumsq:
//   x_l2 * sqrt(m(K)) * exp(sup_K sqrt(damping) * sqrt(beta_sumsq))
//        * exp(-c_k * t / 2)
double decay_bound_rhs(const CompactSpec& compact, double x_l2,
                       double beta_sumsq, double t);

// First recorded time after which the total mass stays below delta * Z(0);
// nullopt if the mass never settles below it. Throws on an empty trajectory.
std::optional<double> extinction_time(std::span<const ObservableRecord> records,
                                      double delta);

// Least-squares slope of -log(mass_K) against t over records in [t0, t1]
// with strictly positive localized mass. Requires at least 10 such records.
double fit_decay_rate(std::span<const ObservableRecord> records,
                      int compact_index, double t0, double t1);

// Trapezoidal time integral of m_noncrit over recorded times <= up_to_t.
double integrated_noncritical(std::span<const ObservableRecord> records,
                              double up_to_t);

}  // namespace socsim
