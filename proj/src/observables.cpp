#include "observables.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace socsim {

namespace {

// Interior indices whose fractional coordinate lies in [inset, 1-inset] on
// every axis.
std::vector<int> box_indices(const Grid& g, double inset) {
  std::vector<int> out;
  auto inside = [&](int axis, int i) {
    const double s = static_cast<double>(i + 1) / (g.n[axis] + 1);
    return s >= inset - 1e-12 && s <= 1.0 - inset + 1e-12;
  };
  if (g.dim == 1) {
    for (int i = 0; i < g.n[0]; ++i)
      if (inside(0, i)) out.push_back(i);
  } else {
    for (int j = 0; j < g.n[1]; ++j) {
      if (!inside(1, j)) continue;
      for (int i = 0; i < g.n[0]; ++i)
        if (inside(0, i)) out.push_back(j * g.n[0] + i);
    }
  }
  return out;
}

}  // namespace

CompactSpec build_compact(const Grid& g, const NoiseModel& model,
                          double inner_inset, double outer_inset) {
  if (!(outer_inset >= 0.0) || !(inner_inset >= outer_inset) ||
      !(inner_inset < 0.5))
    throw std::invalid_argument(
        "compact insets must satisfy 0 <= outer <= inner < 0.5");
  CompactSpec c;
  c.inner_inset = inner_inset;
  c.outer_inset = outer_inset;
  c.inner = box_indices(g, inner_inset);
  c.outer = box_indices(g, outer_inset);
  if (c.inner.empty())
    throw std::invalid_argument("compact inner box is empty at inset " +
                                std::to_string(inner_inset));
  c.measure_inner = g.cell_volume * static_cast<double>(c.inner.size());

  const Field damping = tilde_mu(model);
  double inf = std::numeric_limits<double>::infinity();
  for (int idx : c.outer) inf = std::min(inf, damping[idx]);
  c.c_k = c.outer.empty() ? 0.0 : inf;
  double sup = 0.0;
  for (int idx : c.inner) sup = std::max(sup, damping[idx]);
  c.sup_root_mu = std::sqrt(sup);
  return c;
}

double mass(const Grid& g, std::span<const double> field) {
  double s = 0.0;
  for (double v : field) s += v;
  return s * g.cell_volume;
}

double mass_over(const Grid& g, std::span<const double> field,
                 std::span<const int> indices) {
  double s = 0.0;
  for (int idx : indices) s += field[idx];
  return s * g.cell_volume;
}

double critical_measure(const Grid& g, std::span<const double> field,
                        double delta_abs) {
  if (!(delta_abs > 0.0))
    throw std::invalid_argument("critical_measure: threshold must be > 0");
  int count = 0;
  for (double v : field)
    if (std::abs(v) > delta_abs) ++count;
  return g.cell_volume * count;
}

double decay_bound_rhs(const CompactSpec& compact, double x_l2,
                       double beta_sumsq, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("decay_bound_rhs: t must be >= 0");
  return x_l2 * std::sqrt(compact.measure_inner) *
         std::exp(compact.sup_root_mu * std::sqrt(beta_sumsq)) *
         std::exp(-0.5 * compact.c_k * t);
}

std::optional<double> extinction_time(
    std::span<const ObservableRecord> records, double delta) {
  if (records.empty())
    throw std::invalid_argument("extinction_time: empty trajectory");
  if (!(delta > 0.0))
    throw std::invalid_argument("extinction_time: delta must be > 0");
  const double threshold = delta * records[0].Z;
  // Last record still at or above the threshold; extinction starts after it.
  std::ptrdiff_t last_above = -1;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(records.size()) - 1;
       i >= 0; --i) {
    if (records[i].Z >= threshold) {
      last_above = i;
      break;
    }
  }
  const std::ptrdiff_t first_settled = last_above + 1;
  if (first_settled >= static_cast<std::ptrdiff_t>(records.size()))
    return std::nullopt;
  return records[first_settled].t;
}

double fit_decay_rate(std::span<const ObservableRecord> records,
                      int compact_index, double t0, double t1) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& r : records) {
    if (r.t < t0 || r.t > t1) continue;
    if (compact_index < 0 ||
        compact_index >= static_cast<int>(r.mass_K.size()))
      throw std::invalid_argument("fit_decay_rate: compact index out of range");
    const double m = r.mass_K[compact_index];
    if (!(m > 0.0)) continue;
    const double y = -std::log(m);
    sx += r.t;
    sy += y;
    sxx += r.t * r.t;
    sxy += r.t * y;
    ++n;
  }
  if (n < 10)
    throw NumericalError(
        "fit_decay_rate: need at least 10 records with positive localized "
        "mass in the window, got " + std::to_string(n));
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw NumericalError("fit_decay_rate: degenerate time window");
  return (n * sxy - sx * sy) / denom;
}

double integrated_noncritical(std::span<const ObservableRecord> records,
                              double up_to_t) {
  double integral = 0.0;
  for (size_t i = 1; i < records.size(); ++i) {
    if (records[i].t > up_to_t + 1e-12) break;
    integral += 0.5 * (records[i].m_noncrit + records[i - 1].m_noncrit) *
                (records[i].t - records[i - 1].t);
  }
  return integral;
}

}  // namespace socsim
