#include "grid.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace socsim {

Grid build_grid(int dim, std::span<const double> extent, std::span<const int> n) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("unsupported dimension " + std::to_string(dim) +
                                " (must be 1 or 2)");
  if (static_cast<int>(extent.size()) < dim || static_cast<int>(n.size()) < dim)
    throw std::invalid_argument("extent/n must provide one entry per axis");

  Grid g;
  g.dim = dim;
  g.cell_volume = 1.0;
  for (int a = 0; a < dim; ++a) {
    if (!(extent[a] > 0.0))
      throw std::invalid_argument("extent must be positive on every axis");
    if (n[a] < 3)
      throw std::invalid_argument("need at least 3 interior points per axis, got " +
                                  std::to_string(n[a]));
    g.extent[a] = extent[a];
    g.n[a] = n[a];
    g.h[a] = extent[a] / (n[a] + 1);
    g.cell_volume *= g.h[a];
  }
  if (dim == 1) {
    g.n[1] = 1;
    g.h[1] = 1.0;
    g.extent[1] = 1.0;
  }
  return g;
}

Grid build_grid_1d(double extent, int n) {
  return build_grid(1, std::span<const double>{&extent, 1}, std::span<const int>{&n, 1});
}

Grid build_grid_2d(double lx, double ly, int nx, int ny) {
  const double ext[2] = {lx, ly};
  const int nn[2] = {nx, ny};
  return build_grid(2, ext, nn);
}

void laplacian_apply(const Grid& g, std::span<const double> in,
                     std::span<double> out) {
  const int sz = g.size();
  if (static_cast<int>(in.size()) != sz || static_cast<int>(out.size()) != sz)
    throw std::invalid_argument("laplacian_apply: field size mismatch");

  if (g.dim == 1) {
    const double ih2 = 1.0 / (g.h[0] * g.h[0]);
    const int n = g.n[0];
    for (int i = 0; i < n; ++i) {
      const double left = (i > 0) ? in[i - 1] : 0.0;
      const double right = (i + 1 < n) ? in[i + 1] : 0.0;
      out[i] = (left + right - 2.0 * in[i]) * ih2;
    }
    return;
  }

  const int nx = g.n[0];
  const int ny = g.n[1];
  const double ihx2 = 1.0 / (g.h[0] * g.h[0]);
  const double ihy2 = 1.0 / (g.h[1] * g.h[1]);
  for (int j = 0; j < ny; ++j) {
    const int row = j * nx;
    for (int i = 0; i < nx; ++i) {
      const int idx = row + i;
      const double c = in[idx];
      const double xl = (i > 0) ? in[idx - 1] : 0.0;
      const double xr = (i + 1 < nx) ? in[idx + 1] : 0.0;
      const double yl = (j > 0) ? in[idx - nx] : 0.0;
      const double yr = (j + 1 < ny) ? in[idx + nx] : 0.0;
      out[idx] = (xl + xr - 2.0 * c) * ihx2 + (yl + yr - 2.0 * c) * ihy2;
    }
  }
}

Field laplacian_apply(const Grid& g, const Field& in) {
  Field out(in.size());
  laplacian_apply(g, in, out);
  return out;
}

EigenMode eigenmode(const Grid& g, std::span<const int> k) {
  if (static_cast<int>(k.size()) < g.dim)
    throw std::invalid_argument("eigenmode: need one index per axis");
  for (int a = 0; a < g.dim; ++a)
    if (k[a] < 1)
      throw std::invalid_argument("eigenmode: indices must be >= 1, got " +
                                  std::to_string(k[a]));

  EigenMode m;
  m.lambda = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    m.k[a] = k[a];
    const double w = k[a] * M_PI / g.extent[a];
    m.lambda += w * w;
  }

  m.values.resize(g.size());
  if (g.dim == 1) {
    const double w = m.k[0] * M_PI / g.extent[0];
    for (int i = 0; i < g.n[0]; ++i) m.values[i] = std::sin(w * g.coord(0, i));
  } else {
    const double wx = m.k[0] * M_PI / g.extent[0];
    const double wy = m.k[1] * M_PI / g.extent[1];
    for (int j = 0; j < g.n[1]; ++j) {
      const double sy = std::sin(wy * g.coord(1, j));
      for (int i = 0; i < g.n[0]; ++i)
        m.values[j * g.n[0] + i] = std::sin(wx * g.coord(0, i)) * sy;
    }
  }

  // Renormalize discretely so <e_k, e_k> = 1 under the weighted inner product.
  const double nrm = norm_l2(g, m.values);
  for (double& v : m.values) v /= nrm;
  return m;
}

double inner(const Grid& g, std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner: field size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * g.cell_volume;
}

double norm_l2(const Grid& g, std::span<const double> a) {
  return std::sqrt(inner(g, a, a));
}

double norm_linf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Field solve_shifted(const Grid& g, double alpha, std::span<const double> diag,
                    std::span<const double> rhs, ShiftedSolveStats* stats) {
  const int sz = g.size();
  if (static_cast<int>(diag.size()) != sz || static_cast<int>(rhs.size()) != sz)
    throw std::invalid_argument("solve_shifted: size mismatch");
  if (alpha < 0.0) throw std::invalid_argument("solve_shifted: alpha must be >= 0");
  for (int i = 0; i < sz; ++i)
    if (!(diag[i] > 0.0))
      throw std::invalid_argument("solve_shifted: diagonal must be strictly positive");

  constexpr double kRelTol = 1e-10;

  // The system is linear, so the right-hand side can be rescaled freely.
  // Scaling by a power of two is exact and keeps every dot product in the
  // iteration away from the under/overflow range even when the caller's
  // state has decayed to (or grown to) an extreme magnitude.
  double rhs_max = 0.0;
  for (int i = 0; i < sz; ++i) rhs_max = std::max(rhs_max, std::abs(rhs[i]));
  if (!std::isfinite(rhs_max))
    throw std::invalid_argument("solve_shifted: rhs must be finite");

  Field u(sz, 0.0);
  if (rhs_max == 0.0) {
    if (stats) *stats = {0, 0.0};
    return u;
  }
  const int scale_exp = std::ilogb(rhs_max);

  // Jacobi preconditioner: the diagonal of (D - alpha*Lap_h).
  double stencil_diag = 0.0;
  for (int a = 0; a < g.dim; ++a) stencil_diag += 2.0 / (g.h[a] * g.h[a]);

  Field r(sz);
  for (int i = 0; i < sz; ++i) r[i] = std::ldexp(rhs[i], -scale_exp);
  double rhs_norm2 = 0.0;
  for (int i = 0; i < sz; ++i) rhs_norm2 += r[i] * r[i];
  const double rhs_norm = std::sqrt(rhs_norm2);
  Field z(sz), p(sz), Ap(sz);

  auto apply = [&](const Field& v, Field& out) {
    laplacian_apply(g, v, out);
    for (int i = 0; i < sz; ++i) out[i] = diag[i] * v[i] - alpha * out[i];
  };

  double rz = 0.0;
  for (int i = 0; i < sz; ++i) {
    z[i] = r[i] / (diag[i] + alpha * stencil_diag);
    rz += r[i] * z[i];
  }
  p = z;

  const double tol = kRelTol * rhs_norm;
  const int max_iter = 10 * sz + 100;
  double res = rhs_norm;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (res <= tol) break;
    apply(p, Ap);
    double pAp = 0.0;
    for (int i = 0; i < sz; ++i) pAp += p[i] * Ap[i];
    const double a_step = rz / pAp;
    double rn2 = 0.0;
    for (int i = 0; i < sz; ++i) {
      u[i] += a_step * p[i];
      r[i] -= a_step * Ap[i];
      rn2 += r[i] * r[i];
    }
    res = std::sqrt(rn2);
    double rz_new = 0.0;
    for (int i = 0; i < sz; ++i) {
      z[i] = r[i] / (diag[i] + alpha * stencil_diag);
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int i = 0; i < sz; ++i) p[i] = z[i] + beta * p[i];
  }

  // Written so a non-finite residual cannot slip through as "converged".
  if (!(res <= tol))
    throw NumericalError("solve_shifted: conjugate gradients did not reach " +
                             std::to_string(kRelTol) + " relative residual in " +
                             std::to_string(max_iter) + " iterations",
                         res / rhs_norm);
  for (int i = 0; i < sz; ++i) u[i] = std::ldexp(u[i], scale_exp);
  if (stats) *stats = {it, res / rhs_norm};
  return u;
}

}  // namespace socsim
