#pragma once

#include <array>
#include <span>
#include <vector>

namespace socsim {

using Field = std::vector<double>;

// Uniform tensor mesh on the open box (0,L_0) x ... x (0,L_{dim-1}) with
// homogeneous Dirichlet boundary. Only interior points are stored; the
// boundary is identically zero by construction. Layout is row-major with the
// x index fastest: idx = ix + n[0]*iy. Mesh width h_i = L_i/(n_i+1).
struct Grid {
  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0};
  std::array<int, 2> n{0, 1};
  std::array<double, 2> h{0.0, 0.0};
  double cell_volume = 0.0;

  int size() const { return dim == 1 ? n[0] : n[0] * n[1]; }
  // Coordinate of interior point `idx` along `axis` (idx is the per-axis index).
  double coord(int axis, int idx) const { return h[axis] * (idx + 1); }
  double domain_measure() const {
    return dim == 1 ? extent[0] : extent[0] * extent[1];
  }
};

// dim must be 1 or 2, every n >= 3, every extent > 0.
Grid build_grid(int dim, std::span<const double> extent, std::span<const int> n);
Grid build_grid_1d(double extent, int n);
Grid build_grid_2d(double lx, double ly, int nx, int ny);

// Second-order centered Laplacian with zero Dirichlet boundary.
// `out` must not alias `in`.
void laplacian_apply(const Grid& g, std::span<const double> in,
                     std::span<double> out);
Field laplacian_apply(const Grid& g, const Field& in);

// Analytic sine-product Dirichlet eigenmode sampled on the grid and
// renormalized to unit discrete L2 norm. lambda is the continuum eigenvalue
// of -Laplacian; the sampled mode is an exact eigenvector of the discrete
// stencil with a nearby eigenvalue (O(h^2) apart).
struct EigenMode {
  std::array<int, 2> k{1, 1};
  double lambda = 0.0;
  Field values;
};

EigenMode eigenmode(const Grid& g, std::span<const int> k);

// Cell-volume-weighted reductions over interior points.
double inner(const Grid& g, std::span<const double> a, std::span<const double> b);
double norm_l2(const Grid& g, std::span<const double> a);
double norm_linf(std::span<const double> a);

struct ShiftedSolveStats {
  int iterations = 0;
  double residual = 0.0;
};

// Solves (D - alpha*Lap_h) u = rhs, D = diag(d) with every d_i > 0 and
// alpha >= 0, by Jacobi-preconditioned conjugate gradients to 1e-10 relative
// residual. Throws NumericalError (with the final residual) if the iteration
// stalls.
Field solve_shifted(const Grid& g, double alpha, std::span<const double> diag,
                    std::span<const double> rhs,
                    ShiftedSolveStats* stats = nullptr);

}  // namespace socsim
