#include "ankh/chebyshev.hpp"

#include <cmath>
#include <stdexcept>

namespace ankh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInsideTol = 1e-9;

void cheb_values(int order, double x, double* t) {
  t[0] = 1.0;
  if (order > 1) t[1] = x;
  for (int m = 2; m < order; ++m) t[m] = 2.0 * x * t[m - 1] - t[m - 2];
}

std::vector<double> barycentric_weights(int order) {
  // (-1)^k binom(L-1, k); scale is irrelevant in the barycentric quotient
  std::vector<double> w(order);
  double b = 1.0;
  for (int k = 0; k < order; ++k) {
    w[k] = (k % 2 == 0) ? b : -b;
    b = b * (order - 1 - k) / (k + 1);
  }
  return w;
}

double equispaced_cardinal(const Grid1D& g, int k, double x) {
  static thread_local std::vector<double> w;
  static thread_local int w_order = 0;
  if (w_order != g.order) {
    w = barycentric_weights(g.order);
    w_order = g.order;
  }
  double denom = 0.0;
  for (int m = 0; m < g.order; ++m) {
    const double dx = x - g.nodes[m];
    if (dx == 0.0) return m == k ? 1.0 : 0.0;
    denom += w[m] / dx;
  }
  return (w[k] / (x - g.nodes[k])) / denom;
}

}  // namespace

Grid1D Grid1D::chebyshev(int order) {
  if (order < 2) throw std::invalid_argument("Grid1D: order must be >= 2");
  Grid1D g;
  g.kind = Kind::chebyshev;
  g.order = order;
  g.nodes.resize(order);
  for (int k = 0; k < order; ++k) {
    g.nodes[k] = std::cos((2.0 * k + 1.0) * kPi / (2.0 * order));
  }
  return g;
}

Grid1D Grid1D::equispaced(int order) {
  if (order < 2) throw std::invalid_argument("Grid1D: order must be >= 2");
  Grid1D g;
  g.kind = Kind::equispaced;
  g.order = order;
  g.nodes.resize(order);
  for (int k = 0; k < order; ++k) {
    g.nodes[k] = -1.0 + 2.0 * k / (order - 1.0);
  }
  return g;
}

double lagrange_eval(const Grid1D& grid, int k, double x) {
  if (k < 0 || k >= grid.order) throw std::out_of_range("lagrange_eval: node index");
  if (grid.kind == Grid1D::Kind::equispaced) return equispaced_cardinal(grid, k, x);
  const int L = grid.order;
  double t[64];
  double tr[64];
  cheb_values(L, x, t);
  cheb_values(L, grid.nodes[k], tr);
  double s = 1.0;
  for (int m = 1; m < L; ++m) s += 2.0 * tr[m] * t[m];
  return s / L;
}

DiffOperator::DiffOperator(int order) : order_(order) {
  if (order < 2 || order > 64) throw std::invalid_argument("DiffOperator: order out of range");
  const Grid1D g = Grid1D::chebyshev(order);

  h_.resize(order, order);
  std::vector<double> t(order);
  for (int k = 0; k < order; ++k) {
    cheb_values(order, g.nodes[k], t.data());
    h_(k, 0) = 1.0 / order;
    for (int m = 1; m < order; ++m) h_(k, m) = 2.0 * t[m] / order;
  }

  // T'_m = sum_{j < m, m-j odd} c T_j with c = 2m (m for j = 0)
  d_ = Eigen::MatrixXd::Zero(order, order);
  for (int m = 1; m < order; ++m) {
    for (int j = m - 1; j >= 0; j -= 2) {
      d_(m, j) = (j == 0) ? m : 2.0 * m;
    }
  }

  hd_[0] = h_;
  hd_[1] = h_ * d_;
  hd_[2] = hd_[1] * d_;
}

Eigen::VectorXd DiffOperator::basis_derivative(int n, double x) const {
  if (n < 0 || n > 2) throw std::invalid_argument("basis_derivative: n must be 0, 1 or 2");
  Eigen::VectorXd t(order_);
  cheb_values(order_, x, t.data());
  return hd_[n] * t;
}

Eigen::VectorXd lagrange_derivative(const DiffOperator& op, const Grid1D& grid, int n, double x) {
  if (grid.kind != Grid1D::Kind::chebyshev || grid.order != op.order()) {
    throw std::invalid_argument("lagrange_derivative: operator/grid mismatch");
  }
  return op.basis_derivative(n, x);
}

std::vector<Vec3> tensor_nodes(const Grid1D& grid, const CellGeometry& cell) {
  const int L = grid.order;
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(L) * L * L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      for (int k = 0; k < L; ++k) {
        nodes.push_back(cell.center + cell.radius * Vec3{grid.nodes[i], grid.nodes[j], grid.nodes[k]});
      }
    }
  }
  return nodes;
}

LeafExpansion modified_charges(const ParticleSystem& system,
                               const std::vector<std::uint32_t>& particle_indices,
                               std::uint32_t cell_id, const CellGeometry& cell,
                               const DiffOperator& op) {
  const int L = op.order();
  LeafExpansion out;
  out.cell = cell_id;
  out.values.assign(static_cast<std::size_t>(L) * L * L, 0.0);

  const double inv_rad = 1.0 / cell.radius;
  Eigen::MatrixXd s(L, 9);  // columns: axis-major (axis 0..2) x order (0..2)

  for (std::uint32_t idx : particle_indices) {
    const Vec3& pos = system.positions[idx];
    const MultipoleSource& src = system.sources[idx];

    double local[3];
    for (int ax = 0; ax < 3; ++ax) {
      local[ax] = (pos[ax] - cell.center[ax]) * inv_rad;
      if (std::abs(local[ax]) > 1.0 + kInsideTol) {
        throw std::invalid_argument("modified_charges: particle outside cell");
      }
    }
    for (int ax = 0; ax < 3; ++ax) {
      double scale = 1.0;
      for (int n = 0; n < 3; ++n) {
        s.col(3 * ax + n) = scale * op.basis_derivative(n, local[ax]);
        scale *= inv_rad;
      }
    }

    struct Term {
      double coef;
      int nx, ny, nz;
    };
    const Term terms[10] = {
        {src.q, 0, 0, 0},
        {src.mu.x, 1, 0, 0},
        {src.mu.y, 0, 1, 0},
        {src.mu.z, 0, 0, 1},
        {src.theta(0, 0), 2, 0, 0},
        {src.theta(1, 1), 0, 2, 0},
        {src.theta(2, 2), 0, 0, 2},
        {2.0 * src.theta(0, 1), 1, 1, 0},
        {2.0 * src.theta(0, 2), 1, 0, 1},
        {2.0 * src.theta(1, 2), 0, 1, 1},
    };
    for (const Term& t : terms) {
      if (t.coef == 0.0) continue;
      const double* sx = s.col(0 + t.nx).data();
      const double* sy = s.col(3 + t.ny).data();
      const double* sz = s.col(6 + t.nz).data();
      double* q = out.values.data();
      for (int i = 0; i < L; ++i) {
        const double ci = t.coef * sx[i];
        for (int j = 0; j < L; ++j) {
          const double cij = ci * sy[j];
          for (int k = 0; k < L; ++k) {
            *q++ += cij * sz[k];
          }
        }
      }
    }
  }
  return out;
}

Eigen::MatrixXd reinterpolation_matrix(const Grid1D& src, const CellGeometry& cell,
                                       const std::vector<Vec3>& dst) {
  const int L = src.order;
  Eigen::MatrixXd r(dst.size(), static_cast<std::size_t>(L) * L * L);
  const double inv_rad = 1.0 / cell.radius;
  std::vector<double> bx(L), by(L), bz(L);
  for (std::size_t row = 0; row < dst.size(); ++row) {
    double local[3];
    for (int ax = 0; ax < 3; ++ax) {
      local[ax] = (dst[row][ax] - cell.center[ax]) * inv_rad;
      if (std::abs(local[ax]) > 1.0 + kInsideTol) {
        throw std::invalid_argument("reinterpolation_matrix: dst node outside cell");
      }
    }
    for (int k = 0; k < L; ++k) {
      bx[k] = lagrange_eval(src, k, local[0]);
      by[k] = lagrange_eval(src, k, local[1]);
      bz[k] = lagrange_eval(src, k, local[2]);
    }
    int col = 0;
    for (int i = 0; i < L; ++i) {
      for (int j = 0; j < L; ++j) {
        for (int k = 0; k < L; ++k) {
          r(row, col++) = bx[i] * by[j] * bz[k];
        }
      }
    }
  }
  return r;
}

Eigen::MatrixXd transfer_1d(const Grid1D& dst, const std::vector<double>& src_local) {
  Eigen::MatrixXd t(dst.order, src_local.size());
  for (std::size_t l = 0; l < src_local.size(); ++l) {
    for (int k = 0; k < dst.order; ++k) {
      t(k, l) = lagrange_eval(dst, k, src_local[l]);
    }
  }
  return t;
}

std::vector<double> tensor3_apply(const Eigen::MatrixXd& ax, const Eigen::MatrixXd& ay,
                                  const Eigen::MatrixXd& az, const std::vector<double>& v) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Index nx = ax.cols(), ny = ay.cols(), nz = az.cols();
  const Eigen::Index mx = ax.rows(), my = ay.rows(), mz = az.rows();
  if (static_cast<Eigen::Index>(v.size()) != nx * ny * nz) {
    throw std::invalid_argument("tensor3_apply: size mismatch");
  }

  // contract z: (nx ny, nz) -> (nx ny, mz)
  Eigen::Map<const RowMat> vm(v.data(), nx * ny, nz);
  RowMat t1 = vm * az.transpose();

  // contract y per x-slab: (ny, mz) -> (my, mz)
  RowMat t2(nx * my, mz);
  for (Eigen::Index i = 0; i < nx; ++i) {
    t2.middleRows(i * my, my) = ay * t1.middleRows(i * ny, ny);
  }

  // contract x: (nx, my mz) -> (mx, my mz)
  Eigen::Map<const RowMat> t2m(t2.data(), nx, my * mz);
  RowMat t3 = ax * t2m;

  std::vector<double> out(static_cast<std::size_t>(mx) * my * mz);
  Eigen::Map<RowMat>(out.data(), mx, my * mz) = t3;
  return out;
}

}  // namespace ankh
