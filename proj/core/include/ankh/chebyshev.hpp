#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "ankh/types.hpp"

namespace ankh {

/// 1D interpolation grid on the reference interval [-1, 1].
struct Grid1D {
  enum class Kind { chebyshev, equispaced };

  Kind kind = Kind::chebyshev;
  int order = 0;
  std::vector<double> nodes;

  static Grid1D chebyshev(int order);
  static Grid1D equispaced(int order);
};

/// Cardinal Lagrange basis polynomial S_k of the grid, evaluated at x in [-1, 1].
/// Chebyshev grids use S_k(x) = 1/L + 2/L sum_m T_m(r_k) T_m(x); equispaced
/// grids use the barycentric form.
double lagrange_eval(const Grid1D& grid, int k, double x);

/// Derivative machinery for Lagrange-Chebyshev bases: S^(n)(x) = H D^n T(x)
/// with the Chebyshev-coefficient differentiation matrix D. The matrix route
/// stays finite at the interval endpoints, unlike the sin/acos closed form.
class DiffOperator {
 public:
  explicit DiffOperator(int order);

  int order() const { return order_; }
  const Eigen::MatrixXd& h_mat() const { return h_; }
  const Eigen::MatrixXd& d_mat() const { return d_; }

  /// [S_0^(n)(x), ..., S_{L-1}^(n)(x)] for n in {0, 1, 2}.
  Eigen::VectorXd basis_derivative(int n, double x) const;

 private:
  int order_;
  Eigen::MatrixXd h_, d_;
  std::array<Eigen::MatrixXd, 3> hd_;
};

/// Derivative of the grid's Lagrange basis; grid must be the Chebyshev grid of
/// the operator's order. n = 0 agrees with lagrange_eval.
Eigen::VectorXd lagrange_derivative(const DiffOperator& op, const Grid1D& grid, int n, double x);

/// Axis-aligned cubic cell: center and half-side.
struct CellGeometry {
  Vec3 center{};
  double radius = 1.0;
};

/// Modified charges (or any nodal expansion) on the tensor grid of one cell,
/// in lexicographic node order (i L + j) L + k.
struct LeafExpansion {
  std::uint32_t cell = 0;
  std::vector<double> values;
};

/// Tensor-product interpolation nodes of the grid mapped into the cell.
std::vector<Vec3> tensor_nodes(const Grid1D& grid, const CellGeometry& cell);

/// Q[node] = sum over the cell's particles of (q S + mu . grad S + Theta : grad^2 S),
/// with derivatives taken in physical coordinates ((1/radius)^n per axis order).
LeafExpansion modified_charges(const ParticleSystem& system,
                               const std::vector<std::uint32_t>& particle_indices,
                               std::uint32_t cell_id, const CellGeometry& cell,
                               const DiffOperator& op);

/// Matrix R with R(i, k) = S_k[src grid on cell](dst_i); rows sum to one.
/// Value interpolation uses R directly; expansion (dual) transfer uses R^T.
Eigen::MatrixXd reinterpolation_matrix(const Grid1D& src, const CellGeometry& cell,
                                       const std::vector<Vec3>& dst);

/// 1D expansion-transfer matrix T(k, l) = basis_k[dst grid](src local coord l):
/// point sources at src_local are re-expressed on the dst grid.
Eigen::MatrixXd transfer_1d(const Grid1D& dst, const std::vector<double>& src_local);

/// out[i,j,k] = sum_{a,b,c} Ax(i,a) Ay(j,b) Az(k,c) v[a,b,c], v lexicographic.
std::vector<double> tensor3_apply(const Eigen::MatrixXd& ax, const Eigen::MatrixXd& ay,
                                  const Eigen::MatrixXd& az, const std::vector<double>& v);

}  // namespace ankh
