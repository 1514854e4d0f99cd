#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "ankh/chebyshev.hpp"
#include "ankh/octree.hpp"
#include "ankh/spectral.hpp"
#include "ankh/types.hpp"

namespace ankh {

/// Kernel block between two same-level cells, compressed to C ~= lmat^T rmat
/// with a relative singular-value cutoff. One operator exists per distinct
/// (level, index offset); dense form kept when compression is off.
struct M2LOperator {
  bool factored = true;
  Eigen::MatrixXd lmat, rmat;
  Eigen::MatrixXd dense;

  int rank() const { return factored ? static_cast<int>(lmat.rows()) : -1; }
};

/// Dense M2L block: entry (k, l) = H(x_k, y_l) for the target cell at the
/// origin and the source cell displaced by `offset` cells of side 2*cell_radius.
Eigen::MatrixXd m2l_dense(const Grid1D& grid, double cell_radius,
                          const std::array<int, 3>& offset, double xi);

/// Deterministic truncated SVD (exact for small blocks, seeded randomized
/// range-finding above that) with relative cutoff svd_tol.
M2LOperator compress_m2l(const Eigen::MatrixXd& c, double svd_tol, std::uint64_t seed);

struct M2LCache {
  bool compress = true;
  /// ops[level]: packed offset key -> operator
  std::vector<std::unordered_map<std::int64_t, M2LOperator>> ops;

  static std::int64_t key(const std::array<int, 3>& offset) {
    return (static_cast<std::int64_t>(offset[0]) * 4096 + offset[1]) * 4096 + offset[2];
  }
  std::size_t total_operators() const;
};

M2LCache build_m2l_cache(const PerfectOctree& tree, const InteractionLists& lists,
                         const Grid1D& grid, double xi, double svd_tol, int threads,
                         bool compress = true);

/// expansions[level][cell] for levels 0..depth; level 0 holds the root.
using LevelExpansions = std::vector<std::vector<std::vector<double>>>;

/// Modified charges of every leaf (zeros for empty leaves), leaf-linear order.
std::vector<std::vector<double>> leaf_expansions(const ParticleSystem& system,
                                                 const PerfectOctree& tree,
                                                 const DiffOperator& op, int threads = 1);

LevelExpansions upward_pass(const PerfectOctree& tree,
                            std::vector<std::vector<double>> leaf_values, int order_cheb);

/// F_real: one term per unordered well-separated pair instance. The full
/// double-loop route (mutual = false) visits every ordered instance and halves
/// the total; both agree to reassociation round-off.
double far_field_energy(const PerfectOctree& tree, const InteractionLists& lists,
                        const LevelExpansions& expansions, const M2LCache& cache,
                        int threads, bool mutual = true);

/// N_real: direct multipole interactions over adjacent-or-equal leaf pairs
/// (wrapped into the 26 near images when the lists are periodic), each
/// unordered pair instance counted once and x == y excluded.
double near_field_energy(const PerfectOctree& tree, const InteractionLists& lists,
                         const ParticleSystem& system, double xi, int threads,
                         bool mutual = true);

/// Far-image operator D_B = sum of the M2L blocks between the box and its
/// images with 2 <= |I|_inf <= p, diagonalized over the equispaced root grid.
/// Depends only on (box_radius, order, xi, p), never on particles.
struct PeriodicOperator {
  int order = 0;
  double box_radius = 1.0;
  double xi = 0.01;
  int p = 0;
  std::shared_ptr<CirculantSpectrum> spectrum;

  /// (sum_I C[B, I]) m for a root equispaced expansion m.
  std::vector<double> apply(const std::vector<double>& root_equi) const;
};

PeriodicOperator build_periodic_operator(double box_radius, int order, double xi, int p,
                                         int threads = 1);

/// Quadratic form m^T (sum_I C[B, I]) m; the ordered image sum, so the energy
/// bookkeeping halves it.
double periodic_far_energy(const PeriodicOperator& op, const std::vector<double>& root_equi);

EnergyReport fmm_energy(const ParticleSystem& system, const EwaldConfig& config,
                        int threads = 1);

}  // namespace ankh
