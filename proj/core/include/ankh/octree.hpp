#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ankh/chebyshev.hpp"
#include "ankh/types.hpp"

namespace ankh {

/// Perfect 2^3-tree of the given depth over the simulation box. All 8^depth
/// leaves exist; empty ones keep empty buckets. Cells at one level are indexed
/// by the integer triple (i, j, k) packed as (i * n + j) * n + k with n = 2^level.
struct PerfectOctree {
  int depth = 1;
  double box_radius = 1.0;
  std::vector<std::vector<std::uint32_t>> leaf_buckets;

  int cells_per_axis(int level) const { return 1 << level; }
  std::size_t cell_count(int level) const { return std::size_t(1) << (3 * level); }

  static std::array<int, 3> decode(std::uint32_t linear, int n) {
    return {static_cast<int>(linear) / (n * n), (static_cast<int>(linear) / n) % n,
            static_cast<int>(linear) % n};
  }
  static std::uint32_t encode(int i, int j, int k, int n) {
    return static_cast<std::uint32_t>((i * n + j) * n + k);
  }

  CellGeometry cell_geometry(int level, std::uint32_t linear) const;
};

PerfectOctree build_tree(const ParticleSystem& system, int depth);

/// Same-level cell reference, possibly shifted into one of the 26 adjacent
/// image boxes (periodic lists only; image components lie in {-1, 0, 1}).
struct CellRef {
  std::uint32_t cell = 0;
  std::array<std::int8_t, 3> image{0, 0, 0};

  bool same_box() const { return image[0] == 0 && image[1] == 0 && image[2] == 0; }
};

struct InteractionLists {
  bool periodic = false;
  /// lambda[level][target]: well-separated same-level cells whose parents are
  /// adjacent (level 1 .. depth; index 0 kept empty).
  std::vector<std::vector<std::vector<CellRef>>> lambda;
  /// Adjacent-or-equal leaf cells, self included.
  std::vector<std::vector<CellRef>> leaf_neighbors;
};

InteractionLists interaction_lists(const PerfectOctree& tree, bool periodic);

/// Extended interaction list of a leaf: every leaf at strictly positive
/// distance (open-boundary view).
std::vector<std::uint32_t> lambda_plus(const PerfectOctree& tree, std::uint32_t leaf);

}  // namespace ankh
