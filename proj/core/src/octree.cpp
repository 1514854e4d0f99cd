#include "ankh/octree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ankh {

namespace {

inline void split_extended(int ext, int n, int& in_box, int& image) {
  image = ext >= 0 ? ext / n : -((-ext + n - 1) / n);
  in_box = ext - n * image;
}

}  // namespace

CellGeometry PerfectOctree::cell_geometry(int level, std::uint32_t linear) const {
  const int n = cells_per_axis(level);
  const double rad = box_radius / n;
  const auto ijk = decode(linear, n);
  return {{-box_radius + rad * (2 * ijk[0] + 1), -box_radius + rad * (2 * ijk[1] + 1),
           -box_radius + rad * (2 * ijk[2] + 1)},
          rad};
}

PerfectOctree build_tree(const ParticleSystem& system, int depth) {
  if (depth < 1 || depth > 8) throw std::invalid_argument("build_tree: depth must be in [1, 8]");
  PerfectOctree tree;
  tree.depth = depth;
  tree.box_radius = system.box_radius;
  const int n = tree.cells_per_axis(depth);
  tree.leaf_buckets.assign(tree.cell_count(depth), {});

  const double inv_side = n / (2.0 * system.box_radius);
  for (std::uint32_t u = 0; u < system.size(); ++u) {
    int idx[3];
    for (int ax = 0; ax < 3; ++ax) {
      const double shifted = (system.positions[u][ax] + system.box_radius) * inv_side;
      idx[ax] = std::clamp(static_cast<int>(std::floor(shifted)), 0, n - 1);
    }
    tree.leaf_buckets[PerfectOctree::encode(idx[0], idx[1], idx[2], n)].push_back(u);
  }
  return tree;
}

InteractionLists interaction_lists(const PerfectOctree& tree, bool periodic) {
  InteractionLists lists;
  lists.periodic = periodic;
  lists.lambda.resize(tree.depth + 1);

  for (int level = 1; level <= tree.depth; ++level) {
    const int n = tree.cells_per_axis(level);
    auto& lam = lists.lambda[level];
    lam.resize(tree.cell_count(level));

    for (std::uint32_t t = 0; t < tree.cell_count(level); ++t) {
      const auto it = PerfectOctree::decode(t, n);
      // children of the parent's adjacent cells span [2(p-1), 2(p+1)+1] per axis
      int lo[3], hi[3];
      for (int ax = 0; ax < 3; ++ax) {
        const int parent = it[ax] >> 1;
        lo[ax] = 2 * (parent - 1);
        hi[ax] = 2 * (parent + 1) + 1;
        if (!periodic) {
          lo[ax] = std::max(lo[ax], 0);
          hi[ax] = std::min(hi[ax], n - 1);
        }
      }
      for (int sx = lo[0]; sx <= hi[0]; ++sx) {
        for (int sy = lo[1]; sy <= hi[1]; ++sy) {
          for (int sz = lo[2]; sz <= hi[2]; ++sz) {
            const int cheb = std::max({std::abs(sx - it[0]), std::abs(sy - it[1]),
                                       std::abs(sz - it[2])});
            if (cheb < 2) continue;
            int in[3], img[3];
            split_extended(sx, n, in[0], img[0]);
            split_extended(sy, n, in[1], img[1]);
            split_extended(sz, n, in[2], img[2]);
            lam[t].push_back({PerfectOctree::encode(in[0], in[1], in[2], n),
                              {static_cast<std::int8_t>(img[0]), static_cast<std::int8_t>(img[1]),
                               static_cast<std::int8_t>(img[2])}});
          }
        }
      }
    }
  }

  const int n = tree.cells_per_axis(tree.depth);
  lists.leaf_neighbors.resize(tree.cell_count(tree.depth));
  for (std::uint32_t t = 0; t < tree.cell_count(tree.depth); ++t) {
    const auto it = PerfectOctree::decode(t, n);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          const int ext[3] = {it[0] + dx, it[1] + dy, it[2] + dz};
          if (!periodic && (ext[0] < 0 || ext[0] >= n || ext[1] < 0 || ext[1] >= n ||
                            ext[2] < 0 || ext[2] >= n)) {
            continue;
          }
          int in[3], img[3];
          for (int ax = 0; ax < 3; ++ax) split_extended(ext[ax], n, in[ax], img[ax]);
          lists.leaf_neighbors[t].push_back(
              {PerfectOctree::encode(in[0], in[1], in[2], n),
               {static_cast<std::int8_t>(img[0]), static_cast<std::int8_t>(img[1]),
                static_cast<std::int8_t>(img[2])}});
        }
      }
    }
  }
  return lists;
}

std::vector<std::uint32_t> lambda_plus(const PerfectOctree& tree, std::uint32_t leaf) {
  const int n = tree.cells_per_axis(tree.depth);
  const auto it = PerfectOctree::decode(leaf, n);
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < tree.cell_count(tree.depth); ++s) {
    const auto is = PerfectOctree::decode(s, n);
    const int cheb = std::max({std::abs(is[0] - it[0]), std::abs(is[1] - it[1]),
                               std::abs(is[2] - it[2])});
    if (cheb >= 2) out.push_back(s);
  }
  return out;
}

}  // namespace ankh
