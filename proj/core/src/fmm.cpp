#include "ankh/fmm.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ankh/kernel.hpp"
#include "ankh/parallel.hpp"

namespace ankh {

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double lap() {
    const auto t1 = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t1 - t0).count();
    t0 = t1;
    return s;
  }
};

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  auto unit = [&rng]() { return ((rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0); };
  Eigen::MatrixXd m(rows, cols);
  constexpr double two_pi = 6.283185307179586477;
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = std::sqrt(-2.0 * std::log(unit())) * std::cos(two_pi * unit());
    }
  }
  return m;
}

struct FarInstance {
  std::uint32_t t, s;
  std::int64_t key;
};

std::array<int, 3> instance_offset(const PerfectOctree& tree, int level, std::uint32_t t,
                                   const CellRef& ref) {
  const int n = tree.cells_per_axis(level);
  const auto it = PerfectOctree::decode(t, n);
  const auto is = PerfectOctree::decode(ref.cell, n);
  return {is[0] + n * ref.image[0] - it[0], is[1] + n * ref.image[1] - it[1],
          is[2] + n * ref.image[2] - it[2]};
}

bool image_lex_positive(const std::array<std::int8_t, 3>& img) {
  if (img[0] != 0) return img[0] > 0;
  if (img[1] != 0) return img[1] > 0;
  return img[2] > 0;
}

}  // namespace

Eigen::MatrixXd m2l_dense(const Grid1D& grid, double cell_radius,
                          const std::array<int, 3>& offset, double xi) {
  const int L = grid.order;
  const int K = L * L * L;
  // per-axis squared coordinate differences x_k - y_l
  Eigen::MatrixXd d2[3];
  for (int ax = 0; ax < 3; ++ax) {
    d2[ax].resize(L, L);
    const double shift = 2.0 * cell_radius * offset[ax];
    for (int a = 0; a < L; ++a) {
      for (int b = 0; b < L; ++b) {
        const double d = cell_radius * (grid.nodes[a] - grid.nodes[b]) - shift;
        d2[ax](a, b) = d * d;
      }
    }
  }
  Eigen::MatrixXd c(K, K);
  for (int i0 = 0; i0 < L; ++i0) {
    for (int i1 = 0; i1 < L; ++i1) {
      for (int i2 = 0; i2 < L; ++i2) {
        const int row = (i0 * L + i1) * L + i2;
        for (int j0 = 0; j0 < L; ++j0) {
          const double a = d2[0](i0, j0);
          for (int j1 = 0; j1 < L; ++j1) {
            const double ab = a + d2[1](i1, j1);
            const int col_base = (j0 * L + j1) * L;
            for (int j2 = 0; j2 < L; ++j2) {
              const double r = std::sqrt(ab + d2[2](i2, j2));
              c(row, col_base + j2) = erfc_screen(xi * r) / r;
            }
          }
        }
      }
    }
  }
  return c;
}

M2LOperator compress_m2l(const Eigen::MatrixXd& c, double svd_tol, std::uint64_t seed) {
  const Eigen::Index k_full = c.rows();
  M2LOperator op;
  op.factored = true;

  auto finish = [&](const Eigen::MatrixXd& u, const Eigen::VectorXd& sv,
                    const Eigen::MatrixXd& v) {
    Eigen::Index rank = 1;
    while (rank < sv.size() && sv(rank) > sv(0) * svd_tol) ++rank;
    op.lmat = (u.leftCols(rank) * sv.head(rank).asDiagonal()).transpose();
    op.rmat = v.leftCols(rank).transpose();
  };

  if (k_full <= 150) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    finish(svd.matrixU(), svd.singularValues(), svd.matrixV());
    return op;
  }

  Eigen::Index q = 48;
  while (true) {
    q = std::min(q, k_full);
    const Eigen::MatrixXd omega = gaussian_matrix(k_full, q, seed);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c * omega);
    const Eigen::MatrixXd qmat =
        qr.householderQ() * Eigen::MatrixXd::Identity(k_full, q);
    const Eigen::MatrixXd b = qmat.transpose() * c;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (q == k_full || sv(q - 1) <= sv(0) * svd_tol * 1e-2) {
      finish(qmat * svd.matrixU(), sv, svd.matrixV());
      return op;
    }
    q *= 2;
  }
}

std::size_t M2LCache::total_operators() const {
  std::size_t n = 0;
  for (const auto& level : ops) n += level.size();
  return n;
}

M2LCache build_m2l_cache(const PerfectOctree& tree, const InteractionLists& lists,
                         const Grid1D& grid, double xi, double svd_tol, int threads,
                         bool compress) {
  M2LCache cache;
  cache.compress = compress;
  cache.ops.resize(tree.depth + 1);

  for (int level = 1; level <= tree.depth; ++level) {
    // distinct offsets reachable at this level
    std::vector<std::array<int, 3>> offsets;
    for (std::uint32_t t = 0; t < tree.cell_count(level); ++t) {
      for (const CellRef& ref : lists.lambda[level][t]) {
        const auto off = instance_offset(tree, level, t, ref);
        const std::int64_t key = M2LCache::key(off);
        if (!cache.ops[level].count(key)) {
          cache.ops[level].emplace(key, M2LOperator{});
          offsets.push_back(off);
        }
      }
    }
    const double rad = tree.box_radius / tree.cells_per_axis(level);
    parallel_for(offsets.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const Eigen::MatrixXd dense = m2l_dense(grid, rad, offsets[i], xi);
        M2LOperator& op = cache.ops[level].at(M2LCache::key(offsets[i]));
        if (compress) {
          const std::uint64_t seed =
              static_cast<std::uint64_t>(level) * 0x100000001b3ULL +
              static_cast<std::uint64_t>(M2LCache::key(offsets[i]));
          op = compress_m2l(dense, svd_tol, seed);
        } else {
          op.factored = false;
          op.dense = dense;
        }
      }
    });
  }
  return cache;
}

std::vector<std::vector<double>> leaf_expansions(const ParticleSystem& system,
                                                 const PerfectOctree& tree,
                                                 const DiffOperator& op, int threads) {
  const int L = op.order();
  const std::size_t k = static_cast<std::size_t>(L) * L * L;
  std::vector<std::vector<double>> out(tree.cell_count(tree.depth));
  parallel_for(out.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t leaf = begin; leaf < end; ++leaf) {
      if (tree.leaf_buckets[leaf].empty()) {
        out[leaf].assign(k, 0.0);
        continue;
      }
      out[leaf] = modified_charges(system, tree.leaf_buckets[leaf],
                                   static_cast<std::uint32_t>(leaf),
                                   tree.cell_geometry(tree.depth, static_cast<std::uint32_t>(leaf)),
                                   op)
                      .values;
    }
  });
  return out;
}

LevelExpansions upward_pass(const PerfectOctree& tree,
                            std::vector<std::vector<double>> leaf_values, int order_cheb) {
  const Grid1D grid = Grid1D::chebyshev(order_cheb);
  const int L = order_cheb;
  const std::size_t k = static_cast<std::size_t>(L) * L * L;
  if (leaf_values.size() != tree.cell_count(tree.depth)) {
    throw std::invalid_argument("upward_pass: one expansion per leaf expected");
  }

  // daughter nodes in mother-local coordinates; identical at every level
  std::vector<double> lo(L), hi(L);
  for (int i = 0; i < L; ++i) {
    lo[i] = 0.5 * (grid.nodes[i] - 1.0);
    hi[i] = 0.5 * (grid.nodes[i] + 1.0);
  }
  const Eigen::MatrixXd m2m[2] = {transfer_1d(grid, lo), transfer_1d(grid, hi)};

  LevelExpansions exps(tree.depth + 1);
  exps[tree.depth] = std::move(leaf_values);
  for (int level = tree.depth - 1; level >= 0; --level) {
    const int n = tree.cells_per_axis(level);
    exps[level].assign(tree.cell_count(level), std::vector<double>(k, 0.0));
    const int nc = 2 * n;
    for (std::uint32_t child = 0; child < tree.cell_count(level + 1); ++child) {
      const auto c = PerfectOctree::decode(child, nc);
      const std::uint32_t parent = PerfectOctree::encode(c[0] >> 1, c[1] >> 1, c[2] >> 1, n);
      const std::vector<double> up = tensor3_apply(m2m[c[0] & 1], m2m[c[1] & 1],
                                                   m2m[c[2] & 1], exps[level + 1][child]);
      std::vector<double>& acc = exps[level][parent];
      for (std::size_t i = 0; i < k; ++i) acc[i] += up[i];
    }
  }
  return exps;
}

double far_field_energy(const PerfectOctree& tree, const InteractionLists& lists,
                        const LevelExpansions& expansions, const M2LCache& cache,
                        int threads, bool mutual) {
  double total = 0.0;
  for (int level = 1; level <= tree.depth; ++level) {
    std::vector<FarInstance> instances;
    for (std::uint32_t t = 0; t < tree.cell_count(level); ++t) {
      for (const CellRef& ref : lists.lambda[level][t]) {
        if (mutual) {
          const bool canonical =
              t < ref.cell || (t == ref.cell && image_lex_positive(ref.image));
          if (!canonical) continue;
        }
        instances.push_back({t, ref.cell, M2LCache::key(instance_offset(tree, level, t, ref))});
      }
    }
    const auto& level_exps = expansions[level];
    const auto& level_ops = cache.ops[level];
    const double level_sum =
        parallel_sum(instances.size(), threads, [&](std::size_t begin, std::size_t end) {
          double acc = 0.0;
          for (std::size_t i = begin; i < end; ++i) {
            const FarInstance& in = instances[i];
            const M2LOperator& op = level_ops.at(in.key);
            const Eigen::Index dim = static_cast<Eigen::Index>(level_exps[in.t].size());
            Eigen::Map<const Eigen::VectorXd> mt(level_exps[in.t].data(), dim);
            Eigen::Map<const Eigen::VectorXd> ms(level_exps[in.s].data(), dim);
            if (op.factored) {
              acc += (op.lmat * mt).dot(op.rmat * ms);
            } else {
              acc += mt.dot(op.dense * ms);
            }
          }
          return acc;
        });
    total += level_sum;
  }
  return mutual ? total : 0.5 * total;
}

double near_field_energy(const PerfectOctree& tree, const InteractionLists& lists,
                         const ParticleSystem& system, double xi, int threads, bool mutual) {
  struct NearInstance {
    std::uint32_t a, b;
    std::array<std::int8_t, 3> image;
  };
  std::vector<NearInstance> instances;
  for (std::uint32_t a = 0; a < tree.cell_count(tree.depth); ++a) {
    if (tree.leaf_buckets[a].empty()) continue;
    for (const CellRef& ref : lists.leaf_neighbors[a]) {
      if (tree.leaf_buckets[ref.cell].empty()) continue;
      if (mutual && !(a < ref.cell || (a == ref.cell && ref.same_box()))) continue;
      instances.push_back({a, ref.cell, ref.image});
    }
  }

  const double period = 2.0 * system.box_radius;
  const double total =
      parallel_sum(instances.size(), threads, [&](std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          const NearInstance& in = instances[i];
          const auto& bucket_a = tree.leaf_buckets[in.a];
          const auto& bucket_b = tree.leaf_buckets[in.b];
          const Vec3 shift{period * in.image[0], period * in.image[1], period * in.image[2]};
          if (in.a == in.b && in.image[0] == 0 && in.image[1] == 0 && in.image[2] == 0) {
            for (std::size_t x = 0; x < bucket_a.size(); ++x) {
              const std::uint32_t ix = bucket_a[x];
              for (std::size_t y = mutual ? x + 1 : 0; y < bucket_a.size(); ++y) {
                if (!mutual && y == x) continue;
                const std::uint32_t iy = bucket_a[y];
                acc += pair_interaction(system.positions[ix], system.sources[ix],
                                        system.positions[iy], system.sources[iy], xi);
              }
            }
          } else {
            for (std::uint32_t ix : bucket_a) {
              const Vec3& px = system.positions[ix];
              const MultipoleSource& sx = system.sources[ix];
              for (std::uint32_t iy : bucket_b) {
                acc += pair_interaction(px, sx, system.positions[iy] + shift,
                                        system.sources[iy], xi);
              }
            }
          }
        }
        return acc;
      });
  return mutual ? total : 0.5 * total;
}

std::vector<double> PeriodicOperator::apply(const std::vector<double>& root_equi) const {
  return spectrum->apply(root_equi);
}

PeriodicOperator build_periodic_operator(double box_radius, int order, double xi, int p,
                                         int threads) {
  if (p < 2) throw std::invalid_argument("build_periodic_operator: p must be >= 2");
  if (order < 2) throw std::invalid_argument("build_periodic_operator: order must be >= 2");

  // far images 2 <= |I|_inf <= p
  std::vector<Vec3> shifts;
  shifts.reserve((2 * p + 1) * (2 * p + 1) * (2 * p + 1) - 27);
  const double period = 2.0 * box_radius;
  for (int ix = -p; ix <= p; ++ix) {
    for (int iy = -p; iy <= p; ++iy) {
      for (int iz = -p; iz <= p; ++iz) {
        if (std::max({std::abs(ix), std::abs(iy), std::abs(iz)}) < 2) continue;
        shifts.push_back({period * ix, period * iy, period * iz});
      }
    }
  }

  const int L = order;
  const int eb = 2 * L - 1;
  const double h = 2.0 * box_radius / (L - 1);
  std::vector<double> gen(static_cast<std::size_t>(eb) * eb * eb);
  parallel_for(gen.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const int a = static_cast<int>(idx) / (eb * eb);
      const int b = (static_cast<int>(idx) / eb) % eb;
      const int c = static_cast<int>(idx) % eb;
      const Vec3 z{h * (a < L ? a : a - eb), h * (b < L ? b : b - eb), h * (c < L ? c : c - eb)};
      double acc = 0.0;
      for (const Vec3& t : shifts) {
        const double r = (z - t).norm();
        acc += erfc_screen(xi * r) / r;
      }
      gen[idx] = acc;
    }
  });

  PeriodicOperator op;
  op.order = order;
  op.box_radius = box_radius;
  op.xi = xi;
  op.p = p;
  op.spectrum = std::make_shared<CirculantSpectrum>(std::vector<int>{L, L, L}, std::move(gen));
  return op;
}

double periodic_far_energy(const PeriodicOperator& op, const std::vector<double>& root_equi) {
  return op.spectrum->quadratic_form(root_equi);
}

EnergyReport fmm_energy(const ParticleSystem& system, const EwaldConfig& config, int threads) {
  validate_config(config);
  const auto violations = validate_system(system);
  if (!violations.empty()) {
    throw std::invalid_argument("fmm_energy: invalid system: " + violations.front().rule);
  }
  threads = resolve_threads(threads);
  const bool periodic = config.p >= 2;
  const int depth = config.depth > 0 ? config.depth : default_depth(system.size());

  EnergyReport report;
  Stopwatch total_clock;
  Stopwatch clock;

  const PerfectOctree tree = build_tree(system, depth);
  const InteractionLists lists = interaction_lists(tree, periodic);
  const DiffOperator op(config.order_cheb);
  const Grid1D grid = Grid1D::chebyshev(config.order_cheb);

  const M2LCache cache =
      build_m2l_cache(tree, lists, grid, config.xi, config.svd_tol, threads);
  PeriodicOperator far_images;
  if (periodic) {
    far_images = build_periodic_operator(system.box_radius, config.order_cheb, config.xi,
                                         config.p, threads);
  }
  report.wall_times["precompute"] = clock.lap();

  const LevelExpansions expansions =
      upward_pass(tree, leaf_expansions(system, tree, op, threads), config.order_cheb);
  report.wall_times["interpolation"] = clock.lap();

  report.e_far = far_field_energy(tree, lists, expansions, cache, threads);
  report.wall_times["far_field"] = clock.lap();

  report.e_near = near_field_energy(tree, lists, system, config.xi, threads);
  report.wall_times["near_field"] = clock.lap();

  if (periodic) {
    const Grid1D equi = Grid1D::equispaced(config.order_cheb);
    const Eigen::MatrixXd to_equi = transfer_1d(equi, grid.nodes);
    const std::vector<double> root_equi =
        tensor3_apply(to_equi, to_equi, to_equi, expansions[0][0]);
    report.e_periodic_far = 0.5 * periodic_far_energy(far_images, root_equi);
  }
  report.wall_times["periodic_far"] = clock.lap();

  report.e_self = self_energy(system, config.xi);
  report.wall_times["self"] = clock.lap();

  report.e_total = report.component_sum();
  report.wall_times["total"] = total_clock.lap();
  return report;
}

}  // namespace ankh
