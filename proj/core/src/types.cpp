#include "ankh/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ankh {

int default_depth(std::size_t particle_count) {
  constexpr double target_per_leaf = 64.0;
  if (particle_count <= target_per_leaf) return 1;
  double levels = std::log(static_cast<double>(particle_count) / target_per_leaf) / std::log(8.0);
  return std::max(1, static_cast<int>(std::ceil(levels - 1e-12)));
}

std::vector<Violation> validate_system(const ParticleSystem& system) {
  std::vector<Violation> out;
  constexpr std::size_t kSystem = static_cast<std::size_t>(-1);

  if (!(system.box_radius > 0.0) || !std::isfinite(system.box_radius)) {
    out.push_back({kSystem, "box_radius must be positive and finite"});
  }
  if (system.positions.size() != system.sources.size()) {
    out.push_back({kSystem, "positions and sources must have equal length"});
    return out;
  }

  const double r = system.box_radius;
  for (std::size_t i = 0; i < system.positions.size(); ++i) {
    const Vec3& u = system.positions[i];
    const MultipoleSource& s = system.sources[i];
    bool finite = std::isfinite(u.x) && std::isfinite(u.y) && std::isfinite(u.z) &&
                  std::isfinite(s.q) && std::isfinite(s.mu.x) && std::isfinite(s.mu.y) &&
                  std::isfinite(s.mu.z);
    for (double t : s.theta.m) finite = finite && std::isfinite(t);
    if (!finite) {
      out.push_back({i, "non-finite coordinate or moment"});
      continue;
    }
    if (std::abs(u.x) > r || std::abs(u.y) > r || std::abs(u.z) > r) {
      out.push_back({i, "outside box"});
    }
  }

  // exact duplicates only; sort an index view to avoid the quadratic scan
  std::vector<std::size_t> order(system.positions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Vec3& pa = system.positions[a];
    const Vec3& pb = system.positions[b];
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return pa.z < pb.z;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const Vec3& a = system.positions[order[k - 1]];
    const Vec3& b = system.positions[order[k]];
    if (a.x == b.x && a.y == b.y && a.z == b.z) {
      out.push_back({std::max(order[k - 1], order[k]), "duplicate position"});
    }
  }
  return out;
}

void validate_config(const EwaldConfig& config) {
  if (!(config.xi > 0.0) || !std::isfinite(config.xi)) {
    throw std::invalid_argument("xi must be positive");
  }
  if (config.p < 0 || config.p == 1) {
    throw std::invalid_argument("image half-width p must be 0 (open) or >= 2 (periodic)");
  }
  if (config.order_cheb < 2) throw std::invalid_argument("order_cheb must be >= 2");
  if (config.order_equi < 2) throw std::invalid_argument("order_equi must be >= 2");
  if (config.depth < 0) throw std::invalid_argument("depth must be >= 1 (or 0 for automatic)");
  if (!(config.svd_tol > 0.0) || !(config.svd_tol < 1.0)) {
    throw std::invalid_argument("svd_tol must lie in (0, 1)");
  }
  if (config.recip_cutoff < 1) throw std::invalid_argument("recip_cutoff must be >= 1");
}

}  // namespace ankh
