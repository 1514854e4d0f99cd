#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ankh {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Symmetric 3x3 matrix, upper triangle stored as xx, xy, xz, yy, yz, zz.
struct SymMat3 {
  std::array<double, 6> m{0, 0, 0, 0, 0, 0};

  static SymMat3 zero() { return {}; }

  double operator()(int i, int j) const {
    static constexpr int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return m[idx[i][j]];
  }
  double& at(int i, int j) {
    static constexpr int idx[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    return m[idx[i][j]];
  }

  double trace() const { return m[0] + m[3] + m[5]; }

  Vec3 mul(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[1] * v.x + m[3] * v.y + m[4] * v.z,
            m[2] * v.x + m[4] * v.y + m[5] * v.z};
  }

  /// Full contraction sum_ij A_ij B_ij (off-diagonal entries counted twice).
  double contract(const SymMat3& o) const {
    return m[0] * o.m[0] + m[3] * o.m[3] + m[5] * o.m[5] +
           2.0 * (m[1] * o.m[1] + m[2] * o.m[2] + m[4] * o.m[4]);
  }

  double frobenius2() const { return contract(*this); }
};

/// Point-multipole source: charge, dipole moment and symmetric quadrupole
/// moment. The quadrupole acts through Theta : grad^2 = sum_ij Theta_ij d_i d_j.
struct MultipoleSource {
  double q = 0.0;
  Vec3 mu{};
  SymMat3 theta{};

  bool is_charge_only() const {
    return mu.x == 0 && mu.y == 0 && mu.z == 0 && theta.frobenius2() == 0;
  }
};

/// A single point cloud inside the centered cubic box [-box_radius, box_radius]^3.
/// The periodic replication period is 2 * box_radius per axis.
struct ParticleSystem {
  std::vector<Vec3> positions;
  std::vector<MultipoleSource> sources;
  double box_radius = 1.0;

  std::size_t size() const { return positions.size(); }
};

struct EwaldConfig {
  double xi = 0.01;     ///< Ewald splitting parameter
  int p = 15;           ///< image half-width; 0 = open boundary, >= 2 for periodic runs
  int order_cheb = 8;   ///< 1D Chebyshev interpolation order L_c
  int order_equi = 8;   ///< 1D equispaced interpolation order L_u
  int depth = 0;        ///< octree depth E; 0 = choose from particle count
  double svd_tol = 1e-7;   ///< relative singular-value cutoff for M2L compression
  int recip_cutoff = 12;   ///< max |m|_inf in the Ewald reference reciprocal sum
};

/// E = max(1, ceil(log8(N / 64))): targets ~64 particles per leaf.
int default_depth(std::size_t particle_count);

struct Violation {
  std::size_t index;   ///< offending particle, or size_t(-1) for system-wide rules
  std::string rule;
};

/// Diagnostic check of the ParticleSystem invariants. Empty result means valid.
std::vector<Violation> validate_system(const ParticleSystem& system);

/// Throws std::invalid_argument naming the violated config invariant, if any.
void validate_config(const EwaldConfig& config);

/// Energy components use the unordered-pair normalization: each distinct pair
/// (and each pair-with-image instance) is counted once, so e_total carries the
/// global 1/2 of the ordered double sum.
struct EnergyReport {
  double e_total = 0.0;
  double e_self = 0.0;
  double e_near = 0.0;
  double e_far = 0.0;
  double e_periodic_far = 0.0;   ///< zero for the FFT engine (folded into e_far)
  double e_reciprocal = 0.0;     ///< Ewald reference only
  std::map<std::string, double> wall_times;   ///< phase -> seconds

  double component_sum() const {
    return e_self + e_near + e_far + e_periodic_far + e_reciprocal;
  }
};

}  // namespace ankh
