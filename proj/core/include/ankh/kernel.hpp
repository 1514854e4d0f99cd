#pragma once

#include <array>

#include "ankh/types.hpp"

namespace ankh {

/// erfc with a Maclaurin fast path for small arguments. The screened kernel is
/// evaluated billions of times at xi*r << 1, where libm erfc dominates the cost.
double erfc_screen(double z);

/// Radial factors of the screened Coulomb kernel H(r) = erfc(xi r)/r:
///   b[n] = (-1/r d/dr)^n H, i.e. the usual upward recurrence
///   b[n+1] = ((2n+1) b[n] + (2 xi^2)^(n+1) exp(-xi^2 r^2) / (xi sqrt(pi))) / r^2.
/// Cartesian derivatives follow from (1/r d/dr)^n H = (-1)^n b[n].
std::array<double, 5> screened_radial(double r, double xi);

/// H(x, y) = erfc(xi |x-y|) / |x-y|. Throws std::domain_error at x == y.
double h_eval(const Vec3& x, const Vec3& y, double xi);

/// All partial derivatives d^alpha_x d^beta_y H(x, y) with |alpha|, |beta| <= 2.
/// Since H is translation invariant, d^alpha_x d^beta_y H = (-1)^|beta| times
/// the gradient d^(alpha+beta) of f(r) = H(r) at r = x - y; entries are held as
/// the 35 distinct multi-index gradients of total order <= 4.
class DerivativeTensor {
 public:
  static constexpr int kEntryCount = 35;

  DerivativeTensor(const Vec3& x, const Vec3& y, double xi);

  /// d^gamma f(x - y), |gamma| <= 4, gamma = (nx, ny, nz).
  double gradient(const std::array<int, 3>& gamma) const;

  /// d^alpha_x d^beta_y H(x, y), |alpha| <= 2, |beta| <= 2.
  double get(const std::array<int, 3>& alpha, const std::array<int, 3>& beta) const;

  static int flat_index(const std::array<int, 3>& gamma);

 private:
  std::array<double, kEntryCount> d_{};
};

/// Full multipole pair interaction D_a D_b H(xa, xb) where
/// D = q + mu . grad + Theta : grad^2 acts on the respective argument slot.
/// Throws std::domain_error at xa == xb.
double pair_interaction(const Vec3& xa, const MultipoleSource& sa,
                        const Vec3& xb, const MultipoleSource& sb, double xi);

/// Charge-only specialization used in hot loops: qa qb H(xa, xb).
double pair_interaction_charges(const Vec3& xa, double qa,
                                const Vec3& xb, double qb, double xi);

/// -xi/sqrt(pi) * sum_x (q^2 + 2 xi^2/3 |mu|^2 + 8 xi^4/5 Theta:Theta).
double self_energy(const ParticleSystem& system, double xi);

}  // namespace ankh
