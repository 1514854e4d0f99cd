#include "ankh/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace ankh {

namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955125739;
constexpr double kInvSqrtPi = 0.5641895835477562869;

// erf Maclaurin series, valid and fully converged for |z| <= 0.5
double erf_series(double z) {
  const double z2 = z * z;
  double term = z;
  double sum = 0.0;
  for (int n = 0; n < 13; ++n) {
    sum += term / (2 * n + 1);
    term *= -z2 / (n + 1);
  }
  return kTwoOverSqrtPi * sum;
}

// radial factors up to the requested order (<= 4)
inline void radial(double r, double xi, int order, double* b) {
  const double z = xi * r;
  b[0] = erfc_screen(z) / r;
  if (order == 0) return;
  const double inv_r2 = 1.0 / (r * r);
  const double gauss = kTwoOverSqrtPi * xi * std::exp(-z * z);
  double a = gauss;  // (2 xi^2)^n * gauss at n = 0
  const double two_xi2 = 2.0 * xi * xi;
  for (int n = 1; n <= order; ++n) {
    b[n] = ((2 * n - 1) * b[n - 1] + a) * inv_r2;
    a *= two_xi2;
  }
}

inline int moment_order(const MultipoleSource& s) {
  if (s.theta.frobenius2() != 0.0) return 2;
  if (s.mu.x != 0.0 || s.mu.y != 0.0 || s.mu.z != 0.0) return 1;
  return 0;
}

}  // namespace

double erfc_screen(double z) {
  if (z >= 0.0 && z <= 0.5) return 1.0 - erf_series(z);
  return std::erfc(z);
}

std::array<double, 5> screened_radial(double r, double xi) {
  if (!(r > 0.0)) throw std::domain_error("screened_radial: r must be positive");
  std::array<double, 5> b{};
  radial(r, xi, 4, b.data());
  return b;
}

double h_eval(const Vec3& x, const Vec3& y, double xi) {
  const Vec3 d = x - y;
  const double r2 = d.squared_norm();
  if (r2 == 0.0) throw std::domain_error("h_eval: coincident points");
  const double r = std::sqrt(r2);
  return erfc_screen(xi * r) / r;
}

int DerivativeTensor::flat_index(const std::array<int, 3>& gamma) {
  // multi-indices of total order <= 4, ordered by total order then lexicographically
  int n = gamma[0] + gamma[1] + gamma[2];
  if (gamma[0] < 0 || gamma[1] < 0 || gamma[2] < 0 || n > 4) return -1;
  int base = 0;
  for (int m = 0; m < n; ++m) base += (m + 1) * (m + 2) / 2;
  int offset = 0;
  for (int ax = 0; ax < gamma[0]; ++ax) offset += n - ax + 1;
  offset += gamma[1];
  // offset enumerates (a, b, n-a-b) with a ascending, b ascending
  return base + offset;
}

DerivativeTensor::DerivativeTensor(const Vec3& x, const Vec3& y, double xi) {
  const Vec3 rv = x - y;
  const double r2 = rv.squared_norm();
  if (r2 == 0.0) throw std::domain_error("DerivativeTensor: coincident points");
  const double r = std::sqrt(r2);

  double b[5];
  radial(r, xi, 4, b);
  // F[m] = (1/r d/dr)^m H = (-1)^m b[m]
  const double F[5] = {b[0], -b[1], b[2], -b[3], b[4]};
  const double rc[3] = {rv.x, rv.y, rv.z};

  for (int n0 = 0; n0 <= 4; ++n0) {
    for (int n1 = 0; n1 + n0 <= 4; ++n1) {
      for (int n2 = 0; n2 + n1 + n0 <= 4; ++n2) {
        const std::array<int, 3> gamma{n0, n1, n2};
        const int n = n0 + n1 + n2;
        int dirs[4];
        int c = 0;
        for (int ax = 0; ax < 3; ++ax) {
          for (int rep = 0; rep < gamma[ax]; ++rep) dirs[c++] = ax;
        }
        // sum over partitions of the n directions into delta-pairs and
        // r-component singletons; a partition with p pairs weighs F[n - p]
        double total = 0.0;
        auto rec = [&](auto&& self, unsigned mask, int pairs, double rprod) -> void {
          if (mask == (1u << n) - 1u) {
            total += rprod * F[n - pairs];
            return;
          }
          int a = 0;
          while (mask & (1u << a)) ++a;
          self(self, mask | (1u << a), pairs, rprod * rc[dirs[a]]);
          for (int bidx = a + 1; bidx < n; ++bidx) {
            if (mask & (1u << bidx)) continue;
            if (dirs[a] == dirs[bidx]) {
              self(self, mask | (1u << a) | (1u << bidx), pairs + 1, rprod);
            }
          }
        };
        if (n == 0) {
          total = F[0];
        } else {
          rec(rec, 0u, 0, 1.0);
        }
        d_[flat_index(gamma)] = total;
      }
    }
  }
}

double DerivativeTensor::gradient(const std::array<int, 3>& gamma) const {
  const int idx = flat_index(gamma);
  if (idx < 0) throw std::out_of_range("DerivativeTensor: multi-index order > 4");
  return d_[idx];
}

double DerivativeTensor::get(const std::array<int, 3>& alpha,
                             const std::array<int, 3>& beta) const {
  const int oa = alpha[0] + alpha[1] + alpha[2];
  const int ob = beta[0] + beta[1] + beta[2];
  if (oa > 2 || ob > 2) throw std::out_of_range("DerivativeTensor: |alpha|,|beta| <= 2");
  const std::array<int, 3> gamma{alpha[0] + beta[0], alpha[1] + beta[1], alpha[2] + beta[2]};
  const double sign = (ob % 2 == 0) ? 1.0 : -1.0;
  return sign * gradient(gamma);
}

double pair_interaction_charges(const Vec3& xa, double qa,
                                const Vec3& xb, double qb, double xi) {
  const Vec3 d = xa - xb;
  const double r2 = d.squared_norm();
  if (r2 == 0.0) throw std::domain_error("pair_interaction: coincident points");
  const double r = std::sqrt(r2);
  return qa * qb * erfc_screen(xi * r) / r;
}

double pair_interaction(const Vec3& xa, const MultipoleSource& sa,
                        const Vec3& xb, const MultipoleSource& sb, double xi) {
  const Vec3 rv = xa - xb;
  const double r2 = rv.squared_norm();
  if (r2 == 0.0) throw std::domain_error("pair_interaction: coincident points");

  const int oa = moment_order(sa);
  const int ob = moment_order(sb);
  const int order = oa + ob;
  const double r = std::sqrt(r2);

  double b[5];
  radial(r, xi, order, b);

  double e = sa.q * sb.q * b[0];
  if (order == 0) return e;

  const double F1 = -b[1];
  const double uar = sa.mu.dot(rv);
  const double ubr = sb.mu.dot(rv);
  const double tra = sa.theta.trace();
  const double trb = sb.theta.trace();

  e += (sb.q * uar - sa.q * ubr) * F1;
  e += (sb.q * tra + sa.q * trb) * F1;
  if (order == 1) return e;

  const double F2 = b[2];
  const Vec3 Qar = sa.theta.mul(rv);
  const Vec3 Qbr = sb.theta.mul(rv);
  const double raQar = Qar.dot(rv);
  const double rbQbr = Qbr.dot(rv);

  e += -(sa.mu.dot(sb.mu) * F1 + uar * ubr * F2);
  e += (sb.q * raQar + sa.q * rbQbr) * F2;
  if (order == 2) return e;

  const double F3 = -b[3];
  e += (2.0 * sa.mu.dot(Qbr) + uar * trb) * F2 + uar * rbQbr * F3;
  e -= (2.0 * sb.mu.dot(Qar) + ubr * tra) * F2 + ubr * raQar * F3;
  if (order == 3) return e;

  const double F4 = b[4];
  e += (tra * trb + 2.0 * sa.theta.contract(sb.theta)) * F2;
  e += (tra * rbQbr + trb * raQar + 4.0 * Qar.dot(Qbr)) * F3;
  e += raQar * rbQbr * F4;
  return e;
}

double self_energy(const ParticleSystem& system, double xi) {
  double acc = 0.0;
  for (const MultipoleSource& s : system.sources) {
    acc += s.q * s.q + (2.0 * xi * xi / 3.0) * s.mu.squared_norm() +
           (8.0 * xi * xi * xi * xi / 5.0) * s.theta.frobenius2();
  }
  return -xi * kInvSqrtPi * acc;
}

}  // namespace ankh
