#pragma once

//---------------------------------------------------------------------------
// Free-space Stokes kernels.
//
//   M1_jkl(y) = -y_j d_kl / |y|^3 + 3 y_j y_k y_l / |y|^5          (degree -2)
//   M2_ijkl(y) = d_ij d_kl / |y|^3
//              - 3 (y_i y_j d_kl + 2 y_j y_l d_ki + d_ij y_k y_l) / |y|^5
//              + 15 y_i y_j y_k y_l / |y|^7                        (degree -3)
//
// Raw M2 components do NOT average to zero on the unit sphere; the exact
// componentwise mean is -d_ik d_jl + d_il d_jk (from the y-moment integrals),
// which is antisymmetric in (k,l) and therefore vanishes after symmetrizing
// in (k,l).  Since the kernel only ever acts on symmetric stress, the
// cancellation property holds in the form it is used, and the sphere-average
// routine measures the (k,l)-symmetrized component.  Tests pin the raw
// nonzero means against the analytic formula.
//---------------------------------------------------------------------------

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "obkm/field.hpp"
#include "obkm/grid.hpp"

namespace obkm {

namespace detail {
inline void check_kernel_point(const Vec3& y) {
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  if (!(r2 > 0.0)) throw std::invalid_argument("kernel: evaluation at y = 0");
}
}  // namespace detail

inline double m1_component(int j, int k, int l, const Vec3& y) {
  detail::check_kernel_point(y);
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  const double r = std::sqrt(r2);
  const double r3 = r * r2, r5 = r3 * r2;
  const double dkl = (k == l) ? 1.0 : 0.0;
  return -y[j] * dkl / r3 + 3.0 * y[j] * y[k] * y[l] / r5;
}

inline double m2_component(int i, int j, int k, int l, const Vec3& y) {
  detail::check_kernel_point(y);
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  const double r = std::sqrt(r2);
  const double r3 = r * r2, r5 = r3 * r2, r7 = r5 * r2;
  const double dij = (i == j) ? 1.0 : 0.0;
  const double dkl = (k == l) ? 1.0 : 0.0;
  const double dki = (k == i) ? 1.0 : 0.0;
  return dij * dkl / r3 -
         3.0 * (y[i] * y[j] * dkl + 2.0 * y[j] * y[l] * dki + dij * y[k] * y[l]) / r5 +
         15.0 * y[i] * y[j] * y[k] * y[l] / r7;
}

// Contractions with packed symmetric stress values, used by the quadrature
// hot loops.  m2_contract returns t_ij = M2_ijkl sigma_kl as component 3*i+j.
inline Vec3 m1_contract(const Vec3& y, const std::array<double, 6>& s) {
  detail::check_kernel_point(y);
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  const double r = std::sqrt(r2);
  const double r3 = r * r2, r5 = r3 * r2;
  const double tr = s[S11] + s[S22] + s[S33];
  const double sy[3] = {s[S11] * y[0] + s[S12] * y[1] + s[S13] * y[2],
                        s[S12] * y[0] + s[S22] * y[1] + s[S23] * y[2],
                        s[S13] * y[0] + s[S23] * y[1] + s[S33] * y[2]};
  const double ysy = y[0] * sy[0] + y[1] * sy[1] + y[2] * sy[2];
  Vec3 u;
  for (int j = 0; j < 3; ++j) u[j] = -y[j] * tr / r3 + 3.0 * y[j] * ysy / r5;
  return u;
}

inline std::array<double, 9> m2_contract(const Vec3& y, const std::array<double, 6>& s) {
  detail::check_kernel_point(y);
  const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  const double r = std::sqrt(r2);
  const double r3 = r * r2, r5 = r3 * r2, r7 = r5 * r2;
  const double tr = s[S11] + s[S22] + s[S33];
  const double sy[3] = {s[S11] * y[0] + s[S12] * y[1] + s[S13] * y[2],
                        s[S12] * y[0] + s[S22] * y[1] + s[S23] * y[2],
                        s[S13] * y[0] + s[S23] * y[1] + s[S33] * y[2]};
  const double ysy = y[0] * sy[0] + y[1] * sy[1] + y[2] * sy[2];

  std::array<double, 9> t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double dij = (i == j) ? 1.0 : 0.0;
      t[3 * i + j] = dij * tr / r3 -
                     3.0 * (y[i] * y[j] * tr + 2.0 * y[j] * sy[i] + dij * ysy) / r5 +
                     15.0 * y[i] * y[j] * ysy / r7;
    }
  return t;
}

struct SphereAverage {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

// Monte-Carlo mean of the (k,l)-symmetrized M2 component over the unit
// sphere.  antipodal=true averages y and -y per draw; M2 is even so this is
// an exact no-op on the estimate (asserted by tests), kept as an option to
// demonstrate the parity cancellation.
inline SphereAverage kernel_sphere_average(int i, int j, int k, int l, std::size_t n_samples,
                                           std::uint64_t seed = 0, bool antipodal = false) {
  if (n_samples < 2) throw std::invalid_argument("kernel_sphere_average: need at least 2 samples");
  std::mt19937_64 rng(seed);
  auto gauss = [&rng]() {
    const double u1 = (static_cast<double>(rng()) + 1.0) * 0x1p-64;
    const double u2 = (static_cast<double>(rng()) + 1.0) * 0x1p-64;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  };

  double acc = 0.0, acc2 = 0.0;
  for (std::size_t t = 0; t < n_samples; ++t) {
    Vec3 y{gauss(), gauss(), gauss()};
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    if (r < 1e-12) {
      y = {1.0, 0.0, 0.0};
    } else {
      for (auto& v : y) v /= r;
    }
    double val = 0.5 * (m2_component(i, j, k, l, y) + m2_component(i, j, l, k, y));
    if (antipodal) {
      const Vec3 ym{-y[0], -y[1], -y[2]};
      val = 0.5 * (val + 0.5 * (m2_component(i, j, k, l, ym) + m2_component(i, j, l, k, ym)));
    }
    acc += val;
    acc2 += val * val;
  }
  const double mean = acc / n_samples;
  const double var = std::max(0.0, acc2 / n_samples - mean * mean);
  return {mean, std::sqrt(var / n_samples), n_samples};
}

// Same estimator on the raw component, exposing the nonzero means
// -d_ik d_jl + d_il d_jk that the symmetrization cancels.
inline SphereAverage kernel_raw_sphere_average(int i, int j, int k, int l, std::size_t n_samples,
                                               std::uint64_t seed = 0) {
  if (n_samples < 2)
    throw std::invalid_argument("kernel_raw_sphere_average: need at least 2 samples");
  std::mt19937_64 rng(seed);
  auto gauss = [&rng]() {
    const double u1 = (static_cast<double>(rng()) + 1.0) * 0x1p-64;
    const double u2 = (static_cast<double>(rng()) + 1.0) * 0x1p-64;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  };

  double acc = 0.0, acc2 = 0.0;
  for (std::size_t t = 0; t < n_samples; ++t) {
    Vec3 y{gauss(), gauss(), gauss()};
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    if (r < 1e-12) {
      y = {1.0, 0.0, 0.0};
    } else {
      for (auto& v : y) v /= r;
    }
    const double val = m2_component(i, j, k, l, y);
    acc += val;
    acc2 += val * val;
  }
  const double mean = acc / n_samples;
  const double var = std::max(0.0, acc2 / n_samples - mean * mean);
  return {mean, std::sqrt(var / n_samples), n_samples};
}

}  // namespace obkm
