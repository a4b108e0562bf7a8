#pragma once

// Stress initial-condition families: a single shear mode, an isolated
// Gaussian bump (the free-space comparison case), a random band-limited
// field scaled to a target Sobolev size, and a constant tensor.

#include <array>
#include <cmath>
#include <stdexcept>

#include "obkm/field.hpp"
#include "obkm/grid.hpp"
#include "obkm/random_fields.hpp"

namespace obkm {

// sigma_12 = sigma_21 = amplitude * sin(k . x), everything else zero.
inline SymTensorField single_mode_ic(const Grid& g, double amplitude, const MultiIndex& kvec) {
  SymTensorField sig(g);
  const double s = g.wavenumber_scale();
  for (std::size_t i = 0; i < g.num_points(); ++i) {
    const auto p = g.point(i);
    sig(S12, i) = amplitude * std::sin(s * (kvec[0] * p[0] + kvec[1] * p[1] + kvec[2] * p[2]));
  }
  return sig;
}

// amplitude * direction * exp(-d^2/radius^2) with d the minimum-image
// distance to the center.
inline SymTensorField gaussian_bump_ic(const Grid& g, const Vec3& center, double radius,
                                       double amplitude, const std::array<double, 6>& direction) {
  if (!(radius > 0.0)) throw std::invalid_argument("gaussian_bump_ic: radius must be positive");
  SymTensorField sig(g);
  for (std::size_t i = 0; i < g.num_points(); ++i) {
    const double d = g.min_image_distance(g.point(i), center);
    const double v = amplitude * std::exp(-d * d / (radius * radius));
    for (int c = 0; c < 6; ++c) sig(c, i) = v * direction[c];
  }
  return sig;
}

inline SymTensorField random_ic(const Grid& g, std::uint64_t seed, int band_limit, int m,
                                double target_hm) {
  auto sig = random_sym_tensor_field(g, {seed, band_limit, 1.0, FieldRank::sym_tensor});
  scale_to_hm(sig, m, target_hm);
  return sig;
}

inline SymTensorField constant_ic(const Grid& g, const std::array<double, 6>& value) {
  SymTensorField sig(g);
  for (int c = 0; c < 6; ++c) {
    auto span = sig.comp(c);
    for (auto& v : span) v = value[c];
  }
  return sig;
}

}  // namespace obkm
