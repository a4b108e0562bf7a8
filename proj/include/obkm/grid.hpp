#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace obkm {

using Vec3 = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline int multi_index_order(const MultiIndex& a) { return a[0] + a[1] + a[2]; }

/**
 * Uniform periodic grid on [0, length)^3 with n points per axis.
 *
 * n must be a power of two >= 8 so that spacing = length / n is exact in
 * binary floating point (spacing * n == length holds bit-for-bit) and the
 * transforms stay in their fast radix-2 regime.  Points are x_i = i * spacing.
 * Integer wavenumbers live in {-n/2+1, ..., n/2} per axis and physical
 * wavenumbers carry the 2*pi/length scale.
 */
class Grid {
 public:
  static Grid make(int n, double length = two_pi) {
    if (n < 8 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Grid: n must be a power of two >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
      throw std::invalid_argument("Grid: length must be positive and finite");
    return Grid(n, length);
  }

  int n() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return spacing_; }
  std::size_t num_points() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  double cell_volume() const { return spacing_ * spacing_ * spacing_; }
  double volume() const { return length_ * length_ * length_; }

  // 2*pi/length; integer wavenumber k maps to physical wavenumber k * this.
  double wavenumber_scale() const { return two_pi / length_; }

  // FFT storage index -> integer wavenumber in {-n/2+1, ..., n/2}.
  int wavenumber(int fft_index) const { return fft_index <= n_ / 2 ? fft_index : fft_index - n_; }

  // Flat index is x-fastest: idx = ix + n*(iy + n*iz).
  std::size_t flat(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) + static_cast<std::size_t>(n_) * (static_cast<std::size_t>(iy) + static_cast<std::size_t>(n_) * iz);
  }
  std::array<int, 3> coords(std::size_t idx) const {
    const int ix = static_cast<int>(idx % n_);
    const int iy = static_cast<int>((idx / n_) % n_);
    const int iz = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
    return {ix, iy, iz};
  }
  Vec3 point(std::size_t idx) const {
    const auto c = coords(idx);
    return {c[0] * spacing_, c[1] * spacing_, c[2] * spacing_};
  }
  std::array<int, 3> wavevector(std::size_t idx) const {
    const auto c = coords(idx);
    return {wavenumber(c[0]), wavenumber(c[1]), wavenumber(c[2])};
  }

  // Shortest signed periodic displacement of a coordinate difference.
  double min_image(double d) const {
    d = std::remainder(d, length_);
    return d;
  }
  double min_image_distance(const Vec3& a, const Vec3& b) const {
    const double dx = min_image(a[0] - b[0]);
    const double dy = min_image(a[1] - b[1]);
    const double dz = min_image(a[2] - b[2]);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }

  bool operator==(const Grid& o) const { return n_ == o.n_ && length_ == o.length_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  Grid(int n, double length) : n_(n), length_(length), spacing_(length / n) {}

  int n_;
  double length_;
  double spacing_;
};

}  // namespace obkm
