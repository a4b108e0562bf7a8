#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "obkm/grid.hpp"

namespace obkm {

// Symmetric 3x3 tensors are stored as 6 components in this fixed order.
// The order also defines the checkpoint payload layout, so do not reorder.
enum SymComp : int { S11 = 0, S22 = 1, S33 = 2, S12 = 3, S13 = 4, S23 = 5 };

inline constexpr std::array<std::pair<int, int>, 6> sym_index_pairs = {
    {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

// 6-component index for an (i,j) pair of a symmetric tensor.
inline constexpr int sym_flat(int i, int j) {
  constexpr int map[3][3] = {{S11, S12, S13}, {S12, S22, S23}, {S13, S23, S33}};
  return map[i][j];
}

// Pointwise Frobenius magnitudes sum squares over all 3x3 entries, so the
// packed off-diagonal components of a symmetric tensor count twice.  Rank-3
// gradients of symmetric tensors (18 components, gradient() layout: component
// 3*c + d holds d_d sigma_c) inherit the same doubling.  Every other
// component count is unweighted.
template <std::size_t NComp>
constexpr std::array<double, NComp> component_weights() {
  std::array<double, NComp> w{};
  for (auto& v : w) v = 1.0;
  if constexpr (NComp == 6) {
    w[S12] = w[S13] = w[S23] = 2.0;
  } else if constexpr (NComp == 18) {
    for (int c : {S12, S13, S23})
      for (int d = 0; d < 3; ++d) w[3 * c + d] = 2.0;
  }
  return w;
}

/**
 * Real-valued field with NComp components on a periodic grid.
 *
 * Storage is component-major; within a component the layout is row-major with
 * x fastest, matching Grid::flat and the on-disk checkpoint payload.
 */
template <std::size_t NComp>
class Field {
 public:
  explicit Field(const Grid& grid) : grid_(grid), data_(NComp * grid.num_points(), 0.0) {}

  static constexpr std::size_t num_components = NComp;

  const Grid& grid() const { return grid_; }

  std::span<double> comp(std::size_t c) { return {data_.data() + c * grid_.num_points(), grid_.num_points()}; }
  std::span<const double> comp(std::size_t c) const {
    return {data_.data() + c * grid_.num_points(), grid_.num_points()};
  }

  double& operator()(std::size_t c, std::size_t idx) { return data_[c * grid_.num_points() + idx]; }
  double operator()(std::size_t c, std::size_t idx) const { return data_[c * grid_.num_points() + idx]; }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }

  Field& operator+=(const Field& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same_grid(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Field& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field f) { return f *= s; }

  // this += s * o, the only fused update the integrator needs.
  void add_scaled(const Field& o, double s) {
    check_same_grid(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
  }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

 private:
  void check_same_grid(const Field& o) const {
    if (grid_ != o.grid_) throw std::invalid_argument("Field: grid mismatch");
  }

  Grid grid_;
  std::vector<double> data_;
};

using ScalarField = Field<1>;
using VectorField = Field<3>;
using SymTensorField = Field<6>;   // symmetric 3x3, SymComp order
using TensorField = Field<9>;      // full 3x3, component c = 3*i + j for entry (i,j)

/** Complex spectral coefficients, same component/storage conventions as Field. */
template <std::size_t NComp>
class SpectralField {
 public:
  explicit SpectralField(const Grid& grid) : grid_(grid), data_(NComp * grid.num_points(), 0.0) {}

  static constexpr std::size_t num_components = NComp;

  const Grid& grid() const { return grid_; }

  std::span<std::complex<double>> comp(std::size_t c) {
    return {data_.data() + c * grid_.num_points(), grid_.num_points()};
  }
  std::span<const std::complex<double>> comp(std::size_t c) const {
    return {data_.data() + c * grid_.num_points(), grid_.num_points()};
  }

  std::complex<double>& operator()(std::size_t c, std::size_t idx) { return data_[c * grid_.num_points() + idx]; }
  const std::complex<double>& operator()(std::size_t c, std::size_t idx) const {
    return data_[c * grid_.num_points() + idx];
  }

  std::span<std::complex<double>> raw() { return data_; }
  std::span<const std::complex<double>> raw() const { return data_; }

 private:
  Grid grid_;
  std::vector<std::complex<double>> data_;
};

// Expand packed symmetric storage to a full 3x3 tensor field and back.
inline TensorField sym_expand(const SymTensorField& s) {
  TensorField t(s.grid());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto dst = t.comp(3 * i + j);
      auto src = s.comp(sym_flat(i, j));
      std::copy(src.begin(), src.end(), dst.begin());
    }
  return t;
}

// (t + t^T)/2 packed into 6 components.
inline SymTensorField sym_pack(const TensorField& t) {
  SymTensorField s(t.grid());
  const std::size_t np = t.grid().num_points();
  for (auto [i, j] : sym_index_pairs) {
    auto dst = s.comp(sym_flat(i, j));
    auto a = t.comp(3 * i + j);
    auto b = t.comp(3 * j + i);
    for (std::size_t p = 0; p < np; ++p) dst[p] = 0.5 * (a[p] + b[p]);
  }
  return s;
}

// Largest pointwise |t_ij - t_ji| over the grid.
inline double max_asymmetry(const TensorField& t) {
  double worst = 0.0;
  const std::size_t np = t.grid().num_points();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      auto a = t.comp(3 * i + j);
      auto b = t.comp(3 * j + i);
      for (std::size_t p = 0; p < np; ++p) worst = std::max(worst, std::abs(a[p] - b[p]));
    }
  return worst;
}

}  // namespace obkm
