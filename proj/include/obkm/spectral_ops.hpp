#pragma once

//---------------------------------------------------------------------------
// Derivatives, divergence and dealiasing, all acting on spectral coefficients.
// The derivative multiplier at integer wavenumber k = (k1,k2,k3) and
// multi-index alpha is (i*k1*s)^a1 (i*k2*s)^a2 (i*k3*s)^a3 with s = 2pi/L,
// applied exactly as stated; repeated application composes additively in
// alpha by construction.
//---------------------------------------------------------------------------

#include <complex>
#include <stdexcept>

#include "obkm/field.hpp"
#include "obkm/fft.hpp"
#include "obkm/grid.hpp"

namespace obkm {

namespace detail {
inline std::complex<double> ik_power(double k, int a) {
  // (i k)^a for small non-negative a, cycling the i^a phase explicitly.
  double mag = 1.0;
  for (int q = 0; q < a; ++q) mag *= k;
  switch (a & 3) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}
}  // namespace detail

template <std::size_t NComp>
SpectralField<NComp> spectral_derivative(const SpectralField<NComp>& f, const MultiIndex& alpha) {
  if (alpha[0] < 0 || alpha[1] < 0 || alpha[2] < 0)
    throw std::invalid_argument("spectral_derivative: multi-index must be non-negative");
  const Grid& g = f.grid();
  const std::size_t np = g.num_points();
  const double s = g.wavenumber_scale();

  SpectralField<NComp> out(g);
  for (std::size_t c = 0; c < NComp; ++c) {
    auto src = f.comp(c);
    auto dst = out.comp(c);
    for (std::size_t idx = 0; idx < np; ++idx) {
      const auto k = g.wavevector(idx);
      std::complex<double> m = detail::ik_power(k[0] * s, alpha[0]) *
                               detail::ik_power(k[1] * s, alpha[1]) *
                               detail::ik_power(k[2] * s, alpha[2]);
      dst[idx] = m * src[idx];
    }
  }
  return out;
}

// Gradient of every component: output component 3*c + d holds d_d f_c.
template <std::size_t NComp>
SpectralField<3 * NComp> gradient_hat(const SpectralField<NComp>& fhat) {
  const Grid& g = fhat.grid();
  const std::size_t np = g.num_points();
  const double s = g.wavenumber_scale();

  SpectralField<3 * NComp> ghat(g);
  for (std::size_t c = 0; c < NComp; ++c) {
    auto src = fhat.comp(c);
    for (int d = 0; d < 3; ++d) {
      auto dst = ghat.comp(3 * c + d);
      for (std::size_t idx = 0; idx < np; ++idx) {
        const auto k = g.wavevector(idx);
        dst[idx] = std::complex<double>(0.0, k[d] * s) * src[idx];
      }
    }
  }
  return ghat;
}

template <std::size_t NComp>
Field<3 * NComp> gradient(const Field<NComp>& f) {
  return inverse_transform(gradient_hat(forward_transform(f)));
}

// (div sigma)_j = d_i sigma_ij for symmetric sigma, computed spectrally.
inline SpectralField<3> divergence_sym_tensor_hat(const SpectralField<6>& shat) {
  const Grid& g = shat.grid();
  const std::size_t np = g.num_points();
  const double s = g.wavenumber_scale();

  SpectralField<3> out(g);
  for (std::size_t idx = 0; idx < np; ++idx) {
    const auto kv = g.wavevector(idx);
    const std::complex<double> ik[3] = {{0.0, kv[0] * s}, {0.0, kv[1] * s}, {0.0, kv[2] * s}};
    for (int j = 0; j < 3; ++j) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < 3; ++i) acc += ik[i] * shat(sym_flat(i, j), idx);
      out(j, idx) = acc;
    }
  }
  return out;
}

inline VectorField divergence_sym_tensor(const SymTensorField& sigma) {
  return inverse_transform(divergence_sym_tensor_hat(forward_transform(sigma)));
}

// Classical 2/3-rule truncation: zero every coefficient whose integer
// wavenumber exceeds n/3 in any axis.  Quadratic products of fields that
// survive this cut are alias-free on the grid.
template <std::size_t NComp>
void dealias(SpectralField<NComp>& f) {
  const Grid& g = f.grid();
  const int kmax = g.n() / 3;
  const std::size_t np = g.num_points();
  for (std::size_t idx = 0; idx < np; ++idx) {
    const auto k = g.wavevector(idx);
    if (std::abs(k[0]) > kmax || std::abs(k[1]) > kmax || std::abs(k[2]) > kmax) {
      for (std::size_t c = 0; c < NComp; ++c) f(c, idx) = 0.0;
    }
  }
}

}  // namespace obkm
