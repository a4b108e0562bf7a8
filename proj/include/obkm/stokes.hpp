#pragma once

//---------------------------------------------------------------------------
// Creeping-flow velocity from stress: solve
//
//   0 = -grad p + nu_s lap u + div sigma,   div u = 0
//
// mode by mode.  With f_hat = i k . sigma_hat the divergence-free projection
// leaves u_hat = P(k) f_hat / (nu_s |k|^2), P(k) = I - k k^T/|k|^2, and the
// gradient convention (grad u)_ij = d_i u_j gives (grad u)_hat_ij = i k_i u_hat_j.
// The k=0 mode carries no velocity (zero-mean gauge), so u scales exactly as
// 1/nu_s and constant stress produces no flow.
//---------------------------------------------------------------------------

#include <complex>
#include <stdexcept>

#include "obkm/fft.hpp"
#include "obkm/field.hpp"
#include "obkm/grid.hpp"

namespace obkm {

struct StokesFlowHat {
  SpectralField<3> u;
  SpectralField<9> grad_u;  // component 3*i + j = d_i u_j
};

struct StokesFlow {
  VectorField u;
  TensorField grad_u;
};

inline StokesFlowHat solve_stokes_hat(const SpectralField<6>& sigma_hat, double nu_s) {
  if (!(nu_s > 0.0)) throw std::invalid_argument("solve_stokes: nu_s must be positive");
  const Grid& g = sigma_hat.grid();
  const std::size_t np = g.num_points();
  const double s = g.wavenumber_scale();

  StokesFlowHat flow{SpectralField<3>(g), SpectralField<9>(g)};
  for (std::size_t idx = 0; idx < np; ++idx) {
    const auto kv = g.wavevector(idx);
    const double k[3] = {kv[0] * s, kv[1] * s, kv[2] * s};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) continue;

    std::complex<double> f[3];
    for (int j = 0; j < 3; ++j) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < 3; ++i) acc += std::complex<double>(0.0, k[i]) * sigma_hat(sym_flat(i, j), idx);
      f[j] = acc;
    }
    std::complex<double> kf = k[0] * f[0] + k[1] * f[1] + k[2] * f[2];
    for (int j = 0; j < 3; ++j) {
      const std::complex<double> uj = (f[j] - k[j] * kf / k2) / (nu_s * k2);
      flow.u(j, idx) = uj;
      for (int i = 0; i < 3; ++i) flow.grad_u(3 * i + j, idx) = std::complex<double>(0.0, k[i]) * uj;
    }
  }
  return flow;
}

inline StokesFlow solve_stokes(const SymTensorField& sigma, double nu_s) {
  const auto hat = solve_stokes_hat(forward_transform(sigma), nu_s);
  return {inverse_transform(hat.u), inverse_transform(hat.grad_u)};
}

// Full-tensor overload used by the raw (unsymmetrized) evolution path; the
// divergence of a general tensor is d_i t_ij.
inline StokesFlowHat solve_stokes_hat(const SpectralField<9>& t_hat, double nu_s) {
  if (!(nu_s > 0.0)) throw std::invalid_argument("solve_stokes: nu_s must be positive");
  const Grid& g = t_hat.grid();
  const std::size_t np = g.num_points();
  const double s = g.wavenumber_scale();

  StokesFlowHat flow{SpectralField<3>(g), SpectralField<9>(g)};
  for (std::size_t idx = 0; idx < np; ++idx) {
    const auto kv = g.wavevector(idx);
    const double k[3] = {kv[0] * s, kv[1] * s, kv[2] * s};
    const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if (k2 == 0.0) continue;

    std::complex<double> f[3];
    for (int j = 0; j < 3; ++j) {
      std::complex<double> acc = 0.0;
      for (int i = 0; i < 3; ++i) acc += std::complex<double>(0.0, k[i]) * t_hat(3 * i + j, idx);
      f[j] = acc;
    }
    std::complex<double> kf = k[0] * f[0] + k[1] * f[1] + k[2] * f[2];
    for (int j = 0; j < 3; ++j) {
      const std::complex<double> uj = (f[j] - k[j] * kf / k2) / (nu_s * k2);
      flow.u(j, idx) = uj;
      for (int i = 0; i < 3; ++i) flow.grad_u(3 * i + j, idx) = std::complex<double>(0.0, k[i]) * uj;
    }
  }
  return flow;
}

}  // namespace obkm
