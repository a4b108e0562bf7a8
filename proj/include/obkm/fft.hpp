#pragma once

//---------------------------------------------------------------------------
// Discrete Fourier transforms between Field and SpectralField, built on
// FFTW3's complex-to-complex interface.
//
// Conventions owned by this project (FFTW only supplies the DFT):
//   forward:  fhat_k = (1/n^3) * sum_x f(x) exp(-i k . x * 2pi/L)
//   inverse:  f(x)   =          sum_k fhat_k exp(+i k . x * 2pi/L)
// so coefficients are Fourier-series coefficients and inverse(forward) is the
// identity up to rounding.  Integer wavenumbers follow Grid::wavenumber.
//
// Thread safety: fftw plan creation/destruction is serialized behind a
// mutex and plans are cached per grid size; execution uses the new-array
// interface on fftw_malloc-aligned scratch, which FFTW guarantees re-entrant.
//---------------------------------------------------------------------------

#include <complex>
#include <cstring>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "obkm/field.hpp"
#include "obkm/grid.hpp"

namespace obkm {
namespace detail {

struct FftwPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plans are created once per n on aligned scratch and reused via
// fftw_execute_dft with per-call buffers of identical alignment.
inline const FftwPlans& plans_for(int n) {
  static std::mutex mu;
  static std::map<int, FftwPlans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const std::size_t np = static_cast<std::size_t>(n) * n * n;
  fftw_complex* in = fftw_alloc_complex(np);
  fftw_complex* out = fftw_alloc_complex(np);
  FftwPlans p;
  p.forward = fftw_plan_dft_3d(n, n, n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_3d(n, n, n, in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(in);
  fftw_free(out);
  return cache.emplace(n, p).first->second;
}

class AlignedScratch {
 public:
  explicit AlignedScratch(std::size_t np)
      : in_(fftw_alloc_complex(np)), out_(fftw_alloc_complex(np)) {}
  ~AlignedScratch() {
    fftw_free(in_);
    fftw_free(out_);
  }
  AlignedScratch(const AlignedScratch&) = delete;
  AlignedScratch& operator=(const AlignedScratch&) = delete;

  fftw_complex* in() { return in_; }
  fftw_complex* out() { return out_; }

 private:
  fftw_complex* in_;
  fftw_complex* out_;
};

}  // namespace detail

//---------------------------------------------------------------------------
// forward_transform: real field -> spectral coefficients (per component).
//---------------------------------------------------------------------------
template <std::size_t NComp>
SpectralField<NComp> forward_transform(const Field<NComp>& f) {
  const Grid& g = f.grid();
  const std::size_t np = g.num_points();
  const auto& plans = detail::plans_for(g.n());
  detail::AlignedScratch scratch(np);

  SpectralField<NComp> out(g);
  const double norm = 1.0 / static_cast<double>(np);
  for (std::size_t c = 0; c < NComp; ++c) {
    auto src = f.comp(c);
    for (std::size_t i = 0; i < np; ++i) {
      scratch.in()[i][0] = src[i];
      scratch.in()[i][1] = 0.0;
    }
    fftw_execute_dft(plans.forward, scratch.in(), scratch.out());
    auto dst = out.comp(c);
    for (std::size_t i = 0; i < np; ++i)
      dst[i] = std::complex<double>(scratch.out()[i][0] * norm, scratch.out()[i][1] * norm);
  }
  return out;
}

//---------------------------------------------------------------------------
// inverse_transform: spectral coefficients -> real field.  The imaginary
// residue of a Hermitian-symmetric input is rounding noise and is dropped.
//---------------------------------------------------------------------------
template <std::size_t NComp>
Field<NComp> inverse_transform(const SpectralField<NComp>& fhat) {
  const Grid& g = fhat.grid();
  const std::size_t np = g.num_points();
  const auto& plans = detail::plans_for(g.n());
  detail::AlignedScratch scratch(np);

  Field<NComp> out(g);
  for (std::size_t c = 0; c < NComp; ++c) {
    auto src = fhat.comp(c);
    static_assert(sizeof(std::complex<double>) == sizeof(fftw_complex));
    std::memcpy(scratch.in(), src.data(), np * sizeof(fftw_complex));
    fftw_execute_dft(plans.backward, scratch.in(), scratch.out());
    auto dst = out.comp(c);
    for (std::size_t i = 0; i < np; ++i) dst[i] = scratch.out()[i][0];
  }
  return out;
}

}  // namespace obkm
