#pragma once

//---------------------------------------------------------------------------
// Deterministic random band-limited fields for the property checks.
//
// Coefficients are drawn per integer wavenumber in a fixed traversal order
// that does not depend on the grid size, so the same spec on n and 2n yields
// the same trigonometric polynomial (resolution-doubling comparisons see the
// identical continuum field).  Gaussians come from an explicit Box-Muller on
// mt19937_64 output rather than std::normal_distribution, whose stream is
// implementation-defined.
//
// Fields are mean-free (the k=0 coefficient is zeroed) and scaled so the L2
// norm equals the requested amplitude.
//---------------------------------------------------------------------------

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>

#include "obkm/fft.hpp"
#include "obkm/field.hpp"
#include "obkm/grid.hpp"
#include "obkm/norms.hpp"

namespace obkm {

enum class FieldRank { scalar, vector, sym_tensor };

struct RandomFieldSpec {
  std::uint64_t seed = 0;
  int band_limit = 0;     // max |k_i| per axis, must be >= 1 and <= n/3
  double amplitude = 1.0; // resulting ||f||_0
  FieldRank rank = FieldRank::scalar;
};

namespace detail {

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // Box-Muller on (0,1] uniforms.
    const double u1 = (static_cast<double>(rng_()) + 1.0) * 0x1p-64;
    const double u2 = (static_cast<double>(rng_()) + 1.0) * 0x1p-64;
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  std::complex<double> next_complex() {
    const double re = next();
    const double im = next();
    return {re, im};
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

template <std::size_t NComp>
Field<NComp> random_band_field(const Grid& grid, const RandomFieldSpec& spec) {
  const int b = spec.band_limit;
  if (b < 1) throw std::invalid_argument("random_band_field: band_limit must be >= 1");
  if (b > grid.n() / 3)
    throw std::invalid_argument("random_band_field: band_limit exceeds n/3 (not dealias-safe)");
  if (!(spec.amplitude > 0.0)) throw std::invalid_argument("random_band_field: amplitude must be positive");

  SpectralField<NComp> fhat(grid);
  detail::GaussianStream gauss(spec.seed);

  // Fixed traversal over the integer band, independent of n.  Draws are
  // stored per wavevector, then Hermitian-symmetrized pairwise.
  const int n = grid.n();
  auto fft_index = [&](int k) { return k >= 0 ? k : k + n; };
  for (std::size_t c = 0; c < NComp; ++c) {
    std::map<std::array<int, 3>, std::complex<double>> draw;
    for (int kz = -b; kz <= b; ++kz)
      for (int ky = -b; ky <= b; ++ky)
        for (int kx = -b; kx <= b; ++kx) draw[{kx, ky, kz}] = gauss.next_complex();
    for (const auto& [k, g] : draw) {
      if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;  // mean-free
      const std::complex<double> gm = draw.at({-k[0], -k[1], -k[2]});
      const std::size_t idx = grid.flat(fft_index(k[0]), fft_index(k[1]), fft_index(k[2]));
      fhat(c, idx) = 0.5 * (g + std::conj(gm));
    }
  }

  // Scale in spectral space so ||f||_0 matches the amplitude; the scale is
  // a function of the coefficient set only, hence identical across n.
  double sum2 = 0.0;
  constexpr auto cw = component_weights<NComp>();
  for (std::size_t c = 0; c < NComp; ++c)
    for (const auto& v : fhat.comp(c)) sum2 += cw[c] * std::norm(v);
  const double norm0 = std::sqrt(sum2 * grid.volume());
  const double scale = spec.amplitude / norm0;
  for (auto& v : fhat.raw()) v *= scale;

  return inverse_transform(fhat);
}

inline ScalarField random_scalar_field(const Grid& g, const RandomFieldSpec& s) {
  return random_band_field<1>(g, s);
}
inline VectorField random_vector_field(const Grid& g, const RandomFieldSpec& s) {
  return random_band_field<3>(g, s);
}
inline SymTensorField random_sym_tensor_field(const Grid& g, const RandomFieldSpec& s) {
  return random_band_field<6>(g, s);
}

// Rescale so the H^m norm hits a target (used by initial-condition builders).
template <std::size_t NComp>
void scale_to_hm(Field<NComp>& f, int m, double target) {
  const double cur = hm_norm(f, m);
  if (!(cur > 0.0)) throw std::invalid_argument("scale_to_hm: zero field");
  f *= target / cur;
}

}  // namespace obkm
