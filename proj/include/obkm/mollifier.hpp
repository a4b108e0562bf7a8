#pragma once

//---------------------------------------------------------------------------
// Periodic Friedrichs mollifier built from the standard bump
//
//   phi(x) = c * exp(-1/(1-|x|^2))   for |x| < 1,   0 otherwise,
//
// scaled to phi_eps(y) = eps^-3 phi(y/eps) and applied as a spectral
// multiplier: the symbol is the grid quadrature of phi_eps against each
// Fourier mode, so J_eps f has coefficients psi_k fhat_k with psi_0 = 1
// exactly (c is normalized so the grid mass of phi_eps is exactly one).
//
// Because phi is even, the symbol is real, hence J_eps is L2 self-adjoint,
// commutes with spectral derivatives, and maps real fields to real fields.
// eps must exceed two grid spacings or the sampled bump is unresolved.
//---------------------------------------------------------------------------

#include <cmath>
#include <stdexcept>
#include <vector>

#include "obkm/fft.hpp"
#include "obkm/field.hpp"
#include "obkm/grid.hpp"

namespace obkm {

struct MollifierSpec {
  double epsilon = 0.0;
  double bump_normalization = 0.0;  // the constant c after grid normalization
};

class Mollifier {
 public:
  static Mollifier make(const Grid& grid, double eps) {
    if (!(eps > 2.0 * grid.spacing()))
      throw std::invalid_argument("Mollifier: eps must exceed 2*spacing (unresolved bump)");
    if (!(eps < 0.5 * grid.length()))
      throw std::invalid_argument("Mollifier: eps must be below half the box length");

    // Sample eps^-3 exp(-1/(1-|y/eps|^2)) at minimum-image displacements.
    ScalarField bump(grid);
    const std::size_t np = grid.num_points();
    double mass = 0.0;
    for (std::size_t idx = 0; idx < np; ++idx) {
      const auto p = grid.point(idx);
      const double dx = grid.min_image(p[0]);
      const double dy = grid.min_image(p[1]);
      const double dz = grid.min_image(p[2]);
      const double r2 = (dx * dx + dy * dy + dz * dz) / (eps * eps);
      double v = 0.0;
      if (r2 < 1.0) v = std::exp(-1.0 / (1.0 - r2)) / (eps * eps * eps);
      bump(0, idx) = v;
      mass += v;
    }
    mass *= grid.cell_volume();
    if (!(mass > 0.0)) throw std::invalid_argument("Mollifier: sampled bump has zero mass");
    const double c = 1.0 / mass;

    // Symbol psi_k = V * DFT(phi_eps)_k; realness follows from evenness of
    // the sampled bump, the imaginary residue is rounding and is dropped.
    for (double& v : bump.raw()) v *= c;
    auto bhat = forward_transform(bump);
    std::vector<double> symbol(np);
    for (std::size_t idx = 0; idx < np; ++idx) symbol[idx] = bhat(0, idx).real() * grid.volume();

    return Mollifier(grid, MollifierSpec{eps, c}, std::move(symbol));
  }

  const Grid& grid() const { return grid_; }
  const MollifierSpec& spec() const { return spec_; }
  double symbol(std::size_t idx) const { return symbol_[idx]; }

  template <std::size_t NComp>
  void apply_inplace(SpectralField<NComp>& fhat) const {
    if (fhat.grid() != grid_) throw std::invalid_argument("Mollifier: grid mismatch");
    const std::size_t np = grid_.num_points();
    for (std::size_t c = 0; c < NComp; ++c) {
      auto span = fhat.comp(c);
      for (std::size_t i = 0; i < np; ++i) span[i] *= symbol_[i];
    }
  }

  template <std::size_t NComp>
  Field<NComp> apply(const Field<NComp>& f) const {
    auto fhat = forward_transform(f);
    apply_inplace(fhat);
    return inverse_transform(fhat);
  }

 private:
  Mollifier(const Grid& g, MollifierSpec s, std::vector<double> symbol)
      : grid_(g), spec_(s), symbol_(std::move(symbol)) {}

  Grid grid_;
  MollifierSpec spec_;
  std::vector<double> symbol_;
};

template <std::size_t NComp>
Field<NComp> mollify(const Field<NComp>& f, double eps) {
  return Mollifier::make(f.grid(), eps).apply(f);
}

}  // namespace obkm
