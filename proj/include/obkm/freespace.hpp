#pragma once

//---------------------------------------------------------------------------
// Free-space (unbounded-domain) evaluation of the Stokes velocity and
// velocity gradient from compactly supported stress, used to cross-check the
// periodic spectral solve:
//
//   u(x)      = 1/(8 pi nu_s) * int M1(y) : sigma(x+y) dy
//   grad u(x) = -1/(5 nu_s) (sigma(x) - tr(sigma(x))/3 I)
//             + 1/(8 pi nu_s) * PV int M2(y) : sigma(x+y) dy
//
// y points from the evaluation point toward the source.  M1 is odd, so the
// orientation matters for the velocity; M2 is even, so sigma(x+y) and
// sigma(x-y) give the same gradient.  The quadrature samples sigma(x-y) over
// a sign-symmetric node set and flips the sign of the velocity sum, which is
// exactly equivalent.
//
// The principal value is realized by subtracting chi(|y|) sigma(x) from the
// samples, where chi is 1 for |y| <= inner_radius and falls smoothly (C^2)
// to 0 by 2*inner_radius.  For any radial weight the subtracted kernel
// integrates to zero analytically (the symmetrized M2 has zero mean on every
// sphere), the node-wise subtraction cancels the r^-3 singularity exactly at
// the nodes nearest the origin, and the smooth falloff avoids the O(hq/eps)
// staircase error a sharp subtraction ball would leave at its boundary.
// The sweep truncates at outer_radius < L/2 so periodic images stay outside
// the quadrature.
//
// Quadrature is midpoint on a uniform lattice: cells of side hq = L / Nq
// centered at y_m = (m + 1/2) hq, restricted to the ball |y| < outer_radius.
// Because hq divides the box, every needed sigma(x - y_m) lies on ONE
// shifted fine lattice {x - hq/2*(1,1,1) + j hq}, which is filled exactly
// (for the grid's trigonometric interpolant) by a zero-padded,
// phase-modulated inverse DFT.  The half-cell offset also keeps y = 0 off
// the lattice.
//---------------------------------------------------------------------------

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "obkm/fft.hpp"
#include "obkm/field.hpp"
#include "obkm/grid.hpp"
#include "obkm/kernels.hpp"
#include "obkm/norms.hpp"

namespace obkm {

struct PVQuadratureSpec {
  double inner_radius = 0.0;   // PV regularization ball
  double outer_radius = 0.0;   // truncation radius, must stay below L/2
  int points_per_axis = 0;     // quadrature lattice size across the box

  void validate(const Grid& grid) const {
    if (!(inner_radius > 0.0) || !(outer_radius > inner_radius))
      throw std::invalid_argument("PVQuadratureSpec: need 0 < inner_radius < outer_radius");
    if (!(outer_radius < 0.5 * grid.length()))
      throw std::invalid_argument("PVQuadratureSpec: outer_radius must be below length/2");
    if (points_per_axis < grid.n())
      throw std::invalid_argument("PVQuadratureSpec: points_per_axis must be >= grid n");
    if ((points_per_axis & (points_per_axis - 1)) != 0)
      throw std::invalid_argument("PVQuadratureSpec: points_per_axis must be a power of two");
    if (!(2.0 * inner_radius <= outer_radius))
      throw std::invalid_argument(
          "PVQuadratureSpec: the smooth subtraction extends to 2*inner_radius, which must stay "
          "inside outer_radius");
    const double hq = grid.length() / points_per_axis;
    if (inner_radius < 4.0 * hq)
      throw std::invalid_argument("PVQuadratureSpec: inner_radius must span at least 4 quadrature cells");
  }
};

namespace detail {

// radial subtraction weight: 1 for s <= 1, quintic-smoothstep down to 0 at
// s = 2, C^2 at both ends
inline double pv_switch(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

// sigma must be negligible outside a ball of radius L/4 around its peak,
// measured on the grid with minimum-image distances.
inline void check_compact_support(const SymTensorField& sigma) {
  const Grid& g = sigma.grid();
  const std::size_t np = g.num_points();
  constexpr auto cw = component_weights<6>();
  auto mag2 = [&](std::size_t idx) {
    double m = 0.0;
    for (int c = 0; c < 6; ++c) m += cw[c] * sigma(c, idx) * sigma(c, idx);
    return m;
  };
  double peak = 0.0;
  std::size_t peak_idx = 0;
  for (std::size_t i = 0; i < np; ++i) {
    const double m = mag2(i);
    if (m > peak) {
      peak = m;
      peak_idx = i;
    }
  }
  if (!(peak > 0.0)) throw std::invalid_argument("freespace: stress field is identically zero");
  const Vec3 center = g.point(peak_idx);
  const double cutoff = 0.25 * g.length();
  const double tol2 = 1e-20 * peak;  // (1e-10 of peak magnitude)^2
  for (std::size_t i = 0; i < np; ++i) {
    if (g.min_image_distance(g.point(i), center) > cutoff && mag2(i) > tol2)
      throw std::invalid_argument(
          "freespace: stress is not negligible (>1e-10 of peak) outside a ball of radius length/4");
  }
}

// Trig-interpolant samples of sigma on the lattice {x0 + j hq}: zero-pad the
// coefficients into the fine lattice (splitting Nyquist weight), modulate by
// exp(i kappa . x0), inverse transform.
inline Field<6> resample_shifted(const SpectralField<6>& shat, const Grid& fine, const Vec3& x0) {
  const Grid& g = shat.grid();
  const int n = g.n();
  const double s = g.wavenumber_scale();
  SpectralField<6> out(fine);

  for (int kz = -n / 2; kz <= n / 2; ++kz)
    for (int ky = -n / 2; ky <= n / 2; ++ky)
      for (int kx = -n / 2; kx <= n / 2; ++kx) {
        double w = 1.0;
        if (std::abs(kx) == n / 2) w *= 0.5;
        if (std::abs(ky) == n / 2) w *= 0.5;
        if (std::abs(kz) == n / 2) w *= 0.5;
        const std::size_t src = g.flat((kx % n + n) % n, (ky % n + n) % n, (kz % n + n) % n);
        const double phase = s * (kx * x0[0] + ky * x0[1] + kz * x0[2]);
        const std::complex<double> mod = w * std::complex<double>(std::cos(phase), std::sin(phase));
        const std::size_t dst = fine.flat((kx % fine.n() + fine.n()) % fine.n(),
                                          (ky % fine.n() + fine.n()) % fine.n(),
                                          (kz % fine.n() + fine.n()) % fine.n());
        for (int c = 0; c < 6; ++c) out(c, dst) += mod * shat(c, src);
      }
  return inverse_transform(out);
}

inline std::array<double, 6> eval_at_point(const SpectralField<6>& shat, const Vec3& x) {
  const Grid& g = shat.grid();
  const double s = g.wavenumber_scale();
  std::array<double, 6> val{};
  for (std::size_t idx = 0; idx < g.num_points(); ++idx) {
    const auto k = g.wavevector(idx);
    const double phase = s * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
    const std::complex<double> e(std::cos(phase), std::sin(phase));
    for (int c = 0; c < 6; ++c) val[c] += (shat(c, idx) * e).real();
  }
  return val;
}

template <typename Accumulate>
void quadrature_sweep(const Grid& g, const PVQuadratureSpec& q, Accumulate&& accumulate) {
  const double hq = g.length() / q.points_per_axis;
  const int nq = q.points_per_axis;
  const int mhi = static_cast<int>(std::ceil(q.outer_radius / hq)) + 1;
  auto wrap = [nq](int m) { return ((-m) % nq + nq) % nq; };
  for (int mz = -mhi; mz < mhi; ++mz) {
    const double yz = (mz + 0.5) * hq;
    if (std::abs(yz) > q.outer_radius) continue;
    for (int my = -mhi; my < mhi; ++my) {
      const double yy = (my + 0.5) * hq;
      const double rzy2 = yz * yz + yy * yy;
      if (rzy2 > q.outer_radius * q.outer_radius) continue;
      for (int mx = -mhi; mx < mhi; ++mx) {
        const double yx = (mx + 0.5) * hq;
        const double r2 = rzy2 + yx * yx;
        if (r2 > q.outer_radius * q.outer_radius) continue;
        accumulate(Vec3{yx, yy, yz}, r2, wrap(mx), wrap(my), wrap(mz));
      }
    }
  }
}

}  // namespace detail

inline Vec3 velocity_freespace(const SymTensorField& sigma, const Vec3& x, double nu_s,
                               const PVQuadratureSpec& q) {
  if (!(nu_s > 0.0)) throw std::invalid_argument("velocity_freespace: nu_s must be positive");
  const Grid& g = sigma.grid();
  q.validate(g);
  detail::check_compact_support(sigma);

  const auto shat = forward_transform(sigma);
  const Grid fine = Grid::make(q.points_per_axis, g.length());
  const double hq = fine.spacing();
  const Vec3 x0{x[0] - 0.5 * hq, x[1] - 0.5 * hq, x[2] - 0.5 * hq};
  const auto samples = detail::resample_shifted(shat, fine, x0);

  Vec3 u{0.0, 0.0, 0.0};
  detail::quadrature_sweep(g, q, [&](const Vec3& y, double, int jx, int jy, int jz) {
    const std::size_t idx = fine.flat(jx, jy, jz);
    std::array<double, 6> sv;
    for (int c = 0; c < 6; ++c) sv[c] = samples(c, idx);
    const Vec3 du = m1_contract(y, sv);
    for (int j = 0; j < 3; ++j) u[j] += du[j];
  });
  // the sum runs over sigma(x - y) on a sign-symmetric node set; M1 is odd,
  // so negating converts it to the sigma(x + y) orientation exactly
  const double w = -hq * hq * hq / (8.0 * std::numbers::pi * nu_s);
  for (auto& v : u) v *= w;
  return u;
}

// Returns grad u as component 3*i + j = d_i u_j, matching the spectral path.
inline std::array<double, 9> gradvel_freespace(const SymTensorField& sigma, const Vec3& x, double nu_s,
                                               const PVQuadratureSpec& q) {
  if (!(nu_s > 0.0)) throw std::invalid_argument("gradvel_freespace: nu_s must be positive");
  const Grid& g = sigma.grid();
  q.validate(g);
  detail::check_compact_support(sigma);

  const auto shat = forward_transform(sigma);
  const Grid fine = Grid::make(q.points_per_axis, g.length());
  const double hq = fine.spacing();
  const Vec3 x0{x[0] - 0.5 * hq, x[1] - 0.5 * hq, x[2] - 0.5 * hq};
  const auto samples = detail::resample_shifted(shat, fine, x0);
  const auto sx = detail::eval_at_point(shat, x);

  std::array<double, 9> pv{};
  const double inv_eps = 1.0 / q.inner_radius;
  detail::quadrature_sweep(g, q, [&](const Vec3& y, double r2, int jx, int jy, int jz) {
    const std::size_t idx = fine.flat(jx, jy, jz);
    std::array<double, 6> sv;
    for (int c = 0; c < 6; ++c) sv[c] = samples(c, idx);
    const double chi = detail::pv_switch(std::sqrt(r2) * inv_eps);
    if (chi > 0.0) {
      for (int c = 0; c < 6; ++c) sv[c] -= chi * sx[c];  // smooth PV regularization
    }
    const auto t = m2_contract(y, sv);
    for (int c = 0; c < 9; ++c) pv[c] += t[c];
  });

  const double tr3 = (sx[S11] + sx[S22] + sx[S33]) / 3.0;
  const double wpv = hq * hq * hq / (8.0 * std::numbers::pi * nu_s);
  std::array<double, 9> grad{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double local = -(sx[sym_flat(i, j)] - (i == j ? tr3 : 0.0)) / (5.0 * nu_s);
      grad[3 * i + j] = local + wpv * pv[3 * i + j];
    }
  return grad;
}

// Midpoint quadrature error is O(hq^2) (tests pin the observed order), so
// one Richardson step over points_per_axis and 2*points_per_axis cancels
// the leading term.
inline std::array<double, 9> gradvel_freespace_extrapolated(const SymTensorField& sigma,
                                                            const Vec3& x, double nu_s,
                                                            const PVQuadratureSpec& q) {
  PVQuadratureSpec fine = q;
  fine.points_per_axis *= 2;
  const auto coarse = gradvel_freespace(sigma, x, nu_s, q);
  const auto refined = gradvel_freespace(sigma, x, nu_s, fine);
  std::array<double, 9> out{};
  for (int c = 0; c < 9; ++c) out[c] = (4.0 * refined[c] - coarse[c]) / 3.0;
  return out;
}

}  // namespace obkm
