#pragma once

//---------------------------------------------------------------------------
// Closed evolution of the polymer stress under its own creeping flow.  The
// velocity is the instantaneous Stokes response to div sigma, so the stress
// equation is self-contained:
//
//   d sigma / dt = F(sigma)
//   F = -(u . grad) sigma + (grad u)^T sigma + sigma (grad u)
//     - sigma / lambda + (nu_p / lambda) (grad u + (grad u)^T)
//
// with (grad u)_ij = d_i u_j.  Pseudo-spectral evaluation: quadratic terms
// are formed pointwise in physical space from 2/3-rule dealiased factors and
// their transforms are truncated again, so squares of retained modes never
// alias back into the retained band.  Linear terms act on the full spectrum.
// The optional mollified variant replaces the advection with
// J_eps[ u . grad (J_eps sigma) ], which makes the advection term exactly
// skew (it cannot feed energy into the smoothed stress); eps = 0 selects the
// plain advection path.
//
// rhs_terms exposes the individual terms so energy accounting can take inner
// products against exactly what the integrator adds up.
//---------------------------------------------------------------------------

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>

#include "obkm/fft.hpp"
#include "obkm/field.hpp"
#include "obkm/grid.hpp"
#include "obkm/mollifier.hpp"
#include "obkm/norms.hpp"
#include "obkm/spectral_ops.hpp"
#include "obkm/stokes.hpp"

namespace obkm {

struct PhysicalParams {
  double nu_s = 1.0;    // solvent viscosity
  double nu_p = 1.0;    // polymer viscosity
  double lambda = 1.0;  // relaxation time; +infinity switches relaxation off
  // Kelvin-Voigt variant: the stress forcing keeps the fixed coefficient
  // nu_p (standing in for a frozen nu_p/lambda) even as lambda -> infinity
  // removes the relaxation term.
  bool kelvin_voigt = false;

  double inv_lambda() const { return std::isinf(lambda) ? 0.0 : 1.0 / lambda; }
  double forcing_coeff() const { return kelvin_voigt ? nu_p : nu_p * inv_lambda(); }

  void validate() const {
    if (!(nu_s > 0.0)) throw std::invalid_argument("PhysicalParams: nu_s must be positive");
    if (!(nu_p >= 0.0)) throw std::invalid_argument("PhysicalParams: nu_p must be nonnegative");
    if (!(lambda > 0.0))
      throw std::invalid_argument("PhysicalParams: lambda must be positive (+infinity allowed)");
  }
};

// The right-hand side split into its terms, physical space.  The full
// right-hand side is advection + stretching + forcing - inv_lambda * sigma.
// flow is the Stokes response of the full (not dealiased) stress; the
// integrator reuses it for step-size control and monitors read it for
// diagnostics.
struct RhsTerms {
  SymTensorField advection;
  SymTensorField stretching;
  SymTensorField forcing;
  StokesFlow flow;
  double inv_lambda = 0.0;
};

namespace detail {

inline SymTensorField assemble_rhs(const RhsTerms& terms, const SymTensorField& sigma) {
  SymTensorField f = terms.advection;
  f += terms.stretching;
  f += terms.forcing;
  f.add_scaled(sigma, -terms.inv_lambda);
  return f;
}

}  // namespace detail

inline RhsTerms rhs_terms(const SymTensorField& sigma, const PhysicalParams& p,
                          double mollifier_eps = 0.0, bool want_flow = false) {
  p.validate();
  const Grid& g = sigma.grid();
  const std::size_t np = g.num_points();

  auto shat = forward_transform(sigma);
  auto flow_hat = solve_stokes_hat(shat, p.nu_s);

  // dealiased factors for the quadratic terms; the Stokes solve is diagonal
  // in k, so the flow of the dealiased stress is the dealiased flow
  auto shat_d = shat;
  dealias(shat_d);
  auto u_hat_d = flow_hat.u;
  dealias(u_hat_d);
  auto gu_hat_d = flow_hat.grad_u;
  dealias(gu_hat_d);

  // advected stress: optionally smoothed before taking the gradient
  auto adv_src_hat = shat_d;
  std::optional<Mollifier> moll;
  const bool mollify_adv = mollifier_eps > 0.0;
  if (mollify_adv) {
    moll = Mollifier::make(g, mollifier_eps);
    moll->apply_inplace(adv_src_hat);
  }
  const auto grad_sig = inverse_transform(gradient_hat(adv_src_hat));  // comp 3*c+d = d_d sigma_c
  const auto u_d = inverse_transform(u_hat_d);
  const auto gu_d = inverse_transform(gu_hat_d);
  const auto sig_d = inverse_transform(shat_d);

  SymTensorField advection(g), stretching(g);
  for (int c = 0; c < 6; ++c) {
    const auto [a, b] = sym_index_pairs[c];
    for (std::size_t i = 0; i < np; ++i) {
      double adv = 0.0, str = 0.0;
      for (int k = 0; k < 3; ++k) {
        adv -= u_d(k, i) * grad_sig(3 * c + k, i);
        str += gu_d(3 * k + a, i) * sig_d(sym_flat(k, b), i) +
               sig_d(sym_flat(a, k), i) * gu_d(3 * k + b, i);
      }
      advection(c, i) = adv;
      stretching(c, i) = str;
    }
  }

  auto adv_hat = forward_transform(advection);
  auto str_hat = forward_transform(stretching);
  dealias(adv_hat);
  dealias(str_hat);
  if (mollify_adv) moll->apply_inplace(adv_hat);  // outer smoothing of the advection

  // stress forcing, linear in sigma: coeff * (grad u + grad u^T) of the full flow
  const double coeff = p.forcing_coeff();
  SpectralField<6> forcing_hat(g);
  if (coeff != 0.0) {
    for (int c = 0; c < 6; ++c) {
      const auto [a, b] = sym_index_pairs[c];
      for (std::size_t i = 0; i < np; ++i)
        forcing_hat(c, i) = coeff * (flow_hat.grad_u(3 * a + b, i) + flow_hat.grad_u(3 * b + a, i));
    }
  }

  RhsTerms terms{inverse_transform(adv_hat), inverse_transform(str_hat),
                 inverse_transform(forcing_hat), StokesFlow{VectorField(g), TensorField(g)},
                 p.inv_lambda()};
  if (want_flow) {
    terms.flow.u = inverse_transform(flow_hat.u);
    terms.flow.grad_u = inverse_transform(flow_hat.grad_u);
  }
  return terms;
}

inline SymTensorField rhs_F_mollified(const SymTensorField& sigma, const PhysicalParams& p,
                                      double mollifier_eps) {
  return detail::assemble_rhs(rhs_terms(sigma, p, mollifier_eps), sigma);
}

inline SymTensorField rhs_F(const SymTensorField& sigma, const PhysicalParams& p) {
  return rhs_F_mollified(sigma, p, 0.0);
}

// Full nine-component right-hand side that does not assume or impose any
// index symmetry; used to demonstrate that symmetric data stays symmetric
// under time stepping.
inline TensorField rhs_F_tensor(const TensorField& sigma, const PhysicalParams& p) {
  p.validate();
  const Grid& g = sigma.grid();
  const std::size_t np = g.num_points();

  auto shat = forward_transform(sigma);
  auto flow_hat = solve_stokes_hat(shat, p.nu_s);

  auto shat_d = shat;
  dealias(shat_d);
  auto u_hat_d = flow_hat.u;
  dealias(u_hat_d);
  auto gu_hat_d = flow_hat.grad_u;
  dealias(gu_hat_d);

  const auto grad_sig = inverse_transform(gradient_hat(shat_d));  // comp 3*(3i+j)+d = d_d sigma_ij
  const auto u_d = inverse_transform(u_hat_d);
  const auto gu_d = inverse_transform(gu_hat_d);
  const auto sig_d = inverse_transform(shat_d);

  TensorField quad(g);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int c = 3 * a + b;
      for (std::size_t i = 0; i < np; ++i) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) {
          v -= u_d(k, i) * grad_sig(3 * c + k, i);
          v += gu_d(3 * k + a, i) * sig_d(3 * k + b, i) + sig_d(3 * a + k, i) * gu_d(3 * k + b, i);
        }
        quad(c, i) = v;
      }
    }

  auto quad_hat = forward_transform(quad);
  dealias(quad_hat);
  auto f = inverse_transform(quad_hat);

  const double coeff = p.forcing_coeff();
  const double inv_lambda = p.inv_lambda();
  const auto gu = inverse_transform(flow_hat.grad_u);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const int c = 3 * a + b;
      for (std::size_t i = 0; i < np; ++i)
        f(c, i) += coeff * (gu(3 * a + b, i) + gu(3 * b + a, i)) - inv_lambda * sigma(c, i);
    }
  return f;
}

// Classical fourth-order Runge-Kutta step.  Time reversal is done by
// stepping a negated right-hand side, not by negative dt.
template <std::size_t N, typename Rhs>
Field<N> step_rk4_with_k1(const Field<N>& y, double dt, const Field<N>& k1, Rhs&& rhs) {
  if (dt == 0.0) return y;
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be nonnegative");

  Field<N> stage = y;
  stage.add_scaled(k1, 0.5 * dt);
  const Field<N> k2 = rhs(stage);

  stage = y;
  stage.add_scaled(k2, 0.5 * dt);
  const Field<N> k3 = rhs(stage);

  stage = y;
  stage.add_scaled(k3, dt);
  const Field<N> k4 = rhs(stage);

  Field<N> out = y;
  out.add_scaled(k1, dt / 6.0);
  out.add_scaled(k2, dt / 3.0);
  out.add_scaled(k3, dt / 3.0);
  out.add_scaled(k4, dt / 6.0);
  return out;
}

template <std::size_t N, typename Rhs>
Field<N> step_rk4(const Field<N>& y, double dt, Rhs&& rhs) {
  if (dt == 0.0) return y;
  if (!(dt > 0.0)) throw std::invalid_argument("step_rk4: dt must be nonnegative");
  return step_rk4_with_k1(y, dt, rhs(y), rhs);
}

struct TimeStepperConfig {
  double t_end = 1.0;
  double dt_initial = 1e-2;  // also the upper clamp for adaptive steps
  double dt_min = 1e-8;
  double cfl_safety = 0.5;
  bool adaptive = true;
  double mollifier_eps = 0.0;  // 0 disables smoothing

  void validate() const {
    if (!(t_end >= 0.0)) throw std::invalid_argument("TimeStepperConfig: t_end must be nonnegative");
    if (!(dt_initial > 0.0))
      throw std::invalid_argument("TimeStepperConfig: dt_initial must be positive");
    if (!(dt_min > 0.0) || dt_min > dt_initial)
      throw std::invalid_argument("TimeStepperConfig: need 0 < dt_min <= dt_initial");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
      throw std::invalid_argument("TimeStepperConfig: cfl_safety must lie in (0, 1]");
    if (!(mollifier_eps >= 0.0))
      throw std::invalid_argument("TimeStepperConfig: mollifier_eps must be nonnegative");
  }
};

enum class IntegrationStatus { completed, blowup_suspected, step_failed };
enum class MonitorAction { proceed, stop_blowup };

struct IntegrationResult {
  IntegrationStatus status = IntegrationStatus::completed;
  double t_reached = 0.0;
  std::size_t steps = 0;
  double dt_last = 0.0;
};

// Advances sigma in place.  The monitor is called before every step with
// (step index, t, sigma, rhs terms, dt about to be taken) and once more
// after the last step with dt = 0; returning stop_blowup ends the run.  A
// non-finite state after a step yields step_failed with sigma left at the
// last finite state.  Divergence never throws.
template <typename Monitor>
IntegrationResult integrate(SymTensorField& sigma, const PhysicalParams& p,
                            const TimeStepperConfig& cfg, Monitor&& monitor) {
  p.validate();
  cfg.validate();
  const Grid& g = sigma.grid();

  double t = 0.0;
  double dt_last = 0.0;
  std::size_t step = 0;
  const double t_tol = 1e-12 * std::max(1.0, cfg.t_end);

  while (t < cfg.t_end - t_tol) {
    const auto terms = rhs_terms(sigma, p, cfg.mollifier_eps, true);

    double dt = cfg.dt_initial;
    if (cfg.adaptive) {
      // advective and stretching stability limits from the current flow
      double dt_cfl = cfg.dt_initial / cfg.cfl_safety;
      const double umax = linf_norm(terms.flow.u);
      const double gmax = linf_norm(terms.flow.grad_u);
      if (umax > 0.0) dt_cfl = std::min(dt_cfl, g.spacing() / umax);
      if (gmax > 0.0) dt_cfl = std::min(dt_cfl, 1.0 / gmax);
      dt = std::clamp(cfg.cfl_safety * dt_cfl, cfg.dt_min, cfg.dt_initial);
    }
    dt = std::min(dt, cfg.t_end - t);

    if (monitor(step, t, std::as_const(sigma), terms, dt) == MonitorAction::stop_blowup)
      return {IntegrationStatus::blowup_suspected, t, step, dt_last};

    const auto k1 = detail::assemble_rhs(terms, sigma);
    auto next = step_rk4_with_k1(sigma, dt, k1, [&](const SymTensorField& s) {
      return rhs_F_mollified(s, p, cfg.mollifier_eps);
    });
    if (!next.all_finite()) return {IntegrationStatus::step_failed, t, step, dt};

    sigma = std::move(next);
    t += dt;
    dt_last = dt;
    ++step;
  }

  const auto final_terms = rhs_terms(sigma, p, cfg.mollifier_eps, true);
  if (monitor(step, t, std::as_const(sigma), final_terms, 0.0) == MonitorAction::stop_blowup)
    return {IntegrationStatus::blowup_suspected, t, step, dt_last};
  return {IntegrationStatus::completed, t, step, dt_last};
}

inline IntegrationResult integrate(SymTensorField& sigma, const PhysicalParams& p,
                                   const TimeStepperConfig& cfg) {
  return integrate(sigma, p, cfg,
                   [](std::size_t, double, const SymTensorField&, const RhsTerms&, double) {
                     return MonitorAction::proceed;
                   });
}

}  // namespace obkm
