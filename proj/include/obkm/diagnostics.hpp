#pragma once

//---------------------------------------------------------------------------
// Breakdown monitor: scalar diagnostics of a running solution, the growth
// envelopes they must respect, the per-derivative energy budget, and
// threshold-based run classification.
//
//  * The monitored functional is the time integral of the stress sup-norm;
//    runs are classified "breakdown suspected" only — a finite simulation
//    cannot certify a singularity.
//  * All time integrals advance record-to-record by the trapezoid rule,
//    which matches the stepper cadence and is additive under record
//    concatenation.
//  * The envelope constants (c1, c2 in the existence horizon, C in the
//    exponential envelopes) are not derivable quantities; they are
//    calibrated on measured runs and carried alongside the results.
//  * The gradient-velocity log-bound reports two split-radius pairs: the
//    closed-form pair (r = ((3/2) h0/linf)^{2/3}, eps = (4 linf/l4)^{1/4})
//    and the numerically minimized pair for the same three-term objective.
//    The closed-form eps is not the stationary point of that objective
//    (which is the fourth *power*, not the fourth root); both are exposed
//    so the gap is measurable rather than hidden.
//---------------------------------------------------------------------------

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "obkm/evolution.hpp"
#include "obkm/fft.hpp"
#include "obkm/field.hpp"
#include "obkm/grid.hpp"
#include "obkm/norms.hpp"
#include "obkm/spectral_ops.hpp"

namespace obkm {

//---------------------------------------------------------------------------
// Per-step diagnostics record
//---------------------------------------------------------------------------

struct DiagnosticsRecord {
  double t = 0.0;
  double linf_sigma = 0.0;        // pointwise Frobenius sup of the stress
  double linf_gradu = 0.0;        // pointwise Frobenius sup of the velocity gradient
  double h0 = 0.0;                // L2 norm of the stress
  double hm = 0.0;                // order-m Sobolev norm of the stress
  double l4_grad_sigma = 0.0;     // L4 norm of the stress gradient
  double bkm_integral = 0.0;      // trapezoid integral of linf_sigma from t = 0
  double combined_integral = 0.0;  // trapezoid integral of 1 + linf_sigma + linf_gradu
  double dt_used = 0.0;           // size of the step that produced this record (0 for the first)
  double energy_residual = 0.0;   // filled by callers that run the energy budget
};

// Computes every norm of the record and advances the two running integrals
// by one trapezoid panel from `previous` (both start at zero without one).
inline DiagnosticsRecord compute_diagnostics(const SymTensorField& sigma, const VectorField& u,
                                             const TensorField& grad_u, int m, double t,
                                             const DiagnosticsRecord* previous = nullptr) {
  if (sigma.grid() != u.grid() || sigma.grid() != grad_u.grid())
    throw std::invalid_argument("compute_diagnostics: fields live on different grids");
  if (m < 0) throw std::invalid_argument("compute_diagnostics: m must be nonnegative");

  DiagnosticsRecord r;
  r.t = t;
  r.linf_sigma = linf_norm(sigma);
  r.linf_gradu = linf_norm(grad_u);
  const auto shat = forward_transform(sigma);
  r.h0 = hm_norm(shat, 0);
  r.hm = hm_norm(shat, m);
  r.l4_grad_sigma = lp_norm(inverse_transform(gradient_hat(shat)), 4.0);

  if (previous != nullptr) {
    const double dt = t - previous->t;
    if (dt < 0.0) throw std::invalid_argument("compute_diagnostics: records must advance in time");
    r.dt_used = dt;
    r.bkm_integral =
        previous->bkm_integral + 0.5 * dt * (r.linf_sigma + previous->linf_sigma);
    r.combined_integral =
        previous->combined_integral +
        0.5 * dt *
            ((1.0 + r.linf_sigma + r.linf_gradu) +
             (1.0 + previous->linf_sigma + previous->linf_gradu));
  }
  return r;
}

//---------------------------------------------------------------------------
// Guaranteed existence horizon from the quadratic energy inequality
//   d/dt y <= c3 y + c4 y^2,   c3 = (c1 nu_p/nu_s - 1)/lambda,  c4 = c2/nu_s
//---------------------------------------------------------------------------

struct ExistenceBoundParams {
  double c1 = 1.0;  // calibrated coefficient of the linear (coupling) term
  double c2 = 1.0;  // calibrated coefficient of the quadratic term

  void validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0))
      throw std::invalid_argument("ExistenceBoundParams: c1 and c2 must be positive");
  }

  // Derived coefficients are recomputed on demand so they can never be
  // stored inconsistently with (c1, c2, params).  An infinite relaxation
  // time gives c3 = 0 exactly.
  double c3(const PhysicalParams& p) const {
    return p.inv_lambda() * (c1 * p.nu_p / p.nu_s - 1.0);
  }
  double c4(const PhysicalParams& p) const { return c2 / p.nu_s; }
};

// Time horizon T = log(1 + |c3| / (c4 n0)) / |c3| with its two limits:
//   c3 == 0   ->  1 / (c4 n0)        (log(1+x)/x -> 1; covers infinite lambda)
//   c3 <  0 and n0 < |c3|/c4 -> +inf (small data: the quadratic term never
//                                     overtakes the damping)
inline double existence_time_bound(double norm_sigma0_m, const PhysicalParams& p,
                                   const ExistenceBoundParams& c) {
  if (!(norm_sigma0_m > 0.0))
    throw std::invalid_argument("existence_time_bound: initial norm must be positive");
  p.validate();
  c.validate();

  const double c3 = c.c3(p);
  const double c4 = c.c4(p);
  if (c3 < 0.0 && norm_sigma0_m < -c3 / c4) return std::numeric_limits<double>::infinity();
  if (c3 == 0.0) return 1.0 / (c4 * norm_sigma0_m);
  const double a = std::abs(c3);
  return std::log1p(a / (c4 * norm_sigma0_m)) / a;
}

//---------------------------------------------------------------------------
// Exponential growth envelopes evaluated from the recorded integrals
//---------------------------------------------------------------------------

// exp(C * integral of (1 + linf_sigma + linf_gradu)) * ||sigma_0||_m,
// evaluated at the last record (initial value alone when empty).
inline double apriori_bound_rhs(std::span<const DiagnosticsRecord> records, double norm_sigma0_m,
                                double C) {
  const double m_t = records.empty() ? 0.0 : records.back().combined_integral;
  return std::exp(C * m_t) * norm_sigma0_m;
}

// Companion envelope with the same exponent controlling the L4 norm of the
// stress gradient.
inline double apriori_l4_bound_rhs(std::span<const DiagnosticsRecord> records,
                                   double l4_grad_sigma0, double C) {
  const double m_t = records.empty() ? 0.0 : records.back().combined_integral;
  return std::exp(C * m_t) * l4_grad_sigma0;
}

// Doubly-exponential envelope driven by the breakdown integral alone:
// exp(C exp(C * integral of linf_sigma)) * ||sigma_0||_m.
inline double double_exponential_bound_rhs(std::span<const DiagnosticsRecord> records,
                                           double norm_sigma0_m, double C) {
  const double n_t = records.empty() ? 0.0 : records.back().bkm_integral;
  return std::exp(C * std::exp(C * n_t)) * norm_sigma0_m;
}

// Smallest C that makes the exponential envelope hold stepwise on the given
// run: the largest per-step slope of log ||sigma||_m against the combined
// integral.  Telescoping then gives hm(t) <= exp(C M(t)) hm(0) at every
// record of that run.
inline double calibrate_growth_constant(std::span<const DiagnosticsRecord> records) {
  double c = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double dm = records[i].combined_integral - records[i - 1].combined_integral;
    if (!(dm > 0.0) || !(records[i - 1].hm > 0.0) || !(records[i].hm > 0.0)) continue;
    c = std::max(c, std::log(records[i].hm / records[i - 1].hm) / dm);
  }
  return c;
}

//---------------------------------------------------------------------------
// Logarithmic sup-norm bound for the velocity gradient
//---------------------------------------------------------------------------

inline double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

struct GradVelBoundResult {
  double bound = 0.0;    // C * linf_sigma * (1 + log+ h0 + log+ l4)
  double r_opt = 0.0;    // closed-form outer radius ((3/2) h0 / linf)^{2/3}
  double eps_opt = 0.0;  // closed-form inner radius (4 linf / l4)^{1/4}
};

inline GradVelBoundResult loglinf_gradvel_bound(double h0, double linf_sigma,
                                                double l4_grad_sigma, double C) {
  if (!(h0 > 0.0) || !(linf_sigma > 0.0) || !(l4_grad_sigma > 0.0) || !(C > 0.0))
    throw std::invalid_argument("loglinf_gradvel_bound: all inputs must be positive");
  GradVelBoundResult out;
  out.bound = C * linf_sigma * (1.0 + log_plus(h0) + log_plus(l4_grad_sigma));
  out.r_opt = std::pow(1.5 * h0 / linf_sigma, 2.0 / 3.0);
  out.eps_opt = std::pow(4.0 * linf_sigma / l4_grad_sigma, 0.25);
  return out;
}

// Three-term split objective behind the log bound: outer L2 tail, inner
// gradient layer, middle logarithmic annulus.
inline double split_bound_objective(double r, double eps, double h0, double linf_sigma,
                                    double l4_grad_sigma) {
  return h0 / std::pow(r, 1.5) + l4_grad_sigma * std::pow(eps, 0.25) +
         linf_sigma * std::log(r / eps);
}

struct SplitRadii {
  double r = 0.0;
  double eps = 0.0;
};

namespace detail {

// Golden-section minimum of a unimodal function of log x on [lo, hi].
template <typename F>
double golden_min_log(F&& f, double lo, double hi) {
  double a = std::log(lo), b = std::log(hi);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(std::exp(c)), fd = f(std::exp(d));
  for (int it = 0; it < 160; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(std::exp(d));
    }
  }
  return std::exp(0.5 * (a + b));
}

}  // namespace detail

// Numerical minimizer of split_bound_objective.  The objective is separable
// (r and eps enter independent terms plus a log difference), so each radius
// is a one-dimensional unimodal search on a logarithmic axis.  The result is
// the true stationary pair — the closed-form eps_opt of
// loglinf_gradvel_bound is *not* this minimizer; callers compare the two.
inline SplitRadii minimize_split_radii(double h0, double linf_sigma, double l4_grad_sigma) {
  if (!(h0 > 0.0) || !(linf_sigma > 0.0) || !(l4_grad_sigma > 0.0))
    throw std::invalid_argument("minimize_split_radii: all inputs must be positive");
  // Stationary scales bracketing the searches.
  const double r_star = std::pow(1.5 * h0 / linf_sigma, 2.0 / 3.0);
  const double eps_star = std::pow(4.0 * linf_sigma / l4_grad_sigma, 4.0);
  SplitRadii out;
  out.r = detail::golden_min_log(
      [&](double r) { return h0 / std::pow(r, 1.5) + linf_sigma * std::log(r); },
      r_star * 1e-6, r_star * 1e6);
  out.eps = detail::golden_min_log(
      [&](double e) { return l4_grad_sigma * std::pow(e, 0.25) - linf_sigma * std::log(e); },
      eps_star * 1e-6, eps_star * 1e6);
  return out;
}

//---------------------------------------------------------------------------
// Energy budget at a single derivative order
//---------------------------------------------------------------------------

// The semidiscrete dynamics satisfy, for any multi-index alpha,
//   d/dt (1/2) ||D^a sigma||_0^2 + (1/lambda) ||D^a sigma||_0^2
//     = <D^a sigma, D^a advection> + <D^a sigma, D^a stretching>
//       + <D^a sigma, D^a forcing>  ==  i1 + i2 + i3,
// where the inner products carry the Frobenius weights and i2 equals
// 2 <D^a sigma, D^a (sigma grad u)> by the symmetry of the stress.  The
// residual is measured with a centered difference across one step forward
// and one backward, so it is O(dt^2) for the smooth trajectory.
struct EnergyBudget {
  double i1 = 0.0;          // advection inner product
  double i2 = 0.0;          // stretching inner product
  double i3 = 0.0;          // forcing inner product
  double relaxation = 0.0;  // (1/lambda) ||D^a sigma||_0^2
  double energy_rate = 0.0;  // centered-difference d/dt of (1/2) ||D^a sigma||_0^2
  double residual = 0.0;    // |energy_rate + relaxation - (i1 + i2 + i3)|
};

inline EnergyBudget energy_budget(const SymTensorField& sigma, double mollifier_eps,
                                  const PhysicalParams& p, const MultiIndex& alpha,
                                  double dt = 1e-3) {
  p.validate();
  if (alpha[0] < 0 || alpha[1] < 0 || alpha[2] < 0)
    throw std::invalid_argument("energy_budget: multi-index entries must be nonnegative");
  if (!(dt > 0.0)) throw std::invalid_argument("energy_budget: dt must be positive");

  const auto terms = rhs_terms(sigma, p, mollifier_eps, false);
  const auto shat = forward_transform(sigma);

  EnergyBudget b;
  b.i1 = l2_inner_derivative(shat, forward_transform(terms.advection), alpha);
  b.i2 = l2_inner_derivative(shat, forward_transform(terms.stretching), alpha);
  b.i3 = l2_inner_derivative(shat, forward_transform(terms.forcing), alpha);
  const double da = l2_norm_derivative(shat, alpha);
  b.relaxation = p.inv_lambda() * da * da;

  const auto energy_at = [&](const SymTensorField& s) {
    const double v = l2_norm_derivative(forward_transform(s), alpha);
    return 0.5 * v * v;
  };
  const auto fwd = step_rk4(
      sigma, dt, [&](const SymTensorField& s) { return rhs_F_mollified(s, p, mollifier_eps); });
  const auto bwd = step_rk4(sigma, dt, [&](const SymTensorField& s) {
    auto f = rhs_F_mollified(s, p, mollifier_eps);
    for (double& v : f.raw()) v = -v;
    return f;
  });
  b.energy_rate = (energy_at(fwd) - energy_at(bwd)) / (2.0 * dt);
  b.residual = std::abs(b.energy_rate + b.relaxation - (b.i1 + b.i2 + b.i3));
  return b;
}

//---------------------------------------------------------------------------
// Run classification
//---------------------------------------------------------------------------

struct BlowupThresholds {
  double linf_cap = 1e6;     // stress sup-norm ceiling
  double dt_floor = 1e-8;    // adaptive step size considered collapsed
  double integral_cap = 1e6;  // ceiling for the breakdown integral

  void validate() const {
    if (!(linf_cap > 0.0) || !(dt_floor > 0.0) || !(integral_cap > 0.0))
      throw std::invalid_argument("BlowupThresholds: all thresholds must be positive");
  }
};

enum class RunHealth { healthy, blowup_suspected };

struct BlowupReport {
  RunHealth status = RunHealth::healthy;
  std::string reason;                 // empty when healthy
  double trailing_growth_rate = 0.0;  // mean slope of bkm_integral over the trailing window
};

// Threshold classification of a record sequence.  The step-size trigger
// requires two consecutive records at or below the floor: a single short
// step also appears when the integrator lands exactly on the final time, so
// one occurrence is not evidence of collapse.
inline BlowupReport detect_blowup(std::span<const DiagnosticsRecord> records,
                                  const BlowupThresholds& th, std::size_t window = 8) {
  if (records.empty()) throw std::invalid_argument("detect_blowup: no records");
  th.validate();

  BlowupReport rep;
  const std::size_t first = records.size() > window ? records.size() - window : 0;
  const auto& head = records[first];
  const auto& tail = records.back();
  if (tail.t > head.t)
    rep.trailing_growth_rate = (tail.bkm_integral - head.bkm_integral) / (tail.t - head.t);

  bool prev_at_floor = false;
  for (const auto& r : records) {
    if (r.linf_sigma > th.linf_cap) {
      rep.status = RunHealth::blowup_suspected;
      rep.reason = "stress sup-norm exceeded its cap";
      return rep;
    }
    if (r.bkm_integral > th.integral_cap) {
      rep.status = RunHealth::blowup_suspected;
      rep.reason = "breakdown integral exceeded its cap";
      return rep;
    }
    const bool at_floor = r.dt_used > 0.0 && r.dt_used <= th.dt_floor;
    if (at_floor && prev_at_floor) {
      rep.status = RunHealth::blowup_suspected;
      rep.reason = "adaptive step size collapsed to the floor";
      return rep;
    }
    prev_at_floor = at_floor;
  }
  return rep;
}

//---------------------------------------------------------------------------
// CSV emission and ingestion (one row per record, full double precision)
//---------------------------------------------------------------------------

inline constexpr const char* diagnostics_csv_header =
    "t,linf_sigma,linf_gradu,h0,hm,l4_grad_sigma,bkm_integral,combined_integral,dt_used,"
    "energy_residual";

inline void append_diagnostics_csv_row(std::ostream& os, const DiagnosticsRecord& r) {
  const auto p = os.precision(std::numeric_limits<double>::max_digits10);
  os << r.t << ',' << r.linf_sigma << ',' << r.linf_gradu << ',' << r.h0 << ',' << r.hm << ','
     << r.l4_grad_sigma << ',' << r.bkm_integral << ',' << r.combined_integral << ','
     << r.dt_used << ',' << r.energy_residual << '\n';
  os.precision(p);
}

inline void write_diagnostics_csv(std::ostream& os, std::span<const DiagnosticsRecord> records) {
  os << diagnostics_csv_header << '\n';
  for (const auto& r : records) append_diagnostics_csv_row(os, r);
}

inline std::vector<DiagnosticsRecord> read_diagnostics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != diagnostics_csv_header)
    throw std::runtime_error("diagnostics CSV: missing or mismatched header");

  std::vector<DiagnosticsRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::array<double, 10> v{};
    for (int i = 0; i < 10; ++i) {
      std::string tok;
      if (!std::getline(row, tok, ','))
        throw std::runtime_error("diagnostics CSV: row has fewer than 10 columns");
      std::size_t used = 0;
      try {
        v[i] = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || tok.empty())
        throw std::runtime_error("diagnostics CSV: non-numeric token '" + tok + "'");
    }
    std::string extra;
    if (std::getline(row, extra, ','))
      throw std::runtime_error("diagnostics CSV: row has more than 10 columns");
    out.push_back(DiagnosticsRecord{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]});
  }
  return out;
}

}  // namespace obkm
