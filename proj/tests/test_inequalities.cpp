// Property checks for the analytic-toolbox inequality battery.
//
// Every statistical tolerance below was measured first with a standalone
// probe at the same seeds and then pinned with headroom; analytic oracles
// (constant fields, single trigonometric modes, the sharp single-mode
// constant of the creeping-flow solve) are pinned at rounding or quadrature
// accuracy.  The wide-band smoothing case deliberately feeds the checker a
// field family whose measured constants grow as the radius shrinks, and
// asserts the stability criterion catches it.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <sstream>

#include "obkm/inequality_lab.hpp"

using namespace obkm;

namespace {

RandomFieldSpec base_spec() {
  RandomFieldSpec s;
  s.seed = 42;
  s.band_limit = 3;
  s.amplitude = 1.0;
  s.rank = FieldRank::scalar;
  return s;
}

ScalarField constant_scalar(const Grid& g, double v) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.num_points(); ++i) f(0, i) = v;
  return f;
}

ScalarField sine_x1(const Grid& g) {
  ScalarField f(g);
  for (std::size_t i = 0; i < g.num_points(); ++i) f(0, i) = std::sin(g.point(i)[0]);
  return f;
}

}  // namespace

TEST_CASE("product closure in H^m: stable ratios and the constant-pair value",
          "[inequalities]") {
  const auto spec = base_spec();

  SECTION("random ensemble is finite and resolution-stable") {
    const auto rep = check_banach_algebra(spec, 2, 20, 16);
    CHECK(rep.name == "banach_algebra_hm");
    CHECK(rep.samples == 40);
    // measured 0.011928 at this seed; stability measured 1.0000 (the same
    // trigonometric polynomials are re-measured on the finer grid)
    CHECK(rep.max_ratio > 0.005);
    CHECK(rep.max_ratio < 0.05);
    CHECK(rep.ratio_stability > 0.8);
    CHECK(rep.ratio_stability < 1.2);
    CHECK(rep.pass);
  }

  SECTION("constant pair achieves the exact ratio vol^{-1/2}") {
    const Grid g = Grid::make(16);
    const ScalarField f = constant_scalar(g, 2.5);
    const ScalarField h = constant_scalar(g, -1.3);
    ScalarField prod(g);
    for (std::size_t i = 0; i < g.num_points(); ++i) prod(0, i) = f(0, i) * h(0, i);
    const double ratio = hm_norm(prod, 2) / (hm_norm(f, 2) * hm_norm(h, 2));
    CHECK(ratio == Catch::Approx(1.0 / std::sqrt(g.volume())).epsilon(1e-12));
  }

  SECTION("rejects subcritical smoothness and empty ensembles") {
    CHECK_THROWS_AS(check_banach_algebra(spec, 1, 4, 16), std::invalid_argument);
    CHECK_THROWS_AS(check_banach_algebra(spec, 2, 0, 16), std::invalid_argument);
    CHECK_THROWS_AS(check_banach_algebra(spec, 2, 4, 4), std::invalid_argument);
  }
}

TEST_CASE("product rule and derivative commutator ratios", "[inequalities]") {
  const auto spec = base_spec();
  const MultiIndex alpha{1, 0, 1};

  SECTION("random ensemble") {
    const auto [prod, comm] = check_calc_inequalities(spec, 2, alpha, 20, 16);
    CHECK(prod.name == "product_rule_hm");
    CHECK(comm.name == "commutator_l2");
    CHECK(prod.samples == 40);
    // measured: product 0.3167 (stability 0.9755), commutator 0.1012 (0.9339)
    CHECK(prod.max_ratio > 0.15);
    CHECK(prod.max_ratio < 0.6);
    CHECK(prod.ratio_stability > 0.8);
    CHECK(prod.ratio_stability < 1.2);
    CHECK(prod.pass);
    CHECK(comm.max_ratio > 0.05);
    CHECK(comm.max_ratio < 0.25);
    CHECK(comm.ratio_stability > 0.7);
    CHECK(comm.ratio_stability < 1.2);
    CHECK(comm.pass);
  }

  SECTION("a constant first factor commutes with the derivative exactly") {
    const Grid g = Grid::make(16);
    RandomFieldSpec s = spec;
    s.seed = 5;
    const ScalarField f = random_scalar_field(g, s);
    const auto fhat = forward_transform(f);
    ScalarField prod(g);
    for (std::size_t i = 0; i < g.num_points(); ++i) prod(0, i) = 1.7 * f(0, i);
    const ScalarField d_prod =
        inverse_transform(spectral_derivative(forward_transform(prod), alpha));
    const ScalarField daf = inverse_transform(spectral_derivative(fhat, alpha));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.num_points(); ++i)
      worst = std::max(worst, std::abs(d_prod(0, i) - 1.7 * daf(0, i)));
    CHECK(worst < 1e-12);  // measured 1.3e-15
  }

  SECTION("a constant second factor reduces to the plain derivative bound") {
    const Grid g = Grid::make(16);
    RandomFieldSpec s = spec;
    s.seed = 5;
    const ScalarField f = random_scalar_field(g, s);
    const auto fhat = forward_transform(f);
    const ScalarField daf = inverse_transform(spectral_derivative(fhat, alpha));
    const ScalarField c = constant_scalar(g, 1.7);

    // commutator LHS collapses to |g| ||D^a f||_0 because D^a g = 0
    const double lhs = 1.7 * l2_norm(daf);
    const double rhs =
        linf_norm(inverse_transform(gradient_hat(fhat))) * hm_norm(c, 1) + hm_norm(fhat, 2) * 1.7;
    CHECK(lhs <= rhs);  // measured ratio 0.19
    CHECK(lhs / rhs > 0.05);
  }

  SECTION("rejects out-of-range derivative orders") {
    CHECK_THROWS_AS(check_calc_inequalities(spec, 2, {0, 0, 0}, 4, 16), std::invalid_argument);
    CHECK_THROWS_AS(check_calc_inequalities(spec, 2, {2, 1, 0}, 4, 16), std::invalid_argument);
  }
}

TEST_CASE("triple-product interpolation and its transport pairing", "[inequalities]") {
  const auto spec = base_spec();

  SECTION("ensemble at alpha=(2,0,0), beta=(1,0,0)") {
    const auto [triple, pairing] = check_gn_triple(spec, {2, 0, 0}, {1, 0, 0}, 12, 16);
    CHECK(triple.name == "gn_triple_product");
    CHECK(pairing.name == "gn_stress_transport_pairing");
    CHECK(triple.samples == 24);
    // measured: triple 0.02279 (stability 0.9431), pairing 6.9e-5 (0.9354)
    CHECK(triple.max_ratio > 0.01);
    CHECK(triple.max_ratio < 0.05);
    CHECK(triple.ratio_stability > 0.8);
    CHECK(triple.ratio_stability < 1.1);
    CHECK(triple.pass);
    CHECK(pairing.max_ratio > 2e-5);
    CHECK(pairing.max_ratio < 3e-4);
    CHECK(pairing.ratio_stability > 0.8);
    CHECK(pairing.ratio_stability < 1.1);
    CHECK(pairing.pass);
  }

  SECTION("ensemble at a mixed-axis exponent pair") {
    const auto [triple, pairing] = check_gn_triple(spec, {1, 1, 1}, {0, 1, 0}, 12, 16);
    // measured: triple 0.006595 (stability 0.9091), pairing 4.5e-5 (0.9578)
    CHECK(triple.max_ratio > 0.002);
    CHECK(triple.max_ratio < 0.02);
    CHECK(triple.ratio_stability > 0.8);
    CHECK(triple.ratio_stability < 1.1);
    CHECK(pairing.max_ratio > 1e-5);
    CHECK(pairing.max_ratio < 2e-4);
    CHECK(triple.pass);
    CHECK(pairing.pass);
  }

  SECTION("sine oracle: h=f=g=sin(x1) gives ratio 4/(9 pi)") {
    // LHS = integral |sin| cos^2 * (2 pi)^2 = (4/3)(2 pi)^2; RHS = ||sin||_2^2
    // with ||sin||_2^2 = 12 pi^3.  The |.| kinks limit the quadrature to
    // ~1% relative accuracy at n=32 (measured 0.97%).
    const Grid g = Grid::make(32);
    const ScalarField s = sine_x1(g);
    const auto shat = forward_transform(s);
    const ScalarField d2 = inverse_transform(spectral_derivative(shat, {2, 0, 0}));
    const ScalarField d1 = inverse_transform(spectral_derivative(shat, {1, 0, 0}));
    double lhs = 0.0;
    for (std::size_t i = 0; i < g.num_points(); ++i)
      lhs += std::abs(d2(0, i)) * std::abs(d1(0, i)) * std::abs(d1(0, i));
    lhs *= g.cell_volume();
    const double h2 = hm_norm(shat, 2);
    CHECK(h2 == Catch::Approx(std::sqrt(12.0 * std::pow(std::acos(-1.0), 3))).epsilon(1e-12));
    const double ratio = lhs / (h2 * h2);  // the interpolation exponents sum to one full power
    const double exact = 4.0 / (9.0 * std::acos(-1.0));
    CHECK(ratio == Catch::Approx(exact).epsilon(0.02));
  }

  SECTION("a zero factor zeroes the left-hand side") {
    const Grid g = Grid::make(16);
    const ScalarField z(g);
    const ScalarField f = sine_x1(g);
    double lhs = 0.0;
    for (std::size_t i = 0; i < g.num_points(); ++i)
      lhs += std::abs(z(0, i)) * std::abs(f(0, i)) * std::abs(f(0, i));
    CHECK(lhs == 0.0);
  }

  SECTION("rejects exponent pairs outside the strict interior") {
    CHECK_THROWS_AS(check_gn_triple(spec, {2, 0, 0}, {0, 0, 0}, 2, 16), std::invalid_argument);
    CHECK_THROWS_AS(check_gn_triple(spec, {2, 0, 0}, {2, 0, 0}, 2, 16), std::invalid_argument);
    CHECK_THROWS_AS(check_gn_triple(spec, {2, 0, 0}, {0, 1, 0}, 2, 16), std::invalid_argument);
    CHECK_THROWS_AS(check_gn_triple(spec, {2, 0, 0}, {3, 0, 0}, 2, 16), std::invalid_argument);
  }
}

TEST_CASE("stress to velocity gradient: sharp family constant 1/sqrt(2)", "[inequalities]") {
  const auto spec = base_spec();

  SECTION("random ensemble stays below the sharp constant") {
    std::array<double, 4> lq{};
    const auto rep = check_cz_bound(spec, 2, 0.7, 20, 16, &lq);
    CHECK(rep.name == "stress_to_velocity_gradient_hm");
    CHECK(rep.samples == 40);
    // measured 0.42436; the single-mode algebra caps every ratio at 1/sqrt(2)
    CHECK(rep.max_ratio > 0.3);
    CHECK(rep.max_ratio <= (1.0 + 1e-9) / std::sqrt(2.0));
    CHECK(rep.ratio_stability > 0.9);
    CHECK(rep.ratio_stability < 1.1);
    CHECK(rep.pass);
    for (double r : lq) {
      CHECK(r > 0.3);  // measured 0.412..0.435
      CHECK(r <= (1.0 + 1e-9) / std::sqrt(2.0));
    }
    // integrability-index growth is far below the linear allowance
    for (std::size_t i = 1; i < lq.size(); ++i) CHECK(lq[i] <= std::pow(2.0, double(i)) * lq[0]);
  }

  SECTION("single shear mode attains 1/sqrt(2) for every m and every q") {
    const Grid g = Grid::make(16);
    SymTensorField sig(g);
    for (std::size_t i = 0; i < g.num_points(); ++i)
      sig(sym_flat(0, 1), i) = 1.3 * std::sin(g.point(i)[0]);
    const auto shat = forward_transform(sig);
    const auto flow = solve_stokes_hat(shat, 0.7);
    for (int m : {0, 2, 5}) {
      const double r = 0.7 * hm_norm(flow.grad_u, m) / hm_norm(shat, m);
      CHECK(r == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    }
    const TensorField gu = inverse_transform(flow.grad_u);
    const SymTensorField sphys = inverse_transform(shat);
    for (double q : {2.0, 4.0, 16.0}) {
      const double r = 0.7 * lp_norm(gu, q) / lp_norm(sphys, q);
      CHECK(r == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    }
  }

  SECTION("plain L2 case (m = 0) is admissible") {
    const auto rep = check_cz_bound(spec, 0, 1.0, 4, 16);
    CHECK(rep.pass);
    CHECK(rep.max_ratio > 0.0);
  }

  SECTION("rejects nonpositive viscosity and negative smoothness") {
    CHECK_THROWS_AS(check_cz_bound(spec, 2, 0.0, 4, 16), std::invalid_argument);
    CHECK_THROWS_AS(check_cz_bound(spec, -1, 1.0, 4, 16), std::invalid_argument);
  }
}

TEST_CASE("smoothing-operator constants across the radius list", "[inequalities]") {
  const auto spec = base_spec();
  const std::array<double, 3> radii{0.8, 0.4, 0.2};

  SECTION("smooth family: all three constants hold uniformly") {
    const auto reps = check_mollifier_properties(spec, 2, radii, 4, 64);
    CHECK(reps[0].name == "mollifier_approx_identity");
    CHECK(reps[1].name == "mollifier_derivative_gain");
    CHECK(reps[2].name == "mollifier_sup_smoothing");
    for (const auto& r : reps) CHECK(r.samples == 12);
    // measured: 0.1634 (stability 0.3321), 1.3900 (0.4519), 0.1583 (0.0511);
    // the symmetric bump converges at second order, so the identity-error
    // constant decays ~radius instead of saturating
    CHECK(reps[0].max_ratio > 0.08);
    CHECK(reps[0].max_ratio < 0.3);
    CHECK(reps[0].ratio_stability > 0.15);
    CHECK(reps[0].ratio_stability < 0.6);
    CHECK(reps[1].max_ratio > 0.7);
    CHECK(reps[1].max_ratio < 2.5);
    CHECK(reps[1].ratio_stability > 0.25);
    CHECK(reps[1].ratio_stability < 0.7);
    CHECK(reps[2].max_ratio > 0.08);
    CHECK(reps[2].max_ratio < 0.3);
    CHECK(reps[2].ratio_stability > 0.01);
    CHECK(reps[2].ratio_stability < 0.2);
    for (const auto& r : reps) CHECK(r.pass);
  }

  SECTION("wide-band family: the stability criterion detects rate saturation") {
    // With spectral mass far above 1/radius, the identity-error and
    // derivative-gain constants grow as the radius shrinks (measured
    // stability 3.18 and 21.8) and must be flagged; the sup-norm constant
    // genuinely exercises its exponent and stays stable (measured 0.976).
    RandomFieldSpec wide = spec;
    wide.band_limit = 21;
    const auto reps = check_mollifier_properties(wide, 2, radii, 2, 64);
    CHECK(reps[0].ratio_stability > 2.0);
    CHECK_FALSE(reps[0].pass);
    CHECK(reps[1].ratio_stability > 2.0);
    CHECK_FALSE(reps[1].pass);
    CHECK(reps[2].ratio_stability > 0.8);
    CHECK(reps[2].ratio_stability < 1.2);
    CHECK(reps[2].pass);
  }

  SECTION("sine identity-error constants, pinned") {
    // deterministic single-mode case on the fine grid that resolves the
    // smallest radius; measured 1.817383e-2 / 9.125714e-3 / 4.784652e-3
    const Grid g = Grid::make(128);
    const ScalarField s = sine_x1(g);
    const auto shat = forward_transform(s);
    const double sm = hm_norm(shat, 2);
    const std::array<double, 3> eps{0.4, 0.2, 0.1};
    const std::array<double, 3> pinned{1.817383e-2, 9.125714e-3, 4.784652e-3};
    std::array<double, 3> c{};
    for (std::size_t i = 0; i < eps.size(); ++i) {
      const Mollifier moll = Mollifier::make(g, eps[i]);
      auto jhat = shat;
      moll.apply_inplace(jhat);
      for (std::size_t idx = 0; idx < g.num_points(); ++idx) jhat(0, idx) -= shat(0, idx);
      c[i] = hm_norm(jhat, 1) / (eps[i] * sm);
      CHECK(c[i] == Catch::Approx(pinned[i]).epsilon(0.01));
    }
    CHECK(c[2] < c[1]);
    CHECK(c[1] < c[0]);
  }

  SECTION("a constant field is a fixed point of the smoother") {
    const Grid g = Grid::make(32);
    const ScalarField c = constant_scalar(g, 2.5);
    const auto chat = forward_transform(c);
    for (double eps : {0.8, 0.4}) {
      const Mollifier moll = Mollifier::make(g, eps);
      auto jhat = chat;
      moll.apply_inplace(jhat);
      for (std::size_t i = 0; i < g.num_points(); ++i) jhat(0, i) -= chat(0, i);
      CHECK(hm_norm(jhat, 1) < 1e-11);  // measured 1.3e-13
    }
  }

  SECTION("rejects degenerate inputs and unresolvable radii") {
    const std::array<double, 1> one{0.4};
    CHECK_THROWS_AS(check_mollifier_properties(spec, 2, one, 2, 64), std::invalid_argument);
    CHECK_THROWS_AS(check_mollifier_properties(spec, 0, radii, 2, 64), std::invalid_argument);
    const std::array<double, 2> tiny{0.4, 0.05};  // 0.05 < 2 * spacing at n = 64
    CHECK_THROWS_AS(check_mollifier_properties(spec, 2, tiny, 2, 64), std::invalid_argument);
  }
}

TEST_CASE("sup-norm embedding ratios", "[inequalities]") {
  const auto spec = base_spec();

  SECTION("random ensemble") {
    const auto rep = check_sobolev_embedding(spec, 2, 20, 16);
    CHECK(rep.name == "sup_norm_by_hm");
    CHECK(rep.samples == 40);
    // measured 0.026146, stability 1.0779 (the finer grid sees a slightly
    // larger pointwise supremum of the same polynomial)
    CHECK(rep.max_ratio > 0.01);
    CHECK(rep.max_ratio < 0.06);
    CHECK(rep.ratio_stability > 0.9);
    CHECK(rep.ratio_stability < 1.25);
    CHECK(rep.pass);
  }

  SECTION("constant and sine oracles") {
    const Grid g = Grid::make(32);
    const ScalarField c = constant_scalar(g, 3.7);
    CHECK(linf_norm(c) / hm_norm(c, 2) ==
          Catch::Approx(1.0 / std::sqrt(g.volume())).epsilon(1e-12));
    const ScalarField s = sine_x1(g);
    const double pi = std::acos(-1.0);
    CHECK(linf_norm(s) / hm_norm(s, 2) ==
          Catch::Approx(1.0 / std::sqrt(12.0 * pi * pi * pi)).epsilon(1e-10));
  }

  SECTION("rejects subcritical smoothness") {
    CHECK_THROWS_AS(check_sobolev_embedding(spec, 1, 4, 16), std::invalid_argument);
  }
}

TEST_CASE("smoothing-radius convergence of the regularized evolution", "[inequalities]") {
  PhysicalParams p;
  p.nu_s = 1.0;
  p.nu_p = 0.5;
  p.lambda = 1.0;

  SECTION("band-limited small stress: first-order-or-better rate") {
    const Grid g = Grid::make(32);
    RandomFieldSpec ic = base_spec();
    ic.rank = FieldRank::sym_tensor;
    ic.amplitude = 0.3;
    const SymTensorField sig0 = random_sym_tensor_field(g, ic);
    const std::array<double, 3> radii{0.8, 0.8 / std::sqrt(2.0), 0.4};
    const auto rate = cauchy_convergence_rate(sig0, p, 0.25, 0.025, radii);
    REQUIRE(rate.distances.size() == 2);
    CHECK(rate.epsilons[0] == Catch::Approx(0.8));
    CHECK(rate.epsilons[1] == Catch::Approx(0.8 / std::sqrt(2.0)));
    CHECK_FALSE(rate.exact_zero);
    CHECK(rate.distances[0] > rate.distances[1]);
    CHECK(rate.distances[1] > 0.0);
    CHECK(rate.slope >= 0.9);                      // the acceptance contract
    CHECK(rate.slope == Catch::Approx(2.24).margin(0.45));  // measured 2.2385
  }

  SECTION("zero initial stress: exact, with undefined order flagged") {
    const Grid g = Grid::make(16);
    const SymTensorField zero(g);
    const std::array<double, 3> radii{2.4, 2.4 / std::sqrt(2.0), 1.2};
    const auto rate = cauchy_convergence_rate(zero, p, 0.2, 0.05, radii);
    CHECK(rate.exact_zero);
    CHECK(std::isinf(rate.slope));
    for (double d : rate.distances) CHECK(d == 0.0);
  }

  SECTION("constant initial stress: no advection, so no radius dependence") {
    const Grid g = Grid::make(16);
    SymTensorField cst(g);
    for (std::size_t i = 0; i < g.num_points(); ++i) {
      cst(sym_flat(0, 0), i) = 0.7;
      cst(sym_flat(1, 1), i) = -0.2;
      cst(sym_flat(0, 1), i) = 0.4;
    }
    const std::array<double, 3> radii{2.4, 2.4 / std::sqrt(2.0), 1.2};
    const auto rate = cauchy_convergence_rate(cst, p, 0.2, 0.05, radii);
    CHECK(rate.exact_zero);
    for (double d : rate.distances) CHECK(d == 0.0);
  }

  SECTION("integration failure propagates") {
    const Grid g = Grid::make(16);
    RandomFieldSpec huge;
    huge.seed = 7;
    huge.band_limit = 3;
    huge.amplitude = 1e8;
    huge.rank = FieldRank::sym_tensor;
    const SymTensorField big = random_sym_tensor_field(g, huge);
    const std::array<double, 3> radii{2.4, 2.4 / std::sqrt(2.0), 1.2};
    CHECK_THROWS_AS(cauchy_convergence_rate(big, p, 0.5, 0.05, radii), std::runtime_error);
  }

  SECTION("rejects malformed radius lists") {
    const Grid g = Grid::make(16);
    const SymTensorField zero(g);
    const std::array<double, 2> two{2.4, 1.2};
    CHECK_THROWS_AS(cauchy_convergence_rate(zero, p, 0.2, 0.05, two), std::invalid_argument);
    const std::array<double, 3> nongeom{2.4, 1.7, 1.2};
    CHECK_THROWS_AS(cauchy_convergence_rate(zero, p, 0.2, 0.05, nongeom), std::invalid_argument);
    const std::array<double, 3> increasing{1.2, 1.7, 2.4};
    CHECK_THROWS_AS(cauchy_convergence_rate(zero, p, 0.2, 0.05, increasing),
                    std::invalid_argument);
    const std::array<double, 3> radii{2.4, 2.4 / std::sqrt(2.0), 1.2};
    CHECK_THROWS_AS(cauchy_convergence_rate(zero, p, 0.0, 0.05, radii), std::invalid_argument);
  }
}

TEST_CASE("inequality reports serialize to stable flat JSON", "[inequalities]") {
  SECTION("hand-built reports have a byte-exact rendering") {
    InequalityReport a;
    a.name = "x";
    a.samples = 3;
    a.max_ratio = 0.5;
    a.ratio_stability = 1.0;
    a.pass = true;
    InequalityReport b;
    b.name = "y";
    b.samples = 7;
    b.max_ratio = std::numeric_limits<double>::infinity();
    b.ratio_stability = 0.25;
    b.pass = false;

    std::ostringstream os;
    const std::array<InequalityReport, 2> reps{a, b};
    write_reports_json(os, reps);
    CHECK(os.str() ==
          "[\n"
          "  {\"name\":\"x\",\"samples\":3,\"max_ratio\":0.5,\"ratio_stability\":1,\"pass\":true},\n"
          "  {\"name\":\"y\",\"samples\":7,\"max_ratio\":null,\"ratio_stability\":0.25,"
          "\"pass\":false}\n"
          "]\n");
  }

  SECTION("identical inputs render byte-identical documents") {
    const auto spec = base_spec();
    const auto r1 = check_banach_algebra(spec, 2, 5, 16);
    const auto r2 = check_banach_algebra(spec, 2, 5, 16);
    std::ostringstream o1, o2;
    write_report_json(o1, r1);
    write_report_json(o2, r2);
    CHECK(o1.str() == o2.str());
    CHECK(o1.str().find("\"name\":\"banach_algebra_hm\"") != std::string::npos);
  }
}
