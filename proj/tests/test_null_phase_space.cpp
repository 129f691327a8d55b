#include <cmath>

#include "kvlasov/null_phase_space.hpp"
#include "kvlasov/rng.hpp"
#include "oracles/grid_oracle.hpp"
#include "support.hpp"

using namespace kvlasov;

TEST_CASE("radial null ray normalization") {
  const KerrParams p = KerrParams::make(1.0, 0.0);
  const NullState s = null_normalize(p, BLPoint{0, 10.0, M_PI / 2, 0}, 1.0, 0.0, 0.0);
  CHECK(s.v_con[kT] == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(s.v_cov[kT] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::abs(null_residual(p, s)) < 1e-15);
}

TEST_CASE("normalization against an extended-precision quadratic") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  const double r = 3.0, th = M_PI / 2, vth = 0.2, vph = 0.1;
  const NullState s = null_normalize(p, BLPoint{0, r, th, 0}, 0.0, vth, vph);
  // g_tt (v^t)^2 + 2 g_tphi v^t v^phi + g_thth (v^th)^2 + g_phph (v^ph)^2 = 0
  const long double a = 0.05L, M = 1.0L, R = r;
  const long double S = R * R, D = R * R - 2 * M * R + a * a, P = (R * R + a * a) * (R * R + a * a) - a * a * D;
  const long double gtt = -(1 - 2 * M * R / S), gtp = -2 * M * a * R / S, gpp = P / S, gthth = S;
  const long double A = gtt, B = 2 * gtp * vph, C = gthth * vth * vth + gpp * vph * vph;
  const long double vt = (-B - std::sqrt(B * B - 4 * A * C)) / (2 * A);
  CHECK(std::abs(s.v_con[kT] - (double)vt) < 1e-12 * (double)vt);
}

TEST_CASE("covariant and contravariant normalizations agree") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  for (std::uint64_t i = 0; i < 500; ++i) {
    const NullState s = random_null_state(p, 3, i);
    if (s.v_cov[kT] > 0.0) continue;
    const NullState c = null_normalize_covariant(p, s.x, s.v_cov[kR], s.v_cov[kTh], s.v_cov[kPh]);
    CHECK(rel_err(c.v_cov[kT], s.v_cov[kT]) < 1e-12);
    const NullState u = null_normalize(p, s.x, s.v_con[kR], s.v_con[kTh], s.v_con[kPh]);
    CHECK(rel_err(u.v_con[kT], s.v_con[kT]) < 1e-12);
  }
}

TEST_CASE("zero spatial momentum is rejected") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  CHECK_THROWS_AS(null_normalize(p, BLPoint{0, 6.0, 1.0, 0}, 0.0, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(null_normalize(p, BLPoint{0, 1.0, 1.0, 0}, 1.0, 0.0, 0.0), DomainError);
}

TEST_CASE("validate_null_state") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  NullState s = random_null_state(p, 1, 0);
  CHECK_NOTHROW(validate_null_state(p, s));
  s.v_cov[kR] *= 1.01;
  CHECK_THROWS_AS(validate_null_state(p, s), DomainError);
}

TEST_CASE("random states lie on the cone with v^t > 0") {
  for (double a : {0.0, 0.05, 0.3}) {
    const KerrParams p = KerrParams::make(1.0, a);
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const NullState s = random_null_state(p, 17, i);
      CHECK(s.v_con[kT] > 0.0);
      CHECK(std::abs(null_residual(p, s)) < 1e-12);
      CHECK(cone_measure_weight(p, s) > 0.0);
    }
  }
}

TEST_CASE("Carter constant expansion") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const NullState s = random_null_state(p, 23, i);
    const double sn = std::sin(s.x.theta), cs = std::cos(s.x.theta);
    const double ref = s.v_cov[kTh] * s.v_cov[kTh] + cs * cs / (sn * sn) * s.v_cov[kPh] * s.v_cov[kPh] +
                       p.a * p.a * sn * sn * s.v_cov[kT] * s.v_cov[kT];
    CHECK(std::abs(carter_q(p, s) - ref) <= 1e-13 * std::abs(ref));
  }
}

TEST_CASE("cone measure spot value and uniform equivalence with r^2 sin") {
  const KerrParams p0 = KerrParams::make(1.0, 0.0);
  const NullState s = null_normalize(p0, BLPoint{0, 10.0, M_PI / 2, 0}, 1.0, 0.0, 0.0);
  // Sigma sin / |v_t| with v_t = g_tt v^t = -0.8 * 1.25 = -1.
  CHECK(cone_measure_weight(p0, s) == doctest::Approx(100.0).epsilon(1e-14));

  const KerrParams p = KerrParams::make(1.0, 0.05);
  double lo = 1e300, hi = 0;
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const NullState t = random_null_state(p, 29, i);
    const double q = cone_measure_weight(p, t) * std::abs(t.v_cov[kT]) / (t.x.r * t.x.r * std::sin(t.x.theta));
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  CHECK(lo > 0.99);
  CHECK(hi < 1.01);
}

TEST_CASE("cone measure as the massless limit of the mass shell") {
  // Massive shell: density sqrt|g| / |p_0| over dp^1 dp^2 dp^3 with
  // g(p,p) = -m^2; the flux through a thin shell converges as m -> 0.
  const KerrParams p = KerrParams::make(1.0, 0.05);
  const BLPoint x{0, 5.0, 1.1, 0};
  const NullState s = null_normalize(p, x, 0.3, 0.02, -0.01);
  const Mat4 g = metric_lower(p, x);
  auto p0_for_mass = [&](double m) {
    // Solve g_tt v^t^2 + 2 g_tph v^t v^ph + spatial = -m^2 for v^t.
    const double vph = s.v_con[kPh];
    const double A = g[kT][kT], B = 2 * g[kT][kPh] * vph;
    const double C = g[kR][kR] * s.v_con[kR] * s.v_con[kR] + g[kTh][kTh] * s.v_con[kTh] * s.v_con[kTh] +
                     g[kPh][kPh] * vph * vph + m * m;
    const double vt = (-B - std::sqrt(B * B - 4 * A * C)) / (2 * A);
    return g[kT][kT] * vt + g[kT][kPh] * vph;
  };
  const double det = g[kR][kR] * g[kTh][kTh] * (g[kT][kT] * g[kPh][kPh] - g[kT][kPh] * g[kT][kPh]);
  const double limit = std::sqrt(std::abs(det)) / std::abs(p0_for_mass(1e-7));
  CHECK(rel_err(limit, cone_measure_weight(p, s)) < 1e-10);
  // Convergence is quadratic in m.
  const double e1 = rel_err(std::sqrt(std::abs(det)) / std::abs(p0_for_mass(1e-2)), cone_measure_weight(p, s));
  const double e2 = rel_err(std::sqrt(std::abs(det)) / std::abs(p0_for_mass(5e-3)), cone_measure_weight(p, s));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("Klimontovich weight bookkeeping") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  const NullState s = random_null_state(p, 31, 4);
  CHECK(klimontovich_weight(p, s, 0.0, 1.0) == 0.0);
  CHECK(klimontovich_weight(p, s, 2.0, 0.5) > 0.0);
  CHECK_THROWS_AS(klimontovich_weight(p, s, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(klimontovich_weight(p, s, 1.0, 0.0), DomainError);
  NullState bad = state_from_covariant(p, BLPoint{0, 20.0, 1.0, 0}, {0.5, 0.1, 0.0, 0.0});
  CHECK_THROWS_AS(klimontovich_weight(p, bad, 1.0, 1.0), DomainError);
}

TEST_CASE("ergoregion states with v_t > 0 exist") {
  const KerrParams p = KerrParams::make(1.0, 0.3);
  // Retrograde relative to the locally non-rotating frame inside the
  // ergosphere (r_E = 2M on the equator): negative Killing energy.
  const BLPoint x{0, 1.98, M_PI / 2, 0};
  const NullState s = null_state_from_direction(p, x, {0.0, 0.0, -1.0});
  CHECK(s.v_con[kT] > 0.0);
  CHECK(s.v_cov[kT] > 0.0);
  CHECK(klimontovich_weight(p, s, 1.0, 1.0) > 0.0);
  // The contravariant parametrization takes the smaller root, which always
  // has v_t < 0; the same spatial v^i also admits the v_t > 0 root.
  const NullState u = null_normalize(p, x, s.v_con[kR], s.v_con[kTh], s.v_con[kPh]);
  CHECK(u.v_cov[kT] < 0.0);
  CHECK(u.v_con[kT] < s.v_con[kT]);
}

TEST_CASE("datum matches an independent evaluation") {
  const InitialDatum f0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const double r = 6.0 + 4.0 * counter_uniform(1, i, 0), th = 0.8 + 1.5 * counter_uniform(1, i, 1);
    const double vr = -0.5 + counter_uniform(1, i, 2), v2 = 0.4 * counter_uniform(1, i, 3) - 0.2,
                 v3 = 0.4 * counter_uniform(1, i, 4) - 0.15;
    CHECK(rel_err(f0.value(r, th, vr, v2, v3), oracle::datum(f0, r, th, vr, v2, v3)) < 1e-14);
  }
  CHECK(f0.value(5.0, 1.5, 0, 0, 0.05) == 0.0);
  CHECK(f0.value(8.0, M_PI / 2, 0, 0, 0.05) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sampling is deterministic and seed dependent") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  const InitialDatum f0;
  for (Proposal prop : {Proposal::uniform, Proposal::gaussian}) {
    SamplingOptions o;
    o.proposal = prop;
    const Ensemble a = sample_ensemble(p, f0, 500, 42, o), b = sample_ensemble(p, f0, 500, 42, o);
    const Ensemble c = sample_ensemble(p, f0, 500, 43, o);
    REQUIRE(a.particles.size() == b.particles.size());
    for (std::size_t i = 0; i < a.particles.size(); ++i) {
      CHECK(a.particles[i].w == b.particles[i].w);
      CHECK(a.particles[i].state.v_cov == b.particles[i].state.v_cov);
    }
    CHECK(a.particles[0].state.x.r != c.particles[0].state.x.r);
    for (const auto& q : a.particles) {
      CHECK(std::abs(null_residual(p, q.state)) < 1e-12);
      CHECK(q.w >= 0.0);
    }
  }
}

TEST_CASE("single-cell grid gives one particle at the cell centre") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  InitialDatum f0;
  SamplingOptions o;
  o.layout = Layout::grid_midpoint;
  const Ensemble e = sample_ensemble(p, f0, 1, 0, o);
  REQUIRE(e.particles.size() == 1);
  const auto& s = e.particles[0].state;
  CHECK(s.x.r == doctest::Approx(8.0));
  CHECK(s.x.theta == doctest::Approx(M_PI / 2));
  CHECK(s.v_con[kPh] == doctest::Approx(0.05));
  CHECK(e.particles[0].w == doctest::Approx(klimontovich_weight(p, s, f0.value(8.0, M_PI / 2, 0, 0, 0.05),
                                                                f0.box_volume())));
}

TEST_CASE("sampling rejects bad supports") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  InitialDatum f0;
  f0.r_min = 1.5;
  CHECK_THROWS_AS(sample_ensemble(p, f0, 10, 1), ConfigError);
  f0 = InitialDatum{};
  f0.theta_min = 0.0;
  CHECK_THROWS_AS(sample_ensemble(p, f0, 10, 1), ConfigError);
  f0 = InitialDatum{};
  f0.r_max = f0.r_min;
  CHECK_THROWS_AS(sample_ensemble(p, f0, 10, 1), ConfigError);
}

TEST_CASE("total weight converges to the grid oracle") {
  const KerrParams p = KerrParams::make(1.0, 0.0);
  const InitialDatum f0;
  const double ref = oracle::total_weight(1.0, f0, {24, 24, 24});
  const double ref_coarse = oracle::total_weight(1.0, f0, {12, 12, 16});
  CHECK(rel_err(ref, ref_coarse) < 1e-4);
  SamplingOptions o;
  o.proposal = Proposal::gaussian;
  double prev_err = 0.0;
  for (std::size_t N : {20000u, 80000u}) {
    const Ensemble e = sample_ensemble(p, f0, N, 7, o);
    const double err = rel_err(e.total_weight(), ref);
    CHECK(err < 3.0 / std::sqrt(static_cast<double>(N)) * 2.0);
    prev_err = err;
  }
  (void)prev_err;
}
