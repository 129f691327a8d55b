#include <cmath>

#include "kvlasov/symmetry_weights.hpp"
#include "kvlasov/rng.hpp"
#include "oracles/finite_difference.hpp"
#include "support.hpp"

using namespace kvlasov;

namespace {

WeightConfig cfg_eps(double eps) {
  WeightConfig c;
  c.eps_e2 = eps;
  return c;
}

// Built from the definitions, differentiated numerically.
struct WeightOracle {
  double M, a, kappa;
  double s(double r) const { return r * r + a * a; }
  double D(double r) const { return r * r - 2 * M * r + a * a; }
  double g(double r) const { return 1.0 / (s(r) * s(r)) - kappa * D(r) / std::pow(s(r), 4); }
  double w(double r) const { return std::pow(s(r), 4) / (2 * r * (3 * r * r - a * a)); }
  double Rcoef(int i, double r) const {
    const double v[4] = {-s(r) * s(r), -4 * a * M * r, D(r) - a * a, D(r)};
    return v[i];
  }
  double Rt1(int i, double r) const {
    return oracle::central_diff([&](double x) { return Rcoef(i, x) * g(x); }, r, 1e-3 * r);
  }
  double Rt2(int i, double r) const {
    return oracle::central_diff([&](double x) { return w(x) * std::sqrt(g(x)) * Rt1(i, x); }, r, 1e-3 * r);
  }
};

}  // namespace

TEST_CASE("curly R coefficients") {
  const KerrParams p = KerrParams::make(1.0, 0.5);
  const SymmetryVector c = curlyR_coefficients(p, 2.0);
  CHECK(c[0] == doctest::Approx(-18.0625));
  CHECK(c[1] == doctest::Approx(-4.0));
  CHECK(std::abs(c[2]) < 1e-15);
  CHECK(c[3] == doctest::Approx(0.25));
  CHECK(curlyL_coefficients(p)[0] == 1.0);
  CHECK(curlyL_eps_coefficients(p, 0.2)[0] == doctest::Approx(0.2));
}

TEST_CASE("weights at a = 0") {
  const KerrParams p = KerrParams::make(1.0, 0.0);
  const WeightConfig cfg = cfg_eps(0.1);
  for (double r : {2.5, 3.0, 7.0, 40.0}) {
    const Weights w = weights(p, cfg, r);
    CHECK(w.w == doctest::Approx(std::pow(r, 5) / 6.0).epsilon(1e-14));
    CHECK(w.z1 == doctest::Approx((r * r - 2 * r) / std::pow(r, 4)).epsilon(1e-14));
    CHECK(w.z2 == doctest::Approx(1.0 - 0.1 * (r * r - 2 * r) / std::pow(r, 4)).epsilon(1e-14));
    CHECK(w.z == doctest::Approx(w.z1 * w.z2));
  }
  const double rmax = oracle::golden_max([&](double r) { return weights(p, cfg, r).z1; }, 2.1, 10.0);
  CHECK(rmax == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(weights(p, cfg, 3.0).z1 == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
}

TEST_CASE("R~' and R~~'' at a = eps = 0") {
  const KerrParams p = KerrParams::make(1.0, 0.0);
  const WeightConfig cfg = cfg_eps(0.0);
  const SymmetryVector r4 = R_tilde_prime(p, cfg, 4.0);
  CHECK(r4[kLZ2] == doctest::Approx(-0.0078125).epsilon(1e-14));
  CHECK(r4[kSQ] == doctest::Approx(-0.0078125).epsilon(1e-14));
  CHECK(r4[kELZ] == 0.0);
  for (double r : {2.2, 3.0, 5.5, 30.0, 400.0}) {
    const SymmetryVector t1 = R_tilde_prime(p, cfg, r);
    const SymmetryVector t2 = R_tilde_tilde_doubleprime(p, cfg, r);
    const double expect = -2.0 * (r - 3.0) / std::pow(r, 4);
    CHECK(t1[kLZ2] == doctest::Approx(expect).epsilon(1e-12).scale(1e-16));
    CHECK(t1[kSQ] == doctest::Approx(expect).epsilon(1e-12).scale(1e-16));
    CHECK(std::abs(t1[kE2]) < 1e-15 * r);
    CHECK(std::abs(t2[kE2]) < 1e-14);
    CHECK(-t2[kLZ2] == doctest::Approx(1.0 / (r * r)).epsilon(1e-12));
    CHECK(-t2[kSQ] == doctest::Approx(1.0 / (r * r)).epsilon(1e-12));
  }
}

TEST_CASE("radial profile agrees with numerical derivatives of the definitions") {
  for (double a : {0.0, 0.05, 0.3}) {
    for (double eps : {0.0, 0.1, 0.5}) {
      const KerrParams p = KerrParams::make(1.0, a);
      const WeightConfig cfg = cfg_eps(eps);
      const WeightOracle o{1.0, a, eps};
      for (double r : {p.r_plus() + 0.2, 2.9, 3.5, 8.0, 25.0}) {
        const RadialProfile pr = radial_profile(p, cfg, r);
        CHECK(pr.g == doctest::Approx(o.g(r)).epsilon(1e-13));
        CHECK(pr.dg == doctest::Approx(oracle::central_diff([&](double x) { return o.g(x); }, r, 1e-3)).epsilon(1e-7));
        CHECK(pr.dw == doctest::Approx(oracle::central_diff([&](double x) { return o.w(x); }, r, 1e-3)).epsilon(1e-7));
        CHECK(pr.dz ==
              doctest::Approx(oracle::central_diff([&](double x) { return o.g(x) * o.D(x); }, r, 1e-3)).epsilon(1e-7));
        for (int i = 0; i < 4; ++i) {
          const double sc1 = std::abs(o.Rt1(kE2, r)) + std::abs(o.Rt1(kSQ, r));
          CHECK(std::abs(pr.Rt1[i] - o.Rt1(i, r)) < 1e-7 * sc1);
          const double sc2 = std::abs(o.Rt2(kE2, r)) + std::abs(o.Rt2(kSQ, r));
          CHECK(std::abs(pr.Rt2[i] - o.Rt2(i, r)) < 1e-6 * sc2);
          const double d1 =
              oracle::central_diff([&](double x) { return radial_profile(p, cfg, x).Rt1[i]; }, r, 1e-3 * r);
          CHECK(std::abs(pr.dRt1[i] - d1) < 1e-7 * (std::abs(pr.dRt1[kE2]) + std::abs(pr.dRt1[kSQ])));
        }
      }
    }
  }
}

TEST_CASE("blend function") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  const WeightConfig cfg;
  CHECK(chi(p, cfg, 5.0) == 1.0);
  CHECK(chi(p, cfg, 10.0) == 1.0);
  CHECK(chi(p, cfg, 11.0) == 0.0);
  CHECK(chi(p, cfg, 50.0) == 0.0);
  CHECK(chi(p, cfg, 10.5) == doctest::Approx(0.5));
  CHECK(chi_dr(p, cfg, 9.0) == 0.0);
  CHECK(chi_dr(p, cfg, 12.0) == 0.0);
  double prev = 1.0;
  for (int i = 1; i < 100; ++i) {
    const double r = 10.0 + 0.01 * i;
    const double c = chi(p, cfg, r);
    CHECK(c <= prev);
    prev = c;
    CHECK(chi_dr(p, cfg, r) == doctest::Approx(oracle::central_diff([&](double x) { return chi(p, cfg, x); }, r, 1e-4))
                                   .epsilon(1e-7));
  }
  // C^2 at the ends of the blend.
  CHECK(std::abs(chi_dr(p, cfg, 10.0 + 1e-6)) < 1e-10);
  CHECK(std::abs(chi_dr(p, cfg, 11.0 - 1e-6)) < 1e-10);

  const BlendedVectors b = blended_vector(p, cfg, BLPoint{0, 3.0, 1.0, 0});
  CHECK(b.T_chi[kPh] == doctest::Approx(p.omega_H()));
  CHECK(b.T_chi[kT] == 1.0);
  CHECK(blended_vector(p, cfg, BLPoint{0, 20.0, 1.0, 0}).T_chi[kPh] == 0.0);

  WeightConfig bad;
  bad.eps_e2 = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("Morawetz field") {
  const KerrParams p0 = KerrParams::make(1.0, 0.0);
  const WeightConfig cfg0 = cfg_eps(0.0);
  const MorawetzField f0 = morawetz_field(p0, cfg0, BLPoint{0, 3.0, 1.0, 0});
  CHECK(std::abs(f0.A_r[kSQ][kSQ]) < 1e-15);
  CHECK(std::abs(f0.A_r[kLZ2][kLZ2]) < 1e-15);

  const KerrParams p = KerrParams::make(1.0, 0.05);
  const WeightConfig cfg;
  for (double r : {2.5, 3.0, 6.0, 20.0}) {
    const MorawetzField f = morawetz_field(p, cfg, BLPoint{0, r, 1.0, 0});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        CHECK(f.A_r[i][j] == f.A_r[j][i]);
        CHECK(f.q[i][j] == f.q[j][i]);
      }
    CHECK(std::isfinite(morawetz_field_bound_ratio(p, cfg, r)));
  }
}

TEST_CASE("R~' contracted with the Carter direction has one simple root near 3M") {
  for (double a : {0.0, 0.01, 0.05}) {
    const KerrParams p = KerrParams::make(1.0, a);
    const WeightConfig cfg;
    const SymmetryVector sq{0, 0, 0, 1};
    const auto roots = rtilde_prime_roots(p, cfg, sq, p.r_plus() + 1e-3, 1e3);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0] - 3.0) < 3.0 * a + 0.02);
    const double d =
        oracle::central_diff([&](double x) { return R_tilde_prime(p, cfg, x)[kSQ]; }, roots[0], 1e-3);
    CHECK(std::abs(d) > 1e-3);
  }
  // a = 0, eps = 0: exactly 3M.
  const auto r0 = rtilde_prime_roots(KerrParams::make(1.0, 0.0), cfg_eps(0.0), {0, 0, 1, 1}, 2.01, 100.0);
  REQUIRE(r0.size() == 1);
  CHECK(r0[0] == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("negative R~~'' is positive on cone-realizable directions") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  const auto sigma = cone_sigma_samples(p, 2000, 3);
  const auto radii = scan_radii(p, 100);
  CHECK(radii.front() == doctest::Approx(p.r_plus() + 1e-3));
  CHECK(radii.back() == doctest::Approx(1e3));
  for (std::size_t i = 1; i < radii.size(); ++i) CHECK(radii[i] > radii[i - 1]);

  // Against the eps-weighted reference C = 0.5 holds.
  const PositivityScan pe = positivity_scan(p, WeightConfig{}, sigma, radii, 0.5, PositivityReference::curly_L_eps);
  CHECK(pe.violations == 0);
  CHECK(pe.min_ratio > 0.5);
  CHECK(pe.evaluations == 200000);

  // Against curlyL itself the constant is set by the e^2 direction, close to eps.
  for (double eps : {0.05, 0.1, 0.2}) {
    const PositivityScan pl = positivity_scan(p, cfg_eps(eps), sigma, radii, 0.5, PositivityReference::curly_L);
    CHECK(pl.min_ratio > 0.0);
    CHECK(pl.min_ratio == doctest::Approx(eps).epsilon(0.15));
    CHECK(pl.violations > 0);
  }
}

TEST_CASE("eps ceiling scan") {
  EpsCeilingOptions opt;
  opt.sigma_samples = 500;
  opt.radii = 60;
  const std::vector<double> eps{0.8, 0.02, 0.1, 0.3};
  const auto rows = eps_ceiling_scan(1.0, {0.0, 0.05}, eps, opt);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(std::is_sorted(row.eps.begin(), row.eps.end()));
    CHECK(row.monotone);
    CHECK(!row.empty);
    CHECK(row.eps_bar >= 0.3);
  }
  opt.ref = PositivityReference::curly_L;
  const auto lit = eps_ceiling_scan(1.0, {0.05}, {0.02, 0.1, 0.3}, opt);
  CHECK(lit[0].empty);
  CHECK_THROWS_AS(eps_ceiling_scan(1.0, {}, eps), ConfigError);
}
