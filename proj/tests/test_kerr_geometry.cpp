#include <cmath>

#include "kvlasov/kerr_geometry.hpp"
#include "kvlasov/null_phase_space.hpp"
#include "kvlasov/rng.hpp"
#include "oracles/finite_difference.hpp"
#include "support.hpp"

using namespace kvlasov;

namespace {

// Textbook Boyer-Lindquist components, evaluated in long double.
Mat4 textbook_lower(double M, double a, double r, double th) {
  const long double s = std::sin((long double)th), c = std::cos((long double)th);
  const long double S = (long double)r * r + (long double)a * a * c * c;
  const long double D = (long double)r * r - 2.0L * M * r + (long double)a * a;
  const long double P = std::pow((long double)r * r + (long double)a * a, 2) - (long double)a * a * D * s * s;
  Mat4 g{};
  g[0][0] = (double)(-(1.0L - 2.0L * M * r / S));
  g[0][3] = g[3][0] = (double)(-2.0L * M * a * r * s * s / S);
  g[3][3] = (double)(P * s * s / S);
  g[1][1] = (double)(S / D);
  g[2][2] = (double)S;
  return g;
}

}  // namespace

TEST_CASE("parameters and horizon") {
  CHECK(KerrParams::make(1.0, 0.0).r_plus() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(horizon_radius(KerrParams::make(1.0, 0.6)) == doctest::Approx(1.8).epsilon(1e-15));
  const KerrParams p = KerrParams::make(1.0, 0.05);
  CHECK(p.omega_H() == doctest::Approx(0.05 / (2.0 * p.r_plus())).epsilon(1e-15));
  CHECK(KerrParams::make(2.0, 0.0).omega_H() == 0.0);
  CHECK_THROWS_AS(KerrParams::make(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(KerrParams::make(1.0, 1.2), DomainError);
  CHECK_THROWS_AS(KerrParams::make(-1.0, 0.0), DomainError);
}

TEST_CASE("exterior guards") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  CHECK_THROWS_AS(check_exterior(p, BLPoint{0, p.r_plus(), 1.0, 0}), DomainError);
  CHECK_THROWS_AS(check_exterior(p, BLPoint{0, 1.5, 1.0, 0}), DomainError);
  CHECK_THROWS_AS(check_exterior(p, BLPoint{0, 5.0, 0.0, 0}), DomainError);
  CHECK_THROWS_AS(check_exterior(p, BLPoint{0, 5.0, M_PI, 0}), DomainError);
  CHECK(in_exterior(p, BLPoint{0, 5.0, 1.0, 0}));
  CHECK_FALSE(in_exterior(p, BLPoint{0, 1.0, 1.0, 0}));
}

TEST_CASE("lower metric matches textbook components") {
  for (double a : {0.0, 0.05, 0.3, 0.9}) {
    const KerrParams p = KerrParams::make(1.0, a);
    for (double r : {p.r_plus() + 1e-3, 2.5, 3.0, 7.0, 100.0})
      for (double th : {0.2, 1.0, M_PI / 2, 2.9}) {
        const Mat4 g = metric_lower(p, BLPoint{0, r, th, 0});
        const Mat4 ref = textbook_lower(1.0, a, r, th);
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j) CHECK(std::abs(g[i][j] - ref[i][j]) <= 1e-13 * (1.0 + std::abs(ref[i][j])));
      }
  }
}

TEST_CASE("inverse metric and decomposition on random exterior points") {
  for (double a : {0.0, 0.05, 0.3}) {
    const KerrParams p = KerrParams::make(1.0, a);
    double worst_inv = 0.0, worst_dec = 0.0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
      const NullState s = random_null_state(p, 99, i);
      const Mat4 g = metric_lower(p, s.x), gi = metric_upper(p, s.x), G = conformal_inverse(p, s.x);
      double gm = 0.0;
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) gm = std::max(gm, std::abs(G[x][y]));
      const double Sg = metric_functions(p, s.x.r, s.x.theta).Sigma;
      for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
          double m = 0;
          for (int c = 0; c < 4; ++c) m += g[x][c] * gi[c][y];
          worst_inv = std::max(worst_inv, std::abs(m - (x == y)));
          worst_dec = std::max(worst_dec, std::abs(Sg * gi[x][y] - G[x][y]) / gm);
        }
    }
    CHECK(worst_inv < 1e-12);
    CHECK(worst_dec < 1e-12);
  }
}

TEST_CASE("curly R and Carter Q tensors") {
  const KerrParams p = KerrParams::make(1.0, 0.5);
  const BLPoint x{0, 2.0, 1.1, 0};
  const Mat4 R = curly_R_tensor(p, x);
  CHECK(R[kT][kT] == doctest::Approx(-18.0625 + 0.25 * 0.25 * std::pow(std::sin(1.1), 2)));
  CHECK(R[kT][kPh] == doctest::Approx(-2.0));
  CHECK(R[kPh][kT] == R[kT][kPh]);
  const Mat4 Q = carter_Q_tensor(p, x);
  CHECK(Q[kTh][kTh] == 1.0);
  CHECK(Q[kPh][kPh] == doctest::Approx(std::pow(std::cos(1.1) / std::sin(1.1), 2)));
  CHECK(Q[kR][kR] == 0.0);
}

TEST_CASE("conformal inverse r-derivative matches finite differences") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  for (double r : {2.5, 3.0, 6.0, 40.0}) {
    const BLPoint x{0, r, 0.8, 0};
    const Mat4 d = conformal_inverse_dr(p, x);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double fd = oracle::central_diff(
            [&](double rr) { return conformal_inverse(p, BLPoint{0, rr, 0.8, 0})[i][j]; }, r, 1e-4);
        CHECK(std::abs(d[i][j] - fd) <= 1e-7 * (1.0 + std::abs(fd)));
      }
  }
}

TEST_CASE("lower metric derivatives match finite differences") {
  const KerrParams p = KerrParams::make(1.0, 0.3);
  const double r = 4.0, th = 1.2;
  const MetricDerivatives d = metric_lower_derivatives(p, r, th);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double fr =
          oracle::central_diff([&](double x) { return metric_lower(p, BLPoint{0, x, th, 0})[i][j]; }, r, 1e-4);
      const double ft =
          oracle::central_diff([&](double x) { return metric_lower(p, BLPoint{0, r, x, 0})[i][j]; }, th, 1e-4);
      CHECK(std::abs(d.dr[i][j] - fr) <= 1e-8 * (1.0 + std::abs(fr)));
      CHECK(std::abs(d.dtheta[i][j] - ft) <= 1e-8 * (1.0 + std::abs(ft)));
    }
}

TEST_CASE("Schwarzschild Christoffel symbols in closed form") {
  const double M = 1.0, r = 7.0, th = 0.9;
  const KerrParams p = KerrParams::make(M, 0.0);
  const Christoffels G = christoffels(p, BLPoint{0, r, th, 0});
  const double s = std::sin(th), c = std::cos(th);
  CHECK(G[kR][kT][kT] == doctest::Approx(M * (r - 2 * M) / (r * r * r)).epsilon(1e-13));
  CHECK(G[kT][kT][kR] == doctest::Approx(M / (r * (r - 2 * M))).epsilon(1e-13));
  CHECK(G[kR][kR][kR] == doctest::Approx(-M / (r * (r - 2 * M))).epsilon(1e-13));
  CHECK(G[kR][kTh][kTh] == doctest::Approx(-(r - 2 * M)).epsilon(1e-13));
  CHECK(G[kTh][kR][kTh] == doctest::Approx(1.0 / r).epsilon(1e-13));
  CHECK(G[kPh][kTh][kPh] == doctest::Approx(c / s).epsilon(1e-13));
  CHECK(G[kTh][kPh][kPh] == doctest::Approx(-s * c).epsilon(1e-13));
  CHECK(G[kR][kPh][kPh] == doctest::Approx(-(r - 2 * M) * s * s).epsilon(1e-13));
}

TEST_CASE("fast geodesic acceleration equals -Gamma v v") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  for (std::uint64_t i = 0; i < 200; ++i) {
    const NullState s = random_null_state(p, 5, i);
    const Christoffels G = christoffels(p, s.x);
    const Vec4 acc = geodesic_acceleration(p, s.x.r, s.x.theta, s.v_con);
    for (int c = 0; c < 4; ++c) {
      double ref = 0.0, mag = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          ref -= G[c][a][b] * s.v_con[a] * s.v_con[b];
          mag += std::abs(G[c][a][b] * s.v_con[a] * s.v_con[b]);
        }
      CHECK(std::abs(acc[c] - ref) <= 1e-12 * (mag + 1e-300));
    }
    for (int c = 0; c < 4; ++c)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(G[c][a][b] == G[c][b][a]);
  }
}

TEST_CASE("frame dragging rate") {
  const KerrParams p = KerrParams::make(1.0, 0.05);
  const BLPoint x{0, 5.0, 1.0, 0};
  const Mat4 g = metric_lower(p, x);
  CHECK(omega_perp(p, x) == doctest::Approx(-g[kT][kPh] / g[kPh][kPh]).epsilon(1e-13));
  CHECK(omega_perp(KerrParams::make(1.0, 0.0), x) == 0.0);
}
