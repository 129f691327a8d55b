#include "kvlasov/symmetry_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kvlasov/kernels.hpp"

namespace kvlasov {

SymmetryVector symmetry_basis(const ConservedSet& c) { return symmetry_basis(c.e, c.lz, c.q); }

double contract(const SymmetryVector& c, const ConservedSet& s) { return sym_dot(c, symmetry_basis(s)); }

void WeightConfig::validate() const {
  if (!(eps_e2 > 0.0) || !std::isfinite(eps_e2)) throw ConfigError("WeightConfig: eps_e2 must be positive");
  if (!(r_chi > 0.0)) throw ConfigError("WeightConfig: r_chi must be positive");
  if (!(chi_width > 0.0)) throw ConfigError("WeightConfig: chi_width must be positive");
}

SymmetryVector curlyR_coefficients(const KerrParams& p, double r) {
  const double a2 = p.a * p.a;
  const double s = r * r + a2;
  const double D = delta_of(p, r);
  return {-s * s, -4.0 * p.a * p.M * r, D - a2, D};
}

SymmetryVector curlyL_coefficients(const KerrParams& p) { return {p.M * p.M, 0.0, 1.0, 1.0}; }

SymmetryVector curlyL_eps_coefficients(const KerrParams& p, double eps) { return {p.M * p.M * eps, 0.0, 1.0, 1.0}; }

Weights weights(const KerrParams& p, const WeightConfig& cfg, double r) {
  const double a2 = p.a * p.a;
  const double s = r * r + a2;
  const double s2 = s * s;
  const double D = delta_of(p, r);
  Weights w;
  w.z1 = D / s2;
  w.z2 = 1.0 - p.M * p.M * cfg.eps_e2 * D / s2;
  w.w1 = s2 * s2 / (3.0 * r * r - a2);
  w.w2 = 1.0 / (2.0 * r);
  w.z = w.z1 * w.z2;
  w.w = w.w1 * w.w2;
  const RadialProfile pr = radial_profile(p, cfg, r);
  w.dz_dr = pr.dz;
  return w;
}

RadialProfile radial_profile(const KerrParams& p, const WeightConfig& cfg, double r_in) {
  // -R~~'' is O(r^-2) while its two terms are O(r^-1); extended precision
  // keeps the cancellation below 1e-15 out to 10^3 M.
  using F = long double;
  const F M = p.M, a = p.a, a2 = a * a, r = r_in;
  const F kappa = M * M * static_cast<F>(cfg.eps_e2);
  RadialProfile o;
  o.r = r_in;
  const F s = r * r + a2;
  const F D = r * r - 2 * M * r + a2;
  const F Dp = 2 * r - 2 * M;
  o.s = static_cast<double>(s);
  o.Delta = static_cast<double>(D);
  o.dDelta = static_cast<double>(Dp);
  const F is = 1 / s;
  const F is2 = is * is, is3 = is2 * is, is4 = is2 * is2, is5 = is4 * is, is6 = is3 * is3;
  // g = z/Delta = s^-2 - kappa Delta s^-4
  const F g = is2 - kappa * D * is4;
  const F dg = -4 * r * is3 - kappa * (Dp * is4 - 8 * r * D * is5);
  const F d2g = -4 * is3 + 24 * r * r * is4 - kappa * (2 * is4 - 16 * r * Dp * is5 - 8 * D * is5 + 80 * r * r * D * is6);
  const F z = D * g, dz = Dp * g + D * dg;
  const F Dw = 6 * r * r * r - 2 * a2 * r;  // 2r(3r^2 - a^2)
  const F dDw = 18 * r * r - 2 * a2;
  const F s3 = s * s * s, s4 = s3 * s;
  const F w = s4 / Dw;
  const F dw = 8 * r * s3 / Dw - s4 * dDw / (Dw * Dw);

  // z R^a / Delta = P_a g with P = (-s^2, -4aMr, r^2 - 2Mr, Delta).
  const F P[4] = {-s * s, -4 * a * M * r, r * r - 2 * M * r, D};
  const F P1[4] = {-4 * r * s, -4 * a * M, 2 * r - 2 * M, Dp};
  const F P2[4] = {-4 * s - 8 * r * r, 0, 2, 2};
  const F sqrt_g = std::sqrt(g);
  // k = w z^{1/2} Delta^{-1/2} = w sqrt(g)
  const F k = w * sqrt_g;
  const F dk = dw * sqrt_g + w * dg / (2 * sqrt_g);
  for (int i = 0; i < 4; ++i) {
    const F Rt1 = P1[i] * g + P[i] * dg;
    const F dRt1 = P2[i] * g + 2 * P1[i] * dg + P[i] * d2g;
    o.Rt1[i] = static_cast<double>(Rt1);
    o.dRt1[i] = static_cast<double>(dRt1);
    o.Rt2[i] = static_cast<double>(dk * Rt1 + k * dRt1);
  }
  o.g = static_cast<double>(g);
  o.dg = static_cast<double>(dg);
  o.d2g = static_cast<double>(d2g);
  o.z = static_cast<double>(z);
  o.dz = static_cast<double>(dz);
  o.w = static_cast<double>(w);
  o.dw = static_cast<double>(dw);
  o.sqrt_g = static_cast<double>(sqrt_g);
  return o;
}

SymmetryVector R_tilde_prime(const KerrParams& p, const WeightConfig& cfg, double r) {
  return radial_profile(p, cfg, r).Rt1;
}

SymmetryVector R_tilde_tilde_doubleprime(const KerrParams& p, const WeightConfig& cfg, double r) {
  return radial_profile(p, cfg, r).Rt2;
}

namespace {
double blend_u(const KerrParams& p, const WeightConfig& cfg, double r) {
  return std::clamp((r - cfg.r_chi * p.M) / (cfg.chi_width * p.M), 0.0, 1.0);
}
}  // namespace

double chi(const KerrParams& p, const WeightConfig& cfg, double r) {
  const double u = blend_u(p, cfg, r);
  return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

double chi_dr(const KerrParams& p, const WeightConfig& cfg, double r) {
  const double u = blend_u(p, cfg, r);
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return -30.0 * u * u * (u - 1.0) * (u - 1.0) / (cfg.chi_width * p.M);
}

BlendedVectors blended_vector(const KerrParams& p, const WeightConfig& cfg, const BLPoint& x) {
  BlendedVectors b;
  b.chi = chi(p, cfg, x.r);
  b.dchi = chi_dr(p, cfg, x.r);
  b.T_chi = {1.0, 0.0, 0.0, b.chi * p.omega_H()};
  b.T_perp = {1.0, 0.0, 0.0, omega_perp(p, x)};
  return b;
}

MorawetzField morawetz_field(const KerrParams& p, const WeightConfig& cfg, const BLPoint& x) {
  const RadialProfile pr = radial_profile(p, cfg, x.r);
  const SymmetryVector L = curlyL_coefficients(p);
  MorawetzField f;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const double sym = 0.5 * (L[i] * pr.Rt1[j] + L[j] * pr.Rt1[i]);
      f.A_r[i][j] = -pr.z * pr.w * sym;
      f.q[i][j] = 0.5 * pr.dz * pr.w * sym;
    }
  return f;
}

double morawetz_field_bound_ratio(const KerrParams& p, const WeightConfig& cfg, double r) {
  const MorawetzField f = morawetz_field(p, cfg, BLPoint{0.0, r, M_PI / 2, 0.0});
  double s = 0.0;
  for (const auto& row : f.A_r)
    for (double v : row) s += std::abs(v);
  return s / (delta_of(p, r) / (r * r));
}

std::string to_string(PositivityReference r) { return r == PositivityReference::curly_L ? "curly_L" : "curly_L_eps"; }

std::vector<SymmetryVector> cone_sigma_samples(const KerrParams& p, std::size_t n, std::uint64_t seed) {
  std::vector<SymmetryVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NullState s = random_null_state(p, seed, i);
    out.push_back(symmetry_basis(conserved(p, s)));
  }
  return out;
}

std::vector<double> scan_radii(const KerrParams& p, std::size_t n, double r_max, double delta_min) {
  std::vector<double> r(n);
  const double rp = p.r_plus();
  const double lo = std::log(delta_min * p.M), hi = std::log(r_max * p.M - rp);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    r[i] = rp + std::exp(lo + (hi - lo) * t);
  }
  return r;
}

PositivityScan positivity_scan(const KerrParams& p, const WeightConfig& cfg, const std::vector<SymmetryVector>& sigma,
                               const std::vector<double>& radii, double C, PositivityReference ref) {
  const SymmetryVector Lref = ref == PositivityReference::curly_L ? curlyL_coefficients(p)
                                                                   : curlyL_eps_coefficients(p, cfg.eps_e2);
  const std::size_t ns = sigma.size(), nr = radii.size();
  std::vector<double> s0(ns), s1(ns), s2(ns), s3(ns), rv(ns);
  for (std::size_t j = 0; j < ns; ++j) {
    s0[j] = sigma[j][0];
    s1[j] = sigma[j][1];
    s2[j] = sigma[j][2];
    s3[j] = sigma[j][3];
    rv[j] = sym_dot(Lref, sigma[j]);
  }
  std::vector<double> nrt2(4 * nr), scale(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    const RadialProfile pr = radial_profile(p, cfg, radii[i]);
    for (int k = 0; k < 4; ++k) nrt2[4 * i + k] = -pr.Rt2[k];
    scale[i] = p.M / pr.s;
  }
  std::vector<double> mn(nr);
  std::vector<std::size_t> am(nr), viol(nr);
  kernels::RatioScanIn in{nrt2.data(), scale.data(), nr, s0.data(), s1.data(), s2.data(), s3.data(), rv.data(), ns, C};
  kernels::ratio_scan(in, kernels::RatioScanOut{mn.data(), am.data(), viol.data()});
  PositivityScan out;
  out.evaluations = ns * nr;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nr; ++i) {
    out.violations += viol[i];
    if (mn[i] < out.min_ratio) {
      out.min_ratio = mn[i];
      out.worst_r = radii[i];
      out.worst_sigma = sigma[am[i]];
    }
  }
  return out;
}

std::vector<EpsCeilingRow> eps_ceiling_scan(double M, const std::vector<double>& a_grid,
                                            const std::vector<double>& eps_grid, const EpsCeilingOptions& opt) {
  if (a_grid.empty() || eps_grid.empty()) throw ConfigError("eps_ceiling_scan: empty grid");
  std::vector<double> eps = eps_grid;
  std::sort(eps.begin(), eps.end());
  std::vector<EpsCeilingRow> rows;
  for (double a : a_grid) {
    const KerrParams p = KerrParams::make(M, a);
    const auto sigma = cone_sigma_samples(p, opt.sigma_samples, opt.seed);
    const auto radii = scan_radii(p, opt.radii);
    EpsCeilingRow row;
    row.a = a;
    row.eps = eps;
    bool prefix = true;
    for (double e : eps) {
      WeightConfig cfg;
      cfg.eps_e2 = e;
      const PositivityScan ps = positivity_scan(p, cfg, sigma, radii, opt.C, opt.ref);
      const bool ok = ps.violations == 0;
      row.admissible.push_back(ok);
      row.min_ratio.push_back(ps.min_ratio);
      if (ok && prefix) {
        row.eps_bar = e;
        row.empty = false;
      }
      if (!ok) prefix = false;
      if (ok && !prefix) row.monotone = false;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> rtilde_prime_roots(const KerrParams& p, const WeightConfig& cfg, const SymmetryVector& sigma,
                                       double r_lo, double r_hi, std::size_t n_grid) {
  auto f = [&](double r) { return sym_dot(R_tilde_prime(p, cfg, r), sigma); };
  std::vector<double> roots;
  const double ll = std::log(r_lo), lh = std::log(r_hi);
  double x0 = r_lo, f0 = f(x0);
  for (std::size_t i = 1; i <= n_grid; ++i) {
    const double x1 = std::exp(ll + (lh - ll) * static_cast<double>(i) / static_cast<double>(n_grid));
    const double f1 = f(x1);
    if (f0 == 0.0) {
      roots.push_back(x0);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace kvlasov
