#include "kvlasov/null_phase_space.hpp"

#include <cmath>
#include <sstream>

#include "kvlasov/rng.hpp"

namespace kvlasov {

NullState state_from_covariant(const KerrParams& p, const BLPoint& x, const Vec4& v_cov) {
  NullState s;
  s.x = x;
  s.v_cov = v_cov;
  s.v_con = contract(metric_upper(p, x), v_cov);
  return s;
}

NullState state_from_contravariant(const KerrParams& p, const BLPoint& x, const Vec4& v_con) {
  NullState s;
  s.x = x;
  s.v_con = v_con;
  s.v_cov = contract(metric_lower(p, x), v_con);
  return s;
}

NullState null_normalize(const KerrParams& p, const BLPoint& x, double vr, double vth, double vph,
                         const Guards& g) {
  if (vr == 0.0 && vth == 0.0 && vph == 0.0) throw DomainError("null_normalize: zero spatial momentum");
  const Mat4 m = metric_lower(p, x, g);
  const double A = m[kT][kT];
  const double B = 2.0 * m[kT][kPh] * vph;
  const double C = m[kR][kR] * vr * vr + m[kTh][kTh] * vth * vth + m[kPh][kPh] * vph * vph;
  double vt = 0.0;
  if (A == 0.0) {
    vt = -C / B;
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) throw NumericalError("null_normalize: no real root for v^t");
    const double qq = -0.5 * (B + std::copysign(std::sqrt(disc), B));
    const double r1 = qq / A;
    const double r2 = (qq != 0.0) ? C / qq : r1;
    const bool p1 = r1 > 0.0, p2 = r2 > 0.0;
    if (p1 && p2)
      vt = std::min(r1, r2);
    else if (p1)
      vt = r1;
    else if (p2)
      vt = r2;
    else
      vt = -1.0;
  }
  if (!(vt > 0.0) || !std::isfinite(vt)) throw NumericalError("null_normalize: no future-directed root");
  return state_from_contravariant(p, x, Vec4{vt, vr, vth, vph});
}

NullState null_normalize_covariant(const KerrParams& p, const BLPoint& x, double v_r, double v_th, double v_ph,
                                   const Guards& g) {
  check_exterior(p, x, g);
  if (v_r == 0.0 && v_th == 0.0 && v_ph == 0.0) throw DomainError("null_normalize_covariant: zero spatial covector");
  const Mat4 G = conformal_inverse(p, x);
  const double A = G[kT][kT];
  const double B = G[kT][kPh] * v_ph;
  const double C = G[kR][kR] * v_r * v_r + G[kTh][kTh] * v_th * v_th + G[kPh][kPh] * v_ph * v_ph;
  const double disc = B * B - A * C;
  if (disc < 0.0) throw NumericalError("null_normalize_covariant: no real root");
  // A v_t + B = +sqrt(disc) gives v^t > 0; written to avoid cancellation.
  const double sq = std::sqrt(disc);
  const double vt = B > 0.0 ? C / (-B - sq) : (sq - B) / A;
  return state_from_covariant(p, x, Vec4{vt, v_r, v_th, v_ph});
}

NullState null_state_from_direction(const KerrParams& p, const BLPoint& x, const std::array<double, 3>& n,
                                    const Guards& g) {
  const MetricFunctions f = metric_functions(p, x.r, x.theta);
  const double vr = n[0] * std::sqrt(f.Sigma / f.Delta);
  const double vth = n[1] * std::sqrt(f.Sigma);
  const double vph = n[2] * std::sqrt(f.Pi / f.Sigma) * f.sin_theta;
  return null_normalize_covariant(p, x, vr, vth, vph, g);
}

NullState random_null_state(const KerrParams& p, std::uint64_t seed, std::uint64_t index, const RandomStateBox& box) {
  const double u0 = counter_uniform(seed, index, 0);
  const double delta = box.delta_min * std::pow(box.delta_max / box.delta_min, u0);
  const double r = p.r_plus() + delta * p.M;
  const double th = box.theta_guard + (M_PI - 2.0 * box.theta_guard) * counter_uniform(seed, index, 1);
  const double ph = 2.0 * M_PI * counter_uniform(seed, index, 2);
  const double cz = 2.0 * counter_uniform(seed, index, 3) - 1.0;
  const double az = 2.0 * M_PI * counter_uniform(seed, index, 4);
  const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
  return null_state_from_direction(p, BLPoint{0.0, r, th, ph}, {cz, sz * std::cos(az), sz * std::sin(az)});
}

double momentum_scale(const KerrParams& p, const NullState& s) {
  const double D = delta_of(p, s.x.r);
  const double sn = std::sin(s.x.theta);
  return std::abs(s.v_cov[kT]) + std::abs(s.v_cov[kTh]) / s.x.r + std::abs(s.v_cov[kPh]) / (s.x.r * sn) +
         std::sqrt(D) * std::abs(s.v_cov[kR]);
}

double null_residual(const KerrParams& p, const NullState& s) {
  const Mat4 G = conformal_inverse(p, s.x);
  const double Sg = metric_functions(p, s.x.r, s.x.theta).Sigma;
  const double sc = momentum_scale(p, s);
  return quadratic_form(G, s.v_cov, s.v_cov) / Sg / (sc * sc);
}

void validate_null_state(const KerrParams& p, const NullState& s, double tol, const Guards& g) {
  check_exterior(p, s.x, g);
  if (!(s.v_con[kT] > 0.0)) throw DomainError("NullState: v^t must be positive (future directed)");
  const double res = null_residual(p, s);
  if (!(std::abs(res) < tol)) {
    std::ostringstream os;
    os << "NullState: null residual " << res << " exceeds " << tol;
    throw DomainError(os.str());
  }
}

double carter_q(const KerrParams& p, const NullState& s) {
  const double sn = std::sin(s.x.theta), cs = std::cos(s.x.theta);
  const double cot = cs / sn;
  const double vt = s.v_cov[kT], vth = s.v_cov[kTh], vph = s.v_cov[kPh];
  return vth * vth + cot * cot * vph * vph + p.a * p.a * sn * sn * vt * vt;
}

ConservedSet conserved(const KerrParams& p, const NullState& s) {
  ConservedSet c;
  c.e = s.v_cov[kT];
  c.lz = s.v_cov[kPh];
  c.q = carter_q(p, s);
  const Mat4 G = conformal_inverse(p, s.x);
  c.L = 0.5 * quadratic_form(G, s.v_cov, s.v_cov) / metric_functions(p, s.x.r, s.x.theta).Sigma;
  return c;
}

double cone_measure_weight(const KerrParams& p, const NullState& s) {
  const double vt = s.v_cov[kT];
  if (std::abs(vt) < 1e-14 * momentum_scale(p, s)) throw DomainError("cone_measure_weight: v_t vanishes");
  const MetricFunctions f = metric_functions(p, s.x.r, s.x.theta);
  return f.Sigma * f.sin_theta / std::abs(vt);
}

double klimontovich_weight(const KerrParams& p, const NullState& s, double f0_value, double cell_volume) {
  if (f0_value < 0.0 || !std::isfinite(f0_value)) throw DomainError("klimontovich_weight: f0 must be >= 0");
  if (!(cell_volume > 0.0)) throw DomainError("klimontovich_weight: cell volume must be positive");
  const double vt = s.v_cov[kT];
  if (std::abs(vt) < 1e-14 * momentum_scale(p, s)) throw DomainError("klimontovich_weight: v_t vanishes");
  const MetricFunctions f = metric_functions(p, s.x.r, s.x.theta);
  // Outside the ergoregion a future null covector has v_t < 0.
  const double gtt = -(1.0 - 2.0 * p.M * s.x.r / f.Sigma);
  if (gtt < 0.0 && vt > 0.0) throw DomainError("klimontovich_weight: v_t > 0 outside the ergoregion");
  if (f0_value == 0.0) return 0.0;
  return f0_value * f.Sigma * f.Sigma * f.sin_theta * f.sin_theta * (s.v_con[kT] / std::abs(vt)) * cell_volume;
}

double smooth_bump(double x, double lo, double hi) {
  const double u = (2.0 * x - (lo + hi)) / (hi - lo);
  if (!(std::abs(u) < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double InitialDatum::value(double r, double theta, double vr, double vth, double vph) const {
  const auto lo = lower();
  const auto hi = upper();
  if (vr < lo[3] || vr > hi[3] || vth < lo[4] || vth > hi[4] || vph < lo[5] || vph > hi[5]) return 0.0;
  const double gr = (vr - mu_r) / sigma_r, gth = (vth - mu_th) / sigma_th, gph = (vph - mu_ph) / sigma_ph;
  return amplitude * smooth_bump(r, r_min, r_max) * smooth_bump(theta, theta_min, theta_max) *
         std::exp(-(gr * gr + gth * gth + gph * gph));
}

std::array<double, 6> InitialDatum::lower() const {
  return {r_min, theta_min, 0.0, mu_r - truncation * sigma_r, mu_th - truncation * sigma_th,
          mu_ph - truncation * sigma_ph};
}

std::array<double, 6> InitialDatum::upper() const {
  return {r_max, theta_max, 2.0 * M_PI, mu_r + truncation * sigma_r, mu_th + truncation * sigma_th,
          mu_ph + truncation * sigma_ph};
}

double InitialDatum::box_volume() const {
  const auto lo = lower(), hi = upper();
  double v = 1.0;
  for (int i = 0; i < 6; ++i) v *= hi[i] - lo[i];
  return v;
}

double Ensemble::total_weight() const {
  double s = 0.0;
  for (const auto& q : particles) s += q.w;
  return s;
}

std::string to_string(Proposal p) { return p == Proposal::uniform ? "uniform" : "gaussian"; }
std::string to_string(Layout l) { return l == Layout::pseudo_random ? "pseudo_random" : "grid_midpoint"; }

namespace {

// Normal(mu, sigma/sqrt 2) truncated to mu +- k sigma, drawn by rejection from
// counter-indexed Box-Muller pairs.
double truncated_gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t base, double mu, double sigma,
                          double k) {
  for (std::uint64_t attempt = 0; attempt < 4096; ++attempt) {
    const double u1 = counter_uniform(seed, stream, base + 2 * attempt);
    const double u2 = counter_uniform(seed, stream, base + 2 * attempt + 1);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    const double x = z / std::sqrt(2.0);
    if (std::abs(x) <= k) return mu + sigma * x;
  }
  throw NumericalError("truncated_gaussian: rejection sampler exhausted");
}

// Normalizer of exp(-((x-mu)/sigma)^2) over mu +- k sigma.
double gaussian_mass(double sigma, double k) { return sigma * std::sqrt(M_PI) * std::erf(k); }

}  // namespace

Ensemble sample_ensemble(const KerrParams& p, const InitialDatum& f0, std::size_t N, std::uint64_t seed,
                         const SamplingOptions& opt) {
  const auto lo = f0.lower(), hi = f0.upper();
  for (int i = 0; i < 6; ++i)
    if (!(hi[i] > lo[i])) throw ConfigError("sample_ensemble: empty support box");
  if (f0.r_min <= p.r_plus() + opt.guards.horizon * p.M)
    throw ConfigError("sample_ensemble: support intersects the horizon guard");
  if (f0.theta_min <= opt.guards.axis || f0.theta_max >= M_PI - opt.guards.axis)
    throw ConfigError("sample_ensemble: support intersects the axis guard");

  std::size_t count = N;
  if (opt.layout == Layout::grid_midpoint) {
    count = 1;
    for (int n : opt.grid) {
      if (n < 1) throw ConfigError("sample_ensemble: grid counts must be >= 1");
      count *= static_cast<std::size_t>(n);
    }
  }
  if (count < 1) throw ConfigError("sample_ensemble: N must be >= 1");

  Ensemble ens;
  ens.params = p;
  ens.seed = seed;
  ens.f0 = f0;
  ens.provenance.proposal = to_string(opt.proposal);
  ens.provenance.layout = to_string(opt.layout);
  ens.provenance.requested = count;
  ens.provenance.box_volume = f0.box_volume();
  ens.particles.reserve(count);

  const double spatial_volume = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  const double sig[3] = {f0.sigma_r, f0.sigma_th, f0.sigma_ph};
  const double mu[3] = {f0.mu_r, f0.mu_th, f0.mu_ph};

  for (std::size_t i = 0; i < count; ++i) {
    std::array<double, 6> z{};
    double cell = f0.box_volume() / static_cast<double>(count);
    if (opt.layout == Layout::grid_midpoint) {
      std::size_t rem = i;
      for (int d = 5; d >= 0; --d) {
        const std::size_t n = static_cast<std::size_t>(opt.grid[d]);
        const std::size_t k = rem % n;
        rem /= n;
        z[d] = lo[d] + (hi[d] - lo[d]) * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
      }
    } else if (opt.proposal == Proposal::uniform) {
      for (int d = 0; d < 6; ++d) z[d] = lo[d] + (hi[d] - lo[d]) * counter_uniform(seed, i, d);
    } else {
      for (int d = 0; d < 3; ++d) z[d] = lo[d] + (hi[d] - lo[d]) * counter_uniform(seed, i, d);
      double q = 1.0 / spatial_volume;
      for (int d = 0; d < 3; ++d) {
        z[3 + d] = truncated_gaussian(seed, i, 1024 * (d + 1), mu[d], sig[d], f0.truncation);
        const double g = (z[3 + d] - mu[d]) / sig[d];
        q *= std::exp(-g * g) / gaussian_mass(sig[d], f0.truncation);
      }
      cell = 1.0 / (static_cast<double>(count) * q);
    }
    const BLPoint x{0.0, z[0], z[1], z[2]};
    NullState s;
    try {
      s = null_normalize(p, x, z[3], z[4], z[5], opt.guards);
    } catch (const Error&) {
      ++ens.provenance.rejected;
      continue;
    }
    if (s.v_cov[kT] > 0.0) ++ens.provenance.positive_vt;
    const double fv = f0.value(z[0], z[1], z[3], z[4], z[5]);
    double w = 0.0;
    try {
      w = klimontovich_weight(p, s, fv, cell);
    } catch (const DomainError&) {
      ++ens.provenance.rejected;
      continue;
    }
    ens.particles.push_back(Particle{s, w});
  }
  return ens;
}

}  // namespace kvlasov
