#include "kvlasov/vlasov_functionals.hpp"

#include <cmath>

namespace kvlasov {

std::string to_string(FactorMode m) {
  switch (m) {
    case FactorMode::none: return "none";
    case FactorMode::symmetry: return "symmetry";
    case FactorMode::coordinate: return "coordinate";
  }
  return "unknown";
}

std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::d_t: return "d_t";
    case FieldKind::d_phi: return "d_phi";
    case FieldKind::T_perp: return "T_perp";
    case FieldKind::T_chi: return "T_chi";
    case FieldKind::morawetz_A: return "A";
  }
  return "unknown";
}

double strengthening_factor(const KerrParams& p, const NullState& s, FactorMode mode) {
  switch (mode) {
    case FactorMode::none: return 1.0;
    case FactorMode::symmetry: {
      const ConservedSet c = conserved(p, s);
      const double L = p.M * p.M * c.e * c.e + c.lz * c.lz + c.q;
      return L * L;
    }
    case FactorMode::coordinate: {
      const double sn = std::sin(s.x.theta);
      const double vt = s.v_cov[kT], vth = s.v_cov[kTh], vph = s.v_cov[kPh];
      const double b = p.M * p.M * vt * vt + vth * vth + vph * vph / (sn * sn);
      return b * b;
    }
  }
  return 1.0;
}

double field_contraction(const KerrParams& p, const WeightConfig& cfg, const NullState& s, FieldKind X) {
  const Vec4& v = s.v_cov;
  switch (X) {
    case FieldKind::d_t: return v[kT];
    case FieldKind::d_phi: return v[kPh];
    case FieldKind::T_perp: return v[kT] + omega_perp(p, s.x) * v[kPh];
    case FieldKind::T_chi: return v[kT] + chi(p, cfg, s.x.r) * p.omega_H() * v[kPh];
    case FieldKind::morawetz_A: {
      const RadialProfile pr = radial_profile(p, cfg, s.x.r);
      const SymmetryVector S = symmetry_basis(conserved(p, s));
      const double L = sym_dot(curlyL_coefficients(p), S);
      return -pr.z * pr.w * L * sym_dot(pr.Rt1, S) * v[kR];
    }
  }
  return 0.0;
}

double surface_integrand(const KerrParams& p, const WeightConfig& cfg, const NullState& s, FieldKind X) {
  if (!(s.v_con[kT] > 0.0)) throw DomainError("surface_integrand: v^t must be positive");
  const MetricFunctions f = metric_functions(p, s.x.r, s.x.theta);
  const double Tv = field_contraction(p, cfg, s, FieldKind::T_perp);
  return field_contraction(p, cfg, s, X) * Tv * (f.Pi / f.Delta) / (f.Sigma * s.v_con[kT]);
}

double surface_energy(const KerrParams& p, const WeightConfig& cfg, const std::vector<Particle>& ens, FieldKind X,
                      FactorMode factor) {
  double E = 0.0;
  if (!ens.empty()) {
    const double t0 = ens.front().state.x.t;
    for (const auto& q : ens)
      if (q.state.x.t != t0) throw DomainError("surface_energy: particles are not on a common time slice");
  }
  for (const auto& q : ens) {
    const double F = X == FieldKind::morawetz_A ? 1.0 : strengthening_factor(p, q.state, factor);
    E += q.w * F * surface_integrand(p, cfg, q.state, X);
  }
  return E;
}

double model_integrand(const KerrParams& p, const NullState& s) {
  const MetricFunctions f = metric_functions(p, s.x.r, s.x.theta);
  const double sq = s.x.r * s.x.r + p.a * p.a;
  const double vt = s.v_cov[kT], vr = s.v_cov[kR], vth = s.v_cov[kTh], vph = s.v_cov[kPh];
  return sq * sq / f.Delta * vt * vt + f.Delta * vr * vr + vth * vth + vph * vph / (f.sin_theta * f.sin_theta);
}

ModelEnergy model_energy_density(const KerrParams& p, const NullState& s, FactorMode factor) {
  if (!(s.v_con[kT] > 0.0)) throw DomainError("model_energy: v^t must be positive");
  const MetricFunctions f = metric_functions(p, s.x.r, s.x.theta);
  const double I = model_integrand(p, s) * strengthening_factor(p, s, factor);
  ModelEnergy m;
  m.nu = I / (f.Sigma * s.v_con[kT]);
  m.literal = I * s.x.r * s.x.r / (f.Sigma * f.Sigma * s.v_con[kT]);
  return m;
}

ModelEnergy model_energy(const KerrParams& p, const std::vector<Particle>& ens, FactorMode factor) {
  ModelEnergy m;
  for (const auto& q : ens) {
    const ModelEnergy d = model_energy_density(p, q.state, factor);
    m.literal += q.w * d.literal;
    m.nu += q.w * d.nu;
  }
  return m;
}

RadialField radial_field(const KerrParams& p, const WeightConfig& cfg, FieldKind X, double r) {
  RadialField f;
  switch (X) {
    case FieldKind::d_t: f.X = {1, 0, 0, 0}; break;
    case FieldKind::d_phi: f.X = {0, 0, 0, 1}; break;
    case FieldKind::T_chi:
      f.X = {1, 0, 0, chi(p, cfg, r) * p.omega_H()};
      f.dX = {0, 0, 0, chi_dr(p, cfg, r) * p.omega_H()};
      break;
    case FieldKind::T_perp: throw DomainError("radial_field: T_perp depends on theta");
    case FieldKind::morawetz_A: throw DomainError("radial_field: A is symmetry indexed; use morawetz_density_lie");
  }
  return f;
}

Mat4 lie_deformation(const KerrParams& p, const RadialField& X, const BLPoint& x) {
  const Mat4 G = conformal_inverse(p, x);
  const Mat4 dG = conformal_inverse_dr(p, x);
  Mat4 L{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) L[a][b] = X.X[kR] * dG[a][b] - G[kR][b] * X.dX[a] - G[a][kR] * X.dX[b];
  return L;
}

Mat4 lie_deformation(const KerrParams& p, const WeightConfig& cfg, FieldKind X, const BLPoint& x) {
  return lie_deformation(p, radial_field(p, cfg, X, x.r), x);
}

double bulk_density(const KerrParams& p, const WeightConfig& cfg, const NullState& s, FieldKind X) {
  const Mat4 L = lie_deformation(p, cfg, X, s.x);
  return -0.5 * quadratic_form(L, s.v_cov, s.v_cov);
}

double tchi_bulk_closed_form(const KerrParams& p, const WeightConfig& cfg, const NullState& s) {
  const double D = delta_of(p, s.x.r);
  return D * std::abs(chi_dr(p, cfg, s.x.r) * p.omega_H()) * std::abs(s.v_cov[kR]) * std::abs(s.v_cov[kPh]) *
         std::sin(s.x.theta);
}

double morawetz_density(const KerrParams& p, const WeightConfig& cfg, const NullState& s) {
  const RadialProfile pr = radial_profile(p, cfg, s.x.r);
  const SymmetryVector S = symmetry_basis(conserved(p, s));
  const double L = sym_dot(curlyL_coefficients(p), S);
  const double vr = s.v_cov[kR];
  // z^{1/2} Delta^{3/2} = Delta^2 sqrt(g)
  return L * (-pr.Delta * pr.Delta * pr.sqrt_g * sym_dot(pr.Rt2, S) * vr * vr + 0.5 * pr.w * std::pow(sym_dot(pr.Rt1, S), 2));
}

MorawetzRoute morawetz_density_lie(const KerrParams& p, const WeightConfig& cfg, const NullState& s) {
  const RadialProfile pr = radial_profile(p, cfg, s.x.r);
  const SymmetryVector S = symmetry_basis(conserved(p, s));
  const SymmetryVector Lc = curlyL_coefficients(p);
  const Mat4 G = conformal_inverse(p, s.x);
  const double Gvv = quadratic_form(G, s.v_cov, s.v_cov);
  const double zw = pr.z * pr.w, dzw = pr.dz * pr.w + pr.z * pr.dw;
  MorawetzRoute out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double sym = 0.5 * (Lc[a] * pr.Rt1[b] + Lc[b] * pr.Rt1[a]);
      const double dsym = 0.5 * (Lc[a] * pr.dRt1[b] + Lc[b] * pr.dRt1[a]);
      if (sym == 0.0 && dsym == 0.0) continue;
      RadialField X;
      X.X = {0.0, -zw * sym, 0.0, 0.0};
      X.dX = {0.0, -dzw * sym - zw * dsym, 0.0, 0.0};
      const Mat4 Lie = lie_deformation(p, X, s.x);
      const double ss = S[a] * S[b];
      const double lie = -0.5 * quadratic_form(Lie, s.v_cov, s.v_cov) * ss;
      const double tr = 0.5 * pr.dz * pr.w * sym * Gvv * ss;
      out.lie += lie;
      out.trace += tr;
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) out.magnitude += 0.5 * std::abs(Lie[c][d] * s.v_cov[c] * s.v_cov[d] * ss);
      out.magnitude += std::abs(tr);
    }
  out.total = out.lie + out.trace;
  return out;
}

double slab_rate(const KerrParams& p, const NullState& s, double density) {
  const double Sg = metric_functions(p, s.x.r, s.x.theta).Sigma;
  return density / (Sg * s.v_con[kT]);
}

double simpson_uniform(const double* f, std::size_t n, double h) {
  if (n < 2) return 0.0;
  const std::size_t m = n - 1;
  if (m == 1) return 0.5 * h * (f[0] + f[1]);
  const std::size_t even = (m % 2 == 0) ? m : m - 3;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= even; i += 2) s += f[i] + 4.0 * f[i + 1] + f[i + 2];
  s *= h / 3.0;
  if (even != m) {
    const double* g = f + even;
    s += 3.0 * h / 8.0 * (g[0] + 3.0 * g[1] + 3.0 * g[2] + g[3]);
  }
  return s;
}

}  // namespace kvlasov
