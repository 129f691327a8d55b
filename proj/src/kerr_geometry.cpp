#include "kvlasov/kerr_geometry.hpp"

#include <cmath>
#include <sstream>

namespace kvlasov {

KerrParams KerrParams::make(double M, double a) {
  if (!(M > 0.0) || !std::isfinite(M)) throw DomainError("KerrParams: M must be positive and finite");
  if (!std::isfinite(a) || std::abs(a) > M) {
    std::ostringstream os;
    os << "KerrParams: |a| = " << std::abs(a) << " exceeds M = " << M << " (no horizon)";
    throw DomainError(os.str());
  }
  return KerrParams{M, a};
}

double KerrParams::r_plus() const { return horizon_radius(*this); }

double KerrParams::omega_H() const {
  const double rp = r_plus();
  return a / (rp * rp + a * a);
}

double horizon_radius(const KerrParams& p) {
  if (!(p.M > 0.0) || std::abs(p.a) > p.M) throw DomainError("horizon_radius: requires M > 0 and |a| <= M");
  // max() guards the extremal case against a tiny negative radicand.
  return p.M + std::sqrt(std::max(0.0, (p.M - p.a) * (p.M + p.a)));
}

bool in_exterior(const KerrParams& p, const BLPoint& x, const Guards& g) {
  if (!std::isfinite(x.r) || !std::isfinite(x.theta)) return false;
  if (x.r <= p.r_plus() + g.horizon * p.M) return false;
  return x.theta > g.axis && x.theta < M_PI - g.axis;
}

void check_exterior(const KerrParams& p, const BLPoint& x, const Guards& g) {
  if (in_exterior(p, x, g)) return;
  std::ostringstream os;
  os.precision(17);
  os << "point (r=" << x.r << ", theta=" << x.theta << ") outside the exterior chart (r_plus=" << p.r_plus()
     << ")";
  throw DomainError(os.str());
}

MetricFunctions metric_functions(const KerrParams& p, double r, double theta) {
  MetricFunctions f;
  f.sin_theta = std::sin(theta);
  f.cos_theta = std::cos(theta);
  const double a2 = p.a * p.a;
  const double s = r * r + a2;
  f.Delta = delta_of(p, r);
  f.Sigma = r * r + a2 * f.cos_theta * f.cos_theta;
  f.Pi = s * s - a2 * f.Delta * f.sin_theta * f.sin_theta;
  f.Omega = 1.0 / std::sqrt(f.Sigma);
  return f;
}

Mat4 metric_lower(const KerrParams& p, const BLPoint& x, const Guards& g) {
  check_exterior(p, x, g);
  const MetricFunctions f = metric_functions(p, x.r, x.theta);
  const double s2 = f.sin_theta * f.sin_theta;
  Mat4 m{};
  m[kT][kT] = -(1.0 - 2.0 * p.M * x.r / f.Sigma);
  m[kT][kPh] = m[kPh][kT] = -2.0 * p.M * p.a * x.r * s2 / f.Sigma;
  m[kPh][kPh] = f.Pi * s2 / f.Sigma;
  m[kR][kR] = f.Sigma / f.Delta;
  m[kTh][kTh] = f.Sigma;
  return m;
}

Mat4 carter_Q_tensor(const KerrParams& p, const BLPoint& x) {
  const double sn = std::sin(x.theta), cs = std::cos(x.theta);
  const double cot = cs / sn;
  Mat4 q{};
  q[kTh][kTh] = 1.0;
  q[kPh][kPh] = cot * cot;
  q[kT][kT] = p.a * p.a * sn * sn;
  return q;
}

Mat4 curly_R_tensor(const KerrParams& p, const BLPoint& x) {
  const double a2 = p.a * p.a;
  const double s = x.r * x.r + a2;
  const double D = delta_of(p, x.r);
  const Mat4 Q = carter_Q_tensor(p, x);
  Mat4 R{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) R[a][b] = D * Q[a][b];
  R[kT][kT] += -s * s;
  // -4aMr d_t^(a d_phi^b): the symmetrization splits the weight over both slots.
  R[kT][kPh] += -2.0 * p.a * p.M * x.r;
  R[kPh][kT] += -2.0 * p.a * p.M * x.r;
  R[kPh][kPh] += D - a2;
  return R;
}

Mat4 metric_upper(const KerrParams& p, const BLPoint& x, const Guards& g) {
  check_exterior(p, x, g);
  const MetricFunctions f = metric_functions(p, x.r, x.theta);
  const Mat4 R = curly_R_tensor(p, x);
  Mat4 m{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m[a][b] = R[a][b] / f.Delta / f.Sigma;
  m[kR][kR] += f.Delta / f.Sigma;
  return m;
}

Mat4 conformal_inverse(const KerrParams& p, const BLPoint& x) {
  const double a2 = p.a * p.a;
  const double sn = std::sin(x.theta);
  const double s2 = sn * sn;
  const double s = x.r * x.r + a2;
  const double D = delta_of(p, x.r);
  Mat4 G{};
  G[kT][kT] = -s * s / D + a2 * s2;
  G[kT][kPh] = G[kPh][kT] = -2.0 * p.a * p.M * x.r / D;
  G[kPh][kPh] = 1.0 / s2 - a2 / D;
  G[kR][kR] = D;
  G[kTh][kTh] = 1.0;
  return G;
}

Mat4 conformal_inverse_dr(const KerrParams& p, const BLPoint& x) {
  const double a2 = p.a * p.a;
  const double r = x.r;
  const double s = r * r + a2;
  const double D = delta_of(p, r);
  const double Dp = 2.0 * r - 2.0 * p.M;
  const double D2 = D * D;
  Mat4 dG{};
  dG[kT][kT] = -(4.0 * r * s * D - s * s * Dp) / D2;
  dG[kT][kPh] = dG[kPh][kT] = -2.0 * p.a * p.M * (D - r * Dp) / D2;
  dG[kPh][kPh] = a2 * Dp / D2;
  dG[kR][kR] = Dp;
  return dG;
}

MetricDerivatives metric_lower_derivatives(const KerrParams& p, double r, double theta) {
  const double M = p.M, a = p.a, a2 = a * a;
  const double sn = std::sin(theta), cs = std::cos(theta);
  const double s2 = sn * sn, sc = sn * cs;
  const double s = r * r + a2;
  const double D = delta_of(p, r), Dp = 2.0 * r - 2.0 * M;
  const double Sg = r * r + a2 * cs * cs;
  const double Sg2 = Sg * Sg;
  const double dSg_r = 2.0 * r, dSg_th = -2.0 * a2 * sc;
  const double Pi = s * s - a2 * D * s2;
  const double dPi_r = 4.0 * r * s - a2 * Dp * s2;
  const double dPi_th = -2.0 * a2 * D * sc;

  MetricDerivatives d;
  d.dr[kT][kT] = 2.0 * M * (Sg - 2.0 * r * r) / Sg2;
  d.dtheta[kT][kT] = -2.0 * M * r * dSg_th / Sg2;

  d.dr[kT][kPh] = d.dr[kPh][kT] = -2.0 * M * a * s2 * (Sg - 2.0 * r * r) / Sg2;
  d.dtheta[kT][kPh] = d.dtheta[kPh][kT] = -2.0 * M * a * r * (2.0 * sc * Sg - s2 * dSg_th) / Sg2;

  d.dr[kPh][kPh] = s2 * (dPi_r * Sg - Pi * dSg_r) / Sg2;
  d.dtheta[kPh][kPh] = (dPi_th * s2 * Sg + 2.0 * Pi * sc * Sg - Pi * s2 * dSg_th) / Sg2;

  d.dr[kR][kR] = (dSg_r * D - Sg * Dp) / (D * D);
  d.dtheta[kR][kR] = dSg_th / D;

  d.dr[kTh][kTh] = dSg_r;
  d.dtheta[kTh][kTh] = dSg_th;
  return d;
}

Christoffels christoffels(const KerrParams& p, const BLPoint& x, const Guards& g) {
  const Mat4 gi = metric_upper(p, x, g);
  const MetricDerivatives d = metric_lower_derivatives(p, x.r, x.theta);
  // dg[e][a][b] = d_e g_ab; only e = r, theta are nonzero.
  std::array<Mat4, 4> dg{};
  dg[kR] = d.dr;
  dg[kTh] = d.dtheta;
  Christoffels G{};
  for (int c = 0; c < 4; ++c)
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b) {
        double sum = 0.0;
        for (int e = 0; e < 4; ++e) {
          if (gi[c][e] == 0.0) continue;
          sum += gi[c][e] * (dg[a][e][b] + dg[b][e][a] - dg[e][a][b]);
        }
        G[c][a][b] = G[c][b][a] = 0.5 * sum;
      }
  return G;
}

Vec4 geodesic_acceleration(const KerrParams& p, double r, double theta, const Vec4& v) {
  const MetricDerivatives d = metric_lower_derivatives(p, r, theta);
  // C_e = Gamma_{e ab} v^a v^b = v^a d_a g_eb v^b - (1/2) d_e g(v,v).
  Vec4 dgr_v{}, dgth_v{};
  for (int e = 0; e < 4; ++e)
    for (int b = 0; b < 4; ++b) {
      dgr_v[e] += d.dr[e][b] * v[b];
      dgth_v[e] += d.dtheta[e][b] * v[b];
    }
  Vec4 C{};
  for (int e = 0; e < 4; ++e) C[e] = v[kR] * dgr_v[e] + v[kTh] * dgth_v[e];
  C[kR] -= 0.5 * dot(dgr_v, v);
  C[kTh] -= 0.5 * dot(dgth_v, v);

  // Raise with the explicit inverse (block structure tphi | r | theta).
  const double a2 = p.a * p.a;
  const double sn = std::sin(theta), cs = std::cos(theta);
  const double s2 = sn * sn;
  const double s = r * r + a2;
  const double D = delta_of(p, r);
  const double Sg = r * r + a2 * cs * cs;
  const double gtt = (-s * s / D + a2 * s2) / Sg;
  const double gtp = -2.0 * p.a * p.M * r / (D * Sg);
  const double gpp = (1.0 / s2 - a2 / D) / Sg;
  Vec4 acc;
  acc[kT] = -(gtt * C[kT] + gtp * C[kPh]);
  acc[kPh] = -(gtp * C[kT] + gpp * C[kPh]);
  acc[kR] = -(D / Sg) * C[kR];
  acc[kTh] = -C[kTh] / Sg;
  return acc;
}

double omega_perp(const KerrParams& p, const BLPoint& x) {
  const MetricFunctions f = metric_functions(p, x.r, x.theta);
  return 2.0 * p.a * p.M * x.r / f.Pi;
}

}  // namespace kvlasov
