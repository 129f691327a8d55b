#include "kvlasov/geodesic_flow.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <unsupported/Eigen/Polynomials>

#include "kvlasov/ode_dop853.hpp"

namespace kvlasov {

PhaseVector to_phase(const NullState& s) {
  return {s.x.t, s.x.r, s.x.theta, s.x.phi, s.v_con[0], s.v_con[1], s.v_con[2], s.v_con[3]};
}

NullState from_phase(const KerrParams& p, const PhaseVector& y) {
  NullState s;
  s.x = BLPoint{y[0], y[1], y[2], y[3]};
  s.v_con = Vec4{y[4], y[5], y[6], y[7]};
  // Lowering by hand avoids the guard checks on states the integrator produced.
  const MetricFunctions f = metric_functions(p, y[1], y[2]);
  const double s2 = f.sin_theta * f.sin_theta;
  const double gtt = -(1.0 - 2.0 * p.M * y[1] / f.Sigma);
  const double gtp = -2.0 * p.M * p.a * y[1] * s2 / f.Sigma;
  const double gpp = f.Pi * s2 / f.Sigma;
  s.v_cov[kT] = gtt * y[4] + gtp * y[7];
  s.v_cov[kR] = f.Sigma / f.Delta * y[5];
  s.v_cov[kTh] = f.Sigma * y[6];
  s.v_cov[kPh] = gtp * y[4] + gpp * y[7];
  return s;
}

bool spray_rhs(const KerrParams& p, const PhaseVector& y, PhaseVector& dy, const SprayOptions& opt,
               double r_floor) {
  const double r = y[1], th = y[2];
  if (!(r > r_floor) || !(th > 0.0) || !(th < M_PI)) return false;
  const Vec4 v{y[4], y[5], y[6], y[7]};
  const Vec4 acc = geodesic_acceleration(p, r, th, v);
  dy[0] = v[0];
  dy[1] = v[1];
  dy[2] = v[2];
  dy[3] = v[3];
  dy[4] = acc[0];
  dy[5] = acc[1];
  dy[6] = acc[2];
  dy[7] = acc[3];
  if (opt.christoffel_fault != 0.0) dy[6] += opt.christoffel_fault * std::sin(th) * std::cos(th) * v[3] * v[3];
  return true;
}

PhaseVector spray(const KerrParams& p, const NullState& s, const SprayOptions& opt, const Guards& g) {
  check_exterior(p, s.x, g);
  PhaseVector dy{};
  spray_rhs(p, to_phase(s), dy, opt, p.r_plus() + g.horizon * p.M);
  return dy;
}

std::string to_string(Terminal t) {
  switch (t) {
    case Terminal::reached_t_end: return "reached_t_end";
    case Terminal::captured: return "captured";
    case Terminal::escaped: return "escaped";
    case Terminal::failed: return "failed";
  }
  return "unknown";
}

namespace {

struct Rhs {
  const KerrParams& p;
  const SprayOptions& opt;
  double r_floor;
  bool operator()(double, const PhaseVector& y, PhaseVector& dy) const { return spray_rhs(p, y, dy, opt, r_floor); }
};

// Affine parameter at which the dense t(lambda) hits target. t is strictly
// increasing along future-directed curves in the exterior.
double locate_time(const Dop853<8>& ode, double target) {
  double lo = ode.x_old(), hi = ode.x();
  const double t_lo = ode.y_old()[0], t_hi = ode.y()[0];
  if (target <= t_lo) return lo;
  if (target >= t_hi) return hi;
  double lam = lo + (hi - lo) * (target - t_lo) / (t_hi - t_lo);
  const double tol = 1e-15 * std::max(1.0, std::abs(target));
  for (int it = 0; it < 60; ++it) {
    const double t = ode.dense_component(0, lam);
    const double g = t - target;
    if (std::abs(g) <= tol) break;
    if (g > 0)
      hi = lam;
    else
      lo = lam;
    const double dt = ode.dense_component(4, lam);
    double next = lam - g / dt;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == lam) break;
    lam = next;
  }
  return lam;
}

void project_onto_cone(const KerrParams& p, PhaseVector& y) {
  const NullState s = null_normalize(p, BLPoint{y[0], y[1], y[2], y[3]}, y[5], y[6], y[7], Guards{0.0, 0.0});
  y[4] = s.v_con[0];
}

}  // namespace

RunResult integrate_sampled(const KerrParams& p, const NullState& s0, double t_end, double dt,
                            const IntegratorOptions& opt, const SampleObserver& obs) {
  if (!(dt > 0.0)) throw ConfigError("integrate_sampled: sample spacing must be positive");
  const double t0 = s0.x.t;
  if (!(t_end >= t0)) throw ConfigError("integrate_sampled: t_end precedes the initial time");
  const double r_floor = p.r_plus() + opt.guards.horizon * p.M;
  const double r_cap = p.r_plus() + opt.capture_margin * p.M;
  const double r_esc = opt.escape_radius * p.M;
  Rhs f{p, opt.spray, r_floor};

  RunResult res;
  PhaseVector y0 = to_phase(s0);
  const std::size_t K = static_cast<std::size_t>(std::floor((t_end - t0) / dt + 1e-9));
  const bool off_grid = t0 + static_cast<double>(K) * dt < t_end - 1e-12 * std::max(1.0, std::abs(t_end));
  const std::size_t total = K + 1 + (off_grid ? 1 : 0);
  std::size_t idx = 0;
  auto time_of = [&](std::size_t k) { return k <= K ? t0 + static_cast<double>(k) * dt : t_end; };

  // 0: continue, 1: observer stop, 2: captured, 3: escaped
  auto emit = [&](double t, const PhaseVector& y) -> int {
    if (y[1] < r_cap) return 2;
    if (y[1] > r_esc && y[5] > 0.0) return 3;
    res.t_last_sample = t;
    return obs(t, y) ? 0 : 1;
  };
  auto finish = [&](int code, const PhaseVector& y, double lam) {
    res.terminal = code == 2 ? Terminal::captured : code == 3 ? Terminal::escaped : Terminal::reached_t_end;
    res.y_end = y;
    res.lambda_end = lam;
    return res;
  };

  {
    const int c = emit(t0, y0);
    ++idx;
    if (c != 0 || idx == total) return finish(c, y0, 0.0);
  }

  Dop853<8> ode(Dop853Options{opt.rtol, opt.atol});
  if (!ode.init(f, 0.0, y0, 1.0)) {
    res.terminal = Terminal::failed;
    res.diagnostic = "initial state outside the chart";
    return res;
  }
  for (std::size_t n = 0; n < opt.max_steps; ++n) {
    const StepStatus st = ode.step(f);
    res.steps = ode.accepted();
    res.rejected = ode.rejected();
    if (st != StepStatus::accepted) {
      const PhaseVector& y = ode.y();
      if (y[1] < p.r_plus() + 10.0 * opt.capture_margin * p.M) return finish(2, y, ode.x());
      std::ostringstream os;
      os.precision(17);
      os << "step failure at lambda=" << ode.x() << " t=" << y[0] << " r=" << y[1] << " theta=" << y[2];
      res.terminal = Terminal::failed;
      res.diagnostic = os.str();
      res.y_end = y;
      return res;
    }
    const PhaseVector& y1 = ode.y();
    while (idx < total && time_of(idx) <= y1[0]) {
      const double tk = time_of(idx);
      const double lam = locate_time(ode, tk);
      PhaseVector ys = ode.dense(lam);
      ys[0] = tk;
      const int c = emit(tk, ys);
      ++idx;
      if (c != 0 || idx == total) return finish(c, ys, lam);
    }
    if (y1[1] < r_cap) return finish(2, y1, ode.x());
    if (y1[1] > r_esc && y1[5] > 0.0) return finish(3, y1, ode.x());
    if (opt.project_null) {
      PhaseVector yp = y1;
      project_onto_cone(p, yp);
      const double h = ode.step_size();
      const double x = ode.x();
      ode.init(f, x, yp, 1.0, h);
    }
  }
  res.terminal = Terminal::failed;
  res.diagnostic = "max_steps exhausted";
  res.y_end = ode.y();
  return res;
}

PhaseVector integrate_affine(const KerrParams& p, const PhaseVector& y0, double lambda_span,
                             const IntegratorOptions& opt) {
  const double r_floor = p.r_plus() + opt.guards.horizon * p.M;
  Rhs f{p, opt.spray, r_floor};
  Dop853<8> ode(Dop853Options{opt.rtol, opt.atol});
  const double dir = lambda_span >= 0 ? 1.0 : -1.0;
  if (!ode.init(f, 0.0, y0, dir)) throw DomainError("integrate_affine: initial state outside the chart");
  const double target = lambda_span;
  for (std::size_t n = 0; n < opt.max_steps; ++n) {
    const double remaining = std::abs(target - ode.x());
    if (remaining <= 1e-14 * std::max(1.0, std::abs(target))) return ode.y();
    if (ode.step_size() > remaining) ode.set_step_size(remaining);
    if (ode.step(f) != StepStatus::accepted) throw NumericalError("integrate_affine: step failure");
  }
  throw NumericalError("integrate_affine: max_steps exhausted");
}

DriftSample drift_relative_to(const KerrParams& p, const ConservedSet& c0, const NullState& s) {
  const ConservedSet c = conserved(p, s);
  const double e_scale = std::abs(c0.e);
  DriftSample d;
  d.e = std::abs(c.e - c0.e) / e_scale;
  d.lz = std::abs(c.lz - c0.lz) / std::max(std::abs(c0.lz), p.M * e_scale);
  d.q = std::abs(c.q - c0.q) / std::max(c0.q, p.M * p.M * e_scale * e_scale);
  d.L = null_residual(p, s);
  return d;
}

DriftSample Trajectory::max_abs_drift() const {
  DriftSample m;
  for (const auto& s : samples) {
    m.L = std::max(m.L, std::abs(s.drift.L));
    m.e = std::max(m.e, s.drift.e);
    m.lz = std::max(m.lz, s.drift.lz);
    m.q = std::max(m.q, s.drift.q);
  }
  return m;
}

Trajectory integrate(const KerrParams& p, const NullState& s0, double t_end, const IntegratorOptions& opt,
                     double sample_dt) {
  Trajectory tr;
  tr.params = p;
  const ConservedSet c0 = conserved(p, s0);
  const RunResult rr = integrate_sampled(p, s0, t_end, sample_dt, opt, [&](double t, const PhaseVector& y) {
    for (double v : y)
      if (!std::isfinite(v)) throw NumericalError("integrate: NaN in trajectory");
    TrajectorySample smp;
    smp.t = t;
    smp.state = from_phase(p, y);
    smp.drift = drift_relative_to(p, c0, smp.state);
    tr.samples.push_back(smp);
    return true;
  });
  tr.terminal = rr.terminal;
  tr.steps = rr.steps;
  tr.rejected = rr.rejected;
  tr.diagnostic = rr.diagnostic;
  return tr;
}

double radial_potential(const KerrParams& p, double e, double lz, double q, double r) {
  const double a = p.a, M = p.M;
  const double s = r * r + a * a;
  const double D = delta_of(p, r);
  return -s * s * e * e - 4.0 * a * M * r * e * lz + (D - a * a) * lz * lz + D * q;
}

double radial_potential_dr(const KerrParams& p, double e, double lz, double q, double r) {
  const double a = p.a, M = p.M;
  const double s = r * r + a * a;
  const double Dp = 2.0 * r - 2.0 * M;
  return -4.0 * r * s * e * e - 4.0 * a * M * e * lz + Dp * lz * lz + Dp * q;
}

double radial_potential_scale(const KerrParams& p, double e, double lz, double q, double r) {
  const double a = p.a, M = p.M;
  const double s = r * r + a * a;
  const double D = delta_of(p, r);
  return s * s * e * e + std::abs(4.0 * a * M * r * e * lz) + std::abs(D - a * a) * lz * lz + D * std::abs(q);
}

std::string to_string(RadialClass c) {
  switch (c) {
    case RadialClass::captured: return "captured";
    case RadialClass::trapped: return "trapped";
    case RadialClass::scattering: return "scattering";
  }
  return "unknown";
}

RadialPotentialReport analyze_radial_potential(const KerrParams& p, double e, double lz, double q, double r0,
                                               double vr_sign) {
  RadialPotentialReport rep;
  rep.e = e;
  rep.lz = lz;
  rep.q = q;
  const double a = p.a, M = p.M;
  // Ascending coefficients of the quartic.
  std::vector<double> c = {-a * a * a * a * e * e + a * a * q, -4.0 * a * M * e * lz - 2.0 * M * lz * lz - 2.0 * M * q,
                           -2.0 * a * a * e * e + lz * lz + q, 0.0, -e * e};
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const double rp = p.r_plus();
  std::vector<double> cand;
  if (c.size() > 1) {
    Eigen::VectorXd coeffs(static_cast<Eigen::Index>(c.size()));
    for (std::size_t i = 0; i < c.size(); ++i) coeffs[static_cast<Eigen::Index>(i)] = c[i];
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(coeffs);
    for (const auto& z : solver.roots())
      if (std::abs(z.imag()) <= 1e-6 * (1.0 + std::abs(z.real()))) cand.push_back(z.real());
  }
  // Newton polish in extended precision; double roots converge linearly.
  for (double& r : cand) {
    long double x = r;
    for (int it = 0; it < 100; ++it) {
      long double f = 0.0L, df = 0.0L;
      for (std::size_t i = c.size(); i-- > 0;) {
        df = df * x + f;
        f = f * x + c[i];
      }
      if (df == 0.0L) break;
      const long double nx = x - f / df;
      if (nx == x) break;
      x = nx;
    }
    r = static_cast<double>(x);
  }
  std::sort(cand.begin(), cand.end());
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (!(cand[i] > rp)) continue;
    if (!rep.roots.empty() && std::abs(cand[i] - rep.roots.back()) < 1e-6 * M) {
      rep.double_roots.push_back(0.5 * (cand[i] + rep.roots.back()));
      rep.roots.back() = rep.double_roots.back();
      continue;
    }
    rep.roots.push_back(cand[i]);
  }
  // A double root is a potential maximum touching zero: a barrier only in
  // infinite time. Simple roots are turning points.
  for (double d : rep.double_roots)
    if (std::abs(d - r0) < 1e-6 * M) {
      rep.classification = RadialClass::trapped;
      return rep;
    }
  bool below = false, above = false;
  for (double rr : rep.roots) {
    if (std::find(rep.double_roots.begin(), rep.double_roots.end(), rr) != rep.double_roots.end()) continue;
    if (rr < r0) below = true;
    if (rr > r0) above = true;
  }
  if (above && below)
    rep.classification = RadialClass::trapped;
  else if (above)
    rep.classification = RadialClass::captured;
  else if (below)
    rep.classification = RadialClass::scattering;
  else
    rep.classification = vr_sign < 0 ? RadialClass::captured : RadialClass::scattering;
  return rep;
}

std::string to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::captured: return "captured";
    case OrbitClass::escaped: return "escaped";
    case OrbitClass::trapped_candidate: return "trapped_candidate";
    case OrbitClass::undetermined: return "undetermined";
  }
  return "unknown";
}

OrbitClassification classify_orbit(const KerrParams& p, const NullState& s0, double horizon_r, double escape_r,
                                   double t_max, const IntegratorOptions& opt_in) {
  IntegratorOptions opt = opt_in;
  opt.capture_margin = std::max((horizon_r - p.r_plus()) / p.M, opt.guards.horizon);
  opt.escape_radius = escape_r / p.M;
  OrbitClassification oc;
  oc.r_min = oc.r_max = s0.x.r;
  const RunResult rr = integrate_sampled(p, s0, s0.x.t + t_max, 0.5 * p.M, opt, [&](double, const PhaseVector& y) {
    oc.r_min = std::min(oc.r_min, y[1]);
    oc.r_max = std::max(oc.r_max, y[1]);
    return true;
  });
  oc.t_final = rr.terminal == Terminal::reached_t_end ? rr.t_last_sample : rr.y_end[0];
  oc.diagnostic = rr.diagnostic;
  switch (rr.terminal) {
    case Terminal::captured: oc.cls = OrbitClass::captured; break;
    case Terminal::escaped: oc.cls = OrbitClass::escaped; break;
    case Terminal::failed: oc.cls = OrbitClass::undetermined; break;
    case Terminal::reached_t_end:
      if (oc.r_min >= 2.0 * p.M && oc.r_max <= 10.0 * p.M) {
        oc.cls = OrbitClass::trapped_candidate;
      } else {
        oc.cls = OrbitClass::undetermined;
        oc.diagnostic = "t_max exhausted outside the trapping band";
      }
      break;
  }
  return oc;
}

ConservedSet spherical_photon_constants(const KerrParams& p, double r0, double lz_fraction) {
  const double M = p.M, a = p.a;
  ConservedSet c;
  c.e = -1.0;
  if (a == 0.0) {
    if (std::abs(r0 - 3.0 * M) > 1e-12 * M)
      throw DomainError("spherical_photon_constants: for a = 0 only r0 = 3M is a photon orbit");
    c.lz = lz_fraction * std::sqrt(27.0) * M;
    c.q = 27.0 * M * M - c.lz * c.lz;
    return c;
  }
  const double r = r0;
  c.lz = -(r * r * r - 3.0 * M * r * r + a * a * r + a * a * M) / (a * (r - M));
  const double Qc = -r * r * r * (r * r * r - 6.0 * M * r * r + 9.0 * M * M * r - 4.0 * a * a * M) /
                    (a * a * (r - M) * (r - M));
  if (Qc < 0.0) throw DomainError("spherical_photon_constants: r0 outside the photon region");
  c.q = Qc + a * a;
  return c;
}

NullState state_from_constants(const KerrParams& p, const ConservedSet& c, double r0, double theta0,
                               double vr_sign, double vth_sign) {
  const double sn = std::sin(theta0), cs = std::cos(theta0);
  const double cot = cs / sn;
  double Theta = c.q - cot * cot * c.lz * c.lz - p.a * p.a * sn * sn * c.e * c.e;
  const double th_scale = std::abs(c.q) + (1.0 + cot * cot) * c.lz * c.lz + p.a * p.a * c.e * c.e;
  if (Theta < -1e-12 * th_scale) throw DomainError("state_from_constants: theta0 is not reachable");
  Theta = std::max(Theta, 0.0);
  double Rr = radial_potential(p, c.e, c.lz, c.q, r0);
  const double r_scale = radial_potential_scale(p, c.e, c.lz, c.q, r0);
  if (Rr > 1e-12 * r_scale) throw DomainError("state_from_constants: r0 is radially forbidden");
  Rr = std::min(Rr, 0.0);
  const double D = delta_of(p, r0);
  const double vr = vr_sign == 0.0 ? 0.0 : std::copysign(std::sqrt(-Rr) / D, vr_sign);
  const double vth = std::copysign(std::sqrt(Theta), vth_sign);
  return state_from_covariant(p, BLPoint{0.0, r0, theta0, 0.0}, Vec4{c.e, vr, vth, c.lz});
}

}  // namespace kvlasov
