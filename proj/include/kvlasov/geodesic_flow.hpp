#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "kvlasov/null_phase_space.hpp"

namespace kvlasov {

// t, r, theta, phi, v^t, v^r, v^theta, v^phi
using PhaseVector = std::array<double, 8>;

PhaseVector to_phase(const NullState& s);
NullState from_phase(const KerrParams& p, const PhaseVector& y);

struct SprayOptions {
  // Test hook: adds fault * sin(th)cos(th) (v^phi)^2 to dv^theta/dlambda,
  // i.e. corrupts Gamma^theta_{phi phi}.
  double christoffel_fault = 0.0;
};

// Non-throwing right-hand side for the integrator; false outside the chart.
bool spray_rhs(const KerrParams& p, const PhaseVector& y, PhaseVector& dy, const SprayOptions& opt,
               double r_floor);

// dx/dlambda = v, dv^c/dlambda = -Gamma^c_ab v^a v^b.
PhaseVector spray(const KerrParams& p, const NullState& s, const SprayOptions& opt = {},
                  const Guards& g = {});

struct IntegratorOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double capture_margin = 1e-2;  // capture at r_plus + capture_margin * M
  double escape_radius = 1e3;    // units of M, outgoing only
  std::size_t max_steps = 5'000'000;
  bool project_null = false;  // flagged in provenance when used
  SprayOptions spray;
  Guards guards;
};

enum class Terminal { reached_t_end, captured, escaped, failed };
std::string to_string(Terminal t);

// Observer receives samples on the requested coordinate-time grid; returning
// false stops the run (terminal stays reached_t_end).
using SampleObserver = std::function<bool(double t, const PhaseVector& y)>;

struct RunResult {
  Terminal terminal = Terminal::reached_t_end;
  PhaseVector y_end{};
  double lambda_end = 0.0;
  std::size_t steps = 0, rejected = 0;
  double t_last_sample = 0.0;
  std::string diagnostic;
};

// Integrates in affine parameter and reports states at t0 + k dt,
// k = 0..floor((t_end - t0)/dt), plus t_end itself if that is off-grid.
// A sample with r below the capture radius or beyond the escape radius
// (moving out) ends the run before it is reported.
RunResult integrate_sampled(const KerrParams& p, const NullState& s0, double t_end, double dt,
                            const IntegratorOptions& opt, const SampleObserver& obs);

// Fixed affine-parameter span, either direction. Used for time-reversal checks.
PhaseVector integrate_affine(const KerrParams& p, const PhaseVector& y0, double lambda_span,
                             const IntegratorOptions& opt);

struct DriftSample {
  double L = 0.0;   // g(v,v)/scale^2
  double e = 0.0;   // relative to |e0|
  double lz = 0.0;  // relative to max(|lz0|, M|e0|)
  double q = 0.0;   // relative to max(q0, M^2 e0^2)
};

struct TrajectorySample {
  double t = 0.0;
  NullState state;
  DriftSample drift;
};

struct Trajectory {
  KerrParams params;
  std::vector<TrajectorySample> samples;
  Terminal terminal = Terminal::reached_t_end;
  std::size_t steps = 0, rejected = 0;
  std::string diagnostic;

  DriftSample max_abs_drift() const;
};

Trajectory integrate(const KerrParams& p, const NullState& s0, double t_end, const IntegratorOptions& opt = {},
                     double sample_dt = 1.0);

DriftSample drift_relative_to(const KerrParams& p, const ConservedSet& c0, const NullState& s);

// -(r^2+a^2)^2 e^2 - 4aMr e lz + (Delta - a^2) lz^2 + Delta q
double radial_potential(const KerrParams& p, double e, double lz, double q, double r);
double radial_potential_dr(const KerrParams& p, double e, double lz, double q, double r);
// Sum of the absolute values of the four terms; the natural error scale.
double radial_potential_scale(const KerrParams& p, double e, double lz, double q, double r);

enum class RadialClass { captured, trapped, scattering };
std::string to_string(RadialClass c);

struct RadialPotentialReport {
  double e = 0.0, lz = 0.0, q = 0.0;
  std::vector<double> roots;  // real roots in (r_plus, inf), ascending
  std::vector<double> double_roots;
  RadialClass classification = RadialClass::scattering;
};

// Classification of the motion from r0 with the sign of v_r.
RadialPotentialReport analyze_radial_potential(const KerrParams& p, double e, double lz, double q, double r0,
                                               double vr_sign);

enum class OrbitClass { captured, escaped, trapped_candidate, undetermined };
std::string to_string(OrbitClass c);

struct OrbitClassification {
  OrbitClass cls = OrbitClass::undetermined;
  double t_final = 0.0;
  double r_min = 0.0, r_max = 0.0;
  std::string diagnostic;
};

// Trapped-candidate requires r to stay in [2M, 10M] for the whole span;
// t_max exhaustion outside that band is reported as undetermined.
OrbitClassification classify_orbit(const KerrParams& p, const NullState& s0, double horizon_r, double escape_r,
                                   double t_max = 1e3, const IntegratorOptions& opt = {});

// Constants (e = -1) of the spherical photon orbit at r0. For a = 0 only
// r0 = 3M exists and lz_fraction in [-1,1] selects lz = lz_fraction*sqrt(27)M;
// for a != 0 the orbit is unique and lz_fraction is ignored.
ConservedSet spherical_photon_constants(const KerrParams& p, double r0, double lz_fraction = 1.0);

// Covariant state from constants: v_r = vr_sign*sqrt(-R(r0))/Delta and
// v_theta = vth_sign*sqrt(Theta(theta0)). Throws if either is forbidden.
NullState state_from_constants(const KerrParams& p, const ConservedSet& c, double r0, double theta0,
                               double vr_sign = 0.0, double vth_sign = 1.0);

}  // namespace kvlasov
