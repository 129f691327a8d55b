#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kvlasov/kerr_geometry.hpp"

namespace kvlasov {

struct NullState {
  BLPoint x;
  Vec4 v_cov{};  // v_t, v_r, v_theta, v_phi
  Vec4 v_con{};  // v^t, v^r, v^theta, v^phi
};

struct ConservedSet {
  double e = 0.0;
  double lz = 0.0;
  double q = 0.0;
  double L = 0.0;
};

struct Particle {
  NullState state;
  double w = 0.0;
};

inline constexpr double kDefaultNullTol = 1e-10;

NullState state_from_covariant(const KerrParams& p, const BLPoint& x, const Vec4& v_cov);
NullState state_from_contravariant(const KerrParams& p, const BLPoint& x, const Vec4& v_con);

// Solves g(v,v) = 0 for v^t > 0. Inside the ergoregion both roots can be
// positive; the smaller one is taken.
NullState null_normalize(const KerrParams& p, const BLPoint& x, double vr, double vth, double vph,
                         const Guards& g = {});

// Solves G^{ab} v_a v_b = 0 for v_t given the spatial covector, taking the
// root with v^t > 0 (unique: G^{tt} < 0 on the exterior).
NullState null_normalize_covariant(const KerrParams& p, const BLPoint& x, double v_r, double v_th, double v_ph,
                                   const Guards& g = {});

// Null covector at x whose spatial part is isotropic in the locally
// orthonormal (r, theta, phi) frame; n is a unit 3-vector.
NullState null_state_from_direction(const KerrParams& p, const BLPoint& x, const std::array<double, 3>& n,
                                    const Guards& g = {});

// Random exterior null state: r = r_plus + delta, delta log-uniform in
// [delta_min, delta_max] (units of M), theta uniform in the guarded range.
struct RandomStateBox {
  double delta_min = 1e-2;
  double delta_max = 1e3;
  double theta_guard = 1e-3;
};
NullState random_null_state(const KerrParams& p, std::uint64_t seed, std::uint64_t index,
                            const RandomStateBox& box = {});

// |v_t| + |v_th|/r + |v_ph|/(r sin th) + sqrt(Delta)|v_r|
double momentum_scale(const KerrParams& p, const NullState& s);

// g^{ab} v_a v_b / scale^2
double null_residual(const KerrParams& p, const NullState& s);

// Throws DomainError when v^t <= 0 or the null residual exceeds tol.
void validate_null_state(const KerrParams& p, const NullState& s, double tol = kDefaultNullTol,
                         const Guards& g = {});

ConservedSet conserved(const KerrParams& p, const NullState& s);
double carter_q(const KerrParams& p, const NullState& s);

// Density of the cone measure against dv^r dv^th dv^ph.
double cone_measure_weight(const KerrParams& p, const NullState& s);

// Flow-invariant phase-space mass of a sample drawn with coordinate cell
// volume cell_volume (or 1/(N q) under a proposal density q).
double klimontovich_weight(const KerrParams& p, const NullState& s, double f0_value, double cell_volume);

// Smooth compactly supported datum: bumps in r and theta, truncated
// Gaussians in the contravariant spatial momentum.
struct InitialDatum {
  double r_min = 6.0, r_max = 10.0;
  double theta_min = M_PI / 4, theta_max = 3 * M_PI / 4;
  double sigma_r = 1.0, sigma_th = 0.1, sigma_ph = 0.1;
  double mu_r = 0.0, mu_th = 0.0, mu_ph = 0.05;
  double truncation = 4.0;  // velocity box half width in units of sigma
  double amplitude = 1.0;

  double value(double r, double theta, double vr, double vth, double vph) const;
  // Box order: r, theta, phi, v^r, v^theta, v^phi.
  std::array<double, 6> lower() const;
  std::array<double, 6> upper() const;
  double box_volume() const;
};

// Peak-one smooth bump supported on (lo, hi).
double smooth_bump(double x, double lo, double hi);

enum class Proposal { uniform, gaussian };
enum class Layout { pseudo_random, grid_midpoint };

struct SamplingOptions {
  Proposal proposal = Proposal::uniform;
  Layout layout = Layout::pseudo_random;
  std::array<int, 6> grid{1, 1, 1, 1, 1, 1};
  Guards guards;
};

struct Provenance {
  std::string proposal = "uniform";
  std::string layout = "pseudo_random";
  std::size_t requested = 0;
  std::size_t rejected = 0;          // zero spatial momentum or failed normalization
  std::size_t positive_vt = 0;       // ergoregion states with v_t > 0
  double box_volume = 0.0;
};

struct Ensemble {
  KerrParams params;
  std::vector<Particle> particles;
  std::uint64_t seed = 0;
  InitialDatum f0;
  Provenance provenance;

  double total_weight() const;
};

std::string to_string(Proposal p);
std::string to_string(Layout l);

Ensemble sample_ensemble(const KerrParams& p, const InitialDatum& f0, std::size_t N, std::uint64_t seed,
                         const SamplingOptions& opt = {});

}  // namespace kvlasov
