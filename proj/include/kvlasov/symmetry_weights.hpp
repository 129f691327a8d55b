#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kvlasov/null_phase_space.hpp"

namespace kvlasov {

enum SymIndex : int { kE2 = 0, kELZ = 1, kLZ2 = 2, kSQ = 3 };

using SymmetryVector = std::array<double, 4>;
using SymmetryMatrix = std::array<std::array<double, 4>, 4>;

// S = (e^2, e lz, lz^2, q)
SymmetryVector symmetry_basis(const ConservedSet& c);
inline SymmetryVector symmetry_basis(double e, double lz, double q) { return {e * e, e * lz, lz * lz, q}; }
inline double sym_dot(const SymmetryVector& c, const SymmetryVector& s) {
  return c[0] * s[0] + c[1] * s[1] + c[2] * s[2] + c[3] * s[3];
}
double contract(const SymmetryVector& c, const ConservedSet& s);

struct WeightConfig {
  double eps_e2 = 0.1;
  double r_chi = 10.0;     // units of M
  double chi_width = 1.0;  // units of M; blend on [r_chi, r_chi + width]

  void validate() const;
};

SymmetryVector curlyR_coefficients(const KerrParams& p, double r);
SymmetryVector curlyL_coefficients(const KerrParams& p);
// (M^2 eps, 0, 1, 1): the eps-weighted variant of curlyL.
SymmetryVector curlyL_eps_coefficients(const KerrParams& p, double eps);

struct Weights {
  double z1 = 0, z2 = 0, w1 = 0, w2 = 0, z = 0, w = 0, dz_dr = 0;
};
Weights weights(const KerrParams& p, const WeightConfig& cfg, double r);

// Every r-dependent quantity of the Morawetz construction at one radius.
struct RadialProfile {
  double r = 0, s = 0, Delta = 0, dDelta = 0;
  double g = 0, dg = 0, d2g = 0;  // g = z/Delta
  double z = 0, dz = 0, w = 0, dw = 0;
  double sqrt_g = 0;
  SymmetryVector Rt1{};   // R~'
  SymmetryVector dRt1{};  // d/dr R~'
  SymmetryVector Rt2{};   // R~~''
};
RadialProfile radial_profile(const KerrParams& p, const WeightConfig& cfg, double r);

SymmetryVector R_tilde_prime(const KerrParams& p, const WeightConfig& cfg, double r);
SymmetryVector R_tilde_tilde_doubleprime(const KerrParams& p, const WeightConfig& cfg, double r);

double chi(const KerrParams& p, const WeightConfig& cfg, double r);
double chi_dr(const KerrParams& p, const WeightConfig& cfg, double r);

struct BlendedVectors {
  Vec4 T_chi{};
  Vec4 T_perp{};
  double chi = 0, dchi = 0;
};
BlendedVectors blended_vector(const KerrParams& p, const WeightConfig& cfg, const BLPoint& x);

struct MorawetzField {
  SymmetryMatrix A_r{};  // radial component A^{r ab}
  SymmetryMatrix q{};    // q^{ab}
};
MorawetzField morawetz_field(const KerrParams& p, const WeightConfig& cfg, const BLPoint& x);

// Sigma_{ab} |A^{r ab}| / (Delta r^-2)
double morawetz_field_bound_ratio(const KerrParams& p, const WeightConfig& cfg, double r);

// Reference functional on the right of the positivity check.
enum class PositivityReference { curly_L, curly_L_eps };
std::string to_string(PositivityReference r);

struct PositivityScan {
  std::size_t evaluations = 0;
  std::size_t violations = 0;
  double min_ratio = 0.0;  // min of (-R~~''.sigma) / (M (r^2+a^2)^-1 ref(sigma))
  double worst_r = 0.0;
  SymmetryVector worst_sigma{};
};

// Cone-realizable sigma set: symmetry vectors of random null states.
std::vector<SymmetryVector> cone_sigma_samples(const KerrParams& p, std::size_t n, std::uint64_t seed);

// Radii for scans: log spaced in r - r_plus from delta_min to r_max - r_plus.
std::vector<double> scan_radii(const KerrParams& p, std::size_t n, double r_max = 1e3, double delta_min = 1e-3);

// Checks -R~~''.sigma >= C M (r^2+a^2)^-1 ref(sigma) at every (r, sigma).
PositivityScan positivity_scan(const KerrParams& p, const WeightConfig& cfg, const std::vector<SymmetryVector>& sigma,
                               const std::vector<double>& radii, double C, PositivityReference ref);

struct EpsCeilingRow {
  double a = 0.0;
  std::vector<double> eps;
  std::vector<bool> admissible;
  std::vector<double> min_ratio;
  double eps_bar = 0.0;  // largest eps of the admissible prefix (ascending grid)
  bool empty = true;
  bool monotone = true;  // every eps below an admissible eps is admissible
};

struct EpsCeilingOptions {
  std::size_t sigma_samples = 20000;
  std::size_t radii = 400;
  std::uint64_t seed = 7;
  double C = 0.5;
  PositivityReference ref = PositivityReference::curly_L_eps;
};

std::vector<EpsCeilingRow> eps_ceiling_scan(double M, const std::vector<double>& a_grid,
                                            const std::vector<double>& eps_grid, const EpsCeilingOptions& opt = {});

// Sign changes of R~'.sigma on a radial grid, refined by bisection.
std::vector<double> rtilde_prime_roots(const KerrParams& p, const WeightConfig& cfg, const SymmetryVector& sigma,
                                       double r_lo, double r_hi, std::size_t n_grid = 2000);

}  // namespace kvlasov
