#pragma once

#include <string>
#include <vector>

#include "kvlasov/symmetry_weights.hpp"

namespace kvlasov {

enum class FactorMode { none, symmetry, coordinate };
std::string to_string(FactorMode m);

// none: 1; symmetry: (M^2 e^2 + lz^2 + q)^2; coordinate: (M^2 v_t^2 + v_th^2 + v_ph^2/sin^2)^2
double strengthening_factor(const KerrParams& p, const NullState& s, FactorMode mode);

enum class FieldKind { d_t, d_phi, T_perp, T_chi, morawetz_A };
std::string to_string(FieldKind k);

// X.v for plain fields; for morawetz_A the symmetry contraction A^{r ab} S_a S_b v_r.
double field_contraction(const KerrParams& p, const WeightConfig& cfg, const NullState& s, FieldKind X);

// The per-particle surface integrand (X.v)(T_perp.v)(Pi/Delta)/(Sigma v^t),
// evaluated literally. It equals -(X.v) identically.
double surface_integrand(const KerrParams& p, const WeightConfig& cfg, const NullState& s, FieldKind X);

// Sum_p w_p F_p (X.v_p)(T_perp.v_p)(Pi/Delta)/(Sigma v^t_p); strengthening
// is ignored for morawetz_A (already carries its symmetry factors).
double surface_energy(const KerrParams& p, const WeightConfig& cfg, const std::vector<Particle>& ens, FieldKind X,
                      FactorMode factor);

// (r^2+a^2)^2 Delta^-1 v_t^2 + Delta v_r^2 + v_th^2 + v_ph^2/sin^2
double model_integrand(const KerrParams& p, const NullState& s);

struct ModelEnergy {
  double literal = 0.0;  // d^3v d^3x of the coordinate definition
  double nu = 0.0;       // natural slice measure
};
ModelEnergy model_energy(const KerrParams& p, const std::vector<Particle>& ens, FactorMode factor = FactorMode::coordinate);
// Per unit Klimontovich weight.
ModelEnergy model_energy_density(const KerrParams& p, const NullState& s, FactorMode factor);

// A vector field whose components depend on r only, with their r-derivatives.
struct RadialField {
  Vec4 X{};
  Vec4 dX{};
};
RadialField radial_field(const KerrParams& p, const WeightConfig& cfg, FieldKind X, double r);

// Lie_X(Sigma g^{ab}) = X^r d_r G^{ab} - G^{rb} d_r X^a - G^{ar} d_r X^b
Mat4 lie_deformation(const KerrParams& p, const RadialField& X, const BLPoint& x);
Mat4 lie_deformation(const KerrParams& p, const WeightConfig& cfg, FieldKind X, const BLPoint& x);

// Sigma Pi_X = -(1/2) Lie_X(G) v v for plain radial fields.
double bulk_density(const KerrParams& p, const WeightConfig& cfg, const NullState& s, FieldKind X);

// Closed form of |Sigma Pi_{T_chi}| sin(theta): Delta |d_r(chi omega_H)| |v_r| |v_ph| sin(theta).
double tchi_bulk_closed_form(const KerrParams& p, const WeightConfig& cfg, const NullState& s);

// Lemma form: L [ -z^{1/2} Delta^{3/2} (R~~''.S) v_r^2 + (1/2) w (R~'.S)^2 ].
double morawetz_density(const KerrParams& p, const WeightConfig& cfg, const NullState& s);

// Generic route: sum_ab S_a S_b [ -(1/2) Lie_{A^{ab}}(G) v v + q^{ab} G v v ].
struct MorawetzRoute {
  double lie = 0.0;
  double trace = 0.0;
  double total = 0.0;
  double magnitude = 0.0;  // sum of absolute contributions, for relative errors
};
MorawetzRoute morawetz_density_lie(const KerrParams& p, const WeightConfig& cfg, const NullState& s);

// Per unit coordinate time and unit Klimontovich weight: density/(Sigma v^t).
double slab_rate(const KerrParams& p, const NullState& s, double density);

// Composite Simpson over uniform samples; odd interval counts close with the
// 3/8 rule (or the trapezoid for a single interval).
double simpson_uniform(const double* f, std::size_t n_samples, double h);

}  // namespace kvlasov
