#pragma once

#include "kvlasov/types.hpp"

namespace kvlasov {

struct KerrParams {
  double M = 1.0;
  double a = 0.0;

  // Validates M > 0 and |a| <= M.
  static KerrParams make(double M, double a);

  double r_plus() const;
  double omega_H() const;
};

// Chart guards. Both are relative: axis in radians, horizon in units of M.
struct Guards {
  double axis = 1e-8;
  double horizon = 1e-9;
};

struct BLPoint {
  double t = 0.0;
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct MetricFunctions {
  double Delta = 0.0;
  double Sigma = 0.0;
  double Pi = 0.0;
  double Omega = 0.0;  // Omega^-2 = Sigma
  double sin_theta = 0.0;
  double cos_theta = 0.0;
};

double horizon_radius(const KerrParams& p);

// Throws DomainError for points inside the horizon guard or on the axis guard.
void check_exterior(const KerrParams& p, const BLPoint& x, const Guards& g = {});
bool in_exterior(const KerrParams& p, const BLPoint& x, const Guards& g = {});

inline double delta_of(const KerrParams& p, double r) { return r * r - 2.0 * p.M * r + p.a * p.a; }

MetricFunctions metric_functions(const KerrParams& p, double r, double theta);

Mat4 metric_lower(const KerrParams& p, const BLPoint& x, const Guards& g = {});

// Assembled from Sigma g^{ab} = Delta d_r d_r + R^{ab}/Delta.
Mat4 metric_upper(const KerrParams& p, const BLPoint& x, const Guards& g = {});

// R^{ab} and Q^{ab} of the inverse-metric decomposition.
Mat4 curly_R_tensor(const KerrParams& p, const BLPoint& x);
Mat4 carter_Q_tensor(const KerrParams& p, const BLPoint& x);

// Sigma g^{ab} from the textbook component formulas (independent of the
// decomposition) and its r-derivative.
Mat4 conformal_inverse(const KerrParams& p, const BLPoint& x);
Mat4 conformal_inverse_dr(const KerrParams& p, const BLPoint& x);

struct MetricDerivatives {
  Mat4 dr{};
  Mat4 dtheta{};
};
MetricDerivatives metric_lower_derivatives(const KerrParams& p, double r, double theta);

// Gamma[c][a][b] = Gamma^c_{ab}.
using Christoffels = std::array<Mat4, 4>;
Christoffels christoffels(const KerrParams& p, const BLPoint& x, const Guards& g = {});

// -Gamma^c_{ab} v^a v^b without building the full table. No guard checks;
// callers validate the point.
Vec4 geodesic_acceleration(const KerrParams& p, double r, double theta, const Vec4& v_con);

double omega_perp(const KerrParams& p, const BLPoint& x);

}  // namespace kvlasov
