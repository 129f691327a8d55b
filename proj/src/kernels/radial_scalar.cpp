#include <cmath>
#include <limits>

#include "kvlasov/kernels.hpp"
#include "kvlasov/symmetry_weights.hpp"

namespace kvlasov::kernels::scalar {

void radial_terms(const RadialConsts& c, const RadialBatchIn& in, const RadialBatchOut& out) {
  const KerrParams p{c.M, c.a};
  WeightConfig cfg;
  cfg.eps_e2 = c.eps;
  for (std::size_t i = 0; i < in.n; ++i) {
    const RadialProfile pr = radial_profile(p, cfg, in.r[i]);
    const SymmetryVector S = symmetry_basis(in.e[i], in.lz[i], in.q[i]);
    const double L = c.M * c.M * S[kE2] + S[kLZ2] + S[kSQ];
    const double rt1 = sym_dot(pr.Rt1, S);
    const double rt2 = -sym_dot(pr.Rt2, S);
    const double vr = in.vr[i];
    const double D2 = pr.Delta * pr.Delta;
    if (out.rt1_sigma) out.rt1_sigma[i] = rt1;
    if (out.rt2_sigma) out.rt2_sigma[i] = rt2;
    if (out.curly_L) out.curly_L[i] = L;
    if (out.rho_A) out.rho_A[i] = L * (D2 * pr.sqrt_g * rt2 * vr * vr + 0.5 * pr.w * rt1 * rt1);
    if (out.e_A) out.e_A[i] = pr.z * pr.w * L * rt1 * vr;
    if (out.rho_I) {
      const double r = in.r[i];
      const double r5 = r * r * r * r * r;
      const double f2 = in.f2 ? in.f2[i] : L * L;
      out.rho_I[i] = c.M * D2 / (pr.s * pr.s) * vr * vr * f2 + r5 * rt1 * rt1 * L;
    }
  }
}

void ratio_scan(const RatioScanIn& in, const RatioScanOut& out) {
  for (std::size_t i = 0; i < in.n_r; ++i) {
    const double* n = in.nrt2 + 4 * i;
    const double sc = in.scale[i];
    double mn = std::numeric_limits<double>::infinity();
    std::size_t am = 0, viol = 0;
    for (std::size_t j = 0; j < in.n_s; ++j) {
      const double num = n[0] * in.s0[j] + n[1] * in.s1[j] + n[2] * in.s2[j] + n[3] * in.s3[j];
      const double ratio = num / (sc * in.ref[j]);
      if (ratio < mn) {
        mn = ratio;
        am = j;
      }
      if (ratio < in.C) ++viol;
    }
    out.min_ratio[i] = mn;
    out.argmin[i] = am;
    out.violations[i] = viol;
  }
}

}  // namespace kvlasov::kernels::scalar
