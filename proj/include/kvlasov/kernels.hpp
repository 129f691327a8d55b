#pragma once

// Batched radial kernels. The scalar variant is the reference; the AVX2/FMA
// variant is selected at runtime and must agree with it to rounding.

#include <cstddef>
#include <string>

namespace kvlasov::kernels {

enum class Backend { scalar, avx2, automatic };

bool avx2_available();
void set_backend(Backend b);  // automatic: AVX2 if the CPU supports it
Backend active_backend();
std::string backend_name(Backend b);

struct RadialConsts {
  double M = 1.0;
  double a = 0.0;
  double eps = 0.1;
};

// Structure of arrays; v_r covariant, (e, lz, q) the constants of motion and
// f2 the strengthening factor for the Theorem-2 integrand.
struct RadialBatchIn {
  const double* r = nullptr;
  const double* vr = nullptr;
  const double* e = nullptr;
  const double* lz = nullptr;
  const double* q = nullptr;
  const double* f2 = nullptr;
  std::size_t n = 0;
};

struct RadialBatchOut {
  double* rt1_sigma = nullptr;   // R~'.S
  double* rt2_sigma = nullptr;   // -R~~''.S
  double* curly_L = nullptr;     // M^2 e^2 + lz^2 + q
  double* rho_A = nullptr;       // lemma-form Morawetz density (Sigma Pi_A)
  double* e_A = nullptr;         // -A.v per unit weight: z w L (R~'.S) v_r
  double* rho_I = nullptr;       // M Delta^2 s^-2 v_r^2 f2 + r^5 (R~'.S)^2 L
};

void radial_terms(const RadialConsts& c, const RadialBatchIn& in, const RadialBatchOut& out);

// For each radius i: ratio_j = (nrt2_i . sigma_j) / (scale_i * ref_j) over all
// sigma; reports the minimum, its index, and the count with ratio < C.
struct RatioScanIn {
  const double* nrt2 = nullptr;   // 4 per radius, -R~~'' components
  const double* scale = nullptr;  // per radius, M/(r^2+a^2)
  std::size_t n_r = 0;
  const double* s0 = nullptr;  // sigma components, SoA
  const double* s1 = nullptr;
  const double* s2 = nullptr;
  const double* s3 = nullptr;
  const double* ref = nullptr;  // per sigma, reference functional value
  std::size_t n_s = 0;
  double C = 0.5;
};

struct RatioScanOut {
  double* min_ratio = nullptr;      // per radius
  std::size_t* argmin = nullptr;    // per radius
  std::size_t* violations = nullptr;  // per radius
};

void ratio_scan(const RatioScanIn& in, const RatioScanOut& out);

namespace scalar {
void radial_terms(const RadialConsts& c, const RadialBatchIn& in, const RadialBatchOut& out);
void ratio_scan(const RatioScanIn& in, const RatioScanOut& out);
}  // namespace scalar

namespace avx2 {
void radial_terms(const RadialConsts& c, const RadialBatchIn& in, const RadialBatchOut& out);
void ratio_scan(const RatioScanIn& in, const RatioScanOut& out);
}  // namespace avx2

}  // namespace kvlasov::kernels
