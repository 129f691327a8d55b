#include <atomic>

#include "kvlasov/kernels.hpp"

namespace kvlasov::kernels {

namespace {
std::atomic<Backend> g_backend{Backend::automatic};

Backend resolve(Backend b) {
  if (b == Backend::automatic) return avx2_available() ? Backend::avx2 : Backend::scalar;
  if (b == Backend::avx2 && !avx2_available()) return Backend::scalar;
  return b;
}
}  // namespace

bool avx2_available() {
#if defined(KVLASOV_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

void set_backend(Backend b) { g_backend.store(b); }

Backend active_backend() { return resolve(g_backend.load()); }

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::automatic: return "automatic";
  }
  return "unknown";
}

void radial_terms(const RadialConsts& c, const RadialBatchIn& in, const RadialBatchOut& out) {
  if (active_backend() == Backend::avx2)
    avx2::radial_terms(c, in, out);
  else
    scalar::radial_terms(c, in, out);
}

void ratio_scan(const RatioScanIn& in, const RatioScanOut& out) {
  if (active_backend() == Backend::avx2)
    avx2::ratio_scan(in, out);
  else
    scalar::ratio_scan(in, out);
}

#if !defined(KVLASOV_HAVE_AVX2_TU)
namespace avx2 {
void radial_terms(const RadialConsts& c, const RadialBatchIn& in, const RadialBatchOut& out) {
  scalar::radial_terms(c, in, out);
}
void ratio_scan(const RatioScanIn& in, const RatioScanOut& out) { scalar::ratio_scan(in, out); }
}  // namespace avx2
#endif

}  // namespace kvlasov::kernels
