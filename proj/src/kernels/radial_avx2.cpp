// Compiled with -mavx2 -mfma; only reached when the CPU reports both.

#include <immintrin.h>

#include <bit>
#include <cmath>
#include <limits>

#include "kvlasov/kernels.hpp"

namespace kvlasov::kernels::avx2 {

namespace {
inline __m256d set(double x) { return _mm256_set1_pd(x); }
inline __m256d fma(__m256d a, __m256d b, __m256d c) { return _mm256_fmadd_pd(a, b, c); }
inline __m256d mul(__m256d a, __m256d b) { return _mm256_mul_pd(a, b); }
inline __m256d add(__m256d a, __m256d b) { return _mm256_add_pd(a, b); }
inline __m256d sub(__m256d a, __m256d b) { return _mm256_sub_pd(a, b); }
inline __m256d div(__m256d a, __m256d b) { return _mm256_div_pd(a, b); }

RadialBatchIn offset(const RadialBatchIn& in, std::size_t k) {
  RadialBatchIn o = in;
  o.r += k;
  o.vr += k;
  o.e += k;
  o.lz += k;
  o.q += k;
  if (o.f2) o.f2 += k;
  o.n = in.n - k;
  return o;
}

RadialBatchOut offset(const RadialBatchOut& out, std::size_t k) {
  RadialBatchOut o = out;
  if (o.rt1_sigma) o.rt1_sigma += k;
  if (o.rt2_sigma) o.rt2_sigma += k;
  if (o.curly_L) o.curly_L += k;
  if (o.rho_A) o.rho_A += k;
  if (o.e_A) o.e_A += k;
  if (o.rho_I) o.rho_I += k;
  return o;
}
}  // namespace

void radial_terms(const RadialConsts& c, const RadialBatchIn& in, const RadialBatchOut& out) {
  const double M = c.M, a = c.a, a2 = a * a, kap = M * M * c.eps;
  const __m256d vM = set(M), va2 = set(a2), vk = set(kap), one = set(1.0), two = set(2.0);
  const __m256d twoM = set(2.0 * M), aM4 = set(4.0 * a * M), M2 = set(M * M);
  std::size_t i = 0;
  for (; i + 4 <= in.n; i += 4) {
    const __m256d r = _mm256_loadu_pd(in.r + i);
    const __m256d r2 = mul(r, r);
    const __m256d s = add(r2, va2);
    const __m256d D = fma(r, sub(r, twoM), va2);
    const __m256d Dp = sub(mul(two, r), twoM);
    const __m256d is = div(one, s);
    const __m256d is2 = mul(is, is), is3 = mul(is2, is), is4 = mul(is2, is2);
    const __m256d is5 = mul(is4, is), is6 = mul(is3, is3);
    const __m256d g = sub(is2, mul(vk, mul(D, is4)));
    const __m256d rD = mul(r, D);
    const __m256d dg = sub(mul(set(-4.0), mul(r, is3)), mul(vk, sub(mul(Dp, is4), mul(set(8.0), mul(rD, is5)))));
    const __m256d inner = add(sub(sub(mul(two, is4), mul(set(16.0), mul(mul(r, Dp), is5))), mul(set(8.0), mul(D, is5))),
                              mul(set(80.0), mul(mul(r2, D), is6)));
    const __m256d d2g = sub(add(mul(set(-4.0), is3), mul(set(24.0), mul(r2, is4))), mul(vk, inner));
    const __m256d z = mul(D, g);
    const __m256d Dw = sub(mul(set(6.0), mul(r2, r)), mul(set(2.0 * a2), r));
    const __m256d dDw = sub(mul(set(18.0), r2), set(2.0 * a2));
    const __m256d s2 = mul(s, s), s3 = mul(s2, s), s4 = mul(s2, s2);
    const __m256d w = div(s4, Dw);
    const __m256d dw = sub(div(mul(set(8.0), mul(r, s3)), Dw), div(mul(s4, dDw), mul(Dw, Dw)));
    const __m256d sqg = _mm256_sqrt_pd(g);
    const __m256d k = mul(w, sqg);
    const __m256d dk = add(mul(dw, sqg), div(mul(w, dg), mul(two, sqg)));

    const __m256d P[4] = {sub(_mm256_setzero_pd(), s2), sub(_mm256_setzero_pd(), mul(aM4, r)), mul(r, sub(r, twoM)), D};
    const __m256d P1[4] = {mul(set(-4.0), mul(r, s)), sub(_mm256_setzero_pd(), aM4), Dp, Dp};
    const __m256d P2[4] = {sub(mul(set(-4.0), s), mul(set(8.0), r2)), _mm256_setzero_pd(), two, two};

    const __m256d e = _mm256_loadu_pd(in.e + i);
    const __m256d lz = _mm256_loadu_pd(in.lz + i);
    const __m256d q = _mm256_loadu_pd(in.q + i);
    const __m256d S[4] = {mul(e, e), mul(e, lz), mul(lz, lz), q};

    __m256d rt1 = _mm256_setzero_pd(), rt2 = _mm256_setzero_pd();
    for (int j = 0; j < 4; ++j) {
      const __m256d R1 = fma(P1[j], g, mul(P[j], dg));
      const __m256d dR1 = fma(P2[j], g, fma(mul(two, P1[j]), dg, mul(P[j], d2g)));
      const __m256d R2 = fma(dk, R1, mul(k, dR1));
      rt1 = fma(R1, S[j], rt1);
      rt2 = fma(R2, S[j], rt2);
    }
    rt2 = sub(_mm256_setzero_pd(), rt2);
    const __m256d L = fma(M2, S[0], add(S[2], S[3]));
    const __m256d vr = _mm256_loadu_pd(in.vr + i);
    const __m256d vr2 = mul(vr, vr);
    const __m256d D2 = mul(D, D);
    if (out.rt1_sigma) _mm256_storeu_pd(out.rt1_sigma + i, rt1);
    if (out.rt2_sigma) _mm256_storeu_pd(out.rt2_sigma + i, rt2);
    if (out.curly_L) _mm256_storeu_pd(out.curly_L + i, L);
    if (out.rho_A) {
      const __m256d t1 = mul(mul(D2, sqg), mul(rt2, vr2));
      const __m256d t2 = mul(set(0.5), mul(w, mul(rt1, rt1)));
      _mm256_storeu_pd(out.rho_A + i, mul(L, add(t1, t2)));
    }
    if (out.e_A) _mm256_storeu_pd(out.e_A + i, mul(mul(z, w), mul(L, mul(rt1, vr))));
    if (out.rho_I) {
      const __m256d f2 = in.f2 ? _mm256_loadu_pd(in.f2 + i) : mul(L, L);
      const __m256d r5 = mul(mul(r2, r2), r);
      const __m256d t1 = mul(div(mul(vM, D2), s2), mul(vr2, f2));
      const __m256d t2 = mul(r5, mul(mul(rt1, rt1), L));
      _mm256_storeu_pd(out.rho_I + i, add(t1, t2));
    }
  }
  if (i < in.n) scalar::radial_terms(c, offset(in, i), offset(out, i));
}

void ratio_scan(const RatioScanIn& in, const RatioScanOut& out) {
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < in.n_r; ++i) {
    const double* n = in.nrt2 + 4 * i;
    const __m256d n0 = set(n[0]), n1 = set(n[1]), n2 = set(n[2]), n3 = set(n[3]);
    const __m256d sc = set(in.scale[i]);
    const __m256d C = set(in.C);
    __m256d vmin = set(inf);
    __m256d vidx = set(0.0);
    __m256d cur = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d four = set(4.0);
    std::size_t viol = 0;
    std::size_t j = 0;
    for (; j + 4 <= in.n_s; j += 4) {
      __m256d num = mul(n0, _mm256_loadu_pd(in.s0 + j));
      num = fma(n1, _mm256_loadu_pd(in.s1 + j), num);
      num = fma(n2, _mm256_loadu_pd(in.s2 + j), num);
      num = fma(n3, _mm256_loadu_pd(in.s3 + j), num);
      const __m256d ratio = div(num, mul(sc, _mm256_loadu_pd(in.ref + j)));
      const __m256d lt = _mm256_cmp_pd(ratio, vmin, _CMP_LT_OQ);
      vmin = _mm256_blendv_pd(vmin, ratio, lt);
      vidx = _mm256_blendv_pd(vidx, cur, lt);
      viol += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(ratio, C, _CMP_LT_OQ)))));
      cur = add(cur, four);
    }
    alignas(32) double m[4], ix[4];
    _mm256_store_pd(m, vmin);
    _mm256_store_pd(ix, vidx);
    double mn = inf;
    std::size_t am = 0;
    for (int l = 0; l < 4; ++l) {
      const std::size_t idx = static_cast<std::size_t>(ix[l]);
      if (m[l] < mn || (m[l] == mn && idx < am)) {
        mn = m[l];
        am = idx;
      }
    }
    for (; j < in.n_s; ++j) {
      const double num = n[0] * in.s0[j] + n[1] * in.s1[j] + n[2] * in.s2[j] + n[3] * in.s3[j];
      const double ratio = num / (in.scale[i] * in.ref[j]);
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

}  // namespace kvlasov::kernels::avx2
