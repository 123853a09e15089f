// AVX2/FMA variants of the inner kernels.  This translation unit is compiled
// with -mavx2 -mfma and must only be entered after the runtime dispatch has
// confirmed AVX2 support.

#include "qmcnodes/kernels.hpp"

#ifdef QMCNODES_HAVE_AVX2_BUILD

#include <immintrin.h>

namespace qmcnodes::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void term_moments(const TermTable& t, const double* tables, int stride, Moments& out) {
  out = Moments{};
  const int nv = t.n_vars;

  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1[kMaxVars];
  __m256d acc2[kMaxVars * (kMaxVars + 1) / 2];
  for (int v = 0; v < nv; ++v) acc1[v] = _mm256_setzero_pd();
  const int npairs = nv * (nv + 1) / 2;
  for (int p = 0; p < npairs; ++p) acc2[p] = _mm256_setzero_pd();

  for (int i = 0; i < t.padded; i += 4) {
    __m256d val = _mm256_loadu_pd(&t.coeff[i]);
    __m256d pw[kMaxVars];
    for (int v = 0; v < nv; ++v) {
      const std::int32_t* pv = &t.powers[static_cast<std::size_t>(v) * t.padded + i];
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(pv));
      const __m256d tv = _mm256_i32gather_pd(tables + static_cast<std::size_t>(v) * stride,
                                             idx, 8);
      val = _mm256_mul_pd(val, tv);
      pw[v] = _mm256_cvtepi32_pd(idx);
    }
    acc0 = _mm256_add_pd(acc0, val);
    int pair = 0;
    for (int v = 0; v < nv; ++v) {
      const __m256d pval = _mm256_mul_pd(pw[v], val);
      acc1[v] = _mm256_add_pd(acc1[v], pval);
      for (int w = 0; w <= v; ++w, ++pair)
        acc2[pair] = _mm256_fmadd_pd(pw[w], pval, acc2[pair]);
    }
  }

  out.s0 = hsum(acc0);
  for (int v = 0; v < nv; ++v) out.s1[v] = hsum(acc1[v]);
  int pair = 0;
  for (int v = 0; v < nv; ++v)
    for (int w = 0; w <= v; ++w, ++pair) {
      const double s = hsum(acc2[pair]);
      out.s2[v * kMaxVars + w] = s;
      out.s2[w * kMaxVars + v] = s;
    }
}

double term_sum(const TermTable& t, const double* tables, int stride) {
  __m256d acc = _mm256_setzero_pd();
  for (int i = 0; i < t.padded; i += 4) {
    __m256d val = _mm256_loadu_pd(&t.coeff[i]);
    for (int v = 0; v < t.n_vars; ++v) {
      const std::int32_t* pv = &t.powers[static_cast<std::size_t>(v) * t.padded + i];
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(pv));
      val = _mm256_mul_pd(val, _mm256_i32gather_pd(
                                   tables + static_cast<std::size_t>(v) * stride, idx, 8));
    }
    acc = _mm256_add_pd(acc, val);
  }
  return hsum(acc);
}

double reduce_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

void mean_and_variance(const double* x, std::size_t n, double& mean, double& variance) {
  if (n == 0) {
    mean = 0.0;
    variance = 0.0;
    return;
  }
  mean = reduce_sum(x, n) / static_cast<double>(n);
  const __m256d m = _mm256_set1_pd(mean);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double ss = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - mean;
    ss += d * d;
  }
  variance = ss / static_cast<double>(n);
}

void halve_pairs(const double* x, std::size_t n, double* out) {
  const std::size_t h = n / 2;
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= h; i += 4) {
    const __m256d a = _mm256_loadu_pd(x + 2 * i);      // x0 x1 x2 x3
    const __m256d b = _mm256_loadu_pd(x + 2 * i + 4);  // x4 x5 x6 x7
    // hadd within 128-bit lanes, then fix lane order
    const __m256d s = _mm256_hadd_pd(a, b);  // x0+x1, x4+x5, x2+x3, x6+x7
    const __m256d r = _mm256_permute4x64_pd(s, _MM_SHUFFLE(3, 1, 2, 0));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(r, half));
  }
  for (; i < h; ++i) out[i] = 0.5 * (x[2 * i] + x[2 * i + 1]);
}

}  // namespace qmcnodes::kernels::avx2

#endif  // QMCNODES_HAVE_AVX2_BUILD
