#include "qmcnodes/kernels.hpp"

#include <stdexcept>

namespace qmcnodes::kernels {

bool avx2_supported() {
#ifdef QMCNODES_HAVE_AVX2_BUILD
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {
Backend g_backend = avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported())
    throw std::runtime_error("AVX2 backend not supported on this CPU");
  g_backend = b;
}

void term_moments(const TermTable& t, const double* tables, int stride, Moments& out) {
#ifdef QMCNODES_HAVE_AVX2_BUILD
  if (g_backend == Backend::Avx2) {
    avx2::term_moments(t, tables, stride, out);
    return;
  }
#endif
  scalar::term_moments(t, tables, stride, out);
}

double term_sum(const TermTable& t, const double* tables, int stride) {
#ifdef QMCNODES_HAVE_AVX2_BUILD
  if (g_backend == Backend::Avx2) return avx2::term_sum(t, tables, stride);
#endif
  return scalar::term_sum(t, tables, stride);
}

double reduce_sum(const double* x, std::size_t n) {
#ifdef QMCNODES_HAVE_AVX2_BUILD
  if (g_backend == Backend::Avx2) return avx2::reduce_sum(x, n);
#endif
  return scalar::reduce_sum(x, n);
}

void mean_and_variance(const double* x, std::size_t n, double& mean, double& variance) {
#ifdef QMCNODES_HAVE_AVX2_BUILD
  if (g_backend == Backend::Avx2) {
    avx2::mean_and_variance(x, n, mean, variance);
    return;
  }
#endif
  scalar::mean_and_variance(x, n, mean, variance);
}

void halve_pairs(const double* x, std::size_t n, double* out) {
#ifdef QMCNODES_HAVE_AVX2_BUILD
  if (g_backend == Backend::Avx2) {
    avx2::halve_pairs(x, n, out);
    return;
  }
#endif
  scalar::halve_pairs(x, n, out);
}

}  // namespace qmcnodes::kernels
