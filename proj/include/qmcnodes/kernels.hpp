#pragma once

// Data-parallel inner kernels with scalar reference implementations and an
// AVX2 variant selected at runtime.  The two backends are equivalence-tested
// against each other; everything above this layer is backend-agnostic.
//
// The workhorse is the weighted power-product moment sum used by the
// Hylleraas/polynomial evaluators: given terms t with coefficient c_t and
// integer powers p_t[v] over n_vars distance variables, and per-variable
// power tables T_v[p] = r_v^p,
//
//   s0       = sum_t c_t * prod_v T_v[p_t[v]]
//   s1[v]    = sum_t c_t * p_t[v] * prod_v ...
//   s2[v][w] = sum_t c_t * p_t[v] * p_t[w] * prod_v ...
//
// from which value, gradient and Hessian of the polynomial part follow.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace qmcnodes::kernels {

inline constexpr int kMaxVars = 6;

enum class Backend { Scalar, Avx2 };

bool avx2_supported();
Backend active_backend();
/// Override the dispatch (tests).  Throws if the backend is unavailable.
void set_backend(Backend b);

/// Term table in SoA layout, padded to the SIMD width with zero coefficients.
struct TermTable {
  int n_vars = 0;
  int n_terms = 0;
  int padded = 0;
  int max_power = 0;
  std::vector<double> coeff;          // [padded]
  std::vector<std::int32_t> powers;   // [n_vars * padded], variable-major

  std::int32_t power(int var, int term) const { return powers[var * padded + term]; }

  /// terms[t] = (coefficient, powers[0..n_vars)).
  static TermTable build(int n_vars,
                         const std::vector<std::pair<double, std::array<int, kMaxVars>>>& terms);
};

struct Moments {
  double s0 = 0.0;
  std::array<double, kMaxVars> s1{};
  std::array<double, kMaxVars * kMaxVars> s2{};  // symmetric, row-major

  double s2_at(int v, int w) const { return s2[v * kMaxVars + w]; }
};

/// Power tables T[v * stride + p] = r_v^p for p = 0..max_power.
void fill_power_tables(const double* r, int n_vars, int max_power, double* tables,
                       int stride);

/// Full moment sums (value + first/second power moments).
void term_moments(const TermTable& table, const double* tables, int stride,
                  Moments& out);

/// Value-only sum s0 (cheap path for sign queries and scans).
double term_sum(const TermTable& table, const double* tables, int stride);

/// sum_i x[i]
double reduce_sum(const double* x, std::size_t n);

/// Mean and (population) variance in one call; two-pass for accuracy.
void mean_and_variance(const double* x, std::size_t n, double& mean, double& variance);

/// out[i] = (x[2i] + x[2i+1]) / 2 for i in [0, n/2)
void halve_pairs(const double* x, std::size_t n, double* out);

// Raw backends, exposed for the equivalence tests.
namespace scalar {
void term_moments(const TermTable&, const double*, int, Moments&);
double term_sum(const TermTable&, const double*, int);
double reduce_sum(const double*, std::size_t);
void mean_and_variance(const double*, std::size_t, double&, double&);
void halve_pairs(const double*, std::size_t, double*);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define QMCNODES_HAVE_AVX2_BUILD 1
namespace avx2 {
void term_moments(const TermTable&, const double*, int, Moments&);
double term_sum(const TermTable&, const double*, int);
double reduce_sum(const double*, std::size_t);
void mean_and_variance(const double*, std::size_t, double&, double&);
void halve_pairs(const double*, std::size_t, double*);
}  // namespace avx2
#endif

}  // namespace qmcnodes::kernels
