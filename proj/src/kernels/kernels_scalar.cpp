#include "qmcnodes/kernels.hpp"

#include <stdexcept>

namespace qmcnodes::kernels {

TermTable TermTable::build(
    int n_vars, const std::vector<std::pair<double, std::array<int, kMaxVars>>>& terms) {
  if (n_vars < 1 || n_vars > kMaxVars) throw std::invalid_argument("bad n_vars");
  TermTable t;
  t.n_vars = n_vars;
  t.n_terms = static_cast<int>(terms.size());
  t.padded = (t.n_terms + 3) & ~3;
  if (t.padded == 0) t.padded = 4;
  t.coeff.assign(t.padded, 0.0);
  t.powers.assign(static_cast<std::size_t>(n_vars) * t.padded, 0);
  for (int i = 0; i < t.n_terms; ++i) {
    t.coeff[i] = terms[i].first;
    for (int v = 0; v < n_vars; ++v) {
      const int p = terms[i].second[v];
      if (p < 0) throw std::invalid_argument("negative power in term table");
      t.powers[static_cast<std::size_t>(v) * t.padded + i] = p;
      if (p > t.max_power) t.max_power = p;
    }
  }
  return t;
}

void fill_power_tables(const double* r, int n_vars, int max_power, double* tables,
                       int stride) {
  for (int v = 0; v < n_vars; ++v) {
    double* tv = tables + static_cast<std::size_t>(v) * stride;
    tv[0] = 1.0;
    for (int p = 1; p <= max_power; ++p) tv[p] = tv[p - 1] * r[v];
  }
}

namespace scalar {

void term_moments(const TermTable& t, const double* tables, int stride, Moments& out) {
  out = Moments{};
  const int nv = t.n_vars;
  for (int i = 0; i < t.n_terms; ++i) {
    double val = t.coeff[i];
    for (int v = 0; v < nv; ++v)
      val *= tables[static_cast<std::size_t>(v) * stride + t.power(v, i)];
    out.s0 += val;
    for (int v = 0; v < nv; ++v) {
      const double pv = static_cast<double>(t.power(v, i));
      const double pval = pv * val;
      out.s1[v] += pval;
      for (int w = 0; w <= v; ++w)
        out.s2[v * kMaxVars + w] += static_cast<double>(t.power(w, i)) * pval;
    }
  }
  // mirror the lower triangle
  for (int v = 0; v < nv; ++v)
    for (int w = v + 1; w < nv; ++w) out.s2[v * kMaxVars + w] = out.s2[w * kMaxVars + v];
}

double term_sum(const TermTable& t, const double* tables, int stride) {
  double s = 0.0;
  for (int i = 0; i < t.n_terms; ++i) {
    double val = t.coeff[i];
    for (int v = 0; v < t.n_vars; ++v)
      val *= tables[static_cast<std::size_t>(v) * stride + t.power(v, i)];
    s += val;
  }
  return s;
}

double reduce_sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

void mean_and_variance(const double* x, std::size_t n, double& mean, double& variance) {
  if (n == 0) {
    mean = 0.0;
    variance = 0.0;
    return;
  }
  mean = reduce_sum(x, n) / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - mean;
    ss += d * d;
  }
  variance = ss / static_cast<double>(n);
}

void halve_pairs(const double* x, std::size_t n, double* out) {
  const std::size_t h = n / 2;
  for (std::size_t i = 0; i < h; ++i) out[i] = 0.5 * (x[2 * i] + x[2 * i + 1]);
}

}  // namespace scalar
}  // namespace qmcnodes::kernels
