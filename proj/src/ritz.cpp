#include "qmcnodes/ritz.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace qmcnodes {

namespace {

// W(a, b) = Int_0^inf dr1 r1^a e^{-beta r1} Int_0^r1 dr2 r2^b e^{-beta r2}
//         = (b! / beta^{b+1}) Sum_{k > b} (beta^k / k!) (a+k)! / (2 beta)^{a+k+1}
// All terms positive; the ratio of consecutive terms tends to 1/2.
class WTable {
 public:
  explicit WTable(double beta) : beta_(beta) {}

  double operator()(int a, int b) {
    const auto key = std::make_pair(a, b);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;

    const long double beta = beta_;
    // prefactor b! / beta^{b+1}
    long double pref = 1.0L;
    for (int i = 1; i <= b; ++i) pref *= i;
    pref /= std::pow(beta, static_cast<long double>(b + 1));

    // first series term, k = b + 1:
    //   (beta^k / k!) (a+k)! / (2 beta)^{a+k+1}
    const int k0 = b + 1;
    long double term = 1.0L;
    for (int i = k0 + 1; i <= a + k0; ++i) term *= i;  // (a+k0)! / k0!
    term *= std::pow(beta, static_cast<long double>(k0)) /
            std::pow(2.0L * beta, static_cast<long double>(a + k0 + 1));

    long double sum = 0.0L;
    for (int k = k0; ; ++k) {
      sum += term;
      if (term < 1e-24L * sum) break;
      // advance k -> k+1: factor beta (a+k+1) / ((k+1) 2 beta)
      term *= static_cast<long double>(a + k + 1) /
              (2.0L * static_cast<long double>(k + 1));
    }
    const double w = static_cast<double>(pref * sum);
    cache_.emplace(key, w);
    return w;
  }

 private:
  double beta_;
  std::map<std::pair<int, int>, double> cache_;
};

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// J(p, q, s): expand the u-integral [(r1+r2)^m - |r1-r2|^m] / m, m = s + 2;
// only odd binomial powers survive, split by the r1 <> r2 ordering.
double basis_integral(int p, int q, int s, WTable& w) {
  if (p < -1 || q < -1 || s < -1)
    throw std::invalid_argument("basis integral needs powers >= -1");
  const int m = s + 2;
  double sum = 0.0;
  for (int j = 1; j <= m; j += 2) {
    const double c = binomial(m, j);
    sum += c * (w(p + 1 + m - j, q + 1 + j) + w(q + 1 + m - j, p + 1 + j));
  }
  return 2.0 * sum / m;
}

// sparse polynomial in (r1, r2, u) with integer powers >= -1
struct TriPoly {
  std::map<std::tuple<int, int, int>, double> c;

  void add(int i, int j, int k, double v) {
    if (v == 0.0) return;
    c[{i, j, k}] += v;
  }
};

// action of H = -(lap1 + lap2)/2 - Z/r1 - Z/r2 + 1/u on
// r1^i r2^j u^k e^{-alpha (r1 + r2)}, divided by the exponential.
//
// lap1 f / e = P_r1r1 - 2a P_r1 + a^2 P + (2/r1)(P_r1 - a P)
//            + P_uu + (2/u) P_u
//            + ((r1^2 - r2^2 + u^2) / (r1 u)) (P_r1u - a P_u)
TriPoly apply_h(int i, int j, int k, double alpha, int z) {
  TriPoly out;
  const double a = alpha;

  // one electron's Laplacian; swap = true exchanges the roles of r1 and r2
  auto lap = [&](bool swap) {
    const int e = swap ? j : i;  // power of the differentiated radius
    const int o = swap ? i : j;  // spectator power
    auto add = [&](int de, int dk, double v) {
      // de, dk: power shifts of the differentiated radius and of u
      if (swap)
        out.add(o, e + de, k + dk, -0.5 * v);
      else
        out.add(e + de, o, k + dk, -0.5 * v);
    };
    add(-2, 0, static_cast<double>(e) * (e - 1) + 2.0 * e);  // P_rr + (2/r) P_r
    add(-1, 0, -2.0 * a * (e + 1));                          // -2a P_r - (2/r) a P
    add(0, 0, a * a);
    add(0, -2, static_cast<double>(k) * (k - 1) + 2.0 * k);  // P_uu + (2/u) P_u
    // cross term: ((r^2 - ro^2 + u^2) / (r u)) (P_ru - a P_u)
    // with P_ru = e k r^{e-1} u^{k-1}, P_u = k u^{k-1}
    const double ek = static_cast<double>(e) * k;
    if (ek != 0.0) {
      add(0, -2, ek);
      // -(ro^2/r) part flips to the spectator radius: handled below
      if (swap)
        out.add(o + 2, e - 2, k - 2, -0.5 * -ek);
      else
        out.add(e - 2, o + 2, k - 2, -0.5 * -ek);
      add(-2, 0, ek);
    }
    const double ak = -a * k;
    if (ak != 0.0) {
      add(1, -2, ak);
      if (swap)
        out.add(o + 2, e - 1, k - 2, -0.5 * -ak);
      else
        out.add(e - 1, o + 2, k - 2, -0.5 * -ak);
      add(-1, 0, ak);
    }
  };
  lap(false);
  lap(true);

  out.add(i - 1, j, k, -static_cast<double>(z));
  out.add(i, j - 1, k, -static_cast<double>(z));
  out.add(i, j, k - 1, 1.0);
  return out;
}

}  // namespace

double triplet_basis_integral(int p, int q, int s, double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  WTable w(2.0 * alpha);
  return basis_integral(p, q, s, w);
}

RitzResult ritz_he_triplet(const std::vector<TripletHylleraasTerm>& basis,
                           double alpha, int nuclear_charge) {
  if (basis.empty()) throw std::invalid_argument("empty basis");
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  for (const auto& t : basis)
    if (t.i == t.j)
      throw std::invalid_argument("basis term with i == j vanishes identically");

  const int n = static_cast<int>(basis.size());
  WTable w(2.0 * alpha);

  // each basis function = two signed monomials
  struct Mono {
    int i, j, k;
    double c;
  };
  std::vector<std::array<Mono, 2>> monos(n);
  for (int t = 0; t < n; ++t)
    monos[t] = {Mono{basis[t].i, basis[t].j, basis[t].k, 1.0},
                Mono{basis[t].j, basis[t].i, basis[t].k, -1.0}};

  Eigen::MatrixXd S(n, n), H(n, n);
  for (int mth = 0; mth < n; ++mth) {
    for (int nth = 0; nth < n; ++nth) {
      double s_el = 0.0, h_el = 0.0;
      for (const Mono& a : monos[mth]) {
        for (const Mono& b : monos[nth]) {
          s_el += a.c * b.c *
                  basis_integral(a.i + b.i, a.j + b.j, a.k + b.k, w);
          const TriPoly hb = apply_h(b.i, b.j, b.k, alpha, nuclear_charge);
          for (const auto& [pow3, coef] : hb.c) {
            const auto [bi, bj, bk] = pow3;
            h_el += a.c * b.c * coef *
                    basis_integral(a.i + bi, a.j + bj, a.k + bk, w);
          }
        }
      }
      S(mth, nth) = s_el;
      H(mth, nth) = h_el;
    }
  }
  // Hermitian up to roundoff; symmetrize before the solve
  H = 0.5 * (H + H.transpose()).eval();
  S = 0.5 * (S + S.transpose()).eval();

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(H, S);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("generalized eigensolve failed (singular overlap?)");

  RitzResult r;
  r.energy = es.eigenvalues()(0);
  r.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  Eigen::VectorXd c = es.eigenvectors().col(0);
  if (c(0) < 0.0) c = -c;
  r.coefficients.assign(c.data(), c.data() + n);
  return r;
}

}  // namespace qmcnodes
