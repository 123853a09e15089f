#pragma once

// Slater-type orbitals on a nucleus at the origin.
//
//   1s   : exp(-zeta r)
//   2s   : r exp(-zeta r) - q exp(-zeta_ref r)
//   2p_m : m exp(-zeta r),  m in {x, y, z}
//
// The 2s form is an r-weighted STO minus a 1s-like part; with zeta_ref tied
// to the paired 1s exponent and zeta <= zeta_ref, the ratio 2s(r)/1s(r) is
// strictly monotone, which pins the determinant node to r_i = r_j.

#include "qmcnodes/geometry.hpp"

namespace qmcnodes {

enum class OrbitalKind { S1, S2, P2x, P2y, P2z };

struct SlaterOrbital {
  OrbitalKind kind = OrbitalKind::S1;
  double zeta = 1.0;
  double q = 0.0;         // 2s only
  double zeta_ref = 0.0;  // 2s only

  static SlaterOrbital s1(double zeta);
  static SlaterOrbital s2(double zeta, double q, double zeta_ref);
  static SlaterOrbital p2(int m, double zeta);  // m: 0=x, 1=y, 2=z

  bool operator==(const SlaterOrbital&) const = default;
};

struct OrbitalValue {
  double value = 0.0;
  Vec3 grad;
  double lap = 0.0;
};

/// Small per-electron cache of exp(-zeta * r) shared between orbitals.
class ExpCache {
 public:
  explicit ExpCache(double r) : r_(r) {}
  double get(double zeta);
  double r() const { return r_; }

 private:
  double r_;
  struct Entry { double zeta, value; };
  Entry entries_[6];
  int count_ = 0;
};

double orbital_value(const SlaterOrbital& orb, const Vec3& pos, ExpCache& cache);
OrbitalValue orbital_derivatives(const SlaterOrbital& orb, const Vec3& pos, ExpCache& cache);

}  // namespace qmcnodes
