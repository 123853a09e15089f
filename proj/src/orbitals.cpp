#include "qmcnodes/orbitals.hpp"

#include <cmath>
#include <stdexcept>

namespace qmcnodes {

SlaterOrbital SlaterOrbital::s1(double zeta) {
  if (zeta <= 0.0) throw std::invalid_argument("orbital exponent must be positive");
  return {OrbitalKind::S1, zeta, 0.0, 0.0};
}

SlaterOrbital SlaterOrbital::s2(double zeta, double q, double zeta_ref) {
  if (zeta <= 0.0 || zeta_ref <= 0.0)
    throw std::invalid_argument("orbital exponent must be positive");
  return {OrbitalKind::S2, zeta, q, zeta_ref};
}

SlaterOrbital SlaterOrbital::p2(int m, double zeta) {
  if (zeta <= 0.0) throw std::invalid_argument("orbital exponent must be positive");
  if (m < 0 || m > 2) throw std::invalid_argument("p-orbital component must be 0, 1 or 2");
  return {m == 0 ? OrbitalKind::P2x : (m == 1 ? OrbitalKind::P2y : OrbitalKind::P2z),
          zeta, 0.0, 0.0};
}

double ExpCache::get(double zeta) {
  for (int i = 0; i < count_; ++i)
    if (entries_[i].zeta == zeta) return entries_[i].value;
  const double v = std::exp(-zeta * r_);
  if (count_ < 6) entries_[count_++] = {zeta, v};
  return v;
}

double orbital_value(const SlaterOrbital& orb, const Vec3& pos, ExpCache& cache) {
  const double r = cache.r();
  switch (orb.kind) {
    case OrbitalKind::S1:
      return cache.get(orb.zeta);
    case OrbitalKind::S2:
      return r * cache.get(orb.zeta) - orb.q * cache.get(orb.zeta_ref);
    case OrbitalKind::P2x:
      return pos.x * cache.get(orb.zeta);
    case OrbitalKind::P2y:
      return pos.y * cache.get(orb.zeta);
    case OrbitalKind::P2z:
      return pos.z * cache.get(orb.zeta);
  }
  return 0.0;
}

OrbitalValue orbital_derivatives(const SlaterOrbital& orb, const Vec3& pos,
                                 ExpCache& cache) {
  const double r = cache.r();
  OrbitalValue out;
  switch (orb.kind) {
    case OrbitalKind::S1: {
      const double e = cache.get(orb.zeta);
      out.value = e;
      out.grad = pos * (-orb.zeta * e / r);
      out.lap = (orb.zeta * orb.zeta - 2.0 * orb.zeta / r) * e;
      return out;
    }
    case OrbitalKind::S2: {
      const double e = cache.get(orb.zeta);
      const double eb = cache.get(orb.zeta_ref);
      out.value = r * e - orb.q * eb;
      const double d1 = (1.0 - orb.zeta * r) * e + orb.q * orb.zeta_ref * eb;
      const double d2 =
          (orb.zeta * orb.zeta * r - 2.0 * orb.zeta) * e - orb.q * orb.zeta_ref * orb.zeta_ref * eb;
      out.grad = pos * (d1 / r);
      out.lap = d2 + 2.0 * d1 / r;
      return out;
    }
    case OrbitalKind::P2x:
    case OrbitalKind::P2y:
    case OrbitalKind::P2z: {
      const double e = cache.get(orb.zeta);
      const double m = orb.kind == OrbitalKind::P2x   ? pos.x
                       : orb.kind == OrbitalKind::P2y ? pos.y
                                                      : pos.z;
      out.value = m * e;
      // grad(m e) = e_m * e - zeta m e r_hat
      out.grad = pos * (-orb.zeta * m * e / r);
      if (orb.kind == OrbitalKind::P2x) out.grad.x += e;
      if (orb.kind == OrbitalKind::P2y) out.grad.y += e;
      if (orb.kind == OrbitalKind::P2z) out.grad.z += e;
      out.lap = m * e * (orb.zeta * orb.zeta - 4.0 * orb.zeta / r);
      return out;
    }
  }
  return out;
}

}  // namespace qmcnodes
