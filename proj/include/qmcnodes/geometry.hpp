#pragma once

// Electron configurations, distances, spin-preserving permutations and
// rigid rotations about the nucleus.  Atomic units (bohr) throughout;
// the nucleus is clamped at the origin with charge Z.

#include <array>
#include <cstddef>
#include <vector>

namespace qmcnodes {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm2() const { return dot(*this); }
  double norm() const;
  Vec3 normalized() const;  // throws on zero vector
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

enum class Spin { Up, Down };

/// Rotation by `angle` about the unit axis `axis` (Rodrigues form).
Vec3 rotate_about_axis(const Vec3& v, const Vec3& axis, double angle);

/// Point in R^3N: N electron positions with fixed spin labels, nucleus of
/// charge Z at the origin.  Immutable after construction.
class ElectronConfiguration {
 public:
  ElectronConfiguration(std::vector<Vec3> positions, std::vector<Spin> spins,
                        int nuclear_charge);

  std::size_t size() const { return positions_.size(); }
  const Vec3& position(std::size_t i) const { return positions_[i]; }
  const std::vector<Vec3>& positions() const { return positions_; }
  Spin spin(std::size_t i) const { return spins_[i]; }
  const std::vector<Spin>& spins() const { return spins_; }
  int nuclear_charge() const { return z_; }

  /// Same spins and Z, new positions.
  ElectronConfiguration with_positions(std::vector<Vec3> positions) const;

  /// Indices of up-spin (or down-spin) electrons, in slot order.
  std::vector<std::size_t> spin_indices(Spin s) const;

 private:
  std::vector<Vec3> positions_;
  std::vector<Spin> spins_;
  int z_;
};

/// Nucleus-electron distances r_i and electron-electron distances r_ij.
/// Symmetric; coincident particles give 0 (callers decide rejection).
struct DistanceTable {
  std::vector<double> r;                  // r[i] = |r_i|
  std::vector<std::vector<double>> rij;   // rij[i][j] = |r_i - r_j|

  double electron_nucleus(std::size_t i) const { return r[i]; }
  double electron_electron(std::size_t i, std::size_t j) const { return rij[i][j]; }
};

DistanceTable interparticle_distances(const ElectronConfiguration& config);

/// Bijection on electron indices that maps up-electrons to up-electrons and
/// down-electrons to down-electrons, with its sign.
class SpinPermutation {
 public:
  explicit SpinPermutation(std::vector<std::size_t> mapping);

  static SpinPermutation identity(std::size_t n);
  /// Transposition of slots i and j.
  static SpinPermutation transposition(std::size_t n, std::size_t i, std::size_t j);

  SpinPermutation compose(const SpinPermutation& then) const;

  std::size_t size() const { return map_.size(); }
  std::size_t operator()(std::size_t i) const { return map_[i]; }
  int parity() const { return parity_; }

  bool spin_preserving(const ElectronConfiguration& config) const;

 private:
  std::vector<std::size_t> map_;
  int parity_;
};

/// Positions permuted (slot i receives the electron previously at map(i)),
/// spins unchanged per slot.  Throws if the permutation mixes spins.
ElectronConfiguration apply_permutation(const ElectronConfiguration& config,
                                        const SpinPermutation& perm);

/// All electrons rotated by the same rotation about an axis through the
/// nucleus.  Preserves every r_i and r_ij.
ElectronConfiguration rotate_all(const ElectronConfiguration& config,
                                 const Vec3& axis, double angle);

/// Rigid rotation path R(t) = rotate(start, axis, t * total_angle), t in [0,1].
struct RotationPath {
  Vec3 axis;  // unit
  ElectronConfiguration start;
  double total_angle = 0.0;  // radians, [0, pi]

  RotationPath(const Vec3& axis_, ElectronConfiguration start_, double total_angle_);
  ElectronConfiguration at(double t) const;
};

/// Four-electron point R* = (r1, -r1, r3, -r3), up spins first.
/// `perpendicular` flags r1.r3 == 0 (invalid as a two-region reference);
/// `parallel` flags r1 x r3 == 0, in which case `axis` falls back to any
/// unit vector perpendicular to r1, otherwise axis = normalized(r1 x r3).
struct BeReferencePoint {
  ElectronConfiguration config;
  bool perpendicular = false;
  bool parallel = false;
  Vec3 axis;
};

BeReferencePoint make_be_reference_point(const Vec3& r1, const Vec3& r3,
                                         int nuclear_charge = 4);

}  // namespace qmcnodes
