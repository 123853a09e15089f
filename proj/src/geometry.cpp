#include "qmcnodes/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace qmcnodes {

namespace {
constexpr double kUnitAxisTol = 1e-12;
}

double Vec3::norm() const { return std::sqrt(norm2()); }

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return {x / n, y / n, z / n};
}

Vec3 rotate_about_axis(const Vec3& v, const Vec3& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > kUnitAxisTol)
    throw std::invalid_argument("rotation axis must have unit norm");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  // v cos + (k x v) sin + k (k.v)(1 - cos)
  const Vec3 kxv = axis.cross(v);
  const double kv = axis.dot(v);
  return v * c + kxv * s + axis * (kv * (1.0 - c));
}

ElectronConfiguration::ElectronConfiguration(std::vector<Vec3> positions,
                                             std::vector<Spin> spins,
                                             int nuclear_charge)
    : positions_(std::move(positions)), spins_(std::move(spins)), z_(nuclear_charge) {
  if (positions_.empty()) throw std::invalid_argument("configuration needs N >= 1 electrons");
  if (positions_.size() != spins_.size())
    throw std::invalid_argument("positions/spins size mismatch");
  for (const Vec3& p : positions_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw std::invalid_argument("non-finite electron coordinate");
  }
}

ElectronConfiguration ElectronConfiguration::with_positions(std::vector<Vec3> positions) const {
  return ElectronConfiguration(std::move(positions), spins_, z_);
}

std::vector<std::size_t> ElectronConfiguration::spin_indices(Spin s) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < spins_.size(); ++i)
    if (spins_[i] == s) idx.push_back(i);
  return idx;
}

DistanceTable interparticle_distances(const ElectronConfiguration& config) {
  const std::size_t n = config.size();
  DistanceTable t;
  t.r.resize(n);
  t.rij.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    t.r[i] = config.position(i).norm();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (config.position(i) - config.position(j)).norm();
      t.rij[i][j] = d;
      t.rij[j][i] = d;
    }
  }
  return t;
}

SpinPermutation::SpinPermutation(std::vector<std::size_t> mapping)
    : map_(std::move(mapping)) {
  const std::size_t n = map_.size();
  std::vector<bool> seen(n, false);
  for (std::size_t v : map_) {
    if (v >= n || seen[v]) throw std::invalid_argument("mapping is not a bijection");
    seen[v] = true;
  }
  // parity = (-1)^(n - #cycles)
  std::vector<bool> visited(n, false);
  std::size_t cycles = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (visited[i]) continue;
    ++cycles;
    for (std::size_t j = i; !visited[j]; j = map_[j]) visited[j] = true;
  }
  parity_ = ((n - cycles) % 2 == 0) ? +1 : -1;
}

SpinPermutation SpinPermutation::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = i;
  return SpinPermutation(std::move(m));
}

SpinPermutation SpinPermutation::transposition(std::size_t n, std::size_t i, std::size_t j) {
  if (i >= n || j >= n || i == j) throw std::invalid_argument("bad transposition");
  std::vector<std::size_t> m(n);
  for (std::size_t k = 0; k < n; ++k) m[k] = k;
  std::swap(m[i], m[j]);
  return SpinPermutation(std::move(m));
}

SpinPermutation SpinPermutation::compose(const SpinPermutation& then) const {
  if (size() != then.size()) throw std::invalid_argument("size mismatch in compose");
  std::vector<std::size_t> m(size());
  for (std::size_t i = 0; i < size(); ++i) m[i] = map_[then.map_[i]];
  return SpinPermutation(std::move(m));
}

bool SpinPermutation::spin_preserving(const ElectronConfiguration& config) const {
  if (size() != config.size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (config.spin(i) != config.spin(map_[i])) return false;
  return true;
}

ElectronConfiguration apply_permutation(const ElectronConfiguration& config,
                                        const SpinPermutation& perm) {
  if (!perm.spin_preserving(config))
    throw std::invalid_argument("permutation mixes spin labels");
  std::vector<Vec3> p(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) p[i] = config.position(perm(i));
  return config.with_positions(std::move(p));
}

ElectronConfiguration rotate_all(const ElectronConfiguration& config,
                                 const Vec3& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > kUnitAxisTol)
    throw std::invalid_argument("rotation axis must have unit norm");
  std::vector<Vec3> p(config.size());
  for (std::size_t i = 0; i < config.size(); ++i)
    p[i] = rotate_about_axis(config.position(i), axis, angle);
  return config.with_positions(std::move(p));
}

RotationPath::RotationPath(const Vec3& axis_, ElectronConfiguration start_,
                           double total_angle_)
    : axis(axis_), start(std::move(start_)), total_angle(total_angle_) {
  if (std::abs(axis.norm() - 1.0) > kUnitAxisTol)
    throw std::invalid_argument("rotation axis must have unit norm");
  if (total_angle < 0.0 || total_angle > M_PI + kUnitAxisTol)
    throw std::invalid_argument("total angle must lie in [0, pi]");
}

ElectronConfiguration RotationPath::at(double t) const {
  return rotate_all(start, axis, t * total_angle);
}

BeReferencePoint make_be_reference_point(const Vec3& r1, const Vec3& r3,
                                         int nuclear_charge) {
  if (r1.norm() == 0.0 || r3.norm() == 0.0)
    throw std::invalid_argument("reference point vectors must be nonzero");

  BeReferencePoint ref{
      ElectronConfiguration({r1, -r1, r3, -r3},
                            {Spin::Up, Spin::Up, Spin::Down, Spin::Down},
                            nuclear_charge),
      false, false, Vec3{}};

  const double scale = r1.norm() * r3.norm();
  ref.perpendicular = std::abs(r1.dot(r3)) <= 1e-12 * scale;

  const Vec3 cross = r1.cross(r3);
  ref.parallel = cross.norm() <= 1e-12 * scale;
  if (ref.parallel) {
    // Any axis perpendicular to r1 works; build one from the least-aligned
    // coordinate direction.
    const Vec3 u = r1.normalized();
    Vec3 seed = std::abs(u.x) <= std::abs(u.y) && std::abs(u.x) <= std::abs(u.z)
                    ? Vec3{1, 0, 0}
                    : (std::abs(u.y) <= std::abs(u.z) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    ref.axis = u.cross(seed).normalized();
  } else {
    ref.axis = cross.normalized();
  }
  return ref;
}

}  // namespace qmcnodes
