#include "qmcnodes/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

#include "json.hpp"
#include "qmcnodes/parallel.hpp"

namespace qmcnodes {

namespace {

// Polynomial node functions count as zero when tiny relative to a same-units
// magnitude built from the distances entering them.
constexpr double kNodeZeroTol = 1e-12;

void check_node_layout(const NodeFunction& node, const ElectronConfiguration& config) {
  if (config.size() != node.electron_count() ||
      !std::equal(config.spins().begin(), config.spins().end(),
                  node.spin_layout().begin()))
    throw std::invalid_argument("configuration does not match the node's electron layout");
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

// ---------------------------------------------------------------------------
// Node functions

const std::vector<Spin>& ExactTripletNode::spin_layout() const {
  static const std::vector<Spin> layout{Spin::Up, Spin::Up};
  return layout;
}

double ExactTripletNode::value(const ElectronConfiguration& config) const {
  check_node_layout(*this, config);
  return config.position(0).norm() - config.position(1).norm();
}

double ExactTripletNode::zero_tolerance(const ElectronConfiguration& config) const {
  return kNodeZeroTol * (1.0 + config.position(0).norm() + config.position(1).norm());
}

const std::vector<Spin>& LiRHFNode::spin_layout() const {
  static const std::vector<Spin> layout{Spin::Up, Spin::Down, Spin::Up};
  return layout;
}

double LiRHFNode::value(const ElectronConfiguration& config) const {
  check_node_layout(*this, config);
  return config.position(0).norm() - config.position(2).norm();
}

double LiRHFNode::zero_tolerance(const ElectronConfiguration& config) const {
  return kNodeZeroTol * (1.0 + config.position(0).norm() + config.position(2).norm());
}

const std::vector<Spin>& ConjecturedBeNode::spin_layout() const {
  static const std::vector<Spin> layout{Spin::Up, Spin::Up, Spin::Down, Spin::Down};
  return layout;
}

double ConjecturedBeNode::value(const ElectronConfiguration& config) const {
  check_node_layout(*this, config);
  const double product = (config.position(0).norm() - config.position(1).norm()) *
                         (config.position(2).norm() - config.position(3).norm());
  if (a_ == 0.0) return product;  // keeps ProductNode bitwise identical
  const Vec3 r12 = config.position(0) - config.position(1);
  const Vec3 r34 = config.position(2) - config.position(3);
  return product + a_ * r12.dot(r34);
}

double ConjecturedBeNode::zero_tolerance(const ElectronConfiguration& config) const {
  const double pair_a = config.position(0).norm() + config.position(1).norm();
  const double pair_b = config.position(2).norm() + config.position(3).norm();
  const double dots = std::abs(a_) * (config.position(0) - config.position(1)).norm() *
                      (config.position(2) - config.position(3)).norm();
  return kNodeZeroTol * (1.0 + pair_a * pair_b + dots);
}

WaveFunctionSign::WaveFunctionSign(WaveFunctionPtr wf) : wf_(std::move(wf)) {
  if (!wf_) throw std::invalid_argument("WaveFunctionSign needs a wave function");
}

double WaveFunctionSign::value(const ElectronConfiguration& config) const {
  return evaluate(*wf_, config);
}

double WaveFunctionSign::zero_tolerance(const ElectronConfiguration& config) const {
  return 1e-10 * local_scale(*wf_, config);
}

int node_sign(const NodeFunction& node, const ElectronConfiguration& config) {
  const double v = node.value(config);
  if (std::abs(v) < node.zero_tolerance(config)) return 0;
  return v > 0.0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Crossing bisection

ElectronConfiguration interpolate_configurations(const ElectronConfiguration& a,
                                                 const ElectronConfiguration& b, double t) {
  if (a.size() != b.size() || a.spins() != b.spins() ||
      a.nuclear_charge() != b.nuclear_charge())
    throw std::invalid_argument("segment endpoints must share an electron layout");
  std::vector<Vec3> pos;
  pos.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    pos.push_back(a.position(i) + (b.position(i) - a.position(i)) * t);
  return a.with_positions(pos);
}

namespace {

/// Signed field plus its "on the node" test, so wave functions and node
/// functions share one bisection.
struct FieldView {
  std::function<double(const ElectronConfiguration&)> value;
  std::function<bool(const ElectronConfiguration&, double)> on_node;
};

std::optional<CrossingRecord> bisect_field(const FieldView& field,
                                           const ElectronConfiguration& a,
                                           const ElectronConfiguration& b, double tol_bohr) {
  if (tol_bohr <= 0.0) throw std::invalid_argument("bisection tolerance must be positive");
  interpolate_configurations(a, b, 0.0);  // layout compatibility check

  const double va = field.value(a), vb = field.value(b);
  if (field.on_node(a, va) || field.on_node(b, vb))
    throw std::domain_error("segment endpoint lies on the node");
  if (sign_of(va) == sign_of(vb)) return std::nullopt;

  double length2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    length2 += (b.position(i) - a.position(i)).norm2();
  const double length = std::sqrt(length2);

  double lo = 0.0, hi = 1.0;
  int lo_sign = sign_of(va);
  while ((hi - lo) * length > tol_bohr) {
    const double mid = 0.5 * (lo + hi);
    const double vm = field.value(interpolate_configurations(a, b, mid));
    if (vm == 0.0) {  // landed exactly on the node
      lo = hi = mid;
      break;
    }
    if (sign_of(vm) == lo_sign)
      lo = mid;
    else
      hi = mid;
  }

  CrossingRecord rec{a, b, 0.5 * (lo + hi), a, 0.0, {}};
  rec.crossing = interpolate_configurations(a, b, rec.t_star);
  rec.value_at_crossing = field.value(rec.crossing);
  return rec;
}

FieldView wavefunction_field(const WaveFunction& wf) {
  return {[&wf](const ElectronConfiguration& c) { return evaluate(wf, c); },
          [&wf](const ElectronConfiguration& c, double) { return is_effectively_zero(wf, c); }};
}

FieldView node_field(const NodeFunction& node) {
  return {[&node](const ElectronConfiguration& c) { return node.value(c); },
          [&node](const ElectronConfiguration& c, double v) {
            return std::abs(v) < node.zero_tolerance(c);
          }};
}

}  // namespace

std::optional<CrossingRecord> bisect_crossing(const WaveFunction& wf,
                                              const ElectronConfiguration& config_a,
                                              const ElectronConfiguration& config_b,
                                              double tol_bohr) {
  return bisect_field(wavefunction_field(wf), config_a, config_b, tol_bohr);
}

std::optional<CrossingRecord> bisect_crossing(const NodeFunction& node,
                                              const ElectronConfiguration& config_a,
                                              const ElectronConfiguration& config_b,
                                              double tol_bohr) {
  return bisect_field(node_field(node), config_a, config_b, tol_bohr);
}

// ---------------------------------------------------------------------------
// Cross-section scans

namespace {

Vec3 unit_ray(const Vec3& ray, const char* what) {
  const double n = ray.norm();
  if (n <= 0.0) throw std::invalid_argument(std::string(what) + " ray must be nonzero");
  return ray * (1.0 / n);
}

/// Symmetric axis values with an exact 0 at the midpoint for odd
/// resolutions, and v[k] == -v[res-1-k] bitwise.
std::vector<double> axis_values(double half_range, int resolution) {
  std::vector<double> v(resolution);
  const double step = 2.0 * half_range / (resolution - 1);
  for (int k = 0; k < resolution; ++k) v[k] = 0.5 * (2 * k - (resolution - 1)) * step;
  return v;
}

}  // namespace

void CrossSectionSpec::validate() const {
  if (resolution < 16) throw std::invalid_argument("scan resolution must be >= 16 per axis");
  if (!(t1_half_range > 0.0) || !(t2_half_range > 0.0))
    throw std::invalid_argument("scan ranges must be positive");
  if (nuclear_charge < 1) throw std::invalid_argument("nuclear charge must be >= 1");

  if (kind == Kind::FourElectronRadial) {
    if (rays.size() != 4)
      throw std::invalid_argument("four-electron scan needs four rays");
    for (const auto& r : rays) unit_ray(r, "scan");
    if (!(midpoint_a > 0.5 * t1_half_range) || !(midpoint_b > 0.5 * t2_half_range))
      throw std::invalid_argument("pair midpoints too small: radii would go negative");
    return;
  }

  if (rays.size() != 2) throw std::invalid_argument("two-electron scan needs two rays");
  const Vec3 u = unit_ray(rays[0], "scan");
  const Vec3 v = unit_ray(rays[1], "scan");
  const Vec3 w = v - u * v.dot(u);
  if (w.norm() < 1e-12)
    throw std::invalid_argument("two-electron scan rays must span a plane");
  if (!(midpoint_a > 0.5 * t1_half_range))
    throw std::invalid_argument("pair midpoint too small: radii would go negative");
  // triangle inequality |r1 - r2| < r12 < r1 + r2 across the whole grid
  if (!(pair_distance_center - t2_half_range > t1_half_range) ||
      !(pair_distance_center + t2_half_range < 2.0 * midpoint_a))
    throw std::invalid_argument("pair-distance range breaks the triangle inequality");
}

ElectronConfiguration CrossSectionSpec::configuration(double t1, double t2) const {
  if (kind == Kind::FourElectronRadial) {
    const std::vector<Vec3> pos{
        unit_ray(rays[0], "scan") * (midpoint_a + 0.5 * t1),
        unit_ray(rays[1], "scan") * (midpoint_a - 0.5 * t1),
        unit_ray(rays[2], "scan") * (midpoint_b + 0.5 * t2),
        unit_ray(rays[3], "scan") * (midpoint_b - 0.5 * t2),
    };
    return {pos, {Spin::Up, Spin::Up, Spin::Down, Spin::Down}, nuclear_charge};
  }

  const Vec3 u = unit_ray(rays[0], "scan");
  const Vec3 v = unit_ray(rays[1], "scan");
  const Vec3 w = (v - u * v.dot(u)).normalized();
  const double r1 = midpoint_a + 0.5 * t1, r2 = midpoint_a - 0.5 * t1;
  const double r12 = pair_distance_center + t2;
  const double cos_theta =
      std::clamp((r1 * r1 + r2 * r2 - r12 * r12) / (2.0 * r1 * r2), -1.0, 1.0);
  const double sin_theta = std::sqrt(1.0 - cos_theta * cos_theta);
  const std::vector<Vec3> pos{u * r1, (u * cos_theta + w * sin_theta) * r2};
  return {pos, {Spin::Up, Spin::Up}, nuclear_charge};
}

CrossSection scan_cross_section(const WaveFunction& wf, const CrossSectionSpec& spec,
                                int workers) {
  spec.validate();
  CrossSection grid;
  grid.spec = spec;
  grid.t1_values = axis_values(spec.t1_half_range, spec.resolution);
  grid.t2_values = axis_values(spec.t2_half_range, spec.resolution);
  const std::size_t res = spec.resolution;
  grid.points.resize(res * res);

  parallel_for(res, workers, [&](std::size_t i1) {  // one grid row per task
    const double t1 = grid.t1_values[i1];
    for (std::size_t i2 = 0; i2 < res; ++i2) {
      const double t2 = grid.t2_values[i2];
      const ElectronConfiguration c = spec.configuration(t1, t2);
      const double v = evaluate(wf, c);
      const int s = is_effectively_zero(wf, c) ? 0 : sign_of(v);
      grid.points[i1 * res + i2] = {t1, t2, s, v};
    }
  });
  return grid;
}

void write_cross_section_csv(std::ostream& out, const CrossSection& grid) {
  out << "t1,t2,sign,value\n";
  char line[128];
  for (const auto& p : grid.points) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%d,%.17g\n", p.t1, p.t2, p.sign, p.value);
    out << line;
  }
}

// ---------------------------------------------------------------------------
// Factorization positivity

PositivityReport factorization_positivity(const WaveFunction& wf, const NodeFunction& node,
                                          std::size_t n_samples,
                                          const std::function<ElectronConfiguration()>& sampler) {
  if (wf.electron_count() != node.electron_count() || wf.spin_layout() != node.spin_layout())
    throw std::invalid_argument("wave function and node describe different systems");

  PositivityReport report;
  for (std::size_t draw = 0; draw < n_samples; ++draw) {
    const ElectronConfiguration c = sampler();
    const double psi = evaluate(wf, c);
    if (is_effectively_zero(wf, c)) continue;
    const double nv = node.value(c);
    if (std::abs(nv) < node.zero_tolerance(c)) continue;
    const double ratio = psi / nv;
    ++report.samples;
    if (ratio > 0.0)
      ++report.positive;
    else
      report.worst_violation = std::min(report.worst_violation, ratio);
  }
  report.fraction =
      report.samples ? static_cast<double>(report.positive) / report.samples : 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Crossing coincidence

CoincidenceReport crossing_coincidence(const WaveFunction& wf, const NodeFunction& node,
                                       const std::vector<ElectronConfiguration>& walk,
                                       double radius, int workers) {
  if (wf.electron_count() != node.electron_count() || wf.spin_layout() != node.spin_layout())
    throw std::invalid_argument("wave function and node describe different systems");
  if (!(radius > 0.0)) throw std::invalid_argument("coincidence radius must be positive");

  CoincidenceReport report;
  if (walk.size() < 2) return report;
  const std::size_t n_segments = walk.size() - 1;
  report.segments = n_segments;

  // examined independently per segment, reduced in walk order
  std::vector<std::unique_ptr<CrossingRecord>> found(n_segments);
  std::vector<char> is_coincident(n_segments, 0);

  parallel_for(n_segments, workers, [&](std::size_t s) {
    const ElectronConfiguration& a = walk[s];
    const ElectronConfiguration& b = walk[s + 1];
    const double va = evaluate(wf, a), vb = evaluate(wf, b);
    if (sign_of(va) == sign_of(vb)) return;
    if (is_effectively_zero(wf, a) || is_effectively_zero(wf, b)) return;

    auto rec = bisect_crossing(wf, a, b);
    bool coincident = false;
    const int na = node_sign(node, a), nb = node_sign(node, b);
    if (na != 0 && nb != 0 && na != nb) {
      const auto node_rec = bisect_crossing(node, a, b);
      const double gap =
          std::abs(node.value(rec->crossing) - node.value(node_rec->crossing));
      coincident = gap < radius;
    }
    rec->coincidence.emplace_back(node.name(), coincident);
    found[s] = std::make_unique<CrossingRecord>(std::move(*rec));
    is_coincident[s] = coincident ? 1 : 0;
  });

  for (std::size_t s = 0; s < n_segments; ++s) {
    if (!found[s]) continue;
    ++report.total;
    if (is_coincident[s]) {
      ++report.coincident;
    } else {
      ++report.non_coincident;
      report.non_coincident_records.push_back(std::move(*found[s]));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON-lines crossing reports

namespace {

nlohmann::json positions_json(const ElectronConfiguration& c) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3& p = c.position(i);
    arr.push_back({p.x, p.y, p.z});
  }
  return arr;
}

}  // namespace

void write_crossing_records(std::ostream& out, const std::vector<CrossingRecord>& records) {
  for (const auto& rec : records) {
    std::string spins;
    for (Spin s : rec.crossing.spins()) spins += (s == Spin::Up ? 'U' : 'D');
    nlohmann::json coincidence = nlohmann::json::object();
    for (const auto& [name, flag] : rec.coincidence) coincidence[name] = flag;
    const nlohmann::json line{{"t_star", rec.t_star},
                              {"value_at_crossing", rec.value_at_crossing},
                              {"endpoint_a", positions_json(rec.endpoint_a)},
                              {"endpoint_b", positions_json(rec.endpoint_b)},
                              {"crossing", positions_json(rec.crossing)},
                              {"spins", spins},
                              {"nuclear_charge", rec.crossing.nuclear_charge()},
                              {"coincidence", coincidence}};
    out << line.dump() << "\n";
  }
}

}  // namespace qmcnodes
