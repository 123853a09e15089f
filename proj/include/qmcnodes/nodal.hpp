#pragma once

// Node functions and everything that probes them: sign queries, crossing
// bisection along straight segments, 2-D cross-section scans, factorization
// positivity checks, and crossing-coincidence statistics over random walks.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qmcnodes/geometry.hpp"
#include "qmcnodes/wavefunction.hpp"

namespace qmcnodes {

// ---------------------------------------------------------------------------
// Node functions

/// Explicit candidate description of a nodal surface: a cheap scalar whose
/// zero set is the proposed node.  Antisymmetric under the like-spin
/// exchanges it models, symmetric under everything else.
class NodeFunction {
 public:
  virtual ~NodeFunction() = default;

  virtual std::size_t electron_count() const = 0;
  virtual const std::vector<Spin>& spin_layout() const = 0;
  virtual std::string name() const = 0;

  /// Scalar whose sign labels the region; throws std::invalid_argument on a
  /// layout mismatch.
  virtual double value(const ElectronConfiguration& config) const = 0;

  /// Magnitude below which `v` counts as "on the node" at this config.
  virtual double zero_tolerance(const ElectronConfiguration& config) const = 0;
};

using NodeFunctionPtr = std::shared_ptr<const NodeFunction>;

/// He triplet: r1 - r2 on the like-spin pair (layout up, up).
class ExactTripletNode : public NodeFunction {
 public:
  std::size_t electron_count() const override { return 2; }
  const std::vector<Spin>& spin_layout() const override;
  std::string name() const override { return "exact_triplet"; }
  double value(const ElectronConfiguration& config) const override;
  double zero_tolerance(const ElectronConfiguration& config) const override;
};

/// Li ground state, RHF node: r1 - r3 on the up-spin pair (layout up, down, up).
class LiRHFNode : public NodeFunction {
 public:
  std::size_t electron_count() const override { return 3; }
  const std::vector<Spin>& spin_layout() const override;
  std::string name() const override { return "li_rhf"; }
  double value(const ElectronConfiguration& config) const override;
  double zero_tolerance(const ElectronConfiguration& config) const override;
};

/// Be with one amplitude term: (r1-r2)(r3-r4) + a r12.r34 (vector dot),
/// layout up, up, down, down.  a = 0 reproduces the plain product bitwise.
class ConjecturedBeNode : public NodeFunction {
 public:
  explicit ConjecturedBeNode(double a) : a_(a) {}

  double a() const { return a_; }
  std::size_t electron_count() const override { return 4; }
  const std::vector<Spin>& spin_layout() const override;
  std::string name() const override { return "conjectured_be"; }
  double value(const ElectronConfiguration& config) const override;
  double zero_tolerance(const ElectronConfiguration& config) const override;

 private:
  double a_;
};

/// Be HF node: (r1-r2)(r3-r4), layout up, up, down, down.
class ProductNode : public ConjecturedBeNode {
 public:
  ProductNode() : ConjecturedBeNode(0.0) {}
  std::string name() const override { return "product"; }
};

/// The node of an attached trial function, probed through its sign.
class WaveFunctionSign : public NodeFunction {
 public:
  explicit WaveFunctionSign(WaveFunctionPtr wf);

  const WaveFunction& wavefunction() const { return *wf_; }
  std::size_t electron_count() const override { return wf_->electron_count(); }
  const std::vector<Spin>& spin_layout() const override { return wf_->spin_layout(); }
  std::string name() const override { return "wavefunction_sign"; }
  double value(const ElectronConfiguration& config) const override;
  double zero_tolerance(const ElectronConfiguration& config) const override;

 private:
  WaveFunctionPtr wf_;
};

/// +1 / -1 by the sign of node.value, 0 when |value| < node.zero_tolerance.
int node_sign(const NodeFunction& node, const ElectronConfiguration& config);

// ---------------------------------------------------------------------------
// Crossing bisection

/// A sign change of some field (wave function or node function) along the
/// straight segment between two configurations.
struct CrossingRecord {
  ElectronConfiguration endpoint_a, endpoint_b;
  double t_star = 0.0;              // in (0, 1) along the segment
  ElectronConfiguration crossing;   // configuration at t_star
  double value_at_crossing = 0.0;   // field value there (tiny by construction)
  /// Per-node-function coincidence flags filled by crossing_coincidence.
  std::vector<std::pair<std::string, bool>> coincidence;
};

/// Configuration interpolated linearly between two endpoints of identical
/// layout; t = 0 gives a, t = 1 gives b.
ElectronConfiguration interpolate_configurations(const ElectronConfiguration& a,
                                                 const ElectronConfiguration& b, double t);

/// Locate the sign change of Psi (or of a node function) between config_a
/// and config_b by bisection, to within tol_bohr along the segment.  Returns
/// none when the endpoint signs agree (even-crossing segments go undetected;
/// keep segments short).  Throws std::domain_error when an endpoint lies on
/// the node.
std::optional<CrossingRecord> bisect_crossing(const WaveFunction& wf,
                                              const ElectronConfiguration& config_a,
                                              const ElectronConfiguration& config_b,
                                              double tol_bohr = 1e-10);
std::optional<CrossingRecord> bisect_crossing(const NodeFunction& node,
                                              const ElectronConfiguration& config_a,
                                              const ElectronConfiguration& config_b,
                                              double tol_bohr = 1e-10);

// ---------------------------------------------------------------------------
// Cross-section scans

/// 2-D slice through configuration space.  Electrons sit on fixed rays from
/// the nucleus; the scan axes move radial pairs symmetrically about chosen
/// midpoint radii.  Rays are normalized internally (zero rays rejected).
struct CrossSectionSpec {
  enum class Kind {
    /// Four electrons (up, up, down, down): t1 = r1 - r2 about midpoint_a
    /// along rays[0], rays[1]; t2 = r3 - r4 about midpoint_b along rays[2],
    /// rays[3].
    FourElectronRadial,
    /// Two like-spin electrons: t1 = r1 - r2 about midpoint_a; the second
    /// axis is the pair distance r12 = pair_distance_center + t2, electron 2
    /// placed in the rays[0]-rays[1] plane at the matching angle.
    TwoElectronPairDistance,
  };

  Kind kind = Kind::FourElectronRadial;
  std::vector<Vec3> rays;             // 4 rays (four-electron) or 2 (two-electron)
  double midpoint_a = 1.0;            // bohr
  double midpoint_b = 1.0;            // four-electron only
  double pair_distance_center = 0.0;  // two-electron only
  double t1_half_range = 1.0;         // axes span [-half_range, +half_range]
  double t2_half_range = 1.0;
  int resolution = 33;                // grid points per axis, >= 16
  int nuclear_charge = 4;

  /// Throws std::invalid_argument when ranges, radii, resolution or rays are
  /// unusable (radii must stay positive; the two-electron triangle
  /// inequality must hold across the whole grid).
  void validate() const;

  /// Configuration at scan coordinates (t1, t2); assumes validate() passed.
  ElectronConfiguration configuration(double t1, double t2) const;
};

struct CrossSectionPoint {
  double t1 = 0.0, t2 = 0.0;
  int sign = 0;       // node_sign semantics: 0 when |Psi| is effectively zero
  double value = 0.0;
};

/// Row-major grid: points[i1 * resolution + i2] belongs to
/// (t1_values[i1], t2_values[i2]).  Axis values are symmetric about 0 and
/// contain an exact 0 when the resolution is odd.
struct CrossSection {
  CrossSectionSpec spec;
  std::vector<double> t1_values, t2_values;
  std::vector<CrossSectionPoint> points;
};

CrossSection scan_cross_section(const WaveFunction& wf, const CrossSectionSpec& spec,
                                int workers = 1);

/// CSV with header `t1,t2,sign,value`, row-major, 17 significant digits.
void write_cross_section_csv(std::ostream& out, const CrossSection& grid);

// ---------------------------------------------------------------------------
// Factorization positivity

/// How well |Psi| factorizes as (node sign) * positive remainder: the
/// fraction of sampled configurations with Psi / N > 0.
struct PositivityReport {
  std::size_t samples = 0;    // samples with both Psi and N away from zero
  std::size_t positive = 0;   // of those, how many had Psi / N > 0
  double fraction = 0.0;      // positive / samples
  double worst_violation = 0.0;  // most negative Psi / N seen (0 when none)
};

/// Draws n_samples configurations from `sampler`, skipping any where either
/// factor is effectively zero.
PositivityReport factorization_positivity(const WaveFunction& wf, const NodeFunction& node,
                                          std::size_t n_samples,
                                          const std::function<ElectronConfiguration()>& sampler);

// ---------------------------------------------------------------------------
// Crossing coincidence

/// Crossing statistics of a wave function against a candidate node over an
/// ordered walk: a wf crossing on a segment is "coincident" when the node
/// sign also flips there and the two bisected crossing points agree in the
/// node coordinate to within `radius` (for the Li node, bohr in |r1 - r3|).
struct CoincidenceReport {
  std::size_t segments = 0;     // consecutive-sample segments examined
  std::size_t total = 0;        // wf crossings found
  std::size_t coincident = 0;
  std::size_t non_coincident = 0;
  std::vector<CrossingRecord> non_coincident_records;
};

CoincidenceReport crossing_coincidence(const WaveFunction& wf, const NodeFunction& node,
                                       const std::vector<ElectronConfiguration>& walk,
                                       double radius = 1e-3, int workers = 1);

/// One JSON object per record per line.
void write_crossing_records(std::ostream& out, const std::vector<CrossingRecord>& records);

}  // namespace qmcnodes
