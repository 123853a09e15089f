#pragma once

// Nodal-region counting: spin-preserving permutation images of a reference
// point, sign-constant path search between same-sign images (the analytic
// pi-rotation where the reference has the (r1, -r1, r3, -r3) form, simulated
// annealing otherwise), and sampled tiling consistency checks.  Absence of a
// found path never proves disconnection; counts are upper bounds plus
// evidence.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qmcnodes/geometry.hpp"
#include "qmcnodes/wavefunction.hpp"

namespace qmcnodes {

// ---------------------------------------------------------------------------
// Reference points and path verdicts

/// A configuration defining "its" nodal region; usable only when the wave
/// function is decisively nonzero there.
struct ReferencePoint {
  ElectronConfiguration config;
  double value = 0.0;
  bool valid = false;  // |Psi| above the zero tolerance
};

ReferencePoint make_reference_point(const WaveFunction& wf,
                                    const ElectronConfiguration& config);

enum class PathOutcome { Connected, CrossedNode, Undetermined };

std::string to_string(PathOutcome outcome);

struct PathVerdict {
  PathOutcome outcome = PathOutcome::Undetermined;
  double crossing_t = -1.0;     // set when outcome == CrossedNode
  double min_abs_value = 0.0;   // minimum |Psi| over all path samples
  std::vector<ElectronConfiguration> samples;  // evidence waypoints
};

/// Sample Psi along the piecewise-linear path through `waypoints`:
/// Connected when every sample carries the first endpoint's sign and no
/// bisected crossing hides between consecutive samples; CrossedNode with the
/// first crossing parameter otherwise.
PathVerdict verify_linear_path(const WaveFunction& wf,
                               const std::vector<ElectronConfiguration>& waypoints,
                               int samples_per_segment = 8);

// ---------------------------------------------------------------------------
// The analytic rotation path

/// Rigid pi-rotation of R* = (r1, -r1, r3, -r3) about r1 x r3, which lands
/// exactly on the double pair exchange P12 P34 R*.  For an S-state function
/// the value must stay constant along the path (checked to 1e-10 relative;
/// violations throw std::logic_error).  An effectively-zero reference value
/// yields Undetermined — the path is still sampled so the verdict records
/// Psi = 0 throughout.
PathVerdict rotation_path_test(const WaveFunction& wf, const BeReferencePoint& reference,
                               int n_steps = 256);

// ---------------------------------------------------------------------------
// Stochastic sign-constant path search

struct StochasticSearchParams {
  int n_waypoints = 8;         // interior waypoints
  int samples_per_segment = 8; // objective sampling density
  int budget = 4000;           // waypoint perturbations
  double initial_step = 0.4;   // bohr, annealed downward
  std::uint64_t seed = 1;
};

/// Simulated-annealing search for a sign-constant piecewise-linear path from
/// a to b, maximizing the minimum signed value along the path.  Endpoints on
/// the node or of differing sign are rejected (std::invalid_argument).
/// Returns Connected with the found path, or Undetermined on budget
/// exhaustion (never a disconnection proof).
PathVerdict stochastic_path_search(const WaveFunction& wf, const ElectronConfiguration& a,
                                   const ElectronConfiguration& b,
                                   const StochasticSearchParams& params = {});

// ---------------------------------------------------------------------------
// Region counting over permutation images

/// All permutations mapping up slots to up slots and down slots to down
/// slots, in a deterministic (lexicographic) order starting from identity.
std::vector<SpinPermutation> spin_preserving_permutations(const std::vector<Spin>& layout);

struct PathStrategy {
  bool analytic_rotation = true;  // use the pi-rotation when the reference is R*-shaped
  int rotation_steps = 256;
  bool stochastic = true;         // fall back to annealing search
  StochasticSearchParams search;
};

struct ImageEvidence {
  std::vector<std::size_t> mapping;  // slot i receives the electron from mapping[i]
  int parity = 1;
  /// identity | rotation | stochastic | none (even images);
  /// opposite-sign (odd images, never candidates for direct connection)
  std::string method;
  bool connected = false;            // merged with the reference region
  PathVerdict verdict;
};

struct RegionCount {
  std::size_t upper_bound = 0;        // number of spin-preserving permutations
  std::size_t count = 0;              // regions remaining after merging, <= upper_bound
  bool negative_by_symmetry = false;  // negative-side merges mirror the positive ones
  std::vector<ImageEvidence> evidence;
};

/// Counts distinct nodal regions among the permutation images of the
/// reference: every even image connected to the reference merges with it,
/// and the odd images inherit the same merges by symmetry.  Throws
/// std::invalid_argument on an invalid reference.
RegionCount count_nodal_regions(const WaveFunction& wf, const ReferencePoint& reference,
                                const PathStrategy& strategy = {});

std::string region_count_to_json(const RegionCount& count);

// ---------------------------------------------------------------------------
// Tiling spot check

struct TilingReport {
  std::size_t pairs = 0;
  std::size_t connected = 0;
  double success_fraction = 0.0;
};

/// Draws reference pairs and checks each is reachable from some permutation
/// image of the other whose sign matches — a sampled, budgeted consistency
/// check of the tiling picture, not a proof.  Pair endpoints come from
/// `sampler` (resampled while effectively zero); per-pair search seeds
/// derive from params.seed, so results are worker-count independent.
TilingReport tiling_spot_check(const WaveFunction& wf, std::size_t n_pairs,
                               const std::function<ElectronConfiguration()>& sampler,
                               const StochasticSearchParams& params = {}, int workers = 1);

}  // namespace qmcnodes
