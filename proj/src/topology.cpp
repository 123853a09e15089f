#include "qmcnodes/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "qmcnodes/nodal.hpp"
#include "qmcnodes/parallel.hpp"
#include "qmcnodes/rng.hpp"

namespace qmcnodes {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

// ---------------------------------------------------------------------------
// Reference points and path verdicts

ReferencePoint make_reference_point(const WaveFunction& wf,
                                    const ElectronConfiguration& config) {
  ReferencePoint ref{config, evaluate(wf, config), false};
  ref.valid = !is_effectively_zero(wf, config);
  return ref;
}

std::string to_string(PathOutcome outcome) {
  switch (outcome) {
    case PathOutcome::Connected: return "connected";
    case PathOutcome::CrossedNode: return "crossed_node";
    default: return "undetermined";
  }
}

namespace {

/// Drills into a same-sign sample gap: a zero can hide between two samples
/// only while min|Psi| <= 2 * slope * width (first-order exclusion), since a
/// narrower excursion would need a steeper slope than the interval exhibits.
/// Returns the parameter of a found crossing / node touch, nullopt when the
/// gap is provably clear.  Intervals still suspect at the depth cap count as
/// node touches -- the conservative answer for a connection claim.
class GapProbe {
 public:
  GapProbe(const WaveFunction& wf,
           std::function<ElectronConfiguration(double)> config_at, int path_sign,
           double value_scale, double& min_abs)
      : wf_(wf), config_at_(std::move(config_at)), sign_(path_sign),
        scale_(value_scale), min_abs_(min_abs) {}

  std::optional<double> check(double tl, double vl, double tr, double vr,
                              int depth = 0) {
    const double tm = 0.5 * (tl + tr);
    if (!(tm > tl && tm < tr)) return std::nullopt;  // parameter resolution floor
    const ElectronConfiguration cm = config_at_(tm);
    const double vm = evaluate(wf_, cm);
    min_abs_ = std::min(min_abs_, std::abs(vm));
    if (vm == 0.0 || sign_of(vm) != sign_) return tm;
    if (std::abs(vm) < 1e-6 * scale_ && is_effectively_zero(wf_, cm)) return tm;
    const double slope =
        std::max(std::abs(vm - vl), std::abs(vr - vm)) / (0.5 * (tr - tl));
    const double floor_v = std::min({std::abs(vl), std::abs(vm), std::abs(vr)});
    if (floor_v > 2.0 * slope * (tr - tl)) return std::nullopt;
    if (depth >= kMaxDepth) return tm;  // pinched toward the node
    if (auto hit = check(tl, vl, tm, vm, depth + 1)) return hit;
    return check(tm, vm, tr, vr, depth + 1);
  }

 private:
  static constexpr int kMaxDepth = 48;
  const WaveFunction& wf_;
  std::function<ElectronConfiguration(double)> config_at_;
  int sign_;
  double scale_;
  double& min_abs_;
};

}  // namespace

PathVerdict verify_linear_path(const WaveFunction& wf,
                               const std::vector<ElectronConfiguration>& waypoints,
                               int samples_per_segment) {
  if (waypoints.empty()) throw std::invalid_argument("path needs at least one waypoint");
  if (samples_per_segment < 1)
    throw std::invalid_argument("samples_per_segment must be >= 1");

  PathVerdict verdict;
  verdict.samples = waypoints;
  verdict.min_abs_value = std::abs(evaluate(wf, waypoints.front()));

  if (waypoints.size() == 1) {
    verdict.outcome = is_effectively_zero(wf, waypoints.front())
                          ? PathOutcome::CrossedNode
                          : PathOutcome::Connected;
    if (verdict.outcome == PathOutcome::CrossedNode) verdict.crossing_t = 0.0;
    return verdict;
  }

  // pass 1: sample the whole path, catching sign flips and exact zeros
  struct Sample {
    double t, v;
    ElectronConfiguration config;
  };
  const std::size_t n_segments = waypoints.size() - 1;
  std::vector<Sample> samples;
  samples.reserve(n_segments * samples_per_segment + 1);
  int path_sign = 0;
  double running_scale = 0.0;
  for (std::size_t seg = 0; seg < n_segments; ++seg) {
    for (int i = (seg == 0 ? 0 : 1); i <= samples_per_segment; ++i) {
      const double local = static_cast<double>(i) / samples_per_segment;
      const double t = (seg + local) / n_segments;
      ElectronConfiguration c =
          interpolate_configurations(waypoints[seg], waypoints[seg + 1], local);
      const double v = evaluate(wf, c);
      verdict.min_abs_value = std::min(verdict.min_abs_value, std::abs(v));
      // roundoff-sized values carry no usable sign; settle them as on-node
      // before they can feed the flip detector
      if (v == 0.0 || (std::abs(v) < 1e-6 * running_scale &&
                       is_effectively_zero(wf, c))) {
        verdict.outcome = PathOutcome::CrossedNode;
        verdict.crossing_t = t;
        return verdict;
      }
      running_scale = std::max(running_scale, std::abs(v));
      const int s = sign_of(v);
      if (path_sign == 0) {
        path_sign = s;
      } else if (s != path_sign) {
        const auto& prev = samples.back();
        verdict.outcome = PathOutcome::CrossedNode;
        verdict.crossing_t = t;
        try {
          if (const auto rec = bisect_crossing(wf, prev.config, c))
            verdict.crossing_t = prev.t + (t - prev.t) * rec->t_star;
        } catch (const std::domain_error&) {
          // an endpoint too close to the node for bisection: the flip
          // itself already decides the outcome
        }
        return verdict;
      }
      samples.push_back({t, v, std::move(c)});
    }
  }

  // pass 2: decisively-small samples get the full on-node check
  double value_scale = 0.0;
  for (const auto& s : samples) value_scale = std::max(value_scale, std::abs(s.v));
  for (const auto& s : samples) {
    if (std::abs(s.v) < 1e-6 * value_scale && is_effectively_zero(wf, s.config)) {
      verdict.outcome = PathOutcome::CrossedNode;
      verdict.crossing_t = s.t;
      return verdict;
    }
  }

  // pass 3: rule out narrow excursions hiding between samples
  const auto config_at = [&](double t) {
    const double scaled = t * n_segments;
    const auto seg = std::min<std::size_t>(n_segments - 1,
                                           static_cast<std::size_t>(scaled));
    return interpolate_configurations(waypoints[seg], waypoints[seg + 1],
                                      scaled - seg);
  };
  GapProbe probe(wf, config_at, path_sign, value_scale, verdict.min_abs_value);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (auto hit = probe.check(samples[i].t, samples[i].v, samples[i + 1].t,
                               samples[i + 1].v)) {
      verdict.outcome = PathOutcome::CrossedNode;
      verdict.crossing_t = *hit;
      return verdict;
    }
  }

  verdict.outcome = PathOutcome::Connected;
  return verdict;
}

// ---------------------------------------------------------------------------
// The analytic rotation path

PathVerdict rotation_path_test(const WaveFunction& wf, const BeReferencePoint& reference,
                               int n_steps) {
  if (wf.electron_count() != 4 || !wf.s_state())
    throw std::invalid_argument("rotation path test needs a 4-electron S-state function");
  if (n_steps < 2) throw std::invalid_argument("rotation path needs n_steps >= 2");

  const RotationPath path(reference.axis, reference.config, M_PI);

  // pure geometry: the endpoint must be the double pair exchange of R*
  const SpinPermutation double_exchange({1, 0, 3, 2});
  const ElectronConfiguration target =
      apply_permutation(reference.config, double_exchange);
  const ElectronConfiguration endpoint = path.at(1.0);
  for (std::size_t i = 0; i < 4; ++i) {
    const Vec3 d = endpoint.position(i) - target.position(i);
    if (std::abs(d.x) > 1e-10 || std::abs(d.y) > 1e-10 || std::abs(d.z) > 1e-10)
      throw std::logic_error("rotation path endpoint missed the pair exchange image");
  }

  const double v0 = evaluate(wf, reference.config);
  const bool valid = !is_effectively_zero(wf, reference.config);

  PathVerdict verdict;
  verdict.min_abs_value = std::abs(v0);
  const int stride = std::max(1, n_steps / 16);
  for (int k = 0; k <= n_steps; ++k) {
    const double t = static_cast<double>(k) / n_steps;
    const ElectronConfiguration c = path.at(t);
    const double v = evaluate(wf, c);
    verdict.min_abs_value = std::min(verdict.min_abs_value, std::abs(v));
    if (valid && std::abs(v - v0) > 1e-10 * std::abs(v0))
      throw std::logic_error("S-state value drifted along a rigid rotation path");
    if (k % stride == 0 || k == n_steps) verdict.samples.push_back(c);
  }
  verdict.outcome = valid ? PathOutcome::Connected : PathOutcome::Undetermined;
  return verdict;
}

// ---------------------------------------------------------------------------
// Stochastic sign-constant path search

namespace {

/// Piecewise-linear path held as per-waypoint position sets (spins fixed).
struct PathState {
  std::vector<std::vector<Vec3>> waypoints;  // including both endpoints
  std::vector<double> segment_signed_min;    // per segment, of sign0 * Psi
  std::vector<double> segment_abs_min;
  double signed_min = 0.0;

  double refresh_totals() {
    signed_min = segment_signed_min.front();
    for (double m : segment_signed_min) signed_min = std::min(signed_min, m);
    return signed_min;
  }
};

void sample_segment(const WaveFunction& wf, const ElectronConfiguration& proto,
                    const PathState& path, std::size_t seg, int m, int sign0,
                    double& signed_min, double& abs_min) {
  signed_min = std::numeric_limits<double>::infinity();
  abs_min = signed_min;
  const auto& a = path.waypoints[seg];
  const auto& b = path.waypoints[seg + 1];
  std::vector<Vec3> pos(a.size());
  for (int i = 0; i <= m; ++i) {
    const double t = static_cast<double>(i) / m;
    for (std::size_t e = 0; e < a.size(); ++e) pos[e] = a[e] + (b[e] - a[e]) * t;
    const double v = evaluate(wf, proto.with_positions(pos));
    signed_min = std::min(signed_min, sign0 * v);
    abs_min = std::min(abs_min, std::abs(v));
  }
}

std::vector<ElectronConfiguration> path_configs(const ElectronConfiguration& proto,
                                                const PathState& path) {
  std::vector<ElectronConfiguration> configs;
  configs.reserve(path.waypoints.size());
  for (const auto& pos : path.waypoints) configs.push_back(proto.with_positions(pos));
  return configs;
}

}  // namespace

PathVerdict stochastic_path_search(const WaveFunction& wf, const ElectronConfiguration& a,
                                   const ElectronConfiguration& b,
                                   const StochasticSearchParams& params) {
  interpolate_configurations(a, b, 0.0);  // layout compatibility
  if (params.n_waypoints < 1 || params.samples_per_segment < 2 || params.budget < 0 ||
      !(params.initial_step > 0.0))
    throw std::invalid_argument("bad stochastic search parameters");

  const double va = evaluate(wf, a), vb = evaluate(wf, b);
  if (is_effectively_zero(wf, a) || is_effectively_zero(wf, b))
    throw std::invalid_argument("path endpoints must lie off the node");
  const int sign0 = sign_of(va);
  if (sign0 != sign_of(vb))
    throw std::invalid_argument("endpoints of differing sign cannot be sign-connected");

  bool identical = true;
  for (std::size_t i = 0; i < a.size() && identical; ++i)
    identical = (b.position(i) - a.position(i)).norm2() == 0.0;
  if (identical) {
    PathVerdict verdict;
    verdict.outcome = PathOutcome::Connected;
    verdict.min_abs_value = std::abs(va);
    verdict.samples = {a};
    return verdict;
  }

  const int k = params.n_waypoints;
  const int m = params.samples_per_segment;
  const std::size_t n_segments = k + 1;

  PathState path;
  path.waypoints.resize(k + 2);
  path.waypoints.front() = a.positions();
  path.waypoints.back() = b.positions();
  for (int j = 1; j <= k; ++j) {
    const double t = static_cast<double>(j) / (k + 1);
    std::vector<Vec3> pos(a.size());
    for (std::size_t e = 0; e < a.size(); ++e)
      pos[e] = a.position(e) + (b.position(e) - a.position(e)) * t;
    path.waypoints[j] = pos;
  }
  path.segment_signed_min.resize(n_segments);
  path.segment_abs_min.resize(n_segments);
  for (std::size_t seg = 0; seg < n_segments; ++seg)
    sample_segment(wf, a, path, seg, m, sign0, path.segment_signed_min[seg],
                   path.segment_abs_min[seg]);
  path.refresh_totals();

  // candidates whose sampled minimum is positive still face the rigorous
  // verifier; a few such failures in a row mean the search is only finding
  // node-threading paths, so give up rather than fish for a blind spot
  constexpr int kMaxFailedVerifications = 8;
  int failed_verifications = 0;
  auto try_accept_as_connected = [&](const PathState& candidate) -> std::optional<PathVerdict> {
    if (!(candidate.signed_min > 0.0)) return std::nullopt;
    const auto verdict = verify_linear_path(wf, path_configs(a, candidate), m);
    if (verdict.outcome == PathOutcome::Connected) return verdict;
    ++failed_verifications;
    return std::nullopt;
  };

  if (auto verdict = try_accept_as_connected(path)) return *verdict;

  RngStream rng(params.seed, 0);
  PathState best = path;
  for (int iter = 0;
       iter < params.budget && failed_verifications < kMaxFailedVerifications;
       ++iter) {
    const double progress = static_cast<double>(iter) / std::max(1, params.budget);
    const double step = params.initial_step * std::pow(1.0 / 32.0, progress);
    const double temperature = std::pow(0.01, progress);

    const int j = 1 + static_cast<int>(rng.below(k));
    PathState proposal = path;
    for (auto& p : proposal.waypoints[j]) {
      p.x += step * rng.normal();
      p.y += step * rng.normal();
      p.z += step * rng.normal();
    }
    for (std::size_t seg = j - 1; seg <= static_cast<std::size_t>(j); ++seg)
      sample_segment(wf, a, proposal, seg, m, sign0, proposal.segment_signed_min[seg],
                     proposal.segment_abs_min[seg]);
    proposal.refresh_totals();

    const double delta = proposal.signed_min - path.signed_min;
    const double scale =
        std::max({std::abs(proposal.signed_min), std::abs(path.signed_min), 1e-300});
    if (delta > 0.0 || rng.uniform() < std::exp(delta / (temperature * scale))) {
      path = std::move(proposal);
      if (path.signed_min > best.signed_min) best = path;
      if (auto verdict = try_accept_as_connected(path)) return *verdict;
    }
  }

  PathVerdict verdict;
  verdict.outcome = PathOutcome::Undetermined;
  verdict.samples = path_configs(a, best);
  verdict.min_abs_value = best.segment_abs_min.front();
  for (double v : best.segment_abs_min) verdict.min_abs_value = std::min(verdict.min_abs_value, v);
  return verdict;
}

// ---------------------------------------------------------------------------
// Region counting over permutation images

std::vector<SpinPermutation> spin_preserving_permutations(const std::vector<Spin>& layout) {
  std::vector<std::size_t> up, down;
  for (std::size_t i = 0; i < layout.size(); ++i)
    (layout[i] == Spin::Up ? up : down).push_back(i);

  std::vector<std::vector<std::size_t>> up_perms{up}, down_perms{down};
  {
    auto u = up;
    while (std::next_permutation(u.begin(), u.end())) up_perms.push_back(u);
    auto d = down;
    while (std::next_permutation(d.begin(), d.end())) down_perms.push_back(d);
  }

  std::vector<SpinPermutation> perms;
  for (const auto& pu : up_perms) {
    for (const auto& pd : down_perms) {
      std::vector<std::size_t> mapping(layout.size());
      for (std::size_t i = 0; i < up.size(); ++i) mapping[up[i]] = pu[i];
      for (std::size_t i = 0; i < down.size(); ++i) mapping[down[i]] = pd[i];
      perms.emplace_back(std::move(mapping));
    }
  }
  return perms;
}

namespace {

bool is_rstar_form(const ElectronConfiguration& config) {
  if (config.size() != 4) return false;
  const double tol_a = 1e-12 * (1.0 + config.position(0).norm());
  const double tol_b = 1e-12 * (1.0 + config.position(2).norm());
  return (config.position(1) + config.position(0)).norm() <= tol_a &&
         (config.position(3) + config.position(2)).norm() <= tol_b;
}

bool is_identity(const SpinPermutation& perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm(i) != i) return false;
  return true;
}

}  // namespace

RegionCount count_nodal_regions(const WaveFunction& wf, const ReferencePoint& reference,
                                const PathStrategy& strategy) {
  if (!reference.valid)
    throw std::invalid_argument("reference point lies on or too near the node");

  const auto perms = spin_preserving_permutations(wf.spin_layout());
  RegionCount result;
  result.upper_bound = perms.size();

  bool any_odd = false;
  std::size_t even_images = 0, unconnected = 0, image_index = 0;
  for (const auto& perm : perms) {
    ImageEvidence ev;
    for (std::size_t i = 0; i < perm.size(); ++i) ev.mapping.push_back(perm(i));
    ev.parity = perm.parity();

    if (ev.parity < 0) {
      any_odd = true;
      ev.method = "opposite-sign";
    } else if (is_identity(perm)) {
      ev.method = "identity";
      ev.connected = true;
      ev.verdict.outcome = PathOutcome::Connected;
      ev.verdict.min_abs_value = std::abs(reference.value);
      ev.verdict.samples = {reference.config};
    } else {
      ++even_images;
      ev.method = "none";
      if (strategy.analytic_rotation && is_rstar_form(reference.config) &&
          ev.mapping == std::vector<std::size_t>{1, 0, 3, 2}) {
        const BeReferencePoint rstar = make_be_reference_point(
            reference.config.position(0), reference.config.position(2),
            reference.config.nuclear_charge());
        ev.verdict = rotation_path_test(wf, rstar, strategy.rotation_steps);
        if (ev.verdict.outcome == PathOutcome::Connected) {
          ev.method = "rotation";
          ev.connected = true;
        }
      }
      if (!ev.connected && strategy.stochastic) {
        auto search = strategy.search;
        search.seed = mix_key(strategy.search.seed, image_index);
        const auto target = apply_permutation(reference.config, perm);
        const auto verdict = stochastic_path_search(wf, reference.config, target, search);
        if (verdict.outcome == PathOutcome::Connected) {
          ev.method = "stochastic";
          ev.connected = true;
          ev.verdict = verdict;
        } else if (ev.verdict.samples.empty()) {
          ev.verdict = verdict;
        }
      }
      if (!ev.connected) ++unconnected;
    }
    result.evidence.push_back(std::move(ev));
    ++image_index;
  }

  result.count = (any_odd ? 2 : 1) * (1 + unconnected);
  result.negative_by_symmetry = any_odd && even_images > 0 && unconnected < even_images;
  return result;
}

std::string region_count_to_json(const RegionCount& count) {
  nlohmann::json images = nlohmann::json::array();
  for (const auto& ev : count.evidence) {
    nlohmann::json waypoints = nlohmann::json::array();
    for (const auto& c : ev.verdict.samples) {
      nlohmann::json config = nlohmann::json::array();
      for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec3& p = c.position(i);
        config.push_back({p.x, p.y, p.z});
      }
      waypoints.push_back(std::move(config));
    }
    nlohmann::json image{{"mapping", ev.mapping},
                         {"parity", ev.parity},
                         {"method", ev.method},
                         {"connected", ev.connected},
                         {"outcome", to_string(ev.verdict.outcome)},
                         {"min_abs_value", ev.verdict.min_abs_value},
                         {"waypoints", std::move(waypoints)}};
    if (ev.verdict.crossing_t >= 0.0) image["crossing_t"] = ev.verdict.crossing_t;
    images.push_back(std::move(image));
  }
  const nlohmann::json report{{"upper_bound", count.upper_bound},
                              {"count", count.count},
                              {"negative_by_symmetry", count.negative_by_symmetry},
                              {"images", std::move(images)}};
  return report.dump();
}

// ---------------------------------------------------------------------------
// Tiling spot check

TilingReport tiling_spot_check(const WaveFunction& wf, std::size_t n_pairs,
                               const std::function<ElectronConfiguration()>& sampler,
                               const StochasticSearchParams& params, int workers) {
  const auto perms = spin_preserving_permutations(wf.spin_layout());

  auto draw_off_node = [&]() {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      ElectronConfiguration c = sampler();
      if (!is_effectively_zero(wf, c)) return c;
    }
    throw std::runtime_error("sampler keeps producing configurations on the node");
  };

  std::vector<std::pair<ElectronConfiguration, ElectronConfiguration>> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t p = 0; p < n_pairs; ++p) pairs.emplace_back(draw_off_node(), draw_off_node());

  std::vector<char> connected(n_pairs, 0);
  parallel_for(n_pairs, workers, [&](std::size_t p) {
    const auto& [a, b] = pairs[p];
    const int sa = sign_of(evaluate(wf, a));
    const int sb = sign_of(evaluate(wf, b));
    std::size_t image_index = 0;
    for (const auto& perm : perms) {
      if (perm.parity() * sb == sa) {
        auto search = params;
        search.seed = mix_key(params.seed, p * 64 + image_index);
        const auto verdict =
            stochastic_path_search(wf, a, apply_permutation(b, perm), search);
        if (verdict.outcome == PathOutcome::Connected) {
          connected[p] = 1;
          break;
        }
      }
      ++image_index;
    }
  });

  TilingReport report;
  report.pairs = n_pairs;
  for (char c : connected) report.connected += c;
  report.success_fraction =
      n_pairs ? static_cast<double>(report.connected) / n_pairs : 0.0;
  return report;
}

}  // namespace qmcnodes
