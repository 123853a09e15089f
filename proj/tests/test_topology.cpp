#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "qmcnodes/nodal.hpp"
#include "qmcnodes/rng.hpp"
#include "qmcnodes/topology.hpp"
#include "qmcnodes/wavefunction.hpp"

using namespace qmcnodes;

namespace {

ElectronConfiguration he_config(const Vec3& a, const Vec3& b) {
  return {{a, b}, {Spin::Up, Spin::Up}, 2};
}

ElectronConfiguration be_config(const Vec3& a, const Vec3& b, const Vec3& c,
                                const Vec3& d) {
  return {{a, b, c, d}, {Spin::Up, Spin::Up, Spin::Down, Spin::Down}, 4};
}

ElectronConfiguration random_like(RngStream& g, const ElectronConfiguration& proto,
                                  double span = 2.0) {
  std::vector<Vec3> pos;
  for (std::size_t i = 0; i < proto.size(); ++i)
    pos.push_back({g.uniform(-span, span), g.uniform(-span, span),
                   g.uniform(-span, span)});
  return proto.with_positions(pos);
}

/// Generic (non-orthogonal, non-parallel) pair for R* references.
BeReferencePoint generic_rstar() {
  return make_be_reference_point({1.1, 0.2, -0.3}, {0.4, 1.3, 0.5});
}

/// Cheap search parameters for tests; the defaults are sized for production
/// runs.
StochasticSearchParams quick_search(std::uint64_t seed = 1) {
  StochasticSearchParams p;
  p.n_waypoints = 6;
  p.samples_per_segment = 6;
  p.budget = 1200;
  p.seed = seed;
  return p;
}

const ImageEvidence& evidence_for(const RegionCount& rc,
                                  const std::vector<std::size_t>& mapping) {
  for (const auto& ev : rc.evidence)
    if (ev.mapping == mapping) return ev;
  FAIL("no evidence for requested image");
  return rc.evidence.front();  // unreachable
}

}  // namespace

TEST_CASE("spin-preserving permutations enumerate per-spin-block bijections") {
  const auto be = spin_preserving_permutations(
      {Spin::Up, Spin::Up, Spin::Down, Spin::Down});
  REQUIRE(be.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(be[0](i) == i);
  CHECK(be[0].parity() == 1);
  // order: identity, down swap, up swap, double swap
  CHECK(be[1](2) == 3);
  CHECK(be[1](0) == 0);
  CHECK(be[1].parity() == -1);
  CHECK(be[2](0) == 1);
  CHECK(be[2](3) == 3);
  CHECK(be[2].parity() == -1);
  CHECK(be[3](0) == 1);
  CHECK(be[3](2) == 3);
  CHECK(be[3].parity() == 1);

  const auto he = spin_preserving_permutations({Spin::Up, Spin::Up});
  REQUIRE(he.size() == 2);
  CHECK(he[1].parity() == -1);

  const auto li = spin_preserving_permutations({Spin::Up, Spin::Down, Spin::Up});
  REQUIRE(li.size() == 2);
  CHECK(li[1](0) == 2);
  CHECK(li[1](1) == 1);
  CHECK(li[1](2) == 0);
  CHECK(li[1].parity() == -1);

  CHECK(spin_preserving_permutations({Spin::Up}).size() == 1);
}

TEST_CASE("rotation path lands on the double pair exchange and keeps the value") {
  const auto wf = build_be_two_config(0.1, 3.7, 0.95, 0.6, 1.1);
  const auto ref = generic_rstar();
  CHECK(!ref.perpendicular);
  CHECK(!ref.parallel);

  const double v0 = evaluate(*wf, ref.config);
  REQUIRE(v0 != 0.0);

  const auto verdict = rotation_path_test(*wf, ref, 128);
  CHECK(verdict.outcome == PathOutcome::Connected);
  CHECK(verdict.crossing_t == -1.0);
  CHECK(verdict.min_abs_value == doctest::Approx(std::abs(v0)).epsilon(1e-10));
  REQUIRE(verdict.samples.size() >= 17);

  // endpoint of the recorded path is P12 P34 R*
  const auto target =
      apply_permutation(ref.config, SpinPermutation({1, 0, 3, 2}));
  const auto& last = verdict.samples.back();
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs((last.position(i) - target.position(i)).x) < 1e-10);
    CHECK(std::abs((last.position(i) - target.position(i)).y) < 1e-10);
    CHECK(std::abs((last.position(i) - target.position(i)).z) < 1e-10);
  }

  // every recorded sample carries the same value
  for (const auto& c : verdict.samples)
    CHECK(evaluate(*wf, c) == doctest::Approx(v0).epsilon(1e-10));
}

TEST_CASE("rotation path on a product-node function reports Undetermined") {
  // both determinants have equal like-spin radii at R*, so Psi(R*) is an
  // exact zero and the path proves nothing
  const auto hf = build_be_hf(3.7, 0.95, 0.6);
  const auto ref = generic_rstar();
  CHECK(evaluate(*hf, ref.config) == 0.0);

  const auto verdict = rotation_path_test(*hf, ref, 64);
  CHECK(verdict.outcome == PathOutcome::Undetermined);
  CHECK(verdict.min_abs_value == 0.0);
}

TEST_CASE("rotation path rejects non-4-electron functions") {
  const auto he = build_he_triplet_hylleraas(default_triplet_basis(8), 2.0);
  CHECK_THROWS_AS(rotation_path_test(*he, generic_rstar()),
                  std::invalid_argument);
  const auto be = build_be_hf(3.7, 0.95, 0.6);
  CHECK_THROWS_AS(rotation_path_test(*be, generic_rstar(), 1),
                  std::invalid_argument);
}

TEST_CASE("verify_linear_path distinguishes clean segments from crossings") {
  const auto he = build_he_triplet_hylleraas(default_triplet_basis(8), 2.0);
  const auto a = he_config({1.4, 0.1, 0.0}, {0.3, 0.9, 0.2});   // r1 > r2 side
  const auto b = he_config({1.2, -0.2, 0.3}, {0.4, 0.6, -0.1});
  const auto c = he_config({0.3, 0.9, 0.2}, {1.4, 0.1, 0.0});   // swapped: r1 < r2

  const auto clean = verify_linear_path(*he, {a, b}, 12);
  CHECK(clean.outcome == PathOutcome::Connected);
  CHECK(clean.crossing_t == -1.0);
  CHECK(clean.min_abs_value > 0.0);
  CHECK(clean.samples.size() == 2);

  const auto crossed = verify_linear_path(*he, {a, c}, 12);
  CHECK(crossed.outcome == PathOutcome::CrossedNode);
  CHECK(crossed.crossing_t > 0.0);
  CHECK(crossed.crossing_t < 1.0);
  // the straight a -> c segment crosses the exchange node exactly halfway
  CHECK(crossed.crossing_t == doctest::Approx(0.5).epsilon(1e-6));

  // piecewise version: a -> b -> c must still cross in the second segment
  const auto two_leg = verify_linear_path(*he, {a, b, c}, 12);
  CHECK(two_leg.outcome == PathOutcome::CrossedNode);
  CHECK(two_leg.crossing_t > 0.5);

  const auto point = verify_linear_path(*he, {a}, 4);
  CHECK(point.outcome == PathOutcome::Connected);

  CHECK_THROWS_AS(verify_linear_path(*he, {}, 4), std::invalid_argument);
  CHECK_THROWS_AS(verify_linear_path(*he, {a, b}, 0), std::invalid_argument);
}

TEST_CASE("stochastic search: trivial and rigid-rotation connections") {
  const auto wf = build_be_two_config(0.1, 3.7, 0.95, 0.6, 1.1);
  RngStream g(41, 0);
  const auto proto = be_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0});
  ElectronConfiguration a = random_like(g, proto, 1.5);
  while (is_effectively_zero(*wf, a)) a = random_like(g, proto, 1.5);

  const auto self = stochastic_path_search(*wf, a, a, quick_search());
  CHECK(self.outcome == PathOutcome::Connected);
  CHECK(self.samples.size() == 1);

  // a rigid rotation preserves the S-state value, so endpoints match in
  // sign and a short search should connect them
  const auto b = rotate_all(a, Vec3{0.0, 0.0, 1.0}, 0.35);
  CHECK(evaluate(*wf, b) == doctest::Approx(evaluate(*wf, a)).epsilon(1e-12));
  const auto rotated = stochastic_path_search(*wf, a, b, quick_search(5));
  CHECK(rotated.outcome == PathOutcome::Connected);
  CHECK(rotated.min_abs_value > 0.0);
  REQUIRE(rotated.samples.size() >= 2);

  // the returned path itself must survive an independent verification
  const auto recheck = verify_linear_path(*wf, rotated.samples, 10);
  CHECK(recheck.outcome == PathOutcome::Connected);
}

TEST_CASE("stochastic search rejects bad endpoints and parameters") {
  const auto hf = build_be_hf(3.7, 0.95, 0.6);
  const auto plus = be_config({1.5, 0, 0}, {0, 0.5, 0}, {0, 0, 1.3}, {0.4, 0, 0});
  const auto minus = be_config({0.5, 0, 0}, {0, 1.5, 0}, {0, 0, 1.3}, {0.4, 0, 0});
  const auto on_node = be_config({1.0, 0, 0}, {0, 1.0, 0}, {0, 0, 1.3}, {0.4, 0, 0});

  REQUIRE(evaluate(*hf, plus) > 0.0);
  REQUIRE(evaluate(*hf, minus) < 0.0);
  REQUIRE(evaluate(*hf, on_node) == 0.0);

  CHECK_THROWS_AS(stochastic_path_search(*hf, plus, minus, quick_search()),
                  std::invalid_argument);
  CHECK_THROWS_AS(stochastic_path_search(*hf, plus, on_node, quick_search()),
                  std::invalid_argument);
  CHECK_THROWS_AS(stochastic_path_search(*hf, on_node, plus, quick_search()),
                  std::invalid_argument);

  auto bad = quick_search();
  bad.n_waypoints = 0;
  CHECK_THROWS_AS(stochastic_path_search(*hf, plus, plus, bad),
                  std::invalid_argument);
  bad = quick_search();
  bad.samples_per_segment = 1;
  CHECK_THROWS_AS(stochastic_path_search(*hf, plus, plus, bad),
                  std::invalid_argument);
  bad = quick_search();
  bad.initial_step = 0.0;
  CHECK_THROWS_AS(stochastic_path_search(*hf, plus, plus, bad),
                  std::invalid_argument);
}

TEST_CASE("stochastic search cannot tunnel through a product node") {
  // same-sign quadrants of det_up * det_dn meet only at the node, so the
  // search must come back Undetermined (which proves nothing by design)
  const auto hf = build_be_hf(3.7, 0.95, 0.6);
  const auto a = be_config({1.5, 0, 0}, {0, 0.5, 0}, {0, 0, 1.4}, {0.4, 0, 0});
  const auto b = be_config({0.5, 0, 0}, {0, 1.5, 0}, {0, 0, 0.4}, {1.4, 0, 0});
  REQUIRE(evaluate(*hf, a) > 0.0);
  REQUIRE(evaluate(*hf, b) > 0.0);

  const auto verdict = stochastic_path_search(*hf, a, b, quick_search(11));
  CHECK(verdict.outcome == PathOutcome::Undetermined);
  CHECK(verdict.crossing_t == -1.0);
  CHECK(verdict.samples.size() == 8);  // 6 interior waypoints + endpoints
}

TEST_CASE("region count: two-configuration function has two regions") {
  for (double c2 : {0.05, 0.1, 0.2}) {
    const auto wf = build_be_two_config(c2, 3.7, 0.95, 0.6, 1.1);
    const auto ref = make_reference_point(*wf, generic_rstar().config);
    REQUIRE(ref.valid);

    PathStrategy strategy;
    strategy.search = quick_search();
    const auto rc = count_nodal_regions(*wf, ref, strategy);

    CHECK(rc.upper_bound == 4);
    CHECK(rc.count == 2);
    CHECK(rc.negative_by_symmetry);
    REQUIRE(rc.evidence.size() == 4);

    CHECK(evidence_for(rc, {0, 1, 2, 3}).method == "identity");
    const auto& both = evidence_for(rc, {1, 0, 3, 2});
    CHECK(both.method == "rotation");
    CHECK(both.connected);
    CHECK(both.verdict.outcome == PathOutcome::Connected);
    CHECK(both.verdict.min_abs_value > 0.0);
    CHECK(evidence_for(rc, {1, 0, 2, 3}).method == "opposite-sign");
    CHECK(evidence_for(rc, {0, 1, 3, 2}).method == "opposite-sign");
    CHECK(!evidence_for(rc, {1, 0, 2, 3}).connected);
  }
}

TEST_CASE("region count: product node keeps four regions") {
  const auto hf = build_be_hf(3.7, 0.95, 0.6);
  // R* sits on the product node, so use a generic off-node reference
  const auto ref = make_reference_point(
      *hf, be_config({1.5, 0.1, 0}, {0.2, 0.6, 0.1}, {0, 0.1, 1.4}, {0.4, 0, 0.2}));
  REQUIRE(ref.valid);

  PathStrategy strategy;
  strategy.search = quick_search(3);
  const auto rc = count_nodal_regions(*hf, ref, strategy);

  CHECK(rc.upper_bound == 4);
  CHECK(rc.count == 4);
  CHECK(!rc.negative_by_symmetry);
  const auto& both = evidence_for(rc, {1, 0, 3, 2});
  CHECK(!both.connected);
  CHECK(both.method == "none");
  CHECK(both.verdict.outcome == PathOutcome::Undetermined);

  // R* itself is rejected as a reference
  const auto on_node = make_reference_point(*hf, generic_rstar().config);
  CHECK(!on_node.valid);
  CHECK_THROWS_AS(count_nodal_regions(*hf, on_node, strategy),
                  std::invalid_argument);
}

TEST_CASE("region count: two like-spin electrons always give two regions") {
  const auto he = build_he_triplet_hylleraas(default_triplet_basis(8), 2.0);
  const auto ref =
      make_reference_point(*he, he_config({1.3, 0.1, 0}, {0.2, 0.8, 0.4}));
  REQUIRE(ref.valid);
  const auto rc = count_nodal_regions(*he, ref);
  CHECK(rc.upper_bound == 2);
  CHECK(rc.count == 2);
  REQUIRE(rc.evidence.size() == 2);
  CHECK(rc.evidence[0].method == "identity");
  CHECK(rc.evidence[1].method == "opposite-sign");

  const auto li = build_li_rhf(2.7, 0.65, 0.5);
  const auto li_ref = make_reference_point(
      *li, ElectronConfiguration({{1.2, 0, 0}, {0.1, 0.4, 0}, {0, 0.2, 0.9}},
                                 {Spin::Up, Spin::Down, Spin::Up}, 3));
  REQUIRE(li_ref.valid);
  CHECK(count_nodal_regions(*li, li_ref).count == 2);
}

TEST_CASE("region count: a nodeless one-electron state is a single region") {
  const auto h = build_hydrogenic_1s(1.0);
  const auto ref = make_reference_point(
      *h, ElectronConfiguration({{0.9, 0.3, -0.2}}, {Spin::Up}, 1));
  REQUIRE(ref.valid);
  const auto rc = count_nodal_regions(*h, ref);
  CHECK(rc.upper_bound == 1);
  CHECK(rc.count == 1);
  CHECK(!rc.negative_by_symmetry);
}

TEST_CASE("region count report serializes to JSON and reruns identically") {
  const auto wf = build_be_two_config(0.1, 3.7, 0.95, 0.6, 1.1);
  const auto ref = make_reference_point(*wf, generic_rstar().config);
  PathStrategy strategy;
  strategy.search = quick_search();

  const auto rc = count_nodal_regions(*wf, ref, strategy);
  const std::string text = region_count_to_json(rc);
  const auto parsed = nlohmann::json::parse(text);

  CHECK(parsed.at("upper_bound") == 4);
  CHECK(parsed.at("count") == 2);
  CHECK(parsed.at("negative_by_symmetry") == true);
  REQUIRE(parsed.at("images").size() == 4);
  for (const auto& image : parsed.at("images")) {
    CHECK(image.at("mapping").size() == 4);
    CHECK((image.at("parity") == 1 || image.at("parity") == -1));
    CHECK(image.contains("outcome"));
    CHECK(image.contains("min_abs_value"));
    const auto& wpts = image.at("waypoints");
    for (const auto& cfg : wpts) {
      REQUIRE(cfg.size() == 4);
      for (const auto& p : cfg) REQUIRE(p.size() == 3);
    }
  }
  const auto& rot = parsed.at("images").at(3);
  CHECK(rot.at("method") == "rotation");
  CHECK(rot.at("outcome") == "connected");

  // deterministic: an independent rerun serializes byte-identically
  const auto rerun = count_nodal_regions(*wf, ref, strategy);
  CHECK(region_count_to_json(rerun) == text);
}

TEST_CASE("rotation evidence survives without the stochastic fallback") {
  const auto wf = build_be_two_config(0.2, 3.7, 0.95, 0.6, 1.1);
  const auto ref = make_reference_point(*wf, generic_rstar().config);
  PathStrategy strategy;
  strategy.stochastic = false;
  const auto rc = count_nodal_regions(*wf, ref, strategy);
  CHECK(rc.count == 2);
  CHECK(evidence_for(rc, {1, 0, 3, 2}).method == "rotation");

  // and the other way round: annealing alone must still merge the regions
  PathStrategy no_rotation;
  no_rotation.analytic_rotation = false;
  no_rotation.search = quick_search(17);
  no_rotation.search.budget = 4000;
  const auto rc2 = count_nodal_regions(*wf, ref, no_rotation);
  const auto& both = evidence_for(rc2, {1, 0, 3, 2});
  if (both.connected) {
    CHECK(rc2.count == 2);
    CHECK(both.method == "stochastic");
    const auto recheck = verify_linear_path(*wf, both.verdict.samples, 12);
    CHECK(recheck.outcome == PathOutcome::Connected);
  } else {
    // budget exhaustion is a legal (if unhelpful) answer; never a proof
    CHECK(rc2.count == 4);
    CHECK(both.verdict.outcome == PathOutcome::Undetermined);
  }
}

TEST_CASE("tiling spot check connects same-sign images, worker independent") {
  const auto he = build_he_triplet_hylleraas(default_triplet_basis(8), 2.0);
  const auto proto = he_config({1, 0, 0}, {0, 1, 0});

  // sampler state advances per draw, so feed both runs identical streams
  auto params = quick_search(23);
  params.budget = 2500;

  RngStream g1(97, 0);
  RngStream g2(97, 0);
  const auto sampler1 = [&]() { return random_like(g1, proto, 1.8); };
  const auto sampler2 = [&]() { return random_like(g2, proto, 1.8); };

  const auto serial = tiling_spot_check(*he, 6, sampler1, params, 1);
  const auto threaded = tiling_spot_check(*he, 6, sampler2, params, 4);

  CHECK(serial.pairs == 6);
  CHECK(serial.connected == threaded.connected);
  CHECK(serial.success_fraction == threaded.success_fraction);
  // the triplet node is a single plane, so same-sign connections exist
  CHECK(serial.success_fraction >= 0.5);
}
