#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qmcnodes/rng.hpp"
#include "qmcnodes/wavefunction.hpp"

using namespace qmcnodes;

namespace {

// central-difference derivatives of Psi itself, h = 1e-4 bohr
struct FdDerivatives {
  std::vector<Vec3> grad;
  std::vector<double> lap;
};

FdDerivatives fd_derivatives(const WaveFunction& wf, const ElectronConfiguration& c,
                             double h = 1e-4) {
  const std::size_t n = c.size();
  const double psi0 = wf.value(c);
  FdDerivatives fd;
  fd.grad.assign(n, Vec3{});
  fd.lap.assign(n, 0.0);
  std::vector<Vec3> pos = c.positions();
  for (std::size_t e = 0; e < n; ++e) {
    for (int dim = 0; dim < 3; ++dim) {
      double* coord = dim == 0 ? &pos[e].x : dim == 1 ? &pos[e].y : &pos[e].z;
      const double saved = *coord;
      *coord = saved + h;
      const double up = wf.value(c.with_positions(pos));
      *coord = saved - h;
      const double dn = wf.value(c.with_positions(pos));
      *coord = saved;
      const double d1 = (up - dn) / (2 * h);
      (dim == 0 ? fd.grad[e].x : dim == 1 ? fd.grad[e].y : fd.grad[e].z) = d1;
      fd.lap[e] += (up - 2 * psi0 + dn) / (h * h);
    }
  }
  return fd;
}

void check_against_fd(const WaveFunction& wf, const ElectronConfiguration& c,
                      double rel = 1e-6) {
  const RawDerivatives raw = wf.raw_derivatives(c);
  CHECK(raw.value == doctest::Approx(wf.value(c)).epsilon(1e-12));
  const FdDerivatives fd = fd_derivatives(wf, c);
  REQUIRE(raw.grad.size() == c.size());
  for (std::size_t e = 0; e < c.size(); ++e) {
    CHECK(raw.grad[e].x == doctest::Approx(fd.grad[e].x).epsilon(rel));
    CHECK(raw.grad[e].y == doctest::Approx(fd.grad[e].y).epsilon(rel));
    CHECK(raw.grad[e].z == doctest::Approx(fd.grad[e].z).epsilon(rel));
    CHECK(raw.lap[e] == doctest::Approx(fd.lap[e]).epsilon(rel));
  }
}

ElectronConfiguration he_config(const Vec3& a, const Vec3& b) {
  return {{a, b}, {Spin::Up, Spin::Up}, 2};
}

ElectronConfiguration li_config(const Vec3& a, const Vec3& b, const Vec3& c) {
  return {{a, b, c}, {Spin::Up, Spin::Down, Spin::Up}, 3};
}

ElectronConfiguration be_config(const Vec3& a, const Vec3& b, const Vec3& c,
                                const Vec3& d) {
  return {{a, b, c, d}, {Spin::Up, Spin::Up, Spin::Down, Spin::Down}, 4};
}

ElectronConfiguration random_like(RngStream& g, const ElectronConfiguration& proto,
                                  double span = 1.8) {
  std::vector<Vec3> pos;
  for (std::size_t i = 0; i < proto.size(); ++i)
    pos.push_back({g.uniform(-span, span), g.uniform(-span, span),
                   g.uniform(-span, span)});
  return proto.with_positions(pos);
}

int sign_of(double x) { return x > 0 ? 1 : x < 0 ? -1 : 0; }

std::shared_ptr<HylleraasWaveFunction> sample_triplet() {
  std::vector<TripletHylleraasTerm> terms = default_triplet_basis(8);
  for (std::size_t t = 0; t < terms.size(); ++t)
    terms[t].coeff = 1.0 + 0.1 * static_cast<double>(t);  // break accidental symmetry
  return build_he_triplet_hylleraas(terms, 2.0);
}

std::shared_ptr<HylleraasWaveFunction> sample_doublet() {
  std::vector<DoubletSTerm> f = {
      {{0, 0, 0, 0, 0, 0}, 1.0},  {{1, 0, 0, 0, 0, 0}, 0.35},
      {{0, 0, 1, 0, 0, 0}, -0.2}, {{0, 0, 0, 1, 0, 0}, 0.15},
      {{0, 1, 0, 0, 0, 1}, 0.1},  {{2, 0, 0, 0, 1, 0}, -0.05},
  };
  return project_doublet_s(f, 2.6, 0.65);
}

}  // namespace

TEST_CASE("coulomb potential: direct values and coalescence") {
  const auto c = he_config({1, 0, 0}, {-1, 0, 0});
  CHECK(coulomb_potential(c) == doctest::Approx(-2.0 - 2.0 + 0.5).epsilon(1e-15));
  CHECK_THROWS_AS(coulomb_potential(he_config({1, 0, 0}, {1, 0, 0})),
                  std::domain_error);
  CHECK_THROWS_AS(coulomb_potential(he_config({0, 0, 0}, {1, 0, 0})),
                  std::domain_error);
}

TEST_CASE("hydrogenic 1s has zero local-energy variance") {
  for (const double zeta : {1.0, 2.0}) {
    const auto wf = build_hydrogenic_1s(zeta);
    const ElectronConfiguration proto({{0.7, -0.2, 0.4}}, {Spin::Up},
                                      static_cast<int>(zeta));
    RngStream g(31, 0);
    for (int trial = 0; trial < 25; ++trial) {
      const auto c = random_like(g, proto);
      if (c.position(0).norm() < 0.05) continue;
      CHECK(local_energy(*wf, c) ==
            doctest::Approx(-0.5 * zeta * zeta).epsilon(1e-10));
    }
  }
}

TEST_CASE("layout checks reject mismatched configurations") {
  const auto li = build_li_rhf(2.7, 0.65, 0.5);
  CHECK_THROWS_AS(evaluate(*li, he_config({1, 0, 0}, {0, 1, 0})),
                  std::invalid_argument);
  const ElectronConfiguration wrong_spins({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
                                          {Spin::Up, Spin::Up, Spin::Down}, 3);
  CHECK_THROWS_AS(evaluate(*li, wrong_spins), std::invalid_argument);
}

TEST_CASE("CI derivatives match finite differences") {
  const auto li = build_li_rhf(2.7, 0.65, 0.5);
  check_against_fd(*li, li_config({0.9, 0.1, -0.3}, {-0.4, 0.8, 0.2}, {0.3, -1.2, 0.9}));

  const auto be = build_be_hf(3.7, 0.95, 0.6);
  check_against_fd(*be, be_config({1.1, 0.2, -0.4}, {-0.6, 0.9, 0.3},
                                  {0.4, -1.0, 0.8}, {-0.9, -0.5, -0.6}));

  const auto be2 = build_be_two_config(0.2, 3.7, 0.95, 0.6, 1.1);
  check_against_fd(*be2, be_config({1.1, 0.2, -0.4}, {-0.6, 0.9, 0.3},
                                   {0.4, -1.0, 0.8}, {-0.9, -0.5, -0.6}));
}

TEST_CASE("Hylleraas derivatives match finite differences") {
  const auto he = sample_triplet();
  check_against_fd(*he, he_config({0.8, 0.3, -0.5}, {-0.7, 1.1, 0.4}));

  const auto li = sample_doublet();
  check_against_fd(*li, li_config({0.9, 0.1, -0.3}, {-0.4, 0.8, 0.2}, {0.3, -1.2, 0.9}));
}

TEST_CASE("Jastrow-wrapped derivatives match finite differences") {
  JastrowFactor j;
  j.a_en = 0.3;

  const auto li = with_jastrow(build_li_rhf(2.7, 0.65, 0.5), j);
  check_against_fd(*li, li_config({0.9, 0.1, -0.3}, {-0.4, 0.8, 0.2}, {0.3, -1.2, 0.9}));

  const auto he = with_jastrow(sample_triplet(), j);
  check_against_fd(*he, he_config({0.8, 0.3, -0.5}, {-0.7, 1.1, 0.4}));

  const auto be = with_jastrow(build_be_hf(3.7, 0.95, 0.6), j);
  check_against_fd(*be, be_config({1.1, 0.2, -0.4}, {-0.6, 0.9, 0.3},
                                  {0.4, -1.0, 0.8}, {-0.9, -0.5, -0.6}));
}

TEST_CASE("same-spin exchange antisymmetry") {
  RngStream g(32, 0);

  const auto he = sample_triplet();
  const auto li = build_li_rhf(2.7, 0.65, 0.5);
  const auto li_h = sample_doublet();
  const auto be = build_be_two_config(0.2, 3.7, 0.95, 0.6, 1.1);

  for (int trial = 0; trial < 1000; ++trial) {
    const auto ch = random_like(g, he_config({1, 0, 0}, {0, 1, 0}));
    const auto swapped_h =
        apply_permutation(ch, SpinPermutation::transposition(2, 0, 1));
    CHECK(evaluate(*he, swapped_h) == doctest::Approx(-evaluate(*he, ch)).epsilon(1e-12));

    const auto cl = random_like(g, li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}));
    const auto swapped_l =
        apply_permutation(cl, SpinPermutation::transposition(3, 0, 2));
    CHECK(evaluate(*li, swapped_l) == doctest::Approx(-evaluate(*li, cl)).epsilon(1e-12));
    CHECK(evaluate(*li_h, swapped_l) ==
          doctest::Approx(-evaluate(*li_h, cl)).epsilon(1e-12));

    const auto cb =
        random_like(g, be_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}));
    const auto swap_up = apply_permutation(cb, SpinPermutation::transposition(4, 0, 1));
    const auto swap_dn = apply_permutation(cb, SpinPermutation::transposition(4, 2, 3));
    CHECK(evaluate(*be, swap_up) == doctest::Approx(-evaluate(*be, cb)).epsilon(1e-12));
    CHECK(evaluate(*be, swap_dn) == doctest::Approx(-evaluate(*be, cb)).epsilon(1e-12));
  }
}

TEST_CASE("S-state values are rotation invariant") {
  RngStream g(33, 0);
  JastrowFactor j;

  std::vector<std::pair<WaveFunctionPtr, ElectronConfiguration>> cases;
  cases.emplace_back(sample_triplet(), he_config({1, 0, 0}, {0, 1, 0}));
  cases.emplace_back(build_li_rhf(2.7, 0.65, 0.5),
                     li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}));
  cases.emplace_back(sample_doublet(), li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}));
  cases.emplace_back(build_be_two_config(0.3, 3.7, 0.95, 0.6, 1.1),
                     be_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}));
  cases.emplace_back(with_jastrow(build_be_hf(3.7, 0.95, 0.6), j),
                     be_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}));

  for (auto& [wf, proto] : cases) {
    CHECK(wf->s_state());
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = random_like(g, proto);
      const double before = evaluate(*wf, c);
      const Vec3 axis = Vec3{g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)}
                            .normalized();
      const auto rotated = rotate_all(c, axis, g.uniform(-M_PI, M_PI));
      CHECK(evaluate(*wf, rotated) == doctest::Approx(before).epsilon(1e-10));
    }
  }
}

TEST_CASE("He triplet expansion vanishes exactly at r1 = r2") {
  const auto he = sample_triplet();
  // equal nucleus distances, generic directions
  const auto c = he_config(Vec3{0.9, 0.3, -0.2},
                           Vec3{-0.3, 0.9, 0.2} * (Vec3{0.9, 0.3, -0.2}.norm() /
                                                   Vec3{-0.3, 0.9, 0.2}.norm()));
  CHECK(std::abs(evaluate(*he, c)) < 1e-14);
  CHECK(is_effectively_zero(*he, c));
  CHECK_THROWS_AS(gradient_and_laplacian(*he, c), std::domain_error);
}

TEST_CASE("Li RHF node is exactly the r1 = r3 surface, matching sign") {
  const auto li = build_li_rhf(2.7, 0.65, 0.5);
  RngStream g(34, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_like(g, li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}));
    const double r1 = c.position(0).norm(), r3 = c.position(2).norm();
    if (std::abs(r1 - r3) < 1e-6) continue;
    CHECK(sign_of(evaluate(*li, c)) == sign_of(r1 - r3));
  }
  // on the surface: exactly zero
  const auto on = li_config({0.8, 0.0, 0.0}, {0.1, -0.5, 0.3}, {0.0, 0.8, 0.0});
  CHECK(evaluate(*li, on) == 0.0);
  CHECK(is_effectively_zero(*li, on));
}

TEST_CASE("Be HF sign follows (r1 - r2)(r3 - r4)") {
  const auto be = build_be_hf(3.7, 0.95, 0.6);
  RngStream g(35, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c =
        random_like(g, be_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}));
    const double n = (c.position(0).norm() - c.position(1).norm()) *
                     (c.position(2).norm() - c.position(3).norm());
    if (std::abs(n) < 1e-6) continue;
    CHECK(sign_of(evaluate(*be, c)) == sign_of(n));
  }
}

TEST_CASE("Jastrow factor is positive and node-preserving") {
  const auto base = build_li_rhf(2.7, 0.65, 0.5);
  JastrowFactor j;
  j.a_en = 0.2;
  const auto wrapped = with_jastrow(base, j);
  RngStream g(36, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = random_like(g, li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}));
    const double b = evaluate(*base, c);
    const double w = evaluate(*wrapped, c);
    CHECK(sign_of(w) == sign_of(b));
    CHECK(std::exp(j.log_value(c)) > 0.0);
  }
  const auto on = li_config({0.8, 0.0, 0.0}, {0.1, -0.5, 0.3}, {0.0, 0.8, 0.0});
  CHECK(evaluate(*wrapped, on) == 0.0);
}

TEST_CASE("doublet-S combination identities") {
  RngStream g(37, 0);
  // f = s1            ->  r1 - r3
  // f = s12 (4th slot)->  2 (r12 - r23)
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = random_like(g, li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}));
    const DistanceTable t = interparticle_distances(c);
    const double v1 =
        doublet_s_value([](const std::array<double, 6>& s) { return s[0]; }, c);
    CHECK(v1 == doctest::Approx(t.r[0] - t.r[2]).epsilon(1e-12));
    const double v2 =
        doublet_s_value([](const std::array<double, 6>& s) { return s[3]; }, c);
    CHECK(v2 == doctest::Approx(2.0 * (t.rij[0][1] - t.rij[1][2])).epsilon(1e-12));
  }
}

TEST_CASE("projected doublet expansion equals the explicit functional") {
  const auto wf = sample_doublet();
  const double alpha = 2.6, beta = 0.65;
  const std::vector<DoubletSTerm> f = wf->doublet_terms();
  auto functional = [&](const std::array<double, 6>& s) {
    double poly = 0.0;
    for (const auto& t : f) {
      double w = t.coeff;
      for (int k = 0; k < 6; ++k) w *= std::pow(s[k], t.powers[k]);
      poly += w;
    }
    return poly * std::exp(-alpha * (s[0] + s[1]) - beta * s[2]);
  };
  RngStream g(38, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_like(g, li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1}));
    const double want = doublet_s_value(functional, c);
    CHECK(evaluate(*wf, c) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("project_2s wraps an opaque generating function") {
  RngStream g(39, 0);
  const auto proto = li_config({1, 0, 0}, {0, 1, 0}, {0, 0, 1});

  // f = first argument: the projection collapses to r1 - r3.
  const auto f_r1 = project_2s([](const std::array<double, 6>& s) { return s[0]; });
  CHECK(f_r1->electron_count() == 3);
  CHECK(f_r1->s_state());
  // f = fourth argument: 2(r12 - r23); no node is forced at r1 = r3.
  const auto f_r12 = project_2s([](const std::array<double, 6>& s) { return s[3]; });

  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_like(g, proto);
    const DistanceTable t = interparticle_distances(c);
    CHECK(evaluate(*f_r1, c) ==
          doctest::Approx(t.r[0] - t.r[2]).epsilon(1e-14));
    CHECK(evaluate(*f_r12, c) ==
          doctest::Approx(2.0 * (t.rij[0][1] - t.rij[1][2])).epsilon(1e-14));
  }

  // r1 = r3 but r12 != r23: the r12-generated function stays away from zero.
  const auto equal_r = li_config({1.1, 0, 0}, {0.3, 0.8, 0}, {0, -0.4, 1.1 * std::sqrt(1.0 - 0.16 / 1.21)});
  {
    const DistanceTable t = interparticle_distances(equal_r);
    REQUIRE(std::abs(t.r[0] - t.r[2]) < 1e-12);
    REQUIRE(std::abs(t.rij[0][1] - t.rij[1][2]) > 0.1);
    CHECK(std::abs(evaluate(*f_r12, equal_r)) > 0.1);
  }

  // Random polynomial lookup: antisymmetry under the 1<->3 exchange.
  std::array<double, 6> w{};
  for (auto& v : w) v = g.uniform(-1, 1);
  const auto f_poly = project_2s([w](const std::array<double, 6>& s) {
    double acc = 1.0;
    for (int k = 0; k < 6; ++k) acc += w[k] * s[k] + 0.1 * w[k] * s[k] * s[(k + 1) % 6];
    return acc * std::exp(-0.5 * (s[0] + s[1] + s[2]));
  });
  for (int trial = 0; trial < 100; ++trial) {
    const auto c = random_like(g, proto);
    const auto swapped = apply_permutation(c, SpinPermutation::transposition(3, 0, 2));
    CHECK(evaluate(*f_poly, swapped) ==
          doctest::Approx(-evaluate(*f_poly, c)).epsilon(1e-12));
  }

  // Internal finite-difference derivatives agree with an independent stencil.
  const auto c = li_config({0.9, 0.2, -0.4}, {-0.5, 0.7, 0.3}, {0.2, -0.9, 0.8});
  const RawDerivatives raw = f_poly->raw_derivatives(c);
  const FdDerivatives fd = fd_derivatives(*f_poly, c, 2e-4);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(raw.grad[i].x == doctest::Approx(fd.grad[i].x).epsilon(1e-6));
    CHECK(raw.grad[i].y == doctest::Approx(fd.grad[i].y).epsilon(1e-6));
    CHECK(raw.grad[i].z == doctest::Approx(fd.grad[i].z).epsilon(1e-6));
    CHECK(raw.lap[i] == doctest::Approx(fd.lap[i]).epsilon(1e-5));
  }

  CHECK_THROWS_AS(project_2s(nullptr), std::invalid_argument);
}

TEST_CASE("p-sum expansion produces the three magnetic substates") {
  std::vector<DeterminantProduct> terms;
  const auto s1 = SlaterOrbital::s1(3.7);
  const auto p = SlaterOrbital::p2(0, 1.1);
  append_psum_configuration(terms, 0.25, {s1, p}, {s1, p});
  REQUIRE(terms.size() == 3);
  const OrbitalKind kinds[3] = {OrbitalKind::P2x, OrbitalKind::P2y, OrbitalKind::P2z};
  for (int m = 0; m < 3; ++m) {
    CHECK(terms[m].coeff == 0.25);
    CHECK(terms[m].up[1].kind == kinds[m]);
    CHECK(terms[m].down[1].kind == kinds[m]);
    CHECK(terms[m].up[0].kind == OrbitalKind::S1);
  }
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(CIWaveFunction({}, {Spin::Up}, true), std::invalid_argument);
  // non-square determinant for the layout
  DeterminantProduct bad{1.0, {SlaterOrbital::s1(1.0)}, {}};
  CHECK_THROWS_AS(CIWaveFunction({bad}, {Spin::Up, Spin::Up}, true),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_li_rhf(0.65, 2.7, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_he_triplet_hylleraas({{1, 1, 0, 1.0}}, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_he_triplet_hylleraas({}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(build_he_triplet_hylleraas({{1, 0, 0, 1.0}}, -2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_be_two_config(1.5, 3.7, 0.95, 0.6, 1.1),
                  std::invalid_argument);
}

TEST_CASE("default triplet basis is ordered and antisymmetric by construction") {
  const auto basis = default_triplet_basis(20);
  REQUIRE(basis.size() == 20);
  for (const auto& t : basis) {
    CHECK(t.i > t.j);
    CHECK(t.j >= 0);
    CHECK(t.k >= 0);
  }
  // first few terms by total degree
  CHECK(basis[0].i == 1);
  CHECK(basis[0].j == 0);
  CHECK(basis[0].k == 0);
}

TEST_CASE("local_scale is positive and detects off-node configurations") {
  const auto li = build_li_rhf(2.7, 0.65, 0.5);
  const auto generic = li_config({0.9, 0.1, -0.3}, {-0.4, 0.8, 0.2}, {0.3, -1.2, 0.9});
  CHECK(local_scale(*li, generic) > 0.0);
  CHECK_FALSE(is_effectively_zero(*li, generic));
}
