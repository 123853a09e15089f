#pragma once

// Variational Monte Carlo and fixed-node diffusion Monte Carlo (importance
// sampled, branching walkers, mixed estimator), with blocking error analysis
// and timestep extrapolation.  Runs are bitwise reproducible for a given
// (seed, params) and independent of the worker count: every walker owns an
// RNG stream keyed by (run seed, lineage id) and reductions happen in walker
// order at per-step barriers.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmcnodes/geometry.hpp"
#include "qmcnodes/nodal.hpp"
#include "qmcnodes/rng.hpp"
#include "qmcnodes/wavefunction.hpp"

namespace qmcnodes {

// ---------------------------------------------------------------------------
// Statistics

struct EnergyEstimate {
  double mean = 0.0;
  double error = 0.0;     // 1 sigma from blocking (0 for zero-variance runs)
  int n_blocks = 0;       // blocks at the chosen blocking level
  double tau = 0.0;       // timestep used; 0 for VMC and extrapolations
  double acceptance = 0.0;
  bool plateau = true;    // blocking plateau reached
};

struct BlockingResult {
  double error = 0.0;
  bool plateau = false;
  int n_blocks = 0;                  // at the plateau level
  std::vector<double> level_errors;  // naive error per pairwise-halving level
};

/// Flyvbjerg-Petersen pairwise blocking.  The error bar is read off the
/// first level where another halving no longer grows the estimate (5%);
/// without such a level the largest estimate is returned and flagged.
/// Series shorter than 64 are rejected (std::invalid_argument).
BlockingResult blocking_error(const std::vector<double>& series);

/// Weighted least-squares fit E(tau) = E0 + k*tau, error from the fit
/// covariance.  Needs >= 2 distinct tau values (std::invalid_argument).
/// Estimates with zero error bars fall back to an unweighted fit.
EnergyEstimate timestep_extrapolate(
    const std::vector<std::pair<double, EnergyEstimate>>& points);

// ---------------------------------------------------------------------------
// Variational Monte Carlo

struct VMCParams {
  int n_steps = 10000;   // measurement steps (one sample each)
  double step = 0.5;     // gaussian proposal width per coordinate (bohr)
  int burn_in = 500;
  std::uint64_t seed = 1;
};

struct VMCResult {
  EnergyEstimate estimate;
  std::vector<ElectronConfiguration> samples;  // |Psi|^2 chain, one per step
  std::vector<double> local_energies;          // aligned with samples
};

/// Deterministic off-node starting point: electrons staggered on coordinate
/// axes at distinct radii.  The nuclear charge is the configuration's, not
/// the wave function's, so it is passed explicitly.
ElectronConfiguration default_start_configuration(const WaveFunction& wf,
                                                  int nuclear_charge);

/// Metropolis sampling of |Psi|^2 with all-electron gaussian proposals,
/// started from `start`.  The sample stream is the post-burn-in chain
/// (rejections repeat the configuration), directly usable as a
/// crossing_coincidence walk.  Throws std::runtime_error when no move is
/// ever accepted.
VMCResult vmc_run(const WaveFunction& wf, const ElectronConfiguration& start,
                  const VMCParams& params);

// ---------------------------------------------------------------------------
// Fixed-node diffusion Monte Carlo

struct DMCParams {
  double tau = 0.01;            // hartree^-1
  int target_population = 1000; // >= 100
  int equilibration = 500;      // steps before measurement
  int measurement = 20000;      // measured steps
  int et_update_period = 10;    // steps between trial-energy updates
  std::uint64_t seed = 1;
};

struct Walker {
  ElectronConfiguration config;
  Evaluation eval;      // cached at config
  double weight = 1.0;
  int age = 0;          // steps since last accepted move
  std::uint64_t lineage = 0;
  RngStream rng;        // stream keyed by (run seed, lineage)
};

/// Population left the survivable band; carries diagnostics for the abort
/// path (runtime exit code 3 at the CLI).
struct PopulationError : std::runtime_error {
  int population;
  int step;
  PopulationError(int population_, int step_, const std::string& message)
      : std::runtime_error(message), population(population_), step(step_) {}
};

struct DMCResult {
  EnergyEstimate estimate;          // mixed estimator
  double mean_population = 0.0;     // over the measurement phase
  int min_population = 0;
  int max_population = 0;
  double trial_energy = 0.0;        // final E_T
  std::vector<double> energy_series;    // per-step weighted local energy
  std::vector<int> population_series;   // per-step walker count
};

/// Importance-sampled fixed-node DMC: drift-diffusion proposals with the
/// Umrigar velocity limiter, Metropolis accept/reject on the approximate
/// Green's function, weight branching with stochastic integerization, and
/// log-population feedback on E_T every et_update_period steps.  Moves whose
/// node sign changes are rejected outright; when `node` is non-null its sign
/// overrides the guide's (guide amplitude |guide| * node sign), otherwise
/// the guide's own sign is the boundary.  Local energies are clamped to
/// E_best +- 2/sqrt(tau) for both branching and measurement.  Walker counts
/// outside [target/5, 5*target] throw PopulationError.  The initial
/// population is drawn from |guide|^2 by an internal VMC pass from `start`.
DMCResult dmc_fixed_node(const WaveFunction& guide, NodeFunctionPtr node,
                         const ElectronConfiguration& start,
                         const DMCParams& params, int workers = 1);

}  // namespace qmcnodes
