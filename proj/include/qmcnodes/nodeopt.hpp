#pragma once

// Parameter optimization.  Two layers: variational optimization of
// wave-function parameters against the VMC energy (correlated sampling, so
// candidate parameters are compared on a shared sample set and most of the
// Monte Carlo noise cancels), and direct node optimization by scanning the
// fixed-node DMC energy over a one-parameter node family.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qmcnodes/geometry.hpp"
#include "qmcnodes/nodal.hpp"
#include "qmcnodes/qmc.hpp"
#include "qmcnodes/wavefunction.hpp"

namespace qmcnodes {

// ---------------------------------------------------------------------------
// Variational optimization

/// One scalar degree of freedom with a finite search box.
struct Parameter {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  double start = 0.5;  // within [lower, upper]
};

struct ParameterSpace {
  std::vector<Parameter> parameters;  // dimension 1..64
};

/// Builds a trial function from a point in parameter space.  Called many
/// times during a fit; must be a pure function of its argument.
using WaveFunctionFamily =
    std::function<std::shared_ptr<const WaveFunction>(const std::vector<double>&)>;

struct OptimizeParams {
  int n_samples = 2000;       // VMC samples per shared sample set
  int burn_in = 400;
  double step = 0.5;          // VMC proposal width
  int budget = 360;           // objective evaluations allowed in total
  std::uint64_t seed = 1;
  int nuclear_charge = 1;     // for the automatic start configuration
};

struct OptimizeResult {
  std::vector<double> parameters;  // best point found
  double energy = 0.0;             // fresh VMC estimate at that point
  double error = 0.0;
  bool converged = false;          // false: budget ran out while still moving
  int evaluations = 0;             // objective evaluations actually spent
  std::vector<double> trace;       // best-so-far objective, nonincreasing
};

/// Derivative-free descent (Nelder-Mead with box clipping) on the VMC
/// energy.  Each iteration draws one sample set from |psi|^2 at the current
/// best point and evaluates every candidate on it by reweighting, so the
/// comparisons that drive the simplex are correlated.  The returned energy
/// comes from an independent VMC run at the optimum.
OptimizeResult optimize_variational(const WaveFunctionFamily& family,
                                    const ParameterSpace& space,
                                    const OptimizeParams& params = {});

// ---------------------------------------------------------------------------
// Node scan

struct ScanPoint {
  double parameter = 0.0;   // the node coefficient a
  EnergyEstimate estimate;  // fixed-node DMC energy with that node
};

struct ScanResult {
  std::vector<ScanPoint> points;  // in the order scanned
  int argmin = -1;                // index of the lowest energy
  bool significant = false;       // argmin below runner-up by >= 2 sigma
  std::uint64_t seed = 0;
};

/// Fixed-node DMC energy across a grid of node parameters a, guiding with
/// the same wave function and overriding its node by ConjecturedBeNode(a).
/// Every point runs from the same seed (common random numbers), so energy
/// differences across the grid are partially correlated.  The grid must
/// include a = 0 (the plain product node) as the baseline.  A population
/// abort at any point propagates with the offending a in the message.
ScanResult scan_node_parameter(const WaveFunction& guide,
                               const std::vector<double>& a_values,
                               const ElectronConfiguration& start,
                               const DMCParams& params, int workers = 1);

/// "parameter,energy,error" with one row per scan point.
std::string scan_result_to_csv(const ScanResult& result);

/// JSON summary: seed, argmin, significance, and the full point list.
std::string scan_result_to_json(const ScanResult& result);

}  // namespace qmcnodes
