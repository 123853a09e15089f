#include "qmcnodes/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "qmcnodes/parallel.hpp"

namespace qmcnodes {

// ---------------------------------------------------------------------------
// Blocking analysis

BlockingResult blocking_error(const std::vector<double>& series) {
  if (series.size() < 64)
    throw std::invalid_argument("blocking needs a series of at least 64 values");

  BlockingResult result;
  std::vector<std::size_t> level_blocks;
  std::vector<double> data = series;
  while (data.size() >= 32) {
    const std::size_t n = data.size();
    double mean = 0.0;
    for (double x : data) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : data) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    result.level_errors.push_back(std::sqrt(var / static_cast<double>(n)));
    level_blocks.push_back(n);

    std::vector<double> half(n / 2);
    for (std::size_t i = 0; i < half.size(); ++i)
      half[i] = 0.5 * (data[2 * i] + data[2 * i + 1]);
    data = std::move(half);
  }

  // the plateau starts where one more halving no longer grows the estimate
  for (std::size_t k = 0; k + 1 < result.level_errors.size(); ++k) {
    const double cur = result.level_errors[k];
    const double nxt = result.level_errors[k + 1];
    if (nxt <= cur * 1.05) {
      result.error = std::max(cur, nxt);
      result.plateau = true;
      result.n_blocks = static_cast<int>(level_blocks[k + 1]);
      return result;
    }
  }
  result.error =
      *std::max_element(result.level_errors.begin(), result.level_errors.end());
  result.plateau = false;
  result.n_blocks = static_cast<int>(level_blocks.back());
  return result;
}

// ---------------------------------------------------------------------------
// Timestep extrapolation

EnergyEstimate timestep_extrapolate(
    const std::vector<std::pair<double, EnergyEstimate>>& points) {
  if (points.size() < 2)
    throw std::invalid_argument("extrapolation needs at least two tau points");
  bool distinct = false;
  for (const auto& [tau, est] : points) {
    if (!(tau > 0.0) || !std::isfinite(est.mean))
      throw std::invalid_argument("extrapolation points must have tau > 0");
    distinct = distinct || tau != points.front().first;
  }
  if (!distinct)
    throw std::invalid_argument("extrapolation needs distinct tau values");

  bool weighted = true;
  for (const auto& [tau, est] : points) weighted = weighted && est.error > 0.0;

  double s = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  for (const auto& [tau, est] : points) {
    const double w = weighted ? 1.0 / (est.error * est.error) : 1.0;
    s += w;
    sx += w * tau;
    sxx += w * tau * tau;
    sy += w * est.mean;
    sxy += w * tau * est.mean;
  }
  const double delta = s * sxx - sx * sx;
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("degenerate extrapolation fit");

  EnergyEstimate out;
  out.mean = (sxx * sy - sx * sxy) / delta;
  out.error = std::sqrt(sxx / delta);
  out.tau = 0.0;
  out.n_blocks = 0;
  out.plateau = true;
  for (const auto& [tau, est] : points) {
    out.acceptance += est.acceptance / static_cast<double>(points.size());
    out.plateau = out.plateau && est.plateau;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Variational Monte Carlo

ElectronConfiguration default_start_configuration(const WaveFunction& wf,
                                                  int nuclear_charge) {
  static const Vec3 kDirections[6] = {{1, 0, 0},  {0, 1, 0},  {0, 0, 1},
                                      {-1, 0, 0}, {0, -1, 0}, {0, 0, -1}};
  std::vector<Vec3> pos;
  for (std::size_t i = 0; i < wf.electron_count(); ++i)
    pos.push_back(kDirections[i % 6] * (0.5 + 0.3 * static_cast<double>(i)));
  return {pos, wf.spin_layout(), nuclear_charge};
}

namespace {

/// gradient_and_laplacian that treats exact nodes and coalescence as
/// unusable points instead of throwing (both are measure zero under the
/// sampling, but proposals do wander).
std::optional<Evaluation> try_gradient_and_laplacian(
    const WaveFunction& wf, const ElectronConfiguration& config) {
  try {
    return gradient_and_laplacian(wf, config);
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

}  // namespace

VMCResult vmc_run(const WaveFunction& wf, const ElectronConfiguration& start,
                  const VMCParams& params) {
  if (params.n_steps < 1 || !(params.step > 0.0) || params.burn_in < 0)
    throw std::invalid_argument("bad VMC parameters");
  wf.check_layout(start);

  RngStream rng(params.seed, 0);
  ElectronConfiguration current = start;
  auto eval = try_gradient_and_laplacian(wf, current);
  if (!eval) throw std::invalid_argument("VMC start configuration is on the node");

  VMCResult result;
  result.samples.reserve(params.n_steps);
  result.local_energies.reserve(params.n_steps);
  long accepted = 0, proposed = 0;

  const std::size_t n = current.size();
  std::vector<Vec3> pos(n);
  for (int step = -params.burn_in; step < params.n_steps; ++step) {
    pos = current.positions();
    for (auto& p : pos) {
      p.x += params.step * rng.normal();
      p.y += params.step * rng.normal();
      p.z += params.step * rng.normal();
    }
    const ElectronConfiguration proposal = current.with_positions(pos);
    const double ratio = wf.value(proposal) / eval->value;
    const double u = rng.uniform();
    ++proposed;
    if (u < ratio * ratio) {
      if (auto next = try_gradient_and_laplacian(wf, proposal)) {
        current = proposal;
        eval = next;
        ++accepted;
      }
    }
    if (step >= 0) {
      result.samples.push_back(current);
      result.local_energies.push_back(eval->local_energy);
    }
  }

  if (accepted == 0) throw std::runtime_error("VMC accepted no moves");

  double mean = 0.0;
  for (double e : result.local_energies) mean += e;
  mean /= static_cast<double>(result.local_energies.size());

  result.estimate.mean = mean;
  result.estimate.tau = 0.0;
  result.estimate.acceptance =
      static_cast<double>(accepted) / static_cast<double>(proposed);
  if (result.local_energies.size() >= 64) {
    const BlockingResult blocks = blocking_error(result.local_energies);
    result.estimate.error = blocks.error;
    result.estimate.n_blocks = blocks.n_blocks;
    result.estimate.plateau = blocks.plateau;
  } else {
    result.estimate.plateau = false;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Fixed-node diffusion Monte Carlo

namespace {

/// Umrigar velocity limiter: v -> v * (-1 + sqrt(1 + 2 v^2 tau)) / (v^2 tau),
/// smoothly capping the drift near nodes where |v| diverges.
Vec3 limited_drift(const Vec3& v, double tau) {
  const double v2t = v.norm2() * tau;
  if (v2t < 1e-12) return v * (1.0 - 0.5 * v2t);
  return v * ((-1.0 + std::sqrt(1.0 + 2.0 * v2t)) / v2t);
}

struct StepAccumulator {
  double weighted_energy = 0.0;  // sum w_i * clamped E_L,i
  double weight = 0.0;           // sum w_i
  long accepted = 0;
  long proposed = 0;
};

class DmcStepper {
 public:
  DmcStepper(const WaveFunction& guide, const NodeFunction* node, double tau)
      : guide_(guide), node_(node), tau_(tau), sqrt_tau_(std::sqrt(tau)) {}

  int boundary_sign(const ElectronConfiguration& config, double guide_value) const {
    if (node_) return node_sign(*node_, config);
    return guide_value > 0.0 ? 1 : (guide_value < 0.0 ? -1 : 0);
  }

  double clamp_energy(double e, double e_best) const {
    const double cap = 2.0 / sqrt_tau_;
    return std::min(std::max(e, e_best - cap), e_best + cap);
  }

  /// One drift-diffusion-branch step for a single walker; uses only the
  /// walker's own RNG stream, so the walk order never matters.
  void advance(Walker& w, double e_trial, double e_best, StepAccumulator& acc) const {
    const std::size_t n = w.config.size();
    std::vector<Vec3> pos = w.config.positions();
    double chi2 = 0.0;
    for (std::size_t e = 0; e < n; ++e) {
      const Vec3 chi{w.rng.normal(), w.rng.normal(), w.rng.normal()};
      chi2 += chi.norm2();
      pos[e] += limited_drift(w.eval.gradient[e], tau_) * tau_ + chi * sqrt_tau_;
    }
    const ElectronConfiguration proposal = w.config.with_positions(pos);
    ++acc.proposed;

    const double e_old = clamp_energy(w.eval.local_energy, e_best);
    double e_after = e_old;

    const auto next = try_gradient_and_laplacian(guide_, proposal);
    bool accepted = false;
    if (next &&
        boundary_sign(proposal, next->value) == boundary_sign(w.config, w.eval.value)) {
      // reverse-move Green's function over forward (forward is chi by
      // construction)
      double back2 = 0.0;
      for (std::size_t e = 0; e < n; ++e) {
        const Vec3 d = w.config.position(e) - proposal.position(e) -
                       limited_drift(next->gradient[e], tau_) * tau_;
        back2 += d.norm2();
      }
      const double ratio = next->value / w.eval.value;
      const double log_q = -back2 / (2.0 * tau_) + 0.5 * chi2;
      const double q = ratio * ratio * std::exp(log_q);
      accepted = w.rng.uniform() < q;
    } else {
      w.rng.uniform();  // keep the per-walker stream length move-independent
    }

    if (accepted) {
      const double e_new = clamp_energy(next->local_energy, e_best);
      e_after = e_new;
      w.weight *= std::exp(-tau_ * (0.5 * (e_old + e_new) - e_trial));
      w.config = proposal;
      w.eval = *next;
      w.age = 0;
      ++acc.accepted;
    } else {
      w.weight *= std::exp(-tau_ * (e_old - e_trial));
      ++w.age;
    }
    acc.weighted_energy += w.weight * e_after;
    acc.weight += w.weight;
  }

 private:
  const WaveFunction& guide_;
  const NodeFunction* node_;
  double tau_;
  double sqrt_tau_;
};

}  // namespace

DMCResult dmc_fixed_node(const WaveFunction& guide, NodeFunctionPtr node,
                         const ElectronConfiguration& start,
                         const DMCParams& params, int workers) {
  if (!(params.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (params.target_population < 100)
    throw std::invalid_argument("target population must be at least 100");
  if (params.equilibration < 0 || params.measurement < 1 ||
      params.et_update_period < 1)
    throw std::invalid_argument("bad DMC step counts");
  guide.check_layout(start);
  if (node) {
    if (node->electron_count() != guide.electron_count() ||
        node->spin_layout() != guide.spin_layout())
      throw std::invalid_argument("node function does not match the guide");
  }

  const DmcStepper stepper(guide, node.get(), params.tau);

  // initial population from |guide|^2: a thinned VMC chain
  VMCParams warmup;
  warmup.n_steps = params.target_population * 5;
  warmup.burn_in = 300;
  warmup.step = 0.4;
  warmup.seed = mix_key(params.seed, 0x564d43u);  // independent of walker streams
  const VMCResult chain = vmc_run(guide, start, warmup);

  std::vector<Walker> walkers;
  walkers.reserve(params.target_population);
  std::uint64_t next_lineage = 0;
  for (int i = 0; i < params.target_population; ++i) {
    const ElectronConfiguration& cfg =
        chain.samples[static_cast<std::size_t>(i) * 5 + 4];
    const auto eval = try_gradient_and_laplacian(guide, cfg);
    if (!eval) continue;  // skip the rare on-node sample
    if (stepper.boundary_sign(cfg, eval->value) == 0) continue;
    walkers.push_back(Walker{cfg, *eval, 1.0, 0, next_lineage,
                             RngStream(params.seed, next_lineage)});
    ++next_lineage;
  }
  if (static_cast<int>(walkers.size()) < params.target_population / 2)
    throw PopulationError(static_cast<int>(walkers.size()), 0,
                          "initial population mostly on the node");

  double e_best = 0.0;
  for (const auto& w : walkers) e_best += w.eval.local_energy;
  e_best /= static_cast<double>(walkers.size());
  double e_trial = e_best;

  DMCResult result;
  result.energy_series.reserve(params.measurement);
  result.population_series.reserve(params.measurement);
  long accepted = 0, proposed = 0;
  double population_sum = 0.0;
  result.min_population = static_cast<int>(walkers.size());
  result.max_population = static_cast<int>(walkers.size());

  const int low_bound = params.target_population / 5;
  const int high_bound = params.target_population * 5;
  const int total_steps = params.equilibration + params.measurement;
  std::vector<StepAccumulator> slots;

  for (int step = 0; step < total_steps; ++step) {
    // advance every walker in parallel; each touches only its own slot
    slots.assign(walkers.size(), StepAccumulator{});
    parallel_for(walkers.size(), workers, [&](std::size_t i) {
      stepper.advance(walkers[i], e_trial, e_best, slots[i]);
    });

    // reductions in walker order keep results worker-count independent
    StepAccumulator tally;
    for (const auto& s : slots) {
      tally.weighted_energy += s.weighted_energy;
      tally.weight += s.weight;
      tally.accepted += s.accepted;
      tally.proposed += s.proposed;
    }
    if (!(tally.weight > 0.0))
      throw PopulationError(0, step, "walker weights collapsed to zero");
    const double step_energy = tally.weighted_energy / tally.weight;
    e_best = (step == 0) ? step_energy : e_best + 0.05 * (step_energy - e_best);

    // branching: stochastic integerization, children get fresh streams
    std::vector<Walker> survivors;
    survivors.reserve(walkers.size() + walkers.size() / 8);
    for (auto& w : walkers) {
      const double u = w.rng.uniform();
      const int copies =
          std::min(5, static_cast<int>(std::floor(w.weight + u)));
      w.weight = 1.0;
      for (int c = 0; c < copies; ++c) {
        if (c == 0) {
          survivors.push_back(std::move(w));
        } else {
          Walker child = survivors.back();
          child.lineage = next_lineage++;
          child.rng = RngStream(params.seed, child.lineage);
          survivors.push_back(std::move(child));
        }
      }
    }
    walkers = std::move(survivors);

    const int population = static_cast<int>(walkers.size());
    if (population < low_bound || population > high_bound)
      throw PopulationError(population, step,
                            population < low_bound ? "population collapsed"
                                                   : "population exploded");

    if ((step + 1) % params.et_update_period == 0)
      e_trial = e_best - std::log(static_cast<double>(population) /
                                  static_cast<double>(params.target_population)) /
                             (params.et_update_period * params.tau);

    if (step >= params.equilibration) {
      result.energy_series.push_back(step_energy);
      result.population_series.push_back(population);
      accepted += tally.accepted;
      proposed += tally.proposed;
      population_sum += population;
      result.min_population = std::min(result.min_population, population);
      result.max_population = std::max(result.max_population, population);
    }
  }

  result.mean_population =
      population_sum / static_cast<double>(params.measurement);
  result.trial_energy = e_trial;

  double mean = 0.0;
  for (double e : result.energy_series) mean += e;
  mean /= static_cast<double>(result.energy_series.size());
  result.estimate.mean = mean;
  result.estimate.tau = params.tau;
  result.estimate.acceptance =
      static_cast<double>(accepted) / static_cast<double>(proposed);
  if (result.energy_series.size() >= 64) {
    const BlockingResult blocks = blocking_error(result.energy_series);
    result.estimate.error = blocks.error;
    result.estimate.n_blocks = blocks.n_blocks;
    result.estimate.plateau = blocks.plateau;
  } else {
    result.estimate.plateau = false;
  }
  return result;
}

}  // namespace qmcnodes
