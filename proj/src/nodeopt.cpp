#include "qmcnodes/nodeopt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "json.hpp"
#include "qmcnodes/rng.hpp"

namespace qmcnodes {

namespace {

void validate_space(const ParameterSpace& space) {
  if (space.parameters.empty() || space.parameters.size() > 64)
    throw std::invalid_argument("parameter space must have 1..64 dimensions");
  for (const auto& p : space.parameters) {
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) ||
        !(p.lower < p.upper))
      throw std::invalid_argument("parameter bounds must be finite and ordered");
    if (!(p.start >= p.lower && p.start <= p.upper))
      throw std::invalid_argument("parameter start must lie within its bounds");
  }
}

std::vector<double> clip_to_box(std::vector<double> x,
                                const ParameterSpace& space) {
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], space.parameters[i].lower,
                      space.parameters[i].upper);
  return x;
}

/// Configurations drawn from |psi|^2 at one point of the family, with the
/// source values cached so other points can be scored by reweighting.
struct SampleSet {
  std::vector<ElectronConfiguration> configs;
  std::vector<double> source_value;
};

SampleSet draw_samples(const WaveFunction& source,
                       const ElectronConfiguration& start,
                       const OptimizeParams& params, std::uint64_t salt) {
  VMCParams vp;
  vp.n_steps = params.n_samples;
  vp.burn_in = params.burn_in;
  vp.step = params.step;
  vp.seed = mix_key(params.seed, salt);
  const VMCResult chain = vmc_run(source, start, vp);

  SampleSet set;
  set.configs = chain.samples;
  set.source_value.reserve(set.configs.size());
  for (const auto& c : set.configs) set.source_value.push_back(source.value(c));
  return set;
}

constexpr double kBadObjective = 1e30;

std::optional<Evaluation> try_evaluate(const WaveFunction& wf,
                                       const ElectronConfiguration& config) {
  try {
    return gradient_and_laplacian(wf, config);
  } catch (const std::domain_error&) {
    return std::nullopt;  // on a node or a particle coalescence
  }
}

/// Reweighted VMC energy of the candidate over a shared sample set:
/// sum w E_L / sum w with w = (psi_theta / psi_source)^2.  Falls back to a
/// rejection value when the overlap with the source density collapses.
double reweighted_energy(const WaveFunction& wf, const SampleSet& set) {
  double sw = 0.0, sw2 = 0.0, swe = 0.0;
  for (std::size_t i = 0; i < set.configs.size(); ++i) {
    const double v = wf.value(set.configs[i]);
    if (v == 0.0) continue;
    const auto eval = try_evaluate(wf, set.configs[i]);
    if (!eval) continue;
    const double ratio = v / set.source_value[i];
    const double w = ratio * ratio;
    sw += w;
    sw2 += w * w;
    swe += w * eval->local_energy;
  }
  if (sw <= 0.0) return kBadObjective;
  const double ess = sw * sw / sw2;
  if (ess < static_cast<double>(set.configs.size()) / 16.0)
    return kBadObjective;  // candidate too far from the sampled density
  return swe / sw;
}

}  // namespace

OptimizeResult optimize_variational(const WaveFunctionFamily& family,
                                    const ParameterSpace& space,
                                    const OptimizeParams& params) {
  validate_space(space);
  if (!family) throw std::invalid_argument("empty wave-function family");
  if (params.n_samples < 64 || params.budget < 4 || !(params.step > 0.0) ||
      params.burn_in < 0)
    throw std::invalid_argument("bad optimization parameters");

  const std::size_t dim = space.parameters.size();

  std::vector<double> theta(dim);
  for (std::size_t i = 0; i < dim; ++i) theta[i] = space.parameters[i].start;

  const ElectronConfiguration start =
      default_start_configuration(*family(theta), params.nuclear_charge);

  OptimizeResult result;
  int evals = 0;
  auto score = [&](const std::vector<double>& x, const SampleSet& set) {
    ++evals;
    return reweighted_energy(*family(x), set);
  };

  // Trust-region rounds: each round fixes one sample set drawn at theta and
  // runs a full simplex descent against it.  On a fixed set the objective is
  // deterministic, so the inner descent converges instead of random-walking
  // on resampling noise; between rounds the radius shrinks whenever the
  // minimum stops moving.
  double radius = 0.25;  // relative to each parameter span
  constexpr double kRadiusDone = 4e-3;
  bool converged = false;
  int stagnant_rounds = 0;
  std::uint64_t round = 0;

  while (evals < params.budget && !converged) {
    // sharper statistics once the search narrows: both the argmin scatter
    // and the ratio-estimator bias of the reweighted energy fall with the
    // sample count, so it grows as the trust radius shrinks
    OptimizeParams draw = params;
    if (radius < 0.05) {
      const double boost =
          std::min(16.0, (0.05 / radius) * (0.05 / radius));
      draw.n_samples = static_cast<int>(params.n_samples * boost);
    }
    const SampleSet set = draw_samples(*family(theta), start, draw, 1000 + round);
    ++round;

    // hard trust region: the reweighted objective is only accurate near the
    // sample source, so the whole inner search is boxed to theta +- radius
    ParameterSpace trust = space;
    for (std::size_t i = 0; i < dim; ++i) {
      const double span = space.parameters[i].upper - space.parameters[i].lower;
      trust.parameters[i].lower =
          std::max(space.parameters[i].lower, theta[i] - radius * span);
      trust.parameters[i].upper =
          std::min(space.parameters[i].upper, theta[i] + radius * span);
    }

    // simplex seeded at theta with one vertex per axis at the trust radius,
    // folded back inside when it would escape
    std::vector<std::vector<double>> vertices{theta};
    for (std::size_t i = 0; i < dim; ++i) {
      auto v = theta;
      const double span = space.parameters[i].upper - space.parameters[i].lower;
      double step = radius * span;
      if (v[i] + step > trust.parameters[i].upper) step = -step;
      v[i] += step;
      vertices.push_back(clip_to_box(std::move(v), trust));
    }
    std::vector<double> values(dim + 1);
    for (std::size_t i = 0; i <= dim && evals < params.budget; ++i)
      values[i] = score(vertices[i], set);

    // unbiased checkpoint: at the sample source all weights are one, so
    // values[0] is the plain VMC average on this set
    result.trace.push_back(result.trace.empty()
                               ? values[0]
                               : std::min(result.trace.back(), values[0]));

    const int inner_cap = 60 * static_cast<int>(dim);
    for (int inner = 0; inner < inner_cap && evals < params.budget; ++inner) {
      // order so that vertex 0 is best and vertex dim is worst
      std::vector<std::size_t> order(dim + 1);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
      });
      std::vector<std::vector<double>> sorted_v(dim + 1);
      std::vector<double> sorted_f(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) {
        sorted_v[i] = vertices[order[i]];
        sorted_f[i] = values[order[i]];
      }
      vertices = std::move(sorted_v);
      values = std::move(sorted_f);

      double diameter = 0.0;
      for (std::size_t i = 1; i <= dim; ++i)
        for (std::size_t k = 0; k < dim; ++k) {
          const double span =
              space.parameters[k].upper - space.parameters[k].lower;
          diameter = std::max(diameter,
                              std::abs(vertices[i][k] - vertices[0][k]) / span);
        }
      if (diameter < 0.05 * radius || diameter < 1e-4) break;

      std::vector<double> centroid(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t k = 0; k < dim; ++k)
          centroid[k] += vertices[i][k] / static_cast<double>(dim);

      auto blend = [&](double t) {
        std::vector<double> x(dim);
        for (std::size_t k = 0; k < dim; ++k)
          x[k] = centroid[k] + t * (centroid[k] - vertices[dim][k]);
        return clip_to_box(std::move(x), trust);
      };

      const auto reflected = blend(1.0);
      const double fr = score(reflected, set);
      if (fr < values[0] && evals < params.budget) {
        const auto expanded = blend(2.0);
        const double fe = score(expanded, set);
        if (fe < fr) {
          vertices[dim] = expanded;
          values[dim] = fe;
        } else {
          vertices[dim] = reflected;
          values[dim] = fr;
        }
      } else if (fr < values[dim - 1]) {
        vertices[dim] = reflected;
        values[dim] = fr;
      } else if (evals < params.budget) {
        const auto contracted = blend(fr < values[dim] ? 0.5 : -0.5);
        const double fc = score(contracted, set);
        if (fc < std::min(fr, values[dim])) {
          vertices[dim] = contracted;
          values[dim] = fc;
        } else {
          for (std::size_t i = 1; i <= dim && evals < params.budget; ++i) {
            for (std::size_t k = 0; k < dim; ++k)
              vertices[i][k] = 0.5 * (vertices[i][k] + vertices[0][k]);
            values[i] = score(vertices[i], set);
          }
        }
      }
    }

    const std::size_t best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    double moved = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double span = space.parameters[k].upper - space.parameters[k].lower;
      moved = std::max(moved, std::abs(vertices[best][k] - theta[k]) / span);
    }
    theta = vertices[best];

#ifdef QMCNODES_NODEOPT_TRACE
    std::fprintf(stderr, "round %2llu evals %3d radius %.4f moved %.4f theta0 %.5f\n",
                 static_cast<unsigned long long>(round), evals, radius, moved,
                 theta[0]);
#endif

    // the radius never grows: when the minimum saturates it we are still
    // marching and keep the same reach next round; anything less shrinks
    // the region, so noise alone can never hold it open
    if (moved < 0.3 * radius)
      radius *= 0.35;
    else if (moved < 0.9 * radius)
      radius *= 0.7;
    stagnant_rounds = moved < 0.005 ? stagnant_rounds + 1 : 0;
    if (radius < kRadiusDone || (radius < 0.02 && stagnant_rounds >= 3))
      converged = true;
  }

  result.parameters = theta;
  VMCParams fresh;
  fresh.n_steps = params.n_samples * 3;
  fresh.burn_in = params.burn_in;
  fresh.step = params.step;
  fresh.seed = mix_key(params.seed, 0xF0E5Du);
  const VMCResult check = vmc_run(*family(result.parameters), start, fresh);
  result.energy = check.estimate.mean;
  result.error = check.estimate.error;
  result.converged = converged;
  result.evaluations = evals;
  return result;
}

// ---------------------------------------------------------------------------
// Node scan

ScanResult scan_node_parameter(const WaveFunction& guide,
                               const std::vector<double>& a_values,
                               const ElectronConfiguration& start,
                               const DMCParams& params, int workers) {
  if (a_values.empty())
    throw std::invalid_argument("node scan needs at least one parameter value");
  if (std::find(a_values.begin(), a_values.end(), 0.0) == a_values.end())
    throw std::invalid_argument("node scan grid must include a = 0");
  {
    const ConjecturedBeNode probe(0.0);
    if (probe.electron_count() != guide.electron_count() ||
        probe.spin_layout() != guide.spin_layout())
      throw std::invalid_argument("guide does not match the Be node family");
  }

  ScanResult result;
  result.seed = params.seed;
  result.points.reserve(a_values.size());
  for (const double a : a_values) {
    const auto node = std::make_shared<const ConjecturedBeNode>(a);
    try {
      // common random numbers: every point reuses the same seed, so the
      // walks differ only through the node and energies compare tightly
      const DMCResult run = dmc_fixed_node(guide, node, start, params, workers);
      result.points.push_back(ScanPoint{a, run.estimate});
    } catch (const PopulationError& e) {
      char label[64];
      std::snprintf(label, sizeof label, "node scan aborted at a = %g: ", a);
      throw PopulationError(e.population, e.step, label + std::string(e.what()));
    }
  }

  result.argmin = static_cast<int>(
      std::min_element(result.points.begin(), result.points.end(),
                       [](const ScanPoint& a, const ScanPoint& b) {
                         return a.estimate.mean < b.estimate.mean;
                       }) -
      result.points.begin());
  if (result.points.size() > 1) {
    const auto& best = result.points[static_cast<std::size_t>(result.argmin)];
    double runner = std::numeric_limits<double>::infinity();
    double runner_error = 0.0;
    for (std::size_t i = 0; i < result.points.size(); ++i) {
      if (static_cast<int>(i) == result.argmin) continue;
      if (result.points[i].estimate.mean < runner) {
        runner = result.points[i].estimate.mean;
        runner_error = result.points[i].estimate.error;
      }
    }
    const double sigma = std::hypot(best.estimate.error, runner_error);
    result.significant = runner - best.estimate.mean >= 2.0 * sigma;
  }
  return result;
}

std::string scan_result_to_csv(const ScanResult& result) {
  std::string csv = "parameter,energy,error\n";
  for (const auto& p : result.points) {
    char row[96];
    std::snprintf(row, sizeof row, "%.17g,%.17g,%.17g\n", p.parameter,
                  p.estimate.mean, p.estimate.error);
    csv += row;
  }
  return csv;
}

std::string scan_result_to_json(const ScanResult& result) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : result.points) {
    points.push_back({{"parameter", p.parameter},
                      {"energy", p.estimate.mean},
                      {"error", p.estimate.error},
                      {"tau", p.estimate.tau},
                      {"acceptance", p.estimate.acceptance},
                      {"n_blocks", p.estimate.n_blocks},
                      {"plateau", p.estimate.plateau}});
  }
  const nlohmann::json doc = {{"seed", result.seed},
                              {"argmin", result.argmin},
                              {"significant", result.significant},
                              {"points", points}};
  return doc.dump(2);
}

}  // namespace qmcnodes
