#pragma once

// Evaluable trial wave functions: CI combinations of Slater determinant
// products, antisymmetrized Hylleraas expansions, and an optional symmetric
// positive Jastrow factor.  All of them expose value, drift gradient,
// Laplacian ratio and local energy.

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qmcnodes/geometry.hpp"
#include "qmcnodes/kernels.hpp"
#include "qmcnodes/orbitals.hpp"

namespace qmcnodes {

/// Value and ratio derivatives at a configuration.  gradient[i] = grad_i Psi / Psi
/// (1/bohr), laplacian_over_psi = sum_i lap_i Psi / Psi (1/bohr^2),
/// local_energy = -laplacian_over_psi/2 + V (hartree).
struct Evaluation {
  double value = 0.0;
  std::vector<Vec3> gradient;
  double laplacian_over_psi = 0.0;
  double local_energy = 0.0;
};

/// Raw (un-divided) derivatives, safe to form at nodes.
struct RawDerivatives {
  double value = 0.0;
  std::vector<Vec3> grad;
  std::vector<double> lap;
};

class WaveFunction {
 public:
  virtual ~WaveFunction() = default;

  virtual std::size_t electron_count() const = 0;
  virtual const std::vector<Spin>& spin_layout() const = 0;
  /// True when the function is rotationally invariant (S state).
  virtual bool s_state() const = 0;

  virtual double value(const ElectronConfiguration& config) const = 0;
  virtual RawDerivatives raw_derivatives(const ElectronConfiguration& config) const = 0;

  /// Throws if config's electron count or spin labels do not match.
  void check_layout(const ElectronConfiguration& config) const;
};

using WaveFunctionPtr = std::shared_ptr<const WaveFunction>;

/// -Z sum_i 1/r_i + sum_{i<j} 1/r_ij.  Throws at particle coalescence.
double coulomb_potential(const ElectronConfiguration& config);

double evaluate(const WaveFunction& wf, const ElectronConfiguration& config);

/// Ratio derivatives + local energy.  Throws std::domain_error at an exact
/// node of the wave function (ratios undefined) or at coalescence.
Evaluation gradient_and_laplacian(const WaveFunction& wf,
                                  const ElectronConfiguration& config);

double local_energy(const WaveFunction& wf, const ElectronConfiguration& config);

/// max |Psi| over a deterministic probe set on a 0.1-bohr ball around config;
/// the scale behind "value is zero" checks.
double local_scale(const WaveFunction& wf, const ElectronConfiguration& config,
                   double radius = 0.1);

/// |Psi(config)| < 1e-10 * local_scale.
bool is_effectively_zero(const WaveFunction& wf, const ElectronConfiguration& config);

// ---------------------------------------------------------------------------
// CI wave functions

/// Product of an up-spin and a down-spin determinant with a coefficient.
struct DeterminantProduct {
  double coeff = 1.0;
  std::vector<SlaterOrbital> up;
  std::vector<SlaterOrbital> down;
};

class CIWaveFunction : public WaveFunction {
 public:
  CIWaveFunction(std::vector<DeterminantProduct> terms, std::vector<Spin> layout,
                 bool s_state);

  std::size_t electron_count() const override { return layout_.size(); }
  const std::vector<Spin>& spin_layout() const override { return layout_; }
  bool s_state() const override { return s_state_; }
  const std::vector<DeterminantProduct>& terms() const { return terms_; }

  double value(const ElectronConfiguration& config) const override;
  RawDerivatives raw_derivatives(const ElectronConfiguration& config) const override;

 private:
  std::vector<DeterminantProduct> terms_;
  std::vector<Spin> layout_;
  std::vector<std::size_t> up_idx_, down_idx_;
  bool s_state_;
};

/// Appends the m-summed combination sum_m D_up(..., 2p_m) * D_down(..., 2p_m)
/// to `terms` (the S-state form of a p^2 configuration).  The input orbital
/// lists carry one P2x orbital as the placeholder for the 2p slot.
void append_psum_configuration(std::vector<DeterminantProduct>& terms, double coeff,
                               std::vector<SlaterOrbital> up,
                               std::vector<SlaterOrbital> down);

// ---------------------------------------------------------------------------
// Hylleraas expansions

/// One Hylleraas term for a two-electron triplet: powers (i, j, k) of
/// (r1, r2, r12); antisymmetrized as (r1^i r2^j - r1^j r2^i) r12^k.
struct TripletHylleraasTerm {
  int i = 0, j = 0, k = 0;
  double coeff = 1.0;
};

/// One term of the generating function f for the lithium doublet-S
/// combination: powers over the argument slots (s1, s2, s3, s12, s13, s23).
struct DoubletSTerm {
  std::array<int, 6> powers{};
  double coeff = 1.0;
};

/// Sum of images of a power-product-times-exponential over the interparticle
/// distance variables of a 2- or 3-electron system.
class HylleraasWaveFunction : public WaveFunction {
 public:
  std::size_t electron_count() const override { return layout_.size(); }
  const std::vector<Spin>& spin_layout() const override { return layout_; }
  bool s_state() const override { return true; }

  double value(const ElectronConfiguration& config) const override;
  RawDerivatives raw_derivatives(const ElectronConfiguration& config) const override;

  // Construction data, kept for file round-trips and reporting.
  const std::vector<TripletHylleraasTerm>& triplet_terms() const { return triplet_terms_; }
  const std::vector<DoubletSTerm>& doublet_terms() const { return doublet_terms_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  friend std::shared_ptr<HylleraasWaveFunction> build_he_triplet_hylleraas(
      const std::vector<TripletHylleraasTerm>& terms, double alpha);
  friend std::shared_ptr<HylleraasWaveFunction> build_he_triplet_open(
      const std::vector<TripletHylleraasTerm>& terms, double alpha, double beta);
  friend std::shared_ptr<HylleraasWaveFunction> project_doublet_s(
      const std::vector<DoubletSTerm>& f_terms, double alpha, double beta);

 private:
  struct Image {
    kernels::TermTable table;
    std::array<double, kernels::kMaxVars> lambda{};
  };

  struct DistVar {
    int i = 0;
    int j = -1;  // -1: nucleus-electron distance
  };

  HylleraasWaveFunction() = default;

  std::vector<Spin> layout_;
  std::vector<DistVar> vars_;
  std::vector<Image> images_;
  std::vector<TripletHylleraasTerm> triplet_terms_;
  std::vector<DoubletSTerm> doublet_terms_;
  double alpha_ = 0.0, beta_ = 0.0;
};

/// Triplet two-electron expansion; every term vanishes at r1 = r2 by
/// construction.  Terms with i == j are identically zero and rejected.
std::shared_ptr<HylleraasWaveFunction> build_he_triplet_hylleraas(
    const std::vector<TripletHylleraasTerm>& terms, double alpha);

/// Open-shell triplet with distinct inner/outer screening:
///   sum c (r1^i r2^j e^(-a r1 - b r2) - r1^j r2^i e^(-b r1 - a r2)) r12^k.
/// Equals the common-exponent expansion when beta == alpha; with distinct
/// exponents the i == j terms survive, and every term still vanishes at
/// r1 = r2.  The bare (0,0,0) term is the classic two-parameter 1s1s' form.
std::shared_ptr<HylleraasWaveFunction> build_he_triplet_open(
    const std::vector<TripletHylleraasTerm>& terms, double alpha, double beta);

/// Convenience: the default n-term basis (antisymmetrized powers ordered by
/// total degree) with unit coefficients.
std::vector<TripletHylleraasTerm> default_triplet_basis(int n_terms);

/// Four-term doublet-S combination
///   Psi = f(r1,r2,r3,r12,r13,r23) + f(r2,r1,r3,r12,r23,r13)
///       - f(r3,r2,r1,r23,r13,r12) - f(r2,r3,r1,r23,r12,r13)
/// with f = sum of power products times exp(-alpha(s1+s2) - beta s3).
/// Antisymmetric under the 1<->3 like-spin exchange; does not constrain a
/// node at r1 = r3.  Electron layout: (up, down, up).
std::shared_ptr<HylleraasWaveFunction> project_doublet_s(
    const std::vector<DoubletSTerm>& f_terms, double alpha, double beta);

/// Value of the same four-term combination for an arbitrary generating
/// function (tests and one-off probes; no derivatives).
double doublet_s_value(const std::function<double(const std::array<double, 6>&)>& f,
                       const ElectronConfiguration& config);

/// Wrap an arbitrary generating function f(r1,r2,r3,r12,r13,r23) as a
/// doublet-S wave function.  Values are the exact four-term combination;
/// derivatives fall back to central finite differences since f is opaque.
WaveFunctionPtr project_2s(std::function<double(const std::array<double, 6>&)> f);

// ---------------------------------------------------------------------------
// Jastrow factor and wrapper

/// exp(sum_pairs u(r_ij) + sum_i u_en(r_i)) with u(r) = a r / (1 + b r).
/// Strictly positive and symmetric under same-spin exchange: it never moves
/// a node.  Default cusp parameters: 1/4 parallel, 1/2 antiparallel pairs.
struct JastrowFactor {
  double a_parallel = 0.25, b_parallel = 1.0;
  double a_antiparallel = 0.5, b_antiparallel = 1.0;
  double a_en = 0.0, b_en = 1.0;

  double log_value(const ElectronConfiguration& config) const;
  /// grad[i] += grad_i u, lap[i] += lap_i u (log-derivatives of the factor).
  void log_derivatives(const ElectronConfiguration& config, std::vector<Vec3>& grad,
                       std::vector<double>& lap) const;
};

class JastrowWrappedWaveFunction : public WaveFunction {
 public:
  JastrowWrappedWaveFunction(WaveFunctionPtr base, JastrowFactor jastrow)
      : base_(std::move(base)), jastrow_(jastrow) {}

  std::size_t electron_count() const override { return base_->electron_count(); }
  const std::vector<Spin>& spin_layout() const override { return base_->spin_layout(); }
  bool s_state() const override { return base_->s_state(); }
  const WaveFunction& base() const { return *base_; }
  const JastrowFactor& jastrow() const { return jastrow_; }

  double value(const ElectronConfiguration& config) const override;
  RawDerivatives raw_derivatives(const ElectronConfiguration& config) const override;

 private:
  WaveFunctionPtr base_;
  JastrowFactor jastrow_;
};

// ---------------------------------------------------------------------------
// System builders

/// (2s(r1) 1s(r3) - 1s(r1) 2s(r3)) 1s(r2); up electrons {1,3}, down {2}.
/// The monotone 2s form (requires zeta_2s <= zeta_1s) makes the zero set
/// exactly r1 = r3, with the value positive where r1 > r3.
std::shared_ptr<CIWaveFunction> build_li_rhf(double zeta_1s, double zeta_2s, double q);

/// Be (1s)^2(2s)^2 determinant product; node exactly (r1-r2)(r3-r4) = 0 for
/// the monotone 2s form, with matching sign.
std::shared_ptr<CIWaveFunction> build_be_hf(double zeta_1s, double zeta_2s, double q);

/// Be two-configuration function (1s)^2(2s)^2 + c2 (1s)^2(2p)^2, the 2p^2
/// part m-summed; rotation invariant for any c2.
std::shared_ptr<CIWaveFunction> build_be_two_config(double c2, double zeta_1s,
                                                    double zeta_2s, double q,
                                                    double zeta_2p);

/// Single-electron 1s function (hydrogenic when zeta = Z).
std::shared_ptr<CIWaveFunction> build_hydrogenic_1s(double zeta);

std::shared_ptr<JastrowWrappedWaveFunction> with_jastrow(WaveFunctionPtr base,
                                                         JastrowFactor jastrow);

}  // namespace qmcnodes
