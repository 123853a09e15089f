#include "qmcnodes/wavefunction.hpp"

#include <cmath>
#include <stdexcept>

namespace qmcnodes {

void WaveFunction::check_layout(const ElectronConfiguration& config) const {
  if (config.size() != electron_count())
    throw std::invalid_argument("electron count does not match wave function");
  const auto& layout = spin_layout();
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (config.spin(i) != layout[i])
      throw std::invalid_argument("spin labels do not match wave function");
}

double coulomb_potential(const ElectronConfiguration& config) {
  const std::size_t n = config.size();
  const double z = config.nuclear_charge();
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ri = config.position(i).norm();
    if (ri == 0.0) throw std::domain_error("electron coincides with the nucleus");
    v -= z / ri;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double rij = (config.position(i) - config.position(j)).norm();
      if (rij == 0.0) throw std::domain_error("coincident electrons");
      v += 1.0 / rij;
    }
  }
  return v;
}

double evaluate(const WaveFunction& wf, const ElectronConfiguration& config) {
  wf.check_layout(config);
  return wf.value(config);
}

Evaluation gradient_and_laplacian(const WaveFunction& wf,
                                  const ElectronConfiguration& config) {
  wf.check_layout(config);
  RawDerivatives raw = wf.raw_derivatives(config);
  if (raw.value == 0.0)
    throw std::domain_error("derivative ratios undefined on the node");
  Evaluation ev;
  ev.value = raw.value;
  ev.gradient.resize(raw.grad.size());
  double lap = 0.0;
  for (std::size_t i = 0; i < raw.grad.size(); ++i) {
    ev.gradient[i] = raw.grad[i] * (1.0 / raw.value);
    lap += raw.lap[i];
  }
  ev.laplacian_over_psi = lap / raw.value;
  ev.local_energy = -0.5 * ev.laplacian_over_psi + coulomb_potential(config);
  return ev;
}

double local_energy(const WaveFunction& wf, const ElectronConfiguration& config) {
  return gradient_and_laplacian(wf, config).local_energy;
}

double local_scale(const WaveFunction& wf, const ElectronConfiguration& config,
                   double radius) {
  wf.check_layout(config);
  double scale = std::abs(wf.value(config));
  std::vector<Vec3> probe = config.positions();
  for (std::size_t e = 0; e < config.size(); ++e) {
    for (int dim = 0; dim < 3; ++dim) {
      double* coord = dim == 0 ? &probe[e].x : dim == 1 ? &probe[e].y : &probe[e].z;
      const double saved = *coord;
      for (const double sgn : {1.0, -1.0}) {
        *coord = saved + sgn * radius;
        scale = std::max(scale, std::abs(wf.value(config.with_positions(probe))));
      }
      *coord = saved;
    }
  }
  return scale;
}

bool is_effectively_zero(const WaveFunction& wf, const ElectronConfiguration& config) {
  const double scale = local_scale(wf, config);
  // a zero scale means the function vanishes across the whole probe stencil
  // (possible for product-structured zeros), which is as on-node as it gets
  if (scale == 0.0) return true;
  return std::abs(evaluate(wf, config)) < 1e-10 * scale;
}

// ---------------------------------------------------------------------------
// Small determinants with cofactors (C[a][b] = d det / d M[a][b])

namespace {

constexpr std::size_t kMaxDet = 3;

struct DetResult {
  double det = 0.0;
  double cof[kMaxDet][kMaxDet] = {};
};

DetResult det_and_cofactors(const double m[kMaxDet][kMaxDet], std::size_t n) {
  DetResult r;
  switch (n) {
    case 1:
      r.det = m[0][0];
      r.cof[0][0] = 1.0;
      break;
    case 2:
      r.det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
      r.cof[0][0] = m[1][1];
      r.cof[0][1] = -m[1][0];
      r.cof[1][0] = -m[0][1];
      r.cof[1][1] = m[0][0];
      break;
    case 3:
      r.cof[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
      r.cof[0][1] = -(m[1][0] * m[2][2] - m[1][2] * m[2][0]);
      r.cof[0][2] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
      r.cof[1][0] = -(m[0][1] * m[2][2] - m[0][2] * m[2][1]);
      r.cof[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
      r.cof[1][2] = -(m[0][0] * m[2][1] - m[0][1] * m[2][0]);
      r.cof[2][0] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
      r.cof[2][1] = -(m[0][0] * m[1][2] - m[0][2] * m[1][0]);
      r.cof[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
      r.det = m[0][0] * r.cof[0][0] + m[0][1] * r.cof[0][1] + m[0][2] * r.cof[0][2];
      break;
    default:
      throw std::invalid_argument("determinants larger than 3x3 are not supported");
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// CIWaveFunction

CIWaveFunction::CIWaveFunction(std::vector<DeterminantProduct> terms,
                               std::vector<Spin> layout, bool s_state)
    : terms_(std::move(terms)), layout_(std::move(layout)), s_state_(s_state) {
  if (terms_.empty()) throw std::invalid_argument("CI wave function needs >= 1 term");
  for (std::size_t i = 0; i < layout_.size(); ++i)
    (layout_[i] == Spin::Up ? up_idx_ : down_idx_).push_back(i);
  for (const auto& t : terms_) {
    if (t.up.size() != up_idx_.size() || t.down.size() != down_idx_.size())
      throw std::invalid_argument("determinant is not square for this spin layout");
    if (t.up.size() > kMaxDet || t.down.size() > kMaxDet)
      throw std::invalid_argument("determinants larger than 3x3 are not supported");
  }
}

double CIWaveFunction::value(const ElectronConfiguration& config) const {
  const std::size_t n = config.size();
  std::vector<ExpCache> cache;
  cache.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cache.emplace_back(config.position(i).norm());

  double psi = 0.0;
  double m[kMaxDet][kMaxDet];
  for (const auto& term : terms_) {
    double prod = term.coeff;
    for (const auto* side : {&term.up, &term.down}) {
      const auto& idx = side == &term.up ? up_idx_ : down_idx_;
      if (idx.empty()) continue;
      for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < side->size(); ++b)
          m[a][b] = orbital_value((*side)[b], config.position(idx[a]), cache[idx[a]]);
      prod *= det_and_cofactors(m, idx.size()).det;
    }
    psi += prod;
  }
  return psi;
}

RawDerivatives CIWaveFunction::raw_derivatives(const ElectronConfiguration& config) const {
  const std::size_t n = config.size();
  std::vector<ExpCache> cache;
  cache.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cache.emplace_back(config.position(i).norm());

  RawDerivatives out;
  out.grad.assign(n, Vec3{});
  out.lap.assign(n, 0.0);

  OrbitalValue ov_up[kMaxDet][kMaxDet], ov_dn[kMaxDet][kMaxDet];
  double m_up[kMaxDet][kMaxDet], m_dn[kMaxDet][kMaxDet];

  for (const auto& term : terms_) {
    const std::size_t nu = term.up.size(), nd = term.down.size();
    for (std::size_t a = 0; a < nu; ++a)
      for (std::size_t b = 0; b < nu; ++b) {
        ov_up[a][b] = orbital_derivatives(term.up[b], config.position(up_idx_[a]),
                                          cache[up_idx_[a]]);
        m_up[a][b] = ov_up[a][b].value;
      }
    for (std::size_t a = 0; a < nd; ++a)
      for (std::size_t b = 0; b < nd; ++b) {
        ov_dn[a][b] = orbital_derivatives(term.down[b], config.position(down_idx_[a]),
                                          cache[down_idx_[a]]);
        m_dn[a][b] = ov_dn[a][b].value;
      }
    const DetResult du = nu ? det_and_cofactors(m_up, nu) : DetResult{1.0, {}};
    const DetResult dd = nd ? det_and_cofactors(m_dn, nd) : DetResult{1.0, {}};

    out.value += term.coeff * du.det * dd.det;

    const double wu = term.coeff * dd.det;  // weight of d(det_up)
    for (std::size_t a = 0; a < nu; ++a) {
      Vec3 g{};
      double l = 0.0;
      for (std::size_t b = 0; b < nu; ++b) {
        g += ov_up[a][b].grad * du.cof[a][b];
        l += ov_up[a][b].lap * du.cof[a][b];
      }
      out.grad[up_idx_[a]] += g * wu;
      out.lap[up_idx_[a]] += l * wu;
    }
    const double wd = term.coeff * du.det;
    for (std::size_t a = 0; a < nd; ++a) {
      Vec3 g{};
      double l = 0.0;
      for (std::size_t b = 0; b < nd; ++b) {
        g += ov_dn[a][b].grad * dd.cof[a][b];
        l += ov_dn[a][b].lap * dd.cof[a][b];
      }
      out.grad[down_idx_[a]] += g * wd;
      out.lap[down_idx_[a]] += l * wd;
    }
  }
  return out;
}

void append_psum_configuration(std::vector<DeterminantProduct>& terms, double coeff,
                               std::vector<SlaterOrbital> up,
                               std::vector<SlaterOrbital> down) {
  auto is_p = [](const SlaterOrbital& o) {
    return o.kind == OrbitalKind::P2x || o.kind == OrbitalKind::P2y ||
           o.kind == OrbitalKind::P2z;
  };
  for (int m = 0; m < 3; ++m) {
    DeterminantProduct t;
    t.coeff = coeff;
    t.up = up;
    t.down = down;
    const OrbitalKind kind = m == 0   ? OrbitalKind::P2x
                             : m == 1 ? OrbitalKind::P2y
                                      : OrbitalKind::P2z;
    for (auto* side : {&t.up, &t.down})
      for (auto& o : *side)
        if (is_p(o)) o.kind = kind;
    terms.push_back(std::move(t));
  }
}

// ---------------------------------------------------------------------------
// HylleraasWaveFunction

namespace {

// power tables live on the stack; keeps stride = max_power + 1 within bounds
constexpr int kMaxTablePower = 31;

void check_table_power(const kernels::TermTable& table) {
  if (table.max_power > kMaxTablePower)
    throw std::invalid_argument("polynomial powers above 31 are not supported");
}

}  // namespace

double HylleraasWaveFunction::value(const ElectronConfiguration& config) const {
  const int nv = static_cast<int>(vars_.size());
  double dist[kernels::kMaxVars];
  for (int v = 0; v < nv; ++v) {
    const auto& dv = vars_[v];
    dist[v] = dv.j < 0 ? config.position(dv.i).norm()
                       : (config.position(dv.i) - config.position(dv.j)).norm();
  }
  int max_power = 0;
  for (const auto& im : images_) max_power = std::max(max_power, im.table.max_power);
  const int stride = max_power + 1;
  double tables[kernels::kMaxVars * 32];
  kernels::fill_power_tables(dist, nv, max_power, tables, stride);

  double psi = 0.0;
  for (const auto& im : images_) {
    double expo = 0.0;
    for (int v = 0; v < nv; ++v) expo -= im.lambda[v] * dist[v];
    psi += std::exp(expo) * kernels::term_sum(im.table, tables, stride);
  }
  return psi;
}

RawDerivatives HylleraasWaveFunction::raw_derivatives(
    const ElectronConfiguration& config) const {
  const int nv = static_cast<int>(vars_.size());
  const std::size_t n = layout_.size();

  double dist[kernels::kMaxVars];
  Vec3 diff[kernels::kMaxVars];  // vector whose norm is dist (r_i or r_i - r_j)
  for (int v = 0; v < nv; ++v) {
    const auto& dv = vars_[v];
    diff[v] = dv.j < 0 ? config.position(dv.i)
                       : config.position(dv.i) - config.position(dv.j);
    dist[v] = diff[v].norm();
  }

  int max_power = 0;
  for (const auto& im : images_) max_power = std::max(max_power, im.table.max_power);
  const int stride = max_power + 1;
  double tables[kernels::kMaxVars * 32];
  kernels::fill_power_tables(dist, nv, max_power, tables, stride);

  // accumulate F, dF/d r_v, d2F/(d r_v d r_w) over the images
  double f = 0.0;
  double d1[kernels::kMaxVars] = {};
  double d2[kernels::kMaxVars][kernels::kMaxVars] = {};
  kernels::Moments mom;
  for (const auto& im : images_) {
    kernels::term_moments(im.table, tables, stride, mom);
    double expo = 0.0;
    for (int v = 0; v < nv; ++v) expo -= im.lambda[v] * dist[v];
    const double env = std::exp(expo);

    const double p0 = mom.s0;
    double pv[kernels::kMaxVars];
    for (int v = 0; v < nv; ++v) pv[v] = mom.s1[v] / dist[v];
    f += env * p0;
    for (int v = 0; v < nv; ++v) {
      const double lv = im.lambda[v];
      d1[v] += env * (pv[v] - lv * p0);
      for (int w = 0; w <= v; ++w) {
        const double lw = im.lambda[w];
        const double pvw = v == w
                               ? (mom.s2_at(v, v) - mom.s1[v]) / (dist[v] * dist[v])
                               : mom.s2_at(v, w) / (dist[v] * dist[w]);
        const double t = env * (pvw - lv * pv[w] - lw * pv[v] + lv * lw * p0);
        d2[v][w] += t;
        if (v != w) d2[w][v] += t;
      }
    }
  }

  // chain rule to Cartesian per-electron gradient and Laplacian
  RawDerivatives out;
  out.value = f;
  out.grad.assign(n, Vec3{});
  out.lap.assign(n, 0.0);
  for (std::size_t e = 0; e < n; ++e) {
    // unit direction of each variable w.r.t. electron e (zero if uninvolved)
    Vec3 u[kernels::kMaxVars];
    bool involved[kernels::kMaxVars] = {};
    for (int v = 0; v < nv; ++v) {
      const auto& dv = vars_[v];
      if (dv.i == static_cast<int>(e))
        u[v] = diff[v] * (1.0 / dist[v]);
      else if (dv.j == static_cast<int>(e))
        u[v] = diff[v] * (-1.0 / dist[v]);
      else
        continue;
      involved[v] = true;
    }
    Vec3 g{};
    double l = 0.0;
    for (int v = 0; v < nv; ++v) {
      if (!involved[v]) continue;
      g += u[v] * d1[v];
      l += d2[v][v] + 2.0 * d1[v] / dist[v];
      for (int w = 0; w < v; ++w)
        if (involved[w]) l += 2.0 * d2[v][w] * u[v].dot(u[w]);
    }
    out.grad[e] = g;
    out.lap[e] = l;
  }
  return out;
}

std::shared_ptr<HylleraasWaveFunction> build_he_triplet_hylleraas(
    const std::vector<TripletHylleraasTerm>& terms, double alpha) {
  if (terms.empty()) throw std::invalid_argument("need >= 1 Hylleraas term");
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive");
  auto wf = std::shared_ptr<HylleraasWaveFunction>(new HylleraasWaveFunction());
  wf->layout_ = {Spin::Up, Spin::Up};
  wf->vars_ = {{0, -1}, {1, -1}, {0, 1}};  // r1, r2, r12
  wf->triplet_terms_ = terms;
  wf->alpha_ = alpha;

  std::vector<std::pair<double, std::array<int, kernels::kMaxVars>>> monomials;
  for (const auto& t : terms) {
    if (t.i == t.j)
      throw std::invalid_argument("triplet term with i == j vanishes identically");
    monomials.push_back({t.coeff, {t.i, t.j, t.k, 0, 0, 0}});
    monomials.push_back({-t.coeff, {t.j, t.i, t.k, 0, 0, 0}});
  }
  HylleraasWaveFunction::Image im;
  im.table = kernels::TermTable::build(3, monomials);
  check_table_power(im.table);
  im.lambda = {alpha, alpha, 0.0, 0.0, 0.0, 0.0};
  wf->images_.push_back(std::move(im));
  return wf;
}

std::shared_ptr<HylleraasWaveFunction> build_he_triplet_open(
    const std::vector<TripletHylleraasTerm>& terms, double alpha, double beta) {
  if (terms.empty()) throw std::invalid_argument("need >= 1 Hylleraas term");
  if (alpha <= 0.0 || beta <= 0.0)
    throw std::invalid_argument("exponents must be positive");
  auto wf = std::shared_ptr<HylleraasWaveFunction>(new HylleraasWaveFunction());
  wf->layout_ = {Spin::Up, Spin::Up};
  wf->vars_ = {{0, -1}, {1, -1}, {0, 1}};  // r1, r2, r12
  wf->triplet_terms_ = terms;
  wf->alpha_ = alpha;
  wf->beta_ = beta;

  // the direct and exchanged halves carry different screenings, so they
  // live in separate images instead of one merged monomial table
  std::vector<std::pair<double, std::array<int, kernels::kMaxVars>>> direct;
  std::vector<std::pair<double, std::array<int, kernels::kMaxVars>>> exchanged;
  for (const auto& t : terms) {
    if (t.i == t.j && alpha == beta)
      throw std::invalid_argument("triplet term with i == j vanishes identically");
    direct.push_back({t.coeff, {t.i, t.j, t.k, 0, 0, 0}});
    exchanged.push_back({-t.coeff, {t.j, t.i, t.k, 0, 0, 0}});
  }
  HylleraasWaveFunction::Image direct_im;
  direct_im.table = kernels::TermTable::build(3, direct);
  check_table_power(direct_im.table);
  direct_im.lambda = {alpha, beta, 0.0, 0.0, 0.0, 0.0};
  wf->images_.push_back(std::move(direct_im));

  HylleraasWaveFunction::Image exchanged_im;
  exchanged_im.table = kernels::TermTable::build(3, exchanged);
  check_table_power(exchanged_im.table);
  exchanged_im.lambda = {beta, alpha, 0.0, 0.0, 0.0, 0.0};
  wf->images_.push_back(std::move(exchanged_im));
  return wf;
}

std::vector<TripletHylleraasTerm> default_triplet_basis(int n_terms) {
  if (n_terms < 1) throw std::invalid_argument("need >= 1 term");
  std::vector<TripletHylleraasTerm> terms;
  for (int omega = 1; static_cast<int>(terms.size()) < n_terms; ++omega) {
    for (int k = 0; k <= omega; ++k) {
      const int rem = omega - k;
      for (int j = 0; 2 * j < rem; ++j) {
        terms.push_back({rem - j, j, k, 1.0});
        if (static_cast<int>(terms.size()) == n_terms) return terms;
      }
    }
  }
  return terms;
}

std::shared_ptr<HylleraasWaveFunction> project_doublet_s(
    const std::vector<DoubletSTerm>& f_terms, double alpha, double beta) {
  if (f_terms.empty()) throw std::invalid_argument("need >= 1 term");
  if (alpha <= 0.0 || beta <= 0.0) throw std::invalid_argument("exponents must be positive");
  auto wf = std::shared_ptr<HylleraasWaveFunction>(new HylleraasWaveFunction());
  wf->layout_ = {Spin::Up, Spin::Down, Spin::Up};
  wf->vars_ = {{0, -1}, {1, -1}, {2, -1}, {0, 1}, {0, 2}, {1, 2}};
  wf->doublet_terms_ = f_terms;
  wf->alpha_ = alpha;
  wf->beta_ = beta;

  // argument-slot -> distance-variable mappings of the four images
  static constexpr std::array<std::array<int, 6>, 4> kMaps{{
      {0, 1, 2, 3, 4, 5},
      {1, 0, 2, 3, 5, 4},
      {2, 1, 0, 5, 4, 3},
      {1, 2, 0, 5, 3, 4},
  }};
  static constexpr std::array<double, 4> kSigns{+1.0, +1.0, -1.0, -1.0};
  const std::array<double, 6> slot_lambda{alpha, alpha, beta, 0.0, 0.0, 0.0};

  for (int image = 0; image < 4; ++image) {
    std::vector<std::pair<double, std::array<int, kernels::kMaxVars>>> monomials;
    for (const auto& t : f_terms) {
      std::array<int, kernels::kMaxVars> p{};
      for (int s = 0; s < 6; ++s) p[kMaps[image][s]] = t.powers[s];
      monomials.push_back({kSigns[image] * t.coeff, p});
    }
    HylleraasWaveFunction::Image im;
    im.table = kernels::TermTable::build(6, monomials);
    check_table_power(im.table);
    for (int s = 0; s < 6; ++s) im.lambda[kMaps[image][s]] = slot_lambda[s];
    wf->images_.push_back(std::move(im));
  }
  return wf;
}

double doublet_s_value(const std::function<double(const std::array<double, 6>&)>& f,
                       const ElectronConfiguration& config) {
  if (config.size() != 3) throw std::invalid_argument("needs a 3-electron configuration");
  const DistanceTable t = interparticle_distances(config);
  const double r1 = t.r[0], r2 = t.r[1], r3 = t.r[2];
  const double r12 = t.rij[0][1], r13 = t.rij[0][2], r23 = t.rij[1][2];
  return f({r1, r2, r3, r12, r13, r23}) + f({r2, r1, r3, r12, r23, r13}) -
         f({r3, r2, r1, r23, r13, r12}) - f({r2, r3, r1, r23, r12, r13});
}

namespace {

/// Doublet-S projection of an opaque generating function.  The value is the
/// exact four-term combination; derivatives use central differences because
/// nothing more is known about f.
class FunctionalDoubletWaveFunction : public WaveFunction {
 public:
  explicit FunctionalDoubletWaveFunction(std::function<double(const std::array<double, 6>&)> f)
      : f_(std::move(f)) {
    if (!f_) throw std::invalid_argument("generating function must be callable");
  }

  std::size_t electron_count() const override { return 3; }
  const std::vector<Spin>& spin_layout() const override {
    static const std::vector<Spin> layout{Spin::Up, Spin::Down, Spin::Up};
    return layout;
  }
  bool s_state() const override { return true; }

  double value(const ElectronConfiguration& config) const override {
    check_layout(config);
    return doublet_s_value(f_, config);
  }

  RawDerivatives raw_derivatives(const ElectronConfiguration& config) const override {
    check_layout(config);
    constexpr double h = 1e-4;
    RawDerivatives out;
    out.value = doublet_s_value(f_, config);
    out.grad.assign(3, Vec3{});
    out.lap.assign(3, 0.0);
    std::vector<Vec3> pos = config.positions();
    for (std::size_t i = 0; i < 3; ++i) {
      double Vec3::* const comps[3] = {&Vec3::x, &Vec3::y, &Vec3::z};
      for (int c = 0; c < 3; ++c) {
        double& coord = pos[i].*comps[c];
        const double saved = coord;
        coord = saved + h;
        const double plus = doublet_s_value(f_, config.with_positions(pos));
        coord = saved - h;
        const double minus = doublet_s_value(f_, config.with_positions(pos));
        coord = saved;
        const double deriv = (plus - minus) / (2.0 * h);
        if (c == 0) out.grad[i].x = deriv;
        else if (c == 1) out.grad[i].y = deriv;
        else out.grad[i].z = deriv;
        out.lap[i] += (plus - 2.0 * out.value + minus) / (h * h);
      }
    }
    return out;
  }

 private:
  std::function<double(const std::array<double, 6>&)> f_;
};

}  // namespace

WaveFunctionPtr project_2s(std::function<double(const std::array<double, 6>&)> f) {
  return std::make_shared<FunctionalDoubletWaveFunction>(std::move(f));
}

// ---------------------------------------------------------------------------
// Jastrow

namespace {
inline double pade_u(double r, double a, double b) { return a * r / (1.0 + b * r); }
inline double pade_du(double r, double a, double b) {
  const double d = 1.0 + b * r;
  return a / (d * d);
}
inline double pade_d2u(double r, double a, double b) {
  const double d = 1.0 + b * r;
  return -2.0 * a * b / (d * d * d);
}
}  // namespace

double JastrowFactor::log_value(const ElectronConfiguration& config) const {
  const std::size_t n = config.size();
  double u = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a_en != 0.0) u += pade_u(config.position(i).norm(), a_en, b_en);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = (config.position(i) - config.position(j)).norm();
      const bool parallel = config.spin(i) == config.spin(j);
      u += parallel ? pade_u(r, a_parallel, b_parallel)
                    : pade_u(r, a_antiparallel, b_antiparallel);
    }
  }
  return u;
}

void JastrowFactor::log_derivatives(const ElectronConfiguration& config,
                                    std::vector<Vec3>& grad,
                                    std::vector<double>& lap) const {
  const std::size_t n = config.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a_en != 0.0) {
      const double r = config.position(i).norm();
      const double du = pade_du(r, a_en, b_en);
      grad[i] += config.position(i) * (du / r);
      lap[i] += pade_d2u(r, a_en, b_en) + 2.0 * du / r;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3 d = config.position(i) - config.position(j);
      const double r = d.norm();
      const bool parallel = config.spin(i) == config.spin(j);
      const double a = parallel ? a_parallel : a_antiparallel;
      const double b = parallel ? b_parallel : b_antiparallel;
      const double du = pade_du(r, a, b);
      const double l = pade_d2u(r, a, b) + 2.0 * du / r;
      grad[i] += d * (du / r);
      grad[j] -= d * (du / r);
      lap[i] += l;
      lap[j] += l;
    }
  }
}

double JastrowWrappedWaveFunction::value(const ElectronConfiguration& config) const {
  return base_->value(config) * std::exp(jastrow_.log_value(config));
}

RawDerivatives JastrowWrappedWaveFunction::raw_derivatives(
    const ElectronConfiguration& config) const {
  const std::size_t n = config.size();
  RawDerivatives base = base_->raw_derivatives(config);
  std::vector<Vec3> gu(n, Vec3{});
  std::vector<double> lu(n, 0.0);
  jastrow_.log_derivatives(config, gu, lu);
  const double j = std::exp(jastrow_.log_value(config));

  RawDerivatives out;
  out.value = base.value * j;
  out.grad.resize(n);
  out.lap.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.grad[i] = (base.grad[i] + gu[i] * base.value) * j;
    out.lap[i] = (base.lap[i] + 2.0 * base.grad[i].dot(gu[i]) +
                  base.value * (lu[i] + gu[i].dot(gu[i]))) *
                 j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// System builders

namespace {

// zeta_2s <= zeta_1s keeps 2s/1s strictly monotone, which pins the
// determinant node to the radial exchange surface.
void check_monotone_pair(double zeta_1s, double zeta_2s) {
  if (zeta_2s > zeta_1s)
    throw std::invalid_argument("zeta_2s must not exceed zeta_1s");
}

}  // namespace

std::shared_ptr<CIWaveFunction> build_li_rhf(double zeta_1s, double zeta_2s, double q) {
  check_monotone_pair(zeta_1s, zeta_2s);
  const SlaterOrbital s1 = SlaterOrbital::s1(zeta_1s);
  const SlaterOrbital s2 = SlaterOrbital::s2(zeta_2s, q, zeta_1s);
  // 2s column first: the determinant is positive where r1 > r3
  DeterminantProduct det{1.0, {s2, s1}, {s1}};
  return std::make_shared<CIWaveFunction>(
      std::vector<DeterminantProduct>{det},
      std::vector<Spin>{Spin::Up, Spin::Down, Spin::Up}, true);
}

std::shared_ptr<CIWaveFunction> build_be_hf(double zeta_1s, double zeta_2s, double q) {
  check_monotone_pair(zeta_1s, zeta_2s);
  const SlaterOrbital s1 = SlaterOrbital::s1(zeta_1s);
  const SlaterOrbital s2 = SlaterOrbital::s2(zeta_2s, q, zeta_1s);
  // 2s column first in both spins: sign follows (r1 - r2)(r3 - r4)
  DeterminantProduct det{1.0, {s2, s1}, {s2, s1}};
  return std::make_shared<CIWaveFunction>(
      std::vector<DeterminantProduct>{det},
      std::vector<Spin>{Spin::Up, Spin::Up, Spin::Down, Spin::Down}, true);
}

std::shared_ptr<CIWaveFunction> build_be_two_config(double c2, double zeta_1s,
                                                    double zeta_2s, double q,
                                                    double zeta_2p) {
  if (std::abs(c2) >= 1.0)
    throw std::invalid_argument("|c2| must be < 1 (c1 is normalized to 1)");
  check_monotone_pair(zeta_1s, zeta_2s);
  const SlaterOrbital s1 = SlaterOrbital::s1(zeta_1s);
  const SlaterOrbital s2 = SlaterOrbital::s2(zeta_2s, q, zeta_1s);
  const SlaterOrbital p = SlaterOrbital::p2(0, zeta_2p);
  std::vector<DeterminantProduct> terms{DeterminantProduct{1.0, {s2, s1}, {s2, s1}}};
  if (c2 != 0.0) append_psum_configuration(terms, c2, {s1, p}, {s1, p});
  return std::make_shared<CIWaveFunction>(
      std::move(terms), std::vector<Spin>{Spin::Up, Spin::Up, Spin::Down, Spin::Down},
      true);
}

std::shared_ptr<CIWaveFunction> build_hydrogenic_1s(double zeta) {
  DeterminantProduct det{1.0, {SlaterOrbital::s1(zeta)}, {}};
  return std::make_shared<CIWaveFunction>(std::vector<DeterminantProduct>{det},
                                          std::vector<Spin>{Spin::Up}, true);
}

std::shared_ptr<JastrowWrappedWaveFunction> with_jastrow(WaveFunctionPtr base,
                                                         JastrowFactor jastrow) {
  return std::make_shared<JastrowWrappedWaveFunction>(std::move(base), jastrow);
}

}  // namespace qmcnodes
