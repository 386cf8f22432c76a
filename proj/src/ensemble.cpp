#include "hrf/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hrf/norms.hpp"
#include "hrf/quadrature.hpp"

namespace hrf {

namespace {

constexpr Complex kI(0.0, 1.0);

Vec4 lattice_frequency(const TorusGrid& g, const Index4& k) {
  Vec4 xi{};
  for (int a = 0; a < g.dim(); ++a) xi[a] = g.dk() * k[a];
  return xi;
}

CVec plane_wave(const TorusGrid& g, const Vec4& xi, Complex amplitude) {
  CVec u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = amplitude * std::exp(kI * dot(xi, g.position(i)));
  return u;
}

// Normalised Fourier-series coefficients, in place.
void to_coefficients(const TorusGrid& g, CVec& data) {
  fft_forward(g, data.data());
  const double s = 1.0 / static_cast<double>(g.size());
  for (auto& c : data) c *= s;
}

void to_values(const TorusGrid& g, CVec& data) { fft_backward(g, data.data()); }

CVec kinetic_phase(const ModeEnsemble& e, double tau) {
  const auto& k2 = e.grid().frequency_norms2();
  const double s = 1.0 / static_cast<double>(e.grid().size());
  CVec p(k2.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = s * std::exp(-kI * (tau * (e.mass() + k2[i])));
  return p;
}

void apply_kinetic(ModeEnsemble& e, const CVec& phase) {
  auto& modes = e.modes();
  const TorusGrid& g = e.grid();
  const long n = static_cast<long>(modes.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    CVec& u = modes[j].u;
    fft_forward(g, u.data());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= phase[i];
    fft_backward(g, u.data());
  }
}

bool constant_symbol(const InteractionPotential& w) {
  return w.kind() == PotentialKind::Delta || w.kind() == PotentialKind::None;
}

// w * (rho - rho_ref) as a real field.
RVec mean_field(const ModeEnsemble& e, const RVec& rho) {
  const double ref = e.reference_density();
  RVec phi(rho.size());
  if (constant_symbol(e.potential())) {
    const double a = e.potential().hat(0.0);
    for (std::size_t i = 0; i < rho.size(); ++i) phi[i] = a * (rho[i] - ref);
    return phi;
  }
  CVec tmp(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) tmp[i] = rho[i] - ref;
  to_coefficients(e.grid(), tmp);
  const RVec& wh = e.potential_symbol();
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] *= wh[i];
  to_values(e.grid(), tmp);
  for (std::size_t i = 0; i < rho.size(); ++i) phi[i] = tmp[i].real();
  return phi;
}

RVec convolve_potential(const TorusGrid& g, const InteractionPotential& w, const RVec& wh, const RVec& v) {
  RVec phi(v.size());
  if (constant_symbol(w)) {
    const double a = w.hat(0.0);
    for (std::size_t i = 0; i < v.size(); ++i) phi[i] = a * v[i];
    return phi;
  }
  CVec tmp(v.begin(), v.end());
  to_coefficients(g, tmp);
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] *= wh[i];
  to_values(g, tmp);
  for (std::size_t i = 0; i < v.size(); ++i) phi[i] = tmp[i].real();
  return phi;
}

void apply_potential(ModeEnsemble& e, double dt) {
  const RVec phi = mean_field(e, density(e));
  CVec phase(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phase[i] = std::exp(-kI * (dt * phi[i]));
  auto& modes = e.modes();
  const long n = static_cast<long>(modes.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) {
    CVec& u = modes[j].u;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= phase[i];
  }
}

std::vector<SpectralField> as_fields(const TorusGrid& g, const std::vector<CVec>& z) {
  std::vector<SpectralField> out;
  out.reserve(z.size());
  for (const auto& c : z) out.emplace_back(g, c);
  return out;
}

double min_image(double d, double L) {
  d = std::fmod(d, L);
  if (d > 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}

double torus_distance2(const TorusGrid& g, const Vec4& a, const Vec4& b) {
  double s = 0.0;
  for (int k = 0; k < g.dim(); ++k) {
    const double d = min_image(a[k] - b[k], g.length());
    s += d * d;
  }
  return s;
}

bool all_finite(const RVec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Trapezoid weights on n+1 equally spaced points.
double trap_weight(std::size_t n, std::size_t last, double dt) { return (n == 0 || n == last) ? 0.5 * dt : dt; }

}  // namespace

// ModeEnsemble

ModeEnsemble::ModeEnsemble(TorusGrid grid, InteractionPotential w, double mass)
    : grid_(std::move(grid)), w_(std::move(w)), mass_(mass) {
  if (!std::isfinite(mass)) throw std::invalid_argument("mass must be finite");
  auto wh = std::make_shared<RVec>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    (*wh)[i] = w_.hat(std::sqrt(grid_.frequency_norm2(i)));
    if (!std::isfinite((*wh)[i])) throw std::invalid_argument("potential transform is not finite on the lattice");
  }
  w_hat_ = std::move(wh);
}

void ModeEnsemble::add_equilibrium_mode(const Index4& wavenumber, double weight) {
  const Vec4 xi = lattice_frequency(grid_, wavenumber);
  const double omega = mass_ + norm2(xi);
  add_mode(wavenumber, weight, plane_wave(grid_, xi, weight * std::exp(-kI * (omega * time_))));
}

void ModeEnsemble::add_mode(const Index4& wavenumber, double weight, CVec u) {
  if (u.size() != grid_.size()) throw std::invalid_argument("mode field size does not match grid");
  for (const auto& m : modes_)
    if (m.wavenumber == wavenumber) throw std::invalid_argument("duplicate mode frequency");
  Mode m;
  m.wavenumber = wavenumber;
  m.xi = lattice_frequency(grid_, wavenumber);
  m.weight = weight;
  m.u = std::move(u);
  modes_.push_back(std::move(m));
}

double ModeEnsemble::reference_density() const {
  double s = 0.0;
  for (const auto& m : modes_) s += m.weight * m.weight;
  return s;
}

double ModeEnsemble::omega(std::size_t j) const { return mass_ + norm2(modes_.at(j).xi); }

CVec ModeEnsemble::equilibrium_mode(std::size_t j) const {
  const Mode& m = modes_.at(j);
  return plane_wave(grid_, m.xi, m.weight * std::exp(-kI * (omega(j) * time_)));
}

ModeEnsemble init_equilibrium(const TorusGrid& grid, const DistributionFunction& f, const InteractionPotential& w,
                              const ModeSelection& selection, EquilibriumReport* report) {
  if (!(selection.threshold >= 0.0)) throw std::invalid_argument("mode threshold must be >= 0");
  const int d = grid.dim();
  EquilibriumReport rep;
  rep.h0 = f.is_zero() ? 0.0 : eval_h(f, d, 0.0).value;
  rep.mass = selection.mass ? *selection.mass : w.hat(0.0) * rep.h0;
  ModeEnsemble e(grid, w, rep.mass);
  if (f.is_zero()) {
    if (report) *report = rep;
    return e;
  }
  const double cell = grid.freq_cell_volume();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mass = f.f2(std::sqrt(grid.frequency_norm2(i))) * cell;
    const Index4 idx = grid.multi_index(i);
    Index4 k{};
    for (int a = 0; a < d; ++a) k[a] = grid.wavenumber(idx[a]);
    if (mass >= selection.threshold && mass > 0.0) {
      e.add_equilibrium_mode(k, std::sqrt(mass));
      rep.retained_mass += mass;
    } else {
      rep.truncated_mass += mass;
    }
  }
  const double R = f.support_radius();
  const double nyq = grid.nyquist();
  if (R > nyq) {
    auto g = [&](double r) { return f.f2(r) * std::pow(r, d - 1); };
    rep.truncated_mass += unit_sphere_area(d) * quad::integrate<double>(g, nyq, R, 1e-300, 1e-10).value;
  }
  rep.modes = e.size();
  rep.truncated_fraction = rep.h0 > 0.0 ? rep.truncated_mass / rep.h0 : 0.0;
  if (e.empty()) throw std::invalid_argument("no lattice mode passes the mass threshold");
  if (report) *report = rep;
  return e;
}

ModeEnsemble plane_wave_ensemble(const TorusGrid& grid, const InteractionPotential& w,
                                 const std::vector<std::pair<Index4, double>>& waves, std::optional<double> mass) {
  double rho = 0.0;
  for (const auto& [k, a] : waves) rho += a * a;
  ModeEnsemble e(grid, w, mass ? *mass : w.hat(0.0) * rho);
  for (const auto& [k, a] : waves) e.add_equilibrium_mode(k, a);
  return e;
}

RVec density(const ModeEnsemble& e) {
  RVec rho(e.grid().size(), 0.0);
  const auto& modes = e.modes();
  const long n = static_cast<long>(rho.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& m : modes) s += std::norm(m.u[i]);
    rho[i] = s;
  }
  return rho;
}

RVec mode_masses(const ModeEnsemble& e) {
  RVec out;
  const double cell = e.grid().cell_volume();
  for (const auto& m : e.modes()) {
    double s = 0.0;
    for (const auto& v : m.u) s += std::norm(v);
    out.push_back(s * cell);
  }
  return out;
}

void step(ModeEnsemble& e, double dt) { advance(e, dt, 1); }

void advance(ModeEnsemble& e, double dt, std::size_t steps) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (steps == 0) return;
  const CVec half = kinetic_phase(e, 0.5 * dt);
  const CVec full = kinetic_phase(e, dt);
  apply_kinetic(e, half);
  for (std::size_t s = 0; s < steps; ++s) {
    apply_potential(e, dt);
    apply_kinetic(e, s + 1 < steps ? full : half);
  }
  e.set_time(e.time() + dt * static_cast<double>(steps));
}

double conserved_energy(const ModeEnsemble& e) {
  const TorusGrid& g = e.grid();
  const auto& k2 = g.frequency_norms2();
  double kinetic = 0.0;
  for (const auto& m : e.modes()) {
    CVec c = m.u;
    to_coefficients(g, c);
    for (std::size_t i = 0; i < c.size(); ++i) kinetic += k2[i] * std::norm(c[i]);
  }
  kinetic *= g.volume();
  const RVec rho = density(e);
  double total = 0.0;
  for (double r : rho) total += r;
  const RVec phi = mean_field(e, rho);
  const double ref = e.reference_density();
  double pot = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) pot += phi[i] * (rho[i] - ref);
  return kinetic + g.cell_volume() * (e.mass() * total + 0.5 * pot);
}

// Perturbations

CVec gaussian_bump(const TorusGrid& grid, const Vec4& center, double width, const Vec4& carrier) {
  if (!(width > 0.0)) throw std::invalid_argument("bump width must be positive");
  Vec4 kappa{};
  for (int a = 0; a < grid.dim(); ++a) kappa[a] = grid.dk() * std::round(carrier[a] / grid.dk());
  CVec b(grid.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vec4 x = grid.position(i);
    b[i] = std::exp(-torus_distance2(grid, x, center) / (2.0 * width * width)) * std::exp(kI * dot(kappa, x));
  }
  return b;
}

std::vector<CVec> deviations(const ModeEnsemble& e) {
  std::vector<CVec> z(e.size());
  for (std::size_t j = 0; j < e.size(); ++j) {
    z[j] = e.equilibrium_mode(j);
    const CVec& u = e.mode(j).u;
    for (std::size_t i = 0; i < u.size(); ++i) z[j][i] = u[i] - z[j][i];
  }
  return z;
}

std::vector<CVec> PerturbationState::deviations() const { return hrf::deviations(ensemble); }

RVec PerturbationState::induced_potential() const {
  RVec v = density(ensemble);
  const double ref = ensemble.reference_density();
  for (auto& x : v) x -= ref;
  return v;
}

RVec PerturbationState::induced_potential_from_modes() const {
  RVec v(ensemble.grid().size(), 0.0);
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    const CVec y = ensemble.equilibrium_mode(j);
    const CVec& u = ensemble.mode(j).u;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Complex z = u[i] - y[i];
      v[i] += std::norm(z) + 2.0 * (std::conj(y[i]) * z).real();
    }
  }
  return v;
}

PerturbationState add_perturbation(const ModeEnsemble& equilibrium, const PerturbationSpec& spec) {
  if (!std::isfinite(spec.amplitude)) throw std::invalid_argument("perturbation amplitude must be finite");
  const std::size_t n = equilibrium.size();
  const TorusGrid& g = equilibrium.grid();
  CVec coeff(n, Complex(0.0, 0.0));
  if (spec.target_mode) {
    if (*spec.target_mode >= n) throw std::invalid_argument("perturbation target mode out of range");
    coeff[*spec.target_mode] = 1.0;
  } else if (!spec.coefficients.empty()) {
    if (spec.coefficients.size() != n) throw std::invalid_argument("one perturbation coefficient per mode expected");
    coeff = spec.coefficients;
  } else {
    std::fill(coeff.begin(), coeff.end(), Complex(1.0, 0.0));
  }
  PerturbationState st{equilibrium, std::vector<CVec>(n, CVec(g.size(), Complex(0.0, 0.0)))};
  if (spec.amplitude == 0.0 || n == 0) return st;
  const CVec bump = gaussian_bump(g, spec.center, spec.width, spec.carrier);
  double scale = spec.amplitude;
  if (spec.normalize_l2) {
    double b2 = 0.0, c2 = 0.0;
    for (const auto& v : bump) b2 += std::norm(v);
    for (const auto& c : coeff) c2 += std::norm(c);
    const double norm = std::sqrt(b2 * g.cell_volume() * c2);
    if (norm == 0.0) throw std::invalid_argument("perturbation has zero norm");
    scale /= norm;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (coeff[j] == Complex(0.0, 0.0)) continue;
    CVec& z = st.z0[j];
    CVec& u = st.ensemble.modes()[j].u;
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = scale * coeff[j] * bump[i];
      u[i] += z[i];
    }
  }
  return st;
}

SliceNorms slice_norms(const TorusGrid& g, const std::vector<CVec>& z, const RVec& v) {
  const int d = g.dim();
  const double s = 0.5 * d - 1.0;
  const double p = 2.0 * (d + 2.0) / d;
  const double q = 4.0 * d / (d + 1.0);
  SliceNorms n;
  if (!z.empty()) {
    const auto f = as_fields(g, z);
    const std::span<const SpectralField> span(f);
    n.z_l2 = lebesgue_norm(span, 2.0);
    n.z_hs = sobolev_norm(span, s, 2.0);
    n.z_wsp = sobolev_norm(span, s, p);
    n.z_ld2 = lebesgue_norm(span, d + 2.0);
    n.z_besov = besov_norm(span, q, 0.0, 0.25);
  }
  const SpectralField vf(g, CVec(v.begin(), v.end()));
  n.v_lhalf = lebesgue_norm(vf, 0.5 * (d + 2.0));
  n.v_l2 = lebesgue_norm(vf, 2.0);
  n.v_besov = besov_norm(vf, 2.0, -0.5, 0.0);
  return n;
}

std::map<std::string, double> to_map(const SliceNorms& n) {
  return {{"z_l2", n.z_l2},       {"z_hs", n.z_hs},       {"z_wsp", n.z_wsp}, {"z_ld2", n.z_ld2},
          {"z_besov", n.z_besov}, {"v_lhalf", n.v_lhalf}, {"v_l2", n.v_l2},   {"v_besov", n.v_besov}};
}

// Evolution

Trajectory evolve(ModeEnsemble& e, double T, const EvolveOptions& options) {
  if (!(T > 0.0)) throw std::invalid_argument("evolution time must be positive");
  if (!(options.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / options.dt)));
  Trajectory tr;
  tr.dt = T / static_cast<double>(steps);

  auto observe = [&](std::size_t k) {
    Observation ob;
    ob.t = e.time();
    ob.mode_masses = mode_masses(e);
    const RVec rho = density(e);
    if (!all_finite(rho)) {
      std::ostringstream os;
      os << "non-finite density at step " << k << " (t = " << e.time() << ")";
      tr.aborted = true;
      tr.diagnostic = os.str();
      return false;
    }
    double mean = 0.0;
    for (double r : rho) mean += r;
    mean /= static_cast<double>(rho.size());
    for (double r : rho) ob.density_spread = std::max(ob.density_spread, std::abs(r - mean));
    ob.energy = conserved_energy(e);
    if (options.record_norms) {
      RVec v = rho;
      const double ref = e.reference_density();
      for (auto& x : v) x -= ref;
      ob.norms = to_map(slice_norms(e.grid(), deviations(e), v));
    }
    tr.observations.push_back(std::move(ob));
    for (const auto& obs : options.observers) obs(e, k);
    return true;
  };

  if (!observe(0)) return tr;
  std::size_t done = 0;
  while (done < steps) {
    const std::size_t chunk = std::min(stride, steps - done);
    advance(e, tr.dt, chunk);
    done += chunk;
    if (!observe(done)) return tr;
  }
  return tr;
}

// Picard

PicardSolver::PicardSolver(const ModeEnsemble& equilibrium, std::vector<CVec> z0, double window, double dt)
    : eq_(equilibrium), dt_(dt) {
  if (!(window > 0.0) || !(dt > 0.0)) throw std::invalid_argument("Picard window and step must be positive");
  if (z0.size() != eq_.size()) throw std::invalid_argument("one initial deviation per mode expected");
  steps_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window / dt)));
  dt_ = window / static_cast<double>(steps_);
  for (auto& m : eq_.modes()) m.u = CVec();
  for (auto& z : z0) {
    if (z.size() != eq_.grid().size()) throw std::invalid_argument("initial deviation size does not match grid");
    to_coefficients(eq_.grid(), z);
  }
  z0_hat_ = std::move(z0);
}

CVec PicardSolver::equilibrium_mode(std::size_t j, std::size_t n) const {
  const Mode& m = eq_.mode(j);
  const double t = eq_.time() + dt_ * static_cast<double>(n);
  return plane_wave(eq_.grid(), m.xi, m.weight * std::exp(-kI * (eq_.omega(j) * t)));
}

PicardIterate PicardSolver::zero() const {
  PicardIterate it;
  const std::size_t N = eq_.grid().size();
  it.z.assign(time_points(), std::vector<CVec>(eq_.size(), CVec(N, Complex(0.0, 0.0))));
  it.v.assign(time_points(), RVec(N, 0.0));
  return it;
}

PicardIterate PicardSolver::apply(const PicardIterate& in) const {
  const TorusGrid& g = eq_.grid();
  const std::size_t N = g.size();
  const std::size_t M = time_points();
  const auto& k2 = g.frequency_norms2();
  PicardIterate out = zero();

  std::vector<RVec> phi(M);
  for (std::size_t n = 0; n < M; ++n) phi[n] = convolve_potential(g, eq_.potential(), eq_.potential_symbol(), in.v[n]);

  CVec decay(N);
  for (std::size_t i = 0; i < N; ++i) decay[i] = std::exp(-kI * (dt_ * (eq_.mass() + k2[i])));

  const long J = static_cast<long>(eq_.size());
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < J; ++j) {
    const Mode& m = eq_.mode(j);
    const CVec wave = plane_wave(g, m.xi, m.weight);
    CVec acc(N, Complex(0.0, 0.0));
    CVec F(N);
    for (std::size_t n = 0; n < M; ++n) {
      const double t = dt_ * static_cast<double>(n);
      const Complex yphase = std::exp(-kI * (eq_.omega(j) * (eq_.time() + t)));
      const CVec& zin = in.z[n][j];
      for (std::size_t i = 0; i < N; ++i) F[i] = phi[n][i] * (wave[i] * yphase + zin[i]);
      to_coefficients(g, F);
      CVec& z = out.z[n][j];
      for (std::size_t i = 0; i < N; ++i) {
        acc[i] = n == 0 ? 0.5 * F[i] : decay[i] * acc[i] + F[i];
        const Complex duhamel = dt_ * (acc[i] - 0.5 * F[i]);
        z[i] = z0_hat_[j][i] * std::exp(-kI * (t * (eq_.mass() + k2[i]))) - kI * duhamel;
      }
      to_values(g, z);
    }
  }

  const long Ml = static_cast<long>(M);
#pragma omp parallel for schedule(static)
  for (long n = 0; n < Ml; ++n) {
    RVec& v = out.v[n];
    for (std::size_t j = 0; j < eq_.size(); ++j) {
      const CVec y = equilibrium_mode(j, n);
      const CVec& zin = in.z[n][j];
      const CVec& zout = out.z[n][j];
      for (std::size_t i = 0; i < N; ++i) v[i] += std::norm(zin[i]) + 2.0 * (std::conj(y[i]) * zout[i]).real();
    }
  }
  return out;
}

PicardNorms PicardSolver::distance(const PicardIterate& a, const PicardIterate& b) const {
  const TorusGrid& g = eq_.grid();
  const int d = g.dim();
  const double s = 0.5 * d - 1.0;
  const double pz = d + 2.0;
  const double pv = 0.5 * (d + 2.0);
  const std::size_t M = time_points();
  const std::size_t N = g.size();
  const double cell = g.cell_volume();
  PicardNorms out{};
  double lz = 0.0, lv = 0.0, l2v = 0.0;
  for (std::size_t n = 0; n < M; ++n) {
    std::vector<SpectralField> diff;
    RVec mod2(N, 0.0);
    for (std::size_t j = 0; j < eq_.size(); ++j) {
      CVec c(N);
      for (std::size_t i = 0; i < N; ++i) {
        c[i] = a.z[n][j][i] - b.z[n][j][i];
        mod2[i] += std::norm(c[i]);
      }
      diff.emplace_back(g, std::move(c));
    }
    if (!diff.empty()) out[0] = std::max(out[0], sobolev_norm(std::span<const SpectralField>(diff), s, 2.0));
    const double w = trap_weight(n, M - 1, dt_);
    double sz = 0.0, sv = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      sz += std::pow(mod2[i], 0.5 * pz);
      const double dv = std::abs(a.v[n][i] - b.v[n][i]);
      sv += std::pow(dv, pv);
      s2 += dv * dv;
    }
    lz += w * cell * sz;
    lv += w * cell * sv;
    l2v += w * cell * s2;
  }
  out[1] = std::pow(lz, 1.0 / pz);
  out[2] = std::pow(lv, 1.0 / pv);
  out[3] = std::sqrt(l2v);
  return out;
}

PicardReport PicardSolver::run(int iterations) const {
  PicardReport rep;
  PicardIterate prev = zero();
  int above = 0;
  for (int k = 0; k < iterations; ++k) {
    PicardIterate next = apply(prev);
    rep.increments.push_back(distance(next, prev));
    rep.iterations = k + 1;
    prev = std::move(next);
    if (rep.increments.size() >= 2) {
      const auto& a = rep.increments[rep.increments.size() - 1];
      const auto& b = rep.increments[rep.increments.size() - 2];
      const double na = a[0] + a[1] + a[2] + a[3];
      const double nb = b[0] + b[1] + b[2] + b[3];
      const double r = nb > 0.0 ? na / nb : (na > 0.0 ? kInf : 0.0);
      rep.ratios.push_back(r);
      above = r > 1.0 ? above + 1 : 0;
      if (above >= 3) {
        rep.diverged = true;
        break;
      }
    }
  }
  rep.last = std::move(prev);
  return rep;
}

// Scattering probe

ScatteringProbe::ScatteringProbe(const TorusGrid& grid, const Vec4& center, double radius)
    : grid_(grid), center_(center), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("probe radius must be positive");
}

void ScatteringProbe::observe(const ModeEnsemble& e) {
  if (e.grid() != grid_) throw std::invalid_argument("probe grid does not match ensemble");
  const auto z = deviations(e);
  const auto& k2 = grid_.frequency_norms2();
  const double t = e.time();
  std::vector<CVec> w(z.size());
  double local = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    for (std::size_t i = 0; i < grid_.size(); ++i)
      if (torus_distance2(grid_, grid_.position(i), center_) <= radius_ * radius_) local += std::norm(z[j][i]);
    w[j] = z[j];
    to_coefficients(grid_, w[j]);
    for (std::size_t i = 0; i < w[j].size(); ++i) w[j][i] *= std::exp(kI * (t * (e.mass() + k2[i])));
  }
  local_mass_.push_back(local * grid_.cell_volume());
  if (!times_.empty()) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
      for (std::size_t i = 0; i < w[j].size(); ++i) s += std::norm(w[j][i] - last_[j][i]);
    cauchy_.push_back(std::sqrt(s * grid_.volume()));
  }
  times_.push_back(t);
  last_ = std::move(w);
}

Observer ScatteringProbe::observer() {
  return [this](const ModeEnsemble& e, std::size_t) { observe(e); };
}

ScatteringReport ScatteringProbe::report() const {
  ScatteringReport r;
  r.times = times_;
  r.cauchy = cauchy_;
  r.local_mass = local_mass_;
  r.recurrence_time = grid_.length() * grid_.length() / (4.0 * kPi);
  auto monotone = [](const std::vector<double>& v) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, x);
    const double tol = 1e-12 * peak;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] > v[i - 1] + tol) return false;
    return true;
  };
  r.cauchy_monotone = monotone(cauchy_);
  r.local_mass_monotone = monotone(local_mass_);
  if (!times_.empty() && times_.back() - times_.front() > r.recurrence_time)
    r.warning = "window exceeds the torus recurrence time";
  return r;
}

}  // namespace hrf
