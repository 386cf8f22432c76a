#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrf/equilibrium.hpp"
#include "hrf/spectral_field.hpp"

namespace hrf {

struct Mode {
  Index4 wavenumber{};
  Vec4 xi{};
  double weight = 0.0;  ///< a_j; the equilibrium mode is a_j e^{i xi.x - i(m + |xi|^2) t}
  CVec u;               ///< physical samples
};

/// Finite Gaussian ensemble X = sum_j u_j g_j with orthonormal g_j, so that
/// E|X|^2 = sum_j |u_j|^2 exactly.
///
/// Evolution follows i d_t u_j = (m - Laplacian) u_j + (w * (rho - rho_ref)) u_j
/// with rho_ref = sum_j a_j^2, under which every equilibrium mode is an exact
/// phase e^{-i(m + |xi_j|^2) t}.
class ModeEnsemble {
 public:
  ModeEnsemble(TorusGrid grid, InteractionPotential w, double mass);

  const TorusGrid& grid() const { return grid_; }
  const InteractionPotential& potential() const { return w_; }
  double mass() const { return mass_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::size_t size() const { return modes_.size(); }
  bool empty() const { return modes_.empty(); }
  const std::vector<Mode>& modes() const { return modes_; }
  std::vector<Mode>& modes() { return modes_; }
  const Mode& mode(std::size_t j) const { return modes_.at(j); }

  /// Adds a_j e^{i xi.x} at the current time (phase included).
  void add_equilibrium_mode(const Index4& wavenumber, double weight);
  void add_mode(const Index4& wavenumber, double weight, CVec u);

  /// sum_j a_j^2, the equilibrium density.
  double reference_density() const;
  /// w^ sampled on the lattice in storage order.
  const RVec& potential_symbol() const { return *w_hat_; }
  /// m + |xi_j|^2.
  double omega(std::size_t j) const;

  SpectralField field(std::size_t j) const { return SpectralField(grid_, modes_.at(j).u); }
  /// Y_j at the current time.
  CVec equilibrium_mode(std::size_t j) const;

 private:
  TorusGrid grid_;
  InteractionPotential w_;
  double mass_;
  double time_ = 0.0;
  std::vector<Mode> modes_;
  std::shared_ptr<const RVec> w_hat_;
};

struct ModeSelection {
  /// Keep lattice modes with |f(xi)|^2 dxi >= threshold.
  double threshold = 1e-8;
  /// Overrides m = w^(0) int |f|^2.
  std::optional<double> mass;
};

struct EquilibriumReport {
  std::size_t modes = 0;
  double h0 = 0.0;
  /// sum of a_j^2 over kept modes.
  double retained_mass = 0.0;
  /// Lattice sum over dropped in-grid modes plus the continuum tail past the
  /// grid's Nyquist ball.
  double truncated_mass = 0.0;
  double truncated_fraction = 0.0;
  double mass = 0.0;
};

/// Lattice Riemann-sum discretization of the equilibrium Y_f. Throws
/// std::invalid_argument when f is nonzero but no mode passes the threshold.
ModeEnsemble init_equilibrium(const TorusGrid& grid, const DistributionFunction& f, const InteractionPotential& w,
                              const ModeSelection& selection = {}, EquilibriumReport* report = nullptr);

/// Ensemble of plane waves amplitude * e^{i xi_k . x}; m defaults to
/// w^(0) sum |amplitude|^2.
ModeEnsemble plane_wave_ensemble(const TorusGrid& grid, const InteractionPotential& w,
                                 const std::vector<std::pair<Index4, double>>& waves,
                                 std::optional<double> mass = std::nullopt);

/// rho(x) = sum_j |u_j(x)|^2, reduced in mode order at every grid point.
RVec density(const ModeEnsemble& e);
RVec mode_masses(const ModeEnsemble& e);

/// One Strang step: half free flow, potential phase, half free flow.
void step(ModeEnsemble& e, double dt);
/// steps consecutive Strang steps with the inner half flows merged.
void advance(ModeEnsemble& e, double dt, std::size_t steps);

/// sum_j int |grad u_j|^2 + m int rho + 1/2 int (w * (rho - rho_ref)) (rho - rho_ref).
double conserved_energy(const ModeEnsemble& e);

// Perturbations.

struct PerturbationSpec {
  double amplitude = 0.0;
  Vec4 center{};
  double width = 1.0;
  /// Rounded to the nearest lattice frequency.
  Vec4 carrier{};
  /// When set, amplitude is the L^2_x L^2_omega norm of Z_0 instead of the peak.
  bool normalize_l2 = false;
  std::optional<std::size_t> target_mode;
  /// Per-mode coefficients, used when target_mode is empty; default all ones.
  CVec coefficients;
};

/// Gaussian bump exp(-|x - c|^2 / (2 width^2)) e^{i kappa . x} with the
/// minimum-image distance on the torus.
CVec gaussian_bump(const TorusGrid& grid, const Vec4& center, double width, const Vec4& carrier);

struct PerturbationState {
  ModeEnsemble ensemble;
  std::vector<CVec> z0;

  /// Z_j = u_j - Y_j at the ensemble time.
  std::vector<CVec> deviations() const;
  /// V = sum_j (|u_j|^2 - a_j^2).
  RVec induced_potential() const;
  /// V = sum_j |Z_j|^2 + 2 Re sum_j conj(Y_j) Z_j.
  RVec induced_potential_from_modes() const;
};

PerturbationState add_perturbation(const ModeEnsemble& equilibrium, const PerturbationSpec& spec);

std::vector<CVec> deviations(const ModeEnsemble& e);

// Norm ingredients of the perturbation space on one time slice, with
// s = d/2 - 1, p = 2(d+2)/d, q = 4d/(d+1).
struct SliceNorms {
  double z_l2 = 0.0;
  double z_hs = 0.0;
  double z_wsp = 0.0;
  double z_ld2 = 0.0;   ///< L^{d+2}_x
  double z_besov = 0.0; ///< B_q^{0,1/4}
  double v_lhalf = 0.0; ///< L^{(d+2)/2}_x
  double v_l2 = 0.0;
  double v_besov = 0.0; ///< B_2^{-1/2,0}
};
SliceNorms slice_norms(const TorusGrid& grid, const std::vector<CVec>& z, const RVec& v);
std::map<std::string, double> to_map(const SliceNorms& n);

// Evolution.

struct Observation {
  double t = 0.0;
  RVec mode_masses;
  double energy = 0.0;
  /// max_x |rho - mean rho|
  double density_spread = 0.0;
  std::map<std::string, double> norms;
};

struct Trajectory {
  double dt = 0.0;
  std::vector<Observation> observations;
  bool aborted = false;
  std::string diagnostic;
};

using Observer = std::function<void(const ModeEnsemble&, std::size_t step)>;

struct EvolveOptions {
  double dt = 1e-3;
  /// Observe every stride steps (and at t = 0 and the end).
  std::size_t stride = 1;
  bool record_norms = false;
  std::vector<Observer> observers;
};

/// Runs round(T/dt) steps of size T/round(T/dt).
Trajectory evolve(ModeEnsemble& e, double T, const EvolveOptions& options);

// Duhamel-Picard iteration for (Z, V) on a fixed time window.

struct PicardIterate {
  /// z[n][j]: mode j at time n dt (physical samples).
  std::vector<std::vector<CVec>> z;
  std::vector<RVec> v;
};

/// Distances used for contraction: sup_t ||Z||_{H^s}, ||Z||_{L^{d+2}_{t,x}},
/// ||V||_{L^{(d+2)/2}_{t,x}}, ||V||_{L^2_{t,x}}.
using PicardNorms = std::array<double, 4>;

struct PicardReport {
  std::vector<PicardNorms> increments;  ///< increments[n] = |it_{n+1} - it_n|
  /// ratios[n-1] = |increments[n]| / |increments[n-1]| with |.| the sum of
  /// the four ingredients, the norm of the pair (Z, V).
  std::vector<double> ratios;
  bool diverged = false;
  int iterations = 0;
  PicardIterate last;
};

class PicardSolver {
 public:
  PicardSolver(const ModeEnsemble& equilibrium, std::vector<CVec> z0, double window, double dt);

  std::size_t time_points() const { return steps_ + 1; }
  double dt() const { return dt_; }

  PicardIterate zero() const;
  /// One application of A_{Z0}.
  PicardIterate apply(const PicardIterate& it) const;
  PicardNorms distance(const PicardIterate& a, const PicardIterate& b) const;
  /// Iterates from zero; stops early when the ratio exceeds 1 three times in a row.
  PicardReport run(int iterations) const;

  /// Y_j at time index n.
  CVec equilibrium_mode(std::size_t j, std::size_t n) const;

 private:
  ModeEnsemble eq_;
  std::vector<CVec> z0_hat_;
  double dt_;
  std::size_t steps_;
};

// Scattering proxy.

struct ScatteringReport {
  std::vector<double> times;
  /// ||S(-t_{i+1}) Z(t_{i+1}) - S(-t_i) Z(t_i)||, one per consecutive pair.
  std::vector<double> cauchy;
  std::vector<double> local_mass;
  bool cauchy_monotone = true;
  bool local_mass_monotone = true;
  double recurrence_time = 0.0;
  std::string warning;
};

/// Observer computing S(-t) Z(t) and the mass of Z in a ball on the fly.
class ScatteringProbe {
 public:
  ScatteringProbe(const TorusGrid& grid, const Vec4& center, double radius);
  void observe(const ModeEnsemble& e);
  Observer observer();
  ScatteringReport report() const;

 private:
  TorusGrid grid_;
  Vec4 center_;
  double radius_;
  std::vector<double> times_, cauchy_, local_mass_;
  std::vector<CVec> last_;
};

}  // namespace hrf
