#pragma once

#include <iosfwd>
#include <vector>

#include "hrf/covariance.hpp"
#include "hrf/grid.hpp"

namespace hrf {

struct MfValue {
  Complex value{};
  double error = 0.0;
  bool converged = true;
};

struct MfOptions {
  /// Stop once the tail bound drops below tail_rel |accumulated|.
  double tail_rel = 1e-10;
  double rel_tol = 1e-12;
  /// Absolute floor, relative to h(0) / max(|xi|, 1).
  double abs_floor = 1e-15;
  int max_panels = 200000;
};

/// m_f(tau, |xi|) = -2 int_0^inf e^{-i tau t} sin(|xi|^2 t) h(2 |xi| t) dt.
///
/// Panels are half periods of the fastest of the three oscillations; the tail
/// is bounded with sup_{y >= 2|xi|T} <y>^2 |h(y)| against <2|xi|t>^{-2}.
MfValue compute_mf(const CovarianceProfile& h, double tau, double xi_abs, const MfOptions& opt = {});

class MultiplierTable {
 public:
  MultiplierTable(CovarianceProfile h, RVec tau, RVec xi, const MfOptions& opt = {});

  int dim() const { return h_.dim(); }
  const CovarianceProfile& profile() const { return h_; }
  const RVec& tau() const { return tau_; }
  const RVec& xi() const { return xi_; }
  /// Row-major, tau slowest.
  Complex at(std::size_t it, std::size_t ix) const { return values_[it * xi_.size() + ix]; }
  double error_at(std::size_t it, std::size_t ix) const { return errors_[it * xi_.size() + ix]; }
  bool converged() const { return converged_; }
  double max_error() const;
  double sup_abs() const;

  /// CSV: tau,xi_abs,re_mf,im_mf,err_estimate
  void write_csv(std::ostream& os) const;

 private:
  CovarianceProfile h_;
  RVec tau_, xi_;
  CVec values_;
  RVec errors_;
  bool converged_ = true;
};

/// tau in [-tau_max, tau_max]: 0 plus n log-spaced magnitudes per sign
/// between tau_min and tau_max.
RVec default_tau_grid(double tau_min = 1e-3, double tau_max = 32.0, int n = 24);
/// n log-spaced radii between 2 pi / L and the Nyquist frequency.
RVec default_xi_grid(const TorusGrid& grid, int n = 24);
RVec log_grid(double lo, double hi, int n);

struct MarginReport {
  double margin = 1.0;
  double tau = 0.0;
  double xi = 0.0;
};

/// min over the table of |1 - w^(xi) m_f(tau, xi)|.
MarginReport stability_margin(const MultiplierTable& table, const InteractionPotential& w);

struct ShellTrace {
  double radius = 0.0;
  /// min over the shell of Re m_f / (2 |S^{d-1}|)
  double min_re = 0.0;
  double tau_at = 0.0;
  double xi_at = 0.0;
};

struct EpsilonG {
  double value = 0.0;
  /// Interval spanned by the last two shells.
  double lo = 0.0, hi = 0.0;
  bool converged = true;
  std::vector<ShellTrace> shells;
};

/// Dyadic shells rho_n = rho0 2^{-n} with tau = rho cos(phi), |xi| = rho sin(phi),
/// phi in (0, pi). value = -min of the last two shell minima; converged when
/// those minima agree within rel_tol.
EpsilonG epsilon_g(const CovarianceProfile& h, double rho0 = 1.0, int shells = 8, int angles = 16,
                   double rel_tol = 0.05);

struct Thresholds {
  /// 2 |S^{d-1}|
  double bound = 0.0;
  /// ||w^_-||_inf |S^{d-1}| int |h(r)| r dr
  double negative_part = 0.0;
  /// eps_g w^(0)_+
  double zero_plus = 0.0;
  bool negative_ok = true;
  bool zero_plus_ok = true;
};

Thresholds potential_thresholds(const CovarianceProfile& h, const InteractionPotential& w, double eps_g);

struct DecayBound {
  double sup = 0.0;
  double tau = 0.0;
  double xi = 0.0;
  bool finite = true;
};

/// sup over the table of |m_f| (1 + |tau|) / (1 + |xi|).
DecayBound decay_bound_check(const MultiplierTable& table);

struct DecaySlope {
  RVec tau;
  RVec abs_mf;
  /// Least-squares slope of log|m_f| against log tau over the last fit_points.
  double slope = 0.0;
};

DecaySlope decay_slope(const CovarianceProfile& h, double xi_abs, double tau0, int doublings, int fit_points = 4);

// L_1 on time-sampled real fields V[n](x), n dt for n = 0..M-1.

using TimeSeries = std::vector<RVec>;

/// F_x L_1 V (t, xi) = -2 w^(xi) int_0^t sin(|xi|^2 (t-s)) h(2|xi|(t-s)) F_x V(s, xi) ds,
/// with V piecewise linear in s and the kernel integrated per cell.
TimeSeries apply_L1_time_domain(const TorusGrid& grid, const TimeSeries& V, double dt, const CovarianceProfile& h,
                                const InteractionPotential& w);

/// Zero-padded FFT in t, multiplication by w^ m_f(tau, |xi|), inverse FFT.
/// V is taken as zero for t < 0 and beyond the sampled window.
TimeSeries apply_L1_frequency_domain(const TorusGrid& grid, const TimeSeries& V, double dt,
                                     const CovarianceProfile& h, const InteractionPotential& w, int pad_factor = 4);

}  // namespace hrf
