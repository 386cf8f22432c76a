#include "hrf/linear_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "hrf/equilibrium.hpp"
#include "hrf/quadrature.hpp"
#include "hrf/spectral_field.hpp"

namespace hrf {

namespace {

constexpr Complex kI(0.0, 1.0);

// Tail of int |h(2 xi t)| dt past T, using |h(y)| <= C <y>^{-2} for y >= 2 xi T.
double tail_bound(const CovarianceProfile& h, double xi, double T) {
  const double C = h.decay_envelope(2.0 * xi * T);
  return C * (0.5 * kPi - std::atan(2.0 * xi * T)) / (2.0 * xi);
}

double kernel(const CovarianceProfile& h, double xi, double t) {
  const double x = 2.0 * xi * t;
  if (h.table_decayed() && x > h.table_extent()) return 0.0;
  return std::sin(xi * xi * t) * h(x);
}

bool negligible(Complex c, double scale) { return std::abs(c) <= 1e-14 * scale; }

}  // namespace

MfValue compute_mf(const CovarianceProfile& h, double tau, double xi, const MfOptions& opt) {
  if (!(xi >= 0.0) || !std::isfinite(xi)) throw std::invalid_argument("|xi| must be finite and >= 0");
  if (!std::isfinite(tau)) throw std::invalid_argument("tau must be finite");
  MfValue out;
  if (xi == 0.0 || h.is_zero()) return out;

  const double xi2 = xi * xi;
  const double R = h.distribution().support_radius();
  double width = std::min(kPi / xi2, kPi / (2.0 * xi * R));
  if (tau != 0.0) width = std::min(width, kPi / std::abs(tau));
  const double h0 = h.h0();
  const double floor = opt.abs_floor * h0 / std::max(xi, 1.0);
  // Past the tabulated range h is below the table's decay floor (or unknown).
  const double t_end = h.table_extent() / (2.0 * xi);
  const bool decayed = h.table_decayed();

  auto g = [&](double t) {
    const double v = kernel(h, xi, t);
    return Complex(std::cos(tau * t) * v, -std::sin(tau * t) * v);
  };

  Complex acc(0.0, 0.0);
  double err = 0.0;
  double t = 0.0;
  bool done = false;
  for (int p = 0; p < opt.max_panels && !done; ++p) {
    double b = t + width;
    const bool last = b >= t_end;
    if (last) b = t_end;
    const auto r = quad::integrate<Complex>(g, t, b, 1e-13 * h0 * (b - t), opt.rel_tol);
    acc += r.value;
    err += r.error;
    out.converged = out.converged && r.converged;
    t = b;
    const double tail = tail_bound(h, xi, t);
    if (tail <= opt.tail_rel * std::abs(acc) || tail <= floor) {
      err += tail;
      done = true;
    } else if (last) {
      err += tail;
      out.converged = out.converged && decayed;
      done = true;
    }
  }
  if (!done) {
    err += tail_bound(h, xi, t);
    out.converged = false;
  }
  out.value = -2.0 * acc;
  out.error = 2.0 * err;
  return out;
}

// MultiplierTable

MultiplierTable::MultiplierTable(CovarianceProfile h, RVec tau, RVec xi, const MfOptions& opt)
    : h_(std::move(h)), tau_(std::move(tau)), xi_(std::move(xi)) {
  for (double x : xi_)
    if (!(x >= 0.0)) throw std::invalid_argument("|xi| grid must be nonnegative");
  const std::size_t n = tau_.size() * xi_.size();
  values_.assign(n, Complex(0.0, 0.0));
  errors_.assign(n, 0.0);
  std::vector<char> ok(n, 1);
  h_.h0();
  const long total = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < total; ++k) {
    const std::size_t it = static_cast<std::size_t>(k) / xi_.size();
    const std::size_t ix = static_cast<std::size_t>(k) % xi_.size();
    const MfValue v = compute_mf(h_, tau_[it], xi_[ix], opt);
    values_[k] = v.value;
    errors_[k] = v.error;
    ok[k] = v.converged ? 1 : 0;
  }
  converged_ = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

double MultiplierTable::max_error() const {
  double m = 0.0;
  for (double e : errors_) m = std::max(m, e);
  return m;
}

double MultiplierTable::sup_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

void MultiplierTable::write_csv(std::ostream& os) const {
  const auto prec = os.precision(17);
  os << "tau,xi_abs,re_mf,im_mf,err_estimate\n";
  for (std::size_t it = 0; it < tau_.size(); ++it)
    for (std::size_t ix = 0; ix < xi_.size(); ++ix) {
      const Complex v = at(it, ix);
      os << tau_[it] << ',' << xi_[ix] << ',' << v.real() << ',' << v.imag() << ',' << error_at(it, ix) << '\n';
    }
  os.precision(prec);
}

RVec log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw std::invalid_argument("log grid needs 0 < lo <= hi and n >= 1");
  RVec g;
  for (int i = 0; i < n; ++i) g.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return g;
}

RVec default_tau_grid(double tau_min, double tau_max, int n) {
  const RVec pos = log_grid(tau_min, tau_max, n);
  RVec g;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) g.push_back(-*it);
  g.push_back(0.0);
  g.insert(g.end(), pos.begin(), pos.end());
  return g;
}

RVec default_xi_grid(const TorusGrid& grid, int n) { return log_grid(grid.dk(), grid.nyquist(), n); }

MarginReport stability_margin(const MultiplierTable& table, const InteractionPotential& w) {
  MarginReport r;
  r.margin = std::numeric_limits<double>::infinity();
  for (std::size_t ix = 0; ix < table.xi().size(); ++ix) {
    const double wh = w.hat(table.xi()[ix]);
    for (std::size_t it = 0; it < table.tau().size(); ++it) {
      const double m = std::abs(1.0 - wh * table.at(it, ix));
      if (m < r.margin) {
        r.margin = m;
        r.tau = table.tau()[it];
        r.xi = table.xi()[ix];
      }
    }
  }
  if (!std::isfinite(r.margin)) r.margin = 1.0;
  return r;
}

EpsilonG epsilon_g(const CovarianceProfile& h, double rho0, int shells, int angles, double rel_tol) {
  if (shells < 2 || angles < 1 || !(rho0 > 0.0)) throw std::invalid_argument("epsilon_g needs >= 2 shells");
  EpsilonG out;
  if (h.is_zero()) {
    for (int n = 0; n < shells; ++n) out.shells.push_back({rho0 * std::ldexp(1.0, -n), 0.0, 0.0, 0.0});
    return out;
  }
  const double area2 = 2.0 * unit_sphere_area(h.dim());
  h.h0();
  for (int n = 0; n < shells; ++n) {
    const double rho = rho0 * std::ldexp(1.0, -n);
    RVec re(angles);
#pragma omp parallel for schedule(dynamic)
    for (int a = 0; a < angles; ++a) {
      const double phi = kPi * (a + 0.5) / angles;
      re[a] = compute_mf(h, rho * std::cos(phi), rho * std::sin(phi)).value.real() / area2;
    }
    ShellTrace s{rho, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (int a = 0; a < angles; ++a) {
      if (re[a] < s.min_re) {
        const double phi = kPi * (a + 0.5) / angles;
        s.min_re = re[a];
        s.tau_at = rho * std::cos(phi);
        s.xi_at = rho * std::sin(phi);
      }
    }
    out.shells.push_back(s);
  }
  const double a = out.shells[shells - 2].min_re;
  const double b = out.shells[shells - 1].min_re;
  out.value = -std::min(a, b);
  out.lo = -std::max(a, b);
  out.hi = -std::min(a, b);
  out.converged = std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
  return out;
}

Thresholds potential_thresholds(const CovarianceProfile& h, const InteractionPotential& w, double eps_g) {
  Thresholds t;
  t.bound = 2.0 * unit_sphere_area(h.dim());
  const double wm = potential_negative_sup(w);
  t.negative_part = wm > 0.0 ? wm * h_weighted_l1(h) : 0.0;
  t.zero_plus = eps_g * std::max(0.0, w.hat(0.0));
  t.negative_ok = t.negative_part < t.bound;
  t.zero_plus_ok = t.zero_plus < t.bound;
  return t;
}

DecayBound decay_bound_check(const MultiplierTable& table) {
  DecayBound d;
  for (std::size_t it = 0; it < table.tau().size(); ++it)
    for (std::size_t ix = 0; ix < table.xi().size(); ++ix) {
      const double v = std::abs(table.at(it, ix)) * (1.0 + std::abs(table.tau()[it])) / (1.0 + table.xi()[ix]);
      if (!std::isfinite(v)) d.finite = false;
      if (v > d.sup) {
        d.sup = v;
        d.tau = table.tau()[it];
        d.xi = table.xi()[ix];
      }
    }
  return d;
}

DecaySlope decay_slope(const CovarianceProfile& h, double xi_abs, double tau0, int doublings, int fit_points) {
  if (doublings < 1 || fit_points < 2 || fit_points > doublings + 1 || !(tau0 > 0.0))
    throw std::invalid_argument("decay_slope needs tau0 > 0 and 2 <= fit_points <= doublings + 1");
  DecaySlope s;
  for (int k = 0; k <= doublings; ++k) {
    const double tau = tau0 * std::ldexp(1.0, k);
    s.tau.push_back(tau);
    s.abs_mf.push_back(std::abs(compute_mf(h, tau, xi_abs).value));
  }
  const std::size_t n0 = s.tau.size() - fit_points;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n0; i < s.tau.size(); ++i) {
    const double x = std::log(s.tau[i]);
    const double y = std::log(s.abs_mf[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = fit_points;
  s.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return s;
}

// L_1

namespace {

void check_series(const TorusGrid& grid, const TimeSeries& V, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  for (const auto& v : V)
    if (v.size() != grid.size()) throw std::invalid_argument("time slice size does not match grid");
}

// Spatial coefficients per time slice, transposed to [frequency][time].
std::vector<CVec> spatial_coefficients(const TorusGrid& grid, const TimeSeries& V) {
  std::vector<CVec> out(grid.size(), CVec(V.size()));
  const double s = 1.0 / static_cast<double>(grid.size());
  CVec tmp(grid.size());
  for (std::size_t n = 0; n < V.size(); ++n) {
    for (std::size_t i = 0; i < grid.size(); ++i) tmp[i] = V[n][i];
    fft_forward(grid, tmp.data());
    for (std::size_t k = 0; k < grid.size(); ++k) out[k][n] = s * tmp[k];
  }
  return out;
}

TimeSeries to_physical(const TorusGrid& grid, const std::vector<CVec>& coeff, std::size_t steps) {
  TimeSeries out(steps, RVec(grid.size()));
  CVec tmp(grid.size());
  for (std::size_t n = 0; n < steps; ++n) {
    for (std::size_t k = 0; k < grid.size(); ++k) tmp[k] = coeff[k][n];
    fft_backward(grid, tmp.data());
    for (std::size_t i = 0; i < grid.size(); ++i) out[n][i] = tmp[i].real();
  }
  return out;
}

double series_scale(const std::vector<CVec>& c) {
  double m = 0.0;
  for (const auto& row : c)
    for (const auto& v : row) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TimeSeries apply_L1_time_domain(const TorusGrid& grid, const TimeSeries& V, double dt, const CovarianceProfile& h,
                                const InteractionPotential& w) {
  check_series(grid, V, dt);
  const std::size_t M = V.size();
  if (M == 0) return {};
  const auto c = spatial_coefficients(grid, V);
  const double scale = series_scale(c);
  std::vector<CVec> out(grid.size(), CVec(M, Complex(0.0, 0.0)));
  if (h.is_zero() || w.is_zero() || scale == 0.0) return to_physical(grid, out, M);
  h.h0();
  const long K = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < K; ++k) {
    const CVec& v = c[k];
    if (std::all_of(v.begin(), v.end(), [&](Complex z) { return negligible(z, scale); })) continue;
    const double xi = std::sqrt(grid.frequency_norm2(k));
    const double wh = w.hat(xi);
    if (xi == 0.0 || wh == 0.0) continue;
    // Product integration: V linear between samples, kernel integrated
    // exactly per cell. A_c, B_c weight the older and newer sample of the
    // cell at lag u in [c dt, (c+1) dt].
    using GL = boost::math::quadrature::gauss<double, 10>;
    RVec A(M, 0.0), B(M, 0.0);
    for (std::size_t cell = 0; cell + 1 < M; ++cell) {
      double a = 0.0, b = 0.0;
      auto node = [&](double x, double wt) {
        const double th = 0.5 * (1.0 + x);
        const double kv = kernel(h, xi, dt * (cell + th)) * wt;
        a += kv * th;
        b += kv * (1.0 - th);
      };
      for (std::size_t q = 0; q < GL::abscissa().size(); ++q) {
        const double x = GL::abscissa()[q], wt = GL::weights()[q];
        node(x, wt);
        if (x != 0.0) node(-x, wt);
      }
      A[cell] = -wh * dt * a;
      B[cell] = -wh * dt * b;
    }
    CVec& o = out[k];
    for (std::size_t n = 1; n < M; ++n) {
      Complex s = B[0] * v[n] + A[n - 1] * v[0];
      for (std::size_t j = 1; j < n; ++j) s += (A[j - 1] + B[j]) * v[n - j];
      o[n] = s;
    }
  }
  return to_physical(grid, out, M);
}

TimeSeries apply_L1_frequency_domain(const TorusGrid& grid, const TimeSeries& V, double dt,
                                     const CovarianceProfile& h, const InteractionPotential& w, int pad_factor) {
  check_series(grid, V, dt);
  if (pad_factor < 2) throw std::invalid_argument("pad factor must be >= 2");
  const std::size_t M = V.size();
  if (M == 0) return {};
  const auto c = spatial_coefficients(grid, V);
  const double scale = series_scale(c);
  std::vector<CVec> out(grid.size(), CVec(M, Complex(0.0, 0.0)));
  if (h.is_zero() || w.is_zero() || scale == 0.0) return to_physical(grid, out, M);
  h.h0();
  std::size_t P = 1;
  while (P < M * static_cast<std::size_t>(pad_factor)) P <<= 1;
  const TorusGrid tgrid(1, 1.0, static_cast<int>(P));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const CVec& v = c[k];
    if (std::all_of(v.begin(), v.end(), [&](Complex z) { return negligible(z, scale); })) continue;
    const double xi = std::sqrt(grid.frequency_norm2(k));
    const double wh = w.hat(xi);
    if (xi == 0.0 || wh == 0.0) continue;
    CVec buf(P, Complex(0.0, 0.0));
    std::copy(v.begin(), v.end(), buf.begin());
    fft_forward(tgrid, buf.data());
    double peak = 0.0;
    for (const auto& z : buf) peak = std::max(peak, std::abs(z));
    const long Pl = static_cast<long>(P);
#pragma omp parallel for schedule(dynamic)
    for (long q = 0; q < Pl; ++q) {
      if (std::abs(buf[q]) <= 1e-15 * peak) {
        buf[q] = 0.0;
        continue;
      }
      const long signed_q = q < Pl / 2 ? q : q - Pl;
      const double tau = 2.0 * kPi * static_cast<double>(signed_q) / (static_cast<double>(P) * dt);
      buf[q] *= wh * compute_mf(h, tau, xi).value;
    }
    fft_backward(tgrid, buf.data());
    for (std::size_t n = 0; n < M; ++n) out[k][n] = buf[n] / static_cast<double>(P);
  }
  return to_physical(grid, out, M);
}

}  // namespace hrf
