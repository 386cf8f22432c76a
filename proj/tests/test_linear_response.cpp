#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hrf/linear_response.hpp"

using namespace hrf;

namespace {

// Dawson's function by its Maclaurin series, adequate for |x| <= 3.
double dawson(double x) {
  double term = x, sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -2.0 * x * x / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

TEST_CASE("Gaussian profile at zero frequency against Dawson") {
  // |f|^2 = e^{-|xi|^2} in d = 3 gives h(x) = pi^{3/2} e^{-x^2/4}, and
  // m_f(0, 1) = -2 pi^{3/2} int sin(t) e^{-t^2} dt = -2 pi^{3/2} D(1/2).
  const CovarianceProfile h(DistributionFunction::gaussian(1.0, 1.0), 3);
  REQUIRE(h.h0() == doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-12));
  const MfValue v = compute_mf(h, 0.0, 1.0);
  CHECK(v.converged);
  const double oracle = -2.0 * std::pow(kPi, 1.5) * dawson(0.5);
  CHECK(std::abs(v.value.real() - oracle) <= 1e-10 * std::abs(oracle));
  CHECK(std::abs(v.value.imag()) <= 1e-12);
}

TEST_CASE("degenerate inputs") {
  const CovarianceProfile zero(DistributionFunction::zero(), 2);
  CHECK(compute_mf(zero, 1.3, 0.7).value == Complex(0.0));
  const CovarianceProfile h(DistributionFunction::fermi(1.0, 0.0), 2);
  CHECK(compute_mf(h, 2.0, 0.0).value == Complex(0.0));
  CHECK(compute_mf(h, 0.0, 0.0).value == Complex(0.0));
}

TEST_CASE("conjugate symmetry and error estimates") {
  const CovarianceProfile h(DistributionFunction::fermi(1.0, 0.0), 3);
  for (double tau : {0.1, 1.0, 7.5})
    for (double xi : {0.3, 1.0, 3.0}) {
      const MfValue a = compute_mf(h, tau, xi), b = compute_mf(h, -tau, xi);
      CHECK(a.converged);
      CHECK(std::abs(a.value - std::conj(b.value)) <= 2.0 * (a.error + b.error) + 1e-14);
    }
}

TEST_CASE("multiplier table and margins") {
  const CovarianceProfile h(DistributionFunction::fermi(1.0, 0.0), 4);
  const TorusGrid g(4, 8.0 * kPi, 16);
  const MultiplierTable t(h, default_tau_grid(1e-2, 16.0, 6), default_xi_grid(g, 6));
  CHECK(t.converged());
  CHECK(t.tau().size() == 13);
  CHECK(t.xi().size() == 6);
  const double sup = t.sup_abs();
  CHECK(std::isfinite(sup));
  CHECK(sup > 0.0);
  CHECK(stability_margin(t, InteractionPotential::none()).margin == 1.0);
  const MarginReport small = stability_margin(t, InteractionPotential::delta(0.5 / sup));
  CHECK(small.margin >= 0.5 - 1e-12);
  CHECK(decay_bound_check(t).finite);

  std::ostringstream os;
  t.write_csv(os);
  const std::string s = os.str();
  CHECK(s.rfind("tau,xi_abs,re_mf,im_mf,err_estimate\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 13 * 6);
}

TEST_CASE("grids") {
  const RVec tau = default_tau_grid(1e-3, 32.0, 4);
  REQUIRE(tau.size() == 9);
  CHECK(tau[4] == 0.0);
  CHECK(tau[0] == doctest::Approx(-32.0));
  CHECK(tau[8] == doctest::Approx(32.0));
  for (std::size_t i = 1; i < tau.size(); ++i) CHECK(tau[i] > tau[i - 1]);
  const TorusGrid g(1, 2.0 * kPi, 64);
  const RVec xi = default_xi_grid(g, 5);
  CHECK(xi.front() == doctest::Approx(1.0));
  CHECK(xi.back() == doctest::Approx(32.0));
}

TEST_CASE("epsilon_g and thresholds") {
  const CovarianceProfile h(DistributionFunction::fermi(1.0, 0.0), 4);
  const EpsilonG e = epsilon_g(h);
  CHECK(e.converged);
  CHECK(e.value > 0.0);
  CHECK(e.lo <= e.value);
  CHECK(e.hi >= e.lo);
  const Thresholds th = potential_thresholds(h, InteractionPotential::delta(0.05), e.value);
  CHECK(th.bound == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-12));
  CHECK(th.negative_part == 0.0);
  CHECK(th.negative_ok);
  CHECK(th.zero_plus == doctest::Approx(0.05 * e.value));
}

TEST_CASE("L1 by time and frequency domain") {
  const TorusGrid g(1, 2.0 * kPi, 16);
  const CovarianceProfile h(DistributionFunction::fermi(1.0, 0.0), 1);
  const auto w = InteractionPotential::delta(1.0);
  const double dt = 0.02;
  const int M = 1000;
  TimeSeries V(M, RVec(g.size()));
  for (int n = 0; n < M; ++n) {
    const double t = n * dt;
    for (std::size_t i = 0; i < g.size(); ++i)
      V[n][i] = std::exp(-(t - 5.0) * (t - 5.0)) * (std::cos(g.position(i)[0]) + 0.5 * std::sin(3.0 * g.position(i)[0]));
  }
  const TimeSeries a = apply_L1_time_domain(g, V, dt, h, w);
  const TimeSeries b = apply_L1_frequency_domain(g, V, dt, h, w);
  double diff = 0.0, peak = 0.0;
  for (int n = 0; n < M; ++n)
    for (std::size_t i = 0; i < g.size(); ++i) {
      diff = std::max(diff, std::abs(a[n][i] - b[n][i]));
      peak = std::max(peak, std::abs(a[n][i]));
    }
  CHECK(peak > 0.1);
  CHECK(diff <= 1e-4 * peak);

  const TimeSeries z = apply_L1_time_domain(g, V, dt, h, InteractionPotential::none());
  for (const auto& row : z)
    for (double x : row) CHECK(x == 0.0);
}

TEST_CASE("decay slope is finite and negative") {
  const CovarianceProfile h(DistributionFunction::gaussian(1.0, 1.0), 3);
  const DecaySlope s = decay_slope(h, 1.0, 4.0, 5);
  CHECK(s.tau.size() == 6);
  CHECK(s.slope < -0.5);
}
