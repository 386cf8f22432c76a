#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "hrf/two_wave.hpp"

using namespace hrf;

namespace {

TwoWaveParams params(double xi, double m) {
  TwoWaveParams p;
  p.xi = {xi, 0, 0, 0};
  p.mass = m;
  return p;
}

Spectrum sorted_imag(Spectrum s) {
  std::sort(s.begin(), s.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
  return s;
}

}  // namespace

TEST_CASE("free symbol without mass") {
  const Spectrum s = sorted_imag(closed_form_spectrum(params(1.0, 0.0), {1.0, 0, 0, 0}));
  const double want[4] = {-3.0, -1.0, 1.0, 3.0};
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(s[i].real()) < 1e-14);
    CHECK(s[i].imag() == doctest::Approx(want[i]).epsilon(1e-14));
  }
  const auto es = eigensolver_spectrum(params(1.0, 0.0), {1.0, 0, 0, 0});
  CHECK(es.converged);
  CHECK(multiset_distance(es.values, s) < 1e-12);
}

TEST_CASE("condensate at rest") {
  const Spectrum s = sorted_imag(closed_form_spectrum(params(0.0, 1.0), {1.0, 0, 0, 0}));
  const double r3 = std::sqrt(3.0);
  const double want[4] = {-r3, -1.0, 1.0, r3};
  for (int i = 0; i < 4; ++i) {
    CHECK(s[i].real() == 0.0);
    CHECK(s[i].imag() == doctest::Approx(want[i]).epsilon(1e-14));
  }
}

TEST_CASE("unstable frequency") {
  const Vec4 k{std::sqrt(3.0), 0, 0, 0};
  const Spectrum s = closed_form_spectrum(params(1.0, 1.0), k);
  // Y^2 + 48 Y - 9 = 0 at a^2 = -12, b = 3, c = 1
  const double yp = -24.0 + std::sqrt(585.0);
  CHECK(max_real_part(s) == doctest::Approx(std::sqrt(yp)).epsilon(1e-13));
  CHECK(max_real_part(s) == doctest::Approx(0.432173).epsilon(1e-6));
  const auto es = eigensolver_spectrum(params(1.0, 1.0), k);
  CHECK(multiset_distance(es.values, s) < 1e-12);
}

TEST_CASE("symbol at zero frequency") {
  const SymbolMatrix z = build_symbol(params(1.0, 0.0), {});
  CHECK(z.m.isZero(0.0));
  const SymbolMatrix s = build_symbol(params(1.0, 2.0), {});
  CHECK(s.m(1, 0) == Complex(-2.0));
  for (const auto& v : closed_form_spectrum(params(1.0, 2.0), {})) CHECK(v == Complex(0.0));
}

TEST_CASE("eigensolver on scaled identity") {
  const Eigen::Matrix4cd m = Complex(2.0, -1.0) * Eigen::Matrix4cd::Identity();
  const auto es = eigensolver_spectrum(m);
  CHECK(es.converged);
  for (const auto& v : es.values) CHECK(std::abs(v - Complex(2.0, -1.0)) < 1e-15);
}

TEST_CASE("closed form agrees with eigensolver and characteristic polynomial") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0), um(0.0, 5.0);
  double worst = 0.0;
  for (int n = 0; n < 2000; ++n) {
    TwoWaveParams p;
    p.dim = 1 + n % 4;
    for (int i = 0; i < p.dim; ++i) p.xi[i] = u(rng);
    p.mass = um(rng);
    if (n % 2) p.w = InteractionPotential::gaussian(1.0, 0.7);
    Vec4 k{};
    for (int i = 0; i < p.dim; ++i) k[i] = u(rng);
    const Spectrum cf = closed_form_spectrum(p, k);
    const auto es = eigensolver_spectrum(p, k);
    REQUIRE(es.converged);
    if (root_gap(cf) < 1e-6) continue;
    worst = std::max(worst, multiset_distance(cf, es.values));
    const SymbolMatrix s = build_symbol(p, k);
    double scale = 1.0;
    for (const auto& z : cf) scale = std::max(scale, std::abs(z));
    for (const auto& z : cf) CHECK(std::abs(char_poly(s, z)) <= 1e-9 * std::pow(scale, 4));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("spectrum symmetries") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 200; ++n) {
    TwoWaveParams p = params(u(rng), std::abs(u(rng)));
    const Vec4 k{u(rng), 0, 0, 0};
    const Spectrum s = closed_form_spectrum(p, k);
    Spectrum neg, conj;
    for (int i = 0; i < 4; ++i) {
      neg[i] = -s[i];
      conj[i] = std::conj(s[i]);
    }
    CHECK(multiset_distance(s, neg) < 1e-12 * (1.0 + std::abs(s[0])));
    CHECK(multiset_distance(s, conj) < 1e-12 * (1.0 + std::abs(s[0])));
    const Vec4 mk{-k[0], 0, 0, 0};
    CHECK(multiset_distance(s, closed_form_spectrum(p, mk)) < 1e-12 * (1.0 + std::abs(s[0])));
  }
}

TEST_CASE("unstable band for the unit delta") {
  const TwoWaveParams p = params(1.0, 1.0);
  const RVec r = linear_grid(0.0, 3.0, 1000);
  const BandReport rep = unstable_band(p, r);
  REQUIRE(rep.detected.size() == 1);
  REQUIRE(rep.predicted);
  const double dr = r[1] - r[0];
  CHECK(std::abs(rep.detected[0].lo - std::sqrt(2.0)) <= dr * (1 + 1e-9));
  CHECK(std::abs(rep.detected[0].hi - 2.0) <= dr * (1 + 1e-9));
  for (std::size_t i = 0; i < r.size(); ++i)
    if (std::abs(sign_polynomial(p, r[i])) > 1e-9) CHECK((rep.max_re[i] > 0.0) == (sign_polynomial(p, r[i]) < 0.0));

  std::ostringstream os;
  rep.write_csv(os);
  CHECK(os.str().rfind("k_abs,re_lambda_max,im_lambda_1,im_lambda_2,im_lambda_3,im_lambda_4\n", 0) == 0);
}

TEST_CASE("large mass opens the band down to zero") {
  const BandReport rep = unstable_band(params(1.0, 3.0), linear_grid(0.0, 3.0, 301));
  REQUIRE(rep.predicted);
  CHECK(rep.predicted->lo == 0.0);
  REQUIRE(rep.detected.size() == 1);
  CHECK(rep.detected[0].lo <= 0.01 + 1e-12);
}

TEST_CASE("stable configurations") {
  const RVec r = linear_grid(0.0, 3.0, 1000);
  CHECK(unstable_band(params(1.0, 0.0), r).empty());
  CHECK(unstable_band(params(0.0, 1.0), r).empty());
  CHECK_FALSE(unstable_band(params(0.0, 1.0), r).predicted);
}

TEST_CASE("parameter validation") {
  TwoWaveParams p = params(1.0, -1.0);
  CHECK_THROWS(p.validate());
  p = params(1.0, 1.0);
  p.xi[2] = 1.0;
  CHECK_THROWS(p.validate());
  CHECK_THROWS(linear_grid(1.0, 0.0, 10));
}

TEST_CASE("linearized simulation growth") {
  const TorusGrid g(1, 2.0 * kPi * 16, 256);
  const GrowthFit fit = simulate_linearized(params(1.0, 1.0), g, {1.75, 0, 0, 0}, 40.0);
  CHECK(fit.growth_detected);
  CHECK_FALSE(fit.discrepancy);
  CHECK(std::abs(fit.rate - fit.predicted) <= 0.05 * fit.predicted);

  const GrowthFit calm = simulate_linearized(params(1.0, 0.0), g, {1.75, 0, 0, 0}, 40.0);
  CHECK_FALSE(calm.growth_detected);
  CHECK(std::abs(calm.rate) <= 1e-8);
  CHECK_THROWS(simulate_linearized(params(1.0, 1.0), g, {100.0, 0, 0, 0}, 40.0));
}
