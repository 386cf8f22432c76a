#include "hrf/covariance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "hrf/quadrature.hpp"

namespace hrf {

namespace {

constexpr int kNodes = 24;
constexpr int kMaxPanelsDecaying = 600;
constexpr int kMaxPanelsSlow = 160;

double integrand_scale(const DistributionFunction& f, int d) {
  // int |f|^2 over R^d, used to set absolute tolerances.
  const double R = f.support_radius();
  std::vector<double> edges{0.0};
  for (double b : f.breakpoints())
    if (b > 0.0 && b < R) edges.push_back(b);
  edges.push_back(R);
  auto g = [&](double r) { return f.f2(r) * std::pow(r, d - 1); };
  const auto res = quad::integrate_panels<double>(g, edges, 1e-300, 1e-14);
  return unit_sphere_area(d) * res.value;
}

HValue direct_h(const DistributionFunction& f, int d, double x, double scale) {
  if (f.is_zero()) return {};
  x = std::abs(x);
  const double R = f.support_radius();
  std::vector<double> cuts;
  for (double b : f.breakpoints())
    if (b > 0.0 && b < R) cuts.push_back(b);
  std::vector<double> edges{0.0};
  const double period = x > 0.0 ? 2.0 * kPi / x : R;
  const double step = std::min(R / 4.0, period);
  const int n = std::max(1, static_cast<int>(std::ceil(R / step)));
  for (int i = 1; i < n; ++i) edges.push_back(R * i / n);
  edges.push_back(R);
  for (double c : cuts) edges.push_back(c);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  const double area = unit_sphere_area(d);
  auto g = [&](double r) {
    const double v = f.f2(r);
    if (v == 0.0) return 0.0;
    return area * v * angular_kernel(d, r * x) * std::pow(r, d - 1);
  };
  const auto res = quad::integrate_panels<double>(
      g, edges, 1e-15 * std::max(scale, 1e-300) * static_cast<double>(edges.size()), 1e-13);
  return {res.value, res.error, res.converged};
}

// Transform of the indicator of the ball of radius a.
double ball_h(int d, double a, double x) {
  const double z = a * std::abs(x);
  switch (d) {
    case 1:
      return z < 1e-8 ? 2.0 * a : 2.0 * std::sin(z) / std::abs(x);
    case 2:
      return z < 1e-8 ? kPi * a * a : 2.0 * kPi * a * a * std::cyl_bessel_j(1.0, z) / z;
    case 3: {
      const double c = z < 1e-2 ? 1.0 / 3.0 - z * z / 30.0 + z * z * z * z / 840.0
                                : (std::sin(z) - z * std::cos(z)) / (z * z * z);
      return 4.0 * kPi * a * a * a * c;
    }
    default:
      return z < 1e-8 ? 0.5 * kPi * kPi * std::pow(a, 4)
                      : 4.0 * kPi * kPi * std::pow(a, 4) * std::cyl_bessel_j(2.0, z) / (z * z);
  }
}

std::array<double, kNodes> chebyshev_nodes() {
  std::array<double, kNodes> t{};
  for (int k = 0; k < kNodes; ++k) t[k] = std::cos(kPi * (k + 0.5) / kNodes);
  return t;
}

// Evaluates sum_k c_k T_k(t) by Clenshaw.
double clenshaw(const std::array<double, kNodes>& c, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (int k = kNodes - 1; k >= 1; --k) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + c[0];
}

std::array<double, kNodes> differentiate(const std::array<double, kNodes>& c) {
  std::array<double, kNodes> d{};
  for (int k = kNodes - 2; k >= 0; --k) d[k] = (k + 2 < kNodes ? d[k + 2] : 0.0) + 2.0 * (k + 1) * c[k + 1];
  d[0] *= 0.5;
  return d;
}

}  // namespace

double angular_kernel(int d, double z) {
  z = std::abs(z);
  switch (d) {
    case 1:
      return std::cos(z);
    case 2:
      return std::cyl_bessel_j(0.0, z);
    case 3:
      return z < 1e-4 ? 1.0 - z * z / 6.0 : std::sin(z) / z;
    case 4:
      return z < 1e-4 ? 1.0 - z * z / 8.0 : 2.0 * std::cyl_bessel_j(1.0, z) / z;
    default:
      throw std::invalid_argument("dimension must be in 1..4");
  }
}

HValue eval_h(const DistributionFunction& f, int d, double x) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension must be in 1..4");
  if (f.is_zero()) return {};
  return direct_h(f, d, x, integrand_scale(f, d));
}

struct CovarianceProfile::Table {
  DistributionFunction f;
  int d;
  double scale = 0.0;
  double width = 0.0;
  bool converged = true;
  bool decayed = false;
  double error = 0.0;
  std::vector<std::array<double, kNodes>> coeffs;
  std::vector<double> envelope;  // suffix max of <x>^2 |h| per panel
  std::once_flag once;

  Table(DistributionFunction fn, int dim) : f(std::move(fn)), d(dim) {}

  void build() {
    if (f.is_zero()) return;
    scale = integrand_scale(f, d);
    const double R = f.support_radius();
    width = std::min(8.0 / R, 4.0);
    const bool slow = f.kind() == DistributionKind::ZeroTempFermi || f.kind() == DistributionKind::Custom;
    const int max_panels = slow && f.name() != "gaussian" ? kMaxPanelsSlow : kMaxPanelsDecaying;
    const auto t = chebyshev_nodes();
    std::vector<double> panel_max;
    int quiet = 0;
    for (int p = 0; p < max_panels; ++p) {
      const double a = p * width;
      std::array<double, kNodes> vals{};
      double pmax = 0.0, hmax = 0.0;
      for (int k = 0; k < kNodes; ++k) {
        const double x = a + 0.5 * width * (t[k] + 1.0);
        const HValue hv = sample(x);
        vals[k] = hv.value;
        converged = converged && hv.converged;
        error = std::max(error, hv.error);
        pmax = std::max(pmax, (1.0 + x * x) * std::abs(hv.value));
        hmax = std::max(hmax, std::abs(hv.value));
      }
      std::array<double, kNodes> c{};
      for (int j = 0; j < kNodes; ++j) {
        double s = 0.0;
        for (int k = 0; k < kNodes; ++k) s += vals[k] * std::cos(kPi * j * (k + 0.5) / kNodes);
        c[j] = (j == 0 ? 1.0 : 2.0) * s / kNodes;
      }
      coeffs.push_back(c);
      panel_max.push_back(pmax);
      // One off-node check per panel.
      const double probe = a + 0.37 * width;
      const HValue hv = sample(probe);
      const double interp = clenshaw(c, 2.0 * (probe - a) / width - 1.0);
      error = std::max(error, std::abs(interp - hv.value));
      if (hmax < 1e-14 * scale) {
        if (++quiet >= 2) {
          decayed = true;
          break;
        }
      } else {
        quiet = 0;
      }
    }
    envelope.assign(panel_max.size(), 0.0);
    double run = 0.0;
    for (std::size_t i = panel_max.size(); i-- > 0;) {
      run = std::max(run, panel_max[i]);
      envelope[i] = run;
    }
  }

  HValue sample(double x) const {
    if (f.kind() == DistributionKind::ZeroTempFermi) return {ball_h(d, std::sqrt(f.mu()), x), 0.0, true};
    return direct_h(f, d, x, scale);
  }

  double extent() const { return width * static_cast<double>(coeffs.size()); }
};

CovarianceProfile::CovarianceProfile(DistributionFunction f, int d)
    : table_(std::make_shared<Table>(std::move(f), d)) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension must be in 1..4");
}

const CovarianceProfile::Table& CovarianceProfile::table() const {
  std::call_once(table_->once, [this] { table_->build(); });
  return *table_;
}

const DistributionFunction& CovarianceProfile::distribution() const { return table_->f; }
int CovarianceProfile::dim() const { return table_->d; }
bool CovarianceProfile::is_zero() const { return table_->f.is_zero(); }

double CovarianceProfile::h0() const {
  if (is_zero()) return 0.0;
  return eval(0.0).value;
}

HValue CovarianceProfile::eval(double x) const {
  const Table& tb = table();
  if (tb.f.is_zero()) return {};
  x = std::abs(x);
  if (x < tb.extent()) {
    const std::size_t p = std::min(tb.coeffs.size() - 1, static_cast<std::size_t>(x / tb.width));
    const double a = p * tb.width;
    return {clenshaw(tb.coeffs[p], 2.0 * (x - a) / tb.width - 1.0), tb.error, tb.converged};
  }
  return tb.sample(x);
}

double CovarianceProfile::derivative(double x, int n) const {
  const Table& tb = table();
  if (tb.f.is_zero()) return 0.0;
  if (n < 0 || n > 4) throw std::invalid_argument("derivative order must be in 0..4");
  const double ax = std::abs(x);
  if (ax >= tb.extent()) return std::nan("");
  const std::size_t p = std::min(tb.coeffs.size() - 1, static_cast<std::size_t>(ax / tb.width));
  auto c = tb.coeffs[p];
  for (int k = 0; k < n; ++k) c = differentiate(c);
  const double a = p * tb.width;
  double v = clenshaw(c, 2.0 * (ax - a) / tb.width - 1.0) * std::pow(2.0 / tb.width, n);
  // h is even: odd derivatives flip sign for negative arguments.
  if (x < 0.0 && n % 2 == 1) v = -v;
  return v;
}

double CovarianceProfile::error_estimate() const { return table().error; }
bool CovarianceProfile::converged() const { return table().converged; }
double CovarianceProfile::table_extent() const { return table().extent(); }
bool CovarianceProfile::table_decayed() const { return is_zero() || table().decayed; }

double CovarianceProfile::decay_envelope(double x) const {
  const Table& tb = table();
  if (tb.f.is_zero()) return 0.0;
  x = std::abs(x);
  const std::size_t p = static_cast<std::size_t>(x / tb.width);
  if (p < tb.envelope.size()) return tb.envelope[p];
  return tb.envelope.empty() ? 0.0 : tb.envelope.back();
}

}  // namespace hrf
