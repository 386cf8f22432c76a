#include "hrf/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hrf/quadrature.hpp"

namespace hrf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> radial_edges(const DistributionFunction& f) {
  const double R = f.support_radius();
  std::vector<double> edges{0.0};
  for (double b : f.breakpoints())
    if (b > 0.0 && b < R) edges.push_back(b);
  edges.push_back(R);
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Log-spaced samples on (0, R] with breakpoints bracketed from both sides.
std::vector<double> radial_samples(const DistributionFunction& f, int n) {
  const double R = f.support_radius();
  std::vector<double> r;
  const double lo = R * 1e-6;
  for (int i = 0; i < n; ++i) r.push_back(lo * std::pow(R / lo, static_cast<double>(i) / (n - 1)));
  for (double b : f.breakpoints()) {
    r.push_back(b * (1.0 - 1e-9));
    r.push_back(b * (1.0 + 1e-9));
  }
  std::sort(r.begin(), r.end());
  return r;
}

HypothesisBullet sobolev_mass(const DistributionFunction& f, int d) {
  HypothesisBullet b{"sobolev_mass", CheckStatus::Pass, 0.0, kNaN, ""};
  const int k = std::max(0, static_cast<int>(std::ceil(0.5 * d - 1.0)));
  b.detail = "int <xi>^" + std::to_string(2 * k) + " |f|^2";
  if (f.is_zero()) return b;
  auto g = [&](double r) { return std::pow(1.0 + r * r, k) * f.f2(r) * std::pow(r, d - 1); };
  const auto res = quad::integrate_panels<double>(g, radial_edges(f), 1e-300, 1e-10);
  b.value = unit_sphere_area(d) * res.value;
  if (!res.converged) b.status = CheckStatus::Indeterminate;
  else if (!std::isfinite(b.value)) b.status = CheckStatus::Fail;
  return b;
}

// int |xi|^{1-d} |f grad f| = |S| int |f f'| dr = |S|/2 TV(|f|^2).
HypothesisBullet f_grad_f(const DistributionFunction& f, int d) {
  HypothesisBullet b{"f_grad_f", CheckStatus::Pass, 0.0, kNaN, "int |xi|^{1-d} |f grad f|"};
  if (f.is_zero()) return b;
  const auto r = radial_samples(f, 20000);
  double tv = std::abs(f.f2(0.0) - f.f2(r.front()));
  for (std::size_t i = 1; i < r.size(); ++i) tv += std::abs(f.f2(r[i]) - f.f2(r[i - 1]));
  tv += f.f2(r.back());
  b.value = 0.5 * unit_sphere_area(d) * tv;
  if (!std::isfinite(b.value)) b.status = CheckStatus::Fail;
  return b;
}

HypothesisBullet monotone(const DistributionFunction& f) {
  HypothesisBullet b{"monotone", CheckStatus::Pass, 0.0, kNaN, "d_r |f|^2 < 0 for r > 0"};
  if (f.is_zero()) {
    b.status = CheckStatus::Fail;
    b.detail = "|f|^2 vanishes identically";
    return b;
  }
  const auto r = radial_samples(f, 4000);
  // value: largest non-negative increment found.
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double prev = f.f2(r[i - 1]);
    if (prev < 1e-250) break;
    const double cur = f.f2(r[i]);
    worst = std::max(worst, cur - prev);
    if (!(cur < prev)) {
      b.status = CheckStatus::Fail;
      b.detail = "not strictly decreasing near r = " + std::to_string(r[i]);
      break;
    }
  }
  b.value = worst;
  return b;
}

HypothesisBullet h_decay(const CovarianceProfile& h, int d) {
  const int k = std::max(0, static_cast<int>(std::ceil(0.5 * d - 1.0)));
  const int nmax = std::min(4, 2 * k);
  HypothesisBullet b{"h_decay", CheckStatus::Pass, 0.0, kNaN,
                     "sup <x>^2 |h^(n)|, n <= " + std::to_string(nmax)};
  if (h.is_zero()) return b;
  if (!h.converged()) {
    b.status = CheckStatus::Indeterminate;
    return b;
  }
  const double X = h.table_extent();
  const int samples = 8000;
  double sup = 0.0, tail = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = X * i / samples;
    for (int n = 0; n <= nmax; ++n) {
      const double v = (1.0 + x * x) * std::abs(h.derivative(x, n));
      sup = std::max(sup, v);
      if (i >= samples * 9 / 10) tail = std::max(tail, v);
    }
  }
  b.value = sup;
  if (!std::isfinite(sup)) {
    b.status = CheckStatus::Fail;
  } else if (!h.table_decayed()) {
    // Growth in the last tenth of the table signals an unbounded weight.
    b.status = tail >= sup ? CheckStatus::Fail : CheckStatus::Indeterminate;
    b.detail += "; h not decayed within x < " + std::to_string(X);
  }
  return b;
}

// |S| int (|h| + |h'|) dr together with |S| int |h| r dr.
struct HIntegrals {
  double grad_l1 = 0.0;
  double weighted = 0.0;
  bool reliable = true;
};

HIntegrals h_integrals(const CovarianceProfile& h, int d) {
  HIntegrals out;
  if (h.is_zero()) return out;
  const double X = h.table_extent();
  auto g1 = [&](double x) { return std::abs(h(x)) + std::abs(h.derivative(x, 1)); };
  auto g2 = [&](double x) { return std::abs(h(x)) * x; };
  const int panels = std::max(1, static_cast<int>(X * 4.0));
  std::vector<double> edges;
  for (int i = 0; i <= panels; ++i) edges.push_back(X * i / panels);
  const double area = unit_sphere_area(d);
  const auto r1 = quad::integrate_panels<double>(g1, edges, 1e-14, 1e-8);
  const auto r2 = quad::integrate_panels<double>(g2, edges, 1e-14, 1e-8);
  out.grad_l1 = area * r1.value;
  out.weighted = area * r2.value;
  out.reliable = h.converged() && h.table_decayed();
  return out;
}

}  // namespace

double potential_negative_sup(const InteractionPotential& w) {
  if (w.is_zero()) return 0.0;
  switch (w.kind()) {
    case PotentialKind::Delta:
    case PotentialKind::Gaussian:
      return std::max(0.0, -w.amplitude());
    default:
      break;
  }
  double m = 0.0;
  m = std::max(m, -w.hat(0.0));
  for (int i = 0; i <= 4000; ++i) m = std::max(m, -w.hat(1e-4 * std::pow(1e8, i / 4000.0)));
  return m;
}

double h_weighted_l1(const CovarianceProfile& h) { return h_integrals(h, h.dim()).weighted; }

double equilibrium_mass(const CovarianceProfile& h, const InteractionPotential& w) {
  if (h.is_zero()) return 0.0;
  const double w0 = w.hat(0.0);
  if (w0 == 0.0) return 0.0;
  return w0 * h.h0();
}

double equilibrium_mass(const DistributionFunction& f, const InteractionPotential& w, int d) {
  if (f.is_zero()) return 0.0;
  const double w0 = w.hat(0.0);
  return w0 == 0.0 ? 0.0 : w0 * eval_h(f, d, 0.0).value;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

const HypothesisBullet* HypothesisReport::find(const std::string& name) const {
  for (const auto& b : bullets)
    if (b.name == name) return &b;
  return nullptr;
}

bool HypothesisReport::all_pass() const {
  return std::all_of(bullets.begin(), bullets.end(), [](const auto& b) { return b.status == CheckStatus::Pass; });
}

HypothesisReport hypothesis_check(const DistributionFunction& f, const InteractionPotential& w, int d,
                                  std::optional<double> eps_g) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("dimension must be in 1..4");
  HypothesisReport rep;
  rep.dim = d;
  rep.bullets.push_back({"dimension", d >= 4 ? CheckStatus::Pass : CheckStatus::Fail, static_cast<double>(d), 4.0,
                         "scattering statement needs d >= 4"});
  rep.bullets.push_back(sobolev_mass(f, d));
  rep.bullets.push_back(f_grad_f(f, d));
  rep.bullets.push_back(monotone(f));

  const CovarianceProfile h(f, d);
  rep.bullets.push_back(h_decay(h, d));
  const HIntegrals hi = h_integrals(h, d);

  HypothesisBullet grad{"h_grad_l1", CheckStatus::Pass, hi.grad_l1, kNaN, "int |xi|^{1-d} (|h| + |grad h|)"};
  if (!std::isfinite(hi.grad_l1)) grad.status = CheckStatus::Fail;
  else if (!hi.reliable) grad.status = CheckStatus::Indeterminate;
  rep.bullets.push_back(grad);

  const double bound = 2.0 * unit_sphere_area(d);
  const double wm = potential_negative_sup(w);
  HypothesisBullet wmb{"w_minus", CheckStatus::Pass, wm * hi.weighted, bound,
                       "||w^_-||_inf int |h| |x|^{2-d} dx < 2|S^{d-1}|"};
  if (wm > 0.0) {
    if (!hi.reliable) wmb.status = CheckStatus::Indeterminate;
    else if (!(wmb.value < bound)) wmb.status = CheckStatus::Fail;
  }
  rep.bullets.push_back(wmb);

  const double w0p = std::max(0.0, w.hat(0.0));
  HypothesisBullet wzp{"w_zero_plus", CheckStatus::Pass, 0.0, bound, "eps_g w^(0)_+ < 2|S^{d-1}|"};
  if (w0p > 0.0 && !f.is_zero()) {
    if (!eps_g) {
      wzp.status = CheckStatus::Indeterminate;
      wzp.value = kNaN;
      wzp.detail += "; eps_g not supplied";
    } else {
      wzp.value = *eps_g * w0p;
      if (!std::isfinite(wzp.value)) wzp.status = CheckStatus::Indeterminate;
      else if (!(wzp.value < bound)) wzp.status = CheckStatus::Fail;
    }
  }
  rep.bullets.push_back(wzp);
  return rep;
}

}  // namespace hrf
