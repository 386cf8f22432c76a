#include "hrf/two_wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "hrf/spectral_field.hpp"

namespace hrf {

void TwoWaveParams::validate() const {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be in 1..4");
  if (!(mass >= 0.0) || !std::isfinite(mass)) throw std::invalid_argument("mass must be finite and >= 0");
  for (int i = dim; i < kMaxDim; ++i)
    if (xi[i] != 0.0) throw std::invalid_argument("xi has components beyond the dimension");
}

SymbolMatrix build_symbol(const TwoWaveParams& p, const Vec4& k) {
  SymbolMatrix s;
  s.k = k;
  const double xk = dot(p.xi, k);
  s.a2 = -4.0 * xk * xk;
  s.b = norm2(k);
  s.c = p.mass == 0.0 ? 0.0 : p.mass * p.w.hat(k);
  const Complex drift(0.0, -2.0 * xk);
  const double b = s.b, c = s.c;
  s.m << drift, b, 0.0, 0.0,
         -b - c, drift, -c, 0.0,
         0.0, 0.0, -drift, b,
         -c, 0.0, -b - c, -drift;
  return s;
}

Spectrum closed_form_spectrum(const TwoWaveParams& p, const Vec4& k) {
  const SymbolMatrix s = build_symbol(p, k);
  const double a2 = s.a2, b = s.b, c = s.c;
  const double pp = a2 - (b + c) * b;
  const double d2 = b * (b * c * c - 4.0 * (b + c) * a2);
  const double q = (b * b + a2) * (b * b + 2.0 * b * c + a2);

  auto roots = [](double y) -> std::pair<Complex, Complex> {
    if (y >= 0.0) return {Complex(std::sqrt(y), 0.0), Complex(-std::sqrt(y), 0.0)};
    return {Complex(0.0, std::sqrt(-y)), Complex(0.0, -std::sqrt(-y))};
  };

  if (d2 >= 0.0) {
    const double D = std::sqrt(d2);
    const double big = pp >= 0.0 ? pp + D : pp - D;
    const double small = big != 0.0 ? q / big : 0.0;
    const double yp = pp >= 0.0 ? big : small;
    const double ym = pp >= 0.0 ? small : big;
    const auto [x1, x2] = roots(yp);
    const auto [x3, x4] = roots(ym);
    return {x1, x2, x3, x4};
  }
  const Complex z = std::sqrt(Complex(pp, std::sqrt(-d2)));
  return {z, -z, std::conj(z), -std::conj(z)};
}

EigenSpectrum eigensolver_spectrum(const Eigen::Matrix4cd& m) {
  EigenSpectrum out;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m, false);
  out.converged = es.info() == Eigen::Success;
  if (out.converged)
    for (int i = 0; i < 4; ++i) out.values[i] = es.eigenvalues()[i];
  else
    out.values.fill(Complex(std::numeric_limits<double>::quiet_NaN(), 0.0));
  return out;
}

EigenSpectrum eigensolver_spectrum(const TwoWaveParams& p, const Vec4& k) {
  return eigensolver_spectrum(build_symbol(p, k).m);
}

double multiset_distance(const Spectrum& a, const Spectrum& b) {
  std::array<int, 4> perm{0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Complex char_poly(const SymbolMatrix& s, Complex x) {
  const double u = (s.b + s.c) * s.b;
  const Complex x2 = x * x;
  return x2 * x2 + 2.0 * (u - s.a2) * x2 + (u + s.a2) * (u + s.a2) - s.b * s.b * s.c * s.c;
}

double max_real_part(const Spectrum& s) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& z : s) m = std::max(m, z.real());
  return m;
}

double root_gap(const Spectrum& s) {
  double g = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) g = std::min(g, std::abs(s[i] - s[j]));
  return g;
}

double sign_polynomial(const TwoWaveParams& p, double r) {
  const double x2 = norm2(p.xi);
  return x2 * x2 * (r * r - 4.0) * (r * r - 4.0 + 2.0 * p.mass / x2);
}

RVec linear_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw std::invalid_argument("linear grid needs n >= 2 and hi > lo");
  RVec g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

BandReport unstable_band(const TwoWaveParams& p, const RVec& r_grid) {
  p.validate();
  BandReport rep;
  Vec4 dir = p.xi;
  if (norm2(dir) == 0.0) dir = {1.0, 0.0, 0.0, 0.0};
  const std::size_t n = r_grid.size();
  rep.r = r_grid;
  rep.k_abs.resize(n);
  rep.max_re.resize(n);
  rep.spectra.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec4 k{};
    for (int j = 0; j < kMaxDim; ++j) k[j] = r_grid[i] * dir[j];
    rep.k_abs[i] = std::sqrt(norm2(k));
    rep.spectra[i] = closed_form_spectrum(p, k);
    rep.max_re[i] = max_real_part(rep.spectra[i]);
  }
  rep.max_rate = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rep.max_re[i] > rep.max_rate) {
      rep.max_rate = rep.max_re[i];
      rep.argmax_r = r_grid[i];
    }
    if (rep.max_re[i] > 0.0) {
      if (i > 0 && rep.max_re[i - 1] > 0.0)
        rep.detected.back().hi = r_grid[i];
      else
        rep.detected.push_back({r_grid[i], r_grid[i]});
    }
  }
  const double x2 = norm2(p.xi);
  if (p.w.is_unit_delta() && x2 > 0.0) {
    if (p.mass > 0.0) {
      const double lo2 = 4.0 - 2.0 * p.mass / x2;
      rep.predicted = Band{std::sqrt(std::max(0.0, lo2)), 2.0};
    }
  }
  return rep;
}

void BandReport::write_csv(std::ostream& os) const {
  const auto prec = os.precision(17);
  os << "k_abs,re_lambda_max,im_lambda_1,im_lambda_2,im_lambda_3,im_lambda_4\n";
  for (std::size_t i = 0; i < r.size(); ++i) {
    Spectrum s = spectra[i];
    std::sort(s.begin(), s.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
    os << k_abs[i] << ',' << max_re[i];
    for (const auto& z : s) os << ',' << z.imag();
    os << '\n';
  }
  os.precision(prec);
}

GrowthFit simulate_linearized(const TwoWaveParams& p, const TorusGrid& grid, const Vec4& k_seed, double T,
                              const GrowthOptions& opt) {
  p.validate();
  if (grid.dim() != p.dim) throw std::invalid_argument("grid dimension does not match parameters");
  if (!(T > 0.0) || opt.samples < 4) throw std::invalid_argument("need T > 0 and at least 4 samples");

  GrowthFit fit;
  Index4 kn{};
  for (int i = 0; i < grid.dim(); ++i) {
    kn[i] = static_cast<int>(std::lround(k_seed[i] / grid.dk()));
    if (std::abs(kn[i]) >= grid.points() / 2) throw std::invalid_argument("seed frequency beyond the grid");
    fit.k[i] = kn[i] * grid.dk();
  }
  fit.predicted = max_real_part(closed_form_spectrum(p, fit.k));

  const std::size_t n = grid.size();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<CVec> field(4, CVec(n));
  for (int c = 0; c < 4; ++c) {
    for (std::size_t i = 0; i < n; ++i)
      field[c][i] = std::cos(dot(fit.k, grid.position(i))) + opt.noise * gauss(rng);
    fft_forward(grid, field[c].data());
  }
  std::vector<Eigen::Vector4cd> u0(n);
  std::vector<Eigen::Matrix4cd> sym(n);
  for (std::size_t q = 0; q < n; ++q) {
    for (int c = 0; c < 4; ++c) u0[q][c] = field[c][q] / static_cast<double>(n);
    sym[q] = build_symbol(p, grid.frequency(q)).m;
  }
  auto amplitude = [&](const std::vector<Eigen::Vector4cd>& u) {
    double s = 0.0;
    for (const auto& v : u) s += v.squaredNorm();
    return std::sqrt(s);
  };
  const double a0 = amplitude(u0);

  const double dt = T / opt.samples;
  std::vector<Eigen::Matrix4cd> prop(n);
  for (std::size_t q = 0; q < n; ++q) prop[q] = (dt * sym[q]).exp();
  std::vector<Eigen::Vector4cd> u = u0;
  fit.times.push_back(0.0);
  fit.amplitudes.push_back(a0);
  for (int s = 1; s <= opt.samples; ++s) {
    for (std::size_t q = 0; q < n; ++q) u[q] = prop[q] * u[q];
    fit.times.push_back(s * dt);
    fit.amplitudes.push_back(amplitude(u));
    if (fit.amplitudes.back() >= 1e3 * a0) break;
  }

  std::size_t i0 = 0, i1 = 0;
  for (std::size_t i = 0; i < fit.amplitudes.size(); ++i)
    if (fit.amplitudes[i] >= 10.0 * a0) {
      i0 = i;
      break;
    }
  i1 = fit.amplitudes.size() - 1;
  if (i0 > 0 && i1 >= i0 + 2) {
    fit.growth_detected = true;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(i1 - i0 + 1);
    for (std::size_t i = i0; i <= i1; ++i) {
      const double x = fit.times[i], y = std::log(fit.amplitudes[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    fit.rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double icpt = (sy - fit.rate * sx) / m;
    double r2 = 0.0;
    for (std::size_t i = i0; i <= i1; ++i) {
      const double e = std::log(fit.amplitudes[i]) - (icpt + fit.rate * fit.times[i]);
      r2 += e * e;
    }
    fit.residual = std::sqrt(r2 / m);
    fit.window_start = fit.times[i0];
    fit.window_end = fit.times[i1];
  } else {
    double H = T;
    double ratio = fit.amplitudes.back() / a0;
    fit.rate = std::log(ratio) / fit.times.back();
    fit.window_end = fit.times.back();
    while (H * 10.0 <= opt.horizon * (1.0 + 1e-12)) {
      H *= 10.0;
      std::vector<Eigen::Vector4cd> uh(n);
      for (std::size_t q = 0; q < n; ++q) uh[q] = (H * sym[q]).exp() * u0[q];
      const double r = amplitude(uh) / a0;
      if (!std::isfinite(r)) break;
      fit.rate = std::log(r) / H;
      fit.window_end = H;
      if (r >= 10.0) {
        fit.growth_detected = true;
        fit.note = "growth only at long horizon";
        break;
      }
    }
  }
  if (fit.predicted > 1e-8 && !fit.growth_detected) {
    fit.discrepancy = true;
    fit.note = "closed form predicts growth but none was measured";
  }
  return fit;
}

}  // namespace hrf
