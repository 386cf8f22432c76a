#include "hrf/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hrf {

namespace {

void check_exponent(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("Lebesgue exponent must be >= 1");
}

RVec modulus2_of(std::span<const SpectralField> components) {
  if (components.empty()) throw std::invalid_argument("no components");
  const std::size_t n = components.front().size();
  RVec m2(n, 0.0);
  for (const auto& c : components) {
    if (c.grid() != components.front().grid()) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < n; ++i) m2[i] += std::norm(c[i]);
  }
  return m2;
}

double bump(double u) {
  if (u <= -1.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

CVec bracket_symbol(const TorusGrid& g, double s) {
  CVec sym(g.size());
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = std::pow(1.0 + g.frequency_norm2(i), 0.5 * s);
  return sym;
}

CVec block_symbol(const TorusGrid& g, int j) {
  CVec sym(g.size());
  for (std::size_t i = 0; i < sym.size(); ++i) sym[i] = lp_weight(j, std::sqrt(g.frequency_norm2(i)));
  return sym;
}

}  // namespace

double lebesgue_norm_from_modulus2(const TorusGrid& grid, const RVec& modulus2, double p) {
  check_exponent(p);
  if (std::isinf(p)) {
    double mx = 0.0;
    for (double v : modulus2) mx = std::max(mx, v);
    return std::sqrt(mx);
  }
  double sum = 0.0;
  if (p == 2.0) {
    for (double v : modulus2) sum += v;
  } else {
    for (double v : modulus2) sum += std::pow(v, 0.5 * p);
  }
  return std::pow(sum * grid.cell_volume(), 1.0 / p);
}

double lebesgue_norm(std::span<const SpectralField> components, double p) {
  return lebesgue_norm_from_modulus2(components.front().grid(), modulus2_of(components), p);
}

double lebesgue_norm(const SpectralField& field, double p) {
  return lebesgue_norm(std::span<const SpectralField>(&field, 1), p);
}

double sobolev_norm(std::span<const SpectralField> components, double s, double p) {
  const CVec sym = bracket_symbol(components.front().grid(), s);
  std::vector<SpectralField> lifted;
  lifted.reserve(components.size());
  for (const auto& c : components) lifted.push_back(apply_multiplier(c, sym));
  return lebesgue_norm(std::span<const SpectralField>(lifted), p);
}

double sobolev_norm(const SpectralField& field, double s, double p) {
  return sobolev_norm(std::span<const SpectralField>(&field, 1), s, p);
}

double lp_profile(double r) {
  if (!(r > 0.0)) return 0.0;
  const double u = std::log2(r);
  const double num = bump(u);
  if (num == 0.0) return 0.0;
  // The bump has support width 2 in u, so at most two shifts overlap.
  double den = 0.0;
  for (int k = -2; k <= 2; ++k) den += bump(u + k);
  return num / den;
}

double lp_weight(int j, double abs_xi) { return lp_profile(std::ldexp(abs_xi, -j)); }

LPRange resolvable_range(const TorusGrid& grid) {
  const double tol = 1e-12;
  LPRange r;
  r.j_min = static_cast<int>(std::ceil(std::log2(grid.dk()) - tol)) + 1;
  r.j_max = static_cast<int>(std::floor(std::log2(grid.nyquist()) + tol)) - 1;
  return r;
}

LPRange block_range(const TorusGrid& grid) {
  const double kmin = grid.dk();
  const double kmax = std::sqrt(static_cast<double>(grid.dim())) * grid.nyquist();
  LPRange r;
  r.j_min = static_cast<int>(std::floor(std::log2(kmin) - 1.0)) + 1;
  r.j_max = static_cast<int>(std::ceil(std::log2(kmax) + 1.0)) - 1;
  return r;
}

LPProjection lp_project(const SpectralField& field, int j) {
  const TorusGrid& g = field.grid();
  if (!block_range(g).contains(j)) return {SpectralField(g), false};
  return {apply_multiplier(field, block_symbol(g, j)), true};
}

double besov_norm(std::span<const SpectralField> components, double p, double s, double t) {
  check_exponent(p);
  const TorusGrid& g = components.front().grid();
  const LPRange range = resolvable_range(g);
  double sum = 0.0;
  for (int j = range.j_min; j <= range.j_max; ++j) {
    const CVec sym = block_symbol(g, j);
    std::vector<SpectralField> blocks;
    blocks.reserve(components.size());
    for (const auto& c : components) blocks.push_back(apply_multiplier(c, sym));
    const double nj = lebesgue_norm(std::span<const SpectralField>(blocks), p);
    const double weight = std::exp2(2.0 * j * (j < 0 ? s : t));
    sum += weight * nj * nj;
  }
  return std::sqrt(sum);
}

double besov_norm(const SpectralField& field, double p, double s, double t) {
  return besov_norm(std::span<const SpectralField>(&field, 1), p, s, t);
}

double lp_truncated_mass(const SpectralField& field) {
  const TorusGrid& g = field.grid();
  const LPRange range = resolvable_range(g);
  const auto& c = field.coefficients();
  double mass = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double r = std::sqrt(g.frequency_norm2(i));
    double covered = 0.0;
    for (int j = range.j_min; j <= range.j_max; ++j) covered += lp_weight(j, r);
    mass += std::norm(c[i]) * (1.0 - covered) * (1.0 - covered);
  }
  return mass * g.volume();
}

std::optional<double> bernstein_ratio(const SpectralField& field, int j, double a, double b) {
  if (!(a >= b && b >= 1.0)) throw std::invalid_argument("bernstein_ratio requires a >= b >= 1");
  const LPProjection proj = lp_project(field, j);
  const double den_norm = lebesgue_norm(proj.field, b);
  if (!(den_norm > 0.0)) return std::nullopt;
  const double inv_a = std::isinf(a) ? 0.0 : 1.0 / a;
  const double scale = std::exp2(j * field.grid().dim() * (1.0 / b - inv_a));
  return lebesgue_norm(proj.field, a) / (scale * den_norm);
}

}  // namespace hrf
