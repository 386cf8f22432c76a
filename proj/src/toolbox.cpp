#include "hrf/toolbox.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hrf/norms.hpp"
#include "hrf/spectral_field.hpp"

namespace hrf {

namespace {

SpectralField random_field(const TorusGrid& g, std::mt19937_64& rng, bool zero_mean) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVec v(g.size());
  for (auto& z : v) z = Complex(n(rng), n(rng));
  if (zero_mean) {
    Complex mean(0.0, 0.0);
    for (const auto& z : v) mean += z;
    mean /= static_cast<double>(v.size());
    for (auto& z : v) z -= mean;
  }
  return SpectralField(g, std::move(v));
}

}  // namespace

ToolboxReport toolbox_suite(const ToolboxOptions& opt) {
  ToolboxReport rep;
  std::mt19937_64 rng(opt.seed);
  const TorusGrid grid(opt.dim, 2.0 * kPi, opt.points);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = std::sqrt(grid.frequency_norm2(i));
    if (r == 0.0) continue;
    const LPRange br = block_range(grid);
    double s = 0.0;
    for (int j = br.j_min; j <= br.j_max; ++j) s += lp_weight(j, r);
    rep.partition = std::max(rep.partition, std::abs(s - 1.0));
  }

  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double exps[] = {1.0, 2.0, 4.0, kInf};
  for (int n = 0; n < opt.fields; ++n) {
    const SpectralField f = random_field(grid, rng, n % 10 == 0);
    const auto& c = f.coefficients();
    double spec = 0.0;
    for (const auto& z : c) spec += std::norm(z);
    spec *= grid.volume();
    const double phys = std::pow(lebesgue_norm(f, 2.0), 2);
    rep.parseval = std::max(rep.parseval, std::abs(phys - spec) / spec);

    if (n % 10 == 0) {
      const LPRange br = block_range(grid);
      CVec sum(grid.size(), Complex(0.0, 0.0));
      for (int j = br.j_min; j <= br.j_max; ++j) {
        const auto pj = lp_project(f, j);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += pj.field[i];
      }
      double err = 0.0, mx = 0.0;
      for (std::size_t i = 0; i < sum.size(); ++i) {
        err = std::max(err, std::abs(sum[i] - f[i]));
        mx = std::max(mx, std::abs(f[i]));
      }
      rep.reconstruction = std::max(rep.reconstruction, err / mx);
    }

    const double p = exps[n % 4];
    double s1 = -2.0 + 4.0 * u(rng), s2 = -2.0 + 4.0 * u(rng);
    double t1 = -2.0 + 4.0 * u(rng), t2 = -2.0 + 4.0 * u(rng);
    if (s1 > s2) std::swap(s1, s2);
    if (t1 < t2) std::swap(t1, t2);
    const double lo = besov_norm(f, p, s2, t2);
    const double hi = besov_norm(f, p, s1, t1);
    ++rep.besov_checks;
    rep.besov_worst = std::max(rep.besov_worst, lo / hi);
    if (lo > hi * (1.0 + 1e-12)) ++rep.besov_violations;
  }

  // Shells j = -3..3 need 2^{-4} >= 2 pi / L and 2^4 <= pi N / L.
  const TorusGrid wide(1, 32.0 * kPi, 512);
  double rmin = kInf, rmax = 0.0;
  for (int j = -3; j <= 3; ++j) {
    const SpectralField f = lp_project(random_field(wide, rng, true), j).field;
    const auto r = bernstein_ratio(f, j, kInf, 2.0);
    if (!r) continue;
    rmin = std::min(rmin, *r);
    rmax = std::max(rmax, *r);
  }
  rep.bernstein_spread = rmax > 0.0 ? rmax / rmin : kInf;
  return rep;
}

}  // namespace hrf
