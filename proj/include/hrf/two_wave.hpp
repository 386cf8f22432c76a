#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hrf/distribution.hpp"
#include "hrf/grid.hpp"

namespace hrf {

/// Linearization around sqrt(m) e^{-i(|xi|^2+m)t}(g_1 e^{i xi.x} + g_2 e^{-i xi.x}).
struct TwoWaveParams {
  int dim = 1;
  Vec4 xi{};
  double mass = 0.0;
  InteractionPotential w = InteractionPotential::delta(1.0);

  void validate() const;
};

struct SymbolMatrix {
  Vec4 k{};
  Eigen::Matrix4cd m;
  double a2 = 0.0;  ///< -4 (xi.k)^2
  double b = 0.0;   ///< |k|^2
  double c = 0.0;   ///< m w^(k)
};

using Spectrum = std::array<Complex, 4>;

/// Symbol of A on (Re e1, Im e1, Re e2, Im e2) with grad -> ik, Laplacian -> -|k|^2.
SymbolMatrix build_symbol(const TwoWaveParams& p, const Vec4& k);

/// Roots Y of Y^2 + 2((b+c)b - a^2) Y + (b^2 + a^2)(b^2 + 2bc + a^2), then +-sqrt(Y).
/// The smaller real root comes from the product so nothing cancels.
Spectrum closed_form_spectrum(const TwoWaveParams& p, const Vec4& k);

struct EigenSpectrum {
  Spectrum values{};
  bool converged = false;
};
EigenSpectrum eigensolver_spectrum(const TwoWaveParams& p, const Vec4& k);
EigenSpectrum eigensolver_spectrum(const Eigen::Matrix4cd& m);

/// min over matchings of max |a_i - b_pi(i)|.
double multiset_distance(const Spectrum& a, const Spectrum& b);

/// P_A(lambda) = lambda^4 + 2((b+c)b - a^2) lambda^2 + ((b+c)b + a^2)^2 - b^2 c^2.
Complex char_poly(const SymbolMatrix& s, Complex lambda);

double max_real_part(const Spectrum& s);
/// Smallest pairwise distance; near zero the symbol is defective and a
/// generic eigensolver only resolves the roots to about sqrt(eps).
double root_gap(const Spectrum& s);

/// |xi|^4 (r^2 - 4)(r^2 - 4 + 2m/|xi|^2); negative exactly on the unstable ray band for w^ = 1.
double sign_polynomial(const TwoWaveParams& p, double r);

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

struct BandReport {
  /// Probe frequencies k = r xi (r e_1 when xi = 0).
  RVec r;
  RVec k_abs;
  RVec max_re;
  std::vector<Spectrum> spectra;
  /// Maximal runs of grid points with max Re lambda > 0, as [first, last] grid r.
  std::vector<Band> detected;
  /// r^2 in (max(0, 4 - 2m/|xi|^2), 4); only for the unit delta potential and xi != 0.
  std::optional<Band> predicted;
  double max_rate = 0.0;
  double argmax_r = 0.0;

  bool empty() const { return detected.empty(); }
  /// CSV: k_abs,re_lambda_max,im_lambda_1,im_lambda_2,im_lambda_3,im_lambda_4
  void write_csv(std::ostream& os) const;
};

BandReport unstable_band(const TwoWaveParams& p, const RVec& r_grid);
RVec linear_grid(double lo, double hi, int n);

struct GrowthOptions {
  double noise = 1e-10;
  std::uint64_t seed = 1;
  int samples = 400;
  /// Longest horizon tried when nothing grows within T.
  double horizon = 1e10;
};

struct GrowthFit {
  Vec4 k{};  ///< lattice frequency actually seeded
  double rate = 0.0;
  double residual = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  /// max Re lambda at k from the closed form.
  double predicted = 0.0;
  bool growth_detected = false;
  /// Set when the closed form predicts growth but none was measured.
  bool discrepancy = false;
  std::string note;
  RVec times;
  RVec amplitudes;
};

/// Evolves the four real components on the torus with exp(dt m_A(q)) per
/// lattice frequency. Initial data cos(k.x) in every component plus seeded
/// noise. The rate is the log-amplitude slope between 10x and 10^3x growth;
/// without such growth it is log(A(H)/A(0))/H at the longest horizon reached.
GrowthFit simulate_linearized(const TwoWaveParams& p, const TorusGrid& grid, const Vec4& k_seed, double T,
                              const GrowthOptions& opt = {});

}  // namespace hrf
