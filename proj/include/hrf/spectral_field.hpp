#pragma once

#include <functional>
#include <memory>
#include <mutex>

#include "hrf/grid.hpp"

namespace hrf {

/// Unnormalized in-place transforms over a grid's flat storage.
/// forward: c_k = sum_x f(x) e^{-i xi_k . x}; backward: sum_k c_k e^{+i xi_k . x}.
void fft_forward(const TorusGrid& grid, Complex* data);
void fft_backward(const TorusGrid& grid, Complex* data);

/// One complex field on a torus grid.
///
/// The physical samples are the primary representation. Fourier-series
/// coefficients c_k = N^{-d} sum_x f(x) e^{-i xi_k . x} are computed on first
/// request and cached; copies share the cache. The continuum transform on the
/// torus is V * c_k with V the box volume, so that
/// f(x) = (2 pi)^{-d} sum_k f^(xi_k) e^{i xi_k . x} dxi.
class SpectralField {
 public:
  explicit SpectralField(TorusGrid grid);
  SpectralField(TorusGrid grid, CVec values);

  static SpectralField from_coefficients(TorusGrid grid, CVec coefficients);
  static SpectralField from_function(TorusGrid grid, const std::function<Complex(const Vec4&)>& fn);

  const TorusGrid& grid() const { return grid_; }
  const CVec& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  Complex operator[](std::size_t i) const { return values_[i]; }

  /// Fourier-series coefficients in FFT storage order.
  const CVec& coefficients() const;

  SpectralField operator+(const SpectralField& other) const;
  SpectralField operator-(const SpectralField& other) const;
  SpectralField operator*(Complex scale) const;

 private:
  struct CoefficientCache {
    std::once_flag once;
    CVec coefficients;
  };

  TorusGrid grid_;
  CVec values_;
  std::shared_ptr<CoefficientCache> cache_;
};

const CVec& forward_transform(const SpectralField& field);
SpectralField inverse_transform(const TorusGrid& grid, CVec coefficients);

using Symbol = std::function<Complex(const Vec4&)>;

/// Multiplies every Fourier coefficient by symbol(xi). Throws
/// std::invalid_argument when the symbol is not finite on the lattice.
SpectralField apply_multiplier(const SpectralField& field, const Symbol& symbol);

/// Same as apply_multiplier with the symbol pre-sampled in storage order.
SpectralField apply_multiplier(const SpectralField& field, const CVec& sampled_symbol);

/// Integer lattice translation: result(x) = field(x - shift * dx).
SpectralField lattice_shift(const SpectralField& field, const Index4& shift);

/// (2 pi)^{-d} sum_k |f^(xi_k)|^2 dxi, the frequency-side L^2 norm.
double frequency_side_l2(const SpectralField& field);

}  // namespace hrf
