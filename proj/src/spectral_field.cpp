#include "hrf/spectral_field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace hrf {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  fftw_plan forward_unaligned = nullptr;
  fftw_plan backward_unaligned = nullptr;
};

// Plans are created once per (dim, N) and executed through the new-array
// interface, which is thread-safe.
const PlanPair& plans_for(const TorusGrid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(grid.dim(), grid.points());
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  int n[kMaxDim];
  for (int a = 0; a < grid.dim(); ++a) n[a] = grid.points();
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * grid.size()));
  PlanPair pair;
  pair.forward = fftw_plan_dft(grid.dim(), n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  pair.backward = fftw_plan_dft(grid.dim(), n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  pair.forward_unaligned = fftw_plan_dft(grid.dim(), n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  pair.backward_unaligned = fftw_plan_dft(grid.dim(), n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (!pair.forward || !pair.backward || !pair.forward_unaligned || !pair.backward_unaligned)
    throw std::runtime_error("FFTW planning failed");
  return cache.emplace(key, pair).first->second;
}

}  // namespace

void fft_forward(const TorusGrid& grid, Complex* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  const PlanPair& p = plans_for(grid);
  fftw_execute_dft(fftw_alignment_of(reinterpret_cast<double*>(data)) == 0 ? p.forward : p.forward_unaligned, buf, buf);
}

void fft_backward(const TorusGrid& grid, Complex* data) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  const PlanPair& p = plans_for(grid);
  fftw_execute_dft(fftw_alignment_of(reinterpret_cast<double*>(data)) == 0 ? p.backward : p.backward_unaligned, buf,
                   buf);
}

SpectralField::SpectralField(TorusGrid grid)
    : grid_(std::move(grid)),
      values_(grid_.size(), Complex(0.0, 0.0)),
      cache_(std::make_shared<CoefficientCache>()) {}

SpectralField::SpectralField(TorusGrid grid, CVec values)
    : grid_(std::move(grid)), values_(std::move(values)), cache_(std::make_shared<CoefficientCache>()) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
}

SpectralField SpectralField::from_coefficients(TorusGrid grid, CVec coefficients) {
  if (coefficients.size() != grid.size()) throw std::invalid_argument("coefficient count does not match grid");
  CVec values = coefficients;
  fft_backward(grid, values.data());
  SpectralField field(std::move(grid), std::move(values));
  std::call_once(field.cache_->once, [&] { field.cache_->coefficients = std::move(coefficients); });
  return field;
}

SpectralField SpectralField::from_function(TorusGrid grid, const std::function<Complex(const Vec4&)>& fn) {
  CVec values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = fn(grid.position(i));
  return SpectralField(std::move(grid), std::move(values));
}

const CVec& SpectralField::coefficients() const {
  std::call_once(cache_->once, [this] {
    CVec c = values_;
    fft_forward(grid_, c.data());
    const double inv = 1.0 / static_cast<double>(grid_.size());
    for (auto& v : c) v *= inv;
    cache_->coefficients = std::move(c);
  });
  return cache_->coefficients;
}

SpectralField SpectralField::operator+(const SpectralField& other) const {
  if (grid_ != other.grid_) throw std::invalid_argument("grid mismatch");
  CVec v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + other.values_[i];
  return SpectralField(grid_, std::move(v));
}

SpectralField SpectralField::operator-(const SpectralField& other) const {
  if (grid_ != other.grid_) throw std::invalid_argument("grid mismatch");
  CVec v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - other.values_[i];
  return SpectralField(grid_, std::move(v));
}

SpectralField SpectralField::operator*(Complex scale) const {
  CVec v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] * scale;
  return SpectralField(grid_, std::move(v));
}

const CVec& forward_transform(const SpectralField& field) { return field.coefficients(); }

SpectralField inverse_transform(const TorusGrid& grid, CVec coefficients) {
  return SpectralField::from_coefficients(grid, std::move(coefficients));
}

SpectralField apply_multiplier(const SpectralField& field, const CVec& sampled_symbol) {
  const auto& c = field.coefficients();
  if (sampled_symbol.size() != c.size()) throw std::invalid_argument("symbol size does not match grid");
  CVec out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Complex s = sampled_symbol[i];
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw std::invalid_argument("multiplier symbol is not finite on the lattice");
    out[i] = s * c[i];
  }
  return SpectralField::from_coefficients(field.grid(), std::move(out));
}

SpectralField apply_multiplier(const SpectralField& field, const Symbol& symbol) {
  const TorusGrid& g = field.grid();
  CVec sampled(g.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) sampled[i] = symbol(g.frequency(i));
  return apply_multiplier(field, sampled);
}

SpectralField lattice_shift(const SpectralField& field, const Index4& shift) {
  const TorusGrid& g = field.grid();
  CVec out(g.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    Index4 src = g.multi_index(i);
    for (int a = 0; a < g.dim(); ++a) src[a] -= shift[a];
    out[i] = field[g.flat_of_wavenumbers(src)];
  }
  return SpectralField(g, std::move(out));
}

double frequency_side_l2(const SpectralField& field) {
  const TorusGrid& g = field.grid();
  const double vol = g.volume();
  double sum = 0.0;
  for (const auto& c : field.coefficients()) sum += std::norm(vol * c);
  return std::sqrt(sum * g.freq_cell_volume() / std::pow(2.0 * kPi, g.dim()));
}

}  // namespace hrf
