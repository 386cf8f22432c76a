#include "hrf/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hrf {

double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double norm2(const Vec4& a) { return dot(a, a); }

double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    case 3: return 4.0 * kPi;
    case 4: return 2.0 * kPi * kPi;
    default: return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
  }
}

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

TorusGrid::TorusGrid(int dim, double length, int points)
    : dim_(dim), length_(length), points_(points), size_(1) {
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("grid dimension must be in 1..4, got " + std::to_string(dim));
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid length must be positive and finite");
  if (points < 2 || !is_power_of_two(points))
    throw std::invalid_argument("grid points per axis must be a power of two >= 2, got " +
                                std::to_string(points));
  for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points);

  auto k2 = std::make_shared<RVec>(size_);
  for (std::size_t i = 0; i < size_; ++i) (*k2)[i] = norm2(frequency(i));
  freq_norm2_ = std::move(k2);
}

double TorusGrid::cell_volume() const { return std::pow(dx(), dim_); }

double TorusGrid::volume() const { return std::pow(length_, dim_); }

double TorusGrid::freq_cell_volume() const { return std::pow(dk(), dim_); }

Index4 TorusGrid::multi_index(std::size_t flat) const {
  Index4 idx{0, 0, 0, 0};
  for (int a = dim_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_);
    flat /= points_;
  }
  return idx;
}

std::size_t TorusGrid::flat_index(const Index4& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim_; ++a) flat = flat * points_ + static_cast<std::size_t>(idx[a]);
  return flat;
}

std::size_t TorusGrid::flat_of_wavenumbers(const Index4& k) const {
  Index4 idx{0, 0, 0, 0};
  for (int a = 0; a < dim_; ++a) idx[a] = ((k[a] % points_) + points_) % points_;
  return flat_index(idx);
}

Vec4 TorusGrid::position(std::size_t flat) const {
  const Index4 idx = multi_index(flat);
  Vec4 x{0, 0, 0, 0};
  for (int a = 0; a < dim_; ++a) x[a] = idx[a] * dx();
  return x;
}

Vec4 TorusGrid::frequency(std::size_t flat) const {
  const Index4 idx = multi_index(flat);
  Vec4 xi{0, 0, 0, 0};
  for (int a = 0; a < dim_; ++a) xi[a] = wavenumber(idx[a]) * dk();
  return xi;
}

bool TorusGrid::operator==(const TorusGrid& other) const {
  return dim_ == other.dim_ && length_ == other.length_ && points_ == other.points_;
}

}  // namespace hrf
