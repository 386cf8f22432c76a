#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <vector>

namespace hrf {

// 64-byte aligned storage so that FFT plans can use SIMD kernels.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) {}
  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlign); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

using Complex = std::complex<double>;
using CVec = std::vector<Complex, AlignedAllocator<Complex>>;
using RVec = std::vector<double>;

/// Point in (at most four dimensional) physical or frequency space; unused
/// trailing components are zero.
using Vec4 = std::array<double, 4>;
/// Integer lattice multi-index.
using Index4 = std::array<int, 4>;

inline constexpr int kMaxDim = 4;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

double dot(const Vec4& a, const Vec4& b);
double norm2(const Vec4& a);

/// Area of the unit sphere S^{d-1} in R^d.
double unit_sphere_area(int d);

/// Periodic box [0, L)^d sampled with N points per axis. Frequencies live on
/// the dual lattice (2 pi / L) k with k in [-N/2, N/2)^d.
///
/// Flat indices are row-major with axis 0 slowest, matching the FFT layout.
class TorusGrid {
 public:
  TorusGrid(int dim, double length, int points);

  int dim() const { return dim_; }
  double length() const { return length_; }
  int points() const { return points_; }
  std::size_t size() const { return size_; }

  double dx() const { return length_ / points_; }
  double cell_volume() const;
  double volume() const;
  /// Spacing of the frequency lattice, 2 pi / L.
  double dk() const { return 2.0 * kPi / length_; }
  /// Volume of one frequency cell, (2 pi / L)^d.
  double freq_cell_volume() const;
  /// Largest resolved frequency per axis, pi N / L.
  double nyquist() const { return kPi * points_ / length_; }

  Index4 multi_index(std::size_t flat) const;
  std::size_t flat_index(const Index4& idx) const;
  /// Signed wavenumber associated with storage index i along one axis.
  int wavenumber(int i) const { return i < points_ / 2 ? i : i - points_; }
  /// Flat storage index of the signed wavenumber vector k (taken mod N).
  std::size_t flat_of_wavenumbers(const Index4& k) const;

  Vec4 position(std::size_t flat) const;
  Vec4 frequency(std::size_t flat) const;
  double frequency_norm2(std::size_t flat) const { return (*freq_norm2_)[flat]; }
  const RVec& frequency_norms2() const { return *freq_norm2_; }

  bool operator==(const TorusGrid& other) const;
  bool operator!=(const TorusGrid& other) const { return !(*this == other); }

 private:
  int dim_;
  double length_;
  int points_;
  std::size_t size_;
  std::shared_ptr<const RVec> freq_norm2_;
};

}  // namespace hrf
