#pragma once

#include <memory>

#include "hrf/distribution.hpp"

namespace hrf {

struct HValue {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// h(x) = int_{R^d} |f(xi)|^2 e^{i xi . x} dxi for radial |f|^2, without a
/// (2 pi)^{-d} prefactor. Evaluated by radial Gauss-Kronrod quadrature against
/// the exact angular kernel: cos (d=1), J_0 (d=2), sin(z)/z (d=3), 2 J_1(z)/z (d=4).
HValue eval_h(const DistributionFunction& f, int d, double x);

/// Radial kernel Gamma(d/2) (2/z)^{d/2-1} J_{d/2-1}(z), equal to 1 at z = 0.
double angular_kernel(int d, double z);

/// The covariance transform h of a distribution, tabulated on first use by
/// piecewise Chebyshev interpolation of the direct quadrature (closed form for
/// the zero-temperature Fermi ball).
///
/// Beyond the tabulated extent the direct quadrature is used. Copies share the
/// table; evaluation is thread-safe.
class CovarianceProfile {
 public:
  CovarianceProfile(DistributionFunction f, int d);

  const DistributionFunction& distribution() const;
  int dim() const;
  bool is_zero() const;

  /// h(0) = int |f|^2.
  double h0() const;
  HValue eval(double x) const;
  double operator()(double x) const { return eval(x).value; }
  /// n-th radial derivative (n <= 4) inside the tabulated range, else NaN.
  double derivative(double x, int n) const;

  /// Largest deviation between interpolant and direct quadrature seen at the
  /// check points, plus the worst quadrature error.
  double error_estimate() const;
  bool converged() const;
  double table_extent() const;
  /// True when h fell below roughly 1e-14 h(0) before the table size cap.
  bool table_decayed() const;
  /// Upper envelope sup_{y >= x} <y>^2 |h(y)| from the table; past the table
  /// the value at its edge.
  double decay_envelope(double x) const;

 private:
  struct Table;
  const Table& table() const;

  std::shared_ptr<Table> table_;
};

}  // namespace hrf
