#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hrf/grid.hpp"

namespace hrf {

enum class DistributionKind { Zero, Bose, Fermi, ZeroTempFermi, Custom };

/// Radial distribution profile r -> |f(r)|^2.
///
/// Bose:  1 / (e^{(r^2 - mu)/T} - 1), mu < 0
/// Fermi: 1 / (e^{(r^2 - mu)/T} + 1)
/// ZeroTempFermi: indicator of r^2 <= mu, mu > 0
class DistributionFunction {
 public:
  static DistributionFunction zero();
  static DistributionFunction bose(double temperature, double mu);
  static DistributionFunction fermi(double temperature, double mu);
  static DistributionFunction zero_temp_fermi(double mu);
  /// amplitude * exp(-r^2 / width^2).
  static DistributionFunction gaussian(double amplitude, double width);
  /// Arbitrary nonnegative profile. Beyond support_radius the profile must be
  /// negligible; breakpoints lists radii where it is not smooth.
  static DistributionFunction custom(std::string name, std::function<double(double)> f2, double support_radius,
                                     std::vector<double> breakpoints = {});

  DistributionKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double temperature() const { return temperature_; }
  double mu() const { return mu_; }
  bool is_zero() const { return kind_ == DistributionKind::Zero; }

  double f2(double r) const;
  /// Radius past which |f|^2 is below roughly 1e-18 of its peak.
  double support_radius() const { return support_; }
  /// Radii at which |f|^2 has a jump or kink.
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  DistributionFunction() = default;

  DistributionKind kind_ = DistributionKind::Zero;
  std::string name_ = "zero";
  double temperature_ = 0.0;
  double mu_ = 0.0;
  double support_ = 0.0;
  std::vector<double> breakpoints_;
  std::function<double(double)> custom_;
};

double eval_f2(const DistributionFunction& f, double r);

enum class PotentialKind { None, Delta, Gaussian, Custom };

/// Pair interaction through its (real, even, radial) Fourier transform.
/// Delta: w^ = amplitude. Gaussian: w^(k) = amplitude * exp(-(width |k|)^2 / 2),
/// so that the integral of w equals the amplitude.
class InteractionPotential {
 public:
  static InteractionPotential none();
  static InteractionPotential delta(double amplitude = 1.0);
  static InteractionPotential gaussian(double amplitude, double width);
  static InteractionPotential custom(std::string name, std::function<double(double)> hat);

  PotentialKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double amplitude() const { return amplitude_; }
  double width() const { return width_; }

  double hat(double abs_k) const;
  double hat(const Vec4& k) const { return hat(std::sqrt(norm2(k))); }
  bool is_zero() const { return kind_ == PotentialKind::None || (kind_ != PotentialKind::Custom && amplitude_ == 0.0); }
  bool is_unit_delta() const { return kind_ == PotentialKind::Delta && amplitude_ == 1.0; }

  /// Same potential with w^ multiplied by factor.
  InteractionPotential scaled(double factor) const;

 private:
  InteractionPotential() = default;

  PotentialKind kind_ = PotentialKind::None;
  std::string name_ = "none";
  double amplitude_ = 0.0;
  double width_ = 0.0;
  std::function<double(double)> custom_;
};

}  // namespace hrf
