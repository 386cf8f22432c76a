#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hrf/covariance.hpp"

namespace hrf {

/// m = w^(0) h(0) = w^(0) int |f|^2.
double equilibrium_mass(const CovarianceProfile& h, const InteractionPotential& w);
double equilibrium_mass(const DistributionFunction& f, const InteractionPotential& w, int d);

/// ||(w^)_-||_inf; sampled on a log grid for custom potentials.
double potential_negative_sup(const InteractionPotential& w);
/// |S^{d-1}| int_0^X |h(r)| r dr over the tabulated range, i.e.
/// int |h(x)| |x|^{2-d} dx when h has decayed.
double h_weighted_l1(const CovarianceProfile& h);

enum class CheckStatus { Pass, Fail, Indeterminate };
const char* to_string(CheckStatus s);

struct HypothesisBullet {
  std::string name;
  CheckStatus status = CheckStatus::Indeterminate;
  double value = 0.0;
  /// Bound the value is compared against; NaN when the bullet is a
  /// finiteness or sign check.
  double threshold = 0.0;
  std::string detail;
};

struct HypothesisReport {
  int dim = 0;
  std::vector<HypothesisBullet> bullets;

  const HypothesisBullet* find(const std::string& name) const;
  bool all_pass() const;
};

/// Evaluates the scattering-theorem hypotheses on (f, w) numerically.
///
/// Bullet names: "dimension", "sobolev_mass", "f_grad_f", "monotone",
/// "h_decay", "h_grad_l1", "w_minus", "w_zero_plus". The low-frequency
/// threshold eps_g comes from the linear-response module; when absent the
/// "w_zero_plus" bullet is indeterminate unless w^(0)_+ = 0.
HypothesisReport hypothesis_check(const DistributionFunction& f, const InteractionPotential& w, int d,
                                  std::optional<double> eps_g = std::nullopt);

}  // namespace hrf
