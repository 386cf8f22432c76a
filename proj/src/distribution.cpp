#include "hrf/distribution.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace hrf {

namespace {

// e^{-42} ~ 6e-19
constexpr double kTailExponent = 42.0;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

DistributionFunction DistributionFunction::zero() { return DistributionFunction(); }

DistributionFunction DistributionFunction::bose(double temperature, double mu) {
  require_finite(temperature, "temperature");
  require_finite(mu, "mu");
  if (!(temperature > 0.0)) throw std::invalid_argument("Bose distribution needs T > 0");
  if (!(mu < 0.0)) throw std::invalid_argument("Bose distribution needs mu < 0 (pole at r^2 = mu)");
  DistributionFunction f;
  f.kind_ = DistributionKind::Bose;
  f.name_ = "bose";
  f.temperature_ = temperature;
  f.mu_ = mu;
  const double peak = 1.0 / std::expm1(-mu / temperature);
  f.support_ = std::sqrt(std::max(0.0, mu + temperature * (kTailExponent + std::max(0.0, std::log(peak)))));
  return f;
}

DistributionFunction DistributionFunction::fermi(double temperature, double mu) {
  require_finite(temperature, "temperature");
  require_finite(mu, "mu");
  if (!(temperature > 0.0)) throw std::invalid_argument("Fermi distribution needs T > 0");
  DistributionFunction f;
  f.kind_ = DistributionKind::Fermi;
  f.name_ = "fermi";
  f.temperature_ = temperature;
  f.mu_ = mu;
  f.support_ = std::sqrt(std::max(0.0, mu) + temperature * kTailExponent);
  return f;
}

DistributionFunction DistributionFunction::zero_temp_fermi(double mu) {
  require_finite(mu, "mu");
  if (!(mu > 0.0)) throw std::invalid_argument("zero-temperature Fermi distribution needs mu > 0");
  DistributionFunction f;
  f.kind_ = DistributionKind::ZeroTempFermi;
  f.name_ = "fermi0";
  f.mu_ = mu;
  f.support_ = std::sqrt(mu);
  f.breakpoints_ = {std::sqrt(mu)};
  return f;
}

DistributionFunction DistributionFunction::gaussian(double amplitude, double width) {
  require_finite(amplitude, "amplitude");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("Gaussian distribution needs amplitude >= 0");
  if (!(width > 0.0)) throw std::invalid_argument("Gaussian distribution needs width > 0");
  if (amplitude == 0.0) return zero();
  auto f = custom(
      "gaussian", [amplitude, width](double r) { return amplitude * std::exp(-(r * r) / (width * width)); },
      width * std::sqrt(kTailExponent));
  f.mu_ = 0.0;
  return f;
}

DistributionFunction DistributionFunction::custom(std::string name, std::function<double(double)> f2,
                                                  double support_radius, std::vector<double> breakpoints) {
  if (!f2) throw std::invalid_argument("custom distribution needs an evaluator");
  if (!(support_radius > 0.0)) throw std::invalid_argument("custom distribution needs a positive support radius");
  DistributionFunction f;
  f.kind_ = DistributionKind::Custom;
  f.name_ = std::move(name);
  f.custom_ = std::move(f2);
  f.support_ = support_radius;
  f.breakpoints_ = std::move(breakpoints);
  return f;
}

double DistributionFunction::f2(double r) const {
  r = std::abs(r);
  switch (kind_) {
    case DistributionKind::Zero:
      return 0.0;
    case DistributionKind::Bose:
      return 1.0 / std::expm1((r * r - mu_) / temperature_);
    case DistributionKind::Fermi: {
      const double e = (r * r - mu_) / temperature_;
      if (e > 700.0) return 0.0;
      return 1.0 / (std::exp(e) + 1.0);
    }
    case DistributionKind::ZeroTempFermi:
      return r * r <= mu_ ? 1.0 : 0.0;
    case DistributionKind::Custom: {
      const double v = custom_(r);
      if (!(v >= 0.0) || !std::isfinite(v)) throw std::domain_error("custom |f|^2 must be finite and nonnegative");
      return v;
    }
  }
  return 0.0;
}

double eval_f2(const DistributionFunction& f, double r) {
  if (!(r >= 0.0)) throw std::invalid_argument("eval_f2 needs r >= 0");
  return f.f2(r);
}

InteractionPotential InteractionPotential::none() { return InteractionPotential(); }

InteractionPotential InteractionPotential::delta(double amplitude) {
  require_finite(amplitude, "potential amplitude");
  InteractionPotential w;
  w.kind_ = PotentialKind::Delta;
  w.name_ = "delta";
  w.amplitude_ = amplitude;
  return w;
}

InteractionPotential InteractionPotential::gaussian(double amplitude, double width) {
  require_finite(amplitude, "potential amplitude");
  if (!(width > 0.0)) throw std::invalid_argument("Gaussian potential needs width > 0");
  InteractionPotential w;
  w.kind_ = PotentialKind::Gaussian;
  w.name_ = "gaussian";
  w.amplitude_ = amplitude;
  w.width_ = width;
  return w;
}

InteractionPotential InteractionPotential::custom(std::string name, std::function<double(double)> hat) {
  if (!hat) throw std::invalid_argument("custom potential needs an evaluator");
  InteractionPotential w;
  w.kind_ = PotentialKind::Custom;
  w.name_ = std::move(name);
  w.amplitude_ = 1.0;
  w.custom_ = std::move(hat);
  return w;
}

double InteractionPotential::hat(double abs_k) const {
  switch (kind_) {
    case PotentialKind::None:
      return 0.0;
    case PotentialKind::Delta:
      return amplitude_;
    case PotentialKind::Gaussian: {
      const double z = width_ * abs_k;
      return amplitude_ * std::exp(-0.5 * z * z);
    }
    case PotentialKind::Custom: {
      const double v = amplitude_ * custom_(std::abs(abs_k));
      if (!std::isfinite(v)) throw std::domain_error("custom potential transform is not finite");
      return v;
    }
  }
  return 0.0;
}

InteractionPotential InteractionPotential::scaled(double factor) const {
  InteractionPotential w = *this;
  w.amplitude_ *= factor;
  return w;
}

}  // namespace hrf
