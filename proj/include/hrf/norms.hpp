#pragma once

#include <limits>
#include <optional>
#include <span>

#include "hrf/spectral_field.hpp"

namespace hrf {

// Spatial norms. Quadrature is the lattice sum times the cell volume; the
// L^infinity norm is the lattice maximum. Overloads taking a span of
// components evaluate the norm of the pointwise modulus (sum_c |f_c|^2)^{1/2},
// i.e. the mixed L^p_x L^2_omega norm of a mode ensemble.

inline constexpr double kInf = std::numeric_limits<double>::infinity();

double lebesgue_norm(const SpectralField& field, double p);
double lebesgue_norm(std::span<const SpectralField> components, double p);

/// L^p norm of a nonnegative pointwise modulus-squared profile.
double lebesgue_norm_from_modulus2(const TorusGrid& grid, const RVec& modulus2, double p);

/// W^{s,p} norm: L^p norm of the multiplier <xi>^s applied to the field.
double sobolev_norm(const SpectralField& field, double s, double p);
double sobolev_norm(std::span<const SpectralField> components, double s, double p);

// Littlewood-Paley blocks. eta_j(xi) = eta(2^{-j}|xi|) with eta supported in
// the annulus (1/2, 2); the profile is a smooth bump in log2|xi| normalised so
// that sum_j eta_j = 1 on every nonzero frequency.

double lp_profile(double r);
double lp_weight(int j, double abs_xi);

struct LPRange {
  int j_min = 0;
  int j_max = -1;
  bool contains(int j) const { return j >= j_min && j <= j_max; }
  int count() const { return j_max >= j_min ? j_max - j_min + 1 : 0; }
};

/// Blocks fully resolved by the grid: 2^{j-1} >= 2 pi / L and 2^{j+1} <= Nyquist.
LPRange resolvable_range(const TorusGrid& grid);
/// Every block whose annulus meets a nonzero lattice frequency.
LPRange block_range(const TorusGrid& grid);

struct LPProjection {
  SpectralField field;
  bool in_range = false;  ///< false: j meets no lattice frequency, field is zero
};

LPProjection lp_project(const SpectralField& field, int j);

/// Inhomogeneous Besov norm over the resolvable block range.
double besov_norm(const SpectralField& field, double p, double s, double t);
double besov_norm(std::span<const SpectralField> components, double p, double s, double t);

/// Squared L^2 mass not captured by the resolvable blocks, ||f - sum_j f_j||^2.
double lp_truncated_mass(const SpectralField& field);

/// ||f_j||_{L^a} / (2^{jd(1/b - 1/a)} ||f_j||_{L^b}); empty when ||f_j||_{L^b} = 0.
std::optional<double> bernstein_ratio(const SpectralField& field, int j, double a, double b);

}  // namespace hrf
