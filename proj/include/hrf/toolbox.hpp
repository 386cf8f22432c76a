#pragma once

#include <cstdint>

namespace hrf {

// Randomized checks of the harmonic-analysis toolbox on torus fields.

struct ToolboxOptions {
  std::uint64_t seed = 1;
  int fields = 1000;
  int dim = 1;
  int points = 64;
};

struct ToolboxReport {
  /// max relative | ||f||_2^2 - V sum |c_k|^2 | over the random fields.
  double parseval = 0.0;
  /// max over nonzero lattice frequencies of |sum_j eta_j - 1|.
  double partition = 0.0;
  /// max pointwise |sum_j f_j - f| for zero-mean fields, relative to max |f|.
  double reconstruction = 0.0;
  /// max/min of the L^inf / L^2 Bernstein ratio over shells j = -3..3.
  double bernstein_spread = 0.0;
  int besov_checks = 0;
  int besov_violations = 0;
  double besov_worst = 0.0;  ///< max of ||f||_{B^{s2,t2}} / ||f||_{B^{s1,t1}}
};

ToolboxReport toolbox_suite(const ToolboxOptions& opt = {});

}  // namespace hrf
