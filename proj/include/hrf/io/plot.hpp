#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hrf::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct PlotStyle {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;
  /// Shaded x-interval, e.g. an unstable band.
  std::optional<std::pair<double, double>> shade;
  /// Written into a leading comment, e.g. the config checksum.
  std::string provenance;
};

/// Standalone SVG. Non-finite points (and nonpositive ones on a log axis)
/// are skipped; with nothing left to draw a placeholder with a warning is returned.
std::string emit_plot(const std::vector<Series>& series, const PlotStyle& style);

}  // namespace hrf::io
