#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hrf::io {

enum class ExperimentKind {
  EquilibriumCheck,
  Simulate,
  LinearResponse,
  StabilityCheck,
  Instability,
  Picard,
  Norms,
  ScatteringProbe,
};

const char* to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_kind(const std::string& s);
const std::vector<std::string>& experiment_names();

struct GridBlock {
  int d = 1;
  double L = 6.283185307179586;
  int N = 64;
  bool operator==(const GridBlock&) const = default;
};

struct PhysicsBlock {
  std::string f_kind = "fermi";  ///< zero | fermi | bose | zero_temp_fermi | gaussian
  double f_T = 1.0;
  double f_mu = 0.0;
  double f_amplitude = 1.0;
  double f_width = 1.0;
  std::string w_kind = "delta";  ///< none | delta | gaussian
  double w_amplitude = 1.0;
  double w_width = 1.0;
  std::optional<double> m;
  bool operator==(const PhysicsBlock&) const = default;
};

struct NumericsBlock {
  double dt = 1e-3;
  double T = 1.0;
  double theta = 1e-8;
  std::uint64_t seed = 1;
  int stride = 100;
  double tau_min = 1e-3;
  double tau_max = 32.0;
  int tau_n = 24;
  int xi_n = 24;
  // perturbation
  double z_amplitude = 1e-3;
  double z_width = 0.5;
  std::vector<double> z_center;  ///< empty: box centre
  int z_mode = -1;               ///< -1: every mode
  bool z_l2 = true;
  // stability-check
  std::vector<double> a_fractions{0.0, 0.25, 0.5, 1.0};
  // instability
  std::vector<double> tw_xi{1.0};
  double tw_m = 1.0;
  std::vector<double> tw_k;  ///< empty: k* = xi sqrt(4 - min(2, m/|xi|^2))
  double r_max = 3.0;
  int r_n = 1000;
  double growth_T = 40.0;
  // picard
  double picard_window = 1.0;
  double picard_dt = 1e-3;
  int picard_iterations = 6;
  // scattering-probe
  double probe_radius = 3.0;
  std::vector<double> probe_center;  ///< empty: box centre
  // norms
  int norms_fields = 1000;
  bool operator==(const NumericsBlock&) const = default;
};

struct OutputBlock {
  std::string dir;
  std::vector<std::string> formats{"ndjson", "csv", "svg"};
  bool operator==(const OutputBlock&) const = default;
  bool wants(const std::string& fmt) const;
};

struct RunConfig {
  ExperimentKind kind = ExperimentKind::EquilibriumCheck;
  GridBlock grid;
  PhysicsBlock physics;
  NumericsBlock numerics;
  OutputBlock output;
  bool operator==(const RunConfig&) const = default;
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return config.has_value(); }
};

/// Flat "key = value" text; '#' starts a comment. `kind` fills the
/// experiment key when the text has none and must agree with it otherwise.
ParseResult parse_config(const std::string& text, std::optional<ExperimentKind> kind = std::nullopt);

/// Canonical text listing every key; parses back to an equal config.
std::string to_text(const RunConfig& c);

struct KeyInfo {
  std::string key;
  std::string description;
};
const std::vector<KeyInfo>& config_keys();

}  // namespace hrf::io
