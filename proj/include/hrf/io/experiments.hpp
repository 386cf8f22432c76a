#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hrf/io/config.hpp"

namespace hrf::io {

inline constexpr const char* kArtifactVersion = "1.0.0";

struct PayloadFile {
  std::string name;
  std::string format;  ///< ndjson | csv | svg
  std::string content;
};

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ExperimentResult {
  std::vector<PayloadFile> files;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<Verdict> verdicts;
  bool all_pass() const;
};

/// Runs one experiment in memory. Module errors propagate as exceptions.
ExperimentResult run_experiment(const RunConfig& config);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Writes the payload files selected by config.output.formats and
/// envelope.json into dir; returns the envelope. `error` marks a run that
/// threw before producing a result.
nlohmann::ordered_json write_envelope(const std::string& dir, const RunConfig& config, const ExperimentResult& result,
                                      double wall_seconds, int threads, const std::string& error = {});

}  // namespace hrf::io
