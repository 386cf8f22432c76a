#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "hrf/io/config.hpp"
#include "hrf/io/experiments.hpp"

using namespace hrf::io;

namespace {

std::string kinds_help() {
  std::string s;
  for (const auto& n : experiment_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random-field Hartree experiments"};
  std::string kind_name, config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool list_keys = false;
  app.add_option("experiment", kind_name, "one of: " + kinds_help());
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--out", out_dir, "output directory (default: out.dir, then $HRF_OUT_DIR, then ./hrf_out)");
  auto* seed_opt = app.add_option("--seed", seed, "overrides the seed key");
  app.add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
  app.add_flag("--list-keys", list_keys, "print the config keys and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (list_keys) {
    for (const auto& k : config_keys()) std::cout << k.key << "\t" << k.description << "\n";
    return 0;
  }
  const auto kind = parse_kind(kind_name);
  if (!kind) {
    std::cerr << "error: unknown experiment '" << kind_name << "' (expected " << kinds_help() << ")\n";
    return 2;
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return 2;
  }
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  ParseResult parsed = parse_config(buf.str(), kind);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << config_path << ": " << e << "\n";
    return 2;
  }
  RunConfig cfg = *parsed.config;
  if (*seed_opt) cfg.numerics.seed = seed;
  if (threads > 0) omp_set_num_threads(threads);

  std::string dir = out_dir;
  if (dir.empty()) dir = cfg.output.dir;
  if (dir.empty()) {
    const char* env = std::getenv("HRF_OUT_DIR");
    dir = env && *env ? env : "hrf_out";
  }

  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult result;
  std::string error;
  try {
    result = run_experiment(cfg);
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    const auto env = write_envelope(dir, cfg, result, wall, omp_get_max_threads(), error);
    for (const auto& v : result.verdicts)
      std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "  value=" << v.value << "\n";
    if (!error.empty()) std::cerr << "error: " << error << "\n";
    std::cout << to_string(cfg.kind) << ": " << env["status"].get<std::string>() << " (" << dir
              << "/envelope.json)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return error.empty() && result.all_pass() ? 0 : 1;
}
