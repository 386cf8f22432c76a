#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hrf/io/config.hpp"
#include "hrf/io/experiments.hpp"
#include "hrf/io/plot.hpp"

using namespace hrf::io;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool mentions(const std::vector<std::string>& errs, const std::string& s) {
  for (const auto& e : errs)
    if (e.find(s) != std::string::npos) return true;
  return false;
}

RunConfig must_parse(const std::string& text) {
  const ParseResult r = parse_config(text);
  for (const auto& e : r.errors) MESSAGE(e);
  REQUIRE(r.ok());
  return *r.config;
}

const std::string kBase = "experiment = equilibrium-check\ngrid.d = 1\ngrid.L = 6.283185307179586\ngrid.N = 64\nf.kind = fermi\n";

}  // namespace

TEST_CASE("parse a minimal config") {
  const RunConfig c = must_parse(kBase + "# comment\n  f.T = 2   # trailing\n");
  CHECK(c.kind == ExperimentKind::EquilibriumCheck);
  CHECK(c.grid.d == 1);
  CHECK(c.grid.N == 64);
  CHECK(c.physics.f_T == 2.0);
  CHECK(c.physics.w_kind == "delta");
}

TEST_CASE("config errors are all reported") {
  const ParseResult r = parse_config(
      "experiment = equilibrium-check\ngrid.d = 5\ngrid.N = 48\ngrid.N = 64\nbogus.key = 1\nf.T = -1\n");
  CHECK_FALSE(r.ok());
  CHECK(mentions(r.errors, "grid.d"));
  CHECK(mentions(r.errors, "duplicate key 'grid.N' on lines 3 and 4"));
  CHECK(mentions(r.errors, "unknown key 'bogus.key'"));
  CHECK(mentions(r.errors, "requires key 'grid.L'"));
  CHECK(mentions(r.errors, "requires key 'f.kind'"));
  CHECK(r.errors.size() >= 5);
}

TEST_CASE("instability needs its parameters") {
  const ParseResult r = parse_config("experiment = instability\n");
  CHECK(mentions(r.errors, "experiment 'instability' requires key 'tw.xi'"));
  CHECK(mentions(r.errors, "experiment 'instability' requires key 'tw.m'"));
}

TEST_CASE("experiment names and kinds") {
  CHECK(experiment_names().size() == 8);
  for (const auto& n : experiment_names()) {
    const auto k = parse_kind(n);
    REQUIRE(k);
    CHECK(n == to_string(*k));
  }
  CHECK_FALSE(parse_kind("nope"));
  const ParseResult r = parse_config(kBase, ExperimentKind::Picard);
  CHECK_FALSE(r.ok());
}

TEST_CASE("canonical text round trip") {
  for (const auto& entry : fs::directory_iterator(HRF_CONFIG_DIR)) {
    CAPTURE(entry.path().string());
    const RunConfig c = must_parse(slurp(entry.path()));
    const std::string text = to_text(c);
    const RunConfig back = must_parse(text);
    CHECK(back == c);
    CHECK(to_text(back) == text);
  }
  CHECK(config_keys().size() > 30);
}

TEST_CASE("plots") {
  const std::string one = emit_plot({{"s", {1.0}, {2.0}, true}}, {"t", "x", "y", false, std::nullopt, "p"});
  CHECK(one.rfind("<?xml", 0) == 0);
  CHECK(one.find("<circle") != std::string::npos);
  CHECK(one.find("</svg>") != std::string::npos);
  const std::string none = emit_plot({{"s", {}, {}, false}}, {"t", "x", "y", false, std::nullopt, "p"});
  CHECK(none.find("no data") != std::string::npos);
  const std::string logneg = emit_plot({{"s", {1.0, 2.0}, {-1.0, 0.0}, false}}, {"t", "x", "y", true, std::nullopt, "p"});
  CHECK(logneg.find("no data") != std::string::npos);
}

TEST_CASE("checksums") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}

TEST_CASE("equilibrium-check passes and is deterministic") {
  const RunConfig c = must_parse(slurp(fs::path(HRF_CONFIG_DIR) / "equilibrium-check.conf"));
  const ExperimentResult a = run_experiment(c), b = run_experiment(c);
  for (const auto& v : a.verdicts) {
    CAPTURE(v.name);
    CHECK(v.pass);
  }
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].content == b.files[i].content);

  const fs::path dir = fs::temp_directory_path() / "hrf_test_envelope";
  fs::remove_all(dir);
  const auto env = write_envelope(dir.string(), c, a, 0.1, 1);
  CHECK(env["status"] == "pass");
  CHECK(env["version"] == kArtifactVersion);
  for (const auto& p : env["payload"]) {
    const std::string body = slurp(dir / p["file"].get<std::string>());
    CHECK(p["bytes"] == body.size());
    CHECK(p["fnv1a64"] == hex64(fnv1a64(body)));
  }
  CHECK(fs::exists(dir / "envelope.json"));
  fs::remove_all(dir);
}

TEST_CASE("instability without mass has no band") {
  RunConfig c = must_parse(slurp(fs::path(HRF_CONFIG_DIR) / "instability.conf"));
  c.numerics.tw_m = 0.0;
  const ExperimentResult r = run_experiment(c);
  CHECK(r.all_pass());
  bool saw = false;
  for (const auto& v : r.verdicts) saw |= v.name == "band_empty";
  CHECK(saw);
}

TEST_CASE("stability margin is one without a potential") {
  RunConfig c = must_parse(slurp(fs::path(HRF_CONFIG_DIR) / "stability-check.conf"));
  c.physics.w_kind = "none";
  c.numerics.tau_n = 6;
  c.numerics.xi_n = 6;
  const ExperimentResult r = run_experiment(c);
  CHECK(r.summary["margin"] == 1.0);
  for (const auto& v : r.verdicts) {
    CAPTURE(v.name);
    CHECK(v.pass);
  }
}
