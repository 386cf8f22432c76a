#include "hrf/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace hrf::io {

namespace {

using K = ExperimentKind;

struct KindName {
  K kind;
  const char* name;
};
constexpr KindName kKinds[] = {
    {K::EquilibriumCheck, "equilibrium-check"}, {K::Simulate, "simulate"},
    {K::LinearResponse, "linear-response"},     {K::StabilityCheck, "stability-check"},
    {K::Instability, "instability"},            {K::Picard, "picard"},
    {K::Norms, "norms"},                        {K::ScatteringProbe, "scattering-probe"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string fmt_list(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>)
      out += fmt(v[i]);
    else
      out += v[i];
  }
  return out;
}

using Error = std::optional<std::string>;

Error to_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto r = std::from_chars(b, e, out);
  if (r.ec != std::errc() || r.ptr != e || !std::isfinite(out)) return "expected a finite number, got '" + s + "'";
  return std::nullopt;
}

Error to_int(const std::string& s, int& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return "expected an integer, got '" + s + "'";
  return std::nullopt;
}

Error to_u64(const std::string& s, std::uint64_t& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return "expected an unsigned integer, got '" + s + "'";
  return std::nullopt;
}

Error to_list(const std::string& s, std::vector<double>& out) {
  out.clear();
  if (s.empty()) return std::nullopt;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (auto e = to_double(trim(item), v)) return e;
    out.push_back(v);
  }
  return std::nullopt;
}

Error positive(double v) { return v > 0.0 ? Error{} : Error{"must be > 0"}; }
Error nonneg(double v) { return v >= 0.0 ? Error{} : Error{"must be >= 0"}; }
Error at_least(int v, int lo) {
  return v >= lo ? Error{} : Error{"must be >= " + std::to_string(lo)};
}

struct Key {
  std::string name;
  std::string description;
  std::vector<K> required_by;
  std::function<Error(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define DOUBLE_KEY(NAME, DESC, REQ, FIELD, CHECK)                         \
  Key {                                                                   \
    NAME, DESC, REQ,                                                      \
        [](RunConfig& c, const std::string& v) -> Error {                 \
          double x;                                                       \
          if (auto e = to_double(v, x)) return e;                         \
          if (auto e = CHECK(x)) return e;                                \
          c.FIELD = x;                                                    \
          return std::nullopt;                                            \
        },                                                                \
        [](const RunConfig& c) { return fmt(c.FIELD); }                   \
  }

#define INT_KEY(NAME, DESC, REQ, FIELD, LO)                               \
  Key {                                                                   \
    NAME, DESC, REQ,                                                      \
        [](RunConfig& c, const std::string& v) -> Error {                 \
          int x;                                                          \
          if (auto e = to_int(v, x)) return e;                            \
          if (auto e = at_least(x, LO)) return e;                         \
          c.FIELD = x;                                                    \
          return std::nullopt;                                            \
        },                                                                \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }        \
  }

#define LIST_KEY(NAME, DESC, REQ, FIELD)                                  \
  Key {                                                                   \
    NAME, DESC, REQ,                                                      \
        [](RunConfig& c, const std::string& v) -> Error { return to_list(v, c.FIELD); }, \
        [](const RunConfig& c) { return fmt_list(c.FIELD); }              \
  }

Error any(double) { return std::nullopt; }

Key choice_key(std::string name, std::string desc, std::vector<K> req, std::vector<std::string> options,
               std::string PhysicsBlock::*field) {
  return Key{name, desc, req,
             [options, field](RunConfig& c, const std::string& v) -> Error {
               if (std::find(options.begin(), options.end(), v) == options.end())
                 return "must be one of " + fmt_list(options);
               c.physics.*field = v;
               return std::nullopt;
             },
             [field](const RunConfig& c) { return c.physics.*field; }};
}

const std::vector<Key>& table() {
  static const std::vector<Key> keys = [] {
    const std::vector<K> grid_kinds{K::EquilibriumCheck, K::Simulate, K::LinearResponse,
                                    K::StabilityCheck,   K::Picard,   K::ScatteringProbe};
    const std::vector<K> none;
    std::vector<Key> t;
    t.push_back(Key{"experiment", "experiment kind", {}, nullptr,
                    [](const RunConfig& c) { return std::string(to_string(c.kind)); }});
    t.push_back(INT_KEY("grid.d", "dimension, 1..4", grid_kinds, grid.d, 1));
    t.push_back(DOUBLE_KEY("grid.L", "box length", grid_kinds, grid.L, positive));
    t.push_back(INT_KEY("grid.N", "points per axis, power of two", grid_kinds, grid.N, 2));
    t.push_back(choice_key("f.kind", "partition function", grid_kinds,
                           {"zero", "fermi", "bose", "zero_temp_fermi", "gaussian"}, &PhysicsBlock::f_kind));
    t.push_back(DOUBLE_KEY("f.T", "temperature", none, physics.f_T, positive));
    t.push_back(DOUBLE_KEY("f.mu", "chemical potential", none, physics.f_mu, any));
    t.push_back(DOUBLE_KEY("f.amplitude", "gaussian |f|^2 peak", none, physics.f_amplitude, nonneg));
    t.push_back(DOUBLE_KEY("f.width", "gaussian |f|^2 width", none, physics.f_width, positive));
    t.push_back(choice_key("w.kind", "interaction potential", none, {"none", "delta", "gaussian"},
                           &PhysicsBlock::w_kind));
    t.push_back(DOUBLE_KEY("w.amplitude", "w^(0)", none, physics.w_amplitude, any));
    t.push_back(DOUBLE_KEY("w.width", "gaussian potential width", none, physics.w_width, positive));
    t.push_back(Key{"m", "mass override (empty: w^(0) int |f|^2)", none,
                    [](RunConfig& c, const std::string& v) -> Error {
                      if (v.empty()) {
                        c.physics.m.reset();
                        return std::nullopt;
                      }
                      double x;
                      if (auto e = to_double(v, x)) return e;
                      if (auto e = nonneg(x)) return e;
                      c.physics.m = x;
                      return std::nullopt;
                    },
                    [](const RunConfig& c) { return c.physics.m ? fmt(*c.physics.m) : std::string(); }});
    t.push_back(DOUBLE_KEY("dt", "time step", none, numerics.dt, positive));
    t.push_back(DOUBLE_KEY("T", "final time", none, numerics.T, positive));
    t.push_back(DOUBLE_KEY("theta", "mode weight threshold", none, numerics.theta, positive));
    t.push_back(Key{"seed", "random seed", none,
                    [](RunConfig& c, const std::string& v) { return to_u64(v, c.numerics.seed); },
                    [](const RunConfig& c) { return std::to_string(c.numerics.seed); }});
    t.push_back(INT_KEY("stride", "steps between observations", none, numerics.stride, 1));
    t.push_back(DOUBLE_KEY("tau.min", "smallest |tau| on the multiplier grid", none, numerics.tau_min, positive));
    t.push_back(DOUBLE_KEY("tau.max", "largest |tau|", none, numerics.tau_max, positive));
    t.push_back(INT_KEY("tau.n", "|tau| values per sign", none, numerics.tau_n, 1));
    t.push_back(INT_KEY("xi.n", "|xi| values", none, numerics.xi_n, 1));
    t.push_back(DOUBLE_KEY("z.amplitude", "perturbation size", none, numerics.z_amplitude, nonneg));
    t.push_back(DOUBLE_KEY("z.width", "perturbation bump width", none, numerics.z_width, positive));
    t.push_back(LIST_KEY("z.center", "bump centre (empty: box centre)", none, numerics.z_center));
    t.push_back(INT_KEY("z.mode", "perturbed mode (-1: all)", none, numerics.z_mode, -1));
    t.push_back(Key{"z.l2", "amplitude is the L^2 norm", none,
                    [](RunConfig& c, const std::string& v) -> Error {
                      if (v == "true" || v == "1") c.numerics.z_l2 = true;
                      else if (v == "false" || v == "0") c.numerics.z_l2 = false;
                      else return "expected true or false";
                      return std::nullopt;
                    },
                    [](const RunConfig& c) { return std::string(c.numerics.z_l2 ? "true" : "false"); }});
    t.push_back(LIST_KEY("a.fractions", "potential scalings as fractions of 1/sup|m_f|", none,
                         numerics.a_fractions));
    t.push_back(LIST_KEY("tw.xi", "two-wave carrier frequency", {K::Instability}, numerics.tw_xi));
    t.push_back(DOUBLE_KEY("tw.m", "two-wave mass", {K::Instability}, numerics.tw_m, nonneg));
    t.push_back(LIST_KEY("tw.k", "seeded frequency (empty: k*)", none, numerics.tw_k));
    t.push_back(DOUBLE_KEY("r.max", "ray scan extent in units of xi", none, numerics.r_max, positive));
    t.push_back(INT_KEY("r.n", "ray scan points", none, numerics.r_n, 2));
    t.push_back(DOUBLE_KEY("growth.T", "linearized simulation time", none, numerics.growth_T, positive));
    t.push_back(DOUBLE_KEY("picard.window", "Picard time window", none, numerics.picard_window, positive));
    t.push_back(DOUBLE_KEY("picard.dt", "Picard time step", none, numerics.picard_dt, positive));
    t.push_back(INT_KEY("picard.iterations", "Picard iterations", none, numerics.picard_iterations, 2));
    t.push_back(DOUBLE_KEY("probe.radius", "local mass ball radius", none, numerics.probe_radius, positive));
    t.push_back(LIST_KEY("probe.center", "ball centre (empty: box centre)", none, numerics.probe_center));
    t.push_back(INT_KEY("norms.fields", "random fields in the toolbox suite", none, numerics.norms_fields, 1));
    t.push_back(Key{"out.dir", "output directory", none,
                    [](RunConfig& c, const std::string& v) -> Error {
                      c.output.dir = v;
                      return std::nullopt;
                    },
                    [](const RunConfig& c) { return c.output.dir; }});
    t.push_back(Key{"out.formats", "subset of ndjson,csv,svg", none,
                    [](RunConfig& c, const std::string& v) -> Error {
                      c.output.formats.clear();
                      std::stringstream ss(v);
                      std::string item;
                      while (std::getline(ss, item, ',')) {
                        item = trim(item);
                        if (item != "ndjson" && item != "csv" && item != "svg")
                          return "unknown format '" + item + "'";
                        c.output.formats.push_back(item);
                      }
                      return std::nullopt;
                    },
                    [](const RunConfig& c) { return fmt_list(c.output.formats); }});
    return t;
  }();
  return keys;
}

#undef DOUBLE_KEY
#undef INT_KEY
#undef LIST_KEY

void cross_checks(const RunConfig& c, std::vector<std::string>& errors) {
  const auto& g = c.grid;
  if (g.d > 4) errors.push_back("grid.d: must be in 1..4, got " + std::to_string(g.d));
  if (g.N < 2 || (g.N & (g.N - 1)) != 0) errors.push_back("grid.N: must be a power of two, got " + std::to_string(g.N));
  auto dims = [&](const char* key, const std::vector<double>& v, bool allow_empty) {
    if ((allow_empty && v.empty()) || static_cast<int>(v.size()) == g.d) return;
    errors.push_back(std::string(key) + ": expected " + std::to_string(g.d) + " components, got " +
                     std::to_string(v.size()));
  };
  dims("z.center", c.numerics.z_center, true);
  dims("probe.center", c.numerics.probe_center, true);
  if (c.kind == K::Instability) {
    dims("tw.xi", c.numerics.tw_xi, false);
    dims("tw.k", c.numerics.tw_k, true);
  }
  if (c.numerics.tau_min >= c.numerics.tau_max) errors.push_back("tau.min: must be below tau.max");
  if (c.physics.f_kind == "bose" && !(c.physics.f_mu < 0.0)) errors.push_back("f.mu: bose needs mu < 0");
  if (c.physics.f_kind == "zero_temp_fermi" && !(c.physics.f_mu > 0.0))
    errors.push_back("f.mu: zero_temp_fermi needs mu > 0");
  for (double a : c.numerics.a_fractions)
    if (!(a >= 0.0)) errors.push_back("a.fractions: entries must be >= 0");
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& kn : kKinds)
    if (kn.kind == k) return kn.name;
  return "?";
}

std::optional<ExperimentKind> parse_kind(const std::string& s) {
  for (const auto& kn : kKinds)
    if (s == kn.name) return kn.kind;
  return std::nullopt;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& kn : kKinds) v.push_back(kn.name);
    return v;
  }();
  return names;
}

bool OutputBlock::wants(const std::string& f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

const std::vector<KeyInfo>& config_keys() {
  static const std::vector<KeyInfo> info = [] {
    std::vector<KeyInfo> v;
    for (const auto& k : table()) v.push_back({k.name, k.description});
    return v;
  }();
  return info;
}

ParseResult parse_config(const std::string& text, std::optional<ExperimentKind> kind) {
  ParseResult res;
  std::map<std::string, std::pair<int, std::string>> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) res.errors.push_back("line 1: byte-order mark not allowed");
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      res.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = seen.find(key);
    if (it != seen.end()) {
      res.errors.push_back("duplicate key '" + key + "' on lines " + std::to_string(it->second.first) + " and " +
                           std::to_string(lineno));
      continue;
    }
    seen[key] = {lineno, value};
  }

  RunConfig c;
  std::optional<ExperimentKind> k = kind;
  if (auto it = seen.find("experiment"); it != seen.end()) {
    auto parsed = parse_kind(it->second.second);
    if (!parsed)
      res.errors.push_back("line " + std::to_string(it->second.first) + ": unknown experiment '" +
                           it->second.second + "'");
    else if (kind && *kind != *parsed)
      res.errors.push_back("line " + std::to_string(it->second.first) + ": experiment '" + it->second.second +
                           "' does not match '" + to_string(*kind) + "'");
    else
      k = parsed;
  } else if (!kind) {
    res.errors.push_back("missing key 'experiment'");
  }
  if (k) c.kind = *k;

  for (const auto& [key, lv] : seen) {
    if (key == "experiment") continue;
    const auto& keys = table();
    auto kit = std::find_if(keys.begin(), keys.end(), [&](const Key& x) { return x.name == key; });
    if (kit == keys.end()) {
      res.errors.push_back("line " + std::to_string(lv.first) + ": unknown key '" + key + "'");
      continue;
    }
    if (auto e = kit->set(c, lv.second)) res.errors.push_back("line " + std::to_string(lv.first) + ": " + key + ": " + *e);
  }
  if (k) {
    for (const auto& key : table()) {
      if (std::find(key.required_by.begin(), key.required_by.end(), *k) == key.required_by.end()) continue;
      if (!seen.count(key.name))
        res.errors.push_back("experiment '" + std::string(to_string(*k)) + "' requires key '" + key.name + "'");
    }
  }
  cross_checks(c, res.errors);
  if (res.errors.empty()) res.config = c;
  return res;
}

std::string to_text(const RunConfig& c) {
  std::string out;
  for (const auto& k : table()) out += k.name + " = " + k.get(c) + "\n";
  return out;
}

}  // namespace hrf::io
