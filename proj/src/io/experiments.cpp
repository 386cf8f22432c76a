#include "hrf/io/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hrf/ensemble.hpp"
#include "hrf/io/plot.hpp"
#include "hrf/linear_response.hpp"
#include "hrf/toolbox.hpp"
#include "hrf/two_wave.hpp"

namespace hrf::io {

using json = nlohmann::ordered_json;

bool ExperimentResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* d = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = d[v & 15];
  return s;
}

namespace {

TorusGrid make_grid(const RunConfig& c) { return TorusGrid(c.grid.d, c.grid.L, c.grid.N); }

DistributionFunction make_f(const PhysicsBlock& p) {
  if (p.f_kind == "zero") return DistributionFunction::zero();
  if (p.f_kind == "fermi") return DistributionFunction::fermi(p.f_T, p.f_mu);
  if (p.f_kind == "bose") return DistributionFunction::bose(p.f_T, p.f_mu);
  if (p.f_kind == "zero_temp_fermi") return DistributionFunction::zero_temp_fermi(p.f_mu);
  return DistributionFunction::gaussian(p.f_amplitude, p.f_width);
}

InteractionPotential make_w(const PhysicsBlock& p, double amplitude) {
  if (p.w_kind == "none") return InteractionPotential::none();
  if (p.w_kind == "gaussian") return InteractionPotential::gaussian(amplitude, p.w_width);
  return InteractionPotential::delta(amplitude);
}

InteractionPotential make_w(const PhysicsBlock& p) { return make_w(p, p.w_amplitude); }

Vec4 point_or_centre(const std::vector<double>& v, const RunConfig& c) {
  Vec4 out{};
  for (int i = 0; i < c.grid.d; ++i) out[i] = v.empty() ? 0.5 * c.grid.L : v[i];
  return out;
}

PerturbationSpec perturbation(const RunConfig& c) {
  PerturbationSpec s;
  s.amplitude = c.numerics.z_amplitude;
  s.width = c.numerics.z_width;
  s.center = point_or_centre(c.numerics.z_center, c);
  s.normalize_l2 = c.numerics.z_l2;
  if (c.numerics.z_mode >= 0) s.target_mode = static_cast<std::size_t>(c.numerics.z_mode);
  return s;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string ndjson(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

std::string g17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void verdict(ExperimentResult& r, std::string name, bool pass, double value, double threshold, std::string detail = {}) {
  r.verdicts.push_back({std::move(name), pass, value, threshold, std::move(detail)});
}

std::string provenance(const RunConfig& c) { return "config fnv1a64 " + hex64(fnv1a64(to_text(c))); }

double max_drift(const RVec& now, const RVec& start) {
  double d = 0.0;
  for (std::size_t j = 0; j < start.size(); ++j) d = std::max(d, std::abs(now[j] - start[j]));
  return d;
}

// equilibrium-check

ExperimentResult equilibrium_check(const RunConfig& c) {
  ExperimentResult res;
  const TorusGrid grid = make_grid(c);
  const auto f = make_f(c.physics);
  const auto w = make_w(c.physics);
  EquilibriumReport rep;
  ModeEnsemble e = init_equilibrium(grid, f, w, {c.numerics.theta, c.physics.m}, &rep);
  const RVec m0 = mode_masses(e);

  RVec amp_dev;
  EvolveOptions opt;
  opt.dt = c.numerics.dt;
  opt.stride = static_cast<std::size_t>(c.numerics.stride);
  opt.observers.push_back([&amp_dev](const ModeEnsemble& en, std::size_t) {
    double d = 0.0;
    for (std::size_t j = 0; j < en.size(); ++j) {
      const CVec y = en.equilibrium_mode(j);
      const CVec& u = en.mode(j).u;
      for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - y[i]));
    }
    amp_dev.push_back(d);
  });
  const Trajectory tr = evolve(e, c.numerics.T, opt);

  std::vector<json> recs;
  double mass_drift = 0.0, spread = 0.0, dev = 0.0;
  RVec ts, drifts;
  for (std::size_t k = 0; k < tr.observations.size(); ++k) {
    const auto& ob = tr.observations[k];
    const double md = max_drift(ob.mode_masses, m0);
    mass_drift = std::max(mass_drift, md);
    spread = std::max(spread, ob.density_spread);
    dev = std::max(dev, amp_dev[k]);
    ts.push_back(ob.t);
    drifts.push_back(md);
    recs.push_back(json{{"t", ob.t}, {"mass_drift", md}, {"density_spread", ob.density_spread},
                        {"amplitude_deviation", amp_dev[k]}, {"energy", num(ob.energy)}});
  }
  res.files.push_back({"trajectory.ndjson", "ndjson", ndjson(recs)});

  std::vector<json> hyp;
  const auto hr = hypothesis_check(f, w, c.grid.d);
  for (const auto& b : hr.bullets)
    hyp.push_back(json{{"name", b.name}, {"status", to_string(b.status)}, {"value", num(b.value)},
                       {"threshold", num(b.threshold)}, {"detail", b.detail}});
  res.files.push_back({"hypotheses.ndjson", "ndjson", ndjson(hyp)});
  res.files.push_back({"mass_drift.svg", "svg",
                       emit_plot({{"max_j |M_j(t) - M_j(0)|", ts, drifts, false}},
                                 {"Per-mode mass drift", "t", "drift", true, std::nullopt, provenance(c)})});

  res.summary = json{{"modes", rep.modes},
                     {"h0", rep.h0},
                     {"mass", rep.mass},
                     {"retained_mass", rep.retained_mass},
                     {"truncated_fraction", rep.truncated_fraction},
                     {"steps", tr.observations.empty() ? 0 : std::llround(c.numerics.T / tr.dt)},
                     {"max_mass_drift", mass_drift},
                     {"max_density_spread", spread},
                     {"max_amplitude_deviation", dev},
                     {"hypotheses_all_pass", hr.all_pass()}};
  verdict(res, "finite", !tr.aborted, 0, 0, tr.diagnostic);
  verdict(res, "mode_mass_drift", mass_drift <= 1e-10, mass_drift, 1e-10);
  verdict(res, "density_constant", spread <= 1e-8, spread, 1e-8);
  verdict(res, "amplitude_deviation", dev <= 1e-12, dev, 1e-12);
  return res;
}

// simulate

ExperimentResult simulate(const RunConfig& c) {
  ExperimentResult res;
  const TorusGrid grid = make_grid(c);
  const ModeEnsemble eq =
      init_equilibrium(grid, make_f(c.physics), make_w(c.physics), {c.numerics.theta, c.physics.m});
  PerturbationState st = add_perturbation(eq, perturbation(c));
  const RVec m0 = mode_masses(st.ensemble);
  EvolveOptions opt;
  opt.dt = c.numerics.dt;
  opt.stride = static_cast<std::size_t>(c.numerics.stride);
  opt.record_norms = true;
  const Trajectory tr = evolve(st.ensemble, c.numerics.T, opt);

  std::vector<json> recs;
  RVec ts, ed;
  double mass_drift = 0.0, e_drift = 0.0;
  const double e0 = tr.observations.empty() ? 0.0 : tr.observations.front().energy;
  for (const auto& ob : tr.observations) {
    const double md = max_drift(ob.mode_masses, m0);
    mass_drift = std::max(mass_drift, md);
    e_drift = std::max(e_drift, std::abs(ob.energy - e0));
    ts.push_back(ob.t);
    ed.push_back(std::abs(ob.energy - e0));
    json r{{"t", ob.t}, {"mass_drift", md}, {"energy", num(ob.energy)}, {"energy_drift", num(ob.energy - e0)},
           {"density_spread", ob.density_spread}};
    json norms = json::object();
    for (const auto& [k, v] : ob.norms) norms[k] = num(v);
    r["norms"] = norms;
    recs.push_back(r);
  }
  res.files.push_back({"trajectory.ndjson", "ndjson", ndjson(recs)});
  res.files.push_back({"energy_drift.svg", "svg",
                       emit_plot({{"|E(t) - E(0)|", ts, ed, false}},
                                 {"Energy drift", "t", "drift", true, std::nullopt, provenance(c)})});
  res.summary = json{{"modes", eq.size()},      {"mass", eq.mass()},          {"dt", tr.dt},
                     {"max_mass_drift", mass_drift}, {"max_energy_drift", e_drift}};
  verdict(res, "finite", !tr.aborted, 0, 0, tr.diagnostic);
  verdict(res, "mode_mass_drift", mass_drift <= 1e-10, mass_drift, 1e-10);
  return res;
}

// linear-response and stability-check share the table

MultiplierTable build_table(const RunConfig& c) {
  const TorusGrid grid = make_grid(c);
  return MultiplierTable(CovarianceProfile(make_f(c.physics), c.grid.d),
                         default_tau_grid(c.numerics.tau_min, c.numerics.tau_max, c.numerics.tau_n),
                         default_xi_grid(grid, c.numerics.xi_n));
}

std::string table_csv(const MultiplierTable& t) {
  std::ostringstream os;
  t.write_csv(os);
  return os.str();
}

ExperimentResult linear_response(const RunConfig& c) {
  ExperimentResult res;
  const MultiplierTable t = build_table(c);
  res.files.push_back({"multiplier.csv", "csv", table_csv(t)});
  const std::size_t nt = t.tau().size(), nx = t.xi().size();

  double asym = 0.0, asym_excess = 0.0;
  bool finite = true;
  for (std::size_t it = 0; it < nt; ++it)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const Complex v = t.at(it, ix);
      finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
      const std::size_t jt = nt - 1 - it;
      const double d = std::abs(t.at(jt, ix) - std::conj(v));
      asym = std::max(asym, d);
      asym_excess = std::max(asym_excess, d - 2.0 * std::max(t.error_at(it, ix), t.error_at(jt, ix)));
    }
  double at_zero = 0.0;
  for (double tau : t.tau()) at_zero = std::max(at_zero, std::abs(compute_mf(t.profile(), tau, 0.0).value));
  const DecayBound db = decay_bound_check(t);

  std::vector<json> recs;
  json slope_rec = nullptr;
  if (!t.profile().is_zero()) {
    const EpsilonG eg = epsilon_g(t.profile());
    json shells = json::array();
    for (const auto& s : eg.shells)
      shells.push_back(json{{"radius", s.radius}, {"min_re", s.min_re}, {"tau", s.tau_at}, {"xi", s.xi_at}});
    recs.push_back(json{{"record", "epsilon_g"}, {"value", eg.value}, {"lo", eg.lo}, {"hi", eg.hi},
                        {"converged", eg.converged}, {"shells", shells}});
    const DecaySlope ds = decay_slope(t.profile(), 1.0, 4.0, 6);
    json pts = json::array();
    for (std::size_t i = 0; i < ds.tau.size(); ++i) pts.push_back(json{{"tau", ds.tau[i]}, {"abs_mf", ds.abs_mf[i]}});
    recs.push_back(json{{"record", "decay_slope"}, {"xi_abs", 1.0}, {"slope", ds.slope}, {"points", pts}});
    slope_rec = ds.slope;
  }
  recs.push_back(json{{"record", "decay_bound"}, {"sup", db.sup}, {"tau", db.tau}, {"xi", db.xi}, {"finite", db.finite}});
  res.files.push_back({"response.ndjson", "ndjson", ndjson(recs)});

  std::vector<Series> series;
  for (std::size_t ix : {std::size_t{0}, nx / 2, nx - 1}) {
    Series s{"|xi| = " + g17(t.xi()[ix]).substr(0, 6), {}, {}, false};
    for (std::size_t it = 0; it < nt; ++it)
      if (t.tau()[it] > 0.0) {
        s.x.push_back(std::log10(t.tau()[it]));
        s.y.push_back(std::abs(t.at(it, ix)));
      }
    series.push_back(s);
  }
  res.files.push_back({"multiplier.svg", "svg",
                       emit_plot(series, {"|m_f(tau, xi)|", "log10 tau", "|m_f|", true, std::nullopt, provenance(c)})});

  res.summary = json{{"tau_points", nt},     {"xi_points", nx},        {"sup_abs", t.sup_abs()},
                     {"max_error", t.max_error()}, {"conjugate_asymmetry", asym}, {"decay_bound_sup", db.sup},
                     {"decay_slope", slope_rec}};
  verdict(res, "finite", finite, 0, 0);
  verdict(res, "quadrature_converged", t.converged(), t.max_error(), 0);
  verdict(res, "conjugate_symmetry", asym_excess <= 0.0, asym, 0, "within twice the entry error estimates");
  verdict(res, "zero_at_xi0", at_zero == 0.0, at_zero, 0);
  verdict(res, "decay_bound_finite", db.finite && std::isfinite(db.sup), db.sup, 0);
  return res;
}

ExperimentResult stability_check(const RunConfig& c) {
  ExperimentResult res;
  const MultiplierTable t = build_table(c);
  res.files.push_back({"multiplier.csv", "csv", table_csv(t)});
  const double sup = t.sup_abs();
  const double a_max = sup > 0.0 ? 1.0 / sup : std::numeric_limits<double>::infinity();
  const auto w = make_w(c.physics);
  const MarginReport mr = stability_margin(t, w);
  const double eps = t.profile().is_zero() ? 0.0 : epsilon_g(t.profile()).value;
  const Thresholds th = potential_thresholds(t.profile(), w, eps);

  std::vector<json> recs;
  recs.push_back(json{{"record", "margin"},
                      {"w_kind", c.physics.w_kind},
                      {"w_amplitude", c.physics.w_amplitude},
                      {"min", mr.margin},
                      {"argmin", json{{"tau", mr.tau}, {"xi", mr.xi}}},
                      {"epsilon_g", eps},
                      {"thresholds",
                       json{{"two_sphere_area", th.bound},
                            {"negative_part", th.negative_part},
                            {"zero_plus", th.zero_plus},
                            {"negative_ok", th.negative_ok},
                            {"zero_plus_ok", th.zero_plus_ok}}},
                      {"theorem_dimension", c.grid.d >= 4}});
  RVec as, ms;
  bool below_ok = true, lower_ok = true, zero_ok = true;
  for (double frac : c.numerics.a_fractions) {
    const double a = std::isfinite(a_max) ? frac * a_max : frac;
    const MarginReport m = stability_margin(t, make_w(c.physics, a));
    const double lower = 1.0 - a * sup;
    recs.push_back(json{{"record", "scan"}, {"fraction", frac}, {"a", a}, {"margin", m.margin}, {"tau", m.tau},
                        {"xi", m.xi}, {"lower_bound", lower}});
    as.push_back(a);
    ms.push_back(m.margin);
    if (frac < 1.0 && !(m.margin > 0.0)) below_ok = false;
    if (m.margin < lower - 1e-12) lower_ok = false;
    if (a == 0.0 && m.margin != 1.0) zero_ok = false;
  }
  res.files.push_back({"margin.ndjson", "ndjson", ndjson(recs)});
  res.files.push_back({"margin.svg", "svg",
                       emit_plot({{"min |1 - a m_f|", as, ms, true}},
                                 {"Stability margin", "a", "margin", false, std::nullopt, provenance(c)})});
  res.summary = json{{"sup_abs_mf", sup}, {"a_max", num(a_max)}, {"margin", mr.margin}, {"epsilon_g", eps}};
  if (w.is_zero()) verdict(res, "margin_one_without_potential", mr.margin == 1.0, mr.margin, 1.0);
  verdict(res, "margin_at_zero_scaling", zero_ok, 0, 1.0);
  verdict(res, "positive_below_threshold", below_ok, a_max, 0, "a < 1 / sup|m_f|");
  verdict(res, "margin_above_linear_bound", lower_ok, 0, 0, "margin >= 1 - a sup|m_f|");
  return res;
}

// instability

ExperimentResult instability(const RunConfig& c) {
  ExperimentResult res;
  TwoWaveParams p;
  p.dim = c.grid.d;
  for (int i = 0; i < p.dim; ++i) p.xi[i] = c.numerics.tw_xi[i];
  p.mass = c.numerics.tw_m;
  p.w = make_w(c.physics);
  p.validate();

  const RVec r = linear_grid(0.0, c.numerics.r_max, c.numerics.r_n);
  const double dr = r[1] - r[0];
  const BandReport band = unstable_band(p, r);
  std::ostringstream csv;
  band.write_csv(csv);
  res.files.push_back({"dispersion.csv", "csv", csv.str()});

  // Coalescing roots get the sqrt(eps) allowance a defective matrix forces on any eigensolver.
  double agree = 0.0, excess = 0.0;
  int defective = 0;
  Vec4 dir = p.xi;
  if (norm2(dir) == 0.0) dir = {1.0, 0.0, 0.0, 0.0};
  for (double ri : r) {
    Vec4 k{};
    for (int i = 0; i < kMaxDim; ++i) k[i] = ri * dir[i];
    const auto es = eigensolver_spectrum(p, k);
    const Spectrum cf = closed_form_spectrum(p, k);
    const double d = es.converged ? multiset_distance(cf, es.values) : std::numeric_limits<double>::infinity();
    const bool coalesce = root_gap(cf) < 1e-6;
    defective += coalesce ? 1 : 0;
    agree = std::max(agree, d);
    excess = std::max(excess, d - (coalesce ? 1e-7 : 1e-10));
  }

  Vec4 seed{};
  if (!c.numerics.tw_k.empty()) {
    for (int i = 0; i < p.dim; ++i) seed[i] = c.numerics.tw_k[i];
  } else {
    const double x2 = norm2(p.xi);
    const double s = x2 > 0.0 ? std::sqrt(4.0 - std::min(2.0, p.mass / x2)) : 1.0;
    for (int i = 0; i < kMaxDim; ++i) seed[i] = s * dir[i];
  }
  GrowthOptions go;
  go.seed = c.numerics.seed;
  const GrowthFit fit = simulate_linearized(p, make_grid(c), seed, c.numerics.growth_T, go);

  std::vector<json> recs;
  json bands = json::array();
  for (const auto& b : band.detected) bands.push_back(json{{"lo", b.lo}, {"hi", b.hi}});
  json rec{{"record", "band"}, {"detected", bands}, {"max_rate", band.max_rate}, {"argmax_r", band.argmax_r},
           {"grid_step", dr}};
  rec["predicted"] = band.predicted ? json{{"lo", band.predicted->lo}, {"hi", band.predicted->hi}} : json(nullptr);
  recs.push_back(rec);
  json kk = json::array();
  for (int i = 0; i < p.dim; ++i) kk.push_back(fit.k[i]);
  recs.push_back(json{{"record", "growth"},
                      {"k", kk},
                      {"rate", fit.rate},
                      {"predicted", fit.predicted},
                      {"residual", fit.residual},
                      {"window", json::array({fit.window_start, fit.window_end})},
                      {"growth_detected", fit.growth_detected},
                      {"discrepancy", fit.discrepancy},
                      {"note", fit.note}});
  res.files.push_back({"instability.ndjson", "ndjson", ndjson(recs)});

  std::optional<std::pair<double, double>> shade;
  if (!band.detected.empty()) shade = std::make_pair(band.detected.front().lo, band.detected.back().hi);
  res.files.push_back({"dispersion.svg", "svg",
                       emit_plot({{"max Re lambda", band.r, band.max_re, false}},
                                 {"Two-wave dispersion along k = r xi", "r", "max Re lambda", false, shade,
                                  provenance(c)})});

  res.summary = json{{"band_count", band.detected.size()}, {"max_rate", band.max_rate},
                     {"argmax_r", band.argmax_r},          {"spectrum_agreement", agree}, {"defective_points", defective},
                     {"growth_rate", fit.rate},            {"growth_predicted", fit.predicted}};
  verdict(res, "spectra_agree", excess <= 0.0, agree, 1e-10,
          std::to_string(defective) + " grid points with coalescing roots checked at 1e-7");
  if (band.predicted) {
    const bool one = band.detected.size() == 1;
    const double e_lo = one ? std::abs(band.detected[0].lo - band.predicted->lo) : INFINITY;
    const double e_hi = one ? std::abs(band.detected[0].hi - std::min(band.predicted->hi, r.back())) : INFINITY;
    const double cell = dr * (1.0 + 1e-9);
    verdict(res, "band_matches_prediction", one && e_lo <= cell && e_hi <= cell, std::max(e_lo, e_hi), dr);
  } else if (p.mass == 0.0) {
    verdict(res, "band_empty", band.empty(), band.max_rate, 0);
  }
  if (fit.predicted > 1e-8) {
    const double rel = std::abs(fit.rate - fit.predicted) / fit.predicted;
    verdict(res, "growth_rate", rel <= 0.05, rel, 0.05, "relative to max Re lambda at the seeded k");
  } else {
    verdict(res, "no_growth", std::abs(fit.rate) <= 1e-8, fit.rate, 1e-8);
  }
  return res;
}

// picard

ExperimentResult picard(const RunConfig& c) {
  ExperimentResult res;
  const TorusGrid grid = make_grid(c);
  const ModeEnsemble eq =
      init_equilibrium(grid, make_f(c.physics), make_w(c.physics), {c.numerics.theta, c.physics.m});
  const PerturbationState st = add_perturbation(eq, perturbation(c));
  const PicardSolver solver(eq, st.z0, c.numerics.picard_window, c.numerics.picard_dt);
  const PicardReport rep = solver.run(c.numerics.picard_iterations);

  ModeEnsemble en = st.ensemble;
  double sup = 0.0;
  for (std::size_t n = 0; n < solver.time_points(); ++n) {
    if (n > 0) step(en, solver.dt());
    const auto z = deviations(en);
    for (std::size_t j = 0; j < z.size(); ++j)
      for (std::size_t i = 0; i < z[j].size(); ++i) sup = std::max(sup, std::abs(z[j][i] - rep.last.z[n][j][i]));
  }

  std::vector<json> recs;
  RVec its, rat;
  for (std::size_t n = 0; n < rep.increments.size(); ++n) {
    const auto& inc = rep.increments[n];
    json r{{"increment", n + 1},
           {"sup_hs_z", inc[0]},
           {"ld2_z", inc[1]},
           {"lhalf_v", inc[2]},
           {"l2_v", inc[3]},
           {"ratio", n > 0 ? num(rep.ratios[n - 1]) : json(nullptr)}};
    recs.push_back(r);
    if (n > 0) {
      its.push_back(static_cast<double>(n + 1));
      rat.push_back(rep.ratios[n - 1]);
    }
  }
  res.files.push_back({"picard.ndjson", "ndjson", ndjson(recs)});
  res.files.push_back({"contraction.svg", "svg",
                       emit_plot({{"contraction ratio", its, rat, true}},
                                 {"Picard contraction", "increment", "ratio", false, std::nullopt, provenance(c)})});
  double worst = 0.0;
  const std::size_t upto = std::min<std::size_t>(4, rep.ratios.size());
  for (std::size_t i = 0; i < upto; ++i) worst = std::max(worst, rep.ratios[i]);
  res.summary = json{{"iterations", rep.iterations}, {"diverged", rep.diverged}, {"max_ratio", worst},
                     {"split_step_sup_difference", sup}};
  verdict(res, "contraction", !rep.diverged && upto == 4 && worst < 0.5, worst, 0.5, "ratios of iterates 2-5");
  verdict(res, "split_step_agreement", sup <= 1e-4, sup, 1e-4);
  return res;
}

// norms

ExperimentResult norms(const RunConfig& c) {
  ExperimentResult res;
  ToolboxOptions o;
  o.seed = c.numerics.seed;
  o.fields = c.numerics.norms_fields;
  o.dim = c.grid.d;
  o.points = c.grid.N;
  const ToolboxReport r = toolbox_suite(o);
  const json rec{{"parseval", r.parseval},
                 {"partition", r.partition},
                 {"reconstruction", r.reconstruction},
                 {"bernstein_spread", r.bernstein_spread},
                 {"besov_checks", r.besov_checks},
                 {"besov_violations", r.besov_violations},
                 {"besov_worst_ratio", r.besov_worst}};
  res.files.push_back({"toolbox.ndjson", "ndjson", ndjson({rec})});
  res.summary = rec;
  verdict(res, "parseval", r.parseval <= 1e-12, r.parseval, 1e-12);
  verdict(res, "partition_of_unity", r.partition <= 1e-12, r.partition, 1e-12);
  verdict(res, "lp_reconstruction", r.reconstruction <= 1e-12, r.reconstruction, 1e-12);
  verdict(res, "bernstein_stability", r.bernstein_spread < 10.0, r.bernstein_spread, 10.0);
  verdict(res, "besov_monotone", r.besov_violations == 0, r.besov_violations, 0);
  return res;
}

// scattering-probe

ExperimentResult scattering_probe(const RunConfig& c) {
  ExperimentResult res;
  const TorusGrid grid = make_grid(c);
  const auto w = make_w(c.physics);
  const ModeEnsemble eq = init_equilibrium(grid, make_f(c.physics), w, {c.numerics.theta, c.physics.m});
  PerturbationState st = add_perturbation(eq, perturbation(c));
  ScatteringProbe probe(grid, point_or_centre(c.numerics.probe_center, c), c.numerics.probe_radius);
  EvolveOptions opt;
  opt.dt = c.numerics.dt;
  opt.stride = static_cast<std::size_t>(c.numerics.stride);
  opt.observers.push_back(probe.observer());
  const Trajectory tr = evolve(st.ensemble, c.numerics.T, opt);
  const ScatteringReport r = probe.report();

  std::vector<json> recs;
  RVec tc, tl;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    json rec{{"t", r.times[i]}, {"local_mass", r.local_mass[i]}};
    rec["cauchy"] = i > 0 ? json(r.cauchy[i - 1]) : json(nullptr);
    recs.push_back(rec);
    if (i > 0) tc.push_back(r.times[i]);
    tl.push_back(r.times[i]);
  }
  res.files.push_back({"probe.ndjson", "ndjson", ndjson(recs)});
  res.files.push_back({"probe.svg", "svg",
                       emit_plot({{"Cauchy difference", tc, r.cauchy, false}, {"local mass", tl, r.local_mass, false}},
                                 {"Scattering proxy", "t", "value", true, std::nullopt, provenance(c)})});
  double cmax = 0.0;
  for (double v : r.cauchy) cmax = std::max(cmax, v);
  res.summary = json{{"modes", eq.size()},
                     {"recurrence_time", r.recurrence_time},
                     {"cauchy_monotone", r.cauchy_monotone},
                     {"local_mass_monotone", r.local_mass_monotone},
                     {"max_cauchy", cmax},
                     {"warning", r.warning}};
  verdict(res, "finite", !tr.aborted, 0, 0, tr.diagnostic);
  if (w.is_zero()) {
    const double tol = 1e-10 * std::max(c.numerics.z_amplitude, 1e-300);
    verdict(res, "free_profile_constant", cmax <= tol, cmax, tol);
  } else {
    verdict(res, "cauchy_monotone", r.cauchy_monotone, 0, 0);
    verdict(res, "local_mass_monotone", r.local_mass_monotone, 0, 0);
  }
  verdict(res, "before_recurrence", r.warning.empty(), c.numerics.T, r.recurrence_time, r.warning);
  return res;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& c) {
  switch (c.kind) {
    case ExperimentKind::EquilibriumCheck: return equilibrium_check(c);
    case ExperimentKind::Simulate: return simulate(c);
    case ExperimentKind::LinearResponse: return linear_response(c);
    case ExperimentKind::StabilityCheck: return stability_check(c);
    case ExperimentKind::Instability: return instability(c);
    case ExperimentKind::Picard: return picard(c);
    case ExperimentKind::Norms: return norms(c);
    case ExperimentKind::ScatteringProbe: return scattering_probe(c);
  }
  throw std::logic_error("unknown experiment kind");
}

json write_envelope(const std::string& dir, const RunConfig& c, const ExperimentResult& r, double wall, int threads,
                    const std::string& error) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json payload = json::array();
  for (const auto& f : r.files) {
    if (!c.output.wants(f.format)) continue;
    std::ofstream out(fs::path(dir) / f.name, std::ios::binary);
    out << f.content;
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / f.name).string());
    payload.push_back(json{{"file", f.name}, {"format", f.format}, {"bytes", f.content.size()},
                           {"fnv1a64", hex64(fnv1a64(f.content))}});
  }
  json verdicts = json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back(json{{"name", v.name}, {"pass", v.pass}, {"value", num(v.value)},
                            {"threshold", num(v.threshold)}, {"detail", v.detail}});
  const std::string text = to_text(c);
  json env{{"artifact", "hrf"},
           {"version", kArtifactVersion},
           {"experiment", to_string(c.kind)},
           {"config_text", text},
           {"config_fnv1a64", hex64(fnv1a64(text))},
           {"threads", threads},
           {"wall_clock_seconds", wall},
           {"summary", r.summary},
           {"payload", payload},
           {"verdicts", verdicts},
           {"status", error.empty() && r.all_pass() ? "pass" : "fail"}};
  if (!error.empty()) env["error"] = error;
  std::ofstream out(fs::path(dir) / "envelope.json", std::ios::binary);
  out << env.dump(2) << "\n";
  return env;
}

}  // namespace hrf::io
