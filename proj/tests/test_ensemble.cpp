#include <cmath>

#include "doctest.h"
#include "hrf/ensemble.hpp"
#include "hrf/equilibrium.hpp"

using namespace hrf;

namespace {

double sup_diff(const CVec& a, const CVec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

ModeEnsemble small_equilibrium(const InteractionPotential& w, EquilibriumReport* rep = nullptr) {
  const TorusGrid g(1, 2.0 * kPi, 32);
  return init_equilibrium(g, DistributionFunction::fermi(1.0, 0.0), w, {}, rep);
}

}  // namespace

TEST_CASE("equilibrium discretization") {
  EquilibriumReport rep;
  const ModeEnsemble e = small_equilibrium(InteractionPotential::delta(1.0), &rep);
  CHECK(rep.modes == e.size());
  CHECK(e.size() > 3);
  CHECK(rep.retained_mass == doctest::Approx(e.reference_density()).epsilon(1e-14));
  CHECK(rep.truncated_fraction < 1e-6);
  const RVec rho = density(e);
  for (double r : rho) CHECK(r == doctest::Approx(e.reference_density()).epsilon(1e-13));

  const TorusGrid g(1, 2.0 * kPi, 32);
  CHECK(init_equilibrium(g, DistributionFunction::zero(), InteractionPotential::delta(1.0)).empty());
  CHECK_THROWS_AS(init_equilibrium(g, DistributionFunction::gaussian(1e-12, 1.0), InteractionPotential::delta(1.0)),
                  std::invalid_argument);
}

TEST_CASE("equilibrium is invariant under the split-step flow") {
  ModeEnsemble e = small_equilibrium(InteractionPotential::delta(1.0));
  const RVec m0 = mode_masses(e);
  advance(e, 1e-2, 200);
  CHECK(e.time() == doctest::Approx(2.0));
  double worst = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) worst = std::max(worst, sup_diff(e.mode(j).u, e.equilibrium_mode(j)));
  CHECK(worst <= 1e-10);
  const RVec m1 = mode_masses(e);
  for (std::size_t j = 0; j < m0.size(); ++j) CHECK(std::abs(m1[j] - m0[j]) <= 1e-10 * m0[j]);
}

TEST_CASE("perturbed flow conserves mode masses and energy") {
  const ModeEnsemble eq = small_equilibrium(InteractionPotential::delta(1.0));
  PerturbationSpec spec;
  spec.amplitude = 0.05;
  spec.center = {kPi, 0, 0, 0};
  spec.width = 0.5;
  PerturbationState st = add_perturbation(eq, spec);

  const RVec v1 = st.induced_potential(), v2 = st.induced_potential_from_modes();
  for (std::size_t i = 0; i < v1.size(); ++i) CHECK(std::abs(v1[i] - v2[i]) <= 1e-13);

  EvolveOptions opt;
  opt.dt = 1e-2;
  opt.stride = 50;
  const Trajectory tr = evolve(st.ensemble, 2.0, opt);
  REQUIRE_FALSE(tr.aborted);
  REQUIRE(tr.observations.size() == 5);
  const auto& first = tr.observations.front();
  const auto& last = tr.observations.back();
  CHECK(last.t == doctest::Approx(2.0));
  for (std::size_t j = 0; j < first.mode_masses.size(); ++j)
    CHECK(std::abs(last.mode_masses[j] - first.mode_masses[j]) <= 1e-10 * first.mode_masses[j]);
  CHECK(std::abs(last.energy - first.energy) <= 1e-3 * std::abs(first.energy));
  CHECK(last.density_spread > 0.0);
}

TEST_CASE("perturbation normalization and targeting") {
  const ModeEnsemble eq = small_equilibrium(InteractionPotential::delta(1.0));
  PerturbationSpec spec;
  spec.amplitude = 1e-3;
  spec.normalize_l2 = true;
  spec.target_mode = 2;
  const PerturbationState st = add_perturbation(eq, spec);
  double l2 = 0.0;
  for (std::size_t j = 0; j < st.z0.size(); ++j)
    for (const auto& z : st.z0[j]) {
      if (j != 2) CHECK(z == Complex(0.0));
      l2 += std::norm(z);
    }
  l2 *= eq.grid().cell_volume();
  CHECK(std::sqrt(l2) == doctest::Approx(1e-3).epsilon(1e-12));
  spec.target_mode = eq.size();
  CHECK_THROWS(add_perturbation(eq, spec));
}

TEST_CASE("plane wave ensemble") {
  const TorusGrid g(2, 2.0 * kPi, 16);
  ModeEnsemble e = plane_wave_ensemble(g, InteractionPotential::delta(2.0), {{{1, 0, 0, 0}, 0.5}, {{0, -2, 0, 0}, 1.5}});
  CHECK(e.mass() == doctest::Approx(2.0 * (0.25 + 2.25)));
  CHECK(e.omega(1) == doctest::Approx(e.mass() + 4.0));
  advance(e, 0.05, 20);
  for (std::size_t j = 0; j < e.size(); ++j) CHECK(sup_diff(e.mode(j).u, e.equilibrium_mode(j)) <= 1e-12);
}

TEST_CASE("Picard iteration contracts and matches the split step") {
  const ModeEnsemble eq = small_equilibrium(InteractionPotential::delta(0.5));
  PerturbationSpec spec;
  spec.amplitude = 1e-3;
  spec.center = {kPi, 0, 0, 0};
  spec.width = 0.5;
  spec.target_mode = 1;
  const PerturbationState st = add_perturbation(eq, spec);
  const PicardSolver solver(eq, st.z0, 0.5, 1e-2);
  CHECK(solver.time_points() == 51);
  const PicardReport rep = solver.run(6);
  CHECK_FALSE(rep.diverged);
  REQUIRE(rep.ratios.size() >= 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(rep.ratios[i] < 0.5);

  ModeEnsemble en = st.ensemble;
  double sup = 0.0;
  for (std::size_t n = 0; n < solver.time_points(); ++n) {
    if (n > 0) step(en, solver.dt());
    const auto z = deviations(en);
    for (std::size_t j = 0; j < z.size(); ++j) sup = std::max(sup, sup_diff(z[j], rep.last.z[n][j]));
  }
  CHECK(sup <= 1e-4);
}

TEST_CASE("slice norms of zero data vanish") {
  const TorusGrid g(2, 2.0 * kPi, 16);
  const auto n = slice_norms(g, {CVec(g.size()), CVec(g.size())}, RVec(g.size()));
  for (const auto& [k, v] : to_map(n)) CHECK(v == 0.0);
}

TEST_CASE("scattering probe without interaction") {
  const TorusGrid g(2, 8.0 * kPi, 32);
  const ModeEnsemble eq =
      init_equilibrium(g, DistributionFunction::fermi(0.25, 0.0), InteractionPotential::none(), {1e-4});
  PerturbationSpec spec;
  spec.amplitude = 0.01;
  spec.center = {4.0 * kPi, 4.0 * kPi, 0, 0};
  spec.width = 1.0;
  PerturbationState st = add_perturbation(eq, spec);
  ScatteringProbe probe(g, spec.center, 3.0);
  EvolveOptions opt;
  opt.dt = 0.02;
  opt.stride = 25;
  opt.observers.push_back(probe.observer());
  evolve(st.ensemble, 2.0, opt);
  const ScatteringReport r = probe.report();
  REQUIRE(r.cauchy.size() == 4);
  for (double c : r.cauchy) CHECK(c <= 1e-12);
  CHECK(r.local_mass_monotone);
  CHECK(r.recurrence_time > 2.0);
}
