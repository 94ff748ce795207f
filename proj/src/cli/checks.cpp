#include "cylint/cli/checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cylint/covariation.hpp"
#include "cylint/evolution.hpp"
#include "cylint/integrate.hpp"
#include "cylint/parallel.hpp"
#include "cylint/rng.hpp"

namespace cylint::cli {

namespace {

constexpr std::array<CheckInfo, 12> kChecks{{
    {"linearity", "integrate_grid", "integral is linear in the integrand and in the integrator"},
    {"oracle_equivalence", "integrate_simple", "grid left-point sum of a simple integrand equals its closed form"},
    {"riemann_convergence", "riemann_convergence", "sampled integrands on refining partitions converge in ucp"},
    {"associativity", "associativity_residual", "g·(H·X) equals (gH)·X for a scalar step process g"},
    {"good_integrator", "good_integrator_diagnostic", "ucp seminorm of the integral scales with the integrand"},
    {"bracket_residual", "bracket_residual", "terminal bracket matches its expected value within 3 standard errors"},
    {"bracket_partition", "bracket_partition", "partition sums of increment products converge to the bracket"},
    {"bracket_properties", "bracket_properties_check", "bracket jump and stopped-bracket identities hold at every node"},
    {"fubini", "fubini_check", "integral commutes with integration over a finite measure space"},
    {"weak_residual", "weak_residual", "mild solution satisfies the weak equation to first order in the step"},
    {"fubini_see", "fubini_see_check", "three forms of the convolution Fubini identity agree to first order"},
    {"uniqueness", "convolution_by_pairing", "pairing-level convolution agrees with the coordinate closed form"},
}};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> v) {
  MeanSe r;
  const double n = static_cast<double>(v.size());
  for (double x : v) r.mean += x;
  r.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return r;
}

double max_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

double mean_of(std::span<const double> v) { return mean_se(v).mean; }

nlohmann::json header(const CheckInfo& c, const Experiment& e) {
  const ExperimentConfig& cfg = e.config;
  return {{"check", c.name},
          {"operation", c.operation},
          {"description", c.description},
          {"scenarios", cfg.ensemble.scenarios},
          {"master_seed", cfg.ensemble.master_seed},
          {"thresholds", {{"ucp_threshold", cfg.thresholds.ucp_threshold},
                          {"slack", cfg.thresholds.slack},
                          {"node_tol", cfg.thresholds.node_tol}}}};
}

CsvTable per_scenario(std::string name, std::vector<std::string> columns,
                      const std::vector<std::vector<double>>& values) {
  CsvTable t{std::move(name), {"scenario"}, {}};
  t.columns.insert(t.columns.end(), columns.begin(), columns.end());
  for (std::size_t s = 0; s < values.size(); ++s) {
    std::vector<double> row{static_cast<double>(s)};
    row.insert(row.end(), values[s].begin(), values[s].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable per_level(std::span<const double> gaps) {
  CsvTable t{"levels", {"level", "gap"}, {}};
  for (std::size_t n = 0; n < gaps.size(); ++n) t.rows.push_back({static_cast<double>(n + 1), gaps[n]});
  return t;
}

template <class T, class Fn>
std::vector<T> per_scenario_values(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t s) { out[s] = fn(s); });
  return out;
}

SimplePredictableIntegrand realize_simple(const IntegrandSpec& spec, const GridPtr& grid, std::size_t d) {
  SimplePredictableIntegrand h{grid, d, {0}, spec.coefficients, spec.at_zero};
  for (double t : spec.times) h.stop_times.push_back(grid->snap_up(t));
  h.validate();
  return h;
}

ElementaryIntegrand realize_elementary(const IntegrandSpec& spec, const GridPtr& grid) {
  ElementaryIntegrand h;
  for (const auto& [step, phi] : spec.terms) {
    StepScalarProcess g{grid, {0}, step.coefficients, step.value_at_zero};
    for (double t : step.breakpoints) g.breakpoints.push_back(grid->snap_up(t));
    g.validate();
    h.terms.emplace_back(std::move(g), phi);
  }
  return h;
}

std::vector<RandomPartition> partitions_for(const Experiment& e, std::size_t s) {
  const ExperimentConfig& c = e.config;
  return partition_sequence(*e.scenarios[s].x.grid(), c.partitions.kind, c.partitions.levels,
                            stream_seed(c.ensemble.master_seed, s, 0, StreamPurpose::Partition));
}

SeqPathPrimal primal_for(const Experiment& e, std::size_t s) {
  const ScenarioData& d = e.scenarios[s];
  if (e.config.bracket.primal == BracketSpec::Primal::Mirror || !d.y) return mirror(d.x);
  return *d.y;
}

// Largest |rate| of the continuous finite-variation part.
double fv_rate_bound(const NoiseSpec& n) {
  if (const auto* p = std::get_if<CompoundPoissonSpec>(&n.kind)) {
    return p->compensated ? p->rate * std::abs(p->jump_mean) : 0.0;
  }
  if (const auto* d = std::get_if<DriftSpec>(&n.kind)) {
    double m = 0.0;
    for (const RateSegment& r : d->rate_function) m = std::max(m, std::abs(r.rate));
    return m;
  }
  return 0.0;
}

bool needs_independent_primal(const ExperimentConfig& c) {
  if (c.bracket.primal != BracketSpec::Primal::Independent) return false;
  return std::ranges::any_of(c.checks, [](const std::string& n) { return n.starts_with("bracket"); });
}

// Evolution checks: one path per scenario at two resolutions (refined by 2)
// restricted to the coarse grid.
struct EvolutionSetup {
  DiagonalSemigroup semigroup;
  DualVec eta;
  FiniteSeq phi;
};

EvolutionSetup evolution_setup(const ExperimentConfig& c) {
  const std::size_t d = c.dimension();
  EvolutionSetup e;
  e.semigroup = c.evolution.eigenvalues.empty() ? DiagonalSemigroup::heat(d)
                                                : DiagonalSemigroup{c.evolution.eigenvalues};
  e.eta = c.evolution.eta;
  e.eta.resize(d, 0.0);
  if (c.evolution.phi.empty()) {
    std::vector<std::pair<std::size_t, double>> ones;
    for (std::size_t k = 0; k < d; ++k) ones.emplace_back(k, 1.0);
    e.phi = FiniteSeq(std::move(ones));
  } else {
    e.phi = c.evolution.phi;
  }
  return e;
}

std::pair<SeqSemimartingale, SeqSemimartingale> two_resolutions(const ExperimentConfig& c, std::size_t s) {
  const NoiseModel m = c.noise_model();
  const Ensemble ens{c.ensemble.scenarios, c.ensemble.master_seed};
  const SeqSemimartingale fine(generate_scenario_refined(m, ens, s, 2));
  const GridPtr coarse = TimeGrid::build(c.grid.horizon, c.grid.base_steps, [&] {
    // Jump nodes are the fine nodes off the refined uniform lattice.
    std::vector<double> extra;
    const double h = c.grid.horizon / static_cast<double>(2 * c.grid.base_steps);
    for (double t : fine.grid()->nodes()) {
      const double k = std::round(t / h);
      if (std::abs(t - k * h) > kTimeTolerance) extra.push_back(t);
    }
    return extra;
  }());
  return {restrict_to(fine, coarse), fine};
}

struct FirstOrder {
  double coarse = 0.0;
  double fine = 0.0;
  double ratio = 0.0;
  double constant = 0.0;
  bool pass = false;
};

// Halving the step should roughly halve the error; exact agreement passes.
FirstOrder judge_first_order(double coarse, double fine, double dt, double tol) {
  FirstOrder r{coarse, fine, coarse > 0.0 ? fine / coarse : 0.0, coarse / dt, false};
  r.pass = coarse <= tol ? fine <= tol : (r.ratio >= 0.3 && r.ratio <= 0.7);
  return r;
}

void put_first_order(nlohmann::json& j, const FirstOrder& f) {
  j["coarse_mean_sup"] = f.coarse;
  j["fine_mean_sup"] = f.fine;
  j["halving_ratio"] = f.ratio;
  j["halving_band"] = {0.3, 0.7};
  j["constant_C"] = f.constant;
}

CheckOutcome check_linearity(const CheckInfo& info, const Experiment& e) {
  const std::size_t n = e.scenarios.size();
  const double a = 2.0, b = -0.5, c = 1.5;
  auto devs = per_scenario_values<std::vector<double>>(n, [&](std::size_t s) {
    const ScenarioData& d = e.scenarios[s];
    const GridIntegrand k = linear_in_t_integrand(d.x.grid(), d.x.dimension(), FiniteSeq::basis(d.x.dimension() - 1));
    const std::array<std::pair<double, GridIntegrand>, 2> terms{{{a, d.h}, {b, k}}};
    const ScalarPath lhs = integrate_grid(combine_integrands(terms), d.x).path;
    const ScalarPath rhs = a * integrate_grid(d.h, d.x).path + b * integrate_grid(k, d.x).path;
    const ScalarPath lhs_x = integrate_grid(d.h, scale(c, d.x)).path;
    const ScalarPath rhs_x = c * integrate_grid(d.h, d.x).path;
    return std::vector<double>{max_node_distance(lhs, rhs), max_node_distance(lhs_x, rhs_x)};
  });
  std::vector<double> in_h, in_x;
  for (const auto& v : devs) {
    in_h.push_back(v[0]);
    in_x.push_back(v[1]);
  }
  CheckOutcome o{std::string(info.name), false, header(info, e), {}, {}};
  o.report["integrand_deviation"] = max_of(in_h);
  o.report["integrator_deviation"] = max_of(in_x);
  o.pass = std::max(max_of(in_h), max_of(in_x)) <= e.config.thresholds.node_tol;
  o.tables.push_back(per_scenario("deviations", {"integrand", "integrator"}, devs));
  return o;
}

CheckOutcome check_oracle(const CheckInfo& info, const Experiment& e) {
  const IntegrandSpec& spec = e.config.integrand;
  const std::size_t d = e.config.dimension();
  auto devs = per_scenario_values<double>(e.scenarios.size(), [&](std::size_t s) {
    const SeqSemimartingale& x = e.scenarios[s].x;
    if (spec.kind == IntegrandSpec::Kind::Elementary) {
      const ElementaryIntegrand h = realize_elementary(spec, x.grid());
      return max_node_distance(integrate_grid(to_grid(h, d), x).with_value_at_zero(),
                               integrate_elementary(h, x).with_value_at_zero());
    }
    const SimplePredictableIntegrand h = spec.kind == IntegrandSpec::Kind::Simple
                                             ? realize_simple(spec, x.grid(), d)
                                             : sample_at(e.scenarios[s].h, full_partition(*x.grid()));
    return max_node_distance(integrate_grid(to_grid(h), x).with_value_at_zero(),
                             integrate_simple(h, x).with_value_at_zero());
  });
  CheckOutcome o{std::string(info.name), false, header(info, e), {}, {}};
  o.report["integrand_kind"] = to_string(spec.kind);
  o.report["max_deviation"] = max_of(devs);
  o.pass = max_of(devs) <= e.config.thresholds.node_tol;
  std::vector<std::vector<double>> rows;
  for (double v : devs) rows.push_back({v});
  o.tables.push_back(per_scenario("deviations", {"deviation"}, rows));
  return o;
}

CheckOutcome check_riemann(const CheckInfo& info, const Experiment& e) {
  const std::size_t n = e.scenarios.size();
  std::vector<GridIntegrand> hs;
  std::vector<SeqSemimartingale> xs;
  for (const ScenarioData& d : e.scenarios) {
    hs.push_back(d.h);
    xs.push_back(d.x);
  }
  const auto parts = per_scenario_values<std::vector<RandomPartition>>(n, [&](std::size_t s) { return partitions_for(e, s); });
  const ConvergenceReport r = riemann_convergence(hs, xs, parts, e.config.thresholds.ucp_threshold, e.config.thresholds.slack);
  CheckOutcome o{std::string(info.name), r.pass, header(info, e), {}, {}};
  std::vector<double> mesh(r.gaps.size(), 0.0);
  for (std::size_t l = 0; l < mesh.size(); ++l) {
    for (std::size_t s = 0; s < n; ++s) mesh[l] += parts[s][l].mesh(*xs[s].grid()) / static_cast<double>(n);
  }
  o.report["gaps"] = r.gaps;
  o.report["mean_mesh"] = mesh;
  o.report["monotone"] = r.monotone;
  o.report["below_threshold"] = r.below_threshold;
  CsvTable t = per_level(r.gaps);
  t.columns.push_back("mean_mesh");
  for (std::size_t l = 0; l < mesh.size(); ++l) t.rows[l].push_back(mesh[l]);
  o.tables.push_back(std::move(t));
  return o;
}

CheckOutcome check_associativity(const CheckInfo& info, const Experiment& e) {
  auto res = per_scenario_values<double>(e.scenarios.size(), [&](std::size_t s) {
    const ScenarioData& d = e.scenarios[s];
    const TimeGrid& g = *d.x.grid();
    const double T = g.horizon();
    StepScalarProcess step{d.x.grid(),
                           {0, g.snap_up(0.25 * T), g.snap_up(0.5 * T), g.snap_up(0.75 * T), g.size() - 1},
                           {1.0, -2.0, 0.5, 3.0},
                           1.0};
    return associativity_residual(step, d.h, d.x);
  });
  CheckOutcome o{std::string(info.name), max_of(res) <= e.config.thresholds.node_tol, header(info, e), {}, {}};
  o.report["step_process"] = {{"breakpoint_times", {0.0, 0.25, 0.5, 0.75, 1.0}},
                              {"coefficients", {1.0, -2.0, 0.5, 3.0}},
                              {"value_at_zero", 1.0}};
  o.report["max_residual"] = max_of(res);
  std::vector<std::vector<double>> rows;
  for (double v : res) rows.push_back({v});
  o.tables.push_back(per_scenario("residuals", {"residual"}, rows));
  return o;
}

CheckOutcome check_good_integrator(const CheckInfo& info, const Experiment& e) {
  std::vector<GridIntegrand> hs;
  std::vector<SeqSemimartingale> xs;
  for (const ScenarioData& d : e.scenarios) {
    hs.push_back(d.h);
    xs.push_back(d.x);
  }
  std::vector<double> eps;
  for (int k = 0; k < 8; ++k) eps.push_back(std::ldexp(1.0, -k));
  const GoodIntegratorReport r = good_integrator_diagnostic(xs, hs, eps);
  CheckOutcome o{std::string(info.name), r.pass, header(info, e), {}, {}};
  o.report["eps"] = r.eps;
  o.report["seminorms"] = r.seminorms;
  o.report["unclipped_base"] = r.base;
  CsvTable t{"seminorms", {"n", "eps", "seminorm"}, {}};
  for (std::size_t k = 0; k < eps.size(); ++k) t.rows.push_back({static_cast<double>(k), r.eps[k], r.seminorms[k]});
  o.tables.push_back(std::move(t));
  return o;
}

CheckOutcome check_bracket_residual(const CheckInfo& info, const Experiment& e) {
  const ExperimentConfig& c = e.config;
  const std::size_t n = e.scenarios.size();
  auto paths = per_scenario_values<ScalarPath>(n, [&](std::size_t s) {
    return bracket_residual(e.scenarios[s].x, primal_for(e, s));
  });
  std::vector<double> terminal;
  for (const ScalarPath& p : paths) terminal.push_back(p.terminal());
  const MeanSe m = mean_se(terminal);

  // E[X,Y]_T: the pairing of the initial values plus, for Y = X, the
  // expected quadratic variation of each coordinate. Drift increments add a
  // deterministic Σ(Δt)² term bounded by 2·r_X·r_Y·T·Δt per coordinate.
  const bool mirror = c.bracket.primal == BracketSpec::Primal::Mirror;
  const double dt = c.grid.horizon / static_cast<double>(c.grid.base_steps);
  double expected = 0.0;
  double allowance = 0.0;
  for (std::size_t k = 0; k < c.dimension(); ++k) {
    const NoiseSpec& x = c.noise[k];
    const NoiseSpec& y =
        mirror ? x : (c.integrand.kind == IntegrandSpec::Kind::LeftLimit ? c.integrand.primal[k] : c.noise[k]);
    expected += x.initial_value * y.initial_value;
    if (mirror) expected += x.expected_quadratic_variation(c.grid.horizon);
    allowance += 2.0 * fv_rate_bound(x) * fv_rate_bound(y) * c.grid.horizon * dt;
  }
  const double band = 3.0 * m.se + allowance + c.thresholds.node_tol * std::max(1.0, std::abs(expected));
  CheckOutcome o{std::string(info.name), std::abs(m.mean - expected) <= band, header(info, e), {}, {}};
  o.report["primal"] = mirror ? "mirror" : "independent";
  o.report["convention"] = "bracket includes <X_0, Y_0> at t = 0";
  o.report["terminal_mean"] = m.mean;
  o.report["standard_error"] = m.se;
  o.report["expected"] = expected;
  o.report["discretization_allowance"] = allowance;
  o.report["band_3se"] = {m.mean - 3.0 * m.se, m.mean + 3.0 * m.se};
  std::vector<std::vector<double>> rows;
  for (double v : terminal) rows.push_back({v});
  o.tables.push_back(per_scenario("terminal", {"bracket_T"}, rows));
  for (ScalarPath& p : paths) o.paths.push_back({std::move(p)});
  return o;
}

CheckOutcome check_bracket_partition(const CheckInfo& info, const Experiment& e) {
  const std::size_t n = e.scenarios.size();
  std::vector<SeqSemimartingale> xs;
  std::vector<SeqPathPrimal> ys;
  for (std::size_t s = 0; s < n; ++s) {
    xs.push_back(e.scenarios[s].x);
    ys.push_back(primal_for(e, s));
  }
  const auto parts = per_scenario_values<std::vector<RandomPartition>>(n, [&](std::size_t s) { return partitions_for(e, s); });
  const BracketResult r = bracket_partition(xs, ys, parts, e.config.thresholds.ucp_threshold, e.config.thresholds.slack);
  CheckOutcome o{std::string(info.name), r.convergence.pass, header(info, e), {}, {}};
  o.report["convention"] = "bracket includes <X_0, Y_0> at t = 0";
  o.report["gaps"] = r.convergence.gaps;
  o.report["monotone"] = r.convergence.monotone;
  o.report["below_threshold"] = r.convergence.below_threshold;
  o.tables.push_back(per_level(r.convergence.gaps));
  return o;
}

CheckOutcome check_bracket_properties(const CheckInfo& info, const Experiment& e) {
  const double level = e.config.bracket.stop_level;
  auto props = per_scenario_values<BracketProperties>(e.scenarios.size(), [&](std::size_t s) {
    const SeqSemimartingale& x = e.scenarios[s].x;
    return bracket_properties_check(x, primal_for(e, s), hitting_time(x, FiniteSeq::basis(0), level));
  });
  std::vector<std::vector<double>> rows;
  std::array<double, 7> worst{};
  bool any_continuity = false;
  for (const BracketProperties& p : props) {
    const double cont = p.continuity_deviation.value_or(0.0);
    any_continuity = any_continuity || p.continuity_deviation.has_value();
    const std::array<double, 7> v{p.at_zero_deviation, p.jump_deviation, p.stop_x_deviation, p.stop_y_deviation,
                                  p.stop_xy_deviation, p.stop_cross_deviation, cont};
    for (std::size_t k = 0; k < v.size(); ++k) worst[k] = std::max(worst[k], v[k]);
    rows.emplace_back(v.begin(), v.end());
  }
  const double max_dev = *std::ranges::max_element(worst);
  CheckOutcome o{std::string(info.name), max_dev <= e.config.thresholds.node_tol, header(info, e), {}, {}};
  o.report["stop_level"] = level;
  o.report["at_zero"] = worst[0];
  o.report["jump"] = worst[1];
  o.report["stop_x"] = worst[2];
  o.report["stop_y"] = worst[3];
  o.report["stop_xy"] = worst[4];
  o.report["stop_cross"] = worst[5];
  o.report["continuity"] = any_continuity ? nlohmann::json(worst[6]) : nlohmann::json(nullptr);
  o.report["max_deviation"] = max_dev;
  o.tables.push_back(per_scenario("deviations",
                                  {"at_zero", "jump", "stop_x", "stop_y", "stop_xy", "stop_cross", "continuity"},
                                  rows));
  return o;
}

CheckOutcome check_fubini(const CheckInfo& info, const Experiment& e) {
  const ExperimentConfig& c = e.config;
  FiniteMeasureSpace space;
  space.weights = c.fubini.weights;
  for (std::size_t i = 0; i < space.weights.size(); ++i) space.points.push_back("e" + std::to_string(i + 1));
  auto devs = per_scenario_values<double>(e.scenarios.size(), [&](std::size_t s) {
    const ScenarioData& d = e.scenarios[s];
    std::vector<GridIntegrand> family;
    if (c.fubini.family.empty()) {
      family.push_back(d.h);
    } else {
      for (const IntegrandSpec& h : c.fubini.family) family.push_back(realize_integrand(h, d.x.grid(), c.dimension(), nullptr));
    }
    return fubini_check(family, space, d.x).deviation;
  });
  CheckOutcome o{std::string(info.name), max_of(devs) <= c.thresholds.node_tol, header(info, e), {}, {}};
  o.report["weights"] = space.weights;
  o.report["max_deviation"] = max_of(devs);
  std::vector<std::vector<double>> rows;
  for (double v : devs) rows.push_back({v});
  o.tables.push_back(per_scenario("deviations", {"deviation"}, rows));
  return o;
}

enum class EvolutionQuantity { WeakResidual, FubiniSee, Uniqueness };

double evolution_error(EvolutionQuantity q, const EvolutionSetup& ev, const SeqSemimartingale& x,
                       std::span<const double> sample_times) {
  switch (q) {
    case EvolutionQuantity::WeakResidual:
      return weak_residual(mild_solution(ev.eta, x, ev.semigroup), x, ev.phi).sup_abs();
    case EvolutionQuantity::FubiniSee:
      return fubini_see_check(x, ev.semigroup, ev.phi).max_deviation();
    case EvolutionQuantity::Uniqueness: {
      const ScalarPath u = evaluate(stochastic_convolution(x, ev.semigroup), ev.phi);
      double m = 0.0;
      for (double t : sample_times) {
        const std::size_t node = *x.grid()->find(t);
        m = std::max(m, std::abs(convolution_by_pairing(x, ev.semigroup, ev.phi, node) - u.right(node)));
      }
      return m;
    }
  }
  return 0.0;
}

CheckOutcome check_evolution(const CheckInfo& info, const Experiment& e, EvolutionQuantity q) {
  const ExperimentConfig& c = e.config;
  const EvolutionSetup ev = evolution_setup(c);
  const std::size_t samples = 16;
  std::vector<double> sample_times;
  for (std::size_t k = 1; k <= samples; ++k) {
    sample_times.push_back(c.grid.horizon * static_cast<double>(k) / static_cast<double>(samples));
  }
  auto errs = per_scenario_values<std::vector<double>>(e.scenarios.size(), [&](std::size_t s) {
    const auto [coarse, fine] = two_resolutions(c, s);
    return std::vector<double>{evolution_error(q, ev, coarse, sample_times), evolution_error(q, ev, fine, sample_times)};
  });
  std::vector<double> ec, ef;
  for (const auto& v : errs) {
    ec.push_back(v[0]);
    ef.push_back(v[1]);
  }
  const double dt = c.grid.horizon / static_cast<double>(c.grid.base_steps);
  const FirstOrder f = judge_first_order(mean_of(ec), mean_of(ef), dt, c.thresholds.node_tol);
  CheckOutcome o{std::string(info.name), f.pass, header(info, e), {}, {}};
  o.report["eigenvalues"] = ev.semigroup.eigenvalues;
  o.report["eta"] = ev.eta;
  o.report["coarse_dt"] = dt;
  put_first_order(o.report, f);
  if (q == EvolutionQuantity::Uniqueness) o.report["sample_times"] = sample_times;
  o.tables.push_back(per_scenario("errors", {"coarse", "fine"}, errs));
  return o;
}

}  // namespace

std::span<const CheckInfo> check_registry() { return kChecks; }

const CheckInfo* find_check(std::string_view name) {
  for (const CheckInfo& c : kChecks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

GridIntegrand realize_integrand(const IntegrandSpec& spec, const GridPtr& grid, std::size_t d, const SeqPathPrimal* y) {
  switch (spec.kind) {
    case IntegrandSpec::Kind::Constant: return constant_integrand(grid, d, spec.phi);
    case IntegrandSpec::Kind::LinearInT: return linear_in_t_integrand(grid, d, spec.phi);
    case IntegrandSpec::Kind::LeftLimit:
      if (!y) throw std::invalid_argument("left_limit integrand needs a primal process");
      return left_limit_integrand(*y);
    case IntegrandSpec::Kind::Simple: return to_grid(realize_simple(spec, grid, d));
    case IntegrandSpec::Kind::Elementary: return to_grid(realize_elementary(spec, grid), d);
  }
  throw std::logic_error("unknown integrand kind");
}

Experiment realize(const ExperimentConfig& config) {
  const std::size_t d = config.dimension();
  NoiseModel model = config.noise_model();
  const bool left_limit = config.integrand.kind == IntegrandSpec::Kind::LeftLimit;
  if (left_limit) {
    model.coordinates.insert(model.coordinates.end(), config.integrand.primal.begin(), config.integrand.primal.end());
  } else if (needs_independent_primal(config)) {
    model.coordinates.insert(model.coordinates.end(), config.noise.begin(), config.noise.end());
  }
  const Ensemble ens{config.ensemble.scenarios, config.ensemble.master_seed};
  Experiment e{config, std::vector<ScenarioData>(config.ensemble.scenarios)};
  parallel_for(config.ensemble.scenarios, [&](std::size_t s) {
    std::vector<ScalarPath> paths = generate_scenario(model, ens, s);
    ScenarioData& out = e.scenarios[s];
    out.x = SeqSemimartingale(std::vector<ScalarPath>(paths.begin(), paths.begin() + static_cast<std::ptrdiff_t>(d)));
    if (paths.size() > d) {
      out.y = SeqPathPrimal(std::vector<ScalarPath>(paths.begin() + static_cast<std::ptrdiff_t>(d), paths.end()));
    }
    out.h = realize_integrand(config.integrand, out.x.grid(), d, out.y ? &*out.y : nullptr);
  });
  return e;
}

CheckOutcome run_check(const CheckInfo& check, const Experiment& e) {
  const std::string_view n = check.name;
  if (n == "linearity") return check_linearity(check, e);
  if (n == "oracle_equivalence") return check_oracle(check, e);
  if (n == "riemann_convergence") return check_riemann(check, e);
  if (n == "associativity") return check_associativity(check, e);
  if (n == "good_integrator") return check_good_integrator(check, e);
  if (n == "bracket_residual") return check_bracket_residual(check, e);
  if (n == "bracket_partition") return check_bracket_partition(check, e);
  if (n == "bracket_properties") return check_bracket_properties(check, e);
  if (n == "fubini") return check_fubini(check, e);
  if (n == "weak_residual") return check_evolution(check, e, EvolutionQuantity::WeakResidual);
  if (n == "fubini_see") return check_evolution(check, e, EvolutionQuantity::FubiniSee);
  if (n == "uniqueness") return check_evolution(check, e, EvolutionQuantity::Uniqueness);
  throw std::invalid_argument("unknown check " + std::string(n));
}

}  // namespace cylint::cli
