#include "cylint/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cylint/rng.hpp"

namespace cylint {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

double CompoundPoissonSpec::second_moment() const {
  const double sd = jump_law.kind == JumpLaw::Kind::Gaussian ? jump_law.sd : 0.0;
  return jump_mean * jump_mean + sd * sd;
}

double DriftSpec::integral(double t) const {
  double total = 0.0;
  double from = 0.0;
  for (const RateSegment& seg : rate_function) {
    if (t <= from) break;
    total += seg.rate * (std::min(t, seg.until) - from);
    from = seg.until;
  }
  return total;
}

void NoiseSpec::validate(double horizon) const {
  require(std::isfinite(initial_value), "initial_value must be finite");
  std::visit(Overloaded{
                 [](const BrownianSpec& b) {
                   require(std::isfinite(b.vol) && b.vol >= 0.0, "vol must be finite and >= 0");
                 },
                 [](const CompoundPoissonSpec& p) {
                   require(std::isfinite(p.rate) && p.rate >= 0.0, "rate must be finite and >= 0");
                   require(std::isfinite(p.jump_mean), "jump_mean must be finite");
                   require(std::isfinite(p.jump_law.sd) && p.jump_law.sd >= 0.0,
                           "jump sd must be finite and >= 0");
                 },
                 [horizon](const DriftSpec& d) {
                   double prev = 0.0;
                   for (const RateSegment& seg : d.rate_function) {
                     require(std::isfinite(seg.rate), "drift rate must be finite");
                     require(std::isfinite(seg.until) && seg.until > prev,
                             "rate_function breakpoints must be increasing and positive");
                     require(seg.until <= horizon + kTimeTolerance,
                             "rate_function breakpoint beyond the horizon");
                     prev = seg.until;
                   }
                 },
             },
             kind);
}

bool NoiseSpec::has_jumps() const {
  const auto* p = std::get_if<CompoundPoissonSpec>(&kind);
  return p && p->rate > 0.0;
}

double NoiseSpec::expected_quadratic_variation(double t) const {
  return std::visit(Overloaded{
                        [t](const BrownianSpec& b) { return b.vol * b.vol * t; },
                        [t](const CompoundPoissonSpec& p) { return p.rate * p.second_moment() * t; },
                        [](const DriftSpec&) { return 0.0; },
                    },
                    kind);
}

ScalarPath gen_brownian(const GridPtr& grid, std::uint64_t seed, double vol, double initial_value) {
  if (!(vol >= 0.0)) throw std::invalid_argument("vol must be >= 0");
  Rng rng(seed);
  const std::size_t n = grid->size();
  std::vector<double> mart(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    mart[i] = mart[i - 1] + vol * std::sqrt(grid->spacing(i - 1)) * rng.normal();
  }
  std::vector<double> whole(n);
  for (std::size_t i = 0; i < n; ++i) whole[i] = initial_value + mart[i];
  ScalarPath path = ScalarPath::continuous(grid, std::move(whole));
  return path.with_decomposition({ScalarPath::continuous(grid, std::move(mart)),
                                  ScalarPath::constant(grid, 0.0), ScalarPath::constant(grid, 0.0)});
}

JumpDraw draw_jumps(double horizon, std::uint64_t seed, const CompoundPoissonSpec& spec,
                    std::size_t max_jumps) {
  JumpDraw out;
  if (spec.rate <= 0.0) return out;
  Rng times(derive_seed(seed, static_cast<std::uint64_t>(StreamPurpose::JumpTimes)));
  Rng sizes(derive_seed(seed, static_cast<std::uint64_t>(StreamPurpose::JumpSizes)));
  double t = times.exponential(spec.rate);
  while (t <= horizon) {
    if (out.times.size() >= max_jumps) {
      throw std::runtime_error("jump count exceeds the configured cap of " + std::to_string(max_jumps));
    }
    out.times.push_back(t);
    double j = spec.jump_mean;
    if (spec.jump_law.kind == JumpLaw::Kind::Gaussian) j += spec.jump_law.sd * sizes.normal();
    out.sizes.push_back(j);
    t += times.exponential(spec.rate);
  }
  return out;
}

ScalarPath compound_poisson_path(const GridPtr& grid, const JumpDraw& jumps,
                                 const CompoundPoissonSpec& spec, double initial_value) {
  const std::size_t n = grid->size();
  std::vector<double> jump_at(n, 0.0);
  for (std::size_t k = 0; k < jumps.times.size(); ++k) {
    auto i = grid->find(jumps.times[k]);
    if (!i || *i == 0) throw GridMismatch("jump time is not a positive grid node");
    jump_at[*i] += jumps.sizes[k];
  }
  std::vector<double> left(n), right(n);
  std::vector<double> cum_left(n), cum_right(n);
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cum_left[i] = cum;
    cum += jump_at[i];
    cum_right[i] = cum;
    left[i] = initial_value + cum_left[i];
    right[i] = initial_value + cum_right[i];
  }
  ScalarPath path(grid, std::move(left), std::move(right));
  if (!spec.compensated) {
    return path.with_decomposition({ScalarPath::constant(grid, 0.0), ScalarPath::constant(grid, 0.0),
                                    ScalarPath(grid, cum_left, cum_right)});
  }
  const double slope = spec.rate * spec.jump_mean;
  std::vector<double> comp(n), mleft(n), mright(n);
  for (std::size_t i = 0; i < n; ++i) {
    comp[i] = slope * (*grid)[i];
    mleft[i] = cum_left[i] - comp[i];
    mright[i] = cum_right[i] - comp[i];
  }
  return path.with_decomposition({ScalarPath::constant(grid, 0.0),
                                  ScalarPath(grid, std::move(mleft), std::move(mright)),
                                  ScalarPath::continuous(grid, std::move(comp))});
}

PoissonSample gen_compound_poisson(const GridSpec& grid, std::uint64_t seed,
                                   const CompoundPoissonSpec& spec, double initial_value,
                                   std::size_t max_jumps) {
  JumpDraw jumps = draw_jumps(grid.horizon, seed, spec, max_jumps);
  GridPtr fused = TimeGrid::build(grid.horizon, grid.base_steps, jumps.times);
  ScalarPath path = compound_poisson_path(fused, jumps, spec, initial_value);
  return {std::move(path), std::move(jumps.times)};
}

ScalarPath gen_drift(const GridPtr& grid, const DriftSpec& spec, double initial_value) {
  const std::size_t n = grid->size();
  std::vector<double> fv(n), whole(n);
  for (std::size_t i = 0; i < n; ++i) {
    fv[i] = i == 0 ? 0.0 : spec.integral((*grid)[i]);
    whole[i] = initial_value + fv[i];
  }
  ScalarPath path = ScalarPath::continuous(grid, std::move(whole));
  return path.with_decomposition({ScalarPath::constant(grid, 0.0), ScalarPath::constant(grid, 0.0),
                                  ScalarPath::continuous(grid, std::move(fv))});
}

void NoiseModel::validate() const {
  require(std::isfinite(grid.horizon) && grid.horizon > 0.0, "horizon must be positive");
  require(grid.base_steps >= 1, "base_steps must be at least 1");
  require(!coordinates.empty(), "at least one noise coordinate is required");
  for (const NoiseSpec& spec : coordinates) spec.validate(grid.horizon);
}

std::vector<ScalarPath> generate_scenario_refined(const NoiseModel& model, const Ensemble& ensemble,
                                                  std::size_t scenario, std::size_t refine,
                                                  std::uint64_t stream) {
  if (refine == 0) throw std::invalid_argument("refinement factor must be positive");
  const std::uint64_t master = stream == 0 ? ensemble.master_seed : derive_seed(ensemble.master_seed, stream);
  const std::size_t d = model.coordinates.size();

  std::vector<JumpDraw> draws(d);
  std::vector<double> all_times;
  for (std::size_t c = 0; c < d; ++c) {
    if (const auto* p = std::get_if<CompoundPoissonSpec>(&model.coordinates[c].kind)) {
      draws[c] = draw_jumps(model.grid.horizon, stream_seed(master, scenario, c, StreamPurpose::JumpTimes),
                            *p, model.max_jumps);
      all_times.insert(all_times.end(), draws[c].times.begin(), draws[c].times.end());
    }
  }
  GridPtr grid = TimeGrid::build(model.grid.horizon, model.grid.base_steps * refine, all_times);

  std::vector<ScalarPath> paths;
  paths.reserve(d);
  for (std::size_t c = 0; c < d; ++c) {
    const NoiseSpec& spec = model.coordinates[c];
    paths.push_back(std::visit(
        Overloaded{
            [&](const BrownianSpec& b) {
              return gen_brownian(grid, stream_seed(master, scenario, c, StreamPurpose::Brownian), b.vol,
                                  spec.initial_value);
            },
            [&](const CompoundPoissonSpec& p) {
              return compound_poisson_path(grid, draws[c], p, spec.initial_value);
            },
            [&](const DriftSpec& dr) { return gen_drift(grid, dr, spec.initial_value); },
        },
        spec.kind));
  }
  return paths;
}

std::vector<ScalarPath> generate_scenario(const NoiseModel& model, const Ensemble& ensemble,
                                          std::size_t scenario, std::uint64_t stream) {
  return generate_scenario_refined(model, ensemble, scenario, 1, stream);
}

}  // namespace cylint
