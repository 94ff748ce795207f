#include "cylint/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cylint/cli/checks.hpp"

namespace cylint::cli {

namespace {

std::string positioned(const std::string& message, std::size_t line, std::size_t column) {
  if (line == 0) return message;
  return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) throw ConfigError(message, 0, 0);
  throw ConfigError(message, static_cast<std::size_t>(m.line) + 1, static_cast<std::size_t>(m.column) + 1);
}

void require_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) fail(node, what + " must be a mapping");
}

void reject_unknown(const YAML::Node& node, const std::string& what, std::initializer_list<const char*> allowed) {
  require_map(node, what);
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!keys.contains(key)) fail(kv.first, "unknown field '" + key + "' in " + what);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "bad value '" + node.Scalar() + "' for " + what);
  }
}

double real(const YAML::Node& node, const std::string& what) {
  const double v = scalar<double>(node, what);
  if (!std::isfinite(v)) fail(node, what + " must be finite");
  return v;
}

std::size_t count(const YAML::Node& node, const std::string& what) {
  const long long v = scalar<long long>(node, what);
  if (v < 0) fail(node, what + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::vector<double> reals(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence()) fail(node, what + " must be a list");
  std::vector<double> out;
  for (const auto& v : node) out.push_back(real(v, what + " entry"));
  return out;
}

bool has(const YAML::Node& node, const char* key) { return static_cast<bool>(node[key]); }

/// {index: value, ...}
FiniteSeq parse_phi(const YAML::Node& node, const std::string& what, std::size_t dimension) {
  require_map(node, what);
  std::vector<std::pair<std::size_t, double>> entries;
  for (const auto& kv : node) {
    const std::size_t j = count(kv.first, what + " index");
    if (j >= dimension) {
      fail(kv.first, what + " index " + std::to_string(j) + " outside dimension " + std::to_string(dimension));
    }
    entries.emplace_back(j, real(kv.second, what + " value"));
  }
  return FiniteSeq(std::move(entries));
}

void check_times(const YAML::Node& node, const std::vector<double>& times, double horizon, const std::string& what) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] <= 0.0 || times[k] > horizon) fail(node, what + " must lie in (0, horizon]");
    if (k > 0 && times[k] < times[k - 1]) fail(node, what + " must be nondecreasing");
  }
}

NoiseSpec parse_noise(const YAML::Node& node, double horizon) {
  require_map(node, "noise entry");
  if (!has(node, "kind")) fail(node, "noise entry needs a kind");
  const std::string kind = scalar<std::string>(node["kind"], "noise kind");
  NoiseSpec spec;
  if (has(node, "initial_value")) spec.initial_value = real(node["initial_value"], "initial_value");
  if (kind == "brownian") {
    reject_unknown(node, "brownian noise", {"kind", "initial_value", "vol"});
    BrownianSpec b;
    if (has(node, "vol")) b.vol = real(node["vol"], "vol");
    if (b.vol < 0.0) fail(node["vol"], "vol must be >= 0");
    spec.kind = b;
  } else if (kind == "compound_poisson") {
    reject_unknown(node, "compound_poisson noise",
                   {"kind", "initial_value", "rate", "jump_mean", "jump_law", "compensated"});
    CompoundPoissonSpec p;
    if (has(node, "rate")) p.rate = real(node["rate"], "rate");
    if (p.rate < 0.0) fail(node["rate"], "rate must be >= 0");
    if (has(node, "jump_mean")) p.jump_mean = real(node["jump_mean"], "jump_mean");
    if (has(node, "compensated")) p.compensated = scalar<bool>(node["compensated"], "compensated");
    if (has(node, "jump_law")) {
      const YAML::Node law = node["jump_law"];
      if (law.IsScalar()) {
        const std::string name = law.Scalar();
        if (name != "constant") fail(law, "jump_law must be 'constant' or a gaussian mapping");
      } else {
        reject_unknown(law, "jump_law", {"kind", "sd"});
        const std::string name = has(law, "kind") ? scalar<std::string>(law["kind"], "jump_law kind") : "";
        if (name == "gaussian") {
          p.jump_law.kind = JumpLaw::Kind::Gaussian;
          if (!has(law, "sd")) fail(law, "gaussian jump_law needs sd");
          p.jump_law.sd = real(law["sd"], "sd");
          if (p.jump_law.sd < 0.0) fail(law["sd"], "sd must be >= 0");
        } else if (name == "constant") {
          if (has(law, "sd")) fail(law["sd"], "constant jump_law takes no sd");
        } else {
          fail(law, "jump_law kind must be constant or gaussian");
        }
      }
    }
    spec.kind = p;
  } else if (kind == "drift") {
    reject_unknown(node, "drift noise", {"kind", "initial_value", "rate_function"});
    DriftSpec d;
    if (!has(node, "rate_function")) fail(node, "drift needs rate_function");
    const YAML::Node rf = node["rate_function"];
    if (rf.IsScalar()) {
      d.rate_function.push_back({horizon, real(rf, "rate_function")});
    } else {
      if (!rf.IsSequence()) fail(rf, "rate_function must be a number or a list of {until, rate}");
      for (const auto& seg : rf) {
        reject_unknown(seg, "rate_function segment", {"until", "rate"});
        if (!has(seg, "until") || !has(seg, "rate")) fail(seg, "rate_function segment needs until and rate");
        d.rate_function.push_back({real(seg["until"], "until"), real(seg["rate"], "rate")});
      }
    }
    spec.kind = d;
  } else {
    fail(node["kind"], "unknown noise kind '" + kind + "'");
  }
  try {
    spec.validate(horizon);
  } catch (const std::exception& e) {
    fail(node, e.what());
  }
  return spec;
}

std::vector<NoiseSpec> parse_noise_list(const YAML::Node& node, double horizon, const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) fail(node, what + " must be a nonempty list");
  std::vector<NoiseSpec> out;
  for (const auto& n : node) out.push_back(parse_noise(n, horizon));
  return out;
}

StepSpec parse_step(const YAML::Node& node, double horizon) {
  reject_unknown(node, "step process", {"breakpoints", "coefficients", "value_at_zero"});
  StepSpec s;
  if (!has(node, "breakpoints") || !has(node, "coefficients")) fail(node, "step process needs breakpoints and coefficients");
  s.breakpoints = reals(node["breakpoints"], "breakpoints");
  check_times(node["breakpoints"], s.breakpoints, horizon, "breakpoints");
  s.coefficients = reals(node["coefficients"], "coefficients");
  if (s.coefficients.size() != s.breakpoints.size()) fail(node, "step process needs one coefficient per breakpoint");
  if (has(node, "value_at_zero")) s.value_at_zero = real(node["value_at_zero"], "value_at_zero");
  return s;
}

IntegrandSpec parse_integrand(const YAML::Node& node, double horizon, std::size_t d) {
  require_map(node, "integrand");
  if (!has(node, "kind")) fail(node, "integrand needs a kind");
  const std::string kind = scalar<std::string>(node["kind"], "integrand kind");
  IntegrandSpec h;
  if (kind == "constant" || kind == "linear_in_t") {
    reject_unknown(node, kind + " integrand", {"kind", "phi"});
    h.kind = kind == "constant" ? IntegrandSpec::Kind::Constant : IntegrandSpec::Kind::LinearInT;
    if (!has(node, "phi")) fail(node, kind + " integrand needs phi");
    h.phi = parse_phi(node["phi"], "phi", d);
  } else if (kind == "left_limit") {
    reject_unknown(node, "left_limit integrand", {"kind", "primal"});
    h.kind = IntegrandSpec::Kind::LeftLimit;
    if (!has(node, "primal")) fail(node, "left_limit integrand needs primal noise");
    h.primal = parse_noise_list(node["primal"], horizon, "primal");
    if (h.primal.size() != d) fail(node["primal"], "primal must have one entry per noise coordinate");
  } else if (kind == "simple") {
    reject_unknown(node, "simple integrand", {"kind", "times", "coefficients", "at_zero"});
    h.kind = IntegrandSpec::Kind::Simple;
    if (!has(node, "times") || !has(node, "coefficients")) fail(node, "simple integrand needs times and coefficients");
    h.times = reals(node["times"], "times");
    check_times(node["times"], h.times, horizon, "times");
    const YAML::Node cs = node["coefficients"];
    if (!cs.IsSequence()) fail(cs, "coefficients must be a list");
    for (const auto& c : cs) h.coefficients.push_back(parse_phi(c, "coefficient", d));
    if (h.coefficients.size() != h.times.size()) fail(cs, "simple integrand needs one coefficient per time");
    if (has(node, "at_zero")) h.at_zero = parse_phi(node["at_zero"], "at_zero", d);
  } else if (kind == "elementary") {
    reject_unknown(node, "elementary integrand", {"kind", "terms"});
    h.kind = IntegrandSpec::Kind::Elementary;
    if (!has(node, "terms") || !node["terms"].IsSequence()) fail(node, "elementary integrand needs a list of terms");
    for (const auto& t : node["terms"]) {
      reject_unknown(t, "elementary term", {"step", "phi"});
      if (!has(t, "step") || !has(t, "phi")) fail(t, "elementary term needs step and phi");
      h.terms.emplace_back(parse_step(t["step"], horizon), parse_phi(t["phi"], "phi", d));
    }
  } else {
    fail(node["kind"], "unknown integrand kind '" + kind + "'");
  }
  return h;
}

ExperimentConfig parse_root(const YAML::Node& root) {
  reject_unknown(root, "config", {"grid", "noise", "integrand", "partitions", "ensemble", "checks", "thresholds",
                                  "bracket", "fubini", "evolution"});
  ExperimentConfig c;
  if (!has(root, "grid")) fail(root, "missing grid");
  const YAML::Node grid = root["grid"];
  reject_unknown(grid, "grid", {"horizon", "base_steps", "max_jumps"});
  if (has(grid, "horizon")) c.grid.horizon = real(grid["horizon"], "horizon");
  if (c.grid.horizon <= 0.0) fail(has(grid, "horizon") ? grid["horizon"] : grid, "horizon must be > 0");
  if (has(grid, "base_steps")) c.grid.base_steps = count(grid["base_steps"], "base_steps");
  if (c.grid.base_steps == 0) fail(grid["base_steps"], "base_steps must be >= 1");
  if (has(grid, "max_jumps")) c.max_jumps = count(grid["max_jumps"], "max_jumps");

  if (!has(root, "noise")) fail(root, "missing noise");
  c.noise = parse_noise_list(root["noise"], c.grid.horizon, "noise");
  const std::size_t d = c.noise.size();

  if (!has(root, "integrand")) fail(root, "missing integrand");
  c.integrand = parse_integrand(root["integrand"], c.grid.horizon, d);

  if (has(root, "partitions")) {
    const YAML::Node p = root["partitions"];
    reject_unknown(p, "partitions", {"kind", "levels"});
    if (has(p, "kind")) {
      const std::string k = scalar<std::string>(p["kind"], "partitions kind");
      if (k == "dyadic") c.partitions.kind = PartitionKind::Dyadic;
      else if (k == "jittered") c.partitions.kind = PartitionKind::Jittered;
      else fail(p["kind"], "partitions kind must be dyadic or jittered");
    }
    if (has(p, "levels")) c.partitions.levels = count(p["levels"], "levels");
    if (c.partitions.levels == 0) fail(p, "levels must be >= 1");
  }

  if (has(root, "ensemble")) {
    const YAML::Node e = root["ensemble"];
    reject_unknown(e, "ensemble", {"scenarios", "master_seed"});
    if (has(e, "scenarios")) c.ensemble.scenarios = count(e["scenarios"], "scenarios");
    if (c.ensemble.scenarios == 0) fail(e, "scenarios must be >= 1");
    if (has(e, "master_seed")) c.ensemble.master_seed = scalar<std::uint64_t>(e["master_seed"], "master_seed");
  }

  if (!has(root, "checks")) fail(root, "missing checks");
  const YAML::Node checks = root["checks"];
  if (!checks.IsSequence() || checks.size() == 0) fail(checks, "checks must be a nonempty list");
  std::set<std::string> seen;
  for (const auto& n : checks) {
    const std::string name = scalar<std::string>(n, "check name");
    if (!find_check(name)) fail(n, "unknown check '" + name + "'");
    if (!seen.insert(name).second) fail(n, "check '" + name + "' listed twice");
    c.checks.push_back(name);
  }

  if (has(root, "thresholds")) {
    const YAML::Node t = root["thresholds"];
    reject_unknown(t, "thresholds", {"ucp_threshold", "slack", "node_tol"});
    if (has(t, "ucp_threshold")) c.thresholds.ucp_threshold = real(t["ucp_threshold"], "ucp_threshold");
    if (has(t, "slack")) c.thresholds.slack = real(t["slack"], "slack");
    if (has(t, "node_tol")) c.thresholds.node_tol = real(t["node_tol"], "node_tol");
    if (c.thresholds.ucp_threshold <= 0.0) fail(t, "ucp_threshold must be > 0");
    if (c.thresholds.slack < 1.0) fail(t, "slack must be >= 1");
    if (c.thresholds.node_tol <= 0.0) fail(t, "node_tol must be > 0");
  }

  if (has(root, "bracket")) {
    const YAML::Node b = root["bracket"];
    reject_unknown(b, "bracket", {"primal", "stop_level"});
    if (has(b, "primal")) {
      const std::string p = scalar<std::string>(b["primal"], "bracket primal");
      if (p == "mirror") c.bracket.primal = BracketSpec::Primal::Mirror;
      else if (p == "independent") c.bracket.primal = BracketSpec::Primal::Independent;
      else fail(b["primal"], "bracket primal must be mirror or independent");
    }
    if (has(b, "stop_level")) c.bracket.stop_level = real(b["stop_level"], "stop_level");
    if (c.bracket.stop_level < 0.0) fail(b["stop_level"], "stop_level must be >= 0");
  }

  if (has(root, "fubini")) {
    const YAML::Node f = root["fubini"];
    reject_unknown(f, "fubini", {"weights", "family"});
    if (has(f, "weights")) c.fubini.weights = reals(f["weights"], "weights");
    for (double w : c.fubini.weights) {
      if (w < 0.0) fail(f["weights"], "fubini weights must be >= 0");
    }
    if (c.fubini.weights.empty() || c.fubini.weights.size() > 5) fail(f, "fubini needs 1 to 5 weights");
    if (has(f, "family")) {
      if (!f["family"].IsSequence()) fail(f["family"], "family must be a list of integrands");
      for (const auto& h : f["family"]) {
        c.fubini.family.push_back(parse_integrand(h, c.grid.horizon, d));
        if (c.fubini.family.back().kind == IntegrandSpec::Kind::LeftLimit) fail(h, "fubini family cannot use left_limit");
      }
      if (c.fubini.family.size() != c.fubini.weights.size()) fail(f["family"], "family needs one integrand per weight");
    } else if (c.fubini.weights.size() != 1) {
      fail(f, "several weights need an explicit family");
    }
  }

  if (has(root, "evolution")) {
    const YAML::Node ev = root["evolution"];
    reject_unknown(ev, "evolution", {"eigenvalues", "eta", "phi"});
    if (has(ev, "eigenvalues")) {
      const YAML::Node e = ev["eigenvalues"];
      if (e.IsScalar()) {
        if (e.Scalar() != "heat") fail(e, "eigenvalues must be 'heat' or a list");
      } else {
        c.evolution.eigenvalues = reals(e, "eigenvalues");
        if (c.evolution.eigenvalues.size() != d) fail(e, "eigenvalues need one entry per noise coordinate");
      }
    }
    if (has(ev, "eta")) {
      c.evolution.eta = reals(ev["eta"], "eta");
      if (c.evolution.eta.size() > d) fail(ev["eta"], "eta longer than the noise dimension");
    }
    if (has(ev, "phi")) c.evolution.phi = parse_phi(ev["phi"], "phi", d);
  }
  return c;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(positioned(message, line, column)), bare_(message), line_(line), column_(column) {}

const char* to_string(IntegrandSpec::Kind kind) {
  switch (kind) {
    case IntegrandSpec::Kind::Constant: return "constant";
    case IntegrandSpec::Kind::LinearInT: return "linear_in_t";
    case IntegrandSpec::Kind::LeftLimit: return "left_limit";
    case IntegrandSpec::Kind::Simple: return "simple";
    case IntegrandSpec::Kind::Elementary: return "elementary";
  }
  return "?";
}

NoiseModel ExperimentConfig::noise_model() const { return NoiseModel{grid, noise, max_jumps}; }

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, static_cast<std::size_t>(e.mark.line) + 1, static_cast<std::size_t>(e.mark.column) + 1);
  }
  if (!root || root.IsNull()) throw ConfigError("empty config", 0, 0);
  ExperimentConfig c = parse_root(root);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string(), 0, 0);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate(const ExperimentConfig& c) {
  if (!(c.grid.horizon > 0.0) || !std::isfinite(c.grid.horizon)) throw ConfigError("horizon must be > 0", 0, 0);
  if (c.grid.base_steps == 0) throw ConfigError("base_steps must be >= 1", 0, 0);
  if (c.ensemble.scenarios == 0) throw ConfigError("scenarios must be >= 1", 0, 0);
  if (c.noise.empty()) throw ConfigError("noise must be nonempty", 0, 0);
  try {
    c.noise_model().validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what(), 0, 0);
  }
}

namespace {

nlohmann::json phi_json(const FiniteSeq& phi) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : phi.entries()) j[std::to_string(k)] = v;
  return j;
}

nlohmann::json noise_json(const NoiseSpec& n) {
  nlohmann::json j;
  if (const auto* b = std::get_if<BrownianSpec>(&n.kind)) {
    j = {{"kind", "brownian"}, {"vol", b->vol}};
  } else if (const auto* p = std::get_if<CompoundPoissonSpec>(&n.kind)) {
    nlohmann::json law = p->jump_law.kind == JumpLaw::Kind::Gaussian
                             ? nlohmann::json{{"kind", "gaussian"}, {"sd", p->jump_law.sd}}
                             : nlohmann::json{{"kind", "constant"}};
    j = {{"kind", "compound_poisson"}, {"rate", p->rate}, {"jump_mean", p->jump_mean},
         {"jump_law", law}, {"compensated", p->compensated}};
  } else {
    nlohmann::json segs = nlohmann::json::array();
    for (const RateSegment& s : std::get<DriftSpec>(n.kind).rate_function) {
      segs.push_back({{"until", s.until}, {"rate", s.rate}});
    }
    j = {{"kind", "drift"}, {"rate_function", segs}};
  }
  j["initial_value"] = n.initial_value;
  return j;
}

nlohmann::json integrand_json(const IntegrandSpec& h) {
  nlohmann::json j{{"kind", to_string(h.kind)}};
  switch (h.kind) {
    case IntegrandSpec::Kind::Constant:
    case IntegrandSpec::Kind::LinearInT:
      j["phi"] = phi_json(h.phi);
      break;
    case IntegrandSpec::Kind::LeftLimit: {
      nlohmann::json p = nlohmann::json::array();
      for (const NoiseSpec& n : h.primal) p.push_back(noise_json(n));
      j["primal"] = p;
      break;
    }
    case IntegrandSpec::Kind::Simple: {
      j["times"] = h.times;
      nlohmann::json cs = nlohmann::json::array();
      for (const FiniteSeq& a : h.coefficients) cs.push_back(phi_json(a));
      j["coefficients"] = cs;
      j["at_zero"] = phi_json(h.at_zero);
      break;
    }
    case IntegrandSpec::Kind::Elementary: {
      nlohmann::json ts = nlohmann::json::array();
      for (const auto& [s, phi] : h.terms) {
        ts.push_back({{"step", {{"breakpoints", s.breakpoints}, {"coefficients", s.coefficients},
                                {"value_at_zero", s.value_at_zero}}},
                      {"phi", phi_json(phi)}});
      }
      j["terms"] = ts;
      break;
    }
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json noise = nlohmann::json::array();
  for (const NoiseSpec& n : c.noise) noise.push_back(noise_json(n));
  nlohmann::json family = nlohmann::json::array();
  for (const IntegrandSpec& h : c.fubini.family) family.push_back(integrand_json(h));
  nlohmann::json eigen = c.evolution.eigenvalues.empty() ? nlohmann::json("heat") : nlohmann::json(c.evolution.eigenvalues);
  return {
      {"grid", {{"horizon", c.grid.horizon}, {"base_steps", c.grid.base_steps}, {"max_jumps", c.max_jumps}}},
      {"noise", noise},
      {"integrand", integrand_json(c.integrand)},
      {"partitions", {{"kind", c.partitions.kind == PartitionKind::Dyadic ? "dyadic" : "jittered"},
                      {"levels", c.partitions.levels}}},
      {"ensemble", {{"scenarios", c.ensemble.scenarios}, {"master_seed", c.ensemble.master_seed}}},
      {"checks", c.checks},
      {"thresholds", {{"ucp_threshold", c.thresholds.ucp_threshold}, {"slack", c.thresholds.slack},
                      {"node_tol", c.thresholds.node_tol}}},
      {"bracket", {{"primal", c.bracket.primal == BracketSpec::Primal::Mirror ? "mirror" : "independent"},
                   {"stop_level", c.bracket.stop_level}}},
      {"fubini", {{"weights", c.fubini.weights}, {"family", family}}},
      {"evolution", {{"eigenvalues", eigen}, {"eta", c.evolution.eta}, {"phi", phi_json(c.evolution.phi)}}},
  };
}

}  // namespace cylint::cli
