#pragma once

// Experiment configuration: YAML text, validated before any computation.
// Field reference in docs/formats.md.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylint/cylsemi.hpp"
#include "cylint/integrands.hpp"
#include "cylint/noise.hpp"

namespace cylint::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Parse or validation failure. line and column are 1-based; 0 when the
/// error has no position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  /// "message" prefixed with "line L, column C: " when positioned.
  const std::string& bare_message() const { return bare_; }

 private:
  std::string bare_;
  std::size_t line_;
  std::size_t column_;
};

/// Scalar step process with breakpoint times in (0, horizon].
struct StepSpec {
  std::vector<double> breakpoints;
  std::vector<double> coefficients;
  double value_at_zero = 0.0;
};

struct IntegrandSpec {
  enum class Kind { Constant, LinearInT, LeftLimit, Simple, Elementary };
  Kind kind = Kind::Constant;
  /// constant, linear_in_t
  FiniteSeq phi;
  /// left_limit: coordinate noises of the primal process Y
  std::vector<NoiseSpec> primal;
  /// simple: τ_1..τ_{N+1} as times and A_0..A_N
  std::vector<double> times;
  std::vector<FiniteSeq> coefficients;
  FiniteSeq at_zero;
  /// elementary
  std::vector<std::pair<StepSpec, FiniteSeq>> terms;
};

const char* to_string(IntegrandSpec::Kind kind);

struct PartitionSpec {
  PartitionKind kind = PartitionKind::Dyadic;
  std::size_t levels = 6;
};

struct EnsembleSpec {
  std::size_t scenarios = 64;
  std::uint64_t master_seed = 0;
};

struct Thresholds {
  double ucp_threshold = 0.02;
  double slack = 1.25;
  double node_tol = 1e-10;
};

struct BracketSpec {
  enum class Primal { Mirror, Independent };
  Primal primal = Primal::Mirror;
  /// Stop τ = first node with |X(e_0)| >= stop_level.
  double stop_level = 0.5;
};

struct FubiniSpec {
  std::vector<double> weights{1.0};
  /// One integrand per point; empty means the experiment integrand.
  std::vector<IntegrandSpec> family;
};

struct EvolutionSpec {
  /// Empty means the heat rule λ_k = -k².
  std::vector<double> eigenvalues;
  /// Missing entries are 0.
  std::vector<double> eta;
  /// Empty means Σ_k e_k.
  FiniteSeq phi;
};

struct ExperimentConfig {
  GridSpec grid;
  std::size_t max_jumps = kDefaultMaxJumps;
  std::vector<NoiseSpec> noise;
  IntegrandSpec integrand;
  PartitionSpec partitions;
  EnsembleSpec ensemble;
  std::vector<std::string> checks;
  Thresholds thresholds;
  BracketSpec bracket;
  FubiniSpec fubini;
  EvolutionSpec evolution;

  std::size_t dimension() const { return noise.size(); }
  NoiseModel noise_model() const;
};

/// Parses and validates. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Re-checks the invariants (used after command-line overrides).
void validate(const ExperimentConfig& config);

/// Canonical echo of every field, defaults included.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace cylint::cli
