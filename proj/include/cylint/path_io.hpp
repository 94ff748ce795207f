#pragma once

// Columnar path files. See docs/formats.md for the layout.

#include <iosfwd>
#include <span>
#include <vector>

#include "cylint/grid_paths.hpp"

namespace cylint {

inline constexpr int kPathFormatVersion = 1;

/// One scenario: coordinate paths sharing a grid.
using ScenarioPaths = std::vector<ScalarPath>;

void write_paths_csv(std::ostream& out, std::span<const ScenarioPaths> scenarios);
/// Inverse of write_paths_csv. Throws std::runtime_error on malformed input.
std::vector<ScenarioPaths> read_paths_csv(std::istream& in);

}  // namespace cylint
