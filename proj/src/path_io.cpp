#include "cylint/path_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace cylint {

namespace {

constexpr const char* kMagic = "# cylint-paths ";
constexpr const char* kColumns = "scenario,coord,node,t,left,right,part";

const char* part_tag(int part) {
  switch (part) {
    case 0: return "whole";
    case 1: return "cmart";
    case 2: return "jmart";
    default: return "fv";
  }
}

int part_index(const std::string& tag) {
  if (tag == "whole") return 0;
  if (tag == "cmart") return 1;
  if (tag == "jmart") return 2;
  if (tag == "fv") return 3;
  throw std::runtime_error("unknown part tag '" + tag + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_rows(std::ostream& out, std::size_t scenario, std::size_t coord, const ScalarPath& z,
                int part) {
  const TimeGrid& g = *z.grid();
  for (std::size_t i = 0; i < z.size(); ++i) {
    out << scenario << ',' << coord << ',' << i << ',' << fmt(g[i]) << ',' << fmt(z.left(i)) << ','
        << fmt(z.right(i)) << ',' << part_tag(part) << '\n';
  }
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

std::size_t parse_index(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad index '" + s + "'");
  }
  return v;
}

struct Columns {
  std::vector<double> t, left, right;
};

}  // namespace

void write_paths_csv(std::ostream& out, std::span<const ScenarioPaths> scenarios) {
  nlohmann::json header = {{"format", "cylint-paths"},
                           {"version", kPathFormatVersion},
                           {"columns", {"scenario", "coord", "node", "t", "left", "right", "part"}},
                           {"scenarios", scenarios.size()}};
  out << kMagic << header.dump() << '\n' << kColumns << '\n';
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (std::size_t c = 0; c < scenarios[s].size(); ++c) {
      const ScalarPath& z = scenarios[s][c];
      write_rows(out, s, c, z, 0);
      if (z.has_decomposition()) {
        const Decomposition& p = z.decomposition();
        write_rows(out, s, c, p.continuous_martingale, 1);
        write_rows(out, s, c, p.jump_martingale, 2);
        write_rows(out, s, c, p.finite_variation, 3);
      }
    }
  }
}

std::vector<ScenarioPaths> read_paths_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kMagic, 0) != 0) {
    throw std::runtime_error("missing cylint-paths header");
  }
  const auto header = nlohmann::json::parse(line.substr(std::string(kMagic).size()));
  if (header.at("version").get<int>() != kPathFormatVersion) {
    throw std::runtime_error("unsupported path format version");
  }
  if (!std::getline(in, line) || line != kColumns) throw std::runtime_error("bad column header");

  // scenario -> coord -> part -> columns
  std::map<std::size_t, std::map<std::size_t, std::map<int, Columns>>> data;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw std::runtime_error("line " + std::to_string(line_no) + ": expected 7 fields");
    const std::size_t s = parse_index(f[0], line_no), c = parse_index(f[1], line_no);
    const std::size_t node = parse_index(f[2], line_no);
    Columns& col = data[s][c][part_index(f[6])];
    if (node != col.t.size()) throw std::runtime_error("line " + std::to_string(line_no) + ": nodes out of order");
    col.t.push_back(parse_double(f[3], line_no));
    col.left.push_back(parse_double(f[4], line_no));
    col.right.push_back(parse_double(f[5], line_no));
  }

  std::vector<ScenarioPaths> out;
  for (auto& [s, coords] : data) {
    if (s != out.size()) throw std::runtime_error("scenario ids must be contiguous");
    ScenarioPaths paths;
    GridPtr grid;
    for (auto& [c, parts] : coords) {
      if (c != paths.size()) throw std::runtime_error("coordinate ids must be contiguous");
      auto whole = parts.find(0);
      if (whole == parts.end()) throw std::runtime_error("coordinate without a 'whole' part");
      if (!grid) grid = TimeGrid::from_nodes(whole->second.t);
      if (whole->second.t != std::vector<double>(grid->nodes().begin(), grid->nodes().end())) {
        throw std::runtime_error("coordinates of one scenario must share a grid");
      }
      auto make = [&](Columns& col) { return ScalarPath(grid, std::move(col.left), std::move(col.right)); };
      ScalarPath z = make(whole->second);
      if (parts.size() == 4) {
        z = z.with_decomposition({make(parts[1]), make(parts[2]), make(parts[3])});
      } else if (parts.size() != 1) {
        throw std::runtime_error("partial decomposition in path file");
      }
      paths.push_back(std::move(z));
    }
    out.push_back(std::move(paths));
  }
  return out;
}

}  // namespace cylint
