#include "spshare/scenario.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "spshare/table_io.hpp"

namespace spshare {

const char* to_string(Mode mode) {
  switch (mode) {
  case Mode::kCompetition:
    return "competition";
  case Mode::kCooperation:
    return "cooperation";
  case Mode::kBoth:
    return "both";
  }
  return "unknown";
}

MarketConfig ScenarioFile::config() const {
  if (!w) {
    throw ScenarioError("scenario '" + name +
                        "' has no single bandwidth (key w)");
  }
  MarketConfig cfg{size_a, size_ab, size_b, *w};
  cfg.validate();
  return cfg;
}

SweepSpec ScenarioFile::sweep_spec() const {
  if (!range) {
    throw ScenarioError("scenario '" + name +
                        "' has no sweep range (keys w_min/w_max/w_step)");
  }
  SweepSpec spec;
  spec.size_a = size_a;
  spec.size_ab = size_ab;
  spec.size_b = size_b;
  spec.w_min = range->w_min;
  spec.w_max = range->w_max;
  spec.w_step = range->w_step;
  spec.include_cooperation = mode != Mode::kCompetition;
  spec.validate();
  return spec;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view value, int line_no) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ScenarioError("line " + std::to_string(line_no) +
                        ": expected a number, got '" + std::string(value) +
                        "'");
  }
  return out;
}

} // namespace

ScenarioFile parse_scenario(std::string_view text) {
  std::map<std::string, std::string, std::less<>> values;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    std::string_view line =
        eol == std::string_view::npos ? text : text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    line = trim(line);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError("line " + std::to_string(line_no) +
                          ": expected key=value");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    static constexpr const char* kKnown[] = {"name",  "m_a",   "m_ab",
                                             "m_b",   "w",     "w_min",
                                             "w_max", "w_step", "mode"};
    bool known = false;
    for (const char* k : kKnown) {
      if (key == k) known = true;
    }
    if (!known) {
      throw ScenarioError("line " + std::to_string(line_no) +
                          ": unknown key '" + key + "'");
    }
    if (!values.emplace(key, value).second) {
      throw ScenarioError("line " + std::to_string(line_no) +
                          ": duplicate key '" + key + "'");
    }
    // Remember the line for number diagnostics.
    values["#line:" + key] = std::to_string(line_no);
  }

  const auto line_of = [&](const std::string& key) {
    const auto it = values.find("#line:" + key);
    return it == values.end() ? 0 : std::stoi(it->second);
  };
  const auto require = [&](const char* key) -> const std::string& {
    const auto it = values.find(key);
    if (it == values.end()) {
      throw ScenarioError(std::string("missing required key '") + key + "'");
    }
    return it->second;
  };

  ScenarioFile out;
  out.name = require("name");
  if (out.name.empty()) {
    throw ScenarioError("name must not be empty");
  }
  out.size_a = parse_number(require("m_a"), line_of("m_a"));
  out.size_ab = parse_number(require("m_ab"), line_of("m_ab"));
  out.size_b = parse_number(require("m_b"), line_of("m_b"));
  if (out.size_a < 0.0 || out.size_ab < 0.0 || out.size_b < 0.0) {
    throw ScenarioError("sub-market sizes must be nonnegative");
  }
  const double sum = out.size_a + out.size_ab + out.size_b;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ScenarioError(
        "m_a + m_ab + m_b must equal 1 (total market size is normalized), "
        "got " +
        std::to_string(sum));
  }
  // Snap onto the normalization exactly so downstream checks at tighter
  // tolerance always pass.
  out.size_a /= sum;
  out.size_ab /= sum;
  out.size_b /= sum;

  const bool has_w = values.count("w") > 0;
  const bool has_range = values.count("w_min") > 0 ||
                         values.count("w_max") > 0 ||
                         values.count("w_step") > 0;
  if (has_w && has_range) {
    throw ScenarioError("specify either w or w_min/w_max/w_step, not both");
  }
  if (!has_w && !has_range) {
    throw ScenarioError("specify either w or w_min/w_max/w_step");
  }
  if (has_w) {
    out.w = parse_number(values.at("w"), line_of("w"));
    if (!(*out.w > 0.0)) {
      throw ScenarioError("w must be positive");
    }
  } else {
    SweepRange range;
    range.w_min = parse_number(require("w_min"), line_of("w_min"));
    range.w_max = parse_number(require("w_max"), line_of("w_max"));
    range.w_step = parse_number(require("w_step"), line_of("w_step"));
    if (!(range.w_min > 0.0)) {
      throw ScenarioError("w_min must be positive");
    }
    if (range.w_min > range.w_max) {
      throw ScenarioError("w_min must not exceed w_max");
    }
    if (!(range.w_step > 0.0)) {
      throw ScenarioError("w_step must be positive");
    }
    out.range = range;
  }

  const std::string& mode = require("mode");
  if (mode == "competition") {
    out.mode = Mode::kCompetition;
  } else if (mode == "cooperation") {
    out.mode = Mode::kCooperation;
  } else if (mode == "both") {
    out.mode = Mode::kBoth;
  } else {
    throw ScenarioError("mode must be competition, cooperation or both, got '" +
                        mode + "'");
  }
  return out;
}

std::string canonical_text(const ScenarioFile& scenario) {
  std::string out;
  out += "name=" + scenario.name + "\n";
  out += "m_a=" + format_double(scenario.size_a) + "\n";
  out += "m_ab=" + format_double(scenario.size_ab) + "\n";
  out += "m_b=" + format_double(scenario.size_b) + "\n";
  if (scenario.w) {
    out += "w=" + format_double(*scenario.w) + "\n";
  } else if (scenario.range) {
    out += "w_min=" + format_double(scenario.range->w_min) + "\n";
    out += "w_max=" + format_double(scenario.range->w_max) + "\n";
    out += "w_step=" + format_double(scenario.range->w_step) + "\n";
  }
  out += std::string("mode=") + to_string(scenario.mode) + "\n";
  return out;
}

const std::vector<ScenarioFile>& built_in_scenarios() {
  static const std::vector<ScenarioFile> kScenarios = [] {
    const SweepRange grid{0.01, 1.0, 0.01};
    std::vector<ScenarioFile> s(4);
    s[0].name = "symmetric_small_ab";
    s[0].size_a = 0.4;
    s[0].size_ab = 0.2;
    s[0].size_b = 0.4;
    s[1].name = "symmetric_large_ab";
    s[1].size_a = 0.2;
    s[1].size_ab = 0.6;
    s[1].size_b = 0.2;
    s[2].name = "asymmetric_small_ab";
    s[2].size_a = 0.5;
    s[2].size_ab = 0.2;
    s[2].size_b = 0.3;
    s[3].name = "asymmetric_large_ab";
    s[3].size_a = 0.3;
    s[3].size_ab = 0.5;
    s[3].size_b = 0.2;
    for (ScenarioFile& f : s) {
      f.range = grid;
      f.mode = Mode::kBoth;
    }
    return s;
  }();
  return kScenarios;
}

const ScenarioFile* find_builtin(std::string_view name) {
  if (name.size() > 4 && name.substr(name.size() - 4) == ".cfg") {
    name.remove_suffix(4);
  }
  for (const ScenarioFile& s : built_in_scenarios()) {
    if (s.name == name) {
      return &s;
    }
  }
  return nullptr;
}

} // namespace spshare
