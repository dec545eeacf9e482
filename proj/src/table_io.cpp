#include "spshare/table_io.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace spshare {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(),
                                       value);
  if (ec != std::errc{}) {
    throw std::runtime_error("number formatting failed");
  }
  return std::string(buf.data(), ptr);
}

namespace {

const char* const kResultColumns[] = {
    "x1_a", "x1_ab", "x2_ab", "x2_b", "p_a",  "p_ab",     "p_b",
    "l_a",  "l_ab",  "l_b",   "r1",   "r2",   "cs_a",     "cs_ab",
    "cs_b", "cs_total", "welfare", "regime",
};

void append_result_cells(std::string& out, const EquilibriumResult& res) {
  const Allocation& x = res.alloc;
  const MarketOutcome& o = res.outcome;
  const double cells[] = {
      x.sp1_dedicated, x.sp1_overlap,  x.sp2_overlap, x.sp2_dedicated,
      o.price.a,       o.price.ab,     o.price.b,     o.latency.a,
      o.latency.ab,    o.latency.b,    o.revenue.sp1, o.revenue.sp2,
      o.surplus.a,     o.surplus.ab,   o.surplus.b,   o.surplus.total,
      o.welfare,
  };
  for (double c : cells) {
    out += ',';
    out += format_double(c);
  }
  out += ',';
  out += to_string(res.regime);
}

const EquilibriumResult& cooperation_of(const SweepRow& row) {
  if (!row.cooperation) {
    throw std::invalid_argument(
        "sweep was built without the cooperation counterfactual");
  }
  return *row.cooperation;
}

} // namespace

std::string emit_sweep_csv(const SweepTable& table, Mode mode) {
  std::string out = "W";
  for (const char* col : kResultColumns) {
    out += ',';
    out += col;
  }
  if (mode == Mode::kBoth) {
    for (const char* col : kResultColumns) {
      out += ",coop_";
      out += col;
    }
  }
  out += '\n';

  for (const SweepRow& row : table.rows) {
    out += format_double(row.w);
    switch (mode) {
    case Mode::kCompetition:
      append_result_cells(out, row.competition);
      break;
    case Mode::kCooperation:
      append_result_cells(out, cooperation_of(row));
      break;
    case Mode::kBoth:
      append_result_cells(out, row.competition);
      append_result_cells(out, cooperation_of(row));
      break;
    }
    out += '\n';
  }
  return out;
}

namespace {

void append_json_fields(std::string& out, const EquilibriumResult& res,
                        const char* prefix) {
  const Allocation& x = res.alloc;
  const MarketOutcome& o = res.outcome;
  const std::pair<const char*, double> numbers[] = {
      {"x1_a", x.sp1_dedicated}, {"x1_ab", x.sp1_overlap},
      {"x2_ab", x.sp2_overlap},  {"x2_b", x.sp2_dedicated},
      {"p_a", o.price.a},        {"p_ab", o.price.ab},
      {"p_b", o.price.b},        {"l_a", o.latency.a},
      {"l_ab", o.latency.ab},    {"l_b", o.latency.b},
      {"r1", o.revenue.sp1},     {"r2", o.revenue.sp2},
      {"cs_a", o.surplus.a},     {"cs_ab", o.surplus.ab},
      {"cs_b", o.surplus.b},     {"cs_total", o.surplus.total},
      {"welfare", o.welfare},
  };
  for (const auto& [key, value] : numbers) {
    out += ",\"";
    out += prefix;
    out += key;
    out += "\":";
    out += format_double(value);
  }
  out += ",\"";
  out += prefix;
  out += "regime\":\"";
  out += to_string(res.regime);
  out += "\",\"";
  out += prefix;
  out += "method\":\"";
  out += to_string(res.method);
  out += "\",\"";
  out += prefix;
  out += "residual\":";
  out += format_double(res.residual);
  out += ",\"";
  out += prefix;
  out += "iterations\":";
  out += std::to_string(res.iterations);
}

} // namespace

std::string emit_solve_json(double w, const EquilibriumResult& primary,
                            const EquilibriumResult* coop) {
  std::string out = "{\"W\":";
  out += format_double(w);
  append_json_fields(out, primary, "");
  if (coop != nullptr) {
    append_json_fields(out, *coop, "coop_");
  }
  out += "}\n";
  return out;
}

} // namespace spshare
