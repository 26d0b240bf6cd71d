#include "entangle/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace entangle {

namespace {

constexpr std::array<const char*, 4> kCellKeys = {"++", "+-", "-+", "--"};

// -0.0 prints as "-0.0"; reports use +0.
double tidy(double v) { return v == 0.0 ? 0.0 : v; }

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

CsvCell classify_field(std::string_view raw) {
  if (all_digits(raw)) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec == std::errc() && ptr == raw.data() + raw.size()) return v;
  }
  if (!raw.empty()) {
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), d);
    if (ec == std::errc() && ptr == raw.data() + raw.size() && std::isfinite(d)) return d;
  }
  return std::string(raw);
}

}  // namespace

std::optional<std::string> rational_string(double value, int max_denominator) {
  if (!std::isfinite(value)) return std::nullopt;
  for (int d = 1; d <= max_denominator; ++d) {
    const double n = std::round(value * d);
    if (std::abs(value - n / d) <= 1e-14) {
      const long long num = static_cast<long long>(n);
      if (d == 1) return std::to_string(num);
      return std::to_string(num) + "/" + std::to_string(d);
    }
  }
  return std::nullopt;
}

json table_to_json(const ExperimentTable& table) {
  json out = json::object();
  for (const Setting s : kAllSettings) {
    const JointDistribution& row = table.row(s);
    json cells = json::object();
    for (std::size_t c = 0; c < 4; ++c) cells[kCellKeys[c]] = tidy(row.cells()[c]);
    cells["E"] = tidy(correlation(row));
    out[std::string(s.label())] = std::move(cells);
  }
  return out;
}

json table_exact_json(const ExperimentTable& table) {
  json out = json::object();
  for (const Setting s : kAllSettings) {
    json cells = json::object();
    for (std::size_t c = 0; c < 4; ++c) {
      const auto r = rational_string(table.row(s).cells()[c]);
      cells[kCellKeys[c]] = r ? json(*r) : json(nullptr);
    }
    out[std::string(s.label())] = std::move(cells);
  }
  return out;
}

json counts_to_json(const SettingCounts& counts) {
  json out = json::object();
  for (const Setting s : kAllSettings) {
    json cells = json::object();
    for (std::size_t c = 0; c < 4; ++c) cells[kCellKeys[c]] = counts[s.index()][c];
    out[std::string(s.label())] = std::move(cells);
  }
  return out;
}

json chsh_to_json(const ChshQuantities& q) {
  return {{"A", tidy(q.a_chsh)}, {"B", tidy(q.b_chsh)}, {"C", tidy(q.c_chsh)}, {"D", tidy(q.d_chsh)}};
}

json bell_to_json(const BellReport& report) {
  json verdicts = json::object();
  for (const auto& v : report.verdicts)
    verdicts[std::string(1, v.quantity)] = {{"violated", v.violated}, {"margin", tidy(v.margin)}};
  return {{"bound", report.bound}, {"any_violated", report.any_violated()}, {"quantities", std::move(verdicts)}};
}

json marginals_to_json(const MarginalReport& report) {
  json list = json::array();
  for (const auto& r : report.residuals) {
    list.push_back({{"comparison", r.label()},
                    {"side", r.side == Side::alice ? "alice" : "bob"},
                    {"setting", r.side == Side::alice ? (r.own_setting == 0 ? "A" : "A'") : (r.own_setting == 0 ? "B" : "B'")},
                    {"outcome", std::string(1, outcome_symbol(r.outcome))},
                    {"with_unprimed_partner", tidy(r.with_unprimed_partner)},
                    {"with_primed_partner", tidy(r.with_primed_partner)},
                    {"residual", tidy(r.residual)}});
  }
  return {{"tolerance", report.tolerance},
          {"max_abs_residual", tidy(report.max_abs_residual)},
          {"violated", report.violated()},
          {"residuals", std::move(list)}};
}

json trace_to_json(const MicroTrace& trace, const OutcomePair& outcome) {
  json strings = json::array();
  for (const auto& s : trace.strings) {
    json j = {{"color", s.color == Color::white ? "white" : "black"},
              {"pulled_by_alice", s.pulled_by_alice},
              {"pulled_by_bob", s.pulled_by_bob},
              {"break_drawn", s.break_drawn}};
    j["break_fraction"] = s.break_fraction ? json(*s.break_fraction) : json(nullptr);
    j["alice_length"] = s.alice_length ? json(*s.alice_length) : json(nullptr);
    j["bob_length"] = s.bob_length ? json(*s.bob_length) : json(nullptr);
    strings.push_back(std::move(j));
  }
  json out = {{"setting", std::string(trace.setting.label())},
              {"outcome", outcome.label()},
              {"length", trace.length},
              {"pre_broken", trace.pre_broken},
              {"strings", std::move(strings)}};
  if (trace.selections)
    out["selections"] = {{"alice", (*trace.selections)[0] + 1}, {"bob", (*trace.selections)[1] + 1}};
  return out;
}

json vec3_to_json(const Vec3& v) { return json::array({tidy(v[0]), tidy(v[1]), tidy(v[2])}); }

json bloch15_to_json(const BlochVector15& r) {
  json flat = json::array();
  for (double x : r.components()) flat.push_back(tidy(x));
  json conn = json::array();
  for (double x : r.r_conn()) conn.push_back(tidy(x));
  return {{"r15", std::move(flat)},
          {"r_alice", vec3_to_json(r.r_alice())},
          {"r_bob", vec3_to_json(r.r_bob())},
          {"r_conn", std::move(conn)},
          {"norm", r.length()}};
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", tidy(value));
  return buf;
}

std::string emit_csv(const CsvDocument& doc) {
  auto write_string = [](std::string& out, const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
      out += s;
      return;
    }
    out += '"';
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    out += '"';
  };

  std::string out;
  for (std::size_t i = 0; i < doc.header.size(); ++i) {
    if (i) out += ',';
    write_string(out, doc.header[i]);
  }
  out += '\n';
  for (const auto& row : doc.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* s = std::get_if<std::string>(&row[i]))
        write_string(out, *s);
      else if (const auto* u = std::get_if<std::uint64_t>(&row[i]))
        out += std::to_string(*u);
      else
        out += format_double(std::get<double>(row[i]));
    }
    out += '\n';
  }
  return out;
}

CsvDocument parse_csv(std::string_view text) {
  std::vector<std::vector<CsvCell>> lines;
  std::vector<CsvCell> current;
  std::string field;
  bool quoted = false;
  bool in_quotes = false;
  bool any = false;
  std::size_t line_no = 1;

  auto finish_field = [&] {
    if (quoted)
      current.emplace_back(field);
    else
      current.push_back(classify_field(field));
    field.clear();
    quoted = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": stray quote");
      in_quotes = true;
      quoted = true;
    } else if (c == ',') {
      finish_field();
    } else if (c == '\n') {
      finish_field();
      lines.push_back(std::move(current));
      current.clear();
      any = false;
      ++line_no;
    } else if (c == '\r') {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": carriage return outside quotes");
    } else {
      if (quoted) throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": text after closing quote");
      field += c;
    }
  }
  if (in_quotes) throw std::invalid_argument("CSV: unterminated quoted field");
  if (any) {
    finish_field();
    lines.push_back(std::move(current));
  }
  if (lines.empty()) throw std::invalid_argument("CSV: missing header row");

  CsvDocument doc;
  for (auto& cell : lines.front()) {
    if (auto* s = std::get_if<std::string>(&cell))
      doc.header.push_back(*s);
    else if (auto* u = std::get_if<std::uint64_t>(&cell))
      doc.header.push_back(std::to_string(*u));
    else
      doc.header.push_back(format_double(std::get<double>(cell)));
  }
  for (std::size_t r = 1; r < lines.size(); ++r) {
    if (lines[r].size() != doc.header.size())
      throw std::invalid_argument("CSV line " + std::to_string(r + 1) + ": expected " + std::to_string(doc.header.size()) +
                                  " fields, found " + std::to_string(lines[r].size()));
    doc.rows.push_back(std::move(lines[r]));
  }
  return doc;
}

}  // namespace entangle
