#pragma once

// JSON and CSV encodings shared by the CLI reports.
//
// JSON: tables are objects keyed by setting ("AB", "AB'", "A'B", "A'B'"),
// each holding the four cells keyed "++", "+-", "-+", "--" plus the
// correlation "E". CSV: '.' decimal separator, no thousands separators,
// doubles with 17 significant digits, mandatory header row.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "entangle/bloch.hpp"
#include "entangle/prob_core.hpp"
#include "entangle/string_models.hpp"

namespace entangle {

using json = nlohmann::ordered_json;

/// "n/d" if value equals a fraction with denominator <= max_denominator to
/// within 1e-14, nullopt otherwise. Integers print without a denominator.
std::optional<std::string> rational_string(double value, int max_denominator = 1000);

json table_to_json(const ExperimentTable& table);
/// Rational strings per cell (null where a cell has no small-denominator form).
json table_exact_json(const ExperimentTable& table);
json counts_to_json(const SettingCounts& counts);
json chsh_to_json(const ChshQuantities& q);
json bell_to_json(const BellReport& report);
json marginals_to_json(const MarginalReport& report);
json trace_to_json(const MicroTrace& trace, const OutcomePair& outcome);
json bloch15_to_json(const BlochVector15& r);
json vec3_to_json(const Vec3& v);

// ---------------------------------------------------------------------------

using CsvCell = std::variant<std::string, std::uint64_t, double>;

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// %.17g in the C locale.
std::string format_double(double value);

/// Emits header and rows with '\n' line endings; strings containing ',', '"'
/// or a newline are quoted with doubled quotes.
std::string emit_csv(const CsvDocument& doc);

/// Inverse of emit_csv. Unquoted fields made only of digits parse as
/// integers, other numeric fields as doubles, everything else as strings.
/// Throws std::invalid_argument with a line number on malformed input.
CsvDocument parse_csv(std::string_view text);

}  // namespace entangle
