#pragma once

// File formats: scheme JSON, orthogonality reports, trace and table CSVs.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "phasecycle/analysis.hpp"
#include "phasecycle/qubit.hpp"
#include "phasecycle/schemes.hpp"
#include "phasecycle/sequence.hpp"

namespace phasecycle {

using Json = nlohmann::ordered_json;

/// 12 significant digits, shortest form.
std::string format_number(double v);

Json scheme_to_json(const PhaseScheme& scheme);
/// Errors name the offending field, e.g. "rows[3][1]".
PhaseScheme scheme_from_json(const Json& j);
PhaseScheme read_scheme_file(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);
/// Accepts inline JSON text or a path to a JSON file.
Json parse_json_argument(const std::string& text_or_path);

Json report_to_json(const OrthogonalityReport& report);
Json noise_to_json(const NoiseModel& noise);
/// Unknown keys are rejected; every problem is collected before throwing.
NoiseModel noise_from_json(const Json& j);
Json fit_to_json(const DecayFit& fit);

/// Floats in a JSON tree rounded to 12 significant digits for output.
void dump_json(std::ostream& out, const Json& j);
void write_json_file(const std::filesystem::path& path, const Json& j);

void write_trace_csv(std::ostream& out, std::span<const double> times, std::span<const BlochVector> trace);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based file line of each row

  std::size_t column(const std::string& name) const;  // throws when absent
  bool has_column(const std::string& name) const;
  /// Numeric cell; `row` is 0-based, errors report the 1-based file line.
  double number(std::size_t row, std::size_t col) const;
};

/// Comma-separated with a header line; blank lines skipped. Ragged rows are
/// rejected with their line number.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace phasecycle
