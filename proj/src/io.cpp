#include "phasecycle/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "phasecycle/errors.hpp"

namespace phasecycle {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json scheme_to_json(const PhaseScheme& scheme) {
  Json j;
  j["m"] = scheme.m;
  j["kind"] = to_string(scheme.kind);
  j["sign"] = Json::array();
  for (auto s : scheme.sign) j["sign"].push_back(static_cast<int>(s));
  j["rows"] = Json::array();
  for (std::size_t r = 0; r < scheme.row_count(); ++r) {
    Json row = Json::array();
    for (auto v : scheme.rows.row(r)) row.push_back(static_cast<int>(v));
    j["rows"].push_back(std::move(row));
  }
  return j;
}

namespace {

std::int8_t sign_entry(const Json& v, const std::string& where) {
  if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1))
    throw ValidationError(where + ": expected +1 or -1, got " + v.dump());
  return static_cast<std::int8_t>(v.get<int>());
}

}  // namespace

PhaseScheme scheme_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("scheme: expected a JSON object");
  for (const char* key : {"m", "sign", "rows"})
    if (!j.contains(key)) throw ValidationError(std::string("scheme: missing field '") + key + "'");
  if (!j["m"].is_number_unsigned()) throw ValidationError("scheme.m: expected a nonnegative integer");

  PhaseScheme s;
  s.m = j["m"].get<unsigned>();
  s.kind = j.contains("kind") ? scheme_kind_from_string(j["kind"].get<std::string>()) : SchemeKind::custom;
  const Json& rows = j["rows"];
  const Json& sign = j["sign"];
  if (!rows.is_array() || rows.empty()) throw ValidationError("scheme.rows: expected a non-empty array");
  if (!sign.is_array()) throw ValidationError("scheme.sign: expected an array");

  s.rows = SignMatrix(rows.size(), s.m + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string where = "scheme.rows[" + std::to_string(r) + "]";
    if (!rows[r].is_array() || rows[r].size() != s.m + 1)
      throw ValidationError(where + ": expected " + std::to_string(s.m + 1) + " entries");
    for (std::size_t c = 0; c <= s.m; ++c) s.rows(r, c) = sign_entry(rows[r][c], where + "[" + std::to_string(c) + "]");
  }
  for (std::size_t r = 0; r < sign.size(); ++r)
    s.sign.push_back(sign_entry(sign[r], "scheme.sign[" + std::to_string(r) + "]"));
  s.validate();
  return s;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    std::ostringstream os;
    os << path.string() << ": JSON parse error at byte " << e.byte << ": " << e.what();
    throw ValidationError(os.str());
  }
}

PhaseScheme read_scheme_file(const std::filesystem::path& path) {
  try {
    return scheme_from_json(read_json_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Json parse_json_argument(const std::string& text_or_path) {
  const auto first = text_or_path.find_first_not_of(" \t\n");
  if (first != std::string::npos && text_or_path[first] == '{') {
    try {
      return Json::parse(text_or_path);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("inline JSON: parse error at byte ") + std::to_string(e.byte));
    }
  }
  return read_json_file(text_or_path);
}

Json report_to_json(const OrthogonalityReport& report) {
  Json j;
  j["m"] = report.m;
  j["total_classes"] = report.total_classes.str();
  j["cancelled"] = report.cancelled.str();
  j["ratio_exact"] = report.ratio_exact.str();
  j["ratio"] = report.ratio;
  j["desired_survives"] = report.desired_survives;
  j["exhaustive"] = report.exhaustive;
  if (!report.exhaustive) j["samples"] = report.samples;
  j["surviving_classes"] = report.surviving_classes;
  j["survivors_truncated"] = report.survivors_truncated;
  return j;
}

namespace {

Json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

Json noise_to_json(const NoiseModel& noise) {
  Json j;
  j["t1"] = finite_or_string(noise.t1);
  j["t2"] = finite_or_string(noise.t2);
  j["detuning_sigma"] = noise.detuning_sigma;
  j["flip_error"] = noise.flip_error;
  j["phase_error"] = noise.phase_error;
  j["flip_jitter"] = noise.flip_jitter;
  j["phase_jitter"] = noise.phase_jitter;
  j["seed"] = noise.seed;
  return j;
}

NoiseModel noise_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("noise: expected a JSON object");
  NoiseModel n;
  std::vector<std::string> problems;
  auto read = [&](const std::string& key, double& target) {
    const Json& v = j[key];
    if (v.is_number()) target = v.get<double>();
    else if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf"))
      target = std::numeric_limits<double>::infinity();
    else problems.push_back("noise." + key + ": expected a number");
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "t1") read(key, n.t1);
    else if (key == "t2") read(key, n.t2);
    else if (key == "detuning_sigma") read(key, n.detuning_sigma);
    else if (key == "flip_error") read(key, n.flip_error);
    else if (key == "phase_error") read(key, n.phase_error);
    else if (key == "flip_jitter") read(key, n.flip_jitter);
    else if (key == "phase_jitter") read(key, n.phase_jitter);
    else if (key == "seed") {
      if (value.is_number_unsigned()) n.seed = value.get<std::uint64_t>();
      else problems.push_back("noise.seed: expected a nonnegative integer");
    } else {
      problems.push_back("noise." + key + ": unknown field");
    }
  }
  try {
    n.validate();
  } catch (const ValidationError& e) {
    problems.emplace_back(e.what());
  }
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    throw ValidationError(msg);
  }
  return n;
}

Json fit_to_json(const DecayFit& fit) {
  Json j;
  j["model"] = to_string(fit.model);
  j["amplitude"] = fit.amplitude;
  j[fit.model == DecayModel::recovery ? "T1" : "T2_apparent"] = fit.time_constant;
  j["stretch"] = fit.stretch;
  j["residual_rms"] = fit.residual_rms;
  j["iterations"] = fit.iterations;
  j["starts_converged"] = fit.starts_converged;
  return j;
}

namespace {

void round_floats(Json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v)) j = std::stod(format_number(v));
    else j = format_number(v);
  } else if (j.is_structured()) {
    for (auto& child : j) round_floats(child);
  }
}

}  // namespace

void dump_json(std::ostream& out, const Json& j) {
  Json copy = j;
  round_floats(copy);
  out << copy.dump(2) << '\n';
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  dump_json(out, j);
}

void write_trace_csv(std::ostream& out, std::span<const double> times, std::span<const BlochVector> trace) {
  out << "time_s,sx,sy,sz\n";
  for (std::size_t k = 0; k < times.size(); ++k)
    out << format_number(times[k]) << ',' << format_number(trace[k].x) << ',' << format_number(trace[k].y) << ','
        << format_number(trace[k].z) << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ValidationError("CSV has no column '" + name + "'");
}

bool CsvTable::has_column(const std::string& name) const {
  for (const auto& h : header)
    if (h == name) return true;
  return false;
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& cell = rows.at(row).at(col);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
    std::ostringstream os;
    os << "CSV row " << lines.at(row) << ", column '" << header[col] << "': not a number: '" << cell << "'";
    throw ValidationError(os.str());
  }
  return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << "CSV row " << line_no << ": " << cells.size() << " fields, header has " << t.header.size();
      throw ValidationError(os.str());
    }
    t.rows.push_back(std::move(cells));
    t.lines.push_back(line_no);
  }
  if (t.header.empty()) throw ValidationError("CSV is empty");
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_csv(in);
}

}  // namespace phasecycle
