// Command-line front end. Every command resolves its flags (or config file)
// into one JSON object, runs from that object, and writes it back out as
// manifest.json so that `phasecycle rerun --manifest` reproduces the run.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "phasecycle/analysis.hpp"
#include "phasecycle/errors.hpp"
#include "phasecycle/io.hpp"
#include "phasecycle/pathways.hpp"
#include "phasecycle/schemes.hpp"
#include "phasecycle/simulator.hpp"

namespace fs = std::filesystem;
using namespace phasecycle;

namespace {

constexpr const char* kToolVersion = "0.1.0";

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Collects every config problem before failing.
class Problems {
 public:
  void add(std::string msg) { list_.push_back(std::move(msg)); }
  void raise() const {
    if (list_.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& p : list_) msg += "\n  - " + p;
    throw ValidationError(msg);
  }

 private:
  std::vector<std::string> list_;
};

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

PulseSequence sequence_from_config(const Json& j, Problems& problems) {
  if (!j.is_object()) {
    problems.add("sequence: expected an object");
    return {};
  }
  const std::string kind_name = get_or<std::string>(j, "kind", "");
  SequenceKind kind{};
  try {
    kind = sequence_kind_from_string(kind_name);
  } catch (const ValidationError& e) {
    problems.add(std::string("sequence.kind: ") + e.what());
    return {};
  }
  if (kind == SequenceKind::custom) {
    PulseSequence seq;
    if (!j.contains("pulses") || !j["pulses"].is_array()) {
      problems.add("sequence.pulses: custom sequences need a pulse list");
      return seq;
    }
    for (std::size_t i = 0; i < j["pulses"].size(); ++i) {
      const Json& p = j["pulses"][i];
      if (!p.contains("time") || !p.contains("flip")) {
        problems.add("sequence.pulses[" + std::to_string(i) + "]: needs time and flip");
        continue;
      }
      seq.pulses.push_back({p["time"].get<double>(), p["flip"].get<double>(), get_or<double>(p, "phase", 0.0), 1});
    }
    seq.m = seq.pulses.empty() ? 0 : static_cast<unsigned>(seq.pulses.size() - 1);
    seq.echo_time = get_or<double>(j, "echo_time", seq.last_pulse_time());
    try {
      seq.validate();
    } catch (const ValidationError& e) {
      problems.add(std::string("sequence: ") + e.what());
    }
    return seq;
  }
  const unsigned m = get_or<unsigned>(j, "m", 0);
  const char* timing_key = kind == SequenceKind::udd ? "total_time" : "tau";
  if (!j.contains(timing_key)) {
    problems.add(std::string("sequence.") + timing_key + ": required for " + kind_name);
    return {};
  }
  try {
    return build_sequence(kind, m, j[timing_key].get<double>());
  } catch (const ValidationError& e) {
    problems.add(std::string("sequence: ") + e.what());
    return {};
  }
}

NoiseModel noise_from_config(const Json& j, Problems& problems) {
  try {
    return j.is_null() ? NoiseModel{} : noise_from_json(j);
  } catch (const ValidationError& e) {
    problems.add(e.what());
    return {};
  }
}

PhaseScheme scheme_from_config(const Json& j, unsigned m, Problems& problems) {
  try {
    if (j.is_string()) return build_scheme(scheme_kind_from_string(j.get<std::string>()), m);
    if (j.is_object() && j.contains("file")) return read_scheme_file(j["file"].get<std::string>());
    if (j.is_object()) return scheme_from_json(j);
    problems.add("scheme: expected a kind name, {\"file\": path} or a scheme object");
  } catch (const ValidationError& e) {
    problems.add(std::string("scheme: ") + e.what());
  }
  return {};
}

void write_manifest(const fs::path& out, const std::string& command, const Json& config) {
  Json m;
  m["tool"] = "phasecycle";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config;
  write_json_file(out / "manifest.json", m);
}

// ---- commands -------------------------------------------------------------

void cmd_scheme(const Json& cfg, const fs::path& out) {
  const auto kind = scheme_kind_from_string(cfg.at("kind").get<std::string>());
  const auto m = cfg.at("m").get<unsigned>();
  const PhaseScheme s = build_scheme(kind, m);
  const OrthogonalityReport r = verify_scheme(s);
  write_json_file(out / "scheme.json", scheme_to_json(s));
  std::cout << to_string(kind) << " m=" << m << ": " << s.row_count() << " rows, predicted orthogonality ratio "
            << format_number(r.ratio) << '\n';
}

void cmd_verify(const Json& cfg, const fs::path& out) {
  const PhaseScheme s = read_scheme_file(cfg.at("scheme").get<std::string>());
  VerifyOptions opt;
  opt.survivor_cap = get_or<std::size_t>(cfg, "survivor_cap", opt.survivor_cap);
  opt.seed = get_or<std::uint64_t>(cfg, "seed", 0);
  const OrthogonalityReport r = verify_scheme(s, opt);
  write_json_file(out / "verify.json", report_to_json(r));
  std::cout << "m             " << r.m << '\n'
            << "rows          " << s.row_count() << '\n'
            << "classes       " << r.total_classes - 1 << " (non-empty)\n"
            << "cancelled     " << r.cancelled << '\n'
            << "ratio         " << format_number(r.ratio) << (r.exhaustive ? "" : " (sampled)") << '\n'
            << "desired echo  " << (r.desired_survives ? "survives" : "CANCELLED") << '\n';
  if (!r.surviving_classes.empty()) {
    std::cout << "surviving classes" << (r.survivors_truncated ? " (first " + std::to_string(opt.survivor_cap) + ")" : "")
              << ":\n";
    for (const auto& f : r.surviving_classes) {
      std::cout << "  {";
      for (std::size_t i = 0; i < f.size(); ++i) std::cout << (i ? "," : "") << f[i];
      std::cout << "}\n";
    }
  }
}

void cmd_pathways(const Json& cfg, const fs::path& out) {
  Problems problems;
  PulseSequence seq = sequence_from_config(cfg.at("sequence"), problems);
  const NoiseModel noise = noise_from_config(cfg.value("noise", Json()), problems);
  const int final_order = get_or<int>(cfg, "final_order", -1);
  if (final_order < -1 || final_order > 1) problems.add("final_order: must be -1, 0 or 1");
  problems.raise();
  if (cfg.contains("flags")) {
    std::vector<std::int8_t> row;
    for (const auto& v : cfg["flags"]) row.push_back(static_cast<std::int8_t>(v.get<int>()));
    seq = with_phase_flags(seq, row);
  }
  const auto predictions = predict_echoes(seq, noise, get_or<double>(cfg, "detuning", 0.0), final_order,
                                          get_or<bool>(cfg, "echo_forming_only", false));
  std::ofstream csv(out / "pathways.csv");
  write_pathway_report(csv, predictions);
  std::size_t refocusing = 0;
  for (const auto& e : predictions) refocusing += e.refocusing();
  std::cout << predictions.size() << " pathways, " << refocusing << " refocusing\n";
}

struct SimulationSetup {
  PulseSequence seq;
  PhaseScheme scheme;
  NoiseModel noise;
  std::size_t ensemble = 1;
};

void write_traces(const fs::path& out, const std::string& stem, const SchemeResult& res) {
  {
    std::ofstream f(out / (stem + "combined.csv"));
    write_trace_csv(f, res.times, res.combined_trace);
  }
  for (std::size_t r = 0; r < res.row_traces.size(); ++r) {
    std::ofstream f(out / (stem + "row" + std::to_string(r) + ".csv"));
    write_trace_csv(f, res.times, res.row_traces[r]);
  }
}

Json bloch_json(const BlochVector& b) { return Json::array({b.x, b.y, b.z}); }

void cmd_simulate(const Json& cfg, const fs::path& out) {
  Problems problems;
  for (const auto& [key, value] : cfg.items())
    if (key != "sequence" && key != "scheme" && key != "noise" && key != "ensemble" && key != "seed" &&
        key != "readout" && key != "sweep" && key != "split" && key != "workers" && key != "write_rows")
      problems.add("unknown field '" + key + "'");
  NoiseModel noise = noise_from_config(cfg.value("noise", Json()), problems);
  if (cfg.contains("seed")) noise.seed = cfg["seed"].get<std::uint64_t>();
  const std::size_t ensemble = get_or<std::size_t>(cfg, "ensemble", 1);
  if (ensemble < 1) problems.add("ensemble: must be at least 1");
  const unsigned workers = get_or<unsigned>(cfg, "workers", default_workers());

  Json summary;
  summary["noise"] = noise_to_json(noise);
  summary["ensemble"] = ensemble;

  if (cfg.contains("split")) {
    const Json& sp = cfg["split"];
    for (const char* k : {"tau", "delays_desired", "delays_undesired"})
      if (!sp.contains(k)) problems.add(std::string("split.") + k + ": required");
    problems.raise();
    const double tau = sp["tau"].get<double>();
    Json fits;
    for (auto [name, channel, key] : {std::tuple{"desired", SplitChannel::desired, "delays_desired"},
                                      std::tuple{"undesired", SplitChannel::undesired, "delays_undesired"}}) {
      std::vector<DecayPoint> pts;
      std::ofstream f(out / (std::string("split_") + name + ".csv"));
      f << "delay_s,amplitude\n";
      for (const auto& d : sp[key]) {
        const double delay = d.get<double>();
        const double a = split_echo(channel, tau, delay, noise, ensemble);
        pts.push_back({delay, a});
        f << format_number(delay) << ',' << format_number(a) << '\n';
      }
      fits[name] = fit_to_json(fit_decay(pts, DecayModel::mono));
    }
    summary["split_fits"] = fits;
    summary["split_ratio"] = fits["undesired"]["T2_apparent"].get<double>() / fits["desired"]["T2_apparent"].get<double>();
    write_json_file(out / "summary.json", summary);
    std::cout << "split experiment: decay-constant ratio " << format_number(summary["split_ratio"].get<double>())
              << '\n';
    return;
  }

  if (!cfg.contains("sequence")) problems.add("sequence: required");
  if (!cfg.contains("scheme")) problems.add("scheme: required");
  if (!cfg.contains("sequence") || !cfg.contains("scheme")) problems.raise();

  SchemeRunOptions opt;
  opt.ensemble_size = ensemble;
  opt.workers = workers;

  if (cfg.contains("sweep")) {
    const Json& sw = cfg["sweep"];
    const std::string param = get_or<std::string>(sw, "parameter", "");
    if (param != "m" && param != "tau" && param != "total_time") problems.add("sweep.parameter: expected m, tau or total_time");
    if (!sw.contains("values") || !sw["values"].is_array()) problems.add("sweep.values: expected an array");
    std::vector<std::string> schemes;
    if (cfg["scheme"].is_array())
      for (const auto& s : cfg["scheme"]) schemes.push_back(s.get<std::string>());
    else if (cfg["scheme"].is_string())
      schemes.push_back(cfg["scheme"].get<std::string>());
    else
      problems.add("scheme: sweeps take a kind name or a list of kind names");
    problems.raise();

    opt.sample_trace = false;
    std::ofstream f(out / "sweep.csv");
    f << param << ",scheme,echo_intensity\n";
    Json rows = Json::array();
    for (const auto& v : sw["values"]) {
      Json seq_cfg = cfg["sequence"];
      seq_cfg[param] = v;
      Problems p;
      const PulseSequence seq = sequence_from_config(seq_cfg, p);
      p.raise();
      const BlochVector axis = ideal_echo_axis(seq);
      for (const auto& name : schemes) {
        const PhaseScheme scheme = build_scheme(scheme_kind_from_string(name), seq.m);
        const SchemeResult res = run_scheme(seq, scheme, noise, opt);
        const double intensity = dot(res.combined_final, axis);
        f << v.dump() << ',' << name << ',' << format_number(intensity) << '\n';
      }
    }
    write_json_file(out / "summary.json", summary);
    std::cout << "sweep over " << param << ": " << sw["values"].size() << " points x " << schemes.size()
              << " schemes\n";
    return;
  }

  PulseSequence seq = sequence_from_config(cfg["sequence"], problems);
  problems.raise();
  PhaseScheme scheme = scheme_from_config(cfg["scheme"], seq.m, problems);
  problems.raise();
  if (cfg.contains("readout")) {
    const Json& ro = cfg["readout"];
    seq = with_readout_around_echo(seq, ro.at("half_width").get<double>(), ro.at("step").get<double>());
  }
  const SchemeResult res = run_scheme(seq, scheme, noise, opt);
  if (get_or<bool>(cfg, "write_rows", true)) {
    write_traces(out, "trace_", res);
  } else {
    std::ofstream f(out / "trace_combined.csv");
    write_trace_csv(f, res.times, res.combined_trace);
  }

  const BlochVector axis = ideal_echo_axis(seq);
  const double last = seq.last_pulse_time();
  const auto spacings = pulse_spacings(seq);
  Json echoes = Json::array();
  if (!res.times.empty() && seq.pulses.size() <= kDefaultPathwayMaxPulses) {
    // Predicted echo positions (distinct refocusing times) inside the window.
    std::vector<double> predicted;
    for (const auto& p : enumerate_pathways(seq, -1, true))
      if (auto t = echo_time(p, spacings)) predicted.push_back(last + *t);
    std::sort(predicted.begin(), predicted.end());
    predicted.erase(std::unique(predicted.begin(), predicted.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(a, b); }),
                    predicted.end());
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      const double t = predicted[i];
      if (t < res.times.front() || t > res.times.back()) continue;
      // Search up to halfway to the neighbouring predicted echoes.
      double window = res.times.back() - res.times.front();
      if (i > 0) window = std::min(window, (t - predicted[i - 1]) / 2);
      if (i + 1 < predicted.size()) window = std::min(window, (predicted[i + 1] - t) / 2);
      Json e;
      e["time_s"] = t;
      const auto a = echo_amplitude(res.times, res.combined_trace, t, window, axis);
      e["amplitude"] = a ? Json(*a) : Json();
      echoes.push_back(e);
    }
  }
  summary["measure_time"] = res.measure_time;
  summary["desired_weight"] = res.desired_weight;
  summary["rows"] = scheme.row_count();
  summary["combined_final"] = bloch_json(res.combined_final);
  summary["in_phase_final"] = dot(res.combined_final, axis);
  summary["echoes"] = echoes;
  write_json_file(out / "summary.json", summary);
  std::cout << "simulated " << scheme.row_count() << " circuits x " << ensemble
            << " members; in-phase echo at measure time " << format_number(dot(res.combined_final, axis)) << '\n';
}

std::size_t find_column(const CsvTable& t, std::initializer_list<const char*> names) {
  for (const char* n : names)
    if (t.has_column(n)) return t.column(n);
  std::string msg = "CSV needs one of the columns:";
  for (const char* n : names) msg += std::string(" ") + n;
  throw ValidationError(msg);
}

void cmd_fit(const Json& cfg, const fs::path& out) {
  const CsvTable table = read_csv_file(cfg.at("data").get<std::string>());
  const std::string model = get_or<std::string>(cfg, "model", "mono");
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool ok = true;
    if (cfg.contains("filter"))
      for (const auto& [col, want] : cfg["filter"].items())
        ok = ok && table.rows[r][table.column(col)] == want.get<std::string>();
    if (ok) keep.push_back(r);
  }

  Json result;
  result["data"] = cfg["data"];
  result["points"] = keep.size();
  if (model == "scaling") {
    const std::size_t mc = find_column(table, {"m"});
    const std::size_t tc = find_column(table, {"T2_us", "T2_s", "T2"});
    std::vector<ScalingPoint> series;
    for (auto r : keep) series.push_back({table.number(r, mc), table.number(r, tc)});
    std::sort(series.begin(), series.end(), [](const auto& a, const auto& b) { return a.m < b.m; });
    const ScalingFit f = scaling_exponent(series);
    bool monotone = true;
    for (std::size_t i = 1; i < series.size(); ++i) monotone = monotone && series[i].t2 > series[i - 1].t2;
    result["model"] = "scaling";
    result["alpha"] = f.alpha;
    result["stderr_alpha"] = f.stderr_alpha;
    result["intercept"] = f.intercept;
    result["monotone_increasing"] = monotone;
    std::cout << "alpha = " << format_number(f.alpha) << " +/- " << format_number(f.stderr_alpha) << " ("
              << series.size() << " points)\n";
  } else {
    const std::size_t tc = find_column(table, {"time_s", "time", "t"});
    const std::size_t ac = find_column(table, {"amplitude", "signal", "echo_intensity"});
    std::vector<DecayPoint> pts;
    for (auto r : keep) pts.push_back({table.number(r, tc), table.number(r, ac)});
    const DecayFit f = fit_decay(pts, decay_model_from_string(model));
    result.update(fit_to_json(f));
    std::cout << model << " fit: time constant " << format_number(f.time_constant) << ", stretch "
              << format_number(f.stretch) << ", amplitude " << format_number(f.amplitude) << ", rms "
              << format_number(f.residual_rms) << '\n';
  }
  write_json_file(out / "fit.json", result);
}

void cmd_fidelity(const Json& cfg, const fs::path& out) {
  Problems problems;
  SequenceKind family{};
  try {
    family = sequence_kind_from_string(cfg.at("family").get<std::string>());
  } catch (const ValidationError& e) {
    problems.add(std::string("family: ") + e.what());
  }
  std::vector<unsigned> ms;
  if (cfg.contains("m") && cfg["m"].is_array())
    for (const auto& v : cfg["m"]) ms.push_back(v.get<unsigned>());
  else
    problems.add("m: expected a list of pulse counts");
  std::vector<std::string> schemes = {"tpc", "hpc"};
  if (cfg.contains("schemes")) schemes = cfg["schemes"].get<std::vector<std::string>>();
  NoiseModel noise = noise_from_config(cfg.value("noise", Json()), problems);
  if (cfg.contains("seed")) noise.seed = cfg["seed"].get<std::uint64_t>();
  problems.raise();

  BenchmarkOptions opt;
  opt.timing = get_or<double>(cfg, "timing", 1e-6);
  opt.ensemble_size = get_or<std::size_t>(cfg, "ensemble", 1);
  opt.workers = get_or<unsigned>(cfg, "workers", default_workers());

  std::ofstream csv(out / "fidelity.csv");
  csv << "m,scheme,fidelity\n";
  Json states = Json::array();
  for (const auto& name : schemes) {
    const auto curve = fidelity_benchmark(family, ms, scheme_kind_from_string(name), noise, opt);
    for (const auto& pt : curve) {
      csv << pt.m << ',' << name << ',' << format_number(pt.fidelity) << '\n';
      Json s;
      s["m"] = pt.m;
      s["scheme"] = name;
      s["v"] = bloch_json(pt.state.v);
      s["unit"] = bloch_json(pt.state.unit);
      s["target"] = bloch_json(pt.target);
      s["fidelity"] = pt.fidelity;
      states.push_back(s);
      std::cout << name << " m=" << pt.m << " F_eff=" << format_number(pt.fidelity) << '\n';
    }
  }
  write_json_file(out / "effective_states.json", states);
}

void dispatch(const std::string& command, const Json& cfg, const fs::path& out) {
  fs::create_directories(out);
  write_manifest(out, command, cfg);
  if (command == "scheme") cmd_scheme(cfg, out);
  else if (command == "verify") cmd_verify(cfg, out);
  else if (command == "pathways") cmd_pathways(cfg, out);
  else if (command == "simulate") cmd_simulate(cfg, out);
  else if (command == "fit") cmd_fit(cfg, out);
  else if (command == "fidelity") cmd_fidelity(cfg, out);
  else throw ValidationError("unknown command '" + command + "'");
}

Json sequence_flags(const std::string& kind, unsigned m, double tau, double total) {
  Json s;
  s["kind"] = kind;
  s["m"] = m;
  if (kind == "udd") s["total_time"] = total;
  else s["tau"] = tau;
  return s;
}

int run(int argc, char** argv) {
  CLI::App app{"Phase-cycling schemes, pathway analysis and decoupling simulation"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string kind, scheme_arg, noise_arg, model = "mono", config_path, data_path, manifest_path, seq_kind = "cpmg";
  std::vector<unsigned> m_values;
  double tau = 1e-6, total_time = 1e-5;
  std::uint64_t seed = 0;
  std::size_t ensemble = 1;
  int final_order = -1;
  bool echo_only = false;

  auto* scheme = app.add_subcommand("scheme", "Build a phase-cycling scheme and write scheme.json");
  scheme->add_option("--kind", kind, "tpc | cpc | hpc")->required();
  scheme->add_option("--m", m_values, "Number of inversion pulses")->required()->expected(1);

  auto* verify = app.add_subcommand("verify", "Class-by-class cancellation report for a scheme file");
  verify->add_option("--scheme", scheme_arg, "Scheme JSON file")->required();
  verify->add_option("--seed", seed, "Seed for sampled verification");

  auto* pathways = app.add_subcommand("pathways", "Coherence-transfer pathway report (pathways.csv)");
  pathways->add_option("--kind", seq_kind, "cp | cpmg | udd")->capture_default_str();
  pathways->add_option("--m", m_values, "Number of inversion pulses")->required()->expected(1);
  pathways->add_option("--tau", tau, "Pulse spacing parameter tau (s)");
  pathways->add_option("--total-time", total_time, "UDD total time (s)");
  pathways->add_option("--noise", noise_arg, "Noise model: inline JSON or file");
  pathways->add_option("--final-order", final_order, "Final coherence order")->capture_default_str();
  pathways->add_flag("--echo-only", echo_only, "Keep refocusing pathways only");

  auto* simulate = app.add_subcommand("simulate", "Run a scheme through the simulator");
  simulate->add_option("--config", config_path, "Simulation config JSON");
  simulate->add_option("--kind", seq_kind, "cp | cpmg | udd (without --config)");
  simulate->add_option("--m", m_values, "Number of inversion pulses")->expected(1);
  simulate->add_option("--tau", tau, "Pulse spacing parameter tau (s)");
  simulate->add_option("--total-time", total_time, "UDD total time (s)");
  simulate->add_option("--scheme", scheme_arg, "Scheme kind or scheme file");
  simulate->add_option("--noise", noise_arg, "Noise model: inline JSON or file");
  simulate->add_option("--seed", seed, "Ensemble seed (overrides the noise seed)");
  simulate->add_option("--ensemble", ensemble, "Detuning ensemble size");

  auto* fit = app.add_subcommand("fit", "Fit a decay curve or a scaling exponent from CSV");
  fit->add_option("--data", data_path, "CSV file")->required();
  fit->add_option("--model", model, "mono | stretched | recovery | scaling")->capture_default_str();
  std::vector<std::string> filters;
  fit->add_option("--filter", filters, "column=value row filter (repeatable)");

  auto* fidelity = app.add_subcommand("fidelity", "Effective-state fidelity benchmark");
  fidelity->add_option("--config", config_path, "Benchmark config JSON");
  fidelity->add_option("--kind", seq_kind, "cp | cpmg | udd (without --config)");
  fidelity->add_option("--m", m_values, "Pulse counts");
  fidelity->add_option("--tau", tau, "tau (CP/CPMG) in seconds");
  fidelity->add_option("--total-time", total_time, "UDD total time (s)");
  fidelity->add_option("--noise", noise_arg, "Noise model: inline JSON or file");
  fidelity->add_option("--seed", seed, "Ensemble seed");
  fidelity->add_option("--ensemble", ensemble, "Detuning ensemble size");

  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest.json");
  rerun->add_option("--manifest", manifest_path, "manifest.json of an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const fs::path out(out_dir);
  Json cfg;
  std::string command;
  if (scheme->parsed()) {
    command = "scheme";
    cfg["kind"] = kind;
    cfg["m"] = m_values.at(0);
  } else if (verify->parsed()) {
    command = "verify";
    cfg["scheme"] = scheme_arg;
    cfg["seed"] = seed;
  } else if (pathways->parsed()) {
    command = "pathways";
    cfg["sequence"] = sequence_flags(seq_kind, m_values.at(0), tau, total_time);
    if (!noise_arg.empty()) cfg["noise"] = parse_json_argument(noise_arg);
    cfg["final_order"] = final_order;
    cfg["echo_forming_only"] = echo_only;
  } else if (simulate->parsed()) {
    command = "simulate";
    if (!config_path.empty()) {
      cfg = read_json_file(config_path);
    } else {
      if (m_values.empty()) throw ValidationError("simulate: give --config or --m with sequence flags");
      cfg["sequence"] = sequence_flags(seq_kind, m_values.at(0), tau, total_time);
      if (!scheme_arg.empty()) {
        if (fs::exists(scheme_arg)) cfg["scheme"] = Json{{"file", scheme_arg}};
        else cfg["scheme"] = scheme_arg;
      } else {
        cfg["scheme"] = "hpc";
      }
      if (!noise_arg.empty()) cfg["noise"] = parse_json_argument(noise_arg);
      cfg["ensemble"] = ensemble;
    }
    if (simulate->count("--seed")) cfg["seed"] = seed;
    if (simulate->count("--ensemble")) cfg["ensemble"] = ensemble;
  } else if (fit->parsed()) {
    command = "fit";
    cfg["data"] = data_path;
    cfg["model"] = model;
    for (const auto& f : filters) {
      const auto eq = f.find('=');
      if (eq == std::string::npos) throw ValidationError("--filter expects column=value, got '" + f + "'");
      cfg["filter"][f.substr(0, eq)] = f.substr(eq + 1);
    }
  } else if (fidelity->parsed()) {
    command = "fidelity";
    if (!config_path.empty()) {
      cfg = read_json_file(config_path);
    } else {
      cfg["family"] = seq_kind;
      cfg["m"] = m_values;
      cfg["timing"] = seq_kind == "udd" ? total_time : tau;
      if (!noise_arg.empty()) cfg["noise"] = parse_json_argument(noise_arg);
      cfg["ensemble"] = ensemble;
    }
    if (fidelity->count("--seed")) cfg["seed"] = seed;
  } else if (rerun->parsed()) {
    const Json manifest = read_json_file(manifest_path);
    if (!manifest.contains("command") || !manifest.contains("config"))
      throw ValidationError(manifest_path + ": not a manifest (needs command and config)");
    command = manifest["command"].get<std::string>();
    cfg = manifest["config"];
  }
  dispatch(command, cfg, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: bad configuration value: " << e.what() << '\n';
    return 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return 3;
  } catch (const ConvergenceError& e) {
    std::cerr << "did not converge: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
