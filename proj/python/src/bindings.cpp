#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasecycle/analysis.hpp"
#include "phasecycle/errors.hpp"
#include "phasecycle/hadamard.hpp"
#include "phasecycle/pathways.hpp"
#include "phasecycle/schemes.hpp"
#include "phasecycle/simulator.hpp"

namespace py = pybind11;
using namespace phasecycle;

namespace {

py::int_ to_py(const BigInt& v) { return py::int_(py::str(v.str())); }

std::vector<std::vector<int>> rows_of(const PhaseScheme& s) {
  std::vector<std::vector<int>> out(s.rows.rows(), std::vector<int>(s.rows.cols()));
  for (std::size_t r = 0; r < s.rows.rows(); ++r)
    for (std::size_t c = 0; c < s.rows.cols(); ++c) out[r][c] = s.rows(r, c);
  return out;
}

py::tuple bloch_tuple(const BlochVector& b) { return py::make_tuple(b.x, b.y, b.z); }

BlochVector bloch_from(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Phase-cycling design and two-level echo simulation";

  py::register_exception<ValidationError>(mod, "ValidationError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(mod, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(mod, "ConvergenceError", PyExc_RuntimeError);

  py::class_<NoiseModel>(mod, "NoiseModel")
      .def(py::init<>())
      .def_readwrite("t1", &NoiseModel::t1)
      .def_readwrite("t2", &NoiseModel::t2)
      .def_readwrite("detuning_sigma", &NoiseModel::detuning_sigma)
      .def_readwrite("flip_error", &NoiseModel::flip_error)
      .def_readwrite("phase_error", &NoiseModel::phase_error)
      .def_readwrite("flip_jitter", &NoiseModel::flip_jitter)
      .def_readwrite("phase_jitter", &NoiseModel::phase_jitter)
      .def_readwrite("seed", &NoiseModel::seed);

  py::class_<PhaseScheme>(mod, "PhaseScheme")
      .def_property_readonly("kind", [](const PhaseScheme& s) { return to_string(s.kind); })
      .def_readonly("m", &PhaseScheme::m)
      .def_property_readonly("rows", &rows_of)
      .def_property_readonly("sign", [](const PhaseScheme& s) { return std::vector<int>(s.sign.begin(), s.sign.end()); })
      .def_property_readonly("row_count", &PhaseScheme::row_count);

  py::class_<PulseSequence>(mod, "PulseSequence")
      .def_property_readonly("kind", [](const PulseSequence& s) { return to_string(s.kind); })
      .def_readonly("m", &PulseSequence::m)
      .def_readonly("echo_time", &PulseSequence::echo_time)
      .def_property_readonly("pulse_times", [](const PulseSequence& s) {
        std::vector<double> t;
        for (const auto& p : s.pulses) t.push_back(p.time);
        return t;
      });

  mod.def(
      "build_scheme", [](const std::string& kind, unsigned m) { return build_scheme(scheme_kind_from_string(kind), m); },
      py::arg("kind"), py::arg("m"));
  mod.def(
      "scheme_complexity",
      [](const std::string& kind, unsigned m) { return to_py(scheme_complexity(scheme_kind_from_string(kind), m)); },
      py::arg("kind"), py::arg("m"));
  mod.def(
      "verify",
      [](const PhaseScheme& s) {
        const auto r = verify_scheme(s);
        py::dict d;
        d["ratio"] = r.ratio;
        d["cancelled"] = to_py(r.cancelled);
        d["total_classes"] = to_py(r.total_classes);
        d["desired_survives"] = r.desired_survives;
        d["exhaustive"] = r.exhaustive;
        d["surviving_classes"] = r.surviving_classes;
        return d;
      },
      py::arg("scheme"));
  mod.def(
      "hpo_ratio", [](const std::string& kind, unsigned n) { return hpo_ratio(hadamard_kind_from_string(kind), n).value; },
      py::arg("kind"), py::arg("n"));
  mod.def(
      "count_nonorthogonal", [](unsigned n, unsigned q) { return to_py(count_nonorthogonal_exact(n, q).d); },
      py::arg("n"), py::arg("q"));

  mod.def(
      "build_sequence",
      [](const std::string& kind, unsigned m, double timing) {
        return build_sequence(sequence_kind_from_string(kind), m, timing);
      },
      py::arg("kind"), py::arg("m"), py::arg("timing"));
  mod.def(
      "enumerate_pathways",
      [](const PulseSequence& seq, int final_order, bool echo_only) {
        std::vector<py::tuple> out;
        for (const auto& p : enumerate_pathways(seq, final_order, echo_only))
          out.push_back(py::make_tuple(p.orders, p.origin));
        return out;
      },
      py::arg("sequence"), py::arg("final_order") = -1, py::arg("echo_only") = false);
  mod.def(
      "echo_time",
      [](const PulseSequence& seq, const std::vector<int>& orders, std::size_t origin) {
        return echo_time(Pathway{orders, origin}, pulse_spacings(seq));
      },
      py::arg("sequence"), py::arg("orders"), py::arg("origin") = 0);

  mod.def(
      "run_scheme",
      [](const PulseSequence& seq, const PhaseScheme& scheme, const NoiseModel& noise, std::size_t ensemble,
         bool trace) {
        SchemeResult res;
        {
          py::gil_scoped_release release;
          res = run_scheme(seq, scheme, noise, {ensemble, 1, trace});
        }
        py::dict d;
        d["combined_final"] = bloch_tuple(res.combined_final);
        d["echo_intensity"] = dot(res.combined_final, ideal_echo_axis(seq));
        d["measure_time"] = res.measure_time;
        d["times"] = res.times;
        py::list combined;
        for (const auto& b : res.combined_trace) combined.append(bloch_tuple(b));
        d["combined_trace"] = combined;
        return d;
      },
      py::arg("sequence"), py::arg("scheme"), py::arg("noise") = NoiseModel{}, py::arg("ensemble") = 1,
      py::arg("trace") = false);

  mod.def(
      "fit_decay",
      [](const std::vector<double>& times, const std::vector<double>& amplitudes, const std::string& model) {
        if (times.size() != amplitudes.size()) throw ValidationError("times and amplitudes differ in length");
        std::vector<DecayPoint> pts;
        for (std::size_t i = 0; i < times.size(); ++i) pts.push_back({times[i], amplitudes[i]});
        const auto f = fit_decay(pts, decay_model_from_string(model));
        py::dict d;
        d["amplitude"] = f.amplitude;
        d["time_constant"] = f.time_constant;
        d["stretch"] = f.stretch;
        d["residual_rms"] = f.residual_rms;
        return d;
      },
      py::arg("times"), py::arg("amplitudes"), py::arg("model") = "mono");
  mod.def(
      "scaling_exponent",
      [](const std::vector<double>& m, const std::vector<double>& t2) {
        if (m.size() != t2.size()) throw ValidationError("m and t2 differ in length");
        std::vector<ScalingPoint> pts;
        for (std::size_t i = 0; i < m.size(); ++i) pts.push_back({m[i], t2[i]});
        const auto f = scaling_exponent(pts);
        return py::make_tuple(f.alpha, f.stderr_alpha);
      },
      py::arg("m"), py::arg("t2"));
  mod.def(
      "fidelity",
      [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return fidelity(density_from_bloch(bloch_from(a)), density_from_bloch(bloch_from(b)));
      },
      py::arg("a"), py::arg("b"), "Fidelity between two states given as Bloch vectors.");
  mod.def(
      "fidelity_benchmark",
      [](const std::string& family, const std::vector<unsigned>& ms, const std::string& scheme,
         const NoiseModel& noise) {
        std::vector<double> out;
        for (const auto& p :
             fidelity_benchmark(sequence_kind_from_string(family), ms, scheme_kind_from_string(scheme), noise))
          out.push_back(p.fidelity);
        return out;
      },
      py::arg("family"), py::arg("m_values"), py::arg("scheme"), py::arg("noise") = NoiseModel{});
}
