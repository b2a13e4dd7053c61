// Copyright 2026 The qphase Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qphase/lindblad.hpp"
#include "qphase/models.hpp"
#include "qphase/nogo.hpp"
#include "qphase/quasiadiabatic.hpp"
#include "qphase/timer.hpp"
#include "runner.hpp"

namespace py = pybind11;
using namespace qphase;

PYBIND11_MODULE(_qphase, m) {
  m.doc() = "Dissipative phase preparation toolkit";

  // Translators are tried newest first, so the base class goes first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<GuardError>(m, "GuardError", base.ptr());
  py::register_exception<cli::ConfigError>(m, "ConfigError", base.ptr());

  py::class_<LatticeGeometry>(m, "LatticeGeometry")
      .def_static("chain", &LatticeGeometry::chain, py::arg("local_dims"))
      .def_static("ring", &LatticeGeometry::ring, py::arg("n"), py::arg("local_dim"))
      .def_static("torus_edges", &LatticeGeometry::torus_edges, py::arg("lx"), py::arg("ly"), py::arg("local_dim"))
      .def_property_readonly("num_sites", &LatticeGeometry::num_sites)
      .def_property_readonly("hilbert_dim", &LatticeGeometry::hilbert_dim)
      .def("distance", &LatticeGeometry::distance);

  m.def("basis_ket", &basis_ket, py::arg("dim"), py::arg("index"));
  m.def("projector", &projector, py::arg("ket"));
  m.def("trace_norm", &trace_norm, py::arg("a"));
  m.def("trace_distance", &trace_distance, py::arg("a"), py::arg("b"));

  // Timer
  py::class_<TimerSpec>(m, "TimerSpec")
      .def(py::init([](int T, double gamma) { return TimerSpec{T, gamma}; }), py::arg("T"), py::arg("gamma"))
      .def_static("with_tau", [](int T, double tau) { return TimerSpec::with_tau(T, tau); }, py::arg("T"),
                  py::arg("tau"))
      .def_readonly("T", &TimerSpec::T)
      .def_readonly("gamma", &TimerSpec::gamma)
      .def_property_readonly("tau", &TimerSpec::tau);
  m.def("birth_chain_dist", [](const TimerSpec& s, double t) { return birth_chain_dist(s, t).p; }, py::arg("spec"),
        py::arg("t"));
  m.def("quantum_timer_dist", [](const TimerSpec& s, double t) { return quantum_timer_dist(s, t).p; },
        py::arg("spec"), py::arg("t"));
  m.def("default_epsilon", &default_epsilon, py::arg("spec"));
  m.def(
      "switch_bounds",
      [](const TimerSpec& s, double eps) {
        const auto b = switch_bounds(s, eps);
        return py::dict(py::arg("p_early") = b.p_early, py::arg("p_late") = b.p_late,
                        py::arg("log_p_early") = b.log_p_early, py::arg("log_p_late") = b.log_p_late,
                        py::arg("scaling") = b.scaling);
      },
      py::arg("spec"), py::arg("epsilon"));

  // Lindbladians
  py::class_<Lindbladian>(m, "Lindbladian")
      .def(py::init<LatticeGeometry>(), py::arg("geometry"))
      .def_property_readonly("dim", &Lindbladian::dim)
      .def("apply", &Lindbladian::apply, py::arg("rho"));
  m.def(
      "random_lindbladian",
      [](const LatticeGeometry& g, std::uint64_t seed, int jumps) {
        Rng rng(seed);
        return random_lindbladian(g, rng, jumps);
      },
      py::arg("geometry"), py::arg("seed"), py::arg("jumps_per_term") = 2);
  m.def("product_driver", [](const LatticeGeometry& g, const Vector& t) { return product_driver(g, t); },
        py::arg("geometry"), py::arg("target"));
  m.def("depolarizing_lindbladian", &depolarizing_lindbladian, py::arg("geometry"), py::arg("rate"));
  m.def("propagator", [](const Lindbladian& l, double t) { return propagator(l, t); }, py::arg("l"), py::arg("t"));
  m.def("evolve", [](const Lindbladian& l, const Matrix& r, double t) { return evolve(l, r, t); }, py::arg("l"),
        py::arg("rho"), py::arg("t"));
  m.def("heisenberg_evolve", [](const Lindbladian& l, const Matrix& a, double t) { return heisenberg_evolve(l, a, t); },
        py::arg("l"), py::arg("a"), py::arg("t"));
  m.def("choi_min_eigenvalue", [](const Lindbladian& l, double t) { return choi_cp_check(l, t).min_eigenvalue; },
        py::arg("l"), py::arg("t"));

  // Models
  py::class_<QuantumDouble>(m, "QuantumDouble")
      .def(py::init<int, int, int>(), py::arg("n"), py::arg("lx"), py::arg("ly"))
      .def("ground_space_dimension_symbolic", &QuantumDouble::ground_space_dimension_symbolic)
      .def("ground_space_dimension_dense", &QuantumDouble::ground_space_dimension_dense, py::arg("tol") = 1e-9);
  m.def("ghz_state", &ghz_on_levels, py::arg("levels"), py::arg("sites"), py::arg("local_dim"));

  // Quasi-adiabatic transport
  py::enum_<QAMode>(m, "QAMode").value("Exact", QAMode::Exact).value("Filtered", QAMode::Filtered);
  py::class_<HamiltonianPath>(m, "HamiltonianPath");
  m.def("single_qubit_path", &single_qubit_path);
  m.def("uncoupled_path", &uncoupled_path, py::arg("n"));
  m.def("paramagnetic_ring_path", &paramagnetic_ring_path, py::arg("n"), py::arg("h") = 1.0, py::arg("g") = 1.0,
        py::arg("J") = 0.2);
  m.def(
      "transport_fidelity",
      [](const HamiltonianPath& path, QAMode mode, int points, double cut_times_lambda) {
        const auto f = FilterSpec::for_gap(gap_profile(path, points).min_gap, cut_times_lambda);
        std::vector<double> grid;
        for (int k = 0; k < points; ++k) grid.push_back(static_cast<double>(k) / (points - 1));
        return transport(path, mode, f, grid).fidelity;
      },
      py::arg("path"), py::arg("mode"), py::arg("points") = 11, py::arg("cut_times_lambda") = 40.0);

  // Experiment runner
  m.def("experiment_kinds", &cli::experiment_kinds);
  m.def(
      "run_experiment",
      [](const std::string& config_json, int workers) {
        const auto config = cli::parse_config(nlohmann::json::parse(config_json));
        cli::RunResult r;
        {
          py::gil_scoped_release release;
          r = cli::run_experiment(config, workers);
        }
        py::dict tables;
        for (const auto& t : r.tables) tables[py::str(t.file)] = t.render();
        return py::make_tuple(r.summary.dump(), tables);
      },
      py::arg("config_json"), py::arg("workers") = 1,
      "Runs a JSON experiment config; returns (summary JSON, {file name: CSV text}).");
}
