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

#include "runner.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qphase/lindblad.hpp"
#include "qphase/models.hpp"
#include "qphase/nogo.hpp"
#include "qphase/quasiadiabatic.hpp"
#include "qphase/switchgear.hpp"
#include "qphase/timer.hpp"

namespace qphase::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Formatting and parallel helpers

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}
std::string num(int x) { return std::to_string(x); }
std::string num(std::size_t x) { return std::to_string(x); }

template <class T>
using RowFn = std::function<T(std::size_t)>;

// Runs f(0..n-1) on `workers` threads; results keep their index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const RowFn<T>& f) {
  std::vector<T> out(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  const int w = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int k = 1; k < w; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// Independent stream per sweep entry, independent of the worker count.
Rng entry_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return Rng(seq);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}
bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Schema

const std::map<std::string, json>& schemas() {
  static const std::map<std::string, json> s = {
      {"timer",
       {{"tau", 1.0},
        {"table_T", 8},
        {"table_times", {0.25, 0.5, 1.0, 1.5, 2.0}},
        {"gadget_T", {1, 2, 3, 4}},
        {"gadget_times", {0.3, 1.0, 2.5}},
        {"ode_T", {8, 64, 512}},
        {"ode_times", {0.5, 1.0, 1.5}},
        {"switch_T", {64, 128, 256, 512}}}},
      {"switch",
       {{"tau", 2.0},
        {"T_values", {8, 16, 32, 64}},
        {"t_after", 3.0},
        {"initial", "11"},
        {"factorization_T", 3}}},
      {"compile",
       {{"schedule",
         json::parse(R"({"layers": [{"gates": [{"support": [0], "name": "H"}]},
                                    {"gates": [{"support": [0, 1], "name": "CNOT"}]}]})")},
        {"sites", 2},
        {"initial", 0},
        {"T_values", {8, 16, 32, 64}},
        {"settle", 12.0}}},
      {"qa",
       {{"N", 6},
        {"grid_points", 11},
        {"cut_times_lambda", 40.0},
        {"q", 56.0},
        {"delta_N", 8},
        {"delta_s", 0.5},
        {"delta_n_max", 4},
        {"patch_N", 8},
        {"patch_omegas", {1, 2, 3}},
        {"patch_steps", 40},
        {"circuit_omegas", json::array()},
        {"circuit_steps", 40}}},
      {"condense",
       {{"N_values", {4, 6}},
        {"trajectory_N", 4},
        {"times", {0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0}},
        {"integrate_N", 2},
        {"integrate_times", {0.5, 1.0, 2.0}},
        {"driver_N", 4},
        {"driver_times", {0.25, 0.5, 1.0, 2.0, 4.0}}}},
      {"nogo",
       {{"n", 2},
        {"lx", 2},
        {"ly", 2},
        {"rates", {0.0, 0.05, 0.1, 0.2}},
        {"t", 1.0},
        {"ell", 1},
        {"x0", 0},
        {"x1", 1},
        {"ghz_m", {2}},
        {"ghz_n", 4},
        {"ghz_N", 3}}},
      {"evolve",
       {{"samples", 200},
        {"geometries", json::parse("[[2, 2], [3, 2], [2, 3], [2, 4], [4, 2]]")},
        {"t", 0.7},
        {"s", 0.4},
        {"jumps_per_term", 2}}},
      {"double", {{"n", 2}, {"lx", 2}, {"ly", 2}, {"samples", 100}}},
      {"spt", {{"N", 4}, {"times", {1.0, 5.0, 10.0, 20.0, 30.0}}, {"samples", 4}}},
  };
  return s;
}

bool same_type(const json& value, const json& model) {
  if (model.is_number_integer()) return value.is_number_integer();
  if (model.is_number()) return value.is_number();
  if (model.is_string()) return value.is_string();
  if (model.is_boolean()) return value.is_boolean();
  if (model.is_object()) return value.is_object();
  if (model.is_array()) return value.is_array();
  return false;
}

void check_params(const std::string& kind, const json& given, json& out) {
  const json& defaults = schemas().at(kind);
  out = defaults;
  if (!given.is_object()) throw ConfigError("params", "must be an object");
  for (auto it = given.begin(); it != given.end(); ++it) {
    const std::string path = "params." + it.key();
    if (!defaults.contains(it.key())) throw ConfigError(path, "unknown key");
    const json& model = defaults.at(it.key());
    if (!same_type(it.value(), model)) throw ConfigError(path, "wrong type");
    if (model.is_array() && !model.empty()) {
      for (std::size_t i = 0; i < it.value().size(); ++i)
        if (!same_type(it.value()[i], model.front()))
          throw ConfigError(path + "[" + std::to_string(i) + "]", "wrong element type");
    }
    out[it.key()] = it.value();
  }
}

int positive_int(const json& p, const std::string& key, int min = 1) {
  const int v = p.at(key).get<int>();
  if (v < min) throw ConfigError("params." + key, "must be at least " + std::to_string(min));
  return v;
}

std::vector<int> int_list(const json& p, const std::string& key, int min = 1) {
  std::vector<int> v = p.at(key).get<std::vector<int>>();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < min)
      throw ConfigError("params." + key + "[" + std::to_string(i) + "]", "must be at least " + std::to_string(min));
  return v;
}

std::vector<double> time_list(const json& p, const std::string& key) {
  std::vector<double> v = p.at(key).get<std::vector<double>>();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
      throw ConfigError("params." + key + "[" + std::to_string(i) + "]", "must be a finite nonnegative time");
  return v;
}

double positive_double(const json& p, const std::string& key) {
  const double v = p.at(key).get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("params." + key, "must be positive");
  return v;
}

// ---------------------------------------------------------------------------
// timer

RunResult run_timer(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const double tau = positive_double(p, "tau");
  const int table_T = positive_int(p, "table_T");
  const auto table_times = time_list(p, "table_times");
  const auto gadget_T = int_list(p, "gadget_T");
  const auto gadget_times = time_list(p, "gadget_times");
  const auto ode_T = int_list(p, "ode_T");
  const auto ode_times = time_list(p, "ode_times");
  const auto switch_T = int_list(p, "switch_T");
  for (std::size_t i = 0; i < gadget_T.size(); ++i)
    if (gadget_T[i] > 6) throw ConfigError("params.gadget_T[" + std::to_string(i) + "]", "qubit gadget limited to T <= 6");

  RunResult r;
  Table table{c.name + ".csv", {"t", "k", "p_k"}, {}};
  const auto spec = TimerSpec::with_tau(table_T, tau);
  for (double t : table_times) {
    const auto d = birth_chain_dist(spec, t);
    for (int k = 0; k <= table_T; ++k) table.rows.push_back({num(t), num(k), num(d.p[k])});
  }

  struct Check {
    std::string kind;
    int T;
    double t;
  };
  std::vector<Check> checks;
  for (int T : gadget_T)
    for (double t : gadget_times) checks.push_back({"gadget", T, t});
  for (int T : ode_T)
    for (double t : ode_times) checks.push_back({"ode", T, t});
  const auto errors = parallel_map<double>(checks.size(), workers, [&](std::size_t i) {
    const auto s = TimerSpec::with_tau(checks[i].T, tau);
    const auto ref = birth_chain_dist(s, checks[i].t);
    const auto other = checks[i].kind == "gadget" ? quantum_timer_dist(s, checks[i].t) : chain_ode_dist(s, checks[i].t);
    double e = 0.0;
    for (std::size_t k = 0; k < ref.p.size(); ++k) e = std::max(e, std::abs(ref.p[k] - other.p[k]));
    return e;
  });
  Table check_table{c.name + "_checks.csv", {"check", "T", "t", "max_abs_error"}, {}};
  double gadget_err = 0.0, ode_err = 0.0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    check_table.rows.push_back({checks[i].kind, num(checks[i].T), num(checks[i].t), num(errors[i])});
    (checks[i].kind == "gadget" ? gadget_err : ode_err) = std::max(checks[i].kind == "gadget" ? gadget_err : ode_err, errors[i]);
  }

  Table sw{c.name + "_switch.csv",
           {"T", "epsilon", "p_early", "p_late", "log_p_early", "log_p_late", "scaling"},
           {}};
  std::vector<double> pe, pl, re, rl;
  for (int T : switch_T) {
    const auto s = TimerSpec::with_tau(T, tau);
    const auto b = switch_bounds(s, default_epsilon(s));
    sw.rows.push_back({num(T), num(b.epsilon), num(b.p_early), num(b.p_late), num(b.log_p_early), num(b.log_p_late),
                       num(b.scaling)});
    pe.push_back(b.log_p_early);
    pl.push_back(b.log_p_late);
    re.push_back(b.log_p_early / b.scaling);
    rl.push_back(b.log_p_late / b.scaling);
  }
  auto spread = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
  };
  r.summary = {{"gadget_max_error", gadget_err},
               {"ode_max_error", ode_err},
               {"early_strictly_decreasing", strictly_decreasing(pe)},
               {"late_strictly_decreasing", strictly_decreasing(pl)},
               {"early_slope", re},
               {"late_slope", rl},
               {"early_slope_spread", spread(re)},
               {"late_slope_spread", spread(rl)}};
  r.tables = {table, check_table, sw};
  return r;
}

// ---------------------------------------------------------------------------
// switch

Vector bits_ket(const std::string& bits, const std::string& field) {
  if (bits.empty()) throw ConfigError(field, "empty bit string");
  std::size_t index = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw ConfigError(field, "bits must be 0 or 1");
    index = 2 * index + static_cast<std::size_t>(ch - '0');
  }
  return basis_ket(std::size_t{1} << bits.size(), index);
}

RunResult run_switch(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const double tau = positive_double(p, "tau");
  const auto Ts = int_list(p, "T_values", 2);
  const double t_after = p.at("t_after").get<double>();
  if (t_after < 0.0) throw ConfigError("params.t_after", "must be nonnegative");
  const std::string bits = p.at("initial").get<std::string>();
  const Vector psi0 = bits_ket(bits, "params.initial");
  const int nq = static_cast<int>(bits.size());
  const auto geo = LatticeGeometry::chain(std::vector<int>(nq, 2));
  const Vector plus = Vector::Constant(2, 1.0 / std::sqrt(2.0));
  const std::vector<Lindbladian> stages{product_driver(geo, plus), product_driver(geo, basis_ket(2, 0))};
  const Matrix rho0 = projector(psi0);
  const double t = tau + t_after;

  const auto dist = parallel_map<double>(Ts.size(), workers, [&](std::size_t i) {
    const auto sw = build_switched(stages, TimerSpec::with_tau(Ts[i], tau));
    const std::vector<double> times{t};
    const Matrix out = run_switched(sw, rho0, times).snapshots.front().system;
    return trace_distance(out, sequential_oracle(stages, sw.switch_times(), rho0, t));
  });
  Table table{c.name + ".csv", {"T", "distance"}, {}};
  for (std::size_t i = 0; i < Ts.size(); ++i) table.rows.push_back({num(Ts[i]), num(dist[i])});

  // Operator identity on the qubit gadget, all system sites sharing one timer.
  const int fT = positive_int(p, "factorization_T");
  const auto shared = build_switched(stages, TimerSpec::with_tau(fT, tau), std::vector<int>(nq, 0));
  const auto g = build_qubit_gadget(shared);
  double fact = 0.0;
  for (int s = 0; s < shared.num_stages(); ++s) fact = std::max(fact, factorization_residual(g, s));

  RunResult r;
  r.tables = {table};
  r.summary = {{"T_values", Ts},
               {"distances", dist},
               {"strictly_decreasing", strictly_decreasing(dist)},
               {"final_distance", dist.empty() ? 0.0 : dist.back()},
               {"factorization_T", fT},
               {"gadget_dim", g.composite.dim()},
               {"factorization_residual", fact}};
  return r;
}

// ---------------------------------------------------------------------------
// compile

RunResult run_compile(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  CircuitSchedule schedule;
  try {
    schedule = schedule_from_json(p.at("schedule"));
  } catch (const Error& e) {
    throw ConfigError("params.schedule", e.what());
  }
  const int sites = positive_int(p, "sites");
  const auto geo = LatticeGeometry::chain(std::vector<int>(sites, 2));
  try {
    schedule.validate(geo);
  } catch (const Error& e) {
    throw ConfigError("params.schedule", e.what());
  }
  const int initial = p.at("initial").get<int>();
  if (initial < 0 || static_cast<std::size_t>(initial) >= geo.hilbert_dim())
    throw ConfigError("params.initial", "basis index out of range");
  const auto Ts = int_list(p, "T_values", 1);
  const double settle = p.at("settle").get<double>();
  const Matrix rho0 = projector(basis_ket(geo.hilbert_dim(), initial));
  const Matrix u = schedule.unitary(geo);
  const Matrix target = u * rho0 * u.adjoint();
  const double t = schedule.total_dwell() + settle;

  const auto dist = parallel_map<double>(Ts.size(), workers, [&](std::size_t i) {
    const auto sw = compile_circuit(geo, schedule, Ts[i]);
    const std::vector<double> times{t};
    return trace_distance(run_switched(sw, rho0, times).snapshots.front().system, target);
  });
  Table table{c.name + ".csv", {"T", "distance"}, {}};
  for (std::size_t i = 0; i < Ts.size(); ++i) table.rows.push_back({num(Ts[i]), num(dist[i])});
  RunResult r;
  r.tables = {table};
  r.summary = {{"T_values", Ts},
               {"distances", dist},
               {"strictly_decreasing", strictly_decreasing(dist)},
               {"final_distance", dist.empty() ? 0.0 : dist.back()},
               {"evaluation_time", t}};
  return r;
}

// ---------------------------------------------------------------------------
// qa

RunResult run_qa(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const int N = positive_int(p, "N", 3);
  const int points = positive_int(p, "grid_points", 2);
  const double cut = positive_double(p, "cut_times_lambda");
  const double q = positive_double(p, "q");
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) grid.push_back(static_cast<double>(k) / (points - 1));

  struct Entry {
    std::string kind, path;
    QAMode mode = QAMode::Exact;
    int omega = 0;
  };
  std::vector<Entry> entries;
  for (const char* path : {"single_qubit", "uncoupled", "paramagnetic"})
    for (QAMode mode : {QAMode::Exact, QAMode::Filtered}) entries.push_back({"transport", path, mode, 0});
  entries.push_back({"delta", "paramagnetic", QAMode::Filtered, 0});
  entries.push_back({"patch", "paramagnetic", QAMode::Filtered, 0});
  for (int omega : int_list(p, "circuit_omegas")) entries.push_back({"circuit", "paramagnetic", QAMode::Filtered, omega});

  auto make_path = [&](const std::string& name, int n) {
    if (name == "single_qubit") return single_qubit_path();
    if (name == "uncoupled") return uncoupled_path(n);
    return paramagnetic_ring_path(n);
  };
  auto filter_for = [&](const HamiltonianPath& path) {
    FilterSpec f = FilterSpec::for_gap(gap_profile(path, points).min_gap, cut);
    f.q = q;
    return f;
  };

  const int dN = positive_int(p, "delta_N", 3), pN = positive_int(p, "patch_N", 3);
  const double ds = p.at("delta_s").get<double>();
  const int n_max = positive_int(p, "delta_n_max", 1);
  const auto omegas = int_list(p, "patch_omegas");
  const int psteps = positive_int(p, "patch_steps"), csteps = positive_int(p, "circuit_steps");

  const auto rows = parallel_map<std::vector<std::vector<double>>>(entries.size(), workers, [&](std::size_t i) {
    const auto& e = entries[i];
    std::vector<std::vector<double>> out;
    if (e.kind == "transport") {
      const auto path = make_path(e.path, N);
      const auto f = filter_for(path);
      const auto res = transport(path, e.mode, f, grid, 1e-10);
      out.push_back({static_cast<double>(path.geometry().num_sites()), gap_profile(path, points).min_gap,
                     res.min_fidelity, res.fidelity.back()});
    } else if (e.kind == "delta") {
      const auto path = make_path(e.path, dN);
      const auto d = delta_decomposition(path, ds, 0, n_max, filter_for(path));
      for (double v : d.norms) out.push_back({v});
    } else if (e.kind == "patch") {
      const auto path = make_path(e.path, pN);
      std::vector<int> a;
      for (int k = 0; k < pN / 2; ++k) a.push_back(k);
      for (const auto& s : patch_split(path, a, omegas, QAMode::Filtered, filter_for(path), psteps))
        out.push_back({static_cast<double>(s.omega), static_cast<double>(s.region.size()), s.residual, s.support_leak});
    } else {
      const auto path = make_path(e.path, pN);
      const auto pc = circuit_from_path(path, e.omega, QAMode::Filtered, filter_for(path), csteps);
      out.push_back({static_cast<double>(e.omega), pc.fidelity, pc.distance});
    }
    return out;
  });

  RunResult r;
  Table transport_table{c.name + ".csv", {"path", "N", "mode", "min_gap", "min_fidelity", "end_fidelity"}, {}};
  Table delta_table{c.name + "_delta.csv", {"n", "delta_norm"}, {}};
  Table patch_table{c.name + "_patch.csv", {"omega", "region_size", "residual", "support_leak"}, {}};
  Table circuit_table{c.name + "_circuit.csv", {"omega", "fidelity", "distance"}, {}};
  json transports = json::array();
  std::vector<double> deltas, residuals;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (e.kind == "transport") {
      const auto& v = rows[i].front();
      const std::string mode = e.mode == QAMode::Exact ? "exact" : "filtered";
      transport_table.rows.push_back({e.path, num(static_cast<int>(v[0])), mode, num(v[1]), num(v[2]), num(v[3])});
      transports.push_back({{"path", e.path}, {"mode", mode}, {"min_fidelity", v[2]}, {"end_fidelity", v[3]}});
    } else if (e.kind == "delta") {
      for (std::size_t n = 0; n < rows[i].size(); ++n) {
        delta_table.rows.push_back({num(static_cast<int>(n)), num(rows[i][n][0])});
        deltas.push_back(rows[i][n][0]);
      }
    } else if (e.kind == "patch") {
      for (const auto& v : rows[i]) {
        patch_table.rows.push_back({num(static_cast<int>(v[0])), num(static_cast<int>(v[1])), num(v[2]), num(v[3])});
        residuals.push_back(v[2]);
      }
    } else {
      const auto& v = rows[i].front();
      circuit_table.rows.push_back({num(static_cast<int>(v[0])), num(v[1]), num(v[2])});
    }
  }
  std::vector<double> tail(deltas.begin() + std::min<std::size_t>(2, deltas.size()), deltas.end());
  r.tables = {transport_table, delta_table, patch_table};
  if (!circuit_table.rows.empty()) r.tables.push_back(circuit_table);
  r.summary = {{"transport", transports},
               {"delta_norms", deltas},
               {"delta_decreasing_from_2", strictly_decreasing(tail)},
               {"patch_omegas", omegas},
               {"patch_residuals", residuals},
               {"patch_strictly_decreasing", strictly_decreasing(residuals)}};
  return r;
}

// ---------------------------------------------------------------------------
// condense

// Trace distance restricted to the union of the supports (both operators vanish elsewhere).
double sparse_trace_distance(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Index> idx;
  for (const SparseMatrix* m : {&a, &b})
    for (int k = 0; k < m->outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(*m, k); it; ++it) {
        idx.push_back(it.row());
        idx.push_back(it.col());
      }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  const auto m = static_cast<Eigen::Index>(idx.size());
  if (m > 4096) throw GuardError("sparse_trace_distance: joint support exceeds the dense guard");
  std::map<Eigen::Index, Eigen::Index> pos;
  for (Eigen::Index i = 0; i < m; ++i) pos[idx[i]] = i;
  Matrix da = Matrix::Zero(m, m), db = Matrix::Zero(m, m);
  for (auto [src, dst] : {std::pair{&a, &da}, std::pair{&b, &db}})
    for (int k = 0; k < src->outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(*src, k); it; ++it) (*dst)(pos[it.row()], pos[it.col()]) += it.value();
  return trace_distance(da, db);
}

SparseMatrix sparse_projector(const Vector& v) {
  std::vector<Eigen::Triplet<cd>> trip;
  std::vector<Eigen::Index> nz;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > 0.0) nz.push_back(i);
  for (auto i : nz)
    for (auto j : nz) trip.emplace_back(i, j, v(i) * std::conj(v(j)));
  SparseMatrix m(v.size(), v.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

RunResult run_condense(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const auto Ns = int_list(p, "N_values", 2);
  const int trajN = positive_int(p, "trajectory_N", 2);
  const auto times = time_list(p, "times");
  const int intN = positive_int(p, "integrate_N", 1);
  const auto int_times = time_list(p, "integrate_times");
  const int drvN = positive_int(p, "driver_N", 1);
  const auto drv_times = time_list(p, "driver_times");
  for (const auto& [key, v] : {std::pair{"trajectory_N", trajN}, std::pair{"integrate_N", intN}})
    if (v > 6) throw ConfigError(std::string("params.") + key, "at most 6 sites");
  if (intN > 3) throw ConfigError("params.integrate_N", "dense integration limited to 3 sites");
  if (drvN > 4) throw ConfigError("params.driver_N", "dense evolution limited to 4 qubits");
  for (std::size_t i = 0; i < Ns.size(); ++i)
    if (Ns[i] > 6) throw ConfigError("params.N_values[" + std::to_string(i) + "]", "at most 6 sites");

  const auto ch = condensation_channel();
  auto ghz4 = [](int N) { return ghz_on_levels({0, 1, 2, 3}, N, 4); };
  auto ghz2 = [](int N) { return ghz_on_levels({0, 2}, N, 4); };

  struct Job {
    std::string kind;
    int N;
    double t;
  };
  std::vector<Job> jobs;
  for (int N : Ns) jobs.push_back({"limit", N, 0.0});
  for (double t : times) jobs.push_back({"trajectory", trajN, t});
  for (double t : int_times) jobs.push_back({"integrate", intN, t});
  for (double t : drv_times) jobs.push_back({"driver", drvN, t});
  const double inf = std::numeric_limits<double>::infinity();

  const auto values = parallel_map<double>(jobs.size(), workers, [&](std::size_t i) {
    const auto& j = jobs[i];
    if (j.kind == "driver") {
      const auto geo = LatticeGeometry::chain(std::vector<int>(j.N, 2));
      const std::size_t d = geo.hilbert_dim();
      const Matrix out = evolve(product_driver(geo, basis_ket(2, 0)), projector(basis_ket(d, d - 1)), j.t);
      return trace_distance(out, projector(basis_ket(d, 0)));
    }
    const auto geo = LatticeGeometry::chain(std::vector<int>(j.N, 4));
    if (j.kind == "integrate") {
      const Matrix rho0 = projector(ghz4(j.N));
      const Matrix exact = evolve(ghz_condense_lindbladian(geo), rho0, j.t);
      return trace_distance(exact, closed_form_evolve(rho0, geo, ch, j.t));
    }
    const SparseMatrix rho0 = sparse_projector(ghz4(j.N));
    const SparseMatrix out = closed_form_evolve(rho0, geo, ch, j.kind == "limit" ? inf : j.t);
    return sparse_trace_distance(out, sparse_projector(ghz2(j.N)));
  });

  Table traj{c.name + ".csv", {"t", "distance"}, {}};
  Table drv{c.name + "_driver.csv", {"t", "distance", "bound"}, {}};
  json limits = json::object();
  double integrate_err = 0.0, driver_gap = 0.0, final_distance = 0.0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    if (j.kind == "limit") limits[std::to_string(j.N)] = values[i];
    if (j.kind == "trajectory") {
      traj.rows.push_back({num(j.t), num(values[i])});
      final_distance = values[i];
    }
    if (j.kind == "integrate") integrate_err = std::max(integrate_err, values[i]);
    if (j.kind == "driver") {
      const double bound = 1.0 - std::pow(1.0 - std::exp(-j.t), j.N);
      drv.rows.push_back({num(j.t), num(values[i]), num(bound)});
      driver_gap = std::max(driver_gap, std::abs(values[i] - bound));
    }
  }
  RunResult r;
  r.tables = {traj, drv};
  r.summary = {{"limit_distance", limits},
               {"final_distance", final_distance},
               {"final_time", times.empty() ? 0.0 : times.back()},
               {"idempotence_residual", idempotence_residual(ch)},
               {"trace_preservation_defect", ch.trace_preservation_defect()},
               {"integration_vs_closed_form", integrate_err},
               {"driver_bound_gap", driver_gap}};
  return r;
}

// ---------------------------------------------------------------------------
// nogo

RunResult run_nogo(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const int n = positive_int(p, "n", 2), lx = positive_int(p, "lx", 2), ly = positive_int(p, "ly", 2);
  const auto rates = p.at("rates").get<std::vector<double>>();
  for (std::size_t i = 0; i < rates.size(); ++i)
    if (!(rates[i] >= 0.0)) throw ConfigError("params.rates[" + std::to_string(i) + "]", "must be nonnegative");
  const double t = p.at("t").get<double>();
  const int ell = positive_int(p, "ell", 0);
  const int x0 = p.at("x0").get<int>(), x1 = p.at("x1").get<int>();
  const auto ms = int_list(p, "ghz_m");
  const int gn = positive_int(p, "ghz_n", 2), gN = positive_int(p, "ghz_N", 2);
  if (n != 2) throw ConfigError("params.n", "depolarizing noise is defined for qubits; use n = 2");
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (ms[i] > gn) throw ConfigError("params.ghz_m[" + std::to_string(i) + "]", "must not exceed ghz_n");

  const QuantumDouble qd(n, lx, ly);
  const Vector phi = qd.ground_basis().front();
  const auto reports = parallel_map<OverlapReport>(rates.size(), workers, [&](std::size_t i) {
    return overlap_probe(qd, phi, depolarizing_lindbladian(qd.geometry(), rates[i]), t, ell, x0, x1);
  });
  Table table{c.name + ".csv", {"r", "t", "ell", "det_T", "det_S", "max_residual", "schwarz_defect"}, {}};
  std::vector<double> det_gap, schwarz, position;
  json gram_defects = json::array();
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const auto& rep = reports[i];
    table.rows.push_back({num(rates[i]), num(t), num(ell), num(rep.det_t), num(rep.det_s), num(rep.max_residual),
                          num(rep.schwarz_defect)});
    det_gap.push_back(std::abs(rep.det_t - rep.det_s));
    schwarz.push_back(rep.schwarz_defect);
    position.push_back(rep.position_defect);
    gram_defects.push_back((rep.gram - rep.reference).cwiseAbs().maxCoeff());
  }

  const auto ggeo = LatticeGeometry::ring(gN, gn);
  Table ghz{c.name + "_ghz.csv", {"m", "n", "rank", "max_residual"}, {}};
  json ranks = json::object();
  for (int m : ms) {
    const auto rep = ghz_nogo_probe(m, gn, Lindbladian(ggeo), t, ell);
    ghz.rows.push_back({num(m), num(gn), num(rep.rank), num(rep.max_residual)});
    ranks[std::to_string(m)] = rep.rank;
  }
  RunResult r;
  r.tables = {table, ghz};
  r.summary = {{"rates", rates},
               {"det_gap", det_gap},
               {"schwarz_defect", schwarz},
               {"position_defect", position},
               {"gram_minus_reference", gram_defects},
               {"det_gap_strictly_increasing", strictly_increasing(det_gap)},
               {"schwarz_strictly_increasing", strictly_increasing(schwarz)},
               {"ghz_rank", ranks}};
  return r;
}

// ---------------------------------------------------------------------------
// evolve (channel axioms on random generators)

RunResult run_evolve(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const int samples = positive_int(p, "samples");
  const double t = positive_double(p, "t"), s = positive_double(p, "s");
  const int jumps = positive_int(p, "jumps_per_term");
  std::vector<LatticeGeometry> geos;
  const json& g = p.at("geometries");
  if (g.empty()) throw ConfigError("params.geometries", "must not be empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::string path = "params.geometries[" + std::to_string(i) + "]";
    if (!g[i].is_array() || g[i].size() != 2 || !g[i][0].is_number_integer() || !g[i][1].is_number_integer())
      throw ConfigError(path, "expected [sites, local_dim]");
    const int ns = g[i][0].get<int>(), ld = g[i][1].get<int>();
    if (ns < 1 || ld < 2) throw ConfigError(path, "need sites >= 1 and local_dim >= 2");
    auto geo = ns >= 3 ? LatticeGeometry::ring(ns, ld) : LatticeGeometry::chain(std::vector<int>(ns, ld));
    if (geo.hilbert_dim() > 16) throw ConfigError(path, "dimension above 16");
    geos.push_back(std::move(geo));
  }

  using Row = std::array<double, 6>;
  const auto rows = parallel_map<Row>(samples, workers, [&](std::size_t i) {
    Rng rng = entry_rng(c.seed, i);
    const auto& geo = geos[i % geos.size()];
    const auto l = random_lindbladian(geo, rng, jumps);
    const auto d = static_cast<Eigen::Index>(geo.hilbert_dim());
    const Matrix pt = propagator(l, t), ps = propagator(l, s), pts = propagator(l, t + s);
    const Vector vid = matrix_to_vec(Matrix::Identity(d, d));
    const double tp = (pt.adjoint() * vid - vid).cwiseAbs().maxCoeff();
    const double choi = choi_of_superoperator(pt).min_eigenvalue;
    const Matrix rho = random_density_matrix(d, rng), sigma = random_density_matrix(d, rng);
    const Matrix out_r = vec_to_matrix(pt * matrix_to_vec(rho), d), out_s = vec_to_matrix(pt * matrix_to_vec(sigma), d);
    const double contract = trace_norm(out_r - out_s) - trace_norm(rho - sigma);
    const Matrix a = random_matrix(d, d, rng);
    const double dual = std::abs((a * out_r).trace() - (heisenberg_evolve(l, a, t) * rho).trace());
    const double semi = (pts - pt * ps).cwiseAbs().maxCoeff();
    return Row{static_cast<double>(d), tp, choi, contract, dual, semi};
  });
  Table table{c.name + ".csv",
              {"index", "dim", "tp_defect", "choi_min_eig", "contractivity_excess", "duality_defect", "semigroup_defect"},
              {}};
  double tp = 0, choi = std::numeric_limits<double>::infinity(), contract = -std::numeric_limits<double>::infinity(), dual = 0, semi = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = rows[i];
    table.rows.push_back({num(i), num(static_cast<int>(v[0])), num(v[1]), num(v[2]), num(v[3]), num(v[4]), num(v[5])});
    tp = std::max(tp, v[1]);
    choi = std::min(choi, v[2]);
    contract = std::max(contract, v[3]);
    dual = std::max(dual, v[4]);
    semi = std::max(semi, v[5]);
  }
  RunResult r;
  r.tables = {table};
  r.summary = {{"samples", samples},
               {"max_tp_defect", tp},
               {"min_choi_eigenvalue", choi},
               {"max_contractivity_excess", contract},
               {"max_duality_defect", dual},
               {"max_semigroup_defect", semi}};
  return r;
}

// ---------------------------------------------------------------------------
// double (quantum double algebra)

RunResult run_double(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const int n = positive_int(p, "n", 2), lx = positive_int(p, "lx", 2), ly = positive_int(p, "ly", 2);
  const int samples = positive_int(p, "samples", 0);
  const QuantumDouble qd(n, lx, ly);
  const int gs = n * n;

  const Matrix xx = qd.project(qd.logical_x_x()), zy = qd.project(qd.logical_z_y());
  const Matrix xz = xx * zy, zx = zy * xx;
  Eigen::Index bi = 0, bj = 0;
  zx.cwiseAbs().maxCoeff(&bi, &bj);
  const cd phase = xz(bi, bj) / zx(bi, bj);
  const double phase_residual = (xz - phase * zx).cwiseAbs().maxCoeff();

  double homotopy = 0.0;
  for (int k = 1; k < lx; ++k)
    homotopy = std::max(homotopy, (qd.project(qd.logical_x_x(k)) - xx).cwiseAbs().maxCoeff());
  for (int k = 1; k < ly; ++k) {
    homotopy = std::max(homotopy, (qd.project(qd.logical_z_y(k)) - zy).cwiseAbs().maxCoeff());
    homotopy = std::max(homotopy, (qd.project(qd.logical_x_y(k)) - qd.project(qd.logical_x_y(0))).cwiseAbs().maxCoeff());
  }
  for (int k = 1; k < lx; ++k)
    homotopy = std::max(homotopy, (qd.project(qd.logical_z_x(k)) - qd.project(qd.logical_z_x(0))).cwiseAbs().maxCoeff());

  using Row = std::array<int, 3>;
  const auto rows = parallel_map<Row>(samples, workers, [&](std::size_t i) {
    Rng rng = entry_rng(c.seed, i);
    const auto rep = basis_generation_check(qd, random_ket(gs, rng));
    return Row{rep.rank_x, rep.rank_z, rep.passes ? 1 : 0};
  });
  Table table{c.name + ".csv", {"sample", "rank_x", "rank_z", "passes"}, {}};
  int passed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.rows.push_back({num(i), num(rows[i][0]), num(rows[i][1]), num(rows[i][2])});
    passed += rows[i][2];
  }
  json dense = nullptr;
  if (qd.dim() <= 4096) dense = qd.ground_space_dimension_dense();
  RunResult r;
  r.tables = {table};
  r.summary = {{"ground_space_dimension_symbolic", qd.ground_space_dimension_symbolic()},
               {"ground_space_dimension_dense", dense},
               {"logical_phase_re", phase.real()},
               {"logical_phase_im", phase.imag()},
               {"logical_phase_residual", phase_residual},
               {"homotopy_defect", homotopy},
               {"ground_basis_residual", qd.ground_basis_residual()},
               {"samples", samples},
               {"basis_generation_passed", passed}};
  return r;
}

// ---------------------------------------------------------------------------
// spt

RunResult run_spt(const ExperimentConfig& c, int workers) {
  const json& p = c.params;
  const int N = positive_int(p, "N", 2);
  const auto times = time_list(p, "times");
  const int samples = positive_int(p, "samples");
  const auto geo = LatticeGeometry::ring(2, 4);
  std::vector<Matrix> u;
  for (int g = 0; g < 4; ++g) u.push_back(pauli_projective_rep().onsite(g));
  Rng rng = entry_rng(c.seed, 0);
  const double cov = covariance_check(product_driver(geo, psi_plus(2)), u, rng, samples);
  const double neg = covariance_check(product_driver(geo, basis_ket(4, 0)), u, rng, samples);
  const auto bridge = spt_bridge_states(N, trivial_rep(), pauli_projective_rep());
  const auto evs = parallel_map<BridgeEvolution>(times.size(), workers,
                                                  [&](std::size_t i) { return evolve_bridge(bridge, times[i]); });
  Table table{c.name + ".csv", {"t", "factor0", "factor1", "factor2", "distance_bound", "symmetry_defect"}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& e = evs[i];
    table.rows.push_back({num(times[i]), num(e.factor_distances[0]), num(e.factor_distances[1]),
                          num(e.factor_distances[2]), num(e.distance_bound), num(e.max_symmetry_defect)});
  }
  RunResult r;
  r.tables = {table};
  r.summary = {{"covariance_residual", cov},
               {"negative_control_residual", neg},
               {"final_time", times.empty() ? 0.0 : times.back()},
               {"final_distance_bound", evs.empty() ? 0.0 : evs.back().distance_bound},
               {"final_symmetry_defect", evs.empty() ? 0.0 : evs.back().max_symmetry_defect}};
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> k;
  for (const auto& [name, _] : schemas()) k.push_back(name);
  return k;
}

json default_params(const std::string& kind) {
  auto it = schemas().find(kind);
  if (it == schemas().end()) throw ConfigError("kind", "unknown experiment kind '" + kind + "'");
  return it->second;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("$", "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const std::vector<std::string> allowed{"schema_version", "kind", "name", "seed", "params"};
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) throw ConfigError(it.key(), "unknown key");
  }
  if (!j.contains("schema_version")) throw ConfigError("schema_version", "missing");
  if (!j.at("schema_version").is_number_integer() || j.at("schema_version").get<int>() != kSchemaVersion)
    throw ConfigError("schema_version", "expected " + std::to_string(kSchemaVersion));
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("kind", "missing or not a string");
  ExperimentConfig c;
  c.kind = j.at("kind").get<std::string>();
  if (!schemas().count(c.kind)) throw ConfigError("kind", "unknown experiment kind '" + c.kind + "'");
  c.name = c.kind;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) throw ConfigError("name", "must be a string");
    c.name = j.at("name").get<std::string>();
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos)
      throw ConfigError("name", "must be a plain file stem");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0))
      throw ConfigError("seed", "must be a nonnegative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  check_params(c.kind, j.contains("params") ? j.at("params") : json::object(), c.params);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

std::string Table::render() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out.str();
}

RunResult run_experiment(const ExperimentConfig& config, int workers) {
  static const std::map<std::string, RunResult (*)(const ExperimentConfig&, int)> dispatch{
      {"timer", run_timer}, {"switch", run_switch},     {"compile", run_compile}, {"qa", run_qa},
      {"condense", run_condense}, {"nogo", run_nogo}, {"evolve", run_evolve},   {"double", run_double},
      {"spt", run_spt}};
  RunResult r = dispatch.at(config.kind)(config, workers);
  r.summary = json{{"name", config.name},
                   {"kind", config.kind},
                   {"seed", config.seed},
                   {"schema_version", kSchemaVersion},
                   {"params", config.params},
                   {"results", r.summary}};
  return r;
}

void write_result(const RunResult& result, const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::pair<fs::path, std::string>> files;
  for (const auto& t : result.tables) files.emplace_back(out_dir / t.file, t.render());
  files.emplace_back(out_dir / (config.name + ".json"), result.summary.dump(2) + "\n");
  std::vector<fs::path> staged;
  try {
    for (const auto& [path, content] : files) {
      fs::path tmp = path;
      tmp += ".partial";
      std::ofstream out(tmp, std::ios::binary);
      out << content;
      out.close();
      if (!out) throw Error("cannot write " + tmp.string());
      staged.push_back(tmp);
    }
  } catch (...) {
    for (const auto& p : staged) fs::remove(p);
    throw;
  }
  for (std::size_t i = 0; i < files.size(); ++i) fs::rename(staged[i], files[i].first);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"qphase experiment runner"};
  std::string config_path, out_dir = ".";
  int workers = 1;
  std::optional<std::uint64_t> seed;
  bool list = false;
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--workers", workers, "Worker threads for sweeps")->check(CLI::Range(1, 256));
  app.add_option("--seed", seed, "Override the config seed");
  app.add_flag("--list-kinds", list, "Print the experiment kinds and their default parameters");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (list) {
    json all = json::object();
    for (const auto& k : experiment_kinds()) all[k] = default_params(k);
    std::cout << all.dump(2) << '\n';
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return 2;
  }
  try {
    ExperimentConfig c = load_config(config_path);
    if (seed) c.seed = *seed;
    const auto result = run_experiment(c, workers);
    write_result(result, c, out_dir);
    std::cerr << c.name << ": wrote " << result.tables.size() << " table(s) to " << out_dir << '\n';
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const GuardError& e) {
    std::cerr << "numeric guard: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qphase::cli
