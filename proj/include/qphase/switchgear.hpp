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

#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "qphase/lindblad.hpp"
#include "qphase/timer.hpp"

namespace qphase {

/// Stage generators on a common system, each term controlled by a dissipative timer.
///
/// A term of stage s is active while the level of its controlling timer lies in
/// [switch_levels[s-1], switch_levels[s]). Term X is controlled by the timer of its
/// first support site; only timers that control some term are materialized.
class SwitchedLindbladian {
 public:
  SwitchedLindbladian(std::vector<Lindbladian> stages, TimerSpec timer, std::vector<int> switch_levels,
                      std::vector<int> timer_of_site);

  const LatticeGeometry& system_geometry() const { return stages_.front().geometry(); }
  const std::vector<Lindbladian>& stages() const { return stages_; }
  const TimerSpec& timer() const { return timer_; }
  const std::vector<int>& switch_levels() const { return levels_; }
  int num_stages() const { return static_cast<int>(stages_.size()); }
  int num_timers() const { return static_cast<int>(timer_ids_.size()); }
  /// Original timer labels (as given by timer_of_site) of the materialized timers.
  const std::vector<int>& timer_ids() const { return timer_ids_; }
  /// term_timer()[s][x]: materialized timer controlling term x of stage s.
  const std::vector<std::vector<int>>& term_timer() const { return term_timer_; }

  int stage_of_level(int level) const;
  /// Deterministic switch times level / gamma.
  std::vector<double> switch_times() const;

  /// System generator with every timer pinned at the given levels.
  Lindbladian system_generator(const std::vector<int>& timer_levels) const;
  /// Sum of the norm estimates of all stage generators.
  double system_norm_estimate() const;

 private:
  std::vector<Lindbladian> stages_;
  TimerSpec timer_;
  std::vector<int> levels_;
  std::vector<int> timer_ids_;
  std::vector<std::vector<int>> term_timer_;
};

/// Levels T*s/(k-1), s = 1..k-1, for k stages; the last stage starts when the top level is hit.
SwitchedLindbladian build_switched(std::vector<Lindbladian> stages, const TimerSpec& timer,
                                   std::vector<int> timer_of_site = {});

/// System (x) timer registers with block-diagonal timer part:
/// columns of `blocks` are vec(sigma_c) for each register configuration c.
struct CompositeState {
  Matrix blocks;
  int num_timers = 0;
  int T = 0;

  std::size_t num_configs() const { return static_cast<std::size_t>(blocks.cols()); }
  /// Level of timer a in configuration c.
  int level(std::size_t c, int a) const;
  Matrix system_marginal() const;
  std::vector<double> config_probabilities() const;
  /// Level distribution of one timer.
  std::vector<double> timer_marginal(int a) const;
  /// S(rho_S) - sum_c p_c S(sigma_c / p_c), in nats.
  double mutual_information() const;
};

CompositeState initial_composite(const SwitchedLindbladian& sw, const Matrix& rho0);

struct SwitchedSnapshot {
  double t = 0.0;
  Matrix system;
  double band_leak = 0.0;          // probability that some timer is off its nominal band
  double ancilla_distance = 0.0;   // distance of the register marginal to all-timers-absorbed
  double mutual_information = 0.0;
};

struct SwitchedRun {
  std::vector<SwitchedSnapshot> snapshots;
  CompositeState final_state;
  IntegratorStats stats;
};

SwitchedRun run_switched(const SwitchedLindbladian& sw, const Matrix& rho0, std::span<const double> times,
                         double tol = 1e-10);
/// Probability that some timer is outside the band of the stage nominally active at t.
double band_leak(const SwitchedLindbladian& sw, double t);

/// Evolution under stage s on [switch_times[s-1], switch_times[s]).
Matrix sequential_oracle(const std::vector<Lindbladian>& stages, const std::vector<double>& switch_times,
                         const Matrix& rho0, double t, const NumericPolicy& policy = default_policy());

/// The literal construction: each timer is T+1 qubits and each stage term is
/// conditioned on projectors of two timer qubits. Site order: system, then timers.
struct QubitGadget {
  Lindbladian composite;
  Lindbladian timers_only;
  std::vector<Lindbladian> stage_lifts;  // identity on timers (x) stage generator
  int system_sites = 0;
  std::vector<std::vector<int>> timer_qubits;  // qubit sites of each materialized timer
  std::vector<int> switch_levels;
  Matrix initial_state(const Matrix& rho0) const;
  Matrix system_marginal(const Matrix& rho) const;
  /// Projector onto the configurations in which every timer is in the band of `stage`.
  Matrix band_projector(int stage) const;
};
QubitGadget build_qubit_gadget(const SwitchedLindbladian& sw, std::size_t max_dim = 256);

/// max over matrix units E of |P L(P E P) P - P (L_T + L_stage)(P E P) P| with P the band projector.
double factorization_residual(const QubitGadget& g, int stage);
/// max over matrix units of |P [L_T, L_S](P E P) P| for the band of `stage`.
double band_commutator_residual(const QubitGadget& g, int stage);

struct Gate {
  std::vector<int> support;
  Matrix unitary;
};
struct GateLayer {
  std::vector<Gate> gates;
  double dwell = 1.0;
};
struct CircuitSchedule {
  std::vector<GateLayer> layers;

  /// Disjoint in-layer supports, unitary gates of matching size.
  void validate(const LatticeGeometry& geometry) const;
  /// Layer 1 acts first.
  Matrix unitary(const LatticeGeometry& geometry) const;
  double total_dwell() const;
};
CircuitSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json schedule_to_json(const CircuitSchedule& s);

/// Hermitian h with exp(i h) = U and eigenvalues in (-pi, pi].
Matrix principal_log(const Matrix& unitary);

/// Stage l runs H = -h / dwell for each gate of layer l; a final zero stage follows.
/// One timer with levels proportional to cumulative dwell and gamma = T / total dwell.
SwitchedLindbladian compile_circuit(const LatticeGeometry& geometry, const CircuitSchedule& schedule, int T,
                                    std::vector<int> timer_of_site = {});

struct ErrorBudget {
  double band_leak = 0.0;
  double window = 0.0;  // eps * |L_S| estimate
  double truncation = 0.0;
};
ErrorBudget error_budget(const SwitchedLindbladian& sw, double t, double epsilon, double tol);

}  // namespace qphase
