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

#include <optional>
#include <vector>

#include "qphase/lindblad.hpp"

namespace qphase {

/// T decay steps at rate gamma; the top level is reached around tau = T / gamma.
struct TimerSpec {
  int T = 1;
  double gamma = 1.0;
  std::optional<int> T1;  // intermediate switch level for two-stage timers

  double tau() const { return static_cast<double>(T) / gamma; }
  double tau1() const { return static_cast<double>(T1.value()) / gamma; }
  void validate() const;

  static TimerSpec with_tau(int T, double tau, std::optional<int> T1 = std::nullopt);
};

/// Occupation probabilities of the levels 0..T.
struct TimerDistribution {
  std::vector<double> p;
  double total() const;
};

/// Truncated Poisson law with absorbing top level, evaluated in the log domain.
TimerDistribution birth_chain_dist(const TimerSpec& spec, double t);
/// log p_k for k = 0..T; -inf where the probability underflows to zero.
std::vector<double> birth_chain_log_dist(const TimerSpec& spec, double t);

/// The T+1 qubit gadget with jumps sqrt(gamma) |1><1|_j (x) |1><0|_{j+1}.
Lindbladian timer_lindbladian(const TimerSpec& spec);
/// |1>_0 followed by k further ones, then zeros.
Vector timer_level_ket(int T, int k);
/// Evolves the qubit gadget from level 0 and projects onto the level kets.
/// `leakage`, when given, receives the weight outside their span.
TimerDistribution quantum_timer_dist(const TimerSpec& spec, double t, double* leakage = nullptr);
/// Direct integration of the classical master equation of the chain.
TimerDistribution chain_ode_dist(const TimerSpec& spec, double t, double tol = 1e-13);

/// Mass of levels klo..khi and its complement, both computed without cancellation.
struct BandMass {
  double mass = 0.0;
  double complement = 0.0;
};
BandMass band_mass(const TimerSpec& spec, double t, int klo, int khi);

struct SwitchBoundReport {
  int T = 0;
  double epsilon = 0.0;
  double tau = 0.0;
  double p_early = 0.0;  // top level reached by tau - eps/2
  double p_late = 0.0;   // top level not reached by tau + eps/2
  double log_p_early = 0.0;
  double log_p_late = 0.0;
  double exponent_early = 0.0;  // -T (x - log x - 1) with x = t / tau
  double exponent_late = 0.0;
  double ratio_early = 0.0;  // log p / exponent
  double ratio_late = 0.0;
  double scaling = 0.0;  // -T eps^2 / tau^2
};
SwitchBoundReport switch_bounds(const TimerSpec& spec, double epsilon);
/// eps = tau * T^{-1/4}.
double default_epsilon(const TimerSpec& spec);

/// (mass of levels klo..khi)^N for N independent timers.
double joint_all_low_prob(int n_timers, const TimerSpec& spec, double t, int klo, int khi);
double log_joint_all_low_prob(int n_timers, const TimerSpec& spec, double t, int klo, int khi);

}  // namespace qphase
