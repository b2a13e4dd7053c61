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

#include <doctest.h>

#include "qphase/timer.hpp"

using namespace qphase;

TEST_CASE("birth chain basics") {
  auto d0 = birth_chain_dist(TimerSpec{5, 1.0}, 0.0);
  CHECK(d0.p[0] == 1.0);
  for (int k = 1; k <= 5; ++k) CHECK(d0.p[k] == 0.0);
  auto d1 = birth_chain_dist(TimerSpec{1, 1.0}, 1.0);
  CHECK(d1.p[1] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  auto big = birth_chain_dist(TimerSpec{10000, 10000.0}, 0.9);
  CHECK(big.total() == doctest::Approx(1.0).epsilon(1e-12));
  for (double p : big.p) CHECK(p >= 0.0);
}

TEST_CASE("birth chain matches the qubit gadget") {
  for (auto [T, gamma, t] : {std::tuple{4, 2.0, 1.3}, std::tuple{2, 1.0, 0.5}, std::tuple{3, 3.0, 0.7}}) {
    TimerSpec s{T, gamma};
    double leak = 1.0;
    auto q = quantum_timer_dist(s, t, &leak);
    auto c = birth_chain_dist(s, t);
    for (int k = 0; k <= T; ++k) CHECK(std::abs(q.p[k] - c.p[k]) < 1e-9);
    CHECK(leak <= 1e-12);
  }
  CHECK(quantum_timer_dist(TimerSpec{3, 1.0}, 0.0).p[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(quantum_timer_dist(TimerSpec{7, 1.0}, 1.0), GuardError);
}

TEST_CASE("birth chain matches the chain ODE") {
  for (int T : {8, 64, 512}) {
    TimerSpec s = TimerSpec::with_tau(T, 1.0);
    for (double t : {0.5, 1.0, 1.5}) {
      auto a = birth_chain_dist(s, t), b = chain_ode_dist(s, t);
      for (int k = 0; k <= T; ++k) CHECK(std::abs(a.p[k] - b.p[k]) < 1e-10);
    }
  }
}

TEST_CASE("absorbing level is nondecreasing") {
  TimerSpec s{16, 4.0};
  double prev = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double p = birth_chain_dist(s, 0.2 * i).p[16];
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("switch bounds") {
  TimerSpec s = TimerSpec::with_tau(64, 1.0);
  const double eps = default_epsilon(s);
  auto r = switch_bounds(s, eps);
  CHECK(r.log_p_early <= r.scaling / 8.0 * 0.5);
  CHECK(r.p_early + (1.0 - r.p_early) == doctest::Approx(1.0));
  double prev = 1.0;
  for (double e = 0.1; e < 0.99; e += 0.1) {
    const double p = switch_bounds(s, e).p_early;
    CHECK(p < prev);
    prev = p;
  }
  CHECK_THROWS_AS(switch_bounds(s, 1.5), Error);
}

TEST_CASE("joint band probabilities") {
  TimerSpec s = TimerSpec::with_tau(256, 1.0);
  const double t = 1.0 - default_epsilon(s) / 2;
  auto b = band_mass(s, t, 0, 255);
  CHECK(joint_all_low_prob(1, s, t, 0, 255) == doctest::Approx(b.mass).epsilon(1e-14));
  const double direct = std::pow(b.mass, 100);
  CHECK(joint_all_low_prob(100, s, t, 0, 255) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(std::abs(joint_all_low_prob(100, s, t, 0, 255) - (1.0 - 100 * b.complement)) <
        100.0 * 100.0 * b.complement * b.complement);
}

TEST_CASE("two-stage bands concentrate as T grows") {
  double prev_mid = 0.0;
  std::vector<double> deltas;
  for (int T : {64, 128, 256, 512}) {
    TimerSpec s = TimerSpec::with_tau(T, 1.0, T / 2);
    const double eps = default_epsilon(s);
    const double before = band_mass(s, s.tau1() - eps / 2, 0, T / 2 - 1).mass;
    const double mid_lo = band_mass(s, s.tau1() + eps / 2, T / 2, T - 1).mass;
    const double mid_hi = band_mass(s, s.tau() - eps / 2, T / 2, T - 1).mass;
    const double after = band_mass(s, s.tau() + eps / 2, T, T).mass;
    const double mid = std::min(mid_lo, mid_hi);
    CHECK(mid > prev_mid);
    prev_mid = mid;
    deltas.push_back(1.0 - std::min({before, mid, after}));
  }
  for (std::size_t i = 1; i < deltas.size(); ++i) CHECK(deltas[i] < deltas[i - 1]);
}

TEST_CASE("many timers: N p_early vanishes along a ladder") {
  // T = N^4 with eps = tau T^{-1/4}.
  double prev = 1e300;
  for (int n : {2, 3, 4, 5}) {
    const int T = n * n * n * n;
    TimerSpec s = TimerSpec::with_tau(T, 1.0);
    const double v = n * switch_bounds(s, default_epsilon(s)).p_early;
    CHECK(v < prev);
    prev = v;
  }
}
