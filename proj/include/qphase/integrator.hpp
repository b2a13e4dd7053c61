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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include "qphase/qstate.hpp"

namespace qphase {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 picks a step from the first derivative
  double min_step = 1e-13;
  double max_step = 0.0;  // 0 means unbounded
  std::size_t max_steps = 5'000'000;

  static IntegratorOptions with_tolerance(double tol) {
    IntegratorOptions o;
    o.rtol = tol;
    o.atol = tol;
    return o;
  }
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  /// h * |lambda| estimate from the last two stages (about 3.3 marks the stability boundary).
  double stiffness_estimate = 0.0;
};

namespace detail {
template <class State>
double max_abs(const State& s) {
  return s.size() == 0 ? 0.0 : s.cwiseAbs().maxCoeff();
}
}  // namespace detail

/// Embedded Dormand-Prince 5(4) with FSAL and step-size control, stepping exactly
/// onto every requested output time. `State` is any Eigen dense type; `rhs(t, y)`
/// returns dy/dt.
template <class State, class Rhs>
std::vector<State> integrate_dopri5(const Rhs& rhs, State y, double t0, std::span<const double> times,
                                    const IntegratorOptions& opt, IntegratorStats* stats = nullptr) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                   a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegratorStats local;
  IntegratorStats& st = stats ? *stats : local;
  std::vector<State> out;
  out.reserve(times.size());
  double t = t0;

  State k1 = rhs(t, y);
  ++st.rhs_evaluations;
  double h = opt.initial_step;
  if (h <= 0.0) {
    const double scale = opt.atol + opt.rtol * detail::max_abs(y);
    const double d1 = detail::max_abs(k1);
    h = d1 > 0.0 ? 0.01 * scale / d1 : 1e-3;
    h = std::clamp(h, 1e-8, 1e-1);
    h = std::max(h, 1e-6 * std::pow(opt.rtol, 0.2));
  }

  std::size_t steps = 0;
  for (double target : times) {
    if (target < t - 1e-15) throw Error("integrate_dopri5: output times must be nondecreasing");
    while (t < target) {
      if (++steps > opt.max_steps) throw GuardError("integrate_dopri5: step budget exhausted");
      if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
      bool last = false;
      const double h_free = h;
      if (t + h >= target) {
        h = target - t;
        last = true;
      }
      State y2 = y + h * a21 * k1;
      State k2 = rhs(t + c2 * h, y2);
      State y3 = y + h * (a31 * k1 + a32 * k2);
      State k3 = rhs(t + c3 * h, y3);
      State y4 = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      State k4 = rhs(t + c4 * h, y4);
      State y5 = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      State k5 = rhs(t + c5 * h, y5);
      State y6 = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      State k6 = rhs(t + h, y6);
      State ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      State k7 = rhs(t + h, ynew);
      st.rhs_evaluations += 6;

      State errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale =
          opt.atol + opt.rtol * std::max(detail::max_abs(y), detail::max_abs(ynew));
      const double err = detail::max_abs(errv) / scale;
      {
        const double den = detail::max_abs(State(ynew - y6));
        if (den > 0.0) st.stiffness_estimate = h * detail::max_abs(State(k7 - k6)) / den;
      }

      if (err <= 1.0) {
        t = last ? target : t + h;
        y = std::move(ynew);
        k1 = std::move(k7);
        ++st.accepted;
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = last ? std::max(h * fac, std::min(h_free, h * 5.0)) : h * fac;
        if (h <= 0.0) h = h_free;
      } else {
        ++st.rejected;
        const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
        h *= fac;
        if (h < opt.min_step) {
          std::ostringstream msg;
          msg << "step-size underflow at t=" << t << " (h=" << h
              << ", stiffness estimate h*|lambda|=" << st.stiffness_estimate << ")";
          throw GuardError(msg.str());
        }
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace qphase
