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

#include "qphase/timer.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

namespace qphase {

void TimerSpec::validate() const {
  if (T < 1) throw Error("TimerSpec: T must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("TimerSpec: gamma must be positive");
  if (T1 && (*T1 < 1 || *T1 >= T)) throw Error("TimerSpec: need 0 < T1 < T");
}

TimerSpec TimerSpec::with_tau(int T, double tau, std::optional<int> T1) {
  TimerSpec s{T, static_cast<double>(T) / tau, T1};
  s.validate();
  return s;
}

double TimerDistribution::total() const { return std::accumulate(p.begin(), p.end(), 0.0); }

namespace {

void check_t(double t) {
  if (!(t >= 0.0)) throw Error("timer: negative time");
}

// P(level > k) for k < T equals the regularized lower incomplete gamma P(k+1, x).
double upper_tail(int k, double x) { return x == 0.0 ? 0.0 : boost::math::gamma_p(k + 1, x); }
// P(level < k) for 1 <= k <= T.
double lower_tail(int k, double x) { return x == 0.0 ? 1.0 : boost::math::gamma_q(k, x); }

}  // namespace

std::vector<double> birth_chain_log_dist(const TimerSpec& spec, double t) {
  spec.validate();
  check_t(t);
  const double x = spec.gamma * t;
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> lp(spec.T + 1, ninf);
  if (x == 0.0) {
    lp[0] = 0.0;
    return lp;
  }
  const double lx = std::log(x);
  for (int k = 0; k < spec.T; ++k) {
    const double pk = boost::math::gamma_p_derivative(k + 1.0, x);
    lp[k] = pk > 1e-300 ? std::log(pk) : -x + k * lx - std::lgamma(k + 1.0);
  }
  const double top = upper_tail(spec.T - 1, x);
  if (top > 0.0) {
    lp[spec.T] = std::log(top);
  } else {
    // Far below the switch: the Poisson tail is dominated by its first term.
    double acc = ninf;
    for (int k = spec.T; k < spec.T + 200; ++k) {
      const double term = -x + k * lx - std::lgamma(k + 1.0);
      const double hi = std::max(acc, term);
      acc = hi + std::log(std::exp(acc - hi) + std::exp(term - hi));
      if (term < acc - 40.0) break;
    }
    lp[spec.T] = acc;
  }
  return lp;
}

TimerDistribution birth_chain_dist(const TimerSpec& spec, double t) {
  const auto lp = birth_chain_log_dist(spec, t);
  TimerDistribution d;
  d.p.reserve(lp.size());
  for (double v : lp) d.p.push_back(std::exp(v));
  return d;
}

Lindbladian timer_lindbladian(const TimerSpec& spec) {
  spec.validate();
  Matrix excited = projector(basis_ket(2, 1));
  Matrix raise = Matrix::Zero(2, 2);
  raise(1, 0) = 1.0;
  Matrix jump = std::sqrt(spec.gamma) * kron(excited, raise);
  std::vector<LindbladTerm> terms;
  for (int j = 0; j < spec.T; ++j) terms.push_back(LindbladTerm{{j, j + 1}, Matrix(), {jump}});
  return Lindbladian(LatticeGeometry::chain(std::vector<int>(spec.T + 1, 2)), std::move(terms));
}

Vector timer_level_ket(int T, int k) {
  if (k < 0 || k > T) throw Error("timer_level_ket: level out of range");
  std::size_t index = 0;
  for (int q = 0; q <= T; ++q) index = 2 * index + (q <= k ? 1 : 0);
  return basis_ket(std::size_t{1} << (T + 1), index);
}

TimerDistribution quantum_timer_dist(const TimerSpec& spec, double t, double* leakage) {
  spec.validate();
  check_t(t);
  if (spec.T > 6) throw GuardError("quantum_timer_dist: T <= 6 required for the qubit gadget");
  const auto l = timer_lindbladian(spec);
  Matrix rho = projector(timer_level_ket(spec.T, 0));
  if (t > 0.0) {
    const double ts[] = {t};
    rho = evolve_integrate(l, rho, ts, 1e-13).front();
  }
  TimerDistribution d;
  for (int k = 0; k <= spec.T; ++k) {
    const Vector v = timer_level_ket(spec.T, k);
    d.p.push_back((v.adjoint() * rho * v)(0, 0).real());
  }
  if (leakage) *leakage = std::abs(rho.trace().real() - d.total());
  return d;
}

TimerDistribution chain_ode_dist(const TimerSpec& spec, double t, double tol) {
  spec.validate();
  check_t(t);
  const double g = spec.gamma;
  const int T = spec.T;
  auto rhs = [g, T](double, const Eigen::VectorXd& p) {
    Eigen::VectorXd dp(T + 1);
    dp(0) = -g * p(0);
    for (int k = 1; k < T; ++k) dp(k) = g * (p(k - 1) - p(k));
    dp(T) = g * p(T - 1);
    return dp;
  };
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(T + 1);
  p0(0) = 1.0;
  const double ts[] = {t};
  IntegratorOptions opt = IntegratorOptions::with_tolerance(tol);
  opt.min_step = 1e-16;
  Eigen::VectorXd p = integrate_dopri5(rhs, p0, 0.0, std::span<const double>(ts), opt).front();
  return TimerDistribution{std::vector<double>(p.data(), p.data() + p.size())};
}

BandMass band_mass(const TimerSpec& spec, double t, int klo, int khi) {
  spec.validate();
  check_t(t);
  if (klo < 0 || khi > spec.T || klo > khi) throw Error("band_mass: invalid band");
  const double x = spec.gamma * t;
  BandMass b;
  const double below = klo == 0 ? 0.0 : lower_tail(klo, x);
  const double above = khi == spec.T ? 0.0 : upper_tail(khi, x);
  b.complement = below + above;
  b.mass = std::max(0.0, 1.0 - b.complement);
  if (b.complement > 0.5) {
    // Sum the band directly when it is the small side.
    const auto d = birth_chain_dist(spec, t);
    b.mass = std::accumulate(d.p.begin() + klo, d.p.begin() + khi + 1, 0.0);
  }
  return b;
}

double default_epsilon(const TimerSpec& spec) { return spec.tau() * std::pow(spec.T, -0.25); }

SwitchBoundReport switch_bounds(const TimerSpec& spec, double epsilon) {
  spec.validate();
  const double tau = spec.tau();
  if (!(epsilon > 0.0 && epsilon < tau)) throw Error("switch_bounds: need 0 < eps < tau");
  SwitchBoundReport r;
  r.T = spec.T;
  r.epsilon = epsilon;
  r.tau = tau;
  const double te = tau - epsilon / 2, tl = tau + epsilon / 2;
  r.log_p_early = birth_chain_log_dist(spec, te)[spec.T];
  const double xl = spec.gamma * tl;
  r.p_late = boost::math::gamma_q(spec.T, xl);
  r.log_p_late = std::log(r.p_late);
  r.p_early = std::exp(r.log_p_early);
  auto exponent = [&](double t) {
    const double x = t / tau;
    return -spec.T * (x - std::log(x) - 1.0);
  };
  r.exponent_early = exponent(te);
  r.exponent_late = exponent(tl);
  r.ratio_early = r.log_p_early / r.exponent_early;
  r.ratio_late = r.log_p_late / r.exponent_late;
  r.scaling = -spec.T * epsilon * epsilon / (tau * tau);
  return r;
}

double log_joint_all_low_prob(int n_timers, const TimerSpec& spec, double t, int klo, int khi) {
  if (n_timers < 0) throw Error("joint_all_low_prob: negative timer count");
  const auto b = band_mass(spec, t, klo, khi);
  if (b.mass <= 0.0) return -std::numeric_limits<double>::infinity();
  const double lm = b.complement < 0.5 ? std::log1p(-b.complement) : std::log(b.mass);
  return n_timers * lm;
}

double joint_all_low_prob(int n_timers, const TimerSpec& spec, double t, int klo, int khi) {
  return std::exp(log_joint_all_low_prob(n_timers, spec, t, klo, khi));
}

}  // namespace qphase
