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

// Acceptance suite: runs every shipped config and prints one PASS/FAIL line per criterion.
//
// Usage: qphase_acceptance [--configs DIR] [--expect-fail N]...
// The exit status is 0 when the set of failing criteria equals the --expect-fail set.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <stdexcept>
#include <sstream>
#include <string>
#include <vector>

#include "runner.hpp"

using namespace qphase::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kTracePreservation = 1e-10;
constexpr double kChoiFloor = -1e-9;
constexpr double kContractivitySlack = 1e-10;
constexpr double kDuality = 1e-8;
constexpr double kSemigroup = 1e-9;
constexpr double kGadgetAgreement = 1e-8;
constexpr double kOdeAgreement = 1e-10;
constexpr double kSlopeFactor = 2.0;
constexpr double kTransitivityFinal = 0.02;
constexpr double kFactorization = 1e-10;
constexpr double kBellFinal = 0.05;
constexpr double kExactFidelity = 0.999;
constexpr double kFilteredFidelity = 0.995;
constexpr double kCutTimesLambda = 40.0;
constexpr double kCondenseLimit = 1e-12;
constexpr double kCondenseTrajectory = 1e-10;
constexpr double kIdempotence = 1e-12;
constexpr double kDriverBound = 1e-9;
constexpr double kExactAlgebra = 1e-12;
constexpr double kHomotopy = 1e-10;
constexpr double kNoNoiseExact = 1e-12;
constexpr double kCovariance = 1e-10;
constexpr double kNegativeControl = 0.1;
constexpr double kBridgeDistance = 1e-9;

// Runtime budgets in seconds.
constexpr double kBudget[] = {0, 60, 60, 300, 300, 600, 60, 120, 600, 120};

struct Check {
  std::vector<std::string> failures;
  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

bool increasing(const json& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i].get<double>() > v[i - 1].get<double>())) return false;
  return true;
}

double max_of(const json& v) {
  double m = -1e300;
  for (const auto& x : v) m = std::max(m, x.get<double>());
  return m;
}

struct Criterion {
  int id;
  std::string title;
  std::string config;
  // Checks the summary results and the parameters the config pins; returns a short measurement note.
  std::function<std::string(const json& params, const json& results, Check& c)> verify;
};

std::vector<Criterion> criteria() {
  std::vector<Criterion> cs;
  cs.push_back({1, "channel axioms", "evolve.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("samples") == 200, "samples != 200");
                  c.require(r.at("max_tp_defect") <= kTracePreservation, "trace preservation");
                  c.require(r.at("min_choi_eigenvalue") >= kChoiFloor, "Choi positivity");
                  c.require(r.at("max_contractivity_excess") <= kContractivitySlack, "contractivity");
                  c.require(r.at("max_duality_defect") <= kDuality, "duality");
                  c.require(r.at("max_semigroup_defect") <= kSemigroup, "semigroup");
                  return "tp " + fmt(r.at("max_tp_defect")) + ", choi " + fmt(r.at("min_choi_eigenvalue")) +
                         ", semigroup " + fmt(r.at("max_semigroup_defect"));
                }});
  cs.push_back({2, "timer exactness and switch tails", "timer.json", [](const json& p, const json& r, Check& c) {
                  c.require(max_of(p.at("gadget_T")) <= 4, "gadget T above 4");
                  c.require(max_of(p.at("ode_T")) == 512, "ODE ladder does not reach 512");
                  c.require(p.at("switch_T") == json{64, 128, 256, 512}, "switch ladder");
                  c.require(r.at("gadget_max_error") <= kGadgetAgreement, "gadget agreement");
                  c.require(r.at("ode_max_error") <= kOdeAgreement, "ODE agreement");
                  c.require(r.at("early_strictly_decreasing") == true, "early not decreasing");
                  c.require(r.at("late_strictly_decreasing") == true, "late not decreasing");
                  c.require(r.at("early_slope_spread") <= kSlopeFactor, "early slope spread");
                  c.require(r.at("late_slope_spread") <= kSlopeFactor, "late slope spread");
                  return "gadget " + fmt(r.at("gadget_max_error")) + ", ode " + fmt(r.at("ode_max_error")) +
                         ", slope spread " + fmt(r.at("early_slope_spread")) + "/" + fmt(r.at("late_slope_spread"));
                }});
  cs.push_back({3, "transitivity composite", "switch.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("T_values") == json{8, 16, 32, 64}, "T ladder");
                  c.require(p.at("t_after") == 3.0, "t != tau + 3");
                  c.require(p.at("initial").get<std::string>().size() == 2, "not two qubits");
                  c.require(p.at("factorization_T") == 3, "factorization T != 3");
                  c.require(r.at("strictly_decreasing") == true, "not monotone");
                  c.require(r.at("final_distance") <= kTransitivityFinal, "final distance");
                  c.require(r.at("factorization_residual") <= kFactorization, "band factorization");
                  return "T=64 distance " + fmt(r.at("final_distance")) + ", factorization " +
                         fmt(r.at("factorization_residual"));
                }});
  cs.push_back({4, "circuit compilation", "compile.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("T_values").back() == 64, "ladder does not end at 64");
                  c.require(r.at("strictly_decreasing") == true, "not monotone");
                  c.require(r.at("final_distance") <= kBellFinal, "final distance above 0.05");
                  return "T=64 distance to Bell " + fmt(r.at("final_distance"));
                }});
  cs.push_back({5, "quasi-adiabatic transport", "qa.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("N") == 6 && p.at("delta_N") == 8, "sizes");
                  c.require(p.at("cut_times_lambda") == kCutTimesLambda, "filter cut");
                  c.require(p.at("patch_omegas") == json{1, 2, 3}, "patch ladder");
                  double worst_exact = 1.0, worst_filtered = 1.0;
                  std::set<std::string> paths;
                  for (const auto& t : r.at("transport")) {
                    paths.insert(t.at("path").get<std::string>());
                    const double f = t.at("end_fidelity");
                    if (t.at("mode") == "exact") worst_exact = std::min(worst_exact, f);
                    else worst_filtered = std::min(worst_filtered, f);
                  }
                  c.require(paths.size() == 3, "missing paths");
                  c.require(worst_exact >= kExactFidelity, "exact fidelity");
                  c.require(worst_filtered >= kFilteredFidelity, "filtered fidelity");
                  c.require(r.at("delta_decreasing_from_2") == true, "Delta norms");
                  c.require(r.at("patch_strictly_decreasing") == true, "patch residuals");
                  return "fidelity exact " + fmt(worst_exact) + ", filtered " + fmt(worst_filtered) +
                         ", patch residual " + fmt(r.at("patch_residuals").back());
                }});
  cs.push_back({6, "condensation", "condense.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("N_values") == json{4, 6}, "N ladder");
                  c.require(p.at("driver_N") == 4, "driver N");
                  c.require(r.at("final_time") == 40.0, "trajectory does not end at 40");
                  double limit = 0.0;
                  for (const auto& [n, d] : r.at("limit_distance").items()) limit = std::max(limit, d.get<double>());
                  c.require(limit <= kCondenseLimit, "closed-form limit");
                  c.require(r.at("final_distance") <= kCondenseTrajectory, "trajectory");
                  c.require(r.at("idempotence_residual") <= kIdempotence, "idempotence");
                  c.require(r.at("driver_bound_gap") <= kDriverBound, "fast-mixing bound");
                  return "limit " + fmt(limit) + ", t=40 " + fmt(r.at("final_distance")) + ", bound gap " +
                         fmt(r.at("driver_bound_gap"));
                }});
  cs.push_back({7, "quantum double algebra", "double.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("n") == 2 && p.at("lx") == 2 && p.at("ly") == 2, "model");
                  c.require(p.at("samples") == 100, "samples != 100");
                  c.require(r.at("ground_space_dimension_symbolic") == 4, "symbolic dimension");
                  c.require(r.at("ground_space_dimension_dense") == 4, "dense dimension");
                  c.require(std::abs(r.at("logical_phase_re").get<double>() + 1.0) <= kExactAlgebra &&
                                std::abs(r.at("logical_phase_im").get<double>()) <= kExactAlgebra &&
                                r.at("logical_phase_residual") <= kExactAlgebra,
                            "logical commutation");
                  c.require(r.at("homotopy_defect") <= kHomotopy, "homotopy");
                  c.require(r.at("basis_generation_passed") == 100, "basis generation");
                  return "phase residual " + fmt(r.at("logical_phase_residual")) + ", basis generation " +
                         std::to_string(r.at("basis_generation_passed").get<int>()) + "/100";
                }});
  cs.push_back({8, "no-go witnesses", "nogo.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("rates") == json{0.0, 0.05, 0.1, 0.2}, "rate ladder");
                  c.require(p.at("t") == 1.0 && p.at("ell") == 1, "t or ell");
                  c.require(p.at("ghz_m") == json{2} && p.at("ghz_n") == 4, "GHZ instance");
                  c.require(r.at("gram_minus_reference")[0] <= kNoNoiseExact, "T != S without noise");
                  c.require(r.at("schwarz_defect")[0] <= kNoNoiseExact, "Schwarz defect without noise");
                  c.require(increasing(r.at("det_gap")), "determinant gap");
                  c.require(increasing(r.at("schwarz_defect")), "Schwarz defect");
                  c.require(r.at("ghz_rank").at("2") == 2, "GHZ rank");
                  return "det gap at r=0.2 " + fmt(r.at("det_gap").back()) + ", Schwarz " +
                         fmt(r.at("schwarz_defect").back());
                }});
  cs.push_back({9, "SPT covariance", "spt.json", [](const json& p, const json& r, Check& c) {
                  c.require(p.at("times").back() == 30.0, "times do not end at 30");
                  c.require(r.at("covariance_residual") <= kCovariance, "covariance");
                  c.require(r.at("negative_control_residual") >= kNegativeControl, "negative control");
                  c.require(r.at("final_distance_bound") <= kBridgeDistance, "bridge distance");
                  return "covariance " + fmt(r.at("covariance_residual")) + ", control " +
                         fmt(r.at("negative_control_residual")) + ", bridge " + fmt(r.at("final_distance_bound"));
                }});
  return cs;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  fs::path config_dir = QPHASE_CONFIG_DIR;
  std::set<int> expected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--configs" && i + 1 < argc) config_dir = argv[++i];
    else if (a == "--expect-fail" && i + 1 < argc) expected.insert(std::stoi(argv[++i]));
    else {
      std::cerr << "usage: qphase_acceptance [--configs DIR] [--expect-fail N]...\n";
      return 2;
    }
  }

  std::set<int> failed;
  std::vector<std::pair<ExperimentConfig, RunResult>> outputs;
  for (const auto& cr : criteria()) {
    Check check;
    std::string note;
    double seconds = 0.0;
    try {
      const auto config = load_config(config_dir / cr.config);
      const auto start = std::chrono::steady_clock::now();
      const auto result = run_experiment(config, 1);
      seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      note = cr.verify(config.params, result.summary.at("results"), check);
      check.require(seconds < kBudget[cr.id], "runtime budget");
      outputs.emplace_back(config, result);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = check.failures.empty();
    if (!ok) failed.insert(cr.id);
    std::ostringstream line;
    line << (ok ? "PASS" : "FAIL") << " criterion " << cr.id << " (" << cr.title << "): " << note;
    char t[32];
    std::snprintf(t, sizeof t, "; %.1fs of %.0fs", seconds, kBudget[cr.id]);
    line << t;
    for (const auto& f : check.failures) line << "; failed: " << f;
    std::cout << line.str() << std::endl;
  }

  // Reproducibility: rerun on three workers and compare the written files byte for byte.
  {
    Check check;
    const fs::path a = fs::temp_directory_path() / "qphase_acceptance_a";
    const fs::path b = fs::temp_directory_path() / "qphase_acceptance_b";
    fs::remove_all(a);
    fs::remove_all(b);
    std::size_t files = 0;
    try {
      for (const auto& [config, first] : outputs) {
        write_result(first, config, a);
        write_result(run_experiment(config, 3), config, b);
        for (const auto& t : first.tables) {
          check.require(read_file(a / t.file) == read_file(b / t.file), t.file + " not byte-identical");
          ++files;
        }
      }
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    check.require(outputs.size() == 9, "not every criterion produced output");
    fs::remove_all(a);
    fs::remove_all(b);
    const bool ok = check.failures.empty();
    if (!ok) failed.insert(10);
    std::cout << (ok ? "PASS" : "FAIL") << " criterion 10 (reproducibility): " << files << " CSV files from "
              << outputs.size() << " configs byte-identical on 1 and 3 workers";
    for (const auto& f : check.failures) std::cout << "; failed: " << f;
    std::cout << std::endl;
  }

  std::cout << failed.size() << " of 10 criteria failed";
  if (!expected.empty()) {
    std::cout << " (expected to fail:";
    for (int e : expected) std::cout << ' ' << e;
    std::cout << ")";
  }
  std::cout << std::endl;
  return failed == expected ? 0 : 1;
}
