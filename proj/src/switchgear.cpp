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

#include "qphase/switchgear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace qphase {

SwitchedLindbladian::SwitchedLindbladian(std::vector<Lindbladian> stages, TimerSpec timer,
                                         std::vector<int> switch_levels, std::vector<int> timer_of_site)
    : stages_(std::move(stages)), timer_(timer), levels_(std::move(switch_levels)) {
  if (stages_.empty()) throw Error("SwitchedLindbladian: at least one stage required");
  timer_.validate();
  const auto& geo = stages_.front().geometry();
  for (const auto& s : stages_)
    if (s.geometry().local_dims() != geo.local_dims()) throw Error("SwitchedLindbladian: stages differ in geometry");
  if (levels_.size() + 1 != stages_.size())
    throw Error("SwitchedLindbladian: need one switch level per stage boundary");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] < 1 || levels_[i] > timer_.T) throw Error("SwitchedLindbladian: switch level out of range");
    if (i > 0 && levels_[i] <= levels_[i - 1]) throw Error("SwitchedLindbladian: switch levels must increase");
  }
  if (timer_of_site.empty()) {
    timer_of_site.resize(geo.num_sites());
    for (int i = 0; i < geo.num_sites(); ++i) timer_of_site[i] = i;
  }
  if (static_cast<int>(timer_of_site.size()) != geo.num_sites())
    throw Error("SwitchedLindbladian: attachment map must cover every site");
  std::set<int> used;
  for (const auto& s : stages_)
    for (const auto& t : s.terms()) {
      const int label = timer_of_site.at(t.support.front());
      if (label < 0) throw Error("SwitchedLindbladian: unattached term on site " + std::to_string(t.support.front()));
      used.insert(label);
    }
  timer_ids_.assign(used.begin(), used.end());
  for (const auto& s : stages_) {
    std::vector<int> tt;
    for (const auto& t : s.terms()) {
      const int label = timer_of_site[t.support.front()];
      tt.push_back(static_cast<int>(std::lower_bound(timer_ids_.begin(), timer_ids_.end(), label) - timer_ids_.begin()));
    }
    term_timer_.push_back(std::move(tt));
  }
}

int SwitchedLindbladian::stage_of_level(int level) const {
  return static_cast<int>(std::upper_bound(levels_.begin(), levels_.end(), level) - levels_.begin());
}

std::vector<double> SwitchedLindbladian::switch_times() const {
  std::vector<double> t;
  for (int l : levels_) t.push_back(l / timer_.gamma);
  return t;
}

Lindbladian SwitchedLindbladian::system_generator(const std::vector<int>& timer_levels) const {
  if (static_cast<int>(timer_levels.size()) != num_timers())
    throw Error("system_generator: one level per materialized timer required");
  std::vector<LindbladTerm> terms;
  for (int s = 0; s < num_stages(); ++s) {
    const auto& st = stages_[s].terms();
    for (std::size_t x = 0; x < st.size(); ++x)
      if (stage_of_level(timer_levels[term_timer_[s][x]]) == s) terms.push_back(st[x]);
  }
  return Lindbladian(system_geometry(), std::move(terms));
}

double SwitchedLindbladian::system_norm_estimate() const {
  double n = 0.0;
  for (const auto& s : stages_) n += s.norm_estimate();
  return n;
}

SwitchedLindbladian build_switched(std::vector<Lindbladian> stages, const TimerSpec& timer,
                                   std::vector<int> timer_of_site) {
  const int k = static_cast<int>(stages.size());
  std::vector<int> levels;
  for (int s = 1; s < k; ++s) levels.push_back(static_cast<int>(std::lround(static_cast<double>(timer.T) * s / (k - 1))));
  return SwitchedLindbladian(std::move(stages), timer, std::move(levels), std::move(timer_of_site));
}

// ---------------------------------------------------------------------------
// Compressed composite

int CompositeState::level(std::size_t c, int a) const {
  for (int i = 0; i < a; ++i) c /= static_cast<std::size_t>(T + 1);
  return static_cast<int>(c % static_cast<std::size_t>(T + 1));
}

namespace {

Eigen::Index side_of(const Matrix& blocks) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(blocks.rows()))));
  return d;
}

double von_neumann(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-300) s -= l * std::log(l);
  }
  return s;
}

}  // namespace

Matrix CompositeState::system_marginal() const {
  const Eigen::Index d = side_of(blocks);
  return vec_to_matrix(blocks.rowwise().sum(), d);
}

std::vector<double> CompositeState::config_probabilities() const {
  const Eigen::Index d = side_of(blocks);
  std::vector<double> p(blocks.cols());
  for (Eigen::Index c = 0; c < blocks.cols(); ++c) {
    double tr = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) tr += blocks(i + i * d, c).real();
    p[c] = tr;
  }
  return p;
}

std::vector<double> CompositeState::timer_marginal(int a) const {
  const auto p = config_probabilities();
  std::vector<double> m(T + 1, 0.0);
  for (std::size_t c = 0; c < p.size(); ++c) m[level(c, a)] += p[c];
  return m;
}

double CompositeState::mutual_information() const {
  const Eigen::Index d = side_of(blocks);
  double info = von_neumann(system_marginal());
  const auto p = config_probabilities();
  for (std::size_t c = 0; c < p.size(); ++c)
    if (p[c] > 1e-14) info -= p[c] * von_neumann(vec_to_matrix(blocks.col(c), d) / p[c]);
  return std::max(0.0, info);
}

CompositeState initial_composite(const SwitchedLindbladian& sw, const Matrix& rho0) {
  CompositeState s;
  s.num_timers = sw.num_timers();
  s.T = sw.timer().T;
  const Eigen::Index d = rho0.rows();
  if (d != static_cast<Eigen::Index>(sw.system_geometry().hilbert_dim()) || rho0.cols() != d)
    throw Error("initial_composite: state dimension mismatch");
  double configs = std::pow(static_cast<double>(s.T + 1), s.num_timers);
  if (configs * static_cast<double>(d * d) > 1 << 26)
    throw GuardError("switched composite guard: system dimension squared times register size exceeds 2^26");
  s.blocks = Matrix::Zero(d * d, static_cast<Eigen::Index>(configs));
  s.blocks.col(0) = matrix_to_vec(rho0);
  return s;
}

double band_leak(const SwitchedLindbladian& sw, double t) {
  const auto times = sw.switch_times();
  const int s = static_cast<int>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
  const auto& lv = sw.switch_levels();
  const int lo = s == 0 ? 0 : lv[s - 1];
  const int hi = s == static_cast<int>(lv.size()) ? sw.timer().T : lv[s] - 1;
  const double lj = log_joint_all_low_prob(sw.num_timers(), sw.timer(), t, lo, hi);
  return -std::expm1(lj);
}

SwitchedRun run_switched(const SwitchedLindbladian& sw, const Matrix& rho0, std::span<const double> times,
                         double tol) {
  CompositeState state = initial_composite(sw, rho0);
  const int m = state.num_timers, T = state.T, S = sw.num_stages();
  const double gamma = sw.timer().gamma;
  const Eigen::Index d = rho0.rows();
  const Eigen::Index nc = state.blocks.cols();

  // One system generator per assignment of stages to timers.
  std::size_t ntuples = 1;
  for (int a = 0; a < m; ++a) ntuples *= static_cast<std::size_t>(S);
  if (ntuples > 4096) throw GuardError("run_switched: too many stage assignments");
  std::vector<Lindbladian> gens;
  std::vector<Matrix> superops;
  const bool dense = d <= 16;
  for (std::size_t k = 0; k < ntuples; ++k) {
    std::vector<int> lv(m);
    std::size_t r = k;
    for (int a = 0; a < m; ++a) {
      const int s = static_cast<int>(r % S);
      r /= S;
      lv[a] = s == 0 ? 0 : sw.switch_levels()[s - 1];
    }
    gens.push_back(sw.system_generator(lv));
    if (dense) {
      NumericPolicy p;
      p.superop_max_dim = 16;
      superops.push_back(assemble_superoperator(gens.back(), p));
    }
  }
  std::vector<std::size_t> tuple(nc);
  std::vector<std::size_t> stride(m);
  for (Eigen::Index c = 0; c < nc; ++c) {
    std::size_t k = 0, w = 1;
    for (int a = 0; a < m; ++a) {
      k += w * static_cast<std::size_t>(sw.stage_of_level(state.level(c, a)));
      w *= static_cast<std::size_t>(S);
    }
    tuple[c] = k;
  }
  for (int a = 0; a < m; ++a) stride[a] = a == 0 ? 1 : stride[a - 1] * static_cast<std::size_t>(T + 1);

  auto rhs = [&](double, const Matrix& y) {
    Matrix out(y.rows(), y.cols());
    for (Eigen::Index c = 0; c < nc; ++c) {
      if (dense) {
        out.col(c).noalias() = superops[tuple[c]] * y.col(c);
      } else {
        out.col(c) = matrix_to_vec(gens[tuple[c]].apply(vec_to_matrix(y.col(c), d)));
      }
    }
    for (int a = 0; a < m; ++a)
      for (Eigen::Index c = 0; c < nc; ++c) {
        if (state.level(c, a) < T) {
          out.col(c) -= gamma * y.col(c);
          out.col(c + static_cast<Eigen::Index>(stride[a])) += gamma * y.col(c);
        }
      }
    return out;
  };

  SwitchedRun run;
  auto ys = integrate_dopri5(rhs, state.blocks, 0.0, times, IntegratorOptions::with_tolerance(tol), &run.stats);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    CompositeState cs = state;
    cs.blocks = std::move(ys[i]);
    SwitchedSnapshot snap;
    snap.t = times[i];
    snap.system = cs.system_marginal();
    snap.band_leak = band_leak(sw, times[i]);
    const auto p = cs.config_probabilities();
    snap.ancilla_distance = std::clamp(1.0 - p.back(), 0.0, 1.0);
    snap.mutual_information = cs.mutual_information();
    run.snapshots.push_back(std::move(snap));
    if (i + 1 == ys.size()) run.final_state = std::move(cs);
  }
  if (ys.empty()) run.final_state = state;
  return run;
}

Matrix sequential_oracle(const std::vector<Lindbladian>& stages, const std::vector<double>& switch_times,
                         const Matrix& rho0, double t, const NumericPolicy& policy) {
  if (stages.empty() || switch_times.size() + 1 != stages.size())
    throw Error("sequential_oracle: need one switch time per stage boundary");
  if (t < 0.0) throw Error("sequential_oracle: negative time");
  Matrix rho = rho0;
  double now = 0.0;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const double end = s < switch_times.size() ? switch_times[s] : std::numeric_limits<double>::infinity();
    const double stop = std::min(t, end);
    if (stop > now) {
      rho = evolve(stages[s], rho, stop - now, policy);
      now = stop;
    }
    if (t <= end) break;
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Qubit gadget

namespace {

Matrix control_projector(const std::vector<int>& levels, int stage, int num_stages, std::vector<int>& qubits_out,
                         const std::vector<int>& timer_qubits) {
  qubits_out.clear();
  Matrix p = Matrix::Identity(1, 1);
  const Matrix one = projector(basis_ket(2, 1)), zero = projector(basis_ket(2, 0));
  if (num_stages == 1) return p;
  if (stage > 0) {
    qubits_out.push_back(timer_qubits[levels[stage - 1]]);
    p = kron(p, one);
  }
  if (stage < num_stages - 1) {
    qubits_out.push_back(timer_qubits[levels[stage]]);
    p = kron(p, zero);
  }
  return p;
}

}  // namespace

QubitGadget build_qubit_gadget(const SwitchedLindbladian& sw, std::size_t max_dim) {
  const auto& sys = sw.system_geometry();
  const int T = sw.timer().T;
  std::vector<std::vector<int>> timer_qubits;
  std::vector<int> dims = sys.local_dims();
  for (int a = 0; a < sw.num_timers(); ++a) {
    std::vector<int> q;
    for (int k = 0; k <= T; ++k) {
      q.push_back(static_cast<int>(dims.size()));
      dims.push_back(2);
    }
    timer_qubits.push_back(std::move(q));
  }
  auto geo = LatticeGeometry::chain(dims);
  if (geo.hilbert_dim() > max_dim) throw GuardError("build_qubit_gadget: composite dimension exceeds guard");

  const auto tl = timer_lindbladian(sw.timer());
  std::vector<LindbladTerm> timer_terms;
  for (const auto& q : timer_qubits)
    for (const auto& term : tl.terms()) {
      LindbladTerm t = term;
      for (int& s : t.support) s = q[s];
      timer_terms.push_back(std::move(t));
    }
  std::vector<LindbladTerm> all = timer_terms;
  std::vector<Lindbladian> lifts;
  for (int s = 0; s < sw.num_stages(); ++s) {
    std::vector<LindbladTerm> lifted;
    const auto& st = sw.stages()[s].terms();
    for (std::size_t x = 0; x < st.size(); ++x) {
      lifted.push_back(st[x]);
      std::vector<int> ctrl;
      const Matrix p = control_projector(sw.switch_levels(), s, sw.num_stages(), ctrl,
                                         timer_qubits[sw.term_timer()[s][x]]);
      LindbladTerm c;
      c.support = st[x].support;
      c.support.insert(c.support.end(), ctrl.begin(), ctrl.end());
      c.hamiltonian = kron(st[x].hamiltonian, p);
      for (const auto& j : st[x].jumps) c.jumps.push_back(kron(j, p));
      all.push_back(std::move(c));
    }
    lifts.emplace_back(geo, std::move(lifted));
  }
  return QubitGadget{Lindbladian(geo, std::move(all)), Lindbladian(geo, std::move(timer_terms)), std::move(lifts),
                     sys.num_sites(), std::move(timer_qubits), sw.switch_levels()};
}

Matrix QubitGadget::initial_state(const Matrix& rho0) const {
  Matrix r = rho0;
  for (const auto& q : timer_qubits) r = kron(r, projector(timer_level_ket(static_cast<int>(q.size()) - 1, 0)));
  return r;
}

Matrix QubitGadget::system_marginal(const Matrix& rho) const {
  std::vector<int> keep(system_sites);
  for (int i = 0; i < system_sites; ++i) keep[i] = i;
  return partial_trace(rho, composite.geometry(), keep);
}

Matrix QubitGadget::band_projector(int stage) const {
  const auto& geo = composite.geometry();
  const int stages = static_cast<int>(stage_lifts.size());
  if (stage < 0 || stage >= stages) throw Error("band_projector: stage out of range");
  Matrix p = Matrix::Identity(composite.dim(), composite.dim());
  for (const auto& q : timer_qubits) {
    std::vector<int> ctrl;
    const Matrix c = control_projector(switch_levels, stage, stages, ctrl, q);
    if (!ctrl.empty()) p = p * embed_dense(LocalOperator(ctrl, c), geo);
  }
  return p;
}

namespace {

// Loops over matrix units inside the range of a diagonal 0/1 projector.
template <class F>
double max_over_units(const Matrix& p, F&& residual) {
  std::vector<Eigen::Index> range;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    if (std::abs(p(i, i)) > 0.5) range.push_back(i);
  double worst = 0.0;
  Matrix e = Matrix::Zero(p.rows(), p.cols());
  for (auto i : range)
    for (auto j : range) {
      e(i, j) = 1.0;
      worst = std::max(worst, residual(e));
      e(i, j) = 0.0;
    }
  return worst;
}

}  // namespace

double factorization_residual(const QubitGadget& g, int stage) {
  const Matrix p = g.band_projector(stage);
  const auto& lifted = g.stage_lifts.at(stage);
  return max_over_units(p, [&](const Matrix& e) {
    Matrix lhs = p * g.composite.apply(e) * p;
    Matrix rhs = p * (g.timers_only.apply(e) + lifted.apply(e)) * p;
    return (lhs - rhs).cwiseAbs().maxCoeff();
  });
}

double band_commutator_residual(const QubitGadget& g, int stage) {
  const Matrix p = g.band_projector(stage);
  // Controlled system part: composite minus the bare timers.
  std::vector<LindbladTerm> sys_terms(g.composite.terms().begin() + static_cast<long>(g.timers_only.terms().size()),
                                      g.composite.terms().end());
  const Lindbladian ls(g.composite.geometry(), std::move(sys_terms));
  return max_over_units(p, [&](const Matrix& e) {
    Matrix c = g.timers_only.apply(ls.apply(e)) - ls.apply(g.timers_only.apply(e));
    return Matrix(p * c * p).cwiseAbs().maxCoeff();
  });
}

// ---------------------------------------------------------------------------
// Circuits

void CircuitSchedule::validate(const LatticeGeometry& geometry) const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (!(layers[l].dwell > 0.0)) throw Error("circuit: dwell times must be positive");
    std::set<int> used;
    for (const auto& g : layers[l].gates) {
      geometry.check_support(g.support);
      const auto d = static_cast<Eigen::Index>(geometry.dim_of(g.support));
      if (g.unitary.rows() != d || g.unitary.cols() != d) throw Error("circuit: gate size does not match support");
      if ((g.unitary.adjoint() * g.unitary - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
        throw Error("circuit: gate is not unitary");
      for (int s : g.support)
        if (!used.insert(s).second)
          throw Error("circuit: overlapping gate supports in layer " + std::to_string(l));
    }
  }
}

Matrix CircuitSchedule::unitary(const LatticeGeometry& geometry) const {
  const auto d = static_cast<Eigen::Index>(geometry.hilbert_dim());
  Matrix u = Matrix::Identity(d, d);
  for (const auto& layer : layers)
    for (const auto& g : layer.gates) u = embed_dense(LocalOperator(g.support, g.unitary), geometry) * u;
  return u;
}

double CircuitSchedule::total_dwell() const {
  double t = 0.0;
  for (const auto& l : layers) t += l.dwell;
  return t;
}

namespace {

Matrix named_gate(const std::string& name) {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m;
  if (name == "H") {
    m = Matrix(2, 2);
    m << r, r, r, -r;
  } else if (name == "X") {
    m = pauli_x();
  } else if (name == "Y") {
    m = pauli_y();
  } else if (name == "Z") {
    m = pauli_z();
  } else if (name == "S") {
    m = Matrix::Identity(2, 2);
    m(1, 1) = cd(0, 1);
  } else if (name == "T") {
    m = Matrix::Identity(2, 2);
    m(1, 1) = std::polar(1.0, std::numbers::pi / 4);
  } else if (name == "CNOT") {
    m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  } else if (name == "CZ") {
    m = Matrix::Identity(4, 4);
    m(3, 3) = -1.0;
  } else if (name == "SWAP") {
    m = Matrix::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  } else {
    throw Error("circuit: unknown gate name '" + name + "'");
  }
  return m;
}

}  // namespace

CircuitSchedule schedule_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("layers") || !j.at("layers").is_array())
    throw Error("circuit: expected {layers: [...]}");
  CircuitSchedule s;
  for (const auto& lj : j.at("layers")) {
    GateLayer layer;
    for (const auto& [key, value] : lj.items())
      if (key != "gates" && key != "dwell") throw Error("circuit: unknown layer key '" + key + "'");
    layer.dwell = lj.value("dwell", 1.0);
    for (const auto& gj : lj.at("gates")) {
      for (const auto& [key, value] : gj.items())
        if (key != "support" && key != "unitary" && key != "name") throw Error("circuit: unknown gate key '" + key + "'");
      Gate g;
      g.support = gj.at("support").get<std::vector<int>>();
      if (gj.contains("unitary")) g.unitary = matrix_from_json(gj.at("unitary"));
      else if (gj.contains("name")) g.unitary = named_gate(gj.at("name").get<std::string>());
      else throw Error("circuit: gate needs 'unitary' or 'name'");
      layer.gates.push_back(std::move(g));
    }
    s.layers.push_back(std::move(layer));
  }
  return s;
}

nlohmann::json schedule_to_json(const CircuitSchedule& s) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : s.layers) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : l.gates) gates.push_back({{"support", g.support}, {"unitary", matrix_to_json(g.unitary)}});
    layers.push_back({{"dwell", l.dwell}, {"gates", gates}});
  }
  return {{"layers", layers}};
}

Matrix principal_log(const Matrix& unitary) {
  const Eigen::Index d = unitary.rows();
  if (unitary.cols() != d) throw Error("principal_log: square matrix required");
  // Near the identity the eigenphases lie in (-pi/2, pi/2), where sin is injective, so the Hermitian
  // part (U - U^dag) / 2i shares its eigenvectors with U.
  if ((unitary - Matrix::Identity(d, d)).norm() < 1.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix((unitary - unitary.adjoint()) / cd(0, 2)));
    const Matrix& v = es.eigenvectors();
    RealVector theta = es.eigenvalues().cwiseMax(-1.0).cwiseMin(1.0).array().asin().matrix();
    Vector phase(d);
    for (Eigen::Index i = 0; i < d; ++i) phase(i) = std::polar(1.0, theta(i));
    if ((v * phase.asDiagonal() * v.adjoint() - unitary).cwiseAbs().maxCoeff() <= 1e-10) {
      Matrix h = v * theta.cast<cd>().asDiagonal() * v.adjoint();
      return 0.5 * (h + h.adjoint());
    }
  }
  Eigen::ComplexSchur<Matrix> schur(unitary);
  const Matrix& q = schur.matrixU();
  const Matrix& t = schur.matrixT();
  Matrix theta = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double a = std::arg(t(i, i));
    if (a <= -std::numbers::pi + 1e-12) a = std::numbers::pi;
    theta(i, i) = a;
  }
  // A unitary has a diagonal Schur form with unimodular entries.
  double defect = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      defect = std::max(defect, i == j ? std::abs(std::abs(t(i, i)) - 1.0) : std::abs(t(i, j)));
  if (defect > 1e-10) throw Error("principal_log: input is not unitary");
  Matrix h = q * theta * q.adjoint();
  return 0.5 * (h + h.adjoint());
}

SwitchedLindbladian compile_circuit(const LatticeGeometry& geometry, const CircuitSchedule& schedule, int T,
                                    std::vector<int> timer_of_site) {
  schedule.validate(geometry);
  if (schedule.layers.empty()) throw Error("compile_circuit: empty schedule");
  std::vector<Lindbladian> stages;
  std::vector<int> levels;
  const double total = schedule.total_dwell();
  double cum = 0.0;
  for (const auto& layer : schedule.layers) {
    std::vector<LindbladTerm> terms;
    for (const auto& g : layer.gates) terms.push_back(LindbladTerm{g.support, Matrix(-principal_log(g.unitary) / layer.dwell), {}});
    stages.emplace_back(geometry, std::move(terms));
    cum += layer.dwell;
    levels.push_back(static_cast<int>(std::lround(T * cum / total)));
  }
  stages.emplace_back(geometry);
  if (timer_of_site.empty()) timer_of_site.assign(geometry.num_sites(), 0);
  TimerSpec spec{T, T / total, std::nullopt};
  if (levels.size() >= 2) spec.T1 = levels.front();
  return SwitchedLindbladian(std::move(stages), spec, std::move(levels), std::move(timer_of_site));
}

ErrorBudget error_budget(const SwitchedLindbladian& sw, double t, double epsilon, double tol) {
  return ErrorBudget{band_leak(sw, t), epsilon * sw.system_norm_estimate(), tol};
}

}  // namespace qphase
