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

#include "qphase/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qphase {

Eigen::Index LindbladTerm::local_dim() const {
  if (hamiltonian.size() > 0) return hamiltonian.rows();
  if (!jumps.empty()) return jumps.front().rows();
  return 0;
}

Lindbladian::Lindbladian(LatticeGeometry geometry, std::vector<LindbladTerm> terms)
    : geometry_(std::move(geometry)), terms_(std::move(terms)) {
  compile();
}

void Lindbladian::compile() {
  const Eigen::Index d = dim();
  g_ = SparseMatrix(d, d);
  jumps_.clear();
  for (auto& term : terms_) {
    geometry_.check_support(term.support);
    const auto local = static_cast<Eigen::Index>(geometry_.dim_of(term.support));
    if (term.hamiltonian.size() == 0) term.hamiltonian = Matrix::Zero(local, local);
    if (term.hamiltonian.rows() != local || term.hamiltonian.cols() != local)
      throw Error("LindbladTerm: hamiltonian dimension does not match support");
    if (hermiticity_defect(term.hamiltonian) > 1e-12)
      throw Error("LindbladTerm: hamiltonian is not Hermitian");
    Matrix g = cd(0.0, -1.0) * term.hamiltonian;
    for (const auto& j : term.jumps) {
      if (j.rows() != local || j.cols() != local)
        throw Error("LindbladTerm: jump dimension does not match support");
      g -= 0.5 * j.adjoint() * j;
      jumps_.push_back(embed(LocalOperator(term.support, j), geometry_));
    }
    g_ += embed(LocalOperator(term.support, g), geometry_);
  }
  g_.prune(cd(0.0), 0.0);
}

int Lindbladian::locality_radius() const {
  int r = 0;
  for (const auto& t : terms_)
    for (int a : t.support)
      for (int b : t.support) r = std::max(r, geometry_.distance(a, b));
  return r;
}

double Lindbladian::norm_estimate() const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double s = operator_norm(t.hamiltonian);
    for (const auto& j : t.jumps) s += std::pow(operator_norm(j), 2);
    total += 2.0 * s;
  }
  return total;
}

Matrix Lindbladian::apply(const Matrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) throw Error("Lindbladian::apply: dimension mismatch");
  Matrix out = g_ * rho;
  out += (g_ * rho.adjoint()).adjoint();
  for (const auto& l : jumps_) {
    Matrix lr = l * rho;
    out += (l * lr.adjoint()).adjoint();
  }
  return out;
}

Matrix Lindbladian::apply_dual(const Matrix& a) const {
  if (a.rows() != dim() || a.cols() != dim()) throw Error("Lindbladian::apply_dual: dimension mismatch");
  const SparseMatrix gd = g_.adjoint();
  Matrix out = gd * a;
  out += (gd * a.adjoint()).adjoint();
  for (const auto& l : jumps_) {
    const SparseMatrix ld = l.adjoint();
    Matrix la = ld * a;
    out += (ld * la.adjoint()).adjoint();
  }
  return out;
}

Lindbladian Lindbladian::restricted_to(std::span<const int> region) const {
  geometry_.check_support(region);
  std::vector<int> pos(geometry_.num_sites(), -1);
  for (std::size_t i = 0; i < region.size(); ++i) pos[region[i]] = static_cast<int>(i);
  std::vector<LindbladTerm> kept;
  for (const auto& t : terms_) {
    const bool inside = std::all_of(t.support.begin(), t.support.end(), [&](int s) { return pos[s] >= 0; });
    if (!inside) continue;
    LindbladTerm r = t;
    for (int& s : r.support) s = pos[s];
    kept.push_back(std::move(r));
  }
  return Lindbladian(geometry_.subsystem(region), std::move(kept));
}

Lindbladian Lindbladian::scaled(double factor) const {
  if (factor < 0.0) throw Error("Lindbladian::scaled: negative factor");
  std::vector<LindbladTerm> t = terms_;
  const double root = std::sqrt(factor);
  for (auto& term : t) {
    term.hamiltonian *= factor;
    for (auto& j : term.jumps) j *= root;
  }
  return Lindbladian(geometry_, std::move(t));
}

Lindbladian Lindbladian::plus(const Lindbladian& other) const {
  if (other.geometry_.local_dims() != geometry_.local_dims())
    throw Error("Lindbladian::plus: geometries differ");
  std::vector<LindbladTerm> t = terms_;
  t.insert(t.end(), other.terms_.begin(), other.terms_.end());
  return Lindbladian(geometry_, std::move(t));
}

Matrix vec_to_matrix(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) throw Error("vec_to_matrix: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Vector matrix_to_vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

namespace {

void check_superop_guard(const Lindbladian& l, const NumericPolicy& policy) {
  if (static_cast<std::size_t>(l.dim()) > policy.superop_max_dim) {
    std::ostringstream msg;
    msg << "dense superoperator guard: dimension " << l.dim() << " exceeds " << policy.superop_max_dim
        << "; use evolve_integrate for matrix-free evolution";
    throw GuardError(msg.str());
  }
}

void check_time(double t) {
  if (!(t >= 0.0)) throw Error("negative evolution time rejected: the dissipative semigroup is not invertible");
}

}  // namespace

Matrix assemble_superoperator(const Lindbladian& l, const NumericPolicy& policy) {
  check_superop_guard(l, policy);
  const Eigen::Index d = l.dim();
  const SparseMatrix id = to_sparse(Matrix::Identity(d, d));
  const SparseMatrix& g = l.effective_generator();
  SparseMatrix s = Eigen::kroneckerProduct(id, g).eval();
  s += Eigen::kroneckerProduct(SparseMatrix(g.conjugate()), id).eval();
  for (const auto& j : l.jump_operators()) s += Eigen::kroneckerProduct(SparseMatrix(j.conjugate()), j).eval();
  return Matrix(s);
}

Matrix propagator(const Lindbladian& l, double t, const NumericPolicy& policy) {
  check_time(t);
  Matrix s = assemble_superoperator(l, policy);
  if (t == 0.0) return Matrix::Identity(s.rows(), s.cols());
  return Matrix(t * s).exp();
}

Matrix evolve_expm(const Lindbladian& l, const Matrix& rho0, double t, const NumericPolicy& policy) {
  check_time(t);
  if (rho0.rows() != l.dim() || rho0.cols() != l.dim()) throw Error("evolve_expm: dimension mismatch");
  if (t == 0.0) return rho0;
  return vec_to_matrix(propagator(l, t, policy) * matrix_to_vec(rho0), l.dim());
}

std::vector<Matrix> evolve_integrate(const Lindbladian& l, const Matrix& rho0, std::span<const double> times,
                                     double tol, IntegratorStats* stats) {
  if (rho0.rows() != l.dim() || rho0.cols() != l.dim()) throw Error("evolve_integrate: dimension mismatch");
  for (double t : times) check_time(t);
  auto rhs = [&l](double, const Matrix& r) { return l.apply(r); };
  return integrate_dopri5(rhs, rho0, 0.0, times, IntegratorOptions::with_tolerance(tol), stats);
}

Matrix evolve(const Lindbladian& l, const Matrix& rho0, double t, const NumericPolicy& policy) {
  check_time(t);
  if (static_cast<std::size_t>(l.dim()) <= policy.expm_max_dim) return evolve_expm(l, rho0, t, policy);
  const double ts[] = {t};
  return evolve_integrate(l, rho0, ts, policy.integrator_tol).front();
}

Matrix heisenberg_evolve(const Lindbladian& l, const Matrix& a, double t, const NumericPolicy& policy) {
  check_time(t);
  if (a.rows() != l.dim() || a.cols() != l.dim()) throw Error("heisenberg_evolve: dimension mismatch");
  if (t == 0.0) return a;
  if (static_cast<std::size_t>(l.dim()) <= policy.expm_max_dim) {
    Matrix s = assemble_superoperator(l, policy);
    Matrix p = Matrix(t * s.adjoint()).exp();
    return vec_to_matrix(p * matrix_to_vec(a), l.dim());
  }
  auto rhs = [&l](double, const Matrix& x) { return l.apply_dual(x); };
  const double ts[] = {t};
  return integrate_dopri5(rhs, a, 0.0, std::span<const double>(ts),
                          IntegratorOptions::with_tolerance(policy.integrator_tol))
      .front();
}

ChoiReport choi_of_superoperator(const Matrix& superop) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(superop.rows()))));
  if (d * d != superop.rows() || superop.rows() != superop.cols())
    throw Error("choi_of_superoperator: not a square superoperator");
  ChoiReport rep;
  rep.choi = Matrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      const Matrix image = vec_to_matrix(superop.col(i + j * d), d);
      rep.choi.block(i * d, j * d, d, d) = image;
      const double expected = i == j ? 1.0 : 0.0;
      rep.trace_preservation_defect =
          std::max(rep.trace_preservation_defect, std::abs(image.trace() - expected));
    }
  rep.min_eigenvalue = min_eigenvalue(rep.choi);
  return rep;
}

ChoiReport choi_cp_check(const Lindbladian& l, double t, const NumericPolicy& policy) {
  return choi_of_superoperator(propagator(l, t, policy));
}

ConvergenceReport fit_distances(std::vector<double> times, std::vector<double> distances, double floor) {
  if (times.size() != distances.size()) throw Error("fit_distances: size mismatch");
  ConvergenceReport rep;
  rep.times = std::move(times);
  rep.trace_distances = std::move(distances);
  const auto& t = rep.times;
  const auto& d = rep.trace_distances;
  const std::size_t n = t.size();
  // Last index above the floor, then walk back while the sequence stays strictly decreasing.
  std::size_t end = n;
  while (end > 0 && !(d[end - 1] > floor)) --end;
  if (end < 3) return rep;
  std::size_t begin = end - 1;
  while (begin > 0 && d[begin - 1] > d[begin]) --begin;
  rep.nonmonotone_tail = begin > 0;
  rep.window_begin = begin;
  const std::size_t m = end - begin;
  if (m < 3) return rep;
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const double y = std::log(d[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
  }
  const double den = static_cast<double>(m) * stt - st * st;
  if (den <= 0.0) return rep;
  const double slope = (static_cast<double>(m) * sty - st * sy) / den;
  const double icpt = (sy - slope * st) / static_cast<double>(m);
  double res = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double e = std::log(d[i]) - (icpt + slope * t[i]);
    res += e * e;
  }
  rep.rate = -slope;
  rep.prefactor = std::exp(icpt);
  rep.fit_residual = std::sqrt(res / static_cast<double>(m));
  return rep;
}

ConvergenceReport fit_convergence(const std::function<Matrix(double)>& state_at, const Matrix& rho1,
                                  std::span<const double> times, double floor) {
  std::vector<double> ts(times.begin(), times.end()), ds;
  ds.reserve(ts.size());
  for (double t : ts) ds.push_back(trace_distance(state_at(t), rho1));
  return fit_distances(std::move(ts), std::move(ds), floor);
}

ConvergenceReport fit_convergence(const Lindbladian& l, const Matrix& rho0, const Matrix& rho1,
                                  std::span<const double> times, const NumericPolicy& policy) {
  if (static_cast<std::size_t>(l.dim()) <= policy.expm_max_dim) {
    const Matrix s = assemble_superoperator(l, policy);
    const Vector v0 = matrix_to_vec(rho0);
    return fit_convergence([&](double t) { return vec_to_matrix(Matrix(t * s).exp() * v0, l.dim()); },
                           rho1, times);
  }
  std::vector<double> sorted(times.begin(), times.end());
  if (!std::is_sorted(sorted.begin(), sorted.end())) throw Error("fit_convergence: times must be sorted");
  const auto states = evolve_integrate(l, rho0, sorted, policy.integrator_tol);
  std::vector<double> ds;
  for (const auto& s : states) ds.push_back(trace_distance(s, rho1));
  return fit_distances(std::move(sorted), std::move(ds));
}

void write_trajectory_csv(std::ostream& out, std::span<const double> times, std::span<const Matrix> states,
                          const Matrix& target) {
  if (times.size() != states.size()) throw Error("write_trajectory_csv: size mismatch");
  out << "t,trace_distance,trace,min_eig\n";
  out << std::setprecision(12);
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << times[i] << ',' << trace_distance(states[i], target) << ',' << states[i].trace().real() << ','
        << min_eigenvalue(states[i]) << '\n';
  }
}

Lindbladian random_lindbladian(const LatticeGeometry& geometry, Rng& rng, int jumps_per_term, double scale) {
  std::vector<std::vector<int>> supports;
  const int n = geometry.num_sites();
  if (n == 1) supports.push_back({0});
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (geometry.distance(i, j) == 1) supports.push_back({i, j});
  std::vector<LindbladTerm> terms;
  for (auto& sup : supports) {
    const std::size_t d = geometry.dim_of(sup);
    LindbladTerm t;
    t.support = sup;
    t.hamiltonian = scale * random_hermitian(d, rng) / std::sqrt(static_cast<double>(d));
    for (int k = 0; k < jumps_per_term; ++k)
      t.jumps.push_back(std::sqrt(scale) * random_matrix(d, d, rng) / std::sqrt(2.0 * static_cast<double>(d)));
    terms.push_back(std::move(t));
  }
  return Lindbladian(geometry, std::move(terms));
}

}  // namespace qphase
