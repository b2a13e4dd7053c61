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

#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "qphase/integrator.hpp"
#include "qphase/qstate.hpp"

namespace qphase {

/// One local term: -i[H, .] plus dissipators built from `jumps`, all on `support`.
struct LindbladTerm {
  std::vector<int> support;
  Matrix hamiltonian;
  std::vector<Matrix> jumps;

  /// Local dimension of the support, inferred from whichever operator is present.
  Eigen::Index local_dim() const;
};

/// Sum of local terms on a lattice, compiled to sparse full-space operators.
///
/// The action is written as G rho + rho G^dag + sum_k L_k rho L_k^dag with
/// G = -iH - 1/2 sum_k L_k^dag L_k.
class Lindbladian {
 public:
  Lindbladian(LatticeGeometry geometry, std::vector<LindbladTerm> terms = {});

  const LatticeGeometry& geometry() const { return geometry_; }
  const std::vector<LindbladTerm>& terms() const { return terms_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(geometry_.hilbert_dim()); }

  /// Largest diameter of a term support.
  int locality_radius() const;
  /// sum_X 2(|H_X| + sum_j |L_{X,j}|^2), an upper estimate of the 1->1 norm.
  double norm_estimate() const;

  Matrix apply(const Matrix& rho) const;
  /// Heisenberg-picture generator: the Hilbert-Schmidt adjoint of apply.
  Matrix apply_dual(const Matrix& a) const;

  /// Terms lying entirely inside `region`, re-expressed on the subsystem geometry
  /// (sites relabelled by their position in `region`).
  Lindbladian restricted_to(std::span<const int> region) const;

  Lindbladian scaled(double factor) const;
  Lindbladian plus(const Lindbladian& other) const;

  const SparseMatrix& effective_generator() const { return g_; }
  const std::vector<SparseMatrix>& jump_operators() const { return jumps_; }

 private:
  void compile();

  LatticeGeometry geometry_;
  std::vector<LindbladTerm> terms_;
  SparseMatrix g_;
  std::vector<SparseMatrix> jumps_;
};

Matrix vec_to_matrix(const Vector& v, Eigen::Index d);
Vector matrix_to_vec(const Matrix& m);

/// Dense D^2 x D^2 matrix with vec(A rho B) = (B^T (x) A) vec(rho), column stacking.
Matrix assemble_superoperator(const Lindbladian& l, const NumericPolicy& policy = default_policy());
/// exp(t S) for the assembled superoperator.
Matrix propagator(const Lindbladian& l, double t, const NumericPolicy& policy = default_policy());

Matrix evolve_expm(const Lindbladian& l, const Matrix& rho0, double t,
                   const NumericPolicy& policy = default_policy());
std::vector<Matrix> evolve_integrate(const Lindbladian& l, const Matrix& rho0,
                                     std::span<const double> times, double tol,
                                     IntegratorStats* stats = nullptr);
/// expm for small dimensions, matrix-free integration otherwise.
Matrix evolve(const Lindbladian& l, const Matrix& rho0, double t,
              const NumericPolicy& policy = default_policy());

Matrix heisenberg_evolve(const Lindbladian& l, const Matrix& a, double t,
                         const NumericPolicy& policy = default_policy());

struct ChoiReport {
  double min_eigenvalue = 0.0;
  double trace_preservation_defect = 0.0;
  Matrix choi;
};
/// Unnormalized Choi matrix sum_ij |i><j| (x) Phi(|i><j|) of the channel exp(tL).
ChoiReport choi_cp_check(const Lindbladian& l, double t, const NumericPolicy& policy = default_policy());
ChoiReport choi_of_superoperator(const Matrix& superop);

struct ConvergenceReport {
  std::vector<double> times;
  std::vector<double> trace_distances;  // half trace norm
  std::optional<double> rate;           // fitted mu; empty when no exponential regime was found
  double prefactor = 0.0;
  double fit_residual = 0.0;
  std::size_t window_begin = 0;  // first index used in the fit
  bool nonmonotone_tail = false;
};

/// Least-squares fit of log d(t) = log C - mu t over the monotone tail above `floor`.
ConvergenceReport fit_convergence(const Lindbladian& l, const Matrix& rho0, const Matrix& rho1,
                                  std::span<const double> times,
                                  const NumericPolicy& policy = default_policy());
/// Same fit with a caller-supplied propagator (closed forms, large composites).
ConvergenceReport fit_convergence(const std::function<Matrix(double)>& state_at, const Matrix& rho1,
                                  std::span<const double> times, double floor = 1e-12);
ConvergenceReport fit_distances(std::vector<double> times, std::vector<double> distances,
                                double floor = 1e-12);

/// CSV with header t,trace_distance,trace,min_eig.
void write_trajectory_csv(std::ostream& out, std::span<const double> times,
                          std::span<const Matrix> states, const Matrix& target);

/// Random local Lindbladian: one term per nearest-neighbour pair (or per site for a
/// single site) with a random Hermitian part and `jumps_per_term` random jumps.
Lindbladian random_lindbladian(const LatticeGeometry& geometry, Rng& rng, int jumps_per_term = 2,
                               double scale = 1.0);

}  // namespace qphase
