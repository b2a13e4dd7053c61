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

#include <complex>
#include <random>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

namespace qphase {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cd>;
using RealVector = Eigen::VectorXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric guard (dense-size limit, step-size underflow, gap collapse) was breached.
class GuardError : public Error {
 public:
  using Error::Error;
};

/// Tolerances and size guards shared by every module.
struct NumericPolicy {
  double algebraic_tol = 1e-10;   // exact matrix identities
  double dynamics_tol = 1e-8;     // integrated dynamics
  double positivity_tol = 1e-9;   // eigenvalue floor for states and Choi matrices
  double integrator_tol = 1e-11;  // default local error target of the adaptive integrator
  std::size_t dense_max_dim = std::size_t{1} << 13;  // dense operators on the Hilbert space
  std::size_t superop_max_dim = 64;                  // dense D^2 x D^2 superoperators
  std::size_t expm_max_dim = 16;  // auto-evolution uses expm below this, integration above
};

const NumericPolicy& default_policy();

/// Sites of a lattice with per-site local dimension and a graph metric.
///
/// Site 0 is the leftmost (slowest) Kronecker factor everywhere in the library.
class LatticeGeometry {
 public:
  enum class Kind { Ring, TorusEdges, Sites };

  /// Ring of `n` sites with nearest-neighbour links.
  static LatticeGeometry ring(int n, int local_dim);
  /// Open chain of sites with arbitrary local dimensions.
  static LatticeGeometry chain(std::vector<int> local_dims);
  /// Edges of an lx-by-ly torus; two edges are adjacent when they share a vertex.
  /// Edge index: horizontal h(x,y) = y*lx + x, vertical v(x,y) = lx*ly + y*lx + x.
  static LatticeGeometry torus_edges(int lx, int ly, int local_dim);
  /// Abstract site list with an explicit adjacency list (graph distance).
  static LatticeGeometry sites(std::vector<int> local_dims,
                               const std::vector<std::pair<int, int>>& links);

  Kind kind() const { return kind_; }
  int num_sites() const { return static_cast<int>(local_dims_.size()); }
  int local_dim(int site) const { return local_dims_.at(site); }
  const std::vector<int>& local_dims() const { return local_dims_; }
  std::size_t hilbert_dim() const;
  /// Dimension of the tensor factor spanned by `sites`.
  std::size_t dim_of(std::span<const int> sites) const;

  /// Graph distance; unreachable pairs get num_sites().
  int distance(int i, int j) const { return dist_[i * num_sites() + j]; }
  int distance_to_set(int i, std::span<const int> set) const;
  /// B(j, alpha) = { i : d(i, j) < alpha }, sorted.
  std::vector<int> ball(int center, int alpha) const;
  /// { x : d(x, set) <= ell }, sorted.
  std::vector<int> neighborhood(std::span<const int> set, int ell) const;
  int diameter() const;
  /// Spatial dimension used for ball-volume bounds (1 for rings and chains, 2 for tori).
  int spatial_dim() const { return spatial_dim_; }
  /// Constant kappa with |B(j, alpha)| <= kappa * alpha^d for all j, alpha.
  double ball_constant() const;
  int torus_lx() const { return lx_; }
  int torus_ly() const { return ly_; }

  /// Geometry restricted to `sites` (in the given order); distances inherited.
  LatticeGeometry subsystem(std::span<const int> sites) const;

  /// Throws Error("unknown sites") unless every entry is a valid, distinct site.
  void check_support(std::span<const int> support) const;

 private:
  LatticeGeometry() = default;
  void compute_distances(const std::vector<std::vector<int>>& adjacency);

  Kind kind_ = Kind::Sites;
  std::vector<int> local_dims_;
  std::vector<int> dist_;
  int spatial_dim_ = 1;
  int lx_ = 0, ly_ = 0;
};

/// An operator acting on a list of sites; the matrix uses the support order as tensor order.
struct LocalOperator {
  std::vector<int> support;
  Matrix matrix;

  LocalOperator() = default;
  LocalOperator(std::vector<int> sup, Matrix m) : support(std::move(sup)), matrix(std::move(m)) {}

  /// Throws if the matrix size disagrees with the support dimensions.
  void validate(const LatticeGeometry& geometry) const;
};

/// op (x) identity on the complement, as a sparse full-space matrix.
SparseMatrix embed(const LocalOperator& op, const LatticeGeometry& geometry);
Matrix embed_dense(const LocalOperator& op, const LatticeGeometry& geometry);

/// Re-express `op` on a larger support (tensoring identities, reordering as needed).
LocalOperator extend(const LocalOperator& op, std::span<const int> new_support,
                     const LatticeGeometry& geometry);

/// Reduced operator on `keep` (sorted into the given order). Empty keep returns the 1x1 trace.
Matrix partial_trace(const Matrix& rho, const LatticeGeometry& geometry, std::span<const int> keep);

/// Tr_{complement}(X) / d_complement (x) identity: the trace-preserving conditional
/// expectation onto operators supported on `region`, returned on the full space.
Matrix restrict_to_region(const Matrix& op, const LatticeGeometry& geometry,
                          std::span<const int> region);

double trace_norm(const Matrix& a);
double operator_norm(const Matrix& a);
double hermiticity_defect(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol);

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);
Vector kron(const Vector& a, const Vector& b);
Matrix projector(const Vector& ket);
Vector normalized(const Vector& ket);
cd inner(const Vector& a, const Vector& b);

/// Hermitian check, trace, minimum eigenvalue of a candidate density matrix.
struct DensityReport {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool valid = false;
};
DensityReport check_density_matrix(const Matrix& rho, const NumericPolicy& policy = default_policy());
double min_eigenvalue(const Matrix& hermitian);

/// Qudit clock Z|k> = w^k |k> and shift X|k> = |k+1 mod d>.
Matrix clock(int d);
Matrix shift(int d);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix identity(std::size_t d);
Vector basis_ket(std::size_t dim, std::size_t index);

/// Matrix <-> {"dims":[rows, cols], "real":[...], "imag":[...]} (row-major).
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

SparseMatrix to_sparse(const Matrix& m, double drop_tol = 0.0);
Matrix to_dense(const SparseMatrix& m);

/// Half the trace norm of a - b.
double trace_distance(const Matrix& a, const Matrix& b);

using Rng = std::mt19937_64;
Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng);
Matrix random_hermitian(std::size_t d, Rng& rng);
/// Haar-distributed unitary (phase-fixed QR of a Ginibre matrix).
Matrix random_unitary(std::size_t d, Rng& rng);
Vector random_ket(std::size_t d, Rng& rng);
/// Full-rank state from the Hilbert-Schmidt ensemble.
Matrix random_density_matrix(std::size_t d, Rng& rng);

}  // namespace qphase
