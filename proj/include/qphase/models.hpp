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
#include <string>
#include <vector>

#include "qphase/lindblad.hpp"

namespace qphase {

// ---------------------------------------------------------------------------
// Single-site channels and their product Lindbladians

/// CPTP map on one site given by Kraus operators.
struct SiteChannel {
  std::vector<Matrix> kraus;

  Eigen::Index dim() const { return kraus.empty() ? 0 : kraus.front().rows(); }
  Matrix apply(const Matrix& rho) const;
  /// Column-stacking superoperator sum_k conj(K) (x) K.
  Matrix superoperator() const;
  double trace_preservation_defect() const;
};

/// rho -> Tr[rho] |psi><psi|.
SiteChannel replacement_channel(const Vector& target);
/// On a 4-level site: rho -> P rho P + X^dag (1-P) rho (1-P) X with P = |0><0| + |2><2|.
SiteChannel condensation_channel();
/// max entry of |S^2 - S| for the channel superoperator S.
double idempotence_residual(const SiteChannel& ch);

/// sum_i (T_i - id) over `sites` (all sites when empty); the Kraus operators become jumps.
Lindbladian channel_lindbladian(const LatticeGeometry& geometry, const SiteChannel& ch, std::vector<int> sites = {});
Lindbladian product_driver(const LatticeGeometry& geometry, const Vector& target, std::vector<int> sites = {});
Lindbladian ghz_condense_lindbladian(const LatticeGeometry& geometry);

/// The channel on one site of a (possibly sparse) full-space operator.
SparseMatrix apply_site_channel(const SparseMatrix& rho, const LatticeGeometry& geometry, int site,
                                const SiteChannel& ch);
/// prod_i [(1 - e^{-t}) T_i + e^{-t} id] applied to rho; t = inf gives T_Lambda.
SparseMatrix closed_form_evolve(const SparseMatrix& rho, const LatticeGeometry& geometry, const SiteChannel& ch,
                                double t, std::vector<int> sites = {});
Matrix closed_form_evolve(const Matrix& rho, const LatticeGeometry& geometry, const SiteChannel& ch, double t,
                          std::vector<int> sites = {});

// ---------------------------------------------------------------------------
// GHZ family

/// |psi_beta> = n^{-1/2} sum_alpha w_n^{alpha beta} |alpha ... alpha> on N sites of dimension local_dim (>= n).
Vector ghz_state(int n, int N, int beta = 0, int local_dim = 0);
/// Equal superposition of |a ... a> over the given levels.
Vector ghz_on_levels(const std::vector<int>& levels, int N, int local_dim);

// ---------------------------------------------------------------------------
// Z_n quantum double

/// prod_s X_s^{x_s} Z_s^{z_s} (Z acts first) on qudits of dimension n.
struct QuditPauli {
  std::vector<int> x, z;

  Vector apply(const Vector& ket, int n) const;
  SparseMatrix matrix(int n) const;
  /// X^{kx} Z^{kz}; the scalar phase of the true power is dropped.
  QuditPauli power(int k, int n) const;
  std::vector<int> support() const;
};
/// Symplectic commutation phase exponent: P Q = w^{c} Q P.
int commutation_exponent(const QuditPauli& p, const QuditPauli& q, int n);

class QuantumDouble {
 public:
  /// Edges of an lx-by-ly torus with qudits of dimension n. Star at vertex (x,y):
  /// X on outgoing h(x,y), v(x,y) and X^dag on incoming h(x-1,y), v(x,y-1).
  /// Plaquette with corner (x,y): Z on h(x,y), v(x+1,y) and Z^dag on h(x,y+1), v(x,y).
  QuantumDouble(int n, int lx, int ly, std::size_t max_dim = std::size_t{1} << 18);

  int n() const { return n_; }
  int lx() const { return lx_; }
  int ly() const { return ly_; }
  int num_edges() const { return 2 * lx_ * ly_; }
  std::size_t dim() const { return dim_; }
  const LatticeGeometry& geometry() const { return geometry_; }
  int h(int x, int y) const;
  int v(int x, int y) const;

  const std::vector<QuditPauli>& stars() const { return stars_; }
  const std::vector<QuditPauli>& plaquettes() const { return plaquettes_; }

  /// X on the horizontal edges h(x0, .), crossing every horizontal loop once.
  QuditPauli logical_x_x(int x0 = 0) const;
  /// X on the vertical edges v(., y0).
  QuditPauli logical_x_y(int y0 = 0) const;
  /// Z on the horizontal edges h(., y0).
  QuditPauli logical_z_y(int y0 = 0) const;
  /// Z on the vertical edges v(x0, .).
  QuditPauli logical_z_x(int x0 = 0) const;

  /// |alpha + n beta> = Xx^alpha Xy^beta |g>, with |g> the star-symmetrized all-zero state.
  const std::vector<Vector>& ground_basis() const { return basis_; }
  Matrix ground_basis_matrix() const;
  /// <a| op |b> in the ground basis.
  Matrix project(const QuditPauli& op) const;
  Matrix project(const Matrix& full_op) const;

  /// Order of the group generated by stars and plaquettes, counted symbolically.
  std::size_t stabilizer_group_size() const;
  /// n^E / |stabilizer group|.
  std::size_t ground_space_dimension_symbolic() const;
  /// Null-space dimension of the projector-form parent Hamiltonian (dense; small n^E only).
  int ground_space_dimension_dense(double tol = 1e-9) const;
  /// Number of generators minus the rank of the stabilizer group (redundancies).
  int redundant_generators() const;
  /// Largest |commutation exponent| among all pairs of stabilizers (0 when they all commute).
  int stabilizer_commutation_defect() const;
  /// sum_v (1 - P_v) + sum_p (1 - P_p), with P the projector onto eigenvalue 1.
  SparseMatrix parent_hamiltonian() const;
  /// Largest stabilizer violation |S|g> - |g>| over the ground basis.
  double ground_basis_residual() const;

  /// Cyclic shift and clock of order n^2 on the ground basis.
  Matrix x_tilde(int power = 1) const;
  Matrix z_tilde(int power = 1) const;

 private:
  int n_, lx_, ly_;
  std::size_t dim_;
  LatticeGeometry geometry_;
  std::vector<QuditPauli> stars_, plaquettes_;
  std::vector<Vector> basis_;
};

struct BasisGenerationReport {
  int rank_x = 0;  // rank of the Gram matrix of {Xt^i psi}
  int rank_z = 0;  // rank of the Gram matrix of {Zt^i psi}
  int full_rank = 0;
  bool passes = false;
  Matrix gram_x, gram_z;
};
/// `coefficients` expresses psi in the ground basis (length n^2).
BasisGenerationReport basis_generation_check(const QuantumDouble& qd, const Vector& coefficients, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Isometric MPS and symmetry covariance

/// Projective representation of Z2 x Z2 on a qubit, elements (a, b) indexed 2a + b.
struct ProjectiveRep {
  std::string label;
  std::vector<Matrix> V;
  /// omega[g][h] with V_g V_h = exp(i omega) V_{gh}.
  std::vector<std::vector<double>> omega;

  static int multiply(int g, int h) { return g ^ h; }
  /// The complex-conjugate representation, carrying the inverse cocycle.
  ProjectiveRep inverse() const;
  double cocycle_defect() const;
  /// U_g = V_g (x) conj(V_g) on a site (L, R).
  Matrix onsite(int g) const;
};
/// V_(a,b) = X^a Z^b, cocycle pi * b * a'.
ProjectiveRep pauli_projective_rep();
/// V_(a,b) = Z^(a+b), trivial cocycle.
ProjectiveRep trivial_rep();

/// Maximally entangled state sum_k |k,k> / sqrt(D) on a site (L, R).
Vector psi_plus(int D = 2);

/// Ring of N sites, each a pair (L, R) of D-level systems, with R_i maximally entangled with L_{i+1}.
struct IsometricMPS {
  int N = 2;
  int D = 2;
  ProjectiveRep rep;

  LatticeGeometry geometry() const;
  Vector state() const;
  /// prod_i U_g on every site.
  Matrix symmetry(int g) const;
};

/// max over g and sampled X of |U_g^dag L(U_g X U_g^dag) U_g - L(X)| with U_g = prod of `onsite[g]`.
double covariance_check(const Lindbladian& l, const std::vector<Matrix>& onsite, Rng& rng, int samples = 4);

struct BridgeStates {
  std::vector<IsometricMPS> factors;  // omega0, omega1^{-1}, omega1
  std::vector<Vector> phi0;
  std::vector<Vector> phi1;
};
/// Factors (|phi_D,w0>, |phi_D,w1^{-1}>, |phi_D,w1>) and (|psi+>^N, |psi+>^N, |phi_D,w1>).
BridgeStates spt_bridge_states(int N, const ProjectiveRep& omega0, const ProjectiveRep& omega1);

struct BridgeEvolution {
  std::vector<double> factor_distances;  // trace distance of each factor to its target
  double distance_bound = 0.0;          // sum of factor distances
  std::optional<double> exact_distance;  // joint distance of factors 1-2, when small enough
  double max_symmetry_defect = 0.0;     // |U_g rho U_g^dag - rho| over factors 1-2
};
/// Drives factors 1 and 2 with the |psi+> product driver (closed form) for time t.
BridgeEvolution evolve_bridge(const BridgeStates& b, double t);

}  // namespace qphase
