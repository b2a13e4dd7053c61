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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qphase/qstate.hpp"
#include "qphase/switchgear.hpp"

namespace qphase {

/// s -> H(s) = sum of local terms, s in [0, 1]. The term list must keep its order and supports along s.
class HamiltonianPath {
 public:
  using TermFn = std::function<std::vector<LocalOperator>(double)>;

  HamiltonianPath(LatticeGeometry geometry, TermFn terms, int ground_dim = 1, std::string name = {});

  const LatticeGeometry& geometry() const { return geometry_; }
  const std::string& name() const { return name_; }
  int ground_dim() const { return ground_dim_; }
  std::vector<LocalOperator> terms(double s) const { return terms_(s); }
  /// Central differences with step h, term by term.
  std::vector<LocalOperator> term_derivatives(double s, double h = 1e-4) const;

  Matrix hamiltonian(double s) const;
  Matrix derivative(double s, double h = 1e-4) const;
  /// Terms lying entirely inside `region`, on the subsystem geometry.
  HamiltonianPath restricted_to(std::span<const int> region) const;

 private:
  LatticeGeometry geometry_;
  TermFn terms_;
  int ground_dim_;
  std::string name_;
};

struct Spectrum {
  RealVector energies;
  Matrix vectors;
};
Spectrum spectrum(const Matrix& hermitian);

/// E_g - E_{g-1} with g the ground dimension.
double spectral_gap(const HamiltonianPath& path, double s);
Matrix ground_projector(const HamiltonianPath& path, double s);
/// Ground states of H(s) (columns).
Matrix ground_states(const HamiltonianPath& path, double s);

struct GapProfile {
  std::vector<double> s, gap;
  double min_gap = 0.0;
  double argmin = 0.0;
};
GapProfile gap_profile(const HamiltonianPath& path, int points = 21);

/// Filter W(t) = sgn(t) erfc(lambda |t| / sqrt(q)) / 2, cut at |t| = t_cut.
/// Its transform is W^(w) = (i/w)(1 - exp(-q w^2 / (4 lambda^2))) minus the cut tail.
struct FilterSpec {
  double lambda = 1.0;
  double q = 56.0;
  double t_cut = 40.0;
  double max_tail = 1e-6;

  static FilterSpec for_gap(double lambda, double cut_times_lambda = 40.0);
};
double filter_time(const FilterSpec& f, double t);
/// Imaginary part of the cut transform: W^_cut(w) = i * filter_frequency(f, w). The cut correction is
/// skipped when the tail bound is below 1e-12.
double filter_frequency(const FilterSpec& f, double omega);
/// int_{t_cut}^inf |W(t)| dt, which bounds |W^_cut - W^| at every frequency.
double filter_tail_bound(const FilterSpec& f);

enum class QAMode { Exact, Filtered };

/// K_ex = i[P, dP/ds] with central differences for dP/ds; satisfies dP/ds = i[K_ex, P].
Matrix exact_qa_generator(const HamiltonianPath& path, double s, double h = 1e-4, double min_gap = 1e-6);
/// K = int dt W(t) tau_t(dH/ds), evaluated in the eigenbasis of H(s). Throws when the tail bound
/// exceeds f.max_tail.
Matrix filtered_qa_generator(const HamiltonianPath& path, double s, const FilterSpec& f);
/// Filtered transform of `a` under exp(iHt) . exp(-iHt) for a given spectrum.
Matrix filtered_transform(const Spectrum& sp, const Matrix& a, const FilterSpec& f);
Matrix qa_generator(const HamiltonianPath& path, double s, QAMode mode, const FilterSpec& f);

/// |dP/ds - i[K, P]| in operator norm.
double intertwining_residual(const HamiltonianPath& path, double s, const Matrix& k, double h = 1e-4);

struct TransportResult {
  std::vector<double> s;
  std::vector<Matrix> states;  // transported ground states (columns) at each s
  std::vector<double> fidelity;  // |<exact|transported>|^2 (ground dim 1) or overlap with the ground space
  double min_fidelity = 1.0;
  double projector_defect = 0.0;  // max_s |U P(0) U^dag - P(s)|
};
/// Integrates d psi/ds = i K(s) psi from the ground space of H(0).
TransportResult transport(const HamiltonianPath& path, QAMode mode, const FilterSpec& f, std::span<const double> grid,
                          double tol = 1e-10);
/// Exponential-midpoint product of exp(i h K(s_mid)) over `steps` equal steps on [0, t].
Matrix transport_unitary(const HamiltonianPath& path, QAMode mode, const FilterSpec& f, int steps, double t = 1.0);

// ---------------------------------------------------------------------------
// Quasi-locality

/// Center j = first support site, radius alpha0 = 1 + max distance from j.
std::pair<int, int> term_ball(const LatticeGeometry& geometry, const std::vector<int>& support);

struct DeltaDecomposition {
  int center = 0;
  int alpha0 = 0;
  std::vector<Matrix> deltas;  // full-space Delta^n, n = 0..n_max
  std::vector<double> norms;
};
/// Delta^n(h'_x) = int W [tau^{H_{j,alpha0+n}} - tau^{H_{j,alpha0+n-1}}](h'_x) for term x of the path.
DeltaDecomposition delta_decomposition(const HamiltonianPath& path, double s, int term, int n_max,
                                       const FilterSpec& f, std::size_t max_ball_dim = 4096);

struct KTerms {
  std::map<std::pair<int, int>, Matrix> k;  // (j, alpha) -> k_{j,alpha}
  double reconstruction_residual = 0.0;      // |sum k - K_filtered|
};
/// Groups Delta^n of all terms by (center, alpha0 + n), continuing until the balls cover the lattice.
KTerms k_terms(const HamiltonianPath& path, double s, const FilterSpec& f);

/// F(x) = (1 + x)^{-(d+1)}.
double decay_function(double x, int d);
/// u_mu(t) = exp(-mu t / log^2 t) for t >= e^2, frozen at u_mu(e^2) below.
double u_mu(double mu, double t);
/// (lambda t)^10 u_{2/7}(lambda t), the shape of the filter integral bound.
double i_lambda_bound(double lambda, double t);

struct LiebRobinsonFit {
  std::vector<int> distances;
  std::vector<double> arrival_times;  // first sampled t with |[tau_t(A), B_r]| >= threshold
  double velocity = 0.0;
  double prefactor = 0.0;  // K with |[tau_t A, B]| <= K exp(v t - r) on the samples
};
/// Commutators of Z at `site` evolved under H with Z at other sites.
LiebRobinsonFit fit_lieb_robinson(const LatticeGeometry& geometry, const Matrix& hamiltonian, int site,
                                  std::span<const double> times, double threshold = 1e-3);

struct QuasiLocalityProfile {
  std::vector<double> delta_norms;  // |Delta^n| for n = 0..
  std::size_t knee = 0;             // first n after which the norms are nonincreasing
  double decay_rate = 0.0;          // fitted slope of -log |Delta^n| against n past the knee
  LiebRobinsonFit lieb_robinson;
};
QuasiLocalityProfile quasi_locality_profile(const HamiltonianPath& path, double s, int term, int n_max,
                                            const FilterSpec& f, std::span<const double> lr_times);

// ---------------------------------------------------------------------------
// Patches and circuits

/// Sites of A with a neighbour outside A.
std::vector<int> inner_boundary(const LatticeGeometry& geometry, std::span<const int> region);
/// { i : d(i, inner boundary of A) < omega }.
std::vector<int> boundary_region(const LatticeGeometry& geometry, std::span<const int> region, int omega);

struct PatchedTransport {
  Matrix full;                        // U, exponential midpoint
  std::vector<Matrix> block_unitaries;  // local transports of each block (on the block subsystem)
  std::vector<Matrix> patch_unitaries;  // local patch unitaries (on each patch region)
  Matrix blocks;                      // W = tensor product of block unitaries
  Matrix patches;                     // V_Omega = product of patch unitaries
  double residual = 0.0;              // |U - W V_Omega|
  double support_leak = 0.0;          // Frobenius weight of the patch generator outside the patch regions
};
/// U = W V with V' = i V L, L = U^dag (K - sum_B K_B) U taken step by step from the discrete propagators,
/// and L approximated by its conditional expectations onto the patch regions.
PatchedTransport patched_transport(const HamiltonianPath& path, const std::vector<std::vector<int>>& blocks,
                                   const std::vector<std::vector<int>>& patch_regions, QAMode mode,
                                   const FilterSpec& f, int steps, double t = 1.0);

struct PatchSplit {
  int omega = 0;
  std::vector<int> region;
  double residual = 0.0;
  double support_leak = 0.0;
};
/// Two blocks A and its complement with the patch on boundary_region(A, omega), for each omega.
std::vector<PatchSplit> patch_split(const HamiltonianPath& path, std::span<const int> region,
                                    std::span<const int> omegas, QAMode mode, const FilterSpec& f, int steps = 100,
                                    double t = 1.0);

struct PathCircuit {
  CircuitSchedule schedule;  // patches act first, then blocks: C = W V_Omega
  double fidelity = 0.0;     // |<psi(1)| C |psi(0)>|^2
  double distance = 0.0;     // trace distance of C rho0 C^dag to rho1
  PatchedTransport transport;
};
/// Ring of N sites cut into blocks of `omega` consecutive sites (last block ragged); one patch of
/// width `omega` centred on each cut.
PathCircuit circuit_from_path(const HamiltonianPath& path, int omega, QAMode mode, const FilterSpec& f,
                              int steps = 100);

// ---------------------------------------------------------------------------
// Shipped paths

/// H(s) = -(1-s) Z - s X.
HamiltonianPath single_qubit_path();
/// The single-qubit path on each of n uncoupled sites.
HamiltonianPath uncoupled_path(int n);
/// Ring: H(s) = -h sum X_i - s g sum Z_i - J sum Z_i Z_{i+1}.
HamiltonianPath paramagnetic_ring_path(int n, double h = 1.0, double g = 1.0, double J = 0.2);

}  // namespace qphase
