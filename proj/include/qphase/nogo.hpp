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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "qphase/lindblad.hpp"
#include "qphase/models.hpp"
#include "qphase/qstate.hpp"

namespace qphase {

/// Heisenberg evolution of `base` under the terms of L lying inside S_ell = { x : d(x, supp A) <= ell }.
struct FattenedOperator {
  LocalOperator base;
  int ell = 0;
  double t = 0.0;
  std::vector<int> region;  // S_ell, sorted
  Matrix op;                // on the region subsystem

  LocalOperator local() const { return LocalOperator(region, op); }
  Matrix full(const LatticeGeometry& geometry) const { return embed_dense(local(), geometry); }
};

FattenedOperator fatten(const LocalOperator& a, const Lindbladian& l, double t, int ell,
                        std::size_t max_dim = 4096);

struct LightConeProbe {
  std::vector<double> times;
  std::vector<int> distances;
  std::vector<std::vector<double>> commutators;  // [distance index][time index]
  double velocity = 0.0;                          // v in K exp(v t - a d)
  double decay = 0.0;                             // a
  double prefactor = 0.0;                         // K
  int fit_points = 0;
};
/// |[e^{tL*}(A_x), B_y]| for single-site A at x and B at each y. The log-linear fit uses the samples
/// with 1e-14 < |[.,.]| < 0.5 and t > 0; throws when every sample is at or above 0.5.
LightConeProbe lr_probe(const Lindbladian& l, const Matrix& a, int x, const Matrix& b, std::span<const int> ys,
                        std::span<const double> times);

struct OverlapReport {
  Matrix gram;       // T
  Matrix reference;  // S
  double det_t = 0.0;
  double det_s = 0.0;
  int rank = 0;  // numerical rank of T
  std::vector<double> residuals;  // Tr[H rho] for each normalized probe
  double max_residual = 0.0;
  double schwarz_defect = 0.0;
  double position_defect = 0.0;
  std::map<std::string, double> ledger;
};

/// Probes fat(Xx^a) fat(Xy^b)|phi> against Xx^a Xy^b |phi>, a, b < n, index a + n b.
/// The Schwarz defect is max |<phi| fat(P) fat(Q) |phi> - <phi| fat(PQ) |phi>| over P, Q in the logical X
/// group; the position defect is max_a |<phi| fat(Xx(x0)^-a) fat(Xx(x1)^a) |phi> - 1|.
/// The probes are dense; lr_probe, overlap_probe and ghz_nogo_probe throw GuardError above dimension 4096.
OverlapReport overlap_probe(const QuantumDouble& qd, const Vector& phi, const Lindbladian& l, double t, int ell,
                            int x0 = 0, int x1 = 1);

/// Sum over linked pairs of (1 - Pi), Pi projecting onto span{|kk>, k < m}.
SparseMatrix ghz_parent_hamiltonian(const LatticeGeometry& geometry, int m);

/// Probes fat(Z_x^b)|GHZ_m>, b < n, against the orthonormal reference S = 1 (n levels per site).
OverlapReport ghz_nogo_probe(int m, int n, const Lindbladian& l, double t, int ell, int x = 0);

/// Tr[rho T*(A^dag A)] - Tr[rho T*(A)^dag T*(A)] for T = e^{tL}; nonnegative for every channel.
double schwarz_gap(const Lindbladian& l, double t, const Matrix& a, const Matrix& rho);

/// Jumps sqrt(r/4) {X, Y, Z} on every site: L(rho) = r (Tr(rho) 1/2 - rho) per qubit.
Lindbladian depolarizing_lindbladian(const LatticeGeometry& geometry, double rate);

}  // namespace qphase
