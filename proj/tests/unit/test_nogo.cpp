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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qphase/nogo.hpp"

using namespace qphase;

namespace {

Lindbladian dephasing_ring(int n, double rate) {
  const auto geo = LatticeGeometry::ring(n, 2);
  std::vector<LindbladTerm> terms;
  const Matrix xx = kron(pauli_x(), pauli_x()), yy = kron(pauli_y(), pauli_y());
  for (int i = 0; i < n; ++i)
    terms.push_back(LindbladTerm{{i, (i + 1) % n}, Matrix(xx + yy), {std::sqrt(rate) * kron(pauli_z(), identity(2))}});
  return Lindbladian(geo, std::move(terms));
}

Matrix random_state(std::size_t d, Rng& rng) {
  const Matrix g = random_matrix(d, d, rng);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("fattening") {
  const auto geo = LatticeGeometry::ring(4, 2);
  SUBCASE("no terms leave the operator unchanged") {
    const Lindbladian empty(geo);
    const auto f = fatten(LocalOperator({1}, pauli_x()), empty, 2.0, 1);
    CHECK(f.region == std::vector<int>{0, 1, 2});
    CHECK((f.full(geo) - embed_dense(LocalOperator({1}, pauli_x()), geo)).norm() < 1e-14);
  }
  SUBCASE("full radius equals Heisenberg evolution") {
    Rng rng(7);
    const auto small = LatticeGeometry::ring(2, 2);
    const auto l = random_lindbladian(small, rng);
    const Matrix a = random_hermitian(2, rng);
    const auto f = fatten(LocalOperator({0}, a), l, 0.7, small.diameter());
    const Matrix ref = heisenberg_evolve(l, embed_dense(LocalOperator({0}, a), small), 0.7);
    CHECK((f.full(small) - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("error shrinks with the radius and norms contract") {
    const auto l = dephasing_ring(4, 0.5);
    const Matrix a = embed_dense(LocalOperator({0}, pauli_x()), geo);
    const Matrix exact = heisenberg_evolve(l, a, 0.8);
    double prev = 1e9;
    for (int ell = 0; ell <= 2; ++ell) {
      const auto f = fatten(LocalOperator({0}, pauli_x()), l, 0.8, ell);
      const double err = operator_norm(f.full(geo) - exact);
      CHECK(err < prev);
      CHECK(operator_norm(f.op) <= 1.0 + 1e-9);
      prev = err;
    }
    CHECK(prev < 1e-9);
  }
  SUBCASE("guard") { CHECK_THROWS_AS(fatten(LocalOperator({0}, pauli_x()), Lindbladian(geo), 1.0, 1, 4), GuardError); }
}

TEST_CASE("light cone probe") {
  const auto l = dephasing_ring(8, 0.1);
  const std::vector<int> ys{1, 2, 3, 4};
  const std::vector<double> times{0.0, 0.1, 0.2, 0.3, 0.4};
  const auto p = lr_probe(l, pauli_z(), 0, pauli_x(), ys, times);
  for (std::size_t i = 0; i < ys.size(); ++i) {
    CHECK(p.commutators[i][0] < 1e-14);
    for (std::size_t k = 1; k < times.size(); ++k) CHECK(p.commutators[i][k] > p.commutators[i][k - 1]);
  }
  CHECK(p.commutators[3][2] < p.commutators[0][2]);
  CHECK(p.velocity > 0.0);
  CHECK(p.decay > 0.0);

  // Diagonal terms only: diagonal operators keep commuting.
  const auto geo = LatticeGeometry::ring(4, 2);
  std::vector<LindbladTerm> diag;
  for (int i = 0; i < 4; ++i)
    diag.push_back(LindbladTerm{{i, (i + 1) % 4}, kron(pauli_z(), pauli_z()), {kron(pauli_z(), identity(2))}});
  const std::vector<int> y2{2};
  const std::vector<double> t2{0.0, 1.0, 2.0};
  const auto q = lr_probe(Lindbladian(geo, diag), pauli_z(), 0, pauli_z(), y2, t2);
  for (double c : q.commutators[0]) CHECK(c < 1e-12);

  // A swap rotates X_0 onto site 1, so no sample lies outside the cone.
  const auto pair = LatticeGeometry::ring(2, 2);
  const Matrix swap = 0.5 * (Matrix::Identity(4, 4) + kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
                             kron(pauli_z(), pauli_z()));
  const Lindbladian swapper(pair, {LindbladTerm{{0, 1}, Matrix(std::numbers::pi / 2 * swap), {}}});
  const std::vector<int> y1{1};
  CHECK_THROWS(lr_probe(swapper, pauli_x(), 0, pauli_z(), y1, std::vector<double>{1.0}));
}

TEST_CASE("overlap probe on the Z2 double") {
  const QuantumDouble qd(2, 2, 2);
  const Vector phi = qd.ground_basis().front();
  const auto clean = overlap_probe(qd, phi, Lindbladian(qd.geometry()), 1.0, 1);
  CHECK((clean.gram - clean.reference).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(clean.det_t == clean.det_s);
  CHECK(clean.schwarz_defect < 1e-14);
  CHECK(clean.position_defect < 1e-14);
  CHECK(clean.max_residual < 1e-12);
  CHECK(clean.rank == 4);

  const QuantumDouble big(2, 3, 3);
  CHECK_THROWS_AS(overlap_probe(big, Vector::Zero(1), Lindbladian(big.geometry()), 1.0, 1), GuardError);

  double prev_det = -1.0, prev_schwarz = -1.0, prev_pos = -1.0;
  for (double r : {0.0, 0.05, 0.1, 0.2}) {
    const auto rep = overlap_probe(qd, phi, depolarizing_lindbladian(qd.geometry(), r), 1.0, 1);
    const double gap = std::abs(rep.det_t - rep.det_s);
    CHECK(gap > prev_det);
    CHECK(rep.schwarz_defect > prev_schwarz);
    CHECK(rep.position_defect > prev_pos);
    CHECK(rep.ledger.at("gram_min_eig") > -1e-10);
    CHECK(rep.ledger.at("residual_min") > -1e-10);
    prev_det = r == 0.0 ? gap + 1e-15 : gap;
    prev_schwarz = r == 0.0 ? rep.schwarz_defect + 1e-15 : rep.schwarz_defect;
    prev_pos = r == 0.0 ? rep.position_defect + 1e-15 : rep.position_defect;
  }
}

TEST_CASE("GHZ probe") {
  const auto geo = LatticeGeometry::ring(3, 4);
  const Lindbladian none(geo);
  const auto r2 = ghz_nogo_probe(2, 4, none, 1.0, 1);
  CHECK(r2.rank == 2);
  CHECK(r2.max_residual < 1e-12);
  const auto r4 = ghz_nogo_probe(4, 4, none, 1.0, 1);
  CHECK((r4.gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r4.rank == 4);

  // A product replacement channel keeps fat(Z_x^b) in span{Z_x^b, 1}, so the probes stay in the ground
  // space; a local shift Hamiltonian on the probe site moves weight onto level 2.
  std::vector<LindbladTerm> terms = product_driver(geo, basis_ket(4, 3)).terms();
  const Matrix s4 = shift(4);
  terms.push_back(LindbladTerm{{0}, Matrix(s4 + s4.adjoint()), {}});
  const Lindbladian driver(geo, terms);
  CHECK(ghz_nogo_probe(2, 4, product_driver(geo, basis_ket(4, 3)), 1.0, 1).max_residual < 1e-12);
  double prev = -1.0;
  for (double t : {0.0, 0.2, 0.4, 0.6}) {
    const auto r = ghz_nogo_probe(2, 4, driver, t, 1, 0);
    CHECK(r.max_residual > prev);
    prev = t == 0.0 ? r.max_residual + 1e-15 : r.max_residual;
  }
}

TEST_CASE("Schwarz inequality") {
  Rng rng(11);
  const auto geo = LatticeGeometry::ring(2, 2);
  for (int k = 0; k < 10; ++k) {
    const auto l = random_lindbladian(geo, rng);
    const Matrix a = random_matrix(4, 4, rng);
    CHECK(schwarz_gap(l, 0.5, a, random_state(4, rng)) >= -1e-9);
  }
  // Unitary evolution saturates it.
  std::vector<LindbladTerm> h{LindbladTerm{{0, 1}, random_hermitian(4, rng), {}}};
  CHECK(std::abs(schwarz_gap(Lindbladian(geo, h), 0.5, random_matrix(4, 4, rng), random_state(4, rng))) < 1e-9);
}

TEST_CASE("restricted duality") {
  // Tr[rho fat(A)] = Tr[e^{t L_S}(rho_S) A] on the fattened region.
  Rng rng(3);
  const auto l = dephasing_ring(4, 0.3);
  const auto f = fatten(LocalOperator({0}, pauli_x()), l, 0.6, 1);
  const auto sub = f.region;
  const auto ls = l.restricted_to(sub);
  const Matrix rho = random_state(8, rng);
  const Matrix a = extend(LocalOperator({0}, pauli_x()), sub, l.geometry()).matrix;
  CHECK(std::abs((rho * f.op).trace() - (evolve(ls, rho, 0.6) * a).trace()) < 1e-9);
}
