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
#include <limits>
#include <numbers>

#include "qphase/models.hpp"

using namespace qphase;

namespace {

Vector plus_ket() { return Vector::Constant(2, 1.0 / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("shipped channels are idempotent and trace preserving") {
  const auto rep = replacement_channel(plus_ket());
  const auto cond = condensation_channel();
  CHECK(idempotence_residual(rep) <= 1e-12);
  CHECK(idempotence_residual(cond) <= 1e-12);
  CHECK(rep.trace_preservation_defect() <= 1e-14);
  CHECK(cond.trace_preservation_defect() <= 1e-14);
}

TEST_CASE("product driver closed form") {
  Rng rng(7);
  const auto geo = LatticeGeometry::ring(3, 2);
  const auto l = product_driver(geo, plus_ket());
  const auto ch = replacement_channel(plus_ket());
  const Matrix rho = random_density_matrix(8, rng);

  CHECK((closed_form_evolve(rho, geo, ch, 0.0) - rho).cwiseAbs().maxCoeff() == 0.0);
  CHECK((closed_form_evolve(rho, geo, ch, 2.0) - evolve_expm(l, rho, 2.0)).cwiseAbs().maxCoeff() <= 1e-9);

  Vector target = kron(kron(plus_ket(), plus_ket()), plus_ket());
  const Matrix limit = closed_form_evolve(rho, geo, ch, std::numeric_limits<double>::infinity());
  CHECK((limit - projector(target)).cwiseAbs().maxCoeff() <= 1e-14);

  // An orthogonal product start saturates the bound 1 - (1 - e^{-t})^N.
  Vector minus(2);
  minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  const Matrix start = projector(kron(kron(minus, minus), minus));
  for (double t : {0.3, 1.0, 3.0}) {
    const double bound = 1.0 - std::pow(1.0 - std::exp(-t), 3);
    CHECK(trace_distance(closed_form_evolve(start, geo, ch, t), projector(target)) ==
          doctest::Approx(bound).epsilon(1e-12));
    CHECK(trace_distance(closed_form_evolve(rho, geo, ch, t), projector(target)) <= bound + 1e-12);
  }
  CHECK_THROWS_AS(closed_form_evolve(rho, geo, ch, -1.0), Error);
}

TEST_CASE("GHZ family") {
  for (int n : {2, 3, 4}) {
    std::vector<Vector> psi;
    for (int b = 0; b < n; ++b) psi.push_back(ghz_state(n, 3, b));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) CHECK(std::abs(psi[a].dot(psi[b]) - (a == b ? 1.0 : 0.0)) <= 1e-12);
    const auto geo = LatticeGeometry::ring(3, n);
    const SparseMatrix z = embed(LocalOperator({1}, clock(n)), geo);
    Vector w = psi[0];
    for (int b = 0; b < n; ++b) {
      CHECK((w - psi[b]).norm() <= 1e-12);
      w = z * w;
    }
  }
}

TEST_CASE("condensation of GHZ4 into GHZ2") {
  const int N = 4;
  const auto geo = LatticeGeometry::ring(N, 4);
  const auto ch = condensation_channel();
  const Matrix ghz4 = projector(ghz_state(4, N));
  const Matrix ghz2 = projector(ghz_on_levels({0, 2}, N, 4));
  const Matrix limit = closed_form_evolve(ghz4, geo, ch, std::numeric_limits<double>::infinity());
  CHECK((limit - ghz2).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(trace_distance(closed_form_evolve(ghz4, geo, ch, 40.0), ghz2) <= 1e-10);

  const auto small = LatticeGeometry::ring(2, 4);
  const Matrix g = projector(ghz_state(4, 2));
  CHECK((evolve_expm(ghz_condense_lindbladian(small), g, 1.5) - closed_form_evolve(g, small, ch, 1.5))
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
}

TEST_CASE("Z2 double on a 2x2 torus") {
  QuantumDouble qd(2, 2, 2);
  CHECK(qd.num_edges() == 8);
  CHECK(qd.stabilizer_commutation_defect() == 0);
  CHECK(qd.ground_space_dimension_symbolic() == 4);
  CHECK(qd.ground_space_dimension_dense() == 4);
  CHECK(qd.redundant_generators() == 2);
  CHECK(qd.ground_basis_residual() <= 1e-12);

  const Matrix b = qd.ground_basis_matrix();
  CHECK((b.adjoint() * b - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);

  const SparseMatrix xz = qd.logical_x_x().matrix(2) * qd.logical_z_y().matrix(2);
  const SparseMatrix zx = qd.logical_z_y().matrix(2) * qd.logical_x_x().matrix(2);
  CHECK(Matrix(xz + zx).cwiseAbs().maxCoeff() <= 1e-12);

  // Homotopic loops act identically on the ground space.
  CHECK((qd.project(qd.logical_x_x(0)) - qd.project(qd.logical_x_x(1))).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((qd.project(qd.logical_z_y(0)) - qd.project(qd.logical_z_y(1))).cwiseAbs().maxCoeff() <= 1e-10);

  // The basis diagonalizes both Z logicals.
  for (const auto& z : {qd.logical_z_x(), qd.logical_z_y()}) {
    Matrix p = qd.project(z);
    p.diagonal().setZero();
    CHECK(p.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Z3 double ladder and logical algebra") {
  QuantumDouble qd(3, 2, 2);
  CHECK(qd.dim() == 6561);
  CHECK(qd.ground_space_dimension_symbolic() == 9);
  CHECK(qd.ground_basis_residual() <= 1e-12);
  const Matrix b = qd.ground_basis_matrix();
  CHECK((b.adjoint() * b - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() <= 1e-12);

  const cd w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
  const Matrix xx = qd.project(qd.logical_x_x()), zy = qd.project(qd.logical_z_y());
  CHECK((xx * zy - std::conj(w) * zy * xx).cwiseAbs().maxCoeff() <= 1e-12);
  const Matrix xy = qd.project(qd.logical_x_y()), zx = qd.project(qd.logical_z_x());
  CHECK((xy * zx - std::conj(w) * zx * xy).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((xx * zx - zx * xx).cwiseAbs().maxCoeff() <= 1e-12);

  const Matrix xt = qd.x_tilde(), zt = qd.z_tilde();
  const Vector e2 = basis_ket(9, 2);
  CHECK((qd.x_tilde(4) * e2 - basis_ket(9, 6)).norm() <= 1e-15);
  CHECK(std::abs((zt * e2)(2) - std::polar(1.0, 2.0 * std::numbers::pi * 2.0 / 9.0)) <= 1e-15);
  CHECK(std::abs(commutation_exponent(qd.stars()[0], qd.plaquettes()[0], 3)) == 0);
}

TEST_CASE("Z2 double on a 3x3 torus") {
  QuantumDouble qd(2, 3, 3);
  CHECK(qd.ground_space_dimension_symbolic() == 4);
  CHECK(qd.redundant_generators() == 2);
  CHECK(qd.ground_basis_residual() <= 1e-12);
  CHECK_THROWS_AS(qd.ground_space_dimension_dense(), GuardError);
  CHECK_THROWS_AS(QuantumDouble(3, 3, 3), GuardError);
}

TEST_CASE("basis generation from a single ground state") {
  QuantumDouble qd(2, 2, 2);
  const auto eig = basis_generation_check(qd, basis_ket(4, 1));
  CHECK((eig.gram_x - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(eig.passes);

  const auto uniform = basis_generation_check(qd, Vector::Ones(4));
  CHECK(uniform.rank_z == 4);

  Rng rng(11);
  int passed = 0;
  for (int k = 0; k < 100; ++k) passed += basis_generation_check(qd, random_ket(4, rng)).passes ? 1 : 0;
  CHECK(passed == 100);

  // Both orbits are rank deficient for this state, so the check reports failure.
  Vector two = Vector::Zero(4);
  two(0) = two(1) = 1.0;
  const auto bad = basis_generation_check(qd, two);
  CHECK(bad.rank_x == 3);
  CHECK(bad.rank_z == 2);
  CHECK_FALSE(bad.passes);
}

TEST_CASE("projective representations") {
  for (const auto& rep : {pauli_projective_rep(), trivial_rep(), pauli_projective_rep().inverse()}) {
    CHECK(rep.cocycle_defect() <= 1e-15);
    for (int g = 0; g < 4; ++g) {
      CHECK((rep.onsite(g) * psi_plus(2) - psi_plus(2)).norm() <= 1e-15);
      for (int h = 0; h < 4; ++h)
        CHECK((rep.onsite(g) * rep.onsite(h) - rep.onsite(ProjectiveRep::multiply(g, h))).cwiseAbs().maxCoeff() <=
              1e-15);
    }
  }
  CHECK(pauli_projective_rep().omega[1][2] == doctest::Approx(std::numbers::pi));

  IsometricMPS mps{3, 2, pauli_projective_rep()};
  const Vector psi = mps.state();
  CHECK(psi.norm() == doctest::Approx(1.0));
  for (int g = 0; g < 4; ++g) CHECK((mps.symmetry(g) * psi - psi).norm() <= 1e-12);
}

TEST_CASE("covariance of product drivers") {
  Rng rng(3);
  const auto geo = LatticeGeometry::ring(2, 4);
  std::vector<Matrix> u;
  for (int g = 0; g < 4; ++g) u.push_back(pauli_projective_rep().onsite(g));
  CHECK(covariance_check(Lindbladian(geo), u, rng) == 0.0);
  CHECK(covariance_check(product_driver(geo, psi_plus(2)), u, rng) <= 1e-10);
  CHECK(covariance_check(product_driver(geo, basis_ket(4, 0)), u, rng) > 0.1);
}

TEST_CASE("SPT bridge") {
  const auto b = spt_bridge_states(4, trivial_rep(), pauli_projective_rep());
  const auto r = evolve_bridge(b, 30.0);
  CHECK(r.factor_distances[0] <= 1e-9);
  CHECK(r.factor_distances[1] <= 1e-9);
  CHECK(r.factor_distances[2] == 0.0);
  CHECK(r.max_symmetry_defect <= 1e-10);
  CHECK_FALSE(r.exact_distance.has_value());

  const auto small = evolve_bridge(spt_bridge_states(2, trivial_rep(), trivial_rep()), 1.0);
  REQUIRE(small.exact_distance.has_value());
  CHECK(*small.exact_distance <= small.distance_bound + 1e-12);
  const double single = 1.0 - std::pow(1.0 - std::exp(-1.0), 2);
  CHECK(small.factor_distances[0] <= single + 1e-12);
}
