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

#include <unsupported/Eigen/MatrixFunctions>

#include "qphase/lindblad.hpp"

using namespace qphase;

namespace {

Matrix sigma_minus() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

Lindbladian damping(double gamma) {
  LindbladTerm t{{0}, Matrix::Zero(2, 2), {std::sqrt(gamma) * sigma_minus()}};
  return Lindbladian(LatticeGeometry::chain({2}), {t});
}

}  // namespace

TEST_CASE("apply on elementary generators") {
  Lindbladian hz(LatticeGeometry::chain({2}), {LindbladTerm{{0}, pauli_z(), {}}});
  Vector plus = (basis_ket(2, 0) + basis_ket(2, 1)) / std::sqrt(2.0);
  Matrix rho = projector(plus);
  Matrix d = hz.apply(rho);
  Matrix expected = cd(0, -1) * (pauli_z() * rho - rho * pauli_z());
  CHECK((d - expected).norm() < 1e-14);
  CHECK(std::abs(d.trace()) < 1e-14);

  Matrix one = projector(basis_ket(2, 1));
  Matrix dd = damping(1.0).apply(one);
  CHECK((dd - (projector(basis_ket(2, 0)) - one)).norm() < 1e-14);
}

TEST_CASE("superoperator agrees with apply") {
  Rng rng(11);
  auto g = LatticeGeometry::chain({2, 2});
  auto l = random_lindbladian(g, rng);
  Matrix s = assemble_superoperator(l);
  Matrix rho = random_density_matrix(4, rng);
  CHECK((vec_to_matrix(s * matrix_to_vec(rho), 4) - l.apply(rho)).norm() < 1e-12);
  Matrix a = random_matrix(4, 4, rng);
  CHECK((vec_to_matrix(s.adjoint() * matrix_to_vec(a), 4) - l.apply_dual(a)).norm() < 1e-12);
  CHECK(std::abs(l.apply(rho).trace()) < 1e-12);
  CHECK(hermiticity_defect(l.apply(rho)) < 1e-12);
}

TEST_CASE("superoperator of simple generators") {
  Lindbladian zero(LatticeGeometry::chain({2}));
  CHECK(assemble_superoperator(zero).norm() == 0.0);

  Rng rng(12);
  Matrix h = random_hermitian(2, rng);
  Lindbladian lh(LatticeGeometry::chain({2}), {LindbladTerm{{0}, h, {}}});
  Matrix expected = cd(0, -1) * (kron(identity(2), h) - kron(h.transpose(), identity(2)));
  CHECK((assemble_superoperator(lh) - expected).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::ComplexEigenSolver<Matrix> es(assemble_superoperator(damping(1.0)));
  std::vector<double> ev;
  for (int i = 0; i < 4; ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end());
  CHECK(ev[0] == doctest::Approx(-1.0));
  CHECK(ev[1] == doctest::Approx(-0.5));
  CHECK(ev[2] == doctest::Approx(-0.5));
  CHECK(std::abs(ev[3]) < 1e-14);
}

TEST_CASE("superoperator guard") {
  auto g = LatticeGeometry::chain({2, 2, 2, 2, 2, 2, 2});
  Lindbladian l(g);
  CHECK_THROWS_AS(assemble_superoperator(l), GuardError);
}

TEST_CASE("expm evolution") {
  Matrix one = projector(basis_ket(2, 1));
  CHECK((evolve_expm(damping(1.0), one, 0.0) - one).norm() == 0.0);
  Matrix r = evolve_expm(damping(1.0), one, 1.0);
  CHECK(r(1, 1).real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK_THROWS_AS(evolve_expm(damping(1.0), one, -1.0), Error);

  Rng rng(13);
  auto l = random_lindbladian(LatticeGeometry::chain({2, 2}), rng);
  Matrix rho = random_density_matrix(4, rng);
  Matrix a = evolve_expm(l, evolve_expm(l, rho, 0.3), 0.9);
  Matrix b = evolve_expm(l, rho, 1.2);
  CHECK((a - b).norm() < 1e-9);
  CHECK(std::abs(b.trace() - 1.0) < 1e-10);
  CHECK(hermiticity_defect(b) < 1e-10);
}

TEST_CASE("integrator matches expm") {
  Rng rng(14);
  auto l = random_lindbladian(LatticeGeometry::chain({2, 2}), rng);
  Matrix rho = random_density_matrix(4, rng);
  const double ts[] = {0.1, 1.0, 10.0};
  IntegratorStats stats;
  auto traj = evolve_integrate(l, rho, ts, 1e-9, &stats);
  for (int i = 0; i < 3; ++i) CHECK((traj[i] - evolve_expm(l, rho, ts[i])).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(stats.accepted > 0);

  Lindbladian lh(LatticeGeometry::chain({2}), {LindbladTerm{{0}, pauli_x(), {}}});
  Vector psi = basis_ket(2, 0);
  const double t1[] = {2.0};
  Matrix r = evolve_integrate(lh, projector(psi), t1, 1e-11).front();
  Vector exact = Matrix((cd(0, -2.0) * pauli_x()).exp()) * psi;
  CHECK((exact.adjoint() * r * exact)(0, 0).real() > 1.0 - 1e-9);

  Lindbladian zero(LatticeGeometry::chain({2}));
  auto flat = evolve_integrate(zero, projector(psi), ts, 1e-9);
  for (const auto& m : flat) CHECK((m - projector(psi)).norm() == 0.0);
}

TEST_CASE("integrator reports step-size underflow") {
  Lindbladian stiff = damping(1e15);
  IntegratorOptions opt = IntegratorOptions::with_tolerance(1e-12);
  opt.min_step = 1e-3;
  opt.initial_step = 1e-2;
  auto rhs = [&](double, const Matrix& r) { return stiff.apply(r); };
  const double ts[] = {1.0};
  CHECK_THROWS_WITH_AS(integrate_dopri5(rhs, Matrix(projector(basis_ket(2, 1))), 0.0,
                                        std::span<const double>(ts), opt),
                       doctest::Contains("stiffness"), GuardError);
}

TEST_CASE("heisenberg picture") {
  Rng rng(15);
  auto g = LatticeGeometry::chain({2, 2, 2});
  auto l = random_lindbladian(g, rng);
  CHECK((heisenberg_evolve(l, identity(8), 0.7) - identity(8)).norm() < 1e-10);
  Matrix a = random_hermitian(8, rng), rho = random_density_matrix(8, rng);
  cd lhs = (a * evolve_expm(l, rho, 0.7)).trace();
  cd rhs = (heisenberg_evolve(l, a, 0.7) * rho).trace();
  CHECK(std::abs(lhs - rhs) < 1e-9);
  CHECK(operator_norm(heisenberg_evolve(l, a, 0.7)) <= operator_norm(a) + 1e-10);

  Matrix h = random_hermitian(4, rng);
  Lindbladian lh(LatticeGeometry::chain({2, 2}), {LindbladTerm{{0, 1}, h, {}}});
  Matrix b = random_matrix(4, 4, rng);
  Matrix u = Matrix(cd(0, 0.7) * h).exp();
  CHECK((heisenberg_evolve(lh, b, 0.7) - u * b * u.adjoint()).norm() < 1e-10);

  // Matrix-free path above the expm threshold.
  NumericPolicy p;
  p.expm_max_dim = 4;
  cd rhs2 = (heisenberg_evolve(l, a, 0.7, p) * rho).trace();
  CHECK(std::abs(lhs - rhs2) < 1e-8);
}

TEST_CASE("choi positivity") {
  Lindbladian zero(LatticeGeometry::chain({2}));
  auto id = choi_cp_check(zero, 1.0);
  CHECK(std::abs(id.min_eigenvalue) < 1e-12);
  Vector omega = basis_ket(4, 0) + basis_ket(4, 3);
  CHECK((id.choi - projector(omega)).norm() < 1e-12);

  auto ad = choi_cp_check(damping(1.0), std::log(2.0));
  Eigen::SelfAdjointEigenSolver<Matrix> es(ad.choi);
  CHECK(es.eigenvalues()(3) == doctest::Approx(1.5));
  CHECK(es.eigenvalues()(2) == doctest::Approx(0.5));
  CHECK(std::abs(es.eigenvalues()(1)) < 1e-12);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-12);

  Rng rng(16);
  auto l = random_lindbladian(LatticeGeometry::chain({2, 2}), rng);
  auto rep = choi_cp_check(l, 5.0);
  CHECK(rep.min_eigenvalue >= -1e-9);
  CHECK(rep.trace_preservation_defect <= 1e-10);
}

TEST_CASE("convergence fit") {
  // Decay of a single damped qubit: distance e^{-t} exactly.
  Matrix one = projector(basis_ket(2, 1)), zero = projector(basis_ket(2, 0));
  std::vector<double> ts;
  for (int i = 1; i <= 10; ++i) ts.push_back(i);
  auto rep = fit_convergence(damping(1.0), one, zero, ts);
  REQUIRE(rep.rate.has_value());
  CHECK(*rep.rate == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.prefactor == doctest::Approx(1.0).epsilon(1e-6));

  auto fixed = fit_convergence(damping(1.0), zero, zero, ts);
  CHECK_FALSE(fixed.rate.has_value());
  for (double d : fixed.trace_distances) CHECK(d <= 1e-10);

  auto bumpy = fit_distances({0, 1, 2, 3, 4, 5}, {0.5, 0.6, 0.3, 0.1, 0.03, 0.01});
  CHECK(bumpy.nonmonotone_tail);
  CHECK(bumpy.window_begin == 1);
}

TEST_CASE("restriction and norm estimate") {
  Rng rng(17);
  auto g = LatticeGeometry::ring(4, 2);
  auto l = random_lindbladian(g, rng);
  CHECK(l.terms().size() == 4);
  CHECK(l.locality_radius() == 1);
  const int region[] = {1, 2, 3};
  auto r = l.restricted_to(region);
  CHECK(r.terms().size() == 2);
  CHECK(r.dim() == 8);
  double sum = 0.0;
  for (const auto& t : l.terms()) sum += Lindbladian(g, {t}).norm_estimate();
  CHECK(l.norm_estimate() <= sum + 1e-12);
}
