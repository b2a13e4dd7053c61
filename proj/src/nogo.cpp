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

#include "qphase/nogo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace qphase {

namespace {

constexpr std::size_t kDenseProbeDim = 4096;

void guard_dense(const LatticeGeometry& geo, const char* who) {
  if (geo.hilbert_dim() > kDenseProbeDim)
    throw GuardError(std::string(who) + ": Hilbert dimension exceeds the dense probe guard (4096)");
}

}  // namespace

FattenedOperator fatten(const LocalOperator& a, const Lindbladian& l, double t, int ell, std::size_t max_dim) {
  const auto& geo = l.geometry();
  if (ell < 0) throw Error("fatten: ell must be nonnegative");
  FattenedOperator f;
  f.base = a;
  f.ell = ell;
  f.t = t;
  f.region = geo.neighborhood(a.support, ell);
  if (geo.dim_of(f.region) > max_dim) throw GuardError("fatten: fattened region exceeds the dense guard");
  const Matrix local = extend(a, f.region, geo).matrix;
  f.op = heisenberg_evolve(l.restricted_to(f.region), local, t);
  return f;
}

LightConeProbe lr_probe(const Lindbladian& l, const Matrix& a, int x, const Matrix& b, std::span<const int> ys,
                        std::span<const double> times) {
  const auto& geo = l.geometry();
  guard_dense(geo, "lr_probe");
  LightConeProbe p;
  p.times.assign(times.begin(), times.end());
  for (int y : ys) {
    if (y == x) throw Error("lr_probe: probe sites must differ from the source site");
    p.distances.push_back(geo.distance(x, y));
  }
  p.commutators.assign(ys.size(), std::vector<double>(times.size(), 0.0));
  const Matrix a_full = embed_dense(LocalOperator({x}, a), geo);
  std::vector<Matrix> b_full;
  for (int y : ys) b_full.push_back(embed_dense(LocalOperator({y}, b), geo));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Matrix at = heisenberg_evolve(l, a_full, times[k]);
    for (std::size_t i = 0; i < ys.size(); ++i)
      p.commutators[i][k] = operator_norm(at * b_full[i] - b_full[i] * at);
  }

  // log c = log K + v t - a d, least squares over the samples outside the cone.
  Eigen::MatrixXd design(0, 3);
  Eigen::VectorXd rhs(0);
  bool below = false;
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double c = p.commutators[i][k];
      if (c < 0.5) below = true;
      if (c > 1e-14 && c < 0.5 && times[k] > 0.0) {
        design.conservativeResize(design.rows() + 1, 3);
        rhs.conservativeResize(rhs.size() + 1);
        design.row(design.rows() - 1) << 1.0, times[k], -static_cast<double>(p.distances[i]);
        rhs(rhs.size() - 1) = std::log(c);
      }
    }
  if (!below) throw Error("lr_probe: every commutator is above 0.5; no light-cone regime sampled");
  p.fit_points = static_cast<int>(rhs.size());
  if (p.fit_points >= 3) {
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
    p.prefactor = std::exp(coef(0));
    p.velocity = coef(1);
    p.decay = coef(2);
  }
  return p;
}

namespace {

int numerical_rank(const Matrix& gram, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.adjoint()), Eigen::EigenvaluesOnly);
  const double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int r = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > tol * top) ++r;
  return r;
}

Matrix gram_of(const std::vector<Vector>& v) {
  const auto m = static_cast<Eigen::Index>(v.size());
  Matrix g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = v[i].dot(v[j]);
  return g;
}

void finish_report(OverlapReport& r, const std::vector<Vector>& probes, const SparseMatrix& h) {
  r.gram = gram_of(probes);
  r.det_t = r.gram.determinant().real();
  r.det_s = r.reference.determinant().real();
  r.rank = numerical_rank(r.gram);
  double min_res = 0.0;
  for (const auto& p : probes) {
    const double nrm = p.squaredNorm();
    const double res = nrm > 1e-24 ? p.dot(h * p).real() / nrm : 0.0;
    r.residuals.push_back(res);
    r.max_residual = std::max(r.max_residual, res);
    min_res = std::min(min_res, res);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r.gram + r.gram.adjoint()), Eigen::EigenvaluesOnly);
  r.ledger["gram_hermiticity"] = hermiticity_defect(r.gram);
  r.ledger["gram_min_eig"] = es.eigenvalues().minCoeff();
  r.ledger["residual_min"] = min_res;
  r.ledger["det_gap"] = std::abs(r.det_t - r.det_s);
}

LocalOperator pauli_local(const QuditPauli& p, int n) {
  const auto support = p.support();
  QuditPauli restricted;
  for (int s : support) {
    restricted.x.push_back(p.x[s]);
    restricted.z.push_back(p.z[s]);
  }
  return LocalOperator(support, Matrix(restricted.matrix(n)));
}

}  // namespace

OverlapReport overlap_probe(const QuantumDouble& qd, const Vector& phi, const Lindbladian& l, double t, int ell, int x0,
                            int x1) {
  const auto& geo = qd.geometry();
  if (l.geometry().hilbert_dim() != geo.hilbert_dim()) throw Error("overlap_probe: Lindbladian geometry mismatch");
  guard_dense(geo, "overlap_probe");
  const int n = qd.n();
  const auto lx = qd.logical_x_x(x0), ly = qd.logical_x_y(0);
  auto fat_full = [&](const QuditPauli& p) { return fatten(pauli_local(p, n), l, t, ell).full(geo); };
  auto product = [&](const QuditPauli& a, const QuditPauli& b) {
    QuditPauli c = a;
    for (std::size_t s = 0; s < c.x.size(); ++s) {
      c.x[s] = (c.x[s] + b.x[s]) % n;
      c.z[s] = (c.z[s] + b.z[s]) % n;
    }
    return c;
  };
  const auto dim = static_cast<Eigen::Index>(geo.hilbert_dim());
  const Matrix id = Matrix::Identity(dim, dim);

  // fat(Xx^a Xy^b) for the whole logical X group; it is closed under products and phase-free.
  std::vector<QuditPauli> group;
  std::vector<Matrix> fat_group;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      group.push_back(product(lx.power(a, n), ly.power(b, n)));
      fat_group.push_back(a == 0 && b == 0 ? id : fat_full(group.back()));
    }
  auto index = [n](int a, int b) { return ((a % n) + n) % n + n * (((b % n) + n) % n); };

  OverlapReport r;
  std::vector<Vector> probes, refs;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      probes.push_back(fat_group[index(a, 0)] * (fat_group[index(0, b)] * phi));
      refs.push_back(group[index(a, b)].apply(phi, n));
    }
  r.reference = gram_of(refs);
  for (int b1 = 0; b1 < n; ++b1)
    for (int a1 = 0; a1 < n; ++a1)
      for (int b2 = 0; b2 < n; ++b2)
        for (int a2 = 0; a2 < n; ++a2) {
          const cd split = phi.dot(fat_group[index(a1, b1)] * (fat_group[index(a2, b2)] * phi));
          const cd joint = phi.dot(fat_group[index(a1 + a2, b1 + b2)] * phi);
          r.schwarz_defect = std::max(r.schwarz_defect, std::abs(split - joint));
        }
  const auto lx1 = qd.logical_x_x(x1);
  for (int a = 1; a < n; ++a) {
    const Matrix right = x1 == x0 ? fat_group[index(a, 0)] : fat_full(lx1.power(a, n));
    r.position_defect = std::max(r.position_defect, std::abs(phi.dot(fat_group[index(-a, 0)] * (right * phi)) - 1.0));
  }
  finish_report(r, probes, qd.parent_hamiltonian());
  return r;
}

SparseMatrix ghz_parent_hamiltonian(const LatticeGeometry& geometry, int m) {
  const auto dim = static_cast<Eigen::Index>(geometry.hilbert_dim());
  SparseMatrix h(dim, dim);
  const int ns = geometry.num_sites();
  for (int i = 0; i < ns; ++i)
    for (int j = i + 1; j < ns; ++j) {
      if (geometry.distance(i, j) != 1) continue;
      const int di = geometry.local_dim(i), dj = geometry.local_dim(j);
      if (m > std::min(di, dj)) throw Error("ghz_parent_hamiltonian: m exceeds the local dimension");
      Matrix term = Matrix::Identity(di * dj, di * dj);
      for (int k = 0; k < m; ++k) term(k * dj + k, k * dj + k) -= 1.0;
      h += embed(LocalOperator({i, j}, term), geometry);
    }
  return h;
}

OverlapReport ghz_nogo_probe(int m, int n, const Lindbladian& l, double t, int ell, int x) {
  const auto& geo = l.geometry();
  const int ns = geo.num_sites();
  guard_dense(geo, "ghz_nogo_probe");
  for (int s = 0; s < ns; ++s)
    if (geo.local_dim(s) != n) throw Error("ghz_nogo_probe: every site must have dimension n");
  if (m < 1 || m > n) throw Error("ghz_nogo_probe: need 1 <= m <= n");
  std::vector<int> levels(m);
  for (int k = 0; k < m; ++k) levels[k] = k;
  const Vector ghz = ghz_on_levels(levels, ns, n);
  OverlapReport r;
  std::vector<Vector> probes;
  Matrix zb = Matrix::Identity(n, n);
  const Matrix z = clock(n);
  for (int b = 0; b < n; ++b) {
    probes.push_back(fatten(LocalOperator({x}, zb), l, t, ell).full(geo) * ghz);
    zb = z * zb;
  }
  r.reference = Matrix::Identity(n, n);
  finish_report(r, probes, ghz_parent_hamiltonian(geo, m));
  return r;
}

double schwarz_gap(const Lindbladian& l, double t, const Matrix& a, const Matrix& rho) {
  const Matrix ta = heisenberg_evolve(l, a, t);
  const Matrix taa = heisenberg_evolve(l, Matrix(a.adjoint() * a), t);
  return (rho * taa).trace().real() - (rho * ta.adjoint() * ta).trace().real();
}

Lindbladian depolarizing_lindbladian(const LatticeGeometry& geometry, double rate) {
  if (rate < 0.0) throw Error("depolarizing_lindbladian: negative rate");
  std::vector<LindbladTerm> terms;
  const double c = std::sqrt(rate / 4.0);
  for (int s = 0; s < geometry.num_sites(); ++s) {
    if (geometry.local_dim(s) != 2) throw Error("depolarizing_lindbladian: qubit sites required");
    if (rate == 0.0) continue;
    terms.push_back(LindbladTerm{{s}, Matrix::Zero(2, 2), {c * pauli_x(), c * pauli_y(), c * pauli_z()}});
  }
  return Lindbladian(geometry, std::move(terms));
}

}  // namespace qphase
