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

#include "qphase/qstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qphase {

const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

// ---------------------------------------------------------------------------
// LatticeGeometry

LatticeGeometry LatticeGeometry::ring(int n, int local_dim) {
  if (n < 1 || local_dim < 1) throw Error("ring: need n >= 1 and local_dim >= 1");
  LatticeGeometry g;
  g.kind_ = Kind::Ring;
  g.local_dims_.assign(n, local_dim);
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n && n > 1; ++i) {
    int j = (i + 1) % n;
    if (j == i) continue;
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  g.compute_distances(adj);
  return g;
}

LatticeGeometry LatticeGeometry::chain(std::vector<int> local_dims) {
  std::vector<std::pair<int, int>> links;
  for (int i = 0; i + 1 < static_cast<int>(local_dims.size()); ++i) links.emplace_back(i, i + 1);
  return sites(std::move(local_dims), links);
}

LatticeGeometry LatticeGeometry::torus_edges(int lx, int ly, int local_dim) {
  if (lx < 2 || ly < 2) throw Error("torus_edges: need lx, ly >= 2");
  LatticeGeometry g;
  g.kind_ = Kind::TorusEdges;
  g.spatial_dim_ = 2;
  g.lx_ = lx;
  g.ly_ = ly;
  const int ne = 2 * lx * ly;
  g.local_dims_.assign(ne, local_dim);
  auto vertex = [&](int x, int y) { return ((y % ly + ly) % ly) * lx + ((x % lx + lx) % lx); };
  std::vector<std::array<int, 2>> ends(ne);
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      ends[y * lx + x] = {vertex(x, y), vertex(x + 1, y)};
      ends[lx * ly + y * lx + x] = {vertex(x, y), vertex(x, y + 1)};
    }
  }
  std::vector<std::vector<int>> adj(ne);
  for (int a = 0; a < ne; ++a) {
    for (int b = a + 1; b < ne; ++b) {
      bool touch = false;
      for (int u : ends[a])
        for (int v : ends[b]) touch = touch || (u == v);
      if (touch) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
  }
  g.compute_distances(adj);
  return g;
}

LatticeGeometry LatticeGeometry::sites(std::vector<int> local_dims,
                                       const std::vector<std::pair<int, int>>& links) {
  LatticeGeometry g;
  g.kind_ = Kind::Sites;
  for (int d : local_dims)
    if (d < 1) throw Error("sites: local dimensions must be positive");
  g.local_dims_ = std::move(local_dims);
  const int n = g.num_sites();
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : links) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw Error("sites: link refers to unknown sites");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  g.compute_distances(adj);
  return g;
}

void LatticeGeometry::compute_distances(const std::vector<std::vector<int>>& adjacency) {
  const int n = num_sites();
  dist_.assign(static_cast<std::size_t>(n) * n, n);
  for (int s = 0; s < n; ++s) {
    std::queue<int> q;
    dist_[s * n + s] = 0;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adjacency[u]) {
        if (dist_[s * n + v] > dist_[s * n + u] + 1) {
          dist_[s * n + v] = dist_[s * n + u] + 1;
          q.push(v);
        }
      }
    }
  }
}

std::size_t LatticeGeometry::hilbert_dim() const {
  std::size_t d = 1;
  for (int x : local_dims_) d *= static_cast<std::size_t>(x);
  return d;
}

std::size_t LatticeGeometry::dim_of(std::span<const int> sites) const {
  std::size_t d = 1;
  for (int s : sites) d *= static_cast<std::size_t>(local_dims_.at(s));
  return d;
}

int LatticeGeometry::distance_to_set(int i, std::span<const int> set) const {
  int best = num_sites();
  for (int s : set) best = std::min(best, distance(i, s));
  return best;
}

std::vector<int> LatticeGeometry::ball(int center, int alpha) const {
  std::vector<int> out;
  for (int i = 0; i < num_sites(); ++i)
    if (distance(center, i) < alpha) out.push_back(i);
  return out;
}

std::vector<int> LatticeGeometry::neighborhood(std::span<const int> set, int ell) const {
  std::vector<int> out;
  if (set.empty()) return out;
  for (int i = 0; i < num_sites(); ++i)
    if (distance_to_set(i, set) <= ell) out.push_back(i);
  return out;
}

int LatticeGeometry::diameter() const {
  int d = 0;
  for (int x : dist_) d = std::max(d, x);
  return d;
}

double LatticeGeometry::ball_constant() const {
  double kappa = 0.0;
  for (int j = 0; j < num_sites(); ++j) {
    for (int alpha = 1; alpha <= diameter() + 1; ++alpha) {
      double vol = static_cast<double>(ball(j, alpha).size());
      kappa = std::max(kappa, vol / std::pow(alpha, spatial_dim_));
    }
  }
  return kappa;
}

LatticeGeometry LatticeGeometry::subsystem(std::span<const int> sites) const {
  check_support(sites);
  LatticeGeometry g;
  g.kind_ = Kind::Sites;
  g.spatial_dim_ = spatial_dim_;
  const int m = static_cast<int>(sites.size());
  for (int s : sites) g.local_dims_.push_back(local_dims_[s]);
  g.dist_.assign(static_cast<std::size_t>(m) * m, 0);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) g.dist_[a * m + b] = distance(sites[a], sites[b]);
  return g;
}

void LatticeGeometry::check_support(std::span<const int> support) const {
  std::set<int> seen;
  for (int s : support) {
    if (s < 0 || s >= num_sites() || !seen.insert(s).second) throw Error("unknown sites");
  }
}

void LocalOperator::validate(const LatticeGeometry& geometry) const {
  geometry.check_support(support);
  const auto d = static_cast<Eigen::Index>(geometry.dim_of(support));
  if (matrix.rows() != d || matrix.cols() != d)
    throw Error("local operator dimension does not match its support");
}

// ---------------------------------------------------------------------------
// Tensor bookkeeping

namespace {

std::vector<std::size_t> full_strides(const LatticeGeometry& g) {
  std::vector<std::size_t> stride(g.num_sites());
  std::size_t s = 1;
  for (int i = g.num_sites() - 1; i >= 0; --i) {
    stride[i] = s;
    s *= static_cast<std::size_t>(g.local_dim(i));
  }
  return stride;
}

/// Full-space offset of every local index of `sites` (local order = order in `sites`).
std::vector<std::size_t> local_offsets(const LatticeGeometry& g, std::span<const int> sites) {
  const auto stride = full_strides(g);
  std::vector<std::size_t> off{0};
  for (int s : sites) {
    std::vector<std::size_t> next;
    next.reserve(off.size() * g.local_dim(s));
    for (std::size_t o : off)
      for (int k = 0; k < g.local_dim(s); ++k) next.push_back(o + k * stride[s]);
    off = std::move(next);
  }
  return off;
}

std::vector<int> complement(const LatticeGeometry& g, std::span<const int> sites) {
  std::vector<int> out;
  for (int i = 0; i < g.num_sites(); ++i)
    if (std::find(sites.begin(), sites.end(), i) == sites.end()) out.push_back(i);
  return out;
}

}  // namespace

SparseMatrix embed(const LocalOperator& op, const LatticeGeometry& geometry) {
  op.validate(geometry);
  const auto inner_off = local_offsets(geometry, op.support);
  const auto rest = complement(geometry, op.support);
  const auto outer_off = local_offsets(geometry, rest);
  const Eigen::Index dl = op.matrix.rows();
  std::vector<Eigen::Triplet<cd>> trip;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> nz;
  for (Eigen::Index b = 0; b < dl; ++b)
    for (Eigen::Index a = 0; a < dl; ++a)
      if (op.matrix(a, b) != cd(0.0)) nz.emplace_back(a, b);
  trip.reserve(nz.size() * outer_off.size());
  for (std::size_t base : outer_off)
    for (auto [a, b] : nz)
      trip.emplace_back(static_cast<Eigen::Index>(base + inner_off[a]),
                        static_cast<Eigen::Index>(base + inner_off[b]), op.matrix(a, b));
  const auto d = static_cast<Eigen::Index>(geometry.hilbert_dim());
  SparseMatrix out(d, d);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Matrix embed_dense(const LocalOperator& op, const LatticeGeometry& geometry) {
  return Matrix(embed(op, geometry));
}

LocalOperator extend(const LocalOperator& op, std::span<const int> new_support,
                     const LatticeGeometry& geometry) {
  std::vector<int> pos;
  for (int s : op.support) {
    auto it = std::find(new_support.begin(), new_support.end(), s);
    if (it == new_support.end()) throw Error("extend: new support must contain the old one");
    pos.push_back(static_cast<int>(it - new_support.begin()));
  }
  const auto sub = geometry.subsystem(new_support);
  return {std::vector<int>(new_support.begin(), new_support.end()),
          embed_dense(LocalOperator(pos, op.matrix), sub)};
}

Matrix partial_trace(const Matrix& rho, const LatticeGeometry& geometry, std::span<const int> keep) {
  const auto d = static_cast<Eigen::Index>(geometry.hilbert_dim());
  if (rho.rows() != d || rho.cols() != d) throw Error("partial_trace: dimension mismatch");
  if (keep.empty()) {
    Matrix out(1, 1);
    out(0, 0) = rho.trace();
    return out;
  }
  geometry.check_support(keep);
  const auto koff = local_offsets(geometry, keep);
  const auto toff = local_offsets(geometry, complement(geometry, keep));
  const auto dk = static_cast<Eigen::Index>(koff.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index c = 0; c < dk; ++c)
    for (Eigen::Index r = 0; r < dk; ++r) {
      cd acc = 0.0;
      for (std::size_t t : toff) acc += rho(koff[r] + t, koff[c] + t);
      out(r, c) = acc;
    }
  return out;
}

Matrix restrict_to_region(const Matrix& op, const LatticeGeometry& geometry,
                          std::span<const int> region) {
  std::vector<int> sorted(region.begin(), region.end());
  std::sort(sorted.begin(), sorted.end());
  const double dc = static_cast<double>(geometry.hilbert_dim()) / geometry.dim_of(sorted);
  Matrix reduced = partial_trace(op, geometry, sorted) / dc;
  if (sorted.empty()) return reduced(0, 0) * Matrix::Identity(op.rows(), op.cols());
  return embed_dense(LocalOperator(sorted, reduced), geometry);
}

// ---------------------------------------------------------------------------
// Norms and small helpers

double hermiticity_defect(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) { return a.rows() == a.cols() && hermiticity_defect(a) <= tol; }

double trace_norm(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("trace_norm: square matrix required");
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (hermiticity_defect(a) <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (a.rows() == a.cols() && hermiticity_defect(a) <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double min_eigenvalue(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hermitian + hermitian.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

DensityReport check_density_matrix(const Matrix& rho, const NumericPolicy& policy) {
  DensityReport r;
  if (rho.rows() != rho.cols() || rho.size() == 0) return r;
  r.hermiticity_defect = hermiticity_defect(rho);
  r.trace_defect = std::abs(rho.trace() - cd(1.0));
  r.min_eigenvalue = min_eigenvalue(rho);
  r.valid = r.hermiticity_defect <= policy.algebraic_tol && r.trace_defect <= policy.algebraic_tol &&
            r.min_eigenvalue >= -policy.positivity_tol;
  return r;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kron_all(std::span<const Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

Matrix projector(const Vector& ket) { return ket * ket.adjoint(); }

Vector normalized(const Vector& ket) {
  const double n = ket.norm();
  if (n == 0.0) throw Error("normalized: zero vector");
  return ket / n;
}

cd inner(const Vector& a, const Vector& b) { return a.dot(b); }

Matrix clock(int d) {
  Matrix z = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) z(k, k) = std::polar(1.0, 2.0 * std::numbers::pi * k / d);
  return z;
}

Matrix shift(int d) {
  Matrix x = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) x((k + 1) % d, k) = 1.0;
  return x;
}

Matrix pauli_x() { return shift(2); }
Matrix pauli_z() { return clock(2).real().cast<cd>(); }
Matrix pauli_y() {
  Matrix y(2, 2);
  y << 0.0, cd(0, -1), cd(0, 1), 0.0;
  return y;
}
Matrix identity(std::size_t d) {
  return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
}

Vector basis_ket(std::size_t dim, std::size_t index) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return v;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json j;
  j["dims"] = {m.rows(), m.cols()};
  std::vector<double> re, im;
  re.reserve(m.size());
  im.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  j["real"] = re;
  j["imag"] = im;
  return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("real"))
    throw Error("matrix json: expected {dims, real, imag}");
  const auto dims = j.at("dims").get<std::vector<long>>();
  if (dims.size() != 2 || dims[0] < 0 || dims[1] < 0) throw Error("matrix json: bad dims");
  const auto re = j.at("real").get<std::vector<double>>();
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("imag")) im = j.at("imag").get<std::vector<double>>();
  if (re.size() != static_cast<std::size_t>(dims[0] * dims[1]) || im.size() != re.size())
    throw Error("matrix json: entry count does not match dims");
  Matrix m(dims[0], dims[1]);
  for (long r = 0; r < dims[0]; ++r)
    for (long c = 0; c < dims[1]; ++c) m(r, c) = cd(re[r * dims[1] + c], im[r * dims[1] + c]);
  return m;
}

SparseMatrix to_sparse(const Matrix& m, double drop_tol) {
  std::vector<Eigen::Triplet<cd>> trip;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (std::abs(m(r, c)) > drop_tol) trip.emplace_back(r, c, m(r, c));
  SparseMatrix s(m.rows(), m.cols());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

Matrix to_dense(const SparseMatrix& m) { return Matrix(m); }

double trace_distance(const Matrix& a, const Matrix& b) { return 0.5 * trace_norm(a - b); }

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = cd(g(rng), g(rng));
  return m;
}

Matrix random_hermitian(std::size_t d, Rng& rng) {
  Matrix a = random_matrix(d, d, rng);
  return 0.5 * (a + a.adjoint());
}

Matrix random_unitary(std::size_t d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(d, d, rng));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const cd diag = r(i, i);
    if (std::abs(diag) > 0.0) q.col(i) *= diag / std::abs(diag);
  }
  return q;
}

Vector random_ket(std::size_t d, Rng& rng) { return normalized(random_matrix(d, 1, rng).col(0)); }

Matrix random_density_matrix(std::size_t d, Rng& rng) {
  Matrix a = random_matrix(d, d, rng);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace qphase
