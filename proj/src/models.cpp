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

#include "qphase/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qphase {

// ---------------------------------------------------------------------------
// Channels

Matrix SiteChannel::apply(const Matrix& rho) const {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) out += k * rho * k.adjoint();
  return out;
}

Matrix SiteChannel::superoperator() const {
  const Eigen::Index d = dim();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& k : kraus) s += kron(Matrix(k.conjugate()), k);
  return s;
}

double SiteChannel::trace_preservation_defect() const {
  Matrix sum = Matrix::Zero(dim(), dim());
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return (sum - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

SiteChannel replacement_channel(const Vector& target) {
  const Vector psi = normalized(target);
  SiteChannel ch;
  for (Eigen::Index k = 0; k < psi.size(); ++k) ch.kraus.push_back(psi * basis_ket(psi.size(), k).adjoint());
  return ch;
}

SiteChannel condensation_channel() {
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = p(2, 2) = 1.0;
  const Matrix lower = shift(4).adjoint() * (Matrix::Identity(4, 4) - p);
  return SiteChannel{{p, lower}};
}

double idempotence_residual(const SiteChannel& ch) {
  const Matrix s = ch.superoperator();
  return (s * s - s).cwiseAbs().maxCoeff();
}

namespace {

std::vector<int> all_sites_if_empty(const LatticeGeometry& g, std::vector<int> sites) {
  if (sites.empty())
    for (int i = 0; i < g.num_sites(); ++i) sites.push_back(i);
  return sites;
}

}  // namespace

Lindbladian channel_lindbladian(const LatticeGeometry& geometry, const SiteChannel& ch, std::vector<int> sites) {
  if (ch.trace_preservation_defect() > 1e-12) throw Error("channel_lindbladian: channel is not trace preserving");
  std::vector<LindbladTerm> terms;
  for (int s : all_sites_if_empty(geometry, std::move(sites))) {
    if (geometry.local_dim(s) != ch.dim()) throw Error("channel_lindbladian: site dimension mismatch");
    terms.push_back(LindbladTerm{{s}, Matrix::Zero(ch.dim(), ch.dim()), ch.kraus});
  }
  return Lindbladian(geometry, std::move(terms));
}

Lindbladian product_driver(const LatticeGeometry& geometry, const Vector& target, std::vector<int> sites) {
  return channel_lindbladian(geometry, replacement_channel(target), std::move(sites));
}

Lindbladian ghz_condense_lindbladian(const LatticeGeometry& geometry) {
  return channel_lindbladian(geometry, condensation_channel());
}

SparseMatrix apply_site_channel(const SparseMatrix& rho, const LatticeGeometry& geometry, int site,
                                const SiteChannel& ch) {
  SparseMatrix out(rho.rows(), rho.cols());
  for (const auto& k : ch.kraus) {
    const SparseMatrix e = embed(LocalOperator({site}, k), geometry);
    out += SparseMatrix(e * rho * SparseMatrix(e.adjoint()));
  }
  out.prune(cd(0.0), 0.0);
  return out;
}

SparseMatrix closed_form_evolve(const SparseMatrix& rho, const LatticeGeometry& geometry, const SiteChannel& ch,
                                double t, std::vector<int> sites) {
  if (!(t >= 0.0)) throw Error("closed_form_evolve: negative time");
  const double keep = std::exp(-t);
  SparseMatrix r = rho;
  for (int s : all_sites_if_empty(geometry, std::move(sites))) {
    SparseMatrix next = (1.0 - keep) * apply_site_channel(r, geometry, s, ch);
    if (keep > 0.0) next += keep * r;
    r = next;
  }
  return r;
}

Matrix closed_form_evolve(const Matrix& rho, const LatticeGeometry& geometry, const SiteChannel& ch, double t,
                          std::vector<int> sites) {
  return Matrix(closed_form_evolve(to_sparse(rho), geometry, ch, t, std::move(sites)));
}

// ---------------------------------------------------------------------------
// GHZ

Vector ghz_state(int n, int N, int beta, int local_dim) {
  if (local_dim == 0) local_dim = n;
  if (n < 1 || N < 1 || local_dim < n) throw Error("ghz_state: need 1 <= n <= local_dim");
  const auto dim = static_cast<std::size_t>(std::pow(local_dim, N));
  std::size_t ones = 0;
  for (int s = 0; s < N; ++s) ones = ones * local_dim + 1;
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (int a = 0; a < n; ++a)
    v(static_cast<Eigen::Index>(a * ones)) = std::polar(1.0 / std::sqrt(n), 2.0 * std::numbers::pi * a * beta / n);
  return v;
}

Vector ghz_on_levels(const std::vector<int>& levels, int N, int local_dim) {
  const auto dim = static_cast<std::size_t>(std::pow(local_dim, N));
  std::size_t ones = 0;
  for (int s = 0; s < N; ++s) ones = ones * local_dim + 1;
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (int a : levels) v(static_cast<Eigen::Index>(a * ones)) = 1.0;
  return normalized(v);
}

// ---------------------------------------------------------------------------
// Qudit Pauli strings

Vector QuditPauli::apply(const Vector& ket, int n) const {
  const std::size_t sites = x.size();
  Vector out = Vector::Zero(ket.size());
  std::vector<cd> phase(n);
  for (int k = 0; k < n; ++k) phase[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
  std::vector<int> digit(sites, 0);
  for (Eigen::Index i = 0; i < ket.size(); ++i) {
    if (ket(i) != 0.0) {
      std::size_t j = 0;
      int zsum = 0;
      for (std::size_t s = 0; s < sites; ++s) {
        zsum += z[s] * digit[s];
        j = j * n + static_cast<std::size_t>((digit[s] + x[s]) % n);
      }
      out(static_cast<Eigen::Index>(j)) += phase[((zsum % n) + n) % n] * ket(i);
    }
    for (std::size_t s = sites; s-- > 0;) {
      if (++digit[s] < n) break;
      digit[s] = 0;
    }
  }
  return out;
}

SparseMatrix QuditPauli::matrix(int n) const {
  const auto sites = static_cast<int>(x.size());
  std::vector<Matrix> factors;
  for (int s = 0; s < sites; ++s) {
    Matrix f = Matrix::Identity(n, n);
    for (int k = 0; k < z[s]; ++k) f = clock(n) * f;
    for (int k = 0; k < x[s]; ++k) f = shift(n) * f;
    factors.push_back(f);
  }
  SparseMatrix m = to_sparse(Matrix::Identity(1, 1));
  for (const auto& f : factors) {
    SparseMatrix next = Eigen::kroneckerProduct(m, to_sparse(f, 1e-15));
    m = std::move(next);
  }
  return m;
}

QuditPauli QuditPauli::power(int k, int n) const {
  QuditPauli p = *this;
  for (auto& v : p.x) v = ((v * k) % n + n) % n;
  for (auto& v : p.z) v = ((v * k) % n + n) % n;
  return p;
}

std::vector<int> QuditPauli::support() const {
  std::vector<int> s;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0 || z[i] != 0) s.push_back(static_cast<int>(i));
  return s;
}

int commutation_exponent(const QuditPauli& p, const QuditPauli& q, int n) {
  long c = 0;
  for (std::size_t s = 0; s < p.x.size(); ++s) c += static_cast<long>(p.z[s]) * q.x[s] - static_cast<long>(p.x[s]) * q.z[s];
  return static_cast<int>(((c % n) + n) % n);
}

// ---------------------------------------------------------------------------
// Quantum double

QuantumDouble::QuantumDouble(int n, int lx, int ly, std::size_t max_dim)
    : n_(n), lx_(lx), ly_(ly), dim_(1), geometry_(LatticeGeometry::torus_edges(lx, ly, n)) {
  if (n < 2 || lx < 2 || ly < 2) throw Error("QuantumDouble: need n >= 2 and a torus of at least 2x2");
  for (int e = 0; e < num_edges(); ++e) {
    dim_ *= static_cast<std::size_t>(n);
    if (dim_ > max_dim)
      throw GuardError("QuantumDouble: Hilbert dimension n^E exceeds max_dim; use the symbolic counts");
  }
  const int E = num_edges();
  const int dag = n - 1;
  for (int y = 0; y < ly; ++y) {
    for (int x = 0; x < lx; ++x) {
      QuditPauli a{std::vector<int>(E, 0), std::vector<int>(E, 0)};
      a.x[h(x, y)] += 1;
      a.x[v(x, y)] += 1;
      a.x[h(x - 1, y)] += dag;
      a.x[v(x, y - 1)] += dag;
      for (auto& k : a.x) k %= n;
      stars_.push_back(a);

      QuditPauli b{std::vector<int>(E, 0), std::vector<int>(E, 0)};
      b.z[h(x, y)] += 1;
      b.z[v(x + 1, y)] += 1;
      b.z[h(x, y + 1)] += dag;
      b.z[v(x, y)] += dag;
      for (auto& k : b.z) k %= n;
      plaquettes_.push_back(b);
    }
  }

  Vector g = Vector::Zero(static_cast<Eigen::Index>(dim_));
  g(0) = 1.0;
  for (const auto& a : stars_) {
    Vector sum = g;
    Vector term = g;
    for (int k = 1; k < n; ++k) {
      term = a.apply(term, n);
      sum += term;
    }
    g = sum / static_cast<double>(n);
  }
  g = normalized(g);

  const QuditPauli xx = logical_x_x(), xy = logical_x_y();
  basis_.resize(static_cast<std::size_t>(n * n));
  Vector col = g;
  for (int beta = 0; beta < n; ++beta) {
    Vector row = col;
    for (int alpha = 0; alpha < n; ++alpha) {
      basis_[static_cast<std::size_t>(alpha + n * beta)] = row;
      row = xx.apply(row, n);
    }
    col = xy.apply(col, n);
  }
}

int QuantumDouble::h(int x, int y) const {
  x = ((x % lx_) + lx_) % lx_;
  y = ((y % ly_) + ly_) % ly_;
  return y * lx_ + x;
}

int QuantumDouble::v(int x, int y) const { return lx_ * ly_ + h(x, y); }

QuditPauli QuantumDouble::logical_x_x(int x0) const {
  QuditPauli p{std::vector<int>(num_edges(), 0), std::vector<int>(num_edges(), 0)};
  for (int y = 0; y < ly_; ++y) p.x[h(x0, y)] = 1;
  return p;
}

QuditPauli QuantumDouble::logical_x_y(int y0) const {
  QuditPauli p{std::vector<int>(num_edges(), 0), std::vector<int>(num_edges(), 0)};
  for (int x = 0; x < lx_; ++x) p.x[v(x, y0)] = 1;
  return p;
}

QuditPauli QuantumDouble::logical_z_y(int y0) const {
  QuditPauli p{std::vector<int>(num_edges(), 0), std::vector<int>(num_edges(), 0)};
  for (int x = 0; x < lx_; ++x) p.z[h(x, y0)] = 1;
  return p;
}

QuditPauli QuantumDouble::logical_z_x(int x0) const {
  QuditPauli p{std::vector<int>(num_edges(), 0), std::vector<int>(num_edges(), 0)};
  for (int y = 0; y < ly_; ++y) p.z[v(x0, y)] = 1;
  return p;
}

Matrix QuantumDouble::ground_basis_matrix() const {
  Matrix b(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(basis_.size()));
  for (std::size_t k = 0; k < basis_.size(); ++k) b.col(static_cast<Eigen::Index>(k)) = basis_[k];
  return b;
}

Matrix QuantumDouble::project(const QuditPauli& op) const {
  const auto m = static_cast<Eigen::Index>(basis_.size());
  Matrix out(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    const Vector image = op.apply(basis_[static_cast<std::size_t>(b)], n_);
    for (Eigen::Index a = 0; a < m; ++a) out(a, b) = basis_[static_cast<std::size_t>(a)].dot(image);
  }
  return out;
}

Matrix QuantumDouble::project(const Matrix& full_op) const {
  if (full_op.rows() != static_cast<Eigen::Index>(dim_)) throw Error("QuantumDouble::project: dimension mismatch");
  const Matrix b = ground_basis_matrix();
  return b.adjoint() * full_op * b;
}

namespace {

std::vector<QuditPauli> all_generators(const QuantumDouble& qd) {
  std::vector<QuditPauli> g = qd.stars();
  g.insert(g.end(), qd.plaquettes().begin(), qd.plaquettes().end());
  return g;
}

}  // namespace

std::size_t QuantumDouble::stabilizer_group_size() const {
  const auto gens = all_generators(*this);
  const std::size_t E = static_cast<std::size_t>(num_edges());
  std::set<std::vector<int>> seen{std::vector<int>(2 * E, 0)};
  std::vector<std::vector<int>> frontier{std::vector<int>(2 * E, 0)};
  while (!frontier.empty()) {
    std::vector<std::vector<int>> next;
    for (const auto& el : frontier) {
      for (const auto& g : gens) {
        std::vector<int> w = el;
        for (std::size_t s = 0; s < E; ++s) {
          w[s] = (w[s] + g.x[s]) % n_;
          w[E + s] = (w[E + s] + g.z[s]) % n_;
        }
        if (seen.insert(w).second) next.push_back(std::move(w));
      }
    }
    frontier = std::move(next);
  }
  return seen.size();
}

std::size_t QuantumDouble::ground_space_dimension_symbolic() const { return dim_ / stabilizer_group_size(); }

int QuantumDouble::redundant_generators() const {
  const double rank = std::log(static_cast<double>(stabilizer_group_size())) / std::log(static_cast<double>(n_));
  return static_cast<int>(stars_.size() + plaquettes_.size()) - static_cast<int>(std::lround(rank));
}

int QuantumDouble::stabilizer_commutation_defect() const {
  const auto gens = all_generators(*this);
  int worst = 0;
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      const int c = commutation_exponent(gens[i], gens[j], n_);
      worst = std::max(worst, std::min(c, n_ - c));
    }
  return worst;
}

SparseMatrix QuantumDouble::parent_hamiltonian() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  SparseMatrix id(d, d);
  id.setIdentity();
  SparseMatrix hsum(d, d);
  for (const auto& g : all_generators(*this)) {
    const SparseMatrix s = g.matrix(n_);
    SparseMatrix power = id;
    SparseMatrix proj = id;
    for (int k = 1; k < n_; ++k) {
      power = SparseMatrix(s * power);
      proj += power;
    }
    hsum += id - proj / static_cast<double>(n_);
  }
  hsum.prune(cd(0.0), 1e-14);
  return hsum;
}

int QuantumDouble::ground_space_dimension_dense(double tol) const {
  if (dim_ > 4096) throw GuardError("QuantumDouble: dense null space limited to n^E <= 4096");
  const Matrix hmat = Matrix(parent_hamiltonian());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hmat, Eigen::EigenvaluesOnly);
  int count = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k)) < tol) ++count;
  return count;
}

double QuantumDouble::ground_basis_residual() const {
  double worst = 0.0;
  for (const auto& b : basis_)
    for (const auto& g : all_generators(*this)) worst = std::max(worst, (g.apply(b, n_) - b).norm());
  return worst;
}

Matrix QuantumDouble::x_tilde(int power) const {
  const int m = n_ * n_;
  Matrix x = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) x((((j + power) % m) + m) % m, j) = 1.0;
  return x;
}

Matrix QuantumDouble::z_tilde(int power) const {
  const int m = n_ * n_;
  Matrix z = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * power * j / m);
  return z;
}

namespace {

int numerical_rank(const Matrix& gram, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int r = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) > tol * scale) ++r;
  return r;
}

Matrix orbit_gram(const Matrix& generator, const Vector& psi) {
  const Eigen::Index m = psi.size();
  Matrix orbit(m, m);
  Vector w = psi;
  for (Eigen::Index i = 0; i < m; ++i) {
    orbit.col(i) = w;
    w = generator * w;
  }
  return orbit.adjoint() * orbit;
}

}  // namespace

BasisGenerationReport basis_generation_check(const QuantumDouble& qd, const Vector& coefficients, double tol) {
  const int m = qd.n() * qd.n();
  if (coefficients.size() != m) throw Error("basis_generation_check: need n^2 coefficients");
  BasisGenerationReport r;
  const Vector psi = normalized(coefficients);
  r.gram_x = orbit_gram(qd.x_tilde(), psi);
  r.gram_z = orbit_gram(qd.z_tilde(), psi);
  r.rank_x = numerical_rank(r.gram_x, tol);
  r.rank_z = numerical_rank(r.gram_z, tol);
  r.full_rank = m;
  r.passes = r.rank_x == m || r.rank_z == m;
  return r;
}

// ---------------------------------------------------------------------------
// Projective representations and isometric MPS

ProjectiveRep ProjectiveRep::inverse() const {
  ProjectiveRep r;
  r.label = label + "^-1";
  for (const auto& v : V) r.V.push_back(v.conjugate());
  r.omega = omega;
  for (auto& row : r.omega)
    for (auto& w : row) w = -w;
  return r;
}

double ProjectiveRep::cocycle_defect() const {
  double worst = 0.0;
  for (int g = 0; g < 4; ++g)
    for (int h = 0; h < 4; ++h) {
      const Matrix lhs = V[g] * V[h];
      const Matrix rhs = std::polar(1.0, omega[g][h]) * V[multiply(g, h)];
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return worst;
}

Matrix ProjectiveRep::onsite(int g) const { return kron(V.at(g), Matrix(V.at(g).conjugate())); }

ProjectiveRep pauli_projective_rep() {
  ProjectiveRep r;
  r.label = "pauli";
  r.omega.assign(4, std::vector<double>(4, 0.0));
  for (int g = 0; g < 4; ++g) {
    const int a = g >> 1, b = g & 1;
    Matrix v = Matrix::Identity(2, 2);
    if (a) v = pauli_x() * v;
    if (b) v = v * pauli_z();
    r.V.push_back(v);
    for (int h = 0; h < 4; ++h) r.omega[g][h] = std::numbers::pi * b * (h >> 1);
  }
  return r;
}

ProjectiveRep trivial_rep() {
  ProjectiveRep r;
  r.label = "trivial";
  r.omega.assign(4, std::vector<double>(4, 0.0));
  for (int g = 0; g < 4; ++g) r.V.push_back(((g >> 1) + (g & 1)) % 2 ? pauli_z() : Matrix(Matrix::Identity(2, 2)));
  return r;
}

Vector psi_plus(int D) {
  Vector v = Vector::Zero(D * D);
  for (int k = 0; k < D; ++k) v(k * D + k) = 1.0 / std::sqrt(static_cast<double>(D));
  return v;
}

LatticeGeometry IsometricMPS::geometry() const { return LatticeGeometry::ring(N, D * D); }

Vector IsometricMPS::state() const {
  if (N < 2) throw Error("IsometricMPS: need N >= 2");
  std::size_t dim = 1;
  for (int i = 0; i < 2 * N; ++i) dim *= static_cast<std::size_t>(D);
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(dim));
  const double amp = std::pow(static_cast<double>(D), -0.5 * N);
  std::vector<int> r(N, 0);
  for (;;) {
    // Site i carries (L_i, R_i) = (r_{i-1}, r_i).
    std::size_t idx = 0;
    for (int i = 0; i < N; ++i) {
      idx = idx * D + static_cast<std::size_t>(r[(i + N - 1) % N]);
      idx = idx * D + static_cast<std::size_t>(r[i]);
    }
    psi(static_cast<Eigen::Index>(idx)) = amp;
    int k = N - 1;
    while (k >= 0 && ++r[k] == D) r[k--] = 0;
    if (k < 0) break;
  }
  return psi;
}

Matrix IsometricMPS::symmetry(int g) const {
  std::vector<Matrix> f(static_cast<std::size_t>(N), rep.onsite(g));
  return kron_all(f);
}

double covariance_check(const Lindbladian& l, const std::vector<Matrix>& onsite, Rng& rng, int samples) {
  const int sites = l.geometry().num_sites();
  double worst = 0.0;
  for (const auto& u_site : onsite) {
    std::vector<Matrix> f(static_cast<std::size_t>(sites), u_site);
    const Matrix u = kron_all(f);
    if (u.rows() != l.dim()) throw Error("covariance_check: onsite dimension mismatch");
    for (int k = 0; k < samples; ++k) {
      const Matrix x = random_matrix(static_cast<std::size_t>(l.dim()), static_cast<std::size_t>(l.dim()), rng);
      const Matrix lhs = u.adjoint() * l.apply(u * x * u.adjoint()) * u;
      worst = std::max(worst, (lhs - l.apply(x)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

BridgeStates spt_bridge_states(int N, const ProjectiveRep& omega0, const ProjectiveRep& omega1) {
  BridgeStates b;
  b.factors = {IsometricMPS{N, 2, omega0}, IsometricMPS{N, 2, omega1.inverse()}, IsometricMPS{N, 2, omega1}};
  for (const auto& f : b.factors) b.phi0.push_back(f.state());
  Vector plus_chain = psi_plus(2);
  for (int i = 1; i < N; ++i) plus_chain = kron(plus_chain, psi_plus(2));
  b.phi1 = {plus_chain, plus_chain, b.factors[2].state()};
  return b;
}

BridgeEvolution evolve_bridge(const BridgeStates& b, double t) {
  BridgeEvolution r;
  const SiteChannel ch = replacement_channel(psi_plus(2));
  std::vector<Matrix> evolved;
  for (std::size_t f = 0; f < b.factors.size(); ++f) {
    const Matrix rho0 = projector(b.phi0[f]);
    const Matrix target = projector(b.phi1[f]);
    const Matrix rho = f < 2 ? closed_form_evolve(rho0, b.factors[f].geometry(), ch, t) : rho0;
    r.factor_distances.push_back(trace_distance(rho, target));
    r.distance_bound += r.factor_distances.back();
    if (f < 2) {
      for (int g = 0; g < 4; ++g) {
        const Matrix u = b.factors[f].symmetry(g);
        r.max_symmetry_defect = std::max(r.max_symmetry_defect, (u * rho * u.adjoint() - rho).cwiseAbs().maxCoeff());
      }
      evolved.push_back(rho);
    }
  }
  if (evolved[0].rows() * evolved[1].rows() <= 256) {
    const Matrix joint = kron(evolved[0], evolved[1]);
    const Matrix target = kron(projector(b.phi1[0]), projector(b.phi1[1]));
    r.exact_distance = trace_distance(joint, target);
  }
  return r;
}

}  // namespace qphase
