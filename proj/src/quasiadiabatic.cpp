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

#include "qphase/quasiadiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace qphase {

HamiltonianPath::HamiltonianPath(LatticeGeometry geometry, TermFn terms, int ground_dim, std::string name)
    : geometry_(std::move(geometry)), terms_(std::move(terms)), ground_dim_(ground_dim), name_(std::move(name)) {
  if (ground_dim_ < 1) throw Error("HamiltonianPath: ground dimension must be positive");
  if (geometry_.hilbert_dim() > 4096) throw GuardError("HamiltonianPath: dense regime limited to dimension 4096");
}

std::vector<LocalOperator> HamiltonianPath::term_derivatives(double s, double h) const {
  auto plus = terms_(s + h), minus = terms_(s - h);
  if (plus.size() != minus.size()) throw Error("HamiltonianPath: term list changes along the path");
  for (std::size_t i = 0; i < plus.size(); ++i) {
    if (plus[i].support != minus[i].support) throw Error("HamiltonianPath: term supports change along the path");
    plus[i].matrix = (plus[i].matrix - minus[i].matrix) / (2.0 * h);
  }
  return plus;
}

namespace {

Matrix assemble(const std::vector<LocalOperator>& terms, const LatticeGeometry& geo) {
  const auto d = static_cast<Eigen::Index>(geo.hilbert_dim());
  SparseMatrix h(d, d);
  for (const auto& t : terms) h += embed(t, geo);
  return Matrix(h);
}

}  // namespace

Matrix HamiltonianPath::hamiltonian(double s) const {
  Matrix h = assemble(terms_(s), geometry_);
  if (hermiticity_defect(h) > 1e-10) throw Error("HamiltonianPath: H(s) is not Hermitian");
  return 0.5 * (h + h.adjoint());
}

Matrix HamiltonianPath::derivative(double s, double h) const { return assemble(term_derivatives(s, h), geometry_); }

HamiltonianPath HamiltonianPath::restricted_to(std::span<const int> region) const {
  std::vector<int> sites(region.begin(), region.end());
  auto parent = terms_;
  auto fn = [parent, sites](double s) {
    std::vector<LocalOperator> out;
    for (const auto& t : parent(s)) {
      std::vector<int> local;
      for (int x : t.support) {
        auto it = std::find(sites.begin(), sites.end(), x);
        if (it == sites.end()) break;
        local.push_back(static_cast<int>(it - sites.begin()));
      }
      if (local.size() == t.support.size()) out.emplace_back(std::move(local), t.matrix);
    }
    return out;
  };
  return HamiltonianPath(geometry_.subsystem(sites), fn, ground_dim_, name_);
}

Spectrum spectrum(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success) throw Error("spectrum: eigensolver failed");
  return Spectrum{es.eigenvalues(), es.eigenvectors()};
}

double spectral_gap(const HamiltonianPath& path, double s) {
  const auto sp = spectrum(path.hamiltonian(s));
  const int g = path.ground_dim();
  if (sp.energies.size() <= g) throw Error("spectral_gap: no excited states");
  return sp.energies(g) - sp.energies(g - 1);
}

Matrix ground_states(const HamiltonianPath& path, double s) {
  return spectrum(path.hamiltonian(s)).vectors.leftCols(path.ground_dim());
}

Matrix ground_projector(const HamiltonianPath& path, double s) {
  const Matrix v = ground_states(path, s);
  return v * v.adjoint();
}

GapProfile gap_profile(const HamiltonianPath& path, int points) {
  if (points < 2) throw Error("gap_profile: need at least two points");
  GapProfile g;
  g.min_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double s = static_cast<double>(k) / (points - 1);
    const double gap = spectral_gap(path, s);
    g.s.push_back(s);
    g.gap.push_back(gap);
    if (gap < g.min_gap) {
      g.min_gap = gap;
      g.argmin = s;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Filter

FilterSpec FilterSpec::for_gap(double lambda, double cut_times_lambda) {
  FilterSpec f;
  f.lambda = lambda;
  f.t_cut = cut_times_lambda / lambda;
  return f;
}

double filter_time(const FilterSpec& f, double t) {
  if (std::abs(t) > f.t_cut || t == 0.0) return 0.0;
  return 0.5 * std::copysign(1.0, t) * std::erfc(f.lambda * std::abs(t) / std::sqrt(f.q));
}

double filter_tail_bound(const FilterSpec& f) {
  const double x = f.lambda * f.t_cut / std::sqrt(f.q);
  const double integral = std::exp(-x * x) / std::sqrt(std::numbers::pi) - x * std::erfc(x);
  return std::max(0.0, std::sqrt(f.q) / f.lambda * integral);
}

double filter_frequency(const FilterSpec& f, double omega) {
  if (omega == 0.0) return 0.0;
  const double x = f.q * omega * omega / (4.0 * f.lambda * f.lambda);
  double value = -std::expm1(-x) / omega;
  if (filter_tail_bound(f) > 1e-12) {
    // Remove int_{t_cut}^inf erfc(lambda t / sqrt q) sin(omega t) dt; the integrand is negligible
    // beyond a few Gaussian widths past the cut.
    const double a = f.lambda / std::sqrt(f.q);
    const double end = f.t_cut + 8.0 / a;
    auto g = [&](double t) { return std::erfc(a * t) * std::sin(omega * t); };
    value -= boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, f.t_cut, end, 15, 1e-13);
  }
  return value;
}

Matrix filtered_transform(const Spectrum& sp, const Matrix& a, const FilterSpec& f) {
  const Matrix& v = sp.vectors;
  Matrix m = v.adjoint() * a * v;
  const Eigen::Index d = m.rows();
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) *= cd(0.0, filter_frequency(f, sp.energies(i) - sp.energies(j)));
  Matrix k = v * m * v.adjoint();
  return 0.5 * (k + k.adjoint());
}

// ---------------------------------------------------------------------------
// Generators

Matrix exact_qa_generator(const HamiltonianPath& path, double s, double h, double min_gap) {
  for (double x : {s - h, s, s + h}) {
    const double gap = spectral_gap(path, x);
    if (gap < min_gap)
      throw Error("exact_qa_generator: gap collapse (" + std::to_string(gap) + ") at s = " + std::to_string(x));
  }
  const Matrix p = ground_projector(path, s);
  const Matrix dp = (ground_projector(path, s + h) - ground_projector(path, s - h)) / (2.0 * h);
  Matrix k = cd(0, 1) * (p * dp - dp * p);
  return 0.5 * (k + k.adjoint());
}

Matrix filtered_qa_generator(const HamiltonianPath& path, double s, const FilterSpec& f) {
  const double tail = filter_tail_bound(f);
  if (tail > f.max_tail)
    throw Error("filtered_qa_generator: filter tail bound " + std::to_string(tail) + " exceeds " +
                std::to_string(f.max_tail) + "; increase t_cut");
  return filtered_transform(spectrum(path.hamiltonian(s)), path.derivative(s), f);
}

Matrix qa_generator(const HamiltonianPath& path, double s, QAMode mode, const FilterSpec& f) {
  return mode == QAMode::Exact ? exact_qa_generator(path, s) : filtered_qa_generator(path, s, f);
}

double intertwining_residual(const HamiltonianPath& path, double s, const Matrix& k, double h) {
  const Matrix p = ground_projector(path, s);
  const Matrix dp = (ground_projector(path, s + h) - ground_projector(path, s - h)) / (2.0 * h);
  return operator_norm(dp - cd(0, 1) * (k * p - p * k));
}

namespace {

// exp(i t K) for Hermitian K.
Matrix expi(const Matrix& k, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const Matrix& v = es.eigenvectors();
  Vector phase(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::polar(1.0, t * es.eigenvalues()(i));
  return v * phase.asDiagonal() * v.adjoint();
}

}  // namespace

TransportResult transport(const HamiltonianPath& path, QAMode mode, const FilterSpec& f, std::span<const double> grid,
                          double tol) {
  if (grid.empty()) throw Error("transport: empty grid");
  TransportResult r;
  const Matrix psi0 = ground_states(path, grid.front());
  auto rhs = [&](double s, const Matrix& y) -> Matrix { return cd(0, 1) * (qa_generator(path, s, mode, f) * y); };
  const auto ys = integrate_dopri5(rhs, psi0, grid.front(), grid, IntegratorOptions::with_tolerance(tol));
  const double g = path.ground_dim();
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const Matrix p = ground_projector(path, grid[i]);
    const double fid = (p * ys[i]).squaredNorm() / g;
    r.s.push_back(grid[i]);
    r.states.push_back(ys[i]);
    r.fidelity.push_back(fid);
    r.min_fidelity = std::min(r.min_fidelity, fid);
    r.projector_defect = std::max(r.projector_defect, operator_norm(ys[i] * ys[i].adjoint() - p));
  }
  return r;
}

Matrix transport_unitary(const HamiltonianPath& path, QAMode mode, const FilterSpec& f, int steps, double t) {
  if (steps < 1) throw Error("transport_unitary: need at least one step");
  const auto d = static_cast<Eigen::Index>(path.geometry().hilbert_dim());
  Matrix u = Matrix::Identity(d, d);
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) u = expi(qa_generator(path, (k + 0.5) * h, mode, f), h) * u;
  return u;
}

// ---------------------------------------------------------------------------
// Quasi-locality

std::pair<int, int> term_ball(const LatticeGeometry& geometry, const std::vector<int>& support) {
  if (support.empty()) throw Error("term_ball: empty support");
  const int j = support.front();
  int r = 0;
  for (int x : support) r = std::max(r, geometry.distance(j, x));
  return {j, r + 1};
}

namespace {

// int W tau^{H_ball}(a) on the ball, embedded in the full space.
Matrix ball_transform(const HamiltonianPath& path, double s, const LocalOperator& a, const std::vector<int>& ball,
                      const FilterSpec& f, std::size_t max_dim) {
  const auto& geo = path.geometry();
  if (geo.dim_of(ball) > max_dim) throw GuardError("delta_decomposition: ball exceeds the dense guard");
  const auto sub = path.restricted_to(ball);
  std::vector<int> local;
  for (int x : a.support) local.push_back(static_cast<int>(std::find(ball.begin(), ball.end(), x) - ball.begin()));
  const Matrix a_ball = embed_dense(LocalOperator(local, a.matrix), sub.geometry());
  const Matrix fb = filtered_transform(spectrum(sub.hamiltonian(s)), a_ball, f);
  return embed_dense(LocalOperator(ball, fb), geo);
}

}  // namespace

DeltaDecomposition delta_decomposition(const HamiltonianPath& path, double s, int term, int n_max,
                                       const FilterSpec& f, std::size_t max_ball_dim) {
  const auto derivs = path.term_derivatives(s);
  if (term < 0 || term >= static_cast<int>(derivs.size())) throw Error("delta_decomposition: term out of range");
  const auto& geo = path.geometry();
  DeltaDecomposition d;
  std::tie(d.center, d.alpha0) = term_ball(geo, derivs[term].support);
  Matrix prev;
  for (int n = 0; n <= n_max; ++n) {
    const Matrix cur = ball_transform(path, s, derivs[term], geo.ball(d.center, d.alpha0 + n), f, max_ball_dim);
    d.deltas.push_back(n == 0 ? cur : Matrix(cur - prev));
    d.norms.push_back(operator_norm(d.deltas.back()));
    prev = cur;
  }
  return d;
}

KTerms k_terms(const HamiltonianPath& path, double s, const FilterSpec& f) {
  const auto& geo = path.geometry();
  const auto derivs = path.term_derivatives(s);
  KTerms out;
  const auto d = static_cast<Eigen::Index>(geo.hilbert_dim());
  Matrix total = Matrix::Zero(d, d);
  for (std::size_t x = 0; x < derivs.size(); ++x) {
    if (derivs[x].matrix.cwiseAbs().maxCoeff() < 1e-14) continue;
    const auto [j, a0] = term_ball(geo, derivs[x].support);
    int n_max = 0;
    while (static_cast<int>(geo.ball(j, a0 + n_max).size()) < geo.num_sites()) ++n_max;
    const auto dec = delta_decomposition(path, s, static_cast<int>(x), n_max, f);
    for (int n = 0; n <= n_max; ++n) {
      auto [it, fresh] = out.k.try_emplace({j, a0 + n}, dec.deltas[n]);
      if (!fresh) it->second += dec.deltas[n];
      total += dec.deltas[n];
    }
  }
  out.reconstruction_residual =
      operator_norm(total - filtered_transform(spectrum(path.hamiltonian(s)), path.derivative(s), f));
  return out;
}

double decay_function(double x, int d) { return std::pow(1.0 + x, -(d + 1.0)); }

double u_mu(double mu, double t) {
  const double e2 = std::exp(2.0);
  const double x = std::max(t, e2);
  const double l = std::log(x);
  return std::exp(-mu * x / (l * l));
}

double i_lambda_bound(double lambda, double t) {
  const double x = lambda * t;
  return std::pow(x, 10) * u_mu(2.0 / 7.0, x);
}

LiebRobinsonFit fit_lieb_robinson(const LatticeGeometry& geometry, const Matrix& hamiltonian, int site,
                                  std::span<const double> times, double threshold) {
  const auto sp = spectrum(hamiltonian);
  auto local_z = [&](int x) {
    const Matrix c = clock(geometry.local_dim(x));
    return embed_dense(LocalOperator({x}, Matrix(0.5 * (c + c.adjoint()))), geometry);
  };
  const Matrix a = local_z(site);
  const Matrix a_eig = sp.vectors.adjoint() * a * sp.vectors;
  std::map<int, std::vector<double>> by_distance;  // r -> max commutator per time
  for (std::size_t k = 0; k < times.size(); ++k) {
    Vector phase(sp.energies.size());
    for (Eigen::Index i = 0; i < phase.size(); ++i) phase(i) = std::polar(1.0, times[k] * sp.energies(i));
    const Matrix at = sp.vectors * (phase.asDiagonal() * a_eig * phase.conjugate().asDiagonal()) * sp.vectors.adjoint();
    for (int b = 0; b < geometry.num_sites(); ++b) {
      if (b == site) continue;
      const Matrix z = local_z(b);
      const double c = operator_norm(at * z - z * at);
      auto& row = by_distance[geometry.distance(site, b)];
      row.resize(times.size(), 0.0);
      row[k] = std::max(row[k], c);
    }
  }
  LiebRobinsonFit fit;
  double num = 0.0, den = 0.0;
  for (const auto& [r, row] : by_distance) {
    for (std::size_t k = 0; k < times.size(); ++k)
      if (row[k] >= threshold) {
        fit.distances.push_back(r);
        fit.arrival_times.push_back(times[k]);
        num += r * times[k];
        den += times[k] * times[k];
        break;
      }
  }
  fit.velocity = den > 0.0 ? num / den : 0.0;
  for (const auto& [r, row] : by_distance)
    for (std::size_t k = 0; k < times.size(); ++k)
      fit.prefactor = std::max(fit.prefactor, row[k] * std::exp(r - fit.velocity * times[k]));
  return fit;
}

QuasiLocalityProfile quasi_locality_profile(const HamiltonianPath& path, double s, int term, int n_max,
                                            const FilterSpec& f, std::span<const double> lr_times) {
  QuasiLocalityProfile p;
  p.delta_norms = delta_decomposition(path, s, term, n_max, f).norms;
  p.knee = p.delta_norms.size();
  for (std::size_t n = p.delta_norms.size(); n-- > 0;) {
    if (n + 1 < p.delta_norms.size() && p.delta_norms[n + 1] > p.delta_norms[n]) break;
    p.knee = n;
  }
  std::vector<double> xs, ys;
  for (std::size_t n = p.knee; n < p.delta_norms.size(); ++n)
    if (p.delta_norms[n] > 1e-14) {
      xs.push_back(static_cast<double>(n));
      ys.push_back(-std::log(p.delta_norms[n]));
    }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    p.decay_rate = sxy / sxx;
  }
  const auto derivs = path.term_derivatives(s);
  p.lieb_robinson = fit_lieb_robinson(path.geometry(), path.hamiltonian(s), derivs.at(term).support.front(), lr_times);
  return p;
}

// ---------------------------------------------------------------------------
// Patches

std::vector<int> inner_boundary(const LatticeGeometry& geometry, std::span<const int> region) {
  geometry.check_support(region);
  std::set<int> in(region.begin(), region.end());
  std::vector<int> out;
  for (int x : in)
    for (int y = 0; y < geometry.num_sites(); ++y)
      if (!in.count(y) && geometry.distance(x, y) == 1) {
        out.push_back(x);
        break;
      }
  return out;
}

std::vector<int> boundary_region(const LatticeGeometry& geometry, std::span<const int> region, int omega) {
  const auto b = inner_boundary(geometry, region);
  std::vector<int> out;
  if (b.empty()) return out;
  for (int i = 0; i < geometry.num_sites(); ++i)
    if (geometry.distance_to_set(i, b) < omega) out.push_back(i);
  return out;
}

namespace {

std::vector<PatchedTransport> patched_transport_multi(const HamiltonianPath& path,
                                                      const std::vector<std::vector<int>>& blocks,
                                                      const std::vector<std::vector<std::vector<int>>>& configs,
                                                      QAMode mode, const FilterSpec& f, int steps, double t) {
  if (steps < 1) throw Error("patched_transport: need at least one step");
  const auto& geo = path.geometry();
  const auto d = static_cast<Eigen::Index>(geo.hilbert_dim());
  {
    std::vector<int> all;
    for (const auto& b : blocks) all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    if (static_cast<int>(all.size()) != geo.num_sites() || std::adjacent_find(all.begin(), all.end()) != all.end())
      throw Error("patched_transport: blocks must partition the lattice");
  }
  std::vector<HamiltonianPath> block_paths;
  for (const auto& b : blocks) block_paths.push_back(path.restricted_to(b));

  Matrix u = Matrix::Identity(d, d);
  std::vector<Matrix> ub;
  for (const auto& b : blocks) {
    const auto db = static_cast<Eigen::Index>(geo.dim_of(b));
    ub.push_back(Matrix::Identity(db, db));
  }
  std::vector<PatchedTransport> out(configs.size());
  std::vector<std::vector<Matrix>> vc(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c)
    for (const auto& r : configs[c]) {
      const auto dr = static_cast<Eigen::Index>(geo.dim_of(r));
      vc[c].push_back(Matrix::Identity(dr, dr));
    }

  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    const double s = (k + 0.5) * h;
    const Matrix e = expi(qa_generator(path, s, mode, f), h);
    Matrix fw = Matrix::Identity(d, d);
    std::vector<Matrix> fb;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      fb.push_back(expi(qa_generator(block_paths[b], s, mode, f), h));
      fw = embed_dense(LocalOperator(blocks[b], fb.back()), geo) * fw;
    }
    // V_{k+1} = V_k G_k with G_k = U_k^dag F_k^dag E_k U_k, reproducing V = W^dag U exactly.
    const Matrix g = u.adjoint() * fw.adjoint() * e * u;
    const Matrix l = principal_log(g) / h;
    const cd scalar = l.trace() / static_cast<double>(d);
    for (std::size_t c = 0; c < configs.size(); ++c) {
      Matrix assembled = Matrix::Zero(d, d);
      for (std::size_t p = 0; p < configs[c].size(); ++p) {
        const auto& region = configs[c][p];
        const double rest = static_cast<double>(geo.hilbert_dim()) / static_cast<double>(geo.dim_of(region));
        Matrix lp = partial_trace(l, geo, region) / rest;
        if (p > 0) lp -= scalar * Matrix::Identity(lp.rows(), lp.cols());
        lp = 0.5 * (lp + lp.adjoint());
        vc[c][p] = vc[c][p] * expi(lp, h);
        assembled += embed_dense(LocalOperator(region, lp), geo);
      }
      if (!configs[c].empty()) {
        std::vector<int> uni;
        for (const auto& r : configs[c]) uni.insert(uni.end(), r.begin(), r.end());
        std::sort(uni.begin(), uni.end());
        out[c].support_leak =
            std::max(out[c].support_leak, (restrict_to_region(assembled, geo, uni) - assembled).norm());
      }
    }
    u = e * u;
    for (std::size_t b = 0; b < blocks.size(); ++b) ub[b] = fb[b] * ub[b];
  }

  Matrix w = Matrix::Identity(d, d);
  for (std::size_t b = 0; b < blocks.size(); ++b) w = embed_dense(LocalOperator(blocks[b], ub[b]), geo) * w;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    auto& r = out[c];
    r.full = u;
    r.block_unitaries = ub;
    r.blocks = w;
    r.patch_unitaries = vc[c];
    r.patches = Matrix::Identity(d, d);
    for (std::size_t p = 0; p < configs[c].size(); ++p)
      r.patches = r.patches * embed_dense(LocalOperator(configs[c][p], vc[c][p]), geo);
    r.residual = operator_norm(u - w * r.patches);
  }
  return out;
}

}  // namespace

PatchedTransport patched_transport(const HamiltonianPath& path, const std::vector<std::vector<int>>& blocks,
                                   const std::vector<std::vector<int>>& patch_regions, QAMode mode,
                                   const FilterSpec& f, int steps, double t) {
  return patched_transport_multi(path, blocks, {patch_regions}, mode, f, steps, t).front();
}

std::vector<PatchSplit> patch_split(const HamiltonianPath& path, std::span<const int> region,
                                    std::span<const int> omegas, QAMode mode, const FilterSpec& f, int steps,
                                    double t) {
  const auto& geo = path.geometry();
  std::vector<int> a(region.begin(), region.end()), rest;
  for (int i = 0; i < geo.num_sites(); ++i)
    if (std::find(a.begin(), a.end(), i) == a.end()) rest.push_back(i);
  std::vector<std::vector<std::vector<int>>> configs;
  for (int omega : omegas) configs.push_back({boundary_region(geo, a, omega)});
  std::vector<std::vector<int>> blocks{a};
  if (!rest.empty()) blocks.push_back(rest);
  const auto runs = patched_transport_multi(path, blocks, configs, mode, f, steps, t);
  std::vector<PatchSplit> out;
  for (std::size_t i = 0; i < runs.size(); ++i)
    out.push_back(PatchSplit{omegas[i], configs[i].front(), runs[i].residual, runs[i].support_leak});
  return out;
}

PathCircuit circuit_from_path(const HamiltonianPath& path, int omega, QAMode mode, const FilterSpec& f, int steps) {
  const auto& geo = path.geometry();
  if (geo.kind() != LatticeGeometry::Kind::Ring) throw Error("circuit_from_path: ring geometry required");
  if (omega < 1) throw Error("circuit_from_path: block size must be positive");
  const int n = geo.num_sites();
  std::vector<std::vector<int>> blocks;
  for (int start = 0; start < n; start += omega) {
    std::vector<int> b;
    for (int i = start; i < std::min(n, start + omega); ++i) b.push_back(i);
    blocks.push_back(std::move(b));
  }
  std::vector<std::vector<int>> patches;
  if (blocks.size() > 1) {
    std::set<int> used;
    for (const auto& b : blocks) {
      const int e = b.back();
      std::vector<int> r;
      for (int i = e - (omega + 1) / 2 + 1; i <= e + omega / 2; ++i) {
        const int x = ((i % n) + n) % n;
        if (used.insert(x).second) r.push_back(x);
      }
      std::sort(r.begin(), r.end());
      if (!r.empty()) patches.push_back(std::move(r));
    }
  }
  PathCircuit pc;
  pc.transport = patched_transport(path, blocks, patches, mode, f, steps);
  GateLayer patch_layer, block_layer;
  for (std::size_t p = 0; p < patches.size(); ++p)
    patch_layer.gates.push_back(Gate{patches[p], pc.transport.patch_unitaries[p]});
  for (std::size_t b = 0; b < blocks.size(); ++b)
    block_layer.gates.push_back(Gate{blocks[b], pc.transport.block_unitaries[b]});
  if (!patch_layer.gates.empty()) pc.schedule.layers.push_back(std::move(patch_layer));
  pc.schedule.layers.push_back(std::move(block_layer));

  const Vector psi0 = ground_states(path, 0.0).col(0);
  const Vector psi1 = ground_states(path, 1.0).col(0);
  const Vector out = pc.transport.blocks * (pc.transport.patches * psi0);
  pc.fidelity = std::norm(psi1.dot(out));
  pc.distance = trace_distance(projector(out), projector(psi1));
  return pc;
}

// ---------------------------------------------------------------------------
// Shipped paths

HamiltonianPath single_qubit_path() {
  auto fn = [](double s) {
    return std::vector<LocalOperator>{LocalOperator({0}, Matrix(-(1.0 - s) * pauli_z() - s * pauli_x()))};
  };
  return HamiltonianPath(LatticeGeometry::chain({2}), fn, 1, "single_qubit");
}

HamiltonianPath uncoupled_path(int n) {
  if (n < 1) throw Error("uncoupled_path: need at least one site");
  auto fn = [n](double s) {
    std::vector<LocalOperator> t;
    for (int i = 0; i < n; ++i) t.emplace_back(std::vector<int>{i}, Matrix(-(1.0 - s) * pauli_z() - s * pauli_x()));
    return t;
  };
  auto geo = n >= 3 ? LatticeGeometry::ring(n, 2) : LatticeGeometry::chain(std::vector<int>(n, 2));
  return HamiltonianPath(geo, fn, 1, "uncoupled");
}

HamiltonianPath paramagnetic_ring_path(int n, double h, double g, double J) {
  if (n < 3) throw Error("paramagnetic_ring_path: need at least three sites");
  auto fn = [n, h, g, J](double s) {
    std::vector<LocalOperator> t;
    for (int i = 0; i < n; ++i) t.emplace_back(std::vector<int>{i}, Matrix(-h * pauli_x() - s * g * pauli_z()));
    const Matrix zz = kron(pauli_z(), pauli_z());
    for (int i = 0; i < n; ++i) t.emplace_back(std::vector<int>{i, (i + 1) % n}, Matrix(-J * zz));
    return t;
  };
  return HamiltonianPath(LatticeGeometry::ring(n, 2), fn, 1, "paramagnetic_ring");
}

}  // namespace qphase
