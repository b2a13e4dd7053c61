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

#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qphase/switchgear.hpp"

namespace qphase::oracle {

/// Expected output of a layered circuit whose layer l runs for a Gamma(k_l, gamma) distributed
/// time, k_l being the number of timer hops assigned to it. Independent of the composite code:
/// gate generators come from an eigendecomposition and the average is the Gamma characteristic function.
inline Matrix jittered_circuit(const LatticeGeometry& geo, const CircuitSchedule& c, int T, const Matrix& rho0) {
  const double total = c.total_dwell();
  const double gamma = T / total;
  Matrix rho = rho0;
  double cum = 0.0;
  int prev_level = 0;
  for (const auto& layer : c.layers) {
    cum += layer.dwell;
    const int level = static_cast<int>(std::lround(T * cum / total));
    const int hops = level - prev_level;
    prev_level = level;

    const auto d = static_cast<Eigen::Index>(geo.hilbert_dim());
    Matrix h = Matrix::Zero(d, d);
    for (const auto& g : layer.gates) {
      Eigen::ComplexEigenSolver<Matrix> es(g.unitary);
      Matrix theta = Matrix::Zero(g.unitary.rows(), g.unitary.rows());
      for (Eigen::Index i = 0; i < theta.rows(); ++i) {
        double a = std::arg(es.eigenvalues()(i));
        if (a <= -3.141592653589793 + 1e-12) a = 3.141592653589793;
        theta(i, i) = a;
      }
      const Matrix v = es.eigenvectors();
      Matrix local = v * theta * v.inverse();
      local = 0.5 * (local + local.adjoint());
      h -= embed_dense(LocalOperator(g.support, local / layer.dwell), geo);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> hs(h);
    const Matrix& w = hs.eigenvectors();
    Matrix r = w.adjoint() * rho * w;
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k) {
        const double omega = hs.eigenvalues()(j) - hs.eigenvalues()(k);
        r(j, k) *= std::pow(std::complex<double>(1.0, omega / gamma), -hops);
      }
    rho = w * r * w.adjoint();
  }
  return rho;
}

}  // namespace qphase::oracle
