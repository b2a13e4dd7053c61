# Copyright 2026 The qphase Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http:#www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import numpy as np
import pytest

import qphase


def test_geometry_and_states():
    geo = qphase.LatticeGeometry.ring(4, 2)
    assert geo.num_sites == 4
    assert geo.hilbert_dim == 16
    assert geo.distance(0, 2) == 2
    rho = qphase.projector(qphase.basis_ket(4, 1))
    assert rho.shape == (4, 4)
    assert qphase.trace_distance(rho, rho) == 0.0


def test_timer_matches_poisson():
    spec = qphase.TimerSpec.with_tau(6, 2.0)
    p = qphase.birth_chain_dist(spec, 0.5)
    mu = 0.5 * 6 / 2.0
    for k in range(6):
        assert p[k] == pytest.approx(math.exp(-mu) * mu**k / math.factorial(k), rel=1e-12)
    assert sum(p) == pytest.approx(1.0, abs=1e-14)
    q = qphase.quantum_timer_dist(qphase.TimerSpec.with_tau(3, 1.0), 0.8)
    r = qphase.birth_chain_dist(qphase.TimerSpec.with_tau(3, 1.0), 0.8)
    assert np.max(np.abs(np.array(q) - np.array(r))) < 1e-8


def test_channel_properties():
    geo = qphase.LatticeGeometry.chain([2, 2])
    l = qphase.random_lindbladian(geo, seed=3)
    p = qphase.propagator(l, 0.5)
    assert p.shape == (16, 16)
    rho = qphase.projector(qphase.basis_ket(4, 0))
    out = qphase.evolve(l, rho, 0.5)
    assert abs(np.trace(out) - 1.0) < 1e-10
    assert np.allclose(out, out.conj().T, atol=1e-12)
    a = np.diag([1.0, -1.0, 2.0, 0.5]).astype(complex)
    dual = np.trace(qphase.heisenberg_evolve(l, a, 0.5) @ rho)
    assert abs(np.trace(a @ out) - dual) < 1e-10
    assert qphase.choi_min_eigenvalue(l, 0.5) > -1e-9


def test_product_driver_reaches_target():
    geo = qphase.LatticeGeometry.chain([2, 2])
    l = qphase.product_driver(geo, qphase.basis_ket(2, 0))
    out = qphase.evolve(l, qphase.projector(qphase.basis_ket(4, 3)), 2.0)
    expected = 1 - (1 - math.exp(-2.0)) ** 2
    assert qphase.trace_distance(out, qphase.projector(qphase.basis_ket(4, 0))) == pytest.approx(expected, abs=1e-9)


def test_models_and_transport():
    assert qphase.QuantumDouble(2, 2, 2).ground_space_dimension_symbolic() == 4
    ghz = qphase.ghz_state([0, 2], 3, 4)
    assert np.linalg.norm(ghz) == pytest.approx(1.0)
    f = qphase.transport_fidelity(qphase.single_qubit_path(), qphase.QAMode.Exact)
    assert min(f) > 1 - 1e-8


def test_runner_round_trip():
    assert "timer" in qphase.experiment_kinds()
    cfg = {"schema_version": 1, "kind": "switch", "seed": 1, "params": {"T_values": [4, 8], "factorization_T": 2}}
    summary, tables = qphase.run(cfg)
    assert summary["results"]["T_values"] == [4, 8]
    assert tables["switch.csv"].startswith("T,distance\n")
    assert qphase.run(json.dumps(cfg), workers=2)[1] == tables


def test_errors():
    with pytest.raises(qphase.ConfigError, match="params.foo"):
        qphase.run({"schema_version": 1, "kind": "timer", "params": {"foo": 1}})
    with pytest.raises(qphase.GuardError):
        qphase.run({"schema_version": 1, "kind": "double", "params": {"lx": 4, "ly": 4}})
