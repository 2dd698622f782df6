from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fractonlab import kernels
from fractonlab.codes import build_checkerboard
from fractonlab.exact import (
    OracleSizeError,
    all_configurations,
    brute_spectrum,
    delta_f,
    energy_spectrum,
    enumerate_exact,
    exact_gsd_count,
    solve,
)
from fractonlab.mapping import (
    CouplingHypergraph,
    clean_disorder,
    energy,
    map_error_model,
    plane_flip,
    random_hypergraph,
    sample_disorder,
)
from fractonlab.validation import oracle_instance

BACKENDS = ["python"] + (["compiled"] if kernels.has_compiled() else [])


def cb2():
    return map_error_model(build_checkerboard(2), "X")


def test_single_bond_closed_form():
    h = CouplingHypergraph(2, ((0, 1),))
    d = clean_disorder(h)
    for beta in (0.0, 0.4, 1.3):
        sol = enumerate_exact(h, d, beta)
        assert sol.mean_energy == pytest.approx(-math.tanh(beta), abs=1e-14)
        assert sol.log_z == pytest.approx(math.log(4 * math.cosh(beta)), abs=1e-14)


def test_infinite_temperature_is_plain_average():
    h, d = oracle_instance()
    e = energy(h, d, all_configurations(h.n_spins))
    sol = enumerate_exact(h, d, 0.0)
    assert sol.mean_energy == pytest.approx(e.mean(), abs=1e-12)
    spec = energy_spectrum(h, d)
    assert np.allclose(sol.p_of_e, spec.counts / spec.counts.sum(), rtol=0, atol=1e-15)


@pytest.mark.parametrize("backend", BACKENDS)
def test_gray_code_matches_independent_enumerator(backend):
    h = cb2()
    d = sample_disorder(h, 0.3, 4)
    a = energy_spectrum(h, d, backend)
    b = brute_spectrum(h, d)
    assert np.array_equal(a.counts, b.counts) and a.counts.sum() == 2**h.n_spins
    # clean L = 2 checkerboard at beta = 1 against a direct Boltzmann sum over states
    c = clean_disorder(h)
    e = energy(h, c, all_configurations(h.n_spins)).astype(float)
    w = np.exp(-(e - e.min()))
    direct = float((w * e).sum() / w.sum())
    assert enumerate_exact(h, c, 1.0).mean_energy == pytest.approx(direct, abs=1e-12)


@given(st.integers(0, 10_000), st.floats(0.05, 2.0))
@settings(max_examples=25, deadline=None)
def test_energy_is_minus_dlogz_dbeta(seed, beta):
    h = random_hypergraph(9, 14, 3, seed)
    spec = energy_spectrum(h, sample_disorder(h, 0.3, seed))
    eps = 1e-5
    fd = -(spec.log_z(beta + eps) - spec.log_z(beta - eps)) / (2 * eps)
    assert solve(spec, beta).mean_energy == pytest.approx(fd, abs=1e-6)


def test_size_cap():
    h = random_hypergraph(25, 30, 3, 0)
    with pytest.raises(OracleSizeError):
        energy_spectrum(h, clean_disorder(h))


def test_delta_f_zero_for_stabilizer_flips():
    code = build_checkerboard(2)
    h = map_error_model(code, "X")
    for r in range(5):
        d = sample_disorder(h, 0.1, r)
        for stab in code.x_stabilizers:
            assert abs(delta_f(h, d, stab, 1.2)) <= 1e-10


def test_delta_f_positive_for_plane_flip():
    code = build_checkerboard(2)
    h = map_error_model(code, "X")
    d = clean_disorder(h)
    # couplings are qubits; the four qubits of one z-plane form a logical-class flip
    plane = [q for q in range(code.n) if q // 4 == 0]
    assert len(plane) == 4
    assert delta_f(h, d, plane, 1.5) > 0
    assert delta_f(h, d, plane, 0.0) == 0.0
    assert abs(delta_f(h, d, plane, 1e-9)) < 1e-6


def test_gsd_small_cases():
    h = CouplingHypergraph(2, ((0, 1),))
    assert exact_gsd_count(h, clean_disorder(h)) == 2
    # frustrated triangle: 3 antiferromagnetic bonds
    tri = CouplingHypergraph(3, ((0, 1), (1, 2), (0, 2)))
    d = sample_disorder(tri, 1.0, 0)
    e = energy(tri, d, all_configurations(3))
    assert exact_gsd_count(tri, d) == int(np.sum(e == e.min())) == 6


def test_oracle_correlator_on_clean_l2():
    h = cb2()
    sol = enumerate_exact(h, clean_disorder(h), 0.7, with_correlator=True)
    assert sol.correlator[0] == pytest.approx(1.0)
    assert sol.correlator[1] == pytest.approx(-sol.mean_energy / h.n_couplings, abs=1e-12)
    assert plane_flip(h, 0, 0).sum() == 2
