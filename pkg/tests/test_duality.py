from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractonlab.duality import (
    THRESHOLD_TABLE,
    ThresholdEntry,
    binary_entropy,
    dual_threshold,
    entropy_sum,
    hierarchy_prediction,
    nishimori_factors,
    qgv_check,
    replicated_factors,
    self_dual_point,
)
from fractonlab.mapping import nishimori_beta

# reference entropy sums for the built-in threshold table, frozen
QUOTED_SUMS = [0.9962, 0.994, 0.99, 0.986, 1.00, 0.987]
SELF_DUAL = 0.11002786443836499


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0 == binary_entropy(1.0)
    assert binary_entropy(0.11) == pytest.approx(-0.11 * math.log2(0.11) - 0.89 * math.log2(0.89))
    for bad in (-0.1, 1.1, float("nan")):
        with pytest.raises(ValueError):
            binary_entropy(bad)


def test_entropy_sum_examples():
    assert abs(entropy_sum(0.2327, 0.033).entropy_sum - 0.99) <= 0.01
    assert abs(entropy_sum(0.108, 0.108).entropy_sum - 0.987) <= 0.005
    assert entropy_sum(0.5, 0.0).entropy_sum == 1.0


def test_table_reproduced():
    rows = qgv_check()
    assert [r.entry.quoted_sum for r in rows] == QUOTED_SUMS
    for r in rows:
        assert r.matches_quote, (r.entry.code, r.entropy_sum)
        assert not r.violates_bound


def test_qgv_edge_cases():
    assert qgv_check([]) == []
    (row,) = qgv_check([ThresholdEntry("bad", 0.5, 0.5)])
    assert row.violates_bound and row.entropy_sum == 2.0 and row.matches_quote is None


@given(st.floats(0.01, 0.49))
def test_dual_threshold_solves_entropy_equation(p1):
    p2 = dual_threshold(p1)
    assert abs(binary_entropy(p1) + binary_entropy(p2) - 1.0) <= 1e-10
    assert 0 < p2 <= 0.5


def test_dual_threshold_domain():
    for bad in (0.0, 0.5, 0.7):
        with pytest.raises(ValueError):
            dual_threshold(bad)


def test_self_dual_point():
    p = self_dual_point()
    assert abs(binary_entropy(p) - 0.5) <= 1e-10
    assert 0.1099 < p < 0.1101
    assert p == pytest.approx(SELF_DUAL, abs=1e-10)


@pytest.mark.parametrize("p", [0.05, 0.11, 0.3])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_hierarchy_on_nishimori_line(n, p):
    f = nishimori_factors(n, p)
    assert np.max(np.abs(f.hierarchy() - hierarchy_prediction(n, p))) <= 1e-12


def test_literal_substitution_n1():
    K, p = 0.7, 1e-9
    f = replicated_factors(1, K, p)
    assert f.x[0] == pytest.approx(math.exp(K) * p + math.exp(-K) * (1 - p), rel=1e-15)
    assert f.x_star[0] == pytest.approx(2**-0.5 * 2 * math.cosh(K))


def test_replicated_factor_validation():
    for args in ((0, 1.0, 0.1), (2, 0.0, 0.1), (2, 1.0, 1.0)):
        with pytest.raises(ValueError):
            replicated_factors(*args)


def test_nishimori_tanh_grid():
    for p in np.linspace(0.001, 0.499, 100):
        assert abs(math.tanh(nishimori_beta(p)) - (1 - 2 * p)) <= 1e-12


def test_table_has_six_rows():
    assert len(THRESHOLD_TABLE) == 6
