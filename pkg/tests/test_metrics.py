"""Forecast-error and selection-rate arithmetic."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from predlasso import LengthMismatch, NonFiniteValue, mpae, mpse, selection_rates


def test_mpse_values():
    assert mpse([1.0], [-1.0]) == 4.0
    assert mpse([3.0], [0.0]) == 9.0
    assert mpse([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert mpse([0.0, 0.0], [1.0, 3.0]) == 5.0


def test_mpae_values():
    assert mpae([0.0, 0.0], [2.0, -4.0]) == 3.0
    assert mpae([1.5], [1.5]) == 0.0


def test_error_inputs():
    with pytest.raises(LengthMismatch):
        mpse([1.0, 2.0], [1.0])
    with pytest.raises(LengthMismatch):
        mpse([], [])
    with pytest.raises(NonFiniteValue):
        mpse([np.nan], [0.0])
    with pytest.raises(NonFiniteValue):
        mpae([0.0], [np.inf])


def test_selection_rates_basic():
    r = selection_rates({0, 1}, {0, 2}, p=4)
    assert r == (0.5, 0.5, 0.5)
    assert selection_rates({0, 1}, {0, 1}, p=4) == (1.0, 1.0, 1.0)
    # estimate is exactly the complement: nothing is called right
    assert selection_rates({0, 1}, {2, 3}, p=4) == (0.0, 0.0, 0.0)


def test_selection_rates_empty_conventions():
    assert selection_rates(set(), {0}, p=2) == (0.5, 1.0, 0.5)
    assert selection_rates(set(), set(), p=2) == (1.0, 1.0, 1.0)
    full = selection_rates({0, 1}, {0, 1}, p=2)
    assert full.sr2 == 1.0  # empty inactive side counts as recovered


def test_selection_rates_index_validation():
    with pytest.raises(ValueError):
        selection_rates({0, 4}, {0}, p=4)
    with pytest.raises(ValueError):
        selection_rates({0}, {-1}, p=4)


subset = st.sets(st.integers(min_value=0, max_value=9), max_size=10)


@given(subset, subset)
def test_selection_rate_identity(truth, est):
    p = 10
    r = selection_rates(truth, est, p)
    assert 0.0 <= min(r) and max(r) <= 1.0
    k = len(truth)
    # p * sr decomposes exactly over the active and inactive sides
    assert p * r.sr == pytest.approx(k * r.sr1 + (p - k) * r.sr2, abs=1e-12)


def test_accepts_lists_and_tuples():
    assert selection_rates([1, 0], (0, 1), p=3) == (1.0, 1.0, 1.0)
