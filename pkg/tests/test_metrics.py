import math
from decimal import Decimal, getcontext

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fusedetect.errors import EmptyError, LengthError
from fusedetect.metrics import ConfusionMatrix, accuracy, confusion, mcc


def mcc_exact(tp, tn, fp, fn):
    """High-precision oracle: integer products, Decimal square root."""
    getcontext().prec = 50
    denom2 = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom2 == 0:
        return 0.0
    num = Decimal(tp * tn - fp * fn)
    return float(num / Decimal(denom2).sqrt())


def test_confusion_basic():
    c = confusion([1, 0], [1, 0])
    assert (c.tp, c.tn, c.fp, c.fn) == (1, 1, 0, 0)
    c = confusion([1, 0], [0, 1])
    assert (c.tp, c.tn, c.fp, c.fn) == (0, 0, 1, 1)


def test_confusion_matches_tally_oracle(rng):
    y = rng.integers(0, 2, size=1000)
    p = rng.integers(0, 2, size=1000)
    c = confusion(y, p)
    tally = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    for yi, pi in zip(y, p):
        if yi == 1 and pi == 1:
            tally["tp"] += 1
        elif yi == 0 and pi == 0:
            tally["tn"] += 1
        elif yi == 0 and pi == 1:
            tally["fp"] += 1
        else:
            tally["fn"] += 1
    assert (c.tp, c.tn, c.fp, c.fn) == (
        tally["tp"],
        tally["tn"],
        tally["fp"],
        tally["fn"],
    )
    assert c.total == 1000


def test_confusion_errors():
    with pytest.raises(LengthError):
        confusion([1, 0], [1])
    with pytest.raises(EmptyError):
        confusion([], [])
    with pytest.raises(ValueError):
        confusion([1, 2], [1, 0])


def test_confusion_matrix_validation():
    with pytest.raises(ValueError):
        ConfusionMatrix(tp=-1, tn=1, fp=0, fn=0)
    with pytest.raises(ValueError):
        ConfusionMatrix(tp=0, tn=0, fp=0, fn=0)


def test_accuracy_values():
    assert accuracy(ConfusionMatrix(5, 5, 0, 0)) == 1.0
    assert accuracy(ConfusionMatrix(4, 3, 2, 1)) == 0.7
    assert accuracy(ConfusionMatrix(0, 0, 3, 7)) == 0.0


def test_mcc_worked_case():
    got = mcc(ConfusionMatrix(4, 3, 2, 1))
    assert abs(got - 10 / math.sqrt(600)) < 1e-15
    assert abs(got - 0.40825) < 1e-5


def test_mcc_perfect_and_inverted():
    assert mcc(ConfusionMatrix(5, 5, 0, 0)) == 1.0
    assert mcc(ConfusionMatrix(0, 0, 5, 5)) == -1.0


def test_mcc_degenerate_predictor():
    # every prediction positive on balanced labels
    assert mcc(ConfusionMatrix(tp=5, tn=0, fp=5, fn=0)) == 0.0
    assert mcc(ConfusionMatrix(tp=0, tn=5, fp=0, fn=5)) == 0.0


def test_mcc_matches_exact_oracle_battery(rng):
    counts = rng.integers(0, 10_000, size=(10_000, 4))
    counts[(counts.sum(axis=1) == 0), 0] = 1
    for tp, tn, fp, fn in counts:
        got = mcc(ConfusionMatrix(int(tp), int(tn), int(fp), int(fn)))
        assert abs(got - mcc_exact(int(tp), int(tn), int(fp), int(fn))) < 1e-12


def test_mcc_huge_counts_no_overflow():
    c = ConfusionMatrix(tp=10**9, tn=10**9, fp=1, fn=1)
    got = mcc(c)
    assert abs(got - mcc_exact(10**9, 10**9, 1, 1)) < 1e-12


@given(
    st.integers(min_value=0, max_value=500),
    st.integers(min_value=0, max_value=500),
    st.integers(min_value=0, max_value=500),
    st.integers(min_value=0, max_value=500),
)
def test_mcc_class_swap_symmetry(tp, tn, fp, fn):
    if tp + tn + fp + fn == 0:
        tp = 1
    a = mcc(ConfusionMatrix(tp, tn, fp, fn))
    # swapping the meaning of the classes swaps tp<->tn and fp<->fn
    b = mcc(ConfusionMatrix(tn, tp, fn, fp))
    assert math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-12)
    assert -1.0 <= a <= 1.0


def test_mcc_bounded(rng):
    for _ in range(200):
        tp, tn, fp, fn = (int(v) for v in rng.integers(0, 100, size=4))
        if tp + tn + fp + fn == 0:
            tp = 1
        assert -1.0 <= mcc(ConfusionMatrix(tp, tn, fp, fn)) <= 1.0
