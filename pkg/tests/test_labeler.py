import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stepcompress.labeler import (
    bce_loss,
    hard_label,
    label_paths,
    mse_loss,
    soft_label,
)
from stepcompress.normalize import StepKey, StepKeyKind
from stepcompress.trie import PathSample, PathStep


@pytest.mark.parametrize("q,expected", [
    (0, 0),
    (1e-9, 1),
    (0.5, 1),
    (1, 1),
    (Fraction(1, 3), 1),
    (Fraction(0), 0),
])
def test_hard_label_grid(q, expected):
    assert hard_label(q) == expected


def test_soft_label_is_q_itself():
    assert soft_label(Fraction(3, 4)) == Fraction(3, 4)
    assert soft_label(0.5) == Fraction(1, 2)


def test_labels_reject_out_of_range():
    for bad in (-0.1, 1.1, Fraction(5, 4)):
        with pytest.raises(ValueError):
            hard_label(bad)
        with pytest.raises(ValueError):
            soft_label(bad)


def test_bce_known_values():
    assert bce_loss([0.5], [1.0]) == pytest.approx(math.log(2), abs=1e-12)
    assert bce_loss([0.25], [0.0]) == pytest.approx(
        -math.log(0.75), abs=1e-12
    )
    # two steps: mean of the per-step terms
    expected = (math.log(2) - math.log(0.75)) / 2
    assert bce_loss([0.5, 0.25], [1.0, 0.0]) == pytest.approx(expected, abs=1e-12)


def test_bce_endpoints_stay_finite():
    assert bce_loss([0.0], [0.0]) == pytest.approx(0.0, abs=1e-11)
    assert bce_loss([1.0], [1.0]) == pytest.approx(0.0, abs=1e-11)
    assert math.isfinite(bce_loss([0.0], [1.0]))
    assert math.isfinite(bce_loss([1.0], [0.0]))


def test_mse_known_values():
    assert mse_loss([0.25, 0.75], [0.0, 1.0]) == pytest.approx(0.0625, abs=1e-12)
    assert mse_loss([0.5], [0.5]) == 0.0
    assert mse_loss([0.0, 1.0], [1.0, 0.0]) == pytest.approx(1.0, abs=1e-12)


def test_losses_validate_shapes():
    with pytest.raises(ValueError):
        bce_loss([], [])
    with pytest.raises(ValueError):
        mse_loss([0.5], [0.5, 0.5])
    with pytest.raises(ValueError):
        bce_loss([1.5], [0.5])


@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=8))
def test_mse_of_self_is_zero(values):
    assert mse_loss(values, values) == 0.0


@given(
    st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=8),
    st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=8),
)
def test_losses_are_non_negative(predictions, targets):
    n = min(len(predictions), len(targets))
    predictions, targets = predictions[:n], targets[:n]
    assert mse_loss(predictions, targets) >= 0.0
    assert bce_loss(predictions, targets) >= 0.0


def test_label_paths_populates_both_kinds():
    key = StepKey(StepKeyKind.CODE, "assign(var0, 1)")
    paths = [
        PathSample(
            problem_id="p",
            steps=[
                PathStep(key=key, text="first", q=Fraction(3, 4)),
                PathStep(key=key, text="second", q=Fraction(0)),
            ],
            weight=2,
            solution_id="s1",
        )
    ]
    (sample,) = label_paths(paths)
    assert sample.problem_id == "p"
    assert sample.weight == 2
    assert [(s.hard, s.soft) for s in sample.steps] == [
        (1, Fraction(3, 4)),
        (0, Fraction(0)),
    ]
    assert [s.text for s in sample.steps] == ["first", "second"]
