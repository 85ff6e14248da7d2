"""Coefficient tensor storage and spec validation."""

import numpy as np
import pytest

from algebroid import AlgebroidSpec, CoeffTensor, EvaluationError, FiberSplit, ShapeMismatch
from exprs import Num, parse


def test_canonical_storage_flips_lower_pairs():
    t = CoeffTensor.build((3, 3, 3), {(2, 0, 1): 1}, antisymmetric=True)
    assert t.entries == {(0, 2, 1): Num(-1.0)}
    assert t.entry(2, 0, 1) == Num(1.0)


def test_literal_zero_entries_are_dropped():
    t = CoeffTensor.build((2, 2, 2), {(0, 1, 0): "2 - 2"}, antisymmetric=True)
    assert t.is_zero


def test_symbolic_zero_is_kept():
    t = CoeffTensor.build((2, 2, 2), {(0, 1, 0): "x1 - x1"}, antisymmetric=True)
    assert not t.is_zero


def test_duplicate_after_canonicalisation():
    with pytest.raises(ShapeMismatch):
        CoeffTensor.build((2, 2, 2), {(0, 1, 0): 1, (1, 0, 0): -1}, antisymmetric=True)


def test_out_of_range_index():
    with pytest.raises(ShapeMismatch):
        CoeffTensor.build((2, 2, 2), {(0, 2, 0): 1}, antisymmetric=True)


def test_dense_import_keeps_both_orientations():
    t = CoeffTensor.build(
        (3, 3, 3), {(0, 1, 2): 1.0, (1, 0, 2): -0.999}, antisymmetric=True, canonical=False
    )
    dense = t.at(np.zeros(0))
    assert dense[0, 1, 2] == 1.0
    assert dense[1, 0, 2] == -0.999


def test_structure_may_only_use_base_coordinates():
    with pytest.raises(ShapeMismatch):
        AlgebroidSpec.build(1, 2, {(0, 0): 1}, {(0, 1, 0): "y1"})


def test_anchor_shape_checked():
    with pytest.raises(ShapeMismatch):
        AlgebroidSpec.build(2, 2, [[1, 0]])


def test_evaluation_error_names_the_entry():
    spec = AlgebroidSpec.build(1, 2, {(0, 0): 1}, {(0, 1, 0): "ln(x1)"})
    with pytest.raises(EvaluationError, match=r"structure\[1\]\[2\]\[1\]"):
        spec.structure_at(np.array([-1.0]))


def test_gradient_of_structure():
    spec = AlgebroidSpec.build(2, 2, {(0, 0): 1, (1, 1): 1}, {(0, 1, 1): parse("x1*x2")})
    grad = spec.structure.gradient_at(np.array([2.0, 3.0]))
    assert grad[0, 0, 1, 1] == pytest.approx(3.0)
    assert grad[1, 1, 0, 1] == pytest.approx(-2.0)


@pytest.mark.parametrize("p, k", [(0, 3), (3, 3), (4, 3)])
def test_split_bounds(p, k):
    with pytest.raises(ShapeMismatch):
        FiberSplit(p, k)
