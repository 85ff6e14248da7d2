"""
Evaluation, folding and differentiation.

Derivatives are checked against central finite differences at seeded random
points, so every rule in the differentiator is exercised numerically.
"""

import math

import numpy as np
import pytest

from exprs import (
    ExprDomainError,
    Num,
    UnboundVariable,
    diff,
    evaluate,
    fold,
    parse,
)


def test_evaluate_uses_environment():
    assert evaluate(parse("x1^2 + sin(y1)"), {"x1": 2.0, "y1": 0.0}) == pytest.approx(4.0)


def test_unbound_variable():
    with pytest.raises(UnboundVariable) as err:
        evaluate(parse("x1 + y2"), {"x1": 1.0})
    assert err.value.name == "y2"


@pytest.mark.parametrize(
    "text, env",
    [
        ("1/x1", {"x1": 0.0}),
        ("ln(x1)", {"x1": -1.0}),
        ("sqrt(x1)", {"x1": -4.0}),
        ("x1^0.5", {"x1": -2.0}),
        ("exp(x1)", {"x1": 1e4}),
        ("x1*x1", {"x1": 1e200}),
        ("sin(x1*x1)", {"x1": 1e200}),
        ("cos(-x1*x1)", {"x1": 1e200}),
    ],
)
def test_domain_errors_are_never_silent(text, env):
    with pytest.raises(ExprDomainError):
        evaluate(parse(text), env)


def test_fold_literal_subtrees():
    assert fold(parse("2*3 + x1")) == fold(parse("6 + x1"))
    assert fold(parse("-(-x1)")) == parse("x1")
    assert fold(parse("-(2)")) == Num(-2.0)


def test_fold_keeps_failing_literals():
    tree = fold(parse("1/0"))
    with pytest.raises(ExprDomainError):
        evaluate(tree, {})


def test_fold_does_not_simplify_symbols():
    assert fold(parse("x1 - x1")) == parse("x1 - x1")


def test_diff_power():
    assert diff(parse("x1^2"), "x1") == parse("2*x1")


def test_diff_product_drops_constant_factor():
    assert diff(parse("sin(x1)*x2"), "x2") == parse("sin(x1)")


def test_diff_of_unrelated_variable_is_zero():
    assert diff(parse("exp(y1)*cos(y2)"), "x1") == Num(0.0)


_CASES = [
    "x1^3 - 2*x1*y1",
    "sin(x1)*cos(y2) + exp(-y1^2)",
    "ln(2 + x1^2) / (3 + y1^2)",
    "sqrt(4 + x1*y1)",
    "(2 + x1^2)^(1 + y1^2)",
    "2^(x1 - y2)",
    "-(y1 - x1)^2 * z",
]


@pytest.mark.parametrize("text", _CASES)
def test_diff_matches_central_differences(text):
    tree = parse(text)
    rng = np.random.default_rng(7)
    names = ["x1", "y1", "y2", "z"]
    h = 1e-6
    for _ in range(100):
        env = dict(zip(names, rng.uniform(-1.0, 1.0, size=len(names))))
        for var in names:
            derivative = evaluate(diff(tree, var), env)
            up, down = dict(env), dict(env)
            up[var] += h
            down[var] -= h
            estimate = (evaluate(tree, up) - evaluate(tree, down)) / (2 * h)
            assert math.isclose(derivative, estimate, rel_tol=1e-6, abs_tol=1e-6)


def test_right_associative_power_value():
    assert evaluate(parse("x1^2^3"), {"x1": 2.0}) == 256.0


def test_sin_product_value():
    assert evaluate(parse("sin(x1)*x2"), {"x1": math.pi / 2, "x2": 3.0}) == pytest.approx(3.0)


def test_self_division_at_zero():
    with pytest.raises(ExprDomainError):
        evaluate(parse("x1/x1"), {"x1": 0.0})


def test_exp_ln_inverse_pair():
    assert evaluate(parse("exp(ln(x1))"), {"x1": 2.5}) == pytest.approx(2.5, abs=1e-12)


def test_finite_difference_oracle_on_mixed_expression():
    tree = parse("exp(x1)*cos(x2)+x1*x2^3")
    rng = np.random.default_rng(0)
    h = 1e-6
    for _ in range(100):
        env = {"x1": rng.uniform(-1, 1), "x2": rng.uniform(-1, 1)}
        for var in env:
            up, down = dict(env), dict(env)
            up[var] += h
            down[var] -= h
            estimate = (evaluate(tree, up) - evaluate(tree, down)) / (2 * h)
            value = evaluate(diff(tree, var), env)
            assert abs(value - estimate) <= max(1e-6, 1e-6 * abs(value))
