import math

import numpy as np
import pytest

from estructuras.problem_class import (
    SUITE_IDS,
    EvaluationError,
    Problem,
    evaluate,
    is_feasible,
    make_suite_problem,
    overall_violation,
    resolve_suite_id,
)
from conftest import make_individual


def constraint_problem(g_values=(), h_values=(), sigma=1e-4):
    """Problema cuyas restricciones devuelven valores fijos."""
    return Problem(
        2,
        -1.0,
        1.0,
        objective=lambda x: float(np.sum(x)),
        inequalities=[lambda x, v=v: v for v in g_values],
        equalities=[lambda x, v=v: v for v in h_values],
        sigma=sigma,
    )


def test_phi_examples():
    e1 = evaluate(constraint_problem(g_values=(0.5, -1.0)), np.zeros(2))
    assert e1.phi == 0.5

    e2 = evaluate(constraint_problem(g_values=(-2.0,), h_values=(2e-4,)), np.zeros(2))
    assert e2.phi == pytest.approx(1e-4, abs=1e-18)
    assert not is_feasible(e2)

    e3 = evaluate(constraint_problem(g_values=(-1.0,), h_values=(5e-5,)), np.zeros(2))
    assert e3.phi == 0.0
    assert is_feasible(e3)
    assert e3.feasible


def test_is_feasible_strict():
    assert is_feasible(make_individual(1.0, phi=0.0).evaluation)
    assert not is_feasible(make_individual(1.0, phi=1e-12).evaluation)
    assert not is_feasible(make_individual(1.0, phi=3.2).evaluation)


def test_phi_matches_recomputation(rng):
    """phi de evaluate coincide exactamente con el recálculo desde g y h."""
    problem = make_suite_problem("P4-disconnected", 6)
    equality = make_suite_problem("P3-equality", 6)
    for _ in range(200):
        x = rng.uniform(-5, 5, 6)
        for p in (problem, equality):
            e = p.evaluate(x)
            assert e.phi == overall_violation(e.g_values, e.h_values, p.sigma)
            assert e.phi >= 0.0
            feasible = all(g <= 0 for g in e.g_values) and all(
                abs(h) <= p.sigma for h in e.h_values
            )
            assert (e.phi == 0.0) == feasible


def test_satisfied_constraint_does_not_change_phi():
    base = overall_violation((0.3, 1.2), (0.5,))
    assert overall_violation((0.3, 1.2, -4.0), (0.5,)) == base
    assert overall_violation((0.3, 1.2), (0.5, 5e-5)) == base


def test_phi_monotone_in_g():
    previous = overall_violation((0.0, -1.0), ())
    for value in (0.1, 0.5, 2.0, 10.0):
        current = overall_violation((value, -1.0), ())
        assert current > previous
        previous = current


def test_non_finite_values_raise_with_index():
    problem = constraint_problem(g_values=(-1.0, math.nan))
    with pytest.raises(EvaluationError) as info:
        problem.evaluate(np.zeros(2))
    assert info.value.kind == "inequality"
    assert info.value.index == 1

    equality = constraint_problem(h_values=(math.inf,))
    with pytest.raises(EvaluationError) as info:
        equality.evaluate(np.zeros(2))
    assert info.value.kind == "equality"
    assert info.value.index == 0

    objective = Problem(2, -1, 1, objective=lambda x: math.nan)
    with pytest.raises(EvaluationError) as info:
        objective.evaluate(np.zeros(2))
    assert info.value.kind == "objective"
    assert info.value.index is None


def test_evaluate_preconditions():
    problem = constraint_problem()
    with pytest.raises(ValueError):
        problem.evaluate(np.zeros(3))
    with pytest.raises(ValueError):
        problem.evaluate(np.array([2.0, 0.0]))


def test_problem_validation():
    with pytest.raises(ValueError):
        Problem(2, [0.0, 1.0], [1.0, 1.0], objective=lambda x: 0.0)
    with pytest.raises(ValueError):
        Problem(2, -1, 1, objective=lambda x: 0.0, sigma=-1e-3)
    with pytest.raises(ValueError):
        Problem(0, -1, 1, objective=lambda x: 0.0)

    problem = Problem(3, -1, 1, objective=lambda x: 0.0)
    assert problem.sigma == 1e-4
    assert problem.inequalities == () and problem.equalities == ()
    assert problem.evaluate(np.zeros(3)).phi == 0.0


@pytest.mark.parametrize("suite_id", SUITE_IDS)
@pytest.mark.parametrize("dim", [2, 5, 10, 30])
def test_suite_optimum_is_feasible(suite_id, dim):
    problem = make_suite_problem(suite_id, dim)
    e = problem.evaluate(problem.optimum_x)
    assert e.phi == 0.0
    assert e.f == pytest.approx(problem.known_optimum, abs=1e-12)


def test_suite_examples():
    p1 = make_suite_problem("P1-sphere-shifted", 10)
    assert p1.known_optimum == 0.0
    assert np.all(p1.lower == -5.0) and np.all(p1.upper == 5.0)
    assert p1.evaluate(np.full(10, 0.5)).f == 0.0

    p2 = make_suite_problem("P2", 10)
    assert p2.known_optimum == pytest.approx(0.1)
    # fuera del semiespacio sum(x) >= 1
    assert p2.evaluate(np.zeros(10)).phi == 1.0

    p4 = make_suite_problem("P4-disconnected", 10)
    # banda infactible entre las dos islas
    assert p4.evaluate(np.full(10, 1.0)).phi == pytest.approx(0.5)
    assert p4.evaluate(np.full(10, 0.2)).phi == 0.0
    assert p4.evaluate(np.full(10, 0.2)).f == pytest.approx(10 * 1.8**2)


def test_suite_errors():
    with pytest.raises(ValueError):
        make_suite_problem("P9-unknown", 10)
    with pytest.raises(ValueError):
        make_suite_problem("P1-sphere-shifted", 1)
    assert resolve_suite_id("p3") == "P3-equality"
