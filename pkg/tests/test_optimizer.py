import math
import re

import numpy as np
import pytest
from pydantic import ValidationError

from config import RunConfig
from estructuras.comparator import Comparison, sf_compare
from estructuras.de_engine import StrategyId
from estructuras.problem_class import make_suite_problem
from optimizer import DEOptimizer, best_so_far, run_algorithm, run_baseline, run_ppsde
from conftest import make_individual

GENERATIONS = 30


def small_config(**overrides):
    """N_P = 20, T = 10: cada generación cuesta 40 evaluaciones."""
    values = {
        "population_size": 20,
        "top_size": 10,
        "max_fes": 20 + 40 * GENERATIONS + 5,
        "learning_period": 5,
        "seed": 1,
    }
    values.update(overrides)
    return RunConfig(**values)


@pytest.fixture
def p2():
    return make_suite_problem("P2-active-linear", 4)


class TestConfig:
    def test_generation_cost(self):
        assert small_config().generation_cost == 40

    def test_defaults_from_dimension(self):
        config = RunConfig().resolved(10)
        assert config.population_size == 50
        assert config.top_size == 25
        assert config.max_fes == 200_000
        assert config.tc == pytest.approx(0.9 * 200_000 / 100)
        assert config.generation_cost == 100

    def test_invariant_errors(self):
        with pytest.raises(ValidationError):
            RunConfig(population_size=10, top_size=12)
        with pytest.raises(ValidationError):
            RunConfig(population_size=20, max_fes=10)
        with pytest.raises(ValueError):
            RunConfig(max_fes=10).resolved(5)
        with pytest.raises(ValueError):
            RunConfig(population_size=5).resolved(2)
        with pytest.raises(ValidationError):
            RunConfig(algorithm="ga")


class TestBestSoFar:
    def test_examples(self):
        single = make_individual(4.0, 0.3)
        assert best_so_far([single]) is single

        feasible = make_individual(9.0)
        assert best_so_far([make_individual(1.0, 0.5), feasible, make_individual(0.0, 0.1)]) is feasible

        first, second = make_individual(1.0), make_individual(2.0)
        assert best_so_far([first, second]) is first

    def test_keeps_incumbent(self):
        incumbent = make_individual(0.5)
        assert best_so_far([make_individual(0.7), make_individual(0.0, 0.1)], incumbent) is incumbent
        assert best_so_far([make_individual(0.5)], incumbent) is incumbent
        better = make_individual(0.1)
        assert best_so_far([better], incumbent) is better

    def test_empty(self):
        with pytest.raises(ValueError):
            best_so_far([])


class TestMainLoop:
    def test_fes_ledger(self, p2):
        result = run_ppsde(p2, small_config())
        assert len(result.trace) == GENERATIONS
        for record in result.trace:
            assert record.fes == 20 + 2 * 20 * record.generation
        assert result.final_fes == 20 + 40 * GENERATIONS
        assert result.final_fes <= small_config().max_fes

    def test_budget_too_small_for_one_generation(self, p2):
        result = run_ppsde(p2, small_config(max_fes=59))
        assert result.trace == []
        assert result.final_fes == 20

    def test_deterministic(self, p2):
        first = run_ppsde(p2, small_config(seed=77))
        second = run_ppsde(p2, small_config(seed=77))
        assert first.trace == second.trace
        assert np.array_equal(first.best.x, second.best.x)
        other = run_ppsde(p2, small_config(seed=78))
        assert other.trace != first.trace

    def test_population_in_bounds_and_wins(self, p2):
        optimizer = DEOptimizer(p2, small_config())
        optimizer.initialize()
        for _ in range(GENERATIONS):
            record = optimizer.step()
            assert np.all(optimizer.positions >= p2.lower)
            assert np.all(optimizer.positions <= p2.upper)
            for row, individual in zip(optimizer.positions, optimizer.individuals):
                assert np.array_equal(row, individual.x)
            assert sum(record.top_wins) == 10
            assert sum(record.bottom_usage) == 10

    def test_phase_sequence_and_epsilon(self, p2):
        result = run_ppsde(p2, small_config(max_fes=20 + 40 * 80))
        phases = "".join("1" if record.phase == "push" else "2" for record in result.trace)
        assert re.fullmatch(r"1*2*", phases)
        for record in result.trace:
            if record.phase == "push":
                assert record.eps_k == math.inf
            else:
                assert 0.0 <= record.eps_k < math.inf
        if result.switch_generation is not None and result.switch_generation + 1 < len(result.trace):
            assert result.trace[result.switch_generation + 1].phase == "pull"

    def test_push_phase_elitism(self, p2):
        result = run_ppsde(p2, small_config(switch_threshold=-1.0))
        minima = [record.min_f for record in result.trace]
        assert all(later <= earlier for earlier, later in zip(minima, minima[1:]))
        assert {record.phase for record in result.trace} == {"push"}

    def test_reported_best_never_degrades(self, p2):
        result = run_ppsde(p2, small_config(max_fes=20 + 40 * 80))
        bests = [make_individual(r.best_f, r.best_phi) for r in result.trace]
        for earlier, later in zip(bests, bests[1:]):
            assert sf_compare(later, earlier) is not Comparison.SECOND_BETTER
        assert result.trace[-1].best_f == result.best.f
        assert result.trace[-1].best_phi == result.best.phi

    def test_forced_winner_drives_selection(self, p2):
        result = run_ppsde(p2, small_config(), forced_winner=StrategyId.CURRENT_TO_RAND)
        for record in result.trace:
            assert record.top_wins == (0, 0, 10)
            if record.generation - 1 >= 5:
                assert record.success_rates == (0.0, 0.0, 1.0)
                assert record.bottom_usage == (0, 0, 10)
            else:
                assert record.success_rates == pytest.approx((1 / 3, 1 / 3, 1 / 3))

    def test_vacuous_constraints_match_pure_push(self):
        """En P1 la restricción nunca se activa: cambiar de etapa no altera la búsqueda."""
        problem = make_suite_problem("P1-sphere-shifted", 4)
        config = small_config(max_fes=20 + 40 * 60)
        switching = run_ppsde(problem, config)
        push_only = run_ppsde(problem, config.model_copy(update={"switch_threshold": -1.0}))
        assert [r.best_f for r in switching.trace] == [r.best_f for r in push_only.trace]
        assert switching.best.f == push_only.best.f

    def test_bottom_sf_rule_variant(self, p2):
        result = run_ppsde(p2, small_config(bottom_rule="sf"))
        assert len(result.trace) == GENERATIONS
        assert all(sum(record.bottom_usage) == 10 for record in result.trace)


class TestBaselines:
    def test_zero_epsilon_matches_superiority_of_feasible(self, p2):
        sf = run_baseline(p2, small_config(algorithm="sf-de", seed=5))
        eps = run_baseline(p2, small_config(algorithm="eps-de", eps_zero=0.0, seed=5))

        def comparable(trace):
            return [(r.fes, r.best_f, r.best_phi, r.min_f, r.success_rates) for r in trace]

        assert comparable(sf.trace) == comparable(eps.trace)
        assert {r.phase for r in sf.trace} == {"sf"}
        assert {r.phase for r in eps.trace} == {"pull"}
        assert all(r.eps_k == 0.0 for r in eps.trace)

    def test_eps_de_schedule_from_start(self, p2):
        result = run_baseline(p2, small_config(algorithm="eps-de"))
        levels = [record.eps_k for record in result.trace]
        assert all(math.isfinite(level) and level >= 0.0 for level in levels)
        assert levels[0] >= levels[-1]

    def test_rejects_pps(self, p2):
        with pytest.raises(ValueError):
            run_baseline(p2, small_config(algorithm="pps-de"))

    def test_dispatch(self, p2):
        result = run_algorithm(p2, small_config(algorithm="sf-de"))
        assert result.algorithm == "sf-de"
        assert result.switch_generation is None
        assert run_algorithm(p2, small_config()).algorithm == "pps-de"
