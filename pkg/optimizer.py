"""
Bucle principal de PPS-DE y las dos líneas base de ablación (SF-DE y epsilon-DE).
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from config import RunConfig
from estructuras.comparator import (
    OBJECTIVE,
    RULE_PULL,
    RULE_PUSH,
    RULE_SF,
    Comparison,
    replacement_decision,
    sf_compare,
    sort_sf,
    strictly_better,
)
from estructuras.de_engine import (
    STRATEGIES,
    ParameterMemory,
    StrategyId,
    StrategyStats,
    generate_trial,
)
from estructuras.pps_controller import EpsilonSchedule, Phase, SwitchState
from estructuras.problem_class import Individual

logger = logging.getLogger(__name__)

PHASE_SF = "sf"


@dataclass
class TraceRecord:
    """Estado observable al final de una generación completa."""

    generation: int
    fes: int
    best_f: float
    best_phi: float
    phase: str
    eps_k: float
    success_rates: tuple
    min_f: float = math.nan
    feasible_ratio: float = 0.0
    top_wins: tuple = (0, 0, 0)
    bottom_usage: tuple = (0, 0, 0)


@dataclass
class RunResult:
    best: Individual
    trace: List[TraceRecord] = field(default_factory=list)
    final_fes: int = 0
    wall_time: float = 0.0
    switch_generation: Optional[int] = None
    algorithm: str = "pps-de"
    seed: int = 0


def best_so_far(population, incumbent=None):
    """
    Mejor individuo según SF en la población, comparado con el mejor histórico.

    Args:
        population: Secuencia de individuos evaluados
        incumbent: Mejor histórico (opcional)

    Returns:
        Individual: El mejor; en empate se conserva el histórico
    """
    if not population:
        if incumbent is None:
            raise ValueError("La población está vacía")
        return incumbent
    best = population[sort_sf(population)[0]]
    if incumbent is not None and sf_compare(best, incumbent) is not Comparison.FIRST_BETTER:
        return incumbent
    return best


class DEOptimizer:
    """
    Ejecuta PPS-DE o una de sus líneas base sobre un problema.

    La población se ordena por SF y se divide en la subpoblación superior (T
    individuos, tres vectores de prueba cada uno) y la inferior (un vector de prueba
    por individuo con la estrategia elegida por tasa de éxito).
    """

    def __init__(self, problem, config: RunConfig, forced_winner=None):
        """
        Args:
            problem: Problem a minimizar
            config: RunConfig (se resuelve con la dimensión del problema)
            forced_winner: Estrategia que gana siempre en la subpoblación superior
                (gancho de pruebas para la adaptación de estrategias)
        """
        self.problem = problem
        self.config = config.resolved(problem.dim)
        self.forced_winner = None if forced_winner is None else StrategyId(forced_winner)
        self.algorithm = self.config.algorithm

        self.rng = np.random.default_rng(self.config.seed)
        self.memory = ParameterMemory(self.config.memory_size)
        self.stats = StrategyStats(self.config.learning_period)
        self.schedule = EpsilonSchedule(
            tc=self.config.tc,
            tau=self.config.tau,
            alpha=self.config.alpha,
            cp=self.config.cp,
            theta=self.config.theta,
        )
        self.switch = SwitchState(
            learning_period=self.config.learning_period,
            threshold=self.config.switch_threshold,
            delta=self.config.delta,
            schedule=self.schedule,
        )

        self.positions = None
        self.individuals = []
        self.fes = 0
        self.generation = 0
        self.best = None
        self.trace = []

    # ---- estado de la población -------------------------------------------------

    def _evaluate(self, x):
        return Individual(x=x, evaluation=self.problem.evaluate(x))

    def initialize(self):
        """Población uniforme dentro de las cotas; FES = N_P."""
        size = self.config.population_size
        self.positions = self.rng.uniform(
            self.problem.lower, self.problem.upper, (size, self.problem.dim)
        )
        self.individuals = [self._evaluate(x.copy()) for x in self.positions]
        self.fes = size
        self.best = best_so_far(self.individuals)

        if self.algorithm == "eps-de":
            phis = [ind.phi for ind in self.individuals]
            self.schedule.start(phis=phis, eps_0=self.config.eps_zero)

    def feasible_ratio(self):
        return sum(ind.feasible for ind in self.individuals) / len(self.individuals)

    @property
    def phase(self):
        if self.algorithm == "pps-de":
            return self.switch.phase.value
        if self.algorithm == "eps-de":
            return Phase.PULL.value
        return PHASE_SF

    def _current_epsilon(self):
        """epsilon(G); +inf durante la etapa push, 0 para SF."""
        if self.algorithm == "sf-de":
            return 0.0
        if self.algorithm == "eps-de":
            k = self.generation
        else:
            k = self.switch.pull_generations(self.generation)
            if k is None:
                return math.inf
        return self.schedule.level(k, self.feasible_ratio())

    def _rule(self, bottom=False):
        if self.algorithm == "sf-de":
            return RULE_SF
        if bottom and self.config.bottom_rule == "sf":
            return RULE_SF
        if self.algorithm == "eps-de" or self.switch.phase is Phase.PULL:
            return RULE_PULL
        return RULE_PUSH

    # ---- generación --------------------------------------------------------------

    def _make_trial(self, strategy, target_index, sf_order):
        f, cr = self.memory.sample_parameters(strategy, self.rng)
        x = generate_trial(
            strategy,
            self.positions,
            target_index,
            f,
            cr,
            self.rng,
            self.problem,
            self.config.p_fraction,
            sf_order,
        )
        return self._evaluate(x), f, cr

    def step(self):
        """Ejecuta una generación completa del algoritmo."""
        self.memory.start_generation()
        phase = self.phase
        eps = self._current_epsilon()

        sf_order = sort_sf(self.individuals)
        top = sf_order[: self.config.top_size]
        bottom = sf_order[self.config.top_size :]
        top_rule = self._rule()
        bottom_rule = self._rule(bottom=True)

        # Subpoblación superior: tres vectores de prueba por objetivo
        offspring = {}
        wins = {strategy: 0 for strategy in STRATEGIES}
        for target_index in top:
            trials = [
                (strategy, *self._make_trial(strategy, target_index, sf_order))
                for strategy in STRATEGIES
            ]
            self.fes += len(STRATEGIES)
            chosen = trials[0]
            for candidate in trials[1:]:
                if strictly_better(top_rule, candidate[1], chosen[1], eps):
                    chosen = candidate
            if self.forced_winner is not None:
                chosen = next(t for t in trials if t[0] is self.forced_winner)
            wins[chosen[0]] += 1
            offspring[target_index] = (chosen, top_rule)

        self.stats.record_generation(wins)
        rates = self.stats.success_rates(self.generation)

        # Subpoblación inferior: una estrategia elegida por SR_j
        usage = {strategy: 0 for strategy in STRATEGIES}
        for target_index in bottom:
            strategy = self.stats.select_strategy(self.generation, self.rng)
            usage[strategy] += 1
            trial, f, cr = self._make_trial(strategy, target_index, sf_order)
            self.fes += 1
            offspring[target_index] = ((strategy, trial, f, cr), bottom_rule)

        self._replace(offspring, eps)
        self.memory.update_all()

        self.best = best_so_far(self.individuals, self.best)
        min_f = min(ind.f for ind in self.individuals)
        self.switch.update_rate(self.generation, min_f)
        if self.algorithm == "pps-de":
            self.switch.should_switch([ind.phi for ind in self.individuals])

        self.generation += 1
        record = TraceRecord(
            generation=self.generation,
            fes=self.fes,
            best_f=self.best.f,
            best_phi=self.best.phi,
            phase=phase,
            eps_k=eps,
            success_rates=tuple(float(rate) for rate in rates),
            min_f=min_f,
            feasible_ratio=self.feasible_ratio(),
            top_wins=tuple(wins[s] for s in STRATEGIES),
            bottom_usage=tuple(usage[s] for s in STRATEGIES),
        )
        self.trace.append(record)
        logger.debug(
            "G=%d FES=%d best_f=%.6e best_phi=%.3e fase=%s eps=%.3e",
            record.generation,
            record.fes,
            record.best_f,
            record.best_phi,
            record.phase,
            record.eps_k,
        )
        return record

    def _replace(self, offspring, eps):
        """Reemplazo uno a uno de cada padre por su vector de prueba elegido."""
        for target_index in sorted(offspring):
            (strategy, trial, f, cr), rule = offspring[target_index]
            parent = self.individuals[target_index]
            accepted, criterion = replacement_decision(rule, parent, trial, eps)
            if not accepted:
                continue
            if criterion == OBJECTIVE:
                delta = abs(parent.f - trial.f)
            else:
                delta = abs(parent.phi - trial.phi)
            self.memory.record_success(strategy, f, cr, delta)
            self.individuals[target_index] = trial
            self.positions[target_index] = trial.x

    def run(self):
        """
        Ejecuta generaciones completas mientras su costo quepa en MaxFES.

        Returns:
            RunResult: Mejor individuo histórico, traza y contadores
        """
        start = time.perf_counter()
        self.initialize()
        cost = self.config.generation_cost
        while self.fes + cost <= self.config.max_fes:
            self.step()
        wall_time = time.perf_counter() - start
        logger.info(
            "%s en %s: %d generaciones, FES=%d, best_f=%.6e, best_phi=%.3e",
            self.algorithm,
            self.problem.name,
            self.generation,
            self.fes,
            self.best.f,
            self.best.phi,
        )
        return RunResult(
            best=self.best,
            trace=self.trace,
            final_fes=self.fes,
            wall_time=wall_time,
            switch_generation=self.switch.switch_generation,
            algorithm=self.algorithm,
            seed=self.config.seed,
        )


def run_ppsde(problem, config: RunConfig, forced_winner=None):
    """Ejecuta PPS-DE (config.algorithm se fuerza a 'pps-de')."""
    config = config.model_copy(update={"algorithm": "pps-de"})
    return DEOptimizer(problem, config, forced_winner=forced_winner).run()


def run_baseline(problem, config: RunConfig):
    """
    Ejecuta una línea base de ablación.

    - sf-de: SF para la selección del mejor vector de prueba y el reemplazo.
    - eps-de: búsqueda pull con calendario epsilon desde la generación 0.
    """
    if config.algorithm not in ("sf-de", "eps-de"):
        raise ValueError(f"Línea base desconocida: '{config.algorithm}' (use sf-de o eps-de)")
    return DEOptimizer(problem, config).run()


def run_algorithm(problem, config: RunConfig):
    """Despacha según config.algorithm."""
    if config.algorithm == "pps-de":
        return run_ppsde(problem, config)
    return run_baseline(problem, config)
