"""
Motor de evolución diferencial: tres estrategias de generación de vectores de prueba,
reparación de cotas, adaptación de estrategias por tasa de éxito y memorias
históricas de F y CR estilo LSHADE44.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

DEFAULT_MEMORY_SIZE = 5
PARAMETER_SCALE = 0.1


class StrategyId(str, Enum):
    RAND_1_BIN = "rand-1-bin"
    CURRENT_TO_PBEST = "current-to-pbest-1"
    CURRENT_TO_RAND = "current-to-rand-1"


STRATEGIES = (StrategyId.RAND_1_BIN, StrategyId.CURRENT_TO_PBEST, StrategyId.CURRENT_TO_RAND)
MIN_POPULATION = 4


def sample_scale_factor(location, rng, scale=PARAMETER_SCALE):
    """F ~ Cauchy(location, scale); se regenera mientras F <= 0 y se trunca a 1."""
    f = location + scale * rng.standard_cauchy()
    while f <= 0.0:
        f = location + scale * rng.standard_cauchy()
    return min(float(f), 1.0)


def sample_crossover_rate(location, rng, scale=PARAMETER_SCALE):
    """CR ~ Normal(location, scale) truncado en [0, 1]."""
    return float(min(max(rng.normal(location, scale), 0.0), 1.0))


def success_weights(delta_func):
    """
    Pesos w_t = delta_t / sum(delta). Si todos los deltas son cero se usan pesos
    uniformes (un reemplazo por empate también indica un parámetro útil).
    """
    deltas = np.asarray(delta_func, dtype=float)
    total = deltas.sum()
    if total <= 0.0:
        return np.full(len(deltas), 1.0 / len(deltas))
    return deltas / total


def weighted_lehmer_mean(values, weights):
    values = np.asarray(values, dtype=float)
    return float(np.sum(weights * values**2) / np.sum(weights * values))


def weighted_arithmetic_mean(values, weights):
    return float(np.sum(weights * np.asarray(values, dtype=float)))


@dataclass
class StrategyMemory:
    """Memoria histórica de una estrategia y sus éxitos de la generación actual."""

    m_f: np.ndarray
    m_cr: np.ndarray
    write_pointer: int = 0
    s_f: list = field(default_factory=list)
    s_cr: list = field(default_factory=list)
    delta_func: list = field(default_factory=list)

    def clear_successes(self):
        self.s_f.clear()
        self.s_cr.clear()
        self.delta_func.clear()


class ParameterMemory:
    """
    Tres pares de memorias M_F y M_CR (uno por estrategia) con puntero circular.
    Las celdas se inicializan en 0.5.
    """

    def __init__(self, memory_size=DEFAULT_MEMORY_SIZE, strategies=STRATEGIES):
        if memory_size < 1:
            raise ValueError(f"El tamaño de memoria H debe ser >= 1: {memory_size}")
        self.memory_size = memory_size
        self.memories = {
            strategy: StrategyMemory(
                m_f=np.full(memory_size, 0.5), m_cr=np.full(memory_size, 0.5)
            )
            for strategy in strategies
        }

    def __getitem__(self, strategy):
        return self.memories[StrategyId(strategy)]

    def start_generation(self):
        for memory in self.memories.values():
            memory.clear_successes()

    def sample_parameters(self, strategy, rng):
        """
        Muestra (F, CR) desde una celda aleatoria de la memoria de la estrategia.

        Args:
            strategy: StrategyId
            rng: numpy.random.Generator

        Returns:
            tuple: (F, CR) con F en (0, 1] y CR en [0, 1]
        """
        memory = self[strategy]
        k = int(rng.integers(self.memory_size))
        f = sample_scale_factor(memory.m_f[k], rng)
        cr = sample_crossover_rate(memory.m_cr[k], rng)
        return f, cr

    def record_success(self, strategy, f, cr, delta):
        """Guarda los parámetros de un reemplazo exitoso y la magnitud de la mejora."""
        if delta < 0:
            raise ValueError(f"La mejora delta debe ser no negativa: {delta}")
        memory = self[strategy]
        memory.s_f.append(float(f))
        memory.s_cr.append(float(cr))
        memory.delta_func.append(float(delta))

    def update_memory(self, strategy):
        """
        Actualiza la celda apuntada con la media de Lehmer ponderada de S_F y la media
        aritmética ponderada de S_CR; avanza el puntero y vacía los conjuntos.

        Returns:
            bool: True si la memoria cambió
        """
        memory = self[strategy]
        changed = False
        if memory.s_f:
            weights = success_weights(memory.delta_func)
            memory.m_f[memory.write_pointer] = weighted_lehmer_mean(memory.s_f, weights)
            changed = True
        if memory.s_cr:
            weights = success_weights(memory.delta_func)
            memory.m_cr[memory.write_pointer] = weighted_arithmetic_mean(memory.s_cr, weights)
            changed = True
        if changed:
            memory.write_pointer = (memory.write_pointer + 1) % self.memory_size
        memory.clear_successes()
        return changed

    def update_all(self):
        for strategy in self.memories:
            self.update_memory(strategy)


class StrategyStats:
    """
    Victorias por estrategia en una ventana deslizante de L_p generaciones y las
    tasas de éxito SR_j = NW_j / (NW_1 + NW_2 + NW_3).
    """

    def __init__(self, learning_period=25, strategies=STRATEGIES):
        if learning_period < 1:
            raise ValueError(f"El periodo de aprendizaje debe ser >= 1: {learning_period}")
        self.learning_period = learning_period
        self.strategies = tuple(strategies)
        self.win_window = deque(maxlen=learning_period)

    def record_generation(self, wins):
        """
        Args:
            wins: Diccionario StrategyId -> victorias en la generación
        """
        self.win_window.append(np.array([wins.get(s, 0) for s in self.strategies], dtype=int))

    @property
    def windowed_wins(self):
        if not self.win_window:
            return np.zeros(len(self.strategies), dtype=int)
        return np.sum(self.win_window, axis=0)

    def success_rates(self, generation):
        """Tasas de éxito; uniformes mientras generation < L_p o sin victorias."""
        totals = self.windowed_wins
        if generation < self.learning_period or totals.sum() == 0:
            return np.full(len(self.strategies), 1.0 / len(self.strategies))
        return totals / totals.sum()

    def select_strategy(self, generation, rng):
        """Selección por ruleta según SR_j (uniforme durante el calentamiento)."""
        rates = self.success_rates(generation)
        index = int(rng.choice(len(self.strategies), p=rates))
        return self.strategies[index]


def pbest_pool_size(population_size, p_fraction):
    """max(1, round(p·N)) con redondeo hacia arriba en .5"""
    return max(1, int(math.floor(p_fraction * population_size + 0.5)))


def repair_bounds(candidate, parent, problem):
    """
    Reparación por punto medio: las componentes fuera de [L, U] se reemplazan por el
    promedio entre la cota violada y la componente del padre.
    """
    candidate = np.asarray(candidate, dtype=float)
    parent = np.asarray(parent, dtype=float)
    repaired = np.where(candidate < problem.lower, (problem.lower + parent) / 2.0, candidate)
    repaired = np.where(candidate > problem.upper, (problem.upper + parent) / 2.0, repaired)
    return repaired


def binomial_crossover(target, donor, cr, rng):
    """Cruce binomial con una dimensión j_rand que siempre proviene del donante."""
    dim = len(target)
    mask = rng.random(dim) < cr
    mask[int(rng.integers(dim))] = True
    return np.where(mask, donor, target)


def _check_population(population):
    if len(population) < MIN_POPULATION:
        raise ValueError(
            f"La población necesita al menos {MIN_POPULATION} individuos: {len(population)}"
        )


def _distinct_indices(size, excluded, count, rng):
    candidates = np.array([i for i in range(size) if i not in excluded])
    return rng.choice(candidates, size=count, replace=False)


def generate_rand_1_bin(population, target_index, f, cr, rng, problem):
    """
    DE/rand/1/bin: v = x_r1 + F(x_r2 - x_r3), cruce binomial con el objetivo.

    Args:
        population: Matriz N x D de posiciones
        target_index: Índice del vector objetivo
        f: Factor de escala
        cr: Tasa de cruce
        rng: numpy.random.Generator
        problem: Problema (para la reparación de cotas)

    Returns:
        numpy.ndarray: Vector de prueba dentro de las cotas
    """
    _check_population(population)
    target = population[target_index]
    r1, r2, r3 = _distinct_indices(len(population), {target_index}, 3, rng)
    donor = population[r1] + f * (population[r2] - population[r3])
    trial = binomial_crossover(target, donor, cr, rng)
    return repair_bounds(trial, target, problem)


def generate_current_to_pbest(population, target_index, f, cr, p_fraction, rng, problem, sf_order):
    """
    DE/current-to-pbest/1 sin archivo externo:
    v = x_i + F(x_pbest - x_i) + F(x_r1 - x_r2), con pbest tomado al azar entre los
    mejores max(1, round(p·N)) según el orden SF.
    """
    _check_population(population)
    target = population[target_index]
    pool = sf_order[: pbest_pool_size(len(population), p_fraction)]
    pbest = pool[int(rng.integers(len(pool)))]
    r1, r2 = _distinct_indices(len(population), {target_index}, 2, rng)
    donor = target + f * (population[pbest] - target) + f * (population[r1] - population[r2])
    trial = binomial_crossover(target, donor, cr, rng)
    return repair_bounds(trial, target, problem)


def generate_current_to_rand(population, target_index, f, rng, problem):
    """DE/current-to-rand/1: u = x_i + K(x_r1 - x_i) + F(x_r2 - x_r3), sin cruce."""
    _check_population(population)
    target = population[target_index]
    r1, r2, r3 = _distinct_indices(len(population), {target_index}, 3, rng)
    k = rng.random()
    trial = (
        target
        + k * (population[r1] - target)
        + f * (population[r2] - population[r3])
    )
    return repair_bounds(trial, target, problem)


def generate_trial(strategy, population, target_index, f, cr, rng, problem, p_fraction, sf_order):
    """Despacha a la estrategia indicada."""
    strategy = StrategyId(strategy)
    if strategy is StrategyId.RAND_1_BIN:
        return generate_rand_1_bin(population, target_index, f, cr, rng, problem)
    if strategy is StrategyId.CURRENT_TO_PBEST:
        return generate_current_to_pbest(
            population, target_index, f, cr, p_fraction, rng, problem, sf_order
        )
    return generate_current_to_rand(population, target_index, f, rng, problem)
