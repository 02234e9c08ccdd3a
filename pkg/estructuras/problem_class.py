import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

DEFAULT_SIGMA = 1e-4

SUITE_IDS = (
    "P1-sphere-shifted",
    "P2-active-linear",
    "P3-equality",
    "P4-disconnected",
    "P5-rosenbrock-ball",
)

# Alias corto -> identificador completo ("P2" -> "P2-active-linear")
SUITE_ALIASES = {suite_id.split("-")[0]: suite_id for suite_id in SUITE_IDS}


class EvaluationError(ValueError):
    """
    Error de evaluación: la función objetivo o alguna restricción devolvió un valor
    no finito (nan o inf).

    Attributes:
        kind: 'objective', 'inequality' o 'equality'
        index: Índice de la restricción culpable (None para la función objetivo)
    """

    def __init__(self, kind, index=None, value=None):
        self.kind = kind
        self.index = index
        self.value = value
        if index is None:
            message = f"Valor no finito en la función objetivo: {value}"
        else:
            message = f"Valor no finito en la restricción {kind}[{index}]: {value}"
        super().__init__(message)


def overall_violation(g_values, h_values, sigma=DEFAULT_SIGMA):
    """
    Violación total de restricciones.

    phi = sum(max(g_i, 0)) + sum(max(|h_j| - sigma, 0)), con la convención g(x) <= 0.

    Args:
        g_values: Valores de las restricciones de desigualdad
        h_values: Valores de las restricciones de igualdad
        sigma: Tolerancia de las igualdades

    Returns:
        float: Violación total (siempre >= 0)
    """
    phi = 0.0
    for value in g_values:
        phi += max(value, 0.0)
    for value in h_values:
        phi += max(abs(value) - sigma, 0.0)
    return phi


@dataclass(frozen=True)
class Evaluation:
    """Resultado de evaluar un punto: objetivo, restricciones crudas y phi."""

    f: float
    g_values: tuple = ()
    h_values: tuple = ()
    phi: float = 0.0

    @property
    def feasible(self):
        return is_feasible(self)


def is_feasible(evaluation):
    """Un punto es factible si y solo si su violación total es exactamente cero."""
    return evaluation.phi == 0.0


@dataclass
class Individual:
    """Vector de decisión junto con su evaluación."""

    x: np.ndarray
    evaluation: Evaluation

    @property
    def f(self):
        return self.evaluation.f

    @property
    def phi(self):
        return self.evaluation.phi

    @property
    def feasible(self):
        return is_feasible(self.evaluation)


class Problem:
    """
    Problema de optimización con restricciones de un solo objetivo:

        minimizar f(x)  sujeto a  g_i(x) <= 0,  |h_j(x)| <= sigma,  L <= x <= U

    Las definiciones son inmutables después de construirse; evaluate es puro.
    """

    def __init__(
        self,
        dim,
        lower,
        upper,
        objective: Callable,
        inequalities: Sequence[Callable] = (),
        equalities: Sequence[Callable] = (),
        sigma=DEFAULT_SIGMA,
        known_optimum: Optional[float] = None,
        optimum_x=None,
        name="custom",
    ):
        """
        Args:
            dim: Dimensión D del espacio de decisión
            lower: Cotas inferiores (escalar o secuencia de largo D)
            upper: Cotas superiores (escalar o secuencia de largo D)
            objective: Función R^D -> R a minimizar
            inequalities: Funciones g_i, factibles cuando g_i(x) <= 0
            equalities: Funciones h_j, factibles cuando |h_j(x)| <= sigma
            sigma: Tolerancia de las igualdades (>= 0)
            known_optimum: Valor óptimo conocido (metadato de la suite)
            optimum_x: Punto óptimo conocido
            name: Nombre del problema
        """
        if not isinstance(dim, (int, np.integer)) or dim < 1:
            raise ValueError(f"La dimensión debe ser un entero positivo: {dim}")
        if sigma < 0:
            raise ValueError(f"sigma debe ser no negativo: {sigma}")

        self.dim = int(dim)
        self.lower = np.broadcast_to(np.asarray(lower, dtype=float), (self.dim,)).copy()
        self.upper = np.broadcast_to(np.asarray(upper, dtype=float), (self.dim,)).copy()
        if np.any(self.lower >= self.upper):
            raise ValueError("Cada cota inferior debe ser estrictamente menor que la superior")
        self.lower.setflags(write=False)
        self.upper.setflags(write=False)

        self.objective = objective
        self.inequalities = tuple(inequalities)
        self.equalities = tuple(equalities)
        self.sigma = float(sigma)
        self.known_optimum = known_optimum
        self.optimum_x = None if optimum_x is None else np.asarray(optimum_x, dtype=float)
        self.name = name

    def __repr__(self):
        return (
            f"Problem({self.name!r}, dim={self.dim}, q={len(self.inequalities)}, "
            f"p={len(self.equalities)})"
        )

    def contains(self, x):
        """Verifica si x está dentro de las cotas."""
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def evaluate(self, x):
        """
        Evalúa el objetivo y todas las restricciones en x.

        Args:
            x: Vector de largo D dentro de las cotas

        Returns:
            Evaluation: f, valores crudos de g y h, y phi

        Raises:
            ValueError: Si x tiene largo incorrecto o está fuera de las cotas
            EvaluationError: Si algún valor es no finito
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"Se esperaba un vector de largo {self.dim}, se recibió {x.shape}")
        if not self.contains(x):
            raise ValueError("El punto está fuera de las cotas del problema")

        f = float(self.objective(x))
        if not math.isfinite(f):
            raise EvaluationError("objective", None, f)

        g_values = tuple(float(g(x)) for g in self.inequalities)
        for index, value in enumerate(g_values):
            if not math.isfinite(value):
                raise EvaluationError("inequality", index, value)

        h_values = tuple(float(h(x)) for h in self.equalities)
        for index, value in enumerate(h_values):
            if not math.isfinite(value):
                raise EvaluationError("equality", index, value)

        phi = overall_violation(g_values, h_values, self.sigma)
        return Evaluation(f=f, g_values=g_values, h_values=h_values, phi=phi)


def evaluate(problem, x):
    """Atajo funcional de Problem.evaluate."""
    return problem.evaluate(x)


def resolve_suite_id(suite_id):
    """
    Normaliza un identificador de la suite, aceptando alias cortos ('P3').

    Raises:
        ValueError: Si el identificador no existe
    """
    if suite_id in SUITE_IDS:
        return suite_id
    alias = str(suite_id).strip().upper()
    if alias in SUITE_ALIASES:
        return SUITE_ALIASES[alias]
    raise ValueError(
        f"Problema desconocido: '{suite_id}'. Problemas válidos: {', '.join(SUITE_IDS)}"
    )


def _sphere_shifted(dim, sigma):
    return Problem(
        dim,
        -5.0,
        5.0,
        objective=lambda x: float(np.sum((x - 0.5) ** 2)),
        inequalities=(lambda x: x[0] - 100.0,),
        sigma=sigma,
        known_optimum=0.0,
        optimum_x=np.full(dim, 0.5),
        name="P1-sphere-shifted",
    )


def _active_linear(dim, sigma):
    optimum_x = np.full(dim, 1.0 / dim)
    # 1/D no es exacto en binario: se redondea hacia arriba para que sum(x) >= 1
    while 1.0 - float(np.sum(optimum_x)) > 0.0:
        optimum_x = np.nextafter(optimum_x, np.inf)
    return Problem(
        dim,
        -5.0,
        5.0,
        objective=lambda x: float(np.sum(x**2)),
        inequalities=(lambda x: 1.0 - float(np.sum(x)),),
        sigma=sigma,
        known_optimum=1.0 / dim,
        optimum_x=optimum_x,
        name="P2-active-linear",
    )


def _equality(dim, sigma):
    optimum_x = np.zeros(dim)
    optimum_x[:2] = 0.5
    return Problem(
        dim,
        -5.0,
        5.0,
        objective=lambda x: float(np.sum(x**2)),
        equalities=(lambda x: x[0] + x[1] - 1.0,),
        sigma=sigma,
        known_optimum=0.5,
        optimum_x=optimum_x,
        name="P3-equality",
    )


def _disconnected(dim, sigma):
    def islands(x):
        # Dos islas hipercúbicas: alrededor del origen y alrededor de 2·1
        near_origin = float(np.max(np.abs(x))) - 0.5
        near_two = float(np.max(np.abs(x - 2.0))) - 0.5
        return min(near_origin, near_two)

    return Problem(
        dim,
        -5.0,
        5.0,
        objective=lambda x: float(np.sum((x - 2.0) ** 2)),
        inequalities=(islands,),
        sigma=sigma,
        known_optimum=0.0,
        optimum_x=np.full(dim, 2.0),
        name="P4-disconnected",
    )


def _rosenbrock_ball(dim, sigma):
    def rosenbrock(x):
        return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))

    return Problem(
        dim,
        -5.0,
        5.0,
        objective=rosenbrock,
        inequalities=(lambda x: float(np.sum(x**2)) - 2.0 * dim,),
        sigma=sigma,
        known_optimum=0.0,
        optimum_x=np.ones(dim),
        name="P5-rosenbrock-ball",
    )


SUITE_BUILDERS = {
    "P1-sphere-shifted": _sphere_shifted,
    "P2-active-linear": _active_linear,
    "P3-equality": _equality,
    "P4-disconnected": _disconnected,
    "P5-rosenbrock-ball": _rosenbrock_ball,
}


def make_suite_problem(suite_id, dim, sigma=DEFAULT_SIGMA):
    """
    Construye un problema de la suite analítica.

    Args:
        suite_id: Identificador ('P1-sphere-shifted', ... o alias 'P1')
        dim: Dimensión (>= 2)
        sigma: Tolerancia de igualdades

    Returns:
        Problem: Problema con known_optimum y optimum_x definidos
    """
    full_id = resolve_suite_id(suite_id)
    if not isinstance(dim, (int, np.integer)) or dim < 2:
        raise ValueError(f"La dimensión de la suite debe ser >= 2: {dim}")
    return SUITE_BUILDERS[full_id](int(dim), sigma)
