"""
Estadísticas sobre corridas independientes y la prueba de Friedman de rangos alineados.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2, rankdata


def summarize(values):
    """
    Estadísticas de muestra de una secuencia de valores.

    Args:
        values: Secuencia no vacía de reales

    Returns:
        dict: mean, std (denominador n-1; 0 si n = 1), best, worst, median
    """
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        raise ValueError("No se puede resumir una secuencia vacía")
    std = float(np.std(data, ddof=1)) if data.size > 1 else 0.0
    return {
        "mean": float(np.mean(data)),
        "std": std,
        "best": float(np.min(data)),
        "worst": float(np.max(data)),
        "median": float(np.median(data)),
    }


@dataclass
class FriedmanResult:
    average_ranks: list
    statistic: float
    p_value: float
    ranks: np.ndarray = field(repr=False, default=None)


def aligned_ranks(cell_means):
    """
    Rangos conjuntos de las observaciones alineadas (cada fila menos su media).
    Los empates reciben el rango promedio.

    Returns:
        numpy.ndarray: Matriz de rangos con la forma de la entrada
    """
    matrix = np.asarray(cell_means, dtype=float)
    aligned = matrix - matrix.mean(axis=1, keepdims=True)
    return rankdata(aligned, method="average").reshape(matrix.shape)


def friedman_aligned(cell_means):
    """
    Prueba de Friedman de rangos alineados (Hodges-Lehmann).

    Args:
        cell_means: Matriz problemas x algoritmos, sin celdas faltantes

    Returns:
        FriedmanResult: rangos promedio por algoritmo, estadístico y p-valor
            (chi-cuadrado con k-1 grados de libertad)
    """
    matrix = np.asarray(cell_means, dtype=float)
    if matrix.ndim != 2:
        raise ValueError("Se esperaba una matriz problemas x algoritmos")
    n, k = matrix.shape
    if k < 2 or n < 2:
        raise ValueError(f"Se requieren >= 2 problemas y >= 2 algoritmos (n={n}, k={k})")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("La matriz contiene celdas faltantes o no finitas")

    ranks = aligned_ranks(matrix)
    average_ranks = ranks.mean(axis=0)
    row_totals = ranks.sum(axis=1)
    column_totals = ranks.sum(axis=0)

    numerator = (k - 1) * (
        np.sum(column_totals**2) - (k * n**2 / 4.0) * (k * n + 1) ** 2
    )
    denominator = (k * n * (k * n + 1) * (2 * k * n + 1)) / 6.0 - np.sum(row_totals**2) / k
    if denominator <= 0:
        statistic = 0.0
    else:
        statistic = float(numerator / denominator)
    p_value = float(chi2.sf(statistic, k - 1))
    return FriedmanResult(
        average_ranks=[float(r) for r in average_ranks],
        statistic=statistic,
        p_value=p_value,
        ranks=ranks,
    )


class RunTable:
    """
    Tabla problemas x algoritmos; cada celda guarda por corrida el mejor f final, su
    phi y si fue factible.
    """

    def __init__(self):
        self.cells = {}
        self.problems = []
        self.algorithms = []

    def add(self, problem, algorithm, best_f, best_phi):
        if problem not in self.problems:
            self.problems.append(problem)
        if algorithm not in self.algorithms:
            self.algorithms.append(algorithm)
        self.cells.setdefault((problem, algorithm), []).append(
            (float(best_f), float(best_phi))
        )

    def cell(self, problem, algorithm):
        return self.cells.get((problem, algorithm), [])

    def check_balanced(self):
        """Todas las celdas de una fila deben tener el mismo número de corridas."""
        for problem in self.problems:
            counts = {len(self.cell(problem, algorithm)) for algorithm in self.algorithms}
            if len(counts) != 1:
                raise ValueError(f"Número de corridas desigual en la fila '{problem}': {counts}")

    def summary(self, problem, algorithm):
        """
        Resumen de una celda: estadísticas de f sobre corridas factibles, tasa de
        factibilidad y violación media.
        """
        runs = self.cell(problem, algorithm)
        if not runs:
            raise ValueError(f"Celda vacía: ({problem}, {algorithm})")
        feasible = [f for f, phi in runs if phi == 0.0]
        result = {
            "runs": len(runs),
            "feasible_runs": len(feasible),
            "feasibility_rate": len(feasible) / len(runs),
            "mean_phi": float(np.mean([phi for _, phi in runs])),
        }
        if feasible:
            result.update(summarize(feasible))
        else:
            result.update({key: None for key in ("mean", "std", "best", "worst", "median")})
        return result

    def cell_means(self):
        """
        Matriz de medias para la prueba de Friedman: media de f en corridas factibles
        o, si no hay ninguna, media de phi (marcada en flags).

        Returns:
            tuple: (matriz, flags) con flags[i][j] = True cuando la celda usa phi
        """
        self.check_balanced()
        matrix = np.full((len(self.problems), len(self.algorithms)), math.nan)
        flags = [[False] * len(self.algorithms) for _ in self.problems]
        for i, problem in enumerate(self.problems):
            for j, algorithm in enumerate(self.algorithms):
                runs = self.cell(problem, algorithm)
                feasible = [f for f, phi in runs if phi == 0.0]
                if feasible:
                    matrix[i, j] = float(np.mean(feasible))
                elif runs:
                    matrix[i, j] = float(np.mean([phi for _, phi in runs]))
                    flags[i][j] = True
        return matrix, flags
