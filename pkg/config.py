"""
Configuración de corridas y experimentos (modelos pydantic) y lectura del archivo
de configuración clave=valor.
"""

from pathlib import Path
from typing import List, Literal, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, Field, field_validator, model_validator

from estructuras.problem_class import DEFAULT_SIGMA, resolve_suite_id

ALGORITHMS = ("pps-de", "sf-de", "eps-de")


class RunConfig(BaseModel):
    """
    Parámetros de una corrida. Los tamaños que dependen de D quedan en None hasta
    llamar a resolved(dim): N_P = 5D, T = 0.5·N_P, MaxFES = 20000·D.
    """

    algorithm: Literal["pps-de", "sf-de", "eps-de"] = "pps-de"
    population_size: Optional[int] = Field(default=None, ge=4)
    top_size: Optional[int] = Field(default=None, ge=4)
    learning_period: int = Field(default=25, ge=1)
    p_fraction: float = Field(default=0.05, gt=0.0, le=1.0)
    max_fes: Optional[int] = Field(default=None, ge=1)
    memory_size: int = Field(default=5, ge=1)
    sigma: float = Field(default=DEFAULT_SIGMA, ge=0.0)
    switch_threshold: float = 1e-3
    delta: float = Field(default=1e-6, gt=0.0)
    tau: float = Field(default=0.1, gt=0.0, lt=1.0)
    alpha: float = Field(default=0.95, ge=0.0, le=1.0)
    cp: float = Field(default=2.0, gt=0.0)
    theta: float = Field(default=0.95, ge=0.0, le=1.0)
    tc_fraction: float = Field(default=0.9, gt=0.0)
    tc: Optional[float] = Field(default=None, gt=0.0)
    eps_zero: Optional[float] = Field(default=None, ge=0.0)
    bottom_rule: Literal["pps", "sf"] = "pps"
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_sizes(self):
        if self.population_size is not None and self.top_size is not None:
            if self.top_size > self.population_size:
                raise ValueError(
                    f"top_size ({self.top_size}) no puede superar a population_size "
                    f"({self.population_size})"
                )
        if self.population_size is not None and self.max_fes is not None:
            if self.max_fes < self.population_size:
                raise ValueError("max_fes debe ser >= population_size")
        return self

    def resolved(self, dim):
        """
        Devuelve una copia con N_P, T, MaxFES y Tc concretos para la dimensión dada.

        Raises:
            ValueError: Si no se cumplen 4 <= T <= N_P y MaxFES >= N_P
        """
        population_size = self.population_size or 5 * dim
        top_size = self.top_size or (population_size + 1) // 2
        max_fes = self.max_fes or 20000 * dim
        if not 4 <= top_size <= population_size:
            raise ValueError(
                f"Se requiere 4 <= T <= N_P (T={top_size}, N_P={population_size})"
            )
        if max_fes < population_size:
            raise ValueError(f"MaxFES ({max_fes}) debe ser >= N_P ({population_size})")
        tc = self.tc
        if tc is None:
            # Cada generación consume 2·N_P evaluaciones cuando T = 0.5·N_P
            max_gen = max_fes / (2.0 * population_size)
            tc = max(1.0, self.tc_fraction * max_gen)
        return self.model_copy(
            update={
                "population_size": population_size,
                "top_size": top_size,
                "max_fes": max_fes,
                "tc": tc,
            }
        )

    @property
    def generation_cost(self):
        """Evaluaciones por generación: 3T + (N_P - T)."""
        return 3 * self.top_size + (self.population_size - self.top_size)


class ExperimentSpec(BaseModel):
    """Experimento: problemas x dimensiones x algoritmos x corridas."""

    problems: List[str] = Field(min_length=1)
    dims: List[int] = Field(default_factory=lambda: [10], min_length=1)
    algorithms: List[Literal["pps-de", "sf-de", "eps-de"]] = Field(
        default_factory=lambda: ["pps-de"], min_length=1
    )
    runs: int = Field(default=25, ge=1)
    base_seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)
    output_dir: Path = Path("results")
    config: RunConfig = Field(default_factory=RunConfig)

    @field_validator("problems")
    @classmethod
    def _resolve_problems(cls, problems):
        return [resolve_suite_id(problem) for problem in problems]

    @field_validator("dims")
    @classmethod
    def _check_dims(cls, dims):
        for dim in dims:
            if dim < 2:
                raise ValueError(f"La dimensión debe ser >= 2: {dim}")
        return dims

    def seed_for(self, run_index):
        """Semilla determinista de la corrida: base_seed + run_index."""
        return self.base_seed + run_index

    def cells(self):
        """Todas las combinaciones (problema, dimensión, algoritmo, corrida) en orden fijo."""
        return [
            (problem, dim, algorithm, run_index)
            for problem in self.problems
            for dim in self.dims
            for algorithm in self.algorithms
            for run_index in range(self.runs)
        ]


SPEC_KEYS = {"problems", "dims", "algorithms", "runs", "base_seed", "workers", "output_dir"}
LIST_KEYS = {"problems", "dims", "algorithms"}
KEY_ALIASES = {
    "problem": "problems",
    "dim": "dims",
    "algo": "algorithms",
    "algorithm": "algorithms",
    "seed": "base_seed",
    "out": "output_dir",
    "pop": "population_size",
    "top": "top_size",
}


def load_config_file(path):
    """
    Lee un archivo clave=valor (formato dotenv) con campos de ExperimentSpec o RunConfig.

    Args:
        path: Ruta del archivo

    Returns:
        tuple: (campos del experimento, campos de RunConfig) como diccionarios

    Raises:
        FileNotFoundError: Si el archivo no existe
        ValueError: Si aparece una clave desconocida
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"No se encontró el archivo de configuración: {path}")

    spec_fields = {}
    run_fields = {}
    for raw_key, raw_value in dotenv_values(path).items():
        if raw_value is None:
            continue
        key = raw_key.strip().lower().replace("-", "_")
        key = KEY_ALIASES.get(key, key)
        if key in LIST_KEYS:
            spec_fields[key] = [item.strip() for item in raw_value.split(",") if item.strip()]
        elif key in SPEC_KEYS:
            spec_fields[key] = raw_value.strip()
        elif key in RunConfig.model_fields and key != "algorithm":
            run_fields[key] = raw_value.strip()
        else:
            raise ValueError(f"Clave desconocida en {path.name}: '{raw_key}'")
    return spec_fields, run_fields
