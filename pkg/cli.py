"""
Interfaz de línea de comandos: lectura de argumentos y del archivo de configuración,
ejecución por lotes (problema x algoritmo x semilla) y escritura de resultados.
"""

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
from pydantic import ValidationError

from config import ALGORITHMS, ExperimentSpec, RunConfig, load_config_file
from estructuras.problem_class import SUITE_IDS, make_suite_problem
from optimizer import run_algorithm
from stats import RunTable, friedman_aligned

logger = logging.getLogger(__name__)

TRACE_COLUMNS = [
    "generation",
    "fes",
    "best_f",
    "best_phi",
    "phase",
    "eps_k",
    "sr1",
    "sr2",
    "sr3",
]
SUMMARY_FILE = "summary.json"
FRIEDMAN_FILE = "friedman.json"
TRACES_DIR = "traces"

# Opción CLI -> campo de RunConfig
RUN_CONFIG_FLAGS = {"max_fes": "max_fes", "pop": "population_size", "top": "top_size"}


@click.group()
def cli():
    """PPS-DE: búsqueda push-pull con evolución diferencial adaptativa."""


@cli.command("run")
@click.option("--problem", "problem", multiple=True, help="Problema de la suite (P1..P5).")
@click.option("--dim", "dim", multiple=True, type=click.IntRange(min=2), help="Dimensión D.")
@click.option("--algo", "algo", multiple=True, type=click.Choice(ALGORITHMS), help="Algoritmo.")
@click.option("--runs", type=click.IntRange(min=1), default=None, help="Corridas por celda.")
@click.option("--seed", type=click.IntRange(min=0), default=None, help="Semilla base.")
@click.option("--max-fes", "max_fes", type=click.IntRange(min=1), default=None)
@click.option("--pop", type=click.IntRange(min=4), default=None, help="Tamaño de población.")
@click.option("--top", type=click.IntRange(min=4), default=None, help="Subpoblación superior.")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Archivo clave=valor con campos del experimento y de RunConfig.",
)
@click.option("--workers", type=click.IntRange(min=1), default=None)
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="WARNING",
)
@click.pass_context
def run_command(ctx, log_level, **params):
    """Ejecuta todas las celdas del experimento y escribe trazas y resumen."""
    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    spec = build_spec(params)
    ctx.exit(execute(spec))


@cli.command("problems")
@click.option("--dim", type=click.IntRange(min=2), default=10)
def problems_command(dim):
    """Lista los problemas de la suite y su óptimo conocido."""
    for suite_id in SUITE_IDS:
        problem = make_suite_problem(suite_id, dim)
        click.echo(f"{suite_id}\tD={dim}\toptimo={problem.known_optimum!r}")


def build_spec(params):
    """
    Combina el archivo de configuración con las banderas (las banderas tienen prioridad).

    Args:
        params: Diccionario de opciones de click

    Returns:
        ExperimentSpec

    Raises:
        click.UsageError: Si falta el problema o algún valor es inválido
    """
    spec_fields = {}
    run_fields = {}
    config_path = params.get("config_path")
    if config_path is not None:
        try:
            spec_fields, run_fields = load_config_file(config_path)
        except (OSError, ValueError) as error:
            raise click.UsageError(str(error))

    if params.get("problem"):
        spec_fields["problems"] = list(params["problem"])
    if params.get("dim"):
        spec_fields["dims"] = list(params["dim"])
    if params.get("algo"):
        spec_fields["algorithms"] = list(params["algo"])
    if params.get("runs") is not None:
        spec_fields["runs"] = params["runs"]
    if params.get("seed") is not None:
        spec_fields["base_seed"] = params["seed"]
    if params.get("out") is not None:
        spec_fields["output_dir"] = params["out"]
    if params.get("workers") is not None:
        spec_fields["workers"] = params["workers"]
    for flag, field_name in RUN_CONFIG_FLAGS.items():
        if params.get(flag) is not None:
            run_fields[field_name] = params[flag]

    if not spec_fields.get("problems"):
        raise click.UsageError("Falta el identificador del problema (--problem)")

    try:
        return ExperimentSpec(**spec_fields, config=RunConfig(**run_fields))
    except ValidationError as error:
        raise click.UsageError(f"Configuración inválida:\n{error}")


def parse_args(argv):
    """
    Convierte argumentos de línea de comandos en un ExperimentSpec.

    Args:
        argv: Lista de argumentos, con o sin el subcomando 'run' al inicio

    Returns:
        ExperimentSpec

    Raises:
        click.UsageError: Bandera desconocida, valor mal formado o problema faltante
    """
    args = list(argv)
    if args and args[0] == "run":
        args = args[1:]
    with run_command.make_context("run", args) as ctx:
        params = dict(ctx.params)
    params.pop("log_level", None)
    return build_spec(params)


def _run_cell(problem_id, dim, algorithm, seed, config_data):
    """Ejecuta una corrida aislada; vive a nivel de módulo para poder enviarse a un proceso."""
    config = RunConfig(**config_data).model_copy(update={"algorithm": algorithm, "seed": seed})
    problem = make_suite_problem(problem_id, dim, sigma=config.sigma)
    return run_algorithm(problem, config)


def trace_filename(problem_id, dim, algorithm, run_index):
    return f"{problem_id}_D{dim}_{algorithm}_run{run_index:03d}.csv"


def write_trace(path, trace):
    """Escribe la traza de una corrida como CSV UTF-8 con precisión completa."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRACE_COLUMNS)
        for record in trace:
            writer.writerow(
                [
                    record.generation,
                    record.fes,
                    repr(float(record.best_f)),
                    repr(float(record.best_phi)),
                    record.phase,
                    repr(float(record.eps_k)),
                    *(repr(float(rate)) for rate in record.success_rates),
                ]
            )


def read_trace(path):
    """Lee una traza CSV escrita por write_trace."""
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            rows.append(
                {
                    "generation": int(row["generation"]),
                    "fes": int(row["fes"]),
                    "best_f": float(row["best_f"]),
                    "best_phi": float(row["best_phi"]),
                    "phase": row["phase"],
                    "eps_k": float(row["eps_k"]),
                    "sr": (float(row["sr1"]), float(row["sr2"]), float(row["sr3"])),
                }
            )
    return rows


def _run_all(spec):
    cells = spec.cells()
    logger.info("Experimento con %d corridas (%d procesos)", len(cells), spec.workers)
    config_data = spec.config.model_dump()
    jobs = [
        (problem_id, dim, algorithm, spec.seed_for(run_index), config_data)
        for problem_id, dim, algorithm, run_index in cells
    ]
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as executor:
            futures = [executor.submit(_run_cell, *job) for job in jobs]
            results = []
            for cell, job, future in zip(cells, jobs, futures):
                try:
                    results.append(future.result())
                except Exception as error:
                    raise RuntimeError(_cell_context(cell, job[3], error)) from error
            return cells, results

    results = []
    for cell, job in zip(cells, jobs):
        try:
            results.append(_run_cell(*job))
        except Exception as error:
            raise RuntimeError(_cell_context(cell, job[3], error)) from error
    return cells, results


def _cell_context(cell, seed, error):
    problem_id, dim, algorithm, run_index = cell
    return (
        f"Falló la corrida {run_index} de {algorithm} en {problem_id} (D={dim}, "
        f"semilla={seed}): {error}"
    )


def _friedman_report(table):
    """Reporte de Friedman, o None con el motivo cuando no corresponde."""
    if len(table.algorithms) < 2 or len(table.problems) < 2:
        return None, "Se requieren al menos 2 algoritmos y 2 problemas para la prueba de Friedman"
    matrix, flags = table.cell_means()
    result = friedman_aligned(matrix)
    phi_cells = [
        {"problem": problem, "algorithm": algorithm}
        for i, problem in enumerate(table.problems)
        for j, algorithm in enumerate(table.algorithms)
        if flags[i][j]
    ]
    report = {
        "problems": table.problems,
        "algorithms": table.algorithms,
        "cell_means": matrix.tolist(),
        "average_ranks": dict(zip(table.algorithms, result.average_ranks)),
        "statistic": result.statistic,
        "p_value": result.p_value,
        "significant_at_0.05": result.p_value < 0.05,
        "cells_using_mean_phi": phi_cells,
    }
    return report, None


def _write_json(path, data):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")


def execute(spec):
    """
    Ejecuta el experimento completo.

    Escribe una traza CSV por corrida, summary.json con las estadísticas por celda y,
    con >= 2 algoritmos y >= 2 problemas, friedman.json.

    Args:
        spec: ExperimentSpec

    Returns:
        int: Código de salida (0 éxito, 1 error)
    """
    output_dir = Path(spec.output_dir)
    traces_dir = output_dir / TRACES_DIR
    try:
        traces_dir.mkdir(parents=True, exist_ok=True)
    except OSError as error:
        click.echo(f"Error: no se pudo crear {traces_dir}: {error}", err=True)
        return 1

    try:
        cells, results = _run_all(spec)
    except RuntimeError as error:
        click.echo(f"Error: {error}", err=True)
        return 1

    table = RunTable()
    try:
        for (problem_id, dim, algorithm, run_index), result in zip(cells, results):
            write_trace(
                traces_dir / trace_filename(problem_id, dim, algorithm, run_index), result.trace
            )
            table.add(f"{problem_id}@D{dim}", algorithm, result.best.f, result.best.phi)

        summary = {"cells": [], "runs_per_cell": spec.runs, "base_seed": spec.base_seed}
        for row in table.problems:
            problem_id, dim = row.split("@D")
            for algorithm in table.algorithms:
                summary["cells"].append(
                    {
                        "problem": problem_id,
                        "dim": int(dim),
                        "algorithm": algorithm,
                        **table.summary(row, algorithm),
                    }
                )

        report, reason = _friedman_report(table)
        if report is None:
            summary["friedman"] = {"omitted": True, "note": reason}
        else:
            summary["friedman"] = {"omitted": False, "file": FRIEDMAN_FILE}
            _write_json(output_dir / FRIEDMAN_FILE, report)
        _write_json(output_dir / SUMMARY_FILE, summary)
    except OSError as error:
        click.echo(f"Error de escritura: {error}", err=True)
        return 1

    click.echo(f"{len(results)} corridas completadas; resultados en {output_dir}")
    return 0

