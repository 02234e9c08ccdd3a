# tests/conftest.py
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from estructuras.problem_class import Evaluation, Individual


def make_individual(f, phi=0.0, x=(0.0, 0.0)):
    """Individuo sintético con f y phi dados (las restricciones crudas no importan)."""
    return Individual(x=np.asarray(x, dtype=float), evaluation=Evaluation(f=f, phi=phi))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
