import logging
import math
from collections import deque
from enum import Enum

import numpy as np

logger = logging.getLogger(__name__)


class Phase(str, Enum):
    PUSH = "push"
    PULL = "pull"


class EpsilonSchedule:
    """
    Nivel epsilon de la etapa pull.

    - k >= Tc: epsilon = 0
    - proporción factible < alpha: epsilon se reduce a (1 - tau)·epsilon anterior
    - en otro caso: epsilon = eps_0·(1 - k/Tc)^cp

    Antes de iniciarse (etapa push) el nivel es +inf.
    """

    def __init__(self, tc, tau=0.1, alpha=0.95, cp=2.0, theta=0.95):
        if tc <= 0:
            raise ValueError(f"La generación de corte Tc debe ser positiva: {tc}")
        if not 0.0 < tau < 1.0:
            raise ValueError(f"tau debe estar en (0, 1): {tau}")
        self.tc = tc
        self.tau = tau
        self.alpha = alpha
        self.cp = cp
        self.theta = theta
        self.eps_0 = None
        self.eps_k = math.inf
        self.k = None

    @property
    def started(self):
        return self.eps_0 is not None

    def initial_level(self, phis):
        """phi del individuo en el percentil theta (orden ascendente de phi)."""
        ordered = np.sort(np.asarray(phis, dtype=float))
        index = min(len(ordered) - 1, int(math.floor(self.theta * len(ordered))))
        return float(ordered[index])

    def start(self, phis=None, eps_0=None):
        """
        Inicia el calendario al cambiar a la etapa pull.

        Args:
            phis: Violaciones de la población en el momento del cambio
            eps_0: Nivel inicial explícito (tiene prioridad sobre phis)
        """
        if eps_0 is None:
            if phis is None or len(phis) == 0:
                raise ValueError("Se requieren las violaciones de la población o eps_0")
            eps_0 = self.initial_level(phis)
        if eps_0 < 0:
            raise ValueError(f"eps_0 debe ser no negativo: {eps_0}")
        self.eps_0 = float(eps_0)
        self.eps_k = self.eps_0
        self.k = None
        return self.eps_0

    def level(self, k, feasible_ratio):
        """
        Calcula epsilon(k) y lo memoriza.

        Args:
            k: Generaciones transcurridas desde el cambio (>= 0, no decreciente)
            feasible_ratio: Proporción de individuos factibles en la población

        Returns:
            float: Nivel epsilon actual
        """
        if not self.started:
            return math.inf
        if k < 0:
            raise ValueError(f"k debe ser no negativo: {k}")
        if self.k is not None and k < self.k:
            raise ValueError(f"k no puede decrecer: {self.k} -> {k}")
        if self.k is not None and k == self.k:
            return self.eps_k

        if k >= self.tc:
            eps = 0.0
        elif k == 0:
            eps = self.eps_0
        elif feasible_ratio < self.alpha:
            eps = (1.0 - self.tau) * self.eps_k
        else:
            eps = self.eps_0 * (1.0 - k / self.tc) ** self.cp
        # el nivel nunca supera eps_0
        self.eps_k = min(max(eps, 0.0), self.eps_0)
        self.k = k
        return self.eps_k


class SwitchState:
    """
    Estado del cambio push -> pull.

    r_G = (f_{G-L} - f_G) / max(|f_{G-L}|, delta), con r_G = 1.0 mientras G < L.
    El cambio ocurre una sola vez cuando r_G <= threshold.
    """

    def __init__(self, learning_period=25, threshold=1e-3, delta=1e-6, schedule=None):
        if learning_period < 1:
            raise ValueError(f"El periodo L debe ser >= 1: {learning_period}")
        self.learning_period = learning_period
        self.threshold = threshold
        self.delta = delta
        self.schedule = schedule
        self.r_g = 1.0
        self.best_f_history = deque(maxlen=learning_period + 1)
        self.generation = None
        self.phase = Phase.PUSH
        self.switch_generation = None

    def update_rate(self, generation, best_f_now):
        """
        Registra el mínimo objetivo de la generación y recalcula r_G.

        Args:
            generation: Contador G (se llama una vez por generación, desde 0)
            best_f_now: Mínimo valor objetivo de la población en G

        Returns:
            float: r_G
        """
        if self.generation is not None and generation != self.generation + 1:
            raise ValueError(f"Generación fuera de secuencia: {self.generation} -> {generation}")
        self.generation = generation
        self.best_f_history.append(float(best_f_now))

        if generation < self.learning_period:
            self.r_g = 1.0
        else:
            past = self.best_f_history[0]
            self.r_g = (past - best_f_now) / max(abs(past), self.delta)
        return self.r_g

    def should_switch(self, phis=None):
        """
        Cambia a la etapa pull si r_G <= threshold. Irreversible.

        Args:
            phis: Violaciones de la población (inician el calendario epsilon)

        Returns:
            bool: True solo en la generación en que ocurre el cambio
        """
        if self.phase is Phase.PULL or self.r_g > self.threshold:
            return False
        self.phase = Phase.PULL
        self.switch_generation = self.generation
        if self.schedule is not None and phis is not None:
            self.schedule.start(phis)
        logger.info(
            "Cambio a búsqueda pull en G=%s (r_G=%.3e)", self.switch_generation, self.r_g
        )
        return True

    def pull_generations(self, generation):
        """Generaciones pull transcurridas: 0 en la primera generación tras el cambio."""
        if self.switch_generation is None:
            return None
        return generation - self.switch_generation - 1
