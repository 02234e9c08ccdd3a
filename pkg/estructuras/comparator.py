from enum import Enum

OBJECTIVE = "objective"
VIOLATION = "violation"

RULE_PUSH = "push"
RULE_PULL = "pull"
RULE_SF = "sf"


class Comparison(Enum):
    FIRST_BETTER = "first-better"
    SECOND_BETTER = "second-better"
    TIE = "tie"


def _compare_values(a, b):
    if a < b:
        return Comparison.FIRST_BETTER
    if b < a:
        return Comparison.SECOND_BETTER
    return Comparison.TIE


def sf_compare(a, b):
    """
    Superioridad de soluciones factibles (reglas de Deb).

    - Ambas infactibles: gana la de menor violación.
    - Una sola factible: gana la factible.
    - Ambas factibles: gana la de menor objetivo.

    Args:
        a: Primer individuo evaluado
        b: Segundo individuo evaluado

    Returns:
        Comparison: Resultado desde el punto de vista de 'a'
    """
    a_feasible = a.phi == 0.0
    b_feasible = b.phi == 0.0
    if a_feasible and b_feasible:
        return _compare_values(a.f, b.f)
    if a_feasible:
        return Comparison.FIRST_BETTER
    if b_feasible:
        return Comparison.SECOND_BETTER
    return _compare_values(a.phi, b.phi)


def push_select(parent, trial):
    """Búsqueda push: el trial reemplaza al padre si f(trial) <= f(padre); ignora phi."""
    return trial.f <= parent.f


def pull_select(parent, trial, eps):
    """Búsqueda pull con nivel epsilon; las ramas se evalúan en este orden exacto."""
    return pull_decision(parent, trial, eps)[0]


def pull_decision(parent, trial, eps):
    """
    Decisión de la búsqueda pull junto con el criterio que la decidió.

    Args:
        parent: Individuo padre
        trial: Individuo candidato
        eps: Nivel epsilon (>= 0)

    Returns:
        tuple: (reemplaza, criterio) con criterio OBJECTIVE o VIOLATION
    """
    if eps < 0:
        raise ValueError(f"El nivel epsilon debe ser no negativo: {eps}")
    if trial.phi <= eps and parent.phi <= eps:
        return trial.f <= parent.f, OBJECTIVE
    if trial.phi == parent.phi:
        return trial.f <= parent.f, OBJECTIVE
    if trial.phi < parent.phi:
        return True, VIOLATION
    return False, VIOLATION


def sf_select(parent, trial):
    """Aceptación SF: el trial reemplaza al padre salvo que el padre sea estrictamente mejor."""
    return sf_compare(parent, trial) is not Comparison.FIRST_BETTER


def replacement_decision(rule, parent, trial, eps=0.0):
    """
    Aplica la regla de reemplazo uno a uno indicada.

    Args:
        rule: RULE_PUSH, RULE_PULL o RULE_SF
        parent: Individuo padre
        trial: Individuo candidato
        eps: Nivel epsilon (solo para RULE_PULL)

    Returns:
        tuple: (reemplaza, criterio); el criterio define qué función mide la mejora
    """
    if rule == RULE_PUSH:
        return push_select(parent, trial), OBJECTIVE
    if rule == RULE_PULL:
        return pull_decision(parent, trial, eps)
    if rule == RULE_SF:
        criterion = OBJECTIVE if parent.phi == 0.0 and trial.phi == 0.0 else VIOLATION
        return sf_select(parent, trial), criterion
    raise ValueError(f"Regla de reemplazo desconocida: {rule}")


def strictly_better(rule, challenger, incumbent, eps=0.0):
    """
    True si 'challenger' supera estrictamente a 'incumbent' bajo la regla.
    En empate se conserva el incumbente.
    """
    if rule == RULE_SF:
        return sf_compare(challenger, incumbent) is Comparison.FIRST_BETTER
    accepts, _ = replacement_decision(rule, incumbent, challenger, eps)
    reverse, _ = replacement_decision(rule, challenger, incumbent, eps)
    return accepts and not reverse


def sf_sort_key(individual):
    """Clave de orden SF: factibles por f, luego infactibles por phi."""
    if individual.phi == 0.0:
        return (0, individual.f)
    return (1, individual.phi)


def sort_sf(population):
    """
    Ordena una población de mejor a peor según SF.

    Returns:
        list: Permutación de índices; los empates conservan el orden original
    """
    return sorted(range(len(population)), key=lambda index: sf_sort_key(population[index]))
