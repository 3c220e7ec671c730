import numpy as np
import pytest

from chaosadapt.basis import total_degree_set
from chaosadapt.models import QuadraticModel
from chaosadapt.pce import PCExpansion, project
from chaosadapt.quadrature import smolyak


@pytest.fixture(scope="session")
def ridge_model():
    return QuadraticModel.ridge10()


@pytest.fixture(scope="session")
def ridge_expansion(ridge_model):
    """Degree-2 projection of the quadratic test function on the level-2 grid (d=10)."""
    rule = smolyak(10, 2)
    return project(ridge_model(rule.nodes), rule, total_degree_set(10, 2))


def random_expansion(d, Q, seed, decay=1.0):
    rng = np.random.default_rng(seed)
    index_set = total_degree_set(d, Q)
    coef = rng.standard_normal(index_set.size) / (1.0 + index_set.total_degrees()) ** decay
    return PCExpansion(index_set, coef)



def pytest_terminal_summary(terminalreporter):
    lines = [value for reports in terminalreporter.stats.values() for rep in reports
             if getattr(rep, "when", None) == "call"
             for key, value in getattr(rep, "user_properties", ()) if key == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: s.split("] ", 1)[1]):
            terminalreporter.write_line(line)
