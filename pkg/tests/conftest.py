"""Fixtures compartilhados para os testes do MPVC Lab."""

from pathlib import Path

import numpy as np
import pytest

from mpvc.cq import full_report
from mpvc.model import classify, load_problem, parse_problem

FIXTURES_DIR = Path(__file__).resolve().parent.parent / "fixtures"
ORIGIN = np.zeros(2)


# =============================================================================
# Problemas de referência
# =============================================================================

@pytest.fixture(scope="session")
def ex21():
    """Exemplo em que GMFCQ vale mas LICQ e MFCQ falham na origem."""
    return load_problem(FIXTURES_DIR / "ex21.mpvc")


@pytest.fixture(scope="session")
def ex22():
    """Exemplo em que GMFCQ falha e a penalidade é exata para todo α."""
    return load_problem(FIXTURES_DIR / "ex22.mpvc")


@pytest.fixture(scope="session")
def ex41():
    """Exemplo em que a quasinormalidade falha mas ACQ vale."""
    return load_problem(FIXTURES_DIR / "ex41.mpvc")


@pytest.fixture(scope="session")
def fixture_problems(ex21, ex22, ex41):
    return {"ex21": ex21, "ex22": ex22, "ex41": ex41}


@pytest.fixture
def mixed_problem():
    """Problema com g, h e pares em todos os casos de sinal na origem."""
    return parse_problem(
        """
        [name] misto
        [vars] x y
        [objective] (x - 1)^2 + y^2
        [g]
        x - 1        # inativa
        y            # ativa
        [h]
        x - y
        [vc]
        G: x - 1 ; H: y + 2     # I_+-
        G: x ; H: y + 1         # I_+0
        G: x + 1 ; H: y         # I_0+
        G: x - 1 ; H: x         # I_0-
        G: y ; H: x             # I_00
        """,
        source="misto.mpvc",
    )


# =============================================================================
# Relatórios completos (caros, calculados uma vez por sessão)
# =============================================================================

@pytest.fixture(scope="session")
def report21(ex21):
    return full_report(ex21, ORIGIN)


@pytest.fixture(scope="session")
def report22(ex22):
    return full_report(ex22, ORIGIN)


@pytest.fixture(scope="session")
def report41(ex41):
    return full_report(ex41, ORIGIN)


@pytest.fixture(scope="session")
def sets22(ex22):
    return classify(ex22, ORIGIN)
