"""Testes para dist_Ω e as funções de penalidade."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpvc.model import is_feasible, parse_problem
from mpvc.penalty import (
    OmegaPoint,
    PenaltyError,
    dist_omega,
    dist_omega_array,
    in_omega,
    penalty_l1,
    penalty_tailored,
)
from tests.helpers import brute_force_dist_omega

GRID_STEP = 1e-3
coordinates = st.floats(-50, 50, allow_nan=False, allow_infinity=False).map(lambda v: round(v, 6))


class TestDistOmega:
    """Testes para a distância a Ω."""

    @pytest.mark.parametrize(
        "a, b, expected",
        [
            (0.0, 0.0, 0.0),
            (-1.0, 2.0, 0.0),
            (5.0, 0.0, 0.0),
            (1.0, 1.0, 1.0),
            (3.0, 0.5, 0.5),
            (-1.0, -1.0, 1.0),
            (2.0, -3.0, 3.0),
        ],
    )
    def test_closed_form(self, a, b, expected):
        """Valores calculados à mão."""
        assert dist_omega(OmegaPoint(a, b)) == expected

    def test_aliases(self):
        """a e b são os valores de G e H."""
        p = OmegaPoint(1.5, -2.0)
        assert (p.G, p.H) == (1.5, -2.0)

    def test_matches_brute_force_grid(self):
        """Forma fechada coincide com a projeção l1 por força bruta."""
        rng = np.random.default_rng(12345)
        points = rng.uniform(-5, 5, size=(10_000, 2))
        closed = dist_omega_array(points[:, 0], points[:, 1])
        brute = brute_force_dist_omega(points, step=GRID_STEP)
        assert np.max(np.abs(closed - brute)) <= 2 * GRID_STEP

    def test_array_matches_scalar(self):
        """Versão vetorizada coincide com a escalar."""
        rng = np.random.default_rng(1)
        points = rng.normal(size=(200, 2))
        array = dist_omega_array(points[:, 0], points[:, 1])
        scalar = [dist_omega(OmegaPoint(a, b)) for a, b in points]
        np.testing.assert_array_equal(array, scalar)

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(a=coordinates, b=coordinates)
    def test_zero_exactly_on_omega(self, a, b):
        """dist_Ω = 0 se e só se (a, b) ∈ Ω."""
        assert (dist_omega(OmegaPoint(a, b)) == 0.0) == in_omega(OmegaPoint(a, b))

    def test_zero_iff_in_omega_on_random_points(self):
        """dist_Ω = 0 ⟺ (a, b) ∈ Ω em 10⁵ pontos, metade sobre a grade de passo 0,5."""
        rng = np.random.default_rng(2024)
        points = rng.uniform(-5, 5, size=(100_000, 2))
        points[::2] = np.round(points[::2] * 2.0) / 2.0
        zero = dist_omega_array(points[:, 0], points[:, 1]) == 0.0
        member = np.array([in_omega(OmegaPoint(a, b)) for a, b in points])
        np.testing.assert_array_equal(zero, member)
        assert member.any() and not member.all()
        assert np.count_nonzero(points[:, 1] == 0.0) > 0

    @settings(max_examples=300, deadline=None, derandomize=True)
    @given(a=coordinates, b=coordinates, da=coordinates, db=coordinates)
    def test_lipschitz_in_l1(self, a, b, da, db):
        """dist_Ω é 1-Lipschitz na norma l1."""
        d1 = dist_omega(OmegaPoint(a, b))
        d2 = dist_omega(OmegaPoint(a + da, b + db))
        assert abs(d1 - d2) <= abs(da) + abs(db) + 1e-9


class TestInOmega:
    """Testes para in_omega."""

    def test_membership(self):
        """Reta b = 0 e quadrante a ≤ 0, b ≥ 0."""
        assert in_omega(OmegaPoint(7.0, 0.0))
        assert in_omega(OmegaPoint(-1.0, 3.0))
        assert not in_omega(OmegaPoint(1.0, 1.0))
        assert not in_omega(OmegaPoint(-1.0, -1e-3))

    def test_tolerance(self):
        """Com tolerância, violações pequenas são aceitas."""
        assert in_omega(OmegaPoint(0.0, -1e-9), tol=1e-8)


class TestPenalties:
    """Testes para P_α e P¹_α."""

    @pytest.fixture
    def pure_vc(self):
        return parse_problem("[vars] x y\n[objective] x + y\n[vc]\nG: x ; H: y\n")

    def test_tailored_value(self, ex22):
        """P_α = f + α·(g⁺ + dist_Ω)."""
        value = penalty_tailored(ex22, [1.0, -1.0], alpha=2.0)
        assert value.objective == 2.0
        assert value.violation == 2.0
        assert value.total == 6.0

    def test_tailored_zero_alpha(self, ex22):
        """Com α = 0 a penalidade é o objetivo."""
        assert penalty_tailored(ex22, [1.0, -1.0], 0.0).total == 2.0

    @pytest.mark.parametrize("alpha", [-1.0, float("nan"), float("inf")])
    def test_invalid_alpha(self, ex22, alpha):
        """α negativo ou não finito é recusado."""
        with pytest.raises(PenaltyError):
            penalty_tailored(ex22, [0.0, 0.0], alpha)

    def test_l1_requires_no_g_h(self, ex22):
        """P¹_α só existe sem g e h."""
        with pytest.raises(PenaltyError, match="without_inequalities"):
            penalty_l1(ex22, [0.0, 0.0], 1.0)

    def test_l1_value(self, pure_vc):
        """P¹_α = f + α·Σ max(−H, 0) + α·Σ max(G·H, 0)."""
        value = penalty_l1(pure_vc, [2.0, 3.0], alpha=0.5)
        assert value.violation == 6.0
        assert value.total == 5.0 + 3.0
        assert penalty_l1(pure_vc, [1.0, -2.0], alpha=1.0).violation == 2.0

    def test_l1_on_reduced_problem(self, ex22):
        """without_inequalities habilita P¹_α."""
        value = penalty_l1(ex22.without_inequalities(), [0.0, 0.0], 1.0)
        assert value.total == 0.0

    def test_penalty_error_is_value_error(self):
        """PenaltyError também é ValueError."""
        assert issubclass(PenaltyError, ValueError)

    def test_to_dict(self, ex22):
        """Serialização traz as quatro parcelas."""
        data = penalty_tailored(ex22, [0.0, 0.0], 1.0).to_dict()
        assert data == {"objective": 0.0, "violation": 0.0, "alpha": 1.0, "total": 0.0}


ALPHAS = (0.0, 0.1, 1.0, 10.0, 100.0)


def _grid_points(n, count, seed):
    """Pontos em [-1, 1]^n sobre a grade de passo 0,25 (atinge as fronteiras)."""
    rng = np.random.default_rng(seed)
    return np.round(rng.uniform(-1, 1, size=(count, n)) * 4.0) / 4.0


class TestPenaltyInvariants:
    """Monotonia em α e concordância das penalidades em pontos viáveis."""

    def test_tailored_monotone_in_alpha(self, fixture_problems):
        """P_α não decresce em α; cresce estritamente quando há violação."""
        for prob in fixture_problems.values():
            for x in _grid_points(prob.n, 60, seed=8):
                values = [penalty_tailored(prob, x, alpha) for alpha in ALPHAS]
                totals = [v.total for v in values]
                assert totals == sorted(totals)
                if values[0].violation > 0:
                    assert all(a < b for a, b in zip(totals, totals[1:]))
                else:
                    assert len(set(totals)) == 1

    def test_penalties_equal_objective_when_feasible(self, fixture_problems):
        """Em x viável, P_α(x) = P¹_α(x) = f(x) para todo α."""
        checked = 0
        for prob in fixture_problems.values():
            reduced = prob.without_inequalities()
            for x in _grid_points(prob.n, 200, seed=9):
                if not is_feasible(reduced, x, tol=0.0):
                    continue
                checked += 1
                f = reduced.objective_value(x)
                for alpha in ALPHAS:
                    assert penalty_tailored(reduced, x, alpha).total == f
                    assert penalty_l1(reduced, x, alpha).total == f
        assert checked > 30
