"""Testes para posto, simplex e geradores de direções."""

import numpy as np
import pytest

from mpvc.numerics import (
    LpError,
    LpOutcome,
    LpProblem,
    LpStatus,
    Relation,
    gaussian_directions,
    halton,
    left_null_vector,
    rank,
    solve_lp,
    sphere_directions,
    unique_rows,
)
from tests.helpers import lp_vertex_optimum

LE, EQ, GE = Relation.LE, Relation.EQ, Relation.GE


class TestRank:
    """Testes para o posto numérico."""

    @pytest.mark.parametrize(
        "matrix, expected",
        [
            ([[1, 0], [0, 1]], 2),
            ([[1, -1], [1, -1]], 1),
            ([[1, -1], [0, 1], [1, 0]], 2),
            ([[0, 0], [0, 0]], 0),
        ],
    )
    def test_examples(self, matrix, expected):
        """Identidade, linha repetida e pilha de gradientes."""
        assert rank(matrix) == expected

    def test_empty_matrix(self):
        """Matriz vazia tem posto 0."""
        assert rank(np.zeros((0, 3))) == 0

    def test_tiny_pivot_counts_as_zero(self):
        """Pivôs abaixo de tol·max|entrada| são descartados."""
        assert rank([[1.0, 0.0], [0.0, 1e-12]]) == 1
        assert rank([[1.0, 0.0], [0.0, 1e-12]], tol=1e-14) == 2

    def test_invalid_tol(self):
        """tol precisa ser positivo."""
        with pytest.raises(ValueError):
            rank([[1.0]], tol=0.0)

    def test_random_low_rank_and_transpose(self):
        """rank(M) = rank(Mᵀ) = posto construído, até 8×8."""
        rng = np.random.default_rng(2024)
        for _ in range(100):
            rows, cols = rng.integers(1, 9, size=2)
            k = int(rng.integers(1, 9))
            M = rng.normal(size=(rows, k)) @ rng.normal(size=(k, cols))
            expected = min(rows, cols, k)
            assert rank(M) == expected
            assert rank(M.T) == expected


class TestLeftNullVector:
    """Testes para left_null_vector."""

    def test_tall_matrix(self):
        """Mais linhas que colunas: yᵀM = 0 com ‖y‖₁ = 1."""
        M = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        y = left_null_vector(M)
        assert np.abs(y).sum() == pytest.approx(1.0)
        np.testing.assert_allclose(y @ M, 0.0, atol=1e-12)
        assert y[np.argmax(np.abs(y))] > 0

    def test_no_rows(self):
        """Matriz sem linhas é recusada."""
        with pytest.raises(ValueError):
            left_null_vector(np.zeros((0, 2)))


class TestSolveLp:
    """Testes para o simplex de duas fases."""

    def test_single_bound(self):
        """max x s.a. x ≤ 3."""
        outcome = solve_lp(LpProblem([1.0], [[1.0]], [LE], [3.0]))
        assert outcome.status is LpStatus.OPTIMAL
        assert outcome.value == pytest.approx(3.0)

    def test_free_variable_split(self):
        """max s s.a. d1 ≤ −s, d2 = 0, d1 livre, 0 ≤ s ≤ 1."""
        p = LpProblem(
            objective=[0.0, 0.0, 1.0],
            matrix=[[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
            relations=[LE, EQ],
            rhs=[0.0, 0.0],
            lower=[-np.inf, -np.inf, 0.0],
            upper=[np.inf, np.inf, 1.0],
        )
        outcome = solve_lp(p)
        assert outcome.status is LpStatus.OPTIMAL
        assert outcome.value == pytest.approx(1.0)
        d1, d2, s = outcome.x
        assert d1 + s <= 1e-9
        assert d2 == pytest.approx(0.0, abs=1e-12)

    def test_infeasible(self):
        """x = 1 e x = 2 ao mesmo tempo."""
        outcome = solve_lp(LpProblem([0.0], [[1.0], [1.0]], [EQ, EQ], [1.0, 2.0]))
        assert outcome.status is LpStatus.INFEASIBLE
        assert outcome.x is None

    def test_unbounded(self):
        """max x s.a. x ≥ 1."""
        outcome = solve_lp(LpProblem([1.0], [[1.0]], [GE], [1.0]))
        assert outcome.status is LpStatus.UNBOUNDED

    def test_negative_rhs_normalized(self):
        """Linha com b < 0 é virada sem mudar a solução."""
        outcome = solve_lp(LpProblem([-1.0], [[-1.0]], [LE], [-2.0]))
        assert outcome.status is LpStatus.OPTIMAL
        assert outcome.x[0] == pytest.approx(2.0)

    def test_redundant_equalities(self):
        """Igualdades repetidas não atrapalham a fase 1."""
        p = LpProblem([1.0, 1.0], [[1.0, 1.0], [2.0, 2.0]], [EQ, EQ], [1.0, 2.0])
        outcome = solve_lp(p)
        assert outcome.status is LpStatus.OPTIMAL
        assert outcome.value == pytest.approx(1.0)

    def test_matches_vertex_enumeration(self):
        """Valor ótimo coincide com a enumeração de vértices (até 5 variáveis, 6 restrições)."""
        rng = np.random.default_rng(99)
        dimensions = set()
        for _ in range(200):
            n = int(rng.integers(1, 6))
            rows = int(rng.integers(1, 6))
            dimensions.add(n)
            A = np.vstack([rng.uniform(-3, 3, size=(rows, n)), np.ones((1, n))])
            b = np.concatenate([rng.uniform(0.5, 5, size=rows), [10.0]])
            c = rng.uniform(-2, 2, size=n)
            outcome = solve_lp(LpProblem(c, A, [LE] * (rows + 1), b))
            expected = lp_vertex_optimum(c, A, b)
            assert outcome.status is LpStatus.OPTIMAL
            assert outcome.value == pytest.approx(expected, abs=1e-9)
            assert np.all(A @ outcome.x <= b + 1e-9)
            assert np.all(outcome.x >= -1e-12)
        assert dimensions == {1, 2, 3, 4, 5}

    def test_deterministic(self):
        """Mesma entrada, mesma solução."""
        p = LpProblem([1.0, 1.0], [[1.0, 1.0]], [LE], [1.0])
        first, second = solve_lp(p), solve_lp(p)
        np.testing.assert_array_equal(first.x, second.x)

    def test_to_dict(self):
        """Serialização usa o nome do status."""
        data = solve_lp(LpProblem([1.0], [[1.0]], [LE], [3.0])).to_dict()
        assert data["status"] == "OPTIMAL"
        assert data["x"] == pytest.approx([3.0])
        assert LpOutcome(LpStatus.INFEASIBLE).to_dict()["x"] is None


class TestLpProblem:
    """Testes para a validação de LpProblem."""

    def test_inconsistent_rows(self):
        """Número de relações diferente do número de linhas."""
        with pytest.raises(LpError, match="inconsistentes"):
            LpProblem([1.0, 1.0], [[1.0, 0.0]], [LE, LE], [1.0])

    def test_invalid_lower_bound(self):
        """Limite inferior só pode ser 0 ou -inf."""
        with pytest.raises(LpError, match="limite inferior"):
            LpProblem([1.0], [[1.0]], [LE], [1.0], lower=[1.0])

    def test_bounds_dimension(self):
        """Limites com dimensão errada."""
        with pytest.raises(LpError):
            LpProblem([1.0, 1.0], [[1.0, 1.0]], [LE], [1.0], upper=[1.0])

    def test_negative_upper(self):
        """Limite superior negativo é recusado."""
        with pytest.raises(LpError):
            LpProblem([1.0], [[1.0]], [LE], [1.0], upper=[-1.0])


class TestDirections:
    """Testes para os geradores de direções."""

    def test_plane_axes_exact(self):
        """Em R², quatro direções saem exatamente nos eixos."""
        np.testing.assert_array_equal(
            sphere_directions(2, 4),
            [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]],
        )

    def test_axes_appended_in_plane(self):
        """Em R² com count sem múltiplo de 4, os eixos que faltam vão para o fim."""
        directions = sphere_directions(2, 6)
        assert directions.shape == (8, 2)
        np.testing.assert_array_equal(directions[-2:], [[0.0, 1.0], [0.0, -1.0]])
        np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)

    def test_without_axes_in_plane(self):
        """include_axes=False devolve só os ângulos pedidos."""
        directions = sphere_directions(2, 6, include_axes=False)
        assert directions.shape == (6, 2)
        assert not any(np.array_equal(d, [0.0, 1.0]) for d in directions)

    def test_line(self):
        """Em R só há ±1."""
        np.testing.assert_array_equal(sphere_directions(1, 10), [[1.0], [-1.0]])

    def test_higher_dimension_unit_with_axes(self):
        """Em R³ as direções são unitárias e terminam com ±eixos."""
        directions = sphere_directions(3, 20)
        np.testing.assert_allclose(np.linalg.norm(directions, axis=1), 1.0)
        np.testing.assert_array_equal(directions[-6:], np.vstack([np.eye(3), -np.eye(3)]))

    def test_invalid_arguments(self):
        """n e count precisam ser positivos."""
        with pytest.raises(ValueError):
            sphere_directions(0, 4)
        with pytest.raises(ValueError):
            sphere_directions(2, 0)

    def test_halton_first_points(self):
        """Base 2 gera 1/2, 1/4, 3/4."""
        np.testing.assert_allclose(halton(3, 1)[:, 0], [0.5, 0.25, 0.75])

    def test_halton_dimension_limit(self):
        """Mais dimensões que bases primas disponíveis."""
        with pytest.raises(ValueError):
            halton(2, 17)

    def test_gaussian_seeded(self):
        """Mesma semente, mesmas direções unitárias."""
        first = gaussian_directions(3, 50, seed=5)
        np.testing.assert_array_equal(first, gaussian_directions(3, 50, seed=5))
        np.testing.assert_allclose(np.linalg.norm(first, axis=1), 1.0)

    def test_unique_rows(self):
        """Duplicatas até 12 casas decimais somem; a ordem fica."""
        a, b = np.array([1.0, 0.0]), np.array([0.0, 1.0])
        result = unique_rows([a, b, a + 1e-14, b])
        assert len(result) == 2
        np.testing.assert_array_equal(result[0], a)
        np.testing.assert_array_equal(result[1], b)
