"""Álgebra linear densa e programação linear de pequeno porte.

O simplex usa tableau denso em duas fases com a regra de Bland, o que
garante término e resultado determinístico. Os problemas gerados pelos
certificados têm poucas dezenas de variáveis.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "Relation",
    "LpStatus",
    "LpProblem",
    "LpOutcome",
    "LpError",
    "rank",
    "left_null_vector",
    "solve_lp",
    "halton",
    "sphere_directions",
    "gaussian_directions",
    "unique_rows",
]

logger = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-10
PIVOT_TOL = 1e-11
FEASIBILITY_TOL = 1e-9

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


class LpError(Exception):
    """LP mal formado ou simplex sem convergência."""


class Relation(Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class LpStatus(Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"


def rank(matrix: ArrayLike, tol: float = DEFAULT_RANK_TOL) -> int:
    """Posto numérico por eliminação com pivoteamento parcial.

    Pivôs com módulo ≤ tol·max|entrada| contam como zero. Matriz vazia
    tem posto 0.
    """
    if tol <= 0:
        raise ValueError(f"tol deve ser positivo, recebido {tol!r}")
    M = np.array(matrix, dtype=np.float64, ndmin=2)
    if M.size == 0:
        return 0
    scale = float(np.max(np.abs(M)))
    if scale == 0.0:
        return 0
    threshold = tol * scale
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = r + int(np.argmax(np.abs(M[r:, c])))
        if abs(M[pivot, c]) <= threshold:
            continue
        if pivot != r:
            M[[r, pivot]] = M[[pivot, r]]
        M[r + 1:] -= np.outer(M[r + 1:, c] / M[r, c], M[r])
        r += 1
    return r


def left_null_vector(matrix: ArrayLike) -> NDArray[np.float64]:
    """Vetor y com ‖y‖₁ = 1 e yᵀM ≈ 0 (direção singular de menor valor).

    Para matrizes com mais linhas que colunas sempre existe y exato.
    """
    M = np.array(matrix, dtype=np.float64, ndmin=2)
    if M.shape[0] == 0:
        raise ValueError("matriz sem linhas não tem vetor nulo à esquerda")
    U, _, _ = np.linalg.svd(M, full_matrices=True)
    y = U[:, -1]
    pivot = int(np.argmax(np.abs(y)))
    if y[pivot] < 0:
        y = -y
    y = np.where(np.abs(y) < 1e-14, 0.0, y)
    return y / np.abs(y).sum()


@dataclass
class LpProblem:
    """max cᵀx s.a. linhas A_i x (≤ | = | ≥) b_i, lower ≤ x ≤ upper.

    `lower` aceita apenas 0 ou -inf; `upper` aceita +inf ou valor finito.
    """

    objective: NDArray[np.float64]
    matrix: NDArray[np.float64]
    relations: list[Relation]
    rhs: NDArray[np.float64]
    lower: NDArray[np.float64] | None = None
    upper: NDArray[np.float64] | None = None

    def __post_init__(self) -> None:
        self.objective = np.asarray(self.objective, dtype=np.float64).reshape(-1)
        n = self.objective.shape[0]
        self.matrix = np.asarray(self.matrix, dtype=np.float64).reshape(-1, n)
        self.rhs = np.asarray(self.rhs, dtype=np.float64).reshape(-1)
        self.relations = list(self.relations)
        rows = self.matrix.shape[0]
        if self.rhs.shape[0] != rows or len(self.relations) != rows:
            raise LpError(
                f"dimensões inconsistentes: {rows} linhas, {self.rhs.shape[0]} rhs, "
                f"{len(self.relations)} relações"
            )
        self.lower = (
            np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=np.float64)
        )
        self.upper = (
            np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=np.float64)
        )
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise LpError(f"limites devem ter dimensão {n}")
        for j, low in enumerate(self.lower):
            if not (low == 0.0 or low == -np.inf):
                raise LpError(f"limite inferior da variável {j} deve ser 0 ou -inf, recebido {low}")
        if np.any(np.isnan(self.upper)) or np.any(self.upper < 0):
            raise LpError("limites superiores devem ser >= 0")

    @property
    def num_vars(self) -> int:
        return self.objective.shape[0]


@dataclass
class LpOutcome:
    status: LpStatus
    value: float | None = None
    x: NDArray[np.float64] | None = None
    iterations: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "value": self.value,
            "x": None if self.x is None else self.x.tolist(),
        }


@dataclass
class _Tableau:
    T: NDArray[np.float64]
    basis: list[int]
    iterations: int = 0
    max_iter: int = 0

    def pivot(self, row: int, col: int) -> None:
        self.T[row] /= self.T[row, col]
        others = np.arange(self.T.shape[0]) != row
        self.T[others] -= np.outer(self.T[others, col], self.T[row])
        self.basis[row] = col

    def run(self, cost: NDArray[np.float64], allowed: int) -> LpStatus:
        """Maximiza costᵀy sobre as primeiras `allowed` colunas (Bland)."""
        while True:
            if self.iterations >= self.max_iter:
                raise LpError(f"simplex excedeu {self.max_iter} iterações")
            body = self.T[:, :allowed]
            reduced = cost[:allowed] - cost[self.basis] @ body
            candidates = np.flatnonzero(reduced > PIVOT_TOL)
            if candidates.size == 0:
                return LpStatus.OPTIMAL
            entering = int(candidates[0])
            column = body[:, entering]
            positive = np.flatnonzero(column > PIVOT_TOL)
            if positive.size == 0:
                return LpStatus.UNBOUNDED
            ratios = self.T[positive, -1] / column[positive]
            best = ratios.min()
            ties = positive[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            leaving = int(min(ties, key=lambda r: self.basis[r]))
            self.pivot(leaving, entering)
            self.iterations += 1


def _standard_form(
    p: LpProblem,
) -> tuple[NDArray[np.float64], NDArray[np.float64], list[Relation], NDArray[np.float64], list[tuple[int, int]]]:
    """Divide variáveis livres e transforma limites superiores em linhas.

    Retorna (c, A, relações, b, mapa) onde mapa[j] = (coluna+, coluna-)
    com coluna- = -1 para variáveis não negativas.
    """
    columns: list[NDArray[np.float64]] = []
    costs: list[float] = []
    mapping: list[tuple[int, int]] = []
    for j in range(p.num_vars):
        plus = len(columns)
        columns.append(p.matrix[:, j])
        costs.append(p.objective[j])
        minus = -1
        if p.lower[j] == -np.inf:
            minus = len(columns)
            columns.append(-p.matrix[:, j])
            costs.append(-p.objective[j])
        mapping.append((plus, minus))

    width = len(columns)
    A = np.column_stack(columns) if columns else np.zeros((p.matrix.shape[0], 0))
    A = A.reshape(p.matrix.shape[0], width)
    relations = list(p.relations)
    b = p.rhs.copy()

    extra_rows = []
    extra_rhs = []
    for j, (plus, minus) in enumerate(mapping):
        if np.isfinite(p.upper[j]):
            row = np.zeros(width)
            row[plus] = 1.0
            if minus >= 0:
                row[minus] = -1.0
            extra_rows.append(row)
            extra_rhs.append(p.upper[j])
    if extra_rows:
        A = np.vstack([A, np.array(extra_rows)])
        b = np.concatenate([b, extra_rhs])
        relations += [Relation.LE] * len(extra_rows)
    return np.array(costs, dtype=np.float64), A, relations, b, mapping


def solve_lp(p: LpProblem) -> LpOutcome:
    """Resolve o LP pelo simplex de duas fases com regra de Bland.

    Em problemas degenerados devolve o primeiro vértice ótimo encontrado
    pela regra de Bland.

    Raises:
        LpError: Dimensões inconsistentes ou limite de iterações atingido.
    """
    c, A, relations, b, mapping = _standard_form(p)
    rows, width = A.shape

    # Normaliza sinais para b >= 0
    flip = {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}
    for i in range(rows):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
            relations[i] = flip[relations[i]]

    n_slack = sum(1 for rel in relations if rel is not Relation.EQ)
    n_art = sum(1 for rel in relations if rel is not Relation.LE)
    total_cols = width + n_slack + n_art
    T = np.zeros((rows, total_cols + 1))
    T[:, :width] = A
    T[:, -1] = b
    basis: list[int] = []
    slack_col = width
    art_col = width + n_slack
    artificials: list[int] = []
    for i, rel in enumerate(relations):
        if rel is Relation.LE:
            T[i, slack_col] = 1.0
            basis.append(slack_col)
            slack_col += 1
        elif rel is Relation.GE:
            T[i, slack_col] = -1.0
            slack_col += 1
            T[i, art_col] = 1.0
            basis.append(art_col)
            artificials.append(art_col)
            art_col += 1
        else:
            T[i, art_col] = 1.0
            basis.append(art_col)
            artificials.append(art_col)
            art_col += 1

    max_iter = 50 * (rows + total_cols) + 1000
    tableau = _Tableau(T=T, basis=basis, max_iter=max_iter)
    real_cols = width + n_slack

    if artificials:
        phase_one = np.zeros(total_cols)
        phase_one[real_cols:] = -1.0
        tableau.run(phase_one, total_cols)
        infeasibility = float(tableau.T[:, -1] @ (-phase_one[tableau.basis]))
        if infeasibility > FEASIBILITY_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            logger.debug("LP inviável (fase 1 = %.3e)", infeasibility)
            return LpOutcome(status=LpStatus.INFEASIBLE, iterations=tableau.iterations)
        # Retira artificiais remanescentes da base; linhas sem pivô são redundantes
        redundant: list[int] = []
        for r, col in enumerate(tableau.basis):
            if col < real_cols:
                continue
            candidates = np.flatnonzero(np.abs(tableau.T[r, :real_cols]) > PIVOT_TOL)
            if candidates.size:
                tableau.pivot(r, int(candidates[0]))
            else:
                redundant.append(r)
        if redundant:
            keep = [r for r in range(rows) if r not in redundant]
            tableau.T = tableau.T[keep]
            tableau.basis = [tableau.basis[r] for r in keep]

    tableau.T = np.hstack([tableau.T[:, :real_cols], tableau.T[:, -1:]])
    cost = np.concatenate([c, np.zeros(n_slack)])
    status = tableau.run(cost, real_cols)
    if status is LpStatus.UNBOUNDED:
        return LpOutcome(status=LpStatus.UNBOUNDED, iterations=tableau.iterations)

    y = np.zeros(real_cols)
    for r, col in enumerate(tableau.basis):
        y[col] = tableau.T[r, -1]
    x = np.array(
        [y[plus] - (y[minus] if minus >= 0 else 0.0) for plus, minus in mapping],
        dtype=np.float64,
    )
    value = float(p.objective @ x) if x.size else 0.0
    return LpOutcome(status=LpStatus.OPTIMAL, value=value, x=x, iterations=tableau.iterations)


# =============================================================================
# Direções de amostragem
# =============================================================================

def halton(count: int, dim: int, skip: int = 1) -> NDArray[np.float64]:
    """Sequência de Halton em [0, 1)^dim (bases primas)."""
    if dim > len(_PRIMES):
        raise ValueError(f"Halton suporta até {len(_PRIMES)} dimensões")
    points = np.empty((count, dim))
    for d in range(dim):
        base = _PRIMES[d]
        for k in range(count):
            index = k + skip
            fraction = 1.0
            value = 0.0
            while index > 0:
                fraction /= base
                value += fraction * (index % base)
                index //= base
            points[k, d] = value
    return points


def _snap(directions: NDArray[np.float64]) -> NDArray[np.float64]:
    directions = np.where(np.abs(directions) < 1e-12, 0.0, directions)
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def sphere_directions(n: int, count: int, include_axes: bool = True) -> NDArray[np.float64]:
    """Direções unitárias (l2) determinísticas e bem espalhadas.

    n = 1: ±1. n = 2: ângulos 2πk/count, com componentes minúsculas
    zeradas para que os eixos saiam exatos. n ≥ 3: pontos de Halton
    levados a [-1, 1]^n e normalizados. Com `include_axes`, os ±eixos que
    faltarem entram no fim (sem repetir os que a amostra já tem).
    """
    if n < 1 or count < 1:
        raise ValueError("n e count devem ser positivos")
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        angles = 2.0 * np.pi * np.arange(count) / count
        sample = _snap(np.column_stack([np.cos(angles), np.sin(angles)]))
    else:
        raw = 2.0 * halton(count, n) - 1.0
        sample = _snap(raw[np.linalg.norm(raw, axis=1) > 1e-6])
    if not include_axes:
        return sample
    axes = np.eye(n)
    return np.array(unique_rows([*sample, *axes, *(-axes)]))


def gaussian_directions(n: int, count: int, seed: int) -> NDArray[np.float64]:
    """Direções unitárias aleatórias com gerador semeado."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((count, n))
    norms = np.linalg.norm(raw, axis=1)
    raw = raw[norms > 1e-12]
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def unique_rows(rows: Sequence[NDArray[np.float64]], decimals: int = 12) -> list[NDArray[np.float64]]:
    """Remove linhas repetidas preservando a ordem."""
    seen: set[tuple[float, ...]] = set()
    result = []
    for row in rows:
        key = tuple(np.round(row, decimals).tolist())
        if key in seen:
            continue
        seen.add(key)
        result.append(row)
    return result
