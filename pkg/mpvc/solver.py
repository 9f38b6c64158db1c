"""Minimização sem derivadas da penalidade exata P_α.

Busca padrão (compass search) com passos ± coordenados, diagonais por
pares e ±(1, ..., 1): aceita o melhor decréscimo estrito da sonda e
reduz o passo quando nenhuma sonda melhora.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from numpy.typing import NDArray

from .config import config
from .expr import EvaluationError
from .model import MpvcProblem
from .penalty import penalty_tailored

__all__ = [
    "SolveConfig",
    "SolveResult",
    "PatternSearchResult",
    "ProjectionResult",
    "pattern_search",
    "minimize_penalty",
    "solve_mpvc",
    "project_to_feasible",
]

logger = logging.getLogger(__name__)

DEFAULT_ALPHAS = (0.1, 1.0, 10.0, 100.0)
PROJECTION_BETA = 100.0


@dataclass(frozen=True)
class SolveConfig:
    """Parâmetros da busca padrão multistart.

    Sem `starts` explícitos, usa o centro mais `n_starts - 1` pontos
    uniformes na caixa centro ± box_radius (gerador semeado).
    """

    starts: tuple[tuple[float, ...], ...] = ()
    n_starts: int = 8
    center: tuple[float, ...] | None = None
    box_radius: float = 1.0
    max_iter: int = 20_000
    initial_step: float = 0.5
    shrink: float = 0.5
    stop_step: float = 1e-9
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    feas_tol: float = 1e-8
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.initial_step <= 0 or self.stop_step <= 0 or self.box_radius < 0:
            raise ValueError("Passos devem ser positivos e box_radius não negativo")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError(f"shrink deve estar em (0, 1), recebido {self.shrink}")
        if self.n_starts < 1 or self.max_iter < 1:
            raise ValueError("n_starts e max_iter devem ser positivos")
        if any(a < 0 for a in self.alphas) or list(self.alphas) != sorted(self.alphas):
            raise ValueError(f"alphas devem ser não negativos e crescentes: {self.alphas}")

    def start_points(self, n: int) -> list[NDArray[np.float64]]:
        if self.starts:
            points = [np.asarray(s, dtype=np.float64) for s in self.starts]
            for point in points:
                if point.shape != (n,):
                    raise ValueError(f"ponto inicial com dimensão {point.shape}, esperado ({n},)")
            return points
        center = np.zeros(n) if self.center is None else np.asarray(self.center, dtype=np.float64)
        seed = config.SEED if self.seed is None else self.seed
        rng = np.random.default_rng(seed)
        points = [center.copy()]
        for _ in range(self.n_starts - 1):
            points.append(center + rng.uniform(-self.box_radius, self.box_radius, size=n))
        return points


@dataclass
class PatternSearchResult:
    point: NDArray[np.float64]
    value: float
    iterations: int
    evaluations: int
    converged: bool


@dataclass
class SolveResult:
    point: NDArray[np.float64]
    value: float
    residual: float
    alpha: float
    iterations: int
    converged: bool
    failed_starts: int = 0
    stages: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": self.point.tolist(),
            "value": self.value,
            "residual": self.residual,
            "alpha": self.alpha,
            "iterations": self.iterations,
            "converged": self.converged,
            "failed_starts": self.failed_starts,
            "stages": self.stages,
        }


@dataclass
class ProjectionResult:
    point: NDArray[np.float64]
    distance: float
    residual: float


def _poll_pattern(n: int) -> NDArray[np.float64]:
    """Ordem fixa: +e_i, -e_i; depois ±e_i ± e_j (i < j); depois ±1."""
    eye = np.eye(n)
    rows: list[NDArray[np.float64]] = []
    for i in range(n):
        rows.append(eye[i])
        rows.append(-eye[i])
    for i in range(n):
        for j in range(i + 1, n):
            rows.append(eye[i] + eye[j])
            rows.append(eye[i] - eye[j])
            rows.append(-eye[i] + eye[j])
            rows.append(-eye[i] - eye[j])
    if n > 2:
        rows.append(np.ones(n))
        rows.append(-np.ones(n))
    return np.array(rows)


def pattern_search(
    fn: Callable[[NDArray[np.float64]], Any],
    x0: Sequence[float],
    initial_step: float,
    stop_step: float,
    shrink: float = 0.5,
    max_iter: int = 20_000,
    vectorized: bool = False,
) -> PatternSearchResult:
    """Busca padrão a partir de x0.

    Em cada iteração avalia todas as sondas; a de menor valor vence se
    melhorar estritamente (empates ficam com a primeira da ordem).

    Com `vectorized=True`, fn recebe a matriz (k, n) das sondas e devolve
    os k valores de uma vez. Valores não finitos nunca vencem.

    Raises:
        EvaluationError: Falha ao avaliar fn em alguma sonda.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    pattern = _poll_pattern(x.shape[0])

    def score(points: NDArray[np.float64]) -> NDArray[np.float64]:
        if vectorized:
            values = np.asarray(fn(points), dtype=np.float64)
        else:
            values = np.array([fn(p) for p in points], dtype=np.float64)
        return np.where(np.isfinite(values), values, np.inf)

    value = float(score(x[np.newaxis, :])[0])
    evaluations = 1
    step = initial_step
    iterations = 0
    while step >= stop_step and iterations < max_iter:
        iterations += 1
        trials = x + step * pattern
        values = score(trials)
        evaluations += len(trials)
        best = int(np.argmin(values))
        if values[best] < value:
            x, value = trials[best], float(values[best])
        else:
            step *= shrink
    return PatternSearchResult(
        point=x,
        value=value,
        iterations=iterations,
        evaluations=evaluations,
        converged=step < stop_step,
    )


def _better(candidate: tuple[float, NDArray[np.float64]], best: tuple[float, NDArray[np.float64]] | None) -> bool:
    if best is None:
        return True
    if candidate[0] != best[0]:
        return candidate[0] < best[0]
    return tuple(candidate[1].tolist()) < tuple(best[1].tolist())


def minimize_penalty(
    prob: MpvcProblem, alpha: float, cfg: SolveConfig | None = None
) -> SolveResult:
    """Minimiza P_α a partir de cada ponto inicial e devolve o melhor.

    Falha de avaliação numa sonda (divisão por zero) abandona só aquela
    partida.

    Raises:
        EvaluationError: Todas as partidas falharam.
    """
    cfg = cfg or SolveConfig()
    if alpha < 0:
        raise ValueError(f"alpha deve ser >= 0, recebido {alpha}")

    def objective(z: NDArray[np.float64]) -> float:
        return penalty_tailored(prob, z, alpha).total

    best: tuple[float, NDArray[np.float64]] | None = None
    iterations = 0
    failed = 0
    all_converged = True
    for index, start in enumerate(cfg.start_points(prob.n)):
        try:
            result = pattern_search(
                objective, start, cfg.initial_step, cfg.stop_step, cfg.shrink, cfg.max_iter
            )
        except EvaluationError as e:
            failed += 1
            logger.debug("Partida %d abandonada: %s", index, e)
            continue
        iterations += result.iterations
        all_converged = all_converged and result.converged
        if _better((result.value, result.point), best):
            best = (result.value, result.point)

    if best is None:
        raise EvaluationError(f"Todas as {failed} partidas falharam em '{prob.name}'")

    value, point = best
    residual = prob.residuals(point).total
    logger.debug(
        "P_α minimizada",
        extra={"extra_data": {"alpha": alpha, "value": value, "residual": residual}},
    )
    return SolveResult(
        point=point,
        value=value,
        residual=residual,
        alpha=float(alpha),
        iterations=iterations,
        converged=all_converged,
        failed_starts=failed,
    )


def solve_mpvc(prob: MpvcProblem, cfg: SolveConfig | None = None) -> SolveResult:
    """Continuação em α: cada estágio parte do melhor ponto anterior.

    Para assim que o resíduo fica ≤ feas_tol; `converged` indica se o
    ponto final é viável nessa tolerância.
    """
    cfg = cfg or SolveConfig()
    if not cfg.alphas:
        raise ValueError("A sequência de alphas não pode ser vazia")

    stage_cfg = cfg
    result: SolveResult | None = None
    stages: list[dict[str, Any]] = []
    total_iterations = 0
    for alpha in cfg.alphas:
        result = minimize_penalty(prob, alpha, stage_cfg)
        total_iterations += result.iterations
        stages.append({"alpha": alpha, "value": result.value, "residual": result.residual})
        logger.info("Estágio α=%g: resíduo %.3e", alpha, result.residual)
        if result.residual <= cfg.feas_tol:
            break
        stage_cfg = SolveConfig(
            starts=(tuple(result.point.tolist()),),
            max_iter=cfg.max_iter,
            initial_step=cfg.initial_step,
            shrink=cfg.shrink,
            stop_step=cfg.stop_step,
            alphas=cfg.alphas,
            feas_tol=cfg.feas_tol,
        )

    assert result is not None
    result.iterations = total_iterations
    result.converged = result.residual <= cfg.feas_tol
    result.stages = stages
    return result


def project_to_feasible(
    prob: MpvcProblem,
    p: Sequence[float],
    starts: Sequence[Sequence[float]] = (),
    initial_step: float = 0.1,
    stop_step: float = 1e-10,
    beta: float = PROJECTION_BETA,
) -> ProjectionResult:
    """Projeção l1 aproximada de p sobre a região viável.

    Minimiza ‖z − p‖₁ + β·resíduo(z) por busca padrão a partir de p e dos
    pontos extras em `starts`; devolve o melhor z encontrado.
    """
    target = prob.point(p)

    def objective(Z: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.abs(Z - target).sum(axis=1) + beta * prob.residuals_batch(Z)

    best: tuple[float, NDArray[np.float64]] | None = None
    for start in (target, *starts):
        result = pattern_search(objective, start, initial_step, stop_step, vectorized=True)
        if not np.isfinite(result.value):
            logger.debug("Projeção abandonou uma partida sem valor finito")
            continue
        if _better((result.value, result.point), best):
            best = (result.value, result.point)

    if best is None:
        return ProjectionResult(point=target, distance=np.inf, residual=np.inf)
    point = best[1]
    return ProjectionResult(
        point=point,
        distance=float(np.abs(point - target).sum()),
        residual=float(prob.residuals_batch(point)[0]),
    )
