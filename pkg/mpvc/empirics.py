"""Ensaios empíricos: cota de erro local, exatidão da penalidade e sonda de ACQ.

Nenhum destes ensaios prova nada: CORROBORATED quer dizer que nenhum
contraexemplo apareceu entre as amostras.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from .cones import (
    DEFAULT_SCHEDULE,
    ConeMembershipReport,
    ProbeVerdict,
    in_linearized_mpvc,
    in_linearized_product,
    tangent_probe,
)
from .config import config
from .model import IndexSets, MpvcProblem, classify
from .numerics import sphere_directions
from .solver import SolveConfig, minimize_penalty, project_to_feasible

__all__ = [
    "AcqStatus",
    "ErrorBoundSample",
    "ErrorBoundScan",
    "PenaltyRow",
    "PenaltyProfile",
    "AcqProbeReport",
    "scan_error_bound",
    "penalty_sweep",
    "probe_acq",
    "acq_directions",
]

logger = logging.getLogger(__name__)

RATIO_FLOOR = 1e-10
UNBOUNDED_THRESHOLD = 1e4
GRID_HALF_WIDTH = 200
GRID_FEASIBLE_TOL = 1e-12
INCLUSION_SLACK = 1e-9
EXACT_TOL = 1e-6
DEFAULT_SWEEP_ALPHAS = (0.0, 0.1, 1.0, 10.0)


class AcqStatus(Enum):
    CORROBORATED = "CORROBORATED"
    REFUTED = "REFUTED"


# =============================================================================
# Cota de erro
# =============================================================================

@dataclass(frozen=True)
class ErrorBoundSample:
    point: tuple[float, ...]
    distance: float
    residual: float
    ratio: float | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": list(self.point),
            "distance": self.distance,
            "residual": self.residual,
            "ratio": self.ratio,
        }


@dataclass
class ErrorBoundScan:
    """Razões dist_C/resíduo em amostras uniformes da bola l1 em torno de x*."""

    center: NDArray[np.float64]
    radius: float
    samples: list[ErrorBoundSample]
    c_hat: float
    unbounded_flag: bool
    oracle: str
    error_bar: float | None
    ratio_floor: float = RATIO_FLOOR

    @property
    def ratios(self) -> list[float]:
        return [s.ratio for s in self.samples if s.ratio is not None]

    @property
    def approximate(self) -> bool:
        return self.error_bar is None

    def to_dict(self, include_samples: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "center": self.center.tolist(),
            "radius": self.radius,
            "sample_count": len(self.samples),
            "ratio_count": len(self.ratios),
            "c_hat": self.c_hat,
            "unbounded_flag": self.unbounded_flag,
            "oracle": self.oracle,
            "error_bar": self.error_bar,
            "ratio_floor": self.ratio_floor,
        }
        if include_samples:
            data["samples"] = [s.to_dict() for s in self.samples]
        return data


def _ball_samples(n: int, radius: float, count: int, seed: int) -> NDArray[np.float64]:
    """Pontos uniformes na bola l1 de raio `radius` centrada na origem.

    Cada amostra consome o gerador na mesma ordem, então dobrar `count`
    preserva as primeiras amostras.
    """
    rng = np.random.default_rng(seed)
    points = np.empty((count, n))
    for k in range(count):
        weights = rng.exponential(size=n + 1)
        signs = rng.choice(np.array([-1.0, 1.0]), size=n)
        points[k] = radius * signs * weights[:n] / weights.sum()
    return points


class _GridOracle:
    """dist_C por força bruta numa grade de passo radius/200 e largura 2·radius.

    O ponto mais próximo da grade serve de partida para uma projeção por
    busca direta; a estimativa é o menor dos dois valores.
    """

    def __init__(self, prob: MpvcProblem, center: NDArray[np.float64], radius: float) -> None:
        self.prob = prob
        self.step = radius / GRID_HALF_WIDTH
        offsets = self.step * np.arange(-GRID_HALF_WIDTH, GRID_HALF_WIDTH + 1)
        axes = [c + offsets for c in center]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, prob.n)
        feasible = prob.residuals_batch(grid) <= GRID_FEASIBLE_TOL
        self.points = grid[feasible]
        logger.debug(
            "Grade do oráculo",
            extra={"extra_data": {"points": grid.shape[0], "feasible": int(feasible.sum())}},
        )

    @property
    def error_bar(self) -> float:
        return 2.0 * self.step

    def distance(self, z: NDArray[np.float64]) -> float:
        if self.points.shape[0] == 0:
            projection = project_to_feasible(self.prob, z)
            return projection.distance + projection.residual
        distances = np.abs(self.points - z).sum(axis=1)
        nearest = int(np.argmin(distances))
        projection = project_to_feasible(self.prob, z, starts=(self.points[nearest],))
        return min(float(distances[nearest]), projection.distance + projection.residual)


def scan_error_bound(
    prob: MpvcProblem,
    x_star: Sequence[float],
    radius: float = 0.1,
    samples: int = 500,
    seed: int | None = None,
    ratio_floor: float = RATIO_FLOOR,
    unbounded_threshold: float = UNBOUNDED_THRESHOLD,
    tol_active: float | None = None,
) -> ErrorBoundScan:
    """Estima a constante c da cota dist_C(x) ≤ c·resíduo(x) perto de x*.

    Para n ≤ 2 usa o oráculo de grade (barra de erro 2·passo); para n > 2
    projeta por busca direta e marca o resultado como aproximado.

    Raises:
        InfeasiblePointError: x* inviável.
    """
    if radius <= 0 or samples < 0:
        raise ValueError(f"raio deve ser > 0 e samples >= 0 (raio={radius}, samples={samples})")
    center = prob.point(x_star)
    classify(prob, center, tol_active)
    seed = config.SEED if seed is None else seed

    grid = _GridOracle(prob, center, radius) if prob.n <= 2 else None
    records: list[ErrorBoundSample] = []
    for offset in _ball_samples(prob.n, radius, samples, seed):
        z = center + offset
        residual = prob.residuals(z).total
        if residual == 0.0:
            records.append(ErrorBoundSample(tuple(z.tolist()), 0.0, 0.0, None))
            continue
        if grid is not None:
            distance = grid.distance(z)
        else:
            projection = project_to_feasible(prob, z, starts=(center,))
            distance = projection.distance + projection.residual
        ratio = distance / residual if residual > ratio_floor else None
        records.append(ErrorBoundSample(tuple(z.tolist()), distance, residual, ratio))

    ratios = [r.ratio for r in records if r.ratio is not None]
    c_hat = max(ratios, default=0.0)
    scan = ErrorBoundScan(
        center=center,
        radius=radius,
        samples=records,
        c_hat=c_hat,
        unbounded_flag=bool(c_hat > unbounded_threshold),
        oracle="grid" if grid is not None else "direct-search (approximate)",
        error_bar=grid.error_bar if grid is not None else None,
        ratio_floor=ratio_floor,
    )
    logger.info(
        "Varredura da cota de erro em '%s': c_hat=%.4g", prob.name, c_hat,
        extra={"extra_data": scan.to_dict()},
    )
    return scan


# =============================================================================
# Exatidão da penalidade
# =============================================================================

@dataclass(frozen=True)
class PenaltyRow:
    alpha: float
    point: tuple[float, ...]
    value: float
    residual: float
    distance: float
    exact: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha": self.alpha,
            "point": list(self.point),
            "value": self.value,
            "residual": self.residual,
            "distance": self.distance,
            "exact": self.exact,
        }


@dataclass
class PenaltyProfile:
    center: NDArray[np.float64]
    rows: list[PenaltyRow]
    alpha_bar: float | None
    exact_tol: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": self.center.tolist(),
            "rows": [row.to_dict() for row in self.rows],
            "alpha_bar": self.alpha_bar,
            "exact_tol": self.exact_tol,
        }


def penalty_sweep(
    prob: MpvcProblem,
    x_star: Sequence[float],
    alphas: Sequence[float] = DEFAULT_SWEEP_ALPHAS,
    inner_cfg: SolveConfig | None = None,
    exact_tol: float = EXACT_TOL,
) -> PenaltyProfile:
    """Minimiza P_α para cada α da grade com partidas em torno de x*.

    alpha_bar é o menor α da grade a partir do qual todos os minimizadores
    ficam a no máximo exact_tol de x* (None se nem o último fica).
    """
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("A grade de alphas não pode ser vazia")
    if any(a < 0 for a in alphas) or any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError(f"alphas devem ser não negativos e estritamente crescentes: {alphas}")
    center = prob.point(x_star)
    cfg = inner_cfg or SolveConfig(center=tuple(center.tolist()))

    rows = []
    for alpha in alphas:
        result = minimize_penalty(prob, alpha, cfg)
        distance = float(np.abs(result.point - center).sum())
        rows.append(PenaltyRow(
            alpha=alpha,
            point=tuple(result.point.tolist()),
            value=result.value,
            residual=result.residual,
            distance=distance,
            exact=distance <= exact_tol,
        ))

    alpha_bar: float | None = None
    for index in range(len(rows) - 1, -1, -1):
        if not rows[index].exact:
            break
        alpha_bar = rows[index].alpha

    profile = PenaltyProfile(center=center, rows=rows, alpha_bar=alpha_bar, exact_tol=exact_tol)
    logger.info(
        "Varredura de penalidade em '%s': alpha_bar=%s", prob.name, alpha_bar,
        extra={"extra_data": profile.to_dict()},
    )
    return profile


# =============================================================================
# Sonda de ACQ
# =============================================================================

@dataclass
class AcqProbeReport:
    entries: list[ConeMembershipReport]
    acq_mpvc: AcqStatus
    acq_product: AcqStatus
    counterexamples_mpvc: list[tuple[float, ...]] = field(default_factory=list)
    counterexamples_product: list[tuple[float, ...]] = field(default_factory=list)
    inclusion_violations: list[tuple[float, ...]] = field(default_factory=list)
    mismatch_examples: list[tuple[float, ...]] = field(default_factory=list)

    @property
    def cone_mismatches(self) -> int:
        return len(self.mismatch_examples)

    @property
    def probed(self) -> int:
        return sum(1 for e in self.entries if e.in_T_numeric is not None)

    def verdict_counts(self) -> dict[str, int]:
        counts = {v.value: 0 for v in ProbeVerdict}
        for entry in self.entries:
            if entry.in_T_numeric is not None:
                counts[entry.in_T_numeric.value] += 1
        return counts

    def to_dict(self, include_entries: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {
            "directions": len(self.entries),
            "probed": self.probed,
            "verdict_counts": self.verdict_counts(),
            "acq_mpvc": self.acq_mpvc.value,
            "acq_product": self.acq_product.value,
            "counterexamples_mpvc": [list(d) for d in self.counterexamples_mpvc],
            "counterexamples_product": [list(d) for d in self.counterexamples_product],
            "inclusion_violations": [list(d) for d in self.inclusion_violations],
            "cone_mismatches": self.cone_mismatches,
        }
        if include_entries:
            data["entries"] = [e.to_dict() for e in self.entries]
        return data


def acq_directions(n: int, count: int | None = None) -> NDArray[np.float64]:
    """Direções determinísticas normalizadas em l1."""
    count = config.ACQ_DIRECTIONS if count is None else count
    directions = sphere_directions(n, count)
    return directions / np.abs(directions).sum(axis=1, keepdims=True)


def probe_acq(
    prob: MpvcProblem,
    x_star: Sequence[float],
    directions: int | NDArray[np.float64] | None = None,
    sets: IndexSets | None = None,
    probe_all: bool = False,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    match_tol: float | None = None,
    no_margin: float | None = None,
    tol_active: float | None = None,
) -> AcqProbeReport:
    """Compara os cones linearizados com a sonda numérica de T_C.

    Por padrão só sonda direções em L_MPVC ∪ L_C: uma direção fora dos
    dois nunca é contraexemplo. Registra também YES fora de L_C, que
    contradiria T_C ⊆ L_C.

    Raises:
        InfeasiblePointError: x* inviável.
    """
    center = prob.point(x_star)
    sets = sets or classify(prob, center, tol_active)
    if directions is None or isinstance(directions, int):
        sample = acq_directions(prob.n, directions)
    else:
        sample = np.atleast_2d(np.asarray(directions, dtype=np.float64))

    entries: list[ConeMembershipReport] = []
    counter_mpvc: list[tuple[float, ...]] = []
    counter_product: list[tuple[float, ...]] = []
    inclusion: list[tuple[float, ...]] = []
    mismatches: list[tuple[float, ...]] = []
    for d in sample:
        key = tuple(d.tolist())
        in_mpvc = in_linearized_mpvc(prob, center, sets, d)
        in_product = in_linearized_product(prob, center, sets, d)
        if in_mpvc != in_product:
            mismatches.append(key)
        if not (in_mpvc or in_product or probe_all):
            entries.append(ConeMembershipReport(key, in_mpvc, in_product, None))
            continue
        probe = tangent_probe(prob, center, d, schedule, match_tol, no_margin)
        entries.append(ConeMembershipReport(key, in_mpvc, in_product, probe.verdict, probe))
        if probe.verdict is ProbeVerdict.NO:
            if in_mpvc:
                counter_mpvc.append(key)
            if in_product:
                counter_product.append(key)
        elif probe.verdict is ProbeVerdict.YES and not in_linearized_product(
            prob, center, sets, d, slack=INCLUSION_SLACK
        ):
            inclusion.append(key)

    report = AcqProbeReport(
        entries=entries,
        acq_mpvc=AcqStatus.REFUTED if counter_mpvc else AcqStatus.CORROBORATED,
        acq_product=AcqStatus.REFUTED if counter_product else AcqStatus.CORROBORATED,
        counterexamples_mpvc=counter_mpvc,
        counterexamples_product=counter_product,
        inclusion_violations=inclusion,
        mismatch_examples=mismatches,
    )
    if inclusion:
        logger.error(
            "Sonda YES fora de L_C em '%s'", prob.name,
            extra={"extra_data": {"directions": inclusion}},
        )
    logger.info(
        "ACQ em '%s': L_MPVC %s, L_C %s", prob.name, report.acq_mpvc.value, report.acq_product.value,
        extra={"extra_data": report.to_dict()},
    )
    return report
