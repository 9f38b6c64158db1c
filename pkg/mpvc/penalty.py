"""Distância ao conjunto Ω e funções de penalidade exata.

Ω = {(a, b) ∈ R² : b ≥ 0, a·b ≤ 0}, com a = G_i(x) e b = H_i(x).
Todas as distâncias usam a norma l1.
"""

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

if TYPE_CHECKING:
    from .model import MpvcProblem

__all__ = [
    "OmegaPoint",
    "PenaltyValue",
    "PenaltyError",
    "dist_omega",
    "dist_omega_array",
    "in_omega",
    "penalty_tailored",
    "penalty_l1",
]

logger = logging.getLogger(__name__)


class PenaltyError(ValueError):
    """Parâmetro inválido para as funções de penalidade."""


@dataclass(frozen=True)
class OmegaPoint:
    """Ponto (a, b) = (G, H) do plano."""

    a: float
    b: float

    @property
    def G(self) -> float:
        return self.a

    @property
    def H(self) -> float:
        return self.b


def dist_omega(p: OmegaPoint) -> float:
    """max{0, −b, min{a, b}}: distância l1 de (a, b) até Ω."""
    return max(0.0, -p.b, min(p.a, p.b))


def dist_omega_array(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Versão vetorizada de `dist_omega`."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.maximum(0.0, np.maximum(-b, np.minimum(a, b)))


def in_omega(p: OmegaPoint, tol: float = 0.0) -> bool:
    return p.b >= -tol and p.a * p.b <= tol


@dataclass(frozen=True)
class PenaltyValue:
    objective: float
    violation: float
    alpha: float
    total: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "objective": self.objective,
            "violation": self.violation,
            "alpha": self.alpha,
            "total": self.total,
        }


def _check_alpha(alpha: float) -> None:
    if not alpha >= 0 or not np.isfinite(alpha):
        raise PenaltyError(f"alpha deve ser finito e >= 0, recebido {alpha!r}")


def penalty_tailored(prob: "MpvcProblem", x: Sequence[float], alpha: float) -> PenaltyValue:
    """P_α(x) = f(x) + α·[Σ g⁺ + Σ |h| + Σ dist_Ω(G_i, H_i)].

    Raises:
        PenaltyError: alpha negativo.
    """
    _check_alpha(alpha)
    objective = prob.objective_value(x)
    violation = prob.residuals(x).total
    return PenaltyValue(
        objective=objective,
        violation=violation,
        alpha=float(alpha),
        total=objective + alpha * violation,
    )


def penalty_l1(prob: "MpvcProblem", x: Sequence[float], alpha: float) -> PenaltyValue:
    """P¹_α(x) = f(x) + α·Σ max{−H_i, 0} + α·Σ max{G_i·H_i, 0}.

    Só é definida sem as famílias g e h; a exatidão dela não é verificada.

    Raises:
        PenaltyError: alpha negativo ou problema com g/h.
    """
    _check_alpha(alpha)
    if prob.m or prob.l:
        raise PenaltyError(
            f"P¹_α exige problema sem g e h (m={prob.m}, l={prob.l}); "
            "use MpvcProblem.without_inequalities()"
        )
    objective = prob.objective_value(x)
    values = prob.values(x)
    violation = float(
        np.maximum(-values.H, 0.0).sum() + np.maximum(values.G * values.H, 0.0).sum()
    )
    return PenaltyValue(
        objective=objective,
        violation=violation,
        alpha=float(alpha),
        total=objective + alpha * violation,
    )
