"""Cones tangente e normal de Ω, cones linearizados e sonda numérica de T_C.

Pontos de Ω são (a, b) = (G, H). Os ramos do cone normal seguem a
tabela por sinais de H e G; (ξ, ζ) são as componentes H e G de um vetor
normal, ligadas aos multiplicadores por (ξ, ζ) = (−η^H, η^G).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from .config import config
from .model import IndexSets, MpvcProblem
from .penalty import OmegaPoint, in_omega
from .solver import project_to_feasible

__all__ = [
    "OmegaCase",
    "NormalConeBranch",
    "ProbeVerdict",
    "ArcSample",
    "TangentProbeResult",
    "ConeMembershipReport",
    "ConeError",
    "DEFAULT_SCHEDULE",
    "omega_case",
    "in_omega_tangent",
    "normal_cone_omega",
    "in_normal_cone_nonpositive",
    "in_normal_cone_zero",
    "in_linearized_mpvc",
    "in_linearized_product",
    "tangent_probe",
]

logger = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
PROBE_TAIL = 3
VANISH_TOL = 1e-6
DECAY_FACTOR = 0.1
ACCEPT_RESIDUAL = 1e-4
# Passo final da projeção relativo a t: fino na cauda, que decide o veredito.
TAIL_STOP_RATIO = 1e-7
HEAD_STOP_RATIO = 1e-4


class ConeError(ValueError):
    """Ponto base fora do conjunto cujo cone foi pedido."""


class OmegaCase(Enum):
    """Caso do ponto base de Ω pelos sinais de H e G."""

    H_POS_G_NEG = "H>0, G<0"
    H_POS_G_ZERO = "H>0, G=0"
    H_ZERO_G_ZERO = "H=0, G=0"
    H_ZERO_G_NEG = "H=0, G<0"
    H_ZERO_G_POS = "H=0, G>0"


def omega_case(base: OmegaPoint, tol: float | None = None) -> OmegaCase:
    """Classifica o ponto base com a mesma faixa de tolerância de classify.

    Raises:
        ConeError: base fora de Ω.
    """
    tol = config.TOL_ACTIVE if tol is None else tol
    if not in_omega(base, tol):
        raise ConeError(f"Ponto (G={base.a}, H={base.b}) fora de Ω")
    G, H = base.a, base.b
    if H > tol:
        return OmegaCase.H_POS_G_ZERO if abs(G) <= tol else OmegaCase.H_POS_G_NEG
    if abs(G) <= tol:
        return OmegaCase.H_ZERO_G_ZERO
    return OmegaCase.H_ZERO_G_POS if G > tol else OmegaCase.H_ZERO_G_NEG


def _tangent_contains(case: OmegaCase, dG: float, dH: float, slack: float = 0.0) -> bool:
    if case is OmegaCase.H_POS_G_NEG:
        return True
    if case is OmegaCase.H_POS_G_ZERO:
        return dG <= slack
    if case is OmegaCase.H_ZERO_G_NEG:
        return dH >= -slack
    if case is OmegaCase.H_ZERO_G_POS:
        return abs(dH) <= slack
    return dH >= -slack and dG * dH <= slack


def in_omega_tangent(base: OmegaPoint, d: Sequence[float], tol: float | None = None) -> bool:
    """Testa d = (d_G, d_H) ∈ T_Ω(base).

    Tabela por caso: H>0,G<0: R²; H>0,G=0: d_G ≤ 0; H=0,G<0: d_H ≥ 0;
    H=0,G>0: d_H = 0; H=0=G: d_H ≥ 0 e d_G·d_H ≤ 0 (T_Ω = Ω).
    """
    dG, dH = float(d[0]), float(d[1])
    return _tangent_contains(omega_case(base, tol), dG, dH)


@dataclass(frozen=True)
class NormalConeBranch:
    """Ramo do cone normal limite N_Ω num ponto base."""

    case: OmegaCase
    description: str

    def contains(self, xi: float, zeta: float, tol: float = 0.0) -> bool:
        """(ξ, ζ) = componentes (H, G) do vetor normal."""
        case = self.case
        if case is OmegaCase.H_POS_G_NEG:
            return abs(xi) <= tol and abs(zeta) <= tol
        if case is OmegaCase.H_POS_G_ZERO:
            return abs(xi) <= tol and zeta >= -tol
        if case is OmegaCase.H_ZERO_G_ZERO:
            return zeta >= -tol and abs(xi * zeta) <= tol
        if case is OmegaCase.H_ZERO_G_NEG:
            return xi <= tol and abs(zeta) <= tol
        return abs(zeta) <= tol

    def to_dict(self) -> dict[str, Any]:
        return {"case": self.case.value, "constraints": self.description}


_NORMAL_DESCRIPTIONS = {
    OmegaCase.H_POS_G_NEG: "ξ = 0, ζ = 0",
    OmegaCase.H_POS_G_ZERO: "ξ = 0, ζ ≥ 0",
    OmegaCase.H_ZERO_G_ZERO: "ζ ≥ 0, ξ·ζ = 0",
    OmegaCase.H_ZERO_G_NEG: "ξ ≤ 0, ζ = 0",
    OmegaCase.H_ZERO_G_POS: "ξ ∈ R, ζ = 0",
}


def normal_cone_omega(base: OmegaPoint, tol: float | None = None) -> NormalConeBranch:
    case = omega_case(base, tol)
    return NormalConeBranch(case=case, description=_NORMAL_DESCRIPTIONS[case])


def in_normal_cone_nonpositive(a: float, v: float, tol: float | None = None) -> bool:
    """v ∈ N_(−∞,0](a): {0} se a < 0, [0, ∞) se a = 0.

    Raises:
        ConeError: a > 0 (fora do conjunto).
    """
    tol = config.TOL_ACTIVE if tol is None else tol
    if a > tol:
        raise ConeError(f"{a} fora de (−∞, 0]")
    if a < -tol:
        return v == 0.0
    return v >= 0.0


def in_normal_cone_zero(a: float, v: float, tol: float | None = None) -> bool:
    """N_{0}(0) = R.

    Raises:
        ConeError: a ≠ 0.
    """
    tol = config.TOL_ACTIVE if tol is None else tol
    if abs(a) > tol:
        raise ConeError(f"{a} fora de {{0}}")
    return bool(np.isfinite(v))


# =============================================================================
# Cones linearizados
# =============================================================================

def _directional(prob: MpvcProblem, x: Sequence[float], d: Sequence[float]) -> dict[str, NDArray[np.float64]]:
    direction = prob.point(d)
    grads = prob.gradients(x)
    return {
        "g": grads.g @ direction,
        "h": grads.h @ direction,
        "G": grads.G @ direction,
        "H": grads.H @ direction,
    }


def in_linearized_mpvc(
    prob: MpvcProblem,
    x: Sequence[float],
    sets: IndexSets,
    d: Sequence[float],
    slack: float = 0.0,
) -> bool:
    """d ∈ L_MPVC(x): ∇g·d ≤ 0 (I_g), ∇h·d = 0, ∇H·d = 0 (I_0+),
    ∇H·d ≥ 0 (I_00 ∪ I_0-), ∇G·d ≤ 0 (I_+0)."""
    dot = _directional(prob, x, d)
    return (
        all(dot["g"][i] <= slack for i in sets.I_g)
        and all(abs(v) <= slack for v in dot["h"])
        and all(abs(dot["H"][i]) <= slack for i in sets.I_0p)
        and all(dot["H"][i] >= -slack for i in sets.I_00 | sets.I_0m)
        and all(dot["G"][i] <= slack for i in sets.I_p0)
    )


_CASE_OF_SET = (
    ("I_pm", OmegaCase.H_POS_G_NEG),
    ("I_p0", OmegaCase.H_POS_G_ZERO),
    ("I_00", OmegaCase.H_ZERO_G_ZERO),
    ("I_0m", OmegaCase.H_ZERO_G_NEG),
    ("I_0p", OmegaCase.H_ZERO_G_POS),
)


def in_linearized_product(
    prob: MpvcProblem,
    x: Sequence[float],
    sets: IndexSets,
    d: Sequence[float],
    slack: float = 0.0,
) -> bool:
    """d ∈ L_C(x) = {d : ∇F(x)ᵀd ∈ T_Δ(F(x))}, fator a fator.

    Difere de L_MPVC só em I_00, onde exige também (∇G·d)(∇H·d) ≤ 0.
    """
    dot = _directional(prob, x, d)
    if not all(dot["g"][i] <= slack for i in sets.I_g):
        return False
    if not all(abs(v) <= slack for v in dot["h"]):
        return False
    for attr, case in _CASE_OF_SET:
        for i in getattr(sets, attr):
            if not _tangent_contains(case, dot["G"][i], dot["H"][i], slack):
                return False
    return True


# =============================================================================
# Sonda numérica do cone tangente
# =============================================================================

class ProbeVerdict(Enum):
    YES = "YES"
    NO = "NO"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ArcSample:
    t: float
    point: tuple[float, ...]
    correction: float | None

    def to_dict(self) -> dict[str, Any]:
        return {"t": self.t, "point": list(self.point), "correction": self.correction}


@dataclass(frozen=True)
class TangentProbeResult:
    verdict: ProbeVerdict
    direction: tuple[float, ...]
    arc: tuple[ArcSample, ...]

    @property
    def tail(self) -> tuple[float | None, ...]:
        return tuple(sample.correction for sample in self.arc[-PROBE_TAIL:])

    def to_dict(self) -> dict[str, Any]:
        return {
            "verdict": self.verdict.value,
            "direction": list(self.direction),
            "arc": [sample.to_dict() for sample in self.arc],
        }


@dataclass(frozen=True)
class ConeMembershipReport:
    direction: tuple[float, ...]
    in_L_mpvc: bool
    in_L_product: bool
    in_T_numeric: ProbeVerdict | None
    witness: TangentProbeResult | None = field(default=None, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "direction": list(self.direction),
            "in_L_mpvc": self.in_L_mpvc,
            "in_L_product": self.in_L_product,
            "in_T_numeric": None if self.in_T_numeric is None else self.in_T_numeric.value,
        }


def _verdict(corrections: list[float | None], match_tol: float, no_margin: float) -> ProbeVerdict:
    tail = corrections[-PROBE_TAIL:]
    if any(c is None for c in tail):
        return ProbeVerdict.INCONCLUSIVE
    values = [float(c) for c in tail]  # type: ignore[arg-type]
    if all(c >= no_margin for c in values):
        return ProbeVerdict.NO
    if all(c <= match_tol for c in values) and (
        values[-1] <= VANISH_TOL or values[-1] <= DECAY_FACTOR * values[0]
    ):
        return ProbeVerdict.YES
    return ProbeVerdict.INCONCLUSIVE


def tangent_probe(
    prob: MpvcProblem,
    x: Sequence[float],
    d: Sequence[float],
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    match_tol: float | None = None,
    no_margin: float | None = None,
) -> TangentProbeResult:
    """Decide numericamente se d ∈ T_C(x).

    Para cada t projeta p = x + t·d na região viável e mede a correção
    normalizada (‖z − p‖₁ + resíduo(z))/t. Na cauda (últimos três t):
    YES se todas ≤ match_tol e a correção tende a zero; NO se todas
    ≥ no_margin; INCONCLUSIVE caso contrário, inclusive quando a projeção
    falha. d é normalizada em l1.
    """
    match_tol = config.PROBE_MATCH_TOL if match_tol is None else match_tol
    no_margin = config.PROBE_NO_MARGIN if no_margin is None else no_margin
    base = prob.point(x)
    direction = prob.point(d)
    norm = float(np.abs(direction).sum())
    if norm == 0.0:
        arc = tuple(ArcSample(t, tuple(base.tolist()), 0.0) for t in schedule)
        return TangentProbeResult(ProbeVerdict.YES, tuple(direction.tolist()), arc)
    direction = direction / norm

    samples: list[ArcSample] = []
    corrections: list[float | None] = []
    tail_start = len(schedule) - PROBE_TAIL
    for position, t in enumerate(schedule):
        target = base + t * direction
        if prob.residuals_batch(target)[0] == 0.0:
            samples.append(ArcSample(t, tuple(target.tolist()), 0.0))
            corrections.append(0.0)
            continue
        stop_ratio = TAIL_STOP_RATIO if position >= tail_start else HEAD_STOP_RATIO
        projection = project_to_feasible(
            prob, target, starts=(base,), initial_step=t, stop_step=t * stop_ratio
        )
        if projection.residual > ACCEPT_RESIDUAL * t:
            samples.append(ArcSample(t, tuple(projection.point.tolist()), None))
            corrections.append(None)
            continue
        correction = (projection.distance + projection.residual) / t
        samples.append(ArcSample(t, tuple(projection.point.tolist()), correction))
        corrections.append(correction)

    verdict = _verdict(corrections, match_tol, no_margin)
    logger.debug(
        "Sonda tangente",
        extra={"extra_data": {"direction": direction, "verdict": verdict, "tail": corrections[-PROBE_TAIL:]}},
    )
    return TangentProbeResult(verdict, tuple(direction.tolist()), tuple(samples))
