"""Certificados e refutadores das condições de qualificação MPVC.

Convenção de sinais dos multiplicadores:
    Σ λ_i ∇g_i + Σ μ_j ∇h_j + Σ η^G_i ∇G_i − Σ η^H_i ∇H_i = 0
com λ ≥ 0 em I_g, η^G ≥ 0 em I_+0 ∪ I_00, η^H ≥ 0 em I_0-, η^H livre em
I_0+ e η^H livre em I_00 sujeito ao ramo de complementaridade.
"""

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from .cones import DEFAULT_SCHEDULE, in_normal_cone_nonpositive, in_normal_cone_zero, normal_cone_omega
from .config import config
from .empirics import AcqProbeReport, AcqStatus, probe_acq
from .model import ConstraintGradients, IndexSets, MpvcProblem, classify
from .numerics import (
    LpOutcome,
    LpProblem,
    LpStatus,
    Relation,
    gaussian_directions,
    left_null_vector,
    rank,
    solve_lp,
    sphere_directions,
    unique_rows,
)
from .penalty import OmegaPoint

__all__ = [
    "CqStatus",
    "BranchSide",
    "MultiplierVector",
    "CqVerdict",
    "BranchResult",
    "RefuterConfig",
    "CqReport",
    "BranchCapError",
    "CQ_ORDER",
    "check_licq",
    "check_mfcq",
    "enumerate_multiplier_branches",
    "check_gmfcq",
    "refute_pseudonormality",
    "refute_quasinormality",
    "full_report",
    "verify_multiplier",
    "multiplier_in_normal_cone",
    "chain_violations",
]

logger = logging.getLogger(__name__)

LICQ = "LICQ"
MFCQ = "MFCQ"
GMFCQ = "GMFCQ"
PSEUDO = "pseudonormality"
QUASI = "quasinormality"
ACQ_MPVC = "ACQ (L_MPVC)"
ACQ_PRODUCT = "ACQ (L_C)"
CQ_ORDER = (LICQ, MFCQ, GMFCQ, PSEUDO, QUASI)

SNAP_TOL = 1e-12
VERIFY_TOL = 1e-8


class BranchCapError(Exception):
    """|I_00| acima do limite de enumeração de ramos."""


class CqStatus(Enum):
    CERTIFIED = "CERTIFIED"
    REFUTED = "REFUTED"
    NO_VIOLATION_FOUND = "NO-VIOLATION-FOUND"


class BranchSide(Enum):
    """Lado anulado na complementaridade η^H_i·η^G_i = 0 de i ∈ I_00."""

    H_ZERO = "eta_H=0"
    G_ZERO = "eta_G=0"


@dataclass(frozen=True, eq=False)
class MultiplierVector:
    lam: NDArray[np.float64]
    mu: NDArray[np.float64]
    eta_H: NDArray[np.float64]
    eta_G: NDArray[np.float64]
    branch: dict[int, BranchSide] = field(default_factory=dict)

    def as_array(self) -> NDArray[np.float64]:
        return np.concatenate([self.lam, self.mu, self.eta_H, self.eta_G])

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self.as_array()).sum())

    def is_zero(self) -> bool:
        return not np.any(self.as_array())

    def combination(self, grads: ConstraintGradients) -> NDArray[np.float64]:
        """Σλ∇g + Σμ∇h + Ση^G∇G − Ση^H∇H."""
        return self.lam @ grads.g + self.mu @ grads.h + self.eta_G @ grads.G - self.eta_H @ grads.H

    def key(self) -> tuple[float, ...]:
        return tuple(np.round(self.as_array(), 10).tolist())

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": self.lam.tolist(),
            "mu": self.mu.tolist(),
            "eta_H": self.eta_H.tolist(),
            "eta_G": self.eta_G.tolist(),
            "branch": {str(i): side.value for i, side in sorted(self.branch.items())},
        }


@dataclass
class CqVerdict:
    name: str
    status: CqStatus
    certificate: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "certificate": self.certificate,
            "notes": list(self.notes),
        }


@dataclass
class BranchResult:
    branch: dict[int, BranchSide]
    outcome: LpOutcome
    multiplier: MultiplierVector | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "branch": {str(i): side.value for i, side in sorted(self.branch.items())},
            "status": self.outcome.status.value,
            "multiplier": None if self.multiplier is None else self.multiplier.to_dict(),
        }


@dataclass(frozen=True)
class RefuterConfig:
    """Busca de sequências violadoras para pseudo/quasinormalidade."""

    directions: int | None = None
    random_directions: int = 16
    schedule: tuple[float, ...] = DEFAULT_SCHEDULE
    tail_max_t: float = 1e-3
    pos_tol: float = 1e-14
    seed: int | None = None

    @property
    def tail(self) -> tuple[float, ...]:
        return tuple(t for t in self.schedule if t <= self.tail_max_t)

    def direction_set(self, n: int) -> list[NDArray[np.float64]]:
        count = config.REFUTER_DIRECTIONS if self.directions is None else self.directions
        seed = config.SEED if self.seed is None else self.seed
        axes = np.eye(n)
        rows = [
            *sphere_directions(n, count),
            *axes,
            *(-axes),
            *gaussian_directions(n, self.random_directions, seed),
        ]
        return unique_rows(rows)


# =============================================================================
# Verificação de multiplicadores
# =============================================================================

def verify_multiplier(
    prob: MpvcProblem,
    x: Sequence[float],
    sets: IndexSets,
    mult: MultiplierVector,
    tol: float = VERIFY_TOL,
    complementarity: bool = True,
) -> bool:
    """Confere (i) resíduo ‖combinação‖₁ ≤ tol e (ii) o padrão de sinais exato."""
    if mult.is_zero():
        return False
    grads = prob.gradients(x)
    if float(np.abs(mult.combination(grads)).sum()) > tol:
        return False
    for i in range(prob.m):
        if i in sets.I_g:
            if mult.lam[i] < 0:
                return False
        elif mult.lam[i] != 0:
            return False
    for i in range(prob.q):
        if i in sets.I_pm | sets.I_0m | sets.I_0p and mult.eta_G[i] != 0:
            return False
        if i in sets.I_p0 | sets.I_00 and mult.eta_G[i] < 0:
            return False
        if i in sets.I_plus and mult.eta_H[i] != 0:
            return False
        if i in sets.I_0m and mult.eta_H[i] < 0:
            return False
        if complementarity and i in sets.I_00 and mult.eta_H[i] * mult.eta_G[i] != 0:
            return False
    return True


def multiplier_in_normal_cone(
    mult: MultiplierVector, prob: MpvcProblem, x: Sequence[float], tol: float | None = None
) -> bool:
    """Forma abstrata: (λ, μ, (−η^H, η^G)) ∈ N_Δ(F(x)), fator a fator."""
    values = prob.values(x)
    for i in range(prob.m):
        if not in_normal_cone_nonpositive(values.g[i], mult.lam[i], tol):
            return False
    for j in range(prob.l):
        if not in_normal_cone_zero(values.h[j], mult.mu[j], tol):
            return False
    for i in range(prob.q):
        branch = normal_cone_omega(OmegaPoint(values.G[i], values.H[i]), tol)
        if not branch.contains(-mult.eta_H[i], mult.eta_G[i]):
            return False
    return True


# =============================================================================
# LICQ e MFCQ
# =============================================================================

def _licq_rows(grads: ConstraintGradients, sets: IndexSets, prob: MpvcProblem) -> tuple[list[str], NDArray[np.float64]]:
    labels: list[str] = []
    rows: list[NDArray[np.float64]] = []
    for i in sorted(sets.I_g):
        labels.append(f"g{i + 1}")
        rows.append(grads.g[i])
    for j in range(prob.l):
        labels.append(f"h{j + 1}")
        rows.append(grads.h[j])
    for i in sorted(sets.I_p0 | sets.I_00):
        labels.append(f"G{i + 1}")
        rows.append(grads.G[i])
    for i in sorted(sets.I_0):
        labels.append(f"H{i + 1}")
        rows.append(grads.H[i])
    matrix = np.vstack(rows) if rows else np.zeros((0, prob.n))
    return labels, matrix


def check_licq(prob: MpvcProblem, x: Sequence[float], sets: IndexSets) -> CqVerdict:
    """Independência linear dos gradientes ativos."""
    grads = prob.gradients(x)
    labels, matrix = _licq_rows(grads, sets, prob)
    if not labels:
        return CqVerdict(LICQ, CqStatus.CERTIFIED, {"kind": "rank", "rank": 0, "rows": 0, "labels": []},
                         ["nenhum gradiente ativo"])
    r = rank(matrix)
    certificate: dict[str, Any] = {"kind": "rank", "rank": r, "rows": len(labels), "labels": labels}
    if r == len(labels):
        return CqVerdict(LICQ, CqStatus.CERTIFIED, certificate)
    y = left_null_vector(matrix)
    certificate["null_vector"] = y.tolist()
    certificate["residual"] = float(np.abs(y @ matrix).sum())
    return CqVerdict(LICQ, CqStatus.REFUTED, certificate, [f"posto {r} < {len(labels)} linhas"])


def _empty_multiplier(prob: MpvcProblem) -> dict[str, NDArray[np.float64]]:
    return {
        "lam": np.zeros(prob.m),
        "mu": np.zeros(prob.l),
        "eta_H": np.zeros(prob.q),
        "eta_G": np.zeros(prob.q),
    }


def _finalize(parts: dict[str, NDArray[np.float64]], signed: dict[str, set[int]],
              branch: dict[int, BranchSide]) -> MultiplierVector:
    """Zera resíduos minúsculos, corta negativos em componentes com sinal e normaliza em l1."""
    for family, values in parts.items():
        values[np.abs(values) < SNAP_TOL] = 0.0
        for i in signed.get(family, ()):
            if values[i] < 0:
                values[i] = 0.0
    total = sum(float(np.abs(v).sum()) for v in parts.values())
    if total > 0:
        for family in parts:
            parts[family] = parts[family] / total
            parts[family][np.abs(parts[family]) < SNAP_TOL] = 0.0
    return MultiplierVector(branch=dict(branch), **parts)


def check_mfcq(prob: MpvcProblem, x: Sequence[float], sets: IndexSets,
               eps_strict: float | None = None) -> CqVerdict:
    """MFCQ em duas etapas: posto das igualdades e LP de folga máxima.

    Refutação na etapa (b) vem com a alternativa de Motzkin: pesos livres
    nas igualdades e z ≥ 0, Σz = 1, nas desigualdades estritas cuja
    combinação se anula.
    """
    eps = config.EPS_STRICT if eps_strict is None else eps_strict
    grads = prob.gradients(x)
    n = prob.n

    eq_labels: list[tuple[str, int]] = [("h", j) for j in range(prob.l)]
    eq_labels += [("H", i) for i in sorted(sets.I_0p | sets.I_00)]
    eq_rows = [grads.h[j] if fam == "h" else grads.H[j] for fam, j in eq_labels]

    strict_labels: list[tuple[str, int]] = [("g", i) for i in sorted(sets.I_g)]
    strict_labels += [("H", i) for i in sorted(sets.I_0m)]
    strict_labels += [("G", i) for i in sorted(sets.I_p0 | sets.I_00)]
    strict_rows = []
    for fam, i in strict_labels:
        if fam == "g":
            strict_rows.append(grads.g[i])
        elif fam == "H":
            strict_rows.append(-grads.H[i])
        else:
            strict_rows.append(grads.G[i])

    names = [f"{fam}{i + 1}" for fam, i in eq_labels]
    if eq_rows:
        eq_matrix = np.vstack(eq_rows)
        r = rank(eq_matrix)
        if r < len(eq_rows):
            y = left_null_vector(eq_matrix)
            return CqVerdict(
                MFCQ, CqStatus.REFUTED,
                {"kind": "rank", "stage": "a", "rank": r, "rows": len(eq_rows),
                 "labels": names, "null_vector": y.tolist(),
                 "residual": float(np.abs(y @ eq_matrix).sum())},
                ["gradientes de igualdade linearmente dependentes"],
            )

    rows = [np.append(row, 0.0) for row in eq_rows] + [np.append(row, 1.0) for row in strict_rows]
    relations = [Relation.EQ] * len(eq_rows) + [Relation.LE] * len(strict_rows)
    lp = LpProblem(
        objective=np.append(np.zeros(n), 1.0),
        matrix=np.vstack(rows) if rows else np.zeros((0, n + 1)),
        relations=relations,
        rhs=np.zeros(len(rows)),
        lower=np.append(np.full(n, -np.inf), 0.0),
        upper=np.append(np.full(n, np.inf), 1.0),
    )
    outcome = solve_lp(lp)
    s_star = float(outcome.value) if outcome.status is LpStatus.OPTIMAL else 0.0
    if outcome.status is LpStatus.OPTIMAL and s_star > eps:
        d = outcome.x[:n]  # type: ignore[index]
        margin = float(-max((row @ d for row in strict_rows), default=-s_star))
        return CqVerdict(MFCQ, CqStatus.CERTIFIED,
                         {"kind": "direction", "d": d.tolist(), "slack": s_star, "margin": margin})

    certificate: dict[str, Any] = {"kind": "alternative", "stage": "b", "lp_value": s_star}
    alternative = _motzkin_alternative(prob, grads, eq_labels, eq_rows, strict_labels, strict_rows)
    if alternative is not None:
        certificate["multiplier"] = alternative.to_dict()
        certificate["residual"] = float(np.abs(alternative.combination(grads)).sum())
    return CqVerdict(MFCQ, CqStatus.REFUTED, certificate,
                     [f"folga máxima s* = {s_star:.3e} ≤ {eps:.1e}"])


def _motzkin_alternative(
    prob: MpvcProblem,
    grads: ConstraintGradients,
    eq_labels: list[tuple[str, int]],
    eq_rows: list[NDArray[np.float64]],
    strict_labels: list[tuple[str, int]],
    strict_rows: list[NDArray[np.float64]],
) -> MultiplierVector | None:
    if not strict_rows:
        return None
    k_eq, k_strict = len(eq_rows), len(strict_rows)
    columns = np.column_stack([*eq_rows, *strict_rows])
    matrix = np.vstack([columns, np.append(np.zeros(k_eq), np.ones(k_strict))])
    lp = LpProblem(
        objective=np.zeros(k_eq + k_strict),
        matrix=matrix,
        relations=[Relation.EQ] * (prob.n + 1),
        rhs=np.append(np.zeros(prob.n), 1.0),
        lower=np.append(np.full(k_eq, -np.inf), np.zeros(k_strict)),
    )
    outcome = solve_lp(lp)
    if outcome.status is not LpStatus.OPTIMAL:
        logger.warning("Alternativa de Motzkin não encontrada para '%s'", prob.name)
        return None
    weights = outcome.x  # type: ignore[assignment]
    parts = _empty_multiplier(prob)
    signed: dict[str, set[int]] = {"lam": set(), "eta_H": set(), "eta_G": set()}
    for (fam, i), w in zip(eq_labels, weights[:k_eq]):
        if fam == "h":
            parts["mu"][i] = w
        else:
            parts["eta_H"][i] = -w
    for (fam, i), z in zip(strict_labels, weights[k_eq:]):
        if fam == "g":
            parts["lam"][i] = z
            signed["lam"].add(i)
        elif fam == "H":
            parts["eta_H"][i] = z
            signed["eta_H"].add(i)
        else:
            parts["eta_G"][i] = z
            signed["eta_G"].add(i)
    return _finalize(parts, signed, {})


# =============================================================================
# GMFCQ: enumeração de ramos de I_00
# =============================================================================

@dataclass(frozen=True)
class _Column:
    family: str
    index: int
    vector: NDArray[np.float64]


def _branch_columns(
    grads: ConstraintGradients, sets: IndexSets, prob: MpvcProblem, branch: dict[int, BranchSide]
) -> tuple[list[_Column], list[_Column]]:
    """Colunas livres e com sinal do sistema (i)–(ii) num ramo."""
    free = [_Column("mu", j, grads.h[j]) for j in range(prob.l)]
    free += [_Column("eta_H", i, -grads.H[i]) for i in sorted(sets.I_0p)]
    free += [_Column("eta_H", i, -grads.H[i]) for i in sorted(sets.I_00)
             if branch[i] is BranchSide.G_ZERO]
    signed = [_Column("lam", i, grads.g[i]) for i in sorted(sets.I_g)]
    signed += [_Column("eta_G", i, grads.G[i]) for i in sorted(sets.I_p0)]
    signed += [_Column("eta_G", i, grads.G[i]) for i in sorted(sets.I_00)
               if branch[i] is BranchSide.H_ZERO]
    signed += [_Column("eta_H", i, -grads.H[i]) for i in sorted(sets.I_0m)]
    return free, signed


def _assemble(prob: MpvcProblem, free: list[_Column], signed: list[_Column],
              free_values: NDArray[np.float64], signed_values: NDArray[np.float64],
              branch: dict[int, BranchSide]) -> MultiplierVector:
    parts = _empty_multiplier(prob)
    signed_index: dict[str, set[int]] = {"lam": set(), "eta_H": set(), "eta_G": set()}
    for column, value in zip(free, free_values):
        parts[column.family][column.index] = value
    for column, value in zip(signed, signed_values):
        parts[column.family][column.index] = value
        signed_index[column.family].add(column.index)
    return _finalize(parts, signed_index, branch)


def _solve_branch(
    prob: MpvcProblem,
    grads: ConstraintGradients,
    sets: IndexSets,
    branch: dict[int, BranchSide],
    enrich: bool = False,
) -> tuple[LpOutcome, list[MultiplierVector]]:
    """Procura multiplicadores não nulos no ramo.

    Com colunas livres dependentes, o vetor nulo delas já é multiplicador.
    Senão resolve o LP com as colunas com sinal normalizadas (Σ = 1).
    `enrich` acrescenta ±vetor nulo e os vértices que maximizam cada
    componente com sinal.
    """
    free, signed = _branch_columns(grads, sets, prob, branch)
    n = prob.n
    found: list[MultiplierVector] = []
    outcome = LpOutcome(status=LpStatus.INFEASIBLE)

    if free:
        free_matrix = np.column_stack([c.vector for c in free])
        if rank(free_matrix) < len(free):
            v = left_null_vector(free_matrix.T)
            found.append(_assemble(prob, free, signed, v, np.zeros(len(signed)), branch))
            if enrich:
                found.append(_assemble(prob, free, signed, -v, np.zeros(len(signed)), branch))
            outcome = LpOutcome(status=LpStatus.OPTIMAL, value=0.0,
                                x=np.concatenate([v, np.zeros(len(signed))]))

    if signed:
        k_free, k_signed = len(free), len(signed)
        columns = np.column_stack([c.vector for c in (*free, *signed)]).reshape(n, k_free + k_signed)
        matrix = np.vstack([columns, np.append(np.zeros(k_free), np.ones(k_signed))])
        lower = np.append(np.full(k_free, -np.inf), np.zeros(k_signed))
        objectives = [np.zeros(k_free + k_signed)]
        if enrich:
            for k in range(k_signed):
                objective = np.zeros(k_free + k_signed)
                objective[k_free + k] = 1.0
                objectives.append(objective)
        for index, objective in enumerate(objectives):
            lp = LpProblem(
                objective=objective,
                matrix=matrix,
                relations=[Relation.EQ] * (n + 1),
                rhs=np.append(np.zeros(n), 1.0),
                lower=lower,
            )
            result = solve_lp(lp)
            if result.status is not LpStatus.OPTIMAL:
                break
            if index == 0 and outcome.status is not LpStatus.OPTIMAL:
                outcome = result
            values = result.x  # type: ignore[assignment]
            found.append(_assemble(prob, free, signed, values[:k_free], values[k_free:], branch))

    return outcome, [m for m in found if not m.is_zero()]


def _branches(sets: IndexSets, branch_cap: int | None) -> list[dict[int, BranchSide]]:
    cap = config.BRANCH_CAP if branch_cap is None else branch_cap
    biactive = sorted(sets.I_00)
    if len(biactive) > cap:
        raise BranchCapError(
            f"|I_00| = {len(biactive)} excede o limite de {cap} (2^{len(biactive)} ramos)"
        )
    return [
        dict(zip(biactive, sides))
        for sides in itertools.product((BranchSide.H_ZERO, BranchSide.G_ZERO), repeat=len(biactive))
    ]


def enumerate_multiplier_branches(
    prob: MpvcProblem, x: Sequence[float], sets: IndexSets, branch_cap: int | None = None
) -> list[BranchResult]:
    """Um LP por ramo de complementaridade de I_00, em ordem fixa.

    Raises:
        BranchCapError: |I_00| acima do limite.
    """
    grads = prob.gradients(x)
    results = []
    for branch in _branches(sets, branch_cap):
        outcome, found = _solve_branch(prob, grads, sets, branch)
        results.append(BranchResult(branch, outcome, found[0] if found else None))
    return results


def _candidate_multipliers(
    prob: MpvcProblem, x: Sequence[float], sets: IndexSets, branch_cap: int | None = None
) -> list[MultiplierVector]:
    grads = prob.gradients(x)
    seen: set[tuple[float, ...]] = set()
    candidates = []
    for branch in _branches(sets, branch_cap):
        _, found = _solve_branch(prob, grads, sets, branch, enrich=True)
        for mult in found:
            key = mult.key()
            if key not in seen:
                seen.add(key)
                candidates.append(mult)
    return candidates


def check_gmfcq(
    prob: MpvcProblem, x: Sequence[float], sets: IndexSets, branch_cap: int | None = None
) -> CqVerdict:
    results = enumerate_multiplier_branches(prob, x, sets, branch_cap)
    found = [r for r in results if r.multiplier is not None]
    if not found:
        return CqVerdict(
            GMFCQ, CqStatus.CERTIFIED,
            {"kind": "branches", "branches": [r.to_dict() for r in results]},
            [f"{len(results)} ramo(s) sem multiplicador não nulo"],
        )
    first = found[0]
    grads = prob.gradients(x)
    return CqVerdict(
        GMFCQ, CqStatus.REFUTED,
        {"kind": "multiplier", "multiplier": first.multiplier.to_dict(),  # type: ignore[union-attr]
         "residual": float(np.abs(first.multiplier.combination(grads)).sum())},  # type: ignore[union-attr]
        [f"{len(found)} de {len(results)} ramo(s) admitem multiplicador"],
    )


# =============================================================================
# Pseudo e quasinormalidade
# =============================================================================

def _weighted_sum(mult: MultiplierVector, values: Any) -> float:
    return float(
        mult.lam @ values.g + mult.mu @ values.h + mult.eta_G @ values.G - mult.eta_H @ values.H
    )


def _quasi_signs(mult: MultiplierVector, values: Any, pos_tol: float) -> bool:
    for i in np.flatnonzero(mult.lam > 0):
        if not mult.lam[i] * values.g[i] > pos_tol:
            return False
    for j in np.flatnonzero(mult.mu):
        if not mult.mu[j] * values.h[j] > pos_tol:
            return False
    for i in np.flatnonzero(mult.eta_H):
        if not -mult.eta_H[i] * values.H[i] > pos_tol:
            return False
    for i in np.flatnonzero(mult.eta_G > 0):
        if not mult.eta_G[i] * values.G[i] > pos_tol:
            return False
    return True


def _search_sequence(
    prob: MpvcProblem,
    x: Sequence[float],
    candidates: list[MultiplierVector],
    cfg: RefuterConfig,
    quasi: bool,
) -> dict[str, Any] | None:
    """Primeiro (multiplicador, direção) que viola a condição em toda a cauda."""
    base = prob.point(x)
    tail = cfg.tail
    if not candidates or not tail:
        return None
    for d in cfg.direction_set(prob.n):
        tail_values = [prob.values(base + t * d) for t in tail]
        for mult in candidates:
            if quasi:
                ok = all(_quasi_signs(mult, values, cfg.pos_tol) for values in tail_values)
            else:
                ok = all(_weighted_sum(mult, values) > cfg.pos_tol for values in tail_values)
            if ok:
                return {
                    "kind": "multiplier_sequence",
                    "multiplier": mult.to_dict(),
                    "direction": d.tolist(),
                    "schedule": list(tail),
                    "weighted_sums": [_weighted_sum(mult, values) for values in tail_values],
                }
    return None


def refute_pseudonormality(
    prob: MpvcProblem,
    x: Sequence[float],
    sets: IndexSets,
    search_cfg: RefuterConfig | None = None,
    gmfcq: CqVerdict | None = None,
    candidates: list[MultiplierVector] | None = None,
) -> CqVerdict:
    """Procura x^k = x + t·d com Σλg + Σμh + Ση^G G − Ση^H H > 0.

    CERTIFIED só por rebaixamento a partir de GMFCQ certificada.
    """
    cfg = search_cfg or RefuterConfig()
    gmfcq = gmfcq or check_gmfcq(prob, x, sets)
    if gmfcq.status is CqStatus.CERTIFIED:
        return CqVerdict(PSEUDO, CqStatus.CERTIFIED, {"kind": "implied_by", "source": GMFCQ},
                         ["GMFCQ ⇒ pseudonormalidade"])
    candidates = candidates if candidates is not None else _candidate_multipliers(prob, x, sets)
    witness = _search_sequence(prob, x, candidates, cfg, quasi=False)
    if witness:
        return CqVerdict(PSEUDO, CqStatus.REFUTED, witness)
    return CqVerdict(
        PSEUDO, CqStatus.NO_VIOLATION_FOUND, {},
        [f"{len(candidates)} multiplicador(es) x {len(cfg.direction_set(prob.n))} direções sem violação"],
    )


def refute_quasinormality(
    prob: MpvcProblem,
    x: Sequence[float],
    sets: IndexSets,
    search_cfg: RefuterConfig | None = None,
    pseudo: CqVerdict | None = None,
    candidates: list[MultiplierVector] | None = None,
) -> CqVerdict:
    """Como a pseudonormalidade, mas cada componente não nula precisa do
    sinal próprio: λ_i g_i > 0, μ_j h_j > 0, η^H_i H_i < 0, η^G_i G_i > 0."""
    cfg = search_cfg or RefuterConfig()
    pseudo = pseudo or refute_pseudonormality(prob, x, sets, cfg)
    if pseudo.status is CqStatus.CERTIFIED:
        return CqVerdict(QUASI, CqStatus.CERTIFIED, {"kind": "implied_by", "source": PSEUDO},
                         ["pseudonormalidade ⇒ quasinormalidade"])
    candidates = candidates if candidates is not None else _candidate_multipliers(prob, x, sets)
    witness = _search_sequence(prob, x, candidates, cfg, quasi=True)
    if witness:
        return CqVerdict(QUASI, CqStatus.REFUTED, witness)
    return CqVerdict(QUASI, CqStatus.NO_VIOLATION_FOUND, {},
                     [f"{len(candidates)} multiplicador(es) sem sequência com os sinais exigidos"])


# =============================================================================
# Relatório completo
# =============================================================================

def chain_violations(verdicts: Sequence[CqVerdict]) -> list[tuple[str, str]]:
    """Pares (mais forte CERTIFIED, mais fraca REFUTED) na cadeia de implicações."""
    by_name = {v.name: v.status for v in verdicts}
    ordered = [name for name in CQ_ORDER if name in by_name]
    violations = []
    for i, strong in enumerate(ordered):
        for weak in ordered[i + 1:]:
            if by_name[strong] is CqStatus.CERTIFIED and by_name[weak] is CqStatus.REFUTED:
                violations.append((strong, weak))
    return violations


def _acq_verdict(name: str, status: AcqStatus, counterexamples: list[tuple[float, ...]]) -> CqVerdict:
    if status is AcqStatus.REFUTED:
        return CqVerdict(name, CqStatus.REFUTED,
                         {"kind": "direction_counterexample", "directions": [list(d) for d in counterexamples]})
    return CqVerdict(name, CqStatus.NO_VIOLATION_FOUND, {}, ["CORROBORATED: nenhuma direção contraexemplo"])


@dataclass
class CqReport:
    problem: str
    point: NDArray[np.float64]
    sets: IndexSets
    verdicts: list[CqVerdict]
    chain_violations: list[tuple[str, str]]
    discrepancies: list[dict[str, Any]] = field(default_factory=list)
    acq: AcqProbeReport | None = None

    def verdict(self, name: str) -> CqVerdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def status(self, name: str) -> CqStatus:
        return self.verdict(name).status

    def to_dict(self) -> dict[str, Any]:
        return {
            "problem": self.problem,
            "point": self.point.tolist(),
            "index_sets": self.sets.to_dict(),
            "verdicts": [v.to_dict() for v in self.verdicts],
            "chain_violations": [list(pair) for pair in self.chain_violations],
            "discrepancies": self.discrepancies,
            "acq": None if self.acq is None else self.acq.to_dict(),
        }


def full_report(
    prob: MpvcProblem,
    x: Sequence[float],
    tol_active: float | None = None,
    search_cfg: RefuterConfig | None = None,
    with_acq: bool = True,
    acq_directions: int | None = None,
    probe_all: bool = False,
    sets: IndexSets | None = None,
) -> CqReport:
    """Classifica o ponto, roda as cinco condições e a sonda de ACQ.

    Raises:
        InfeasiblePointError: Ponto inviável.
        BranchCapError: |I_00| acima do limite.
    """
    point = prob.point(x)
    sets = sets or classify(prob, point, tol_active)
    cfg = search_cfg or RefuterConfig()

    licq = check_licq(prob, point, sets)
    mfcq = check_mfcq(prob, point, sets)
    gmfcq = check_gmfcq(prob, point, sets)
    candidates = (
        [] if gmfcq.status is CqStatus.CERTIFIED else _candidate_multipliers(prob, point, sets)
    )
    pseudo = refute_pseudonormality(prob, point, sets, cfg, gmfcq=gmfcq, candidates=candidates)
    quasi = refute_quasinormality(prob, point, sets, cfg, pseudo=pseudo, candidates=candidates)
    verdicts = [licq, mfcq, gmfcq, pseudo, quasi]

    acq: AcqProbeReport | None = None
    discrepancies: list[dict[str, Any]] = []
    if with_acq:
        acq = probe_acq(prob, point, directions=acq_directions, sets=sets, probe_all=probe_all)
        verdicts.append(_acq_verdict(ACQ_MPVC, acq.acq_mpvc, acq.counterexamples_mpvc))
        verdicts.append(_acq_verdict(ACQ_PRODUCT, acq.acq_product, acq.counterexamples_product))
        if quasi.status is not CqStatus.REFUTED and acq.acq_mpvc is AcqStatus.REFUTED:
            discrepancies.append({
                "kind": "quasinormality_without_acq",
                "quasinormality": quasi.status.value,
                "witness": list(acq.counterexamples_mpvc[0]),
            })
        if acq.cone_mismatches:
            discrepancies.append({
                "kind": "linearized_cones_differ",
                "directions": acq.cone_mismatches,
                "example": list(acq.mismatch_examples[0]) if acq.mismatch_examples else None,
            })

    violations = chain_violations(verdicts)
    report = CqReport(
        problem=prob.name,
        point=point,
        sets=sets,
        verdicts=verdicts,
        chain_violations=violations,
        discrepancies=discrepancies,
        acq=acq,
    )
    for verdict in verdicts:
        logger.info("%s: %s", verdict.name, verdict.status.value)
    for entry in discrepancies:
        logger.warning("Discrepância registrada em '%s': %s", prob.name, entry["kind"],
                       extra={"extra_data": entry})
    if violations:
        logger.error("Violação da cadeia de implicações em '%s'", prob.name,
                     extra={"extra_data": {"pairs": violations}})
    return report
