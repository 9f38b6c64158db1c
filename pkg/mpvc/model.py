"""Problema MPVC, resíduos de viabilidade e conjuntos de índices ativos."""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from .config import config
from .expr import (
    DimensionError,
    Expr,
    ExprError,
    ExprSyntaxError,
    VarSpace,
    evaluate,
    evaluate_batch,
    grad,
    parse_expr,
    to_text,
)
from .penalty import dist_omega_array

__all__ = [
    "MpvcProblem",
    "IndexSets",
    "Residuals",
    "ConstraintValues",
    "ConstraintGradients",
    "ProblemError",
    "ProblemParseError",
    "InfeasiblePointError",
    "classify",
    "residuals",
    "is_feasible",
    "parse_problem",
    "load_problem",
    "problem_to_text",
    "parse_point",
]

MAX_PROBLEM_FILE_SIZE = 1024 * 1024  # 1MB

logger = logging.getLogger(__name__)


class ProblemError(Exception):
    """Problema MPVC mal formado."""


class ProblemParseError(ProblemError):
    """Erro de leitura de arquivo de problema, com linha e coluna (1-based)."""

    def __init__(self, message: str, line: int = 1, column: int = 1) -> None:
        super().__init__(f"{message} (linha {line}, coluna {column})")
        self.reason = message
        self.line = line
        self.column = column


class InfeasiblePointError(ProblemError):
    """Ponto fora da região viável onde só pontos viáveis são aceitos."""

    def __init__(self, message: str, total: float) -> None:
        super().__init__(message)
        self.total = total


@dataclass(frozen=True)
class ConstraintValues:
    g: NDArray[np.float64]
    h: NDArray[np.float64]
    G: NDArray[np.float64]
    H: NDArray[np.float64]


@dataclass(frozen=True)
class ConstraintGradients:
    """Gradientes empilhados por família; cada matriz tem forma (k, n)."""

    g: NDArray[np.float64]
    h: NDArray[np.float64]
    G: NDArray[np.float64]
    H: NDArray[np.float64]


@dataclass(frozen=True)
class Residuals:
    """Violação componente a componente: g⁺, |h| e dist_Ω(G, H)."""

    g_plus: NDArray[np.float64]
    h_abs: NDArray[np.float64]
    vc_dist: NDArray[np.float64]
    total: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "g_plus": self.g_plus.tolist(),
            "h_abs": self.h_abs.tolist(),
            "vc_dist": self.vc_dist.tolist(),
            "total": self.total,
        }


@dataclass(frozen=True)
class MpvcProblem:
    """min f(x) s.a. g(x) ≤ 0, h(x) = 0, H_i(x) ≥ 0, G_i(x)·H_i(x) ≤ 0.

    Os pares de restrições que se anulam são guardados como (G_i, H_i).
    """

    variables: VarSpace
    objective: Expr
    g: tuple[Expr, ...] = ()
    h: tuple[Expr, ...] = ()
    vc_pairs: tuple[tuple[Expr, Expr], ...] = ()
    name: str = "mpvc"

    def __post_init__(self) -> None:
        object.__setattr__(self, "g", tuple(self.g))
        object.__setattr__(self, "h", tuple(self.h))
        object.__setattr__(self, "vc_pairs", tuple((G, H) for G, H in self.vc_pairs))
        if not self.vc_pairs:
            raise ProblemError(
                f"Problema '{self.name}' sem restrições que se anulam (q = 0) não é um MPVC"
            )
        constraints = (*self.g, *self.h, *(e for pair in self.vc_pairs for e in pair))
        n = self.variables.dim
        for e in (self.objective, *constraints):
            if e.max_var_index >= n:
                raise ProblemError(
                    f"Expressão '{to_text(e)}' usa variável além das {n} declaradas"
                )
        for e in constraints:
            if not e.is_smooth:
                raise ProblemError(
                    f"Restrição '{to_text(e, self.variables.names)}' não é suave "
                    "(abs/min/max só são aceitos no objetivo)"
                )

    def __repr__(self) -> str:
        return (
            f"MpvcProblem(name={self.name!r}, n={self.n}, m={self.m}, "
            f"l={self.l}, q={self.q})"
        )

    @property
    def n(self) -> int:
        return self.variables.dim

    @property
    def m(self) -> int:
        return len(self.g)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.h)

    @property
    def q(self) -> int:
        return len(self.vc_pairs)

    @property
    def G(self) -> tuple[Expr, ...]:
        return tuple(pair[0] for pair in self.vc_pairs)

    @property
    def H(self) -> tuple[Expr, ...]:
        return tuple(pair[1] for pair in self.vc_pairs)

    def point(self, x: Sequence[float]) -> NDArray[np.float64]:
        """Converte x em vetor numpy validando a dimensão."""
        arr = np.asarray(x, dtype=np.float64).reshape(-1)
        if arr.shape[0] != self.n:
            raise DimensionError(f"ponto com dimensão {arr.shape[0]}, esperado {self.n}")
        return arr

    def objective_value(self, x: Sequence[float]) -> float:
        return evaluate(self.objective, self.point(x))

    def values(self, x: Sequence[float]) -> ConstraintValues:
        point = self.point(x)
        return ConstraintValues(
            g=np.array([evaluate(e, point) for e in self.g], dtype=np.float64),
            h=np.array([evaluate(e, point) for e in self.h], dtype=np.float64),
            G=np.array([evaluate(e, point) for e in self.G], dtype=np.float64),
            H=np.array([evaluate(e, point) for e in self.H], dtype=np.float64),
        )

    def gradients(self, x: Sequence[float]) -> ConstraintGradients:
        point = self.point(x)

        def stack(exprs: tuple[Expr, ...]) -> NDArray[np.float64]:
            if not exprs:
                return np.zeros((0, self.n))
            return np.vstack([grad(e, point) for e in exprs])

        return ConstraintGradients(
            g=stack(self.g), h=stack(self.h), G=stack(self.G), H=stack(self.H)
        )

    def residuals(self, x: Sequence[float]) -> Residuals:
        values = self.values(x)
        g_plus = np.maximum(values.g, 0.0)
        h_abs = np.abs(values.h)
        vc_dist = dist_omega_array(values.G, values.H)
        total = float(g_plus.sum() + h_abs.sum() + vc_dist.sum())
        return Residuals(g_plus=g_plus, h_abs=h_abs, vc_dist=vc_dist, total=total)

    def residuals_batch(self, points: NDArray[np.float64]) -> NDArray[np.float64]:
        """Resíduo total em cada linha de `points` (forma (k, n))."""
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        total = np.zeros(points.shape[0])
        for e in self.g:
            total += np.maximum(evaluate_batch(e, points), 0.0)
        for e in self.h:
            total += np.abs(evaluate_batch(e, points))
        for G, H in self.vc_pairs:
            total += dist_omega_array(evaluate_batch(G, points), evaluate_batch(H, points))
        return total

    def with_objective(self, objective: Expr) -> "MpvcProblem":
        return MpvcProblem(
            variables=self.variables,
            objective=objective,
            g=self.g,
            h=self.h,
            vc_pairs=self.vc_pairs,
            name=self.name,
        )

    def without_inequalities(self) -> "MpvcProblem":
        """Mesmo problema sem as famílias g e h (domínio de P¹_α)."""
        return MpvcProblem(
            variables=self.variables,
            objective=self.objective,
            vc_pairs=self.vc_pairs,
            name=f"{self.name}-sem-g-h",
        )

    def to_dict(self) -> dict[str, Any]:
        names = self.variables.names
        return {
            "name": self.name,
            "vars": list(names),
            "objective": to_text(self.objective, names),
            "g": [to_text(e, names) for e in self.g],
            "h": [to_text(e, names) for e in self.h],
            "vc": [
                {"G": to_text(G, names), "H": to_text(H, names)} for G, H in self.vc_pairs
            ],
        }


@dataclass(frozen=True)
class IndexSets:
    """Partição dos índices ativos num ponto viável (índices 0-based)."""

    I_g: frozenset[int]
    I_plus: frozenset[int]
    I_0: frozenset[int]
    I_p0: frozenset[int]
    I_pm: frozenset[int]
    I_0p: frozenset[int]
    I_0m: frozenset[int]
    I_00: frozenset[int]
    tol_active: float

    DISPLAY_NAMES = {
        "I_g": "I_g",
        "I_plus": "I_+",
        "I_0": "I_0",
        "I_p0": "I_+0",
        "I_pm": "I_+-",
        "I_0p": "I_0+",
        "I_0m": "I_0-",
        "I_00": "I_00",
    }

    def items(self) -> Iterable[tuple[str, frozenset[int]]]:
        for attr in self.DISPLAY_NAMES:
            yield attr, getattr(self, attr)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            self.DISPLAY_NAMES[attr]: sorted(indices) for attr, indices in self.items()
        }
        data["tol_active"] = self.tol_active
        return data


def _tol(tol_active: float | None) -> float:
    return config.TOL_ACTIVE if tol_active is None else tol_active


def residuals(prob: MpvcProblem, x: Sequence[float]) -> Residuals:
    return prob.residuals(x)


def is_feasible(prob: MpvcProblem, x: Sequence[float], tol: float | None = None) -> bool:
    """True se o resíduo total é ≤ tol (padrão: tolerância de atividade)."""
    return prob.residuals(x).total <= _tol(tol)


def classify(
    prob: MpvcProblem, x: Sequence[float], tol_active: float | None = None
) -> IndexSets:
    """Classifica os índices ativos num ponto viável.

    |v| ≤ tol_active conta como v = 0; v > tol_active como positivo.

    Raises:
        InfeasiblePointError: Resíduo total acima de tol_active.
        DimensionError: Ponto com dimensão errada.
    """
    tol = _tol(tol_active)
    total = prob.residuals(x).total
    if total > tol:
        logger.info(
            "Classificação recusada: ponto inviável",
            extra={"extra_data": {"problem": prob.name, "residual": total}},
        )
        raise InfeasiblePointError(
            f"Ponto inviável para '{prob.name}': resíduo total {total:.3e} > {tol:.1e}", total
        )

    values = prob.values(x)
    zero_g = np.abs(values.g) <= tol
    zero_G = np.abs(values.G) <= tol
    zero_H = np.abs(values.H) <= tol

    I_g = frozenset(int(i) for i in np.flatnonzero(zero_g))
    I_plus = frozenset(int(i) for i in np.flatnonzero(~zero_H))
    I_0 = frozenset(int(i) for i in np.flatnonzero(zero_H))
    I_p0 = frozenset(i for i in I_plus if zero_G[i])
    I_pm = frozenset(i for i in I_plus if not zero_G[i])
    I_0p = frozenset(i for i in I_0 if values.G[i] > tol)
    I_0m = frozenset(i for i in I_0 if values.G[i] < -tol)
    I_00 = frozenset(i for i in I_0 if zero_G[i])

    sets = IndexSets(
        I_g=I_g, I_plus=I_plus, I_0=I_0, I_p0=I_p0, I_pm=I_pm,
        I_0p=I_0p, I_0m=I_0m, I_00=I_00, tol_active=tol,
    )
    logger.debug("Conjuntos de índices de '%s': %s", prob.name, sets.to_dict())
    return sets


# =============================================================================
# Arquivo de problema
# =============================================================================

SECTIONS = ("name", "vars", "objective", "g", "h", "vc")
_SECTION_RE = re.compile(r"\[([A-Za-z_]+)\]")
_VC_RE = re.compile(r"\s*G\s*:(?P<G>[^;]*);\s*H\s*:(?P<H>.*)\Z")


@dataclass
class _Entry:
    text: str
    line: int
    column: int


def _strip_comment(line: str) -> str:
    position = line.find("#")
    return line if position < 0 else line[:position]


def _split_sections(text: str) -> dict[str, list[_Entry]]:
    sections: dict[str, list[_Entry]] = {}
    current: str | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        stripped = line.lstrip()
        offset = len(line) - len(stripped)
        match = _SECTION_RE.match(stripped)
        if match:
            current = match.group(1)
            if current not in SECTIONS:
                raise ProblemParseError(f"seção desconhecida '[{current}]'", line_no, offset + 1)
            if current in sections:
                raise ProblemParseError(f"seção '[{current}]' repetida", line_no, offset + 1)
            sections[current] = []
            rest = stripped[match.end():]
            if rest.strip():
                rest_offset = offset + match.end() + (len(rest) - len(rest.lstrip()))
                sections[current].append(_Entry(rest.strip(), line_no, rest_offset + 1))
            continue
        if current is None:
            raise ProblemParseError("conteúdo fora de seção", line_no, offset + 1)
        sections[current].append(_Entry(stripped.rstrip(), line_no, offset + 1))
    return sections


def _parse_entry(entry: _Entry, variables: VarSpace, allow_nonsmooth: bool, column_shift: int = 0) -> Expr:
    try:
        return parse_expr(entry.text, variables, allow_nonsmooth=allow_nonsmooth)
    except ExprSyntaxError as e:
        raise ProblemParseError(
            e.reason, entry.line, entry.column + column_shift + e.column - 1
        ) from e


def parse_problem(text: str, source: str = "<texto>") -> MpvcProblem:
    """Lê um problema no formato de seções [name]/[vars]/[objective]/[g]/[h]/[vc].

    Raises:
        ProblemParseError: Seção ausente, desconhecida ou expressão inválida.
        ProblemError: Problema sem pares (q = 0).
    """
    sections = _split_sections(text)
    for required in ("vars", "objective"):
        if not sections.get(required):
            raise ProblemParseError(f"seção obrigatória '[{required}]' ausente em {source}")

    var_entries = sections["vars"]
    names = tuple(name for entry in var_entries for name in entry.text.split())
    try:
        variables = VarSpace(names)
    except ExprError as e:
        entry = var_entries[0]
        raise ProblemParseError(str(e), entry.line, entry.column) from e

    objective_entries = sections["objective"]
    if len(objective_entries) != 1:
        entry = objective_entries[1]
        raise ProblemParseError("o objetivo deve ocupar uma única linha", entry.line, entry.column)
    objective = _parse_entry(objective_entries[0], variables, allow_nonsmooth=True)

    g = tuple(_parse_entry(entry, variables, False) for entry in sections.get("g", []))
    h = tuple(_parse_entry(entry, variables, False) for entry in sections.get("h", []))

    pairs: list[tuple[Expr, Expr]] = []
    for entry in sections.get("vc", []):
        match = _VC_RE.match(entry.text)
        if not match:
            raise ProblemParseError(
                "par esperado no formato 'G: <expr> ; H: <expr>'", entry.line, entry.column
            )
        G = _parse_entry(
            _Entry(match.group("G"), entry.line, entry.column), variables, False,
            column_shift=match.start("G"),
        )
        H = _parse_entry(
            _Entry(match.group("H"), entry.line, entry.column), variables, False,
            column_shift=match.start("H"),
        )
        pairs.append((G, H))

    name_entries = sections.get("name", [])
    name = " ".join(entry.text for entry in name_entries) or Path(source).stem or "mpvc"

    problem = MpvcProblem(
        variables=variables, objective=objective, g=g, h=h, vc_pairs=tuple(pairs), name=name
    )
    logger.info("Problema lido: %r de %s", problem, source)
    return problem


def load_problem(path: str | Path) -> MpvcProblem:
    """Carrega um arquivo .mpvc.

    Raises:
        ProblemError: Arquivo inexistente, grande demais ou mal formado.
    """
    path = Path(path)
    if not path.is_file():
        raise ProblemError(f"Arquivo não encontrado: {path}")
    size = path.stat().st_size
    if size > MAX_PROBLEM_FILE_SIZE:
        raise ProblemError(
            f"Arquivo muito grande ({size} bytes). Limite: {MAX_PROBLEM_FILE_SIZE} bytes"
        )
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ProblemError(f"Erro ao ler arquivo: {e}") from e
    return parse_problem(text, source=str(path))


def problem_to_text(prob: MpvcProblem) -> str:
    """Serializa o problema no formato de arquivo (inversa de parse_problem)."""
    data = prob.to_dict()
    lines = [f"[name] {data['name']}", f"[vars] {' '.join(data['vars'])}", f"[objective] {data['objective']}"]
    if data["g"]:
        lines.append("[g]")
        lines.extend(data["g"])
    if data["h"]:
        lines.append("[h]")
        lines.extend(data["h"])
    lines.append("[vc]")
    lines.extend(f"G: {pair['G']} ; H: {pair['H']}" for pair in data["vc"])
    return "\n".join(lines) + "\n"


def parse_point(text: str, dim: int) -> NDArray[np.float64]:
    """Converte "0,0.5" em vetor; a ordem é a de [vars].

    Raises:
        ValueError: Número mal formado ou dimensão errada.
    """
    parts = [part.strip() for part in text.split(",")]
    try:
        values = [float(part) for part in parts]
    except ValueError as e:
        raise ValueError(f"Ponto inválido '{text}': {e}") from e
    if len(values) != dim:
        raise DimensionError(f"Ponto '{text}' tem {len(values)} coordenadas, esperado {dim}")
    if not all(np.isfinite(values)):
        raise ValueError(f"Ponto inválido '{text}': coordenadas devem ser finitas")
    return np.array(values, dtype=np.float64)
