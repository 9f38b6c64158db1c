"""Auditoria da cadeia de implicações em instâncias MPVC aleatórias.

O gerador monta polinômios inteiros sem termo constante e desloca cada
restrição por uma constante que decide a atividade na origem, de modo que
x = 0 é sempre viável. Metade das instâncias força o par 0 em I_00.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from .config import config
from .cq import CQ_ORDER, BranchCapError, RefuterConfig, full_report
from .model import MpvcProblem, parse_problem, problem_to_text

__all__ = [
    "GeneratorConfig",
    "AuditEntry",
    "AuditReport",
    "generate_instance",
    "audit_problems",
    "audit_corpus",
    "CORPUS_ACQ_DIRECTIONS",
]

logger = logging.getLogger(__name__)

PAIR_CASES = ("I_+-", "I_+0", "I_0+", "I_0-", "I_00")
# Direções da sonda de ACQ por instância gerada quando nada é pedido.
CORPUS_ACQ_DIRECTIONS = 24


@dataclass(frozen=True)
class GeneratorConfig:
    """Limites do gerador de instâncias polinomiais."""

    n_min: int = 1
    n_max: int = 3
    max_degree: int = 3
    max_terms: int = 3
    max_m: int = 2
    max_l: int = 2
    q_min: int = 1
    q_max: int = 2
    coef_range: int = 3

    def __post_init__(self) -> None:
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"faixa de n inválida: [{self.n_min}, {self.n_max}]")
        if not 1 <= self.q_min <= self.q_max:
            raise ValueError(f"faixa de q inválida: [{self.q_min}, {self.q_max}]")
        if self.max_degree < 1 or self.max_terms < 1 or self.coef_range < 1:
            raise ValueError("grau, termos e coeficientes devem ser positivos")
        if self.max_m < 0 or self.max_l < 0:
            raise ValueError("max_m e max_l devem ser >= 0")


def _monomial(rng: np.random.Generator, n: int, degree: int) -> str:
    exponents = np.zeros(n, dtype=int)
    for i in rng.integers(0, n, size=degree):
        exponents[i] += 1
    factors = []
    for i, e in enumerate(exponents):
        if e == 1:
            factors.append(f"x{i + 1}")
        elif e > 1:
            factors.append(f"x{i + 1}^{e}")
    return "*".join(factors)


def _polynomial(rng: np.random.Generator, n: int, cfg: GeneratorConfig, shift: int) -> str:
    """Polinômio de coeficientes inteiros com valor `shift` na origem."""
    terms = []
    for _ in range(int(rng.integers(1, cfg.max_terms + 1))):
        coef = int(rng.integers(1, cfg.coef_range + 1)) * int(rng.choice([-1, 1]))
        degree = int(rng.integers(1, cfg.max_degree + 1))
        terms.append(f"{coef}*{_monomial(rng, n, degree)}")
    if shift:
        terms.append(str(shift))
    return " + ".join(terms).replace("+ -", "- ")


def _pair_shifts(rng: np.random.Generator, case: str) -> tuple[int, int]:
    """(deslocamento de G, deslocamento de H) para o caso pedido."""
    magnitude = int(rng.integers(1, 3))
    if case == "I_+-":
        return -magnitude, magnitude
    if case == "I_+0":
        return 0, magnitude
    if case == "I_0+":
        return magnitude, 0
    if case == "I_0-":
        return -magnitude, 0
    return 0, 0


def generate_instance(index: int, rng: np.random.Generator, cfg: GeneratorConfig | None = None) -> MpvcProblem:
    """Instância aleatória viável na origem."""
    cfg = cfg or GeneratorConfig()
    n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
    m = int(rng.integers(0, cfg.max_m + 1))
    l = int(rng.integers(0, cfg.max_l + 1))  # noqa: E741
    q = int(rng.integers(cfg.q_min, cfg.q_max + 1))
    names = [f"x{i + 1}" for i in range(n)]

    lines = [f"[name] inst{index:04d}", f"[vars] {' '.join(names)}",
             f"[objective] {' + '.join(f'{v}^2' for v in names)}"]
    if m:
        lines.append("[g]")
        for _ in range(m):
            shift = 0 if rng.random() < 0.6 else -int(rng.integers(1, 3))
            lines.append(_polynomial(rng, n, cfg, shift))
    if l:
        lines.append("[h]")
        lines.extend(_polynomial(rng, n, cfg, 0) for _ in range(l))
    lines.append("[vc]")
    for i in range(q):
        case = "I_00" if i == 0 and index % 2 == 0 else PAIR_CASES[int(rng.integers(0, len(PAIR_CASES)))]
        shift_G, shift_H = _pair_shifts(rng, case)
        lines.append(f"G: {_polynomial(rng, n, cfg, shift_G)} ; H: {_polynomial(rng, n, cfg, shift_H)}")
    return parse_problem("\n".join(lines) + "\n", source=f"<gerador #{index}>")


@dataclass
class AuditEntry:
    index: int
    problem: str
    point: tuple[float, ...]
    statuses: dict[str, str] = field(default_factory=dict)
    chain_violations: list[tuple[str, str]] = field(default_factory=list)
    discrepancies: list[str] = field(default_factory=list)
    inclusion_violations: int = 0
    biactive: int = 0
    error: str | None = None
    source: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "problem": self.problem,
            "point": list(self.point),
            "statuses": self.statuses,
            "chain_violations": [list(pair) for pair in self.chain_violations],
            "discrepancies": self.discrepancies,
            "inclusion_violations": self.inclusion_violations,
            "biactive": self.biactive,
            "error": self.error,
            "source": self.source,
        }


@dataclass
class AuditReport:
    seed: int | None
    entries: list[AuditEntry]

    @property
    def instances(self) -> int:
        return len(self.entries)

    @property
    def chain_violations(self) -> int:
        return sum(len(e.chain_violations) for e in self.entries)

    @property
    def inclusion_violations(self) -> int:
        return sum(e.inclusion_violations for e in self.entries)

    @property
    def errors(self) -> int:
        return sum(1 for e in self.entries if e.error is not None)

    def discrepancy_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for entry in self.entries:
            for kind in entry.discrepancies:
                counts[kind] = counts.get(kind, 0) + 1
        return dict(sorted(counts.items()))

    def status_counts(self) -> dict[str, dict[str, int]]:
        counts: dict[str, dict[str, int]] = {}
        for entry in self.entries:
            for name, status in entry.statuses.items():
                counts.setdefault(name, {}).setdefault(status, 0)
                counts[name][status] += 1
        return {name: dict(sorted(c.items())) for name, c in counts.items()}

    def to_dict(self, include_entries: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {
            "seed": self.seed,
            "instances": self.instances,
            "chain_violations": self.chain_violations,
            "inclusion_violations": self.inclusion_violations,
            "errors": self.errors,
            "discrepancies": self.discrepancy_counts(),
            "status_counts": self.status_counts(),
        }
        if include_entries:
            data["entries"] = [e.to_dict() for e in self.entries]
        return data


def _audit_one(
    index: int,
    prob: MpvcProblem,
    x: NDArray[np.float64],
    with_acq: bool,
    search_cfg: RefuterConfig | None,
    acq_directions: int | None,
) -> AuditEntry:
    entry = AuditEntry(index=index, problem=prob.name, point=tuple(x.tolist()),
                       source=problem_to_text(prob))
    try:
        report = full_report(prob, x, search_cfg=search_cfg, with_acq=with_acq,
                             acq_directions=acq_directions)
    except BranchCapError as e:
        entry.error = str(e)
        logger.warning("Instância %d ignorada: %s", index, e)
        return entry
    entry.statuses = {v.name: v.status.value for v in report.verdicts}
    entry.chain_violations = list(report.chain_violations)
    entry.discrepancies = [d["kind"] for d in report.discrepancies]
    entry.inclusion_violations = len(report.acq.inclusion_violations) if report.acq else 0
    entry.biactive = len(report.sets.I_00)
    return entry


def audit_problems(
    problems: Sequence[tuple[MpvcProblem, Sequence[float]]],
    with_acq: bool = True,
    workers: int | None = None,
    search_cfg: RefuterConfig | None = None,
    acq_directions: int | None = None,
    seed: int | None = None,
) -> AuditReport:
    """Roda full_report em cada (problema, ponto) e agrega as violações.

    Com workers > 1 as instâncias rodam em threads; a ordem do relatório é
    sempre a da entrada.
    """
    workers = config.AUDIT_WORKERS if workers is None else workers
    tasks = [(i, prob, prob.point(x)) for i, (prob, x) in enumerate(problems)]

    def run(task: tuple[int, MpvcProblem, NDArray[np.float64]]) -> AuditEntry:
        index, prob, x = task
        return _audit_one(index, prob, x, with_acq, search_cfg, acq_directions)

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="audit") as executor:
            entries = list(executor.map(run, tasks))
    else:
        entries = [run(task) for task in tasks]

    report = AuditReport(seed=seed, entries=entries)
    logger.info(
        "Auditoria concluída: %d instância(s), %d violação(ões) da cadeia",
        report.instances, report.chain_violations,
        extra={"extra_data": report.to_dict(include_entries=False)},
    )
    return report


def audit_corpus(
    instances: int = 200,
    seed: int | None = None,
    generator_cfg: GeneratorConfig | None = None,
    with_acq: bool = True,
    workers: int | None = None,
    search_cfg: RefuterConfig | None = None,
    acq_directions: int | None = None,
) -> AuditReport:
    """Gera `instances` problemas com sementes filhas de `seed` e audita na origem.

    O resultado é idêntico para o mesmo (generator_cfg, seed), com
    qualquer número de workers. Sem `acq_directions`, a sonda de ACQ usa
    CORPUS_ACQ_DIRECTIONS direções por instância.
    """
    if instances < 0:
        raise ValueError(f"instances deve ser >= 0, recebido {instances}")
    seed = config.SEED if seed is None else seed
    cfg = generator_cfg or GeneratorConfig()
    children = np.random.SeedSequence(seed).spawn(instances)
    problems = []
    for index, child in enumerate(children):
        prob = generate_instance(index, np.random.default_rng(child), cfg)
        problems.append((prob, np.zeros(prob.n)))
    return audit_problems(
        problems, with_acq=with_acq, workers=workers, search_cfg=search_cfg,
        acq_directions=CORPUS_ACQ_DIRECTIONS if acq_directions is None else acq_directions,
        seed=seed,
    )
