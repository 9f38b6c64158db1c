"""Formatação e exibição no terminal."""

import logging
from typing import Sequence

from rich.console import Console
from rich.table import Table

from .audit import AuditReport
from .cq import CqReport, CqStatus, CqVerdict
from .empirics import AcqProbeReport, AcqStatus, ErrorBoundScan, PenaltyProfile
from .model import IndexSets, MpvcProblem
from .solver import SolveResult

__all__ = ["Display", "STATUS_STYLES", "format_indices", "format_point"]

logger = logging.getLogger(__name__)

STATUS_STYLES = {
    CqStatus.CERTIFIED.value: "bold green",
    CqStatus.REFUTED.value: "bold red",
    CqStatus.NO_VIOLATION_FOUND.value: "yellow",
    AcqStatus.CORROBORATED.value: "green",
}


def format_indices(indices: frozenset[int]) -> str:
    """Índices 1-based entre chaves; ∅ para o conjunto vazio."""
    if not indices:
        return "∅"
    return "{" + ", ".join(str(i + 1) for i in sorted(indices)) + "}"


def format_point(point: Sequence[float], digits: int = 6) -> str:
    return "(" + ", ".join(f"{float(v):.{digits}g}" for v in point) + ")"


class Display:
    """Gerencia a exibição formatada no terminal."""

    def __init__(self, console: Console | None = None) -> None:
        self.console: Console = console or Console()

    def __repr__(self) -> str:
        return f"Display(width={self.console.width})"

    def _styled(self, status: str) -> str:
        style = STATUS_STYLES.get(status, "")
        return f"[{style}]{status}[/{style}]" if style else status

    def show_problem(self, prob: MpvcProblem, point: Sequence[float] | None = None) -> None:
        """Cabeçalho com nome, dimensões e ponto analisado."""
        line = (
            f"[bold]{prob.name}[/bold] [dim]n={prob.n} m={prob.m} "
            f"l={prob.l} q={prob.q}[/dim]"
        )
        if point is not None:
            line += f"  x* = {format_point(point)}"
        self.console.print()
        self.console.print(line)

    def show_index_sets(self, sets: IndexSets) -> None:
        table = Table(title="Conjuntos de índices", show_header=True, header_style="bold dim")
        table.add_column("Conjunto", style="cyan")
        table.add_column("Índices")
        for attr, indices in sets.items():
            table.add_row(IndexSets.DISPLAY_NAMES[attr], format_indices(indices))
        self.console.print(table)

    def show_verdicts(self, verdicts: Sequence[CqVerdict]) -> None:
        table = Table(title="Condições de qualificação", show_header=True, header_style="bold dim")
        table.add_column("Condição", style="cyan")
        table.add_column("Veredito")
        table.add_column("Evidência", style="dim")
        for verdict in verdicts:
            evidence = verdict.certificate.get("kind", "")
            if verdict.notes:
                evidence = f"{evidence}: {verdict.notes[0]}" if evidence else verdict.notes[0]
            table.add_row(verdict.name, self._styled(verdict.status.value), evidence)
        self.console.print(table)

    def show_acq(self, acq: AcqProbeReport) -> None:
        counts = acq.verdict_counts()
        self.console.print(
            f"[bold dim]Sonda de ACQ:[/bold dim] {len(acq.entries)} direções, "
            f"{acq.probed} sondadas "
            f"[dim](YES {counts['YES']}, NO {counts['NO']}, INCONCLUSIVE {counts['INCONCLUSIVE']})[/dim]"
        )
        for label, status, examples in (
            ("L_MPVC", acq.acq_mpvc, acq.counterexamples_mpvc),
            ("L_C", acq.acq_product, acq.counterexamples_product),
        ):
            line = f"  {label:<7} {self._styled(status.value)}"
            if examples:
                line += f" [dim]contraexemplo d = {format_point(examples[0], 4)}[/dim]"
            self.console.print(line)
        if acq.cone_mismatches:
            self.show_info(f"L_MPVC e L_C diferem em {acq.cone_mismatches} direção(ões) amostrada(s)")

    def show_report(self, report: CqReport) -> None:
        """Relatório completo de `analyze`."""
        self.show_index_sets(report.sets)
        self.show_verdicts(report.verdicts)
        if report.acq is not None:
            self.show_acq(report.acq)
        for entry in report.discrepancies:
            self.console.print(f"[bold yellow]⚠ Discrepância:[/bold yellow] {entry['kind']}")
        if report.chain_violations:
            pairs = ", ".join(f"{a} ⇏ {b}" for a, b in report.chain_violations)
            self.show_error(f"Violação da cadeia de implicações: {pairs}")

    def show_penalty_profile(self, profile: PenaltyProfile) -> None:
        table = Table(title="Varredura de α", show_header=True, header_style="bold dim")
        table.add_column("α", justify="right")
        table.add_column("Minimizador")
        table.add_column("P_α", justify="right")
        table.add_column("Resíduo", justify="right")
        table.add_column("‖x − x*‖₁", justify="right")
        table.add_column("")
        for row in profile.rows:
            marker = "[green]exata[/green]" if row.exact else ""
            if profile.alpha_bar is not None and row.alpha == profile.alpha_bar:
                marker = "[bold green]ᾱ[/bold green]"
            table.add_row(
                f"{row.alpha:g}", format_point(row.point), f"{row.value:.6g}",
                f"{row.residual:.2e}", f"{row.distance:.2e}", marker,
            )
        self.console.print(table)
        if profile.alpha_bar is None:
            self.show_info("Nenhum α da grade estabilizou o minimizador em x*.")
        else:
            self.show_info(f"ᾱ estimado: {profile.alpha_bar:g} (tolerância {profile.exact_tol:g})")

    def show_scan(self, scan: ErrorBoundScan) -> None:
        bar = "aproximado" if scan.error_bar is None else f"barra de erro {scan.error_bar:.1e}"
        self.console.print(
            f"[bold dim]Cota de erro:[/bold dim] raio {scan.radius:g}, {len(scan.samples)} amostras, "
            f"{len(scan.ratios)} razões [dim]({scan.oracle}, {bar})[/dim]"
        )
        flag = "[bold red]sim[/bold red]" if scan.unbounded_flag else "não"
        self.console.print(f"  c_hat = [bold]{scan.c_hat:.6g}[/bold]  ilimitada: {flag}")

    def show_solve(self, result: SolveResult) -> None:
        status = "[bold green]convergiu[/bold green]" if result.converged else "[bold red]não convergiu[/bold red]"
        self.console.print(
            f"{status}: x = {format_point(result.point)}  P_α = {result.value:.6g}  "
            f"resíduo = {result.residual:.2e}  α = {result.alpha:g}"
        )
        if result.failed_starts:
            self.show_info(f"{result.failed_starts} partida(s) abandonada(s) por erro de avaliação")

    def show_audit(self, audit: AuditReport) -> None:
        table = Table(title=f"Auditoria ({audit.instances} instâncias)", show_header=True,
                      header_style="bold dim")
        table.add_column("Condição", style="cyan")
        for status in (CqStatus.CERTIFIED, CqStatus.REFUTED, CqStatus.NO_VIOLATION_FOUND):
            table.add_column(status.value, justify="right")
        for name, counts in audit.status_counts().items():
            table.add_row(name, *(str(counts.get(s.value, 0)) for s in
                                  (CqStatus.CERTIFIED, CqStatus.REFUTED, CqStatus.NO_VIOLATION_FOUND)))
        self.console.print(table)
        self.console.print(f"chain violations: {audit.chain_violations}")
        self.console.print(f"inclusion violations: {audit.inclusion_violations}")
        for kind, count in audit.discrepancy_counts().items():
            self.show_info(f"discrepância {kind}: {count}")

    def show_error(self, message: str) -> None:
        """Exibe uma mensagem de erro."""
        self.console.print(f"\n[bold red]✗[/bold red] {message}\n")

    def show_success(self, message: str) -> None:
        """Exibe uma mensagem de sucesso."""
        self.console.print(f"[bold green]✓[/bold green] {message}")

    def show_info(self, message: str) -> None:
        """Exibe uma informação."""
        self.console.print(f"[dim]{message}[/dim]")

    def print_json(self, text: str) -> None:
        """JSON cru, sem marcação nem quebra de linha automática."""
        self.console.print(text, markup=False, highlight=False, soft_wrap=True)
