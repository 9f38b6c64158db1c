#!/usr/bin/env python3
"""
MPVC Lab - análise de programas com restrições evanescentes

Linha de comando para classificar pontos, certificar ou refutar
condições de qualificação e rodar os ensaios empíricos de penalidade,
cota de erro e ACQ.
"""

import argparse
import logging
import sys
from typing import Callable, Sequence

from mpvc.audit import audit_corpus
from mpvc.config import ConfigurationError, config
from mpvc.cq import BranchCapError, RefuterConfig, full_report
from mpvc.display import Display
from mpvc.empirics import DEFAULT_SWEEP_ALPHAS, penalty_sweep, probe_acq, scan_error_bound
from mpvc.expr import ExprError, parse_expr
from mpvc.logging_config import setup_logging
from mpvc.model import InfeasiblePointError, ProblemError, classify, load_problem, parse_point
from mpvc.penalty import PenaltyError
from mpvc.report import Report, ReportLoadError, report_to_json, save_report
from mpvc.solver import DEFAULT_ALPHAS, SolveConfig, solve_mpvc
from mpvc.version import __version__

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_INVARIANT_BREACH = 3

logger = logging.getLogger(__name__)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"lista de números inválida: '{text}'") from e


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"número inválido: '{text}'") from e
    if not value > 0:
        raise argparse.ArgumentTypeError(f"valor deve ser > 0, recebido {text}")
    return value


def _add_common(parser: argparse.ArgumentParser, suppress: bool) -> None:
    """Flags globais; nos subcomandos não sobrescrevem o valor já lido."""
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument(
        "--tol-active",
        type=_positive_float,
        metavar="TOL",
        default=default,
        help="faixa de atividade de classify (padrão: MPVC_TOL_ACTIVE)",
    )
    parser.add_argument("--seed", type=int, metavar="N", default=default,
                        help="semente dos amostradores (padrão: MPVC_SEED)")
    parser.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="imprime o relatório em JSON")
    parser.add_argument("--out", metavar="FILE", default=default,
                        help="grava o relatório JSON em arquivo")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        metavar="LEVEL",
        default=default,
        help="nível de logging (DEBUG, INFO, WARNING, ERROR)",
    )
    parser.add_argument("--log-file", metavar="FILE", default=default,
                        help="arquivo para salvar logs")


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Processa argumentos de linha de comando."""
    parser = argparse.ArgumentParser(
        prog="mpvclab",
        description="Análise de MPVC: conjuntos de índices, CQs, penalidade exata e cota de erro",
    )
    parser.add_argument(
        "-v", "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )
    _add_common(parser, suppress=False)
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMANDO")

    def command(name: str, help_text: str, with_file: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text, description=help_text)
        _add_common(sub, suppress=True)
        if with_file:
            sub.add_argument("file", metavar="ARQUIVO", help=f"problema no formato {config.PROBLEM_SUFFIX}")
        return sub

    analyze = command("analyze", "classifica o ponto e avalia todas as CQs")
    analyze.add_argument("--point", required=True, metavar="X", help="ponto, ex.: 0,0")
    analyze.add_argument("--directions", type=int, metavar="N", help="direções da sonda de ACQ")
    analyze.add_argument("--probe-all", action="store_true", help="sonda também direções fora dos cones")
    analyze.add_argument("--no-acq", action="store_true", help="pula a sonda de ACQ")

    sweep = command("penalty-sweep", "minimiza P_α numa grade de α em torno do ponto")
    sweep.add_argument("--point", required=True, metavar="X")
    sweep.add_argument("--alphas", type=_float_list, default=DEFAULT_SWEEP_ALPHAS, metavar="A,B,...")
    sweep.add_argument("--objective", metavar="EXPR", help="substitui o objetivo do arquivo")
    sweep.add_argument("--starts", type=int, default=8, metavar="N", help="partidas da busca padrão")

    scan = command("scan", "estima a constante da cota de erro local")
    scan.add_argument("--point", required=True, metavar="X")
    scan.add_argument("--radius", type=_positive_float, default=0.1, metavar="R")
    scan.add_argument("--samples", type=int, default=500, metavar="N")
    scan.add_argument("--include-samples", action="store_true", help="inclui as amostras no JSON")

    solve = command("solve", "resolve o MPVC por continuação em α")
    solve.add_argument("--start", metavar="X", help="ponto inicial único")
    solve.add_argument("--starts", type=int, default=8, metavar="N", help="partidas aleatórias")
    solve.add_argument("--alphas", type=_float_list, default=DEFAULT_ALPHAS, metavar="A,B,...")

    acq = command("acq", "compara os cones linearizados com a sonda de T_C")
    acq.add_argument("--point", required=True, metavar="X")
    acq.add_argument("--directions", type=int, metavar="N")
    acq.add_argument("--all", action="store_true", dest="probe_all",
                     help="sonda também direções fora dos cones")

    audit = command("audit", "audita a cadeia de implicações em instâncias aleatórias", with_file=False)
    audit.add_argument("--instances", type=int, default=200, metavar="N")
    audit.add_argument("--no-acq", action="store_true", help="pula a sonda de ACQ")
    audit.add_argument("--workers", type=int, metavar="N", help="threads (padrão: MPVC_AUDIT_WORKERS)")
    audit.add_argument("--directions", type=int, metavar="N", help="direções da sonda de ACQ por instância (padrão: 24)")

    return parser.parse_args(argv)


def _emit(report: Report, args: argparse.Namespace, display: Display) -> None:
    if args.out:
        path = save_report(report, args.out)
        if not args.json:
            display.show_success(f"Relatório salvo em: {path}")
    if args.json and not args.out:
        display.print_json(report_to_json(report))


def cmd_analyze(args: argparse.Namespace, display: Display) -> int:
    prob = load_problem(args.file)
    point = parse_point(args.point, prob.n)
    result = full_report(
        prob, point,
        tol_active=args.tol_active,
        search_cfg=RefuterConfig(seed=args.seed),
        with_acq=not args.no_acq,
        acq_directions=args.directions,
        probe_all=args.probe_all,
    )
    report = Report("analyze", prob, point.tolist())
    data = result.to_dict()
    for key in ("index_sets", "verdicts", "chain_violations", "discrepancies", "acq"):
        report.add(key, data[key])
    if not args.json:
        display.show_problem(prob, point)
        display.show_report(result)
    _emit(report, args, display)
    breach = bool(result.chain_violations) or bool(result.acq and result.acq.inclusion_violations)
    return EXIT_INVARIANT_BREACH if breach else EXIT_OK


def cmd_acq(args: argparse.Namespace, display: Display) -> int:
    prob = load_problem(args.file)
    point = parse_point(args.point, prob.n)
    sets = classify(prob, point, args.tol_active)
    result = probe_acq(prob, point, directions=args.directions, sets=sets, probe_all=args.probe_all)
    report = Report("acq", prob, point.tolist())
    report.add("index_sets", sets.to_dict())
    report.add("acq", result.to_dict(include_entries=True))
    if not args.json:
        display.show_problem(prob, point)
        display.show_index_sets(sets)
        display.show_acq(result)
    _emit(report, args, display)
    return EXIT_INVARIANT_BREACH if result.inclusion_violations else EXIT_OK


def cmd_penalty_sweep(args: argparse.Namespace, display: Display) -> int:
    prob = load_problem(args.file)
    if args.objective:
        prob = prob.with_objective(parse_expr(args.objective, prob.variables))
    point = parse_point(args.point, prob.n)
    cfg = SolveConfig(center=tuple(point.tolist()), n_starts=args.starts, seed=args.seed)
    profile = penalty_sweep(prob, point, args.alphas, cfg)
    report = Report("penalty-sweep", prob, point.tolist())
    report.add("penalty_profile", profile)
    if not args.json:
        display.show_problem(prob, point)
        display.show_penalty_profile(profile)
    _emit(report, args, display)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace, display: Display) -> int:
    prob = load_problem(args.file)
    point = parse_point(args.point, prob.n)
    scan = scan_error_bound(
        prob, point, radius=args.radius, samples=args.samples, seed=args.seed,
        tol_active=args.tol_active,
    )
    report = Report("scan", prob, point.tolist())
    report.add("error_bound_scan", scan.to_dict(include_samples=args.include_samples))
    if not args.json:
        display.show_problem(prob, point)
        display.show_scan(scan)
    _emit(report, args, display)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace, display: Display) -> int:
    prob = load_problem(args.file)
    starts = (tuple(parse_point(args.start, prob.n).tolist()),) if args.start else ()
    cfg = SolveConfig(starts=starts, n_starts=args.starts, alphas=args.alphas, seed=args.seed)
    result = solve_mpvc(prob, cfg)
    report = Report("solve", prob)
    report.add("solve", result)
    if not args.json:
        display.show_problem(prob)
        display.show_solve(result)
    _emit(report, args, display)
    return EXIT_OK


def cmd_audit(args: argparse.Namespace, display: Display) -> int:
    result = audit_corpus(
        instances=args.instances,
        seed=args.seed,
        with_acq=not args.no_acq,
        workers=args.workers,
        acq_directions=args.directions,
    )
    report = Report("audit")
    report.add("audit", result)
    if not args.json:
        display.show_audit(result)
    _emit(report, args, display)
    breach = result.chain_violations > 0 or result.inclusion_violations > 0
    return EXIT_INVARIANT_BREACH if breach else EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace, Display], int]] = {
    "analyze": cmd_analyze,
    "acq": cmd_acq,
    "penalty-sweep": cmd_penalty_sweep,
    "scan": cmd_scan,
    "solve": cmd_solve,
    "audit": cmd_audit,
}


def run(args: argparse.Namespace, display: Display) -> int:
    """Executa o subcomando e traduz exceções em códigos de saída."""
    try:
        return COMMANDS[args.command](args, display)
    except InfeasiblePointError as e:
        logger.error("Ponto inviável: %s", e)
        display.show_error(str(e))
        return EXIT_INFEASIBLE
    except ProblemError as e:
        logger.error("Erro no problema: %s", e)
        display.show_error(str(e))
        return EXIT_INPUT_ERROR
    except (ExprError, PenaltyError, BranchCapError, ReportLoadError, ValueError) as e:
        logger.error("Entrada inválida: %s", e)
        display.show_error(str(e))
        return EXIT_INPUT_ERROR
    except OSError as e:
        logger.error("Erro de E/S: %s", e)
        display.show_error(str(e))
        return EXIT_INPUT_ERROR


def main(argv: Sequence[str] | None = None) -> None:
    """Ponto de entrada da linha de comando."""
    args = parse_args(argv)

    setup_logging(
        log_level=args.log_level,
        log_file=args.log_file
    )
    logger.info("Iniciando mpvclab %s", args.command)

    display = Display()

    try:
        config.validate()
    except ConfigurationError as e:
        logger.error("Erro de configuração: %s", e)
        display.show_error(str(e))
        sys.exit(EXIT_INPUT_ERROR)

    code = run(args, display)
    if code != EXIT_OK:
        sys.exit(code)


if __name__ == "__main__":
    main()
