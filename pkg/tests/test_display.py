"""Testes para o módulo de exibição."""

import json

import pytest
from rich.console import Console

from mpvc.audit import AuditEntry, AuditReport
from mpvc.display import Display, format_indices, format_point
from mpvc.empirics import penalty_sweep, scan_error_bound
from mpvc.solver import solve_mpvc
from tests.conftest import ORIGIN


@pytest.fixture
def display():
    return Display(Console(record=True, width=140, color_system=None))


def _text(display):
    return display.console.export_text()


class TestFormatting:
    """Testes para as funções de formatação."""

    def test_format_indices(self):
        """Índices 1-based ordenados; ∅ para vazio."""
        assert format_indices(frozenset({2, 0})) == "{1, 3}"
        assert format_indices(frozenset()) == "∅"

    def test_format_point(self):
        """Seis dígitos significativos por padrão."""
        assert format_point([0.0, 1.0 / 3.0]) == "(0, 0.333333)"
        assert format_point([2.5], digits=2) == "(2.5)"


class TestDisplay:
    """Testes para a classe Display."""

    def test_repr(self, display):
        """repr mostra a largura do console."""
        assert repr(display) == "Display(width=140)"

    def test_problem_header(self, display, ex41):
        """Cabeçalho com dimensões e ponto."""
        display.show_problem(ex41, ORIGIN)
        text = _text(display)
        assert "ex41" in text
        assert "n=2 m=1 l=0 q=1" in text
        assert "x* = (0, 0)" in text

    def test_report(self, display, report21):
        """Conjuntos, vereditos, sonda de ACQ e discrepâncias."""
        display.show_report(report21)
        text = _text(display)
        assert "Conjuntos de índices" in text
        assert "GMFCQ" in text
        assert "CERTIFIED" in text
        assert "REFUTED" in text
        assert "Sonda de ACQ: 360 direções" in text
        assert "quasinormality_without_acq" in text
        assert "Violação da cadeia" not in text

    def test_penalty_profile(self, display, ex22):
        """Tabela de α com o limiar estimado."""
        display.show_penalty_profile(penalty_sweep(ex22, ORIGIN, alphas=(0.0, 1.0)))
        text = _text(display)
        assert "Varredura de α" in text
        assert "ᾱ estimado: 0" in text

    def test_scan(self, display, ex22):
        """Resumo da varredura com o oráculo usado."""
        display.show_scan(scan_error_bound(ex22, ORIGIN, samples=20))
        text = _text(display)
        assert "20 amostras" in text
        assert "grid" in text
        assert "c_hat =" in text

    def test_solve(self, display, ex22):
        """Linha de resultado do solve."""
        display.show_solve(solve_mpvc(ex22))
        assert "convergiu" in _text(display)

    def test_audit(self, display):
        """Tabela de contagens e totais."""
        audit = AuditReport(seed=1, entries=[
            AuditEntry(index=0, problem="inst0000", point=(0.0,),
                       statuses={"LICQ": "CERTIFIED", "MFCQ": "CERTIFIED"}),
            AuditEntry(index=1, problem="inst0001", point=(0.0,),
                       statuses={"LICQ": "REFUTED", "MFCQ": "CERTIFIED"},
                       discrepancies=["linearized_cones_differ"]),
        ])
        display.show_audit(audit)
        text = _text(display)
        assert "Auditoria (2 instâncias)" in text
        assert "chain violations: 0" in text
        assert "discrepância linearized_cones_differ: 1" in text

    def test_messages(self, display):
        """Erro, sucesso e informação."""
        display.show_error("falhou")
        display.show_success("salvo")
        display.show_info("nota")
        text = _text(display)
        assert "✗ falhou" in text
        assert "✓ salvo" in text
        assert "nota" in text

    def test_print_json_not_wrapped(self):
        """JSON longo sai intacto, sem quebra nem marcação."""
        display = Display(Console(record=True, width=20, color_system=None))
        payload = json.dumps({"chave": "[bold]" + "x" * 60 + "[/bold]"})
        display.print_json(payload)
        assert json.loads(_text(display)) == json.loads(payload)
