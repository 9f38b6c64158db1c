"""Testes de integração da linha de comando."""

import json
import logging

import pytest

import mpvclab
from mpvc.audit import AuditEntry, AuditReport
from mpvc.config import Config
from mpvc.report import load_report, without_timestamp
from mpvclab import (
    EXIT_INFEASIBLE,
    EXIT_INPUT_ERROR,
    EXIT_INVARIANT_BREACH,
    main,
    parse_args,
)
from tests.conftest import FIXTURES_DIR

EX21 = str(FIXTURES_DIR / "ex21.mpvc")
EX22 = str(FIXTURES_DIR / "ex22.mpvc")
EX41 = str(FIXTURES_DIR / "ex41.mpvc")


def _exit_code(argv):
    """Código de saída de main; None conta como 0."""
    try:
        main(argv)
    except SystemExit as e:
        return e.code
    return 0


def _json_output(capsys):
    return json.loads(capsys.readouterr().out)


def _flat(text):
    return " ".join(text.split())


class TestParseArgs:
    """Testes para o processamento de argumentos."""

    def test_global_flags_after_subcommand(self):
        """Flags comuns valem antes ou depois do subcomando."""
        args = parse_args(["analyze", EX21, "--point", "0,0", "--json", "--seed", "3"])
        assert args.command == "analyze"
        assert args.json is True
        assert args.seed == 3

    def test_global_flags_before_subcommand(self):
        """Valor global não é apagado pelo subcomando."""
        args = parse_args(["--tol-active", "1e-6", "scan", EX22, "--point", "0,0"])
        assert args.tol_active == 1e-6
        assert args.json is False

    def test_alpha_list(self):
        """--alphas aceita lista separada por vírgulas."""
        args = parse_args(["penalty-sweep", EX22, "--point", "0,0", "--alphas", "0,0.5,2"])
        assert args.alphas == (0.0, 0.5, 2.0)

    @pytest.mark.parametrize(
        "argv",
        [
            ["analyze", EX21],
            ["scan", EX22, "--point", "0,0", "--radius", "0"],
            ["penalty-sweep", EX22, "--point", "0,0", "--alphas", "a,b"],
            ["desconhecido"],
        ],
    )
    def test_usage_errors(self, argv):
        """Erros de uso saem pelo argparse com código 2."""
        with pytest.raises(SystemExit) as exc_info:
            parse_args(argv)
        assert exc_info.value.code == 2

    def test_version(self, capsys):
        """--version imprime a versão e sai com 0."""
        with pytest.raises(SystemExit) as exc_info:
            parse_args(["--version"])
        assert exc_info.value.code == 0
        assert "mpvclab" in capsys.readouterr().out


class TestCommands:
    """Testes dos subcomandos de ponta a ponta."""

    def teardown_method(self):
        """Limpa handlers após cada teste."""
        root_logger = logging.getLogger()
        for handler in root_logger.handlers[:]:
            handler.close()
            root_logger.removeHandler(handler)

    def test_analyze_json(self, capsys):
        """analyze --json: exit 0 e vereditos de Ex2.1."""
        code = _exit_code(["analyze", EX21, "--point", "0,0", "--json", "--directions", "16"])
        data = _json_output(capsys)

        assert code == 0
        assert data["command"] == "analyze"
        statuses = {v["name"]: v["status"] for v in data["verdicts"]}
        assert statuses["LICQ"] == "REFUTED"
        assert statuses["GMFCQ"] == "CERTIFIED"
        assert data["chain_violations"] == []

    def test_analyze_deterministic(self, capsys):
        """Duas execuções iguais diferem só no timestamp."""
        argv = ["analyze", EX22, "--point", "0,0", "--json", "--directions", "16"]
        _exit_code(argv)
        first = _json_output(capsys)
        _exit_code(argv)
        second = _json_output(capsys)
        assert without_timestamp(first) == without_timestamp(second)

    def test_analyze_tables(self, capsys):
        """Sem --json, saída em tabelas."""
        code = _exit_code(["analyze", EX41, "--point", "0,0", "--no-acq"])
        out = capsys.readouterr().out

        assert code == 0
        assert "Condições de qualificação" in out
        assert "quasinormality" in out

    def test_out_file(self, tmp_path, capsys):
        """--out grava um relatório que load_report aceita."""
        target = tmp_path / "r.json"
        code = _exit_code(["analyze", EX22, "--point", "0,0", "--no-acq", "--out", str(target)])

        assert code == 0
        assert "Relatório salvo" in _flat(capsys.readouterr().out)
        assert load_report(target)["command"] == "analyze"

    def test_infeasible_point(self, capsys):
        """Ponto inviável sai com código 2."""
        code = _exit_code(["analyze", EX22, "--point", "1,1"])
        assert code == EXIT_INFEASIBLE
        assert "✗" in capsys.readouterr().out

    def test_malformed_file(self, tmp_path, capsys):
        """Arquivo mal formado: código 1 com linha e coluna."""
        path = tmp_path / "ruim.mpvc"
        path.write_text("[vars] x1 x2\n[objective] x1^2\n[g]\nx1 + * x2\n[vc]\nG: x1 ; H: x2\n",
                        encoding="utf-8")
        code = _exit_code(["analyze", str(path), "--point", "0,0"])

        assert code == EXIT_INPUT_ERROR
        assert "linha 4, coluna" in _flat(capsys.readouterr().out)

    def test_missing_file(self, tmp_path):
        """Arquivo inexistente: código 1."""
        assert _exit_code(["scan", str(tmp_path / "nada.mpvc"), "--point", "0,0"]) == EXIT_INPUT_ERROR

    def test_wrong_point_dimension(self):
        """Ponto com dimensão errada: código 1."""
        assert _exit_code(["analyze", EX21, "--point", "0,0,0"]) == EXIT_INPUT_ERROR

    def test_overflowing_point(self, capsys):
        """Ponto finito que estoura na avaliação: código 1 com mensagem."""
        code = _exit_code(["analyze", EX41, "--point", "1e200,0", "--no-acq"])
        assert code == EXIT_INPUT_ERROR
        assert "estouro" in _flat(capsys.readouterr().out)

    def test_acq(self, capsys):
        """acq --json traz as entradas por direção."""
        code = _exit_code(["acq", EX22, "--point", "0,0", "--directions", "8", "--json"])
        data = _json_output(capsys)

        assert code == 0
        assert len(data["acq"]["entries"]) == 8
        assert "I_00" in data["index_sets"]

    def test_penalty_sweep(self, capsys):
        """penalty-sweep com objetivo substituto."""
        code = _exit_code([
            "penalty-sweep", EX21, "--point", "0,0", "--alphas", "0,10",
            "--objective", "(x1 + 1)^2 + (x2 + 1)^2", "--json",
        ])
        data = _json_output(capsys)

        assert code == 0
        assert data["penalty_profile"]["alpha_bar"] == 10.0

    def test_scan(self, capsys):
        """scan --json com amostras incluídas."""
        code = _exit_code(["scan", EX22, "--point", "0,0", "--samples", "10",
                           "--include-samples", "--json"])
        data = _json_output(capsys)

        assert code == 0
        assert len(data["error_bound_scan"]["samples"]) == 10

    def test_solve(self, capsys):
        """solve a partir de um ponto dado."""
        code = _exit_code(["solve", EX22, "--start", "0.5,0.5", "--json"])
        data = _json_output(capsys)

        assert code == 0
        assert data["solve"]["converged"] is True
        assert "point" not in data

    def test_audit(self, capsys):
        """audit sem ACQ em poucas instâncias."""
        code = _exit_code(["audit", "--instances", "4", "--no-acq", "--seed", "2", "--json"])
        data = _json_output(capsys)

        assert code == 0
        assert data["audit"]["instances"] == 4
        assert data["audit"]["chain_violations"] == 0

    def test_invariant_breach_exit_code(self, monkeypatch):
        """Violação da cadeia na auditoria sai com código 3."""
        entry = AuditEntry(index=0, problem="inst0000", point=(0.0,),
                           chain_violations=[("MFCQ", "GMFCQ")])
        monkeypatch.setattr(mpvclab, "audit_corpus",
                            lambda **kwargs: AuditReport(seed=0, entries=[entry]))
        assert _exit_code(["audit", "--instances", "1"]) == EXIT_INVARIANT_BREACH

    def test_configuration_error(self, monkeypatch, capsys):
        """Variável de ambiente inválida: código 1 antes de rodar."""
        monkeypatch.setenv("MPVC_TOL_ACTIVE", "abc")
        monkeypatch.setattr(mpvclab, "config", Config())
        code = _exit_code(["analyze", EX21, "--point", "0,0"])

        assert code == EXIT_INPUT_ERROR
        assert "MPVC_TOL_ACTIVE" in _flat(capsys.readouterr().out)
