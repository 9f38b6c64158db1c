"""Montagem, gravação e leitura dos relatórios JSON."""

import json
import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .config import config
from .logging_config import strict_json, to_jsonable
from .model import MpvcProblem
from .version import __version__

__all__ = [
    "Report",
    "ReportLoadError",
    "report_to_json",
    "save_report",
    "load_report",
    "without_timestamp",
]

MAX_REPORT_FILE_SIZE = 50 * 1024 * 1024  # 50MB
VOLATILE_KEYS = ("timestamp",)

logger = logging.getLogger(__name__)


class ReportLoadError(Exception):
    """Erro ao carregar relatório de arquivo."""


@dataclass
class Report:
    """Relatório de um comando.

    Seções vazias não aparecem no JSON. O campo `timestamp` é o único que
    muda entre execuções idênticas.
    """

    command: str
    problem: MpvcProblem | None = None
    point: list[float] | None = None
    sections: dict[str, Any] = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def __repr__(self) -> str:
        return f"Report(command={self.command!r}, sections={list(self.sections)})"

    def add(self, name: str, section: Any) -> None:
        self.sections[name] = section.to_dict() if hasattr(section, "to_dict") else section

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "schema_version": config.SCHEMA_VERSION,
            "tool_version": __version__,
            "timestamp": self.timestamp,
            "command": self.command,
        }
        if self.problem is not None:
            data["problem"] = self.problem.to_dict()
        if self.point is not None:
            data["point"] = list(self.point)
        data.update(self.sections)
        return data


def report_to_json(report: Report | dict[str, Any]) -> str:
    data = report.to_dict() if isinstance(report, Report) else report
    return json.dumps(strict_json(data), ensure_ascii=False, indent=2, default=to_jsonable)


def without_timestamp(data: dict[str, Any]) -> dict[str, Any]:
    """Cópia sem os campos voláteis, para comparar execuções."""
    return {k: v for k, v in data.items() if k not in VOLATILE_KEYS}


def save_report(report: Report | dict[str, Any], path: str | Path) -> str:
    """
    Grava o relatório de forma atômica (arquivo temporário + fsync + move).

    Returns:
        Caminho do arquivo salvo.

    Raises:
        IOError: Em caso de erro ao salvar.
    """
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    text = report_to_json(report)

    try:
        directory.mkdir(parents=True, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(suffix=".json", dir=directory)
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                f.write(text)
                f.write("\n")
                f.flush()
                os.fsync(f.fileno())
            shutil.move(tmp_path, target)
        except Exception:
            try:
                if os.path.exists(tmp_path):
                    os.unlink(tmp_path)
            except OSError as cleanup_error:
                logger.warning("Falha ao remover arquivo temporário %s: %s", tmp_path, cleanup_error)
            raise
        logger.info("Relatório salvo: %s (%d bytes)", target, len(text))
        return str(target)
    except (OSError, PermissionError) as e:
        logger.error("Falha ao salvar relatório: %s", e)
        raise IOError(f"Erro ao salvar arquivo: {e}") from e


def _check_verdicts(verdicts: Any) -> None:
    if not isinstance(verdicts, list):
        raise ReportLoadError("Campo 'verdicts' deve ser uma lista")
    for i, verdict in enumerate(verdicts):
        if not isinstance(verdict, dict) or "name" not in verdict or "status" not in verdict:
            raise ReportLoadError(f"Veredito {i} sem 'name' ou 'status'")
        if verdict["status"] == "REFUTED" and not verdict.get("certificate"):
            raise ReportLoadError(f"Veredito {i} ({verdict['name']}) REFUTED sem certificado")


def load_report(path: str | Path) -> dict[str, Any]:
    """
    Carrega e valida um relatório JSON.

    Raises:
        ReportLoadError: Arquivo inexistente, symlink, grande demais ou inválido.
    """
    path = Path(path)
    if not path.exists():
        logger.warning("Tentativa de carregar arquivo inexistente: %s", path)
        raise ReportLoadError(f"Arquivo não encontrado: {path}")

    if path.is_symlink():
        logger.warning("Tentativa de carregar symlink: %s", path)
        raise ReportLoadError("Links simbólicos não são permitidos")

    file_size = path.stat().st_size
    if file_size > MAX_REPORT_FILE_SIZE:
        raise ReportLoadError(
            f"Arquivo muito grande ({file_size // 1024 // 1024}MB). "
            f"Limite: {MAX_REPORT_FILE_SIZE // 1024 // 1024}MB"
        )

    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ReportLoadError(f"Arquivo JSON inválido: {e}") from e
    except OSError as e:
        raise ReportLoadError(f"Erro ao ler arquivo: {e}") from e

    if not isinstance(data, dict):
        raise ReportLoadError("Estrutura de arquivo inválida: esperado objeto JSON")
    for key in ("schema_version", "tool_version", "command"):
        if key not in data:
            raise ReportLoadError(f"Arquivo não contém campo '{key}'")
    if data["schema_version"] != config.SCHEMA_VERSION:
        raise ReportLoadError(
            f"schema_version {data['schema_version']!r} não suportado "
            f"(esperado {config.SCHEMA_VERSION})"
        )
    if "verdicts" in data:
        _check_verdicts(data["verdicts"])

    logger.info("Relatório carregado: %s (%s)", path, data["command"])
    return data
