"""Logging do MPVC Lab: JSON estruturado para arquivo, linhas coloridas para console."""

import json
import logging
import math
import os
import sys
import threading
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

__all__ = ["StructuredFormatter", "ConsoleFormatter", "setup_logging", "to_jsonable", "strict_json"]


def to_jsonable(value: Any) -> Any:
    """Converte escalares e arrays numpy (e enums) para tipos JSON nativos."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    if isinstance(value, Enum):
        return value.value
    raise TypeError(f"Objeto não serializável: {type(value).__name__}")


def strict_json(value: Any) -> Any:
    """Troca inf/nan por texto ("inf", "-inf", "nan"), recursivamente."""
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, np.ndarray):
        return strict_json(value.tolist())
    if isinstance(value, dict):
        return {k: strict_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [strict_json(v) for v in value]
    return value


class StructuredFormatter(logging.Formatter):
    """Uma linha JSON por registro; `extra_data` vai em "data".

    Registros emitidos fora da thread principal (workers da auditoria)
    levam o nome da thread em "thread".
    """

    def format(self, record: logging.LogRecord) -> str:
        log_data: dict[str, Any] = {
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "function": record.funcName,
            "line": record.lineno,
        }
        if record.threadName and record.threadName != threading.main_thread().name:
            log_data["thread"] = record.threadName

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        if hasattr(record, "extra_data"):
            log_data["data"] = strict_json(record.extra_data)

        return json.dumps(log_data, ensure_ascii=False, allow_nan=False, default=to_jsonable)


class ConsoleFormatter(logging.Formatter):
    """Formatter colorido para console.

    Dados estruturados (discrepâncias, certificados) aparecem resumidos
    depois da mensagem, para não poluir a saída das tabelas.
    """

    COLORS = {
        "DEBUG": "\033[36m",
        "INFO": "\033[32m",
        "WARNING": "\033[33m",
        "ERROR": "\033[31m",
        "CRITICAL": "\033[35m",
    }
    RESET = "\033[0m"
    MAX_DATA_CHARS = 160

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, self.RESET)
        timestamp = datetime.now().strftime("%H:%M:%S")
        line = (
            f"{color}[{timestamp}] {record.levelname:<8}{self.RESET} "
            f"{record.name}: {record.getMessage()}"
        )
        if hasattr(record, "extra_data"):
            data = json.dumps(strict_json(record.extra_data), ensure_ascii=False, default=to_jsonable)
            if len(data) > self.MAX_DATA_CHARS:
                data = data[: self.MAX_DATA_CHARS] + "…"
            line += f" {data}"
        return line


def _make_handler(handler: logging.Handler, formatter: logging.Formatter, level: int) -> logging.Handler:
    handler.setFormatter(formatter)
    handler.setLevel(level)
    return handler


def setup_logging(
    log_level: str | None = None,
    log_file: str | None = None,
    log_format: str | None = None,
) -> None:
    """Configura o logging raiz a partir dos argumentos ou do ambiente.

    Argumentos explícitos (vindos das flags --log-*) têm precedência sobre
    LOG_LEVEL, LOG_FILE e LOG_FORMAT. Sem nível pedido, o console fica
    mudo. O arquivo de log, quando existe, é sempre JSON.
    """
    console_requested = log_level is not None or os.getenv("LOG_LEVEL") is not None
    level_name = (log_level or os.getenv("LOG_LEVEL", "WARNING")).upper()
    format_name = (log_format or os.getenv("LOG_FORMAT", "console")).lower()
    file_name = log_file if log_file is not None else os.getenv("LOG_FILE", "")
    level = getattr(logging, level_name, logging.WARNING)

    root_logger = logging.getLogger()
    root_logger.setLevel(level)
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    if console_requested:
        console_formatter = StructuredFormatter() if format_name == "json" else ConsoleFormatter()
        root_logger.addHandler(_make_handler(logging.StreamHandler(sys.stderr), console_formatter, level))

    if file_name:
        Path(file_name).parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(file_name, encoding="utf-8")
        root_logger.addHandler(_make_handler(file_handler, StructuredFormatter(), level))

    if not root_logger.handlers:
        root_logger.addHandler(logging.NullHandler())
        return

    logging.getLogger(__name__).info(
        "Logging configurado",
        extra={"extra_data": {"level": level_name, "format": format_name, "file": file_name or None}},
    )
