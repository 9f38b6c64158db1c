"""Parâmetros numéricos padrão do MPVC Lab, lidos do ambiente (ou de `.env`).

Funções da biblioteca recebem tolerâncias, sementes e contagens de direções
explicitamente; quando o argumento é None, o valor vem de `config`. Flags
da linha de comando têm precedência sobre as variáveis abaixo.
"""

import logging
import math
import os
import threading
from typing import Any, Callable, Generic, TypeVar

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

__all__ = ["Config", "ConfigurationError", "config"]

MAX_BRANCH_CAP = 20
MAX_AUDIT_WORKERS = 32
MAX_DIRECTIONS = 10_000

_T = TypeVar("_T")


class ConfigurationError(Exception):
    """Variável de ambiente com valor inválido."""


class _ThreadSafeCachedProperty(Generic[_T]):
    """cached_property cuja primeira avaliação acontece sob lock.

    Os workers da auditoria podem ler `config` ao mesmo tempo; cada
    variável é lida e validada uma única vez por instância.
    """

    def __init__(self, func: Callable[[Any], _T]) -> None:
        self.func = func
        self.attr_name: str | None = None
        self.lock = threading.Lock()

    def __set_name__(self, owner: type, name: str) -> None:
        self.attr_name = name

    def __get__(self, instance: Any, owner: type | None = None) -> _T:
        if instance is None:
            return self  # type: ignore[return-value]
        cache = instance.__dict__
        if self.attr_name in cache:
            return cache[self.attr_name]
        with self.lock:
            if self.attr_name not in cache:
                cache[self.attr_name] = self.func(instance)
            return cache[self.attr_name]


def _raw(name: str) -> str | None:
    raw = os.getenv(name)
    return None if raw is None else raw.strip()


def _positive_float(name: str, default: float) -> float:
    """Float finito e > 0; ausente vale `default`."""
    raw = _raw(name)
    if raw is None:
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"{name}: esperado um número, recebido '{raw}'") from None
    if not (value > 0 and math.isfinite(value)):
        raise ConfigurationError(f"{name}: esperado número finito > 0, recebido {raw}")
    return value


def _bounded_int(name: str, default: int, minimum: int = 1, maximum: int | None = None) -> int:
    """Inteiro >= `minimum`; acima de `maximum` é rebaixado com aviso."""
    raw = _raw(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name}: esperado um inteiro, recebido '{raw}'") from None
    if value < minimum:
        raise ConfigurationError(f"{name}: esperado inteiro >= {minimum}, recebido {value}")
    if maximum is not None and value > maximum:
        logger.warning("%s=%d acima do máximo %d; usando o máximo", name, value, maximum)
        return maximum
    return value


class Config:
    """Valores padrão, lidos sob demanda e guardados por instância."""

    PROBLEM_SUFFIX: str = ".mpvc"
    SCHEMA_VERSION: int = 1

    # Lidos por validate(), na ordem em que aparecem em .env.example.
    SETTINGS = (
        "TOL_ACTIVE",
        "SEED",
        "BRANCH_CAP",
        "EPS_STRICT",
        "REFUTER_DIRECTIONS",
        "ACQ_DIRECTIONS",
        "PROBE_MATCH_TOL",
        "PROBE_NO_MARGIN",
        "AUDIT_WORKERS",
    )

    def __repr__(self) -> str:
        return f"Config(tol_active={self.TOL_ACTIVE}, seed={self.SEED})"

    @_ThreadSafeCachedProperty
    def TOL_ACTIVE(self) -> float:
        """Faixa em que |v| <= tol conta como "v = 0" na classificação."""
        return _positive_float("MPVC_TOL_ACTIVE", 1e-8)

    @_ThreadSafeCachedProperty
    def SEED(self) -> int:
        return _bounded_int("MPVC_SEED", 7, minimum=0)

    @_ThreadSafeCachedProperty
    def BRANCH_CAP(self) -> int:
        """Limite de |I_00|; acima dele a enumeração de ramos é recusada."""
        return _bounded_int("MPVC_BRANCH_CAP", 16, maximum=MAX_BRANCH_CAP)

    @_ThreadSafeCachedProperty
    def EPS_STRICT(self) -> float:
        return _positive_float("MPVC_EPS_STRICT", 1e-9)

    @_ThreadSafeCachedProperty
    def REFUTER_DIRECTIONS(self) -> int:
        return _bounded_int("MPVC_REFUTER_DIRECTIONS", 64, maximum=MAX_DIRECTIONS)

    @_ThreadSafeCachedProperty
    def ACQ_DIRECTIONS(self) -> int:
        return _bounded_int("MPVC_ACQ_DIRECTIONS", 360, maximum=MAX_DIRECTIONS)

    @_ThreadSafeCachedProperty
    def PROBE_MATCH_TOL(self) -> float:
        return _positive_float("MPVC_PROBE_MATCH_TOL", 0.1)

    @_ThreadSafeCachedProperty
    def PROBE_NO_MARGIN(self) -> float:
        return _positive_float("MPVC_PROBE_NO_MARGIN", 0.25)

    @_ThreadSafeCachedProperty
    def AUDIT_WORKERS(self) -> int:
        return _bounded_int("MPVC_AUDIT_WORKERS", 1, maximum=MAX_AUDIT_WORKERS)

    def validate(self) -> None:
        """Lê todas as variáveis de uma vez, para falhar antes de qualquer cálculo."""
        for name in self.SETTINGS:
            getattr(self, name)
        if self.PROBE_MATCH_TOL >= self.PROBE_NO_MARGIN:
            raise ConfigurationError(
                "MPVC_PROBE_MATCH_TOL deve ser menor que MPVC_PROBE_NO_MARGIN "
                f"({self.PROBE_MATCH_TOL} >= {self.PROBE_NO_MARGIN})"
            )


config = Config()
