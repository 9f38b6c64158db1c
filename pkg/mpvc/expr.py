"""Expressões algébricas: AST, parser, impressão, avaliação e derivadas.

Todas as funções de um problema MPVC (objetivo, g, h, G, H) são
representadas por `Expr`. Restrições precisam ser suaves, por isso o
parser recusa abs/min/max quando `allow_nonsmooth=False`.
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "Expr",
    "ExprKind",
    "VarSpace",
    "ExprError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "ExponentError",
    "EvaluationError",
    "DimensionError",
    "parse_expr",
    "to_text",
    "evaluate",
    "evaluate_batch",
    "grad",
    "partial_derivative",
    "const",
    "var",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "power",
    "abs_",
    "min_",
    "max_",
]

logger = logging.getLogger(__name__)

RESERVED_NAMES = frozenset({"abs", "min", "max"})
_IDENT_PATTERN = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ExprError(Exception):
    """Erro base do módulo de expressões."""


class ExprSyntaxError(ExprError):
    """Texto não segue a gramática; carrega linha e coluna (1-based)."""

    def __init__(self, message: str, line: int = 1, column: int = 1) -> None:
        super().__init__(f"{message} (linha {line}, coluna {column})")
        self.reason = message
        self.line = line
        self.column = column


class UnknownIdentifierError(ExprSyntaxError):
    """Identificador que não é variável declarada nem função conhecida."""


class ExponentError(ExprSyntaxError):
    """Expoente que não é inteiro não negativo."""


class EvaluationError(ExprError):
    """Falha numérica na avaliação (divisão por zero, estouro)."""


class DimensionError(ExprError, ValueError):
    """Ponto com dimensão diferente do espaço de variáveis."""


class ExprKind(Enum):
    """Tipos de nó da árvore."""

    CONST = "const"
    VAR = "var"
    NEG = "neg"
    ABS = "abs"
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    POW = "pow"
    MIN = "min"
    MAX = "max"


_NONSMOOTH = frozenset({ExprKind.ABS, ExprKind.MIN, ExprKind.MAX})
_BINARY = frozenset({ExprKind.ADD, ExprKind.SUB, ExprKind.MUL, ExprKind.DIV})


@dataclass(frozen=True)
class VarSpace:
    """Lista ordenada de nomes de variáveis; a dimensão é o tamanho."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise ExprError("O espaço de variáveis precisa de ao menos uma variável")
        if len(set(self.names)) != len(self.names):
            raise ExprError(f"Nomes de variáveis repetidos: {list(self.names)}")
        for name in self.names:
            if not _IDENT_PATTERN.match(name) or name in RESERVED_NAMES:
                raise ExprError(f"Nome de variável inválido: '{name}'")

    def __repr__(self) -> str:
        return f"VarSpace({' '.join(self.names)})"

    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    @classmethod
    def of(cls, *names: str) -> "VarSpace":
        return cls(tuple(names))


@dataclass(frozen=True)
class Expr:
    """Nó imutável da árvore de expressão.

    `value` guarda a constante (CONST), o índice da variável (VAR) ou o
    expoente (POW); nos demais nós é None.
    """

    kind: ExprKind
    value: float | int | None = None
    children: tuple["Expr", ...] = ()
    _partials: dict[int, "Expr"] = field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        if self.kind is ExprKind.POW:
            if not isinstance(self.value, int) or self.value < 0:
                raise ExponentError(f"expoente deve ser inteiro >= 0, recebido {self.value!r}")
        if self.kind is ExprKind.VAR and (not isinstance(self.value, int) or self.value < 0):
            raise ExprError(f"índice de variável inválido: {self.value!r}")

    def __str__(self) -> str:
        return to_text(self)

    def walk(self) -> Iterator["Expr"]:
        """Percorre a árvore em pré-ordem."""
        stack: list[Expr] = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    @cached_property
    def is_smooth(self) -> bool:
        return all(node.kind not in _NONSMOOTH for node in self.walk())

    @cached_property
    def max_var_index(self) -> int:
        """Maior índice de variável usado (-1 se constante)."""
        indices = [int(node.value) for node in self.walk() if node.kind is ExprKind.VAR]
        return max(indices, default=-1)

    @cached_property
    def _scalar_fn(self) -> Callable[[Sequence[float]], float]:
        return _compile_scalar(self)

    @cached_property
    def _batch_fn(self) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
        return _compile_batch(self)


# =============================================================================
# Construtores (com dobra de constantes simples)
# =============================================================================

ZERO = Expr(ExprKind.CONST, 0.0)
ONE = Expr(ExprKind.CONST, 1.0)


def const(value: float) -> Expr:
    return Expr(ExprKind.CONST, float(value))


def var(index: int) -> Expr:
    return Expr(ExprKind.VAR, int(index))


def _is_const(e: Expr, value: float | None = None) -> bool:
    return e.kind is ExprKind.CONST and (value is None or e.value == value)


def neg(a: Expr) -> Expr:
    return Expr(ExprKind.NEG, None, (a,))


def add(a: Expr, b: Expr) -> Expr:
    return Expr(ExprKind.ADD, None, (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    return Expr(ExprKind.SUB, None, (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    return Expr(ExprKind.MUL, None, (a, b))


def div(a: Expr, b: Expr) -> Expr:
    return Expr(ExprKind.DIV, None, (a, b))


def power(a: Expr, exponent: int) -> Expr:
    return Expr(ExprKind.POW, exponent, (a,))


def abs_(a: Expr) -> Expr:
    return Expr(ExprKind.ABS, None, (a,))


def min_(*args: Expr) -> Expr:
    if not args:
        raise ExprError("min precisa de ao menos um argumento")
    return Expr(ExprKind.MIN, None, tuple(args))


def max_(*args: Expr) -> Expr:
    if not args:
        raise ExprError("max precisa de ao menos um argumento")
    return Expr(ExprKind.MAX, None, tuple(args))


def _fold_neg(a: Expr) -> Expr:
    if _is_const(a):
        return const(-float(a.value))  # type: ignore[arg-type]
    return neg(a)


def _fold_add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if _is_const(a) and _is_const(b):
        return const(float(a.value) + float(b.value))  # type: ignore[arg-type]
    return add(a, b)


def _fold_sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _fold_neg(b)
    if _is_const(a) and _is_const(b):
        return const(float(a.value) - float(b.value))  # type: ignore[arg-type]
    return sub(a, b)


def _fold_mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if _is_const(a) and _is_const(b):
        return const(float(a.value) * float(b.value))  # type: ignore[arg-type]
    return mul(a, b)


def _fold_div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    if _is_const(b, 1.0):
        return a
    return div(a, b)


# =============================================================================
# Parser
# =============================================================================

_TOKEN_SPEC = [
    ("NUMBER", r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"),
    ("IDENT", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"[+\-*/^(),]"),
    ("NEWLINE", r"\n"),
    ("SKIP", r"[ \t\r]+"),
    ("MISMATCH", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{pattern})" for name, pattern in _TOKEN_SPEC))


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str, line_offset: int = 0) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1 + line_offset
    line_start = 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup or "MISMATCH"
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind == "SKIP":
            continue
        if kind == "MISMATCH":
            raise ExprSyntaxError(f"caractere inesperado '{match.group()}'", line, column)
        tokens.append(_Token(kind, match.group(), line, column))
    end_column = len(text) - line_start + 1
    tokens.append(_Token("EOF", "", line, end_column))
    return tokens


class _Parser:
    """Parser descendente recursivo da gramática expr/term/factor/atom."""

    def __init__(self, text: str, variables: VarSpace, allow_nonsmooth: bool, line_offset: int) -> None:
        self.tokens = _tokenize(text, line_offset)
        self.pos = 0
        self.variables = variables
        self.allow_nonsmooth = allow_nonsmooth

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _error(self, message: str, token: _Token | None = None) -> ExprSyntaxError:
        token = token or self.current
        return ExprSyntaxError(message, token.line, token.column)

    def _accept(self, text: str) -> bool:
        if self.current.kind == "OP" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def _expect(self, text: str) -> None:
        if not self._accept(text):
            found = self.current.text or "fim da expressão"
            raise self._error(f"esperado '{text}', encontrado '{found}'")

    def parse(self) -> Expr:
        if self.current.kind == "EOF":
            raise self._error("expressão vazia")
        node = self._expr()
        if self.current.kind != "EOF":
            raise self._error(f"token inesperado '{self.current.text}'")
        return node

    def _expr(self) -> Expr:
        node = self._term()
        while True:
            if self._accept("+"):
                node = add(node, self._term())
            elif self._accept("-"):
                node = sub(node, self._term())
            else:
                return node

    def _term(self) -> Expr:
        node = self._factor()
        while True:
            if self._accept("*"):
                node = mul(node, self._factor())
            elif self._accept("/"):
                node = div(node, self._factor())
            else:
                return node

    def _factor(self) -> Expr:
        negate = self._accept("-")
        node = self._atom()
        if self._accept("^"):
            token = self.current
            if token.kind != "NUMBER":
                raise ExponentError("expoente deve ser inteiro não negativo", token.line, token.column)
            if not token.text.isdigit():
                raise ExponentError(
                    f"expoente não inteiro '{token.text}'", token.line, token.column
                )
            self.pos += 1
            node = power(node, int(token.text))
        return neg(node) if negate else node

    def _atom(self) -> Expr:
        token = self.current
        if token.kind == "NUMBER":
            self.pos += 1
            return const(float(token.text))
        if token.kind == "IDENT":
            self.pos += 1
            if token.text in RESERVED_NAMES:
                return self._call(token)
            if token.text not in self.variables.names:
                raise UnknownIdentifierError(
                    f"identificador desconhecido '{token.text}'", token.line, token.column
                )
            return var(self.variables.index(token.text))
        if self._accept("("):
            node = self._expr()
            self._expect(")")
            return node
        found = token.text or "fim da expressão"
        raise self._error(f"esperado número, variável ou '(', encontrado '{found}'")

    def _call(self, name: _Token) -> Expr:
        if not self.allow_nonsmooth:
            raise ExprSyntaxError(
                f"'{name.text}' não é permitido em restrições (funções devem ser suaves)",
                name.line,
                name.column,
            )
        self._expect("(")
        args = [self._expr()]
        while self._accept(","):
            args.append(self._expr())
        self._expect(")")
        if name.text == "abs":
            if len(args) != 1:
                raise self._error("abs recebe exatamente um argumento", name)
            return abs_(args[0])
        if name.text == "min":
            return min_(*args)
        return max_(*args)


def parse_expr(
    text: str,
    variables: VarSpace,
    allow_nonsmooth: bool = True,
    line_offset: int = 0,
) -> Expr:
    """Converte texto em `Expr` sobre o espaço de variáveis dado.

    Args:
        text: Expressão na gramática expr/term/factor/atom.
        variables: Variáveis declaradas.
        allow_nonsmooth: Se False, abs/min/max são recusados.
        line_offset: Somado à linha das mensagens de erro (arquivos de problema).

    Raises:
        ExprSyntaxError: Erro de sintaxe, identificador desconhecido ou expoente inválido.
    """
    return _Parser(text, variables, allow_nonsmooth, line_offset).parse()


# =============================================================================
# Impressão
# =============================================================================

def _format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _is_atomic(e: Expr) -> bool:
    if e.kind is ExprKind.CONST:
        return float(e.value) >= 0  # type: ignore[arg-type]
    return e.kind in (ExprKind.VAR, ExprKind.ABS, ExprKind.MIN, ExprKind.MAX)


def _atomic_text(e: Expr, names: Sequence[str] | None) -> str:
    text = to_text(e, names)
    return text if _is_atomic(e) else f"({text})"


def to_text(e: Expr, names: Sequence[str] | None = None) -> str:
    """Imprime a expressão em texto que o parser reconstrói na mesma árvore.

    Constantes negativas (só surgem por construção programática) saem
    como "(-c)", que volta do parser como neg(c).
    """
    kind = e.kind
    if kind is ExprKind.CONST:
        value = float(e.value)  # type: ignore[arg-type]
        return _format_number(value) if value >= 0 else f"(-{_format_number(-value)})"
    if kind is ExprKind.VAR:
        index = int(e.value)  # type: ignore[arg-type]
        return names[index] if names is not None else f"x{index + 1}"
    if kind is ExprKind.NEG:
        child = e.children[0]
        if child.kind is ExprKind.POW:
            return f"-{_atomic_text(child.children[0], names)}^{child.value}"
        return f"-{_atomic_text(child, names)}"
    if kind is ExprKind.POW:
        return f"{_atomic_text(e.children[0], names)}^{e.value}"
    if kind in (ExprKind.ABS, ExprKind.MIN, ExprKind.MAX):
        args = ", ".join(to_text(child, names) for child in e.children)
        return f"{kind.value}({args})"

    left, right = e.children
    if kind in (ExprKind.ADD, ExprKind.SUB):
        left_text = to_text(left, names)
        right_text = to_text(right, names)
        if right.kind in (ExprKind.ADD, ExprKind.SUB, ExprKind.NEG) or (
            right.kind is ExprKind.CONST and float(right.value) < 0  # type: ignore[arg-type]
        ):
            right_text = f"({right_text})"
        symbol = "+" if kind is ExprKind.ADD else "-"
        return f"{left_text} {symbol} {right_text}"

    left_text = to_text(left, names)
    if left.kind in (ExprKind.ADD, ExprKind.SUB):
        left_text = f"({left_text})"
    right_text = to_text(right, names)
    if right.kind in _BINARY or right.kind is ExprKind.NEG:
        right_text = f"({right_text})"
    symbol = "*" if kind is ExprKind.MUL else "/"
    return f"{left_text}{symbol}{right_text}"


# =============================================================================
# Avaliação
# =============================================================================

def _compile_scalar(e: Expr) -> Callable[[Sequence[float]], float]:
    kind = e.kind
    if kind is ExprKind.CONST:
        value = float(e.value)  # type: ignore[arg-type]
        return lambda x: value
    if kind is ExprKind.VAR:
        index = int(e.value)  # type: ignore[arg-type]
        return lambda x: float(x[index])

    fns = [child._scalar_fn for child in e.children]
    if kind is ExprKind.NEG:
        (fa,) = fns
        return lambda x: -fa(x)
    if kind is ExprKind.ABS:
        (fa,) = fns
        return lambda x: abs(fa(x))
    if kind is ExprKind.POW:
        (fa,) = fns
        exponent = int(e.value)  # type: ignore[arg-type]

        def _power(x: Sequence[float]) -> float:
            try:
                return fa(x) ** exponent
            except OverflowError:
                raise EvaluationError(f"estouro em potência de expoente {exponent}") from None

        return _power
    if kind is ExprKind.MIN:
        return lambda x: min(f(x) for f in fns)
    if kind is ExprKind.MAX:
        return lambda x: max(f(x) for f in fns)

    fa, fb = fns
    if kind is ExprKind.ADD:
        return lambda x: fa(x) + fb(x)
    if kind is ExprKind.SUB:
        return lambda x: fa(x) - fb(x)
    if kind is ExprKind.MUL:
        return lambda x: fa(x) * fb(x)

    def _divide(x: Sequence[float]) -> float:
        denominator = fb(x)
        if denominator == 0.0:
            raise EvaluationError("divisão por zero")
        return fa(x) / denominator

    return _divide


def _compile_batch(e: Expr) -> Callable[[NDArray[np.float64]], NDArray[np.float64]]:
    """Versão vetorizada: recebe matriz (k, n) e devolve vetor (k,)."""
    kind = e.kind
    if kind is ExprKind.CONST:
        value = float(e.value)  # type: ignore[arg-type]
        return lambda X: np.full(X.shape[0], value)
    if kind is ExprKind.VAR:
        index = int(e.value)  # type: ignore[arg-type]
        return lambda X: X[:, index].astype(np.float64)

    fns = [child._batch_fn for child in e.children]
    if kind is ExprKind.NEG:
        (fa,) = fns
        return lambda X: -fa(X)
    if kind is ExprKind.ABS:
        (fa,) = fns
        return lambda X: np.abs(fa(X))
    if kind is ExprKind.POW:
        (fa,) = fns
        exponent = int(e.value)  # type: ignore[arg-type]
        return lambda X: fa(X) ** exponent
    if kind is ExprKind.MIN:
        return lambda X: np.minimum.reduce([f(X) for f in fns])
    if kind is ExprKind.MAX:
        return lambda X: np.maximum.reduce([f(X) for f in fns])

    fa, fb = fns
    if kind is ExprKind.ADD:
        return lambda X: fa(X) + fb(X)
    if kind is ExprKind.SUB:
        return lambda X: fa(X) - fb(X)
    if kind is ExprKind.MUL:
        return lambda X: fa(X) * fb(X)

    return lambda X: fa(X) / fb(X)


def _check_dimension(e: Expr, x: Sequence[float], dim: int | None) -> None:
    size = len(x)
    if dim is not None and size != dim:
        raise DimensionError(f"ponto com dimensão {size}, esperado {dim}")
    if e.max_var_index >= size:
        raise DimensionError(
            f"expressão usa a variável {e.max_var_index + 1}, ponto tem dimensão {size}"
        )


def evaluate(e: Expr, x: Sequence[float], dim: int | None = None) -> float:
    """Avalia a expressão em x.

    Raises:
        DimensionError: Dimensão de x incompatível.
        EvaluationError: Divisão por zero ou resultado não finito (estouro).
    """
    _check_dimension(e, x, dim)
    value = e._scalar_fn(x)
    if not np.isfinite(value):
        raise EvaluationError(f"valor não finito: {value}")
    return value


def evaluate_batch(e: Expr, points: NDArray[np.float64]) -> NDArray[np.float64]:
    """Avalia em várias linhas de uma vez.

    Divisões por zero e estouros não levantam erro: viram inf/nan na linha
    correspondente.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if e.max_var_index >= points.shape[1]:
        raise DimensionError(
            f"expressão usa a variável {e.max_var_index + 1}, pontos têm dimensão {points.shape[1]}"
        )
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        return e._batch_fn(points)


# =============================================================================
# Derivadas
# =============================================================================

def _first_selected(fns: list[Callable[[Sequence[float]], float]], x: Sequence[float], pick: Callable) -> int:
    values = [f(x) for f in fns]
    target = pick(values)
    return values.index(target)


def _differentiate(e: Expr, i: int, at: Sequence[float] | None) -> Expr:
    kind = e.kind
    if kind is ExprKind.CONST:
        return ZERO
    if kind is ExprKind.VAR:
        return ONE if e.value == i else ZERO
    if kind in _NONSMOOTH:
        if at is None:
            raise ExprError("derivada de abs/min/max requer o ponto de seleção")
        fns = [child._scalar_fn for child in e.children]
        if kind is ExprKind.ABS:
            value = fns[0](at)
            if value == 0.0:
                return ZERO
            inner = _differentiate(e.children[0], i, at)
            return inner if value > 0 else _fold_neg(inner)
        selected = _first_selected(fns, at, min if kind is ExprKind.MIN else max)
        return _differentiate(e.children[selected], i, at)

    if kind is ExprKind.NEG:
        return _fold_neg(_differentiate(e.children[0], i, at))
    if kind is ExprKind.POW:
        base = e.children[0]
        exponent = int(e.value)  # type: ignore[arg-type]
        if exponent == 0:
            return ZERO
        inner = _differentiate(base, i, at)
        if exponent == 1:
            return inner
        outer = _fold_mul(const(exponent), base if exponent == 2 else power(base, exponent - 1))
        return _fold_mul(outer, inner)

    a, b = e.children
    da = _differentiate(a, i, at)
    db = _differentiate(b, i, at)
    if kind is ExprKind.ADD:
        return _fold_add(da, db)
    if kind is ExprKind.SUB:
        return _fold_sub(da, db)
    if kind is ExprKind.MUL:
        return _fold_add(_fold_mul(da, b), _fold_mul(a, db))
    numerator = _fold_sub(_fold_mul(da, b), _fold_mul(a, db))
    return _fold_div(numerator, power(b, 2))


def partial_derivative(e: Expr, i: int, at: Sequence[float] | None = None) -> Expr:
    """Derivada simbólica em relação à variável i.

    Para expressões suaves o resultado é cacheado no próprio nó. Com
    abs/min/max, `at` escolhe o ramo ativo: |.|' = 0 em 0 e, em empates,
    vale o primeiro argumento listado.
    """
    if e.is_smooth:
        cached = e._partials.get(i)
        if cached is None:
            cached = _differentiate(e, i, None)
            e._partials[i] = cached
        return cached
    return _differentiate(e, i, at)


def grad(e: Expr, x: Sequence[float], dim: int | None = None) -> NDArray[np.float64]:
    """Gradiente de e em x (derivação simbólica seguida de avaliação)."""
    _check_dimension(e, x, dim)
    n = len(x)
    values = np.empty(n)
    for i in range(n):
        derivative = partial_derivative(e, i, x)
        try:
            values[i] = derivative._scalar_fn(x)
        except EvaluationError as exc:
            raise EvaluationError(f"divisão por zero na derivada parcial {i + 1}") from exc
    if not np.all(np.isfinite(values)):
        logger.debug("Gradiente não finito em %s", list(x))
    return values


