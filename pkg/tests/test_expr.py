"""Testes para o módulo de expressões."""

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from mpvc.expr import (
    DimensionError,
    EvaluationError,
    ExponentError,
    ExprError,
    ExprKind,
    ExprSyntaxError,
    UnknownIdentifierError,
    VarSpace,
    abs_,
    const,
    evaluate,
    evaluate_batch,
    grad,
    min_,
    neg,
    parse_expr,
    partial_derivative,
    to_text,
    var,
)
from tests.conftest import FIXTURES_DIR
from tests.helpers import any_exprs, central_difference, max_node_magnitude, smooth_exprs

XY = VarSpace.of("x", "y")
X3 = VarSpace.of("x1", "x2", "x3")


class TestVarSpace:
    """Testes para o espaço de variáveis."""

    def test_dim_and_index(self):
        """Dimensão e índices seguem a ordem de declaração."""
        space = VarSpace.of("a", "b", "c")
        assert space.dim == 3
        assert space.index("c") == 2

    def test_empty_rejected(self):
        """Espaço sem variáveis não é permitido."""
        with pytest.raises(ExprError):
            VarSpace(())

    def test_duplicates_rejected(self):
        """Nomes repetidos devem levantar erro."""
        with pytest.raises(ExprError, match="repetidos"):
            VarSpace.of("x", "x")

    @pytest.mark.parametrize("name", ["abs", "min", "max", "1x", "x-y", ""])
    def test_invalid_names(self, name):
        """Palavras reservadas e identificadores inválidos são recusados."""
        with pytest.raises(ExprError):
            VarSpace.of(name)


class TestParser:
    """Testes para o parser."""

    def test_precedence(self):
        """Potência liga mais que produto, que liga mais que soma."""
        e = parse_expr("1 + 2*x^2", XY)
        assert evaluate(e, [3.0, 0.0]) == 19.0

    def test_left_associative_subtraction(self):
        """a - b - c é (a - b) - c."""
        assert evaluate(parse_expr("10 - 3 - 2", XY), [0, 0]) == 5.0

    def test_unary_minus_binds_after_power(self):
        """-x^2 é -(x^2)."""
        assert evaluate(parse_expr("-x^2", XY), [3.0, 0.0]) == -9.0

    def test_unary_minus_after_operator(self):
        """Menos unário é aceito em posição de fator."""
        assert evaluate(parse_expr("x * -y", XY), [2.0, 3.0]) == -6.0
        assert evaluate(parse_expr("x - -y", XY), [2.0, 3.0]) == 5.0

    def test_nonsmooth_functions(self):
        """abs, min e max com qualquer número de argumentos."""
        e = parse_expr("abs(x) + min(x, y, 0) + max(y)", XY)
        assert evaluate(e, [-2.0, 1.0]) == 2.0 - 2.0 + 1.0

    def test_nonsmooth_rejected_in_constraints(self):
        """Com allow_nonsmooth=False, abs/min/max são erro de sintaxe."""
        with pytest.raises(ExprSyntaxError, match="suaves"):
            parse_expr("abs(x)", XY, allow_nonsmooth=False)

    def test_unknown_identifier(self):
        """Identificador não declarado traz linha e coluna."""
        with pytest.raises(UnknownIdentifierError) as exc_info:
            parse_expr("x + z", XY)
        assert exc_info.value.line == 1
        assert exc_info.value.column == 5
        assert "coluna 5" in str(exc_info.value)

    @pytest.mark.parametrize("text", ["x^-1", "x^2.5", "x^y"])
    def test_invalid_exponent(self, text):
        """Expoente precisa ser literal inteiro não negativo."""
        with pytest.raises(ExponentError):
            parse_expr(text, XY)

    @pytest.mark.parametrize("text", ["", "x +", "(x", "x y", "x $ y", "abs(x, y)"])
    def test_syntax_errors(self, text):
        """Textos fora da gramática levantam ExprSyntaxError."""
        with pytest.raises(ExprSyntaxError):
            parse_expr(text, XY)

    def test_unexpected_character_position(self):
        """Caractere inválido aponta a coluna exata."""
        with pytest.raises(ExprSyntaxError) as exc_info:
            parse_expr("x + $", XY)
        assert exc_info.value.column == 5

    def test_line_offset(self):
        """line_offset desloca a linha informada no erro."""
        with pytest.raises(ExprSyntaxError) as exc_info:
            parse_expr("x +", XY, line_offset=4)
        assert exc_info.value.line == 5

    def test_scientific_notation(self):
        """Números em notação científica são aceitos."""
        assert evaluate(parse_expr("1.5e2 * x", XY), [2.0, 0.0]) == 300.0


class TestPrinter:
    """Testes para a impressão em texto."""

    def test_default_names(self):
        """Sem nomes, variáveis saem como x1, x2, ..."""
        assert to_text(parse_expr("x*y + 2", XY)) == "x1*x2 + 2"

    def test_custom_names(self):
        """Com nomes, usa os nomes do espaço."""
        e = parse_expr("x - (y - 1)", XY)
        assert to_text(e, XY.names) == "x - (y - 1)"

    def test_negative_constant(self):
        """Constante negativa construída programaticamente sai entre parênteses."""
        assert to_text(const(-3.0)) == "(-3)"

    def test_nested_negation(self):
        """Negação dupla preserva a árvore no texto."""
        e = neg(neg(var(0)))
        assert parse_expr(to_text(e), X3) == e

    @pytest.mark.parametrize("name", ["ex21.mpvc", "ex22.mpvc", "ex41.mpvc"])
    def test_fixture_expressions_round_trip(self, name):
        """Todas as expressões dos problemas de referência voltam idênticas."""
        from mpvc.model import load_problem

        prob = load_problem(FIXTURES_DIR / name)
        exprs = [prob.objective, *prob.g, *prob.h, *prob.G, *prob.H]
        for e in exprs:
            text = to_text(e, prob.variables.names)
            assert parse_expr(text, prob.variables) == e

    @settings(max_examples=500, deadline=None, derandomize=True,
              suppress_health_check=[HealthCheck.too_slow])
    @given(expr=any_exprs())
    def test_round_trip_structural_identity(self, expr):
        """parse(to_text(e)) reconstrói exatamente a mesma árvore."""
        text = to_text(expr)
        parsed = parse_expr(text, X3)
        assert parsed == expr
        assert to_text(parsed) == text


class TestEvaluation:
    """Testes para a avaliação."""

    def test_division_by_zero(self):
        """Divisão por zero levanta EvaluationError."""
        e = parse_expr("1 / x", XY)
        with pytest.raises(EvaluationError, match="divisão por zero"):
            evaluate(e, [0.0, 1.0])

    def test_dimension_mismatch(self):
        """Ponto menor que o índice máximo usado é recusado."""
        e = parse_expr("y", XY)
        with pytest.raises(DimensionError):
            evaluate(e, [1.0])
        with pytest.raises(DimensionError):
            evaluate(e, [1.0, 2.0], dim=3)

    def test_dimension_error_is_value_error(self):
        """DimensionError também é ValueError."""
        assert issubclass(DimensionError, ValueError)

    def test_batch_matches_scalar(self):
        """Avaliação vetorizada coincide com a escalar."""
        e = parse_expr("x^3 - 2*x*y + max(x, y) / (1 + y^2)", XY)
        rng = np.random.default_rng(0)
        points = rng.uniform(-2, 2, size=(50, 2))
        batch = evaluate_batch(e, points)
        scalar = np.array([evaluate(e, p) for p in points])
        np.testing.assert_allclose(batch, scalar, rtol=1e-12, atol=1e-12)

    def test_batch_division_by_zero_is_inf(self):
        """No modo vetorizado a divisão por zero vira inf."""
        e = parse_expr("1 / x", XY)
        values = evaluate_batch(e, np.array([[0.0, 0.0], [2.0, 0.0]]))
        assert np.isinf(values[0])
        assert values[1] == 0.5

    @pytest.mark.parametrize("text", ["x^2", "x^3 - y", "x*x", "(x*x)^2 + 1"])
    def test_overflow_raises_evaluation_error(self, text):
        """Estouro com entrada finita vira EvaluationError no modo escalar."""
        with pytest.raises(EvaluationError):
            evaluate(parse_expr(text, XY), [1e200, 0.0])

    def test_batch_overflow_is_inf(self):
        """No modo vetorizado o estouro vira inf só na linha afetada."""
        values = evaluate_batch(parse_expr("x^2", XY), np.array([[1e200, 0.0], [3.0, 0.0]]))
        assert np.isinf(values[0])
        assert values[1] == 9.0


class TestDerivatives:
    """Testes para a derivação simbólica."""

    def test_polynomial_gradient(self):
        """∇(x²y + 3y) = (2xy, x² + 3)."""
        e = parse_expr("x^2*y + 3*y", XY)
        np.testing.assert_allclose(grad(e, [2.0, 5.0]), [20.0, 7.0])

    def test_quotient_rule(self):
        """d/dx [x / (1 + x^2)] = (1 - x²)/(1 + x²)²."""
        e = parse_expr("x / (1 + x^2)", XY)
        x = 0.7
        assert grad(e, [x, 0.0])[0] == pytest.approx((1 - x**2) / (1 + x**2) ** 2)

    def test_partials_cached_for_smooth(self):
        """A derivada de expressão suave é calculada uma única vez."""
        e = parse_expr("x*y", XY)
        assert partial_derivative(e, 0) is partial_derivative(e, 0)

    def test_nonsmooth_requires_point(self):
        """Derivada de abs sem ponto de seleção é erro."""
        with pytest.raises(ExprError):
            partial_derivative(abs_(var(0)), 0)

    def test_abs_derivative_zero_at_kink(self):
        """|x|' = 0 em x = 0 e sinal de x fora dele."""
        e = parse_expr("abs(x)", XY)
        assert grad(e, [0.0, 0.0])[0] == 0.0
        assert grad(e, [-2.0, 0.0])[0] == -1.0
        assert grad(e, [3.0, 0.0])[0] == 1.0

    def test_min_tie_selects_first_argument(self):
        """Em empate, min usa o primeiro argumento listado."""
        e = min_(var(0), var(1))
        np.testing.assert_array_equal(grad(e, [1.0, 1.0]), [1.0, 0.0])

    def test_derivative_kinds_stay_smooth(self):
        """Derivada de expressão suave não introduz nós não suaves."""
        e = parse_expr("(x - y)^3 / (1 + x^2)", XY)
        d = partial_derivative(e, 0)
        assert d.is_smooth
        assert all(node.kind is not ExprKind.ABS for node in d.walk())

    def test_grad_division_by_zero(self):
        """Divisão por zero na derivada informa a coordenada."""
        e = parse_expr("x / y", XY)
        with pytest.raises(EvaluationError, match="derivada parcial"):
            grad(e, [1.0, 0.0])

    @settings(max_examples=1000, deadline=None, derandomize=True,
              suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
    @given(
        expr=smooth_exprs(),
        point=st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=3, max_size=3),
    )
    def test_gradient_matches_central_differences(self, expr, point):
        """Gradiente simbólico coincide com diferenças centrais (h = 1e-6)."""
        x = np.array(point)
        assume(max_node_magnitude(expr, x) < 1e3)
        symbolic = grad(expr, x)
        numeric = central_difference(lambda z: evaluate(expr, z), x)
        for s, f in zip(symbolic, numeric):
            assert abs(s - f) <= 1e-5 * max(1.0, abs(s))
