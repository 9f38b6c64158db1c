"""Oráculos de força bruta e geradores para os testes."""

import itertools

import numpy as np
from hypothesis import strategies as st

from mpvc.audit import GeneratorConfig, generate_instance
from mpvc.expr import (
    ONE,
    abs_,
    add,
    const,
    div,
    max_,
    min_,
    mul,
    neg,
    power,
    sub,
    var,
)

# =============================================================================
# dist_Ω por varredura
# =============================================================================

def brute_force_dist_omega(points, step=1e-3, half_width=6.0, chunk=128):
    """Distância l1 de cada (a, b) até Ω, por força bruta.

    Ω é a união da reta b = 0 com o quadrante {a ≤ 0, b ≥ 0}; fora de Ω o
    ponto mais próximo está na reta ou no raio a = 0, b ≥ 0, ambos
    discretizados com passo `step`.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    line = np.arange(-half_width, half_width + step / 2, step)
    ray = np.arange(0.0, half_width + step / 2, step)
    boundary = np.vstack([
        np.column_stack([line, np.zeros_like(line)]),
        np.column_stack([np.zeros_like(ray), ray]),
    ])
    result = np.empty(points.shape[0])
    for start in range(0, points.shape[0], chunk):
        block = points[start:start + chunk]
        distances = (
            np.abs(block[:, None, 0] - boundary[None, :, 0])
            + np.abs(block[:, None, 1] - boundary[None, :, 1])
        )
        result[start:start + chunk] = distances.min(axis=1)
    a, b = points[:, 0], points[:, 1]
    inside = (b >= 0) & (a * b <= 0)
    result[inside] = 0.0
    return result


# =============================================================================
# Derivadas e otimização por força bruta
# =============================================================================

def central_difference(fn, x, h=1e-6):
    """Gradiente por diferenças centrais."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (fn(x + step) - fn(x - step)) / (2 * h)
    return grad


def grid_argmin(fn, center, radius, points_per_axis=41):
    """Melhor ponto de uma grade uniforme em torno de `center`."""
    center = np.asarray(center, dtype=np.float64)
    axes = [np.linspace(c - radius, c + radius, points_per_axis) for c in center]
    best_value, best_point = np.inf, None
    for coords in itertools.product(*axes):
        point = np.array(coords)
        value = fn(point)
        if value < best_value:
            best_value, best_point = value, point
    return best_point, best_value


def generated_problems(count, seed, **limits):
    """Instâncias do gerador com sementes filhas de `seed`, geradas sob demanda."""
    cfg = GeneratorConfig(**limits)
    children = np.random.SeedSequence(seed).spawn(count)
    for index, child in enumerate(children):
        yield generate_instance(index, np.random.default_rng(child), cfg)


def lp_vertex_optimum(c, A, b):
    """max cᵀx s.a. Ax ≤ b, x ≥ 0 em R^n, enumerando vértices.

    Cada vértice é a solução de n restrições ativas linearmente
    independentes. Devolve None se nenhum vértice é viável.
    """
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    rows = np.vstack([np.asarray(A, dtype=np.float64), -np.eye(n)])
    rhs = np.concatenate([np.asarray(b, dtype=np.float64), np.zeros(n)])
    best = None
    for active in itertools.combinations(range(rows.shape[0]), n):
        M = rows[list(active)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        vertex = np.linalg.solve(M, rhs[list(active)])
        if np.all(rows @ vertex <= rhs + 1e-9):
            value = float(c @ vertex)
            if best is None or value > best:
                best = value
    return best


def max_node_magnitude(e, x):
    """Maior |valor| entre todos os nós da árvore avaliados em x."""
    return max(abs(node._scalar_fn(x)) for node in e.walk())


# =============================================================================
# Estratégias do hypothesis
# =============================================================================

CONSTANTS = (0.5, 1.0, 1.5, 2.0)


def _leaves(n):
    return st.one_of(
        st.integers(0, n - 1).map(var),
        st.sampled_from(CONSTANTS).map(const),
    )


def _smooth_extend(n):
    def extend(children):
        return st.one_of(
            children.map(neg),
            st.tuples(children, children).map(lambda p: add(*p)),
            st.tuples(children, children).map(lambda p: sub(*p)),
            st.tuples(children, children).map(lambda p: mul(*p)),
            st.tuples(children, st.integers(0, 3)).map(lambda p: power(*p)),
            st.tuples(children, st.integers(0, n - 1)).map(
                lambda p: div(p[0], add(ONE, power(var(p[1]), 2)))
            ),
        )
    return extend


def smooth_exprs(n=3, max_leaves=6):
    """Expressões suaves; divisões só por 1 + x_i², que nunca se anula."""
    return st.recursive(_leaves(n), _smooth_extend(n), max_leaves=max_leaves)


def any_exprs(n=3, max_leaves=6):
    """Expressões com abs/min/max além das operações suaves."""
    smooth = _smooth_extend(n)

    def extend(children):
        return st.one_of(
            smooth(children),
            children.map(abs_),
            st.lists(children, min_size=1, max_size=3).map(lambda args: min_(*args)),
            st.lists(children, min_size=1, max_size=3).map(lambda args: max_(*args)),
        )

    return st.recursive(_leaves(n), extend, max_leaves=max_leaves)
