"""Metric components as expression trees with exact partial derivatives.

The accepted grammar is deliberately small::

    expr   := number | name | expr (+ | - | * | / | ** | ^) expr
            | -expr | exp(expr) | (expr)
    name   := x1 | x2 | x3 | x4 | <declared parameter>

Expressions are validated against this grammar with :mod:`ast`, turned into
sympy trees, differentiated symbolically and compiled to numpy callables.
"""

from __future__ import annotations

import ast
from typing import Callable, Mapping, Sequence

import numpy as np
import sympy as sp

COORDS = sp.symbols("x1 x2 x3 x4", real=True)
_COORD_NAMES = {str(c): c for c in COORDS}

_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


class ExpressionError(ValueError):
    """Raised for text outside the metric expression grammar."""


def parse_expression(text: str, params: Mapping[str, float] | None = None) -> sp.Expr:
    """Parse `text` into a sympy expression in x1..x4.

    ``^`` is accepted as a synonym of ``**``. Names other than the four
    coordinates must appear in `params` and are substituted by value.
    """
    params = dict(params or {})
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None

    def build(node: ast.AST) -> sp.Expr:
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return sp.nsimplify(node.value) if isinstance(node.value, int) else sp.Float(node.value)
        if isinstance(node, ast.Name):
            if node.id in _COORD_NAMES:
                return _COORD_NAMES[node.id]
            if node.id in params:
                return sp.Float(params[node.id])
            raise ExpressionError(f"unknown name {node.id!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](build(node.left), build(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            return -inner if isinstance(node.op, ast.USub) else inner
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "exp"
            and len(node.args) == 1
            and not node.keywords
        ):
            return sp.exp(build(node.args[0]))
        raise ExpressionError(f"unsupported construct {ast.dump(node)[:60]} in {text!r}")

    return build(tree)


def _lambdify(exprs, shape):
    fn = sp.lambdify([COORDS], exprs, modules="numpy", cse=True)

    def call(x: np.ndarray) -> np.ndarray:
        out = np.array(fn(np.asarray(x, dtype=float)), dtype=float)
        return out.reshape(shape)

    return call


def compile_metric(
    components: sp.Matrix | Sequence[Sequence[sp.Expr]],
) -> tuple[Callable, Callable, Callable]:
    """Compile a symmetric 4x4 matrix of expressions into ``(g, dg, d2g)``.

    ``dg(x)[c, a, b]`` is the partial of g_ab along x_c and
    ``d2g(x)[c, d, a, b]`` the second partial along x_c, x_d.
    """
    gmat = sp.Matrix(components)
    if gmat.shape != (4, 4):
        raise ExpressionError("metric must be 4x4")
    if any(sp.simplify(gmat[i, j] - gmat[j, i]) != 0 for i in range(4) for j in range(i)):
        raise ExpressionError("metric components are not symmetric")
    g_list = [[gmat[a, b] for b in range(4)] for a in range(4)]
    first = [[[sp.diff(gmat[a, b], COORDS[c]) for b in range(4)] for a in range(4)] for c in range(4)]
    second = [
        [[[sp.diff(first[c][a][b], COORDS[d]) for b in range(4)] for a in range(4)] for d in range(4)]
        for c in range(4)
    ]
    return (
        _lambdify(g_list, (4, 4)),
        _lambdify(first, (4, 4, 4)),
        _lambdify(second, (4, 4, 4, 4)),
    )
