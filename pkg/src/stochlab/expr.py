"""Restricted arithmetic expressions in ``r`` for densities given on the command line.

Accepted: numbers, ``r``, ``pi``, ``e``, the operators ``+ - * / ^ **``,
unary signs and the functions ``exp log sqrt sinh cosh tanh``.  Anything
else (attributes, subscripts, other names) is rejected before evaluation.
"""
from __future__ import annotations

import ast
import operator

import numpy as np

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"exp": np.exp, "log": np.log, "sqrt": np.sqrt, "sinh": np.sinh,
          "cosh": np.cosh, "tanh": np.tanh}
_CONSTS = {"pi": np.pi, "e": np.e}


class ExpressionError(ValueError):
    pass


def _check(node):
    if isinstance(node, ast.Expression):
        return _check(node.body)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        _check(node.left)
        _check(node.right)
    elif isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        _check(node.operand)
    elif isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported constant {node.value!r}")
    elif isinstance(node, ast.Name):
        if node.id != "r" and node.id not in _CONSTS:
            raise ExpressionError(f"unknown name {node.id!r}")
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _FUNCS):
            raise ExpressionError("only exp, log, sqrt, sinh, cosh, tanh may be called")
        if len(node.args) != 1 or node.keywords:
            raise ExpressionError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0])
    else:
        raise ExpressionError(f"unsupported syntax: {type(node).__name__}")


def _eval(node, r):
    if isinstance(node, ast.Expression):
        return _eval(node.body, r)
    if isinstance(node, ast.BinOp):
        return _BINOPS[type(node.op)](_eval(node.left, r), _eval(node.right, r))
    if isinstance(node, ast.UnaryOp):
        return _UNARY[type(node.op)](_eval(node.operand, r))
    if isinstance(node, ast.Constant):
        return float(node.value)
    if isinstance(node, ast.Name):
        return r if node.id == "r" else _CONSTS[node.id]
    return _FUNCS[node.func.id](_eval(node.args[0], r))


class Expression:
    """A parsed density ``f(r)``, vectorized over numpy arrays."""

    def __init__(self, text: str):
        self.text = text.strip()
        if not self.text:
            raise ExpressionError("empty expression")
        try:
            tree = ast.parse(self.text.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None
        _check(tree)
        self._tree = tree

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(all="ignore"):
            out = _eval(self._tree, r)
        return np.broadcast_to(np.asarray(out, dtype=float), r.shape).copy()

    def __repr__(self):
        return f"Expression({self.text!r})"


def parse_positive(text: str, nodes) -> Expression:
    """Parse ``text`` and require finite positive values on ``nodes``."""
    f = Expression(text)
    vals = f(nodes)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise ExpressionError(f"{text!r} is not finite and positive on the sampled nodes")
    return f
