"""Arbitrary-precision reals.

Scalars are mpmath ``mpf`` values; their precision is the working precision
of the mpmath context when they are computed. Use ``precision(bits)`` to set
it for a block of code.
"""
import ast
import math
import operator
from contextlib import contextmanager
from fractions import Fraction

from mpmath import mp, mpf

from .errors import ConfigError, PrecisionError

MIN_PRECISION = 64
DEFAULT_PRECISION = 256


@contextmanager
def precision(bits):
    bits = int(bits)
    if bits < MIN_PRECISION:
        raise PrecisionError(f"precision {bits} below the {MIN_PRECISION}-bit floor")
    with mp.workprec(bits):
        yield bits


def current_precision():
    return mp.prec


def eps(shift=0):
    """2^(shift - prec) at the current precision."""
    return mpf(2) ** (shift - mp.prec)


def check_tolerance(tol):
    if tol < eps(8):
        raise PrecisionError(f"tolerance {tol} below 2^(8-{mp.prec})")
    return tol


def close(a, b, tol, relative=False):
    check_tolerance(tol)
    diff = abs(mpf(a) - mpf(b))
    if relative:
        return diff <= tol * max(abs(mpf(a)), abs(mpf(b)))
    return diff <= tol


def arccosh1p(u):
    """arccosh(1 + u) without cancellation, via 2*asinh(sqrt(u/2))."""
    u = mpf(u)
    if u < 0:
        raise ValueError("arccosh1p needs u >= 0")
    return 2 * mp.asinh(mp.sqrt(u / 2))


def arccosh(x):
    x = mpf(x)
    if x < 1:
        raise ValueError(f"arccosh of {x} < 1")
    if x < 2:
        return arccosh1p(x - 1)
    return mp.acosh(x)


def to_fraction(x):
    """Exact rational value of a binary float (or int/Fraction)."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    man, exp = mpf(x).man_exp
    if exp >= 0:
        return Fraction(int(man) << exp)
    return Fraction(int(man), 1 << -exp)


def digits():
    """Significant decimal digits that round-trip the current precision."""
    return int(math.ceil(mp.prec * math.log10(2))) + 2


def fmt(x, ndigits=None):
    return mp.nstr(mpf(x), ndigits or digits(), strip_zeros=False, min_fixed=-5, max_fixed=6)


_FUNCS = {
    "exp": mp.exp, "log": mp.log, "sqrt": mp.sqrt,
    "sinh": mp.sinh, "cosh": mp.cosh, "tanh": mp.tanh,
    "arcsinh": mp.asinh, "arccosh": mp.acosh, "arctanh": mp.atanh,
    "sin": mp.sin, "cos": mp.cos, "tan": mp.tan,
}
_CONSTS = {"pi": lambda: +mp.pi, "e": lambda: mp.e}
_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse(value):
    """Turn a config value into a Scalar at the current precision.

    Strings may be decimal literals or expressions like "exp(2)",
    "arcsinh(1)", "(8 + 3*sqrt(2))/8". Literals are read from their
    source text so they never pass through binary64.
    """
    if isinstance(value, bool):
        raise ConfigError(f"not a number: {value!r}")
    if isinstance(value, int):
        return mpf(value)
    if isinstance(value, float):
        return mpf(repr(value))
    if not isinstance(value, str):
        return mpf(value)
    text = value.strip()
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse {value!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return mpf(ast.get_source_segment(text, node))
        if isinstance(node, ast.Name) and node.id in _CONSTS:
            return _CONSTS[node.id]()
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ConfigError(f"unsupported expression in {value!r}")

    try:
        return mpf(ev(tree))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot evaluate {value!r}: {exc}") from exc
