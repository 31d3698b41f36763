"""Expression language for cost and size interpretation functions.

Grammar (`*` binds tighter than `+`):

    e ::= nat | ident | e + e | e * e | max(e, e) | monus(e, e) | pow(e, e) | F(e, ...)

An interpretation is a lambda `\\x y. body` whose body mentions only its
binders. Evaluation is pluggable: the same tree runs over Python integers,
numpy lanes (one sample per lane) or sympy expressions.
"""

import re
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Protocol, Sequence, Union

import numpy as np
import sympy

from src.logging_config import get_logger

logger = get_logger(__name__)


class CsExprError(Exception):
    """Base exception for interpretation expression errors."""


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Add:
    left: 'CsExpr'
    right: 'CsExpr'


@dataclass(frozen=True)
class Mul:
    left: 'CsExpr'
    right: 'CsExpr'


@dataclass(frozen=True)
class Max:
    left: 'CsExpr'
    right: 'CsExpr'


@dataclass(frozen=True)
class Monus:
    left: 'CsExpr'
    right: 'CsExpr'


@dataclass(frozen=True)
class Pow:
    base: 'CsExpr'
    exponent: 'CsExpr'


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple['CsExpr', ...]


CsExpr = Union[Const, Ref, Add, Mul, Max, Monus, Pow, Call]

BUILTINS = {'max': Max, 'monus': Monus, 'pow': Pow}


@dataclass(frozen=True)
class CsLambda:
    binders: tuple[str, ...]
    body: CsExpr

    def __str__(self) -> str:
        if not self.binders:
            return format_expr(self.body)
        return f"\\{' '.join(self.binders)}. {format_expr(self.body)}"


# ── Parsing ──

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[+*(),]))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.lastgroup is None:
            raise CsExprError(f"unexpected character {text[pos:].lstrip()[:1]!r} in {text!r}")
        tokens.append(match.group(match.lastgroup))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> str:
        token = self.peek()
        if token is None:
            raise CsExprError(f"unexpected end of expression {self.text!r}")
        self.pos += 1
        return token

    def expect(self, token: str) -> None:
        found = self.next()
        if found != token:
            raise CsExprError(f"expected {token!r}, found {found!r} in {self.text!r}")

    def sum(self) -> CsExpr:
        expr = self.product()
        while self.peek() == '+':
            self.next()
            expr = Add(expr, self.product())
        return expr

    def product(self) -> CsExpr:
        expr = self.atom()
        while self.peek() == '*':
            self.next()
            expr = Mul(expr, self.atom())
        return expr

    def atom(self) -> CsExpr:
        token = self.next()
        if token == '(':
            expr = self.sum()
            self.expect(')')
            return expr
        if token.isdigit():
            return Const(int(token))
        if not (token[0].isalpha() or token[0] == '_'):
            raise CsExprError(f"unexpected {token!r} in {self.text!r}")
        if self.peek() != '(':
            return Ref(token)
        self.next()
        args = [self.sum()]
        while self.peek() == ',':
            self.next()
            args.append(self.sum())
        self.expect(')')
        if token in BUILTINS:
            if len(args) != 2:
                raise CsExprError(f"{token} takes 2 arguments in {self.text!r}")
            return BUILTINS[token](args[0], args[1])
        return Call(token, tuple(args))


def parse_expr(text: str) -> CsExpr:
    parser = _Parser(text)
    expr = parser.sum()
    if parser.peek() is not None:
        raise CsExprError(f"unexpected {parser.peek()!r} in {text!r}")
    return expr


def parse_lambda(text: str) -> CsLambda:
    r"""`\x y. body` or a bare body (no binders)."""
    text = text.strip()
    binders: tuple[str, ...] = ()
    if text.startswith('\\'):
        head, dot, body = text[1:].partition('.')
        if not dot:
            raise CsExprError(f"missing '.' after binders in {text!r}")
        binders = tuple(head.split())
        if len(set(binders)) != len(binders):
            raise CsExprError(f"repeated binder in {text!r}")
        text = body
    result = CsLambda(binders, parse_expr(text))
    unbound = free_names(result.body) - set(binders)
    if unbound:
        raise CsExprError(f"unbound names {sorted(unbound)} in {text.strip()!r}")
    return result


# ── Structure ──

def free_names(expr: CsExpr) -> set[str]:
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Ref):
        return {expr.name}
    if isinstance(expr, Call):
        names = {expr.name}
        for arg in expr.args:
            names |= free_names(arg)
        return names
    if isinstance(expr, Pow):
        return free_names(expr.base) | free_names(expr.exponent)
    return free_names(expr.left) | free_names(expr.right)


def called_names(expr: CsExpr) -> set[str]:
    """Names used in function position."""
    if isinstance(expr, (Const, Ref)):
        return set()
    if isinstance(expr, Call):
        names = {expr.name}
        for arg in expr.args:
            names |= called_names(arg)
        return names
    if isinstance(expr, Pow):
        return called_names(expr.base) | called_names(expr.exponent)
    return called_names(expr.left) | called_names(expr.right)


def in_fragment(expr: CsExpr) -> bool:
    """True when the expression uses only constants, variables, +, * and calls."""
    if isinstance(expr, (Const, Ref)):
        return True
    if isinstance(expr, (Add, Mul)):
        return in_fragment(expr.left) and in_fragment(expr.right)
    if isinstance(expr, Call):
        return all(in_fragment(arg) for arg in expr.args)
    return False


def substitute(expr: CsExpr, mapping: Mapping[str, CsExpr]) -> CsExpr:
    """Replace variable references; called names are left alone."""
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Ref):
        return mapping.get(expr.name, expr)
    if isinstance(expr, Call):
        return Call(expr.name, tuple(substitute(arg, mapping) for arg in expr.args))
    if isinstance(expr, Pow):
        return Pow(substitute(expr.base, mapping), substitute(expr.exponent, mapping))
    return type(expr)(substitute(expr.left, mapping), substitute(expr.right, mapping))


_PRECEDENCE = {Add: 1, Mul: 2}


def format_expr(expr: CsExpr) -> str:
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Call):
        return f"{expr.name}({', '.join(format_expr(arg) for arg in expr.args)})"
    if isinstance(expr, Max):
        return f"max({format_expr(expr.left)}, {format_expr(expr.right)})"
    if isinstance(expr, Monus):
        return f"monus({format_expr(expr.left)}, {format_expr(expr.right)})"
    if isinstance(expr, Pow):
        return f"pow({format_expr(expr.base)}, {format_expr(expr.exponent)})"
    level = _PRECEDENCE[type(expr)]
    parts = []
    for child in (expr.left, expr.right):
        text = format_expr(child)
        if _PRECEDENCE.get(type(child), 3) < level:
            text = f"({text})"
        parts.append(text)
    return f" {'+' if isinstance(expr, Add) else '*'} ".join(parts)


# ── Evaluation backends ──

class Arithmetic(Protocol):
    def const(self, value: int) -> Any: ...
    def add(self, a: Any, b: Any) -> Any: ...
    def mul(self, a: Any, b: Any) -> Any: ...
    def max(self, a: Any, b: Any) -> Any: ...
    def monus(self, a: Any, b: Any) -> Any: ...
    def pow(self, a: Any, b: Any) -> Any: ...


class ScalarArithmetic:
    """Exact Python integers."""

    def const(self, value: int) -> int:
        return value

    def add(self, a: int, b: int) -> int:
        return a + b

    def mul(self, a: int, b: int) -> int:
        return a * b

    def max(self, a: int, b: int) -> int:
        return max(a, b)

    def monus(self, a: int, b: int) -> int:
        return max(a - b, 0)

    def pow(self, a: int, b: int) -> int:
        return a ** b


class LaneOverflow(CsExprError):
    """An int64 lane would overflow; the caller retries with exact integers."""


_LIMIT = 2 ** 62


class VectorArithmetic:
    """numpy lanes; int64 with an overflow guard, or object arrays when exact."""

    def __init__(self, exact: bool = False):
        self.exact = exact

    def const(self, value: int) -> Any:
        return value

    def _guard(self, estimate: Any) -> None:
        if not self.exact and np.any(np.abs(np.asarray(estimate, dtype=np.float64)) >= _LIMIT):
            raise LaneOverflow("int64 lane overflow")

    def add(self, a: Any, b: Any) -> Any:
        if not self.exact:
            self._guard(np.asarray(a, dtype=np.float64) + np.asarray(b, dtype=np.float64))
        return np.add(a, b)

    def mul(self, a: Any, b: Any) -> Any:
        if not self.exact:
            self._guard(np.asarray(a, dtype=np.float64) * np.asarray(b, dtype=np.float64))
        return np.multiply(a, b)

    def max(self, a: Any, b: Any) -> Any:
        return np.maximum(a, b)

    def monus(self, a: Any, b: Any) -> Any:
        return np.maximum(np.subtract(a, b), 0)

    def pow(self, a: Any, b: Any) -> Any:
        if not self.exact:
            with np.errstate(over='ignore'):
                self._guard(np.power(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)))
        return np.power(a, b)


class SymbolicArithmetic:
    """sympy expressions over nonnegative integer symbols."""

    def const(self, value: int) -> sympy.Expr:
        return sympy.Integer(value)

    def add(self, a: sympy.Expr, b: sympy.Expr) -> sympy.Expr:
        return a + b

    def mul(self, a: sympy.Expr, b: sympy.Expr) -> sympy.Expr:
        return a * b

    def max(self, a: sympy.Expr, b: sympy.Expr) -> sympy.Expr:
        return sympy.Max(a, b)

    def monus(self, a: sympy.Expr, b: sympy.Expr) -> sympy.Expr:
        return sympy.Max(a - b, 0)

    def pow(self, a: sympy.Expr, b: sympy.Expr) -> sympy.Expr:
        return a ** b


SCALAR = ScalarArithmetic()

Compiled = Callable[[Mapping[str, Any]], Any]


def compile_expr(expr: CsExpr, arith: Arithmetic) -> Compiled:
    """Turn an expression into a closure over an environment of binder values.

    Called names must be bound to one-argument callables (curried for several
    arguments).
    """
    if isinstance(expr, Const):
        value = arith.const(expr.value)
        return lambda env: value
    if isinstance(expr, Ref):
        name = expr.name
        return lambda env: env[name]
    if isinstance(expr, Call):
        name = expr.name
        args = [compile_expr(arg, arith) for arg in expr.args]

        def call(env: Mapping[str, Any]) -> Any:
            fn = env[name]
            for arg in args:
                fn = fn(arg(env))
            return fn
        return call
    if isinstance(expr, Pow):
        base, exponent = compile_expr(expr.base, arith), compile_expr(expr.exponent, arith)
        return lambda env: arith.pow(base(env), exponent(env))
    left, right = compile_expr(expr.left, arith), compile_expr(expr.right, arith)
    op = {Add: arith.add, Mul: arith.mul, Max: arith.max, Monus: arith.monus}[type(expr)]
    return lambda env: op(left(env), right(env))


def evaluate(expr: CsExpr, env: Mapping[str, Any], arith: Arithmetic = SCALAR) -> Any:
    return compile_expr(expr, arith)(env)


def apply_lambda(fn: CsLambda, args: Sequence[Any], arith: Arithmetic = SCALAR) -> Any:
    if len(args) != len(fn.binders):
        raise CsExprError(f"{fn} expects {len(fn.binders)} arguments, got {len(args)}")
    return evaluate(fn.body, dict(zip(fn.binders, args)), arith)
