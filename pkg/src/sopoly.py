"""Second-order polynomials and the bounds derived from them.

Polynomials follow the grammar `n | x | P + Q | P * Q | F(Q)`. A cost bound
for a main symbol mentions two function variables, Fc (cost) and Fs (size);
the derived polynomials D, Q and B mention one function variable.

Oracle tables (finite word maps) live here too, together with the length
functionals computed from them.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Union

import sympy
from sympy.core.function import AppliedUndef

from src.logging_config import get_logger

logger = get_logger(__name__)


class SopolyError(Exception):
    """Base exception for second-order polynomial errors."""


class OracleMissError(SopolyError):
    """Lookup of a word the oracle table does not define."""

    def __init__(self, query: str):
        super().__init__(f"oracle table has no entry for {format_bits(query)}")
        self.query = query


@dataclass(frozen=True)
class PConst:
    value: int


@dataclass(frozen=True)
class PVar:
    name: str


@dataclass(frozen=True)
class PSum:
    left: 'Poly'
    right: 'Poly'


@dataclass(frozen=True)
class PProd:
    left: 'Poly'
    right: 'Poly'


@dataclass(frozen=True)
class PApp:
    fn: str
    arg: 'Poly'


Poly = Union[PConst, PVar, PSum, PProd, PApp]

ZERO = PConst(0)
ONE = PConst(1)


# ── Parsing and printing ──

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[+*()]))")


def parse_poly(text: str) -> Poly:
    tokens = []
    pos = 0
    stripped = text.strip()
    while pos < len(stripped):
        match = _TOKEN_RE.match(stripped, pos)
        if not match or match.lastgroup is None:
            raise SopolyError(f"unexpected character in polynomial {text!r}")
        tokens.append(match.group(match.lastgroup))
        pos = match.end()

    index = 0

    def peek() -> Optional[str]:
        return tokens[index] if index < len(tokens) else None

    def take() -> str:
        nonlocal index
        if index >= len(tokens):
            raise SopolyError(f"unexpected end of polynomial {text!r}")
        index += 1
        return tokens[index - 1]

    def expect(token: str) -> None:
        found = take()
        if found != token:
            raise SopolyError(f"expected {token!r}, found {found!r} in {text!r}")

    def poly_sum() -> Poly:
        result = product()
        while peek() == '+':
            take()
            result = PSum(result, product())
        return result

    def product() -> Poly:
        result = atom()
        while peek() == '*':
            take()
            result = PProd(result, atom())
        return result

    def atom() -> Poly:
        token = take()
        if token == '(':
            inner = poly_sum()
            expect(')')
            return inner
        if token.isdigit():
            return PConst(int(token))
        if token in ('+', '*', ')'):
            raise SopolyError(f"unexpected {token!r} in {text!r}")
        if peek() == '(':
            take()
            arg = poly_sum()
            expect(')')
            return PApp(token, arg)
        return PVar(token)

    result = poly_sum()
    if peek() is not None:
        raise SopolyError(f"unexpected {peek()!r} in {text!r}")
    return result


def format_poly(poly: Poly) -> str:
    if isinstance(poly, PConst):
        return str(poly.value)
    if isinstance(poly, PVar):
        return poly.name
    if isinstance(poly, PApp):
        return f"{poly.fn}({format_poly(poly.arg)})"
    if isinstance(poly, PSum):
        return f"{format_poly(poly.left)} + {format_poly(poly.right)}"
    parts = []
    for child in (poly.left, poly.right):
        text = format_poly(child)
        parts.append(f"({text})" if isinstance(child, PSum) else text)
    return '*'.join(parts)


def poly_sum(parts: Iterable[Poly]) -> Poly:
    result: Optional[Poly] = None
    for part in parts:
        result = part if result is None else PSum(result, part)
    return result if result is not None else ZERO


def poly_product(parts: Iterable[Poly]) -> Poly:
    result: Optional[Poly] = None
    for part in parts:
        result = part if result is None else PProd(result, part)
    return result if result is not None else ONE


def variables_of(poly: Poly) -> set[str]:
    if isinstance(poly, PConst):
        return set()
    if isinstance(poly, PVar):
        return {poly.name}
    if isinstance(poly, PApp):
        return variables_of(poly.arg)
    return variables_of(poly.left) | variables_of(poly.right)


def functions_of(poly: Poly) -> set[str]:
    if isinstance(poly, (PConst, PVar)):
        return set()
    if isinstance(poly, PApp):
        return {poly.fn} | functions_of(poly.arg)
    return functions_of(poly.left) | functions_of(poly.right)


# ── Evaluation ──

def eval_sopoly(poly: Poly, F: Callable[[int], int], n: int,
                Fc: Optional[Callable[[int], int]] = None,
                env: Optional[Mapping[str, int]] = None) -> int:
    """Evaluate with the order-0 variable at `n`.

    `Fc` answers calls to the name Fc; every other function name is `F`.
    Names in `env` (such as symbolic mu and nu) take their given values; at
    most one other order-0 name may occur.
    """
    env = dict(env or {})
    free = sorted(variables_of(poly) - set(env))
    if len(free) > 1:
        raise SopolyError(f"unbound variables {free[1:]} in {format_poly(poly)}")
    if free:
        env[free[0]] = n

    def go(p: Poly) -> int:
        if isinstance(p, PConst):
            return p.value
        if isinstance(p, PVar):
            return env[p.name]
        if isinstance(p, PSum):
            return go(p.left) + go(p.right)
        if isinstance(p, PProd):
            return go(p.left) * go(p.right)
        if p.fn == 'Fc':
            if Fc is None:
                raise SopolyError(f"no value for Fc in {format_poly(poly)}")
            return Fc(go(p.arg))
        return F(go(p.arg))

    return go(poly)


# ── Symbolic normal form ──

def to_sympy(poly: Poly) -> sympy.Expr:
    if isinstance(poly, PConst):
        return sympy.Integer(poly.value)
    if isinstance(poly, PVar):
        return sympy.Symbol(poly.name, integer=True, nonnegative=True)
    if isinstance(poly, PSum):
        return to_sympy(poly.left) + to_sympy(poly.right)
    if isinstance(poly, PProd):
        return to_sympy(poly.left) * to_sympy(poly.right)
    return sympy.Function(poly.fn)(to_sympy(poly.arg))


def from_sympy(expr: sympy.Expr) -> Poly:
    """Canonical tree: constant first, then monomials ordered by their text."""
    expr = sympy.expand(expr)
    if expr.is_Add:
        terms = [from_sympy(term) for term in expr.args]
        constants = [t for t in terms if isinstance(t, PConst)]
        rest = sorted((t for t in terms if not isinstance(t, PConst)), key=format_poly)
        return poly_sum(constants + rest)
    if expr.is_Mul:
        factors = [from_sympy(factor) for factor in expr.args]
        constants = [f for f in factors if isinstance(f, PConst)]
        rest = sorted((f for f in factors if not isinstance(f, PConst)), key=format_poly)
        return poly_product(constants + rest)
    if expr.is_Pow:
        base, exponent = expr.args
        if not (exponent.is_Integer and exponent > 0):
            raise SopolyError(f"not a polynomial: {expr}")
        return poly_product([from_sympy(base)] * int(exponent))
    if expr.is_Integer:
        if expr < 0:
            raise SopolyError(f"negative constant in {expr}")
        return PConst(int(expr))
    if expr.is_Symbol:
        return PVar(expr.name)
    if isinstance(expr, AppliedUndef):
        return PApp(expr.func.__name__, from_sympy(expr.args[0]))
    raise SopolyError(f"not a second-order polynomial: {expr}")


def simplify(poly: Poly) -> Poly:
    """Expand and collect like monomials (also inside function arguments)."""
    return from_sympy(to_sympy(poly))


def equivalent(left: Poly, right: Poly) -> bool:
    return sympy.expand(to_sympy(left) - to_sympy(right)) == 0


# ── Substitution and the D, Q, B constructions ──

FunctionMap = Mapping[str, Callable[[Poly], Poly]]


def substitute(poly: Poly, variables: Mapping[str, Poly], functions: FunctionMap) -> Poly:
    if isinstance(poly, PConst):
        return poly
    if isinstance(poly, PVar):
        return variables.get(poly.name, poly)
    if isinstance(poly, PApp):
        arg = substitute(poly.arg, variables, functions)
        fn = functions.get(poly.fn)
        return fn(arg) if fn is not None else PApp(poly.fn, arg)
    left = substitute(poly.left, variables, functions)
    right = substitute(poly.right, variables, functions)
    return type(poly)(left, right)


def _scalar(value: Union[int, str]) -> Poly:
    return PConst(value) if isinstance(value, int) else PVar(value)


def _affine(mu: Union[int, str], inner: Poly, nu: Union[int, str]) -> Poly:
    return PSum(PProd(_scalar(mu), inner), _scalar(nu))


def fc_arguments(poly: Poly) -> list[Poly]:
    """Arguments of every Fc occurrence, in pre-order, nested ones included."""
    found: list[Poly] = []

    def walk(p: Poly) -> None:
        if isinstance(p, PApp):
            if p.fn == 'Fc':
                found.append(p.arg)
            walk(p.arg)
        elif isinstance(p, (PSum, PProd)):
            walk(p.left)
            walk(p.right)

    walk(poly)
    return found


def build_Q(poly: Poly) -> Poly:
    """Sum of all Fc arguments, with Fc calls inside them replaced by 1."""
    erase = {'Fc': lambda arg: ONE}
    parts = [substitute(arg, {}, erase) for arg in fc_arguments(poly)]
    return simplify(poly_sum(parts))


def build_B(poly: Poly, mu: Union[int, str], nu: Union[int, str],
            var: str = 'y', fn: str = 'G', source_var: str = 'x') -> Poly:
    """Q with Fs := λz.mu*G(z)+nu and x := mu*y+nu."""
    q = build_Q(poly)
    result = substitute(
        q,
        {source_var: _affine(mu, PVar(var), nu)},
        {'Fs': lambda arg: _affine(mu, PApp(fn, arg), nu),
         'F': lambda arg: _affine(mu, PApp(fn, arg), nu)},
    )
    return simplify(result)


def build_D(poly: Poly, mu: Union[int, str], nu: Union[int, str],
            var: str = 'n', fn: str = 'F', source_var: str = 'x') -> Poly:
    """P with Fc := λz.1, Fs := λz.mu*F(z)+nu and x := mu*n+nu."""
    result = substitute(
        poly,
        {source_var: _affine(mu, PVar(var), nu)},
        {'Fc': lambda arg: ONE,
         'Fs': lambda arg: _affine(mu, PApp(fn, arg), nu),
         'F': lambda arg: _affine(mu, PApp(fn, arg), nu)},
    )
    return simplify(result)


def build_graph_bound(poly: Poly, mu: int, nu: int, a: int, scale: int = 1) -> Poly:
    """x + D(F,x) * (a + scale*F(B(F,x))): bounds every intermediate term graph size.

    `scale` is the number of vertices one encoded bit occupies.
    """
    d = build_D(poly, mu, nu, var='x', fn='F')
    b = build_B(poly, mu, nu, var='x', fn='F')
    return simplify(PSum(PVar('x'), PProd(d, PSum(PConst(a), PProd(PConst(scale), PApp('F', b))))))


# ── Oracle tables ──

def format_bits(word: str) -> str:
    return word if word else '_'


def _parse_bits(token: str, line: int) -> str:
    if token == '_':
        return ''
    if not token or set(token) - {'0', '1'}:
        raise SopolyError(f"line {line}: not a word: {token!r}")
    return token


@dataclass(frozen=True)
class OracleTable:
    """A finite word-to-word map, optionally total through a default answer."""
    mapping: dict[str, str] = field(default_factory=dict)
    default: Optional[str] = None

    def lookup(self, query: str) -> str:
        if query in self.mapping:
            return self.mapping[query]
        if self.default is not None:
            return self.default
        raise OracleMissError(query)

    def with_default(self, default: Optional[str]) -> 'OracleTable':
        return OracleTable(dict(self.mapping), default)

    def __call__(self, query: str) -> str:
        return self.lookup(query)


def parse_otab(text: str) -> OracleTable:
    """`<bits> -> <bits>` per line, `_` for the empty word, `default <bits>`."""
    mapping: dict[str, str] = {}
    default: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if line.startswith('default'):
            default = _parse_bits(line[len('default'):].strip(), number)
            continue
        key, arrow, value = line.partition('->')
        if not arrow:
            raise SopolyError(f"line {number}: expected '<bits> -> <bits>'")
        query = _parse_bits(key.strip(), number)
        if query in mapping:
            raise SopolyError(f"line {number}: duplicate entry for {format_bits(query)}")
        mapping[query] = _parse_bits(value.strip(), number)
    return OracleTable(mapping, default)


def load_otab(path: Path) -> OracleTable:
    try:
        return parse_otab(path.read_text(encoding='utf-8'))
    except OSError as e:
        raise SopolyError(f"cannot read {path}: {e}") from e


def format_otab(table: OracleTable) -> str:
    lines = [f"{format_bits(key)} -> {format_bits(value)}" for key, value in sorted(table.mapping.items())]
    if table.default is not None:
        lines.append(f"default {format_bits(table.default)}")
    return '\n'.join(lines) + '\n'


def limitsize(table: OracleTable, queries: Iterable[str], n: int) -> int:
    """max |f(q)| over queries q with |q| <= n; 0 for an empty set."""
    return max((len(table.lookup(q)) for q in queries if len(q) <= n), default=0)


def table_length(table: OracleTable, n: int) -> int:
    """|f|(n) relative to the table; the default answer bounds it from below."""
    value = limitsize(table, table.mapping, n)
    if table.default is not None:
        value = max(value, len(table.default))
    return value
