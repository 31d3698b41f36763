"""Sound sufficient check that a polynomial expression is nonnegative over N.

Expressions are sympy polynomials in nonnegative integer symbols and
applications of uninterpreted weakly monotone functions. After expansion,
every negative monomial must be paid for by positive monomials with the same
number of factors whose factors dominate it one by one: equal symbols, or
applications of the same function whose argument difference is itself
certified nonnegative. Constants only pay for constants.
"""

from itertools import permutations
from typing import Any, Mapping, Optional

import sympy
from sympy.core.function import AppliedUndef

from src.csexpr import CsLambda, SymbolicArithmetic, evaluate
from src.logging_config import get_logger

logger = get_logger(__name__)

SYMBOLIC = SymbolicArithmetic()
_MAX_PERMUTED = 6


def natural(name: str) -> sympy.Symbol:
    return sympy.Symbol(name, integer=True, nonnegative=True)


class SymbolicFn:
    """Curried wrapper around an uninterpreted sympy function."""

    def __init__(self, name: str, arity: int = 1, args: tuple = ()):
        self.name = name
        self.arity = arity
        self.args = args

    def __call__(self, value: Any) -> Any:
        args = self.args + (value,)
        if len(args) == self.arity:
            return sympy.Function(self.name)(*args)
        return SymbolicFn(self.name, self.arity, args)


def lambda_to_sympy(fn: CsLambda, function_arities: Optional[Mapping[str, int]] = None) -> sympy.Expr:
    """Body of `fn` with binders as symbols; binders in `function_arities` become functions."""
    function_arities = function_arities or {}
    env: dict[str, Any] = {}
    for binder in fn.binders:
        if binder in function_arities:
            env[binder] = SymbolicFn(binder, function_arities[binder])
        else:
            env[binder] = natural(binder)
    return evaluate(fn.body, env, SYMBOLIC)


def _factors(monomial: sympy.Expr) -> list[sympy.Expr]:
    factors: list[sympy.Expr] = []
    for factor in sympy.Mul.make_args(monomial):
        if factor == 1:
            continue
        base, exponent = factor.as_base_exp()
        if exponent.is_Integer and exponent > 0:
            factors.extend([base] * int(exponent))
        else:
            factors.append(factor)
    return factors


def _factor_dominates(big: sympy.Expr, small: sympy.Expr, depth: int) -> bool:
    if big == small:
        return True
    if isinstance(big, AppliedUndef) and isinstance(small, AppliedUndef):
        if big.func != small.func or len(big.args) != len(small.args):
            return False
        return all(nonnegative(b - s, depth + 1) for b, s in zip(big.args, small.args))
    return False


def _monomial_dominates(big: list[sympy.Expr], small: list[sympy.Expr], depth: int) -> bool:
    if len(big) != len(small):
        return False
    if len(big) <= _MAX_PERMUTED:
        return any(
            all(_factor_dominates(b, s, depth) for b, s in zip(order, small))
            for order in permutations(big)
        )
    remaining = list(big)
    for s in small:
        match = next((b for b in remaining if _factor_dominates(b, s, depth)), None)
        if match is None:
            return False
        remaining.remove(match)
    return True


def nonnegative(expr: sympy.Expr, depth: int = 0) -> bool:
    """True only if `expr` is >= 0 for all naturals and monotone functions."""
    if depth > 8:
        return False
    expanded = sympy.expand(expr)
    if expanded.is_number:
        return bool(expanded >= 0)
    coefficients = expanded.as_coefficients_dict()
    positive: dict[sympy.Expr, Any] = {}
    negative: list[tuple[sympy.Expr, Any]] = []
    for monomial, coefficient in coefficients.items():
        if not coefficient.is_Integer:
            return False
        if coefficient > 0:
            positive[monomial] = coefficient
        elif coefficient < 0:
            negative.append((monomial, -coefficient))

    factor_cache = {monomial: _factors(monomial) for monomial in positive}
    for monomial, owed in negative:
        small = _factors(monomial)
        for candidate in list(positive):
            if owed == 0:
                break
            if positive[candidate] == 0:
                continue
            if _monomial_dominates(factor_cache[candidate], small, depth):
                paid = min(owed, positive[candidate])
                positive[candidate] -= paid
                owed -= paid
        if owed > 0:
            logger.debug(f"Cannot pay for monomial {monomial} in {expanded}")
            return False
    return True
