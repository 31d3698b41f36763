#!/usr/bin/env python3
"""Tests for the symbolic nonnegativity check used by certify mode."""

import sympy

from src.certify import lambda_to_sympy, natural, nonnegative
from src.csexpr import parse_lambda

x, y = natural('x'), natural('y')
F = sympy.Function('F')


class TestNonnegative:
    def test_constants(self):
        assert nonnegative(sympy.Integer(0))
        assert not nonnegative(sympy.Integer(-1))

    def test_polynomial_with_positive_coefficients(self):
        assert nonnegative(x * y + 2 * x + 1)

    def test_negative_monomial_paid_by_equal_monomial(self):
        assert nonnegative(3 * x * y - 2 * x * y)

    def test_unpaid_negative_monomial(self):
        assert not nonnegative(x - y)
        assert not nonnegative(x * y - x - 1 + 1)

    def test_constants_do_not_pay_for_variables(self):
        assert not nonnegative(5 - x)

    def test_function_atoms_dominate_by_argument(self):
        """F(x + 1) pays for F(x) because F is weakly monotone."""
        assert nonnegative(F(x + 1) - F(x))
        assert not nonnegative(F(x) - F(x + 1))

    def test_mult_successor_rule(self):
        lhs = (x + 1) * y + 2 * (x + 1) + 1
        rhs = (y + 1) + (x * y + 2 * x + 1)
        assert nonnegative(lhs - rhs - 1)
        printed_lhs = (x + 1) * y + (x + 1) + 1
        printed_rhs = (y + 1) + (x * y + x + 1)
        assert not nonnegative(printed_lhs - printed_rhs - 1)


class TestLambdaToSympy:
    def test_numbers(self):
        expr = lambda_to_sympy(parse_lambda(r"\x y. x * y + 2 * x + 1"))
        assert sympy.expand(expr - (x * y + 2 * x + 1)) == 0

    def test_functions(self):
        expr = lambda_to_sympy(parse_lambda(r"\Fc Fs x. Fc(x) + x"), {'Fc': 1, 'Fs': 1})
        assert expr.has(sympy.Function('Fc')(natural('x')))
