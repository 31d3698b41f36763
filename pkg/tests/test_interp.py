#!/usr/bin/env python3
"""Tests for interpretations: parsing, evaluation and rule checking."""

import pytest

from src.interp import (
    Certified,
    Falsified,
    InterpError,
    InterpEvaluator,
    Tested,
    Unknown,
    check_monotonicity,
    check_poly_bounded,
    check_rule,
    check_system,
    eval_cost,
    eval_size,
    format_verdict,
    parse_interp,
    totalcost,
    totalcost_prime,
)
from src.sopoly import format_poly
from src.strs import numeral, parse_term

ARITH_BASE = "size s = \\x. x + 1\nsize mult = \\x y. x * y\ncost mult = \\x y. x * y + 2 * x + 1\n" \
             "size funcProd = \\F x y. y\ncost funcProd = \\G F x y. 1\n"


class TestParseInterp:
    def test_constructors_default_to_zero(self, arith_fixed):
        assert str(arith_fixed.size['0']) == "0"
        assert str(arith_fixed.cost['s']) == "\\x1. 0"

    def test_sugar_names(self, binadd_interp):
        assert str(binadd_interp.size['cons']) == "\\x y. 1 + y"
        assert 'addB' in binadd_interp.cost

    def test_missing_defined_symbol(self, arith):
        with pytest.raises(InterpError, match="add"):
            parse_interp(ARITH_BASE, arith)

    def test_wrong_binder_count(self, arith):
        with pytest.raises(InterpError, match="binders"):
            parse_interp(ARITH_BASE + "size add = \\x. x\ncost add = \\x y. x + 1\n", arith)

    def test_cost_of_higher_order_symbol_takes_two_binders_per_function(self, arith):
        text = ARITH_BASE.replace("cost funcProd = \\G F x y. 1", "cost funcProd = \\F x y. 1")
        with pytest.raises(InterpError, match="binders"):
            parse_interp(text + "size add = \\x y. x + y\ncost add = \\x y. x + 1\n", arith)

    def test_function_binder_used_as_number(self, arith):
        text = ARITH_BASE.replace("size funcProd = \\F x y. y", "size funcProd = \\F x y. F + y")
        with pytest.raises(InterpError, match="as a number"):
            parse_interp(text + "size add = \\x y. x + y\ncost add = \\x y. x + 1\n", arith)

    def test_unknown_symbol(self, arith):
        with pytest.raises(InterpError, match="unknown symbol"):
            parse_interp("size nope = \\x. x\n", arith)

    def test_second_line_for_symbol(self, arith):
        with pytest.raises(InterpError, match="second"):
            parse_interp("size s = \\x. x\nsize s = \\x. x + 1\n", arith)


class TestEvaluation:
    def test_numerals_have_size_n_and_no_cost(self, arith_fixed):
        value = InterpEvaluator(arith_fixed).evaluate(numeral(4), {}, {})
        assert (value.size, value.cost, value.total) == (4, 0, 0)

    def test_totalcost_sums_base_type_subterms(self, arith, arith_fixed):
        term = parse_term("mult (s 0) (add (s 0) 0)", arith.signature)
        value = InterpEvaluator(arith_fixed).evaluate(term, {}, {})
        # mult 1 1 costs 1 + 2 + 1, add 1 0 costs 2
        assert value.total == 6
        assert value.size == 1

    def test_totalcost_prime_skips_normal_forms(self, arith, arith_fixed):
        assert totalcost_prime(arith_fixed, arith, numeral(3), {}, {}) == 0
        term = parse_term("add (s 0) 0", arith.signature)
        assert totalcost_prime(arith_fixed, arith, term, {}, {}) == 2

    def test_module_level_helpers(self, arith, arith_fixed):
        lhs = arith.rules[1].lhs  # add (s x) y
        alpha = {'x': 2, 'y': 3}
        assert eval_size(arith_fixed, lhs, alpha) == 6
        assert eval_cost(arith_fixed, lhs, alpha, {}) == 4
        assert totalcost(arith_fixed, lhs, alpha, {}) == 4

    def test_variables_need_values(self, arith, arith_fixed):
        rule = arith.rules[0]
        with pytest.raises(InterpError):
            InterpEvaluator(arith_fixed).evaluate(rule.rhs, {}, {})


class TestCheckRule:
    def test_printed_mult_cost_is_falsified_at_one_one(self, arith, arith_printed):
        verdict = check_rule(arith_printed, arith, 3, mode='falsify', budget=1000, seed=0)
        assert isinstance(verdict, Falsified)
        assert verdict.which == 'cost'
        assert verdict.valuation.numbers == {'x': 1, 'y': 1}
        # lhs: (1+1)*1 + (1+1) + 1; rhs: add costs 1+1, mult 1 1 costs 1+1+1
        assert (verdict.lhs, verdict.rhs) == (5, 5)
        assert verdict.lhs == (1 + 1) * 1 + (1 + 1) + 1
        assert "lhs=5 rhs=5" in format_verdict(verdict)

    def test_corrected_mult_is_certified(self, arith, arith_fixed):
        assert check_rule(arith_fixed, arith, 3, mode='certify') == Certified()

    def test_add_rules_are_certified(self, arith, arith_printed):
        for index in (0, 1):
            assert check_rule(arith_printed, arith, index, mode='certify') == Certified()

    def test_pow_makes_certify_unknown(self, arith, arith_fixed):
        verdict = check_rule(arith_fixed, arith, 5, mode='certify')
        assert isinstance(verdict, Unknown)

    def test_unknown_mode(self, arith, arith_fixed):
        with pytest.raises(InterpError):
            check_rule(arith_fixed, arith, 0, mode='guess')


class TestCheckSystem:
    def test_printed_arith_is_falsified(self, arith, arith_printed):
        report = check_system(arith_printed, arith, budget=500)
        assert isinstance(report.overall, Falsified)
        assert report.overall.rule == 3

    def test_corrected_arith_passes_sampling(self, arith, arith_fixed):
        report = check_system(arith_fixed, arith, budget=2000)
        assert all(isinstance(v, Tested) for v in report.verdicts)

    def test_binary_addition_orients_all_rules(self, binadd, binadd_interp):
        report = check_system(binadd_interp, binadd, budget=10_000, seed=7)
        assert not any(isinstance(v, Falsified) for v in report.verdicts)

    def test_corrected_sum_orients_all_rules(self, sumf, sumf_interp):
        report = check_system(sumf_interp, sumf, budget=10_000, seed=3)
        assert not any(isinstance(v, Falsified) for v in report.verdicts)

    def test_printed_sum_interpretation_is_falsified(self, sumf, sumf_printed):
        report = check_system(sumf_printed, sumf, budget=2000)
        falsified = {v.rule for v in report.verdicts if isinstance(v, Falsified)}
        # 0-based: toBin (s n), the compute successor rule and start
        assert falsified == {21, 23, 24}

    def test_printed_to_bin_fails_at_zero(self, sumf, sumf_printed):
        verdict = check_rule(sumf_printed, sumf, 21, budget=100)
        assert isinstance(verdict, Falsified)
        assert verdict.valuation.numbers == {'n': 1}

    def test_certify_summary(self, arith, arith_fixed):
        report = check_system(arith_fixed, arith, mode='certify')
        assert report.verdicts[:4] == [Certified()] * 4
        assert isinstance(report.overall, Unknown)

    def test_result_does_not_depend_on_jobs(self, binadd, binadd_interp):
        one = check_system(binadd_interp, binadd, budget=300, seed=5, jobs=1)
        two = check_system(binadd_interp, binadd, budget=300, seed=5, jobs=2)
        assert one.verdicts == two.verdicts


class TestPolyBounded:
    def test_sum_interpretation(self, sumf, sumf_interp):
        report = check_poly_bounded(sumf_interp, sumf, 'start')
        assert report.ok
        assert (report.mu, report.nu) == (1, 0)
        assert report.poly is not None
        assert 'Fc' in format_poly(report.poly)

    def test_system_without_words(self, arith, arith_fixed):
        report = check_poly_bounded(arith_fixed, arith, 'add')
        assert not report.ok
        assert any("word" in failure for failure in report.failures)

    def test_main_symbol_type(self, sumf, sumf_interp):
        report = check_poly_bounded(sumf_interp, sumf, 'compute')
        assert not report.ok


class TestMonotonicity:
    def test_samples_are_monotone(self, sumf, sumf_interp):
        assert check_monotonicity(sumf_interp, sumf, samples=50) == []

    def test_decreasing_cost_is_reported(self, arith):
        text = ARITH_BASE + "size add = \\x y. x + y\ncost add = \\x y. monus(5, x)\n"
        interp = parse_interp(text, arith)
        warnings = check_monotonicity(interp, arith, samples=50)
        assert any("cost of add" in warning for warning in warnings)
