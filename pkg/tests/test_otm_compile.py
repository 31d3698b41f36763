#!/usr/bin/env python3
"""Tests for compiling oracle machines into STRSs with interpretations."""

import random
from itertools import product

import pytest

from src.interp import Falsified, check_poly_bounded, check_system, load_interp
from src.otm import decode_config, encode_config, otm_run, parse_otm
from src.otm_compile import (
    FN,
    SET,
    CompileError,
    build_theta,
    compile_otm,
    compile_otm_sources,
    parse_running_time,
    step_rules,
    write_compiled,
)
from src.rewrite import compute_type2, normalize
from src.sopoly import OracleTable, limitsize, parse_poly
from src.strs import (
    NAT,
    check_orthogonality,
    decode_numeral,
    decode_word,
    load_strs,
    numeral,
    parse_term,
    with_oracle,
)
from src.terms import App, Arrow, Sym, Var, format_term

BITFLIP_TIME = "2 * x + 5"
ONEQUERY_TIME = "3 * x + 3 * F(x) + 10"
IDENTITY_TIME = "1"
BIT_NAMES = {'0': 'o', '1': 'i', 'B': 'b'}


@pytest.fixture(scope="module")
def bitflip_compiled(bitflip_otm):
    return compile_otm(bitflip_otm, parse_poly(BITFLIP_TIME))


@pytest.fixture(scope="module")
def onequery_compiled(onequery_otm):
    return compile_otm(onequery_otm, parse_poly(ONEQUERY_TIME))


@pytest.fixture(scope="module")
def identity_compiled(identity_otm):
    return compile_otm(identity_otm, parse_poly(IDENTITY_TIME))


def checked_steps(compiled, spec, table, word: str) -> int:
    """Step the compiled system alongside the machine; returns the number of steps compared."""
    strs, _ = compiled
    system, oracle_name = with_oracle(strs)
    step_sym = system.signature.sym('step')
    oracle = system.signature.sym(oracle_name)
    run = otm_run(spec, table, word, keep_configs=True)
    for before, after in zip(run.configs, run.configs[1:]):
        config = encode_config(before)
        partial = App(step_sym, oracle, Arrow(config.type, config.type))
        result, _, _ = normalize(system, table, App(partial, config, config.type))
        assert decode_config(result).normalized() == after.normalized(), before
    return run.steps


def random_word(rng: random.Random, max_len: int) -> str:
    return ''.join(rng.choice('01') for _ in range(rng.randint(0, max_len)))


def word_text(word: str) -> str:
    return ' :: '.join([BIT_NAMES[c] for c in word] + ['[]'])


def nat_text(n: int) -> str:
    return format_term(numeral(n))


def nnat_text(n: int) -> str:
    return "nn (" * n + "nz" + ")" * n


def set_text(words: list[str]) -> str:
    text = "emptyset"
    for word in reversed(words):
        text = f"setcons ({word_text(word)}) ({text})"
    return text


def random_total_table(rng: random.Random, max_query: int) -> OracleTable:
    queries = [''.join(bits) for k in range(max_query + 1) for bits in product('01', repeat=k)]
    return OracleTable({q: random_word(rng, 3) for q in queries})


def reduce(strs, text: str, table=None):
    system, _ = with_oracle(strs)
    result, _, stats = normalize(system, table, parse_term(text, system.signature))
    assert stats.normal_form
    return result


class TestRunningTime:
    def test_parse(self):
        poly = parse_running_time("x * F(x) + 1")
        assert poly == parse_poly("x * F(x) + 1")

    def test_only_x_and_f(self):
        with pytest.raises(CompileError):
            parse_running_time("y + 1")
        with pytest.raises(CompileError):
            parse_running_time("Fs(x)")

    def test_malformed(self):
        with pytest.raises(CompileError, match="bad running time"):
            parse_running_time("x +")


class TestGeneratedSystem:
    def test_step_rule_count(self, bitflip_otm):
        # reading B moving left needs four tape cases, moving right two
        assert len(step_rules(bitflip_otm)) == 36

    def test_query_rule(self, onequery_otm):
        rules = step_rules(onequery_otm)
        assert rules[-1].startswith("rule step Fv (q_query t1 (split x (R y)) t3)")

    def test_sources_load(self, identity_otm):
        strs_text, csi_text = compile_otm_sources(identity_otm, parse_poly("1"))
        assert "cons q_end : tape -> tape -> tape -> config" in strs_text
        assert "size q_end = \\x y z. x + y" in csi_text

    def test_bad_state_name(self):
        spec = parse_otm("start a-b\nfinal z\ntrans a-b 1 B B R z\n")
        with pytest.raises(CompileError, match="state name"):
            compile_otm(spec, parse_poly("1"))

    def test_orthogonal(self, bitflip_compiled, onequery_compiled):
        for strs, _ in (bitflip_compiled, onequery_compiled):
            assert check_orthogonality(strs).orthogonal

    def test_write_compiled(self, bitflip_otm, tmp_path):
        strs_path, csi_path = write_compiled(bitflip_otm, parse_poly(BITFLIP_TIME), tmp_path / 'out' / 'bitflip')
        assert strs_path.name == 'bitflip.strs'
        assert csi_path.name == 'bitflip.csi'
        strs = load_strs(strs_path)
        assert load_interp(csi_path, strs) is not None


class TestHelperRules:
    def test_len_and_max(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        assert decode_numeral(reduce(strs, "len (i :: o :: b :: [])")) == 3
        assert decode_numeral(reduce(strs, "max (s 0) (s (s 0))")) == 2
        assert decode_numeral(reduce(strs, "max (s (s 0)) 0")) == 2

    def test_clean_stops_at_blank(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        assert decode_word(reduce(strs, "clean (i :: o :: b :: i :: [])")) == "10"

    def test_limit_and_retif(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        assert decode_word(reduce(strs, "limit (i :: o :: i :: []) (s (s 0))")) == "10"
        assert decode_word(reduce(strs, "retif (i :: o :: []) (s 0) (i :: [])")) == ""
        assert decode_word(reduce(strs, "retif (i :: []) (s 0) (o :: i :: [])")) == "01"

    def test_minus(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        assert decode_numeral(reduce(strs, "minus (s (s (s 0))) (nn (nn nz))")) == 1
        assert decode_numeral(reduce(strs, "minus (s 0) (nn (nn nz))")) == 0

    def test_tryapply_and_tryall(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        table = OracleTable({'1': '011'}, default='0')
        assert decode_numeral(reduce(strs, "tryapply S_f (i :: []) (s 0)", table)) == 3
        # the second word is longer than the bound and contributes nothing
        text = "tryall S_f (setcons (i :: []) (setcons (o :: o :: []) emptyset)) (s 0)"
        assert decode_numeral(reduce(strs, text, table)) == 3
        assert decode_numeral(reduce(strs, "tryall S_f emptyset (s 0)", table)) == 0


class TestHelperRulesAgainstPython:
    """Each helper on 100 seeded random inputs against a direct implementation."""

    SAMPLES = 100

    def test_clean(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(11)
        for _ in range(self.SAMPLES):
            word = ''.join(rng.choice('01B') for _ in range(rng.randint(0, 6)))
            assert decode_word(reduce(strs, f"clean ({word_text(word)})")) == word.split('B')[0]

    def test_len(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(12)
        for _ in range(self.SAMPLES):
            word = ''.join(rng.choice('01B') for _ in range(rng.randint(0, 8)))
            assert decode_numeral(reduce(strs, f"len ({word_text(word)})")) == len(word)

    def test_max(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(13)
        for _ in range(self.SAMPLES):
            m, n = rng.randint(0, 8), rng.randint(0, 8)
            assert decode_numeral(reduce(strs, f"max ({nat_text(m)}) ({nat_text(n)})")) == max(m, n)

    def test_minus(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(14)
        for _ in range(self.SAMPLES):
            m, n = rng.randint(0, 8), rng.randint(0, 8)
            assert decode_numeral(reduce(strs, f"minus ({nat_text(m)}) ({nnat_text(n)})")) == max(m - n, 0)

    def test_limit(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(15)
        for _ in range(self.SAMPLES):
            word, n = random_word(rng, 6), rng.randint(0, 7)
            assert decode_word(reduce(strs, f"limit ({word_text(word)}) ({nat_text(n)})")) == word[:n]

    def test_retif(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(16)
        for _ in range(self.SAMPLES):
            word, n, other = random_word(rng, 6), rng.randint(0, 7), random_word(rng, 4)
            text = f"retif ({word_text(word)}) ({nat_text(n)}) ({word_text(other)})"
            assert decode_word(reduce(strs, text)) == (other if len(word) <= n else '')

    def test_tryapply(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(17)
        for _ in range(self.SAMPLES):
            table = random_total_table(rng, 5)
            word, n = random_word(rng, 5), rng.randint(0, 5)
            text = f"tryapply S_f ({word_text(word)}) ({nat_text(n)})"
            expected = len(table(word)) if len(word) <= n else 0
            assert decode_numeral(reduce(strs, text, table)) == expected

    def test_tryall_matches_limitsize(self, bitflip_compiled):
        strs, _ = bitflip_compiled
        rng = random.Random(18)
        for _ in range(self.SAMPLES):
            table = random_total_table(rng, 4)
            words = [random_word(rng, 4) for _ in range(rng.randint(0, 4))]
            n = rng.randint(0, 4)
            text = f"tryall S_f ({set_text(words)}) ({nat_text(n)})"
            assert decode_numeral(reduce(strs, text, table)) == limitsize(table, words, n)


class TestInterpretation:
    def test_rules_are_oriented(self, bitflip_compiled, onequery_compiled):
        for strs, interp in (bitflip_compiled, onequery_compiled):
            report = check_system(interp, strs, budget=300, seed=1)
            falsified = [v for v in report.verdicts if isinstance(v, Falsified)]
            assert falsified == []

    def test_polynomially_bounded(self, bitflip_compiled, onequery_compiled):
        for strs, interp in (bitflip_compiled, onequery_compiled):
            report = check_poly_bounded(interp, strs, 'F')
            assert report.ok, report.failures
            assert (report.mu, report.nu) == (1, 0)


class TestSimulation:
    def test_bitflip_steps_match_machine(self, bitflip_otm, bitflip_compiled):
        rng = random.Random(21)
        total = 0
        for _ in range(30):
            word = ''.join(rng.choice('01') for _ in range(rng.randint(2, 6)))
            total += checked_steps(bitflip_compiled, bitflip_otm, None, word)
        assert total >= 100

    def test_onequery_steps_match_machine(self, onequery_otm, onequery_compiled):
        rng = random.Random(22)
        total = 0
        for _ in range(20):
            word = random_word(rng, 4)
            table = OracleTable({word: random_word(rng, 3)})
            total += checked_steps(onequery_compiled, onequery_otm, table, word)
        assert total >= 100

    def test_identity_has_no_steps(self, identity_otm, identity_compiled):
        assert checked_steps(identity_compiled, identity_otm, None, '0110') == 0

    def test_query_step_matches_machine(self, onequery_otm, onequery_compiled):
        strs, _ = onequery_compiled
        system, oracle_name = with_oracle(strs)
        table = OracleTable({'10': '111'})
        run = otm_run(onequery_otm, table, '10', keep_configs=True)
        index = next(i for i, c in enumerate(run.configs) if c.state == 'query')
        before, after = run.configs[index], run.configs[index + 1]
        config = encode_config(before)
        step_sym = system.signature.sym('step')
        partial = App(step_sym, system.signature.sym(oracle_name), Arrow(config.type, config.type))
        result, _, _ = normalize(system, table, App(partial, config, config.type))
        assert decode_config(result).normalized() == after.normalized()

    @pytest.mark.parametrize("machine", ["identity", "bitflip"])
    def test_outputs_against_machine(self, request, machine):
        spec = request.getfixturevalue(f"{machine}_otm")
        strs, _ = request.getfixturevalue(f"{machine}_compiled")
        rng = random.Random(23)
        for _ in range(50):
            word = random_word(rng, 5)
            table = random_total_table(rng, 2)
            output, stats = compute_type2(strs, 'F', table, word)
            assert output == otm_run(spec, table, word).output
            assert stats.oracle_calls == 0

    def test_against_machine(self, onequery_otm, onequery_compiled):
        strs, _ = onequery_compiled
        rng = random.Random(99)
        for _ in range(50):
            word = random_word(rng, 4)
            table = OracleTable({word: random_word(rng, 3)})
            output, stats = compute_type2(strs, 'F', table, word)
            assert output == otm_run(onequery_otm, table, word).output
            assert stats.max_query_len == len(word)


class TestTheta:
    def test_structure_follows_polynomial(self):
        term = build_theta(parse_poly("x * F(x) + 2"), Var('Fv', FN), Var('z', NAT), Sym('emptyset', SET))
        assert format_term(term) == "add (mult z (tryall Fv emptyset z)) (s (s 0))"
        assert term.type == NAT
