#!/usr/bin/env python3
"""Tests for oracle Turing machines and their term encoding."""

import pytest

from src.otm import (
    OtmConfig,
    OtmError,
    StuckMachine,
    Tape,
    decode_config,
    encode_config,
    initial_config,
    otm_run,
    otm_step,
    parse_otm,
    validate,
)
from src.rewrite import BudgetExhausted
from src.sopoly import OracleMissError, OracleTable
from src.strs import encode_word

HEADER = "start a\nfinal z\n"


class TestParse:
    def test_sample(self, onequery_otm):
        assert onequery_otm.start == 'init'
        assert onequery_otm.query == 'query'
        assert onequery_otm.answer == 'answer'
        assert onequery_otm.tape_of('c') == 1
        assert onequery_otm.tape_of('r2') == 2
        assert str(onequery_otm.transitions[0]) == "trans init 2 B B R c"

    def test_states_in_order_of_mention(self, identity_otm, bitflip_otm):
        assert identity_otm.states == ['end']
        assert bitflip_otm.states[:2] == ['start', 'end']

    @pytest.mark.parametrize("text, message", [
        ("final z\n", "missing start"),
        (HEADER + "start b\n", "second start"),
        (HEADER + "trans a 4 0 0 R z\n", "tape must be"),
        (HEADER + "trans a 1 2 0 R z\n", "symbols"),
        (HEADER + "trans a 1 0 0 S z\n", "move"),
        (HEADER + "trans a 1 0 0 R\n", "expected"),
        (HEADER + "query q\n", "together"),
        (HEADER + "halt z\n", "unknown declaration"),
    ])
    def test_malformed(self, text, message):
        with pytest.raises(OtmError, match=message):
            parse_otm(text)

    def test_comments(self):
        spec = parse_otm(HEADER + "# nothing\ntrans a 1 0 0 R z  # move on\n")
        assert len(spec.transitions) == 1


class TestValidate:
    def test_nondeterminism(self):
        with pytest.raises(OtmError, match="two transitions"):
            parse_otm(HEADER + "trans a 1 0 0 R z\ntrans a 1 0 1 R z\n")

    def test_one_tape_per_state(self):
        with pytest.raises(OtmError, match="tapes"):
            parse_otm(HEADER + "trans a 1 0 0 R z\ntrans a 2 1 1 R z\n")

    def test_final_state_has_no_transitions(self):
        with pytest.raises(OtmError, match="final"):
            parse_otm(HEADER + "trans z 1 0 0 R a\n")

    def test_query_state_has_no_transitions(self):
        with pytest.raises(OtmError, match="query state"):
            parse_otm(HEADER + "query q\nanswer r\ntrans q 1 0 0 R z\n")

    def test_special_states_are_distinct(self):
        with pytest.raises(OtmError, match="distinct"):
            parse_otm(HEADER + "query z\nanswer r\n")

    def test_unreachable_states_warn(self):
        spec = parse_otm(HEADER + "trans a 1 0 0 R z\ntrans lost 1 0 0 R z\n")
        assert validate(spec) == ["state lost is unreachable"]

    def test_unreachable_final(self):
        spec = parse_otm(HEADER + "trans a 1 0 0 R a\n")
        assert "final state z is unreachable from a" in validate(spec)


class TestTape:
    def test_head_and_content(self):
        tape = Tape(('1',), ('0', '1', 'B', '1'))
        assert tape.head == '0'
        assert tape.content() == '01'
        assert Tape().head == 'B'
        assert str(tape) == "1#01B1"

    def test_normalized_strips_trailing_blanks(self):
        assert Tape((), ('1', 'B', 'B')).normalized() == Tape((), ('1',))


class TestRun:
    def test_identity(self, identity_otm):
        run = otm_run(identity_otm, None, '0110')
        assert run.output == '0110'
        assert run.steps == 0

    @pytest.mark.parametrize("word, flipped", [("", ""), ("1", "0"), ("01", "10"), ("0011", "1100")])
    def test_bitflip(self, bitflip_otm, word, flipped):
        run = otm_run(bitflip_otm, None, word)
        assert run.output == flipped
        assert run.steps == (2 * len(word) + 2 if word else 2)

    @pytest.mark.parametrize("word, answer", [("", "1"), ("10", ""), ("011", "0110")])
    def test_onequery(self, onequery_otm, word, answer):
        table = OracleTable({word: answer})
        run = otm_run(onequery_otm, table, word)
        assert run.output == answer
        assert run.queries == [word]
        assert run.steps == 3 * len(word) + 3 * len(answer) + 8

    def test_oracle_miss(self, onequery_otm):
        with pytest.raises(OracleMissError):
            otm_run(onequery_otm, OracleTable({}), '1')

    def test_no_table(self, onequery_otm):
        with pytest.raises(OtmError, match="no oracle table"):
            otm_run(onequery_otm, None, '1')

    def test_budget(self, bitflip_otm):
        with pytest.raises(BudgetExhausted):
            otm_run(bitflip_otm, None, '0101', max_steps=3)

    def test_stuck(self):
        spec = parse_otm(HEADER + "trans a 1 0 0 R z\n")
        with pytest.raises(StuckMachine):
            otm_run(spec, None, '1')

    def test_left_end_stays(self):
        spec = parse_otm(HEADER + "trans a 1 1 0 L z\n")
        config = otm_step(spec, None, initial_config(spec, '11'))
        assert config.tapes[0] == Tape((), ('0', '1'))

    def test_configs_are_kept_on_request(self, bitflip_otm):
        run = otm_run(bitflip_otm, None, '1', keep_configs=True)
        assert len(run.configs) == run.steps + 1
        assert run.configs[0] == initial_config(bitflip_otm, '1')
        assert run.configs[-1].state == 'end'


class TestEncoding:
    def test_round_trip(self, bitflip_otm):
        run = otm_run(bitflip_otm, None, '0110', keep_configs=True)
        for config in run.configs:
            assert decode_config(encode_config(config)) == config

    def test_blank_symbols(self):
        config = OtmConfig('q', (Tape(('B', '1'), ('0', 'B')), Tape(), Tape((), ('1',))))
        term = encode_config(config)
        assert str(term.type) == 'config'
        assert decode_config(term) == config

    def test_rejects_other_terms(self):
        with pytest.raises(OtmError):
            decode_config(encode_word('01'))
