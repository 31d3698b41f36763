#!/usr/bin/env python3
"""Tests for the command-line tools: output format and exit codes."""

import pytest

from src.sopoly import load_otab
from src.strs import encode_word
from src.terms import format_term
from tools.cstuple import EXIT_BUDGET, EXIT_FAILED, EXIT_INPUT, EXIT_OK, FORMAT_HEADER, main
from tools.make_oracle_table import all_words
from tools.make_oracle_table import main as make_table


def run_cli(capsys, *argv: str) -> tuple[int, list[str]]:
    code = main(list(argv))
    lines = capsys.readouterr().out.splitlines()
    if lines:
        assert lines[0] == FORMAT_HEADER
    return code, lines[1:]


def value(lines: list[str], key: str) -> str:
    return next(line.split(' ', 1)[1] for line in lines if line.split(' ', 1)[0] == key)


class TestCheck:
    def test_printed_arith_is_falsified(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'check', str(samples_dir / 'arith.strs'),
                              str(samples_dir / 'arith.csi'), '--budget', '200')
        assert code == EXIT_FAILED
        assert lines[3].startswith("rule 4 falsified cost lhs=5 rhs=5 (needs lhs > rhs)")
        assert value(lines, 'overall').startswith("falsified cost")

    def test_corrected_arith_passes(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'check', str(samples_dir / 'arith.strs'),
                              str(samples_dir / 'arith_fixed.csi'), '--budget', '200')
        assert code == EXIT_OK
        assert lines[0] == "rule 1 tested 200"

    def test_certify_mode(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'check', str(samples_dir / 'arith.strs'),
                              str(samples_dir / 'arith_fixed.csi'), '--mode', 'certify')
        assert code == EXIT_OK
        assert lines[0] == "rule 1 certified"

    def test_poly_bounded(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'check', str(samples_dir / 'sumf.strs'),
                              str(samples_dir / 'sumf.csi'), '--budget', '100', '--main', 'start')
        assert code == EXIT_OK
        assert "poly-bounded yes" in lines
        assert value(lines, 'mu') == '1'
        assert value(lines, 'nu') == '0'

    def test_not_poly_bounded(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'check', str(samples_dir / 'arith.strs'),
                              str(samples_dir / 'arith_fixed.csi'), '--budget', '50', '--main', 'add')
        assert code == EXIT_FAILED
        assert "poly-bounded no" in lines
        assert any(line.startswith("reason ") for line in lines)

    def test_table_goes_to_stderr(self, capsys, samples_dir):
        main(['check', str(samples_dir / 'arith.strs'), str(samples_dir / 'arith.csi'),
              '--budget', '50', '--table'])
        captured = capsys.readouterr()
        assert "Rule verdicts" in captured.err
        assert "Rule verdicts" not in captured.out

    def test_missing_file(self, capsys, tmp_path, samples_dir):
        code, _ = run_cli(capsys, 'check', str(tmp_path / 'nope.strs'), str(samples_dir / 'arith.csi'))
        assert code == EXIT_INPUT


class TestRun:
    TERM = "add (s (s 0)) (s (s (s 0)))"

    def test_term_strategy_with_trace(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'run', str(samples_dir / 'arith.strs'), self.TERM, '--trace')
        assert code == EXIT_OK
        assert value(lines, 'normal-form') == "s (s (s (s (s 0))))"
        assert value(lines, 'steps') == '3'
        assert value(lines, 'max-nodes') == '15'
        assert [line for line in lines if line.startswith('trace')][0] == "trace 1 # r2 15 15"

    def test_graph_strategy(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'run', str(samples_dir / 'arith.strs'), self.TERM, '--strategy', 'graph')
        assert code == EXIT_OK
        assert value(lines, 'normal-form') == "s (s (s (s (s 0))))"
        assert value(lines, 'steps') == '3'

    def test_budget(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'run', str(samples_dir / 'arith.strs'), self.TERM, '--max-steps', '1')
        assert code == EXIT_BUDGET
        assert value(lines, 'steps') == '1'

    def test_unknown_symbol(self, capsys, samples_dir):
        code, _ = run_cli(capsys, 'run', str(samples_dir / 'arith.strs'), "sub 0 0")
        assert code == EXIT_INPUT

    def test_oracle_symbol_with_table(self, capsys, samples_dir, tmp_path):
        table = tmp_path / 't.otab'
        table.write_text("0 -> 11\n")
        code, lines = run_cli(capsys, 'run', str(samples_dir / 'sumf.strs'), "S_f (o :: [])", '--oracle', str(table))
        assert code == EXIT_OK
        assert value(lines, 'normal-form') == format_term(encode_word('11'))
        assert value(lines, 'steps') == '1'

    def test_oracle_symbol_needs_a_table(self, capsys, samples_dir):
        code, _ = run_cli(capsys, 'run', str(samples_dir / 'sumf.strs'), "S_f (o :: [])")
        assert code == EXIT_INPUT


class TestCompute:
    def test_sum(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'compute', str(samples_dir / 'sumf.strs'), '--main', 'start',
                              '--input', '0000', '--oracle', str(samples_dir / 'sumf.otab'))
        assert code == EXIT_OK
        assert value(lines, 'output') == '1101'
        assert value(lines, 'oracle-calls') == '4'
        assert value(lines, 'max-query') == '2'

    def test_monitor(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'compute', str(samples_dir / 'sumf.strs'), '--main', 'start',
                              '--input', '0000', '--oracle', str(samples_dir / 'sumf.otab'),
                              '--monitor', str(samples_dir / 'sumf.csi'))
        assert code == EXIT_OK
        assert value(lines, 'monitor') == 'ok'
        assert value(lines, 'b') == '4'

    def test_empty_input(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'compute', str(samples_dir / 'sumf.strs'), '--main', 'start',
                              '--input', '_', '--oracle', str(samples_dir / 'sumf.otab'))
        assert code == EXIT_OK
        assert value(lines, 'output') == '_'

    def test_oracle_miss(self, capsys, samples_dir):
        code, _ = run_cli(capsys, 'compute', str(samples_dir / 'sumf.strs'), '--main', 'start',
                          '--input', '00000', '--oracle', str(samples_dir / 'sumf.otab'))
        assert code == EXIT_INPUT

    def test_oracle_default_fills_misses(self, capsys, samples_dir):
        code, _ = run_cli(capsys, 'compute', str(samples_dir / 'sumf.strs'), '--main', 'start',
                          '--input', '00000', '--oracle', str(samples_dir / 'sumf.otab'),
                          '--oracle-default', '1')
        assert code == EXIT_OK

    def test_budget(self, capsys, samples_dir):
        code, _ = run_cli(capsys, 'compute', str(samples_dir / 'sumf.strs'), '--main', 'start',
                          '--input', '0000', '--oracle', str(samples_dir / 'sumf.otab'), '--max-steps', '5')
        assert code == EXIT_BUDGET

    def test_non_word_result(self, capsys, tmp_path):
        path = tmp_path / 'junk.strs'
        path.write_text(
            "sort bit\nsort word\ncons o : bit\ncons i : bit\ncons [] : word\n"
            "cons :: : bit -> word -> word\ncons junk : word -> word\n"
            "fn main : (word -> word) -> word -> word\nrule main F x -> junk x\n"
        )
        code, _ = run_cli(capsys, 'compute', str(path), '--main', 'main', '--input', '1')
        assert code == EXIT_FAILED

    def test_bad_input_word(self, samples_dir):
        with pytest.raises(SystemExit):
            main(['compute', str(samples_dir / 'sumf.strs'), '--input', '012'])


class TestMachines:
    def test_simulate(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'simulate-otm', str(samples_dir / 'bitflip.otm'), '--input', '0011')
        assert code == EXIT_OK
        assert value(lines, 'output') == '1100'
        assert value(lines, 'steps') == '10'
        assert value(lines, 'queries') == '0'

    def test_simulate_with_default_answer(self, capsys, samples_dir):
        code, lines = run_cli(capsys, 'simulate-otm', str(samples_dir / 'onequery.otm'),
                              '--input', '10', '--oracle-default', '1')
        assert code == EXIT_OK
        assert value(lines, 'output') == '1'
        assert value(lines, 'queries') == '1'

    def test_compile_then_compute(self, capsys, samples_dir, tmp_path):
        prefix = tmp_path / 'bitflip'
        code, lines = run_cli(capsys, 'compile-otm', str(samples_dir / 'bitflip.otm'),
                              '--poly', '2 * x + 5', '--out', str(prefix))
        assert code == EXIT_OK
        assert value(lines, 'strs') == str(prefix.with_suffix('.strs'))
        assert value(lines, 'states') == '7'

        code, lines = run_cli(capsys, 'compute', value(lines, 'strs'), '--input', '01')
        assert code == EXIT_OK
        assert value(lines, 'output') == '10'

    def test_bad_running_time(self, capsys, samples_dir, tmp_path):
        code, _ = run_cli(capsys, 'compile-otm', str(samples_dir / 'bitflip.otm'),
                          '--poly', 'y * 2', '--out', str(tmp_path / 'x'))
        assert code == EXIT_INPUT


class TestMakeOracleTable:
    def test_total_up_to_length(self, tmp_path):
        path = tmp_path / 'random.otab'
        assert make_table([str(path), '--max-query', '2', '--seed', '3']) == 0
        table = load_otab(path)
        assert set(table.mapping) == set(all_words(2))
        assert all(len(answer) <= 3 for answer in table.mapping.values())

    def test_seeded(self, tmp_path):
        first, second = tmp_path / 'a.otab', tmp_path / 'b.otab'
        make_table([str(first), '--seed', '8'])
        make_table([str(second), '--seed', '8'])
        assert first.read_text() == second.read_text()

    def test_empty_default(self, tmp_path):
        path = tmp_path / 'd.otab'
        make_table([str(path), '--max-query', '1', '--default', '_'])
        assert load_otab(path).default == ''
