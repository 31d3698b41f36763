#!/usr/bin/env python3
"""Tests for term graph rewriting."""

import pytest

from src.graph import GraphError, TermGraph, contract, find_graph_redex, from_graph, normalize_graph, to_graph
from src.monitor import rule_graph_constant
from src.rewrite import OracleError, normalize, start_term
from src.sopoly import OracleTable, load_otab
from src.strs import NAT, decode_word, numeral, parse_term
from src.terms import format_term


def explode_term(explode, n: int):
    return parse_term(f"f ({format_term(numeral(n))}) leaf", explode.signature)


class TestTermGraph:
    def test_tree_round_trip(self, arith):
        term = parse_term("mult (s (s 0)) (add (s 0) 0)", arith.signature)
        graph = to_graph(term)
        assert len(graph) == term.size
        assert from_graph(graph) == term
        graph.check()

    def test_dump(self):
        graph = to_graph(numeral(1))
        assert graph.dump() == ["root 0", "0 @ 1 2", "1 s", "2 0"]

    def test_dot(self):
        dot = to_graph(numeral(1)).to_dot()
        assert dot.startswith("digraph term_graph {")
        assert '0 [label="@", shape = "doubleoctagon"];' in dot
        assert '0 -> 1 [label="1"];' in dot
        assert dot.endswith("}")

    def test_cycle_is_rejected(self):
        graph = TermGraph({0: '@', 1: 's'}, {0: (1, 0), 1: ()}, {0: NAT, 1: NAT}, 0, 2)
        assert not graph.is_acyclic()
        with pytest.raises(GraphError, match="cycle"):
            graph.check()

    def test_shared_vertices(self, explode):
        graph = to_graph(explode_term(explode, 1))
        assert graph.shared() == []
        redex = find_graph_redex(explode, graph)
        assert redex is not None
        contract(explode, graph, redex)
        # f 0 (c leaf leaf): both arguments of c are the same vertex
        shared = graph.shared()
        assert len(shared) == 1
        assert graph.labels[shared[0]] == 'leaf'
        assert graph.in_degrees()[shared[0]] == 2

    def test_garbage_collection(self):
        graph = to_graph(numeral(2))
        graph.root = graph.succ[0][1]
        assert graph.collect_garbage() == 2
        assert from_graph(graph) == numeral(1)


class TestGraphRewriting:
    @pytest.mark.parametrize("text", [
        "add (s (s 0)) (s 0)",
        "mult (s (s (s 0))) (add (s 0) (s 0))",
        "funcProd s (s (s 0)) (s 0)",
    ])
    def test_agrees_with_term_rewriting(self, arith, text):
        term = parse_term(text, arith.signature)
        expected, _, term_stats = normalize(arith, None, term)
        graph, stats = normalize_graph(arith, None, to_graph(term))
        assert stats.normal_form
        assert from_graph(graph) == expected
        assert stats.steps == term_stats.steps

    def test_contract_in_place(self, arith):
        graph = to_graph(parse_term("s (add 0 (s 0))", arith.signature))
        redex = find_graph_redex(arith, graph)
        assert redex is not None
        assert contract(arith, graph, redex) is None
        assert from_graph(graph) == parse_term("s (s 0)", arith.signature)
        assert len(graph) == 5

    def test_innermost_redex_first(self, arith):
        term = parse_term("add (add 0 0) (s 0)", arith.signature)
        graph = to_graph(term)
        redex = find_graph_redex(arith, graph)
        assert redex is not None
        assert redex.rule == 0
        assert redex.vertex != graph.root

    def test_explode_agrees_up_to_ten(self, explode):
        for n in range(11):
            term = explode_term(explode, n)
            expected, _, _ = normalize(explode, None, term)
            graph, stats = normalize_graph(explode, None, to_graph(term))
            assert stats.steps == n + 1
            assert from_graph(graph) == expected

    def test_explode_graph_stays_linear(self, explode):
        n = 30
        start = to_graph(explode_term(explode, n))
        initial = len(start)
        graph, stats = normalize_graph(explode, None, start)
        assert stats.normal_form
        assert stats.max_nodes <= initial + rule_graph_constant(explode) * n
        # one c vertex and two applications per level, all sharing the level below
        assert len(graph) == 3 * n + 1

    def test_budget(self, explode):
        graph, stats = normalize_graph(explode, None, to_graph(explode_term(explode, 5)), max_steps=2)
        assert not stats.normal_form
        assert stats.steps == 2
        assert find_graph_redex(explode, graph) is not None

    def test_oracle_steps(self, sumf, samples_dir):
        table = load_otab(samples_dir / 'sumf.otab')
        system, start = start_term(sumf, 'start', '0000')
        expected, _, term_stats = normalize(system, table, start)
        graph, stats = normalize_graph(system, table, to_graph(start))
        assert decode_word(from_graph(graph)) == decode_word(expected)
        assert stats.oracle_calls == term_stats.oracle_calls == 4
        assert stats.max_query_len == 2
        assert any(stats.oracle_steps)

    def test_oracle_miss(self, sumf):
        system, start = start_term(sumf, 'start', '1')
        with pytest.raises(OracleError):
            normalize_graph(system, OracleTable({}), to_graph(start))
