"""Runtime monitors for derivation height, query length and graph size.

These replay concrete reductions and compare what happened against the
bounds an interpretation promises: total cost decreases on every step,
step counts stay below D(|f|,|w|), oracle queries stay below B(|f|,|w|),
and term graphs stay below x + D*(a + F(B)).
"""

from dataclasses import dataclass, field
from typing import Optional

from src.config import MAX_STEPS
from src.graph import normalize_graph, to_graph
from src.interp import CsInterp, InterpError, InterpEvaluator, check_poly_bounded
from src.logging_config import get_logger
from src.rewrite import OracleError, normalize, start_term, step
from src.sopoly import (
    OracleTable,
    build_B,
    build_D,
    build_graph_bound,
    eval_sopoly,
    format_poly,
    table_length,
)
from src.strs import SortOrder, Strs, decode_word
from src.terms import Base, Term, format_term

logger = get_logger(__name__)

# `b :: rest` is cons, the bit and two application vertices
VERTICES_PER_BIT = 4


class MonitorError(Exception):
    """Base exception for monitor errors."""


@dataclass
class BoundsReport:
    steps: int
    d_value: int
    max_query: int
    b_value: int
    ok: bool
    output: Optional[str] = None
    d_poly: str = ''
    b_poly: str = ''


def _length_fn(oracle: Optional[OracleTable]):
    if oracle is None:
        return lambda n: 0
    return lambda n: table_length(oracle, n)


def monitor_bounds(strs: Strs, interp: CsInterp, main: str, oracle: Optional[OracleTable],
                   word: str, max_steps: int = MAX_STEPS) -> BoundsReport:
    """Run `main S_f <word>` and compare steps with D and queries with B."""
    report = check_poly_bounded(interp, strs, main)
    if not report.ok:
        raise MonitorError(f"interpretation is not polynomially bounded: {'; '.join(report.failures)}")
    assert report.poly is not None and report.mu is not None and report.nu is not None
    d_poly = build_D(report.poly, report.mu, report.nu)
    b_poly = build_B(report.poly, report.mu, report.nu)

    system, start = start_term(strs, main, word)
    result, _, stats = normalize(system, oracle, start, max_steps)
    length = _length_fn(oracle)
    d_value = eval_sopoly(d_poly, length, len(word))
    b_value = eval_sopoly(b_poly, length, len(word))
    ok = stats.normal_form and stats.steps <= d_value and stats.max_query_len <= b_value
    if not ok:
        logger.warning(
            f"Bound violated on {word!r}: steps {stats.steps} vs D {d_value}, "
            f"query {stats.max_query_len} vs B {b_value}"
        )
    return BoundsReport(
        steps=stats.steps,
        d_value=d_value,
        max_query=stats.max_query_len,
        b_value=b_value,
        ok=ok,
        output=decode_word(result),
        d_poly=format_poly(d_poly),
        b_poly=format_poly(b_poly),
    )


# ── Stepwise compatibility ──

@dataclass
class CompatibilityReport:
    steps: int = 0
    violations: list[str] = field(default_factory=list)
    start_cost: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def check_run_compatibility(strs: Strs, interp: CsInterp, start: Term,
                            max_steps: int = MAX_STEPS) -> CompatibilityReport:
    """Replay the innermost reduction of a ground oracle-free term step by step.

    Each step must strictly lower totalcost' and must not raise the size
    (for a term of ascending sort, must not lower it).
    """
    evaluator = InterpEvaluator(interp, strs)
    ascending = isinstance(start.type, Base) and strs.signature.sort_order(start.type) is SortOrder.ASC
    try:
        current = evaluator.evaluate(start, {}, {})
    except InterpError as e:
        raise MonitorError(f"cannot interpret {format_term(start)}: {e}") from e
    report = CompatibilityReport(start_cost=int(current.total_prime))
    term = start
    while report.steps < max_steps:
        try:
            stepped = step(strs, None, term)
        except OracleError as e:
            raise MonitorError(f"oracle steps cannot be replayed against an interpretation: {e}") from e
        if stepped is None:
            return report
        term, record = stepped
        report.steps += 1
        after = evaluator.evaluate(term, {}, {})
        if not after.total_prime < current.total_prime:
            report.violations.append(
                f"step {report.steps} ({record.label}): totalcost' {current.total_prime} -> {after.total_prime}"
            )
        grew = after.size < current.size if ascending else after.size > current.size
        if grew:
            report.violations.append(
                f"step {report.steps} ({record.label}): size {current.size} -> {after.size}"
            )
        current = after
    logger.warning(f"Compatibility replay stopped after {max_steps} steps")
    return report


def derivation_height_ok(strs: Strs, interp: CsInterp, start: Term,
                         max_steps: int = MAX_STEPS) -> bool:
    """Steps to normal form never exceed totalcost' of the start term."""
    bound = InterpEvaluator(interp, strs).evaluate(start, {}, {}).total_prime
    _, _, stats = normalize(strs, None, start, min(max_steps, int(bound) + 1))
    return stats.normal_form and stats.steps <= bound


# ── Graph sizes ──

def rule_graph_constant(strs: Strs) -> int:
    """Largest right-hand side graph; bounds vertex growth per contraction."""
    return max((rule.rhs.size for rule in strs.rules), default=0)


@dataclass
class GraphBoundReport:
    max_nodes: int
    bound: int
    steps: int
    ok: bool
    growth_ok: bool


def graph_size_bound(strs: Strs, interp: CsInterp, main: str, oracle: Optional[OracleTable],
                     word: str, max_steps: int = MAX_STEPS) -> GraphBoundReport:
    """Run the graph engine on `main S_f <word>` against x + D(F,x)*(a + F(B(F,x)))."""
    report = check_poly_bounded(interp, strs, main)
    if not report.ok:
        raise MonitorError(f"interpretation is not polynomially bounded: {'; '.join(report.failures)}")
    assert report.poly is not None and report.mu is not None and report.nu is not None
    a = rule_graph_constant(strs)
    poly = build_graph_bound(report.poly, report.mu, report.nu, a, scale=VERTICES_PER_BIT)

    system, start = start_term(strs, main, word)
    graph = to_graph(start)
    # x stands for |w|; the start graph itself is larger than that
    bound = eval_sopoly(poly, _length_fn(oracle), len(word)) - len(word) + len(graph)
    graph, stats = normalize_graph(system, oracle, graph, max_steps)
    growth_ok = all(
        after - before <= a
        for before, after, by_oracle in zip(stats.node_counts, stats.node_counts[1:], stats.oracle_steps)
        if not by_oracle
    )
    ok = stats.max_nodes <= bound and growth_ok
    logger.info(f"Graph run: {stats.steps} steps, max {stats.max_nodes} vertices, bound {bound}")
    return GraphBoundReport(stats.max_nodes, bound, stats.steps, ok, growth_ok)

