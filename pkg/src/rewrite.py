"""Innermost term rewriting with built-in oracle steps.

The strategy is leftmost-innermost: the redex contracted is the first one in
post-order (function part before argument). Oracle symbols contract
`S_f <word>` to the encoded table answer in a single step.
"""

from dataclasses import dataclass, field
from typing import Optional

from src.config import MAX_STEPS
from src.logging_config import get_logger
from src.sopoly import OracleMissError, OracleTable
from src.strs import (
    Strs,
    SymbolKind,
    WORD,
    decode_word,
    encode_word,
    with_oracle,
)
from src.terms import (
    App,
    Arrow,
    Position,
    ROOT,
    Substitution,
    Sym,
    Term,
    apply_subst,
    format_position,
    format_term,
    match_term,
    replace_at,
    spine,
    subterm_at,
)

logger = get_logger(__name__)


class RewriteError(Exception):
    """Base exception for rewriting errors."""


class OracleError(RewriteError):
    """An oracle step could not be answered."""

    def __init__(self, message: str, query: Optional[str] = None):
        super().__init__(message)
        self.query = query


class BudgetExhausted(RewriteError):
    """The step budget ran out before a normal form was reached."""


class NonWordResult(RewriteError):
    """A type-2 computation ended in a normal form that is not a word."""


@dataclass(frozen=True)
class Redex:
    position: Position
    rule: Optional[int]  # 0-based rule number; None for oracle steps
    substitution: Substitution
    oracle: Optional[str] = None


@dataclass(frozen=True)
class OracleCall:
    symbol: str
    query: str
    answer: str


@dataclass(frozen=True)
class StepRecord:
    position: Position
    rule: Optional[int]
    oracle: Optional[OracleCall]
    nodes_before: int
    nodes_after: int

    @property
    def label(self) -> str:
        if self.oracle is not None:
            return f"oracle:{self.oracle.symbol}"
        assert self.rule is not None
        return f"r{self.rule + 1}"


@dataclass
class RunStats:
    steps: int = 0
    oracle_calls: int = 0
    max_query_len: int = 0
    max_nodes: int = 0
    normal_form: bool = False
    queries: list[str] = field(default_factory=list)


# ── Redex detection ──

def root_redex(strs: Strs, term: Term) -> Optional[Redex]:
    """Redex at the root of `term`, ignoring whether its arguments are normal."""
    head, args = spine(term)
    if not isinstance(head, Sym):
        return None
    decl = strs.signature.symbols.get(head.name)
    if decl is not None and decl.kind is SymbolKind.ORACLE:
        return Redex(ROOT, None, {}, head.name) if len(args) == 1 else None
    for number in strs.rules_for(head.name, len(args)):
        gamma = match_term(strs.rules[number].lhs, term)
        if gamma is not None:
            return Redex(ROOT, number, gamma)
    return None


def find_innermost_redex(strs: Strs, term: Term) -> Optional[Redex]:
    """First redex in post-order; None when `term` is a normal form."""
    return _find(strs, term, ROOT)


def _find(strs: Strs, term: Term, pos: Position) -> Optional[Redex]:
    if not isinstance(term, App):
        return None
    _, args = spine(term)
    for index, arg in enumerate(args):
        found = _find(strs, arg, pos + (1,) * (len(args) - 1 - index) + (2,))
        if found is not None:
            return found
    redex = root_redex(strs, term)
    if redex is None:
        return None
    return Redex(pos, redex.rule, redex.substitution, redex.oracle)


def _contract(strs: Strs, oracle: Optional[OracleTable], redex: Redex,
              term: Term) -> tuple[Term, Optional[OracleCall]]:
    """Contractum of `term`, the subterm at the redex position."""
    if redex.oracle is None:
        assert redex.rule is not None
        return apply_subst(redex.substitution, strs.rules[redex.rule].rhs), None
    _, args = spine(term)
    query = decode_word(args[0])
    if query is None:
        raise OracleError(f"oracle {redex.oracle} queried on non-word {format_term(args[0])}")
    if oracle is None:
        raise OracleError(f"no oracle table for {redex.oracle}", query)
    try:
        answer = oracle.lookup(query)
    except OracleMissError as e:
        raise OracleError(str(e), query) from e
    return encode_word(answer), OracleCall(redex.oracle, query, answer)


def step(strs: Strs, oracle: Optional[OracleTable],
         term: Term) -> Optional[tuple[Term, StepRecord]]:
    """One leftmost-innermost step, or None at a normal form."""
    redex = find_innermost_redex(strs, term)
    if redex is None:
        return None
    before = subterm_at(term, redex.position)
    contractum, call = _contract(strs, oracle, redex, before)
    result = replace_at(term, redex.position, contractum)
    return result, StepRecord(redex.position, redex.rule, call, term.size, result.size)


# ── Normalization ──

class _Exhausted(Exception):
    def __init__(self, partial: Term):
        self.partial = partial


class _Run:
    """Recursive leftmost-innermost normalizer.

    Arguments are normalized left to right before the root is tried, which
    contracts exactly the redexes repeated `step` calls would, in the same order.
    """

    def __init__(self, strs: Strs, oracle: Optional[OracleTable], max_steps: int,
                 record: bool, total: int):
        self.strs = strs
        self.oracle = oracle
        self.max_steps = max_steps
        self.record = record
        self.trace: list[StepRecord] = []
        self.stats = RunStats(max_nodes=total)
        self.total = total
        self.normal: dict[int, Term] = {}

    def normalize(self, term: Term, pos: Position) -> Term:
        while True:
            if id(term) in self.normal or not isinstance(term, App):
                return term
            head, args = spine(term)
            for index, arg in enumerate(args):
                try:
                    done = self.normalize(arg, pos + (1,) * (len(args) - 1 - index) + (2,))
                except _Exhausted as e:
                    raise _Exhausted(_rebuild(head, args[:index] + [e.partial] + args[index + 1:])) from None
                if done is not arg:
                    args[index] = done
                    term = _rebuild(head, args)
            redex = root_redex(self.strs, term)
            if redex is None:
                self.normal[id(term)] = term
                return term
            if self.stats.steps >= self.max_steps:
                raise _Exhausted(term)
            contractum, call = _contract(self.strs, self.oracle, redex, term)
            before = self.total
            self.total += contractum.size - term.size
            self.stats.steps += 1
            self.stats.max_nodes = max(self.stats.max_nodes, self.total)
            if call is not None:
                self.stats.oracle_calls += 1
                self.stats.max_query_len = max(self.stats.max_query_len, len(call.query))
                self.stats.queries.append(call.query)
            if self.record:
                self.trace.append(StepRecord(pos, redex.rule, call, before, self.total))
            term = contractum


def _rebuild(head: Term, args: list[Term]) -> Term:
    term = head
    for arg in args:
        assert isinstance(term.type, Arrow)
        term = App(term, arg, term.type.result)
    return term


def normalize(strs: Strs, oracle: Optional[OracleTable], term: Term,
              max_steps: int = MAX_STEPS,
              trace: bool = False) -> tuple[Term, list[StepRecord], RunStats]:
    """Reduce to normal form or until `max_steps`; the trace is kept only on request."""
    run = _Run(strs, oracle, max_steps, trace, term.size)
    try:
        result = run.normalize(term, ROOT)
        run.stats.normal_form = True
    except _Exhausted as e:
        result = e.partial
        logger.warning(f"Step budget of {max_steps} exhausted")
    logger.info(f"Normalized in {run.stats.steps} steps, max {run.stats.max_nodes} nodes")
    return result, run.trace, run.stats


def format_trace(trace: list[StepRecord]) -> list[str]:
    return [
        f"{number} {format_position(record.position)} {record.label} "
        f"{record.nodes_before} {record.nodes_after}"
        for number, record in enumerate(trace, start=1)
    ]


# ── Type-2 computation ──

def check_main_type(strs: Strs, main: str) -> Sym:
    decl = strs.signature.symbols.get(main)
    expected = Arrow(Arrow(WORD, WORD), Arrow(WORD, WORD))
    if decl is None:
        raise RewriteError(f"unknown main symbol {main}")
    if decl.type != expected:
        raise RewriteError(f"main symbol {main} has type {decl.type}, expected {expected}")
    return decl.term


def start_term(strs: Strs, main: str, word: str) -> tuple[Strs, Term]:
    """`main S_f <word>`, declaring the oracle symbol if the system has none."""
    strs, oracle_name = with_oracle(strs)
    head = check_main_type(strs, main)
    oracle_sym = strs.signature.sym(oracle_name)
    partial = App(head, oracle_sym, Arrow(WORD, WORD))
    return strs, App(partial, encode_word(word), WORD)


def compute_type2(strs: Strs, main: str, oracle: Optional[OracleTable], word: str,
                  max_steps: int = MAX_STEPS) -> tuple[str, RunStats]:
    strs, start = start_term(strs, main, word)
    result, _, stats = normalize(strs, oracle, start, max_steps)
    if not stats.normal_form:
        raise BudgetExhausted(f"no normal form within {max_steps} steps")
    output = decode_word(result)
    if output is None:
        raise NonWordResult(f"normal form is not a word: {format_term(result)}")
    return output, stats
