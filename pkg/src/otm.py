"""Three-tape oracle Turing machines over {0, 1, B}.

Tape 1 holds input and output, tape 2 the query and tape 3 the answer. A
tape is stored as a reversed left part and a right part whose first symbol is
under the head; blanks past either end are implicit.

The `.otm` format:

    start init
    final end
    query query
    answer answer
    trans c 1 0 B R w0          # from tape read write move to
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from src.config import MAX_STEPS
from src.logging_config import get_logger
from src.rewrite import BudgetExhausted
from src.sopoly import OracleTable
from src.strs import BIT_I, BIT_O, BLANK, CONS, NIL, WORD
from src.terms import App, Arrow, Base, Sym, Term, arrow, spine

logger = get_logger(__name__)

SYMBOLS = ('0', '1', 'B')
MOVES = ('L', 'R')


class OtmError(Exception):
    """Base exception for machine errors."""


class StuckMachine(OtmError):
    """No transition is enabled in a non-final state."""


@dataclass(frozen=True)
class Transition:
    source: str
    tape: int
    read: str
    write: str
    move: str
    target: str
    line: int = 0

    def __str__(self) -> str:
        return f"trans {self.source} {self.tape} {self.read} {self.write} {self.move} {self.target}"


@dataclass
class OtmSpec:
    start: str
    final: str
    query: Optional[str] = None
    answer: Optional[str] = None
    transitions: list[Transition] = field(default_factory=list)

    @property
    def states(self) -> list[str]:
        """Every named state, in order of first mention."""
        seen: dict[str, None] = {}
        for state in (self.start, self.final, self.query, self.answer):
            if state is not None:
                seen.setdefault(state, None)
        for t in self.transitions:
            seen.setdefault(t.source, None)
            seen.setdefault(t.target, None)
        return list(seen)

    def transition(self, state: str, tape: int, read: str) -> Optional[Transition]:
        for t in self.transitions:
            if t.source == state and t.tape == tape and t.read == read:
                return t
        return None

    def tape_of(self, state: str) -> Optional[int]:
        return next((t.tape for t in self.transitions if t.source == state), None)


def parse_otm(text: str) -> OtmSpec:
    named: dict[str, str] = {}
    transitions: list[Transition] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split('#', 1)[0].split()
        if not fields:
            continue
        keyword = fields[0]
        if keyword in ('start', 'final', 'query', 'answer'):
            if len(fields) != 2:
                raise OtmError(f"line {number}: expected '{keyword} <state>'")
            if keyword in named:
                raise OtmError(f"line {number}: second {keyword} state")
            named[keyword] = fields[1]
        elif keyword == 'trans':
            if len(fields) != 7:
                raise OtmError(f"line {number}: expected 'trans <from> <tape> <read> <write> <move> <to>'")
            _, source, tape, read, write, move, target = fields
            if tape not in ('1', '2', '3'):
                raise OtmError(f"line {number}: tape must be 1, 2 or 3, got {tape}")
            if read not in SYMBOLS or write not in SYMBOLS:
                raise OtmError(f"line {number}: tape symbols are 0, 1 and B")
            if move not in MOVES:
                raise OtmError(f"line {number}: move must be L or R, got {move}")
            transitions.append(Transition(source, int(tape), read, write, move, target, number))
        else:
            raise OtmError(f"line {number}: unknown declaration {keyword!r}")
    for required in ('start', 'final'):
        if required not in named:
            raise OtmError(f"missing {required} state")
    if ('query' in named) != ('answer' in named):
        raise OtmError("query and answer states must be declared together")
    spec = OtmSpec(named['start'], named['final'], named.get('query'), named.get('answer'), transitions)
    for warning in validate(spec):
        logger.warning(warning)
    return spec


def load_otm(path: Path) -> OtmSpec:
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise OtmError(f"cannot read {path}: {e}") from e
    return parse_otm(text)


def validate(spec: OtmSpec) -> list[str]:
    """Raise on nondeterministic or malformed machines; return warnings."""
    special = [s for s in (spec.final, spec.query, spec.answer) if s is not None]
    if len(set(special)) != len(special):
        raise OtmError("final, query and answer states must be distinct")
    tapes: dict[str, int] = {}
    reads: set[tuple[str, str]] = set()
    for t in spec.transitions:
        if t.source == spec.final:
            raise OtmError(f"line {t.line}: transition out of final state {t.source}")
        if t.source == spec.query:
            raise OtmError(f"line {t.line}: query state {t.source} only takes the oracle step")
        if tapes.setdefault(t.source, t.tape) != t.tape:
            raise OtmError(f"line {t.line}: state {t.source} acts on tapes {tapes[t.source]} and {t.tape}")
        if (t.source, t.read) in reads:
            raise OtmError(f"line {t.line}: state {t.source} has two transitions reading {t.read}")
        reads.add((t.source, t.read))

    warnings = []
    reachable = {spec.start}
    frontier = [spec.start]
    while frontier:
        state = frontier.pop()
        successors = [t.target for t in spec.transitions if t.source == state]
        if state == spec.query and spec.answer is not None:
            successors.append(spec.answer)
        for target in successors:
            if target not in reachable:
                reachable.add(target)
                frontier.append(target)
    if spec.final not in reachable:
        warnings.append(f"final state {spec.final} is unreachable from {spec.start}")
    for state in spec.states:
        if state not in reachable:
            warnings.append(f"state {state} is unreachable")
    return warnings


# ── Configurations ──

@dataclass(frozen=True)
class Tape:
    left: tuple[str, ...] = ()
    right: tuple[str, ...] = ()

    @property
    def head(self) -> str:
        return self.right[0] if self.right else 'B'

    def content(self) -> str:
        """Symbols from the head up to the first blank."""
        out = []
        for symbol in self.right:
            if symbol == 'B':
                break
            out.append(symbol)
        return ''.join(out)

    def normalized(self) -> 'Tape':
        return Tape(self.left, _strip_blanks(self.right))

    def __str__(self) -> str:
        return ''.join(reversed(self.left)) + '#' + ''.join(self.right)


def _strip_blanks(symbols: tuple[str, ...]) -> tuple[str, ...]:
    end = len(symbols)
    while end and symbols[end - 1] == 'B':
        end -= 1
    return symbols[:end]


@dataclass(frozen=True)
class OtmConfig:
    state: str
    tapes: tuple[Tape, Tape, Tape]

    def normalized(self) -> 'OtmConfig':
        return OtmConfig(self.state, tuple(t.normalized() for t in self.tapes))  # type: ignore[arg-type]

    def __str__(self) -> str:
        return f"({self.state}, {', '.join(str(t) for t in self.tapes)})"


def initial_config(spec: OtmSpec, word: str) -> OtmConfig:
    return OtmConfig(spec.start, (Tape((), tuple(word)), Tape(), Tape()))


def _move(tape: Tape, write: str, move: str) -> Tape:
    rest = tape.right[1:]
    if move == 'R':
        return Tape((write,) + tape.left, rest)
    if not tape.left:
        # left end: write and stay
        return Tape((), (write,) + rest)
    return Tape(tape.left[1:], (tape.left[0], write) + rest)


def otm_step(spec: OtmSpec, oracle: Optional[OracleTable], config: OtmConfig) -> OtmConfig:
    if config.state == spec.final:
        raise OtmError(f"no step from final state {spec.final}")
    if config.state == spec.query:
        assert spec.answer is not None
        query = config.tapes[1].content()
        if oracle is None:
            raise OtmError(f"no oracle table for query {query!r}")
        answer = oracle.lookup(query)
        logger.debug(f"Oracle query {query!r} -> {answer!r}")
        return OtmConfig(spec.answer, (config.tapes[0], Tape(), Tape((), tuple(answer))))

    tape_no = spec.tape_of(config.state)
    transition = None
    if tape_no is not None:
        transition = spec.transition(config.state, tape_no, config.tapes[tape_no - 1].head)
    if transition is None:
        raise StuckMachine(f"no transition from {config}")
    tape = config.tapes[tape_no - 1]
    if transition.move == 'L' and not tape.left:
        logger.warning(f"{transition} moves left at the left end of tape {tape_no}")
    tapes = list(config.tapes)
    tapes[tape_no - 1] = _move(tape, transition.write, transition.move)
    return OtmConfig(transition.target, (tapes[0], tapes[1], tapes[2]))


@dataclass
class OtmRun:
    output: str
    steps: int
    queries: list[str] = field(default_factory=list)
    configs: list[OtmConfig] = field(default_factory=list)


def otm_run(spec: OtmSpec, oracle: Optional[OracleTable], word: str,
            max_steps: int = MAX_STEPS, keep_configs: bool = False) -> OtmRun:
    """Run to the final state; the output is tape 1 from the head to the first blank."""
    config = initial_config(spec, word)
    run = OtmRun('', 0)
    if keep_configs:
        run.configs.append(config)
    while config.state != spec.final:
        if run.steps >= max_steps:
            raise BudgetExhausted(f"machine did not halt within {max_steps} steps")
        if config.state == spec.query:
            run.queries.append(config.tapes[1].content())
        config = otm_step(spec, oracle, config)
        run.steps += 1
        if keep_configs:
            run.configs.append(config)
    run.output = config.tapes[0].content()
    logger.info(f"Machine halted after {run.steps} steps with {len(run.queries)} queries")
    return run


# ── Term encoding ──

LEFT = Base('left')
RIGHT = Base('right')
TAPE = Base('tape')
CONFIG = Base('config')
L_SYM = Sym('L', Arrow(WORD, LEFT))
R_SYM = Sym('R', Arrow(WORD, RIGHT))
SPLIT = Sym('split', arrow(LEFT, RIGHT, TAPE))
STATE_TYPE = arrow(TAPE, TAPE, TAPE, CONFIG)

_SYMBOL_TERMS = {'0': BIT_O, '1': BIT_I, 'B': BLANK}
_TERM_SYMBOLS = {term.name: symbol for symbol, term in _SYMBOL_TERMS.items()}


def state_symbol(state: str) -> Sym:
    return Sym(f"q_{state}", STATE_TYPE)


def _encode_list(symbols: tuple[str, ...]) -> Term:
    term: Term = NIL
    for symbol in reversed(symbols):
        term = App(App(CONS, _SYMBOL_TERMS[symbol], Arrow(WORD, WORD)), term, WORD)
    return term


def encode_tape(tape: Tape) -> Term:
    left = App(L_SYM, _encode_list(tape.left), LEFT)
    right = App(R_SYM, _encode_list(tape.right), RIGHT)
    return App(App(SPLIT, left, Arrow(RIGHT, TAPE)), right, TAPE)


def encode_config(config: OtmConfig) -> Term:
    term: Term = state_symbol(config.state)
    remaining = STATE_TYPE
    for tape in config.tapes:
        assert isinstance(remaining, Arrow)
        remaining = remaining.result
        term = App(term, encode_tape(tape), remaining)
    return term


def _decode_list(term: Term) -> tuple[str, ...]:
    symbols = []
    while True:
        head, args = spine(term)
        if head == NIL and not args:
            return tuple(symbols)
        if not (isinstance(head, Sym) and head.name == 'cons' and len(args) == 2):
            raise OtmError(f"not a tape list: {term}")
        bit = args[0]
        if not isinstance(bit, Sym) or bit.name not in _TERM_SYMBOLS:
            raise OtmError(f"not a tape symbol: {bit}")
        symbols.append(_TERM_SYMBOLS[bit.name])
        term = args[1]


def decode_tape(term: Term) -> Tape:
    head, args = spine(term)
    if head != SPLIT or len(args) != 2:
        raise OtmError("tape term must be split (L ...) (R ...)")
    left_head, left_args = spine(args[0])
    right_head, right_args = spine(args[1])
    if left_head != L_SYM or right_head != R_SYM:
        raise OtmError("tape term must be split (L ...) (R ...)")
    return Tape(_decode_list(left_args[0]), _decode_list(right_args[0]))


def decode_config(term: Term) -> OtmConfig:
    head, args = spine(term)
    if not isinstance(head, Sym) or not head.name.startswith('q_') or len(args) != 3:
        raise OtmError("configuration term must be q_<state> applied to three tapes")
    t1, t2, t3 = (decode_tape(arg) for arg in args)
    return OtmConfig(head.name[2:], (t1, t2, t3))

