"""Second-order simply-typed term rewriting systems.

Parses the line-oriented `.strs` format into a type-checked `Strs`, checks
innermost orthogonality, and converts between words/numerals and terms.

Format (one declaration per line, `#` starts a comment):

    sort nat                      # descending (N, >=) by default
    sort nnat asc                 # ascending (N, <=)
    cons 0 : nat
    cons s : nat -> nat
    fn add : nat -> nat -> nat
    oracle S_f : word -> word
    rule add (s x) y -> s (add x y)

Undeclared identifiers in rules are variables; their types come from their
lhs position. `[]`, `a :: b` and `a +B b` are sugar for `nil`, `cons a b`
and `addB a b`.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Union

from src.logging_config import get_logger
from src.terms import (
    App,
    Arrow,
    Base,
    SimpleType,
    Substitution,
    Sym,
    Term,
    TermError,
    Var,
    apply,
    arity,
    arrow,
    format_term,
    order,
    rename_apart,
    spine,
    unify,
    variable_positions,
)

logger = get_logger(__name__)


class StrsError(Exception):
    """Base exception for .strs parsing and type errors."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ''
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else '') + ': '
        super().__init__(f"{where}{message}")


class SortOrder(Enum):
    DESC = 'desc'
    ASC = 'asc'


class SymbolKind(Enum):
    CONSTRUCTOR = 'cons'
    DEFINED = 'fn'
    ORACLE = 'oracle'


# Infix and bracket sugar; also accepted as declaration names.
SUGAR_NAMES = {'::': 'cons', '[]': 'nil', '+B': 'addB'}


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    type: SimpleType
    kind: SymbolKind

    @property
    def term(self) -> Sym:
        return Sym(self.name, self.type)


@dataclass(frozen=True)
class Signature:
    sorts: dict[str, SortOrder]
    symbols: dict[str, SymbolDecl]

    def sym(self, name: str) -> Sym:
        try:
            return self.symbols[SUGAR_NAMES.get(name, name)].term
        except KeyError:
            raise StrsError(f"unknown symbol {name}") from None

    def kind(self, name: str) -> SymbolKind:
        return self.symbols[name].kind

    def sort_order(self, sort: Union[str, Base]) -> SortOrder:
        name = sort.name if isinstance(sort, Base) else sort
        return self.sorts.get(name, SortOrder.DESC)

    def oracle_symbols(self) -> list[str]:
        return [name for name, decl in self.symbols.items() if decl.kind is SymbolKind.ORACLE]


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    line: Optional[int] = None

    @property
    def head(self) -> str:
        head, _ = spine(self.lhs)
        assert isinstance(head, Sym)
        return head.name

    @property
    def nargs(self) -> int:
        return len(spine(self.lhs)[1])

    def __str__(self) -> str:
        return f"{format_term(self.lhs)} -> {format_term(self.rhs)}"


@dataclass(frozen=True)
class Strs:
    """A type-checked system; `index` maps (head, argument count) to rule numbers."""
    signature: Signature
    rules: tuple[Rule, ...]
    index: dict[tuple[str, int], tuple[int, ...]] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        index: dict[tuple[str, int], list[int]] = {}
        for number, rule in enumerate(self.rules):
            index.setdefault((rule.head, rule.nargs), []).append(number)
        object.__setattr__(self, 'index', {key: tuple(value) for key, value in index.items()})

    def rules_for(self, head: str, nargs: int) -> tuple[int, ...]:
        return self.index.get((head, nargs), ())


# ── Tokenizer ──

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<cons>::)|(?P<addb>\+B)|(?P<nil>\[\])"
    r"|(?P<punct>[():])|(?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*))"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str, line: int, offset: int = 0) -> list[Token]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.lastgroup is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise StrsError(f"unexpected character {text[bad]!r}", line, offset + bad + 1)
        kind = match.lastgroup
        value = match.group(kind)
        tokens.append(Token(kind, value, offset + match.start(kind) + 1))
        pos = match.end()
    return tokens


class _Cursor:
    def __init__(self, tokens: list[Token], line: int):
        self.tokens = tokens
        self.pos = 0
        self.line = line

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> Token:
        token = self.peek()
        if token is None:
            end = self.tokens[-1].column + len(self.tokens[-1].text) if self.tokens else 1
            raise StrsError("unexpected end of line", self.line, end)
        self.pos += 1
        return token

    def expect(self, text: str) -> Token:
        token = self.next()
        if token.text != text:
            raise StrsError(f"expected {text!r}, found {token.text!r}", self.line, token.column)
        return token

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)


# ── Types ──

def _parse_type(cursor: _Cursor, sorts: dict[str, SortOrder]) -> SimpleType:
    token = cursor.next()
    if token.text == '(':
        left = _parse_type(cursor, sorts)
        cursor.expect(')')
    elif token.kind == 'ident':
        if token.text not in sorts:
            raise StrsError(f"unknown sort {token.text}", cursor.line, token.column)
        left = Base(token.text)
    else:
        raise StrsError(f"expected a type, found {token.text!r}", cursor.line, token.column)
    following = cursor.peek()
    if following is not None and following.kind == 'arrow':
        cursor.next()
        return Arrow(left, _parse_type(cursor, sorts))
    return left


# ── Untyped term syntax ──

@dataclass(frozen=True)
class _Name:
    name: str
    column: int


@dataclass(frozen=True)
class _Apply:
    fn: '_Syntax'
    arg: '_Syntax'
    column: int


_Syntax = Union[_Name, _Apply]


def _parse_expr(cursor: _Cursor) -> _Syntax:
    """cons level: right-associative, lowest precedence."""
    left = _parse_addb(cursor)
    token = cursor.peek()
    if token is not None and token.kind == 'cons':
        cursor.next()
        right = _parse_expr(cursor)
        return _Apply(_Apply(_Name('cons', token.column), left, token.column), right, token.column)
    return left


def _parse_addb(cursor: _Cursor) -> _Syntax:
    left = _parse_application(cursor)
    while (token := cursor.peek()) is not None and token.kind == 'addb':
        cursor.next()
        right = _parse_application(cursor)
        left = _Apply(_Apply(_Name('addB', token.column), left, token.column), right, token.column)
    return left


def _parse_application(cursor: _Cursor) -> _Syntax:
    term = _parse_atom(cursor)
    while (token := cursor.peek()) is not None and (token.kind in ('ident', 'nil') or token.text == '('):
        term = _Apply(term, _parse_atom(cursor), token.column)
    return term


def _parse_atom(cursor: _Cursor) -> _Syntax:
    token = cursor.next()
    if token.text == '(':
        inner = _parse_expr(cursor)
        cursor.expect(')')
        return inner
    if token.kind == 'nil':
        return _Name('nil', token.column)
    if token.kind == 'ident':
        return _Name(token.text, token.column)
    raise StrsError(f"expected a term, found {token.text!r}", cursor.line, token.column)


def _syntax_spine(node: _Syntax) -> tuple[_Name, list[_Syntax]]:
    args: list[_Syntax] = []
    while isinstance(node, _Apply):
        args.append(node.arg)
        node = node.fn
    args.reverse()
    return node, args


# ── Typing ──

class _RuleTyper:
    def __init__(self, signature: Signature, line: int,
                 env: Optional[dict[str, SimpleType]] = None,
                 unbound: str = "variable {} not bound by lhs"):
        self.signature = signature
        self.line = line
        self.env: dict[str, SimpleType] = dict(env or {})
        self.unbound = unbound

    def _error(self, message: str, column: int) -> StrsError:
        return StrsError(message, self.line, column)

    def _check_not_sort(self, name: _Name) -> None:
        if name.name in self.signature.sorts and name.name not in self.signature.symbols:
            raise self._error(f"identifier {name.name} is a sort", name.column)

    def lhs(self, node: _Syntax, expected: Optional[SimpleType]) -> Term:
        head, args = _syntax_spine(node)
        self._check_not_sort(head)
        decl = self.signature.symbols.get(head.name)
        if decl is None:
            if expected is None:
                raise self._error(f"lhs head {head.name} is not a defined symbol", head.column)
            if args:
                raise self._error(f"variable {head.name} applied in lhs", head.column)
            bound = self.env.setdefault(head.name, expected)
            if bound != expected:
                raise self._error(
                    f"variable {head.name} used at types {bound} and {expected}", head.column
                )
            return Var(head.name, expected)
        if expected is None and decl.kind is not SymbolKind.DEFINED:
            raise self._error(f"lhs head {head.name} is not a defined symbol", head.column)
        if len(args) > arity(decl.type):
            raise self._error(f"{head.name} applied to too many arguments", head.column)
        term: Term = decl.term
        for arg in args:
            assert isinstance(term.type, Arrow)
            term = App(term, self.lhs(arg, term.type.arg), term.type.result)
        if expected is not None and term.type != expected:
            raise self._error(
                f"{head.name} has type {term.type} here, expected {expected}", head.column
            )
        return term

    def rhs(self, node: _Syntax) -> Term:
        if isinstance(node, _Apply):
            left = self.rhs(node.fn)
            right = self.rhs(node.arg)
            try:
                return apply(left, right)
            except TermError as e:
                raise self._error(str(e), node.column) from e
        self._check_not_sort(node)
        decl = self.signature.symbols.get(node.name)
        if decl is not None:
            return decl.term
        if node.name not in self.env:
            raise self._error(self.unbound.format(node.name), node.column)
        return Var(node.name, self.env[node.name])


def _ground_term(node: _Syntax, signature: Signature, line: int,
                 env: Optional[dict[str, SimpleType]] = None) -> Term:
    return _RuleTyper(signature, line, env, unbound="unknown identifier {}").rhs(node)


# ── Parser ──

def _declared_name(token: Token, line: int) -> str:
    if token.kind in ('cons', 'nil', 'addb'):
        return SUGAR_NAMES[token.text]
    if token.kind != 'ident':
        raise StrsError(f"expected a name, found {token.text!r}", line, token.column)
    return token.text


def parse_strs(text: str) -> Strs:
    """Parse and type-check a `.strs` source."""
    sorts: dict[str, SortOrder] = {}
    symbols: dict[str, SymbolDecl] = {}
    pending_rules: list[tuple[int, _Syntax, _Syntax, int]] = []

    for number, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0]
        stripped = content.strip()
        if not stripped:
            continue
        keyword, *remainder = stripped.split(maxsplit=1)
        rest = remainder[0] if remainder else ''
        start = content.index(keyword)
        offset = content.index(rest, start + len(keyword)) if rest else len(content)
        tokens = _tokenize(rest, number, offset)
        cursor = _Cursor(tokens, number)

        if keyword == 'sort':
            name = cursor.next()
            direction = SortOrder.DESC
            if not cursor.at_end():
                flag = cursor.next()
                try:
                    direction = SortOrder(flag.text)
                except ValueError:
                    raise StrsError(f"unknown sort order {flag.text}", number, flag.column) from None
            if name.text in sorts or name.text in symbols:
                raise StrsError(f"{name.text} declared twice", number, name.column)
            sorts[name.text] = direction
        elif keyword in ('cons', 'fn', 'oracle'):
            name_token = cursor.next()
            name = _declared_name(name_token, number)
            cursor.expect(':')
            ty = _parse_type(cursor, sorts)
            if name in symbols or name in sorts:
                raise StrsError(f"{name} declared twice", number, name_token.column)
            if order(ty) > 2:
                raise StrsError(f"symbol {name} has order {order(ty)} > 2", number, name_token.column)
            kind = SymbolKind(keyword)
            if kind is SymbolKind.ORACLE and (
                ty != Arrow(WORD, WORD)
            ):
                raise StrsError(f"oracle {name} must have type word -> word", number, name_token.column)
            symbols[name] = SymbolDecl(name, ty, kind)
        elif keyword == 'rule':
            split = next((i for i, t in enumerate(tokens) if t.kind == 'arrow'), None)
            if split is None:
                raise StrsError("rule without '->'", number, offset + 1)
            lhs_cursor = _Cursor(tokens[:split], number)
            rhs_cursor = _Cursor(tokens[split + 1:], number)
            lhs = _parse_expr(lhs_cursor)
            rhs = _parse_expr(rhs_cursor)
            for part in (lhs_cursor, rhs_cursor):
                if not part.at_end():
                    extra = part.next()
                    raise StrsError(f"unexpected {extra.text!r}", number, extra.column)
            pending_rules.append((number, lhs, rhs, tokens[split].column))
        else:
            raise StrsError(f"unknown declaration {keyword!r}", number, start + 1)
        if keyword != 'rule' and not cursor.at_end():
            extra = cursor.next()
            raise StrsError(f"unexpected {extra.text!r}", number, extra.column)

    signature = Signature(sorts, symbols)
    rules = [_type_rule(signature, *pending) for pending in pending_rules]
    logger.info(f"Parsed {len(symbols)} symbols and {len(rules)} rules")
    return Strs(signature, tuple(rules))


def _type_rule(signature: Signature, line: int, lhs_syntax: _Syntax,
               rhs_syntax: _Syntax, arrow_column: int) -> Rule:
    typer = _RuleTyper(signature, line)
    lhs = typer.lhs(lhs_syntax, None)
    rhs = typer.rhs(rhs_syntax)
    if isinstance(lhs.type, Arrow):
        raise StrsError(f"rule has arrow type {lhs.type}", line, arrow_column)
    if lhs.type != rhs.type:
        raise StrsError(f"rule sides have types {lhs.type} and {rhs.type}", line, arrow_column)
    return Rule(lhs, rhs, line)


def load_strs(path: Path) -> Strs:
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise StrsError(f"cannot read {path}: {e}") from e
    return parse_strs(text)


def parse_term(text: str, signature: Signature,
               env: Optional[dict[str, SimpleType]] = None) -> Term:
    """Parse a term over `signature`; identifiers outside `env` must be symbols."""
    cursor = _Cursor(_tokenize(text, 1), 1)
    syntax = _parse_expr(cursor)
    if not cursor.at_end():
        extra = cursor.next()
        raise StrsError(f"unexpected {extra.text!r}", 1, extra.column)
    return _ground_term(syntax, signature, 1, env)


def with_oracle(strs: Strs, name: str = 'S_f') -> tuple[Strs, str]:
    """Return the system and its oracle symbol, declaring `name : word -> word` if none exists."""
    existing = strs.signature.oracle_symbols()
    if existing:
        return strs, existing[0]
    if 'word' not in strs.signature.sorts:
        raise StrsError("oracle symbols need a declared sort word")
    symbols = dict(strs.signature.symbols)
    symbols[name] = SymbolDecl(name, Arrow(WORD, WORD), SymbolKind.ORACLE)
    return Strs(Signature(strs.signature.sorts, symbols), strs.rules), name


# ── Orthogonality ──

@dataclass(frozen=True)
class Violation:
    kind: str  # 'non-left-linear' or 'overlap'
    rules: tuple[int, ...]
    detail: str


@dataclass(frozen=True)
class OrthogonalityReport:
    orthogonal: bool
    violations: list[Violation]


def _format_subst(gamma: Substitution) -> str:
    parts = [f"{name}:={format_term(value)}" for name, value in sorted(gamma.items())]
    return '{' + ', '.join(parts) + '}'


def check_orthogonality(strs: Strs) -> OrthogonalityReport:
    """Left-linearity of every lhs plus pairwise non-unifiability of distinct lhss."""
    violations: list[Violation] = []
    for number, rule in enumerate(strs.rules):
        for name, where in variable_positions(rule.lhs).items():
            if len(where) > 1:
                violations.append(Violation(
                    'non-left-linear', (number,), f"variable {name} occurs {len(where)} times"
                ))
    for numbers in strs.index.values():
        for a_pos, a in enumerate(numbers):
            for b in numbers[a_pos + 1:]:
                renamed = rename_apart(strs.rules[b].lhs, '~')
                unifier = unify(strs.rules[a].lhs, renamed)
                if unifier is not None:
                    violations.append(Violation('overlap', (a, b), _format_subst(unifier)))
    if violations:
        logger.info(f"Found {len(violations)} orthogonality violations")
    return OrthogonalityReport(not violations, violations)


# ── Words and numerals ──

BIT = Base('bit')
WORD = Base('word')
NAT = Base('nat')
BIT_O = Sym('o', BIT)
BIT_I = Sym('i', BIT)
BLANK = Sym('b', BIT)
NIL = Sym('nil', WORD)
CONS = Sym('cons', arrow(BIT, WORD, WORD))
ZERO = Sym('0', NAT)
SUCC = Sym('s', Arrow(NAT, NAT))

_CONS_PARTIAL = Arrow(WORD, WORD)
_BITS = {'0': BIT_O, '1': BIT_I}


def encode_word(word: str) -> Term:
    """'001' -> o :: (o :: (i :: []))."""
    term: Term = NIL
    for bit in reversed(word):
        if bit not in _BITS:
            raise StrsError(f"not a bit: {bit!r}")
        term = App(App(CONS, _BITS[bit], _CONS_PARTIAL), term, WORD)
    return term


def decode_word(term: Term) -> Optional[str]:
    bits = []
    while isinstance(term, App):
        head, args = spine(term)
        if head != CONS or len(args) != 2:
            return None
        bit = args[0]
        if bit == BIT_O:
            bits.append('0')
        elif bit == BIT_I:
            bits.append('1')
        else:
            return None
        term = args[1]
    return ''.join(bits) if term == NIL else None


def numeral(n: int) -> Term:
    term: Term = ZERO
    for _ in range(n):
        term = App(SUCC, term, NAT)
    return term


def decode_numeral(term: Term) -> Optional[int]:
    count = 0
    while isinstance(term, App):
        if term.left != SUCC:
            return None
        count += 1
        term = term.right
    return count if term == ZERO else None

