"""Simple types and applicative terms.

Terms are immutable: variables, symbols and binary applications, each carrying
its simple type. Positions follow the usual convention: the root is the empty
position, and the children of an application are 1 (function part) and
2 (argument).
"""

from dataclasses import dataclass, field
from typing import ClassVar, Iterator, Mapping, Optional, Union

from src.logging_config import get_logger

logger = get_logger(__name__)

Position = tuple[int, ...]
ROOT: Position = ()


class TermError(Exception):
    """Base exception for ill-typed term construction."""


# ── Types ──

@dataclass(frozen=True, slots=True)
class Base:
    """A base sort."""
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Arrow:
    """A function type; right-associative when printed."""
    arg: 'SimpleType'
    result: 'SimpleType'

    def __str__(self) -> str:
        left = f"({self.arg})" if isinstance(self.arg, Arrow) else str(self.arg)
        return f"{left} -> {self.result}"


SimpleType = Union[Base, Arrow]


def arrow(*types: SimpleType) -> SimpleType:
    """arrow(a, b, c) is a -> b -> c."""
    result = types[-1]
    for arg in reversed(types[:-1]):
        result = Arrow(arg, result)
    return result


def order(ty: SimpleType) -> int:
    if isinstance(ty, Base):
        return 0
    return max(1 + order(ty.arg), order(ty.result))


def arg_types(ty: SimpleType) -> list[SimpleType]:
    args = []
    while isinstance(ty, Arrow):
        args.append(ty.arg)
        ty = ty.result
    return args


def result_type(ty: SimpleType) -> Base:
    while isinstance(ty, Arrow):
        ty = ty.result
    return ty


def arity(ty: SimpleType) -> int:
    return len(arg_types(ty))


def drop_args(ty: SimpleType, count: int) -> SimpleType:
    """Type left after applying `count` arguments."""
    for _ in range(count):
        if not isinstance(ty, Arrow):
            raise TermError(f"type {ty} takes fewer than {count} arguments")
        ty = ty.result
    return ty


# ── Terms ──

@dataclass(frozen=True, slots=True)
class Var:
    name: str
    type: SimpleType
    size: ClassVar[int] = 1


@dataclass(frozen=True, slots=True)
class Sym:
    name: str
    type: SimpleType
    size: ClassVar[int] = 1


@dataclass(frozen=True, slots=True)
class App:
    left: 'Term'
    right: 'Term'
    type: SimpleType
    size: int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'size', 1 + self.left.size + self.right.size)


Term = Union[Var, Sym, App]
Substitution = dict[str, Term]


def apply(left: Term, right: Term) -> App:
    """Type-checked application."""
    if not isinstance(left.type, Arrow):
        raise TermError(f"cannot apply {format_term(left)} of type {left.type}")
    if left.type.arg != right.type:
        raise TermError(
            f"argument {format_term(right)} has type {right.type}, "
            f"expected {left.type.arg}"
        )
    return App(left, right, left.type.result)


def make_app(head: Term, *args: Term) -> Term:
    term = head
    for arg in args:
        term = apply(term, arg)
    return term


def spine(term: Term) -> tuple[Term, list[Term]]:
    """Split `h a1 ... an` into (h, [a1, ..., an])."""
    args: list[Term] = []
    while isinstance(term, App):
        args.append(term.right)
        term = term.left
    args.reverse()
    return term, args


def positions(term: Term) -> list[Position]:
    """All positions in pre-order."""
    result: list[Position] = []
    stack: list[tuple[Term, Position]] = [(term, ROOT)]
    while stack:
        node, pos = stack.pop()
        result.append(pos)
        if isinstance(node, App):
            stack.append((node.right, pos + (2,)))
            stack.append((node.left, pos + (1,)))
    return result


def subterms(term: Term) -> Iterator[tuple[Position, Term]]:
    """(position, subterm) pairs in post-order: children before parents, 1 before 2."""
    stack: list[tuple[Term, Position, bool]] = [(term, ROOT, False)]
    while stack:
        node, pos, expanded = stack.pop()
        if expanded or not isinstance(node, App):
            yield pos, node
            continue
        stack.append((node, pos, True))
        stack.append((node.right, pos + (2,), False))
        stack.append((node.left, pos + (1,), False))


def subterm_at(term: Term, pos: Position) -> Term:
    for step in pos:
        if not isinstance(term, App):
            raise TermError(f"position {format_position(pos)} not in term")
        term = term.left if step == 1 else term.right
    return term


def replace_at(term: Term, pos: Position, replacement: Term) -> Term:
    if not pos:
        if replacement.type != term.type:
            raise TermError(f"replacement of type {replacement.type} at {term.type}")
        return replacement
    if not isinstance(term, App):
        raise TermError(f"position {format_position(pos)} not in term")
    if pos[0] == 1:
        return App(replace_at(term.left, pos[1:], replacement), term.right, term.type)
    return App(term.left, replace_at(term.right, pos[1:], replacement), term.type)


def variables(term: Term) -> dict[str, SimpleType]:
    """Variables in order of first (left-to-right) occurrence."""
    found: dict[str, SimpleType] = {}
    for _, node in sorted(subterms(term), key=lambda item: item[0]):
        if isinstance(node, Var):
            found.setdefault(node.name, node.type)
    return found


def variable_positions(term: Term) -> dict[str, list[Position]]:
    found: dict[str, list[Position]] = {}
    for pos in positions(term):
        node = subterm_at(term, pos)
        if isinstance(node, Var):
            found.setdefault(node.name, []).append(pos)
    return found


# ── Substitution, matching, unification ──

def apply_subst(gamma: Mapping[str, Term], term: Term) -> Term:
    if isinstance(term, Var):
        return gamma.get(term.name, term)
    if isinstance(term, Sym):
        return term
    left = apply_subst(gamma, term.left)
    right = apply_subst(gamma, term.right)
    if left is term.left and right is term.right:
        return term
    return App(left, right, term.type)


def match_term(pattern: Term, subject: Term) -> Optional[Substitution]:
    """Syntactic matching; repeated pattern variables must bind equal terms."""
    gamma: Substitution = {}
    stack = [(pattern, subject)]
    while stack:
        pat, sub = stack.pop()
        if isinstance(pat, Var):
            bound = gamma.get(pat.name)
            if bound is None:
                if pat.type != sub.type:
                    return None
                gamma[pat.name] = sub
            elif bound != sub:
                return None
        elif isinstance(pat, Sym):
            if not isinstance(sub, Sym) or sub.name != pat.name:
                return None
        else:
            if not isinstance(sub, App):
                return None
            stack.append((pat.right, sub.right))
            stack.append((pat.left, sub.left))
    return gamma


def rename_apart(term: Term, suffix: str) -> Term:
    renaming = {name: Var(name + suffix, ty) for name, ty in variables(term).items()}
    return apply_subst(renaming, term)


def _occurs(name: str, term: Term) -> bool:
    return any(isinstance(node, Var) and node.name == name for _, node in subterms(term))


def unify(left: Term, right: Term) -> Optional[Substitution]:
    """Most general unifier of two terms, treating applications as binary nodes."""
    unifier: Substitution = {}
    equations = [(left, right)]
    while equations:
        a, b = equations.pop()
        a = apply_subst(unifier, a)
        b = apply_subst(unifier, b)
        if a == b:
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        if isinstance(a, Var):
            if _occurs(a.name, b):
                return None
            binding = {a.name: b}
            unifier = {name: apply_subst(binding, t) for name, t in unifier.items()}
            unifier[a.name] = b
            continue
        if isinstance(a, App) and isinstance(b, App):
            equations.append((a.right, b.right))
            equations.append((a.left, b.left))
            continue
        return None
    return unifier


# ── Printing ──

INFIX_SUGAR = {'cons': '::', 'addB': '+B'}
NAME_SUGAR = {'nil': '[]'}


def format_position(pos: Position) -> str:
    return '.'.join(str(step) for step in pos) if pos else '#'


def _is_atomic(term: Term) -> bool:
    return not isinstance(term, App)


def format_term(term: Term) -> str:
    if isinstance(term, (Var, Sym)):
        return NAME_SUGAR.get(term.name, term.name) if isinstance(term, Sym) else term.name
    head, args = spine(term)
    if isinstance(head, Sym) and head.name in INFIX_SUGAR and len(args) == 2:
        parts = [format_term(arg) if _is_atomic(arg) else f"({format_term(arg)})" for arg in args]
        return f"{parts[0]} {INFIX_SUGAR[head.name]} {parts[1]}"
    pieces = [format_term(head)]
    for arg in args:
        pieces.append(format_term(arg) if _is_atomic(arg) else f"({format_term(arg)})")
    return ' '.join(pieces)
