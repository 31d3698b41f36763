"""Compile an oracle Turing machine and its running time into an STRS.

The generated system simulates one machine transition per `step` rule and
drives the whole run with `execute`, whose step budget is recomputed from
the running-time polynomial each time the machine queries the oracle. The
generated interpretation orients every rule and is polynomially bounded, so
the main symbol `F` computes the same functional as the machine.
"""

import re
from pathlib import Path

from src.csexpr import Add, Call, Const, CsExpr, CsLambda, Max, Monus, Mul, Ref
from src.interp import CsInterp, InterpError, parse_interp
from src.logging_config import get_logger
from src.otm import OtmSpec, Transition, validate
from src.sopoly import PApp, PConst, Poly, PSum, PVar, SopolyError, format_poly, functions_of, parse_poly, variables_of
from src.strs import NAT, WORD, Strs, StrsError, parse_strs
from src.terms import App, Arrow, Base, Sym, Term, Var, arrow, format_term

logger = get_logger(__name__)

SET = Base('set')
FN = Arrow(WORD, WORD)
ADD = Sym('add', arrow(NAT, NAT, NAT))
MULT = Sym('mult', arrow(NAT, NAT, NAT))
TRYALL = Sym('tryall', arrow(FN, SET, NAT, NAT))
ZERO = Sym('0', NAT)
SUCC = Sym('s', Arrow(NAT, NAT))

_BIT = {'0': 'o', '1': 'i', 'B': 'b'}
_STATE_NAME = re.compile(r"[A-Za-z0-9_']+")


class CompileError(Exception):
    """Base exception for machine compilation errors."""


def check_running_time(poly: Poly) -> None:
    extra_vars = variables_of(poly) - {'x'}
    extra_fns = functions_of(poly) - {'F'}
    if extra_vars or extra_fns:
        raise CompileError(
            f"running time {format_poly(poly)} may only use x and F, found {sorted(extra_vars | extra_fns)}"
        )


# ── Theta: terms computing P(|f| restricted to A, n) ──

def build_theta(poly: Poly, f_term: Term, z_term: Term, a_term: Term) -> Term:
    if isinstance(poly, PConst):
        term: Term = ZERO
        for _ in range(poly.value):
            term = App(SUCC, term, NAT)
        return term
    if isinstance(poly, PVar):
        return z_term
    if isinstance(poly, PApp):
        inner = build_theta(poly.arg, f_term, z_term, a_term)
        return App(App(App(TRYALL, f_term, arrow(SET, NAT, NAT)), a_term, Arrow(NAT, NAT)), inner, NAT)
    head = ADD if isinstance(poly, PSum) else MULT
    left = build_theta(poly.left, f_term, z_term, a_term)
    right = build_theta(poly.right, f_term, z_term, a_term)
    return App(App(head, left, Arrow(NAT, NAT)), right, NAT)


def _sum(*parts: CsExpr) -> CsExpr:
    kept = [p for p in parts if p != Const(0)]
    if not kept:
        return Const(0)
    result = kept[0]
    for part in kept[1:]:
        result = Add(result, part)
    return result


def _times(*parts: CsExpr) -> CsExpr:
    result = parts[0]
    for part in parts[1:]:
        result = Mul(result, part)
    return result


def poly_expr(poly: Poly, fn: str, var: CsExpr) -> CsExpr:
    """The polynomial as an interpretation expression over function `fn`."""
    if isinstance(poly, PConst):
        return Const(poly.value)
    if isinstance(poly, PVar):
        return var
    if isinstance(poly, PApp):
        return Call(fn, (poly_expr(poly.arg, fn, var),))
    left = poly_expr(poly.left, fn, var)
    right = poly_expr(poly.right, fn, var)
    return Add(left, right) if isinstance(poly, PSum) else Mul(left, right)


def theta_cost(poly: Poly, z: CsExpr, a: CsExpr) -> CsExpr:
    """Exact total cost of the theta term for `poly` when the set has size `a`."""
    if isinstance(poly, (PConst, PVar)):
        return Const(0)
    if isinstance(poly, PApp):
        s = poly_expr(poly.arg, 'Fs', z)
        per_query = _sum(Call('Fc', (s,)), _times(Const(2), Call('Fs', (s,))), _times(Const(2), s), Const(6))
        return _sum(theta_cost(poly.arg, z, a), Const(1), _times(a, per_query))
    left_size = poly_expr(poly.left, 'Fs', z)
    parts = [theta_cost(poly.left, z, a), theta_cost(poly.right, z, a)]
    if isinstance(poly, PSum):
        return _sum(*parts, left_size, Const(1))
    right_size = poly_expr(poly.right, 'Fs', z)
    return _sum(*parts, _times(left_size, right_size), _times(Const(2), left_size), Const(1))


# ── Interpretations of the driver symbols ──

class _Driver:
    """Cost and size expressions for execute, execute', F' and F."""

    def __init__(self, running_time: Poly):
        self.budget = PSum(running_time, PConst(1))
        self.running_time = running_time

    def time(self, fn: str, z: CsExpr) -> CsExpr:
        return poly_expr(self.running_time, fn, z)

    def theta(self, fn: str) -> CsExpr:
        budget = Add(self.time(fn, Ref('z')), Const(1))
        return Max(Monus(budget, Ref('m')), Ref('n'))

    def poly(self, x: CsExpr, z: CsExpr) -> CsExpr:
        return theta_cost(self.budget, z, x)

    def execute_cost(self, theta: CsExpr, c: CsExpr, a: CsExpr, z: CsExpr) -> CsExpr:
        width = Add(theta, c)
        inner = _sum(
            Const(6), _times(Const(2), width), Call('Fc', (width,)),
            self.poly(Add(theta, a), z), self.time('Fs', z),
        )
        return _sum(_times(theta, inner), Const(3), theta, c)

    def execute_prime_cost(self) -> CsExpr:
        theta = self.theta('Fs')
        width = _sum(theta, Ref('c'), Const(1))
        inner = _sum(
            Const(6), _times(Const(2), width), Call('Fc', (width,)),
            self.poly(Add(theta, Ref('a')), Ref('z')), self.time('Fs', Ref('z')),
        )
        return _sum(_times(Add(theta, Const(1)), inner), Const(1))

    def start_cost(self, z: CsExpr, c: CsExpr) -> CsExpr:
        budget = Add(self.time('Fs', z), Const(1))
        return _sum(self.execute_cost(budget, c, Const(0), z), self.poly(Const(0), z), Const(1))

    def lines(self) -> list[str]:
        z, c, n = Ref('z'), Ref('c'), Ref('n')
        size_theta = self.theta('F')
        cost_theta = self.theta('Fs')
        entries = [
            ('size', 'execute', CsLambda(('F', 'n', 'm', 'z', 'a', 'c'), Add(c, size_theta))),
            ('cost', 'execute', CsLambda(('Fc', 'Fs', 'n', 'm', 'z', 'a', 'c'),
                                         self.execute_cost(cost_theta, c, Ref('a'), z))),
            ('size', "execute'", CsLambda(('F', 'n', 'm', 'z', 'a', 'c'), _sum(c, Const(1), size_theta))),
            ('cost', "execute'", CsLambda(('Fc', 'Fs', 'n', 'm', 'z', 'a', 'c'), self.execute_prime_cost())),
            ('size', "F'", CsLambda(('F', 'z', 'c'), _sum(c, self.time('F', z), Const(1)))),
            ('cost', "F'", CsLambda(('Fc', 'Fs', 'z', 'c'), self.start_cost(z, c))),
            ('size', 'F', CsLambda(('F', 'n'), _sum(n, self.time('F', n), Const(1)))),
            ('cost', 'F', CsLambda(('Fc', 'Fs', 'n'), _sum(self.start_cost(n, n), n, Const(2)))),
        ]
        return [f"{component} {name} = {fn}" for component, name, fn in entries]


# ── Source generation ──

_SIGNATURE = """\
sort bit
sort word
sort left
sort right
sort tape
sort config
sort nat
sort nnat asc
sort set

cons o : bit
cons i : bit
cons b : bit
cons [] : word
cons :: : bit -> word -> word
cons L : word -> left
cons R : word -> right
cons split : left -> right -> tape
cons 0 : nat
cons s : nat -> nat
cons nz : nnat
cons nn : nnat -> nnat
cons emptyset : set
cons setcons : word -> set -> set
"""

_FUNCTIONS = """\
fn step : (word -> word) -> config -> config
fn clean : word -> word
fn len : word -> nat
fn max : nat -> nat -> nat
fn limit : word -> nat -> word
fn retif : word -> nat -> word -> word
fn tryapply : (word -> word) -> word -> nat -> nat
fn tryall : (word -> word) -> set -> nat -> nat
fn add : nat -> nat -> nat
fn mult : nat -> nat -> nat
fn extract : tape -> word
fn minus : nat -> nnat -> nat
fn execute : (word -> word) -> nat -> nnat -> nat -> set -> config -> word
fn execute' : (word -> word) -> nat -> nnat -> nat -> set -> config -> word
fn F' : (word -> word) -> nat -> config -> word
fn F : (word -> word) -> word -> word
"""

_HELPER_RULES = """\
rule clean (o :: x) -> o :: clean x
rule clean (i :: x) -> i :: clean x
rule clean (b :: x) -> []
rule clean [] -> []
rule len [] -> 0
rule len (x :: y) -> s (len y)
rule max 0 m -> m
rule max (s n) 0 -> s n
rule max (s n) (s m) -> s (max n m)
rule limit [] n -> []
rule limit (x :: y) 0 -> []
rule limit (x :: y) (s n) -> x :: limit y n
rule retif [] n z -> z
rule retif (x :: y) 0 z -> []
rule retif (x :: y) (s n) z -> retif y n z
rule tryapply Fv a n -> len (retif a n (Fv (limit a n)))
rule tryall Fv emptyset n -> 0
rule tryall Fv (setcons a tl) n -> max (tryapply Fv a n) (tryall Fv tl n)
rule add 0 y -> y
rule add (s x) y -> s (add x y)
rule mult 0 y -> 0
rule mult (s x) y -> add y (mult x y)
rule extract (split (L x) (R y)) -> clean y
rule minus x nz -> x
rule minus 0 (nn y) -> 0
rule minus (s x) (nn y) -> minus x y
"""

_HELPER_INTERP = """\
size :: = \\x y. y + 1
size L = \\x. x
size R = \\x. x
size split = \\x y. x + y
size s = \\x. x + 1
size nn = \\x. x + 1
size setcons = \\x y. y + 1
size step = \\F x. x + 1
cost step = \\Fc Fs x. Fc(x) + x + 2
size clean = \\x. x
cost clean = \\x. x + 1
size len = \\x. x
cost len = \\x. x + 1
size max = \\n m. max(n, m)
cost max = \\n m. n + 1
size limit = \\x n. n
cost limit = \\x n. n + 1
size retif = \\x n z. z
cost retif = \\x n z. n + 1
size tryapply = \\F a n. F(n)
cost tryapply = \\Fc Fs a n. Fc(n) + Fs(n) + 2 * n + 4
size tryall = \\F a n. F(n)
cost tryall = \\Fc Fs a n. 1 + a * (Fc(n) + 2 * Fs(n) + 2 * n + 6)
size add = \\x y. x + y
cost add = \\x y. x + 1
size mult = \\x y. x * y
cost mult = \\x y. x * y + 2 * x + 1
size extract = \\x. x
cost extract = \\x. x + 2
size minus = \\x y. monus(x, y)
cost minus = \\x y. x + 1
"""

_OTHER_TAPES = ('t1', 't2', 't3')


def _config(state: str, tape: int, pattern: str) -> str:
    tapes = list(_OTHER_TAPES)
    tapes[tape - 1] = f"(split {pattern})"
    return f"(q_{state} {' '.join(tapes)})"


def _tape_cases(t: Transition) -> list[tuple[str, str]]:
    """(lhs tape, rhs tape) pairs; blank reads match both `R []` and `R (b :: z)`."""
    r, w = _BIT[t.read], _BIT[t.write]
    if t.move == 'R':
        if t.read != 'B':
            return [(f"(L y) (R ({r} :: z))", f"(L ({w} :: y)) (R z)")]
        return [
            ("(L y) (R [])", f"(L ({w} :: y)) (R [])"),
            ("(L y) (R (b :: z))", f"(L ({w} :: y)) (R z)"),
        ]
    if t.read != 'B':
        return [
            (f"(L (x :: y)) (R ({r} :: z))", f"(L y) (R (x :: {w} :: z))"),
            (f"(L []) (R ({r} :: z))", f"(L []) (R ({w} :: z))"),
        ]
    return [
        ("(L (x :: y)) (R [])", f"(L y) (R (x :: {w} :: []))"),
        ("(L (x :: y)) (R (b :: z))", f"(L y) (R (x :: {w} :: z))"),
        ("(L []) (R [])", f"(L []) (R ({w} :: []))"),
        ("(L []) (R (b :: z))", f"(L []) (R ({w} :: z))"),
    ]


def step_rules(spec: OtmSpec) -> list[str]:
    rules = []
    for t in spec.transitions:
        for lhs, rhs in _tape_cases(t):
            rules.append(
                f"rule step Fv {_config(t.source, t.tape, lhs)} -> {_config(t.target, t.tape, rhs)[1:-1]}"
            )
    if spec.query is not None:
        rules.append(
            f"rule step Fv (q_{spec.query} t1 (split x (R y)) t3) -> "
            f"q_{spec.answer} t1 (split (L []) (R [])) (split (L []) (R (Fv (clean y))))"
        )
    return rules


def _theta_source(poly: Poly, a: str) -> str:
    term = build_theta(poly, Var('Fv', FN), Var('z', NAT), Var(a, SET) if a != 'emptyset' else Sym(a, SET))
    text = format_term(term)
    return text if ' ' not in text else f"({text})"


def driver_rules(spec: OtmSpec, running_time: Poly) -> list[str]:
    budget = PSum(running_time, PConst(1))
    start_tapes = "(split (L []) (R w)) (split (L []) (R [])) (split (L []) (R []))"
    rules = [
        f"rule F Fv w -> F' Fv (len w) (q_{spec.start} {start_tapes})",
        f"rule F' Fv z c -> execute Fv {_theta_source(budget, 'emptyset')} nz z emptyset c",
    ]
    for state in spec.states:
        if state in (spec.query, spec.final):
            continue
        rules.append(
            f"rule execute Fv (s n) m z a (q_{state} t1 t2 t3) -> "
            f"execute Fv n (nn m) z a (step Fv (q_{state} t1 t2 t3))"
        )
    if spec.query is not None:
        rules.append(
            f"rule execute Fv (s n) m z a (q_{spec.query} t1 t2 t3) -> "
            f"execute' Fv n (nn m) z (setcons (extract t2) a) (q_{spec.query} t1 t2 t3)"
        )
    rules.append(
        f"rule execute' Fv n m z a c -> execute Fv (minus {_theta_source(budget, 'a')} m) m z a (step Fv c)"
    )
    rules.append(f"rule execute Fv n m z a (q_{spec.final} t1 t2 t3) -> extract t1")
    return rules


def compile_otm_sources(spec: OtmSpec, running_time: Poly) -> tuple[str, str]:
    """The `.strs` and `.csi` texts for `spec` running within `running_time`."""
    validate(spec)
    for state in spec.states:
        if not _STATE_NAME.fullmatch(state):
            raise CompileError(f"state name {state!r} cannot be used in a symbol name")
    check_running_time(running_time)
    states = '\n'.join(f"cons q_{state} : tape -> tape -> tape -> config" for state in spec.states)
    rules = step_rules(spec) + driver_rules(spec, running_time)
    header = f"# generated from a {len(spec.states)}-state machine, running time {format_poly(running_time)}\n"
    strs_text = (
        header + _SIGNATURE + states + '\n\n' + _FUNCTIONS + '\n'
        + _HELPER_RULES + '\n'.join(rules) + '\n'
    )
    state_sizes = '\n'.join(f"size q_{state} = \\x y z. x + y" for state in spec.states)
    csi_text = header + _HELPER_INTERP + state_sizes + '\n' + '\n'.join(_Driver(running_time).lines()) + '\n'
    return strs_text, csi_text


def compile_otm(spec: OtmSpec, running_time: Poly) -> tuple[Strs, CsInterp]:
    strs_text, csi_text = compile_otm_sources(spec, running_time)
    try:
        strs = parse_strs(strs_text)
        interp = parse_interp(csi_text, strs)
    except (StrsError, InterpError) as e:
        raise CompileError(f"generated system does not load: {e}") from e
    logger.info(f"Compiled machine into {len(strs.rules)} rules")
    return strs, interp


def parse_running_time(text: str) -> Poly:
    try:
        poly = parse_poly(text)
    except SopolyError as e:
        raise CompileError(f"bad running time {text!r}: {e}") from e
    check_running_time(poly)
    return poly


def write_compiled(spec: OtmSpec, running_time: Poly, prefix: Path) -> tuple[Path, Path]:
    strs_text, csi_text = compile_otm_sources(spec, running_time)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    strs_path = prefix.with_suffix('.strs')
    csi_path = prefix.with_suffix('.csi')
    strs_path.write_text(strs_text, encoding='utf-8')
    csi_path.write_text(csi_text, encoding='utf-8')
    logger.info(f"Wrote {strs_path} and {csi_path}")
    return strs_path, csi_path
