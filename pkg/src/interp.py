"""Cost-size interpretations and compatibility checking.

An interpretation gives every symbol a size function and a cost function,
written as lambdas in the `.csi` format:

    size add = \\x y. x + y
    cost add = \\x y. x + 1
    cost funcProd = \\Fc Fs x y. ...

Size lambdas bind one variable per argument (a function for each order-1
argument). Cost lambdas bind a cost function and a size function for each
order-1 argument, and a size for each order-0 argument, in argument order.
Constructors without lines default to size 0 and cost 0.
"""

import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Union

import numpy as np
import sympy

from src.certify import SymbolicFn, lambda_to_sympy, natural, nonnegative, SYMBOLIC
from src.config import PARALLEL_JOBS, SAMPLE_BUDGET, SEED
from src.csexpr import (
    SCALAR,
    Add,
    Arithmetic,
    Call,
    Const,
    CsExpr,
    CsExprError,
    CsLambda,
    LaneOverflow,
    Mul,
    Ref,
    VectorArithmetic,
    compile_expr,
    in_fragment,
    parse_lambda,
)
from src.logging_config import get_logger
from src.rewrite import root_redex
from src.sampling import MonotoneFn, Valuation, sample_batches
from src.sopoly import PApp, PConst, Poly, PProd, PSum, PVar
from src.strs import SUGAR_NAMES, WORD, SortOrder, Strs, SymbolKind
from src.terms import (
    Arrow,
    Base,
    SimpleType,
    Sym,
    Term,
    Var,
    arg_types,
    arity,
    order,
    result_type,
    spine,
    variables,
)

logger = get_logger(__name__)


class InterpError(Exception):
    """Base exception for interpretation errors."""


@dataclass(frozen=True)
class CsInterp:
    size: dict[str, CsLambda]
    cost: dict[str, CsLambda]

    def lines(self) -> list[str]:
        out = []
        for name in self.size:
            out.append(f"size {name} = {self.size[name]}")
            out.append(f"cost {name} = {self.cost[name]}")
        return out


# ── Parsing ──

_LINE_RE = re.compile(r"^(size|cost)\s+(\S+)\s*=\s*(.+)$")


def binder_roles(ty: SimpleType, component: str) -> list[Optional[int]]:
    """Per binder: None for a number, else the arity of the bound function."""
    roles: list[Optional[int]] = []
    for arg in arg_types(ty):
        if order(arg) == 0:
            roles.append(None)
        elif component == 'size':
            roles.append(arity(arg))
        else:
            roles.extend([arity(arg), arity(arg)])
    return roles


def _uses(expr: CsExpr, refs: set[str], calls: dict[str, set[int]]) -> None:
    if isinstance(expr, Ref):
        refs.add(expr.name)
    elif isinstance(expr, Call):
        calls.setdefault(expr.name, set()).add(len(expr.args))
        for arg in expr.args:
            _uses(arg, refs, calls)
    elif isinstance(expr, Const):
        return
    else:
        for child in vars(expr).values():
            _uses(child, refs, calls)


def _check_lambda(name: str, component: str, fn: CsLambda, ty: SimpleType, line: int) -> None:
    roles = binder_roles(ty, component)
    if len(fn.binders) != len(roles):
        raise InterpError(
            f"line {line}: {component} of {name} needs {len(roles)} binders, got {len(fn.binders)}"
        )
    role_of = dict(zip(fn.binders, roles))
    refs: set[str] = set()
    calls: dict[str, set[int]] = {}
    _uses(fn.body, refs, calls)
    for ref in refs:
        if role_of[ref] is not None:
            raise InterpError(f"line {line}: function binder {ref} used as a number in {name}")
    for called, counts in calls.items():
        expected = role_of[called]
        if expected is None or counts != {expected}:
            raise InterpError(f"line {line}: {called} applied to the wrong number of arguments in {name}")


def _zero_lambda(ty: SimpleType, component: str) -> CsLambda:
    binders = tuple(f"x{i}" for i in range(1, len(binder_roles(ty, component)) + 1))
    return CsLambda(binders, Const(0))


def parse_interp(text: str, strs: Strs) -> CsInterp:
    symbols = strs.signature.symbols
    found: dict[str, dict[str, CsLambda]] = {'size': {}, 'cost': {}}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        match = _LINE_RE.match(line)
        if not match:
            raise InterpError(f"line {number}: expected 'size|cost <symbol> = <lambda>'")
        component, name, body = match.groups()
        name = SUGAR_NAMES.get(name, name)
        decl = symbols.get(name)
        if decl is None:
            raise InterpError(f"line {number}: unknown symbol {name}")
        if decl.kind is SymbolKind.ORACLE:
            raise InterpError(f"line {number}: oracle symbol {name} takes no interpretation")
        if name in found[component]:
            raise InterpError(f"line {number}: second {component} line for {name}")
        try:
            fn = parse_lambda(body)
        except CsExprError as e:
            raise InterpError(f"line {number}: {e}") from e
        _check_lambda(name, component, fn, decl.type, number)
        found[component][name] = fn

    for name, decl in symbols.items():
        if decl.kind is SymbolKind.ORACLE:
            continue
        for component in ('size', 'cost'):
            if name in found[component]:
                continue
            if decl.kind is not SymbolKind.CONSTRUCTOR:
                raise InterpError(f"missing {component} interpretation for {name}")
            found[component][name] = _zero_lambda(decl.type, component)
    logger.info(f"Parsed interpretations for {len(found['size'])} symbols")
    return CsInterp(found['size'], found['cost'])


def load_interp(path: Path, strs: Strs) -> CsInterp:
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise InterpError(f"cannot read {path}: {e}") from e
    return parse_interp(text, strs)


# ── Evaluation ──

class Curried:
    """A lambda waiting for the rest of its arguments, one at a time."""

    __slots__ = ('fn', 'arity', 'args')

    def __init__(self, fn: Callable[[tuple], Any], arity: int, args: tuple = ()):
        self.fn = fn
        self.arity = arity
        self.args = args

    def __call__(self, value: Any) -> Any:
        args = self.args + (value,)
        if len(args) == self.arity:
            return self.fn(args)
        return Curried(self.fn, self.arity, args)


def _saturate(fn: Callable[[tuple], Any], arity: int, args: tuple) -> Any:
    return fn(args) if len(args) == arity else Curried(fn, arity, args)


@dataclass
class NodeValue:
    size: Any
    cost: Any
    total: Any
    total_prime: Any
    reducible: bool


class InterpEvaluator:
    """Evaluates sizes, costs and total costs over one arithmetic backend."""

    def __init__(self, interp: CsInterp, strs: Optional[Strs] = None, arith: Arithmetic = SCALAR):
        self.interp = interp
        self.strs = strs
        self.arith = arith
        self._compiled: dict[tuple[str, str], Callable[[tuple], Any]] = {}

    def function(self, component: str, name: str) -> Callable[[tuple], Any]:
        key = (component, name)
        if key not in self._compiled:
            table = self.interp.size if component == 'size' else self.interp.cost
            if name not in table:
                raise InterpError(f"no {component} interpretation for {name}")
            fn = table[name]
            body = compile_expr(fn.body, self.arith)
            binders = fn.binders
            self._compiled[key] = lambda args: body(dict(zip(binders, args)))
        return self._compiled[key]

    def _symbol(self, sym: Sym, args: list[NodeValue]) -> tuple[Any, Any]:
        size_fn = self.function('size', sym.name)
        cost_fn = self.function('cost', sym.name)
        types = arg_types(sym.type)
        size = _saturate(size_fn, len(types), tuple(a.size for a in args))
        slots: list[Any] = []
        for ty, value in zip(types, args):
            if order(ty) == 0:
                slots.append(value.size)
            else:
                slots.extend([value.cost, value.size])
        cost_arity = len(types) + sum(1 for ty in types if order(ty) > 0)
        return size, _saturate(cost_fn, cost_arity, tuple(slots))

    def evaluate(self, term: Term, alpha: Mapping[str, Any], zeta: Mapping[str, Any]) -> NodeValue:
        """Size, cost, totalcost and totalcost' of `term` in one pass."""
        memo: dict[int, NodeValue] = {}
        return self._walk(term, alpha, zeta, memo)

    def _walk(self, term: Term, alpha: Mapping[str, Any], zeta: Mapping[str, Any],
              memo: dict[int, NodeValue]) -> NodeValue:
        cached = memo.get(id(term))
        if cached is not None:
            return cached
        head, args = spine(term)
        values = [self._walk(arg, alpha, zeta, memo) for arg in args]
        arith = self.arith
        total: Any = 0
        total_prime: Any = 0
        reducible = False
        for value in values:
            total = arith.add(total, value.total)
            total_prime = arith.add(total_prime, value.total_prime)
            reducible = reducible or value.reducible

        if isinstance(head, Var):
            if head.name not in alpha:
                raise InterpError(f"no value for variable {head.name}")
            size = alpha[head.name]
            cost = zeta.get(head.name)
            for value in values:
                size = size(value.size)
                cost = cost(value.size) if cost is not None else None
            if cost is None:
                cost = 0
        else:
            assert isinstance(head, Sym)
            if self.strs is not None:
                decl = self.strs.signature.symbols.get(head.name)
                if decl is not None and decl.kind is SymbolKind.ORACLE:
                    raise InterpError(f"oracle symbol {head.name} has no interpretation")
            size, cost = self._symbol(head, values)

        counted = isinstance(term.type, Base) and not isinstance(term, Var)
        if self.strs is not None and isinstance(head, Sym) and root_redex(self.strs, term) is not None:
            reducible = True
        if counted:
            total = arith.add(total, cost)
            if reducible:
                total_prime = arith.add(total_prime, cost)
        result = NodeValue(size, cost, total, total_prime, reducible)
        memo[id(term)] = result
        return result

    def size(self, term: Term, alpha: Mapping[str, Any]) -> Any:
        return self.evaluate(term, alpha, {}).size

    def cost(self, term: Term, alpha: Mapping[str, Any], zeta: Mapping[str, Any]) -> Any:
        return self.evaluate(term, alpha, zeta).cost

    def totalcost(self, term: Term, alpha: Mapping[str, Any], zeta: Mapping[str, Any]) -> Any:
        return self.evaluate(term, alpha, zeta).total


def eval_size(interp: CsInterp, term: Term, alpha: Mapping[str, Any]) -> Any:
    return InterpEvaluator(interp).size(term, alpha)


def eval_cost(interp: CsInterp, term: Term, alpha: Mapping[str, Any],
              zeta: Mapping[str, Any]) -> Any:
    return InterpEvaluator(interp).cost(term, alpha, zeta)


def totalcost(interp: CsInterp, term: Term, alpha: Mapping[str, Any],
              zeta: Mapping[str, Any]) -> Any:
    return InterpEvaluator(interp).totalcost(term, alpha, zeta)


def totalcost_prime(interp: CsInterp, strs: Strs, term: Term, alpha: Mapping[str, Any],
                    zeta: Mapping[str, Any]) -> Any:
    """Total cost over the base-type subterms that are not in normal form."""
    return InterpEvaluator(interp, strs).evaluate(term, alpha, zeta).total_prime


# ── Verdicts ──

@dataclass(frozen=True)
class Certified:
    pass


@dataclass(frozen=True)
class Tested:
    samples: int


@dataclass(frozen=True)
class Falsified:
    rule: int
    valuation: Valuation
    lhs: int
    rhs: int
    which: str  # 'cost' or 'size'


@dataclass(frozen=True)
class Unknown:
    reason: str


Verdict = Union[Certified, Tested, Falsified, Unknown]


def format_verdict(verdict: Verdict) -> str:
    if isinstance(verdict, Certified):
        return 'certified'
    if isinstance(verdict, Tested):
        return f"tested {verdict.samples}"
    if isinstance(verdict, Unknown):
        return f"unknown {verdict.reason}"
    relation = '>' if verdict.which == 'cost' else 'above'
    return (f"falsified {verdict.which} lhs={verdict.lhs} rhs={verdict.rhs} "
            f"(needs lhs {relation} rhs) at {verdict.valuation}")


def _ascending_sorts(strs: Strs) -> set[str]:
    return {name for name, direction in strs.signature.sorts.items() if direction is SortOrder.ASC}


def _size_holds(lhs: Any, rhs: Any, ascending: bool) -> Any:
    return np.less_equal(lhs, rhs) if ascending else np.greater_equal(lhs, rhs)


def _rule_values(evaluator: InterpEvaluator, lhs: Term, rhs: Term,
                 alpha: Mapping[str, Any], zeta: Mapping[str, Any]) -> tuple[Any, Any, Any, Any]:
    left = evaluator.evaluate(lhs, alpha, zeta)
    right = evaluator.evaluate(rhs, alpha, zeta)
    return left.cost, right.total, left.size, right.size


def _falsify(interp: CsInterp, strs: Strs, index: int, budget: int, seed: int) -> Verdict:
    rule = strs.rules[index]
    ascending = _ascending_sorts(strs)
    result_ascending = result_type(rule.lhs.type).name in ascending
    fast = InterpEvaluator(interp, None, VectorArithmetic())
    exact = InterpEvaluator(interp, None, VectorArithmetic(exact=True))
    tested = 0
    for batch in sample_batches(variables(rule.lhs), ascending, budget, seed, stream=index):
        try:
            values = _rule_values(fast, rule.lhs, rule.rhs, batch.alpha(), batch.zeta())
        except LaneOverflow:
            logger.debug(f"Rule {index + 1}: int64 overflow, retrying batch exactly")
            wide = batch.exact()
            values = _rule_values(exact, rule.lhs, rule.rhs, wide.alpha(), wide.zeta())
        lhs_cost, rhs_total, lhs_size, rhs_size = (
            np.broadcast_to(np.asarray(v), (batch.count,)) for v in values
        )
        good = np.asarray(np.greater(lhs_cost, rhs_total), dtype=bool) & np.asarray(
            _size_holds(lhs_size, rhs_size, result_ascending), dtype=bool)
        if not np.all(good):
            lane = int(np.argmin(good))
            return _counterexample(interp, rule.lhs, rule.rhs, index, batch.lane(lane), result_ascending)
        tested += batch.count
    return Tested(tested)


def _counterexample(interp: CsInterp, lhs: Term, rhs: Term, index: int,
                    valuation: Valuation, result_ascending: bool) -> Verdict:
    scalar = InterpEvaluator(interp)
    lhs_cost, rhs_total, lhs_size, rhs_size = _rule_values(
        scalar, lhs, rhs, valuation.alpha(), valuation.zeta()
    )
    if not lhs_cost > rhs_total:
        return Falsified(index, valuation, int(lhs_cost), int(rhs_total), 'cost')
    return Falsified(index, valuation, int(lhs_size), int(rhs_size), 'size')


def _symbolic_valuation(term: Term) -> tuple[dict[str, Any], dict[str, Any]]:
    alpha: dict[str, Any] = {}
    zeta: dict[str, Any] = {}
    for name, ty in variables(term).items():
        if order(ty) == 0:
            alpha[name] = natural(name)
        else:
            alpha[name] = SymbolicFn(f"{name}_s", arity(ty))
            zeta[name] = SymbolicFn(f"{name}_c", arity(ty))
    return alpha, zeta


def _symbols_of(term: Term) -> set[str]:
    head, args = spine(term)
    names = {head.name} if isinstance(head, Sym) else set()
    for arg in args:
        names |= _symbols_of(arg)
    return names


def _certify(interp: CsInterp, strs: Strs, index: int) -> Verdict:
    rule = strs.rules[index]
    ascending = _ascending_sorts(strs)
    involved = sorted(_symbols_of(rule.lhs) | _symbols_of(rule.rhs))
    for name in involved:
        for component, table in (('size', interp.size), ('cost', interp.cost)):
            if name in table and not in_fragment(table[name].body):
                return Unknown(f"{component} of {name} uses max, monus or pow")
        decl = strs.signature.symbols[name]
        if decl.kind is SymbolKind.ORACLE:
            return Unknown(f"oracle symbol {name}")
        if _type_sorts(decl.type) & ascending:
            return Unknown(f"{name} involves an ascending sort")
    if any(_type_sorts(ty) & ascending for ty in variables(rule.lhs).values()):
        return Unknown("a variable has an ascending sort")

    alpha, zeta = _symbolic_valuation(rule.lhs)
    evaluator = InterpEvaluator(interp, None, SYMBOLIC)
    lhs_cost, rhs_total, lhs_size, rhs_size = _rule_values(evaluator, rule.lhs, rule.rhs, alpha, zeta)
    if not nonnegative(lhs_cost - rhs_total - 1):
        return Unknown(f"cannot show cost {sympy.expand(lhs_cost)} > {sympy.expand(rhs_total)}")
    if not nonnegative(lhs_size - rhs_size):
        return Unknown(f"cannot show size {sympy.expand(lhs_size)} >= {sympy.expand(rhs_size)}")
    return Certified()


def _type_sorts(ty: SimpleType) -> set[str]:
    if isinstance(ty, Base):
        return {ty.name}
    return _type_sorts(ty.arg) | _type_sorts(ty.result)


def check_rule(interp: CsInterp, strs: Strs, index: int, mode: str = 'falsify',
               budget: int = SAMPLE_BUDGET, seed: int = SEED) -> Verdict:
    """Check one rule (0-based) by sampling (falsify) or symbolically (certify)."""
    if mode == 'certify':
        verdict = _certify(interp, strs, index)
    elif mode == 'falsify':
        verdict = _falsify(interp, strs, index, budget, seed)
    else:
        raise InterpError(f"unknown mode {mode}")
    logger.debug(f"Rule {index + 1}: {format_verdict(verdict)}")
    return verdict


@dataclass
class SystemReport:
    verdicts: list[Verdict]
    overall: Verdict


def _overall(verdicts: list[Verdict]) -> Verdict:
    for verdict in verdicts:
        if isinstance(verdict, Falsified):
            return verdict
    unknown = [v for v in verdicts if isinstance(v, Unknown)]
    if unknown:
        return Unknown(f"{len(unknown)} rules not certified")
    tested = [v for v in verdicts if isinstance(v, Tested)]
    if tested:
        return Tested(sum(v.samples for v in tested))
    return Certified()


def check_system(interp: CsInterp, strs: Strs, mode: str = 'falsify',
                 budget: int = SAMPLE_BUDGET, seed: int = SEED,
                 jobs: int = PARALLEL_JOBS) -> SystemReport:
    """Check every rule; the result does not depend on `jobs`."""
    task = partial(check_rule, interp, strs, mode=mode, budget=budget, seed=seed)
    indices = range(len(strs.rules))
    if jobs > 1 and len(strs.rules) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            verdicts = list(executor.map(task, indices))
    else:
        verdicts = [task(index) for index in indices]
    logger.info(f"Checked {len(verdicts)} rules in {mode} mode")
    return SystemReport(verdicts, _overall(verdicts))


# ── Polynomially bounded interpretations ──

@dataclass
class PolyBoundReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    mu: Optional[int] = None
    nu: Optional[int] = None
    poly: Optional[Poly] = None


def _constant(fn: CsLambda) -> Optional[int]:
    if fn.binders:
        return None
    value = sympy.expand(lambda_to_sympy(fn))
    return int(value) if value.is_Integer else None


def _function_arities(fn: CsLambda, ty: SimpleType, component: str) -> dict[str, int]:
    return {binder: role for binder, role in zip(fn.binders, binder_roles(ty, component))
            if role is not None}


def to_poly(expr: CsExpr, renaming: Mapping[str, str]) -> Poly:
    """Convert a fragment expression to a second-order polynomial."""
    if isinstance(expr, Const):
        return PConst(expr.value)
    if isinstance(expr, Ref):
        return PVar(renaming.get(expr.name, expr.name))
    if isinstance(expr, Add):
        return PSum(to_poly(expr.left, renaming), to_poly(expr.right, renaming))
    if isinstance(expr, Mul):
        return PProd(to_poly(expr.left, renaming), to_poly(expr.right, renaming))
    if isinstance(expr, Call) and len(expr.args) == 1:
        return PApp(renaming.get(expr.name, expr.name), to_poly(expr.args[0], renaming))
    raise InterpError("expression is outside the polynomial fragment")


def check_poly_bounded(interp: CsInterp, strs: Strs, main: str) -> PolyBoundReport:
    """Word sort descending, free constructors, additive `::`, polynomial main cost."""
    failures: list[str] = []
    signature = strs.signature
    if 'word' not in signature.sorts:
        failures.append("no sort word")
    elif signature.sorts['word'] is not SortOrder.DESC:
        failures.append("sort word is not ordered descending")

    for name, decl in signature.symbols.items():
        if decl.kind is not SymbolKind.CONSTRUCTOR:
            continue
        fn = interp.cost[name]
        cost = sympy.expand(lambda_to_sympy(fn, _function_arities(fn, decl.type, 'cost')))
        if cost != 0:
            failures.append(f"constructor {name} has nonzero cost {cost}")

    bits = [_constant(interp.size[b]) if b in interp.size else None for b in ('o', 'i')]
    nil_size = _constant(interp.size['nil']) if 'nil' in interp.size else None
    if None in bits or nil_size is None:
        failures.append("o, i and [] need constant sizes")

    slope: Optional[int] = None
    if 'cons' not in interp.size:
        failures.append("no :: constructor")
    else:
        fn = interp.size['cons']
        if len(fn.binders) == 2:
            x, y = (natural(b) for b in fn.binders)
            body = sympy.expand(lambda_to_sympy(fn))
            rest = sympy.expand(body - x - y)
            variant = sympy.expand(body - y)
            if rest.is_Integer and rest >= 1:
                slope = int(rest)
            elif variant.is_Integer and variant >= 1 and all(b == 0 for b in bits if b is not None):
                slope = int(variant)
        if slope is None:
            failures.append(f"size of :: is not x + y + c with c >= 1: {fn}")

    mu = nu = None
    if slope is not None and None not in bits and nil_size is not None:
        mu = max(b for b in bits if b is not None) + slope
        nu = nil_size

    poly: Optional[Poly] = None
    decl = signature.symbols.get(main)
    if decl is None:
        failures.append(f"unknown main symbol {main}")
    elif decl.type != Arrow(Arrow(WORD, WORD), Arrow(WORD, WORD)):
        failures.append(f"main symbol {main} has type {decl.type}")
    else:
        fn = interp.cost[main]
        if not in_fragment(fn.body):
            failures.append(f"cost of {main} is outside the polynomial fragment")
        else:
            renaming = dict(zip(fn.binders, ('Fc', 'Fs', 'x')))
            poly = to_poly(fn.body, renaming)

    if failures:
        logger.info(f"Interpretation is not polynomially bounded: {failures}")
    return PolyBoundReport(not failures, failures, mu, nu, poly)


# ── Monotonicity sampling ──

def _argument_sorts(ty: SimpleType, component: str) -> list[Optional[str]]:
    """Sort of each numeric binder; None for function binders."""
    sorts: list[Optional[str]] = []
    for arg in arg_types(ty):
        if order(arg) == 0:
            sorts.append(str(arg))
        else:
            sorts.extend([None] * (2 if component == 'cost' else 1))
    return sorts


def _monotonicity_witness(fn: Callable[[tuple], Any], point: list[Any], sorts: list[Optional[str]],
                          ascending: set[str], decreasing: bool) -> Optional[int]:
    """Binder position where moving `point` up in its sort order moves the result down."""
    base = fn(tuple(point))
    for position, sort in enumerate(sorts):
        if sort is None:
            continue
        moved = list(point)
        if sort in ascending:
            if moved[position] == 0:
                continue
            moved[position] -= 1
        else:
            moved[position] += 1
        value = fn(tuple(moved))
        if (value > base) if decreasing else (value < base):
            return position
    return None


def check_monotonicity(interp: CsInterp, strs: Strs, samples: int = 200,
                       seed: int = SEED) -> list[str]:
    """Warnings for interpretation functions that sampling shows are not weakly monotone."""
    rng = np.random.default_rng([seed, len(strs.rules)])
    ascending = _ascending_sorts(strs)
    evaluator = InterpEvaluator(interp)
    warnings: list[str] = []
    for name, decl in strs.signature.symbols.items():
        if decl.kind is SymbolKind.ORACLE:
            continue
        result_asc = result_type(decl.type).name in ascending
        for component in ('size', 'cost'):
            fn = evaluator.function(component, name)
            roles = binder_roles(decl.type, component)
            sorts = _argument_sorts(decl.type, component)
            for _ in range(samples):
                point = [
                    int(rng.integers(0, 10, endpoint=True)) if role is None
                    else MonotoneFn(1, 0, arity=role)
                    for role in roles
                ]
                decreasing = result_asc and component == 'size'
                position = _monotonicity_witness(fn, point, sorts, ascending, decreasing)
                if position is not None:
                    shown = tuple(p if isinstance(p, int) else str(p) for p in point)
                    warnings.append(
                        f"{component} of {name} is not monotone in argument {position + 1} at {shown}"
                    )
                    break
    for warning in warnings:
        logger.warning(warning)
    return warnings
