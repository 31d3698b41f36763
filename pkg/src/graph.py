"""Term graph rewriting with sharing.

A term graph is a rooted acyclic graph whose vertices are labeled with a
symbol, with '@' (binary application), or left unlabeled (a variable).
Contraction follows three phases: build the right-hand side, redirect every
reference to the redex vertex, and drop whatever the root no longer reaches.
"""

from dataclasses import dataclass, field
from typing import Optional

from src.config import GRAPH_DEBUG_CHECKS, MAX_STEPS
from src.logging_config import get_logger
from src.rewrite import OracleCall, OracleError
from src.sopoly import OracleMissError, OracleTable
from src.strs import Strs, SymbolKind, decode_word, encode_word
from src.terms import App, Position, ROOT, SimpleType, Sym, Term, Var, variable_positions

logger = get_logger(__name__)

APPLY = '@'


class GraphError(Exception):
    """Base exception for term graph errors."""


@dataclass
class TermGraph:
    labels: dict[int, Optional[str]]
    succ: dict[int, tuple[int, ...]]
    types: dict[int, SimpleType]
    root: int
    next_id: int = 0

    def __len__(self) -> int:
        return len(self.labels)

    def add_vertex(self, label: Optional[str], ty: SimpleType, successors: tuple[int, ...] = ()) -> int:
        vertex = self.next_id
        self.next_id += 1
        self.labels[vertex] = label
        self.succ[vertex] = successors
        self.types[vertex] = ty
        return vertex

    def add_term(self, term: Term) -> int:
        """Insert `term` as a fresh tree; returns its root vertex."""
        if isinstance(term, App):
            left = self.add_term(term.left)
            right = self.add_term(term.right)
            return self.add_vertex(APPLY, term.type, (left, right))
        return self.add_vertex(term.name if isinstance(term, Sym) else None, term.type)

    def in_degrees(self) -> dict[int, int]:
        degrees = {vertex: 0 for vertex in self.labels}
        for successors in self.succ.values():
            for target in successors:
                degrees[target] += 1
        return degrees

    def shared(self) -> list[int]:
        return sorted(vertex for vertex, degree in self.in_degrees().items() if degree > 1)

    def reachable(self) -> set[int]:
        seen = {self.root}
        stack = [self.root]
        while stack:
            for target in self.succ[stack.pop()]:
                if target not in seen:
                    seen.add(target)
                    stack.append(target)
        return seen

    def collect_garbage(self) -> int:
        live = self.reachable()
        dead = [vertex for vertex in self.labels if vertex not in live]
        for vertex in dead:
            del self.labels[vertex], self.succ[vertex], self.types[vertex]
        return len(dead)

    def is_acyclic(self) -> bool:
        state: dict[int, int] = {}
        for start in self.labels:
            if start in state:
                continue
            stack = [(start, iter(self.succ[start]))]
            state[start] = 1
            while stack:
                vertex, successors = stack[-1]
                target = next(successors, None)
                if target is None:
                    state[vertex] = 2
                    stack.pop()
                elif state.get(target) == 1:
                    return False
                elif target not in state:
                    state[target] = 1
                    stack.append((target, iter(self.succ[target])))
        return True

    def check(self) -> None:
        for vertex, label in self.labels.items():
            if (label == APPLY) != (len(self.succ[vertex]) == 2):
                raise GraphError(f"vertex {vertex} labeled {label} has {len(self.succ[vertex])} successors")
        if not self.is_acyclic():
            raise GraphError("term graph has a cycle")
        if self.reachable() != set(self.labels):
            raise GraphError("term graph has unreachable vertices")

    def dump(self) -> list[str]:
        """`root <id>` then one `<id> <label|_> <succ...>` line per vertex."""
        lines = [f"root {self.root}"]
        for vertex in sorted(self.labels):
            label = self.labels[vertex] or '_'
            lines.append(' '.join([str(vertex), label] + [str(s) for s in self.succ[vertex]]))
        return lines

    def to_dot(self) -> str:
        out = ['digraph term_graph {', 'node [', 'fontsize = "12",', 'shape = "box"', '];']
        for vertex in sorted(self.labels):
            label = self.labels[vertex] or '_'
            shape = ', shape = "doubleoctagon"' if vertex == self.root else ''
            out.append(f'{vertex} [label="{label}"{shape}];')
        for vertex in sorted(self.labels):
            for index, target in enumerate(self.succ[vertex], start=1):
                out.append(f'{vertex} -> {target} [label="{index}"];')
        out.append('}')
        return '\n'.join(out)


def to_graph(term: Term) -> TermGraph:
    """Tree-shaped graph with one vertex per position, numbered in pre-order."""
    graph = TermGraph({}, {}, {}, 0, 0)
    ids: dict[Position, int] = {}
    order: list[tuple[Position, Term]] = []
    stack: list[tuple[Position, Term]] = [(ROOT, term)]
    while stack:
        pos, node = stack.pop()
        ids[pos] = len(order)
        order.append((pos, node))
        if isinstance(node, App):
            stack.append((pos + (2,), node.right))
            stack.append((pos + (1,), node.left))
    for pos, node in order:
        vertex = ids[pos]
        if isinstance(node, App):
            graph.labels[vertex] = APPLY
            graph.succ[vertex] = (ids[pos + (1,)], ids[pos + (2,)])
        else:
            graph.labels[vertex] = node.name if isinstance(node, Sym) else None
            graph.succ[vertex] = ()
        graph.types[vertex] = node.type
    graph.next_id = len(order)
    return graph


def from_graph(graph: TermGraph) -> Term:
    """Unravel sharing; each unlabeled vertex v becomes the variable x<v>."""
    built: dict[int, Term] = {}
    stack = [graph.root]
    while stack:
        vertex = stack[-1]
        if vertex in built:
            stack.pop()
            continue
        label = graph.labels[vertex]
        if label == APPLY:
            pending = [s for s in graph.succ[vertex] if s not in built]
            if pending:
                stack.extend(reversed(pending))
                continue
            left, right = graph.succ[vertex]
            built[vertex] = App(built[left], built[right], graph.types[vertex])
        elif label is None:
            built[vertex] = Var(f"x{vertex}", graph.types[vertex])
        else:
            built[vertex] = Sym(label, graph.types[vertex])
        stack.pop()
    return built[graph.root]


# ── Redexes ──

@dataclass(frozen=True)
class GraphRedex:
    rule: Optional[int]
    vertex: int
    phi: dict[Position, int] = field(default_factory=dict)
    oracle: Optional[str] = None


def _spine(graph: TermGraph, vertex: int) -> tuple[int, list[int]]:
    args: list[int] = []
    while graph.labels[vertex] == APPLY:
        left, right = graph.succ[vertex]
        args.append(right)
        vertex = left
    args.reverse()
    return vertex, args


def _same(graph: TermGraph, a: int, b: int) -> bool:
    if a == b:
        return True
    if graph.labels[a] != graph.labels[b] or graph.labels[a] is None:
        return False
    return all(_same(graph, x, y) for x, y in zip(graph.succ[a], graph.succ[b]))


def match_graph(pattern: Term, graph: TermGraph, vertex: int) -> Optional[dict[Position, int]]:
    """Homomorphism from the tree of `pattern` into the graph at `vertex`."""
    phi: dict[Position, int] = {}
    bound: dict[str, int] = {}
    stack: list[tuple[Term, Position, int]] = [(pattern, ROOT, vertex)]
    while stack:
        node, pos, target = stack.pop()
        phi[pos] = target
        if isinstance(node, Var):
            seen = bound.setdefault(node.name, target)
            if not _same(graph, seen, target):
                return None
        elif isinstance(node, Sym):
            if graph.labels[target] != node.name:
                return None
        else:
            if graph.labels[target] != APPLY:
                return None
            left, right = graph.succ[target]
            stack.append((node.right, pos + (2,), right))
            stack.append((node.left, pos + (1,), left))
    return phi


def _redex_at(strs: Strs, graph: TermGraph, vertex: int) -> Optional[GraphRedex]:
    if graph.labels[vertex] != APPLY:
        head, args = vertex, []
    else:
        head, args = _spine(graph, vertex)
    label = graph.labels[head]
    if label is None or label == APPLY:
        return None
    decl = strs.signature.symbols.get(label)
    if decl is not None and decl.kind is SymbolKind.ORACLE:
        return GraphRedex(None, vertex, {}, label) if len(args) == 1 else None
    for number in strs.rules_for(label, len(args)):
        phi = match_graph(strs.rules[number].lhs, graph, vertex)
        if phi is not None:
            return GraphRedex(number, vertex, phi)
    return None


def find_graph_redex(strs: Strs, graph: TermGraph) -> Optional[GraphRedex]:
    """First redex in depth-first post-order from the root, each vertex visited once."""
    visited: set[int] = set()
    stack: list[tuple[int, bool]] = [(graph.root, False)]
    while stack:
        vertex, expanded = stack.pop()
        if expanded:
            redex = _redex_at(strs, graph, vertex)
            if redex is not None:
                return redex
            continue
        if vertex in visited:
            continue
        visited.add(vertex)
        stack.append((vertex, True))
        for target in reversed(graph.succ[vertex]):
            if target not in visited:
                stack.append((target, False))
    return None


# ── Contraction ──

def _build(graph: TermGraph, rhs: Term, lhs_vars: dict[str, Position],
           phi: dict[Position, int]) -> int:
    if isinstance(rhs, Var):
        return phi[lhs_vars[rhs.name]]
    if isinstance(rhs, Sym):
        return graph.add_vertex(rhs.name, rhs.type)
    left = _build(graph, rhs.left, lhs_vars, phi)
    right = _build(graph, rhs.right, lhs_vars, phi)
    return graph.add_vertex(APPLY, rhs.type, (left, right))


def _redirect(graph: TermGraph, old: int, new: int) -> None:
    for vertex, successors in graph.succ.items():
        if old in successors:
            graph.succ[vertex] = tuple(new if s == old else s for s in successors)
    if graph.root == old:
        graph.root = new


def contract(strs: Strs, graph: TermGraph, redex: GraphRedex,
             oracle: Optional[OracleTable] = None) -> Optional[OracleCall]:
    """Contract `redex` in place; returns the oracle call for oracle redexes."""
    call = None
    if redex.oracle is None:
        assert redex.rule is not None
        rule = strs.rules[redex.rule]
        lhs_vars = {name: where[0] for name, where in variable_positions(rule.lhs).items()}
        target = _build(graph, rule.rhs, lhs_vars, redex.phi)
    else:
        argument = graph.succ[redex.vertex][1]
        query = decode_word(from_graph(_subgraph(graph, argument)))
        if query is None:
            raise OracleError(f"oracle {redex.oracle} queried on a non-word")
        if oracle is None:
            raise OracleError(f"no oracle table for {redex.oracle}", query)
        try:
            answer = oracle.lookup(query)
        except OracleMissError as e:
            raise OracleError(str(e), query) from e
        call = OracleCall(redex.oracle, query, answer)
        target = graph.add_term(encode_word(answer))
    _redirect(graph, redex.vertex, target)
    graph.collect_garbage()
    if GRAPH_DEBUG_CHECKS:
        graph.check()
    return call


def _subgraph(graph: TermGraph, vertex: int) -> TermGraph:
    return TermGraph(graph.labels, graph.succ, graph.types, vertex, graph.next_id)


@dataclass
class GraphStats:
    steps: int = 0
    max_nodes: int = 0
    node_counts: list[int] = field(default_factory=list)
    oracle_steps: list[bool] = field(default_factory=list)
    oracle_calls: int = 0
    max_query_len: int = 0
    normal_form: bool = False


def normalize_graph(strs: Strs, oracle: Optional[OracleTable], graph: TermGraph,
                    max_steps: int = MAX_STEPS) -> tuple[TermGraph, GraphStats]:
    """Contract innermost redexes until none is left or the budget runs out."""
    graph.collect_garbage()
    stats = GraphStats(max_nodes=len(graph), node_counts=[len(graph)])
    while True:
        redex = find_graph_redex(strs, graph)
        if redex is None:
            stats.normal_form = True
            break
        if stats.steps >= max_steps:
            logger.warning(f"Graph step budget of {max_steps} exhausted")
            break
        call = contract(strs, graph, redex, oracle)
        stats.steps += 1
        stats.node_counts.append(len(graph))
        stats.oracle_steps.append(call is not None)
        stats.max_nodes = max(stats.max_nodes, len(graph))
        if call is not None:
            stats.oracle_calls += 1
            stats.max_query_len = max(stats.max_query_len, len(call.query))
    logger.info(f"Graph normalized in {stats.steps} steps, max {stats.max_nodes} vertices")
    return graph, stats
