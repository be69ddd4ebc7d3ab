"""Graphs, cuts and the two inequality representations.

Nodes are ``Node(party, index)`` with party in ``"X"``, ``"A"``, ``"B"``.
Two graph kinds exist: ``complete`` (all pairs) and ``tripartite`` (only
X-A, X-B and A-B pairs).  Edge order is fixed: X-A, X-B, A-B (lex), then
A-A and B-B for complete graphs.

All coefficients are :class:`fractions.Fraction`; nothing is ever rounded.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

COMPLETE = "complete"
TRIPARTITE = "tripartite"
KINDS = (COMPLETE, TRIPARTITE)

_PARTY_ORDER = {"X": 0, "A": 1, "B": 2}


class ModelError(ValueError):
    pass


class Node(NamedTuple):
    party: str
    index: int = 0

    def __str__(self) -> str:
        return "X" if self.party == "X" else f"{self.party}{self.index}"

    @property
    def sort_key(self) -> tuple[int, int]:
        return (_PARTY_ORDER[self.party], self.index)


X = Node("X", 0)


def A(i: int) -> Node:
    return Node("A", i)


def B(j: int) -> Node:
    return Node("B", j)


Edge = tuple[Node, Node]

_NODE_RE = re.compile(r"X|[AB][1-9][0-9]*")


def parse_node(text: str) -> Node:
    if text == "X":
        return X
    if not _NODE_RE.fullmatch(text):
        raise ModelError(f"bad node label {text!r}")
    return Node(text[0], int(text[1:]))


def parse_edge_label(text: str) -> Edge:
    """``"A1B2"`` -> (A1, B2); ``"XA3"`` -> (X, A3)."""
    parts = _NODE_RE.findall(text)
    if len(parts) != 2 or "".join(parts) != text:
        raise ModelError(f"bad edge label {text!r}")
    return normalize_edge(parse_node(parts[0]), parse_node(parts[1]))


def edge_label(edge: Edge) -> str:
    return f"{edge[0]}{edge[1]}"


def normalize_edge(u: Node, v: Node) -> Edge:
    if u == v:
        raise ModelError(f"loop edge at {u}")
    return (u, v) if u.sort_key < v.sort_key else (v, u)


@dataclass(frozen=True)
class Graph:
    kind: str
    nA: int
    nB: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown graph kind {self.kind!r}")
        if self.nA < 0 or self.nB < 0:
            raise ModelError("negative party size")

    @cached_property
    def nodes(self) -> tuple[Node, ...]:
        return (X,) + self.observables

    @cached_property
    def observables(self) -> tuple[Node, ...]:
        """Non-X nodes in bit order: A1..AnA, B1..BnB."""
        return tuple(A(i) for i in range(1, self.nA + 1)) + tuple(
            B(j) for j in range(1, self.nB + 1))

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        alice = [A(i) for i in range(1, self.nA + 1)]
        bob = [B(j) for j in range(1, self.nB + 1)]
        out = [(X, a) for a in alice] + [(X, b) for b in bob]
        out += [(a, b) for a in alice for b in bob]
        if self.kind == COMPLETE:
            out += [(alice[i], alice[k]) for i in range(len(alice))
                    for k in range(i + 1, len(alice))]
            out += [(bob[i], bob[k]) for i in range(len(bob))
                    for k in range(i + 1, len(bob))]
        return tuple(out)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: k for k, e in enumerate(self.edges)}

    @property
    def dim(self) -> int:
        return len(self.edges)

    @property
    def n_observables(self) -> int:
        return self.nA + self.nB

    def has_node(self, node: Node) -> bool:
        if node.party == "X":
            return node.index == 0
        size = self.nA if node.party == "A" else self.nB
        return 1 <= node.index <= size

    def __str__(self) -> str:
        return f"{self.kind}({self.nA},{self.nB})"


def build_graph(kind: str, nA: int, nB: int) -> Graph:
    if nA < 0 or nB < 0:
        raise ModelError("party sizes must be nonnegative")
    if nA + nB < 1:
        raise ModelError("a graph needs at least one observable")
    return Graph(kind, nA, nB)


def complete_graph(nA: int, nB: int) -> Graph:
    return build_graph(COMPLETE, nA, nB)


def tripartite_graph(nA: int, nB: int) -> Graph:
    return build_graph(TRIPARTITE, nA, nB)


# --------------------------------------------------------------------- cuts

Cut = frozenset  # of Node; X never belongs to a cut


def enumerate_cuts(graph: Graph) -> Iterator[frozenset]:
    """All 2^(nA+nB) cuts, binary counting with A1 as the lowest bit."""
    obs = graph.observables
    for mask in range(1 << len(obs)):
        yield frozenset(obs[k] for k in range(len(obs)) if mask >> k & 1)


def check_cut(graph: Graph, cut: Iterable[Node]) -> frozenset:
    cut = frozenset(cut)
    for node in cut:
        if node == X:
            raise ModelError("X is never a member of a cut")
        if not graph.has_node(node):
            raise ModelError(f"node {node} not in {graph}")
    return cut


def cut_vector(graph: Graph, cut: Iterable[Node]) -> tuple[int, ...]:
    cut = check_cut(graph, cut)
    return tuple(int((u in cut) != (v in cut)) for u, v in graph.edges)


# ----------------------------------------------------------------- helpers

def _frac(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise ModelError("floating point coefficients are not accepted")
    return Fraction(value)


def primitive_scale(values: Sequence[Fraction]) -> Fraction:
    """Positive factor turning ``values`` into a primitive integer vector."""
    nonzero = [v for v in values if v]
    if not nonzero:
        return Fraction(1)
    lcm = 1
    for v in nonzero:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    g = 0
    for v in nonzero:
        g = math.gcd(g, int(v * lcm))
    return Fraction(lcm, g)


# ------------------------------------------------------------ inequalities

@dataclass(frozen=True)
class CutIneq:
    """``coeffs . x <= rhs`` over the edge coordinates of ``graph``.

    ``coeffs`` is dense, aligned with ``graph.edges``.
    """
    graph: Graph
    coeffs: tuple[Fraction, ...]
    rhs: Fraction = Fraction(0)

    def __post_init__(self):
        coeffs = tuple(_frac(c) for c in self.coeffs)
        if len(coeffs) != self.graph.dim:
            raise ModelError(
                f"{len(coeffs)} coefficients for {self.graph.dim} edges")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", _frac(self.rhs))

    @classmethod
    def from_terms(cls, graph: Graph, terms: Mapping, rhs=0) -> "CutIneq":
        """Build from ``{edge or label: value}``; absent edges are zero."""
        coeffs = [Fraction(0)] * graph.dim
        for key, value in terms.items():
            edge = parse_edge_label(key) if isinstance(key, str) else \
                normalize_edge(*key)
            if edge not in graph.edge_index:
                raise ModelError(f"edge {edge_label(edge)} not in {graph}")
            coeffs[graph.edge_index[edge]] += _frac(value)
        return cls(graph, tuple(coeffs), _frac(rhs))

    @classmethod
    def zero(cls, graph: Graph) -> "CutIneq":
        return cls(graph, (Fraction(0),) * graph.dim, Fraction(0))

    def coeff(self, u: Node, v: Node) -> Fraction:
        idx = self.graph.edge_index.get(normalize_edge(u, v))
        return Fraction(0) if idx is None else self.coeffs[idx]

    def terms(self) -> dict[Edge, Fraction]:
        return {e: c for e, c in zip(self.graph.edges, self.coeffs) if c}

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def scaled(self, factor) -> "CutIneq":
        factor = _frac(factor)
        return CutIneq(self.graph, tuple(c * factor for c in self.coeffs),
                       self.rhs * factor)

    def normalized(self) -> "CutIneq":
        return self.scaled(primitive_scale(self.coeffs + (self.rhs,)))

    def incident(self, node: Node) -> list[Fraction]:
        return [c for (u, v), c in zip(self.graph.edges, self.coeffs)
                if node in (u, v)]

    def __str__(self) -> str:
        return format_linear(
            [(c, f"x_{edge_label(e)}") for e, c in self.terms().items()],
            self.rhs)


@dataclass(frozen=True)
class CgIneq:
    """Collins-Gisin form: rows of ``joint`` are Alice, columns Bob."""
    alice: tuple[Fraction, ...]
    bob: tuple[Fraction, ...]
    joint: tuple[tuple[Fraction, ...], ...]
    rhs: Fraction = Fraction(0)

    def __post_init__(self):
        alice = tuple(_frac(v) for v in self.alice)
        bob = tuple(_frac(v) for v in self.bob)
        joint = tuple(tuple(_frac(v) for v in row) for row in self.joint)
        if len(joint) != len(alice) or any(len(r) != len(bob) for r in joint):
            raise ModelError("joint matrix shape does not match marginals")
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)
        object.__setattr__(self, "joint", joint)
        object.__setattr__(self, "rhs", _frac(self.rhs))

    @property
    def mA(self) -> int:
        return len(self.alice)

    @property
    def mB(self) -> int:
        return len(self.bob)

    @classmethod
    def zero(cls, mA: int, mB: int) -> "CgIneq":
        z = Fraction(0)
        return cls((z,) * mA, (z,) * mB, ((z,) * mB,) * mA, z)

    def flat(self) -> tuple[Fraction, ...]:
        return self.alice + self.bob + tuple(v for row in self.joint
                                             for v in row)

    def is_zero(self) -> bool:
        return not any(self.flat())

    def scaled(self, factor) -> "CgIneq":
        f = _frac(factor)
        return CgIneq(tuple(v * f for v in self.alice),
                      tuple(v * f for v in self.bob),
                      tuple(tuple(v * f for v in row) for row in self.joint),
                      self.rhs * f)

    def normalized(self) -> "CgIneq":
        return self.scaled(primitive_scale(self.flat() + (self.rhs,)))

    def transposed(self) -> "CgIneq":
        """Party swap."""
        joint = tuple(tuple(self.joint[i][j] for i in range(self.mA))
                      for j in range(self.mB))
        return CgIneq(self.bob, self.alice, joint, self.rhs)

    def evaluate(self, alice_bits: Sequence[int], bob_bits: Sequence[int]
                 ) -> Fraction:
        """Left-hand side at a deterministic assignment."""
        total = sum((c for c, a in zip(self.alice, alice_bits) if a),
                    Fraction(0))
        total += sum((c for c, b in zip(self.bob, bob_bits) if b),
                     Fraction(0))
        for row, a in zip(self.joint, alice_bits):
            if a:
                total += sum((c for c, b in zip(row, bob_bits) if b),
                             Fraction(0))
        return total

    def __str__(self) -> str:
        terms = [(c, f"q_A{i + 1}") for i, c in enumerate(self.alice)]
        terms += [(c, f"q_B{j + 1}") for j, c in enumerate(self.bob)]
        terms += [(c, f"q_A{i + 1}B{j + 1}") for i, row in
                  enumerate(self.joint) for j, c in enumerate(row)]
        return format_linear([t for t in terms if t[0]], self.rhs)


def format_linear(terms: list[tuple[Fraction, str]], rhs: Fraction) -> str:
    if not terms:
        return f"0 <= {rhs}"
    parts = []
    for k, (c, name) in enumerate(terms):
        sign = "-" if c < 0 else ("+" if k else "")
        mag = abs(c)
        body = name if mag == 1 else f"{mag}{name}"
        parts.append(f"{sign} {body}" if k else f"{sign}{body}")
    return " ".join(parts) + f" <= {rhs}"


# -------------------------------------------------------------- evaluation

def evaluate(ineq: CutIneq, cut: Iterable[Node]) -> Fraction:
    cut = check_cut(ineq.graph, cut)
    return sum((c for (u, v), c in zip(ineq.graph.edges, ineq.coeffs)
                if c and (u in cut) != (v in cut)), Fraction(0))


def cut_value(ineq: CutIneq, cut: Iterable[Node]) -> Fraction:
    """Same as :func:`evaluate` but through the explicit cut vector."""
    vec = cut_vector(ineq.graph, cut)
    return sum((c * d for c, d in zip(ineq.coeffs, vec)), Fraction(0))


# -------------------------------------------------------------- conversion

def convert_cut_to_cg(ineq: CutIneq) -> CgIneq:
    """Affine isomorphism from cut coordinates to Collins-Gisin ones.

    Uses x_XAi = q_Ai, x_XBj = q_Bj, x_AiBj = q_Ai + q_Bj - 2 q_AiBj.
    The result is a primitive integer vector.
    """
    g = ineq.graph
    if g.kind != TRIPARTITE:
        raise ModelError("conversion needs a tripartite graph")
    alice = [ineq.coeff(X, A(i)) for i in range(1, g.nA + 1)]
    bob = [ineq.coeff(X, B(j)) for j in range(1, g.nB + 1)]
    joint = []
    for i in range(1, g.nA + 1):
        row = []
        for j in range(1, g.nB + 1):
            a = ineq.coeff(A(i), B(j))
            alice[i - 1] += a
            bob[j - 1] += a
            row.append(-2 * a)
        joint.append(tuple(row))
    return CgIneq(tuple(alice), tuple(bob), tuple(joint), ineq.rhs).normalized()


def convert_cg_to_cut(ineq: CgIneq) -> CutIneq:
    """Inverse map: q_AiBj = (x_XAi + x_XBj - x_AiBj) / 2."""
    g = Graph(TRIPARTITE, ineq.mA, ineq.mB)
    terms: dict[Edge, Fraction] = {}
    half = Fraction(1, 2)
    for i, c in enumerate(ineq.alice, 1):
        terms[(X, A(i))] = c
    for j, c in enumerate(ineq.bob, 1):
        terms[(X, B(j))] = c
    for i, row in enumerate(ineq.joint, 1):
        for j, c in enumerate(row, 1):
            terms[(X, A(i))] += c * half
            terms[(X, B(j))] += c * half
            terms[(A(i), B(j))] = -c * half
    return CutIneq.from_terms(g, terms, ineq.rhs).normalized()


def to_tripartite(ineq: CutIneq) -> CutIneq:
    """Drop the intra-party coordinates of a complete-graph inequality.

    Every A-A and B-B coefficient has to be zero already.
    """
    g = ineq.graph
    if g.kind == TRIPARTITE:
        return ineq
    target = Graph(TRIPARTITE, g.nA, g.nB)
    terms = ineq.terms()
    for (u, v), c in terms.items():
        if u.party == v.party:
            raise ModelError(
                f"intra-party term {edge_label((u, v))} has coefficient {c}")
    return CutIneq.from_terms(target, terms, ineq.rhs)


def to_complete(ineq: CutIneq) -> CutIneq:
    g = ineq.graph
    if g.kind == COMPLETE:
        return ineq
    return CutIneq.from_terms(Graph(COMPLETE, g.nA, g.nB), ineq.terms(),
                              ineq.rhs)


def relabel(ineq: CutIneq, mapping: Mapping[Node, Node], graph: Graph
            ) -> CutIneq:
    """Move every nonzero term along ``mapping`` onto ``graph``."""
    terms = {}
    for (u, v), c in ineq.terms().items():
        terms[normalize_edge(mapping[u], mapping[v])] = c
    return CutIneq.from_terms(graph, terms, ineq.rhs)
