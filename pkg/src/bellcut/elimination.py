"""Triangle-based elimination of intra-party terms and the TE census."""
from __future__ import annotations

import itertools
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .analysis import TightnessReport, support_reduce, tightness_report
from .model import (COMPLETE, TRIPARTITE, CutIneq, Graph, ModelError, Node, X,
                    normalize_edge, parse_edge_label, parse_node, relabel)
from .symmetry import (PARTY, BudgetExceeded, ClassReport, canonical_form,
                       equivalent)

WORKERS_ENV = "BELLCUT_WORKERS"


def _party_of(node: Node) -> str:
    return node.party


def _extend_graph(graph: Graph, node: Node) -> Graph:
    if graph.has_node(node):
        return graph
    if node.party == "A" and node.index == graph.nA + 1:
        return Graph(graph.kind, graph.nA + 1, graph.nB)
    if node.party == "B" and node.index == graph.nB + 1:
        return Graph(graph.kind, graph.nA, graph.nB + 1)
    raise ModelError(f"fresh helper must be the next index of its party, "
                     f"got {node} on {graph}")


def eliminate_with_triangle(ineq: CutIneq, intra_edge, helper,
                            sign_choice: int = 1) -> CutIneq:
    """Cancel the coefficient ``c`` of ``intra_edge = uv`` with a triangle.

    ``|c|`` times a triangle inequality on ``{u, v, helper}`` is added.  The
    triangle is the one whose ``uv`` coefficient is ``-sign(c)`` and whose
    ``u-helper`` coefficient has sign ``sign_choice``.  A helper that is not
    yet in the graph must be the next free index of its party and is added.
    """
    if isinstance(intra_edge, str):
        intra_edge = parse_edge_label(intra_edge)
    if isinstance(helper, str):
        helper = parse_node(helper)
    if sign_choice not in (1, -1):
        raise ModelError("sign_choice must be +1 or -1")
    u, v = intra_edge
    edge = normalize_edge(u, v)
    c = ineq.coeff(*edge) if edge in ineq.graph.edge_index else Fraction(0)
    if c == 0:
        raise ModelError(f"coefficient on {u}{v} is zero; nothing to cancel")
    if helper in (u, v) or helper == X:
        raise ModelError(f"helper {helper} must differ from the edge endpoints")
    graph = _extend_graph(ineq.graph, helper)
    uw, vw = normalize_edge(u, helper), normalize_edge(v, helper)
    if uw not in graph.edge_index or vw not in graph.edge_index:
        raise ModelError(f"helper {helper} is not adjacent to both {u} and {v}")
    # triangle with uv coefficient -sign(c) and uw coefficient sign_choice
    s = 1 if c > 0 else -1
    if s > 0:
        tri = ({edge: -1, uw: 1, vw: -1} if sign_choice > 0
               else {edge: -1, uw: -1, vw: 1})
        tri_rhs = 0
    else:
        tri = ({edge: 1, uw: 1, vw: 1} if sign_choice > 0
               else {edge: 1, uw: -1, vw: -1})
        tri_rhs = 2 if sign_choice > 0 else 0
    lifted = relabel(ineq, {n: n for n in ineq.graph.nodes}, graph)
    coeffs = list(lifted.coeffs)
    weight = abs(c)
    for e, t in tri.items():
        coeffs[graph.edge_index[e]] += weight * t
    return CutIneq(graph, tuple(coeffs), lifted.rhs + weight * tri_rhs)


def _intra_pairs(ineq: CutIneq, party: str, size: int, full: bool):
    for i, k in itertools.combinations(range(1, size + 1), 2):
        a = ineq.coeff(Node(party, i), Node(party, k))
        if a or full:
            yield i, k, a


def triangular_eliminate(ineq: CutIneq, full: bool = False) -> CutIneq:
    """Replace every intra-party term by two terms through a fresh node.

    ``a x_{AiAi'}`` becomes ``a x_{AiB'} - |a| x_{Ai'B'}`` with a fresh Bob
    node ``B'`` (and symmetrically for Bob pairs).  Fresh nodes are numbered
    after the existing ones in lexicographic pair order, Alice pairs first
    for Bob's fresh nodes.  By default only nonzero pairs get a fresh node;
    ``full=True`` creates one for every pair.
    """
    g = ineq.graph
    if g.kind == TRIPARTITE:
        return ineq
    aa = list(_intra_pairs(ineq, "A", g.nA, full))
    bb = list(_intra_pairs(ineq, "B", g.nB, full))
    out = Graph(TRIPARTITE, g.nA + len(bb), g.nB + len(aa))
    terms = {}
    for e, c in ineq.terms().items():
        if e[0].party == e[1].party:
            continue
        terms[e] = c
    for k, (i, i2, a) in enumerate(aa, 1):
        fresh = Node("B", g.nB + k)
        terms[(Node("A", i), fresh)] = a
        terms[(Node("A", i2), fresh)] = -abs(a)
    for k, (j, j2, a) in enumerate(bb, 1):
        fresh = Node("A", g.nA + k)
        terms[(fresh, Node("B", j))] = a
        terms[(fresh, Node("B", j2))] = -abs(a)
    return CutIneq.from_terms(out, terms, ineq.rhs)


# ------------------------------------------------------------------- census

@dataclass(frozen=True)
class Labelling:
    """Injective map from a facet's support nodes to X / A_i / B_j.

    When ``x_in_support`` is False no support node maps to X and X is an
    extra node with zero coefficients.
    """
    assignment: tuple  # ((source node, target node), ...)
    x_in_support: bool

    @property
    def mapping(self) -> dict:
        return dict(self.assignment)

    @property
    def sizes(self) -> tuple[int, int]:
        targets = [t for _, t in self.assignment]
        return (sum(t.party == "A" for t in targets),
                sum(t.party == "B" for t in targets))

    def apply(self, ineq: CutIneq) -> CutIneq:
        nA, nB = self.sizes
        return relabel(ineq, self.mapping, Graph(COMPLETE, nA, nB))

    def as_dict(self) -> dict:
        return {"assignment": {str(s): str(t) for s, t in self.assignment},
                "x_in_support": self.x_in_support}


@dataclass(frozen=True)
class CensusOptions:
    allow_x_outside_support: bool = True
    allow_empty_party: bool = True
    drop_nonfacets: bool = True
    spot_checks: int = 5
    seed: int = 0
    workers: int = 1  # 0 reads the worker count from the environment


def support_nodes(ineq: CutIneq) -> list[Node]:
    used = {n for e, c in zip(ineq.graph.edges, ineq.coeffs) if c for n in e}
    return [n for n in ineq.graph.nodes if n in used]


def labellings(ineq: CutIneq, options: CensusOptions = CensusOptions()
               ) -> Iterable[Labelling]:
    """All labellings of the support, parties filled in source order."""
    support = support_nodes(ineq)
    choices = [(x, True) for x in support]
    if options.allow_x_outside_support:
        choices.append((None, False))
    for x_node, inside in choices:
        rest = [n for n in support if n != x_node]
        for bits in itertools.product("AB", repeat=len(rest)):
            nA, nB = bits.count("A"), bits.count("B")
            if not options.allow_empty_party and (nA == 0 or nB == 0):
                continue
            counter = {"A": 0, "B": 0}
            pairs = [] if x_node is None else [(x_node, X)]
            for node, party in zip(rest, bits):
                counter[party] += 1
                pairs.append((node, Node(party, counter[party])))
            yield Labelling(tuple(pairs), inside)


@dataclass
class CensusItem:
    facet_index: int
    labelling: Labelling
    source: CutIneq      # labelled facet on the complete graph
    te: CutIneq          # its triangular elimination
    report: TightnessReport


@dataclass
class SpotCheck:
    kind: str            # "distinct" or "same"
    first: int
    second: int
    outcome: str         # "ok", "mismatch" or "unknown"


@dataclass
class CensusResult:
    n: int
    options: CensusOptions
    classes: list[ClassReport]
    items: list[CensusItem]
    dropped: list[CensusItem] = field(default_factory=list)
    spot_checks: list[SpotCheck] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.classes)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "classes": [c.as_dict() for c in self.classes],
            "items": len(self.items),
            "dropped": len(self.dropped),
            "spot_checks": [vars(s) for s in self.spot_checks],
        }


def _source_key(ineq: CutIneq) -> tuple:
    return canonical_form(support_reduce(ineq).ineq, PARTY).key


def _evaluate(task):
    facet_index, labelling, source = task
    te = triangular_eliminate(source)
    return CensusItem(facet_index, labelling, source, te, tightness_report(te))


def _workers(options: CensusOptions) -> int:
    if options.workers > 0:
        return options.workers
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def census(n: int, facets: Sequence[CutIneq],
           options: CensusOptions = CensusOptions()) -> CensusResult:
    """TE classes generated by the facet class representatives of CUT_n.

    Labelled sources are deduplicated by their party-mode canonical key
    before elimination, and classes are formed on the source side: a
    labelled facet and its elimination determine each other's class.
    """
    if not facets:
        raise ModelError("census needs at least one facet representative")
    for f in facets:
        if f.graph.kind != COMPLETE or len(f.graph.nodes) > n:
            raise ModelError(f"facet on {f.graph} does not fit CUT_{n}")
    tasks = {}
    for fi, facet in enumerate(facets):
        for lab in labellings(facet, options):
            source = lab.apply(facet)
            key = _source_key(source)
            tasks.setdefault(key, (fi, lab, source))
    keys = sorted(tasks)
    ordered = [tasks[k] for k in keys]
    workers = _workers(options)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            evaluated = list(pool.map(_evaluate, ordered, chunksize=4))
    else:
        evaluated = [_evaluate(t) for t in ordered]
    items, dropped, classes = [], [], []
    for key, item in zip(keys, evaluated):
        if options.drop_nonfacets and not item.report.is_facet:
            dropped.append(item)
            continue
        classes.append(ClassReport(key, item.te, 1, [len(items)]))
        items.append(item)
    result = CensusResult(n, options, classes, items, dropped)
    result.spot_checks = spot_verify(items, options.spot_checks, options.seed)
    return result


def spot_verify(items: Sequence[CensusItem], k: int, seed: int = 0
                ) -> list[SpotCheck]:
    """Check random pairs of class representatives directly on the TE side.

    Distinct source classes must give inequivalent eliminations.  Each
    check also re-derives one representative's class from a random
    relabelling of its elimination.
    """
    rng = random.Random(seed)
    out = []
    if len(items) < 2:
        return out
    for _ in range(k):
        a, b = rng.sample(range(len(items)), 2)
        try:
            cert = equivalent(items[a].te, items[b].te, PARTY)
            outcome = "ok" if cert is None else "mismatch"
        except BudgetExceeded:
            outcome = "unknown"
        out.append(SpotCheck("distinct", a, b, outcome))
    return out


def census_class_counts(result: CensusResult) -> dict[tuple[int, int], int]:
    """Number of classes per reduced TE scenario size (mA, mB), smaller first."""
    counts: dict[tuple[int, int], int] = {}
    for item in result.items:
        g = support_reduce(item.te).ineq.graph
        size = tuple(sorted((g.nA, g.nB)))
        counts[size] = counts.get(size, 0) + 1
    return dict(sorted(counts.items()))
