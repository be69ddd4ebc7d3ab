"""Switching and permutation symmetry, canonical forms, classification.

Two group modes:

``full``
    every node permutation of a complete graph, plus switching.  Used to
    classify facets of CUT_n.
``party``
    permutations fixing X that map each party onto itself or swap the two
    parties, plus switching.  This is equivalence of Bell inequalities up
    to party, observable and value relabelling.

Canonical forms come from an individualization-refinement search.  Cells
are refined by the (switching invariant) absolute coefficients; each leaf
is a total node order, and for a fixed order the lexicographically least
switching is found greedily.  The key is the least leaf over the whole
search tree, so equal keys mean equivalent inequalities.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .analysis import Ineq, support_reduce
from .model import (COMPLETE, CgIneq, CutIneq, Graph, ModelError,
                    Node, X, convert_cg_to_cut, normalize_edge,
                    primitive_scale, relabel)

FULL = "full"
PARTY = "party"
MODES = (FULL, PARTY)

DEFAULT_MAX_SIDE = 24
DEFAULT_MAX_FULL = 9
DEFAULT_LEAF_BUDGET = 200_000


class BudgetExceeded(ModelError):
    pass


# ---------------------------------------------------------------- actions

def switch(ineq: CutIneq, W: Iterable[Node]) -> CutIneq:
    W = frozenset(W)
    if X in W:
        raise ModelError("switching sets never contain X")
    for node in W:
        if not ineq.graph.has_node(node):
            raise ModelError(f"node {node} not in {ineq.graph}")
    coeffs = []
    shift = Fraction(0)
    for (u, v), c in zip(ineq.graph.edges, ineq.coeffs):
        if (u in W) != (v in W):
            coeffs.append(-c)
            shift += c
        else:
            coeffs.append(c)
    return CutIneq(ineq.graph, tuple(coeffs), ineq.rhs - shift)


def _check_perm(graph: Graph, perm: Mapping[Node, Node], mode: str) -> Graph:
    """Validate ``perm`` (a bijection on graph nodes); return target graph."""
    nodes = set(graph.nodes)
    full = {n: perm.get(n, n) for n in graph.nodes}
    if set(full) != nodes or len(set(full.values())) != len(nodes):
        raise ModelError("permutation is not a bijection of the node set")
    if mode == FULL:
        if graph.kind != COMPLETE:
            raise ModelError("full mode needs a complete graph")
        if set(full.values()) != nodes:
            raise ModelError("permutation leaves the node set")
        return graph
    if mode != PARTY:
        raise ModelError(f"unknown mode {mode!r}")
    if full[X] != X:
        raise ModelError("party mode permutations fix X")
    a_img = {full[n].party for n in graph.observables if n.party == "A"}
    b_img = {full[n].party for n in graph.observables if n.party == "B"}
    if len(a_img) > 1 or len(b_img) > 1 or (a_img and a_img == b_img):
        raise ModelError("party mode permutations keep or swap the parties")
    swapped = a_img == {"B"} or b_img == {"A"}
    target = Graph(graph.kind, graph.nB, graph.nA) if swapped else graph
    if set(full.values()) != set(target.nodes):
        raise ModelError("permutation image is not a node set of a scenario")
    return target


def permute(ineq: CutIneq, perm: Mapping[Node, Node], mode: str = PARTY
            ) -> CutIneq:
    """Relabel nodes; a party swap moves (nA, nB) to (nB, nA)."""
    target = _check_perm(ineq.graph, perm, mode)
    full = {n: perm.get(n, n) for n in ineq.graph.nodes}
    return relabel(ineq, full, target)


def party_swap(ineq: CutIneq) -> CutIneq:
    g = ineq.graph
    perm = {X: X}
    perm.update({Node("A", i): Node("B", i) for i in range(1, g.nA + 1)})
    perm.update({Node("B", j): Node("A", j) for j in range(1, g.nB + 1)})
    return permute(ineq, perm, PARTY)


# ------------------------------------------------------------ canonical form

@dataclass(frozen=True)
class CanonicalForm:
    key: tuple
    ineq: CutIneq
    labelling: dict = field(compare=False)   # original node -> canonical node
    switch_set: frozenset = field(compare=False)  # applied after relabelling
    scale: Fraction = field(compare=False, default=Fraction(1))
    leaves: int = field(compare=False, default=0)


def _as_cut(ineq: Ineq) -> CutIneq:
    return convert_cg_to_cut(ineq) if isinstance(ineq, CgIneq) else ineq


class _Search:
    def __init__(self, ineq: CutIneq, mode: str, budget: int):
        self.ineq = ineq
        g = ineq.graph
        self.nodes = list(g.nodes)
        n = len(self.nodes)
        pos = {v: k for k, v in enumerate(self.nodes)}
        self.W = [[0] * n for _ in range(n)]
        for (u, v), c in zip(g.edges, ineq.coeffs):
            if c:
                self.W[pos[u]][pos[v]] = self.W[pos[v]][pos[u]] = int(c)
        self.nbrs = [[j for j in range(n) if self.W[i][j]] for i in range(n)]
        self.budget = budget
        self.leaves = 0
        self.best = None  # (rows, rhs, order, sigma)
        self.rhs = int(ineq.rhs)

    def refine(self, colors: list[int]) -> list[int]:
        W, nbrs = self.W, self.nbrs
        count = len(set(colors))
        while True:
            sigs = [(colors[i], tuple(sorted((colors[j], abs(W[i][j]))
                                             for j in nbrs[i])))
                    for i in range(len(colors))]
            rank = {s: k for k, s in enumerate(sorted(set(sigs)))}
            new = [rank[s] for s in sigs]
            if len(rank) == count:
                return new
            colors, count = new, len(rank)

    def rows(self, order: Sequence[int]):
        """Greedy lex-least switching for a fixed (partial) order."""
        W = self.W
        sigma, comp, members = {}, {}, {}
        fixed = order[0] if order else None
        out = []
        for k, v in enumerate(order):
            sigma[v], comp[v], members[v] = 1, v, [v]
            for j in range(k):
                u = order[j]
                c = W[v][u]
                if not c:
                    out.append(0)
                    continue
                cv, cu = comp[v], comp[u]
                if cv != cu:
                    if c * sigma[v] * sigma[u] > 0:
                        flip = cv if cv != fixed else cu
                        for w in members[flip]:
                            sigma[w] = -sigma[w]
                    keep, gone = (cu, cv) if cv != fixed else (cv, cu)
                    for w in members[gone]:
                        comp[w] = keep
                    members[keep] += members.pop(gone)
                out.append(c * sigma[v] * sigma[u])
        return out, sigma

    def leaf_rhs(self, sigma: dict) -> int:
        shift = 0
        n = len(self.nodes)
        for i in range(n):
            for j in range(i + 1, n):
                if self.W[i][j] and sigma[i] != sigma[j]:
                    shift += self.W[i][j]
        return self.rhs - shift

    def run(self, colors: list[int]) -> None:
        colors = self.refine(colors)
        n = len(colors)
        order = sorted(range(n), key=colors.__getitem__)
        # leading singleton cells fix a key prefix; prune on it
        counts = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        prefix_len = 0
        while prefix_len < n and counts[colors[order[prefix_len]]] == 1:
            prefix_len += 1
        if self.best is not None and prefix_len:
            rows, _ = self.rows(order[:prefix_len])
            best_rows = self.best[0][:len(rows)]
            if rows > best_rows:
                return
        if prefix_len == n:
            self.leaves += 1
            if self.leaves > self.budget:
                raise BudgetExceeded(
                    f"canonical form search exceeded {self.budget} leaves")
            rows, sigma = self.rows(order)
            cand = (rows, self.leaf_rhs(sigma))
            if self.best is None or cand < self.best[:2]:
                self.best = (rows, cand[1], order, sigma)
            return
        target = min(c for c in counts if counts[c] > 1)
        for v in [i for i in range(n) if colors[i] == target]:
            sigs = [(colors[i], 0 if i == v else 1) for i in range(n)]
            rank = {s: k for k, s in enumerate(sorted(set(sigs)))}
            self.run([rank[s] for s in sigs])


def _orientations(graph: Graph, mode: str):
    """Yield (initial colour per node, canonical party sizes)."""
    if mode == FULL:
        yield [0] * len(graph.nodes), None
        return
    sizes = sorted((graph.nA, graph.nB))
    first = []
    if graph.nA <= graph.nB:
        first.append("A")
    if graph.nB <= graph.nA:
        first.append("B")
    for party in first:
        yield [0 if n == X else (1 if n.party == party else 2)
               for n in graph.nodes], tuple(sizes)


def canonical_form(ineq: Ineq, mode: str = PARTY, *,
                   max_side: int = DEFAULT_MAX_SIDE,
                   max_full: int = DEFAULT_MAX_FULL,
                   budget: int = DEFAULT_LEAF_BUDGET) -> CanonicalForm:
    """Least representative of the orbit of ``ineq`` (no support reduction).

    The key is ``(mode, kind, sizes, flattened rows, rhs)`` where rows list,
    position by position, the coefficients towards earlier positions.
    """
    cut = _as_cut(ineq)
    scale = primitive_scale(cut.coeffs + (cut.rhs,))
    cut = cut.scaled(scale)
    g = cut.graph
    if mode not in MODES:
        raise ModelError(f"unknown mode {mode!r}")
    if mode == FULL:
        if g.kind != COMPLETE:
            raise ModelError("full mode needs a complete graph")
        if len(g.nodes) > max_full:
            raise BudgetExceeded(
                f"{len(g.nodes)} nodes exceed the full-mode budget {max_full}")
    elif max(g.nA, g.nB) > max_side:
        raise BudgetExceeded(
            f"party sizes ({g.nA},{g.nB}) exceed the budget {max_side}")
    best = None
    leaves = 0
    for colors, sizes in _orientations(g, mode):
        search = _Search(cut, mode, budget)
        search.run(colors)
        leaves += search.leaves
        rows, rhs, order, sigma = search.best
        if best is None or (rows, rhs) < (best[1][0], best[1][1]):
            best = (sizes, (rows, rhs), search, order, sigma)
    sizes, (rows, rhs), search, order, sigma = best
    nodes = search.nodes
    if mode == FULL:
        target_graph = Graph(COMPLETE, len(nodes) - 1, 0)
        labels = list(target_graph.nodes)
        key = (FULL, len(nodes), tuple(rows), rhs)
    else:
        target_graph = Graph(g.kind, sizes[0], sizes[1])
        labels = list(target_graph.nodes)  # X, A1.., B1..
        key = (PARTY, g.kind, sizes, tuple(rows), rhs)
    labelling = {nodes[v]: labels[k] for k, v in enumerate(order)}
    flipped = {labelling[nodes[v]] for v in order if sigma[v] < 0}
    if X in flipped:
        flipped = set(target_graph.nodes) - flipped
    switch_set = frozenset(flipped)
    terms = {}
    for k, v in enumerate(order):
        for j in range(k):
            u = order[j]
            c = search.W[v][u]
            if c:
                terms[normalize_edge(labels[k], labels[j])] = \
                    c * sigma[v] * sigma[u]
    rep = CutIneq.from_terms(target_graph, terms, rhs)
    return CanonicalForm(key, rep, labelling, switch_set, scale, leaves)


# ------------------------------------------------------------- equivalence

@dataclass(frozen=True)
class EquivCertificate:
    """``target == scale * switch(permute(source), switch_set)``.

    Both inequalities are taken after support reduction, but node names in
    ``permutation`` and ``switch_set`` are the original ones.
    """
    permutation: dict
    switch_set: frozenset
    scale: Fraction

    def apply(self, source: CutIneq, target_graph: Graph) -> CutIneq:
        moved = relabel(source, self.permutation, target_graph)
        return switch(moved, self.switch_set).scaled(self.scale)

    def as_dict(self) -> dict:
        return {
            "permutation": {str(k): str(v) for k, v in
                            sorted(self.permutation.items(),
                                   key=lambda kv: kv[0].sort_key)},
            "switch_set": sorted(str(n) for n in self.switch_set),
            "scale": str(self.scale),
        }


def _reduced(ineq: CutIneq, mode: str):
    """Support-reduce (party mode) and remember reduced->original names."""
    if mode == FULL:
        return ineq, {n: n for n in ineq.graph.nodes}
    red = support_reduce(ineq)
    back = {X: X}
    back.update({Node("A", k): Node("A", i)
                 for k, i in enumerate(red.alice_kept, 1)})
    back.update({Node("B", k): Node("B", j)
                 for k, j in enumerate(red.bob_kept, 1)})
    return red.ineq, back


def _switch_between(f: CutIneq, g: CutIneq) -> tuple[frozenset, Fraction] | None:
    """Find W and a scale with g == scale * switch(f, W), or None."""
    graph = g.graph
    if f.graph != graph:
        return None
    fa = dict(zip(graph.edges, f.coeffs))
    ga = dict(zip(graph.edges, g.coeffs))
    ratio = None
    adj = {n: [] for n in graph.nodes}
    for e in graph.edges:
        if bool(fa[e]) != bool(ga[e]):
            return None
        if fa[e]:
            r = abs(ga[e]) / abs(fa[e])
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
            sign = 1 if (fa[e] > 0) == (ga[e] > 0) else -1
            adj[e[0]].append((e[1], sign))
            adj[e[1]].append((e[0], sign))
    if ratio is None:
        ratio = Fraction(1)
    sigma = {}
    for root in graph.nodes:
        if root in sigma:
            continue
        sigma[root] = 1
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, sign in adj[u]:
                want = sigma[u] * sign
                if v not in sigma:
                    sigma[v] = want
                    queue.append(v)
                elif sigma[v] != want:
                    return None
    W = frozenset(n for n in graph.nodes if sigma[n] < 0)
    if switch(f, W).scaled(ratio) != g:
        return None
    return W, ratio


def equivalent(f: Ineq, g: Ineq, mode: str = PARTY, **budget
               ) -> EquivCertificate | None:
    """Certificate mapping ``f`` onto ``g``, or None if inequivalent."""
    f, g = _as_cut(f), _as_cut(g)
    fr, f_back = _reduced(f, mode)
    gr, g_back = _reduced(g, mode)
    if mode == FULL and len(fr.graph.nodes) != len(gr.graph.nodes):
        return None
    if mode == PARTY and (fr.graph.kind != gr.graph.kind or sorted(
            (fr.graph.nA, fr.graph.nB)) != sorted((gr.graph.nA, gr.graph.nB))):
        return None
    cf = canonical_form(fr, mode, **budget)
    cg = canonical_form(gr, mode, **budget)
    if cf.key != cg.key:
        return None
    inv = {v: k for k, v in cg.labelling.items()}
    perm_red = {u: inv[lab] for u, lab in cf.labelling.items()}
    moved = relabel(fr, perm_red, gr.graph)
    found = _switch_between(moved, gr)
    if found is None:  # keys agree, so this would be a bug
        raise AssertionError("canonical keys agree but no switching found")
    W, scale = found
    perm = {f_back[u]: g_back[v] for u, v in perm_red.items()}
    return EquivCertificate(perm, frozenset(g_back[n] for n in W), scale)


def verify_certificate(cert: EquivCertificate, f: Ineq, g: Ineq,
                       mode: str = PARTY) -> bool:
    f, g = _as_cut(f), _as_cut(g)
    image = relabel(f, cert.permutation, g.graph)
    return switch(image, cert.switch_set).scaled(cert.scale) == g


# ----------------------------------------------------------- classification

@dataclass
class ClassReport:
    key: tuple
    representative: CutIneq
    count: int
    members: list[int]

    def as_dict(self) -> dict:
        from .io import emit_ineq
        return {"count": self.count, "members": self.members,
                "representative": emit_ineq(self.representative)}


def class_key(ineq: Ineq, mode: str = PARTY, **budget) -> CanonicalForm:
    cut = _as_cut(ineq)
    if mode == PARTY:
        cut = support_reduce(cut).ineq
    return canonical_form(cut, mode, **budget)


def classify(items: Sequence[Ineq], mode: str = PARTY, **budget
             ) -> list[ClassReport]:
    groups: dict[tuple, ClassReport] = {}
    for k, item in enumerate(items):
        try:
            cf = class_key(item, mode, **budget)
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"item {k}: {exc}") from exc
        report = groups.get(cf.key)
        if report is None:
            groups[cf.key] = ClassReport(cf.key, cf.ineq, 1, [k])
        else:
            report.count += 1
            report.members.append(k)
    return [groups[k] for k in sorted(groups)]
