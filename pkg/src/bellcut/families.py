"""Closed-form inequality families, named inequalities and CHSH inclusion."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .model import (COMPLETE, CgIneq, CutIneq, Graph, ModelError, Node, X,
                    convert_cut_to_cg, parse_node)
from .symmetry import PARTY, party_swap, permute, switch

# ------------------------------------------------------------- hypermetric


@dataclass(frozen=True)
class WeightVector:
    bA: tuple[int, ...]
    bB: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bA", tuple(int(v) for v in self.bA))
        object.__setattr__(self, "bB", tuple(int(v) for v in self.bB))

    @property
    def bX(self) -> int:
        return 1 - sum(self.bA) - sum(self.bB)

    @property
    def s(self) -> int:
        return len(self.bA)

    @property
    def t(self) -> int:
        return len(self.bB)

    def entries(self) -> list[int]:
        return [*self.bA, *self.bB, self.bX]

    def weight(self, node: Node) -> int:
        if node == X:
            return self.bX
        return (self.bA if node.party == "A" else self.bB)[node.index - 1]


def hypermetric(b: WeightVector) -> CutIneq:
    """``sum b_u b_v x_uv <= 0`` on the complete graph X, A.., B.."""
    g = Graph(COMPLETE, b.s, b.t)
    coeffs = tuple(Fraction(b.weight(u) * b.weight(v)) for u, v in g.edges)
    return CutIneq(g, coeffs, Fraction(0))


def _fresh_pairs(weights: Sequence[int], full: bool):
    return [(i, k) for i, k in itertools.combinations(range(len(weights)), 2)
            if full or weights[i] * weights[k]]


def _own_marginal(weights: Sequence[int], i: int) -> Fraction:
    # b_i(1 - b_i)/2 minus the products with earlier same-sign weights
    w = weights[i]
    earlier = sum(w * weights[k] for k in range(i) if w * weights[k] > 0)
    return Fraction(w * (1 - w), 2) - earlier


def hypermetric_bell(b: WeightVector, full: bool = False) -> CgIneq:
    """Closed form of the triangular elimination of ``hypermetric(b)``.

    The weights need not be sorted by sign.  Fresh observables follow the
    original ones in lexicographic pair order; with ``full=False`` only
    pairs with a nonzero product get one, as in ``triangular_eliminate``.
    """
    bA, bB = b.bA, b.bB
    aa = _fresh_pairs(bA, full)   # fresh Bob observables
    bb = _fresh_pairs(bB, full)   # fresh Alice observables
    mA, mB = b.s + len(bb), b.t + len(aa)
    alice = [Fraction(0)] * mA
    bob = [Fraction(0)] * mB
    joint = [[Fraction(0)] * mB for _ in range(mA)]
    for i in range(b.s):
        alice[i] = _own_marginal(bA, i)
    for j in range(b.t):
        bob[j] = _own_marginal(bB, j)
    for k, (j, j2) in enumerate(bb):
        p = bB[j] * bB[j2]
        alice[b.s + k] = Fraction(min(p, 0))
        joint[b.s + k][j] = Fraction(-p)
        joint[b.s + k][j2] = Fraction(abs(p))
    for k, (i, i2) in enumerate(aa):
        p = bA[i] * bA[i2]
        bob[b.t + k] = Fraction(min(p, 0))
        joint[i][b.t + k] = Fraction(-p)
        joint[i2][b.t + k] = Fraction(abs(p))
    for i in range(b.s):
        for j in range(b.t):
            joint[i][j] = Fraction(-bA[i] * bB[j])
    return CgIneq(tuple(alice), tuple(bob), tuple(map(tuple, joint)),
                  Fraction(0))


def pure_weights(l: int, s: int, t: int) -> WeightVector:
    if s + t != 2 * l or not 0 <= s <= l or l < 1:
        raise ModelError("pure hypermetric needs s + t = 2l, 0 <= s <= l, l >= 1")
    return WeightVector((1,) * s, (1,) * (l - s) + (-1,) * (t - l + s))


def pure_weight_vectors(l: int, s: int, t: int) -> list[WeightVector]:
    """All weights on s Alice and t Bob nodes whose full entry list,
    X included, has l+1 entries 1, l entries -1 and zeros elsewhere."""
    out = []
    for values in itertools.product((1, -1, 0), repeat=s + t):
        b = WeightVector(values[:s], values[s:])
        e = b.entries()
        if e.count(1) == l + 1 and e.count(-1) == l and \
                e.count(0) == len(e) - 2 * l - 1:
            out.append(b)
    return out


def pure_hypermetric_bell(l: int, s: int, t: int) -> CgIneq:
    """Literal instance of the pure hypermetric Bell family.

    Alice observables are A1..As then A'_{jj'} for all j < j' (lex order);
    Bob observables are B1..Bt then B'_{ii'} for all i < i'.
    """
    pure_weights(l, s, t)  # parameter check
    u = l - s              # Bob observables with weight +1
    bpairs = list(itertools.combinations(range(1, t + 1), 2))
    apairs = list(itertools.combinations(range(1, s + 1), 2))
    mA, mB = s + len(bpairs), t + len(apairs)
    alice = [Fraction(0)] * mA
    bob = [Fraction(0)] * mB
    joint = [[Fraction(0)] * mB for _ in range(mA)]
    fresh_a = {p: s + k for k, p in enumerate(bpairs)}
    fresh_b = {p: t + k for k, p in enumerate(apairs)}
    for i in range(1, s + 1):
        alice[i - 1] -= i - 1
    for j, j2 in bpairs:
        if j <= u < j2:
            alice[fresh_a[(j, j2)]] -= 1
    for j in range(1, t + 1):
        bob[j - 1] -= (j - 1) if j <= u else (j - u)
    for i in range(1, s + 1):
        for j in range(1, t + 1):
            joint[i - 1][j - 1] = Fraction(-1 if j <= u else 1)
    for (i, i2), col in fresh_b.items():
        joint[i - 1][col] -= 1
        joint[i2 - 1][col] += 1
    for (j, j2), row in fresh_a.items():
        same_sign = (j2 <= u) or (j > u)
        joint[row][j - 1] += -1 if same_sign else 1
        joint[row][j2 - 1] += 1
    return CgIneq(tuple(alice), tuple(bob), tuple(map(tuple, joint)),
                  Fraction(0))


@dataclass(frozen=True)
class TightnessCondition:
    kind: str          # "pure", "negativeTail" or "none"
    l: int | None = None

    def __str__(self) -> str:
        return f"pure({self.l})" if self.kind == "pure" else self.kind


def hypermetric_tightness_conditions(b: WeightVector
                                     ) -> list[TightnessCondition]:
    """Every known sufficient facet condition met by the full entry list."""
    e = b.entries()
    n = len(e)
    out = []
    ones, minus = e.count(1), e.count(-1)
    if minus > 1 and ones == minus + 1 and ones + minus + e.count(0) == n:
        out.append(TightnessCondition("pure", minus))
    positives = sum(1 for v in e if v > 0)
    if 3 <= positives <= n - 3 and all(v > 0 or v == -1 for v in e):
        out.append(TightnessCondition("negativeTail"))
    return out


def hypermetric_tightness_condition(b: WeightVector) -> TightnessCondition:
    """One satisfied condition; ``negativeTail`` wins when both hold."""
    found = hypermetric_tightness_conditions(b)
    for kind in ("negativeTail", "pure"):
        for c in found:
            if c.kind == kind:
                return c
    return TightnessCondition("none")


# ------------------------------------------------------------- clique-web

@dataclass(frozen=True)
class CliqueWebParams:
    s: int
    t: int
    r: int

    def __post_init__(self):
        if min(self.s, self.t, self.r) < 0:
            raise ModelError("clique-web parameters must be nonnegative")
        if self.t < 2 or self.s < self.t:
            raise ModelError("clique-web needs s >= t >= 2")
        if self.s - self.t != 2 * self.r:
            raise ModelError(f"clique-web needs s - t = 2r, got "
                             f"{self.s} - {self.t} != {2 * self.r}")


def cliqueweb_cut(p: CliqueWebParams) -> CutIneq:
    """Pure clique-web inequality on X, A1..As, B1..Bt.

    Weights are +1 on A1..As, X and -1 on the B's; pairs of positive
    nodes at cyclic distance at most r in the order A1..As, X are dropped.
    """
    g = Graph(COMPLETE, p.s, p.t)
    ring = [Node("A", i) for i in range(1, p.s + 1)] + [X]
    pos = {node: k for k, node in enumerate(ring)}
    size = len(ring)
    terms = {}
    for u, v in g.edges:
        wu = 1 if u in pos else -1
        wv = 1 if v in pos else -1
        if u in pos and v in pos:
            d = abs(pos[u] - pos[v])
            if min(d, size - d) <= p.r:
                continue
        terms[(u, v)] = wu * wv
    return CutIneq.from_terms(g, terms, 0)


def _cw_apairs(p: CliqueWebParams):
    return [(i, k) for i, k in itertools.combinations(range(1, p.s + 1), 2)
            if p.r + 1 <= k - i <= p.s - p.r]


def cliqueweb_bell_literal(p: CliqueWebParams) -> CgIneq:
    """Variant with A_i marginals -2t (i > s-r) and B_j marginals -(j-r).

    Kept for comparison only: it is not valid for r >= 1.
    """
    return _cliqueweb_cg(p, literal=True)


def cliqueweb_bell(p: CliqueWebParams) -> CgIneq:
    """Triangular elimination of the pure clique-web inequality in CG form.

    Observables: A1..As, A'_{jj'} (all j < j'); B1..Bt, B'_{ii'} for
    r+1 <= i'-i <= s-r.  For r = 0 this equals
    :func:`cliqueweb_bell_literal`; for r >= 1 the marginals of A_i
    (i > s-r) are -t and those of B_j are -(j+r).
    """
    return _cliqueweb_cg(p, literal=False)


def _cliqueweb_cg(p: CliqueWebParams, literal: bool) -> CgIneq:
    s, t, r = p.s, p.t, p.r
    apairs = _cw_apairs(p)
    bpairs = list(itertools.combinations(range(1, t + 1), 2))
    mA, mB = s + len(bpairs), t + len(apairs)
    alice = [Fraction(0)] * mA
    bob = [Fraction(0)] * mB
    joint = [[Fraction(1) if i < s and j < t else Fraction(0)
              for j in range(mB)] for i in range(mA)]
    for i in range(r + 1, s - r + 1):
        alice[i - 1] = Fraction(-(i - r - 1))
    for i in range(s - r + 1, s + 1):
        alice[i - 1] = Fraction(-2 * t if literal else -t)
    for j in range(1, t + 1):
        bob[j - 1] = Fraction(-(j - r) if literal else -(j + r))
    for k, (i, i2) in enumerate(apairs):
        joint[i - 1][t + k] = Fraction(-1)
        joint[i2 - 1][t + k] = Fraction(1)
    for k, (j, j2) in enumerate(bpairs):
        joint[s + k][j - 1] = Fraction(-1)
        joint[s + k][j2 - 1] = Fraction(1)
    return CgIneq(tuple(alice), tuple(bob), tuple(map(tuple, joint)),
                  Fraction(0))


# ------------------------------------------------------------------ I_mm22

def immm22(m: int) -> CgIneq:
    """I_mm22 with rows = Alice.

    Alice marginals (-1, 0, ..), Bob marginals (-(m-1), .., -1, 0); joint
    entry (i, j) is 1 when i + j <= m + 1, -1 when i + j = m + 2, else 0.
    """
    if m < 2:
        raise ModelError("I_mm22 needs m >= 2")
    alice = tuple(Fraction(-1 if i == 1 else 0) for i in range(1, m + 1))
    bob = tuple(Fraction(-(m - j)) for j in range(1, m + 1))
    joint = tuple(tuple(Fraction(1 if i + j <= m + 1 else
                                 (-1 if i + j == m + 2 else 0))
                        for j in range(1, m + 1)) for i in range(1, m + 1))
    return CgIneq(alice, bob, joint, Fraction(0))


# ----------------------------------------------------------------- catalog

def _cg(alice, bob, joint, rhs=0) -> CgIneq:
    return CgIneq(tuple(map(Fraction, alice)), tuple(map(Fraction, bob)),
                  tuple(tuple(map(Fraction, r)) for r in joint), Fraction(rhs))


def _grishukhin() -> CutIneq:
    names = {1: X, 2: Node("A", 1), 3: Node("A", 2), 4: Node("A", 3),
             5: Node("B", 1), 6: Node("B", 2), 7: Node("B", 3)}
    terms = {}
    for i, j in itertools.combinations(range(1, 5), 2):
        terms[(i, j)] = 1
    for i, j, c in [(5, 6, 1), (5, 7, 1), (6, 7, -1), (1, 6, -1), (3, 6, -1),
                    (2, 7, -1), (4, 7, -1)]:
        terms[(i, j)] = c
    for i in range(1, 5):
        terms[(i, 5)] = -2
    g = Graph(COMPLETE, 3, 3)
    return CutIneq.from_terms(
        g, {(names[i], names[j]): c for (i, j), c in terms.items()}, 0)


def _catalog() -> dict:
    return {
        "chsh": _cg((-1, 0), (-1, 0), ((1, 1), (1, -1))),
        "i3322": _cg((-1, 0, 0), (-2, -1, 0),
                     ((1, 1, 1), (1, 1, -1), (1, -1, 0))),
        # the three I_3422 tables use rows = 4-observable party = Alice
        "i3422_1": _cg((1, 0, 0, 1), (1, 1, -2),
                       ((-1, -1, 1), (-1, 1, 1), (1, -1, 1), (-1, -1, -1)), 2),
        "i3422_2": _cg((-1, 0, -1, 1), (0, 1, -1),
                       ((-1, 1, 1), (0, -1, 1), (1, 0, 1), (-1, -1, 0)), 1),
        "i3422_3": _cg((0, 0, -1, 2), (1, 0, -1),
                       ((-2, 1, 1), (0, -1, 1), (1, 1, 1), (-1, -1, -1)), 2),
        "pentagonal": CutIneq.from_terms(
            Graph(COMPLETE, 2, 2),
            {"XA1": 1, "XA2": 1, "XB1": -1, "XB2": -1, "A1A2": 1,
             "A1B1": -1, "A1B2": -1, "A2B1": -1, "A2B2": -1, "B1B2": 1}, 0),
        "grishukhin": _grishukhin(),
        "triangle": CutIneq.from_terms(
            Graph(COMPLETE, 2, 1), {"A1B1": -1, "A2B1": -1, "A1A2": 1}, 0),
        "positive_probability": _cg((0,), (0,), ((-1,),)),
    }


CATALOG_NAMES = tuple(_catalog())


def catalog(name: str):
    entries = _catalog()
    if name not in entries:
        raise ModelError(f"unknown catalog entry {name!r}; "
                         f"choose from {', '.join(entries)}")
    return entries[name]


# --------------------------------------------------------------- inclusion

def _observable(ineq: CgIneq, node) -> Node:
    node = parse_node(node) if isinstance(node, str) else node
    size = ineq.mA if node.party == "A" else ineq.mB
    if node == X or not 1 <= node.index <= size:
        raise ModelError(f"no observable {node} in scenario ({ineq.mA},{ineq.mB})")
    return node


def fix_observable(ineq: CgIneq, node, value: int) -> CgIneq:
    """Replace an observable by the deterministic outcome ``value``."""
    node = _observable(ineq, node)
    if value not in (0, 1):
        raise ModelError("fixed value must be 0 or 1")
    if node.party == "B":
        return fix_observable(ineq.transposed(), Node("A", node.index),
                              value).transposed()
    i = node.index - 1
    alice, bob, rhs = list(ineq.alice), list(ineq.bob), ineq.rhs
    if value == 1:
        rhs -= alice[i]
        bob = [b + c for b, c in zip(bob, ineq.joint[i])]
    del alice[i]
    joint = [row for k, row in enumerate(ineq.joint) if k != i]
    return CgIneq(tuple(alice), tuple(bob), tuple(joint), rhs)


def fix_observables(ineq: CgIneq, fixings: dict) -> CgIneq:
    """Fix several observables, named in the original numbering."""
    nodes = [(_observable(ineq, n), v) for n, v in fixings.items()]
    # highest index first so earlier indices stay valid
    for node, value in sorted(nodes, key=lambda nv: -nv[0].index):
        ineq = fix_observable(ineq, node, value)
    return ineq


def _cg_key(ineq: CgIneq) -> tuple:
    n = ineq.normalized()
    return n.flat() + (n.rhs,)


@lru_cache(maxsize=1)
def chsh_orbit() -> frozenset:
    """Primitive CG vectors of every switching/relabelling of CHSH."""
    from .model import convert_cg_to_cut
    base = convert_cg_to_cut(catalog("chsh"))
    obs = [Node("A", 1), Node("A", 2), Node("B", 1), Node("B", 2)]
    out = set()
    for image in (base, party_swap(base)):
        for pa, pb in itertools.product(itertools.permutations((1, 2)),
                                        repeat=2):
            perm = {X: X}
            perm.update({Node("A", i): Node("A", k) for i, k in zip((1, 2), pa)})
            perm.update({Node("B", j): Node("B", k) for j, k in zip((1, 2), pb)})
            moved = permute(image, perm, PARTY)
            for r in range(5):
                for W in itertools.combinations(obs, r):
                    out.add(_cg_key(convert_cut_to_cg(switch(moved, W))))
    return frozenset(out)


@dataclass
class InclusionResult:
    status: str                 # "found", "none" or "unknown"
    kept: tuple = ()            # kept observables, original names
    fixings: dict | None = None  # observable -> value
    residual: CgIneq | None = None
    checked: int = 0

    def as_dict(self) -> dict:
        return {"status": self.status,
                "kept": [str(n) for n in self.kept],
                "fixings": None if self.fixings is None else
                {str(k): v for k, v in self.fixings.items()},
                "residual": None if self.residual is None else str(self.residual),
                "checked": self.checked}


EXHAUSTIVE_LIMIT = 12
DEFAULT_INCLUSION_BUDGET = 2_000_000


def includes_chsh(ineq: CgIneq, budget: int = DEFAULT_INCLUSION_BUDGET,
                  exhaustive: bool | None = None) -> InclusionResult:
    """Search for fixings of all but two observables per party giving CHSH.

    All-zero fixings are tried first for every choice of kept observables.
    The full search over 0/1 fixings runs when ``exhaustive`` is True, or by
    default when there are at most 12 observables.  ``unknown`` means the
    search was truncated, by the budget or by skipping the full search.
    """
    if ineq.mA < 2 or ineq.mB < 2:
        return InclusionResult("none")
    if exhaustive is None:
        exhaustive = ineq.mA + ineq.mB <= EXHAUSTIVE_LIMIT
    orbit = chsh_orbit()
    alice = [Node("A", i) for i in range(1, ineq.mA + 1)]
    bob = [Node("B", j) for j in range(1, ineq.mB + 1)]
    choices = [(ka, kb) for ka in itertools.combinations(alice, 2)
               for kb in itertools.combinations(bob, 2)]
    checked = 0

    def attempt(kept, values):
        others = [n for n in alice + bob if n not in kept]
        fixings = dict(zip(others, values))
        residual = fix_observables(ineq, fixings)
        if _cg_key(residual) in orbit:
            return InclusionResult("found", kept, fixings, residual)
        return None

    for ka, kb in choices:
        checked += 1
        if checked > budget:
            return InclusionResult("unknown", checked=checked - 1)
        others = ineq.mA + ineq.mB - 4
        hit = attempt(ka + kb, (0,) * others)
        if hit:
            hit.checked = checked
            return hit
    if not exhaustive:
        return InclusionResult("unknown", checked=checked)
    for ka, kb in choices:
        others = ineq.mA + ineq.mB - 4
        for values in itertools.product((0, 1), repeat=others):
            if not any(values):
                continue
            checked += 1
            if checked > budget:
                return InclusionResult("unknown", checked=checked - 1)
            hit = attempt(ka + kb, values)
            if hit:
                hit.checked = checked
                return hit
    return InclusionResult("none", checked=checked)
