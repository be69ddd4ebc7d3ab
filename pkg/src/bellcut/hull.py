"""Exact facet enumeration for full-dimensional integer point sets.

The facets of conv(P) are the extreme rays of the cone
``{y : (1, p) . y >= 0 for all p in P}``; a ray ``(y0, y')`` is the
inequality ``-y' . x <= y0``.  Rays are computed by the double description
method in Python integers, with the combinatorial adjacency test.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .analysis import tightness_report
from .model import COMPLETE, CutIneq, Graph, ModelError, enumerate_cuts, cut_vector
from .rank import bareiss_rank
from .symmetry import FULL, ClassReport, classify

LONG_RUNNING_N = 7


class NotFullDimensional(ModelError):
    pass


def _primitive(vec: list[int]) -> list[int]:
    g = 0
    for x in vec:
        g = math.gcd(g, x)
    return [x // g for x in vec] if g > 1 else vec


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def _independent_rows(rows: list[list[int]]) -> list[int]:
    chosen: list[int] = []
    for k in range(len(rows)):
        trial = [rows[i] for i in chosen] + [rows[k]]
        if bareiss_rank(trial) == len(trial):
            chosen.append(k)
            if len(chosen) == len(rows[0]):
                break
    return chosen


def _initial_rays(basis: list[list[int]]) -> list[list[int]]:
    """Columns of the inverse of ``basis`` scaled to primitive integers."""
    n = len(basis)
    m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(basis)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col])
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    rays = []
    for j in range(n):
        col = [m[i][n + j] for i in range(n)]
        lcm = 1
        for x in col:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        rays.append(_primitive([int(x * lcm) for x in col]))
    return rays


def enumerate_facets(points: Sequence[Sequence[int]]
                     ) -> list[tuple[tuple[int, ...], int]]:
    """Facets ``(a, a0)`` with ``a . x <= a0`` of the hull of integer points.

    The points must affinely span their ambient space.  Output is sorted and
    each facet is a primitive integer vector.
    """
    pts = sorted({tuple(int(x) for x in p) for p in points})
    if not pts:
        raise NotFullDimensional("no points")
    d = len(pts[0])
    rows = [[1, *p] for p in pts]
    basis_idx = _independent_rows(rows)
    if len(basis_idx) < d + 1:
        raise NotFullDimensional(
            f"points span affine dimension {len(basis_idx) - 1} < {d}")
    rays = _initial_rays([rows[i] for i in basis_idx])
    # zero set of each ray over the processed constraints, as a bitset
    zeros = [0] * len(rays)
    for k, i in enumerate(basis_idx):
        for r in range(len(rays)):
            if r != k:
                zeros[r] |= 1 << i
    in_basis = set(basis_idx)
    need = d - 1  # common zeros required for adjacency in a (d+1)-dim cone
    for i, row in enumerate(rows):
        if i in in_basis:
            continue
        vals = [_dot(row, y) for y in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        new_rays = [rays[k] for k, v in enumerate(vals) if v >= 0]
        new_zeros = [zeros[k] | (1 << i) if v == 0 else zeros[k]
                     for k, v in enumerate(vals) if v >= 0]
        for p in pos:
            zp = zeros[p]
            for q in neg:
                common = zp & zeros[q]
                if common.bit_count() < need:
                    continue
                if any(r != p and r != q and zeros[r] & common == common
                       for r in range(len(rays))):
                    continue
                y = [vals[p] * b - vals[q] * a
                     for a, b in zip(rays[p], rays[q])]
                new_rays.append(_primitive(y))
                new_zeros.append(common | (1 << i))
        rays, zeros = new_rays, new_zeros
    facets = sorted((tuple(-x for x in y[1:]), y[0]) for y in rays)
    return facets


@dataclass
class HRep:
    n: int
    graph: Graph
    facets: list[CutIneq]
    certified: bool = False
    classes: list[ClassReport] = field(default_factory=list)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def as_dict(self) -> dict:
        return {"n": self.n, "facets": len(self.facets),
                "rhs_zero": sum(1 for f in self.facets if f.rhs == 0),
                "certified": self.certified,
                "classes": [c.as_dict() for c in self.classes]}


def cut_points(graph: Graph) -> list[tuple[int, ...]]:
    return [cut_vector(graph, c) for c in enumerate_cuts(graph)]


def cut_polytope_facets(n: int, *, certify: bool = True,
                        classify_facets: bool = True,
                        long_running: bool = False) -> HRep:
    """H-representation of CUT_n on nodes X, A1..A_{n-1}."""
    if n < 3 or n > LONG_RUNNING_N:
        raise ModelError(f"CUT_n is supported for 3 <= n <= {LONG_RUNNING_N}")
    if n >= LONG_RUNNING_N and not long_running:
        raise ModelError(f"CUT_{n} takes hours; pass long_running=True")
    graph = Graph(COMPLETE, n - 1, 0)
    raw = enumerate_facets(cut_points(graph))
    facets = [CutIneq(graph, tuple(Fraction(x) for x in a), Fraction(a0))
              for a, a0 in raw]
    rep = HRep(n, graph, facets)
    if certify:
        for f in facets:
            if not tightness_report(f).is_facet:
                raise AssertionError(f"hull output is not a facet: {f}")
        rep.certified = True
    if classify_facets:
        rep.classes = classify(facets, FULL)
    return rep


def parse_points(text: str) -> list[tuple[int, ...]]:
    """Whitespace-separated integer rows; ``#`` comments and blanks skipped."""
    pts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            pts.append(tuple(int(t) for t in line.replace(",", " ").split()))
        except ValueError:
            raise ModelError(f"line {lineno}: non-integer coordinate") from None
    if pts and len({len(p) for p in pts}) != 1:
        raise ModelError("points have different lengths")
    return pts
