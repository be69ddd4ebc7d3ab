"""Validity, roots, exact facet certification, zero-lifting."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

import numpy as np

from .model import (CgIneq, CutIneq, Graph, ModelError, Node, TRIPARTITE, X,
                    relabel)
from .rank import bareiss_rank, exact_rank, rank_mod_p

ENUMERATION_CAP = 26
CHUNK = 1 << 15

Ineq = Union[CutIneq, CgIneq]


class CapExceeded(ModelError):
    pass


@dataclass(frozen=True)
class TightnessReport:
    valid: bool
    max_value: Fraction
    root_count: int
    face_dim: int
    polytope_dim: int
    is_facet: bool
    witness: frozenset | None = None

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "max_value": str(self.max_value),
            "root_count": self.root_count,
            "face_dim": self.face_dim,
            "polytope_dim": self.polytope_dim,
            "is_facet": self.is_facet,
            "witness": None if self.witness is None else
            sorted(str(n) for n in self.witness),
        }


def _cg_to_cut_raw(ineq: CgIneq) -> CutIneq:
    # unnormalized, so values stay in the caller's units
    g = Graph(TRIPARTITE, ineq.mA, ineq.mB)
    coeffs = [Fraction(0)] * g.dim
    idx = g.edge_index
    half = Fraction(1, 2)
    for i, c in enumerate(ineq.alice, 1):
        coeffs[idx[(X, Node("A", i))]] += c
    for j, c in enumerate(ineq.bob, 1):
        coeffs[idx[(X, Node("B", j))]] += c
    for i, row in enumerate(ineq.joint, 1):
        for j, c in enumerate(row, 1):
            coeffs[idx[(X, Node("A", i))]] += c * half
            coeffs[idx[(X, Node("B", j))]] += c * half
            coeffs[idx[(Node("A", i), Node("B", j))]] -= c * half
    return CutIneq(g, tuple(coeffs), ineq.rhs)


def as_cut(ineq: Ineq) -> CutIneq:
    return _cg_to_cut_raw(ineq) if isinstance(ineq, CgIneq) else ineq


def _integer_form(ineq: CutIneq) -> tuple[list[int], int, int]:
    lcm = 1
    for c in ineq.coeffs + (ineq.rhs,):
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in ineq.coeffs]
    return ints, int(ineq.rhs * lcm), lcm


def _edge_endpoints(graph: Graph) -> tuple[np.ndarray, np.ndarray]:
    # column 0 of the bit matrix is X (always 0); observable k is column k+1
    pos = {X: 0}
    for k, node in enumerate(graph.observables):
        pos[node] = k + 1
    u = np.array([pos[e[0]] for e in graph.edges], dtype=np.intp)
    v = np.array([pos[e[1]] for e in graph.edges], dtype=np.intp)
    return u, v


def cut_blocks(graph: Graph, chunk: int = CHUNK
               ) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (first mask, cut vectors) in binary counting order."""
    k = graph.n_observables
    u, v = _edge_endpoints(graph)
    shifts = np.arange(k, dtype=np.int64)
    total = 1 << k
    for start in range(0, total, chunk):
        masks = np.arange(start, min(total, start + chunk), dtype=np.int64)
        bits = np.zeros((masks.size, k + 1), dtype=np.int8)
        bits[:, 1:] = (masks[:, None] >> shifts) & 1
        yield start, bits[:, u] ^ bits[:, v]


def _mask_to_cut(graph: Graph, mask: int) -> frozenset:
    obs = graph.observables
    return frozenset(obs[k] for k in range(len(obs)) if mask >> k & 1)


def _check_cap(graph: Graph, cap: int) -> None:
    if graph.n_observables > cap:
        raise CapExceeded(
            f"{graph.n_observables} observables exceed the enumeration cap "
            f"{cap}; support_reduce first or raise the cap")


def _scan(ineq: CutIneq, cap: int, collect_roots: bool):
    g = ineq.graph
    _check_cap(g, cap)
    coeffs, rhs, scale = _integer_form(ineq)
    bound = sum(abs(c) for c in coeffs)
    exact_dtype = np.int64 if bound < 2 ** 62 else object
    a = np.array(coeffs, dtype=exact_dtype)
    best = None
    best_mask = 0
    roots = []
    for start, block in cut_blocks(g):
        vals = block.astype(exact_dtype) @ a
        k = int(np.argmax(vals))
        if best is None or vals[k] > best:
            best, best_mask = int(vals[k]), start + k
        if collect_roots:
            hit = np.nonzero(vals == rhs)[0]
            if hit.size:
                roots.append(block[hit])
    best = 0 if best is None else best
    return best, best_mask, rhs, scale, roots


def _cg_integer_form(cut: CutIneq):
    """Unnormalized CG coefficients of ``cut`` as ints sharing one scale.

    The CG left-hand side equals the cut left-hand side at every cut, so
    validity and roots carry over unchanged.
    """
    g = cut.graph
    coeffs, rhs, scale = _integer_form(cut)
    idx = g.edge_index
    alice = np.zeros(g.nA, dtype=object)
    bob = np.zeros(g.nB, dtype=object)
    joint = np.zeros((g.nA, g.nB), dtype=object)
    for i in range(g.nA):
        alice[i] = coeffs[idx[(X, Node("A", i + 1))]]
    for j in range(g.nB):
        bob[j] = coeffs[idx[(X, Node("B", j + 1))]]
    for i in range(g.nA):
        for j in range(g.nB):
            a = coeffs[idx[(Node("A", i + 1), Node("B", j + 1))]]
            alice[i] += a
            bob[j] += a
            joint[i, j] = -2 * a
    return alice, bob, joint, rhs, scale


def _scan_best_response(cut: CutIneq, cap: int, collect_roots: bool):
    """Exact scan of a tripartite inequality over one party only.

    For fixed outcomes of the enumerated party the other party's optimum
    splits into independent per-observable choices.  Roots are returned as
    CG vectors: every maximizer plus one extra vector per tied observable,
    which spans the same affine hull as the full root set.
    """
    g = cut.graph
    alice, bob, joint, rhs, scale = _cg_integer_form(cut)
    swapped = g.nA > g.nB
    if swapped:
        alice, bob, joint = bob, alice, joint.T
    mA, mB = len(alice), len(bob)
    if mA > cap:
        raise CapExceeded(f"{mA} observables on the smaller side exceed the "
                          f"enumeration cap {cap}")
    peak = sum(abs(int(v)) for v in alice) + sum(abs(int(v)) for v in bob) \
        + sum(abs(int(v)) for v in joint.flat)
    dtype = np.int64 if peak < 2 ** 62 else object
    a = alice.astype(dtype)
    b = bob.astype(dtype)
    J = joint.astype(dtype)
    shifts = np.arange(mA, dtype=np.int64)
    best, best_x, best_y = None, 0, None
    roots = []
    for start in range(0, 1 << mA, CHUNK):
        masks = np.arange(start, min(1 << mA, start + CHUNK), dtype=np.int64)
        x = ((masks[:, None] >> shifts) & 1).astype(dtype)
        gains = b[None, :] + x @ J if mB else np.zeros((len(masks), 0), dtype)
        vals = x @ a + np.where(gains > 0, gains, 0).sum(axis=1)
        k = int(np.argmax(vals))
        if best is None or vals[k] > best:
            best, best_x, best_y = int(vals[k]), int(masks[k]), gains[k] > 0
        if collect_roots:
            for r in np.nonzero(vals == rhs)[0]:
                xr = x[r].astype(np.int64)
                y0 = (gains[r] > 0).astype(np.int64)
                ys = [y0]
                for j in np.nonzero(gains[r] == 0)[0]:
                    y = y0.copy()
                    y[j] = 1
                    ys.append(y)
                for y in ys:
                    vec = np.concatenate([xr, y, np.outer(xr, y).ravel()])
                    roots.append(vec)
    witness = frozenset()
    if best is not None:
        xs = [Node("A", i + 1) for i in range(mA) if best_x >> i & 1]
        ys = [Node("B", j + 1) for j in range(mB) if best_y[j]]
        if swapped:
            xs = [Node("B", n.index) for n in xs]
            ys = [Node("A", n.index) for n in ys]
        witness = frozenset(xs + ys)
    return (0 if best is None else best), witness, rhs, scale, roots


AUTO, ENUMERATE, BEST_RESPONSE = "auto", "enumerate", "best-response"


def _use_best_response(cut: CutIneq, method: str) -> bool:
    if method not in (AUTO, ENUMERATE, BEST_RESPONSE):
        raise ModelError(f"unknown scan method {method!r}")
    if method == BEST_RESPONSE and cut.graph.kind != TRIPARTITE:
        raise ModelError("best-response scan needs a tripartite graph")
    if method == AUTO:
        return cut.graph.kind == TRIPARTITE and cut.graph.n_observables > 16
    return method == BEST_RESPONSE


def is_valid(ineq: Ineq, cap: int = ENUMERATION_CAP, method: str = AUTO
             ) -> tuple[bool, frozenset | None]:
    """True iff the inequality holds at every cut; else a maximizing cut."""
    cut = as_cut(ineq)
    if _use_best_response(cut, method):
        best, witness, rhs, _, _ = _scan_best_response(cut, cap, False)
        return (True, None) if best <= rhs else (False, witness)
    best, mask, rhs, _, _ = _scan(cut, cap, collect_roots=False)
    if best <= rhs:
        return True, None
    return False, _mask_to_cut(cut.graph, mask)


def _affine_rank(roots: np.ndarray, upper: int) -> int:
    """Rank of roots augmented with a homogenizing column of ones."""
    n, d = roots.shape
    aug = np.ones((n, d + 1), dtype=np.int64)
    aug[:, :d] = roots
    if n <= 3 * (d + 1):
        r = rank_mod_p(aug)
        if r >= upper:
            return r
        return bareiss_rank(aug.tolist())
    rng = np.random.default_rng(12345)
    sample = aug[rng.choice(n, size=3 * (d + 1), replace=False)]
    r = rank_mod_p(sample)
    if r >= upper:
        return r
    return exact_rank(aug, upper_bound=upper)


def tightness_report(ineq: Ineq, cap: int = ENUMERATION_CAP,
                     method: str = AUTO) -> TightnessReport:
    """Validity and face dimension by exhaustive search over cuts.

    ``method`` picks full cut enumeration or, for tripartite graphs, the
    best-response scan over the smaller party; ``auto`` uses the latter
    above 16 observables.  ``root_count`` counts the vectors used for the
    rank, which for the best-response scan is a spanning subset of roots;
    that scan reports no roots at all for an invalid inequality.
    """
    cut = as_cut(ineq)
    g = cut.graph
    if _use_best_response(cut, method):
        best, witness, rhs, scale, vecs = _scan_best_response(cut, cap, True)
        if best > rhs:
            vecs = []  # only maximizers are visible; report no face
        roots = np.array(vecs, dtype=np.int64) if vecs else \
            np.zeros((0, g.dim), dtype=np.int64)
    else:
        best, mask, rhs, scale, blocks = _scan(cut, cap, collect_roots=True)
        witness = _mask_to_cut(g, mask)
        roots = np.concatenate(blocks) if blocks else \
            np.zeros((0, g.dim), dtype=np.int8)
    valid = best <= rhs
    dim = g.dim
    if roots.shape[0] == 0:
        face_dim = -1
    else:
        # a nonzero valid inequality keeps its roots inside a hyperplane
        upper = dim if (valid and not cut.is_zero()) else dim + 1
        face_dim = _affine_rank(roots, upper) - 1
    is_facet = valid and face_dim == dim - 1 and not cut.is_zero()
    return TightnessReport(
        valid=valid, max_value=Fraction(best, scale),
        root_count=int(roots.shape[0]), face_dim=face_dim,
        polytope_dim=dim, is_facet=is_facet,
        witness=None if valid else witness)


def roots(ineq: Ineq, cap: int = ENUMERATION_CAP) -> list[frozenset]:
    """Cuts attaining equality, in enumeration order."""
    cut = as_cut(ineq)
    coeffs, rhs, _ = _integer_form(cut)
    a = np.array(coeffs, dtype=object)
    _check_cap(cut.graph, cap)
    out = []
    for start, block in cut_blocks(cut.graph):
        vals = block.astype(object) @ a
        out += [_mask_to_cut(cut.graph, start + int(k))
                for k in np.nonzero(vals == rhs)[0]]
    return out


# ---------------------------------------------------------- lifting / reduce

def zero_lift(ineq: Ineq, target: tuple[int, int]) -> Ineq:
    """Pad with zero coefficients up to ``target`` observables per party."""
    nA, nB = target
    if isinstance(ineq, CgIneq):
        if nA < ineq.mA or nB < ineq.mB:
            raise ModelError("zero_lift target is smaller than the source")
        z = Fraction(0)
        joint = tuple(row + (z,) * (nB - ineq.mB) for row in ineq.joint)
        joint += ((z,) * nB,) * (nA - ineq.mA)
        return CgIneq(ineq.alice + (z,) * (nA - ineq.mA),
                      ineq.bob + (z,) * (nB - ineq.mB), joint, ineq.rhs)
    g = ineq.graph
    if nA < g.nA or nB < g.nB:
        raise ModelError("zero_lift target is smaller than the source")
    target_graph = Graph(g.kind, nA, nB)
    return relabel(ineq, {n: n for n in g.nodes}, target_graph)


@dataclass(frozen=True)
class Reduction:
    ineq: Ineq
    alice_kept: tuple[int, ...]
    bob_kept: tuple[int, ...]
    empty: bool = False


def _support_cg(ineq: CgIneq) -> Reduction:
    alice = [i for i in range(ineq.mA)
             if ineq.alice[i] or any(ineq.joint[i])]
    bob = [j for j in range(ineq.mB)
           if ineq.bob[j] or any(ineq.joint[i][j] for i in range(ineq.mA))]
    out = CgIneq(tuple(ineq.alice[i] for i in alice),
                 tuple(ineq.bob[j] for j in bob),
                 tuple(tuple(ineq.joint[i][j] for j in bob) for i in alice),
                 ineq.rhs)
    return Reduction(out, tuple(i + 1 for i in alice),
                     tuple(j + 1 for j in bob), empty=not alice and not bob)


def support_reduce(ineq: Ineq) -> Reduction:
    """Remove observables whose incident coefficients are all zero.

    Surviving observables are renumbered in order; ``alice_kept`` and
    ``bob_kept`` record their original indices.  X always stays.
    """
    if isinstance(ineq, CgIneq):
        return _support_cg(ineq)
    g = ineq.graph
    used = {n for e, c in zip(g.edges, ineq.coeffs) if c for n in e}
    alice = [i for i in range(1, g.nA + 1) if Node("A", i) in used]
    bob = [j for j in range(1, g.nB + 1) if Node("B", j) in used]
    mapping = {X: X}
    mapping.update({Node("A", i): Node("A", k)
                    for k, i in enumerate(alice, 1)})
    mapping.update({Node("B", j): Node("B", k) for k, j in enumerate(bob, 1)})
    out = relabel(ineq, mapping, Graph(g.kind, len(alice), len(bob)))
    return Reduction(out, tuple(alice), tuple(bob),
                     empty=not alice and not bob)
