"""Line-oriented text formats for both inequality representations.

Record format (one block per inequality, blocks separated by blank lines,
``#`` starts a comment)::

    cut complete nA=2 nB=2
    name: pentagonal
    rhs 0
    XA1 1
    A1A2 1
    ...

    cg mA=2 mB=2
    rhs 0
    A1 -1
    A1B1 1

Omitted coefficients are zero.  Values are integers or ``p/q`` rationals.

The ``cg-matrix`` layout prints the Collins-Gisin table bordered by the
marginals, rows = Alice::

    cg-matrix mA=2 mB=2
        | -1  0
     -1 |  1  1
      0 |  1 -1
    <= 0
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .model import (KINDS, CgIneq, CutIneq, Graph, ModelError,
                    edge_label, parse_edge_label)

Ineq = Union[CutIneq, CgIneq]

RECORD = "record"
CG_MATRIX = "cg-matrix"


class ParseError(ModelError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class IneqRecord:
    ineq: Ineq
    meta: dict = field(default_factory=dict)


def _fmt(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else \
        f"{value.numerator}/{value.denominator}"


_RAT = re.compile(r"[+-]?\d+(/\d+)?")


def _rat(token: str, line: int) -> Fraction:
    if not _RAT.fullmatch(token):
        raise ParseError(f"not a rational number: {token!r}", line)
    value = Fraction(token)
    return value


# ------------------------------------------------------------------ emitting

def _emit_meta(meta: dict | None) -> list[str]:
    return [f"{k}: {v}" for k, v in (meta or {}).items()]


def emit_ineq(ineq: Ineq, fmt: str = RECORD, meta: dict | None = None
              ) -> str:
    if fmt == CG_MATRIX:
        if not isinstance(ineq, CgIneq):
            raise ModelError("cg-matrix format needs a Collins-Gisin inequality")
        return _emit_matrix(ineq, meta)
    if fmt != RECORD:
        raise ModelError(f"unknown format {fmt!r}")
    if isinstance(ineq, CutIneq):
        g = ineq.graph
        lines = [f"cut {g.kind} nA={g.nA} nB={g.nB}"] + _emit_meta(meta)
        lines.append(f"rhs {_fmt(ineq.rhs)}")
        lines += [f"{edge_label(e)} {_fmt(c)}"
                  for e, c in zip(g.edges, ineq.coeffs) if c]
    else:
        lines = [f"cg mA={ineq.mA} mB={ineq.mB}"] + _emit_meta(meta)
        lines.append(f"rhs {_fmt(ineq.rhs)}")
        lines += [f"A{i} {_fmt(c)}" for i, c in enumerate(ineq.alice, 1) if c]
        lines += [f"B{j} {_fmt(c)}" for j, c in enumerate(ineq.bob, 1) if c]
        lines += [f"A{i}B{j} {_fmt(c)}" for i, row in enumerate(ineq.joint, 1)
                  for j, c in enumerate(row, 1) if c]
    return "\n".join(lines) + "\n"


def _emit_matrix(ineq: CgIneq, meta: dict | None) -> str:
    cells = [[""] + [_fmt(v) for v in ineq.bob]]
    for a, row in zip(ineq.alice, ineq.joint):
        cells.append([_fmt(a)] + [_fmt(v) for v in row])
    width = max((len(c) for r in cells for c in r), default=1)
    lines = [f"cg-matrix mA={ineq.mA} mB={ineq.mB}"] + _emit_meta(meta)
    for r in cells:
        head = r[0].rjust(width)
        tail = " ".join(c.rjust(width) for c in r[1:])
        lines.append(f"{head} | {tail}".rstrip())
    lines.append(f"<= {_fmt(ineq.rhs)}")
    return "\n".join(lines) + "\n"


def emit_records(records: list[IneqRecord], fmt: str = RECORD) -> str:
    return "\n".join(emit_ineq(r.ineq, fmt, r.meta) for r in records)


# ------------------------------------------------------------------- parsing

_HEADER_CUT = re.compile(r"cut\s+(\w+)\s+nA=(\d+)\s+nB=(\d+)")
_HEADER_CG = re.compile(r"(cg|cg-matrix)\s+mA=(\d+)\s+mB=(\d+)")
_META = re.compile(r"([A-Za-z_][\w-]*):\s*(.*)")


def _blocks(text: str):
    block = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if block:
                yield block
                block = []
            continue
        block.append((lineno, line))
    if block:
        yield block


def _parse_block(block) -> IneqRecord:
    lineno, header = block[0]
    body = block[1:]
    meta = {}
    while body and _META.fullmatch(body[0][1]):
        m = _META.fullmatch(body[0][1])
        meta[m.group(1)] = m.group(2)
        body = body[1:]
    m = _HEADER_CUT.fullmatch(header)
    if m:
        kind = m.group(1)
        if kind not in KINDS:
            raise ParseError(f"unknown graph kind {kind!r}", lineno)
        graph = Graph(kind, int(m.group(2)), int(m.group(3)))
        return IneqRecord(_parse_cut(graph, body, lineno), meta)
    m = _HEADER_CG.fullmatch(header)
    if m:
        mA, mB = int(m.group(2)), int(m.group(3))
        if m.group(1) == "cg-matrix":
            return IneqRecord(_parse_matrix(mA, mB, body, lineno), meta)
        return IneqRecord(_parse_cg(mA, mB, body, lineno), meta)
    raise ParseError(f"malformed header {header!r}", lineno)


def _split_rhs(body, header_line):
    if not body:
        raise ParseError("missing rhs line", header_line)
    lineno, line = body[0]
    parts = line.split()
    if len(parts) != 2 or parts[0] != "rhs":
        raise ParseError("expected 'rhs <value>'", lineno)
    return _rat(parts[1], lineno), body[1:]


def _pairs(body):
    seen = set()
    for lineno, line in body:
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected '<label> <value>': {line!r}", lineno)
        label, value = parts
        if label in seen:
            raise ParseError(f"duplicate coefficient {label}", lineno)
        seen.add(label)
        yield lineno, label, _rat(value, lineno)


def _parse_cut(graph: Graph, body, header_line) -> CutIneq:
    rhs, body = _split_rhs(body, header_line)
    coeffs = [Fraction(0)] * graph.dim
    for lineno, label, value in _pairs(body):
        try:
            edge = parse_edge_label(label)
        except ModelError as exc:
            raise ParseError(str(exc), lineno) from None
        if edge not in graph.edge_index:
            raise ParseError(f"edge {label} not in {graph}", lineno)
        coeffs[graph.edge_index[edge]] = value
    return CutIneq(graph, tuple(coeffs), rhs)


_CG_LABEL = re.compile(r"A([1-9]\d*)|B([1-9]\d*)|A([1-9]\d*)B([1-9]\d*)")


def _parse_cg(mA: int, mB: int, body, header_line) -> CgIneq:
    rhs, body = _split_rhs(body, header_line)
    alice = [Fraction(0)] * mA
    bob = [Fraction(0)] * mB
    joint = [[Fraction(0)] * mB for _ in range(mA)]
    for lineno, label, value in _pairs(body):
        m = _CG_LABEL.fullmatch(label)
        if not m:
            raise ParseError(f"bad Collins-Gisin label {label!r}", lineno)
        a, b, ja, jb = (int(g) if g else None for g in m.groups())
        if a is not None and a <= mA:
            alice[a - 1] = value
        elif b is not None and b <= mB:
            bob[b - 1] = value
        elif ja is not None and ja <= mA and jb <= mB:
            joint[ja - 1][jb - 1] = value
        else:
            raise ParseError(f"label {label} outside ({mA},{mB})", lineno)
    return CgIneq(tuple(alice), tuple(bob), tuple(map(tuple, joint)), rhs)


def _parse_matrix(mA: int, mB: int, body, header_line) -> CgIneq:
    if len(body) != mA + 2:
        raise ParseError(f"cg-matrix needs {mA + 2} lines after the header",
                         header_line)
    rows = []
    for lineno, line in body[:-1]:
        if "|" not in line:
            raise ParseError("matrix row without '|'", lineno)
        left, right = line.split("|", 1)
        left = [_rat(t, lineno) for t in left.split()]
        right = [_rat(t, lineno) for t in right.split()]
        if len(right) != mB:
            raise ParseError(f"expected {mB} columns", lineno)
        rows.append((lineno, left, right))
    lineno, bob_left, bob = rows[0]
    if bob_left:
        raise ParseError("top border has no row marginal", lineno)
    alice, joint = [], []
    for lineno, left, right in rows[1:]:
        if len(left) != 1:
            raise ParseError("row needs exactly one marginal", lineno)
        alice.append(left[0])
        joint.append(tuple(right))
    lineno, last = body[-1]
    parts = last.split()
    if len(parts) != 2 or parts[0] != "<=":
        raise ParseError("expected '<= <rhs>'", lineno)
    return CgIneq(tuple(alice), tuple(bob), tuple(joint), _rat(parts[1], lineno))


def parse_records(text: str) -> list[IneqRecord]:
    return [_parse_block(b) for b in _blocks(text)]


def parse_ineq(text: str) -> Ineq:
    records = parse_records(text)
    if len(records) != 1:
        raise ParseError(f"expected one inequality, found {len(records)}")
    return records[0].ineq
