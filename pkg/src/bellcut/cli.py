"""Command-line interface.

Exit codes: 0 success, 1 negative answer from a predicate command
(``check``, ``includes-chsh``), 2 usage or parse error.
"""
from __future__ import annotations

import json
import sys

import click

from . import io as bio
from .analysis import CapExceeded, tightness_report
from .elimination import CensusOptions, census, triangular_eliminate
from .families import (CATALOG_NAMES, CliqueWebParams, WeightVector, catalog,
                       cliqueweb_bell, fix_observables, hypermetric,
                       hypermetric_bell, immm22, includes_chsh,
                       pure_hypermetric_bell)
from .hull import cut_polytope_facets, enumerate_facets, parse_points
from .model import (CgIneq, CutIneq, ModelError, convert_cg_to_cut,
                    convert_cut_to_cg, to_complete)
from .symmetry import (DEFAULT_LEAF_BUDGET, FULL, MODES, PARTY,
                       BudgetExceeded, classify)

EXIT_NEGATIVE = 1
EXIT_USAGE = 2


class _Group(click.Group):
    """Turns library errors into exit code 2 with a one-line message."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (ModelError, BudgetExceeded, CapExceeded) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_USAGE)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc.strerror}") from None


def _out(ctx, payload: dict, text: str) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True))
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _emit(ctx, ineq, meta=None) -> str:
    fmt = ctx.obj["format"]
    if fmt == bio.CG_MATRIX and isinstance(ineq, CutIneq):
        fmt = bio.RECORD
    return bio.emit_ineq(ineq, fmt, meta)


def _ints(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers: {text}")


@click.group(cls=_Group)
@click.option("--json", "as_json", is_flag=True,
              help="Print a machine-readable JSON report.")
@click.option("--format", "fmt", type=click.Choice([bio.RECORD, bio.CG_MATRIX]),
              default=bio.RECORD, show_default=True,
              help="Text format for emitted Collins-Gisin inequalities.")
@click.pass_context
def main(ctx, as_json, fmt):
    """Derive, certify and classify Bell inequalities from cut polytopes."""
    ctx.obj = {"json": as_json, "format": fmt}


# ---------------------------------------------------------------- generate

@main.command()
@click.argument("family", type=click.Choice(
    ["hypermetric", "hypermetric-bell", "pure-hypermetric", "cliqueweb",
     "immm22"]))
@click.argument("params", nargs=-1)
@click.option("--bA", "bA", default="", help="Alice weights, e.g. 1,1")
@click.option("--bB", "bB", default="", help="Bob weights, e.g. -1,-1")
@click.pass_context
def generate(ctx, family, params, bA, bB):
    """Instantiate a family.

    PARAMS: ``pure-hypermetric L S T``, ``cliqueweb S T R``, ``immm22 M``;
    the hypermetric families take --bA/--bB.
    """
    def need(k):
        if len(params) != k:
            raise click.UsageError(f"{family} takes {k} integer parameters")
        try:
            return [int(p) for p in params]
        except ValueError:
            raise click.UsageError("parameters must be integers")

    if family in ("hypermetric", "hypermetric-bell"):
        need(0)
        b = WeightVector(_ints(bA), _ints(bB))
        ineq = hypermetric(b) if family == "hypermetric" else hypermetric_bell(b)
    elif family == "pure-hypermetric":
        ineq = pure_hypermetric_bell(*need(3))
    elif family == "cliqueweb":
        ineq = cliqueweb_bell(CliqueWebParams(*need(3)))
    else:
        ineq = immm22(*need(1))
    text = _emit(ctx, ineq, {"name": family})
    _out(ctx, {"family": family, "inequality": bio.emit_ineq(ineq)}, text)


# ---------------------------------------------------------- te / convert

@main.command()
@click.argument("path", default="-")
@click.option("--full", is_flag=True,
              help="Create a fresh node for every intra-party pair.")
@click.option("--cg", is_flag=True, help="Print the result in CG form.")
@click.pass_context
def te(ctx, path, full, cg):
    """Triangular elimination of a complete-graph inequality."""
    records = bio.parse_records(_read(path))
    out = []
    for rec in records:
        ineq = rec.ineq
        if isinstance(ineq, CgIneq):
            raise ModelError("te needs a cut-form inequality")
        result = triangular_eliminate(to_complete(ineq), full=full)
        out.append(convert_cut_to_cg(result) if cg else result)
    text = "\n".join(_emit(ctx, r) for r in out)
    _out(ctx, {"results": [bio.emit_ineq(r) for r in out]}, text)


@main.command()
@click.argument("path", default="-")
@click.pass_context
def convert(ctx, path):
    """Convert tripartite cut form to CG form and back."""
    out = []
    for rec in bio.parse_records(_read(path)):
        ineq = rec.ineq
        out.append(convert_cg_to_cut(ineq) if isinstance(ineq, CgIneq)
                   else convert_cut_to_cg(ineq))
    text = "\n".join(_emit(ctx, r) for r in out)
    _out(ctx, {"results": [bio.emit_ineq(r) for r in out]}, text)


# ------------------------------------------------------------------ check

@main.command()
@click.argument("path", default="-")
@click.option("--cap", type=int, default=26, show_default=True,
              help="Maximum number of enumerated observables.")
@click.pass_context
def check(ctx, path, cap):
    """Validity and facet report; exit 1 unless every input is a facet."""
    reports = []
    for rec in bio.parse_records(_read(path)):
        reports.append(tightness_report(rec.ineq, cap=cap))
    lines = []
    for k, r in enumerate(reports):
        verdict = "facet" if r.is_facet else ("valid, not a facet" if r.valid
                                              else "invalid")
        line = (f"[{k}] {verdict}: max {r.max_value}, roots {r.root_count}, "
                f"face dim {r.face_dim} of {r.polytope_dim}")
        if r.witness is not None:
            line += f", violated at {{{', '.join(sorted(map(str, r.witness)))}}}"
        lines.append(line)
    _out(ctx, {"reports": [r.as_dict() for r in reports]}, "\n".join(lines))
    if not all(r.is_facet for r in reports):
        ctx.exit(EXIT_NEGATIVE)


# --------------------------------------------------------------- classify

def _budget(budget):
    return {} if budget is None else {"budget": budget}


@main.command(name="classify")
@click.argument("path", default="-")
@click.option("--mode", type=click.Choice(MODES), default=PARTY,
              show_default=True)
@click.option("--budget", type=int, default=None,
              help=f"Canonical-form leaf budget (default {DEFAULT_LEAF_BUDGET}).")
@click.pass_context
def classify_cmd(ctx, path, mode, budget):
    """Group inequalities into symmetry classes."""
    items = [r.ineq for r in bio.parse_records(_read(path))]
    if mode == FULL:
        items = [to_complete(i if isinstance(i, CutIneq) else convert_cg_to_cut(i))
                 for i in items]
    classes = classify(items, mode, **_budget(budget))
    lines = [f"{len(classes)} classes from {len(items)} inequalities"]
    for k, c in enumerate(classes):
        lines.append(f"# class {k}: {c.count} members {c.members}")
        lines.append(bio.emit_ineq(c.representative).rstrip())
    _out(ctx, {"count": len(classes), "classes": [c.as_dict() for c in classes]},
         "\n".join(lines))


# ----------------------------------------------------------- census / hull

@main.command(name="census")
@click.argument("n", type=int)
@click.option("--facets", "facets_path", default=None,
              help="Facet class representatives in record format "
                   "(default: computed by the hull oracle).")
@click.option("--allow-x-outside/--no-allow-x-outside", default=True,
              show_default=True)
@click.option("--allow-empty-party/--no-allow-empty-party", default=True,
              show_default=True)
@click.option("--drop-nonfacets/--keep-nonfacets", default=True,
              show_default=True)
@click.option("--spot-checks", type=int, default=5, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True,
              help="Worker processes; 0 reads BELLCUT_WORKERS.")
@click.option("--long-running", is_flag=True,
              help="Allow n = 7 hull computation.")
@click.pass_context
def census_cmd(ctx, n, facets_path, allow_x_outside, allow_empty_party,
               drop_nonfacets, spot_checks, workers, long_running):
    """Count TE classes generated by the facet classes of CUT_n."""
    if facets_path:
        facets = [to_complete(r.ineq) for r in bio.parse_records(_read(facets_path))]
    else:
        hrep = cut_polytope_facets(n, long_running=long_running)
        facets = [c.representative for c in hrep.classes]
    options = CensusOptions(allow_x_outside, allow_empty_party, drop_nonfacets,
                            spot_checks, 0, workers)
    result = census(n, facets, options)
    lines = [f"n={n}: {result.count} TE classes "
             f"({len(result.dropped)} labelled sources dropped as non-facets)"]
    for k, item in enumerate(result.items):
        g = item.te.graph
        lines.append(f"# class {k}: scenario ({g.nA},{g.nB}), facet "
                     f"{item.facet_index}, labelling "
                     f"{item.labelling.as_dict()['assignment']}")
        lines.append(_emit(ctx, convert_cut_to_cg(item.te)).rstrip())
    _out(ctx, result.as_dict(), "\n".join(lines))


@main.command(name="hull")
@click.argument("n", type=int, required=False)
@click.option("--points", "points_path", default=None,
              help="Integer point file instead of a cut polytope.")
@click.option("--long-running", is_flag=True, help="Allow n = 7.")
@click.option("--emit-facets", is_flag=True,
              help="Print every facet, not only class representatives.")
@click.pass_context
def hull_cmd(ctx, n, points_path, long_running, emit_facets):
    """Facets of CUT_n (or of a point file) by exact double description."""
    if points_path:
        facets = enumerate_facets(parse_points(_read(points_path)))
        lines = [f"{len(facets)} facets"]
        lines += [" ".join(map(str, a)) + f" <= {a0}" for a, a0 in facets]
        _out(ctx, {"facets": [{"a": list(a), "rhs": a0} for a, a0 in facets]},
             "\n".join(lines))
        return
    if n is None:
        raise click.UsageError("give N or --points")
    hrep = cut_polytope_facets(n, long_running=long_running)
    lines = [f"CUT_{n}: {len(hrep.facets)} facets "
             f"({sum(1 for f in hrep.facets if f.rhs == 0)} with rhs 0), "
             f"{hrep.class_count} classes"]
    shown = hrep.facets if emit_facets else [c.representative for c in hrep.classes]
    lines += [bio.emit_ineq(f).rstrip() + "\n" for f in shown]
    _out(ctx, hrep.as_dict(), "\n".join(lines))


# ----------------------------------------------------- fix / inclusion

def _cg_input(path: str) -> CgIneq:
    ineq = bio.parse_ineq(_read(path))
    if isinstance(ineq, CutIneq):
        ineq = convert_cut_to_cg(ineq)
    return ineq


@main.command()
@click.argument("path")
@click.argument("fixings", nargs=-1, required=True)
@click.pass_context
def fix(ctx, path, fixings):
    """Fix observables to deterministic outcomes, e.g. ``A3=0 B1=1``."""
    values = {}
    for item in fixings:
        node, _, value = item.partition("=")
        if value not in ("0", "1"):
            raise click.UsageError(f"expected NODE=0 or NODE=1, got {item!r}")
        values[node] = int(value)
    result = fix_observables(_cg_input(path), values)
    _out(ctx, {"result": bio.emit_ineq(result)}, _emit(ctx, result))


@main.command(name="includes-chsh")
@click.argument("path", default="-")
@click.option("--budget", type=int, default=None,
              help="Maximum number of residual inequalities to test.")
@click.option("--exhaustive/--zero-only", default=None,
              help="Force or skip the search over nonzero fixings.")
@click.pass_context
def includes_chsh_cmd(ctx, path, budget, exhaustive):
    """Search for a CHSH restriction; exit 1 unless one is found."""
    kwargs = {} if budget is None else {"budget": budget}
    res = includes_chsh(_cg_input(path), exhaustive=exhaustive, **kwargs)
    if res.status == "found":
        fixed = " ".join(f"{k}={v}" for k, v in res.fixings.items())
        text = (f"found: keep {' '.join(map(str, res.kept))}; fix {fixed}\n"
                f"residual: {res.residual}")
    else:
        text = f"{res.status} after {res.checked} residuals"
    _out(ctx, res.as_dict(), text)
    if res.status != "found":
        ctx.exit(EXIT_NEGATIVE)


@main.command(name="catalog")
@click.argument("name", required=False, type=click.Choice(CATALOG_NAMES))
@click.pass_context
def catalog_cmd(ctx, name):
    """Print one named inequality, or all of them."""
    names = [name] if name else list(CATALOG_NAMES)
    blocks = [_emit(ctx, catalog(k), {"name": k}) for k in names]
    _out(ctx, {k: bio.emit_ineq(catalog(k)) for k in names}, "\n".join(blocks))


if __name__ == "__main__":  # pragma: no cover
    main()
