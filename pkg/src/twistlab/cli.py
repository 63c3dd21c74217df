"""Command-line interface: ``twistlab <command> ...``.

Exit codes: 0 on success, 1 on a domain error (including a map that fails
verification), 2 on malformed input or usage errors.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from typing import Optional

import click

from .algebra import build_algebra, jacobson_radical, rep_image_dim, rep_support_dim, representation
from .core import GuardExceeded, MalformedInputError, TwistlabError, fmt_rat, mat_to_json, rat
from .families import FAMILY_NAMES, FamilyParams, build_family
from .quasistd import (
    DeformationError,
    DeformationSpec,
    deform,
    deformation_sites,
    explore_chains,
    mu1_table,
)
from .standard import classify, enumerate_standard, quiver_dot, quiver_grid_text, quiver_of
from .twistmap import TwistingFamily, dumps, from_json, verify


class DomainFailure(Exception):
    """Raised after output has been written, to exit with status 1."""


def _emit(obj) -> None:
    click.echo(json.dumps(obj, separators=(",", ":")))


def _load(path: str) -> TwistingFamily:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from exc
    return from_json(text)


def _parse_rat(value: Optional[str], name: str):
    if value is None:
        return None
    try:
        return rat(value)
    except (TwistlabError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInputError(f"--{name}: {value!r} is not a rational p/q") from exc


def _parse_ints(text: str, count: int, name: str) -> list[int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count or not all(p.lstrip("-").isdigit() for p in parts):
        raise MalformedInputError(f"--{name} expects {count} comma-separated integers")
    return [int(p) for p in parts]


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main() -> None:
    """Twisting maps of K^m with K^n as families of matrices."""


@main.command("verify")
@click.argument("path")
def verify_cmd(path: str) -> None:
    """Check the twisting conditions; lists every violation with 1-based witnesses."""
    report = verify(_load(path))
    _emit(report.to_json())
    if not report.is_twisting:
        raise DomainFailure


def _format_gamma(g) -> str:
    return "[" + "; ".join(" ".join(fmt_rat(x) if not isinstance(x, int) else str(x) for x in row) for row in g) + "]"


def _chain_text(f: TwistingFamily) -> str:
    if not deformation_sites(f):
        return "--"
    entries = []
    count = 0
    index = {}
    for depth in explore_chains(f, dedupe="family"):
        for node in depth:
            count += 1
            index[node.path] = count
            parent = index.get(node.path[:-1])
            target = f"x{parent}" if parent else "x"
            entries.append(f"x{count}=L{node.path[-1].label()}({target})")
    return "; ".join(entries)


def _table_rows(m: int, n: int, with_chains: bool):
    report = classify(enumerate_standard(m, n))
    rows = []
    for number, c in enumerate(report.classes, start=1):
        row = {
            "#": number,
            "sum_trace": int(c.sum_trace),
            "quiver": quiver_grid_text(c.quiver),
            "gamma": [list(r) for r in c.gamma],
            "gamma_tilde": [list(r) for r in c.gamma_tilde],
            "equiv": c.orbit_size,
        }
        if with_chains:
            row["quasi_st"] = _chain_text(c.representative)
        rows.append(row)
    return report, rows


def _render(rows, fmt: str, with_chains: bool) -> str:
    header = ["#", "sum Tr", "quiver", "Gamma", "Gamma~", "# equiv"] + (["quasi-st."] if with_chains else [])

    def cells(r):
        out = [str(r["#"]), str(r["sum_trace"]), r["quiver"], _format_gamma(r["gamma"]),
               _format_gamma(r["gamma_tilde"]), str(r["equiv"])]
        if with_chains:
            out.append(r["quasi_st"])
        return out

    if fmt == "json":
        return json.dumps(rows, separators=(",", ":"))
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for r in rows:
            writer.writerow(cells(r))
        return buf.getvalue().rstrip("\n")
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for r in rows:
        c = cells(r)
        c[2] = "<br>".join(c[2].splitlines())
        lines.append("| " + " | ".join(c) + " |")
    return "\n".join(lines)


FORMAT = click.Choice(["json", "md", "csv"])


@main.command("enumerate-standard")
@click.option("--m", "m", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--classify", "do_classify", is_flag=True, help="Group into isomorphism classes.")
@click.option("--format", "fmt", type=FORMAT, default="json")
def enumerate_cmd(m: int, n: int, do_classify: bool, fmt: str) -> None:
    """Every standard twisting map, in deterministic enumeration order."""
    if do_classify:
        _, rows = _table_rows(m, n, with_chains=False)
        click.echo(_render(rows, fmt, with_chains=False))
        return
    fams = enumerate_standard(m, n)
    if fmt == "json":
        click.echo("[" + ",".join(dumps(f) for f in fams) + "]")
    else:
        quivers = [quiver_of(f) for f in fams]
        rows = [{"#": i, "vertices": len(q.vertices), "arrows": len(q.arrows),
                 "quiver": " / ".join(quiver_grid_text(q).splitlines())} for i, q in enumerate(quivers, 1)]
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else ["#"], lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
            click.echo(buf.getvalue().rstrip("\n"))
        else:
            click.echo("| # | vertices | arrows | quiver |\n|---|---|---|---|")
            for r in rows:
                click.echo(f"| {r['#']} | {r['vertices']} | {r['arrows']} | {r['quiver']} |")


@main.command("classify-table")
@click.option("--m", "m", type=int, required=True)
@click.option("--n", "n", type=int, required=True)
@click.option("--format", "fmt", type=FORMAT, default="md")
def classify_table_cmd(m: int, n: int, fmt: str) -> None:
    """Classes of standard maps sorted by trace sum, with deformation chains when m, n >= 3."""
    with_chains = m >= 3 and n >= 3
    _, rows = _table_rows(m, n, with_chains)
    click.echo(_render(rows, fmt, with_chains))


@main.command("quiver")
@click.argument("path")
@click.option("--dot", is_flag=True, help="Emit Graphviz DOT instead of the grid diagram.")
def quiver_cmd(path: str, dot: bool) -> None:
    """Quiver of a standard or quasi-standard map."""
    q = quiver_of(_load(path))
    click.echo(quiver_dot(q) if dot else quiver_grid_text(q))


@main.command("radical")
@click.argument("path")
@click.option("--method", type=click.Choice(["auto", "search", "closed"]), default="auto")
def radical_cmd(path: str, method: str) -> None:
    """Jacobson radical of the twisted tensor product."""
    f = _load(path)
    report = verify(f)
    if not report.is_twisting:
        raise TwistlabError("not a twisting map; run verify for the violations")
    _emit(jacobson_radical(build_algebra(f), f, method=method).to_json())


@main.command("sites")
@click.argument("path")
def sites_cmd(path: str) -> None:
    """Admissible deformation sites of a quasi-standard map."""
    f = _load(path)
    _emit([{"site": [list(p) for p in s.site]} for s in deformation_sites(f)])


@main.command("deform")
@click.argument("path")
@click.option("--site", required=True, help="k,u,d,v,ck,l (1-based)")
@click.option("--lambda", "lam", required=True, help="rational p/q")
@click.option("--mu1", is_flag=True, help="Also print the first-order multiplication change.")
def deform_cmd(path: str, site: str, lam: str, mu1: bool) -> None:
    """Apply the one-parameter deformation at a site."""
    f = _load(path)
    k, u, d, v, c, l = _parse_ints(site, 6, "site")
    spec = DeformationSpec(k, u, d, v, c, l, _parse_rat(lam, "lambda"))
    try:
        g = deform(f, spec)
    except DeformationError as exc:
        _emit({"error": str(exc), "failing": exc.failing})
        raise DomainFailure from exc
    if not mu1:
        click.echo(dumps(g))
        return
    table = mu1_table(f, g, spec.lam) if spec.lam != 0 else {}
    _emit({"family": json.loads(dumps(g)),
           "mu1": [{"left": list(a), "right": list(b), "value": fmt_rat(x)} for (a, b), x in sorted(table.items())]})


@main.command("family")
@click.argument("name", type=click.Choice(FAMILY_NAMES))
@click.option("--a", "a")
@click.option("--x", "x")
@click.option("--y", "y")
@click.option("--alpha", "alpha")
@click.option("--z", "z")
@click.option("--variant", type=click.Choice(["1", "2"]), default="1")
@click.option("--vectors", help='v_2..v_n as "1,2;1,3" (v_1 is all ones)')
@click.option("--m", "m", type=int, default=2)
@click.option("--n", "n", type=int, default=2)
def family_cmd(name, a, x, y, alpha, z, variant, vectors, m, n) -> None:
    """Emit a named explicit family as JSON."""
    vecs = ()
    if vectors:
        try:
            vecs = tuple(tuple(rat(t) for t in part.split(",")) for part in vectors.split(";"))
        except (TwistlabError, ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError("--vectors expects rationals like '1,2;1,3'") from exc
    params = FamilyParams(name, _parse_rat(a, "a"), _parse_rat(x, "x"), _parse_rat(y, "y"),
                          _parse_rat(alpha, "alpha"), _parse_rat(z, "z"), int(variant), vecs, m, n)
    click.echo(dumps(build_family(params)))


@main.command("rep")
@click.argument("path")
@click.option("--index", type=int, required=True, help="u for side A, v for side B (1-based)")
@click.option("--side", type=click.Choice(["A", "B"]), default="A")
def rep_cmd(path: str, index: int, side: str) -> None:
    """Matrix representation of the algebra attached to one index."""
    f = _load(path)
    r = representation(f, index, side)
    _emit({
        "side": side,
        "index": index,
        "size": r.size,
        "multiplicative": r.is_multiplicative(),
        "unital": r.is_unital(),
        "image_dim": rep_image_dim(r),
        "support_dim": rep_support_dim(r),
        "images": [{"basis": list(r.algebra.label(b)), "matrix": mat_to_json(m)} for b, m in enumerate(r.images)],
    })


def run(argv=None) -> int:
    """Entry point returning the exit code instead of exiting."""
    try:
        main.main(args=argv, prog_name="twistlab", standalone_mode=False)
    except DomainFailure:
        return 1
    except (MalformedInputError, click.UsageError, click.BadParameter) as exc:
        message = exc.format_message() if isinstance(exc, click.ClickException) else str(exc)
        click.echo(f"error: {message}", err=True)
        return 2
    except (GuardExceeded, TwistlabError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return 1
    return 0


def entry() -> None:
    sys.exit(run())
