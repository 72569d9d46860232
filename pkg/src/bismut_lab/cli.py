"""Command-line front end: `bismut-lab <command> <file> [options]`.

Exit codes: 0 success, 2 validation failure, 3 schema or parse error.
"""

from __future__ import annotations

import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import click

from . import catalog
from .conditions import check_all
from .config import default_tol, resolve_tol
from .connections import curvature
from .coordinate import (
    chern_curvature_at,
    chern_torsion_at,
    metric_jets,
    normalize_point,
    point_report,
    riemannian_at,
)
from .documents import (
    InputError,
    ValidationFailure,
    dumps,
    emit_catalog,
    encode,
    load_document,
    validation_summary,
)
from .identities import bismut_data, identity_suite

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT = 0, 2, 3


# report builders; each takes a parsed document and returns a JSON-ready dict


def _prepare(doc, tol):
    kind, obj, doc_tol = load_document(doc)
    tol = resolve_tol(tol if tol is not None else doc_tol)
    valid = validation_summary(kind, obj, tol)
    return kind, obj, tol, valid


def _require_valid(valid):
    if not valid["accepted"]:
        raise ValidationFailure("input failed validation: " + json.dumps(encode(valid), sort_keys=True))


def _summary(flags, rank_B):
    btp = flags.get("btp_direct", flags.get("btp"))
    out = {"balanced": flags["balanced"]["value"], "btp": btp["value"], "rankB": rank_B}
    if "bkl" in flags:
        out["bkl"] = flags["bkl"]["value"]
    return out


def check_report(doc, tol=None):
    """Report every condition flag with its residual."""
    kind, obj, tol, valid = _prepare(doc, tol)
    _require_valid(valid)
    if kind == "coordinate":
        rep = point_report(obj, tol)
        return {"kind": kind, "tol": tol, "validation": valid, "flags": rep["flags"], "rank_B": rep["rank_B"],
                "B_eigenvalues": rep["B_eigenvalues"], "classification": rep["classification"],
                "summary": _summary(rep["flags"], rep["rank_B"])}
    rep = check_all(obj, tol).to_dict()
    return {"kind": kind, "tol": tol, "validation": valid, "flags": rep["flags"], "rank_B": rep["rank_B"],
            "B_eigenvalues": rep["B_eigenvalues"], "classification": rep["classification"],
            "summary": _summary(rep["flags"], rep["rank_B"])}


def validate_report(doc, tol=None):
    """Check that the input is well formed (d² = 0, or a positive Hermitian metric)."""
    kind, _, tol, valid = _prepare(doc, tol)
    return {"kind": kind, "tol": tol, "validation": valid}


def classify_report(doc, tol=None):
    """Print the classification label."""
    rep = check_report(doc, tol)
    return {"kind": rep["kind"], "tol": rep["tol"], "classification": rep["classification"],
            "label": rep["classification"].get("label")}


def identities_report(doc, tol=None):
    """Residuals of the curvature and torsion identity suite."""
    kind, obj, tol, valid = _prepare(doc, tol)
    _require_valid(valid)
    if kind != "lie_hermitian":
        raise InputError("the identity suite needs a Lie-Hermitian structure")
    residuals = identity_suite(obj, tol=tol)
    return {"kind": kind, "tol": tol, "residuals": residuals,
            "max_residual": max(residuals.values(), default=0.0)}


def component_table(data, tol, barred):
    """Nonzero entries of a 4-index array in lexicographic index order.

    barred says which of the four slots carry a conjugate index; indices are 1-based.
    """
    rows = []
    for idx in itertools.product(*(range(s) for s in data.shape)):
        v = complex(data[idx])
        if abs(v) < tol:
            continue
        label = " ".join(f"{i + 1}{'b' if b else ''}" for i, b in zip(idx, barred))
        rows.append({"indices": label, "value": v})
    return rows


R20 = (False, False, False, True)
R11 = (False, True, False, True)


def curvature_report(doc, tol=None):
    """Chern, Bismut and Riemannian curvature tables."""
    kind, obj, tol, valid = _prepare(doc, tol)
    _require_valid(valid)
    tables = {}
    notes = []
    if kind == "coordinate":
        mj = metric_jets(normalize_point(obj, tol=tol))
        n = mj.n
        Rc = chern_curvature_at(mj)
        riem = riemannian_at(mj, T=chern_torsion_at(mj), Rc=Rc, tol=tol)
        tables["chern_11"] = component_table(Rc.r11, tol, R11)
        full = riem.full
        tables["riemannian_20"] = component_table(full[:n, :n, :n, n:], tol, R20)
        tables["riemannian_11"] = component_table(full[:n, n:, :n, n:], tol, R11)
        notes.append("Bismut curvature tables are produced for Lie-Hermitian input only")
        extra = {"riemannian_formula_residual": riem.formula_residual}
        if riem.warning:
            notes.append(riem.warning)
    else:
        d = bismut_data(obj)
        n = d.n
        tables["chern_11"] = component_table(d.Rc.r11, tol, R11)
        tables["bismut_20"] = component_table(d.Rb.r20, tol, R20)
        tables["bismut_11"] = component_table(d.Rb.r11, tol, R11)
        b = d.bundle
        full = curvature(obj, (b.theta1, b.theta2), "riemannian").full()
        tables["riemannian_20"] = component_table(full[:n, :n, :n, n:], tol, R20)
        tables["riemannian_11"] = component_table(full[:n, n:, :n, n:], tol, R11)
        extra = {}
    return {"kind": kind, "tol": tol, "n": n, "tables": tables, "notes": notes, **extra}


COMMANDS = {
    "validate": validate_report,
    "check": check_report,
    "classify": classify_report,
    "identities": identities_report,
    "curvature": curvature_report,
}


# census


def parse_grid(text):
    """A grid is a JSON object mapping parameter names to lists of values, or @path to such a file."""
    if text is None:
        raise InputError("census needs --grid")
    try:
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                grid = json.load(fh)
        else:
            grid = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read grid: {exc}") from None
    if not isinstance(grid, dict) or not all(isinstance(v, list) and v for v in grid.values()):
        raise InputError("grid must map parameter names to non-empty lists")
    return grid


def grid_points(grid):
    names = sorted(grid)
    return [dict(zip(names, combo)) for combo in itertools.product(*(grid[k] for k in names))]


def _census_task(args):
    doc, tol = args
    try:
        return {"params": doc["params"], "report": check_report(doc, tol)}
    except ValidationFailure as exc:
        return {"params": doc["params"], "error": str(exc)}


def census_report(doc, grid, tol=None, workers=1):
    if not isinstance(doc, dict) or doc.get("type") != "catalog":
        raise InputError("census sweeps the parameters of a catalog document")
    base = doc.get("params", {})
    if not isinstance(base, dict):
        raise InputError("params must be an object")
    try:
        entry = catalog.get(doc.get("name"))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    known = {p.name for p in entry.params}
    unknown = sorted(set(grid) - known)
    if unknown:
        raise InputError(f"grid names unknown parameter(s) of {entry.name}: {', '.join(unknown)}")
    docs = [{**doc, "params": {**base, **point}} for point in grid_points(grid)]
    for d in docs:
        try:
            load_document(d)  # surface schema errors before fanning out
        except ValidationFailure:
            pass  # reported per grid point
    tasks = [(d, tol) for d in docs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_census_task, tasks))
    else:
        results = [_census_task(t) for t in tasks]
    for i, r in enumerate(results):
        r["index"] = i
    return {"kind": "census", "name": entry.name, "grid": grid, "results": results}


# markdown


def _fmt(v):
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        re_, im = v
        if im == 0:
            return f"{re_:.12g}"
        return f"{re_:.12g} {'+' if im >= 0 else '-'} {abs(im):.12g}i"
    if isinstance(v, float):
        return f"{v:.6g}"
    return json.dumps(v, sort_keys=True, ensure_ascii=False)


def to_markdown(command, report):
    lines = [f"# bismut-lab {command}", ""]
    rep = encode(report)
    if "flags" in rep:
        lines += ["## Flags", "", "| flag | value | residual |", "| --- | --- | --- |"]
        for name in sorted(rep["flags"]):
            f = rep["flags"][name]
            lines.append(f"| {name} | {_fmt(f.get('value'))} | {_fmt(f.get('residual'))} |")
        lines.append("")
    if "tables" in rep:
        for name in sorted(rep["tables"]):
            lines += [f"## {name}", "", "| indices | value |", "| --- | --- |"]
            lines += [f"| {row['indices']} | {_fmt(row['value'])} |" for row in rep["tables"][name]]
            lines.append("")
    if "residuals" in rep:
        lines += ["## Identity residuals", "", "| identity | residual |", "| --- | --- |"]
        lines += [f"| {k} | {_fmt(v)} |" for k, v in sorted(rep["residuals"].items())]
        lines.append("")
    if "results" in rep:
        lines += ["## Census", "", "| index | params | label | balanced | btp | rank B |",
                  "| --- | --- | --- | --- | --- | --- |"]
        for r in rep["results"]:
            if "error" in r:
                lines.append(f"| {r['index']} | {_fmt(r['params'])} | error: {r['error']} | | | |")
                continue
            s = r["report"]["summary"]
            label = r["report"]["classification"].get("label")
            lines.append(f"| {r['index']} | {_fmt(r['params'])} | {label} | {s['balanced']} | {s['btp']} "
                         f"| {s['rankB']} |")
        lines.append("")
    rest = {k: v for k, v in rep.items() if k not in ("flags", "tables", "residuals", "results")}
    lines += ["## Details", "", "```json", json.dumps(rest, sort_keys=True, indent=2, ensure_ascii=False), "```", ""]
    return "\n".join(lines)


# click plumbing


def _read_document(path):
    try:
        if path == "-":
            return json.loads(click.get_text_stream("stdin").read())
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _emit(command, report, fmt, out, echo=None, timing=None):
    if echo is not None:
        report = {**report, "input": echo}
    if timing is not None:
        report = {**report, "timing": {"seconds": timing}}
    text = to_markdown(command, report) if fmt == "md" else dumps(report)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _run(fn):
    """Map library errors onto exit codes with a one-line diagnostic on stderr."""
    try:
        try:
            default_tol()
        except ValueError as exc:
            raise InputError(str(exc)) from None
        code = fn()
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except ValidationFailure as exc:
        click.echo(f"validation failed: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    except ValueError as exc:
        click.echo(f"validation failed: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    sys.exit(code or EXIT_OK)


_common = [
    click.argument("path", type=click.Path(dir_okay=False)),
    click.option("--tol", type=float, default=None, help="Zero tolerance (default 1e-9 or BISMUT_LAB_TOL)."),
    click.option("--format", "fmt", type=click.Choice(["json", "md"]), default="json"),
    click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the report here."),
    click.option("--timing", is_flag=True, help="Include wall-clock time (breaks byte-identical output)."),
]


def _with_common(f):
    for deco in reversed(_common):
        f = deco(f)
    return f


@click.group()
def main():
    """Hermitian geometry checks for Lie-Hermitian structures and coordinate metrics."""


def _make_command(name, fn):
    @_with_common
    def command(path, tol, fmt, out, timing):
        def body():
            if tol is not None and not tol > 0:
                raise InputError("--tol must be positive")
            doc = _read_document(path)
            start = time.perf_counter()
            report = fn(doc, tol)
            elapsed = time.perf_counter() - start if timing else None
            _emit(name, report, fmt, out, echo=doc, timing=elapsed)
            if name == "validate" and not report["validation"]["accepted"]:
                click.echo("validation failed", err=True)
                return EXIT_VALIDATION
            return EXIT_OK

        _run(body)

    command.__doc__ = (fn.__doc__ or f"Run {name}.").strip().splitlines()[0]
    main.command(name)(command)


for _name, _fn in COMMANDS.items():
    _make_command(_name, _fn)



@main.command("census")
@_with_common
@click.option("--grid", "grid_spec", default=None, help='JSON object {"param": [values...]} or @file.')
@click.option("--workers", type=int, default=1, show_default=True)
def census(path, tol, fmt, out, timing, grid_spec, workers):
    """Run check over a parameter grid of a catalog family."""

    def body():
        if workers < 1:
            raise InputError("--workers must be at least 1")
        doc = _read_document(path)
        grid = parse_grid(grid_spec)
        start = time.perf_counter()
        report = census_report(doc, grid, tol, workers)
        elapsed = time.perf_counter() - start if timing else None
        _emit("census", report, fmt, out, echo=doc, timing=elapsed)

    _run(body)


@main.group("catalog")
def catalog_group():
    """List catalog entries or emit one as an input document."""


@catalog_group.command("list")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def catalog_list(out):
    """Names and parameter schemas of every entry."""
    _run(lambda: _emit("catalog list", {"entries": catalog.list_entries()}, "json", out))


@catalog_group.command("emit")
@click.argument("name")
@click.option("--params", "params_json", default="{}", help="JSON object of parameters.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def catalog_emit(name, params_json, out):
    """Write the named entry as a self-contained input document."""

    def body():
        try:
            params = json.loads(params_json)
        except json.JSONDecodeError as exc:
            raise InputError(f"--params is not valid JSON: {exc}") from None
        if not isinstance(params, dict):
            raise InputError("--params must be a JSON object")
        try:
            doc = emit_catalog(name, params)
        except catalog.ConstraintError as exc:
            raise ValidationFailure(str(exc)) from None
        except (catalog.ParamError, ValueError) as exc:
            raise InputError(str(exc)) from None
        _emit("catalog emit", doc, "json", out)

    _run(body)


if __name__ == "__main__":
    main()
