"""Command line front-end: classification runs, theta tables, Maass checks, V_d data."""
from __future__ import annotations

import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path

import click

from .hlattice import hnk_lattice, scale_by_ideal
from .isometry import search_isometry
from .maass import theorem3_verify
from .modgroup import build_vd
from .qfield import ideal_A_d, is_squarefree, make_field, squarefree_divisors
from .theta import CoefficientTable, table_first_mismatch, theta_oracle, theta_table

SCHEMA_VERSION = 1
MAX_M = 100
# theta tables are compared up to this trace bound to locate a mismatch index
MISMATCH_TRACE_BOUND = 6


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _write(text: str, out):
    if out is None or out == "-":
        click.echo(text)
    else:
        Path(out).write_text(text + "\n", encoding="utf-8")


def _fail(msg: str, code: int = 1):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("HERM_THREADS", "1")))
    except ValueError:
        return 1


def _cache_dir(path) -> Path:
    base = Path(path or os.environ.get("HERMTHETA_CACHE", ".hermtheta_cache"))
    return base / f"v{SCHEMA_VERSION}"


@lru_cache(maxsize=8)
def _lattice(m: int):
    return hnk_lattice(make_field(m))


def _scaled(m: int, d: int):
    L = _lattice(m)
    return L if d == 1 else scale_by_ideal(L, ideal_A_d(L.ctx, d))


def _mismatch(m: int, d: int):
    L, Ld = _lattice(m), _scaled(m, d)
    for B in range(1, MISMATCH_TRACE_BOUND + 1):
        hit = table_first_mismatch(theta_table(L, B), theta_table(Ld, B))
        if hit is not None:
            T, v1, v2 = hit
            return {"index": T.to_json(), "trace_bound": B, "count": int(v1), "count_scaled": int(v2)}
    return None


def classify_pair(m: int, d: int) -> dict:
    """Isometry verdict for Lambda vs (1/sqrt d) A_d Lambda."""
    if d == 1:
        n = 2 * _lattice(m).rank
        U = [[int(i == j) for j in range(n)] for i in range(n)]
        return {"m": m, "d": d, "isometric": True, "reason": "identity", "witness": U}
    res = search_isometry(_lattice(m), _scaled(m, d))
    out = {"m": m, "d": d, "isometric": res.isometric, "reason": res.reason}
    if res.isometric:
        out["witness"] = res.witness.to_json()
    else:
        out["mismatch"] = _mismatch(m, d)
    return out


def _cached_pair(args) -> dict:
    m, d, cache = args
    f = None
    if cache is not None:
        f = Path(cache) / "classify" / f"m{m}_d{d}.json"
        if f.exists():
            return json.loads(f.read_text(encoding="utf-8"))
    out = classify_pair(m, d)
    if f is not None:
        f.parent.mkdir(parents=True, exist_ok=True)
        tmp = f.with_suffix(".tmp")
        tmp.write_text(_dump(out), encoding="utf-8")
        tmp.replace(f)
    return out


def run_classification(ms, jobs: int = 1, cache=None) -> dict:
    tasks, errors = [], {}
    for m in ms:
        try:
            ctx = make_field(m)
            _lattice(m)
        except (ValueError, AssertionError) as exc:
            errors[m] = str(exc)
            continue
        tasks += [(m, d, cache) for d in squarefree_divisors(ctx.d_K)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_cached_pair, tasks))
    else:
        results = [_cached_pair(t) for t in tasks]
    reports = {}
    for r in results:
        m = r["m"]
        rep = reports.setdefault(m, {"m": m, "d_K": make_field(m).d_K, "verdicts": {}})
        rep["verdicts"][str(r["d"])] = {k: v for k, v in r.items() if k not in ("m", "d")}
    for rep in reports.values():
        rep["overall"] = all(v["isometric"] for v in rep["verdicts"].values())
    ordered = [reports[m] for m in sorted(reports)]
    return {
        "reports": ordered,
        "good": [r["m"] for r in ordered if r["overall"]],
        "bad": [r["m"] for r in ordered if not r["overall"]],
        "errors": {str(m): e for m, e in sorted(errors.items())},
    }


@click.group()
def main():
    """Hermitian theta lattices over Q(sqrt(-m))."""


@main.command()
@click.option("--max-m", type=int, help="classify every squarefree m <= MAX_M")
@click.option("--m", "single_m", type=int, help="classify a single m")
@click.option("--out", type=click.Path(dir_okay=False), help="JSON report path (default stdout)")
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False), help="CSV summary (m, d, isometric)")
@click.option("--jobs", type=int, default=None, help="worker processes (default $HERM_THREADS or 1)")
@click.option("--cache-dir", type=click.Path(file_okay=False), default=None)
@click.option("--no-cache", is_flag=True)
def classify(max_m, single_m, out, csv_out, jobs, cache_dir, no_cache):
    """Check L ~ (1/sqrt d) A_d L for every squarefree d | d_K."""
    if (max_m is None) == (single_m is None):
        _fail("give exactly one of --max-m and --m")
    if single_m is not None:
        if single_m < 1 or not is_squarefree(single_m):
            _fail(f"m={single_m} is not a positive squarefree integer")
        ms = [single_m]
    else:
        if max_m > MAX_M:
            _fail(f"--max-m is limited to {MAX_M}")
        ms = [m for m in range(1, max_m + 1) if is_squarefree(m)]
    cache = None if no_cache else str(_cache_dir(cache_dir))
    report = run_classification(ms, jobs or _default_jobs(), cache)
    _write(_dump(report), out)
    if csv_out:
        with open(csv_out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "d", "isometric"])
            for rep in report["reports"]:
                for d in sorted(rep["verdicts"], key=int):
                    w.writerow([rep["m"], d, str(rep["verdicts"][d]["isometric"]).lower()])


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--degree", type=click.Choice(["1", "2"]), default="2")
@click.option("--trace-bound", type=int, required=True)
@click.option("--ideal-d", type=int, default=None, help="scale the lattice by A_d first")
@click.option("--out", type=click.Path(dir_okay=False))
def theta(m, degree, trace_bound, ideal_d, out):
    """Theta coefficient table #(L, T) for k + l <= trace bound."""
    try:
        ctx = make_field(m)
        d = ideal_d or 1
        if d not in squarefree_divisors(ctx.d_K):
            raise ValueError(f"d={d} is not a squarefree divisor of |d_K|={ctx.abs_disc}")
    except ValueError as exc:
        _fail(str(exc))
    if trace_bound < 0:
        _fail("trace bound must be >= 0")
    table = theta_table(_scaled(m, d), trace_bound, int(degree))
    if ideal_d:
        table.meta["ideal_d"] = ideal_d
    _write(_dump(table.to_json()), out)


def _verdicts(report, checks):
    vals = []
    if "sugano" in checks:
        vals.append(report.sugano_ok)
    if "krieg" in checks:
        vals.append(report.krieg_ok)
    vals += list(report.invariance.values()) + list(report.lemma2iii.values())
    return vals


@main.command()
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--weight", type=int, default=None, help="override the table's weight")
@click.option("--checks", default="sugano,krieg,invariance,lemma2iii", show_default=True)
@click.option("--no-oracle", is_flag=True, help="never recompute theta coefficients")
@click.option("--out", type=click.Path(dir_okay=False))
def maass(table_path, weight, checks, no_oracle, out):
    """Sugano / Krieg / V_d-invariance checks on a coefficient table.

    Exit status: 0 all pass, 1 malformed table, 2 a check failed, 3 undetermined.
    """
    try:
        data = json.loads(Path(table_path).read_text(encoding="utf-8"))
        table = CoefficientTable.from_json(data)
    except (ValueError, OSError) as exc:
        _fail(str(exc), 1)
    if weight is not None:
        table.weight = weight
    selected = tuple(c.strip() for c in checks.split(",") if c.strip())
    unknown = set(selected) - {"sugano", "krieg", "invariance", "lemma2iii"}
    if unknown:
        _fail(f"unknown checks: {sorted(unknown)}")
    oracle = None
    if not no_oracle and table.source == "theta" and table.meta.get("degree", 2) == 2:
        oracle = theta_oracle(_scaled(table.ctx.m, int(table.meta.get("ideal_d", 1))))
    report = theorem3_verify(table, oracle, checks=selected)
    _write(_dump(report.to_json()), out)
    vals = _verdicts(report, selected)
    if False in vals:
        sys.exit(2)
    if None in vals:
        sys.exit(3)


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--d", type=int, required=True)
def vd(m, d):
    """Canonical Atkin-Lehner data V_d."""
    try:
        V = build_vd(make_field(m), d)
    except ValueError as exc:
        _fail(str(exc))
    click.echo(_dump({**V.to_json(), "m": m, "symbolic": V.symbolic()}))


@main.command()
@click.option("--m", type=int, required=True)
@click.option("--d", type=int, required=True)
def isometry(m, d):
    """Search an isometry L -> (1/sqrt d) A_d L."""
    try:
        ctx = make_field(m)
        if d not in squarefree_divisors(ctx.d_K):
            raise ValueError(f"d={d} is not a squarefree divisor of |d_K|={ctx.abs_disc}")
    except ValueError as exc:
        _fail(str(exc))
    L, Ld = _lattice(m), _scaled(m, d)
    r = classify_pair(m, d)
    out = {
        "m": m,
        "d": d,
        "isometric": r["isometric"],
        "reason": r["reason"],
        "witness": r.get("witness", "none"),
        "gram": [[str(x) for x in row] for row in L.gram],
        "gram_scaled": [[str(x) for x in row] for row in Ld.gram],
    }
    click.echo(_dump(out))


if __name__ == "__main__":
    main()
