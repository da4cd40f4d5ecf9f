"""asicpovm command line: construct, certify, scan and bounds."""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import click

from . import constructions as cons
from .certify import EXHAUSTIVE_CAP, SAMPLE_PAIRS
from .report import certify
from .sums import BoundViolation, empirical_sum_bound, mixed_sweep, weil_sweep
from .systems import SCHEMA_VERSION, MalformedInputError, ProjectorPOVM, _jsonable, dumps, load

log = logging.getLogger("asicpovm")

EXIT_OK, EXIT_FAIL, EXIT_MALFORMED = 0, 1, 2
BUILD_NAMES = ("mub", "asic1", "asic2", "amub-poly", "asic-approx", "amub-char")
# which flag carries the dimension for each construction
DIM_FLAG = {"intro": None, "mub": "q", "asic1": "q", "asic2": "p",
            "amub-poly": "n", "asic-approx": "n", "amub-char": "n"}


def parse_r(text: str | None):
    """r as an exact fraction when written like '124/125', otherwise a float."""
    if text is None:
        return None
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"cannot read r={text!r}") from exc


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise click.BadParameter(f"expected a comma-separated integer list, got {text!r}") from exc


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    header = list(rows[0])
    for row in rows[1:]:
        header += [k for k in row if k not in header]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(row.get(k)) for k in header])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=not text.endswith("\n"))


def _build(name: str, q, p, n, d, r):
    return cons.build(name, q=q, p=p, n=n, d=d, r=r)


@click.group()
@click.option("--verbose", is_flag=True, help="Debug logging on stderr.")
def main(verbose: bool) -> None:
    """Approximate SIC-POVMs, MUBs and approximate MUBs: build, certify, sweep."""
    logging.basicConfig(level=logging.DEBUG if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")


# --- construct -------------------------------------------------------------------------


@main.command()
@click.argument("name", type=click.Choice(BUILD_NAMES + ("intro",)))
@click.option("--q", type=int, help="Odd prime power (mub, asic1).")
@click.option("--p", type=int, help="Odd prime (asic2).")
@click.option("--n", type=int, help="Dimension (amub-poly, asic-approx, amub-char).")
@click.option("--d", type=int, help="Degree parameter (amub-poly, amub-char).")
@click.option("--r", "r_text", type=str, help="Perturbation in (0, 1) for asic2, e.g. 0.99 or 124/125.")
@click.option("--out", type=click.Path(dir_okay=False), help="Output JSON path (default stdout).")
def construct(name, q, p, n, d, r_text, out) -> None:
    """Build a system and write its JSON serialization."""
    try:
        obj = _build(name, q, p, n, d, parse_r(r_text))
    except (ValueError, OverflowError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_MALFORMED)
    _emit(dumps(obj), out)
    kind = "POVM" if isinstance(obj, ProjectorPOVM) else "vector system"
    prov = (obj.source if isinstance(obj, ProjectorPOVM) else obj).provenance
    click.echo(f"{name}: {kind}, n={obj.n}, {len(obj)} vectors, provenance {json.dumps(prov)}", err=True)


# --- certify ---------------------------------------------------------------------------


@main.command(name="certify")
@click.argument("path", required=False, type=click.Path(dir_okay=False))
@click.option("--name", type=click.Choice(("intro",) + BUILD_NAMES), help="Construct and certify in one step.")
@click.option("--q", type=int)
@click.option("--p", type=int)
@click.option("--n", type=int)
@click.option("--d", type=int)
@click.option("--r", "r_text", type=str)
@click.option("--exhaustive-cap", type=int, default=EXHAUSTIVE_CAP, show_default=True)
@click.option("--samples", type=int, default=SAMPLE_PAIRS, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tomography/--no-tomography", default=True, show_default=True)
@click.option("--timing/--no-timing", default=True, show_default=True, help="Include wall_time.")
@click.option("--out", type=click.Path(dir_okay=False), help="Also write the report here.")
def certify_cmd(path, name, q, p, n, d, r_text, exhaustive_cap, samples, seed, tomography, timing, out) -> None:
    """Certify a saved system (PATH) or a named construction.

    Exit 0 when every hard check passes, 1 on a failed check, 2 on malformed input.
    """
    if (path is None) == (name is None):
        click.echo("error: give exactly one of PATH or --name", err=True)
        sys.exit(EXIT_MALFORMED)
    try:
        obj = load(path) if path else _build(name, q, p, n, d, parse_r(r_text))
    except (MalformedInputError, ValueError, OverflowError, click.BadParameter) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_MALFORMED)
    rep = certify(obj, exhaustive_cap=exhaustive_cap, samples=samples, seed=seed, tomography=tomography)
    text = json.dumps(rep.to_dict(timing=timing), indent=2, allow_nan=False)
    click.echo(text)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    if not rep.passed:
        click.echo(f"FAILED: {', '.join(rep.failures)}", err=True)
        sys.exit(EXIT_FAIL)


# --- scan ------------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanSpec:
    construction: str
    dims: tuple[int, ...]
    ds: tuple[int, ...] = (1,)
    r: str | None = None
    exhaustive_cap: int = EXHAUSTIVE_CAP
    samples: int = SAMPLE_PAIRS
    seed: int = 0
    fmt: str = "csv"
    out: str | None = None
    workers: int = 1

    def __post_init__(self):
        if not self.dims:
            raise ValueError("scan needs a non-empty dimension list")
        if self.construction not in DIM_FLAG or DIM_FLAG[self.construction] is None:
            raise ValueError(f"cannot scan construction {self.construction!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"unknown format {self.fmt!r}")

    def points(self) -> list[dict]:
        uses_d = self.construction in ("amub-poly", "amub-char")
        flag = DIM_FLAG[self.construction]
        pts = []
        for dim in sorted(set(self.dims)):
            for d in (sorted(set(self.ds)) if uses_d else [None]):
                pts.append({flag: dim, "d": d})
        return pts


def _scan_point(spec: ScanSpec, point: dict) -> dict:
    row = {"construction": spec.construction, "q": point.get("q"), "p": point.get("p"),
           "n_param": point.get("n"), "d": point.get("d"), "r": spec.r}
    try:
        r = parse_r(spec.r) if spec.construction == "asic2" else None
        obj = _build(spec.construction, point.get("q"), point.get("p"), point.get("n"), point.get("d"), r)
        rep = certify(obj, exhaustive_cap=spec.exhaustive_cap, samples=spec.samples, seed=spec.seed)
        rec = rep.csv_row()
        rec.pop("construction")
        row.update(rec)
        row["bound_value"] = rep.bound_value
        row["error"] = None
    except Exception as exc:  # recorded in-row, the scan carries on
        row.update({"passed": False, "error": f"{type(exc).__name__}: {exc}"})
    return row


def run_scan(spec: ScanSpec) -> list[dict]:
    """Certify every parameter point; rows come back sorted by parameters."""
    pts = spec.points()
    if spec.workers > 1 and len(pts) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_scan_point, [spec] * len(pts), pts))
    else:
        rows = [_scan_point(spec, pt) for pt in pts]

    def key(row):
        return tuple(-1 if row.get(k) is None else row[k] for k in ("q", "p", "n_param", "d"))

    return sorted(rows, key=key)


@main.command()
@click.argument("construction", type=click.Choice(BUILD_NAMES))
@click.option("--dims", required=True, help="Comma-separated dimensions (q, p or n by construction).")
@click.option("--d", "d_list", default="1", show_default=True, help="Comma-separated d values.")
@click.option("--r", "r_text", type=str, help="asic2 perturbation override.")
@click.option("--exhaustive-cap", type=int, default=EXHAUSTIVE_CAP, show_default=True)
@click.option("--samples", type=int, default=SAMPLE_PAIRS, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(("csv", "json")), default="csv", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def scan(construction, dims, d_list, r_text, exhaustive_cap, samples, seed, fmt, workers, out) -> None:
    """Certify a construction over a parameter grid and emit one row per point."""
    try:
        spec = ScanSpec(construction, tuple(_int_list(dims)), tuple(_int_list(d_list)) or (1,), r_text,
                        exhaustive_cap, samples, seed, fmt, out, max(1, workers))
        if r_text is not None:
            parse_r(r_text)
    except (ValueError, click.BadParameter) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_MALFORMED)
    rows = run_scan(spec)
    if fmt == "csv":
        text = to_csv(rows)
    else:
        meta = {k: v for k, v in asdict(spec).items() if k not in ("out", "workers")}
        doc = {"schema_version": SCHEMA_VERSION, "type": "scan", "spec": meta, "rows": rows}
        text = json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"
    _emit(text, out)


# --- bounds ----------------------------------------------------------------------------


def _poly_arg(text: str | None, degree: int) -> list[int]:
    """Coefficients low degree first; default is the monomial X^degree."""
    if text:
        return _int_list(text)
    return [0] * degree + [1]


@main.command()
@click.argument("kind", type=click.Choice(("weil", "mixed", "weyl", "gauss")))
@click.option("--p", "p_single", type=int, help="A single prime.")
@click.option("--p-min", type=int, default=3, show_default=True)
@click.option("--p-max", type=int, default=61, show_default=True)
@click.option("--degree", type=int, default=None, help="Degree cap (weil sweep) or monomial degree.")
@click.option("--coeffs", type=str, help="F coefficients, low degree first, comma-separated.")
@click.option("--k", type=int, default=1, show_default=True, help="mixed: additive twist k.")
@click.option("--n", "n_mod", type=int, help="mixed: modulus n of e_n(ku) (default p - 1).")
@click.option("--h", type=int, help="weyl: partial range length (default ceil(sqrt p)).")
@click.option("--format", "fmt", type=click.Choice(("csv", "json")), default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False))
def bounds(kind, p_single, p_min, p_max, degree, coeffs, k, n_mod, h, fmt, out) -> None:
    """Exponential and character sums against their bounds.

    weil sweeps every monic F of degree <= --degree (default 4) and every
    nontrivial character, and exits 1 on any violation.  gauss asserts
    (d - 1) sqrt(p).  mixed and weyl only report ratios.
    """
    from .numtheory import is_prime

    primes = [p_single] if p_single else [m for m in range(max(3, p_min), p_max + 1) if is_prime(m)]
    rows: list[dict] = []
    failed = False
    try:
        if kind == "weil":
            if p_single:
                p_min = p_max = p_single
            for row in weil_sweep(p_max=p_max, deg_max=4 if degree is None else degree, p_min=p_min):
                rows.append(asdict(row))
                failed |= row.violations > 0
        else:
            deg = (2 if kind in ("gauss", "mixed") else 3) if degree is None else degree
            F = _poly_arg(coeffs, deg)
            for p in primes:
                if kind == "mixed":
                    res = mixed_sweep([p], F, k=k, n=n_mod)[0]
                elif kind == "weyl":
                    hh = h if h is not None else int(-(-p**0.5 // 1))
                    res = empirical_sum_bound(p, "weyl", F, h=min(hh, p))
                else:
                    res = empirical_sum_bound(p, "gauss", F)
                rows.append({"p": p, **{key: v for key, v in asdict(res).items() if key != "p"}})
    except BoundViolation as exc:
        click.echo(f"bound violated: {exc}", err=True)
        failed = True
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_MALFORMED)
    if fmt == "csv":
        text = to_csv(rows)
    else:
        doc = {"schema_version": SCHEMA_VERSION, "type": "bounds", "kind": kind, "rows": rows}
        text = json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"
    _emit(text, out)
    if failed:
        sys.exit(EXIT_FAIL)


if __name__ == "__main__":
    main()
