"""Manifest-driven runs of the verification suites.

    jetcalc --manifest sphere.json --out report.json [--tolerance 1e-8] [--seed 7]

Exit codes: 0 all entries pass, 1 some entry fails, 2 manifest or
expression parse error, 3 singular metric or domain error at a sampled
point, 4 non-Cartan connection with ricci/bianchi requested.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .expr import EvaluationError, ParseError, Point, PointBatch, parse
from .geometry import (
    HNormalSpec,
    Metric,
    NonlinearConnection,
    SingularMetricError,
    berwald,
    build_hnormal,
    canonical_nonlinear,
    cartan_residuals,
    christoffel,
)
from .identities import (
    DEFAULT_TOLERANCE,
    DVectorField,
    IdentityReport,
    NotCartanError,
    bianchi_suite,
    curvature_check,
    deflection_suite,
    ricci_suite,
    torsion_check,
)

__all__ = ["Manifest", "ManifestError", "RunResult", "load_manifest", "run", "main"]

SUITES = ("torsion_check", "curvature_check", "deflection", "ricci", "bianchi")
EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_SINGULAR, EXIT_CARTAN = 0, 1, 2, 3, 4


class ManifestError(ValueError):
    """The manifest is malformed."""


@dataclass
class Manifest:
    p: int
    n: int
    h: list
    phi: list
    connection: object = "berwald"
    nonlinear_connection: dict | None = None
    count: int = 20
    seed: int = 0
    t_ranges: list = field(default_factory=list)
    x_ranges: list = field(default_factory=list)
    v_range: tuple = (-1.0, 1.0)
    tolerance: float = DEFAULT_TOLERANCE
    suites: list = field(default_factory=lambda: list(SUITES))
    X: dict | None = None
    bianchi_variant: str = "derived"
    source: dict = field(default_factory=dict, repr=False)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.p, self.n)

    def digest(self) -> str:
        canon = json.dumps(self.source, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _ranges(raw, count: int, name: str) -> list[tuple[float, float]]:
    if raw is None:
        return [(-1.0, 1.0)] * count
    if isinstance(raw, list) and len(raw) == 2 and all(isinstance(v, (int, float)) for v in raw):
        raw = [raw] * count
    if not isinstance(raw, list) or len(raw) != count:
        raise ManifestError(f"{name} needs {count} [lo, hi] pairs")
    out = []
    for pair in raw:
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ManifestError(f"{name} entries must be [lo, hi]")
        lo, hi = float(pair[0]), float(pair[1])
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
            raise ManifestError(f"{name} range [{lo}, {hi}] is empty or not finite")
        out.append((lo, hi))
    return out


def _grid(raw, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.array(raw, dtype=object)
    if arr.shape != shape:
        raise ManifestError(f"{name} must have shape {shape}, got {arr.shape}")
    for idx in np.ndindex(shape):
        if not isinstance(arr[idx], (str, int, float)):
            raise ManifestError(f"{name}{list(idx)} must be an expression string")
    return arr


def load_manifest(data: dict) -> Manifest:
    """Validate a decoded manifest document."""
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    try:
        dims = data["dims"]
        p, n = int(dims["p"]), int(dims["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ManifestError("dims {p, n} missing or not integers") from exc
    if not (1 <= p <= 4 and 1 <= n <= 4):
        raise ManifestError(f"dims must lie in [1, 4], got p={p}, n={n}")
    for key in ("h", "phi"):
        if key not in data:
            raise ManifestError(f"missing field {key!r}")
    h = _grid(data["h"], (p, p), "h").tolist()
    phi = _grid(data["phi"], (n, n), "phi").tolist()

    connection = data.get("connection", "berwald")
    if connection != "berwald":
        if not isinstance(connection, dict) or set(connection) - {"G", "L", "C"}:
            raise ManifestError('connection must be "berwald" or an object with G, L, C grids')
        shapes = {"G": (n, n, p), "L": (n, n, n), "C": (n, n, n, p)}
        connection = {k: _grid(connection.get(k, np.zeros(s).tolist()), s, k).tolist() for k, s in shapes.items()}

    nonlinear = data.get("nonlinear_connection")
    if nonlinear is not None:
        if not isinstance(nonlinear, dict) or set(nonlinear) != {"M", "N"}:
            raise ManifestError("nonlinear_connection must be an object with M and N grids")
        nonlinear = {
            "M": _grid(nonlinear["M"], (n, p, p), "M").tolist(),
            "N": _grid(nonlinear["N"], (n, p, n), "N").tolist(),
        }

    sampling = data.get("sampling", {})
    if not isinstance(sampling, dict):
        raise ManifestError("sampling must be an object")
    count = int(sampling.get("count", 20))
    if count < 1:
        raise ManifestError("sampling.count must be at least 1")
    v_range = _ranges(sampling.get("v_range", [-1.0, 1.0]), 1, "v_range")[0]

    suites = data.get("suites", list(SUITES))
    if not isinstance(suites, list) or not suites or any(s not in SUITES for s in suites):
        raise ManifestError(f"suites must be a nonempty subset of {list(SUITES)}")
    X = data.get("X")
    if "ricci" in suites and X is None:
        raise ManifestError("suite 'ricci' needs a d-vector field X")
    if X is not None:
        if not isinstance(X, dict) or set(X) != {"temporal", "spatial", "fiber"}:
            raise ManifestError("X must be an object with temporal, spatial and fiber grids")
        X = {
            "temporal": _grid(X["temporal"], (p,), "X.temporal").tolist(),
            "spatial": _grid(X["spatial"], (n,), "X.spatial").tolist(),
            "fiber": _grid(X["fiber"], (n, p), "X.fiber").tolist(),
        }
    tolerance = float(data.get("tolerance", DEFAULT_TOLERANCE))
    if not (tolerance > 0 and math.isfinite(tolerance)):
        raise ManifestError("tolerance must be a positive real")
    variant = data.get("bianchi_variant", "derived")
    if variant not in ("derived", "literal"):
        raise ManifestError('bianchi_variant must be "derived" or "literal"')

    return Manifest(
        p=p,
        n=n,
        h=h,
        phi=phi,
        connection=connection,
        nonlinear_connection=nonlinear,
        count=count,
        seed=int(sampling.get("seed", 0)),
        t_ranges=_ranges(sampling.get("t_ranges"), p, "t_ranges"),
        x_ranges=_ranges(sampling.get("x_ranges"), n, "x_ranges"),
        v_range=v_range,
        tolerance=tolerance,
        suites=list(suites),
        X=X,
        bianchi_variant=variant,
        source=data,
    )


def sample_points(m: Manifest) -> list[Point]:
    """``count`` points drawn uniformly from the declared ranges with the declared seed."""
    rng = np.random.default_rng(m.seed)
    t_lo, t_hi = np.array(m.t_ranges).T
    x_lo, x_hi = np.array(m.x_ranges).T
    points = []
    for _ in range(m.count):
        t = rng.uniform(t_lo, t_hi)
        x = rng.uniform(x_lo, x_hi)
        v = rng.uniform(m.v_range[0], m.v_range[1], size=(m.n, m.p))
        points.append(Point(t, x, v))
    return points


def _parse_grid(grid, dims) -> np.ndarray:
    arr = np.array(grid, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = parse(str(arr[idx]), dims)
    return out


@dataclass
class RunResult:
    exit_code: int
    report: dict
    message: str = ""


def run(m: Manifest) -> RunResult:
    """Build the geometry and run the requested suites."""
    dims = m.dims
    base = {"manifest_hash": m.digest(), "seed": m.seed, "tolerance": m.tolerance}

    def failure(code: int, message: str) -> RunResult:
        return RunResult(code, {**base, "error": message, "entries": [], "all_pass": False}, message)

    try:
        h = Metric.from_strings("temporal", m.h, dims)
        phi = Metric.from_strings("spatial", m.phi, dims)
        if m.nonlinear_connection is None:
            nc = canonical_nonlinear(h, phi)
        else:
            nc = NonlinearConnection(
                _parse_grid(m.nonlinear_connection["M"], dims),
                _parse_grid(m.nonlinear_connection["N"], dims),
                dims,
            )
        if m.connection == "berwald":
            conn, _ = berwald(h, phi)
            conn = build_hnormal(conn.spec, nc, h, name="berwald")
        else:
            spec = HNormalSpec(
                H=christoffel(h),
                G=_parse_grid(m.connection["G"], dims),
                L=_parse_grid(m.connection["L"], dims),
                C=_parse_grid(m.connection["C"], dims),
                dims=dims,
            )
            conn = build_hnormal(spec, nc, h)
        X = None
        if m.X is not None:
            X = DVectorField(
                _parse_grid(m.X["temporal"], dims),
                _parse_grid(m.X["spatial"], dims),
                _parse_grid(m.X["fiber"], dims),
                dims,
            )
    except ParseError as exc:
        return failure(EXIT_PARSE, f"parse error: {exc}")
    except ValueError as exc:
        return failure(EXIT_PARSE, f"invalid manifest: {exc}")

    points = sample_points(m)
    batch = PointBatch.from_points(points)
    try:
        h.check(batch)
        phi.check(batch)
    except SingularMetricError as exc:
        return failure(EXIT_SINGULAR, f"singular metric: {exc}")
    except EvaluationError as exc:
        return failure(EXIT_SINGULAR, f"metric not defined at a sampled point: {exc}")

    if {"ricci", "bianchi"} & set(m.suites):
        resid = cartan_residuals(conn.spec, batch)
        if max(resid.values()) >= 1e-10:
            return failure(
                EXIT_CARTAN,
                "connection is not of Cartan type: "
                f"max |L^i_jk - L^i_kj| = {resid['L']:.3g}, "
                f"max |C^i(c)_j(k) - C^i(c)_k(j)| = {resid['C']:.3g}",
            )

    tol = m.tolerance
    runners = {
        "torsion_check": lambda: torsion_check(conn, batch, tol),
        "curvature_check": lambda: curvature_check(conn, batch, tol),
        "deflection": lambda: deflection_suite(conn, nc, batch, tol),
        "ricci": lambda: ricci_suite(conn, nc, X, batch, tol),
        "bianchi": lambda: bianchi_suite(conn, nc, batch, tol, variant=m.bianchi_variant),
    }
    entries = []
    try:
        for suite in SUITES:
            if suite not in m.suites:
                continue
            report: IdentityReport = runners[suite]()
            for e in report.entries:
                entries.append({"suite": suite, **e.to_dict()})
    except NotCartanError as exc:
        return failure(EXIT_CARTAN, str(exc))
    except EvaluationError as exc:
        return failure(EXIT_SINGULAR, f"evaluation failed at a sampled point: {exc}")

    all_pass = all(e["pass"] for e in entries)
    report = {**base, "points_used": len(batch), "entries": entries, "all_pass": all_pass}
    return RunResult(EXIT_OK if all_pass else EXIT_FAIL, report)


def format_table(report: dict) -> str:
    lines = []
    if report.get("error"):
        return f"error: {report['error']}"
    width = max([len(e["identity_id"]) for e in report["entries"]] + [8])
    lines.append(f"{'identity':<{width}}  {'residual':>10}  {'max|term|':>10}  result")
    for e in report["entries"]:
        verdict = "PASS" if e["pass"] else "FAIL"
        lines.append(f"{e['identity_id']:<{width}}  {e['max_residual']:>10.2e}  {e['scale']:>10.2e}  {verdict}")
    failed = sum(not e["pass"] for e in report["entries"])
    lines.append(
        f"{len(report['entries'])} entries, {failed} failed, tolerance {report['tolerance']:g}, "
        f"{report['points_used']} points"
    )
    return "\n".join(lines)


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False, ensure_ascii=True, allow_nan=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jetcalc", description="Verify torsion, curvature and identity suites on J1(T, M).")
    ap.add_argument("--manifest", required=True, type=Path, help="JSON manifest")
    ap.add_argument("--out", type=Path, help="write the JSON report here")
    ap.add_argument("--tolerance", type=float, help="override the manifest tolerance")
    ap.add_argument("--seed", type=int, help="override the sampling seed")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = json.loads(args.manifest.read_text(encoding="utf-8"))
        m = load_manifest(data)
        if args.tolerance is not None:
            if not (args.tolerance > 0 and math.isfinite(args.tolerance)):
                raise ManifestError("--tolerance must be a positive real")
            m.tolerance = args.tolerance
        if args.seed is not None:
            m.seed = args.seed
    except (OSError, json.JSONDecodeError, ManifestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    result = run(m)
    if args.out is not None:
        args.out.write_text(dump_report(result.report), encoding="utf-8")
    if result.exit_code in (EXIT_OK, EXIT_FAIL):
        print(format_table(result.report))
    else:
        print(f"error: {result.message}", file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
