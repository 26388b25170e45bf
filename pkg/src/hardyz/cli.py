"""Command-line surface: every computation, reproducibly configured.

Data goes to --out (or stdout) as CSV or JSON; when --out is given a run
manifest is written next to it as <out>.manifest.json.  Data files are
byte-identical across reruns of the same command; the manifest's
wall_time_s field is the one timing exception.  Exit codes: 0 ok,
1 error, 2 completed with a count-mismatch warning.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .arith import (
    cached_divisor_table,
    divisor_square_sum,
    mean_square_A,
    ramachandra_constant,
)
from .config import EvalConfig
from .errors import DomainError, HardyzError, MissedZerosError
from .moments import (
    abs_moment_zprime_z,
    extrema_sum,
    large_value_measure,
    measure_decay_fit,
    moment_zeta,
    moment_zeta_deriv,
    moment_zprime_zk,
)
from .zeros import Window, default_scan_step, locate_zeros, stationary_points

ARTIFACT_VERSION = __version__


class _CliError(Exception):
    """Argument or validation failure mapped to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D102 - argparse override
        raise _CliError(f"{message}\n{self.format_usage()}")


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written next to every --out file."""

    command: str
    parameters: dict
    config_hash: str
    artifact_version: str
    wall_time_s: float
    outputs: list[str]

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True) + "\n"


def _config_hash(command: str, parameters: dict, cfg: EvalConfig) -> str:
    blob = json.dumps(
        {"command": command, "parameters": parameters, "config": cfg.digest()},
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return "\n"
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for row in rows:
        cells = []
        for c in cols:
            v = row[c]
            cells.append(repr(v) if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _emit(args, command: str, parameters: dict, cfg: EvalConfig, payload) -> None:
    """payload: either an object with to_csv/to_json or a list of row dicts."""
    start = parameters.pop("_t0")
    if hasattr(payload, "to_csv"):
        text = payload.to_csv() if args.format == "csv" else payload.to_json()
    elif args.format == "csv":
        text = _rows_to_csv(payload)
    else:
        body = payload[0] if len(payload) == 1 else payload
        text = json.dumps(body, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.write_text(text)
    manifest = RunManifest(
        command=command,
        parameters=parameters,
        config_hash=_config_hash(command, parameters, cfg),
        artifact_version=ARTIFACT_VERSION,
        wall_time_s=time.perf_counter() - start,
        outputs=[str(out)],
    )
    Path(str(out) + ".manifest.json").write_text(manifest.to_json())


def _window(args) -> Window:
    return Window(float(args.t), float(args.width))


def _parse_v_grid(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise _CliError("--v-grid expects START:STOP:COUNT or a comma list")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1 or stop <= start:
            raise _CliError("--v-grid range must be increasing with count >= 1")
        if count == 1:
            return [start]
        return [start + (stop - start) * i / (count - 1) for i in range(count)]
    return [float(x) for x in spec.split(",") if x]


def _moment_rows(which: str, k: int, est) -> list[dict]:
    return [
        {
            "which": which,
            "k": k,
            "value": est.value,
            "abs_error_estimate": est.abs_error_estimate,
            "panels": est.panels,
            "evals": est.evals,
        }
    ]


def _cmd_zeros(args, cfg: EvalConfig) -> int:
    window = _window(args)
    warn = False
    try:
        zs = locate_zeros(window, cfg)
    except MissedZerosError:
        try:
            zs = locate_zeros(window, cfg, initial_step=default_scan_step(window) / 4)
        except MissedZerosError as exc:
            zs = locate_zeros(
                window,
                cfg,
                initial_step=default_scan_step(window) / 4,
                on_count_mismatch="warn",
            )
            warn = True
            print(f"warning: {exc}", file=sys.stderr)
    if args.stationary:
        zs = stationary_points(zs, cfg)
    params = {
        "_t0": args._t0,
        "t": args.t,
        "width": args.width,
        "stationary": args.stationary,
    }
    _emit(args, "zeros", params, cfg, zs)
    return 2 if warn else 0


def _cmd_moments(args, cfg: EvalConfig) -> int:
    window = _window(args)
    tol = args.tol
    threads = args.threads
    k = args.k
    if args.which == "zeta":
        est = moment_zeta(window, k, cfg, tol=tol, threads=threads)
    elif args.which == "zeta_deriv":
        est = moment_zeta_deriv(window, k, cfg, tol=tol, threads=threads)
    elif args.which == "zprime_zk":
        est = moment_zprime_zk(window, k, cfg, tol=tol, threads=threads)
    else:
        est = abs_moment_zprime_z(window, k, cfg, tol=tol, threads=threads)
    params = {
        "_t0": args._t0,
        "which": args.which,
        "k": k,
        "t": args.t,
        "width": args.width,
        "tol": tol,
    }
    _emit(args, "moments", params, cfg, _moment_rows(args.which, k, est))
    return 0


def _cmd_extrema(args, cfg: EvalConfig) -> int:
    window = _window(args)
    zs = stationary_points(locate_zeros(window, cfg), cfg)
    es = extrema_sum(zs, args.k)
    log_t = math.log(window.t_start)
    row = {
        "k": es.k,
        "t": window.t_start,
        "width": window.width,
        "sum": es.sum,
        "zero_count": es.zero_count,
        "normalized": es.normalized,
        "conrey_ghosh_ratio": (
            es.sum / ((window.width / (4 * math.pi)) * log_t * log_t)
            if args.k == 1
            else None
        ),
    }
    params = {"_t0": args._t0, "t": args.t, "width": args.width, "k": args.k}
    _emit(args, "extrema", params, cfg, [row])
    return 0


def _cmd_constants(args, cfg: EvalConfig) -> int:
    res = ramachandra_constant(args.k, args.prime_limit)
    row = {
        "k": res.k,
        "prime_limit": res.prime_limit,
        "value": res.value,
        "truncation_estimate": res.truncation_estimate,
    }
    if args.xi is not None:
        table = cached_divisor_table(args.k, math.floor(args.xi), args.cache_dir)
        row["divisor_square_sum"] = divisor_square_sum(args.k, args.xi, table)
        row["xi"] = args.xi
    params = {
        "_t0": args._t0,
        "k": args.k,
        "prime_limit": args.prime_limit,
        "xi": args.xi,
    }
    _emit(args, "constants", params, cfg, [row])
    return 0


def _cmd_dirichlet(args, cfg: EvalConfig) -> int:
    window = _window(args)
    if (args.xi is None) == (args.theta is None):
        raise _CliError("dirichlet needs exactly one of --xi or --theta")
    xi = args.xi if args.xi is not None else window.t_start**args.theta
    table = cached_divisor_table(args.k, math.floor(xi), args.cache_dir)
    est = mean_square_A(window, args.k, xi, table, tol=args.tol)
    diagonal = window.width * divisor_square_sum(args.k, xi, table)
    row = {
        "k": args.k,
        "xi": xi,
        "t": args.t,
        "width": args.width,
        "value": est.value,
        "abs_error_estimate": est.abs_error_estimate,
        "diagonal": diagonal,
        "ratio": est.value / diagonal,
        "panels": est.panels,
        "evals": est.evals,
    }
    params = {
        "_t0": args._t0,
        "k": args.k,
        "xi": xi,
        "t": args.t,
        "width": args.width,
    }
    _emit(args, "dirichlet", params, cfg, [row])
    return 0


def _cmd_measure(args, cfg: EvalConfig) -> int:
    t_center = float(args.t)
    half = float(args.half_width)
    window = Window(t_center - half, 2 * half)
    step = args.step if args.step is not None else 0.05 / math.log(t_center)
    vs = _parse_v_grid(args.v_grid)
    ms = large_value_measure(window, vs, step, cfg)
    rows = [
        {"V": m.V, "mu": m.mu, "sample_step": m.sample_step} for m in ms
    ]
    if sum(1 for m in ms if m.mu > 0) >= 3:
        slope, intercept = measure_decay_fit(ms, t_center)
        for row in rows:
            row["fit_slope"] = slope
            row["fit_intercept"] = intercept
    params = {
        "_t0": args._t0,
        "t": args.t,
        "half_width": args.half_width,
        "v_grid": args.v_grid,
        "step": step,
    }
    _emit(args, "measure", params, cfg, rows)
    return 0


def _cmd_selftest(args, cfg: EvalConfig) -> int:
    from .hardy import hardy_z, hardy_z_deriv_fast
    from .moments import gap_identity_check
    from .zeta_core import chi

    failures = 0

    def check(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        tag = "ok  " if ok else "FAIL"
        print(f"{tag} {name}" + (f" ({detail})" if detail else ""))
        failures += 0 if ok else 1

    rng = np.random.default_rng(20240915)
    worst = 0.0
    for _ in range(20):
        sigma = rng.uniform(0.15, 0.85)
        tt = rng.uniform(5.0, 500.0)
        s = complex(sigma, tt)
        worst = max(worst, abs(chi(s) * chi(1 - s) - 1.0))
    check("chi(s) chi(1-s) = 1", worst < 1e-10, f"max dev {worst:.1e}")

    zres = abs(hardy_z(1000.0, cfg, method="em").im_residual)
    check("Z realness at t=1000", zres < 1e-8, f"residual {zres:.1e}")

    zs = locate_zeros(Window(14.0, 1.0), cfg)
    g1 = zs.records[0].gamma
    check(
        "first zero rediscovered",
        abs(g1 - 14.134725141734694) < 1e-9,
        f"gamma_1 = {g1:.12f}",
    )

    st = stationary_points(locate_zeros(Window(1e4, 8.0), cfg), cfg)
    ok = True
    detail = ""
    for k in (1, 2):
        lhs, rhs, res = gap_identity_check(st.records[0], k, cfg)
        ok &= res < 1e-6
        detail = f"k=2 residual {res:.1e}"
    check("gap identity", ok, detail)

    first, last = st.records[0], st.records[-1]
    wsnap = Window(first.gamma, last.gamma_plus - first.gamma)
    am = abs_moment_zprime_z(wsnap, 1, cfg, zeroset=st)
    es = extrema_sum(st, 1)
    rel = abs(am.value - es.sum) / es.sum
    check("telescoping over gaps", rel < 1e-6, f"rel {rel:.1e}")

    c1 = ramachandra_constant(1, 1000).value
    check("C_1' = 1/2", abs(c1 - 0.5) < 1e-12, f"{c1!r}")

    hs = divisor_square_sum(1, 10.0)
    check("harmonic divisor sum", abs(hs - 7381 / 2520) < 1e-15)

    dzf = hardy_z_deriv_fast(250.5, cfg)
    check(
        "derivative fast path",
        abs(dzf - 0.8683342561819748) < 1e-6,
        f"Z'(250.5) = {dzf:.10f}",
    )

    print("selftest:", "PASS" if failures == 0 else f"{failures} FAILURES")
    return 0 if failures == 0 else 1


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="quadrature error per unit length (op default)")
    common.add_argument("--rs-corrections", type=int, default=1, choices=(0, 1, 2),
                        help="Riemann-Siegel correction depth")
    common.add_argument("--threads", type=int, default=0,
                        help="worker threads for panel evaluation (0 = auto)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=str, default=None,
                        help="output path; manifest written alongside")
    common.add_argument("--cache-dir", type=str, default=None,
                        help="divisor-table cache directory")

    p = _Parser(prog="hardyz", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    pz = sub.add_parser("zeros", parents=[common],
                        help="locate zeros (and optionally extrema) in a window")
    pz.add_argument("--t", type=float, required=True)
    pz.add_argument("--width", type=float, required=True)
    pz.add_argument("--stationary", action="store_true",
                    help="also fill stationary points")
    pz.set_defaults(fn=_cmd_zeros)

    pm = sub.add_parser("moments", parents=[common], help="moment integrals")
    pm.add_argument("--which", required=True,
                    choices=("zeta", "zeta_deriv", "zprime_zk", "abs_zprime_z"))
    pm.add_argument("--k", type=int, required=True)
    pm.add_argument("--t", type=float, required=True)
    pm.add_argument("--width", type=float, required=True)
    pm.set_defaults(fn=_cmd_moments)

    pe = sub.add_parser("extrema", parents=[common],
                        help="sum of gap maxima |Z(lambda)|^{2k}")
    pe.add_argument("--t", type=float, required=True)
    pe.add_argument("--width", type=float, required=True)
    pe.add_argument("--k", type=int, required=True)
    pe.set_defaults(fn=_cmd_extrema)

    pc = sub.add_parser("constants", parents=[common],
                        help="Euler-product constant and divisor square sum")
    pc.add_argument("--k", type=int, required=True)
    pc.add_argument("--prime-limit", type=int, default=100_000)
    pc.add_argument("--xi", type=float, default=None)
    pc.set_defaults(fn=_cmd_constants)

    pd = sub.add_parser("dirichlet", parents=[common],
                        help="mean square of the divisor Dirichlet polynomial")
    pd.add_argument("--k", type=int, required=True)
    pd.add_argument("--xi", type=float, default=None)
    pd.add_argument("--theta", type=float, default=None,
                    help="set xi = t^theta instead of --xi")
    pd.add_argument("--t", type=float, required=True)
    pd.add_argument("--width", type=float, required=True)
    pd.set_defaults(fn=_cmd_dirichlet)

    pv = sub.add_parser("measure", parents=[common],
                        help="measure of {log |zeta| >= V} on [t-H, t+H]")
    pv.add_argument("--t", type=float, required=True,
                    help="interval center")
    pv.add_argument("--half-width", type=float, required=True)
    pv.add_argument("--v-grid", type=str, required=True,
                    help="START:STOP:COUNT or comma-separated V values")
    pv.add_argument("--step", type=float, default=None,
                    help="sample step (default 0.05 / log t)")
    pv.set_defaults(fn=_cmd_measure)

    ps = sub.add_parser("selftest", parents=[common],
                        help="run the quick invariant suite")
    ps.set_defaults(fn=_cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.tol is not None and not args.tol > 0.0:
            raise _CliError("--tol must be positive")
        if args.threads < 0:
            raise _CliError("--threads must be >= 0")
        if args.threads == 0:
            args.threads = os.cpu_count() or 1
        cfg = EvalConfig(rs_correction_terms=args.rs_corrections)
        args._t0 = time.perf_counter()
        return args.fn(args, cfg)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (HardyzError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
