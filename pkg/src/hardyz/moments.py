"""Moment integrals over short critical-line intervals.

The engine is a breadth-first adaptive Gauss-Legendre rule: every pending
panel in a generation is evaluated in one batched call (15-point value,
7-point embedded error), panels never straddle a supplied breakpoint, and
accepted panels are reduced in left-endpoint order so results are
bit-identical for any thread count.  On top of it sit the moments of
|Z|^{2k}, |zeta'|^{2k}, (Z')^2 Z^{2k-2} and |Z' Z^{2k-1}|, the per-gap
identity integral |Z' Z^{2k-1}| = Z^{2k}(lambda)/k, extrema sums over gap
maxima, and the large-value measure of log |zeta|.
"""
from __future__ import annotations

import concurrent.futures
import dataclasses
import math
from typing import Callable, Sequence

import numpy as np

from .accum import neumaier_sum
from .config import DEFAULT_CONFIG, EvalConfig
from .errors import DomainError, NonFiniteIntegrandError, QuadratureError
from .hardy import hardy_z_vec
from .zeros import Window, ZeroRecord, ZeroSet, locate_zeros, stationary_points
from .zeta_core import rs_theta_deriv_vec, zeta_deriv_em

_N15, _W15 = np.polynomial.legendre.leggauss(15)
_N7, _W7 = np.polynomial.legendre.leggauss(7)
_NODES = np.concatenate([_N15, _N7])

_MAX_DEPTH = 30
_MAX_POINTS = 50_000_000

# Panels whose 15-vs-7 discrepancy is at the relative noise level of the
# integrand evaluations themselves (fast-path Z carries ~1e-8 rounding noise
# that splitting cannot reduce) are accepted; the total then carries an
# irreducible relative error of this order.
_REL_NOISE_FLOOR = 5e-8


@dataclasses.dataclass(frozen=True)
class MomentEstimate:
    """One quadrature result with its embedded error estimate and cost."""

    value: float
    abs_error_estimate: float
    panels: int
    evals: int


@dataclasses.dataclass(frozen=True)
class ExtremaSum:
    """Sum of 2k-th powers of gap maxima over a window's zeros."""

    window: Window
    k: int
    sum: float
    zero_count: int
    normalized: float


@dataclasses.dataclass(frozen=True)
class MeasureEstimate:
    """Estimated measure of {t in window : log |zeta(1/2+it)| >= V}."""

    window: Window
    V: float
    mu: float
    sample_step: float


def _eval_batch(
    f: Callable[[np.ndarray], np.ndarray], pts: np.ndarray, threads: int
) -> np.ndarray:
    if threads <= 1 or pts.size < 8192:
        out = np.asarray(f(pts), dtype=float)
    else:
        chunk = -(-pts.size // threads)
        pieces = [pts[i : i + chunk] for i in range(0, pts.size, chunk)]
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            done = list(pool.map(f, pieces))
        out = np.concatenate([np.asarray(d, dtype=float) for d in done])
    if not np.isfinite(out).all():
        bad = pts[~np.isfinite(out)][0]
        raise NonFiniteIntegrandError(f"integrand non-finite at t = {bad!r}")
    return out


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    window: Window,
    tol: float,
    breakpoints: Sequence[float] = (),
    *,
    max_panel_width: float | None = None,
    threads: int = 1,
) -> MomentEstimate:
    """Adaptive batched Gauss-Legendre integral of f over the window.

    tol is the permitted error per unit length: a panel is accepted when the
    15-vs-7-point discrepancy is below tol times the panel width, otherwise
    it splits in half, to depth 30.  Panels never straddle a breakpoint.
    """
    if not (tol > 0.0 and math.isfinite(tol)):
        raise DomainError(f"tolerance must be positive and finite, got {tol}")
    a, b = window.t_start, window.t_end
    bps = sorted({float(x) for x in breakpoints if a < float(x) < b})
    edges = [a, *bps, b]
    seed: list[tuple[float, float, int]] = []
    for lo, hi in zip(edges, edges[1:]):
        if hi <= lo:
            continue
        parts = 1
        if max_panel_width is not None and max_panel_width > 0.0:
            parts = max(1, math.ceil((hi - lo) / max_panel_width))
        cuts = np.linspace(lo, hi, parts + 1)
        seed.extend((float(x), float(y), 0) for x, y in zip(cuts, cuts[1:]))
    pending = seed
    accepted: list[tuple[float, float, float]] = []
    evals = 0
    while pending:
        lo = np.array([p[0] for p in pending])
        hi = np.array([p[1] for p in pending])
        depth = np.array([p[2] for p in pending])
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
        evals += pts.size
        if evals > _MAX_POINTS:
            raise QuadratureError(
                f"integral needed more than {_MAX_POINTS} evaluations"
            )
        vals = _eval_batch(f, pts, threads).reshape(len(pending), _NODES.size)
        i15 = half * (vals[:, :15] * _W15).sum(axis=1)
        i7 = half * (vals[:, 15:] * _W7).sum(axis=1)
        err = np.abs(i15 - i7)
        ok = err <= tol * (hi - lo) + _REL_NOISE_FLOOR * np.abs(i15)
        for j in np.nonzero(ok)[0]:
            accepted.append((float(lo[j]), float(i15[j]), float(err[j])))
        nxt: list[tuple[float, float, int]] = []
        for j in np.nonzero(~ok)[0]:
            if depth[j] >= _MAX_DEPTH:
                # a derivative kink not listed as a breakpoint pins a panel
                # at the depth cap; keep it if it cannot threaten the budget
                if err[j] <= 0.01 * tol * window.width:
                    accepted.append((float(lo[j]), float(i15[j]), float(err[j])))
                    continue
                raise QuadratureError(
                    f"tolerance unmet at depth {_MAX_DEPTH} on panel "
                    f"[{lo[j]!r}, {hi[j]!r}]"
                )
            m = float(mid[j])
            nxt.append((float(lo[j]), m, int(depth[j]) + 1))
            nxt.append((m, float(hi[j]), int(depth[j]) + 1))
        pending = nxt
    accepted.sort(key=lambda p: p[0])
    value = neumaier_sum([p[1] for p in accepted])
    err_total = neumaier_sum([p[2] for p in accepted])
    return MomentEstimate(
        value=value,
        abs_error_estimate=err_total,
        panels=len(accepted),
        evals=evals,
    )


# ---------------------------------------------------------------------------
# Moment operations
# ---------------------------------------------------------------------------


def _z_panel_width(t_end: float, k: int) -> float:
    """Panel cap so 15 nodes resolve the ~2k theta'(t) rad/unit oscillation."""
    rate = 2.0 * k * float(rs_theta_deriv_vec(np.array([t_end]))[0])
    return 8.0 / max(rate, 0.5)


def _ensure_zeros(
    window: Window, cfg: EvalConfig, zeroset: ZeroSet | None, need_lambda: bool
) -> ZeroSet:
    if zeroset is None:
        zeroset = locate_zeros(window, cfg)
        if need_lambda:
            zeroset = stationary_points(zeroset, cfg)
    return zeroset


def _gap_breakpoints(zs: ZeroSet, with_lambda: bool) -> list[float]:
    out: list[float] = []
    for r in zs.records:
        out.append(r.gamma)
        out.append(r.gamma_plus)
        if with_lambda and not math.isnan(r.lam):
            out.append(r.lam)
    return out


def moment_zeta(
    window: Window,
    k: int,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    tol: float | None = None,
    zeroset: ZeroSet | None = None,
    threads: int = 1,
) -> MomentEstimate:
    """Integral of |zeta(1/2+it)|^{2k} = Z(t)^{2k} over the window."""
    if not 1 <= k <= 4:
        raise DomainError(f"moment_zeta needs 1 <= k <= 4, got {k}")
    window.validate(cfg)
    zs = _ensure_zeros(window, cfg, zeroset, need_lambda=False)
    if tol is None:
        tol = 1e-8 * math.log(window.t_end) ** (k * k)

    def f(ts: np.ndarray) -> np.ndarray:
        z = hardy_z_vec(ts, cfg)[0]
        return z ** (2 * k)

    return integrate_adaptive(
        f,
        window,
        tol,
        _gap_breakpoints(zs, with_lambda=False),
        max_panel_width=_z_panel_width(window.t_end, k),
        threads=threads,
    )


def moment_zeta_deriv(
    window: Window,
    k: int,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    tol: float | None = None,
    threads: int = 1,
    method: str = "fast",
) -> MomentEstimate:
    """Integral of |zeta'(1/2+it)|^{2k} over the window.

    On the critical line |zeta'|^2 = Z'^2 + theta'^2 Z^2 (differentiate
    zeta = e^{-i theta} Z along the line), which the fast path evaluates
    from the Riemann-Siegel Z and Z'.  method="oracle" evaluates zeta'
    directly by Euler-Maclaurin, 100x slower, for cross-checks.
    """
    if not 1 <= k <= 3:
        raise DomainError(f"moment_zeta_deriv needs 1 <= k <= 3, got {k}")
    if method not in ("fast", "oracle"):
        raise DomainError(f"unknown method {method!r}")
    window.validate(cfg)
    if tol is None:
        tol = 1e-8 * math.log(window.t_end) ** (k * k + 2 * k)

    if method == "fast":

        def f(ts: np.ndarray) -> np.ndarray:
            z, dz = hardy_z_vec(ts, cfg, want_deriv=True)
            td = rs_theta_deriv_vec(ts)
            return (dz * dz + td * td * z * z) ** k

    else:

        def f(ts: np.ndarray) -> np.ndarray:
            return np.array(
                [abs(zeta_deriv_em(complex(0.5, t), cfg)) ** (2 * k) for t in ts]
            )

    return integrate_adaptive(
        f,
        window,
        tol,
        (),
        max_panel_width=_z_panel_width(window.t_end, k),
        threads=threads,
    )


def moment_z_deriv(
    window: Window,
    k: int,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    tol: float | None = None,
    threads: int = 1,
) -> MomentEstimate:
    """Integral of (Z'(t))^{2k}; the right-hand factor of the Holder bound."""
    if not 1 <= k <= 4:
        raise DomainError(f"moment_z_deriv needs 1 <= k <= 4, got {k}")
    window.validate(cfg)
    if tol is None:
        tol = 1e-8 * math.log(window.t_end) ** (k * k + 2 * k)

    def f(ts: np.ndarray) -> np.ndarray:
        dz = hardy_z_vec(ts, cfg, want_deriv=True)[1]
        return dz ** (2 * k)

    return integrate_adaptive(
        f,
        window,
        tol,
        (),
        max_panel_width=_z_panel_width(window.t_end, k),
        threads=threads,
    )


def moment_zprime_zk(
    window: Window,
    k: int,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    tol: float | None = None,
    zeroset: ZeroSet | None = None,
    threads: int = 1,
) -> MomentEstimate:
    """Integral of (Z'(t))^2 Z(t)^{2k-2}, defined for k >= 2."""
    if not 2 <= k <= 4:
        raise DomainError(f"moment_zprime_zk needs 2 <= k <= 4, got {k}")
    window.validate(cfg)
    zs = _ensure_zeros(window, cfg, zeroset, need_lambda=True)
    if tol is None:
        tol = 1e-8 * math.log(window.t_end) ** (k * k + 2)

    def f(ts: np.ndarray) -> np.ndarray:
        z, dz = hardy_z_vec(ts, cfg, want_deriv=True)
        return dz * dz * z ** (2 * k - 2)

    return integrate_adaptive(
        f,
        window,
        tol,
        _gap_breakpoints(zs, with_lambda=True),
        max_panel_width=_z_panel_width(window.t_end, k),
        threads=threads,
    )


def abs_moment_zprime_z(
    window: Window,
    k: int,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    tol: float | None = None,
    zeroset: ZeroSet | None = None,
    threads: int = 1,
) -> MomentEstimate:
    """Integral of |Z'(t) Z(t)^{2k-1}| with kinks split at zeros and extrema.

    Over one complete gap, k times this integral is Z^{2k}(lambda); over a
    union of complete gaps it telescopes to the extrema sum.
    """
    if not 1 <= k <= 4:
        raise DomainError(f"abs_moment_zprime_z needs 1 <= k <= 4, got {k}")
    window.validate(cfg)
    zs = _ensure_zeros(window, cfg, zeroset, need_lambda=True)
    if tol is None:
        tol = 1e-9 * math.log(window.t_end) ** (k * k + 1)

    def f(ts: np.ndarray) -> np.ndarray:
        z, dz = hardy_z_vec(ts, cfg, want_deriv=True)
        return np.abs(dz) * np.abs(z) ** (2 * k - 1)

    return integrate_adaptive(
        f,
        window,
        tol,
        _gap_breakpoints(zs, with_lambda=True),
        max_panel_width=_z_panel_width(window.t_end, k),
        threads=threads,
    )


def gap_identity_check(
    rec: ZeroRecord,
    k: int,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    tol: float | None = None,
) -> tuple[float, float, float]:
    """Check the exact per-gap identity: integral of |Z' Z^{2k-1}| over
    [gamma, gamma_plus] against Z^{2k}(lambda)/k.

    Returns (lhs, rhs, rel_residual).  Degenerate gaps return (0, 0, 0).
    """
    if not 1 <= k <= 4:
        raise DomainError(f"gap_identity_check needs 1 <= k <= 4, got {k}")
    if rec.degenerate:
        return 0.0, 0.0, 0.0
    if math.isnan(rec.lam):
        raise DomainError("record has no stationary point; run stationary_points")
    rhs = rec.z_at_lambda ** (2 * k) / k
    if tol is None:
        tol = 1e-9 * rhs / rec.gap

    def f(ts: np.ndarray) -> np.ndarray:
        z, dz = hardy_z_vec(ts, cfg, want_deriv=True)
        return np.abs(dz) * np.abs(z) ** (2 * k - 1)

    est = integrate_adaptive(
        f,
        Window(rec.gamma, rec.gap),
        tol,
        (rec.lam,),
        max_panel_width=rec.gap / 4.0,
    )
    lhs = est.value
    return lhs, rhs, abs(lhs - rhs) / rhs


def extrema_sum(zs: ZeroSet, k: int) -> ExtremaSum:
    """Sum of Z^{2k}(lambda) over the records, with the window-normalized value."""
    if not 1 <= k <= 4:
        raise DomainError(f"extrema_sum needs 1 <= k <= 4, got {k}")
    for r in zs.records:
        if math.isnan(r.lam):
            raise DomainError("stationary points not filled; run stationary_points")
    total = neumaier_sum([r.z_at_lambda ** (2 * k) for r in zs.records])
    norm = total / (
        zs.window.width * math.log(zs.window.t_start) ** (k * k)
    )
    return ExtremaSum(
        window=zs.window,
        k=k,
        sum=total,
        zero_count=zs.count,
        normalized=norm,
    )


def normalized_Mk(
    T: float,
    k: int,
    cfg: EvalConfig = DEFAULT_CONFIG,
    *,
    zeroset: ZeroSet | None = None,
) -> float:
    """Average of Z^{2k}(lambda) over all zeros up to T.

    Scans [10, T]: there are no zeros below the first at 14.13, so the count
    equals the zero-counting function at T.  Affordable up to T ~ 1e5.
    """
    T = float(T)
    if not 20.0 <= T <= 2e5:
        raise DomainError(f"normalized_Mk supports 20 <= T <= 2e5, got {T}")
    if not 1 <= k <= 4:
        raise DomainError(f"normalized_Mk needs 1 <= k <= 4, got {k}")
    if zeroset is None:
        zeroset = stationary_points(locate_zeros(Window(10.0, T - 10.0), cfg), cfg)
    if not zeroset.records:
        return 0.0
    total = neumaier_sum([r.z_at_lambda ** (2 * k) for r in zeroset.records])
    return total / zeroset.count


def large_value_measure(
    window_sym: Window,
    v_grid: Sequence[float],
    sample_step: float,
    cfg: EvalConfig = DEFAULT_CONFIG,
) -> list[MeasureEstimate]:
    """Measure of {t in the window : log |zeta(1/2+it)| >= V} for each V.

    Uniform midpoint sampling of log |Z| at the given step; every cell whose
    neighborhood straddles any requested level is sub-sampled 16-fold, and
    the same refined sample set serves every V so the estimates are
    non-increasing in V by construction.
    """
    vs = [float(v) for v in v_grid]
    if len(vs) == 0:
        return []
    if any(b <= a for a, b in zip(vs, vs[1:])):
        raise DomainError("V grid must be strictly increasing")
    t_center = window_sym.t_start + 0.5 * window_sym.width
    cap = 0.05 / math.log(t_center)
    if not 0.0 < sample_step <= cap:
        raise DomainError(
            f"sample_step must be in (0, {cap:g}] to resolve the oscillation"
        )
    window_sym.validate(cfg)
    n = max(8, math.ceil(window_sym.width / sample_step))
    h = window_sym.width / n
    mids = window_sym.t_start + h * (np.arange(n) + 0.5)
    logz = _log_abs_z(mids, cfg)
    # cells whose 3-point neighborhood straddles some level get refined;
    # one union set keeps the per-V counts monotone
    lo3 = np.minimum(np.minimum(logz, np.roll(logz, 1)), np.roll(logz, -1))
    hi3 = np.maximum(np.maximum(logz, np.roll(logz, 1)), np.roll(logz, -1))
    lo3[0] = min(logz[0], logz[1])
    hi3[0] = max(logz[0], logz[1])
    lo3[-1] = min(logz[-1], logz[-2])
    hi3[-1] = max(logz[-1], logz[-2])
    near = np.zeros(n, dtype=bool)
    for v in vs:
        near |= (lo3 < v) & (hi3 >= v)
    idx = np.nonzero(near)[0]
    sub = 16
    if idx.size:
        offs = (np.arange(sub) + 0.5) / sub - 0.5
        fine = (mids[idx][:, None] + h * offs[None, :]).ravel()
        logz_fine = _log_abs_z(fine, cfg)
    out = []
    clear = logz[~near]
    for v in vs:
        mu = h * float(np.count_nonzero(clear >= v))
        if idx.size:
            mu += (h / sub) * float(np.count_nonzero(logz_fine >= v))
        out.append(
            MeasureEstimate(window=window_sym, V=v, mu=mu, sample_step=h)
        )
    return out


def _log_abs_z(ts: np.ndarray, cfg: EvalConfig) -> np.ndarray:
    z = hardy_z_vec(ts, cfg)[0]
    return np.log(np.maximum(np.abs(z), 1e-300))


def measure_decay_fit(
    estimates: Sequence[MeasureEstimate], t_center: float
) -> tuple[float, float]:
    """Least-squares fit log mu = intercept - slope * V^2 / log log T over the
    estimates with positive measure; returns (slope, intercept)."""
    llt = math.log(math.log(t_center))
    xs = [e.V * e.V / llt for e in estimates if e.mu > 0.0]
    ys = [math.log(e.mu) for e in estimates if e.mu > 0.0]
    if len(xs) < 3:
        raise DomainError("need at least 3 positive-measure points to fit")
    coef = np.polyfit(np.array(xs), np.array(ys), 1)
    return -float(coef[0]), float(coef[1])
