"""Critical-line zeros and the stationary point inside each zero gap.

Z(t) is real with sign-changing zeros (RH assumed), so zero location is
sign-change scanning plus root polishing.  Between consecutive zeros
gamma < gamma_plus the derivative Z' changes sign exactly once, at the gap
extremum lambda; a gap where Z' flips three or more times would exhibit a
negative local maximum or a positive local minimum of Z and is reported as
an error, never repaired.  Counts are cross-checked against the main terms
of the zero-counting function (T/2pi) log(T/2pi) - T/2pi.
"""
from __future__ import annotations

import dataclasses
import json
import math
from typing import Callable

import numpy as np

from .config import DEFAULT_CONFIG, T_FLOOR, EvalConfig
from .errors import DomainError, InterlacingError, MissedZerosError, PrecisionError
from .hardy import hardy_z_vec
from .zeta_core import TWO_PI, rs_theta, rs_theta_deriv

CSV_SCHEMA = "zeroset-csv/1"
JSON_SCHEMA = "zeroset/1"

# Consecutive roots closer than this are numerically coincident at double
# precision (a multiple zero): flagged, never merged.
COINCIDENT_GAP = 1e-7

# Scan-step floor: grid halving during zero location stops here.
_STEP_FLOOR = 1e-4


@dataclasses.dataclass(frozen=True)
class Window:
    """A t-interval [t_start, t_start + width]; the domain of every scan."""

    t_start: float
    width: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t_start) and math.isfinite(self.width)):
            raise DomainError("window endpoints must be finite")
        if self.width <= 0.0:
            raise DomainError(f"window width must be positive, got {self.width}")
        if self.t_start < T_FLOOR:
            raise DomainError(f"window must start at t >= {T_FLOOR}")

    @property
    def t_end(self) -> float:
        return self.t_start + self.width

    def validate(self, cfg: EvalConfig) -> None:
        if self.t_end > cfg.t_max:
            raise DomainError(
                f"window reaches t = {self.t_end:g} beyond cfg.t_max = {cfg.t_max:g}"
            )


@dataclasses.dataclass(frozen=True)
class ZeroRecord:
    """One zero gap: consecutive ordinates and the extremum between them.

    lam and z_at_lambda are NaN until stationary_points fills them.  A
    degenerate record has gamma_plus - gamma < COINCIDENT_GAP and carries
    lam = gamma, z_at_lambda = 0.
    """

    gamma: float
    gamma_plus: float
    lam: float = math.nan
    z_at_lambda: float = math.nan
    degenerate: bool = False

    def __post_init__(self) -> None:
        if self.gamma_plus < self.gamma:
            raise DomainError("gamma_plus below gamma")
        if not math.isnan(self.lam) and not (
            self.gamma <= self.lam <= self.gamma_plus
        ):
            raise DomainError("stationary point outside its gap")

    @property
    def gap(self) -> float:
        return self.gamma_plus - self.gamma


@dataclasses.dataclass(frozen=True)
class ZeroSet:
    """Ordered zero gaps of a window; immutable and safe to share."""

    window: Window
    records: tuple[ZeroRecord, ...]
    count: int

    def __post_init__(self) -> None:
        if self.count != len(self.records):
            raise DomainError("count disagrees with the number of records")
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.gamma < prev.gamma or (
                cur.gamma == prev.gamma and not (prev.degenerate or cur.degenerate)
            ):
                raise DomainError("records must be strictly increasing in gamma")
            if prev.gamma_plus != cur.gamma:
                raise DomainError("consecutive records must share endpoints")

    def gammas(self) -> np.ndarray:
        return np.array([r.gamma for r in self.records])

    def lambdas(self) -> np.ndarray:
        return np.array([r.lam for r in self.records])

    def to_csv(self) -> str:
        lines = [f"# {CSV_SCHEMA}", "gamma,gamma_plus,lambda,z_at_lambda"]
        for r in self.records:
            lines.append(f"{r.gamma!r},{r.gamma_plus!r},{r.lam!r},{r.z_at_lambda!r}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        def cell(x: float):
            return None if math.isnan(x) else x

        obj = {
            "schema": JSON_SCHEMA,
            "window": {"t_start": self.window.t_start, "width": self.window.width},
            "count": self.count,
            "records": [
                {
                    "gamma": r.gamma,
                    "gamma_plus": r.gamma_plus,
                    "lambda": cell(r.lam),
                    "z_at_lambda": cell(r.z_at_lambda),
                    "degenerate": r.degenerate,
                }
                for r in self.records
            ],
        }
        return json.dumps(obj, indent=2) + "\n"


def zero_count_formula(T: float) -> float:
    """Main terms of the zero-counting function, (T/2pi) log(T/2pi) - T/2pi.

    The caller supplies the O(log T) slack when comparing against counts.
    """
    T = float(T)
    if T <= 0.0:
        raise DomainError("zero_count_formula needs T > 0")
    x = T / TWO_PI
    return x * math.log(x) - x


def _mean_gap(t: float) -> float:
    """Asymptotic spacing of zeros (and Gram points) near height t."""
    return TWO_PI / math.log(max(float(t), 20.0) / TWO_PI)


def default_scan_step(window: Window) -> float:
    """Initial zero-scan step: 0.2 mean gaps at the window's top end."""
    return 0.2 * _mean_gap(window.t_end)


def gram_points(window: Window) -> list[float]:
    """All g in the window with theta(g) = n pi, strictly increasing.

    Newton's method on theta.  theta is monotone beyond t ~ 7 and attains no
    multiple of pi on [T_FLOOR, 10], so the search may start at
    max(t_start, 10); windows entirely below the first Gram point near 17.85
    come back empty.
    """
    a = max(window.t_start, 10.0)
    b = window.t_end
    if b <= a:
        return []
    n_lo = math.ceil(rs_theta(a) / math.pi - 1e-12)
    n_hi = math.floor(rs_theta(b) / math.pi + 1e-12)
    out: list[float] = []
    g = a
    for n in range(n_lo, n_hi + 1):
        target = n * math.pi
        if out:
            g = out[-1] + _mean_gap(out[-1])
        for _ in range(40):
            r = rs_theta(g) - target
            if abs(r) <= 1e-10:
                break
            g -= r / rs_theta_deriv(g)
            g = min(max(g, a - _mean_gap(a)), b + _mean_gap(b))
        else:
            raise PrecisionError(f"Gram-point iteration stalled at n = {n}")
        if window.t_start <= g <= b:
            out.append(g)
    return out


def _vector_refine(
    f: Callable[[np.ndarray], np.ndarray],
    a: np.ndarray,
    b: np.ndarray,
    fa: np.ndarray,
    fb: np.ndarray,
    *,
    bisect_width: float = 1e-6,
    secant_rounds: int = 4,
) -> np.ndarray:
    """Polish one root per bracket, elementwise over all brackets at once.

    Bisection narrows every bracket to bisect_width, then a fixed number of
    secant rounds (clamped into the original bracket) finishes the job.
    Brackets must have opposite-signed f values unless already collapsed by
    an exact grid hit.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = np.array(fa, dtype=float)
    fb = np.array(fb, dtype=float)
    lo0 = a.copy()
    hi0 = b.copy()
    hit = fa == 0.0
    b = np.where(hit, a, b)
    fb = np.where(hit, 0.0, fb)
    hit = fb == 0.0
    a = np.where(hit, b, a)
    fa = np.where(hit, 0.0, fa)
    for _ in range(90):
        if float(np.max(b - a)) <= bisect_width:
            break
        mid = 0.5 * (a + b)
        fm = f(mid)
        same = (fm < 0.0) == (fa < 0.0)
        a = np.where(same, mid, a)
        fa = np.where(same, fm, fa)
        b = np.where(same, b, mid)
        fb = np.where(same, fb, fm)
        hit = fm == 0.0
        a = np.where(hit, mid, a)
        b = np.where(hit, mid, b)
    t0, f0, t1, f1 = a, fa, b, fb
    for _ in range(secant_rounds):
        denom = f1 - f0
        safe = denom != 0.0
        step = np.where(safe, f1 * (t1 - t0) / np.where(safe, denom, 1.0), 0.0)
        t2 = np.clip(t1 - step, lo0, hi0)
        f2 = f(t2)
        t0, f0, t1, f1 = t1, f1, t2, f2
    return t1


def _sign_cells(z: np.ndarray) -> np.ndarray:
    """Indices i where z changes sign between grid nodes i and i+1."""
    sgn = np.where(z >= 0.0, np.int8(1), np.int8(-1))
    return np.nonzero(sgn[:-1] != sgn[1:])[0]


def _next_zero_after(t0: float, cfg: EvalConfig) -> float:
    """First zero strictly above t0 (which is itself a zero)."""

    def zf(x: np.ndarray) -> np.ndarray:
        return hardy_z_vec(x, cfg)[0]

    lo = t0 + 1e-6
    for _ in range(12):
        seg = 6.0 * _mean_gap(lo)
        ts = np.linspace(lo, lo + seg, 97)
        z = zf(ts)
        # one halving pass so a close pair inside a cell is not skipped
        mids = 0.5 * (ts[:-1] + ts[1:])
        zm = zf(mids)
        merged = np.empty(ts.size + mids.size)
        merged[0::2] = ts
        merged[1::2] = mids
        zmerged = np.empty_like(merged)
        zmerged[0::2] = z
        zmerged[1::2] = zm
        cells = _sign_cells(zmerged)
        if cells.size:
            i = int(cells[0])
            root = _vector_refine(
                zf,
                merged[i : i + 1],
                merged[i + 1 : i + 2],
                zmerged[i : i + 1],
                zmerged[i + 1 : i + 2],
            )
            return float(root[0])
        lo += seg
    raise PrecisionError(f"no zero found within 72 mean gaps above t = {t0}")


def locate_zeros(
    window: Window,
    cfg: EvalConfig = DEFAULT_CONFIG,
    initial_step: float | None = None,
    on_count_mismatch: str = "raise",
) -> ZeroSet:
    """All zeros of Z in the window, paired into gaps (lambda not yet filled).

    Sign-change scan at the initial step, halved until the sign-change count
    stabilizes (floor step 1e-4), each bracket polished by bisection plus
    secant.  The last record's gamma_plus is the first zero beyond the
    window.  A count inconsistent with the counting formula beyond
    2 (log T + log(T+H)) raises MissedZerosError; callers rescan at
    initial_step = default_scan_step(window) / 4, or pass
    on_count_mismatch="warn" to get the records anyway.
    """
    if on_count_mismatch not in ("raise", "warn"):
        raise DomainError(f"unknown on_count_mismatch {on_count_mismatch!r}")
    window.validate(cfg)
    a, b = window.t_start, window.t_end
    if b + 80.0 * _mean_gap(b) > cfg.t_max:
        raise DomainError("window too close to cfg.t_max to pair its last gap")
    step = default_scan_step(window) if initial_step is None else float(initial_step)
    if not (0.0 < step <= window.width):
        step = window.width / 8.0

    def zf(x: np.ndarray) -> np.ndarray:
        return hardy_z_vec(x, cfg)[0]

    m = max(8, math.ceil(window.width / step))
    ts = np.linspace(a, b, m + 1)
    z = zf(ts)
    prev_count = -1
    while True:
        cells = _sign_cells(z)
        h = (b - a) / (ts.size - 1)
        if cells.size == prev_count or h <= _STEP_FLOOR:
            break
        prev_count = cells.size
        mids = 0.5 * (ts[:-1] + ts[1:])
        zm = zf(mids)
        merged = np.empty(ts.size + mids.size)
        merged[0::2] = ts
        merged[1::2] = mids
        zmerged = np.empty_like(merged)
        zmerged[0::2] = z
        zmerged[1::2] = zm
        ts, z = merged, zmerged
    counted = int(cells.size)
    expected = zero_count_formula(b) - zero_count_formula(a)
    slack = 2.0 * (math.log(a) + math.log(b))
    if abs(counted - expected) > slack and on_count_mismatch == "raise":
        raise MissedZerosError(
            f"counted {counted} zeros in [{a:g}, {b:g}] but the counting formula "
            f"predicts {expected:.2f} (slack {slack:.2f})",
            counted=counted,
            expected=expected,
            slack=slack,
        )
    if counted == 0:
        return ZeroSet(window=window, records=(), count=0)
    gam = _vector_refine(zf, ts[cells], ts[cells + 1], z[cells], z[cells + 1])
    nxt = _next_zero_after(float(gam[-1]), cfg)
    gp = np.append(gam[1:], nxt)
    records = tuple(
        ZeroRecord(
            gamma=float(g),
            gamma_plus=float(g2),
            degenerate=bool(g2 - g < COINCIDENT_GAP),
        )
        for g, g2 in zip(gam, gp)
    )
    return ZeroSet(window=window, records=records, count=counted)


def _stationary_bracket(
    g: float, gp: float, cfg: EvalConfig
) -> tuple[float, float, float, float]:
    """Bracket the single sign change of Z' in one gap, escalating the probe
    density; called only when the shared coarse probe pass was inconclusive."""
    gap = gp - g
    last = -1
    for p, dfrac in ((66, 1e-4), (258, 1e-5), (1026, 1e-6)):
        d = dfrac * gap
        ts = np.linspace(g + d, gp - d, p)
        dz = hardy_z_vec(ts, cfg, want_deriv=True)[1]
        cells = _sign_cells(dz)
        last = int(cells.size)
        if last == 1:
            i = int(cells[0])
            return float(ts[i]), float(ts[i + 1]), float(dz[i]), float(dz[i + 1])
    raise InterlacingError(
        f"gap [{g:.9f}, {gp:.9f}] shows {last} sign changes of Z' "
        "at the finest probe density"
    )


def stationary_points(zs: ZeroSet, cfg: EvalConfig = DEFAULT_CONFIG) -> ZeroSet:
    """Fill lam and z_at_lambda for every gap (returns a new ZeroSet).

    In each non-degenerate gap the signed derivative is probed on a shared
    grid; gaps showing exactly one sign change go straight to polishing,
    the rest escalate individually.  Degenerate gaps keep lam = gamma and
    z_at_lambda = 0.
    """
    if not zs.records:
        return zs
    recs = zs.records
    gam = np.array([r.gamma for r in recs])
    gp = np.array([r.gamma_plus for r in recs])
    degen = np.array([r.degenerate for r in recs], dtype=bool)
    lam = gam.copy()
    zlam = np.zeros(len(recs))
    live = np.nonzero(~degen)[0]
    if live.size:

        def df(x: np.ndarray) -> np.ndarray:
            return hardy_z_vec(x, cfg, want_deriv=True)[1]

        d = 1e-3 * (gp[live] - gam[live])
        lo = gam[live] + d
        hi = gp[live] - d
        u = np.linspace(0.0, 1.0, 18)
        grid = lo[:, None] + (hi - lo)[:, None] * u[None, :]
        dz = df(grid.ravel()).reshape(grid.shape)
        sgn = np.where(dz >= 0.0, np.int8(1), np.int8(-1))
        flips = sgn[:, 1:] != sgn[:, :-1]
        counts = flips.sum(axis=1)
        rows = np.arange(live.size)
        j = np.argmax(flips, axis=1)
        a = grid[rows, j]
        b = grid[rows, j + 1]
        fa = dz[rows, j]
        fb = dz[rows, j + 1]
        for i in np.nonzero(counts != 1)[0]:
            a[i], b[i], fa[i], fb[i] = _stationary_bracket(
                float(gam[live[i]]), float(gp[live[i]]), cfg
            )
        roots = _vector_refine(df, a, b, fa, fb)
        lam[live] = roots
        zlam[live] = hardy_z_vec(roots, cfg)[0]
    out = tuple(
        dataclasses.replace(r, lam=float(lam[i]), z_at_lambda=float(zlam[i]))
        for i, r in enumerate(recs)
    )
    return ZeroSet(window=zs.window, records=out, count=zs.count)
