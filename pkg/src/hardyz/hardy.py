"""Hardy's function Z(t) and its derivative.

Z(t) = exp(i theta(t)) zeta(1/2 + i t) is real for real t, |Z| = |zeta| on
the critical line, and its sign changes are exactly the critical-line zeros.

Two evaluation paths:

* Euler-Maclaurin (oracle): exp(i theta) * zeta_em, cost ~ |t| terms.
* Riemann-Siegel (fast): main sum of length floor(sqrt(t / 2 pi)) plus
  correction terms,

      Z(t) ~ 2 sum_{n<=N} n^(-1/2) cos(theta(t) - t log n)
             + (-1)^(N-1) a^(-1/2) [C0(p) + C1(p)/a + C2(p)/a^2],

  with a = sqrt(t / 2 pi), N = floor(a), p = a - N, and

      C0(p) = Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p),
      C1(p) = -Psi'''(p) / (96 pi^2),
      C2(p) = Psi''(p) / (64 pi^2) + Psi^(6)(p) / (18432 pi^4).

Psi is entire (the cos zeros cancel), so it is evaluated from its Taylor
series about p = 1/2, which converges rapidly on the whole cell [0, 1).

The derivative Z'(t) is exposed two ways: the contract route takes the
magnitude from |Z_1(1/2 + i t)| with Z_1(s) = zeta'(s) - (chi'/2chi)(s) zeta(s)
(an exact identity) and the sign from a central finite difference; the fast
route differentiates the Riemann-Siegel expression analytically.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np

from .config import DEFAULT_CONFIG, RS_MIN_T, T_FLOOR, EvalConfig
from .errors import DomainError, PrecisionError, SignAmbiguityError
from .zeta_core import (
    TWO_PI,
    _tables,
    chi_log_deriv,
    rs_theta,
    rs_theta_deriv,
    rs_theta_deriv_vec,
    rs_theta_vec,
    zeta_em,
    zeta_with_deriv_em,
)

METHOD_RS = "riemann-siegel"
METHOD_EM = "euler-maclaurin"

# Step for the sign-only central finite difference in hardy_z_deriv.
_FD_SIGN_STEP = 1e-4

# Empirical absolute-error envelope constants for the fast path at depth
# d = 0, 1, 2: truncation <= _RS_ENVELOPE[d] * t^(-(2 d + 3) / 4).  On top of
# the truncation term the envelope carries a rounding floor ~ eps * t^(5/4):
# the main-sum phases t*log n lose ~eps*t absolutely, and the ~sqrt(N) partial
# coherence of those per-term errors scales the loss by another t^(1/4).
_RS_ENVELOPE = (0.51, 0.53, 0.28)
_RS_PHASE_FLOOR = 4e-15


@dataclasses.dataclass(frozen=True)
class HardyValue:
    """One evaluation of Z: ordinate, value, which path produced it, and the
    imaginary residue discarded by the oracle path (0.0 for Riemann-Siegel)."""

    t: float
    z: float
    method: str
    im_residual: float = 0.0


# ---------------------------------------------------------------------------
# Taylor series of Psi about p = 1/2.
#
# With w = p - 1/2:  Psi(1/2 + w) = -cos(2 pi w^2 - 5 pi/8) / cos(2 pi w).
# Psi is entire (the cos(2 pi p) zeros at p = 1/4, 3/4 are cancelled), but the
# series division must be done in high precision: 1/cos(2 pi w) has poles at
# |w| = 1/4, so double-precision division noise grows like 4^k and wrecks the
# high-order coefficients.  The table below holds the exact coefficients
# rounded to double, generated by a 60-digit run of tools/gen_psi_coeffs.py.
# Only even powers appear (Psi(p) = Psi(1 - p)); the tail is < 2e-17.

_PSI_COEF = np.array([
    0.3826834323650898, 0.0, 1.7489618723100817,
    0.0, 2.118025207685496, 0.0,
    -0.8707216670511481, 0.0, -3.4733112243465167,
    0.0, -1.6626947308999325, 0.0,
    1.216731288919232, 0.0, 1.3014304161007977,
    0.0, 0.03051102182736167, 0.0,
    -0.3755803051545095, 0.0, -0.1085784416564066,
    0.0, 0.051832902999549624, 0.0,
    0.029999480619902277, 0.0, -0.0022759396706125644,
    0.0, -0.004382647416580339, 0.0,
    -0.0004064230183729847, 0.0, 0.0004006097785422114,
    0.0, 8.971057991388841e-05, 0.0,
    -2.3025650027239108e-05, 0.0, -9.380006601906792e-06,
    0.0, 6.323514947609108e-07, 0.0,
    6.551022819231502e-07, 0.0, 2.210523745552697e-08,
    0.0, -3.322316176445629e-08, 0.0,
    -3.734910989933656e-09, 0.0, 1.2445067060797738e-09,
    0.0, 2.476820537650219e-10, 0.0,
    -3.284272816891627e-11, 0.0, -1.1305406852298404e-11,
    0.0, 4.565463979588569e-13, 0.0,
    3.9598480945229135e-13, 0.0, 7.849566218047014e-15,
    0.0, -1.1059043202392876e-14, 0.0,
    -7.73855221190432e-16, 0.0, 2.485643966822148e-16,
    0.0, 3.030425606084421e-17, 0.0,
])


def _deriv_coef(coef: np.ndarray, m: int) -> np.ndarray:
    """Coefficients of the m-th derivative of a Taylor series."""
    out = coef.copy()
    for _ in range(m):
        out = out[1:] * np.arange(1, out.size)
    return out


_PI2 = math.pi * math.pi


def _pad_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n)
    out[: a.size] += a
    out[: b.size] += b
    return out


# C_j(p) and dC_j/dp as Taylor coefficient arrays in w = p - 1/2.
_C_COEF = (
    _PSI_COEF,
    -_deriv_coef(_PSI_COEF, 3) / (96.0 * _PI2),
    _pad_add(
        _deriv_coef(_PSI_COEF, 2) / (64.0 * _PI2),
        _deriv_coef(_PSI_COEF, 6) / (18432.0 * _PI2 * _PI2),
    ),
)
_C_DERIV_COEF = tuple(_deriv_coef(c, 1) for c in _C_COEF)


def _poly_eval(coef: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Horner evaluation of an ascending-coefficient series (vectorized)."""
    out = np.zeros_like(w) + coef[-1]
    for c in coef[-2::-1]:
        out = out * w + c
    return out


def rs_correction(p, depth: int, deriv: bool = False):
    """C_0..C_depth (or their p-derivatives) evaluated at fractional part p."""
    w = np.asarray(p, dtype=float) - 0.5
    table = _C_DERIV_COEF if deriv else _C_COEF
    return [_poly_eval(table[j], w) for j in range(depth + 1)]


def rs_main_terms(t: float) -> int:
    """Length floor(sqrt(t / 2 pi)) of the Riemann-Siegel main sum."""
    return int(math.sqrt(float(t) / TWO_PI))


def rs_error_envelope(t: float, depth: int) -> float:
    """Absolute-error envelope of the fast path at correction depth d."""
    t = float(t)
    return _RS_ENVELOPE[depth] * t ** (-(2 * depth + 3) / 4.0) + _RS_PHASE_FLOOR * t**1.25


# Cap on elements of the (points x main-sum-length) work matrix.
_RS_BLOCK = 4_000_000


def _poly_eval_scalar(coef: np.ndarray, w: float) -> float:
    out = coef[-1]
    for c in coef[-2::-1]:
        out = out * w + c
    return float(out)


def _rs_scalar(t: float, depth: int, want_deriv: bool) -> tuple[float, float]:
    """Scalar Riemann-Siegel Z (and Z'), tuned for root-refinement loops."""
    a = math.sqrt(t / TWO_PI)
    n_main = int(a)
    p = a - n_main
    theta = rs_theta(t)
    log_n, rsqrt_n = _tables(n_main)
    args = theta - t * log_n
    cosv = np.cos(args)
    main = 2.0 * float(cosv @ rsqrt_n)
    sign = 1.0 if n_main % 2 == 1 else -1.0
    w = p - 0.5
    inv_a = 1.0 / a
    c_vals = [_poly_eval_scalar(_C_COEF[j], w) for j in range(depth + 1)]
    corr = 0.0
    for j in range(depth, -1, -1):
        corr = corr * inv_a + c_vals[j]
    rs_amp = math.sqrt(inv_a)
    z = main + sign * rs_amp * corr
    if not want_deriv:
        return z, 0.0
    theta_d = rs_theta_deriv(t)
    sinv = np.sin(args)
    dmain = -2.0 * float((sinv * (theta_d - log_n)) @ rsqrt_n)
    dcorr = 0.0
    pow_a = rs_amp
    for j in range(depth + 1):
        c_der = _poly_eval_scalar(_C_DERIV_COEF[j], w)
        dcorr += c_der * pow_a - (j + 0.5) * c_vals[j] * pow_a * inv_a
        pow_a *= inv_a
    dz = dmain + sign * dcorr / (4.0 * math.pi * a)
    return z, dz


def _rs_eval(
    ts: np.ndarray, depth: int, want_deriv: bool
) -> tuple[np.ndarray, np.ndarray | None]:
    """Vectorized Riemann-Siegel Z (and optionally Z') over an array of t."""
    ts = np.asarray(ts, dtype=float)
    a = np.sqrt(ts / TWO_PI)
    n_main = np.floor(a).astype(np.int64)
    p = a - n_main
    theta = rs_theta_vec(ts)
    theta_d = rs_theta_deriv_vec(ts) if want_deriv else None
    out = np.zeros_like(ts)
    dout = np.zeros_like(ts) if want_deriv else None
    for n_val in np.unique(n_main):
        idx = np.nonzero(n_main == n_val)[0]
        log_n, rsqrt_n = _tables(int(n_val))
        step = max(1, _RS_BLOCK // max(1, int(n_val)))
        for lo in range(0, idx.size, step):
            sel = idx[lo : lo + step]
            args = theta[sel, None] - ts[sel, None] * log_n[None, :]
            cosv = np.cos(args)
            out[sel] = 2.0 * (cosv * rsqrt_n[None, :]).sum(axis=1)
            if want_deriv:
                sinv = np.sin(args)
                freq = theta_d[sel, None] - log_n[None, :]
                dout[sel] = -2.0 * (sinv * freq * rsqrt_n[None, :]).sum(axis=1)
    # Correction terms.
    sign = np.where(n_main % 2 == 1, 1.0, -1.0)
    c_vals = rs_correction(p, depth)
    inv_a = 1.0 / a
    rs_amp = np.sqrt(inv_a)
    corr = np.zeros_like(ts)
    for j in range(depth, -1, -1):
        corr = corr * inv_a + c_vals[j]
    out += sign * rs_amp * corr
    if want_deriv:
        c_der = rs_correction(p, depth, deriv=True)
        dcorr = np.zeros_like(ts)
        pow_a = rs_amp  # a^(-1/2 - j)
        for j in range(depth + 1):
            dcorr += c_der[j] * pow_a - (j + 0.5) * c_vals[j] * pow_a * inv_a
            pow_a = pow_a * inv_a
        dout += sign * dcorr / (4.0 * math.pi * a)
    return out, dout


def _check_rs_domain(t: float, cfg: EvalConfig) -> None:
    if not (RS_MIN_T <= t <= cfg.t_max):
        raise DomainError(
            f"Riemann-Siegel path valid for {RS_MIN_T} <= t <= {cfg.t_max:g}, got {t}"
        )


def hardy_z_rs(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> HardyValue:
    """Z(t) by the Riemann-Siegel fast path (t >= 200)."""
    t = float(t)
    _check_rs_domain(t, cfg)
    val, _ = _rs_scalar(t, cfg.rs_correction_terms, want_deriv=False)
    if not math.isfinite(val):
        raise PrecisionError(f"non-finite Z({t})")
    return HardyValue(t=t, z=val, method=METHOD_RS)


def _z_em(t: float, cfg: EvalConfig) -> tuple[float, float]:
    """Oracle path: Re/Im of exp(i theta) zeta(1/2 + i t)."""
    zc = zeta_em(complex(0.5, t), cfg)
    phase = rs_theta(t)
    rotated = complex(math.cos(phase), math.sin(phase)) * zc
    resid = abs(rotated.imag)
    # Phase rounding grows ~ t * eps; beyond t ~ 1e6 the flat bound must
    # be relaxed along the double-precision envelope.
    allow = 1e-8 * (1.0 + abs(rotated.real)) * max(1.0, t / 1e6)
    if resid > allow:
        raise PrecisionError(
            f"imaginary residue {resid:.3g} of exp(i theta) zeta at t={t} "
            f"exceeds the realness envelope {allow:.3g}"
        )
    return rotated.real, resid


def hardy_z(
    t: float, cfg: EvalConfig = DEFAULT_CONFIG, method: str = "auto"
) -> HardyValue:
    """Z(t): Riemann-Siegel for t >= 200 unless the oracle path is requested."""
    t = float(t)
    if not (T_FLOOR <= t <= cfg.t_max):
        raise DomainError(f"hardy_z needs {T_FLOOR} <= t <= {cfg.t_max:g}, got {t}")
    if method not in ("auto", "rs", "em"):
        raise DomainError(f"unknown method {method!r}")
    if method == "rs" or (method == "auto" and t >= RS_MIN_T):
        return hardy_z_rs(t, cfg)
    z, resid = _z_em(t, cfg)
    return HardyValue(t=t, z=z, method=METHOD_EM, im_residual=resid)


def z1(s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """Z_1(s) = zeta'(s) - (chi'(s) / 2 chi(s)) zeta(s).

    On the critical line |Z_1(1/2 + i t)| = |Z'(t)| exactly.
    """
    s = complex(s)
    zeta_v, zeta_d = zeta_with_deriv_em(s, cfg)
    value = zeta_d - 0.5 * chi_log_deriv(s) * zeta_v
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise PrecisionError(f"non-finite Z_1({s})")
    return value


def _signed_zprime_em(t: float, cfg: EvalConfig) -> float:
    """Signed Z'(t) = Re[i exp(i theta) Z_1(1/2 + i t)] (oracle path)."""
    v = z1(complex(0.5, t), cfg)
    phase = rs_theta(t)
    rotated = 1j * complex(math.cos(phase), math.sin(phase)) * v
    return rotated.real


def hardy_z_deriv(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Signed Z'(t): magnitude |Z_1(1/2 + i t)|, sign from a central
    finite difference of Z (sign only, never magnitude)."""
    t = float(t)
    if not (T_FLOOR + _FD_SIGN_STEP <= t <= cfg.t_max):
        raise DomainError(f"hardy_z_deriv domain violation at t={t}")
    mag = abs(z1(complex(0.5, t), cfg))
    h = _FD_SIGN_STEP
    diff = hardy_z(t + h, cfg).z - hardy_z(t - h, cfg).z
    if mag <= 1e-9 and abs(diff) <= 1e-9 * h:
        raise SignAmbiguityError(
            f"t={t} is indistinguishable from a stationary point of Z"
        )
    return math.copysign(mag, diff) if diff != 0.0 else 0.0


def hardy_z_deriv_fast(t: float, cfg: EvalConfig = DEFAULT_CONFIG) -> float:
    """Signed Z'(t) by the differentiated Riemann-Siegel expansion
    (Euler-Maclaurin identity route below t = 200).

    ~100x cheaper than hardy_z_deriv at large t; cross-validated against it.
    """
    t = float(t)
    if not (T_FLOOR <= t <= cfg.t_max):
        raise DomainError(f"hardy_z_deriv_fast domain violation at t={t}")
    if t < RS_MIN_T:
        return _signed_zprime_em(t, cfg)
    _, dz = _rs_scalar(t, cfg.rs_correction_terms, want_deriv=True)
    return dz


def hardy_z_vec(
    ts: np.ndarray, cfg: EvalConfig = DEFAULT_CONFIG, want_deriv: bool = False
) -> tuple[np.ndarray, np.ndarray | None]:
    """Vectorized Z (and optionally Z') for scan/quadrature hot paths.

    Uses the fast path; every ordinate must satisfy t >= 200.  Ordinates
    below that enter the scalar oracle path element-wise.
    """
    ts = np.asarray(ts, dtype=float)
    if ts.size == 0:
        return np.zeros(0), (np.zeros(0) if want_deriv else None)
    if float(ts.min()) < T_FLOOR or float(ts.max()) > cfg.t_max:
        raise DomainError("hardy_z_vec ordinate outside the supported range")
    low = ts < RS_MIN_T
    if not low.any():
        return _rs_eval(ts, cfg.rs_correction_terms, want_deriv)
    out = np.empty_like(ts)
    dout = np.empty_like(ts) if want_deriv else None
    high = ~low
    if high.any():
        z_hi, d_hi = _rs_eval(ts[high], cfg.rs_correction_terms, want_deriv)
        out[high] = z_hi
        if want_deriv:
            dout[high] = d_hi
    for i in np.nonzero(low)[0]:
        out[i] = _z_em(float(ts[i]), cfg)[0]
        if want_deriv:
            dout[i] = _signed_zprime_em(float(ts[i]), cfg)
    return out, dout
