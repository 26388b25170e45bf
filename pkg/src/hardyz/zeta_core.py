"""Core special functions: log-gamma, digamma, chi factor, theta, and
Euler-Maclaurin evaluation of zeta and its derivative.

Everything here is double precision.  The Euler-Maclaurin path is the
accuracy oracle for the whole package: slow (main-sum length ~ |Im s|) but
good to ~1e-12 relative, against which the fast Riemann-Siegel paths are
cross-validated.

Conventions:
  chi(s)    = Gamma((1-s)/2) / Gamma(s/2) * pi^(s - 1/2),
              so zeta(s) = chi(s) * zeta(1-s).
  theta(t)  = Im log-gamma(1/4 + i t/2) - (t/2) log pi, the continuous branch
              with theta(0) = 0; exp(2 i theta(t)) * chi(1/2 + i t) = 1.
"""
from __future__ import annotations

import cmath
import math
import threading
from fractions import Fraction

import numpy as np

from .accum import Neumaier, chunked_sum
from .config import DEFAULT_CONFIG, EvalConfig
from .errors import DomainError, GammaPoleError, PrecisionError

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
TWO_PI = 2.0 * math.pi

# Bernoulli numbers B_2, B_4, ..., B_22 (exact).
_B2N = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
]

# Stirling series coefficients B_2n / (2n (2n-1)) for log-gamma.
_STIRLING = [float(b / (2 * n * (2 * n - 1))) for n, b in enumerate(_B2N, start=1)]
# Digamma asymptotic coefficients B_2n / (2n).
_PSI_COEF = [float(b / (2 * n)) for n, b in enumerate(_B2N, start=1)]
# Euler-Maclaurin tail coefficients B_2j / (2j)! .
_EM_COEF = [float(b / math.factorial(2 * j)) for j, b in enumerate(_B2N, start=1)]

# Arguments are shifted until |z| >= this (and Re z > 0) before the
# asymptotic series; at that radius the Stirling tail is < 1e-20.
_SHIFT_RADIUS = 14.0


def _needs_shift(w: complex) -> bool:
    return abs(w) < _SHIFT_RADIUS or w.real < 0.25


def _is_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == int(z.real)


def log_gamma(z: complex) -> complex:
    """log Gamma(z), the standard analytic branch (real on the positive axis).

    Upward recurrence into Re z >= 14, then the Stirling series.  For
    Re z > 0 this matches the analytic continuation exactly; abs/exp of the
    result are correct everywhere off the poles.
    """
    z = complex(z)
    if _is_pole(z):
        raise GammaPoleError(f"log_gamma pole at {z}")
    shift = Neumaier()
    shift_im = Neumaier()
    w = z
    while _needs_shift(w):
        lw = cmath.log(w)
        shift.add(lw.real)
        shift_im.add(lw.imag)
        w += 1.0
        if _is_pole(w):
            raise GammaPoleError(f"log_gamma pole at {z}")
    # Stirling: (w - 1/2) log w - w + log(2 pi)/2 + sum B_2n/(2n(2n-1) w^(2n-1))
    lw = cmath.log(w)
    out = (w - 0.5) * lw - w + 0.5 * LOG_2PI
    winv2 = 1.0 / (w * w)
    term = 1.0 / w
    for c in _STIRLING:
        out += c * term
        term *= winv2
    return complex(out - complex(shift.value, shift_im.value))


def digamma(z: complex) -> complex:
    """psi(z) = Gamma'(z)/Gamma(z) via recurrence plus the asymptotic series."""
    z = complex(z)
    if _is_pole(z):
        raise GammaPoleError(f"digamma pole at {z}")
    acc = 0.0 + 0.0j
    w = z
    while _needs_shift(w):
        acc += 1.0 / w
        w += 1.0
        if _is_pole(w):
            raise GammaPoleError(f"digamma pole at {z}")
    out = cmath.log(w) - 0.5 / w
    winv2 = 1.0 / (w * w)
    term = winv2
    for c in _PSI_COEF:
        out -= c * term
        term *= winv2
    return complex(out - acc)


def _log_gamma_vec(z: np.ndarray, shift: int = 8) -> np.ndarray:
    """Vectorized log-gamma for arrays with Re z > 0 (fixed-shift Stirling)."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    w = z.copy()
    for _ in range(shift):
        acc += np.log(w)
        w += 1.0
    out = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI
    winv2 = 1.0 / (w * w)
    term = 1.0 / w
    for c in _STIRLING:
        out += c * term
        term = term * winv2
    return out - acc


def _digamma_vec(z: np.ndarray, shift: int = 8) -> np.ndarray:
    """Vectorized digamma for arrays with Re z > 0."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    w = z.copy()
    for _ in range(shift):
        acc += 1.0 / w
        w += 1.0
    out = np.log(w) - 0.5 / w
    winv2 = 1.0 / (w * w)
    term = winv2.copy()
    for c in _PSI_COEF:
        out -= c * term
        term = term * winv2
    return out - acc


def chi(s: complex) -> complex:
    """Functional-equation factor chi(s) with zeta(s) = chi(s) zeta(1-s).

    Evaluated in log space so nothing overflows off the critical line.
    """
    s = complex(s)
    a = (1.0 - s) / 2.0
    b = s / 2.0
    if _is_pole(a) or _is_pole(b):
        raise GammaPoleError(f"chi undefined at s={s} (gamma pole)")
    return cmath.exp(log_gamma(a) - log_gamma(b) + (s - 0.5) * LOG_PI)


def chi_log_deriv(s: complex) -> complex:
    """chi'(s)/chi(s) = -psi((1-s)/2)/2 - psi(s/2)/2 + log pi, exactly."""
    s = complex(s)
    return -0.5 * digamma((1.0 - s) / 2.0) - 0.5 * digamma(s / 2.0) + LOG_PI


def rs_theta(t: float) -> float:
    """theta(t) = Im log-gamma(1/4 + i t/2) - (t/2) log pi, continuous branch.

    Asymptotically (t/2) log(t/(2 pi)) - t/2 - pi/8 + 1/(48 t) + ...
    """
    t = float(t)
    if t < 0.0:
        # theta is odd; negative t only appears in symmetry tests.
        return -rs_theta(-t)
    return log_gamma(complex(0.25, 0.5 * t)).imag - 0.5 * t * LOG_PI


def rs_theta_deriv(t: float) -> float:
    """theta'(t) = Re psi(1/4 + i t/2) / 2 - log(pi)/2 (positive for t > 7)."""
    t = float(t)
    return 0.5 * digamma(complex(0.25, 0.5 * t)).real - 0.5 * LOG_PI


def rs_theta_vec(ts: np.ndarray) -> np.ndarray:
    """Vectorized theta over an array of ordinates (t > 0)."""
    z = 0.25 + 0.5j * np.asarray(ts, dtype=float)
    return _log_gamma_vec(z).imag - 0.5 * np.asarray(ts, dtype=float) * LOG_PI


def rs_theta_deriv_vec(ts: np.ndarray) -> np.ndarray:
    """Vectorized theta' over an array of ordinates (t > 0)."""
    z = 0.25 + 0.5j * np.asarray(ts, dtype=float)
    return 0.5 * _digamma_vec(z).real - 0.5 * LOG_PI


# ---------------------------------------------------------------------------
# Shared n <= N tables: log n (and n^(-1/2)), grown on demand.

_table_lock = threading.Lock()
_LOG_N = np.zeros(0)
_RSQRT_N = np.zeros(0)


def _tables(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """log n and n^(-1/2) for n = 1..n_max (index [n-1]), cached."""
    global _LOG_N, _RSQRT_N
    if _LOG_N.size < n_max:
        with _table_lock:
            if _LOG_N.size < n_max:
                size = max(n_max, 2 * _LOG_N.size, 1 << 16)
                n = np.arange(1, size + 1, dtype=float)
                log_n = np.log(n)
                rsqrt = 1.0 / np.sqrt(n)
                _LOG_N, _RSQRT_N = log_n, rsqrt
    return _LOG_N[:n_max], _RSQRT_N[:n_max]


_EM_CHUNK = 1 << 20


def _em_main_sums(s: complex, n_top: int, want_deriv: bool) -> tuple[complex, complex]:
    """sum_{n=1}^{n_top} n^(-s) and (optionally) -sum log(n) n^(-s), compensated."""
    sigma, t = s.real, s.imag
    re = Neumaier()
    im = Neumaier()
    dre = Neumaier()
    dim = Neumaier()
    log_n, rsqrt_n = _tables(n_top)
    for start in range(0, n_top, _EM_CHUNK):
        ln = log_n[start : min(start + _EM_CHUNK, n_top)]
        if sigma == 0.5:
            amp = rsqrt_n[start : start + ln.size]
        else:
            amp = np.exp(-sigma * ln)
        phase = t * ln
        c = np.cos(phase)
        sn = np.sin(phase)
        term_re = amp * c
        term_im = -amp * sn
        re.add(chunked_sum(term_re))
        im.add(chunked_sum(term_im))
        if want_deriv:
            dre.add(chunked_sum(-ln * term_re))
            dim.add(chunked_sum(-ln * term_im))
    main = complex(re.value, im.value)
    dmain = complex(dre.value, dim.value) if want_deriv else 0.0 + 0.0j
    return main, dmain


def _zeta_em_raw(
    s: complex, cfg: EvalConfig, want_deriv: bool
) -> tuple[complex, complex]:
    """Euler-Maclaurin zeta(s) and zeta'(s).

    zeta(s) = sum_{n<N} n^(-s) + N^(1-s)/(s-1) + N^(-s)/2
              + sum_j B_2j/(2j)! * s(s+1)...(s+2j-2) * N^(1-s-2j)
    with N = max(20, ceil |Im s|) so the Bernoulli tail decays like
    (|s| / (2 pi N))^2 per term.  The derivative is the term-wise d/ds.
    """
    s = complex(s)
    if s == 1.0:
        raise DomainError("zeta pole at s = 1")
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError("non-finite argument")
    t_abs = abs(s.imag)
    n_cap = max(20, int(math.ceil(t_abs)))
    if n_cap > cfg.em_max_terms:
        raise PrecisionError(
            f"Euler-Maclaurin needs {n_cap} terms at |Im s|={t_abs:.3g}, "
            f"above the em_max_terms cap {cfg.em_max_terms}"
        )
    big_n = n_cap
    main, dmain = _em_main_sums(s, big_n - 1, want_deriv)

    log_big = math.log(big_n)
    # N^(1-s)/(s-1) and N^(-s)/2
    n_pow_1ms = cmath.exp((1.0 - s) * log_big)  # N^(1-s)
    n_pow_ms = cmath.exp(-s * log_big)  # N^(-s)
    sm1 = s - 1.0
    value = main + n_pow_1ms / sm1 + 0.5 * n_pow_ms
    deriv = (
        dmain
        - log_big * n_pow_1ms / sm1
        - n_pow_1ms / (sm1 * sm1)
        - 0.5 * log_big * n_pow_ms
    ) if want_deriv else 0.0 + 0.0j

    # Bernoulli tail: term_j = B_2j/(2j)! * r_j * N^(1-s-2j) with the rising
    # factorial r_j = s(s+1)...(s+2j-2) tracked together with dr_j/ds so the
    # derivative stays pole-free even at integer s.
    rising = s  # r_1 = s
    rising_d = 1.0 + 0.0j  # r_1' = 1
    n_pow = n_pow_ms / big_n  # N^(-s-1)
    inv_big2 = 1.0 / (big_n * big_n)
    tail_scale = max(abs(value), abs(deriv) if want_deriv else 0.0, 1e-300)
    last_mag = math.inf
    for j, coef in enumerate(_EM_COEF[:-1], start=1):
        term = coef * rising * n_pow
        value += term
        if want_deriv:
            deriv += coef * n_pow * (rising_d - rising * log_big)
        mag = abs(term)
        i0 = 2 * j - 1
        pair = (s + i0) * (s + i0 + 1)
        rising_d = rising_d * pair + rising * (2.0 * s + 2 * i0 + 1)
        rising = rising * pair
        n_pow = n_pow * inv_big2
        # Next terms' magnitudes estimate the truncation error; the value and
        # derivative series must both have converged before stopping.
        nxt = abs(_EM_COEF[j] * rising * n_pow)
        if want_deriv:
            nxt = max(nxt, abs(_EM_COEF[j] * (rising_d - rising * log_big) * n_pow))
        if nxt < 1e-18 * tail_scale:
            last_mag = nxt
            break
        if nxt > mag and mag > 0 and nxt > 1e-14 * tail_scale:
            # Asymptotic series started diverging before reaching target.
            raise PrecisionError(
                f"Euler-Maclaurin tail stalls at {nxt:.3g} for s={s}"
            )
        last_mag = nxt
    if math.isfinite(last_mag) and last_mag > 10.0 * cfg.target_rel_error * tail_scale:
        raise PrecisionError(
            f"Euler-Maclaurin remainder {last_mag:.3g} exceeds target at s={s}"
        )
    return complex(value), complex(deriv)


def zeta_em(s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """zeta(s) by Euler-Maclaurin (the package's accuracy oracle)."""
    if abs(complex(s).imag) > cfg.t_max:
        raise PrecisionError(
            f"|Im s| = {abs(complex(s).imag):.3g} above the t_max envelope"
        )
    value, _ = _zeta_em_raw(s, cfg, want_deriv=False)
    return value


def zeta_deriv_em(s: complex, cfg: EvalConfig = DEFAULT_CONFIG) -> complex:
    """zeta'(s) by term-wise differentiated Euler-Maclaurin."""
    if abs(complex(s).imag) > cfg.t_max:
        raise PrecisionError(
            f"|Im s| = {abs(complex(s).imag):.3g} above the t_max envelope"
        )
    _, deriv = _zeta_em_raw(s, cfg, want_deriv=True)
    return deriv


def zeta_with_deriv_em(
    s: complex, cfg: EvalConfig = DEFAULT_CONFIG
) -> tuple[complex, complex]:
    """(zeta(s), zeta'(s)) sharing one main-sum pass (used by Z_1)."""
    if abs(complex(s).imag) > cfg.t_max:
        raise PrecisionError(
            f"|Im s| = {abs(complex(s).imag):.3g} above the t_max envelope"
        )
    return _zeta_em_raw(s, cfg, want_deriv=True)
