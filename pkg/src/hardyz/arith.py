"""Generalized divisor functions and the Dirichlet-polynomial apparatus.

d_k(n) is the coefficient of n^{-s} in zeta^k(s): the number of ordered
factorizations of n into k parts.  Tables are built by iterated Dirichlet
convolution with the all-ones function in exact int64 arithmetic.  On top of
the tables sit the log-weighted divisor sum, the square sum over n <= xi,
the Dirichlet polynomial A(t) = sum d_k(n) n^{-1/2-it}, its windowed mean
square, and the Euler-product lower-bound constant C_k'.
"""
from __future__ import annotations

import dataclasses
import functools
import math
import struct
import threading
from pathlib import Path

import numpy as np

from .accum import chunked_sum, neumaier_sum
from .errors import DomainError, PrecisionError
from .zeros import Window

_MAX_K = 6
_MAX_LIMIT = 10_000_000

_DK_MAGIC = b"HZDK"


@dataclasses.dataclass(frozen=True, eq=False)
class DivisorTable:
    """Exact d_k(n) for 1 <= n <= limit; values[0] is unused and zero."""

    k: int
    limit: int
    values: np.ndarray

    def value(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise DomainError(f"n = {n} outside table range [1, {self.limit}]")
        return int(self.values[n])

    def save(self, path: str | Path) -> None:
        path = Path(path)
        header = _DK_MAGIC + struct.pack("<II", 1, self.k) + struct.pack(
            "<Q", self.limit
        )
        path.write_bytes(header + self.values.astype("<i8").tobytes())

    @classmethod
    def load(cls, path: str | Path) -> "DivisorTable":
        raw = Path(path).read_bytes()
        if len(raw) < 20 or raw[:4] != _DK_MAGIC:
            raise DomainError(f"{path} is not a divisor-table cache file")
        version, k = struct.unpack("<II", raw[4:12])
        (limit,) = struct.unpack("<Q", raw[12:20])
        if version != 1:
            raise DomainError(f"unsupported divisor-table cache version {version}")
        values = np.frombuffer(raw[20:], dtype="<i8").astype(np.int64)
        if values.size != limit + 1:
            raise DomainError(f"{path} is truncated")
        values.setflags(write=False)
        return cls(k=int(k), limit=int(limit), values=values)


@functools.lru_cache(maxsize=4)
def divisor_table(k: int, limit: int) -> DivisorTable:
    """d_k on [1, limit] by k-1 passes of convolution with the ones function.

    Exact integers throughout; the result is far below int64 range for
    k <= 6, limit <= 1e7, and that headroom is asserted after every pass.
    """
    if not 1 <= k <= _MAX_K:
        raise DomainError(f"divisor_table needs 1 <= k <= {_MAX_K}, got {k}")
    if not 1 <= limit <= _MAX_LIMIT:
        raise DomainError(f"divisor_table needs 1 <= limit <= {_MAX_LIMIT:d}")
    cur = np.ones(limit + 1, dtype=np.int64)
    cur[0] = 0
    half = limit // 2
    for _ in range(k - 1):
        out = np.zeros(limit + 1, dtype=np.int64)
        for m in range(1, half + 1):
            out[m::m] += cur[m]
        # divisors m > limit/2 contribute only to n = m itself
        out[half + 1 :] += cur[half + 1 :]
        if int(out.max()) >= 1 << 62:
            raise PrecisionError("divisor values approaching int64 range")
        cur = out
    cur.setflags(write=False)
    return DivisorTable(k=k, limit=limit, values=cur)


def cached_divisor_table(
    k: int, limit: int, cache_dir: str | Path | None
) -> DivisorTable:
    """divisor_table with a binary file cache keyed by (k, limit)."""
    if cache_dir is None:
        return divisor_table(k, limit)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = cache_dir / f"dk_{k}_{limit}.bin"
    if path.exists():
        table = DivisorTable.load(path)
        if table.k == k and table.limit == limit:
            return table
    table = divisor_table(k, limit)
    table.save(path)
    return table


def tilde_divisor(k: int, n: int, table_km1: DivisorTable) -> float:
    """Log-weighted divisor sum over delta | n of d_{k-1}(delta) log(n/delta)."""
    if k < 2:
        raise DomainError("tilde_divisor needs k >= 2")
    if table_km1.k != k - 1:
        raise DomainError(
            f"table carries k = {table_km1.k}, need k - 1 = {k - 1}"
        )
    if not 1 <= n <= table_km1.limit:
        raise DomainError(f"n = {n} outside the table limit {table_km1.limit}")
    terms = []
    i = 1
    while i * i <= n:
        if n % i == 0:
            terms.append(int(table_km1.values[i]) * math.log(n // i))
            j = n // i
            if j != i:
                terms.append(int(table_km1.values[j]) * math.log(i))
        i += 1
    return math.fsum(terms)


def divisor_square_sum(
    k: int, xi: float, table: DivisorTable | None = None
) -> float:
    """Compensated sum of d_k(n)^2 / n over 1 <= n <= xi."""
    n_top = math.floor(xi)
    if n_top < 1:
        raise DomainError(f"divisor_square_sum needs xi >= 1, got {xi}")
    if table is None:
        table = divisor_table(k, n_top)
    if table.k != k or table.limit < n_top:
        raise DomainError("divisor table does not cover the requested sum")
    v = table.values[1 : n_top + 1].astype(float)
    n = np.arange(1, n_top + 1, dtype=float)
    return chunked_sum(v * v / n)


# ---------------------------------------------------------------------------
# Dirichlet polynomial A(t) = sum_{n <= xi} d_k(n) n^{-1/2} e^{-i t log n}
# ---------------------------------------------------------------------------

_poly_cache: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}
_poly_lock = threading.Lock()

# Cap on elements of the (points x terms) phase matrix per block.
_POLY_BLOCK = 4_000_000


def _poly_tables(table: DivisorTable, n_top: int) -> tuple[np.ndarray, np.ndarray]:
    """(log n, d_k(n) / sqrt(n)) for 1 <= n <= n_top.

    Cached by (k, limit, n_top): tables with equal parameters hold equal
    values, so a key collision across table objects is harmless.
    """
    key = (table.k, table.limit, n_top)
    with _poly_lock:
        hit = _poly_cache.get(key)
        if hit is not None:
            return hit
        n = np.arange(1, n_top + 1, dtype=float)
        logn = np.log(n)
        coef = table.values[1 : n_top + 1].astype(float) / np.sqrt(n)
        logn.setflags(write=False)
        coef.setflags(write=False)
        if len(_poly_cache) > 8:
            _poly_cache.clear()
        _poly_cache[key] = (logn, coef)
        return logn, coef


def _check_poly_args(k: int, xi: float, table: DivisorTable) -> int:
    n_top = math.floor(xi)
    if n_top < 1:
        raise DomainError(f"xi = {xi} truncates the polynomial to nothing")
    if table.k != k:
        raise DomainError(f"table carries k = {table.k}, need {k}")
    if table.limit < n_top:
        raise DomainError(f"table limit {table.limit} below xi = {xi}")
    return n_top


def dirichlet_poly(t: float, k: int, xi: float, table: DivisorTable) -> complex:
    """A(t) at a single ordinate, compensated summation."""
    n_top = _check_poly_args(k, xi, table)
    logn, coef = _poly_tables(table, n_top)
    phase = -float(t) * logn
    re = chunked_sum(coef * np.cos(phase))
    im = chunked_sum(coef * np.sin(phase))
    return complex(re, im)


def dirichlet_poly_vec(
    ts: np.ndarray, k: int, xi: float, table: DivisorTable
) -> np.ndarray:
    """A(t) on an array of ordinates (blocked phase matrix, pairwise sums)."""
    n_top = _check_poly_args(k, xi, table)
    logn, coef = _poly_tables(table, n_top)
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.size, dtype=complex)
    rows = max(1, _POLY_BLOCK // n_top)
    for start in range(0, ts.size, rows):
        block = ts[start : start + rows, None] * logn[None, :]
        out[start : start + rows] = (
            coef * np.cos(block)
        ).sum(axis=1) - 1j * (coef * np.sin(block)).sum(axis=1)
    return out


def mean_square_A(
    window: Window,
    k: int,
    xi: float,
    table: DivisorTable | None = None,
    tol: float | None = None,
):
    """Quadrature of |A(t)|^2 over the window.

    Requires xi <= width / 10 so that the mean square is dominated by the
    diagonal H sum d_k^2(n)/n rather than the off-diagonal error term.
    """
    from .moments import integrate_adaptive

    n_top = math.floor(xi)
    if n_top < 1:
        raise DomainError(f"mean_square_A needs xi >= 1, got {xi}")
    if xi > window.width / 10.0:
        raise DomainError(
            f"mean_square_A needs xi <= width/10 = {window.width / 10.0:g}"
        )
    if table is None:
        table = divisor_table(k, n_top)
    scale = divisor_square_sum(k, xi, table)
    if tol is None:
        tol = 1e-8 * scale

    def f(ts: np.ndarray) -> np.ndarray:
        a = dirichlet_poly_vec(ts, k, xi, table)
        return a.real * a.real + a.imag * a.imag

    # |A|^2 oscillates no faster than 2 log(xi) radians per unit t; keep
    # panels short enough that 15 nodes resolve every wavelength present.
    max_panel = 15.0 * math.pi / (4.0 * max(math.log(max(xi, 2.0)), 0.5))
    return integrate_adaptive(
        f, window, tol, breakpoints=(), max_panel_width=max_panel
    )


# ---------------------------------------------------------------------------
# Euler-product constant C_k'
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EulerProductResult:
    """Truncated Euler product with a tail-size estimate."""

    k: int
    prime_limit: int
    value: float
    truncation_estimate: float


def primes_up_to(limit: int) -> np.ndarray:
    """Primes <= limit by a boolean Eratosthenes sieve."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def _local_sum_coeffs(k: int, m_top: int) -> np.ndarray:
    """Coefficients binom(k+m-1, m)^2 of the local factor's m-sum."""
    return np.array(
        [math.comb(k + m - 1, m) ** 2 for m in range(m_top + 1)], dtype=float
    )


def _local_factor(k: int, p: float) -> float:
    """(1 - 1/p)^{k^2} times the m-sum, truncated at 1e-18 of the partial sum."""
    total = 0.0
    m = 0
    while True:
        term = math.comb(k + m - 1, m) ** 2 * p**-m
        total += term
        m += 1
        if term < 1e-18 * total:
            break
    return (1.0 - 1.0 / p) ** (k * k) * total


def ramachandra_constant(k: int, prime_limit: int) -> EulerProductResult:
    """C_k' = 1/(2 Gamma(k^2+1)) prod_p (1-1/p)^{k^2} sum_m binom(k+m-1,m)^2 p^{-m}.

    Primes above 512 use a fixed 8-term m-sum (the ninth term is below 1e-18
    of the total there for every k <= 5), vectorized; smaller primes run the
    exact truncation loop.  truncation_estimate models the dropped tail
    sum_{p > P} |log local(p)| ~ c / (P log P) with c calibrated from the
    first dropped prime, times a safety factor of 3.
    """
    if not 1 <= k <= 5:
        raise DomainError(f"ramachandra_constant needs 1 <= k <= 5, got {k}")
    if not 2 <= prime_limit <= _MAX_LIMIT:
        raise DomainError(
            f"ramachandra_constant needs 2 <= prime_limit <= {_MAX_LIMIT:d}"
        )
    ps = primes_up_to(prime_limit)
    if ps.size == 0:
        raise DomainError("no primes below the requested limit")
    small = ps[ps <= 512]
    large = ps[ps > 512].astype(float)
    log_terms = [math.log(_local_factor(k, float(p))) for p in small]
    log_sum = neumaier_sum(log_terms)
    if large.size:
        coeffs = _local_sum_coeffs(k, 8)
        inv = 1.0 / large
        msum = np.zeros_like(large)
        for c in coeffs[::-1]:
            msum = msum * inv + c
        log_local = (k * k) * np.log1p(-inv) + np.log(msum)
        log_sum += chunked_sum(log_local)
    value = math.exp(log_sum) / (2.0 * math.factorial(k * k))
    # first prime past the cutoff calibrates the dropped tail
    q = float(int(ps[-1]) + 1)
    while not all(int(q) % int(r) for r in ps[ps * ps <= q]):
        q += 1.0
    dev = abs(_local_factor(k, q) - 1.0)
    p_top = float(ps[-1])
    truncation = 3.0 * value * dev * q * q / (p_top * math.log(p_top))
    return EulerProductResult(
        k=k, prime_limit=prime_limit, value=value, truncation_estimate=truncation
    )
