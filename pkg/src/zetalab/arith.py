"""Sieved arithmetic tables: smallest prime factors, Lambda, mu, tau.

Everything downstream (prime sums, mollified coefficients, detector windows)
reads from one :class:`ArithTables` instance so that a single sieve pass per
session covers all uses. Tables are dense arrays indexed by n; the sieve is
linear-ish (smallest-prime-factor) and runs through the kernel dispatch layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels

__all__ = [
    "ArithTables",
    "sieve_tables",
    "mollified_coefficient",
    "mollified_window",
    "mollifier_sum",
    "chebyshev_deviation",
]

_LIMIT_MIN = 2
_LIMIT_MAX = 100_000_000


@dataclass
class ArithTables:
    """Dense arithmetic tables on [0, limit].

    ``spf[n]`` is the smallest prime factor (0 for n < 2), ``lam[n]`` the
    von Mangoldt value, ``mu[n]`` the Moebius value, ``tau[n]`` the divisor
    count.
    """

    limit: int
    spf: np.ndarray
    lam: np.ndarray
    mu: np.ndarray
    tau: np.ndarray
    _pp_cache: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        expect = self.limit + 1
        sizes = (self.spf.size, self.lam.size, self.mu.size, self.tau.size)
        if any(s != expect for s in sizes):
            raise ValueError(f"table sizes {sizes} do not match limit {self.limit}")

    def primes(self) -> np.ndarray:
        ns = np.arange(2, self.limit + 1, dtype=np.int64)
        return ns[self.spf[2:] == ns]

    def prime_powers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Ascending prime powers q <= limit with their Lambda values and logs.

        Cached: the sliding-window prime sums call this on every sweep.
        """
        if self._pp_cache is None:
            npp = np.flatnonzero(self.lam > 0.0).astype(np.int64)
            lam_pp = self.lam[npp]
            log_pp = np.log(npp.astype(np.float64))
            self._pp_cache = (npp, lam_pp, log_pp)
        return self._pp_cache

    def require(self, n: int) -> None:
        if n > self.limit:
            raise ValueError(
                f"tables sieved to {self.limit} cannot answer queries at {n}"
            )


def sieve_tables(limit: int) -> ArithTables:
    """Sieve smallest prime factors up to ``limit`` and derive Lambda, mu, tau.

    ``limit`` must lie in [2, 1e8]; the dense float Lambda table is the memory
    hot spot (8 bytes per index).
    """
    if not (_LIMIT_MIN <= limit <= _LIMIT_MAX):
        raise ValueError(f"limit must be in [{_LIMIT_MIN}, {_LIMIT_MAX}], got {limit}")
    spf = _kernels.sieve_spf(limit)
    lam, mu, tau = _kernels.tables_from_spf(spf)
    return ArithTables(limit=limit, spf=spf, lam=lam, mu=mu, tau=tau)


def _distinct_primes(n: int, spf: np.ndarray) -> list[int]:
    ps = []
    while n > 1:
        p = int(spf[n])
        ps.append(p)
        while n % p == 0:
            n //= p
    return ps


def mollified_coefficient(n: int, m_cap: float, tables: ArithTables) -> int:
    """Windowed mollified divisor coefficient a(n) = sum_{d|n, d<=m_cap} mu(d).

    Only squarefree divisors contribute, so the sum runs over subsets of the
    distinct primes of n. a(1) = 1, and a(n) = 0 for 1 < n <= m_cap by Moebius
    inversion; |a(n)| <= tau(n) always.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    tables.require(n)
    if n == 1:
        return 1
    ps = _distinct_primes(n, tables.spf)
    total = 0
    for mask in range(1 << len(ps)):
        d = 1
        bits = 0
        mm = mask
        i = 0
        while mm:
            if mm & 1:
                d *= ps[i]
                bits += 1
            mm >>= 1
            i += 1
        if d <= m_cap:
            total += -1 if (bits & 1) else 1
    return total


def mollified_window(lo: int, hi: int, m_cap: float, tables: ArithTables) -> np.ndarray:
    """Vector of a(n) for n in [lo, hi], computed by a divisor sieve.

    Independent of :func:`mollified_coefficient` (sieve over d vs. per-n
    divisor enumeration); the two are cross-checked in tests.
    """
    if not (1 <= lo <= hi):
        raise ValueError(f"window [{lo}, {hi}] is invalid")
    tables.require(hi)
    d_cap = int(math.floor(m_cap))
    return _kernels.moll_window(lo, hi, d_cap, tables.mu)


def mollifier_sum(s: complex, m_cap: float, tables: ArithTables) -> complex:
    """M(s) = sum_{m <= m_cap} mu(m) m^{-s}."""
    d_cap = int(math.floor(m_cap))
    tables.require(max(1, d_cap))
    ms = np.arange(1, d_cap + 1, dtype=np.float64)
    mu = tables.mu[1 : d_cap + 1].astype(np.float64)
    if s == 0:
        return complex(math.fsum(mu.tolist()), 0.0)
    vals = mu * np.exp(-s * np.log(ms))
    return complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))


def chebyshev_deviation(tables: ArithTables, x_min: int = 100) -> float:
    """max over x in [x_min, limit] of |psi(x) - x| / x, psi = cumsum(Lambda).

    A coarse Chebyshev-type sanity bound on the sieve (< 0.2 across the table
    range used here).
    """
    if tables.limit < x_min:
        raise ValueError(f"tables end at {tables.limit} < x_min {x_min}")
    psi = np.cumsum(tables.lam)
    xs = np.arange(x_min, tables.limit + 1, dtype=np.float64)
    dev = np.abs(psi[x_min:] - xs) / xs
    return float(dev.max())
