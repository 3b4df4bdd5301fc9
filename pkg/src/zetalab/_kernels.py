"""Backend dispatch for the numeric hot loops.

Every kernel here has two interchangeable implementations: a numba ``@njit``
version and a pure-numpy version. The environment variable ``ZETALAB_KERNELS``
picks the backend:

* ``auto`` (default): numba when it imports cleanly, numpy otherwise
* ``numba``: require numba, fail loudly if it cannot be imported
* ``numpy``: force the vectorized fallback

The active choice is exposed as :data:`BACKEND` and recorded in experiment
provenance. Both implementations of each kernel agree to floating accuracy
(cross-checked in the test suite); within one backend results are fully
deterministic.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "HAVE_NUMBA",
    "spline_cdf_eval",
    "w0_eval",
    "exp_abs_grid",
    "sieve_spf",
    "tables_from_spf",
    "moll_window",
    "phased_sum",
    "weighted_window_sweep",
]

_ENV = "ZETALAB_KERNELS"

try:  # pragma: no cover - import success depends on environment
    import numba as _numba

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    _numba = None
    HAVE_NUMBA = False


def _resolve_backend() -> str:
    want = os.environ.get(_ENV, "auto").strip().lower()
    if want not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{_ENV} must be one of auto|numba|numpy, got {want!r}"
        )
    if want == "numba" and not HAVE_NUMBA:
        raise RuntimeError(f"{_ENV}=numba but numba is not importable")
    if want == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    return want


BACKEND = _resolve_backend()


# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------


def _spline_cdf_eval_numpy(y, step, a0, a1, a2, a3):
    y = np.asarray(y, dtype=np.float64)
    n = a0.shape[0]
    yc = np.clip(y, 0.0, 1.0)
    idx = np.minimum((yc / step).astype(np.int64), n - 1)
    u = yc - step * idx
    val = ((a3[idx] * u + a2[idx]) * u + a1[idx]) * u + a0[idx]
    return np.where(y <= 0.0, 0.0, np.where(y >= 1.0, 1.0, val))


def _w0_eval_numpy(x, step, a0, a1, a2, a3):
    x = np.asarray(x, dtype=np.float64)
    hi = _spline_cdf_eval_numpy(2.0 * x - 1.0, step, a0, a1, a2, a3)
    lo = _spline_cdf_eval_numpy(x - 1.0, step, a0, a1, a2, a3)
    return hi - lo


def _exp_abs_grid_numpy(z_re, z_im, c_re, c_im, t0, dt, n):
    out = np.empty(n, dtype=np.float64)
    z = z_re + 1j * z_im
    c = c_re + 1j * c_im
    chunk = max(1024, (1 << 22) // max(1, z.size))
    for lo in range(0, n, chunk):
        hi = min(n, lo + chunk)
        t = t0 + dt * np.arange(lo, hi, dtype=np.float64)
        out[lo:hi] = np.abs(np.exp(np.multiply.outer(t, z)) @ c)
    return out


def _sieve_spf_numpy(limit):
    spf = np.zeros(limit + 1, dtype=np.int32)
    i = 2
    while i * i <= limit:
        if spf[i] == 0:
            sl = spf[i * i :: i]
            sl[sl == 0] = i
        i += 1
    idx = np.arange(limit + 1, dtype=np.int32)
    head = spf[2:]
    head[head == 0] = idx[2:][head == 0]
    return spf


def _tables_from_spf_numpy(spf):
    limit = spf.size - 1
    lam = np.zeros(limit + 1, dtype=np.float64)
    mu = np.zeros(limit + 1, dtype=np.int8)
    tau = np.zeros(limit + 1, dtype=np.int32)
    if limit >= 1:
        mu[1] = 1
        # the d = 1 pass already counts the unit divisor, tau[1] included
        for d in range(1, limit + 1):
            tau[d::d] += 1
    if limit >= 2:
        ns = np.arange(2, limit + 1, dtype=np.int32)
        primes = ns[spf[2:] == ns]
        mu[2:] = 1
        for p in primes:
            p = int(p)
            mu[p::p] *= -1
            p2 = p * p
            if p2 <= limit:
                mu[p2::p2] = 0
            lp = math.log(p)
            q = p
            while q <= limit:
                lam[q] = lp
                q *= p
    return lam, mu, tau


def _moll_window_numpy(lo, hi, m_cap, mu):
    out = np.zeros(hi - lo + 1, dtype=np.int64)
    dmax = min(m_cap, hi)
    for d in range(1, dmax + 1):
        md = int(mu[d])
        if md != 0:
            start = ((lo + d - 1) // d) * d
            if start <= hi:
                out[start - lo :: d] += md
    return out


def _phased_sum_numpy(amp, logn, t):
    ph = (-t) * logn
    re = float(np.dot(amp, np.cos(ph)))
    im = float(np.dot(amp, np.sin(ph)))
    return re, im


def _weighted_window_sweep_numpy(npp, m_re, m_im, us, step, a0, a1, a2, a3):
    out_re = np.empty(us.size, dtype=np.float64)
    out_im = np.empty(us.size, dtype=np.float64)
    for k in range(us.size):
        u = us[k]
        lo = int(np.searchsorted(npp, 0.5 * u, side="left"))
        hi = int(np.searchsorted(npp, 2.0 * u, side="right"))
        if lo >= hi:
            out_re[k] = 0.0
            out_im[k] = 0.0
            continue
        w = _w0_eval_numpy(npp[lo:hi] / u, step, a0, a1, a2, a3)
        out_re[k] = float(np.dot(w, m_re[lo:hi]))
        out_im[k] = float(np.dot(w, m_im[lo:hi]))
    return out_re, out_im


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    _njit = _numba.njit

    @_njit(cache=True)
    def _cdf_scalar_nb(y, step, a0, a1, a2, a3):
        if y <= 0.0:
            return 0.0
        if y >= 1.0:
            return 1.0
        n = a0.shape[0]
        i = int(y / step)
        if i >= n:
            i = n - 1
        u = y - step * i
        return ((a3[i] * u + a2[i]) * u + a1[i]) * u + a0[i]

    @_njit(cache=True)
    def _spline_cdf_eval_nb(y, step, a0, a1, a2, a3):
        out = np.empty(y.size, dtype=np.float64)
        for j in range(y.size):
            out[j] = _cdf_scalar_nb(y[j], step, a0, a1, a2, a3)
        return out

    @_njit(cache=True)
    def _w0_scalar_nb(x, step, a0, a1, a2, a3):
        return _cdf_scalar_nb(2.0 * x - 1.0, step, a0, a1, a2, a3) - _cdf_scalar_nb(
            x - 1.0, step, a0, a1, a2, a3
        )

    @_njit(cache=True)
    def _w0_eval_nb(x, step, a0, a1, a2, a3):
        out = np.empty(x.size, dtype=np.float64)
        for j in range(x.size):
            out[j] = _w0_scalar_nb(x[j], step, a0, a1, a2, a3)
        return out

    @_njit(cache=True)
    def _exp_abs_grid_nb(z_re, z_im, c_re, c_im, t0, dt, n):
        out = np.empty(n, dtype=np.float64)
        r_count = z_re.shape[0]
        for i in range(n):
            t = t0 + dt * i
            sre = 0.0
            sim = 0.0
            for r in range(r_count):
                a = math.exp(t * z_re[r])
                ph = t * z_im[r]
                cp = math.cos(ph)
                sp = math.sin(ph)
                sre += a * (c_re[r] * cp - c_im[r] * sp)
                sim += a * (c_re[r] * sp + c_im[r] * cp)
            out[i] = math.hypot(sre, sim)
        return out

    @_njit(cache=True)
    def _sieve_spf_nb(limit):
        spf = np.zeros(limit + 1, dtype=np.int32)
        i = 2
        while i * i <= limit:
            if spf[i] == 0:
                for j in range(i * i, limit + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
            i += 1
        for j in range(2, limit + 1):
            if spf[j] == 0:
                spf[j] = j
        return spf

    @_njit(cache=True)
    def _tables_from_spf_nb(spf):
        limit = spf.size - 1
        lam = np.zeros(limit + 1, dtype=np.float64)
        mu = np.zeros(limit + 1, dtype=np.int8)
        tau = np.zeros(limit + 1, dtype=np.int32)
        if limit >= 1:
            mu[1] = 1
            tau[1] = 1
        for n in range(2, limit + 1):
            p = spf[n]
            m = n // p
            e = 1
            while m % p == 0:
                m //= p
                e += 1
            if m == 1:
                lam[n] = math.log(p)
            if e >= 2:
                mu[n] = 0
            else:
                mu[n] = -mu[m]
            tau[n] = (e + 1) * tau[m]
        return lam, mu, tau

    @_njit(cache=True)
    def _moll_window_nb(lo, hi, m_cap, mu):
        out = np.zeros(hi - lo + 1, dtype=np.int64)
        dmax = min(m_cap, hi)
        for d in range(1, dmax + 1):
            md = mu[d]
            if md != 0:
                start = ((lo + d - 1) // d) * d
                for n in range(start, hi + 1, d):
                    out[n - lo] += md
        return out

    @_njit(cache=True)
    def _phased_sum_nb(amp, logn, t):
        sre = 0.0
        sim = 0.0
        for j in range(amp.size):
            ph = -t * logn[j]
            sre += amp[j] * math.cos(ph)
            sim += amp[j] * math.sin(ph)
        return sre, sim

    @_njit(cache=True)
    def _weighted_window_sweep_nb(npp, m_re, m_im, us, step, a0, a1, a2, a3):
        out_re = np.empty(us.size, dtype=np.float64)
        out_im = np.empty(us.size, dtype=np.float64)
        for k in range(us.size):
            u = us[k]
            lo = np.searchsorted(npp, 0.5 * u, side="left")
            hi = np.searchsorted(npp, 2.0 * u, side="right")
            sre = 0.0
            sim = 0.0
            for j in range(lo, hi):
                w = _w0_scalar_nb(npp[j] / u, step, a0, a1, a2, a3)
                if w != 0.0:
                    sre += w * m_re[j]
                    sim += w * m_im[j]
            out_re[k] = sre
            out_im[k] = sim
        return out_re, out_im


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_IMPLS = {
    "numpy": {
        "spline_cdf_eval": _spline_cdf_eval_numpy,
        "w0_eval": _w0_eval_numpy,
        "exp_abs_grid": _exp_abs_grid_numpy,
        "sieve_spf": _sieve_spf_numpy,
        "tables_from_spf": _tables_from_spf_numpy,
        "moll_window": _moll_window_numpy,
        "phased_sum": _phased_sum_numpy,
        "weighted_window_sweep": _weighted_window_sweep_numpy,
    }
}

if HAVE_NUMBA:
    _IMPLS["numba"] = {
        "spline_cdf_eval": _spline_cdf_eval_nb,
        "w0_eval": _w0_eval_nb,
        "exp_abs_grid": _exp_abs_grid_nb,
        "sieve_spf": _sieve_spf_nb,
        "tables_from_spf": _tables_from_spf_nb,
        "moll_window": _moll_window_nb,
        "phased_sum": _phased_sum_nb,
        "weighted_window_sweep": _weighted_window_sweep_nb,
    }


def _pick(name: str):
    return _IMPLS[BACKEND][name]


spline_cdf_eval = _pick("spline_cdf_eval")
w0_eval = _pick("w0_eval")
exp_abs_grid = _pick("exp_abs_grid")
sieve_spf = _pick("sieve_spf")
tables_from_spf = _pick("tables_from_spf")
moll_window = _pick("moll_window")
phased_sum = _pick("phased_sum")
weighted_window_sweep = _pick("weighted_window_sweep")


def implementations(name: str) -> dict:
    """All available implementations of one kernel, keyed by backend name.

    Used by the cross-backend equality tests and the benchmark harness.
    """
    return {b: impls[name] for b, impls in _IMPLS.items()}
