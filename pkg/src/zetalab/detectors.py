"""Zero-detecting prime sums, Dirichlet polynomials, and cluster classification.

The machinery has three layers:

* **Windowed prime sums** S_U(s) = sum_n Lambda(n) w0(n/U) n^{-s}: the smooth
  explicit formula converts them into U^{1-s} W0(1-s) minus a sum of
  U^{rho-s} W0(rho-s) over zeros rho plus rapidly decaying remainders, so a
  large |S_U| at a point certifies nearby zero structure and vice versa.
  :func:`explicit_formula_residual` verifies the identity numerically against
  a zero table with an honest tail bound; :func:`zero_sum_search` sweeps the
  zero-side model over the scale range [Y, Y^2] the way the lower-bound lemma
  prescribes; :func:`detect_half_isolated_U` is the working detector at a
  half-isolated zero; :func:`build_flexible_detector` composes detections at
  telescoping scales into one short Dirichlet polynomial.

* **Dyadic mollified blocks** D_N(s) = sum_{N < n <= 2N} a(n) n^{-s} e^{-n/Y}
  with a(n) the mollified divisor coefficients: either some block is large at
  a zero (Type I: the zero is detected by a short polynomial) or the
  undamped-at-1 series forces the complementary contour value to be large
  (Type II). :func:`type1_check`, :func:`type2_value` and
  :func:`dichotomy_check` implement the two horns and the lower bound
  max(3 log T max_N |D_N|, 3 |type II value|) >= 1.

* **Cluster classification** over a decomposition: per-member Type I/II flags
  aggregate into the A/B/C/D cluster taxonomy, with the pigeonholed
  common-length subset extracted for Type D.

Phases t log n are reduced modulo 2 pi in double-double arithmetic (seeded by
120-bit logs) once |t| log n_max exceeds 2^40; below that raw float64 phases
already carry sub-1e-8 error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .arith import ArithTables, mollified_window, mollifier_sum
from .gammafn import gamma_times_power
from .weights import BumpWeight
from .zerosets import (
    Cluster,
    ClusterDecomposition,
    ScaleParams,
    ZeroSet,
    is_Y_half_isolated,
)

__all__ = [
    "DirichletPoly",
    "DetectorOutcome",
    "DetectorConstructionError",
    "ZeroSumSearch",
    "ResidualReport",
    "ISeriesValue",
    "Type2Report",
    "FlexibleLevel",
    "FlexibleDetector",
    "ClusterLabel",
    "prime_sum_S",
    "prime_sweep",
    "zero_side_sum",
    "zero_sum_search",
    "zero_model_value",
    "detect_half_isolated_U",
    "explicit_formula_residual",
    "d_n_poly",
    "dirichlet_D_N",
    "type1_check",
    "i_series",
    "type2_value",
    "dichotomy_check",
    "build_flexible_detector",
    "classify_clusters",
    "type1_scales",
]

_DD_PHASE_LIMIT = float(1 << 40)
_TWO_PI = 2.0 * math.pi
_TWO_PI_HI = 6.283185307179586
_TWO_PI_LO = 2.4492935982947064e-16
_SPLIT = 134217729.0  # 2^27 + 1, Dekker splitting constant

# |zeta'/zeta(4.5)| <= sum Lambda(n) n^{-4.5} (verified < 0.08 in tests) plus
# the bounded functional-equation pieces log(2 pi) + pi/2 |cot| with |cot| = 1
# on the half-integer line; psi contributes the log term handled separately.
_CONTOUR_CONST = math.log(2.0 * math.pi) + 0.5 * math.pi + 0.08 + 0.2


# ---------------------------------------------------------------------------
# double-double phase reduction
# ---------------------------------------------------------------------------


def _two_prod(a, b):
    """Exact product a*b = hi + lo via Dekker splitting (vectorized)."""
    hi = a * b
    aa = a * _SPLIT
    ah = aa - (aa - a)
    al = a - ah
    bb = b * _SPLIT
    bh = bb - (bb - b)
    bl = b - bh
    lo = ((ah * bh - hi) + ah * bl + al * bh) + al * bl
    return hi, lo


def _dd_logs(ns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log n as double-double pairs, seeded by 120-bit gmpy2 logs."""
    import gmpy2

    ctx = gmpy2.get_context().copy()
    ctx.precision = 120
    hi = np.empty(ns.size, dtype=np.float64)
    lo = np.empty(ns.size, dtype=np.float64)
    with gmpy2.context(ctx):
        for i, n in enumerate(ns):
            v = gmpy2.log(gmpy2.mpfr(int(n)))
            h = float(v)
            hi[i] = h
            lo[i] = float(v - gmpy2.mpfr(h))
    return hi, lo


def _phases_mod_two_pi(t: float, log_hi: np.ndarray, log_lo: np.ndarray) -> np.ndarray:
    """t * log n reduced modulo 2 pi with double-double care."""
    p_hi, p_lo = _two_prod(np.float64(t), log_hi)
    p_lo = p_lo + t * log_lo
    k = np.round(p_hi / _TWO_PI)
    q_hi, q_lo = _two_prod(k, np.float64(_TWO_PI_HI))
    return (p_hi - q_hi) - q_lo - k * _TWO_PI_LO + p_lo


# ---------------------------------------------------------------------------
# Dirichlet polynomials
# ---------------------------------------------------------------------------


@dataclass
class DirichletPoly:
    """Finite sum c(n) n^{-s}, optionally damped by exp(-n / damping_scale).

    ``ns`` is the ascending integer support, ``coeffs`` the matching real
    coefficients. Evaluation folds the damping and n^{-Re s} into a real
    amplitude and runs the phased-sum kernel; a blocked evaluator provides an
    independent second path for cross-checks.
    """

    ns: np.ndarray
    coeffs: np.ndarray
    damping_scale: float | None = None
    label: str = ""
    _logs: np.ndarray = field(init=False, repr=False)
    _dd_cache: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        self.ns = np.asarray(self.ns, dtype=np.int64)
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.ns.ndim != 1 or self.ns.shape != self.coeffs.shape:
            raise ValueError("support and coefficients must be equal-length 1-d")
        if self.ns.size == 0:
            raise ValueError("empty polynomial")
        if self.ns[0] < 1 or np.any(np.diff(self.ns) <= 0):
            raise ValueError("support must be ascending positive integers")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("coefficients must be finite")
        if self.damping_scale is not None and self.damping_scale <= 0.0:
            raise ValueError("damping scale must be positive")
        self._logs = np.log(self.ns.astype(np.float64))

    @property
    def support(self) -> tuple[int, int]:
        return int(self.ns[0]), int(self.ns[-1])

    def effective_coeffs(self) -> np.ndarray:
        if self.damping_scale is None:
            return self.coeffs
        return self.coeffs * np.exp(-self.ns / self.damping_scale)

    def _needs_dd(self, t: float) -> bool:
        return abs(t) * float(self._logs[-1]) > _DD_PHASE_LIMIT

    def evaluate(self, s: complex) -> complex:
        """c(n)-weighted sum of n^{-s}; auto-selects the dd phase path."""
        s = complex(s)
        amp = self.effective_coeffs() * np.exp(-s.real * self._logs)
        if self._needs_dd(s.imag):
            if self._dd_cache is None:
                self._dd_cache = _dd_logs(self.ns)
            ph = _phases_mod_two_pi(-s.imag, *self._dd_cache)
            return complex(float(np.dot(amp, np.cos(ph))),
                           float(np.dot(amp, np.sin(ph))))
        re, im = _kernels.phased_sum(np.ascontiguousarray(amp), self._logs, s.imag)
        return complex(re, im)

    def evaluate_blocked(self, s: complex, block: int = 2048) -> complex:
        """Independent evaluation path: complex powers summed block by block."""
        s = complex(s)
        eff = self.effective_coeffs()
        res: list[float] = []
        ims: list[float] = []
        for lo in range(0, self.ns.size, block):
            hi = min(self.ns.size, lo + block)
            vals = eff[lo:hi] * np.exp(-s * self._logs[lo:hi])
            res.append(float(vals.real.sum()))
            ims.append(float(vals.imag.sum()))
        return complex(math.fsum(res), math.fsum(ims))

    def log_abs_sampler(self, sigma: float, floor: float = 1e-300):
        """t -> log|D(sigma + it)| as a vectorized callable (majorant tests)."""

        def sampler(ts: np.ndarray) -> np.ndarray:
            ts = np.atleast_1d(np.asarray(ts, dtype=np.float64))
            amp = self.effective_coeffs() * np.exp(-sigma * self._logs)
            ph = np.multiply.outer(ts, self._logs)
            vals = np.abs(np.cos(ph) @ amp - 1j * (np.sin(ph) @ amp))
            return np.log(np.maximum(vals, floor))

        return sampler


# ---------------------------------------------------------------------------
# outcomes
# ---------------------------------------------------------------------------


@dataclass
class DetectorOutcome:
    """One thresholded detector evaluation (sweep, block, or contour horn)."""

    kind: str
    parameter: float
    value: complex
    magnitude: float
    threshold: float
    passed: bool
    trace: tuple[np.ndarray, np.ndarray] | None = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.passed != (self.magnitude >= self.threshold):
            raise ValueError("passed flag contradicts magnitude vs threshold")


class DetectorConstructionError(RuntimeError):
    """A staged construction failed at a named level."""

    def __init__(self, level: int, message: str):
        super().__init__(f"level {level}: {message}")
        self.level = level


# ---------------------------------------------------------------------------
# windowed prime sums
# ---------------------------------------------------------------------------


def prime_sum_S(s: complex, scale: float, tables: ArithTables,
                weight: BumpWeight, force_dd: bool | None = None) -> complex:
    """S_scale(s) = sum over prime powers of Lambda(n) w0(n/scale) n^{-s}."""
    s = complex(s)
    if scale <= 0.0:
        raise ValueError("scale must be positive")
    tables.require(int(math.floor(2.0 * scale)))
    npp, lam_pp, log_pp = tables.prime_powers()
    lo = int(np.searchsorted(npp, 0.5 * scale, side="left"))
    hi = int(np.searchsorted(npp, 2.0 * scale, side="right"))
    if lo >= hi:
        return 0.0 + 0.0j
    ns = npp[lo:hi]
    logs = log_pp[lo:hi]
    w = weight.eval_w0(ns.astype(np.float64) / scale)
    amp = lam_pp[lo:hi] * w * np.exp(-s.real * logs)
    use_dd = force_dd if force_dd is not None else (
        abs(s.imag) * float(logs[-1]) > _DD_PHASE_LIMIT)
    if use_dd:
        ph = _phases_mod_two_pi(-s.imag, *_dd_logs(ns))
        return complex(float(np.dot(amp, np.cos(ph))),
                       float(np.dot(amp, np.sin(ph))))
    re, im = _kernels.phased_sum(np.ascontiguousarray(amp), logs, s.imag)
    return complex(re, im)


def prime_sweep(s: complex, scales: np.ndarray, tables: ArithTables,
                weight: BumpWeight) -> tuple[np.ndarray, np.ndarray]:
    """S_U(s) over an ascending grid of scales U; returns (complex, |.|).

    Hot path: the per-n damped phase factor is precomputed once, the window
    kernel re-weights it per scale. Falls back to per-scale evaluation when
    the phases need double-double reduction.
    """
    s = complex(s)
    scales = np.asarray(scales, dtype=np.float64)
    tables.require(int(math.floor(2.0 * scales.max())))
    npp, lam_pp, log_pp = tables.prime_powers()
    lo = int(np.searchsorted(npp, 0.5 * scales.min(), side="left"))
    hi = int(np.searchsorted(npp, 2.0 * scales.max(), side="right"))
    if lo >= hi:
        z = np.zeros(scales.size, dtype=np.complex128)
        return z, np.abs(z)
    ns = npp[lo:hi].astype(np.float64)
    logs = log_pp[lo:hi]
    if abs(s.imag) * float(logs[-1]) > _DD_PHASE_LIMIT:
        vals = np.array([prime_sum_S(s, u, tables, weight) for u in scales])
        return vals, np.abs(vals)
    amp = lam_pp[lo:hi] * np.exp(-s.real * logs)
    ph = -s.imag * logs
    m_re = np.ascontiguousarray(amp * np.cos(ph))
    m_im = np.ascontiguousarray(amp * np.sin(ph))
    step, a0, a1, a2, a3 = weight.spline_arrays()
    out_re, out_im = _kernels.weighted_window_sweep(
        np.ascontiguousarray(ns), m_re, m_im,
        np.ascontiguousarray(scales), step, a0, a1, a2, a3)
    vals = out_re + 1j * out_im
    return vals, np.abs(vals)


# ---------------------------------------------------------------------------
# zero-side sums
# ---------------------------------------------------------------------------


def zero_side_sum(zs: ZeroSet, idx: int, z_scale: float, weight: BumpWeight,
                  params: ScaleParams, y: float | None = None) -> complex:
    """One-sided zero sum: members of the corridor box above rho0.

    Box: gamma0 <= gamma <= gamma0 + neighborhood_radius and
    |beta - beta0| <= 1/(10 log Y); summand W0(rho - rho0) Z^{rho - rho0}.
    Y defaults to Z itself; pass the sweep's fixed Y explicitly when Z moves
    (the corridor must not move with it).
    """
    if z_scale <= 1.0:
        raise ValueError("z_scale must exceed 1")
    y = z_scale if y is None else y
    if y <= 1.0:
        raise ValueError("y must exceed 1")
    b0 = float(zs.beta[idx])
    g0 = float(zs.gamma[idx])
    radius = float(params.neighborhood_radius)
    zs.require_complete(g0, g0 + radius, what="one-sided zero sum")
    rg = params.real_gap(y)
    pick = ((zs.gamma >= g0) & (zs.gamma <= g0 + radius)
            & (np.abs(zs.beta - b0) <= rg))
    dz = (zs.beta[pick] - b0) + 1j * (zs.gamma[pick] - g0)
    w_vals, _ = weight.mellin_W0_many(dz)
    return complex(np.sum(w_vals * np.exp(dz * math.log(z_scale))))


@dataclass
class ZeroSumSearch:
    """Sweep of the one-sided zero sum over Z in [Y, Y^2]."""

    index: int
    y: float
    z_star: float
    value: complex
    magnitude: float
    lipschitz: float
    threshold: float
    passed: bool
    lemma_floor: float
    trace: tuple[np.ndarray, np.ndarray]
    term_count: int


def zero_sum_search(zs: ZeroSet, idx: int, y: float, weight: BumpWeight,
                    params: ScaleParams) -> ZeroSumSearch:
    """Maximize |one-sided zero sum| over the geometric Z grid in [Y, Y^2].

    The trace is certified by the explicit derivative bound
    L = sum |W0(dz) dz| sup_{t <= 2 log Y} e^{t Re dz} in t = log Z. The
    working threshold is params.detection_threshold; the asymptotic lemma
    floor (log T)^{-100} is recorded alongside for reference.
    """
    if y <= 1.0:
        raise ValueError("y must exceed 1")
    b0 = float(zs.beta[idx])
    g0 = float(zs.gamma[idx])
    radius = float(params.neighborhood_radius)
    zs.require_complete(g0, g0 + radius, what="zero-sum search")
    rg = params.real_gap(y)
    pick = ((zs.gamma >= g0) & (zs.gamma <= g0 + radius)
            & (np.abs(zs.beta - b0) <= rg))
    dz = (zs.beta[pick] - b0) + 1j * (zs.gamma[pick] - g0)
    w_vals, _ = weight.mellin_W0_many(dz)

    grid = params.u_grid(y, y * y)
    ts = np.log(grid)
    # uniform in t except possibly the appended endpoint; evaluate directly
    mat = np.exp(np.multiply.outer(ts, dz))
    vals = mat @ w_vals
    mags = np.abs(vals)
    i = int(np.argmax(mags))
    grow = np.where(dz.real > 0.0,
                    np.exp(2.0 * math.log(y) * dz.real),
                    np.exp(math.log(y) * dz.real))
    lip = float(np.sum(np.abs(w_vals) * np.abs(dz) * grow))
    tau = float(params.detection_threshold)
    return ZeroSumSearch(
        index=idx, y=float(y), z_star=float(grid[i]), value=complex(vals[i]),
        magnitude=float(mags[i]), lipschitz=lip, threshold=tau,
        passed=bool(mags[i] >= tau),
        lemma_floor=params.log_t ** (-100.0),
        trace=(grid, mags), term_count=int(dz.size),
    )


def _window_zero_sum(zs: ZeroSet, idx: int, u: float, window: float,
                     weight: BumpWeight) -> tuple[complex, float, int]:
    """Two-sided windowed zero sum including conjugates, with quad error."""
    b0 = float(zs.beta[idx])
    g0 = float(zs.gamma[idx])
    zs.require_complete(max(0.0, g0 - window), g0 + window, what="window zero sum")
    direct = np.abs(zs.gamma - g0) <= window
    dz_list = [(zs.beta[direct] - b0) + 1j * (zs.gamma[direct] - g0)]
    conj = np.abs(-zs.gamma - g0) <= window
    if conj.any():
        dz_list.append((zs.beta[conj] - b0) + 1j * (-zs.gamma[conj] - g0))
    dz = np.concatenate(dz_list)
    w_vals, errs = weight.mellin_W0_many(dz)
    log_u = math.log(u)
    total = complex(np.sum(w_vals * np.exp(dz * log_u)))
    err = float(np.sum(errs * np.exp(dz.real * log_u)))
    return total, err, int(dz.size)


def zero_model_value(zs: ZeroSet, idx: int, u: float, weight: BumpWeight,
                     params: ScaleParams) -> complex:
    """Windowed explicit-formula model: main term minus the local zero sum.

    U^{1-rho0} W0(1-rho0) - sum_{|gamma' -+ gamma0| <= window}
    U^{rho-rho0} W0(rho-rho0), conjugates included. This is what the genuine
    prime sum S_U(rho0) converges to as the window and table grow.
    """
    rho0 = complex(zs.beta[idx], zs.gamma[idx])
    main = cmath.exp((1.0 - rho0) * math.log(u)) * weight.mellin_W0(1.0 - rho0).value
    zsum, _, _ = _window_zero_sum(zs, idx, u, float(params.window), weight)
    return main - zsum


def detect_half_isolated_U(
    zs: ZeroSet,
    idx: int,
    y: float,
    tables: ArithTables | None,
    weight: BumpWeight,
    params: ScaleParams,
    evaluand: str = "prime",
    check_predicate: bool = True,
) -> DetectorOutcome:
    """Sweep U over [Y, Y^2] and test max |evaluand| against the threshold.

    evaluand "prime": the genuine windowed prime sum S_U(rho0) (requires
    tables out to 2 Y^2). evaluand "zero_model": the windowed explicit-
    formula model (synthetic sets; no tables needed). The zero must be
    Y-half-isolated unless check_predicate=False (counterfactual studies).
    """
    if evaluand not in ("prime", "zero_model"):
        raise ValueError(f"unknown evaluand {evaluand!r}")
    if check_predicate:
        chk = is_Y_half_isolated(zs, idx, y, params)
        if not chk.ok:
            raise ValueError(
                f"zero {idx} is not {y:.6g}-half-isolated "
                f"(witnesses {chk.witnesses[:5]}); pass check_predicate=False "
                "to sweep anyway")
    rho0 = complex(zs.beta[idx], zs.gamma[idx])
    grid = params.u_grid(y, y * y)
    if evaluand == "prime":
        if tables is None:
            raise ValueError("prime evaluand needs sieve tables")
        vals, mags = prime_sweep(rho0, grid, tables, weight)
    else:
        # the window zero set is U-independent: batch the Mellin values once
        b0, g0 = float(zs.beta[idx]), float(zs.gamma[idx])
        window = float(params.window)
        zs.require_complete(max(0.0, g0 - window), g0 + window,
                            what="zero-model sweep")
        direct = np.abs(zs.gamma - g0) <= window
        dz_list = [(zs.beta[direct] - b0) + 1j * (zs.gamma[direct] - g0)]
        conj = np.abs(-zs.gamma - g0) <= window
        if conj.any():
            dz_list.append((zs.beta[conj] - b0) + 1j * (-zs.gamma[conj] - g0))
        dz = np.concatenate(dz_list)
        w_vals, _ = weight.mellin_W0_many(dz)
        w_main = weight.mellin_W0(1.0 - rho0).value
        log_us = np.log(grid)
        mains = np.exp((1.0 - rho0) * log_us) * w_main
        vals = mains - np.exp(np.multiply.outer(log_us, dz)) @ w_vals
        mags = np.abs(vals)
    i = int(np.argmax(mags))
    tau = float(params.detection_threshold)
    return DetectorOutcome(
        kind=f"detect-sweep-{evaluand}",
        parameter=float(grid[i]),
        value=complex(vals[i]),
        magnitude=float(mags[i]),
        threshold=tau,
        passed=bool(mags[i] >= tau),
        trace=(grid, mags),
        detail={"y": float(y), "index": idx, "evaluand": evaluand},
    )


# ---------------------------------------------------------------------------
# explicit-formula residual
# ---------------------------------------------------------------------------

_CONTOUR_CACHE: dict[int, tuple[float, float]] = {}


def _contour_integrals(weight: BumpWeight) -> tuple[float, float]:
    """(I0, I1) = integrals over t of |W0(-4+it)| {1, log(1+|t|)} dt.

    Cached per weight instance; the contour tail bound at Re s = -4 is
    U^{-4} (I0 (const + log(4.5+gamma0)) + I1) / (2 pi).
    """
    key = id(weight)
    if key in _CONTOUR_CACHE:
        return _CONTOUR_CACHE[key]
    ts = np.arange(0.0, 1500.0 + 1e-9, 0.5)
    vals, _ = weight.mellin_W0_many(-4.0 + 1j * ts)
    mags = np.abs(vals)
    # symmetric in t (real weight): integrate both sides
    i0 = 2.0 * float(np.trapezoid(mags, ts))
    i1 = 2.0 * float(np.trapezoid(mags * np.log1p(ts), ts))
    _CONTOUR_CACHE[key] = (i0, i1)
    return i0, i1


def _zero_density(u: float) -> float:
    """Unit-height zero count bound log(u / 2 pi) / (2 pi) + 1 (0 below 14)."""
    if u < 14.0:
        return 0.0
    return math.log(u / _TWO_PI) / _TWO_PI + 1.0


@dataclass
class ResidualReport:
    """Numerical explicit-formula identity check at one zero and scale."""

    index: int
    rho0: complex
    u: float
    window: float
    prime_side: complex
    main_term: complex
    window_sum: complex
    trivial_term: complex
    residual: float
    tail_bound: float
    parts: dict

    @property
    def ok(self) -> bool:
        return self.residual <= self.tail_bound


def explicit_formula_residual(zs: ZeroSet, idx: int, u: float,
                              tables: ArithTables, weight: BumpWeight,
                              params: ScaleParams) -> ResidualReport:
    """Check S_U(rho0) = main - window zero sum - trivial term + small.

    The tail bound is fully explicit: computed |W0| values (plus quadrature
    errors) for every table zero and conjugate outside the window, a
    zero-density integral beyond the table's complete range, and the shifted
    contour bound at Re s = -4 (the first trivial zero's term is computed
    exactly, not bounded).
    """
    if u <= 1.0:
        raise ValueError("u must exceed 1")
    window = float(params.window)
    b0 = float(zs.beta[idx])
    g0 = float(zs.gamma[idx])
    # clamp the window to what the table can certify; zeros pushed outside
    # the window move into the computed known-zero tail bound, so the check
    # stays valid (just weaker) near the table's top
    if zs.complete_range is not None and math.isfinite(zs.complete_range[1]):
        window = min(window, zs.complete_range[1] - g0)
        if window <= 0.0:
            raise ValueError(
                f"zero {idx} sits at/above the table's complete range top")
    rho0 = complex(b0, g0)
    log_u = math.log(u)

    prime_side = prime_sum_S(rho0, u, tables, weight)
    main_eval = weight.mellin_W0(1.0 - rho0)
    main = cmath.exp((1.0 - rho0) * log_u) * main_eval.value
    zsum, zsum_err, zcount = _window_zero_sum(zs, idx, u, window, weight)
    # first trivial zero at -2: term U^{-2-rho0} W0(-2-rho0)
    triv_eval = weight.mellin_W0(-2.0 - rho0)
    trivial = cmath.exp((-2.0 - rho0) * log_u) * triv_eval.value

    residual = abs(prime_side - (main - zsum - trivial))

    # --- tail: table zeros (and conjugates) outside the window -------------
    out_direct = np.abs(zs.gamma - g0) > window
    out_conj = np.abs(-zs.gamma - g0) > window
    dz = np.concatenate([
        (zs.beta[out_direct] - b0) + 1j * (zs.gamma[out_direct] - g0),
        (zs.beta[out_conj] - b0) + 1j * (-zs.gamma[out_conj] - g0),
    ])
    if dz.size:
        w_vals, w_errs = weight.mellin_W0_many(dz)
        known_tail = float(np.sum((np.abs(w_vals) + w_errs)
                                  * np.exp(dz.real * log_u)))
    else:
        known_tail = 0.0

    # --- density integral beyond the complete range ------------------------
    if zs.complete_range is None or not math.isfinite(zs.complete_range[1]):
        density_tail = 0.0
    else:
        top = zs.complete_range[1]
        us = np.arange(top, top + 2500.0, 0.5)
        from .weights import decay_envelope

        env = np.array([decay_envelope(1j * (v - g0)) + decay_envelope(1j * (v + g0))
                        for v in us])
        dens = np.array([_zero_density(v) for v in us])
        integrand = env * dens
        density_tail = float(np.trapezoid(integrand, us)) * u ** (1.0 - b0)
        density_tail += float(integrand[-1]) * 1e3  # far-tail slack
    # --- shifted contour at Re s = -4 --------------------------------------
    i0, i1 = _contour_integrals(weight)
    contour_tail = (u ** -4.0) * (
        i0 * (_CONTOUR_CONST + math.log(4.5 + g0)) + i1) / _TWO_PI

    quad_err = (zsum_err + main_eval.estimated_error * u ** (1.0 - b0)
                + triv_eval.estimated_error * u ** (-2.0 - b0))
    tail = known_tail + density_tail + contour_tail + quad_err

    return ResidualReport(
        index=idx, rho0=rho0, u=float(u), window=window,
        prime_side=prime_side, main_term=main, window_sum=zsum,
        trivial_term=trivial, residual=residual, tail_bound=tail,
        parts={
            "known_zero_tail": known_tail,
            "density_tail": density_tail,
            "contour_tail": contour_tail,
            "quadrature": quad_err,
            "window_zero_count": zcount,
        },
    )


# ---------------------------------------------------------------------------
# dyadic mollified blocks and the length dichotomy
# ---------------------------------------------------------------------------


def type1_scales(params: ScaleParams) -> list[int]:
    """Dyadic block scales N = 2^j spanning [T^{1/100}, sqrt(T) (log T)^2]."""
    t = params.t_scale
    lo = t ** params.moll_exponent
    hi = math.sqrt(t) * params.log_t**2
    j_lo = max(0, int(math.floor(math.log2(lo))))
    j_hi = int(math.floor(math.log2(hi)))
    if j_hi < j_lo:
        raise ValueError(f"empty dyadic range [{lo:.3g}, {hi:.3g}]")
    return [1 << j for j in range(j_lo, j_hi + 1)]


def d_n_poly(n_scale: int, params: ScaleParams, tables: ArithTables) -> DirichletPoly:
    """Mollified dyadic block on (N, 2N] with damping exp(-n / sqrt(T))."""
    if n_scale < 1:
        raise ValueError("n_scale must be >= 1")
    lo, hi = n_scale + 1, 2 * n_scale
    coeffs = mollified_window(lo, hi, params.moll_m, tables).astype(np.float64)
    return DirichletPoly(
        ns=np.arange(lo, hi + 1, dtype=np.int64),
        coeffs=coeffs,
        damping_scale=params.damping_scale,
        label=f"D_{n_scale}",
    )


def dirichlet_D_N(s: complex, n_scale: int, params: ScaleParams,
                  tables: ArithTables) -> complex:
    """Value of the mollified dyadic block at s."""
    return d_n_poly(n_scale, params, tables).evaluate(s)


def type1_check(rho: complex, params: ScaleParams,
                tables: ArithTables) -> DetectorOutcome:
    """Largest dyadic block magnitude at rho against tau = 1/(3 log T).

    detail["per_scale"] records every block value; detail["detecting"]
    the scales whose block alone clears the threshold.
    """
    rho = complex(rho)
    scales = type1_scales(params)
    tau = float(params.detection_threshold)
    per: list[tuple[int, complex]] = []
    for n_scale in scales:
        per.append((n_scale, dirichlet_D_N(rho, n_scale, params, tables)))
    mags = [abs(v) for _, v in per]
    i = int(np.argmax(mags))
    detecting = [n for (n, v) in per if abs(v) >= tau]
    return DetectorOutcome(
        kind="type1",
        parameter=float(per[i][0]),
        value=per[i][1],
        magnitude=mags[i],
        threshold=tau,
        passed=bool(mags[i] >= tau),
        detail={
            "per_scale": {str(n): [v.real, v.imag] for n, v in per},
            "detecting": detecting,
            "scales": scales,
        },
    )


@dataclass
class ISeriesValue:
    value: complex
    truncated_at: int
    truncation_bound: float


def i_series(z: complex, params: ScaleParams, tables: ArithTables) -> ISeriesValue:
    """I(z) = sum_n a(n) n^{-z} e^{-n/Y}, truncated once e^{-n/Y} < 1e-18.

    Y = sqrt(T). The truncation bound uses |a(n)| <= tau(n) <= n and
    sum_{n > N} n e^{-n/Y} <= (N + Y) Y e^{-N/Y} (geometric-integral bound).
    """
    z = complex(z)
    y = params.damping_scale
    n_max = int(math.ceil(42.0 * y))
    tables.require(n_max)
    coeffs = mollified_window(1, n_max, params.moll_m, tables).astype(np.float64)
    poly = DirichletPoly(
        ns=np.arange(1, n_max + 1, dtype=np.int64),
        coeffs=coeffs,
        damping_scale=y,
        label="I-series",
    )
    bound = (n_max + y) * y * math.exp(-n_max / y) * n_max ** max(0.0, -z.real)
    return ISeriesValue(value=poly.evaluate(z), truncated_at=n_max,
                        truncation_bound=bound)


@dataclass
class Type2Report:
    """Contour-horn value I(rho) - Y^{1-rho} Gamma(1-rho) M(1) and its parts."""

    rho: complex
    value: complex
    i_part: ISeriesValue
    pole_part: complex
    mollifier_at_one: complex

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def type2_value(rho: complex, params: ScaleParams,
                tables: ArithTables) -> Type2Report:
    """Type II detector: the damped mollified series minus its pole term."""
    rho = complex(rho)
    y = params.damping_scale
    m1 = mollifier_sum(1.0 + 0.0j, params.moll_m, tables)
    pole = gamma_times_power(1.0 - rho, y) * m1
    ipart = i_series(rho, params, tables)
    return Type2Report(rho=rho, value=ipart.value - pole, i_part=ipart,
                       pole_part=pole, mollifier_at_one=m1)


def dichotomy_check(rho: complex, params: ScaleParams,
                    tables: ArithTables) -> dict:
    """max(3 log T max_N |D_N(rho)|, 3 |type II value|) with components."""
    t1 = type1_check(rho, params, tables)
    t2 = type2_value(rho, params, tables)
    log_t = params.log_t
    horn1 = 3.0 * log_t * t1.magnitude
    horn2 = 3.0 * t2.magnitude
    return {
        "type1": t1,
        "type2": t2,
        "horn1": horn1,
        "horn2": horn2,
        "lower_bound": max(horn1, horn2),
        "holds": max(horn1, horn2) >= 1.0,
    }


# ---------------------------------------------------------------------------
# flexible multi-scale detector
# ---------------------------------------------------------------------------


@dataclass
class FlexibleLevel:
    """One telescoping stage: remaining scale A_i, sweep, chosen factor U_i."""

    level: int
    a_scale: float
    y_scale: float
    outcome: DetectorOutcome

    @property
    def chosen_u(self) -> float:
        return self.outcome.parameter


@dataclass
class FlexibleDetector:
    """Product of windowed prime-power factors chosen by per-level sweeps.

    ``poly`` holds the sparse integer coefficient table b(m) of
    B(s) = prod_i sum_n Lambda(n) w0(n/U_i) n^{-s}; the empty product
    (a_initial already below stop_scale) is b(1) = 1. `declared_support`
    is the desk image [A stop^{-2}, A stop] of the asymptotic support
    bound; construction verifies the exact per-run bounds too.
    """

    a_initial: float
    stop_scale: float
    levels: list[FlexibleLevel]
    poly: DirichletPoly
    a_final: float
    declared_support: tuple[float, float]
    coeff_bound_base: float

    @property
    def k(self) -> int:
        return len(self.levels) + 1

    def factors(self) -> list[float]:
        return [lv.chosen_u for lv in self.levels]

    def value_at(self, s: complex) -> complex:
        return self.poly.evaluate(s)

    def factor_values(self, s: complex, tables: ArithTables,
                      weight: BumpWeight) -> list[complex]:
        return [prime_sum_S(s, lv.chosen_u, tables, weight) for lv in self.levels]

    def coeff_bound(self, m: int) -> float:
        """(2 log m)^{k-1} (log 2T)^{k-1} for m >= 2; 1 for m = 1."""
        if self.k == 1 or m == 1:
            return 1.0
        e = self.k - 1
        return (2.0 * math.log(m)) ** e * self.coeff_bound_base**e


def _factor_table(u: float, tables: ArithTables,
                  weight: BumpWeight) -> tuple[np.ndarray, np.ndarray]:
    npp, lam_pp, _ = tables.prime_powers()
    lo = int(np.searchsorted(npp, 0.5 * u, side="left"))
    hi = int(np.searchsorted(npp, 2.0 * u, side="right"))
    ns = npp[lo:hi]
    vals = lam_pp[lo:hi] * weight.eval_w0(ns.astype(np.float64) / u)
    keep = vals != 0.0
    return ns[keep], vals[keep]


def build_flexible_detector(
    zs: ZeroSet,
    idx: int,
    a_initial: float,
    tables: ArithTables,
    weight: BumpWeight,
    params: ScaleParams,
    check_predicate: bool = True,
) -> FlexibleDetector:
    """Telescoping construction of a detector polynomial at zero idx.

    While the remaining scale A_i exceeds stop_scale: set Y_i = sqrt(A_i),
    verify the zero is Y_i-half-isolated (under the Hypothesis-F-adjusted
    left gap), sweep U over [Y_i, A_i], require the max to clear the
    threshold (else DetectorConstructionError naming the level), take the
    argmax U_i as a factor and recurse on A_{i+1} = A_i / U_i.

    Postconditions checked here: |B(rho0)| equals the product of the level
    values (an exact evaluation identity, up to float roundoff), every
    nonzero coefficient obeys |b(m)| <= (2 log m)^{k-1} (log 2T)^{k-1}, and
    the support sits inside the declared desk bounds.
    """
    if a_initial <= 1.0:
        raise ValueError("a_initial must exceed 1")
    rho0 = complex(zs.beta[idx], zs.gamma[idx])
    hf = params.hypothesis_f_adjusted(zs)
    levels: list[FlexibleLevel] = []
    a = float(a_initial)
    tau = float(params.detection_threshold)
    level = 0
    while a > params.stop_scale:
        level += 1
        y_i = math.sqrt(a)
        if check_predicate:
            chk = is_Y_half_isolated(zs, idx, y_i, hf)
            if not chk.ok:
                raise DetectorConstructionError(
                    level, f"zero {idx} not {y_i:.6g}-half-isolated "
                           f"(witnesses {chk.witnesses[:5]})")
        grid = params.u_grid(y_i, a)
        vals, mags = prime_sweep(rho0, grid, tables, weight)
        clearing = np.flatnonzero(mags >= tau)
        if clearing.size == 0:
            raise DetectorConstructionError(
                level, f"sweep max {float(mags.max()):.6g} below threshold "
                       f"{tau:.6g} on [{y_i:.6g}, {a:.6g}]")
        # canonical witness: the smallest scale that clears the threshold
        # (the existence lemma permits any; smallest maximizes telescoping
        # depth and keeps the construction deterministic)
        i = int(clearing[0])
        outcome = DetectorOutcome(
            kind="flexible-level", parameter=float(grid[i]),
            value=complex(vals[i]), magnitude=float(mags[i]), threshold=tau,
            passed=True, trace=(grid, mags),
            detail={"level": level, "a_scale": a, "y_scale": y_i,
                    "argmax_u": float(grid[int(np.argmax(mags))]),
                    "max_magnitude": float(mags.max())},
        )
        levels.append(FlexibleLevel(level=level, a_scale=a, y_scale=y_i,
                                    outcome=outcome))
        a = a / float(grid[i])
        if level > 64:
            raise DetectorConstructionError(level, "recursion failed to shrink")

    # sparse product of the factor tables
    prod: dict[int, float] = {1: 1.0}
    for lv in levels:
        ns, vals = _factor_table(lv.chosen_u, tables, weight)
        nxt: dict[int, float] = {}
        for m, bm in prod.items():
            for n, fv in zip(ns.tolist(), vals.tolist()):
                key = m * n
                nxt[key] = nxt.get(key, 0.0) + bm * fv
        prod = nxt
    ms = np.array(sorted(prod), dtype=np.int64)
    bs = np.array([prod[int(m)] for m in ms], dtype=np.float64)
    keep = bs != 0.0
    ms, bs = ms[keep], bs[keep]
    poly = DirichletPoly(ns=ms, coeffs=bs, damping_scale=None,
                         label=f"flexible-k{len(levels) + 1}")

    k = len(levels) + 1
    declared = (a_initial / params.stop_scale**2, a_initial * params.stop_scale)
    if 2.0 ** (k - 1) > params.stop_scale:
        raise DetectorConstructionError(
            level, f"depth k={k} breaks the declared support bound "
                   f"(2^{k - 1} > stop_scale)")
    base = math.log(2.0 * params.t_scale)
    det = FlexibleDetector(
        a_initial=float(a_initial), stop_scale=float(params.stop_scale),
        levels=levels, poly=poly, a_final=a, declared_support=declared,
        coeff_bound_base=base,
    )
    lo_m, hi_m = poly.support
    if levels and not (declared[0] <= lo_m and hi_m <= declared[1]):
        raise DetectorConstructionError(
            level, f"support [{lo_m}, {hi_m}] escapes declared {declared}")
    for m, b in zip(ms.tolist(), bs.tolist()):
        if abs(b) > det.coeff_bound(m) * (1.0 + 1e-12):
            raise DetectorConstructionError(
                level, f"|b({m})| = {abs(b):.6g} exceeds bound {det.coeff_bound(m):.6g}")
    # exact evaluation identity: product of level values vs polynomial value
    if levels:
        direct = det.value_at(rho0)
        prod_vals = math.prod(det.factor_values(rho0, tables, weight),
                              start=1.0 + 0.0j)
        scale = max(1.0, abs(direct))
        if abs(direct - prod_vals) > 1e-9 * scale:
            raise DetectorConstructionError(
                level, f"factorization identity violated: {direct} vs {prod_vals}")
    return det


# ---------------------------------------------------------------------------
# cluster classification
# ---------------------------------------------------------------------------


@dataclass
class ClusterLabel:
    """A/B/C/D labels plus the per-member detector evidence."""

    cluster_id: int
    size: int
    line_beta: float
    labels: list[str]
    in_window_count: int
    detected_count: int
    type2_count: int
    right_count: int
    right_threshold: float
    members: list[dict]
    typed_subset: dict | None


def classify_clusters(zs: ZeroSet, decomposition: ClusterDecomposition,
                      params: ScaleParams, tables: ArithTables) -> list[ClusterLabel]:
    """Label every cluster by the detector taxonomy.

    Type A: at least half the members pass Type II. Type B: at least half
    pass Type I and some member lies outside [T, 2T]. Type C: neither A nor
    B, and the count of strictly-right zeros within (cluster gap) * |C| of
    the cluster reaches |C| / (log T)^typec_exponent. Type D: Type I
    majority, not B, and the Type C count fails. The Type D pigeonhole
    subset collects the detected members sharing the most popular dyadic
    scale. A cluster can carry several labels (the taxonomy's cases are not
    mutually exclusive at desk scale); an empty label list means the cluster
    matched nothing.
    """
    t = params.t_scale
    out: list[ClusterLabel] = []
    for cid, cl in enumerate(decomposition.clusters):
        members: list[dict] = []
        detecting_by_scale: dict[int, list[int]] = {}
        for i in cl.indices.tolist():
            rho = complex(zs.beta[i], zs.gamma[i])
            t1 = type1_check(rho, params, tables)
            t2 = type2_value(rho, params, tables)
            t2_passed = 3.0 * t2.magnitude >= 1.0
            for n_scale in t1.detail["detecting"]:
                detecting_by_scale.setdefault(int(n_scale), []).append(i)
            members.append({
                "index": i,
                "gamma": float(zs.gamma[i]),
                "in_window": bool(t <= zs.gamma[i] <= 2.0 * t),
                "type1_passed": bool(t1.passed),
                "type1_magnitude": t1.magnitude,
                "type1_best_scale": int(t1.parameter),
                "detecting_scales": [int(n) for n in t1.detail["detecting"]],
                "type2_magnitude": t2.magnitude,
                "type2_passed": bool(t2_passed),
            })
        size = cl.size
        detected = sum(m["type1_passed"] for m in members)
        type2_count = sum(m["type2_passed"] for m in members)
        in_window = sum(m["in_window"] for m in members)
        outside = size - in_window

        # right-count: strictly-right zeros within gap * size of the cluster
        reach = float(params.cluster_gap) * size
        glo = float(zs.gamma[cl.indices].min())
        ghi = float(zs.gamma[cl.indices].max())
        zs.require_complete(max(0.0, glo - reach - params.neighborhood_radius),
                            ghi + reach + params.neighborhood_radius,
                            what="cluster classification")
        right = np.flatnonzero(zs.beta > cl.line_beta)
        if right.size:
            d2 = np.min(
                (zs.beta[right, None] - zs.beta[cl.indices][None, :]) ** 2
                + (zs.gamma[right, None] - zs.gamma[cl.indices][None, :]) ** 2,
                axis=1,
            )
            right_count = int(np.count_nonzero(d2 <= reach * reach))
        else:
            right_count = 0
        right_threshold = size / params.log_t**params.typec_exponent

        labels: list[str] = []
        if 2 * type2_count >= size:
            labels.append("A")
        type1_major = 2 * detected >= size
        if type1_major and outside > 0:
            labels.append("B")
        if "A" not in labels and "B" not in labels and right_count >= right_threshold:
            labels.append("C")
        if type1_major and outside == 0 and right_count < right_threshold:
            labels.append("D")

        typed_subset = None
        if detecting_by_scale:
            best_scale = max(detecting_by_scale,
                             key=lambda n: (len(detecting_by_scale[n]), -n))
            subset = detecting_by_scale[best_scale]
            typed_subset = {
                "n_scale": best_scale,
                "indices": subset,
                "count": len(subset),
                "pigeonhole_floor": size / params.log_t**2,
                "meets_floor": len(subset) >= size / params.log_t**2,
            }
        out.append(ClusterLabel(
            cluster_id=cid, size=size, line_beta=cl.line_beta, labels=labels,
            in_window_count=in_window, detected_count=detected,
            type2_count=type2_count, right_count=right_count,
            right_threshold=right_threshold, members=members,
            typed_subset=typed_subset,
        ))
    return out
