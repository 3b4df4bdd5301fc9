"""Smooth dyadic bump weight and its Mellin transform.

Construction: h(x) = exp(-1/(x(1-x))) on (0,1), zero outside; C is its mass;
H(y) = (1/C) * integral of h up to y is a smoothed step; the window weight is

    w0(x) = H(2x - 1) - H(x - 1),

supported on [1/2, 2] with w0(1) = 1, and the dilates w0(x / 2^m) form a
partition of unity over x >= 1 (the sum telescopes in H). The Mellin transform
W0(s) = integral over [1/2, 2] of w0(x) x^{s-1} dx decays like
exp(-sqrt(|Im s| / 2)) up to a bounded factor in vertical strips, which is what
makes the weight usable inside contour-shifted prime sums.

H is tabulated once on a uniform grid and evaluated through a cubic-spline
kernel; h and its derivatives come from the closed-form rational recurrence
h^(k) = R_k * h (symbolically generated, then compiled to numpy lambdas).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from . import _kernels

__all__ = [
    "BumpWeight",
    "MellinEvaluation",
    "make_bump_weight",
    "bump_h",
    "bump_h_derivative",
    "reference_envelope",
    "decay_envelope",
    "K_CAL",
    "ENVELOPE_A",
    "ENVELOPE_B",
    "ENVELOPE_FLOOR",
    "ENVELOPE_SPLIT",
]

# Underflow guard: exp(-1/(x(1-x))) is exactly 0.0 in float64 once
# 1/(x(1-x)) > 745.1; cutting at x(1-x) <= 1/745 only drops subnormals
# below 1e-320.
_H_CUT = 1.0 / 745.0

_MAX_DERIV_ORDER = 12

# Calibration constants, frozen from tools/calibrate_weights.py. K_CAL
# bounds |W0(sigma+it)| * 2^{-|sigma|} * exp(sqrt(|t|/2)) on |sigma| <= 1
# (measured max 1.906 at t = 3.5). The tail piece A * exp(-B sqrt|t|) + FLOOR
# kicks in above ENVELOPE_SPLIT and majorizes both the transform and its
# quadrature noise floor out to |t| = 2000 (validated margin ~5%); the far
# tail bounds use the min of the two shapes.
K_CAL = 2.0
ENVELOPE_A = 4.0
ENVELOPE_B = 1.25
ENVELOPE_FLOOR = 3e-14
ENVELOPE_SPLIT = 36.0


def bump_h(y) -> np.ndarray:
    """h(y) = exp(-1/(y(1-y))) on (0,1), exactly zero elsewhere."""
    y = np.asarray(y, dtype=np.float64)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.zeros_like(y)
    prod = y * (1.0 - y)
    mask = prod > _H_CUT
    if np.any(mask):
        out[mask] = np.exp(-1.0 / prod[mask])
    return out[0] if scalar else out


@lru_cache(maxsize=1)
def _h_rationals():
    """Lambdified rational prefactors R_k with h^(k) = R_k * h, k = 0..12."""
    import sympy as sp

    x = sp.symbols("x")
    gp = sp.cancel(sp.diff(-1 / (x * (1 - x)), x))
    rs = [sp.Integer(1)]
    for _ in range(_MAX_DERIV_ORDER):
        rs.append(sp.cancel(sp.diff(rs[-1], x) + rs[-1] * gp))
    return [sp.lambdify(x, r, modules="numpy") for r in rs]


def bump_h_derivative(y, k: int) -> np.ndarray:
    """k-th derivative of h, via the rational recurrence. 0 <= k <= 12."""
    if not (0 <= k <= _MAX_DERIV_ORDER):
        raise ValueError(f"derivative order must be in [0, {_MAX_DERIV_ORDER}]")
    y = np.asarray(y, dtype=np.float64)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    hv = bump_h(y)
    if k == 0:
        return hv[0] if scalar else hv
    out = np.zeros_like(y)
    mask = hv != 0.0
    if np.any(mask):
        fn = _h_rationals()[k]
        rv = np.asarray(fn(y[mask]), dtype=np.float64)
        if rv.shape != y[mask].shape:
            rv = np.full(y[mask].shape, float(rv))
        out[mask] = rv * hv[mask]
    return out[0] if scalar else out


@dataclass
class MellinEvaluation:
    """One Mellin-transform evaluation with its quadrature error estimate."""

    s: complex
    value: complex
    estimated_error: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.estimated_error <= self.tolerance


@dataclass
class BumpWeight:
    """Tabulated bump weight: normalization, spline CDF, Mellin evaluator."""

    normalization: float
    quadrature_tolerance: float
    knots: int
    step: float = field(repr=False)
    _a0: np.ndarray = field(repr=False)
    _a1: np.ndarray = field(repr=False)
    _a2: np.ndarray = field(repr=False)
    _a3: np.ndarray = field(repr=False)
    _gl_nodes: np.ndarray = field(repr=False)
    _gl_weights: np.ndarray = field(repr=False)

    # -- pointwise evaluation ------------------------------------------------

    def eval_H(self, y):
        """Smoothed step H (0 below 0, 1 above 1)."""
        y = np.asarray(y, dtype=np.float64)
        scalar = y.ndim == 0
        out = _kernels.spline_cdf_eval(
            np.atleast_1d(y), self.step, self._a0, self._a1, self._a2, self._a3
        )
        return float(out[0]) if scalar else out

    def eval_w0(self, x):
        """w0(x) = H(2x-1) - H(x-1); support [1/2, 2], w0(1) = 1."""
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        out = _kernels.w0_eval(
            np.atleast_1d(x), self.step, self._a0, self._a1, self._a2, self._a3
        )
        return float(out[0]) if scalar else out

    def eval_w0_derivative(self, x, j: int):
        """j-th derivative of w0 from the closed-form h recurrence.

        For j >= 1 this is (2^j h^(j-1)(2x-1) - h^(j-1)(x-1)) / C on the
        respective halves of the support (the ideal weight, not the spline).
        """
        if not (0 <= j <= _MAX_DERIV_ORDER):
            raise ValueError(f"derivative order must be in [0, {_MAX_DERIV_ORDER}]")
        if j == 0:
            return self.eval_w0(x)
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        left = (x > 0.5) & (x < 1.0)
        right = (x > 1.0) & (x < 2.0)
        c = self.normalization
        if np.any(left):
            out[left] = (2.0**j) * bump_h_derivative(2.0 * x[left] - 1.0, j - 1) / c
        if np.any(right):
            out[right] = -bump_h_derivative(x[right] - 1.0, j - 1) / c
        return float(out[0]) if scalar else out

    def partition_check(self, x):
        """Deviation sum_m w0(x / 2^m) - 1 for x >= 1 (elementwise)."""
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if np.any(x < 1.0):
            raise ValueError("partition identity holds for x >= 1 only")
        m_max = int(np.floor(np.log2(x.max()))) + 1
        total = np.zeros_like(x)
        for m in range(m_max + 1):
            total += self.eval_w0(x / (2.0**m))
        out = total - 1.0
        return float(out[0]) if scalar else out

    # -- Mellin transform ----------------------------------------------------

    def _mellin_panel_values(self, ss: np.ndarray, panels: int) -> np.ndarray:
        """Quadrature of w0(e^v) e^{v s} dv over [-log 2, log 2], GL16 panels."""
        edges = np.linspace(-math.log(2.0), math.log(2.0), panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        v = (mids[:, None] + half * self._gl_nodes[None, :]).ravel()
        wq = np.broadcast_to(half * self._gl_weights[None, :], (panels, 16)).ravel()
        f = self.eval_w0(np.exp(v)) * wq
        out = np.empty(ss.size, dtype=np.complex128)
        block = max(1, (1 << 21) // max(1, v.size))
        for lo in range(0, ss.size, block):
            hi = min(ss.size, lo + block)
            ev = np.exp(np.multiply.outer(v, ss[lo:hi]))
            out[lo:hi] = f @ ev
        return out

    def mellin_W0_many(self, ss) -> tuple[np.ndarray, np.ndarray]:
        """Batched W0 over an array of complex s; returns (values, error estimates).

        Panel count scales with the largest |Im s| in the batch; the error
        estimate is the difference against a doubled-panel pass.
        """
        ss = np.atleast_1d(np.asarray(ss, dtype=np.complex128))
        if ss.size == 0:
            return np.empty(0, np.complex128), np.empty(0, np.float64)
        tmax = float(np.abs(ss.imag).max())
        panels = max(8, int(math.ceil(0.25 * tmax)))
        coarse = self._mellin_panel_values(ss, panels)
        fine = self._mellin_panel_values(ss, 2 * panels)
        return fine, np.abs(fine - coarse)

    def mellin_W0(self, s: complex) -> MellinEvaluation:
        """W0(s) for a single s with |Re s| <= 4."""
        s = complex(s)
        if abs(s.real) > 4.0:
            raise ValueError(f"Re s must lie in [-4, 4], got {s.real}")
        vals, errs = self.mellin_W0_many(np.array([s]))
        return MellinEvaluation(
            s=s,
            value=complex(vals[0]),
            estimated_error=float(errs[0]),
            tolerance=self.quadrature_tolerance,
        )

    def mellin_transform(self, fn, lo: float, hi: float, s: complex, panels: int = 64) -> complex:
        """Generic test hook: integral of fn(x) x^{s-1} over [lo, hi] in log x."""
        if not (0.0 < lo < hi):
            raise ValueError("need 0 < lo < hi")
        edges = np.linspace(math.log(lo), math.log(hi), panels + 1)
        half = 0.5 * (edges[1] - edges[0])
        mids = 0.5 * (edges[:-1] + edges[1:])
        v = (mids[:, None] + half * self._gl_nodes[None, :]).ravel()
        wq = np.broadcast_to(half * self._gl_weights[None, :], (panels, 16)).ravel()
        x = np.exp(v)
        vals = np.asarray(fn(x), dtype=np.complex128) * wq * np.exp(v * s)
        return complex(vals.sum())

    # -- spline internals exposed for the hot kernels ------------------------

    def spline_arrays(self) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.step, self._a0, self._a1, self._a2, self._a3


def make_bump_weight(tolerance: float = 1e-10, knots: int = 4096) -> BumpWeight:
    """Build the tabulated weight: quadrature mass, spline CDF, GL nodes.

    The normalization used throughout is the spline's own mass (so H(1) = 1
    exactly); it is checked against adaptive quadrature at build time.
    """
    if knots < 64:
        raise ValueError("need at least 64 knots")
    xs = np.linspace(0.0, 1.0, knots)
    hv = bump_h(xs)
    hs = CubicSpline(xs, hv, bc_type="natural")
    seg = np.diff(hs.antiderivative()(xs))
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    c_spline = float(cum[-1])
    c_quad, c_err = quad(lambda u: math.exp(-1.0 / (u * (1.0 - u))), 0.0, 1.0,
                         epsabs=1e-15, epsrel=1e-13, limit=200)
    if abs(c_spline - c_quad) > 1e-11 + 10.0 * c_err:
        raise RuntimeError(
            f"spline mass {c_spline!r} disagrees with quadrature {c_quad!r}"
        )
    cdf = CubicSpline(xs, cum / c_spline, bc_type="natural")
    a3, a2, a1, a0 = (np.ascontiguousarray(cdf.c[k]) for k in range(4))
    nodes, wts = np.polynomial.legendre.leggauss(16)
    return BumpWeight(
        normalization=c_spline,
        quadrature_tolerance=tolerance,
        knots=knots,
        step=float(xs[1] - xs[0]),
        _a0=a0,
        _a1=a1,
        _a2=a2,
        _a3=a3,
        _gl_nodes=nodes,
        _gl_weights=wts,
    )


def reference_envelope(s: complex) -> float:
    """Reference decay shape 2^{|Re s|} exp(-sqrt(|Im s| / 2))."""
    s = complex(s)
    return 2.0 ** abs(s.real) * math.exp(-math.sqrt(abs(s.imag) / 2.0))


def decay_envelope(s: complex) -> float:
    """Frozen majorant of |W0(s)| on |Re s| <= 1 (used by far-tail bounds).

    Piecewise: the reference shape K_CAL * 2^{|sigma|} exp(-sqrt(t/2)) below
    ENVELOPE_SPLIT, the min of that and the calibrated tail piece above.
    """
    s = complex(s)
    t = abs(s.imag)
    side = 2.0 ** abs(s.real)
    ref = K_CAL * math.exp(-math.sqrt(t / 2.0))
    if t < ENVELOPE_SPLIT:
        return side * ref
    tail = ENVELOPE_A * math.exp(-ENVELOPE_B * math.sqrt(t)) + ENVELOPE_FLOOR
    return side * min(ref, tail)
