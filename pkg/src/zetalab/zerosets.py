"""Zero configurations on vertical lines in the critical strip.

A :class:`ZeroSet` holds points beta + i*gamma (0 < beta < 1, gamma > 0)
sorted by ordinate, optionally tagged with the finite set of vertical lines
they live on and with a *completeness range*: an ordinate interval inside
which the set is asserted to contain every zero of the underlying function.
Predicates that quantify over "all zeros near ..." refuse to run unless their
neighborhood fits inside that range.

On top of the raw sets live the structural notions the detection machinery
needs: maximal clusters (same line, consecutive ordinate gaps at most
(log T)^3), the Y-half-isolation predicate (every nearby zero either sits in
a hairline vertical corridor above, or noticeably to the left), and the
constructive walk that starts at the bottom of a cluster and repeatedly moves
to the rightmost zero visible within 2 (log T)^2, which terminates at a
half-isolated zero because each move strictly increases (beta, -gamma)
lexicographically.

Scale-dependent knobs (cluster gap, neighborhood radius, sweep ranges,
detection thresholds) are bundled in :class:`ScaleParams`; every default
that stands in for an asymptotic quantity is recorded there explicitly.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

__all__ = [
    "CompletenessError",
    "Zero",
    "ZeroSet",
    "ScaleParams",
    "UnionFind",
    "Cluster",
    "ClusterDecomposition",
    "HalfIsolationCheck",
    "HalfIsolationScan",
    "WalkResult",
    "load_zeros",
    "fixture_zeroset",
    "gen_line_config",
    "gen_vertical_ap_zeros",
    "gen_bow",
    "cluster_decompose",
    "clusters_separated",
    "is_Y_half_isolated",
    "is_half_isolated",
    "find_half_isolated_near_cluster",
]

_MAX_INFERRED_LINES = 64


class CompletenessError(ValueError):
    """A predicate needed zeros outside the set's asserted complete range."""

    def __init__(self, needed: tuple[float, float], have, what: str = ""):
        self.needed = needed
        self.have = have
        msg = (
            f"predicate{' ' + what if what else ''} needs completeness on "
            f"[{needed[0]:.6g}, {needed[1]:.6g}] but the set asserts {have}"
        )
        super().__init__(msg)


@dataclass(frozen=True)
class Zero:
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if not (0.0 < self.beta < 1.0):
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if not (self.gamma > 0.0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive and finite, got {self.gamma}")

    def as_complex(self) -> complex:
        return complex(self.beta, self.gamma)


class ZeroSet:
    """Immutable-by-convention array-of-zeros container.

    ``beta``/``gamma`` are parallel float64 arrays sorted by (gamma, beta).
    ``lines`` is the sorted array of distinct line abscissas when the set is
    line-structured (None otherwise); ``complete_range`` the asserted
    completeness interval (lo, hi) or None.
    """

    def __init__(
        self,
        beta,
        gamma,
        lines=None,
        complete_range: tuple[float, float] | None = None,
        source: str = "",
        lines_inferred: bool = False,
    ):
        beta = np.asarray(beta, dtype=np.float64)
        gamma = np.asarray(gamma, dtype=np.float64)
        if beta.shape != gamma.shape or beta.ndim != 1:
            raise ValueError("beta and gamma must be equal-length 1-d arrays")
        if beta.size and not (np.all(beta > 0.0) and np.all(beta < 1.0)):
            raise ValueError("all beta must lie in (0, 1)")
        if beta.size and not (np.all(gamma > 0.0) and np.all(np.isfinite(gamma))):
            raise ValueError("all gamma must be positive and finite")
        order = np.lexsort((beta, gamma))
        self.beta = beta[order]
        self.gamma = gamma[order]
        if lines is not None:
            lines = np.unique(np.asarray(lines, dtype=np.float64))
            missing = ~np.isin(self.beta, lines)
            if missing.any():
                raise ValueError(
                    f"{int(missing.sum())} zeros lie off the declared lines")
        self.lines = lines
        self.lines_inferred = lines_inferred
        if complete_range is not None:
            lo, hi = float(complete_range[0]), float(complete_range[1])
            if not lo < hi:
                raise ValueError(f"complete_range must be increasing, got {complete_range}")
            complete_range = (lo, hi)
        self.complete_range = complete_range
        self.source = source

    def __len__(self) -> int:
        return int(self.beta.size)

    def zero(self, idx: int) -> Zero:
        return Zero(float(self.beta[idx]), float(self.gamma[idx]))

    def as_complex(self) -> np.ndarray:
        return self.beta + 1j * self.gamma

    @property
    def c_f(self) -> float | None:
        """Minimal gap between distinct declared lines (None if < 2 lines)."""
        if self.lines is None or self.lines.size < 2:
            return None
        return float(np.diff(self.lines).min())

    def is_complete(self, lo: float, hi: float) -> bool:
        if self.complete_range is None:
            return False
        lo = max(lo, 0.0)  # zeros have positive ordinates; below 0 is vacuous
        return self.complete_range[0] <= lo and hi <= self.complete_range[1]

    def require_complete(self, lo: float, hi: float, what: str = "") -> None:
        if not self.is_complete(lo, hi):
            raise CompletenessError((lo, hi), self.complete_range, what)

    def neighbors(self, idx: int, radius: float) -> np.ndarray:
        """Indices within Euclidean distance ``radius`` of zero idx (excl. idx)."""
        b0 = self.beta[idx]
        g0 = self.gamma[idx]
        d2 = (self.beta - b0) ** 2 + (self.gamma - g0) ** 2
        out = np.flatnonzero(d2 <= radius * radius)
        return out[out != idx]

    def subset(self, mask, source: str = "", keep_complete: bool = False) -> "ZeroSet":
        """Restriction; drops the completeness claim unless told otherwise."""
        mask = np.asarray(mask)
        return ZeroSet(
            self.beta[mask],
            self.gamma[mask],
            lines=self.lines,
            complete_range=self.complete_range if keep_complete else None,
            source=source or (self.source + "/subset"),
            lines_inferred=self.lines_inferred,
        )

    def with_complete_range(self, lo: float, hi: float) -> "ZeroSet":
        return ZeroSet(self.beta, self.gamma, lines=self.lines,
                       complete_range=(lo, hi), source=self.source,
                       lines_inferred=self.lines_inferred)

    def __repr__(self) -> str:
        lines = "none" if self.lines is None else str(self.lines.size)
        return (f"ZeroSet(n={len(self)}, lines={lines}, "
                f"complete={self.complete_range}, source={self.source!r})")


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def load_zeros(path, fmt: str = "ordinates") -> ZeroSet:
    """Parse a zero table from disk.

    ``ordinates``: one positive ordinate per line (all zeros on beta = 1/2).
    ``beta_gamma``: two columns (whitespace or comma separated). Blank lines
    and '#' comments are skipped; malformed rows raise with their line
    number. Exact duplicate entries are dropped with a warning. Line
    structure is inferred when there are at most 64 distinct abscissas.
    """
    if fmt not in ("ordinates", "beta_gamma"):
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    betas: list[float] = []
    gammas: list[float] = []
    with path.open() as fh:
        for ln, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            try:
                if fmt == "ordinates":
                    if len(parts) != 1:
                        raise ValueError("expected a single ordinate")
                    betas.append(0.5)
                    gammas.append(float(parts[0]))
                else:
                    if len(parts) != 2:
                        raise ValueError("expected 'beta gamma'")
                    betas.append(float(parts[0]))
                    gammas.append(float(parts[1]))
            except ValueError as exc:
                raise ValueError(f"{path}:{ln}: {exc}") from None
    beta = np.array(betas, dtype=np.float64)
    gamma = np.array(gammas, dtype=np.float64)
    order = np.lexsort((beta, gamma))
    beta, gamma = beta[order], gamma[order]
    if beta.size:
        dup = np.zeros(beta.size, dtype=bool)
        dup[1:] = (np.diff(gamma) == 0.0) & (np.diff(beta) == 0.0)
        if dup.any():
            warnings.warn(f"{path}: dropped {int(dup.sum())} duplicate zeros",
                          stacklevel=2)
            beta, gamma = beta[~dup], gamma[~dup]
    uniq = np.unique(beta)
    inferred = uniq.size <= _MAX_INFERRED_LINES
    return ZeroSet(
        beta, gamma,
        lines=uniq if inferred else None,
        complete_range=None,
        source=str(path),
        lines_inferred=inferred,
    )


def fixture_zeroset() -> ZeroSet:
    """The packaged 100-ordinate table, complete on (0, 237)."""
    from . import zero_table

    gamma = np.array(zero_table.ORDINATES, dtype=np.float64)
    return ZeroSet(
        np.full(gamma.size, 0.5),
        gamma,
        lines=np.array([0.5]),
        complete_range=(0.0, zero_table.COMPLETE_UPPER),
        source="zeta-table-100",
    )


def gen_line_config(spec, complete: bool = True, source: str = "lines") -> ZeroSet:
    """Build a set from [(beta, [gamma, ...]), ...] pairs.

    ``complete=True`` asserts the configuration is the whole zero set
    (synthetic universes), giving complete_range (0, inf).
    """
    betas: list[float] = []
    gammas: list[float] = []
    lines: list[float] = []
    for beta, gs in spec:
        lines.append(float(beta))
        for g in gs:
            betas.append(float(beta))
            gammas.append(float(g))
    return ZeroSet(
        betas, gammas, lines=lines,
        complete_range=(0.0, math.inf) if complete else None,
        source=source,
    )


def gen_vertical_ap_zeros(beta: float, gamma_start: float, spacing: float,
                          count: int) -> ZeroSet:
    """Arithmetic progression of zeros on one line (synthetic universe)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    gamma = gamma_start + spacing * np.arange(count, dtype=np.float64)
    return ZeroSet(
        np.full(count, float(beta)), gamma,
        lines=np.array([float(beta)]),
        complete_range=(0.0, math.inf),
        source=f"vertical-ap(beta={beta}, d={spacing:.6g}, n={count})",
    )


def gen_bow(t0: float, eps: float, c: float) -> ZeroSet:
    """Bow configuration: ramp up to Re = 3/4, plateau, ramp back down.

    L = round(t0^eps) zeros indexed j = 1..L at ordinates
    t0 + c*j/log(t0) (an arithmetic progression with spacing c/log t0);
    real parts 1/2 + j/L on the lower quarter, 3/4 on the middle half, and
    the mirror image on the upper quarter (computed via min(j, L-j) so the
    two ramps share float-exact line values).
    """
    if t0 <= math.e:
        raise ValueError("t0 must exceed e")
    big_l = int(round(t0**eps))
    if not (8 <= big_l <= 1_000_000):
        raise ValueError(f"bow length L = {big_l} outside [8, 1e6]")
    j = np.arange(1, big_l + 1, dtype=np.float64)
    jj = np.minimum(j, big_l - j)
    re = np.where((j > big_l / 4.0) & (j <= 3.0 * big_l / 4.0),
                  0.75, 0.5 + jj / big_l)
    im = t0 + c * j / math.log(t0)
    return ZeroSet(
        re, im,
        lines=np.unique(re),
        complete_range=(0.0, math.inf),
        source=f"bow(t0={t0:.6g}, eps={eps}, c={c}, L={big_l})",
    )


# ---------------------------------------------------------------------------
# scale parameters
# ---------------------------------------------------------------------------


@dataclass
class ScaleParams:
    """Scale-dependent knobs; None fields get the documented defaults.

    Defaults in terms of T: cluster gap (log T)^3, neighborhood radius
    (log T)^2, walk radius 2 (log T)^2, detection threshold 1/(3 log T),
    mollifier cap 2 T^{1/100}, damping scale sqrt(T). The sweep range
    y_range falls back to [exp((loglog T)^3), exp(log T / loglog T)] when
    that interval is nonempty, else to [e^2, sqrt(T)], else to the convex
    hull of the two; ``y_range_source`` records which branch fired.

    The stand-ins for asymptotic thresholds (stop_scale for
    exp((loglog T)^4), the Type-C/RNH exponents) are explicit fields so
    every experiment records them.
    """

    t_scale: float
    cluster_gap: float | None = None
    neighborhood_radius: float | None = None
    walk_radius: float | None = None
    y_range: tuple[float, float] | None = None
    u_grid_ratio: float = 1.01
    detection_threshold: float | None = None
    c_f: float | None = None
    real_gap_factor: float = 10.0
    left_gap_cap: float | None = None
    window: float = 50.0
    stop_scale: float = 50.0
    typec_exponent: float = 2.0
    rnh_detect_exponent: float = 4.0
    rnh_halfiso_exponent: float = 5.0
    moll_exponent: float = 0.01
    y_range_source: str = field(default="explicit", init=False)

    def __post_init__(self) -> None:
        if not (self.t_scale > math.e):
            raise ValueError(f"t_scale must exceed e, got {self.t_scale}")
        if self.u_grid_ratio <= 1.0:
            raise ValueError("u_grid_ratio must exceed 1")
        if self.window <= 0.0 or self.stop_scale <= 1.0:
            raise ValueError("window must be positive and stop_scale > 1")
        log_t = math.log(self.t_scale)
        if self.cluster_gap is None:
            self.cluster_gap = log_t**3
        if self.neighborhood_radius is None:
            self.neighborhood_radius = log_t**2
        if self.walk_radius is None:
            self.walk_radius = 2.0 * log_t**2
        if self.detection_threshold is None:
            self.detection_threshold = 1.0 / (3.0 * log_t)
        if self.y_range is None:
            self.y_range, self.y_range_source = self._default_y_range(log_t)
        else:
            lo, hi = float(self.y_range[0]), float(self.y_range[1])
            if not (1.0 < lo < hi):
                raise ValueError(f"y_range must satisfy 1 < lo < hi, got {self.y_range}")
            self.y_range = (lo, hi)
            self.y_range_source = "explicit"

    @staticmethod
    def _default_y_range(log_t: float) -> tuple[tuple[float, float], str]:
        llt = math.log(log_t)
        asymptotic = None
        if llt > 0.0:
            lo, hi = math.exp(llt**3), math.exp(log_t / llt)
            if 1.0 < lo < hi:
                asymptotic = (lo, hi)
        desk = None
        lo, hi = math.exp(2.0), math.exp(0.5 * log_t)
        if 1.0 < lo < hi:
            desk = (lo, hi)
        if asymptotic is not None:
            return asymptotic, "asymptotic"
        if desk is not None:
            return desk, "desk"
        if llt > 0.0:
            lo = min(math.exp(llt**3), math.exp(2.0))
            hi = max(math.exp(log_t / llt), math.exp(0.5 * log_t))
            if 1.0 < lo < hi:
                return (lo, hi), "hull"
        raise ValueError(f"no valid sweep range for t_scale with log T = {log_t}")

    # -- derived scalars ------------------------------------------------------

    @property
    def log_t(self) -> float:
        return math.log(self.t_scale)

    @property
    def moll_m(self) -> float:
        """Mollifier cap 2 T^{moll_exponent} (default exponent 1/100)."""
        return 2.0 * self.t_scale**self.moll_exponent

    @property
    def damping_scale(self) -> float:
        """Smoothing scale sqrt(T) for the long detector series."""
        return math.sqrt(self.t_scale)

    def real_gap(self, y: float) -> float:
        """Corridor half-width 1/(10 log Y) of the half-isolation predicate."""
        return 1.0 / (self.real_gap_factor * math.log(y))

    def left_gap(self, y: float, gamma0: float) -> float:
        """Left step (loglog gamma0)^2 / log Y, optionally capped.

        The cap is the Hypothesis-F adjustment: at desk scale the raw value
        exceeds any realistic line spacing, which would make the left branch
        of the predicate unsatisfiable.
        """
        raw = math.log(math.log(gamma0)) ** 2 / math.log(y)
        if self.left_gap_cap is not None:
            return min(raw, self.left_gap_cap)
        return raw

    def u_grid(self, lo: float, hi: float) -> np.ndarray:
        """Geometric grid from lo to hi at ratio u_grid_ratio (ends included)."""
        if not (0.0 < lo <= hi):
            raise ValueError(f"invalid grid range [{lo}, {hi}]")
        n = int(math.floor(math.log(hi / lo) / math.log(self.u_grid_ratio))) + 1
        grid = lo * self.u_grid_ratio ** np.arange(n, dtype=np.float64)
        if grid[-1] < hi * (1.0 - 1e-12):
            grid = np.append(grid, hi)
        return grid

    def hypothesis_f_adjusted(self, zs: ZeroSet | None = None) -> "ScaleParams":
        """Copy with the left gap capped at the line spacing c_F.

        Uses the explicit ``c_f`` field when set, else the set's own line
        spacing; returns self unchanged when neither exists.
        """
        cf = self.c_f if self.c_f is not None else (zs.c_f if zs is not None else None)
        if cf is None:
            return self
        out = replace(self, left_gap_cap=cf, c_f=cf)
        out.y_range_source = self.y_range_source
        return out

    def snapshot(self) -> dict:
        """JSON-ready record of every knob, including derived defaults."""
        return {
            "t_scale": self.t_scale,
            "log_t": self.log_t,
            "cluster_gap": self.cluster_gap,
            "neighborhood_radius": self.neighborhood_radius,
            "walk_radius": self.walk_radius,
            "y_range": list(self.y_range),
            "y_range_source": self.y_range_source,
            "u_grid_ratio": self.u_grid_ratio,
            "detection_threshold": self.detection_threshold,
            "c_f": self.c_f,
            "real_gap_factor": self.real_gap_factor,
            "left_gap_cap": self.left_gap_cap,
            "window": self.window,
            "stop_scale": self.stop_scale,
            "typec_exponent": self.typec_exponent,
            "rnh_detect_exponent": self.rnh_detect_exponent,
            "rnh_halfiso_exponent": self.rnh_halfiso_exponent,
            "moll_exponent": self.moll_exponent,
            "moll_m": self.moll_m,
            "damping_scale": self.damping_scale,
        }


# ---------------------------------------------------------------------------
# clusters
# ---------------------------------------------------------------------------


class UnionFind:
    """Path-compressing disjoint sets over 0..n-1."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, a: int) -> int:
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


@dataclass
class Cluster:
    """Maximal same-line run of zeros with consecutive gaps <= cluster_gap."""

    line_beta: float
    indices: np.ndarray  # ascending gamma

    @property
    def size(self) -> int:
        return int(self.indices.size)


@dataclass
class ClusterDecomposition:
    clusters: list[Cluster]
    assignment: np.ndarray  # zero index -> cluster id
    gap: float

    def cluster_of(self, idx: int) -> Cluster:
        return self.clusters[int(self.assignment[idx])]


def cluster_decompose(zs: ZeroSet, params: ScaleParams) -> ClusterDecomposition:
    """Partition the on-line zeros into maximal clusters.

    Two zeros on the same line join when their ordinate gap is at most
    params.cluster_gap; clusters are the transitive closure, reported in
    ascending order of their lowest ordinate.
    """
    if zs.lines is None:
        raise ValueError("cluster decomposition needs a line-structured set")
    n = len(zs)
    uf = UnionFind(n)
    gap = float(params.cluster_gap)
    for beta in zs.lines:
        idx = np.flatnonzero(zs.beta == beta)
        if idx.size < 2:
            continue
        gs = zs.gamma[idx]
        close = np.diff(gs) <= gap
        for k in np.flatnonzero(close):
            uf.union(int(idx[k]), int(idx[k + 1]))
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    clusters = [
        Cluster(line_beta=float(zs.beta[members[0]]),
                indices=np.array(sorted(members, key=lambda i: (zs.gamma[i],))))
        for members in groups.values()
    ]
    clusters.sort(key=lambda c: (zs.gamma[c.indices[0]], c.line_beta))
    assignment = np.empty(n, dtype=np.int64)
    for cid, cl in enumerate(clusters):
        assignment[cl.indices] = cid
    return ClusterDecomposition(clusters=clusters, assignment=assignment, gap=gap)


def clusters_separated(zs: ZeroSet, a: Cluster, b: Cluster,
                       params: ScaleParams) -> bool:
    """Different lines, or every cross pair of ordinates differs by >= gap."""
    if a.line_beta != b.line_beta:
        return True
    ga = zs.gamma[a.indices]
    gb = zs.gamma[b.indices]
    lo = max(ga.min(), gb.min())
    hi = min(ga.max(), gb.max())
    if lo > hi:  # disjoint ordinate ranges: check the facing gap
        return min(abs(gb.min() - ga.max()), abs(ga.min() - gb.max())) >= params.cluster_gap
    return False  # interleaved same-line clusters are never separated


# ---------------------------------------------------------------------------
# half-isolation
# ---------------------------------------------------------------------------


@dataclass
class HalfIsolationCheck:
    """One Y-half-isolation test: outcome, radius, violating neighbors."""

    ok: bool
    index: int
    y: float
    radius: float
    witnesses: list[int]
    neighbors_checked: int
    sparse_neighborhood: bool  # radius below the mean zero gap at this height


@dataclass
class HalfIsolationScan:
    """Result of scanning the Y grid for a certifying value."""

    ok: bool
    index: int
    certifying_y: float | None
    checks: int
    last: HalfIsolationCheck


def _mean_gap_at(gamma0: float) -> float:
    """Asymptotic mean zero gap 2 pi / log(gamma0 / 2 pi) at height gamma0."""
    arg = gamma0 / (2.0 * math.pi)
    if arg <= math.e:
        return 2.0 * math.pi
    return 2.0 * math.pi / math.log(arg)


def is_Y_half_isolated(zs: ZeroSet, idx: int, y: float,
                       params: ScaleParams) -> HalfIsolationCheck:
    """Test the Y-half-isolation predicate at one zero.

    Every other zero within Euclidean distance (log gamma0)^2 must either
    (a) sit in the vertical corridor |beta' - beta0| <= 1/(10 log Y) at or
    above gamma0, or (b) lie left by at least the left step
    (loglog gamma0)^2 / log Y (possibly capped, see ScaleParams.left_gap).

    Requires completeness on the neighborhood (radius inflated to at least
    the params neighborhood radius). Conjugate zeros are not modeled: at any
    height where the radius is below gamma0 they cannot enter the
    neighborhood anyway.
    """
    if y <= 1.0:
        raise ValueError(f"y must exceed 1, got {y}")
    b0 = float(zs.beta[idx])
    g0 = float(zs.gamma[idx])
    radius = math.log(g0) ** 2
    need = max(radius, float(params.neighborhood_radius))
    zs.require_complete(g0 - need, g0 + need, what="Y-half-isolated")
    nb = zs.neighbors(idx, radius)
    rg = params.real_gap(y)
    lg = params.left_gap(y, g0)
    bb = zs.beta[nb]
    gg = zs.gamma[nb]
    corridor = (np.abs(bb - b0) <= rg) & (gg >= g0)
    left = bb <= b0 - lg
    bad = nb[~(corridor | left)]
    return HalfIsolationCheck(
        ok=bad.size == 0,
        index=idx,
        y=float(y),
        radius=radius,
        witnesses=[int(i) for i in bad],
        neighbors_checked=int(nb.size),
        sparse_neighborhood=radius < _mean_gap_at(g0),
    )


def is_half_isolated(zs: ZeroSet, idx: int, params: ScaleParams) -> HalfIsolationScan:
    """Scan the geometric Y grid over params.y_range for a certifying Y."""
    ylo, yhi = params.y_range
    grid = params.u_grid(ylo, yhi)
    last = None
    for k, y in enumerate(grid):
        chk = is_Y_half_isolated(zs, idx, float(y), params)
        last = chk
        if chk.ok:
            return HalfIsolationScan(ok=True, index=idx, certifying_y=float(y),
                                     checks=k + 1, last=chk)
    return HalfIsolationScan(ok=False, index=idx, certifying_y=None,
                             checks=len(grid), last=last)


@dataclass
class WalkResult:
    """Outcome of the constructive walk from the bottom of a cluster."""

    index: int | None
    zero: Zero | None
    path: list[int]
    exhausted: bool
    verification: HalfIsolationScan | None


def find_half_isolated_near_cluster(zs: ZeroSet, cluster: Cluster,
                                    params: ScaleParams) -> WalkResult:
    """Walk from the cluster's lowest zero to a half-isolated zero.

    At the current zero, the visible set is every zero within the walk
    radius 2 (log T)^2 that is strictly right, or on the same line strictly
    below. If it is empty the walk stops and the current zero is verified
    half-isolated under Hypothesis-F-adjusted parameters; otherwise the walk
    moves to the visible zero of maximal beta (ties: lowest gamma). Each
    move strictly increases (beta, -gamma) lexicographically, so the walk
    never revisits a zero and the step cap len(zs) can only be hit on
    pathological inputs, reported as exhaustion rather than raised.
    """
    if cluster.size == 0:
        raise ValueError("cluster is empty")
    glo = float(zs.gamma[cluster.indices].min())
    ghi = float(zs.gamma[cluster.indices].max())
    inflate = float(params.cluster_gap) * cluster.size + float(params.neighborhood_radius)
    zs.require_complete(glo - inflate, ghi + inflate, what="constructive walk")
    wr = float(params.walk_radius)
    j = int(cluster.indices[0])
    path = [j]
    hf = params.hypothesis_f_adjusted(zs)
    for _ in range(len(zs)):
        bj = zs.beta[j]
        gj = zs.gamma[j]
        d2 = (zs.beta - bj) ** 2 + (zs.gamma - gj) ** 2
        visible = (d2 > 0.0) & (d2 <= wr * wr) & (
            (zs.beta > bj) | ((zs.beta == bj) & (zs.gamma < gj))
        )
        cand = np.flatnonzero(visible)
        if cand.size == 0:
            scan = is_half_isolated(zs, j, hf)
            return WalkResult(index=j, zero=zs.zero(j), path=path,
                              exhausted=False, verification=scan)
        order = np.lexsort((zs.gamma[cand], -zs.beta[cand]))
        j = int(cand[order[0]])
        path.append(j)
    return WalkResult(index=None, zero=None, path=path, exhausted=True,
                      verification=None)
