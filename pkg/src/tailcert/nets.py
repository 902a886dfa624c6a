"""Construction and verification of eps-nets of spheres, balls and products.

Distances are Euclidean in ambient coordinates (chord distance on spheres).
GreedyPacking grows a maximal eps-separated set by rejection: a proposal
joins iff it is at distance >= eps from every current point, so the limit
object is maximal, hence an eps-net, and every eps-separated subset of the
sphere or ball obeys the volumetric cardinality bound (1 + 2R/eps)^d.

Under the default stopping rule a build simply runs until the run of
consecutive rejections reaches streak_factor * |net|.  Builds with a
coverage target instead run in two phases sharing the same accept test:

  bulk    batched uniform proposals until an incrementally maintained probe
          panel reports a coarse covering radius;
  polish  large panels of fresh uniform probes; every probe farther than eps
          from the net is an admissible proposal and joins (subject to the
          usual sequential checks), after which every panel point lies
          within eps of the net.

Probes are uniform draws, so polish admissions follow exactly the
distribution of greedy-accepted proposals; only the order of proposals
changes.  Large sphere instances (estimated packing beyond ~2*10^4 points)
additionally stratify the bulk phase over the caps of a coarse center net so
each accept test scans a cell-local blocker list instead of the whole net;
the cell index also accelerates verification, with distances re-scanned
exactly against the full net wherever the local answer could be off.

Construction is sequential per net; verification chunks through BLAS.
Completed nets are immutable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as kernels
from .errors import (
    BadSpecError,
    BudgetExceededError,
    EpsilonOutOfRangeError,
)
from .samplers import substream
from .util import digest, encode_float

PLAIN_BATCH = 2048
CELL_BATCH = 256
STRATIFIED_MIN_POINTS = 20000
CENTER_TARGET = 4500
BULK_COVERAGE_FACTOR = 1.25  # coarse target of the bulk phase
BULK_PROBES = 16384


# ---------------------------------------------------------------------------
# metric space specs


@dataclass(frozen=True)
class SphereSpec:
    """Unit sphere S^(d-1) in R^d with chord distance."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise BadSpecError("sphere dimension must be >= 1")

    @property
    def ambient_dim(self):
        return self.d

    @property
    def diameter(self):
        return 2.0

    def sample_uniform(self, count, rng):
        if self.d == 1:
            return (rng.integers(0, 2, count).astype(float) * 2.0 - 1.0)[:, None]
        x = rng.standard_normal((count, self.d))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        return x

    def contains(self, points, tol=1e-12):
        return np.abs(np.linalg.norm(points, axis=1) - 1.0) <= tol

    def to_obj(self):
        return {"kind": "sphere", "d": self.d}


@dataclass(frozen=True)
class BallSpec:
    """Closed ball of the given radius in R^d."""

    d: int
    radius: float = 1.0

    def __post_init__(self):
        if self.d < 1 or self.radius <= 0:
            raise BadSpecError("need d >= 1 and radius > 0")

    @property
    def ambient_dim(self):
        return self.d

    @property
    def diameter(self):
        return 2.0 * self.radius

    def sample_uniform(self, count, rng):
        x = rng.standard_normal((count, self.d))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        r = self.radius * rng.random(count) ** (1.0 / self.d)
        return x * r[:, None]

    def contains(self, points, tol=1e-12):
        return np.linalg.norm(points, axis=1) <= self.radius * (1 + tol)

    def to_obj(self):
        return {"kind": "ball", "d": self.d, "radius": self.radius}


@dataclass(frozen=True)
class ProductSpec:
    """Cartesian product with the Euclidean product metric (concatenated
    coordinates)."""

    components: tuple

    def __post_init__(self):
        if not self.components:
            raise BadSpecError("product of zero spaces")

    @property
    def ambient_dim(self):
        return sum(c.ambient_dim for c in self.components)

    @property
    def diameter(self):
        return math.sqrt(sum(c.diameter ** 2 for c in self.components))

    def sample_uniform(self, count, rng):
        return np.hstack([c.sample_uniform(count, rng) for c in self.components])

    def contains(self, points, tol=1e-12):
        ok = np.ones(len(points), dtype=bool)
        off = 0
        for c in self.components:
            w = c.ambient_dim
            ok &= c.contains(points[:, off:off + w], tol)
            off += w
        return ok

    def to_obj(self):
        return {"kind": "product", "components": [c.to_obj() for c in self.components]}


def space_from_obj(obj):
    kind = obj["kind"]
    if kind == "sphere":
        return SphereSpec(int(obj["d"]))
    if kind == "ball":
        return BallSpec(int(obj["d"]), float(obj["radius"]))
    if kind == "product":
        return ProductSpec(tuple(space_from_obj(c) for c in obj["components"]))
    raise BadSpecError(f"unknown space kind {kind!r}")


def volumetric_bound(space, epsilon: float) -> float:
    """Packing bound for eps-separated subsets: (1 + 2R/eps)^d with R = 1 for
    spheres and the radius for balls; products multiply."""
    if isinstance(space, SphereSpec):
        return (1.0 + 2.0 / epsilon) ** space.d
    if isinstance(space, BallSpec):
        return (1.0 + 2.0 * space.radius / epsilon) ** space.d
    if isinstance(space, ProductSpec):
        out = 1.0
        for c in space.components:
            out *= volumetric_bound(c, epsilon)
        return out
    raise BadSpecError("no cardinality bound for this space")


def cap_fraction(d: int, chord: float) -> float:
    """Fraction of S^(d-1) within chord distance `chord` of a point."""
    if d == 1:
        return 0.5 if chord < 2.0 else 1.0
    phi = 2.0 * math.asin(min(chord, 2.0) / 2.0)
    thetas = np.linspace(0.0, math.pi, 4096)
    dens = np.sin(thetas) ** (d - 2)
    total = np.trapezoid(dens, thetas)
    upto = np.trapezoid(dens[thetas <= phi], thetas[thetas <= phi])
    return float(upto / total)


def estimated_packing(space, epsilon: float) -> float:
    if isinstance(space, SphereSpec):
        if space.d == 1:
            return 2.0
        return 5.0 / max(cap_fraction(space.d, epsilon), 1e-300)
    return min(volumetric_bound(space, epsilon), 1e18)


# ---------------------------------------------------------------------------
# records


@dataclass(frozen=True)
class CoverageReport:
    probe_count: int
    max_probe_distance: float
    probe_seed: int
    tolerance: float
    passed: bool

    def to_obj(self):
        return {
            "probe_count": self.probe_count,
            "max_probe_distance": encode_float(self.max_probe_distance),
            "probe_seed": self.probe_seed,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class Net:
    space: object
    epsilon: float
    points: np.ndarray
    strategy: str
    seed: int
    verification: CoverageReport | None = None
    meta: tuple = ()
    accel: object = field(default=None, compare=False, repr=False)

    @property
    def cardinality(self):
        return len(self.points)

    def with_verification(self, report: CoverageReport) -> "Net":
        return replace(self, verification=report)

    def header(self) -> dict:
        return {
            "space": self.space.to_obj(),
            "epsilon": self.epsilon,
            "seed": self.seed,
            "strategy": self.strategy,
            "cardinality": self.cardinality,
            "digest": self.digest(),
        }

    def digest(self) -> str:
        return digest({
            "space": self.space.to_obj(),
            "epsilon": self.epsilon,
            "seed": self.seed,
            "strategy": self.strategy,
            "points": [[repr(float(x)) for x in row] for row in self.points],
        })

    def to_table_text(self) -> str:
        """Flat coordinate table with a JSON header line per field; the
        coverage report rides along embedded."""
        import json as _json

        lines = [f"# space: {_json.dumps(self.space.to_obj())}",
                 f"# epsilon: {self.epsilon!r}",
                 f"# seed: {self.seed}",
                 f"# strategy: {self.strategy}",
                 f"# digest: {self.digest()}"]
        if self.verification is not None:
            lines.append(f"# coverage: {_json.dumps(self.verification.to_obj())}")
        for row in self.points:
            lines.append(" ".join(repr(float(x)) for x in row))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# distance plumbing


def _min_sqdist_blas(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
    return kernels.py_fallback.min_sqdist(points, queries)


class _Grow:
    """Append-only float64 row buffer with doubling growth."""

    def __init__(self, dim, cap=4096):
        self.arr = np.empty((cap, dim))
        self.n = 0

    def extend(self, rows: np.ndarray):
        k = len(rows)
        while self.n + k > len(self.arr):
            bigger = np.empty((2 * len(self.arr), self.arr.shape[1]))
            bigger[:self.n] = self.arr[:self.n]
            self.arr = bigger
        self.arr[self.n:self.n + k] = rows
        self.n += k

    def view(self):
        return self.arr[:self.n]


class _IntVec:
    def __init__(self, cap=64):
        self.arr = np.empty(cap, dtype=np.int64)
        self.n = 0

    def extend(self, vals):
        k = len(vals)
        while self.n + k > len(self.arr):
            bigger = np.empty(2 * len(self.arr), dtype=np.int64)
            bigger[:self.n] = self.arr[:self.n]
            self.arr = bigger
        self.arr[self.n:self.n + k] = vals
        self.n += k

    def view(self):
        return self.arr[:self.n]


class _CellIndex:
    """Nearest-neighbour acceleration for stratified sphere nets.

    Every net point within (r_cap + eps) of a cap center sits on that cell's
    blocker list, so for a query owned by its nearest center the list contains
    every net point within eps of the query: distances below eps come out
    exact, larger values are re-scanned against the full net on demand."""

    def __init__(self, centers, r_cap, epsilon):
        self.centers = centers
        self.r_cap = r_cap
        self.window = r_cap + epsilon
        self.epsilon = epsilon
        self.lists = [_IntVec() for _ in range(len(centers))]
        self._window_dot = 1.0 - self.window * self.window / 2.0

    def register(self, new_pts: np.ndarray, start_row: int):
        dots = self.centers @ new_pts.T
        js, cols = np.nonzero(dots >= self._window_dot)
        if not len(js):
            return
        order = np.argsort(js, kind="stable")
        js_s = js[order]
        cols_s = cols[order]
        bounds = np.flatnonzero(np.diff(js_s)) + 1
        for s, e in zip(np.r_[0, bounds], np.r_[bounds, len(js_s)]):
            self.lists[js_s[s]].extend(start_row + cols_s[s:e])

    def owners(self, queries: np.ndarray):
        idx = np.empty(len(queries), dtype=np.int64)
        d2 = np.empty(len(queries))
        for i in range(0, len(queries), 16384):
            blk = queries[i:i + 16384]
            dots = blk @ self.centers.T
            best = np.argmax(dots, axis=1)
            idx[i:i + len(blk)] = best
            top = dots[np.arange(len(blk)), best]
            d2[i:i + len(blk)] = np.maximum(0.0, 2.0 - 2.0 * top)
        return idx, d2

    def min_sqdist(self, buf: np.ndarray, queries: np.ndarray,
                   exact_above: float | None = None) -> np.ndarray:
        owner, _ = self.owners(queries)
        d2 = np.full(len(queries), np.inf)
        order = np.argsort(owner, kind="stable")
        s = 0
        while s < len(order):
            j = owner[order[s]]
            e = s
            while e < len(order) and owner[order[e]] == j:
                e += 1
            idx = order[s:e]
            rows = self.lists[j].view()
            if len(rows):
                pts = buf[rows]
                d2[idx] = _min_sqdist_blas(pts, queries[idx])
            s = e
        cut = self.epsilon if exact_above is None else exact_above
        stale = d2 >= cut * cut * (1 - 1e-12)
        if stale.any():
            d2[stale] = _min_sqdist_blas(buf, queries[stale])
        return d2

    def uncovered(self, buf_grow, queries: np.ndarray, r2: float,
                  r_cap2: float) -> np.ndarray:
        """Rows of queries with no net point within squared distance r2
        (exact; far-owner queries re-checked against the full buffer)."""
        owner, owner_d2 = self.owners(queries)
        near = owner_d2 <= r_cap2
        flagged = []
        order = np.argsort(owner[near], kind="stable")
        near_idx = np.flatnonzero(near)[order]
        s = 0
        while s < len(near_idx):
            j = owner[near_idx[s]]
            e = s
            while e < len(near_idx) and owner[near_idx[e]] == j:
                e += 1
            idx = near_idx[s:e]
            covered = kernels.covered_mask_indexed(
                np.ascontiguousarray(queries[idx]), buf_grow.arr,
                self.lists[j].view(), r2)
            flagged.extend(idx[~covered])
            s = e
        far_idx = np.flatnonzero(~near)
        if len(far_idx):
            d2 = _min_sqdist_blas(buf_grow.view(), queries[far_idx])
            flagged.extend(far_idx[d2 >= r2])
        return np.asarray(sorted(int(i) for i in flagged), dtype=np.int64)


# ---------------------------------------------------------------------------
# builders


@dataclass(frozen=True)
class StopRule:
    """Stopping configuration for greedy packing.

    With coverage_probes = 0 (default) the build runs the rejection-streak
    rule: stop once the run of consecutive rejections reaches
    streak_factor * |net|.  A positive coverage_probes switches to the
    coverage-targeted two-phase build and sets the polish panel size
    (panels are at least that many probes); near-jamming streaks at scale
    are needlessly expensive when the goal is a measured covering radius.
    max_points raises BudgetExceededError when hit."""

    streak_factor: float = 1e4
    min_streak: int = 10000
    coverage_probes: int = 0
    coverage_factor: float = 1.0
    polish_depth: float = 1.0
    flag_tol: float = 0.0
    max_points: int | None = None

    def streak_cap(self, n_points: int) -> float:
        return max(self.min_streak, self.streak_factor * max(1, n_points))

    def flag_radius(self, epsilon: float) -> float:
        return max(self.polish_depth, 1.0) * epsilon


def build_net(space, epsilon: float, seed: int, strategy: str = "greedy_packing",
              stop: StopRule | None = None) -> Net:
    if not 0 < epsilon < space.diameter:
        raise EpsilonOutOfRangeError(
            f"epsilon must lie in (0, {space.diameter}), got {epsilon}"
        )
    stop = stop or StopRule()
    if strategy == "angular_lattice":
        return _angular_lattice(space, epsilon, seed)
    if strategy == "lattice_shell":
        if not (isinstance(space, SphereSpec) and space.d == 8):
            raise BadSpecError("lattice_shell nets are built on the 7-sphere")
        from .lattice8 import build_e8_shell_net

        points, meta, accel = build_e8_shell_net(epsilon)
        return Net(space, epsilon, points, "lattice_shell", seed, meta=meta,
                   accel=accel)
    if strategy != "greedy_packing":
        raise BadSpecError(f"unknown strategy {strategy!r}")
    big = (isinstance(space, SphereSpec) and space.d >= 3
           and estimated_packing(space, epsilon) > STRATIFIED_MIN_POINTS)
    builder = _greedy_stratified_sphere if big else _greedy_plain
    points, meta, accel = builder(space, epsilon, seed, stop)
    return Net(space, epsilon, points, "greedy_packing", seed, meta=meta,
               accel=accel)


class _ProbePanel:
    """Incrementally maintained distances of a fixed probe panel to the
    growing net (distances only shrink, so updates run against new points)."""

    def __init__(self, space, count, seed, key):
        rng = substream(seed, key)
        self.probes = space.sample_uniform(count, rng)
        self.best = np.full(count, np.inf)

    def update(self, new_pts):
        if len(new_pts):
            np.minimum(self.best, _min_sqdist_blas(new_pts, self.probes),
                       out=self.best)

    def max_dist(self):
        return math.sqrt(float(self.best.max()))


def _admit_new(buf, new_pts, panel, cell_index, stop):
    if stop.max_points is not None and buf.n + len(new_pts) > stop.max_points:
        raise BudgetExceededError(
            f"point cap {stop.max_points} hit before the stopping rule"
        )
    start = buf.n
    buf.extend(new_pts)
    if panel is not None:
        panel.update(new_pts)
    if cell_index is not None:
        cell_index.register(new_pts, start)


MAX_POLISH_PASSES = 48
MIN_POLISH_PASSES = 3


def _admit_flagged(buf, cands, panel, cell_index, stop, eps2):
    """Mutually thin flagged probes with the exact sequential filter (they
    are already known admissible against the net) and admit the survivors."""
    keep = kernels.greedy_filter(cands, cands[:0], eps2)
    _admit_new(buf, cands[keep], panel, cell_index, stop)
    return int(keep.sum())


def _polish_plain(space, epsilon, seed, stop, buf, panel):
    """Panels of fresh uniform probes; every probe at distance beyond the
    flag radius (polish_depth * eps >= eps, so certainly admissible) is a
    uniform proposal and joins.  Deep pockets get filled directly; the pass
    loop ends once a fresh panel carries at most flag_tol stragglers before
    any admission."""
    eps2 = epsilon * epsilon
    flag_r = stop.flag_radius(epsilon)
    r2_flag = flag_r * flag_r
    panel_size = max(16384, stop.coverage_probes)
    max_flags = int(stop.flag_tol * panel_size)
    admitted_total = 0
    for pass_idx in range(MAX_POLISH_PASSES):
        rng = substream(seed, 6, pass_idx)
        probes = space.sample_uniform(panel_size, rng)
        rows = np.arange(buf.n, dtype=np.int64)
        covered = kernels.covered_mask_indexed(probes, buf.view(), rows, r2_flag)
        flagged = np.flatnonzero(~covered)
        done = len(flagged) <= max_flags and pass_idx >= MIN_POLISH_PASSES
        if len(flagged):
            admitted_total += _admit_flagged(
                buf, np.ascontiguousarray(probes[flagged]), panel, None, stop,
                eps2)
        if done:
            return admitted_total, pass_idx + 1, "clean_panel"
    return admitted_total, MAX_POLISH_PASSES, "pass_cap"


def _polish_stratified(space, epsilon, seed, stop, buf, panel, cell_index):
    """Depth polish for large sphere nets: probes group by nearest cap center
    and an early-exit scan of the cell blocker list decides coverage at the
    flag radius; probes whose owner center sits beyond the cap radius (so
    the local list could be incomplete) fall back to exact distances."""
    eps2 = epsilon * epsilon
    flag_r = stop.flag_radius(epsilon)
    r2_flag = flag_r * flag_r
    r_cap2 = cell_index.r_cap * cell_index.r_cap * (1 + 1e-12)
    panel_size = max(16384, stop.coverage_probes)
    max_flags = int(stop.flag_tol * panel_size)
    admitted_total = 0
    for pass_idx in range(MAX_POLISH_PASSES):
        rng = substream(seed, 6, pass_idx)
        probes = space.sample_uniform(panel_size, rng)
        flagged_rows = cell_index.uncovered(buf, probes, r2_flag, r_cap2)
        done = len(flagged_rows) <= max_flags and pass_idx >= MIN_POLISH_PASSES
        if len(flagged_rows):
            cands = np.ascontiguousarray(probes[np.sort(flagged_rows)])
            admitted_total += _admit_flagged(buf, cands, panel, cell_index,
                                             stop, eps2)
        if done:
            return admitted_total, pass_idx + 1, "clean_panel"
    return admitted_total, MAX_POLISH_PASSES, "pass_cap"


def _greedy_plain(space, epsilon, seed, stop: StopRule):
    rng = substream(seed, 1)
    eps2 = epsilon * epsilon
    buf = _Grow(space.ambient_dim)
    use_coverage = stop.coverage_probes > 0
    panel = _ProbePanel(space, BULK_PROBES, seed, 3) if use_coverage else None
    bulk_target = max(stop.coverage_factor, BULK_COVERAGE_FACTOR) * epsilon
    streak = 0
    proposals = 0
    reason = "streak"
    while True:
        q = space.sample_uniform(PLAIN_BATCH, rng)
        keep = kernels.greedy_filter(q, buf.view(), eps2)
        proposals += PLAIN_BATCH
        hits = np.flatnonzero(keep)
        if len(hits):
            _admit_new(buf, q[keep], panel, None, stop)
            streak = PLAIN_BATCH - 1 - int(hits[-1])
        else:
            streak += PLAIN_BATCH
        if use_coverage and buf.n and panel.max_dist() <= bulk_target:
            reason = "coverage"
            break
        if streak >= stop.streak_cap(buf.n):
            reason = "streak"
            break
    polish_admitted = polish_passes = 0
    polish_reason = "disabled"
    if use_coverage:
        polish_admitted, polish_passes, polish_reason = _polish_plain(
            space, epsilon, seed, stop, buf, panel)
    meta = (("builder", "plain"), ("proposals", proposals),
            ("polish_admitted", polish_admitted),
            ("polish_passes", polish_passes),
            ("polish_reason", polish_reason), ("stop_reason", reason))
    return np.ascontiguousarray(buf.view().copy()), meta, None


def _cap_theta_sampler(d: int, theta_cap: float):
    """Inverse-CDF sampler of the polar angle of a uniform point in a
    spherical cap of angular radius theta_cap on S^(d-1)."""
    grid = np.linspace(0.0, theta_cap, 1024)
    dens = np.sin(grid) ** (d - 2) if d > 2 else np.ones_like(grid)
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * np.diff(grid) / 2)])
    cdf /= cdf[-1]

    def draw(u):
        return np.interp(u, cdf, grid)

    return draw


def _sample_cap(center, theta_draw, count, rng):
    d = len(center)
    theta = theta_draw(rng.random(count))
    g = rng.standard_normal((count, d))
    g -= (g @ center)[:, None] * center[None, :]
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    w = g / norms
    pts = np.cos(theta)[:, None] * center[None, :] + np.sin(theta)[:, None] * w
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts


def _greedy_stratified_sphere(space: SphereSpec, epsilon, seed, stop: StopRule):
    """Large sphere builds: stratify bulk proposals over caps of a coarse
    center net so each accept test scans a cell-local blocker list."""
    d = space.d
    eps2 = epsilon * epsilon
    for mult in (2.0, 2.5, 3.0, 4.0, 6.0, 8.0):
        eps_cell = min(mult * epsilon, 1.2)
        if estimated_packing(space, eps_cell) <= CENTER_TARGET:
            break
    centers, _, _ = _greedy_plain(
        space, eps_cell, seed * 1000003 + 101,
        StopRule(coverage_probes=8192, coverage_factor=1.0, min_streak=20000),
    )
    probe_rng = substream(seed, 4)
    cal = space.sample_uniform(8192, probe_rng)
    r_cap = math.sqrt(float(_min_sqdist_blas(centers, cal).max())) * 1.05 + 1e-9
    r_cap = min(r_cap, 1.999)
    theta_cap = 2.0 * math.asin(min(r_cap, 2.0) / 2.0)
    theta_draw = _cap_theta_sampler(d, theta_cap)

    cell_index = _CellIndex(centers, r_cap=r_cap, epsilon=epsilon)
    k_cells = len(centers)
    streaks = np.zeros(k_cells, dtype=np.int64)
    active = np.ones(k_cells, dtype=bool)
    cell_rngs = [substream(seed, 2, j) for j in range(k_cells)]
    buf = _Grow(d, cap=1 << 15)
    panel = _ProbePanel(space, BULK_PROBES, seed, 3)
    bulk_target = max(stop.coverage_factor, BULK_COVERAGE_FACTOR) * epsilon
    proposals = 0
    cell_streak_cap = 768
    reason = "saturated"

    done = False
    while not done:
        any_active = False
        for j in range(k_cells):
            if not active[j]:
                continue
            any_active = True
            q = _sample_cap(centers[j], theta_draw, CELL_BATCH, cell_rngs[j])
            proposals += CELL_BATCH
            keep = kernels.greedy_filter_indexed(
                q, buf.arr, cell_index.lists[j].view(), eps2)
            hits = np.flatnonzero(keep)
            if len(hits):
                _admit_new(buf, q[keep], panel, cell_index, stop)
                streaks[j] = CELL_BATCH - 1 - int(hits[-1])
            else:
                streaks[j] += CELL_BATCH
            if streaks[j] >= cell_streak_cap:
                active[j] = False
        if buf.n and panel.max_dist() <= bulk_target:
            reason = "coverage"
            done = True
        elif not any_active:
            reason = "saturated"
            done = True
    polish_stop = stop if stop.coverage_probes else \
        replace(stop, coverage_probes=BULK_PROBES)
    polish_admitted, polish_passes, polish_reason = _polish_stratified(
        space, epsilon, seed, polish_stop, buf, panel, cell_index)
    meta = (("builder", "stratified"), ("cells", k_cells),
            ("eps_cell", eps_cell), ("r_cap", r_cap),
            ("proposals", proposals), ("polish_admitted", polish_admitted),
            ("polish_passes", polish_passes),
            ("polish_reason", polish_reason), ("stop_reason", reason))
    return np.ascontiguousarray(buf.view().copy()), meta, cell_index


def _angular_lattice(space, epsilon, seed):
    """Deterministic lattice nets for spheres of dimension at most 3."""
    if not isinstance(space, SphereSpec) or space.d > 3:
        raise BadSpecError("angular lattice supports spheres with d <= 3 only")
    if space.d == 1:
        pts = np.array([[-1.0], [1.0]])
    elif space.d == 2:
        k = int(math.ceil(math.pi / math.asin(epsilon / 2.0)))
        ang = 2.0 * math.pi * np.arange(k) / k
        pts = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        # Fibonacci lattice, doubled until seeded probes sit within 0.98 eps
        n = max(8, int(math.ceil(9.0 / max(cap_fraction(3, epsilon), 1e-12))))
        rng = substream(seed, 7)
        probes = space.sample_uniform(20000, rng)
        golden = (1.0 + math.sqrt(5.0)) / 2.0
        while True:
            i = np.arange(n) + 0.5
            z = 1.0 - 2.0 * i / n
            r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            ang = 2.0 * math.pi * i / golden
            pts = np.column_stack([r * np.cos(ang), r * np.sin(ang), z])
            maxd = math.sqrt(float(_min_sqdist_blas(pts, probes).max()))
            if maxd <= 0.98 * epsilon:
                break
            n *= 2
            if n > 10**7:
                raise BudgetExceededError("lattice refinement exceeded the cap")
    return Net(space, epsilon, np.ascontiguousarray(pts), "angular_lattice", seed,
               meta=(("builder", "lattice"),))


# ---------------------------------------------------------------------------
# verification and products


def verify_covering(net: Net, probe_count: int, seed: int,
                    tolerance: float = 0.05) -> CoverageReport:
    """Probe-measured covering radius: uniform probes in the space, max over
    probes of the distance to the nearest net point; pass iff within
    eps * (1 + tolerance).

    The maximum is located by descending radius: an early-exit covered scan
    isolates the probes beyond the current radius, whose exact distances are
    then computed; everything below them cannot carry the maximum."""
    if probe_count < 1:
        raise BadSpecError("probe_count must be >= 1")
    rng = substream(seed, 9)
    probes = net.space.sample_uniform(probe_count, rng)
    if net.accel is not None:
        d2 = net.accel.min_sqdist(net.points, probes,
                                  exact_above=0.85 * net.epsilon)
        maxd = math.sqrt(float(d2.max()))
    else:
        # descend radius levels: an early-exit covered scan isolates the
        # probes beyond each level; the first non-empty level carries the max
        maxd = None
        for factor in (1.0, 0.95, 0.9, 0.8, 0.6, 0.3, 0.0):
            radius = factor * net.epsilon
            if factor == 0.0:
                outside = np.arange(len(probes))
            else:
                rows = np.arange(len(net.points), dtype=np.int64)
                covered = kernels.covered_mask_indexed(
                    probes, net.points, rows, radius * radius)
                outside = np.flatnonzero(~covered)
            if len(outside):
                d2 = _min_sqdist_blas(net.points, probes[outside])
                maxd = math.sqrt(float(d2.max()))
                break
    return CoverageReport(
        probe_count=probe_count,
        max_probe_distance=maxd,
        probe_seed=seed,
        tolerance=tolerance,
        passed=maxd <= net.epsilon * (1.0 + tolerance),
    )


class _GrowView:
    """Adapts a finished point array to the small interface uncovered()
    expects from the growth buffer."""

    def __init__(self, points):
        self.arr = points
        self.n = len(points)

    def view(self):
        return self.arr


def verify_separation(net: Net, size_cap: int = 50000) -> float:
    """Exact O(n^2) minimum pairwise distance (packing invariant)."""
    pts = net.points
    if len(pts) > size_cap:
        raise BudgetExceededError("separation check capped; net too large")
    if len(pts) < 2:
        return math.inf
    best = math.inf
    for i in range(0, len(pts), 1024):
        blk = pts[i:i + 1024]
        d2 = (np.einsum("ij,ij->i", blk, blk)[:, None]
              - 2.0 * blk @ pts.T
              + np.einsum("ij,ij->i", pts, pts)[None, :])
        rows = np.arange(i, i + len(blk))
        d2[np.arange(len(blk)), rows] = np.inf
        best = min(best, float(d2.min()))
    return math.sqrt(max(best, 0.0))


def net_from_table_text(text: str) -> Net:
    """Parse the flat coordinate table format written by Net.to_table_text.
    The stored digest is checked against the reconstruction."""
    import json as _json

    header = {}
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        else:
            rows.append([float(v) for v in line.split()])
    space = space_from_obj(_json.loads(header["space"]))
    verification = None
    if "coverage" in header:
        cov = _json.loads(header["coverage"])
        verification = CoverageReport(
            probe_count=int(cov["probe_count"]),
            max_probe_distance=float(cov["max_probe_distance"]),
            probe_seed=int(cov["probe_seed"]),
            tolerance=float(cov["tolerance"]),
            passed=bool(cov["passed"]),
        )
    net = Net(space=space, epsilon=float(header["epsilon"]),
              points=np.ascontiguousarray(np.asarray(rows, dtype=float)),
              strategy=header["strategy"], seed=int(header["seed"]),
              verification=verification)
    if net.digest() != header["digest"]:
        raise BadSpecError("net table digest mismatch")
    return net


def product_net(nets: list, cardinality_cap: int = 1 << 22) -> Net:
    """Cartesian product of nets: covering radius sqrt(sum eps_i^2),
    cardinality the product of component cardinalities."""
    if not nets:
        raise BadSpecError("product of zero nets")
    if len(nets) == 1:
        return nets[0]
    total = 1
    for n in nets:
        total *= n.cardinality
    if total > cardinality_cap:
        raise BudgetExceededError(
            f"product cardinality {total} exceeds the cap {cardinality_cap}"
        )
    grids = np.meshgrid(*[np.arange(n.cardinality) for n in nets], indexing="ij")
    idx = [g.reshape(-1) for g in grids]
    cols = [n.points[i] for n, i in zip(nets, idx)]
    points = np.hstack(cols)
    eps = math.sqrt(sum(n.epsilon ** 2 for n in nets))
    space = ProductSpec(tuple(n.space for n in nets))
    seed = nets[0].seed
    return Net(space, eps, np.ascontiguousarray(points), "product", seed,
               meta=(("builder", "product"),
                     ("components", tuple(n.digest() for n in nets))))
