"""Seeded Monte Carlo site percolation on graph-distance balls.

Randomness is keyed: the uniform for ``(seed, trial, vertex)`` is entry
``vertex`` of a Philox stream whose 128-bit key is ``(trial << 64) | seed``.
A site is open iff its uniform is ``< p``, so configurations at different
``p`` are coupled and open sets are nested in ``p``.

Connectivity uses union-find (union by size, path halving) compiled with
numba; ``connectivity_oracle`` is a plain breadth-first reference.
"""
from __future__ import annotations

import enum
import functools
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.stats import binomtest

from .lattice import (
    STEPS,
    UP_STEPS,
    LatticeVariant,
    Vertex,
    arc_z2,
    ball_coords,
    graph_distance,
)

MC_PATH_MAX_K = 8
DEFAULT_SEED = 20240601
_SEED_MASK = (1 << 64) - 1

# Half of each step set; the other half is its negation.
_FORWARD = {
    LatticeVariant.Z2: ((1, 0), (0, 1)),
    LatticeVariant.TRI_UP: ((1, 0), (0, 1), (1, 1)),
    LatticeVariant.TRI_RIGHT: ((1, 0), (0, 1), (1, -1)),
}


class Event(str, enum.Enum):
    ONE_ARM = "one-arm"
    TWO_ARM = "two-arm"


class OriginRule(str, enum.Enum):
    CONDITIONED_OPEN = "conditioned-open"
    SAMPLED = "sampled"


class BracketError(ValueError):
    """Initial bisection interval does not bracket the target."""


@dataclass(frozen=True)
class SimConfig:
    variant: LatticeVariant
    k: int
    p: float
    trials: int
    seed: int = DEFAULT_SEED
    origin_rule: OriginRule = OriginRule.CONDITIONED_OPEN

    def __post_init__(self):
        object.__setattr__(self, "variant", LatticeVariant(self.variant))
        object.__setattr__(self, "origin_rule", OriginRule(self.origin_rule))
        if self.k < 1:
            raise ValueError(f"radius k must be >= 1, got {self.k}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed <= _SEED_MASK:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    def with_p(self, p: float) -> "SimConfig":
        return SimConfig(self.variant, self.k, p, self.trials, self.seed, self.origin_rule)

    def record(self) -> dict:
        return {
            "variant": self.variant.value,
            "k": self.k,
            "p": self.p,
            "trials": self.trials,
            "seed": self.seed,
            "origin_rule": self.origin_rule.value,
        }


class Geometry:
    """Index tables for one ball: coordinates, forward neighbours, boundary and arcs."""

    def __init__(self, k: int, variant: LatticeVariant):
        self.k = k
        self.variant = variant
        self.coords = ball_coords(k, variant)
        self.n = len(self.coords)
        side = 2 * k + 1
        grid = np.full((side, side), -1, dtype=np.int64)
        grid[self.coords[:, 0] + k, self.coords[:, 1] + k] = np.arange(self.n)
        self._grid = grid

        fwd = np.full((self.n, len(_FORWARD[variant])), -1, dtype=np.int64)
        for j, (d1, d2) in enumerate(_FORWARD[variant]):
            x = self.coords[:, 0] + d1 + k
            y = self.coords[:, 1] + d2 + k
            inside = (x >= 0) & (x < side) & (y >= 0) & (y < side)
            fwd[inside, j] = grid[x[inside], y[inside]]
        self.forward = fwd

        dist = graph_distance(self.coords[:, 0], self.coords[:, 1], variant)
        self.boundary = np.flatnonzero(dist == k).astype(np.int64)
        self.pos_arc = np.array([self.index(v) for v in arc_z2(k, +1)], dtype=np.int64)
        self.neg_arc = np.array([self.index(v) for v in arc_z2(k, -1)], dtype=np.int64)

    @functools.cached_property
    def adjacency(self) -> list[list[int]]:
        """Full neighbour lists by index, built from the variant's whole step set."""
        k, side, grid = self.k, 2 * self.k + 1, self._grid.tolist()
        adj = []
        for a1, a2 in self.coords.tolist():
            row = []
            for d1, d2 in STEPS[self.variant]:
                x, y = a1 + d1 + k, a2 + d2 + k
                if 0 <= x < side and 0 <= y < side and grid[x][y] >= 0:
                    row.append(grid[x][y])
            adj.append(row)
        return adj

    def index(self, v: Vertex) -> int:
        x, y = v.a1 + self.k, v.a2 + self.k
        side = 2 * self.k + 1
        if not (0 <= x < side and 0 <= y < side) or self._grid[x, y] < 0:
            raise ValueError(f"vertex {v} is outside the radius-{self.k} {self.variant.value} ball")
        return int(self._grid[x, y])

    def vertex(self, idx: int) -> Vertex:
        a1, a2 = self.coords[idx]
        return Vertex(int(a1), int(a2))


@functools.lru_cache(maxsize=32)
def geometry(k: int, variant: LatticeVariant) -> Geometry:
    return Geometry(k, LatticeVariant(variant))


def uniforms(seed: int, trial: int, n: int) -> np.ndarray:
    """The first ``n`` keyed uniforms of stream ``(seed, trial)``."""
    key = ((trial & _SEED_MASK) << 64) | (seed & _SEED_MASK)
    return np.random.Generator(np.random.Philox(key=key)).random(n)


@dataclass(frozen=True, eq=False)
class OpenConfiguration:
    k: int
    variant: LatticeVariant
    flags: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = geometry(self.k, self.variant).n
        if self.flags.shape != (n,):
            raise ValueError(f"expected {n} flags for this ball, got shape {self.flags.shape}")

    @property
    def geometry(self) -> Geometry:
        return geometry(self.k, self.variant)

    def is_open(self, v: Vertex) -> bool:
        return bool(self.flags[self.geometry.index(v)])

    @classmethod
    def from_open_set(cls, k, variant, open_vertices) -> "OpenConfiguration":
        geo = geometry(k, LatticeVariant(variant))
        flags = np.zeros(geo.n, dtype=bool)
        for v in open_vertices:
            flags[geo.index(v)] = True
        return cls(k, geo.variant, flags)


def sample_configuration(config: SimConfig, trial_index: int) -> OpenConfiguration:
    if not 0 <= trial_index < config.trials:
        raise ValueError(f"trial_index {trial_index} outside [0, {config.trials})")
    geo = geometry(config.k, config.variant)
    flags = uniforms(config.seed, trial_index, geo.n) < config.p
    if config.origin_rule is OriginRule.CONDITIONED_OPEN:
        flags[0] = True
    return OpenConfiguration(config.k, config.variant, flags)


# --- compiled kernels --------------------------------------------------------


@numba.njit(nogil=True, cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@numba.njit(nogil=True, cache=True)
def _label(is_open, forward, parent, size):
    n = is_open.shape[0]
    for v in range(n):
        parent[v] = v
        size[v] = 1
    for v in range(n):
        if not is_open[v]:
            continue
        for j in range(forward.shape[1]):
            w = forward[v, j]
            if w < 0 or not is_open[w]:
                continue
            rv = _find(parent, v)
            rw = _find(parent, w)
            if rv == rw:
                continue
            if size[rv] < size[rw]:
                rv, rw = rw, rv
            parent[rw] = rv
            size[rv] += size[rw]


@numba.njit(nogil=True, cache=True)
def _touches(is_open, parent, root, members):
    for j in range(members.shape[0]):
        v = members[j]
        if is_open[v] and _find(parent, v) == root:
            return True
    return False


@numba.njit(nogil=True, cache=True)
def _events(is_open, forward, boundary, pos_arc, neg_arc, parent, size, out):
    out[0] = False
    out[1] = False
    if not is_open[0]:
        return
    _label(is_open, forward, parent, size)
    root = _find(parent, 0)
    out[0] = _touches(is_open, parent, root, boundary)
    # TRI_UP arcs lie partly inside the ball, so this is not implied by out[0].
    out[1] = _touches(is_open, parent, root, pos_arc) and _touches(
        is_open, parent, root, neg_arc
    )


@numba.njit(nogil=True, cache=True)
def _events_over_grid(u, ps, force_origin, forward, boundary, pos_arc, neg_arc, out):
    """Events for one trial at each ``p`` in ``ps``; ``out`` is ``(len(ps), 2)``."""
    n = u.shape[0]
    is_open = np.empty(n, dtype=np.bool_)
    parent = np.empty(n, dtype=np.int64)
    size = np.empty(n, dtype=np.int64)
    res = np.empty(2, dtype=np.bool_)
    for j in range(ps.shape[0]):
        p = ps[j]
        for v in range(n):
            is_open[v] = u[v] < p
        if force_origin:
            is_open[0] = True
        _events(is_open, forward, boundary, pos_arc, neg_arc, parent, size, res)
        out[j, 0] = res[0]
        out[j, 1] = res[1]


def _config_events(cfg: OpenConfiguration) -> np.ndarray:
    geo = cfg.geometry
    out = np.zeros(2, dtype=np.bool_)
    parent = np.empty(geo.n, dtype=np.int64)
    size = np.empty(geo.n, dtype=np.int64)
    flags = np.ascontiguousarray(cfg.flags, dtype=np.bool_)
    _events(flags, geo.forward, geo.boundary, geo.pos_arc, geo.neg_arc, parent, size, out)
    return out


def one_arm(cfg: OpenConfiguration) -> bool:
    """Origin joined by open sites to some site at graph distance exactly ``k``."""
    return bool(_config_events(cfg)[0])


def two_arm(cfg: OpenConfiguration) -> bool:
    """Origin joined by open sites to both the positive and the negative Z^2 arc."""
    return bool(_config_events(cfg)[1])


def cluster_labels(cfg: OpenConfiguration) -> np.ndarray:
    """Union-find root per site (closed sites are their own root)."""
    geo = cfg.geometry
    parent = np.empty(geo.n, dtype=np.int64)
    size = np.empty(geo.n, dtype=np.int64)
    _label(np.ascontiguousarray(cfg.flags, dtype=np.bool_), geo.forward, parent, size)
    return np.array([_find(parent, v) for v in range(geo.n)], dtype=np.int64)


def uf_connected(cfg: OpenConfiguration, a: Vertex, b: Vertex, labels=None) -> bool:
    geo = cfg.geometry
    ia, ib = geo.index(a), geo.index(b)
    if not (cfg.flags[ia] and cfg.flags[ib]):
        return False
    if labels is None:
        labels = cluster_labels(cfg)
    return bool(labels[ia] == labels[ib])


def connectivity_oracle(cfg: OpenConfiguration, a: Vertex, b: Vertex) -> bool:
    """Breadth-first search over open sites; reference for the union-find engine."""
    geo = cfg.geometry
    ia, ib = geo.index(a), geo.index(b)
    flags = cfg.flags.tolist()
    if not (flags[ia] and flags[ib]):
        return False
    seen = {ia}
    queue = deque([ia])
    while queue:
        v = queue.popleft()
        if v == ib:
            return True
        for w in geo.adjacency[v]:
            if flags[w] and w not in seen:
                seen.add(w)
                queue.append(w)
    return False


# --- estimation --------------------------------------------------------------


def _chunks(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n))
    bounds = np.linspace(0, n, parts + 1).astype(int)
    return [range(bounds[i], bounds[i + 1]) for i in range(parts)]


def trial_indicators(
    config: SimConfig, p_grid, event: Event | str = Event.ONE_ARM, threads: int = 1
) -> np.ndarray:
    """Per-trial event indicators, shape ``(trials, len(p_grid))``.

    All ``p`` values of a trial share that trial's uniforms, so each row is
    nondecreasing along an ascending ``p_grid``.
    """
    event = Event(event)
    ps = np.asarray(p_grid, dtype=np.float64).reshape(-1)
    geo = geometry(config.k, config.variant)
    force = config.origin_rule is OriginRule.CONDITIONED_OPEN
    out = np.zeros((config.trials, len(ps), 2), dtype=np.bool_)

    def work(trials: range):
        for t in trials:
            u = uniforms(config.seed, t, geo.n)
            _events_over_grid(
                u, ps, force, geo.forward, geo.boundary, geo.pos_arc, geo.neg_arc, out[t]
            )

    chunks = _chunks(config.trials, threads)
    if len(chunks) == 1:
        work(chunks[0])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, chunks))
    return out[:, :, 0 if event is Event.ONE_ARM else 1]


def wilson_interval(hits: int, trials: int) -> tuple[float, float]:
    ci = binomtest(hits, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class CrossingEstimate:
    config: SimConfig
    event: Event
    hits: int
    phat: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_hits(cls, config: SimConfig, event: Event, hits: int) -> "CrossingEstimate":
        lo, hi = wilson_interval(hits, config.trials)
        return cls(config, Event(event), hits, hits / config.trials, lo, hi)

    def record(self) -> dict:
        c = self.config
        return {
            "variant": c.variant.value,
            "k": c.k,
            "p": c.p,
            "event": self.event.value,
            "trials": c.trials,
            "hits": self.hits,
            "phat": self.phat,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "seed": c.seed,
        }


def estimate(config: SimConfig, event: Event | str = Event.ONE_ARM, threads: int = 1) -> CrossingEstimate:
    event = Event(event)
    hits = int(trial_indicators(config, [config.p], event, threads)[:, 0].sum())
    return CrossingEstimate.from_hits(config, event, hits)


def sweep(
    variant,
    k_list,
    p_grid,
    trials: int,
    seed: int = DEFAULT_SEED,
    event: Event | str = Event.ONE_ARM,
    origin_rule: OriginRule | str = OriginRule.CONDITIONED_OPEN,
    threads: int = 1,
) -> list[CrossingEstimate]:
    """Estimates over ``k_list x p_grid`` in row-major order, coupled along ``p``."""
    k_list, p_grid = list(k_list), [float(p) for p in p_grid]
    if not k_list or not p_grid:
        raise ValueError("sweep needs non-empty k_list and p_grid")
    if any(b < a for a, b in zip(p_grid, p_grid[1:])):
        raise ValueError("p_grid must be sorted ascending")
    event = Event(event)
    rows = []
    for k in k_list:
        base = SimConfig(variant, k, p_grid[0], trials, seed, origin_rule)
        hits = trial_indicators(base, p_grid, event, threads).sum(axis=0)
        rows.extend(
            CrossingEstimate.from_hits(base.with_p(p), event, int(h)) for p, h in zip(p_grid, hits)
        )
    return rows


@dataclass(frozen=True)
class BisectionResult:
    p: float
    lo: float
    hi: float
    trace: list[CrossingEstimate]


def pc_bisect(
    variant,
    k: int,
    trials: int,
    seed: int = DEFAULT_SEED,
    target: float = 0.5,
    tol: float = 0.005,
    lo: float = 0.0,
    hi: float = 1.0,
    event: Event | str = Event.TWO_ARM,
    origin_rule: OriginRule | str = OriginRule.CONDITIONED_OPEN,
    threads: int = 1,
) -> BisectionResult:
    """Bisect ``p`` until the crossing estimate straddles ``target`` within ``tol``.

    This is a finite-size proxy for the critical probability: the returned
    midpoint is where the radius-``k`` crossing frequency passes ``target``.
    All steps reuse the same seed, so the estimate is monotone in ``p``.
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"need 0 <= lo < hi <= 1, got [{lo}, {hi}]")
    base = SimConfig(variant, k, lo, trials, seed, origin_rule)
    trace = [estimate(base.with_p(lo), event, threads), estimate(base.with_p(hi), event, threads)]
    if not trace[0].phat < target <= trace[1].phat:
        raise BracketError(
            f"[{lo}, {hi}] does not bracket target {target}: "
            f"phat({lo})={trace[0].phat}, phat({hi})={trace[1].phat}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        est = estimate(base.with_p(mid), event, threads)
        trace.append(est)
        if est.phat < target:
            lo = mid
        else:
            hi = mid
    return BisectionResult(0.5 * (lo + hi), lo, hi, trace)


@dataclass(frozen=True)
class PathCountEstimate:
    k: int
    p: float
    trials: int
    mean: float
    stderr: float

    @property
    def expected(self) -> float:
        return (3.0 * self.p) ** self.k

    def __float__(self) -> float:
        return self.mean


def open_path_counts(k: int, flags: np.ndarray) -> np.ndarray:
    """Fully open ``k``-step TRI_UP up-paths from the origin, one count per row of ``flags``.

    ``flags`` has shape ``(batch, n)`` over the radius-``k`` TRI_UP ball.
    """
    geo = geometry(k, LatticeVariant.TRI_UP)
    quad = (geo.coords[:, 0] >= 0) & (geo.coords[:, 1] >= 0)
    idx = np.flatnonzero(quad)
    a1, a2 = geo.coords[idx, 0], geo.coords[idx, 1]
    batch = flags.shape[0]
    grid = np.zeros((batch, k + 1, k + 1), dtype=np.int64)
    grid[:, a1, a2] = flags[:, idx]
    f = np.zeros((batch, k + 1, k + 1), dtype=np.int64)
    f[:, 0, 0] = grid[:, 0, 0]
    for _ in range(k):
        g = np.zeros_like(f)
        for d1, d2 in UP_STEPS[LatticeVariant.TRI_UP]:
            g[:, d1:, d2:] += f[:, : k + 1 - d1, : k + 1 - d2]
        f = g * grid
    return f.sum(axis=(1, 2))


def mc_open_path_count(
    k: int, p: float, trials: int, seed: int = DEFAULT_SEED, batch: int = 4096
) -> PathCountEstimate:
    """Monte Carlo mean number of fully open ``k``-step up-paths (origin forced open)."""
    if not 1 <= k <= MC_PATH_MAX_K:
        raise ValueError(f"mc_open_path_count supports 1 <= k <= {MC_PATH_MAX_K} (MC_PATH_MAX_K), got {k}")
    config = SimConfig(LatticeVariant.TRI_UP, k, p, trials, seed)
    n = geometry(k, LatticeVariant.TRI_UP).n
    counts = np.empty(trials, dtype=np.float64)
    for start in range(0, trials, batch):
        stop = min(trials, start + batch)
        flags = np.stack([uniforms(seed, t, n) < p for t in range(start, stop)])
        flags[:, 0] = True
        counts[start:stop] = open_path_counts(k, flags)
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return PathCountEstimate(k, config.p, trials, float(counts.mean()), stderr)
