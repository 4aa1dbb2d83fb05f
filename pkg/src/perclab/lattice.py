"""Coordinate algebra, neighbourhoods and arcs on Z^2 and its triangular embeddings.

Every variant shares the Z^2 coordinate frame: a vertex is ``a1*e1 + a2*e2``.
The triangular lattices are Z^2 plus one extra diagonal pair of steps,
``+-(1, 1)`` for ``TRI_UP`` and ``+-(1, -1)`` for ``TRI_RIGHT``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np


class UnsupportedVariantError(ValueError):
    """Raised when an operation has no definition for the requested variant."""


class LatticeVariant(str, enum.Enum):
    Z2 = "z2"
    TRI_UP = "tri-up"
    TRI_RIGHT = "tri-right"

    @property
    def degree(self) -> int:
        return len(STEPS[self])

    @classmethod
    def parse(cls, text: str) -> "LatticeVariant":
        key = text.strip().lower().replace("_", "-")
        aliases = {"triup": "tri-up", "triright": "tri-right"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(
                f"unknown lattice variant {text!r}; expected one of "
                + ", ".join(v.value for v in cls)
            ) from None


@dataclass(frozen=True, order=True, slots=True)
class Vertex:
    """Integer point ``(a1, a2)`` in the Z^2 frame."""

    a1: int
    a2: int

    def __add__(self, other: "Vertex | tuple[int, int]") -> "Vertex":
        d1, d2 = other
        return Vertex(self.a1 + d1, self.a2 + d2)

    def __neg__(self) -> "Vertex":
        return Vertex(-self.a1, -self.a2)

    def __iter__(self):
        yield self.a1
        yield self.a2

    def __str__(self) -> str:
        return f"{self.a1},{self.a2}"

    @property
    def norm(self) -> int:
        return abs(self.a1) + abs(self.a2)

    @classmethod
    def parse(cls, text: str) -> "Vertex":
        a1, a2 = text.split(",")
        return cls(int(a1), int(a2))


ORIGIN = Vertex(0, 0)

# Step sets, closed under negation. Order is part of the output contract.
_Z2_STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))
STEPS: dict[LatticeVariant, tuple[tuple[int, int], ...]] = {
    LatticeVariant.Z2: _Z2_STEPS,
    LatticeVariant.TRI_UP: _Z2_STEPS + ((1, 1), (-1, -1)),
    LatticeVariant.TRI_RIGHT: _Z2_STEPS + ((1, -1), (-1, 1)),
}

UP_STEPS: dict[LatticeVariant, tuple[tuple[int, int], ...]] = {
    LatticeVariant.Z2: ((1, 0), (0, 1)),
    LatticeVariant.TRI_UP: ((1, 0), (0, 1), (1, 1)),
}


def norm(v: Vertex) -> int:
    return v.norm


def up_neighbors(v: Vertex, variant: LatticeVariant) -> list[Vertex]:
    """Neighbours one up-step away from `v`, in the fixed order of ``UP_STEPS``.

    Raises
    ------
    UnsupportedVariantError
        For ``TRI_RIGHT``, whose up-step set is not defined for path counting.
    """
    try:
        steps = UP_STEPS[variant]
    except KeyError:
        raise UnsupportedVariantError(
            f"up-steps are not defined for variant {variant.value!r}"
        ) from None
    return [v + s for s in steps]


def neighbors(v: Vertex, variant: LatticeVariant) -> list[Vertex]:
    return [v + s for s in STEPS[variant]]


@dataclass(frozen=True)
class Arc:
    k: int
    sign: int
    vertices: tuple[Vertex, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.vertices


def _parse_sign(sign: int | str) -> int:
    if sign in (1, "+", "plus", "pos"):
        return 1
    if sign in (-1, "-", "minus", "neg"):
        return -1
    raise ValueError(f"arc sign must be '+' or '-', got {sign!r}")


def arc_z2(k: int, sign: int | str = 1) -> Arc:
    """Arc of Z^2 vertices ``k`` up-steps from the origin, or its negation.

    Vertices are ordered by descending ``a1``.
    """
    if k < 1:
        raise ValueError(f"arc generation must be >= 1, got {k}")
    s = _parse_sign(sign)
    verts = tuple(Vertex(s * a1, s * (k - a1)) for a1 in range(k, -1, -1))
    return Arc(k, s, verts)


def arc_recursive(k: int, variant: LatticeVariant = LatticeVariant.Z2) -> frozenset[Vertex]:
    """Arc built by repeatedly taking the union of up-neighbourhoods from the origin."""
    if k < 1:
        raise ValueError(f"arc generation must be >= 1, got {k}")
    current = {ORIGIN}
    for _ in range(k):
        current = {u for v in current for u in up_neighbors(v, variant)}
    return frozenset(current)


def arc_t(k: int) -> frozenset[Vertex]:
    """Vertices reached by exactly ``k`` TRI_UP up-steps from the origin.

    Closed form: ``a1, a2 >= 0``, ``max(a1, a2) <= k`` and ``a1 + a2 >= k``.
    """
    if k < 1:
        raise ValueError(f"arc generation must be >= 1, got {k}")
    return frozenset(
        Vertex(a1, a2) for a1 in range(k + 1) for a2 in range(max(k - a1, 0), k + 1)
    )


def graph_distance(a1, a2, variant: LatticeVariant):
    """Graph distance from the origin; works elementwise on integer arrays."""
    a1 = np.asarray(a1, dtype=np.int64)
    a2 = np.asarray(a2, dtype=np.int64)
    if variant is LatticeVariant.TRI_RIGHT:
        a2 = -a2
    l1 = np.abs(a1) + np.abs(a2)
    if variant is LatticeVariant.Z2:
        return l1
    same_sign = (a1 * a2) >= 0
    return np.where(same_sign, np.maximum(np.abs(a1), np.abs(a2)), l1)


def ball_coords(k: int, variant: LatticeVariant) -> np.ndarray:
    """``(n, 2)`` int64 coordinates of the distance-``k`` ball in canonical order.

    Canonical order sorts by graph distance, then descending ``a1``, then
    descending ``a2``. The origin is always row 0 and ``ball_coords(k)`` is a
    prefix of ``ball_coords(k + 1)``.
    """
    if k < 0:
        raise ValueError(f"ball radius must be >= 0, got {k}")
    r = np.arange(-k, k + 1, dtype=np.int64)
    a1, a2 = np.meshgrid(r, r, indexing="ij")
    a1 = a1.ravel()
    a2 = a2.ravel()
    d = graph_distance(a1, a2, variant)
    keep = d <= k
    a1, a2, d = a1[keep], a2[keep], d[keep]
    order = np.lexsort((-a2, -a1, d))
    return np.stack([a1[order], a2[order]], axis=1)


def ball(k: int, variant: LatticeVariant) -> frozenset[Vertex]:
    return frozenset(Vertex(int(x), int(y)) for x, y in ball_coords(k, variant))


def ball_bfs(k: int, variant: LatticeVariant) -> dict[Vertex, int]:
    """Breadth-first distances up to ``k``; reference for ``ball``."""
    dist = {ORIGIN: 0}
    frontier = [ORIGIN]
    for d in range(1, k + 1):
        nxt = []
        for v in frontier:
            for u in neighbors(v, variant):
                if u not in dist:
                    dist[u] = d
                    nxt.append(u)
        frontier = nxt
    return dist


def as_vertices(rows: Iterable) -> list[Vertex]:
    return [Vertex(int(a), int(b)) for a, b in rows]
