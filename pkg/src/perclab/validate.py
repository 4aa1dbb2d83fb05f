"""Embedded invariant suite behind ``perclab validate``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bound, lattice, pathcount, sim
from .lattice import LatticeVariant


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _oracle_equivalence() -> str:
    for k in range(1, 11):
        if not pathcount.verify_row(k):
            raise AssertionError(f"brute-force histogram differs from closed form at k={k}")
    return "brute force == C(k,i)*2^(k-i) for k <= 10"


def _binomial_identity() -> str:
    for k in range(1, 201):
        row = pathcount.count_row(k)
        if row.total != 3**k:
            raise AssertionError(f"row total != 3^k at k={k}")
    return "sum_i C(k,i)*2^(k-i) == 3^k for k <= 200"


def _pascal_recurrence() -> str:
    coeffs = [1]
    for k in range(1, 201):
        coeffs = pathcount.pascal_next(coeffs)
        for i, c in enumerate(coeffs):
            if pathcount.path_count(k, i) != c << (k - i):
                raise AssertionError(f"path_count({k},{i}) disagrees with Pascal row")
    return "path_count matches iterated Pascal rows for k <= 200"


def _log_binomial_accuracy() -> str:
    worst = 0.0
    for k in (50, 100, 200):
        for i in range(k + 1):
            exact = math.log(pathcount.binomial(k, i))
            got = bound.log_binomial(k, i)
            err = abs(got - exact) / exact if exact else abs(got)
            worst = max(worst, err)
    if worst > 1e-12:
        raise AssertionError(f"worst relative error {worst:.3g} > 1e-12")
    return f"worst relative error {worst:.2e} at k in {{50,100,200}}"


def _threshold_consistency() -> str:
    for k in (1, 2, 3, 7, 40, 199):
        for i in range(0, k + 1, max(1, k // 7)):
            p = bound.threshold_p(k, i)
            lhs = k * math.log(p) + math.log(pathcount.path_count(k, i))
            if abs(lhs) > 1e-9:
                raise AssertionError(f"threshold_p({k},{i})^k * count != 1")
    return "threshold_p^k * path_count == 1"


def _bound_limit() -> str:
    b = bound.bound_at(100001)
    if b.abs_err > 1e-3:
        raise AssertionError(f"|b_k - 2^-1.5| = {b.abs_err:.3g} at k=100001")
    return f"b_100001 = {b.b_k:.6f}"


def _arc_constructions() -> str:
    for k in range(1, 21):
        if lattice.arc_recursive(k, LatticeVariant.TRI_UP) != lattice.arc_t(k):
            raise AssertionError(f"arc_t closed form wrong at k={k}")
        if lattice.arc_recursive(k) != frozenset(lattice.arc_z2(k)):
            raise AssertionError(f"arc_z2 closed form wrong at k={k}")
    return "recursive arcs == closed forms for k <= 20"


def _union_find_vs_search(configs: int = 40, k: int = 6) -> str:
    for variant in LatticeVariant:
        geo = sim.geometry(k, variant)
        for t in range(configs):
            cfg = sim.sample_configuration(sim.SimConfig(variant, k, 0.55, configs, 99), t)
            labels = sim.cluster_labels(cfg)
            for b in geo.boundary:
                v = geo.vertex(int(b))
                if sim.uf_connected(cfg, lattice.ORIGIN, v, labels) != sim.connectivity_oracle(
                    cfg, lattice.ORIGIN, v
                ):
                    raise AssertionError(f"{variant.value} trial {t}: verdicts differ at {v}")
    return f"{configs} configurations per variant at k={k}"


def _coupling_monotonicity() -> str:
    grid = np.linspace(0.0, 1.0, 17)
    for variant in LatticeVariant:
        cfg = sim.SimConfig(variant, 8, 0.5, 50, 3)
        for event in sim.Event:
            ind = sim.trial_indicators(cfg, grid, event)
            if np.any(np.diff(ind.astype(np.int8), axis=1) < 0):
                raise AssertionError(f"{variant.value} {event.value} indicator decreased in p")
    return "per-trial indicators nondecreasing in p"


CHECKS: list[tuple[str, Callable[[], str]]] = [
    ("oracle-equivalence", _oracle_equivalence),
    ("binomial-identity", _binomial_identity),
    ("pascal-recurrence", _pascal_recurrence),
    ("log-binomial-accuracy", _log_binomial_accuracy),
    ("threshold-consistency", _threshold_consistency),
    ("bound-limit", _bound_limit),
    ("arc-constructions", _arc_constructions),
    ("union-find-vs-search", _union_find_vs_search),
    ("coupling-monotonicity", _coupling_monotonicity),
]


def run_all() -> list[CheckResult]:
    results = []
    for name, check in CHECKS:
        t0 = time.perf_counter()
        try:
            detail, ok = check(), True
        except Exception as exc:  # report every family, never stop at the first
            detail, ok = f"{type(exc).__name__}: {exc}", False
        results.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return results
