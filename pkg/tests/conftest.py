"""Shared fixtures and brute-force oracles.

Every oracle here is an independent reimplementation of an operation's
definition in plain Python loops, kept deliberately free of the library's
vectorized code paths so the two can disagree.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from sirecon import (DiscreteField, GridSpec, KernelSpec, MixedExponents,
                     build_gram, default_bank, parse_config_text)


@pytest.fixture(scope="session")
def tiny_spec():
    """Smallest grid the invariants allow: 16 x 16 cells."""
    return GridSpec(d=1, periods=(4, 4), m=4)


@pytest.fixture(scope="session")
def small_spec():
    return GridSpec(d=1, periods=(6, 6), m=8)


@pytest.fixture(scope="session")
def default_spec():
    return GridSpec(d=1, periods=(8, 8), m=16)


@pytest.fixture(scope="session")
def small_cfg():
    return parse_config_text(
        "grid.periods = 6,6\n"
        "grid.m = 8\n"
        "sampling.s = 0.5\n"
        "sampling.eta = 0.2\n"
        "seed = 3\n"
    )


@pytest.fixture(scope="session")
def default_bank16(default_spec):
    return default_bank(default_spec, 1)


@pytest.fixture(scope="session")
def default_gram16(default_bank16):
    return build_gram(default_bank16)


def rand_field(spec, rng) -> DiscreteField:
    return DiscreteField(spec, rng.uniform(-1.0, 1.0, size=spec.shape))


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def oracle_convolve(f: DiscreteField, g: DiscreteField) -> np.ndarray:
    """O(N^2) direct double sum of the periodic discrete convolution."""
    spec = f.spec
    shape = spec.shape
    out = np.zeros(shape)
    for i in itertools.product(*map(range, shape)):
        acc = 0.0
        for j in itertools.product(*map(range, shape)):
            k = tuple((i[ax] - j[ax]) % shape[ax] for ax in range(spec.ndim))
            acc += f.values[j] * g.values[k]
        out[i] = acc * spec.cell_volume
    return out


def oracle_mixed_norm(f: DiscreteField, e: MixedExponents) -> float:
    """Nested-loop mixed norm straight from its definition."""
    spec = f.spec
    total = 0.0
    for i in range(spec.shape[0]):
        inner = 0.0
        for j in itertools.product(*map(range, spec.shape[1:])):
            inner += abs(f.values[(i,) + j]) ** e.q
        inner *= (1.0 / spec.m) ** spec.d
        total += inner ** (e.p / e.q)
    return (total / spec.m) ** (1.0 / e.p)


def oracle_seq_norm(arr: np.ndarray, e: MixedExponents) -> float:
    total = 0.0
    for i in range(arr.shape[0]):
        inner = 0.0
        for j in itertools.product(*map(range, arr.shape[1:])):
            inner += abs(arr[(i,) + j]) ** e.q
        total += inner ** (e.p / e.q)
    return total ** (1.0 / e.p)


def oracle_wiener(f: DiscreteField, e: MixedExponents) -> float:
    """Per-cell scan: sups as maxima over each unit cell's samples."""
    spec = f.spec
    m = spec.m
    total = 0.0
    for n in range(spec.extents[0]):
        col_best = 0.0
        for x in range(n * m, (n + 1) * m):
            inner = 0.0
            for cell in itertools.product(*[range(spec.extents[ax]) for ax in range(1, spec.ndim)]):
                best = 0.0
                for off in itertools.product(*[range(m)] * spec.d):
                    idx = (x,) + tuple(cell[t] * m + off[t] for t in range(spec.d))
                    best = max(best, abs(f.values[idx]) ** e.q)
                inner += best
            col_best = max(col_best, inner)
        total += col_best ** (e.p / e.q)
    return total ** (1.0 / e.p)


def oracle_oscillation(f: DiscreteField, delta: float) -> np.ndarray:
    """Exhaustive window scan for the local modulus of continuity."""
    spec = f.spec
    w = int(math.floor(delta * spec.m + 1e-12))
    shape = spec.shape
    out = np.zeros(shape)
    offsets = list(itertools.product(*[range(-w, w + 1)] * spec.ndim))
    for i in itertools.product(*map(range, shape)):
        base = f.values[i]
        best = 0.0
        for off in offsets:
            j = tuple((i[ax] + off[ax]) % shape[ax] for ax in range(spec.ndim))
            best = max(best, abs(f.values[j] - base))
        out[i] = best
    return out


def oracle_synthesize(c, bank) -> np.ndarray:
    """Direct triple loop over generators, lattice sites, and grid cells."""
    spec = bank.spec
    out = np.zeros(spec.shape)
    for i in range(bank.r):
        base = bank.rasterized[i].values
        for k in itertools.product(*map(range, bank.lattice_shape)):
            w = c.entries[(i,) + k]
            if w == 0.0:
                continue
            for cell in itertools.product(*map(range, spec.shape)):
                src = tuple((cell[ax] - k[ax] * spec.m) % spec.shape[ax]
                            for ax in range(spec.ndim))
                out[cell] += w * base[src]
    return out


def oracle_spread(values: np.ndarray, bupu) -> np.ndarray:
    """Sum over samples of value times indicator weight, cell by cell."""
    spec = bupu.spec
    out = np.zeros(spec.shape)
    for cell in itertools.product(*map(range, spec.shape)):
        acc = 0.0
        for j in range(len(values)):
            if bupu.assignment[cell] == j:
                acc += values[j]
        out[cell] = acc
    return out


def oracle_nearest(X, spec) -> tuple[np.ndarray, np.ndarray]:
    """Exhaustive distance table and first-minimum argmin."""
    pts = X.points
    dists = np.empty((len(pts),) + spec.shape)
    for j, p in enumerate(pts):
        for cell in itertools.product(*map(range, spec.shape)):
            d2 = 0.0
            for ax in range(spec.ndim):
                dx = abs((cell[ax] + 0.5) / spec.m - p[ax])
                dx = min(dx, spec.extents[ax] - dx)
                d2 += dx * dx
            dists[(j,) + cell] = d2
    assign = np.argmin(dists, axis=0)
    best = np.min(dists, axis=0)
    return assign, np.sqrt(best)


def oracle_acquire(f: DiscreteField, X, shape: str, a: float,
                   m_target: float = 1.0, inner_ratio: float = 0.5,
                   offsets=None) -> np.ndarray:
    """Direct double-loop quadrature of the normalized sample functionals."""
    spec = f.spec
    h = spec.cell_volume
    out = np.empty(len(X))
    if shape == "signed":
        rho = inner_ratio ** spec.ndim
        alpha = (m_target + 1.0) / (2.0 * (1.0 - rho))
        comps = [(alpha, 1.0), (-(alpha - 1.0), inner_ratio)]
    else:
        comps = [(1.0, 1.0)]
    for j, p in enumerate(X.points):
        z = p.copy().astype(float)
        if offsets is not None:
            z = z + offsets[j]
        w = a if offsets is None else a - np.max(np.abs(offsets[j]))
        weight = np.zeros(spec.shape)
        for mass, ratio in comps:
            r = w * ratio
            vals = np.zeros(spec.shape)
            for cell in itertools.product(*map(range, spec.shape)):
                inside = True
                for ax in range(spec.ndim):
                    dx = (cell[ax] + 0.5) / spec.m - z[ax]
                    ell = spec.extents[ax]
                    dx = ((dx + ell / 2) % ell) - ell / 2
                    if abs(dx) > r:
                        inside = False
                        break
                if not inside:
                    continue
                if shape == "tent":
                    val = 1.0
                    for ax in range(spec.ndim):
                        dx = (cell[ax] + 0.5) / spec.m - z[ax]
                        ell = spec.extents[ax]
                        dx = ((dx + ell / 2) % ell) - ell / 2
                        val *= max(0.0, 1.0 - abs(dx) / r)
                else:
                    val = 1.0
                vals[cell] = val
            q = vals.sum() * h
            weight += (mass / q) * vals
        out[j] = (weight * f.values).sum() * h
    return out


def oracle_bspline(x: float, order: int) -> float:
    """Cox-de Boor recursion for the centered cardinal B-spline."""
    def b(j, k, t):
        if k == 1:
            return 1.0 if j <= t < j + 1 else 0.0
        return ((t - j) / (k - 1)) * b(j, k - 1, t) + ((j + k - t) / (k - 1)) * b(j + 1, k - 1, t)

    return b(0, order, x + order / 2.0)
