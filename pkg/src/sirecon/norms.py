"""Mixed-norm machinery: L^{p,q}, sequence, and amalgam norms plus oscillation.

The mixed norm integrates the trailing (spatial) axes at exponent q inside
an exponent-p integral over the leading axis.  The amalgam norm replaces
the inner integrals by suprema over unit cells; on the grid the supremum
over a unit cell is approximated by the max over its m samples per axis,
the one systematic approximation in this package (error O(1/m) for the
Lipschitz kernel catalog).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import DiscreteField, GridError

__all__ = [
    "MixedExponents",
    "mixed_lebesgue_norm",
    "mixed_seq_norm",
    "wiener_amalgam_norm",
    "oscillation",
]


@dataclass(frozen=True)
class MixedExponents:
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        if not (1.0 <= self.p < np.inf and 1.0 <= self.q < np.inf):
            raise GridError(f"exponents must satisfy 1 <= p,q < inf, got ({self.p}, {self.q})")


def mixed_lebesgue_norm(f: DiscreteField, e: MixedExponents) -> float:
    """Mixed (p,q) norm: q-integral over trailing axes inside a p-integral.

    [ sum_x ( sum_y |f|^q / m^d )^{p/q} / m ]^{1/p} by the midpoint rule.
    """
    spec = f.spec
    absq = np.abs(f.values) ** e.q
    inner = absq.sum(axis=tuple(range(1, spec.ndim))) * (1.0 / spec.m) ** spec.d
    outer = (inner ** (e.p / e.q)).sum() / spec.m
    return float(outer ** (1.0 / e.p))


def mixed_seq_norm(c, i: int, e: MixedExponents) -> float:
    """Mixed (p,q) norm of generator i's coefficients on the integer lattice.

    ``c`` is a CoefficientArray or any array-like whose first axis indexes
    generators; axis 0 of the selected lattice array is the leading
    direction, the rest are summed at exponent q.
    """
    entries = getattr(c, "entries", c)
    arr = np.asarray(entries[i], dtype=float)
    inner = (np.abs(arr) ** e.q).sum(axis=tuple(range(1, arr.ndim)))
    return float(((inner ** (e.p / e.q)).sum()) ** (1.0 / e.p))


def wiener_amalgam_norm(f: DiscreteField, e: MixedExponents) -> float:
    """Amalgam norm: per-unit-cell sups combined in the mixed (p,q) pattern.

    The sup over the leading axis stays outside the sum over trailing unit
    cells, so it is taken per leading grid column before blocking.
    """
    spec = f.spec
    absq = np.abs(f.values) ** e.q
    # per leading-axis column: sum over trailing unit cells of their maxes
    trail_shape = [spec.shape[0]]
    for ax in range(1, spec.ndim):
        trail_shape.extend([spec.extents[ax], spec.m])
    blocked = absq.reshape(trail_shape)
    col = blocked.max(axis=tuple(range(2, 2 * spec.ndim, 2)))
    col = col.sum(axis=tuple(range(1, spec.ndim)))
    # now sup over each leading unit interval, then the outer p-sum
    lead = col.reshape(spec.extents[0], spec.m).max(axis=1)
    return float((lead ** (e.p / e.q)).sum() ** (1.0 / e.p))


def oscillation(f: DiscreteField, delta: float) -> DiscreteField:
    """Local modulus of continuity over a per-coordinate delta window.

    osc(x) = sup { |f(x+y) - f(x)| : |y_i| <= delta for every axis },
    with the sup approximated by the max over grid points in the window.
    """
    spec = f.spec
    if delta <= 0:
        raise GridError("oscillation window must be positive")
    if delta > min(spec.extents) / 4.0:
        raise GridError(
            f"oscillation window {delta} exceeds a quarter of the smallest period"
        )
    w = int(np.floor(delta * spec.m + 1e-12))
    if w == 0:
        return DiscreteField(spec, np.zeros(spec.shape))
    size = 2 * w + 1
    hi = ndimage.maximum_filter(f.values, size=size, mode="wrap")
    lo = ndimage.minimum_filter(f.values, size=size, mode="wrap")
    return DiscreteField(spec, np.maximum(hi - f.values, f.values - lo))
