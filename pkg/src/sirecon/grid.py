"""Discretized function model on a periodic torus.

Fields live on a uniform grid over a (d+1)-dimensional torus: the first
axis has integer period ``L1``, the remaining ``d`` axes share period
``L2``, and every axis carries ``m`` grid cells per unit length.  Values
are attached to cell midpoints, i.e. coordinate ``(j + 0.5) / m`` along
each axis, and all integrals are midpoint-rule sums with cell volume
``(1/m)**(d+1)``.  One quadrature rule everywhere keeps the operator
identities used elsewhere exact at the discrete level.

Kernels (generators and averaging functions) are described symbolically
by :class:`KernelSpec` so they can be evaluated both on the midpoint grid
(`rasterize`) and at arbitrary real offsets (sample acquisition).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "DiscreteField",
    "KernelSpec",
    "rasterize",
    "integrate",
    "convolve",
    "convolve_kernel",
    "lin_comb",
    "reflect_conjugate",
    "translate_cells",
]


class GridError(ValueError):
    """Invalid grid, kernel, or field combination."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform midpoint grid on the torus [0,L1) x [0,L2)^d.

    d is the number of trailing axes; the total dimension is d+1.
    """

    d: int = 1
    periods: tuple[int, int] = (8, 8)
    m: int = 16

    def __post_init__(self):
        if self.d < 1:
            raise GridError(f"d must be >= 1, got {self.d}")
        if len(self.periods) != 2:
            raise GridError("periods must be (L1, L2)")
        if any(int(p) != p or p < 4 for p in self.periods):
            raise GridError(f"periods must be integers >= 4, got {self.periods}")
        if int(self.m) != self.m or self.m < 4:
            raise GridError(f"m must be an integer >= 4, got {self.m}")

    @property
    def ndim(self) -> int:
        return self.d + 1

    @property
    def extents(self) -> tuple[int, ...]:
        """Per-axis period lengths (L1, L2, ..., L2)."""
        return (self.periods[0],) + (self.periods[1],) * self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.m * e for e in self.extents)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def cell_volume(self) -> float:
        return (1.0 / self.m) ** self.ndim

    def midpoints(self, axis: int) -> np.ndarray:
        """Cell-midpoint coordinates along one axis."""
        n = self.shape[axis]
        return (np.arange(n) + 0.5) / self.m

    def wrap(self, x: np.ndarray | float, axis: int) -> np.ndarray:
        """Wrap coordinates to the symmetric interval [-L/2, L/2)."""
        ell = self.extents[axis]
        return ((np.asarray(x, dtype=float) + ell / 2.0) % ell) - ell / 2.0

    def nearest_cell(self, point: np.ndarray) -> tuple[int, ...]:
        """Index of the grid cell whose midpoint is nearest to a point."""
        idx = []
        for ax in range(self.ndim):
            n = self.shape[ax]
            idx.append(int(np.floor(point[ax] * self.m)) % n)
        return tuple(idx)


@dataclass(frozen=True)
class DiscreteField:
    """Real values on the midpoint grid of ``spec``; immutable once built."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.spec.shape:
            raise GridError(f"values shape {v.shape} != grid shape {self.spec.shape}")
        if not np.all(np.isfinite(v)):
            raise GridError("field contains non-finite values")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, idx):
        return self.values[idx]


# ---------------------------------------------------------------------------
# kernel catalog
# ---------------------------------------------------------------------------

_SHAPES = ("box", "tent", "bspline", "gauss")


def _bspline_profile(t: np.ndarray, order: int) -> np.ndarray:
    """Centered cardinal B-spline of the given order, support [-order/2, order/2].

    Order 1 is the unit box, order 2 the tent; evaluated with the
    truncated-power closed form.
    """
    t = np.asarray(t, dtype=float)
    if order == 1:
        return (np.abs(t) <= 0.5).astype(float)
    out = np.zeros_like(t)
    fact = math.factorial(order - 1)
    for j in range(order + 1):
        out += ((-1) ** j * math.comb(order, j)) * np.maximum(t + order / 2.0 - j, 0.0) ** (order - 1)
    out /= fact
    # clamp tiny negative residue from cancellation outside the support
    out[np.abs(t) >= order / 2.0] = 0.0
    return out


@dataclass(frozen=True)
class KernelSpec:
    """Compactly supported tensor-product kernel.

    The value at x is ``amplitude * prod_i profile((x_i - center_i) / scale_i)``
    where the 1-D profile is selected by ``shape``:

    * ``box``     -- indicator of [-1/2, 1/2] (closed ends)
    * ``tent``    -- hat on [-1, 1]
    * ``bspline`` -- centered cardinal B-spline of ``order`` (1=box, 2=tent,
      3=quadratic, 4=cubic), support [-order/2, order/2]
    * ``gauss``   -- truncated Gaussian exp(-t^2/(2 sigma^2)) minus its value
      at the cutoff, support [-sigma*cutoff, sigma*cutoff]; the pedestal
      subtraction keeps it continuous.
    """

    shape: str
    order: int = 4
    sigma: float = 0.5
    cutoff: float = 3.0
    scale: float | tuple[float, ...] = 1.0
    center: float | tuple[float, ...] = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.shape not in _SHAPES:
            raise GridError(f"unknown kernel shape {self.shape!r}; choose from {_SHAPES}")
        if self.shape == "bspline" and self.order not in (1, 2, 3, 4):
            raise GridError(f"bspline order must be in 1..4, got {self.order}")
        if self.shape == "gauss" and (self.sigma <= 0 or self.cutoff <= 0):
            raise GridError("gauss kernel needs sigma > 0 and cutoff > 0")

    def _per_axis(self, val, ndim: int) -> tuple[float, ...]:
        if np.isscalar(val):
            return (float(val),) * ndim
        t = tuple(float(v) for v in val)
        if len(t) != ndim:
            raise GridError(f"expected {ndim} per-axis entries, got {len(t)}")
        return t

    def scales(self, ndim: int) -> tuple[float, ...]:
        return self._per_axis(self.scale, ndim)

    def centers(self, ndim: int) -> tuple[float, ...]:
        return self._per_axis(self.center, ndim)

    @property
    def base_radius(self) -> float:
        """Support half-width of the unscaled 1-D profile."""
        if self.shape == "box":
            return 0.5
        if self.shape == "tent":
            return 1.0
        if self.shape == "bspline":
            return self.order / 2.0
        return self.sigma * self.cutoff

    def support_radii(self, ndim: int) -> tuple[float, ...]:
        return tuple(self.base_radius * s for s in self.scales(ndim))

    def profile(self, t: np.ndarray) -> np.ndarray:
        """Evaluate the unscaled 1-D profile."""
        t = np.asarray(t, dtype=float)
        if self.shape == "box":
            return (np.abs(t) <= 0.5).astype(float)
        if self.shape == "tent":
            return np.maximum(0.0, 1.0 - np.abs(t))
        if self.shape == "bspline":
            return _bspline_profile(t, self.order)
        r = self.sigma * self.cutoff
        out = np.exp(-(t / self.sigma) ** 2 / 2.0) - np.exp(-self.cutoff**2 / 2.0)
        out = np.maximum(out, 0.0)
        out[np.abs(t) > r] = 0.0
        return out

    def evaluate_axes(self, offsets: list[np.ndarray]) -> list[np.ndarray]:
        """Per-axis profile factors at given (already wrapped) offsets."""
        ndim = len(offsets)
        sc = self.scales(ndim)
        ce = self.centers(ndim)
        return [self.profile((off - ce[ax]) / sc[ax]) for ax, off in enumerate(offsets)]

    def evaluate_grid(self, offsets: list[np.ndarray]) -> np.ndarray:
        """Tensor-product evaluation; offsets are per-axis 1-D arrays."""
        axes = self.evaluate_axes(offsets)
        out = axes[0]
        for a in axes[1:]:
            out = np.multiply.outer(out, a)
        return self.amplitude * out

    def with_amplitude(self, amplitude: float) -> "KernelSpec":
        return KernelSpec(self.shape, self.order, self.sigma, self.cutoff,
                          self.scale, self.center, amplitude)

    def reflected(self) -> "KernelSpec":
        """Kernel x -> k(-x); profiles are even so only the center flips."""
        c = self.center
        flipped = tuple(-v for v in c) if not np.isscalar(c) else -c
        return KernelSpec(self.shape, self.order, self.sigma, self.cutoff,
                          self.scale, flipped, self.amplitude)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def rasterize(kernel: KernelSpec, spec: GridSpec) -> DiscreteField:
    """Evaluate a kernel at every grid midpoint, wrapped periodically.

    Rejects kernels whose support diameter reaches any period: such a
    kernel would overlap its own periodic images and alias.
    """
    radii = kernel.support_radii(spec.ndim)
    centers = kernel.centers(spec.ndim)
    for ax, r in enumerate(radii):
        if 2.0 * r >= spec.extents[ax]:
            raise GridError(
                f"kernel support diameter {2 * r} on axis {ax} must be "
                f"smaller than the period {spec.extents[ax]}"
            )
    offsets = [spec.wrap(spec.midpoints(ax) - centers[ax], ax) + centers[ax]
               for ax in range(spec.ndim)]
    return DiscreteField(spec, kernel.evaluate_grid(offsets))


def integrate(f: DiscreteField) -> float:
    """Midpoint-rule integral over the whole torus."""
    return float(f.values.sum()) * f.spec.cell_volume


def _require_same_spec(*fields: DiscreteField) -> GridSpec:
    spec = fields[0].spec
    for g in fields[1:]:
        if g.spec != spec:
            raise GridError("fields live on different grids")
    return spec


def convolve(f: DiscreteField, g: DiscreteField) -> DiscreteField:
    """Periodic discrete convolution with the quadrature weight.

    ``(f*g)[i] = (1/m)^(d+1) * sum_j f[j] g[i-j]`` with periodic index
    arithmetic; commutative up to rounding.
    """
    spec = _require_same_spec(f, g)
    F = np.fft.rfftn(f.values)
    G = np.fft.rfftn(g.values)
    out = np.fft.irfftn(F * G, s=spec.shape, axes=tuple(range(spec.ndim))) * spec.cell_volume
    return DiscreteField(spec, out)


def convolve_kernel(f: DiscreteField, kernel: KernelSpec) -> DiscreteField:
    """Convolve a field with a kernel sampled at exact grid offsets.

    Output value at midpoint x_i is ``(1/m)^(d+1) * sum_c f[c] k(x_i - x_c)``.
    Midpoint differences are integer multiples of 1/m, so the kernel is
    evaluated on the offset lattice ``t/m`` rather than re-using a midpoint
    rasterization; this keeps the result aligned with inner products taken
    against kernels shifted to grid positions.
    """
    spec = f.spec
    radii = kernel.support_radii(spec.ndim)
    for ax, r in enumerate(radii):
        if 2.0 * r >= spec.extents[ax]:
            raise GridError("kernel support too large for this torus")
    centers = kernel.centers(spec.ndim)
    lattice = [spec.wrap(np.arange(spec.shape[ax]) / spec.m - centers[ax], ax) + centers[ax]
               for ax in range(spec.ndim)]
    lat = kernel.evaluate_grid(lattice)
    F = np.fft.rfftn(f.values)
    G = np.fft.rfftn(lat)
    out = np.fft.irfftn(F * G, s=spec.shape, axes=tuple(range(spec.ndim))) * spec.cell_volume
    return DiscreteField(spec, out)


def lin_comb(terms: list[tuple[float, DiscreteField]]) -> DiscreteField:
    """Pointwise linear combination ``sum_k a_k f_k``."""
    if not terms:
        raise GridError("lin_comb needs at least one term")
    spec = _require_same_spec(*[f for _, f in terms])
    out = np.zeros(spec.shape)
    for a, f in terms:
        out += a * f.values
    return DiscreteField(spec, out)


def reflect_conjugate(f: DiscreteField) -> DiscreteField:
    """Field x -> conj(f(-x)) on the torus; identity conjugation for real data.

    Midpoint grids are closed under negation: ``-(j+0.5)/m`` is the midpoint
    with index ``-j-1`` (mod n), so the reflection is exact.
    """
    axes = tuple(range(f.spec.ndim))
    # values are real throughout; conjugation would act here for complex data
    return DiscreteField(f.spec, np.flip(f.values, axis=axes))


def translate_cells(f: DiscreteField, cells: tuple[int, ...]) -> DiscreteField:
    """Translate a field by whole grid cells (periodic)."""
    if len(cells) != f.spec.ndim:
        raise GridError("translation needs one cell offset per axis")
    return DiscreteField(f.spec, np.roll(f.values, cells, axis=tuple(range(f.spec.ndim))))
