"""Nonuniform sampling sets, density certificates, partitions of unity,
and average-sample acquisition.

The partition of unity is a hard Voronoi assignment: every grid cell
belongs to its nearest sample under the torus Euclidean metric, ties to
the lowest sample index.  Indicator weights satisfy the partition
properties exactly and make the spread operators a single gather.

Averaging kernels are evaluated at exact real sample positions against
the midpoint grid and normalized per sample so the measurement functional
has unit mass in the package's own quadrature.  Signed kernels are built
from two nested boxes whose component masses are chosen to hit a
prescribed absolute integral above one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .grid import DiscreteField, GridError, GridSpec, KernelSpec

__all__ = [
    "SamplingSet",
    "Bupu",
    "AveragingKernelSet",
    "generate_sampling_set",
    "verify_density",
    "build_bupu",
    "make_kernels",
    "acquire_samples",
    "save_sampling_set",
    "load_sampling_set",
]


@dataclass(frozen=True)
class SamplingSet:
    """Points on the torus with a nominal covering radius."""

    points: np.ndarray = field(repr=False)
    structure: str = "scattered"
    gamma_nominal: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise GridError("sampling set must be a nonempty (n, d+1) array")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.structure not in ("product", "scattered"):
            raise GridError(f"unknown sampling structure {self.structure!r}")

    def __len__(self) -> int:
        return self.points.shape[0]


def generate_sampling_set(mode: str, spec: GridSpec, seed,
                          s: float | None = None, eta: float = 0.0,
                          n: int | None = None,
                          structure: str = "scattered",
                          gamma: float | None = None) -> SamplingSet:
    """Draw a sampling set: a jittered grid or uniform random points.

    Jittered mode places one point per spacing-s cell (per-axis counts are
    rounded so the lattice tiles the torus) and displaces it by uniform
    jitter up to eta per coordinate.  ``structure="product"`` jitters each
    axis list once and forms the product; ``"scattered"`` jitters every
    point independently.
    """
    rng = np.random.default_rng(seed)
    extents = spec.extents
    if mode == "jittered":
        if s is None or not (0 < s < min(extents)):
            raise GridError("jittered mode needs 0 < s < min period")
        if not (0 <= eta < s / 2):
            raise GridError("jitter must satisfy 0 <= eta < s/2")
        counts = [max(1, int(round(e / s))) for e in extents]
        axes = [(np.arange(c) + 0.5) * (e / c) for c, e in zip(counts, extents)]
        if structure == "product":
            axes = [(ax + rng.uniform(-eta, eta, size=ax.shape)) % e
                    for ax, e in zip(axes, extents)]
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([g.ravel() for g in mesh], axis=-1)
        else:
            mesh = np.meshgrid(*axes, indexing="ij")
            pts = np.stack([g.ravel() for g in mesh], axis=-1)
            pts = pts + rng.uniform(-eta, eta, size=pts.shape)
            pts = pts % np.asarray(extents, dtype=float)
    elif mode == "random":
        if n is None or n < 1:
            raise GridError("random mode needs n >= 1")
        pts = rng.random((n, spec.ndim)) * np.asarray(extents, dtype=float)
        structure = "scattered"
    else:
        raise GridError(f"unknown sampling mode {mode!r}")
    return SamplingSet(pts, structure, float(gamma) if gamma is not None else 0.0)


def _axis_coord_grids(spec: GridSpec) -> list[np.ndarray]:
    """Flat per-axis midpoint coordinates of every grid cell."""
    idx = np.indices(spec.shape).reshape(spec.ndim, -1)
    return [(idx[ax] + 0.5) / spec.m for ax in range(spec.ndim)]


def _nearest_sample(X: SamplingSet, spec: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell (squared distance, index) of the nearest sample.

    Samples are scanned in increasing index with a strict-improvement
    update, so ties resolve to the lowest index.
    """
    coords = _axis_coord_grids(spec)
    extents = spec.extents
    best = np.full(spec.size, np.inf)
    assign = np.zeros(spec.size, dtype=np.int64)
    for j, p in enumerate(X.points):
        d2 = np.zeros(spec.size)
        for ax in range(spec.ndim):
            dx = np.abs(coords[ax] - p[ax])
            dx = np.minimum(dx, extents[ax] - dx)
            d2 += dx * dx
        closer = d2 < best
        best[closer] = d2[closer]
        assign[closer] = j
    return best, assign


def verify_density(X: SamplingSet, gamma: float, spec: GridSpec) -> tuple[bool, float]:
    """Covering check at grid resolution.

    worst_gap is the largest torus-Euclidean distance from a grid midpoint
    to its nearest sample; the set is certified gamma-dense when it is
    below gamma.
    """
    if gamma <= 0:
        raise GridError("gamma must be positive")
    best, _ = _nearest_sample(X, spec)
    worst = float(np.sqrt(best.max()))
    return worst < gamma, worst


@dataclass(frozen=True)
class Bupu:
    """Hard Voronoi partition of unity: one owning sample per grid cell."""

    X: SamplingSet
    spec: GridSpec
    assignment: np.ndarray = field(repr=False)
    nearest_dist: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.assignment)
        if a.shape != self.spec.shape:
            raise GridError("assignment shape does not match the grid")
        object.__setattr__(self, "assignment", a)

    def weight_field(self, j: int) -> DiscreteField:
        """Indicator weight of one sample as a field."""
        return DiscreteField(self.spec, (self.assignment == j).astype(float))


def build_bupu(X: SamplingSet, spec: GridSpec) -> Bupu:
    """Assign each grid cell to its nearest sample (ties to lowest index)."""
    best, assign = _nearest_sample(X, spec)
    return Bupu(X, spec, assign.reshape(spec.shape), np.sqrt(best).reshape(spec.shape))


# ---------------------------------------------------------------------------
# averaging kernels
# ---------------------------------------------------------------------------

_AVG_SHAPES = ("box", "tent", "signed")


class AveragingKernelSet:
    """Measurement functionals: one averaging kernel per sample position.

    In ``single`` mode every sample shares one centered kernel profile; in
    ``per_sample`` mode seeded center offsets (up to ``offset_fraction * a``
    per coordinate) move each kernel, and its half-width shrinks to
    ``a - |offset|`` so the support stays inside the sample's [-a, a] cube.
    Component masses are renormalized against the grid quadrature per
    sample, which makes every measurement of a constant field exact.
    """

    def __init__(self, mode: str, shape: str, a: float, spec: GridSpec,
                 m_target: float = 1.0, offsets: np.ndarray | None = None,
                 inner_ratio: float = 0.5):
        if mode not in ("single", "per_sample"):
            raise GridError(f"unknown averaging mode {mode!r}")
        if shape not in _AVG_SHAPES:
            raise GridError(f"averaging kernel shape must be one of {_AVG_SHAPES}")
        if a > min(spec.extents) / 8.0:
            raise GridError(f"kernel half-width {a} exceeds min period / 8")
        if a <= 0:
            raise GridError("kernel half-width must be positive")
        if shape == "signed":
            if m_target < 1.0:
                raise GridError("signed kernels need M_target >= 1")
            if not (0 < inner_ratio < 1):
                raise GridError("inner_ratio must lie in (0, 1)")
        elif abs(m_target - 1.0) > 1e-12:
            raise GridError("nonnegative kernel shapes have absolute mass 1; "
                            "use shape 'signed' for M_target > 1")
        self.mode = mode
        self.shape = shape
        self.a = float(a)
        self.spec = spec
        self.m_target = float(m_target)
        self.inner_ratio = float(inner_ratio)
        self.offsets = None if offsets is None else np.asarray(offsets, dtype=float)
        if self.offsets is not None and np.max(np.abs(self.offsets), initial=0.0) > a / 4 + 1e-12:
            raise GridError("per-sample center offsets must stay within a/4")
        self._realized = 0.0
        self._plans: dict = {}

    @property
    def M(self) -> float:
        """Max quadrature absolute mass over samples (target until realized)."""
        return self._realized if self._realized > 0 else self.m_target

    def components(self) -> list[tuple[float, str, float]]:
        """(target mass, profile, half-width ratio) for each component."""
        if self.shape == "signed":
            rho = self.inner_ratio ** self.spec.ndim
            alpha = (self.m_target + 1.0) / (2.0 * (1.0 - rho))
            return [(alpha, "box", 1.0), (-(alpha - 1.0), "box", self.inner_ratio)]
        return [(1.0, self.shape, 1.0)]

    def half_width(self, offset: np.ndarray | None) -> float:
        if offset is None:
            return self.a
        return self.a - float(np.max(np.abs(offset)))

    def single_kernel(self) -> KernelSpec:
        """The shared centered kernel, normalized to unit lattice mass.

        Only available for the plain shapes; used to compare acquisition
        against convolution along the offset lattice.
        """
        if self.shape == "signed":
            raise GridError("signed sets have no single kernel profile")
        scale = 2 * self.a if self.shape == "box" else self.a
        k = KernelSpec(self.shape, scale=scale)
        lattice = [self.spec.wrap(np.arange(n) / self.spec.m, ax)
                   for ax, n in enumerate(self.spec.shape)]
        mass = float(k.evaluate_grid(lattice).sum()) * self.spec.cell_volume
        return k.with_amplitude(1.0 / mass)

    # -- weight plans -------------------------------------------------------

    def plan(self, X: SamplingSet, spec: GridSpec, snap: bool = False) -> sparse.csr_matrix:
        """Quadrature weight matrix: row j maps a flat field to sample j's value."""
        if spec != self.spec:
            raise GridError("kernel set was built for a different grid")
        key = (snap, X.points.tobytes())
        if key not in self._plans:
            self._plans[key] = self._build_plan(X, snap)
        return self._plans[key]

    def _build_plan(self, X: SamplingSet, snap: bool) -> sparse.csr_matrix:
        spec = self.spec
        h = spec.cell_volume
        m = spec.m
        shape = spec.shape
        ns = len(X)
        if self.offsets is not None and self.offsets.shape != (ns, spec.ndim):
            raise GridError("per-sample offsets do not match the sampling set")
        comps = self.components()
        rows, cols, vals = [], [], []
        realized = 0.0
        for j in range(ns):
            off = None if self.offsets is None else self.offsets[j]
            z = X.points[j].astype(float).copy()
            if snap:
                z = np.array([(np.floor(z[ax] * m) + 0.5) / m for ax in range(spec.ndim)])
            if off is not None:
                z = z + off
            w = self.half_width(off)
            if w <= 0:
                raise GridError(f"sample {j}: offset leaves no kernel width")
            # candidate window covering the widest component
            idx_axes, off_axes = [], []
            for ax in range(spec.ndim):
                lo = int(np.floor((z[ax] - w) * m - 0.5)) - 1
                hi = int(np.ceil((z[ax] + w) * m - 0.5)) + 1
                idx = np.arange(lo, hi + 1)
                off_axes.append(spec.wrap((idx + 0.5) / m - z[ax], ax))
                idx_axes.append(idx % shape[ax])
            local = np.zeros([len(ix) for ix in idx_axes])
            for mass, prof, ratio in comps:
                radius = w * ratio
                scale = 2 * radius if prof == "box" else radius
                k = KernelSpec(prof, scale=scale)
                term = k.evaluate_grid(off_axes)
                q = float(term.sum()) * h
                if q <= 0:
                    raise GridError(
                        f"sample {j}: kernel window contains no grid mass "
                        "(half-width below grid resolution?)"
                    )
                local += (mass / q) * term
            total = float(local.sum()) * h
            if abs(total - 1.0) > 1e-10:
                raise GridError(f"sample {j}: normalization failed (mass {total!r})")
            realized = max(realized, float(np.abs(local).sum()) * h)
            # mixed-radix flat indices of the local window
            mesh = np.meshgrid(*idx_axes, indexing="ij")
            flat_idx = np.ravel_multi_index([g.ravel() for g in mesh], shape)
            nz = local.ravel() != 0.0
            cols.append(flat_idx[nz])
            vals.append(local.ravel()[nz] * h)
            rows.append(np.full(int(nz.sum()), j, dtype=np.int64))
        self._realized = max(self._realized, realized)
        mat = sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(ns, spec.size),
        )
        return mat


def make_kernels(mode: str, shape: str, a: float, X: SamplingSet | None,
                 m_target: float, seed, spec: GridSpec,
                 offset_fraction: float = 0.25,
                 inner_ratio: float = 0.5) -> AveragingKernelSet:
    """Build the averaging functionals for a sampling geometry.

    Single mode ignores X and centers one kernel profile at every sample.
    Per-sample mode draws seeded center offsets up to ``offset_fraction*a``
    per coordinate; the realized maximal absolute mass is recorded on the
    returned set once weights are materialized.
    """
    offsets = None
    if mode == "per_sample":
        if X is None:
            raise GridError("per_sample mode needs the sampling set")
        if not (0 <= offset_fraction <= 0.25):
            raise GridError("offset_fraction must lie in [0, 1/4]")
        rng = np.random.default_rng(seed)
        offsets = rng.uniform(-offset_fraction * a, offset_fraction * a,
                              size=(len(X), spec.ndim))
        if offset_fraction == 0:
            offsets = np.zeros((len(X), spec.ndim))
    ks = AveragingKernelSet(mode, shape, a, spec, m_target, offsets, inner_ratio)
    if X is not None:
        ks.plan(X, spec)  # materialize once: validates masses, records M
    return ks


def acquire_samples(f: DiscreteField, kernels: AveragingKernelSet,
                    X: SamplingSet, snap: bool = False) -> np.ndarray:
    """Average samples: quadrature inner products of f with each kernel.

    With ``snap=True`` kernel centers move to the nearest grid midpoints
    first (the fast path that matches convolution along the grid exactly);
    the default keeps exact real positions.
    """
    plan = kernels.plan(X, f.spec, snap=snap)
    return plan @ f.values.ravel()


# ---------------------------------------------------------------------------
# sampling-set files
# ---------------------------------------------------------------------------


def save_sampling_set(X: SamplingSet, path) -> None:
    """One point per line, d+1 comma-separated columns, gamma in the header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# gamma={X.gamma_nominal!r}\n")
        for p in X.points:
            fh.write(",".join(repr(float(v)) for v in p) + "\n")


def load_sampling_set(path) -> SamplingSet:
    gamma = 0.0
    pts = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "gamma=" in line:
                    gamma = float(line.split("gamma=", 1)[1])
                continue
            pts.append([float(tok) for tok in line.split(",")])
    if not pts:
        raise GridError(f"no sampling points in {path}")
    return SamplingSet(np.asarray(pts), "scattered", gamma)
