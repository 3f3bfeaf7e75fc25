"""Shift-invariant space built from integer translates of a generator bank.

Members are finite sums ``f = sum_i sum_k c_i(k) phi_i(. - k)`` over the
integer lattice of the torus, with one lattice coefficient array per
generator.  The module provides synthesis, the Gram system of grid inner
products between translates, the grid-L2 orthogonal projection onto the
space, and Monte-Carlo estimates of the norm-equivalence (Riesz) bounds
and of the projection's operator norm in mixed norms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .grid import DiscreteField, GridError, GridSpec, KernelSpec, rasterize
from .norms import MixedExponents, mixed_lebesgue_norm, mixed_seq_norm

__all__ = [
    "GeneratorBank",
    "CoefficientArray",
    "GramOperator",
    "NormEquivalence",
    "default_bank",
    "synthesize",
    "build_gram",
    "project",
    "estimate_norm_equivalence",
    "estimate_projection_norm",
]

# translate stacks above this many elements are rebuilt on the fly
_STACK_CACHE_LIMIT = 40_000_000


@dataclass(frozen=True)
class GeneratorBank:
    """Compactly supported generators with their rasterizations."""

    spec: GridSpec
    kernels: tuple[KernelSpec, ...]
    rasterized: tuple[DiscreteField, ...] = field(repr=False, default=())

    def __post_init__(self):
        if not self.kernels:
            raise GridError("generator bank needs at least one kernel")
        if not self.rasterized:
            object.__setattr__(
                self, "rasterized", tuple(rasterize(k, self.spec) for k in self.kernels)
            )
        for f in self.rasterized:
            if f.spec != self.spec:
                raise GridError("rasterized generator on wrong grid")

    @property
    def r(self) -> int:
        return len(self.kernels)

    @property
    def lattice_shape(self) -> tuple[int, ...]:
        return self.spec.extents

    @property
    def lattice_size(self) -> int:
        return int(np.prod(self.lattice_shape))


def default_bank(spec: GridSpec, r: int = 1) -> GeneratorBank:
    """Standard banks: cubic tensor B-spline; r=2 adds a dilated quadratic.

    The second generator is scaled by 0.75: at unit scale every B-spline
    family sums to one over the integer lattice, so two unscaled families
    are linearly dependent on the torus and the Gram system is singular.
    """
    kernels = [KernelSpec("bspline", order=4)]
    if r >= 2:
        kernels.append(KernelSpec("bspline", order=3, scale=0.75))
    if r > 2:
        raise GridError("default banks provide r in {1, 2}")
    return GeneratorBank(spec, tuple(kernels[:r]))


@dataclass(frozen=True)
class CoefficientArray:
    """Lattice coefficients, one array per generator, periodic indexing."""

    r: int
    lattice_shape: tuple[int, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        expected = (self.r,) + self.lattice_shape
        if e.shape != expected:
            raise GridError(f"entries shape {e.shape} != {expected}")
        if not np.all(np.isfinite(e)):
            raise GridError("coefficients contain non-finite values")
        object.__setattr__(self, "entries", e)

    @classmethod
    def zeros(cls, bank: GeneratorBank) -> "CoefficientArray":
        return cls(bank.r, bank.lattice_shape, np.zeros((bank.r,) + bank.lattice_shape))

    def ravel(self) -> np.ndarray:
        return self.entries.reshape(-1)

    def seq_norm(self, i: int, e: MixedExponents) -> float:
        return mixed_seq_norm(self, i, e)


def _coeffs_like(bank: GeneratorBank, flat: np.ndarray) -> CoefficientArray:
    return CoefficientArray(bank.r, bank.lattice_shape,
                            flat.reshape((bank.r,) + bank.lattice_shape))


def _translate_stack(bank: GeneratorBank) -> np.ndarray:
    """All integer translates of all generators, shape (r*K, grid size).

    Row order: generator-major, then lattice index in C order; translate k
    shifts the raster by k*m cells along each axis.
    """
    spec = bank.spec
    K = bank.lattice_size
    rows = np.empty((bank.r * K, spec.size))
    axes = tuple(range(spec.ndim))
    i = 0
    for f in bank.rasterized:
        for k in np.ndindex(*bank.lattice_shape):
            shift = tuple(kk * spec.m for kk in k)
            rows[i] = np.roll(f.values, shift, axis=axes).ravel()
            i += 1
    return rows


def synthesize(c: CoefficientArray, bank: GeneratorBank) -> DiscreteField:
    """Sum of integer-translated generators weighted by the coefficients."""
    if c.r != bank.r or c.lattice_shape != bank.lattice_shape:
        raise GridError("coefficient extents do not match the bank")
    spec = bank.spec
    out = np.zeros(spec.shape)
    axes = tuple(range(spec.ndim))
    for i, f in enumerate(bank.rasterized):
        ci = c.entries[i]
        for k in np.ndindex(*bank.lattice_shape):
            w = ci[k]
            if w == 0.0:
                continue
            shift = tuple(kk * spec.m for kk in k)
            out += w * np.roll(f.values, shift, axis=axes)
    return DiscreteField(spec, out)


class GramOperator:
    """Grid inner products between all generator translates, solver-ready.

    The matrix is symmetric positive definite for a Riesz bank; it is
    Cholesky-factored once and reused across solves.  A cached stack of
    translate rasters accelerates synthesis/analysis matvecs on grids where
    it fits in memory.
    """

    def __init__(self, bank: GeneratorBank):
        self.bank = bank
        spec = bank.spec
        h = spec.cell_volume
        K = bank.lattice_size
        r = bank.r
        shape = bank.lattice_shape
        axes = tuple(range(spec.ndim))

        # correlation of raster pairs at all lattice shifts; the Gram entry
        # for translates k, k' of generators i, i' is h * corr_{i i'}[k - k']
        corr = np.empty((r, r) + shape)
        for i in range(r):
            vi = bank.rasterized[i].values
            for j in range(r):
                vj = bank.rasterized[j].values
                for k in np.ndindex(*shape):
                    shift = tuple(kk * spec.m for kk in k)
                    corr[i, j][k] = float(np.vdot(vi, np.roll(vj, shift, axis=axes)))
        corr *= h

        G = np.empty((r * K, r * K))
        lattice = list(np.ndindex(*shape))
        for i in range(r):
            for j in range(r):
                block = np.empty((K, K))
                for a, ka in enumerate(lattice):
                    for b, kb in enumerate(lattice):
                        diff = tuple((kb[t] - ka[t]) % shape[t] for t in range(len(shape)))
                        block[a, b] = corr[i, j][diff]
                G[i * K:(i + 1) * K, j * K:(j + 1) * K] = block
        G = 0.5 * (G + G.T)

        eigs = np.linalg.eigvalsh(G)
        self.eig_min = float(eigs[0])
        self.eig_max = float(eigs[-1])
        if self.eig_min < 1e-10 * self.eig_max:
            raise GridError(
                "Gram system is numerically singular "
                f"(eig range [{self.eig_min:.3e}, {self.eig_max:.3e}]); "
                "the bank's translates are not a Riesz system on this torus"
            )
        self.matrix = G
        self._cho = scipy.linalg.cho_factor(G)
        self._stack: np.ndarray | None = None

    @property
    def stack(self) -> np.ndarray | None:
        """Translate rasters as rows, cached when small enough."""
        if self._stack is None:
            if self.bank.lattice_size * self.bank.r * self.bank.spec.size <= _STACK_CACHE_LIMIT:
                self._stack = _translate_stack(self.bank)
        return self._stack

    def analysis(self, g: DiscreteField) -> np.ndarray:
        """Inner products of a field with every translate, flat vector."""
        h = self.bank.spec.cell_volume
        st = self.stack
        if st is not None:
            return h * (st @ g.values.ravel())
        spec = self.bank.spec
        axes = tuple(range(spec.ndim))
        out = np.empty(self.bank.r * self.bank.lattice_size)
        i = 0
        for f in self.bank.rasterized:
            for k in np.ndindex(*self.bank.lattice_shape):
                shift = tuple(kk * spec.m for kk in k)
                out[i] = h * float(np.vdot(np.roll(f.values, shift, axis=axes), g.values))
                i += 1
        return out

    def synthesis(self, flat: np.ndarray) -> DiscreteField:
        st = self.stack
        if st is not None:
            return DiscreteField(self.bank.spec,
                                 (flat @ st).reshape(self.bank.spec.shape))
        return synthesize(_coeffs_like(self.bank, flat), self.bank)

    def solve(self, rhs: np.ndarray) -> tuple[np.ndarray, float]:
        """Solve G c = rhs with one refinement step; returns (c, rel residual)."""
        c = scipy.linalg.cho_solve(self._cho, rhs)
        res = rhs - self.matrix @ c
        c = c + scipy.linalg.cho_solve(self._cho, res)
        res = rhs - self.matrix @ c
        scale = float(np.linalg.norm(rhs))
        rel = float(np.linalg.norm(res)) / scale if scale > 0 else 0.0
        return c, rel


def build_gram(bank: GeneratorBank) -> GramOperator:
    """Assemble and factor the Gram system of the bank's translates."""
    return GramOperator(bank)


def project(g: DiscreteField, gram: GramOperator) -> CoefficientArray:
    """Grid-L2 orthogonal projection of a field onto the space.

    Solves the normal equations against the translate inner products; the
    relative residual is checked against the 1e-10 contract.
    """
    if g.spec != gram.bank.spec:
        raise GridError("field is not on the bank's grid")
    b = gram.analysis(g)
    c, rel = gram.solve(b)
    if rel > 1e-10:
        raise GridError(f"normal-equation solve did not converge: residual {rel:.3e}")
    return _coeffs_like(gram.bank, c)


@dataclass(frozen=True)
class NormEquivalence:
    """Observed two-sided bounds between coefficient and function norms."""

    d1: float
    d2: float
    trials: int
    exponents: MixedExponents

    def __post_init__(self):
        if self.d1 > self.d2:
            raise GridError("norm-equivalence bounds are out of order")


def _coeff_ratio(c: CoefficientArray, bank: GeneratorBank, e: MixedExponents) -> float:
    num = np.sqrt(sum(mixed_seq_norm(c, i, e) ** 2 for i in range(bank.r)))
    den = mixed_lebesgue_norm(synthesize(c, bank), e)
    return num / den


def estimate_norm_equivalence(bank: GeneratorBank, e: MixedExponents,
                              trials: int, seed: int) -> NormEquivalence:
    """Monte-Carlo bracket of the coefficient/function norm comparability.

    Draws uniform [-1, 1] coefficient arrays and records the min and max of
    (sum_i ||c_i||^2)^{1/2} / ||synthesize(c)||.
    """
    if trials < 10:
        raise GridError("need at least 10 trials")
    rng = np.random.default_rng(seed)
    lo, hi = np.inf, 0.0
    for _ in range(trials):
        while True:
            arr = rng.uniform(-1.0, 1.0, size=(bank.r,) + bank.lattice_shape)
            c = CoefficientArray(bank.r, bank.lattice_shape, arr)
            f = synthesize(c, bank)
            if mixed_lebesgue_norm(f, e) > 0:
                break
        ratio = _coeff_ratio(c, bank, e)
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return NormEquivalence(lo, hi, trials, e)


def estimate_projection_norm(gram: GramOperator, e: MixedExponents,
                             trials: int, seed: int) -> float:
    """Monte-Carlo lower estimate of the projection's mixed-norm operator norm."""
    if trials < 10:
        raise GridError("need at least 10 trials")
    rng = np.random.default_rng(seed)
    bank = gram.bank
    best = 0.0
    for _ in range(trials):
        g = DiscreteField(bank.spec, rng.uniform(-1.0, 1.0, size=bank.spec.shape))
        pg = synthesize(project(g, gram), bank)
        best = max(best, mixed_lebesgue_norm(pg, e) / mixed_lebesgue_norm(g, e))
    return best
