import numpy as np
import pytest

from sirecon import (CoefficientArray, DiscreteField, GeneratorBank, GridSpec,
                     KernelSpec, MixedExponents, build_gram, default_bank,
                     estimate_norm_equivalence, estimate_projection_norm,
                     mixed_lebesgue_norm, mixed_seq_norm, project, rasterize,
                     synthesize, translate_cells, wiener_amalgam_norm)
from sirecon.grid import GridError, integrate

from conftest import oracle_synthesize, rand_field


def indicator_bank(spec):
    """Unit-cell indicators: translates tile the torus disjointly."""
    return GeneratorBank(spec, (KernelSpec("box", center=(0.5,) * spec.ndim),))


class TestSynthesize:
    def test_single_coefficient_translates_generator(self, tiny_spec):
        bank = default_bank(tiny_spec.__class__(d=1, periods=(6, 6), m=4), 1)
        c = CoefficientArray.zeros(bank)
        arr = c.entries.copy()
        arr[0, 2, 3] = 1.0
        c = CoefficientArray(bank.r, bank.lattice_shape, arr)
        f = synthesize(c, bank)
        want = translate_cells(bank.rasterized[0], (2 * bank.spec.m, 3 * bank.spec.m))
        assert np.array_equal(f.values, want.values)

    def test_zero_coefficients(self, tiny_spec):
        bank = indicator_bank(tiny_spec)
        assert not synthesize(CoefficientArray.zeros(bank), bank).values.any()

    def test_matches_triple_loop_oracle(self):
        spec = GridSpec(d=1, periods=(6, 6), m=4)
        bank = default_bank(spec, 2)
        rng = np.random.default_rng(21)
        c = CoefficientArray(2, bank.lattice_shape,
                             rng.uniform(-1, 1, size=(2,) + bank.lattice_shape))
        f = synthesize(c, bank)
        assert np.max(np.abs(f.values - oracle_synthesize(c, bank))) <= 1e-12

    def test_rejects_extent_mismatch(self, tiny_spec, small_spec):
        bank = indicator_bank(tiny_spec)
        other = indicator_bank(small_spec)
        with pytest.raises(GridError):
            synthesize(CoefficientArray.zeros(other), bank)


class TestGram:
    def test_indicator_translates_are_orthonormal(self, tiny_spec):
        gram = build_gram(indicator_bank(tiny_spec))
        K = gram.matrix.shape[0]
        assert np.max(np.abs(gram.matrix - np.eye(K))) <= 1e-12

    def test_unit_scale_bspline_pair_is_singular(self, default_spec):
        # two partition-of-unity families are linearly dependent on the torus
        bank = GeneratorBank(default_spec, (KernelSpec("bspline", order=4),
                                            KernelSpec("bspline", order=3)))
        with pytest.raises(GridError, match="Riesz"):
            build_gram(bank)

    def test_disjoint_supports_give_block_diagonal(self):
        spec = GridSpec(d=1, periods=(4, 4), m=4)
        bank = GeneratorBank(spec, (
            KernelSpec("box", scale=0.5),
            KernelSpec("box", scale=0.5, center=(0.5, 0.5)),
        ))
        gram = build_gram(bank)
        K = bank.lattice_size
        off = gram.matrix[:K, K:]
        assert not off.any()

    def test_tent_autocorrelation_closed_form(self):
        # the grid quadrature is second order, so matching the exact
        # piecewise-polynomial integrals at 1e-6 needs a fine grid
        spec = GridSpec(d=1, periods=(4, 4), m=320)
        bank = GeneratorBank(spec, (KernelSpec("tent"),))
        gram = build_gram(bank)
        K = bank.lattice_size
        G = gram.matrix.reshape(4, 4, 4, 4)
        diag = G[0, 0, 0, 0]
        neighbor = G[0, 0, 0, 1]
        diag_2d = G[0, 0, 1, 1] if False else None
        # 1-D tent: <t, t> = 2/3, <t, t(.-1)> = 1/6; tensor values are products
        assert diag == pytest.approx((2 / 3) ** 2, abs=1e-6)
        assert neighbor == pytest.approx((2 / 3) * (1 / 6), abs=1e-6)
        assert diag / neighbor == pytest.approx(4.0, abs=1e-5)

    def test_symmetry_and_positive_definiteness(self, default_gram16):
        G = default_gram16.matrix
        assert np.max(np.abs(G - G.T)) <= 1e-10
        assert default_gram16.eig_min > 0


class TestProject:
    def test_restores_space_members(self, default_bank16, default_gram16):
        rng = np.random.default_rng(22)
        c0 = CoefficientArray(1, default_bank16.lattice_shape,
                              rng.uniform(-1, 1, size=(1,) + default_bank16.lattice_shape))
        back = project(synthesize(c0, default_bank16), default_gram16)
        assert np.max(np.abs(back.entries - c0.entries)) <= 1e-9

    def test_zero_field(self, default_bank16, default_gram16):
        z = DiscreteField(default_bank16.spec, np.zeros(default_bank16.spec.shape))
        assert not project(z, default_gram16).entries.any()

    def test_perturbation_in_coverage_gap_is_invisible(self):
        spec = GridSpec(d=1, periods=(4, 4), m=4)
        bank = GeneratorBank(spec, (KernelSpec("box", scale=0.5),))
        gram = build_gram(bank)
        rng = np.random.default_rng(23)
        g = rand_field(spec, rng)
        base = project(g, gram)
        # supports cover only cells nearest the lattice; cell (2, 2) in each
        # unit square is untouched by every translate
        mask = np.zeros(spec.shape)
        mask[2::spec.m, 2::spec.m] = 1.0
        covered = sum(t.values for t in
                      (translate_cells(bank.rasterized[0], (k1 * spec.m, k2 * spec.m))
                       for k1 in range(4) for k2 in range(4)))
        assert not (covered * mask).any()
        poked = DiscreteField(spec, g.values + 5.0 * mask)
        assert np.max(np.abs(project(poked, gram).entries - base.entries)) <= 1e-12

    def test_idempotence(self, default_bank16, default_gram16):
        rng = np.random.default_rng(24)
        g = rand_field(default_bank16.spec, rng)
        c1 = project(g, default_gram16)
        c2 = project(synthesize(c1, default_bank16), default_gram16)
        assert np.max(np.abs(c1.entries - c2.entries)) <= 1e-9

    def test_linearity(self, default_bank16, default_gram16):
        rng = np.random.default_rng(25)
        f, g = rand_field(default_bank16.spec, rng), rand_field(default_bank16.spec, rng)
        combo = DiscreteField(default_bank16.spec, 1.5 * f.values - 0.7 * g.values)
        lhs = project(combo, default_gram16).entries
        rhs = 1.5 * project(f, default_gram16).entries - 0.7 * project(g, default_gram16).entries
        assert np.max(np.abs(lhs - rhs)) <= 1e-9


class TestBounds:
    def test_sup_bound(self, default_bank16):
        rng = np.random.default_rng(26)
        e11 = MixedExponents(1, 1)
        w = wiener_amalgam_norm(default_bank16.rasterized[0], e11)
        for _ in range(5):
            c = CoefficientArray(1, default_bank16.lattice_shape,
                                 rng.uniform(-1, 1, size=(1,) + default_bank16.lattice_shape))
            bound = np.abs(c.entries[0]).max() * w
            assert np.abs(synthesize(c, default_bank16).values).max() <= bound * (1 + 1e-10)

    def test_mixed_norm_synthesis_bound(self, default_bank16):
        rng = np.random.default_rng(27)
        e = MixedExponents(2, 2)
        e11 = MixedExponents(1, 1)
        w = wiener_amalgam_norm(default_bank16.rasterized[0], e11)
        for _ in range(10):
            c = CoefficientArray(1, default_bank16.lattice_shape,
                                 rng.uniform(-1, 1, size=(1,) + default_bank16.lattice_shape))
            lhs = mixed_lebesgue_norm(synthesize(c, default_bank16), e)
            assert lhs <= mixed_seq_norm(c, 0, e) * w * (1 + 1e-8)


class TestNormEquivalence:
    def test_indicator_bank_is_isometry_for_l1(self, tiny_spec):
        bank = indicator_bank(tiny_spec)
        ne = estimate_norm_equivalence(bank, MixedExponents(1, 1), 10, 1)
        assert ne.d1 == pytest.approx(1.0, abs=1e-10)
        assert ne.d2 == pytest.approx(1.0, abs=1e-10)

    def test_single_spike_ratio(self, default_bank16):
        e = MixedExponents(2, 1.5)
        arr = np.zeros((1,) + default_bank16.lattice_shape)
        arr[0, 1, 1] = 1.0
        c = CoefficientArray(1, default_bank16.lattice_shape, arr)
        num = np.sqrt(sum(mixed_seq_norm(c, i, e) ** 2 for i in range(1)))
        den = mixed_lebesgue_norm(synthesize(c, default_bank16), e)
        assert num / den == pytest.approx(
            1.0 / mixed_lebesgue_norm(default_bank16.rasterized[0], e), rel=1e-12)

    def test_monte_carlo_bracket_is_stable(self):
        spec = GridSpec(d=1, periods=(8, 8), m=8)
        bank = default_bank(spec, 1)
        e = MixedExponents(2, 2)
        a = estimate_norm_equivalence(bank, e, 100, 11)
        b = estimate_norm_equivalence(bank, e, 100, 904)
        assert a.d1 > 0 and b.d1 > 0
        assert abs(a.d1 - b.d1) <= 0.2 * max(a.d1, b.d1)
        assert a.d1 <= a.d2

    def test_requires_ten_trials(self, default_bank16):
        with pytest.raises(GridError):
            estimate_norm_equivalence(default_bank16, MixedExponents(1, 1), 5, 0)


class TestProjectionNorm:
    def test_orthonormal_bank_contracts_in_l2(self, tiny_spec):
        gram = build_gram(indicator_bank(tiny_spec))
        est = estimate_projection_norm(gram, MixedExponents(2, 2), 10, 2)
        assert est <= 1 + 1e-8

    def test_space_member_has_ratio_one(self, default_bank16, default_gram16):
        rng = np.random.default_rng(28)
        c = CoefficientArray(1, default_bank16.lattice_shape,
                             rng.uniform(-1, 1, size=(1,) + default_bank16.lattice_shape))
        f = synthesize(c, default_bank16)
        pf = synthesize(project(f, default_gram16), default_bank16)
        e = MixedExponents(2, 2)
        assert mixed_lebesgue_norm(pf, e) / mixed_lebesgue_norm(f, e) == pytest.approx(1.0, abs=1e-9)

    def test_general_exponents_finite(self, default_gram16):
        est = estimate_projection_norm(default_gram16, MixedExponents(1.5, 1.5), 10, 3)
        assert np.isfinite(est) and est > 0
