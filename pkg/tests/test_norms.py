import numpy as np
import pytest

from sirecon import (DiscreteField, GridSpec, KernelSpec, MixedExponents,
                     mixed_lebesgue_norm, mixed_seq_norm, oscillation,
                     rasterize, wiener_amalgam_norm)
from sirecon.grid import GridError

from conftest import (oracle_mixed_norm, oracle_oscillation, oracle_seq_norm,
                      oracle_wiener, rand_field)


def test_exponent_validation():
    with pytest.raises(GridError):
        MixedExponents(0.5, 2.0)
    with pytest.raises(GridError):
        MixedExponents(2.0, np.inf)


class TestMixedLebesgue:
    def test_constant_closed_form(self):
        spec = GridSpec(d=1, periods=(4, 8), m=4)
        f = DiscreteField(spec, np.full(spec.shape, -2.5))
        assert mixed_lebesgue_norm(f, MixedExponents(1, 1)) == pytest.approx(2.5 * 32, abs=1e-10)
        # |c| * L1^{1/p} * L2^{d/q} in general
        e = MixedExponents(3, 1.5)
        want = 2.5 * 4 ** (1 / 3) * 8 ** (1 / 1.5)
        assert mixed_lebesgue_norm(f, e) == pytest.approx(want, rel=1e-12)

    def test_separable_product_of_1d_quadratures(self):
        spec = GridSpec(d=1, periods=(6, 6), m=8)
        x = spec.wrap(spec.midpoints(0), 0)
        y = spec.wrap(spec.midpoints(1), 1)
        g = np.maximum(0.0, 1.0 - np.abs(x))          # tent in x
        h = np.maximum(0.0, 1.0 - np.abs(y / 1.5))    # wider tent in y
        f = DiscreteField(spec, np.outer(g, h))
        e = MixedExponents(2.5, 1.5)
        norm_g = (np.abs(g) ** e.p).sum() ** (1 / e.p) * (1 / spec.m) ** (1 / e.p)
        norm_h = (np.abs(h) ** e.q).sum() ** (1 / e.q) * (1 / spec.m) ** (1 / e.q)
        assert mixed_lebesgue_norm(f, e) == pytest.approx(norm_g * norm_h, rel=1e-12)

    def test_matches_nested_loop_oracle(self, tiny_spec):
        rng = np.random.default_rng(1)
        for e in (MixedExponents(1, 1), MixedExponents(2, 2), MixedExponents(3, 1.5)):
            f = rand_field(tiny_spec, rng)
            assert mixed_lebesgue_norm(f, e) == pytest.approx(oracle_mixed_norm(f, e), abs=1e-12)

    def test_p_equals_q_is_plain_lp(self, tiny_spec):
        rng = np.random.default_rng(2)
        f = rand_field(tiny_spec, rng)
        for p in (1.0, 2.0, 4.0):
            plain = float(((np.abs(f.values) ** p).sum() * tiny_spec.cell_volume) ** (1 / p))
            assert abs(mixed_lebesgue_norm(f, MixedExponents(p, p)) - plain) <= 1e-12


class TestMixedSeq:
    def test_single_entry(self):
        arr = np.zeros((1, 4, 4))
        arr[0, 2, 3] = -7.5
        assert mixed_seq_norm(arr, 0, MixedExponents(3, 1.2)) == pytest.approx(7.5, abs=1e-12)

    def test_all_ones_closed_form(self):
        arr = np.ones((1, 5, 7))
        e = MixedExponents(2.0, 3.0)
        want = 5 ** (1 / 2) * 7 ** (1 / 3)
        assert mixed_seq_norm(arr, 0, e) == pytest.approx(want, rel=1e-12)

    def test_matches_two_stage_oracle(self):
        rng = np.random.default_rng(3)
        arr = rng.uniform(-1, 1, size=(2, 6, 6))
        e = MixedExponents(1.5, 2.5)
        for i in range(2):
            assert mixed_seq_norm(arr, i, e) == pytest.approx(oracle_seq_norm(arr[i], e), abs=1e-12)


class TestWienerAmalgam:
    def test_unit_cell_indicator(self):
        spec = GridSpec(d=1, periods=(4, 4), m=4)
        f = rasterize(KernelSpec("box", center=(0.5, 0.5)), spec)
        assert wiener_amalgam_norm(f, MixedExponents(1, 1)) == 1.0

    def test_constant_closed_form(self):
        spec = GridSpec(d=1, periods=(4, 6), m=4)
        f = DiscreteField(spec, np.full(spec.shape, 1.5))
        assert wiener_amalgam_norm(f, MixedExponents(1, 1)) == pytest.approx(1.5 * 24, rel=1e-12)

    def test_cubic_bspline_matches_cell_scan(self, tiny_spec):
        rng = np.random.default_rng(4)
        cases = [rasterize(KernelSpec("bspline", order=2), tiny_spec),
                 rand_field(tiny_spec, rng)]
        for f in cases:
            for e in (MixedExponents(1, 1), MixedExponents(2, 1.5)):
                assert wiener_amalgam_norm(f, e) == pytest.approx(oracle_wiener(f, e), abs=1e-12)


class TestOscillation:
    def test_constant_field_has_zero_oscillation(self, tiny_spec):
        f = DiscreteField(tiny_spec, np.full(tiny_spec.shape, 3.0))
        assert not oscillation(f, 0.5).values.any()

    def test_linear_slope_window(self):
        spec = GridSpec(d=1, periods=(8, 8), m=16)
        x = spec.midpoints(0)
        f = DiscreteField(spec, np.broadcast_to(x[:, None], spec.shape))
        delta = 2.0 / spec.m
        osc = oscillation(f, delta)
        interior = osc.values[4:-4, :]  # away from the wrap seam
        assert np.max(np.abs(interior - delta)) <= 1e-12

    def test_matches_window_scan_oracle(self, tiny_spec):
        f = rasterize(KernelSpec("tent"), tiny_spec)
        got = oscillation(f, 0.25)
        assert np.max(np.abs(got.values - oracle_oscillation(f, 0.25))) <= 1e-12
        rng = np.random.default_rng(5)
        g = rand_field(tiny_spec, rng)
        got = oscillation(g, 0.5)
        assert np.max(np.abs(got.values - oracle_oscillation(g, 0.5))) <= 1e-12

    def test_rejects_oversized_window(self, tiny_spec):
        with pytest.raises(GridError):
            oscillation(DiscreteField(tiny_spec, np.zeros(tiny_spec.shape)), 1.5)

    def test_window_below_grid_resolution_is_zero(self, default_spec):
        rng = np.random.default_rng(6)
        f = rand_field(default_spec, rng)
        assert not oscillation(f, 0.4 / default_spec.m).values.any()


class TestNormProperties:
    def test_homogeneity(self, tiny_spec):
        rng = np.random.default_rng(7)
        f = rand_field(tiny_spec, rng)
        e = MixedExponents(2.5, 1.5)
        alpha = -3.25
        g = DiscreteField(tiny_spec, alpha * f.values)
        assert mixed_lebesgue_norm(g, e) == pytest.approx(abs(alpha) * mixed_lebesgue_norm(f, e), rel=1e-12)
        assert wiener_amalgam_norm(g, e) == pytest.approx(abs(alpha) * wiener_amalgam_norm(f, e), rel=1e-12)

    def test_monotonicity(self, tiny_spec):
        rng = np.random.default_rng(8)
        e = MixedExponents(1.5, 3.0)
        for _ in range(10):
            g = rand_field(tiny_spec, rng)
            f = DiscreteField(tiny_spec, g.values * rng.uniform(0, 1, size=tiny_spec.shape))
            assert mixed_lebesgue_norm(f, e) <= mixed_lebesgue_norm(g, e) * (1 + 1e-12)
            assert wiener_amalgam_norm(f, e) <= wiener_amalgam_norm(g, e) * (1 + 1e-12)

    def test_oscillation_amalgam_norms_finite_and_decaying(self, default_spec):
        e11 = MixedExponents(1, 1)
        for k in (KernelSpec("tent"), KernelSpec("bspline", order=4)):
            phi = rasterize(k, default_spec)
            vals = [wiener_amalgam_norm(oscillation(phi, 2.0 ** -j), e11) for j in range(4)]
            assert all(np.isfinite(v) for v in vals)
            assert all(vals[i + 1] <= vals[i] * (1 + 1e-10) for i in range(3))
