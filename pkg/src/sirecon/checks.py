"""Named invariant checks over a built pipeline, shared by the CLI verifier
and the test suite.

Each check returns (ok, detail).  Thresholds that depend on grid
resolution scale as documented inline: sup-over-cell quantities are
approximated by grid maxima, so limits that vanish with the window size
bottom out at O(1/m) and their acceptance thresholds follow suit.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig, build_pipeline, config_for_combo, parse_config_text, render_config
from .grid import (DiscreteField, KernelSpec, convolve, convolve_kernel,
                   integrate, lin_comb, rasterize, reflect_conjugate, translate_cells)
from .norms import MixedExponents, mixed_lebesgue_norm, mixed_seq_norm, oscillation, wiener_amalgam_norm
from .reconstruct import (ReconstructionOptions, estimate_contraction,
                          quasi_interpolant, reconstruct, spread)
from .sampling import acquire_samples, make_kernels, verify_density
from .spaces import CoefficientArray, estimate_norm_equivalence, project, synthesize

__all__ = ["CheckResult", "run_all", "CHECK_NAMES"]

# resolution-scaled ceilings for the vanishing-limit checks; the 0.05
# floor is the fixed target once the grid resolves the window
_OSC_DECAY_COEFF = 9.0
_SMOOTH_DECAY_COEFF = 3.6

_CONTINUOUS_GENERATORS = (
    KernelSpec("tent"),
    KernelSpec("bspline", order=3),
    KernelSpec("bspline", order=4),
    KernelSpec("gauss", sigma=0.5, cutoff=3.0),
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rand_field(spec, rng) -> DiscreteField:
    return DiscreteField(spec, rng.uniform(-1.0, 1.0, size=spec.shape))


def _rand_kernel(rng) -> KernelSpec:
    shape = rng.choice(["box", "tent", "bspline", "gauss"])
    scale = float(rng.uniform(0.3, 1.2))
    if shape == "bspline":
        return KernelSpec("bspline", order=int(rng.integers(2, 5)), scale=scale,
                          amplitude=float(rng.uniform(0.5, 2.0)))
    if shape == "gauss":
        return KernelSpec("gauss", sigma=float(rng.uniform(0.2, 0.5)), cutoff=3.0,
                          scale=scale, amplitude=float(rng.uniform(0.5, 2.0)))
    return KernelSpec(shape, scale=scale, amplitude=float(rng.uniform(0.5, 2.0)))


def _delta_ladder(m: int) -> list[float]:
    return [2.0 ** -k for k in range(0, int(np.ceil(np.log2(m))))]


# ---------------------------------------------------------------------------
# field_grid
# ---------------------------------------------------------------------------


def check_periodic_translation(ctx):
    spec = ctx.spec
    rng = np.random.default_rng(11)
    f = _rand_field(spec, rng)
    full = tuple(spec.m * e for e in spec.extents)
    g = translate_cells(f, full)
    ok = np.array_equal(f.values, g.values)
    return ok, "translation by full periods is the identity"


def check_convolution_bilinearity(ctx):
    spec = ctx.spec
    rng = np.random.default_rng(12)
    f, g, h = (_rand_field(spec, rng) for _ in range(3))
    a, b = 1.7, -0.4
    lhs = convolve(lin_comb([(a, f), (b, g)]), h)
    rhs = lin_comb([(a, convolve(f, h)), (b, convolve(g, h))])
    err = float(np.max(np.abs(lhs.values - rhs.values)))
    return err <= 1e-10, f"bilinearity defect {err:.2e}"


def check_convolution_amalgam_bound(ctx, pairs: int = 100):
    spec = ctx.spec
    rng = np.random.default_rng(13)
    e11 = MixedExponents(1.0, 1.0)
    worst = -np.inf
    for _ in range(pairs):
        f = _rand_field(spec, rng)
        g = rasterize(_rand_kernel(rng), spec)
        lhs = wiener_amalgam_norm(convolve(f, g), e11)
        rhs = wiener_amalgam_norm(g, e11) * integrate(DiscreteField(spec, np.abs(f.values)))
        worst = max(worst, lhs / rhs)
    return worst <= 1.0 + 1e-8, f"max ||f*g||_W / (||g||_W ||f||_1) = {worst:.6f}"


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def check_mixed_norm_plain_lp(ctx):
    spec = ctx.spec
    rng = np.random.default_rng(21)
    worst = 0.0
    for p in (1.0, 2.0, 3.5):
        f = _rand_field(spec, rng)
        mixed = mixed_lebesgue_norm(f, MixedExponents(p, p))
        plain = float((np.abs(f.values) ** p).sum() * spec.cell_volume) ** (1 / p)
        worst = max(worst, abs(mixed - plain) / plain)
    return worst <= 1e-12, f"max relative gap to plain L^p {worst:.2e}"


def check_norm_monotonicity(ctx):
    spec = ctx.spec
    rng = np.random.default_rng(22)
    e = ctx.cfg.exponents
    ok = True
    for _ in range(5):
        g = _rand_field(spec, rng)
        damp = rng.uniform(0.0, 1.0, size=spec.shape)
        f = DiscreteField(spec, g.values * damp)
        ok &= mixed_lebesgue_norm(f, e) <= mixed_lebesgue_norm(g, e) * (1 + 1e-12)
        ok &= wiener_amalgam_norm(f, e) <= wiener_amalgam_norm(g, e) * (1 + 1e-12)
    return ok, "|f| <= |g| pointwise implies norm(f) <= norm(g)"


def check_norm_homogeneity(ctx):
    spec = ctx.spec
    rng = np.random.default_rng(23)
    e = ctx.cfg.exponents
    f = _rand_field(spec, rng)
    c = CoefficientArray(1, ctx.bank.lattice_shape,
                         rng.uniform(-1, 1, size=(1,) + ctx.bank.lattice_shape))
    alpha = -2.75
    worst = 0.0
    pairs = [
        (mixed_lebesgue_norm(DiscreteField(spec, alpha * f.values), e),
         abs(alpha) * mixed_lebesgue_norm(f, e)),
        (wiener_amalgam_norm(DiscreteField(spec, alpha * f.values), e),
         abs(alpha) * wiener_amalgam_norm(f, e)),
        (mixed_seq_norm(alpha * c.entries, 0, e), abs(alpha) * mixed_seq_norm(c, 0, e)),
    ]
    for got, want in pairs:
        worst = max(worst, abs(got - want) / want)
    osc_scaled = oscillation(DiscreteField(spec, alpha * f.values), 0.25)
    osc_base = oscillation(f, 0.25)
    worst = max(worst, float(np.max(np.abs(osc_scaled.values - abs(alpha) * osc_base.values))))
    return worst <= 1e-12, f"max homogeneity defect {worst:.2e}"


def check_oscillation_finite(ctx):
    spec = ctx.spec
    e11 = MixedExponents(1.0, 1.0)
    ok = True
    for k in _CONTINUOUS_GENERATORS:
        phi = rasterize(k, spec)
        for delta in _delta_ladder(spec.m):
            if delta > min(spec.extents) / 4:
                continue
            v = wiener_amalgam_norm(oscillation(phi, delta), e11)
            ok &= np.isfinite(v)
    return ok, "oscillation amalgam norms finite across the delta ladder"


def _decay_profile(values: list[float], base: float, ceiling: float):
    noninc = all(values[i + 1] <= values[i] * (1 + 1e-10) for i in range(len(values) - 1))
    final_ok = values[-1] <= ceiling * base
    return noninc, final_ok


def check_oscillation_decay(ctx):
    """Oscillation amalgam norms shrink with the window and end small.

    The final window is two grid cells, so the ceiling scales with 1/m
    down to the fixed 0.05 target once the grid resolves it.
    """
    spec = ctx.spec
    e11 = MixedExponents(1.0, 1.0)
    ceiling = max(0.05, _OSC_DECAY_COEFF / spec.m)
    msgs = []
    ok = True
    for k in _CONTINUOUS_GENERATORS:
        phi = rasterize(k, spec)
        base = wiener_amalgam_norm(phi, e11)
        deltas = [d for d in _delta_ladder(spec.m) if d <= min(spec.extents) / 4]
        vals = [wiener_amalgam_norm(oscillation(phi, d), e11) for d in deltas]
        noninc, final_ok = _decay_profile(vals, base, ceiling)
        ok &= noninc and final_ok
        msgs.append(f"{k.shape}{k.order if k.shape == 'bspline' else ''}:{vals[-1] / base:.3f}")
    return ok, f"final osc ratios {' '.join(msgs)} vs ceiling {ceiling:.3f}"


def check_smoothing_decay(ctx):
    """Averaging at shrinking radius reproduces the generator in amalgam norm."""
    spec = ctx.spec
    e11 = MixedExponents(1.0, 1.0)
    ceiling = max(0.05, _SMOOTH_DECAY_COEFF / spec.m)
    ok = True
    msgs = []
    for k in _CONTINUOUS_GENERATORS:
        phi = rasterize(k, spec)
        base = wiener_amalgam_norm(phi, e11)
        vals = []
        for a in _delta_ladder(spec.m):
            if a > min(spec.extents) / 8:
                continue
            ks = make_kernels("single", "box", a, None, 1.0, 0, spec)
            psi = ks.single_kernel()
            diff = lin_comb([(1.0, phi), (-1.0, convolve_kernel(phi, psi.reflected()))])
            vals.append(wiener_amalgam_norm(diff, e11))
        noninc, final_ok = _decay_profile(vals, base, ceiling)
        ok &= noninc and final_ok
        msgs.append(f"{k.shape}{k.order if k.shape == 'bspline' else ''}:{vals[-1] / base:.3f}")
    return ok, f"final smoothing ratios {' '.join(msgs)} vs ceiling {ceiling:.3f}"


# ---------------------------------------------------------------------------
# shift_invariant
# ---------------------------------------------------------------------------


def check_projection_idempotent(ctx):
    rng = np.random.default_rng(31)
    g = _rand_field(ctx.spec, rng)
    c1 = project(g, ctx.gram)
    c2 = project(synthesize(c1, ctx.bank), ctx.gram)
    err = float(np.max(np.abs(c1.entries - c2.entries)))
    return err <= 1e-9, f"idempotence defect {err:.2e}"


def check_projection_linearity(ctx):
    rng = np.random.default_rng(32)
    f, g = _rand_field(ctx.spec, rng), _rand_field(ctx.spec, rng)
    a, b = 0.6, -1.3
    combo = DiscreteField(ctx.spec, a * f.values + b * g.values)
    lhs = project(combo, ctx.gram).entries
    rhs = a * project(f, ctx.gram).entries + b * project(g, ctx.gram).entries
    err = float(np.max(np.abs(lhs - rhs)))
    return err <= 1e-9, f"linearity defect {err:.2e}"


def check_synthesis_sup_bound(ctx):
    rng = np.random.default_rng(33)
    e11 = MixedExponents(1.0, 1.0)
    bank = ctx.bank
    ok = True
    for _ in range(10):
        c = CoefficientArray(bank.r, bank.lattice_shape,
                             rng.uniform(-1, 1, size=(bank.r,) + bank.lattice_shape))
        bound = sum(np.abs(c.entries[i]).max() * wiener_amalgam_norm(bank.rasterized[i], e11)
                    for i in range(bank.r))
        ok &= np.abs(synthesize(c, bank).values).max() <= bound * (1 + 1e-10)
    return ok, "sup of synthesis bounded by sup-coefficient times amalgam norms"


def check_synthesis_mixed_bound(ctx, draws: int = 100):
    rng = np.random.default_rng(34)
    e = ctx.cfg.exponents
    e11 = MixedExponents(1.0, 1.0)
    bank = ctx.bank
    wnorms = [wiener_amalgam_norm(f, e11) for f in bank.rasterized]
    worst = 0.0
    for _ in range(draws):
        c = CoefficientArray(bank.r, bank.lattice_shape,
                             rng.uniform(-1, 1, size=(bank.r,) + bank.lattice_shape))
        bound = sum(mixed_seq_norm(c, i, e) * wnorms[i] for i in range(bank.r))
        worst = max(worst, mixed_lebesgue_norm(synthesize(c, bank), e) / bound)
    return worst <= 1 + 1e-8, f"max mixed-norm synthesis ratio {worst:.6f}"


def check_norm_equivalence_bracket(ctx):
    ne = estimate_norm_equivalence(ctx.bank, ctx.cfg.exponents, 20, 31415)
    ok = ne.d1 > 0 and ne.d1 <= ne.d2
    return ok, f"observed bounds D1={ne.d1:.4f} D2={ne.d2:.4f}"


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def check_partition_of_unity(ctx):
    bupu = ctx.bupu
    ns = len(bupu.X)
    total = np.zeros(bupu.spec.shape)
    for j in range(ns):
        total += (bupu.assignment == j)
    exact = np.array_equal(total, np.ones(bupu.spec.shape))
    return exact, "indicator weights sum to one on every cell"


def check_support_within_gamma(ctx):
    gamma = ctx.cfg.sampling.gamma
    certified, worst = verify_density(ctx.X, gamma, ctx.spec)
    if not certified:
        return True, f"not certified at gamma={gamma} (worst gap {worst:.3f}); vacuous"
    inside = float(ctx.bupu.nearest_dist.max())
    return inside < gamma, f"max assigned distance {inside:.3f} < gamma={gamma}"


def check_point_value_consistency(ctx):
    spec = ctx.spec
    rng = np.random.default_rng(41)
    f = _rand_field(spec, rng)
    tiny = make_kernels("single", "box", 1.0 / (2 * spec.m), None, 1.0, 0, spec)
    got = acquire_samples(f, tiny, ctx.X)
    want = np.array([f.values[spec.nearest_cell(p)] for p in ctx.X.points])
    err = float(np.max(np.abs(got - want)))
    return err <= 1e-14, f"one-cell kernels vs nearest point values, defect {err:.2e}"


def check_generation_determinism(ctx):
    pipe2 = build_pipeline(ctx.cfg, seed=ctx.seed)
    same = np.array_equal(ctx.X.points, pipe2.X.points)
    same &= np.array_equal(ctx.bupu.assignment, pipe2.bupu.assignment)
    if ctx.kernels.offsets is not None:
        same &= np.array_equal(ctx.kernels.offsets, pipe2.kernels.offsets)
    return bool(same), "rebuild with the same seed is bit-identical"


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------


def check_operator_identity(ctx, fields: int = 10):
    """Snapped acquisition equals sampling the kernel-convolved field."""
    spec = ctx.spec
    if ctx.kernels.shape == "signed":
        ks = make_kernels("single", "box", ctx.cfg.kernels.a, None, 1.0, 0, spec)
    else:
        ks = (ctx.kernels if ctx.kernels.mode == "single"
              else make_kernels("single", ctx.kernels.shape, ctx.kernels.a, None, 1.0, 0, spec))
    psi = ks.single_kernel()
    rng = np.random.default_rng(51)
    worst = 0.0
    for _ in range(fields):
        f = _rand_field(spec, rng)
        direct = spread(acquire_samples(f, ks, ctx.X, snap=True), ctx.bupu)
        conv = convolve_kernel(f, psi.reflected())
        viaq = quasi_interpolant(conv, ctx.X, ctx.bupu)
        worst = max(worst, float(np.max(np.abs(direct.values - viaq.values))))
    return worst <= 1e-10, f"max identity defect {worst:.2e}"


def _run_truth(ctx, seed_stream, max_iter=None, tol=None):
    rng = np.random.default_rng(seed_stream)
    bank = ctx.bank
    c = CoefficientArray(bank.r, bank.lattice_shape,
                         rng.uniform(-1, 1, size=(bank.r,) + bank.lattice_shape))
    truth = synthesize(c, bank)
    samples = acquire_samples(truth, ctx.kernels, ctx.X)
    opts = ReconstructionOptions(
        exponents=ctx.cfg.exponents,
        max_iter=ctx.cfg.iteration.max_iter if max_iter is None else max_iter,
        tol=ctx.cfg.iteration.tol if tol is None else tol,
        track_truth=truth,
    )
    coeffs, report = reconstruct(samples, bank, ctx.gram, ctx.bupu,
                                 ctx.kernels, ctx.X, opts)
    return c, truth, coeffs, report


def check_error_recursion(ctx):
    """Logged errors match explicitly iterating the error operator."""
    _, truth, _, report = _run_truth(ctx, 61, max_iter=8, tol=1e-300)
    if report.status == "underdetermined":
        return False, "pipeline underdetermined; cannot test recursion"
    err = truth
    worst = 0.0
    e = ctx.cfg.exponents
    for n in range(report.iterations_run):
        step = synthesize(project(spread(
            acquire_samples(err, ctx.kernels, ctx.X), ctx.bupu), ctx.gram), ctx.bank)
        err = lin_comb([(1.0, err), (-1.0, step)])
        worst = max(worst, abs(mixed_lebesgue_norm(err, e) - report.true_errors[n]))
    return worst <= 1e-9, f"max recursion defect {worst:.2e}"


def check_contraction_bound_ratios(ctx, truths: int = 3):
    est = estimate_contraction(ctx.bank, ctx.gram, ctx.bupu, ctx.kernels,
                               ctx.X, ctx.cfg.exponents, 12, 777)
    if est.alpha >= 1:
        return True, f"alpha_hat={est.alpha:.3f} >= 1; geometric bound vacuous"
    worst = 0.0
    for t in range(truths):
        _, _, _, report = _run_truth(ctx, 62 + t)
        errs = report.true_errors
        floor = 1e-7 * errs[0] if errs else 0.0
        for n in range(len(errs) - 1):
            if errs[n] > floor:
                worst = max(worst, errs[n + 1] / (errs[n] * est.alpha))
    return worst <= 1 + 1e-6, f"alpha_hat={est.alpha:.4f}, max ratio/alpha {worst:.8f}"


def check_two_path_bitwise(ctx):
    spec = ctx.spec
    a = ctx.cfg.kernels.a
    single = make_kernels("single", "box", a, None, 1.0, 0, spec)
    per0 = make_kernels("per_sample", "box", a, ctx.X, 1.0, 123, spec, offset_fraction=0.0)
    rng = np.random.default_rng(63)
    bank = ctx.bank
    c = CoefficientArray(bank.r, bank.lattice_shape,
                         rng.uniform(-1, 1, size=(bank.r,) + bank.lattice_shape))
    truth = synthesize(c, bank)
    opts = ReconstructionOptions(exponents=ctx.cfg.exponents, max_iter=12, tol=1e-14)
    out = []
    for ks in (single, per0):
        samples = acquire_samples(truth, ks, ctx.X)
        coeffs, report = reconstruct(samples, bank, ctx.gram, ctx.bupu, ks, ctx.X, opts)
        out.append((coeffs.entries, report.changes))
    same = np.array_equal(out[0][0], out[1][0]) and out[0][1] == out[1][1]
    return same, "zero-offset per-sample iterates match single mode bit for bit"


def _alpha_for(cfg: ExperimentConfig, seed: int, gamma=None, a=None) -> float:
    pipe = build_pipeline(config_for_combo(cfg, gamma=gamma, a=a), seed=seed)
    est = estimate_contraction(pipe.bank, pipe.gram, pipe.bupu, pipe.kernels,
                               pipe.X, pipe.cfg.exponents, 10, 999)
    return est.alpha


def check_gamma_monotonicity(ctx):
    vals = [_alpha_for(ctx.cfg, ctx.seed, gamma=g) for g in (1.0, 0.5, 0.25)]
    ok = all(vals[i + 1] <= vals[i] * 1.05 for i in range(2))
    return ok, "alpha_hat over gamma {1.0, 0.5, 0.25}: " + " ".join(f"{v:.3f}" for v in vals)


def check_a_monotonicity(ctx):
    vals = [_alpha_for(ctx.cfg, ctx.seed, a=a) for a in (0.5, 0.25, 0.125)]
    ok = all(vals[i + 1] <= vals[i] * 1.05 for i in range(2))
    return ok, "alpha_hat over a {0.5, 0.25, 0.125}: " + " ".join(f"{v:.3f}" for v in vals)


def check_quasi_interpolant_bound(ctx, draws: int = 100):
    rng = np.random.default_rng(64)
    e = ctx.cfg.exponents
    e11 = MixedExponents(1.0, 1.0)
    bank = ctx.bank
    worst = 0.0
    for _ in range(draws):
        i = int(rng.integers(bank.r))
        arr = np.zeros((bank.r,) + bank.lattice_shape)
        arr[i] = rng.uniform(-1, 1, size=bank.lattice_shape)
        c = CoefficientArray(bank.r, bank.lattice_shape, arr)
        f = synthesize(c, bank)
        qf = quasi_interpolant(f, ctx.X, ctx.bupu)
        denom = mixed_seq_norm(c, i, e) * wiener_amalgam_norm(bank.rasterized[i], e11)
        worst = max(worst, mixed_lebesgue_norm(qf, e) / denom)
    ok = np.isfinite(worst)
    return ok, f"observed quasi-interpolant constant C = {worst:.4f}"


# ---------------------------------------------------------------------------
# cli
# ---------------------------------------------------------------------------


def check_run_reproducibility(ctx):
    import tempfile
    from pathlib import Path

    from .runner import run_experiment

    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for tag in ("a", "b"):
            out = Path(tmp) / tag
            run_experiment(ctx.cfg, out, seed=ctx.seed)
            blobs.append((out / "iterations.csv").read_bytes())
    return blobs[0] == blobs[1], "two identical runs emit byte-identical iterations.csv"


def check_config_echo_roundtrip(ctx):
    back = parse_config_text(render_config(ctx.cfg))
    return back == ctx.cfg, "rendered config parses back to an equal config"


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

_CHECKS = [
    ("field_grid.periodic_translation", check_periodic_translation),
    ("field_grid.convolution_bilinearity", check_convolution_bilinearity),
    ("field_grid.convolution_amalgam_bound", check_convolution_amalgam_bound),
    ("norms.mixed_norm_plain_lp", check_mixed_norm_plain_lp),
    ("norms.monotonicity", check_norm_monotonicity),
    ("norms.homogeneity", check_norm_homogeneity),
    ("norms.oscillation_finite", check_oscillation_finite),
    ("norms.oscillation_decay", check_oscillation_decay),
    ("norms.smoothing_decay", check_smoothing_decay),
    ("shift_invariant.projection_idempotent", check_projection_idempotent),
    ("shift_invariant.projection_linearity", check_projection_linearity),
    ("shift_invariant.synthesis_sup_bound", check_synthesis_sup_bound),
    ("shift_invariant.synthesis_mixed_bound", check_synthesis_mixed_bound),
    ("shift_invariant.norm_equivalence_bracket", check_norm_equivalence_bracket),
    ("sampling.partition_of_unity", check_partition_of_unity),
    ("sampling.support_within_gamma", check_support_within_gamma),
    ("sampling.point_value_consistency", check_point_value_consistency),
    ("sampling.generation_determinism", check_generation_determinism),
    ("reconstruct.operator_identity", check_operator_identity),
    ("reconstruct.error_recursion", check_error_recursion),
    ("reconstruct.contraction_bound_ratios", check_contraction_bound_ratios),
    ("reconstruct.two_path_bitwise", check_two_path_bitwise),
    ("reconstruct.gamma_monotonicity", check_gamma_monotonicity),
    ("reconstruct.a_monotonicity", check_a_monotonicity),
    ("reconstruct.quasi_interpolant_bound", check_quasi_interpolant_bound),
    ("cli.run_reproducibility", check_run_reproducibility),
    ("cli.config_echo_roundtrip", check_config_echo_roundtrip),
]

CHECK_NAMES = [name for name, _ in _CHECKS]


def _corrupt_bupu(bupu):
    """Test hook: orphan a strip of cells so no sample owns them."""
    bad = bupu.assignment.copy()
    bad.reshape(-1)[:7] = -1
    object.__setattr__(bupu, "assignment", bad)


def run_all(cfg: ExperimentConfig, inject_fault: str | None = None,
            stream: io.TextIOBase | None = None) -> list[CheckResult]:
    ctx = build_pipeline(cfg)
    if inject_fault == "bupu":
        _corrupt_bupu(ctx.bupu)
    elif inject_fault is not None:
        raise ValueError(f"unknown fault {inject_fault!r}")
    results = []
    for name, fn in _CHECKS:
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
        if stream is not None:
            mark = "PASS" if ok else "FAIL"
            stream.write(f"{mark:4s} {name:45s} {detail}\n")
    return results
