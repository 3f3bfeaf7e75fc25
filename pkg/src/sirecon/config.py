"""Experiment configuration: flat dotted-key text files.

Lines are ``section.key = value`` with ``#`` comments; every violation is
collected and reported together rather than failing on the first.  The
canonical rendering round-trips losslessly (floats via repr).

Bank kernels are compact tokens: ``bspline4``, ``bspline3@0.75`` (trailing
``@s`` dilates by s), ``tent``, ``box``, ``gauss:SIGMA[:CUTOFF]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import SimpleNamespace

import numpy as np

from .grid import GridError, GridSpec, KernelSpec
from .norms import MixedExponents
from .sampling import (SamplingSet, build_bupu, generate_sampling_set,
                       load_sampling_set, make_kernels)
from .spaces import GeneratorBank, build_gram

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SamplingConfig",
    "AveragingConfig",
    "IterationConfig",
    "parse_config",
    "parse_config_text",
    "render_config",
    "build_pipeline",
    "kernel_token",
]


class ConfigError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))


@dataclass(frozen=True)
class SamplingConfig:
    mode: str = "jittered"          # jittered | random | file
    s: float = 0.5
    eta: float = 0.2
    n: int = 100
    gamma: float = 0.5
    structure: str = "scattered"
    file: str = ""


@dataclass(frozen=True)
class AveragingConfig:
    mode: str = "single"            # single | per_sample
    shape: str = "box"              # box | tent | signed
    a: float = 0.25
    m_target: float = 1.0
    offset_fraction: float = 0.25
    inner_ratio: float = 0.5


@dataclass(frozen=True)
class IterationConfig:
    max_iter: int = 500
    tol: float = 1e-10


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSpec = GridSpec()
    exponents: MixedExponents = MixedExponents()
    bank_r: int = 1
    bank_kernels: tuple[KernelSpec, ...] = ()
    sampling: SamplingConfig = SamplingConfig()
    kernels: AveragingConfig = AveragingConfig()
    iteration: IterationConfig = IterationConfig()
    seed: int = 0
    output: str = "out"


# ---------------------------------------------------------------------------
# kernel tokens
# ---------------------------------------------------------------------------


def _parse_kernel_token(tok: str) -> KernelSpec:
    tok = tok.strip()
    scale = 1.0
    if "@" in tok:
        tok, s = tok.rsplit("@", 1)
        scale = float(s)
    if tok in ("box", "tent"):
        return KernelSpec(tok, scale=scale)
    if tok.startswith("bspline"):
        return KernelSpec("bspline", order=int(tok[len("bspline"):]), scale=scale)
    if tok.startswith("gauss"):
        parts = tok.split(":")
        sigma = float(parts[1]) if len(parts) > 1 else 0.5
        cutoff = float(parts[2]) if len(parts) > 2 else 3.0
        return KernelSpec("gauss", sigma=sigma, cutoff=cutoff, scale=scale)
    raise ValueError(f"unknown kernel token {tok!r}")


def kernel_token(k: KernelSpec) -> str:
    if k.shape == "bspline":
        base = f"bspline{k.order}"
    elif k.shape == "gauss":
        base = f"gauss:{k.sigma!r}:{k.cutoff!r}"
    else:
        base = k.shape
    scale = k.scales(1)[0] if np.isscalar(k.scale) else k.scale[0]
    if scale != 1.0:
        base += f"@{scale!r}"
    return base


def _default_bank_kernels(r: int) -> tuple[KernelSpec, ...]:
    ks = [KernelSpec("bspline", order=4)]
    if r >= 2:
        ks.append(KernelSpec("bspline", order=3, scale=0.75))
    return tuple(ks[:r])


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {
    "grid.d", "grid.periods", "grid.m",
    "exponents.p", "exponents.q",
    "bank.r", "bank.kernels",
    "sampling.mode", "sampling.s", "sampling.eta", "sampling.n",
    "sampling.gamma", "sampling.structure", "sampling.file",
    "kernels.mode", "kernels.shape", "kernels.a", "kernels.m_target",
    "kernels.offset_fraction", "kernels.inner_ratio",
    "iteration.max_iter", "iteration.tol",
    "seed", "output",
}


def parse_config(path) -> ExperimentConfig:
    """Parse and validate a config file; raises ConfigError listing every problem."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"cannot read config file: {exc}"]) from exc
    return parse_config_text(text)


def parse_config_text(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    violations: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            violations.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            violations.append(f"line {lineno}: unknown key {key!r}")
            continue
        raw[key] = val

    def take(key: str, conv, default, constraint=None, describe=""):
        if key not in raw:
            return default
        try:
            v = conv(raw[key])
        except (ValueError, TypeError) as exc:
            violations.append(f"{key}: cannot parse {raw[key]!r} ({exc})")
            return default
        if constraint is not None and not constraint(v):
            violations.append(f"{key}: {describe} (got {raw[key]!r})")
            return default
        return v

    def int_pair(sv: str) -> tuple[int, int]:
        parts = [p for p in sv.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise ValueError("expected two integers")
        return int(parts[0]), int(parts[1])

    d = take("grid.d", int, 1, lambda v: v >= 1, "d must be >= 1")
    periods = take("grid.periods", int_pair, (8, 8),
                   lambda v: all(p >= 4 for p in v), "periods must be >= 4")
    m = take("grid.m", int, 16, lambda v: v >= 4, "m must be >= 4")
    p = take("exponents.p", float, 2.0, lambda v: 1.0 <= v < np.inf, "constraint is p >= 1")
    q = take("exponents.q", float, 2.0, lambda v: 1.0 <= v < np.inf, "constraint is q >= 1")
    bank_r = take("bank.r", int, 1, lambda v: v >= 1, "bank.r must be >= 1")

    bank_kernels: tuple[KernelSpec, ...] = ()
    if "bank.kernels" in raw:
        toks = [t for t in raw["bank.kernels"].split(",") if t.strip()]
        parsed = []
        for t in toks:
            try:
                parsed.append(_parse_kernel_token(t))
            except (ValueError, GridError) as exc:
                violations.append(f"bank.kernels: {exc}")
        bank_kernels = tuple(parsed)

    s_mode = take("sampling.mode", str, "jittered",
                  lambda v: v in ("jittered", "random", "file"),
                  "mode must be jittered, random, or file")
    s_s = take("sampling.s", float, 0.5, lambda v: v > 0, "s must be positive")
    s_eta = take("sampling.eta", float, 0.2, lambda v: v >= 0, "eta must be >= 0")
    s_n = take("sampling.n", int, 100, lambda v: v >= 1, "n must be >= 1")
    s_gamma = take("sampling.gamma", float, 0.5, lambda v: v > 0, "gamma must be positive")
    s_structure = take("sampling.structure", str, "scattered",
                       lambda v: v in ("scattered", "product"),
                       "structure must be scattered or product")
    s_file = take("sampling.file", str, "")

    k_mode = take("kernels.mode", str, "single",
                  lambda v: v in ("single", "per_sample"),
                  "mode must be single or per_sample")
    k_shape = take("kernels.shape", str, "box",
                   lambda v: v in ("box", "tent", "signed"),
                   "shape must be box, tent, or signed")
    k_a = take("kernels.a", float, 0.25, lambda v: v > 0, "a must be positive")
    k_mt = take("kernels.m_target", float, 1.0, lambda v: v >= 1.0, "M_target must be >= 1")
    k_of = take("kernels.offset_fraction", float, 0.25,
                lambda v: 0 <= v <= 0.25, "offset_fraction must lie in [0, 1/4]")
    k_ir = take("kernels.inner_ratio", float, 0.5,
                lambda v: 0 < v < 1, "inner_ratio must lie in (0, 1)")

    max_iter = take("iteration.max_iter", int, 500, lambda v: v >= 1, "max_iter must be >= 1")
    tol = take("iteration.tol", float, 1e-10, lambda v: v > 0, "tol must be positive")
    seed = take("seed", int, 0)
    output = take("output", str, "out")

    # cross-field rules
    min_period = min(periods)
    if s_mode == "jittered":
        if not s_s < min_period:
            violations.append(f"sampling.s: spacing must be below the smallest period {min_period}")
        if not s_eta < s_s / 2:
            violations.append("sampling.eta: jitter must satisfy eta < s/2")
    if s_mode == "file" and not s_file:
        violations.append("sampling.file: file mode needs a path")
    if k_a > min_period / 8.0:
        violations.append(
            f"kernels.a: support-vs-period rule requires a <= min period / 8 "
            f"(a={k_a!r}, min period {min_period})"
        )
    if k_shape != "signed" and abs(k_mt - 1.0) > 1e-12:
        violations.append("kernels.m_target: M_target > 1 requires kernels.shape = signed")
    if not bank_kernels:
        bank_kernels = _default_bank_kernels(bank_r)
    if len(bank_kernels) != bank_r:
        violations.append(
            f"bank.kernels: expected {bank_r} kernels for bank.r = {bank_r}, "
            f"got {len(bank_kernels)}"
        )
    for i, k in enumerate(bank_kernels):
        diam = 2.0 * k.base_radius * max(k.scales(d + 1))
        if diam >= min_period:
            violations.append(
                f"bank.kernels[{i}]: support diameter {diam} must be below "
                f"the smallest period {min_period}"
            )

    if violations:
        raise ConfigError(violations)

    return ExperimentConfig(
        grid=GridSpec(d, periods, m),
        exponents=MixedExponents(p, q),
        bank_r=bank_r,
        bank_kernels=bank_kernels,
        sampling=SamplingConfig(s_mode, s_s, s_eta, s_n, s_gamma, s_structure, s_file),
        kernels=AveragingConfig(k_mode, k_shape, k_a, k_mt, k_of, k_ir),
        iteration=IterationConfig(max_iter, tol),
        seed=seed,
        output=output,
    )


def render_config(cfg: ExperimentConfig) -> str:
    lines = [
        f"grid.d = {cfg.grid.d}",
        f"grid.periods = {cfg.grid.periods[0]},{cfg.grid.periods[1]}",
        f"grid.m = {cfg.grid.m}",
        f"exponents.p = {cfg.exponents.p!r}",
        f"exponents.q = {cfg.exponents.q!r}",
        f"bank.r = {cfg.bank_r}",
        f"bank.kernels = {','.join(kernel_token(k) for k in cfg.bank_kernels)}",
        f"sampling.mode = {cfg.sampling.mode}",
        f"sampling.s = {cfg.sampling.s!r}",
        f"sampling.eta = {cfg.sampling.eta!r}",
        f"sampling.n = {cfg.sampling.n}",
        f"sampling.gamma = {cfg.sampling.gamma!r}",
        f"sampling.structure = {cfg.sampling.structure}",
        f"kernels.mode = {cfg.kernels.mode}",
        f"kernels.shape = {cfg.kernels.shape}",
        f"kernels.a = {cfg.kernels.a!r}",
        f"kernels.m_target = {cfg.kernels.m_target!r}",
        f"kernels.offset_fraction = {cfg.kernels.offset_fraction!r}",
        f"kernels.inner_ratio = {cfg.kernels.inner_ratio!r}",
        f"iteration.max_iter = {cfg.iteration.max_iter}",
        f"iteration.tol = {cfg.iteration.tol!r}",
        f"seed = {cfg.seed}",
        f"output = {cfg.output}",
    ]
    if cfg.sampling.file:
        lines.insert(13, f"sampling.file = {cfg.sampling.file}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pipeline assembly
# ---------------------------------------------------------------------------


def derived_seeds(seed: int) -> SimpleNamespace:
    """Independent deterministic seed streams for each pipeline stage."""
    root = np.random.SeedSequence(seed)
    sampling, kernels, truth, probes = root.spawn(4)
    return SimpleNamespace(sampling=sampling, kernels=kernels,
                           truth=truth, probes=probes)


def build_pipeline(cfg: ExperimentConfig, seed: int | None = None) -> SimpleNamespace:
    """Construct every object a run needs from a validated config."""
    seed = cfg.seed if seed is None else seed
    seeds = derived_seeds(seed)
    spec = cfg.grid
    bank = GeneratorBank(spec, cfg.bank_kernels)
    gram = build_gram(bank)
    sc = cfg.sampling
    if sc.mode == "file":
        X = load_sampling_set(sc.file)
        if X.points.shape[1] != spec.ndim:
            raise GridError(
                f"sampling file has {X.points.shape[1]} columns, grid needs {spec.ndim}"
            )
        if sc.gamma > 0:
            X = SamplingSet(np.asarray(X.points), X.structure, sc.gamma)
    elif sc.mode == "jittered":
        X = generate_sampling_set("jittered", spec, seeds.sampling, s=sc.s,
                                  eta=sc.eta, structure=sc.structure, gamma=sc.gamma)
    else:
        X = generate_sampling_set("random", spec, seeds.sampling, n=sc.n, gamma=sc.gamma)
    bupu = build_bupu(X, spec)
    kc = cfg.kernels
    kernels = make_kernels(kc.mode, kc.shape, kc.a, X, kc.m_target, seeds.kernels,
                           spec, offset_fraction=kc.offset_fraction,
                           inner_ratio=kc.inner_ratio)
    return SimpleNamespace(cfg=cfg, seed=seed, seeds=seeds, spec=spec, bank=bank,
                           gram=gram, X=X, bupu=bupu, kernels=kernels)


def config_for_combo(cfg: ExperimentConfig, gamma: float | None = None,
                     a: float | None = None, p: float | None = None,
                     q: float | None = None) -> ExperimentConfig:
    """Specialize a config for one sweep combination.

    Gamma drives the jittered sampling geometry directly: spacing s is set
    to gamma and the jitter to 0.4*gamma so the covering radius tracks the
    requested density.
    """
    out = cfg
    if gamma is not None:
        out = replace(out, sampling=replace(out.sampling, s=gamma,
                                            eta=0.4 * gamma, gamma=gamma))
    if a is not None:
        out = replace(out, kernels=replace(out.kernels, a=a))
    if p is not None or q is not None:
        e = out.exponents
        out = replace(out, exponents=MixedExponents(p if p is not None else e.p,
                                                    q if q is not None else e.q))
    return out
