"""Reconstruction from nonuniform average samples in multiply generated
shift-invariant spaces, with mixed-norm and amalgam-norm diagnostics."""

from .grid import (DiscreteField, GridError, GridSpec, KernelSpec, convolve,
                   convolve_kernel, integrate, lin_comb, rasterize,
                   reflect_conjugate, translate_cells)
from .norms import (MixedExponents, mixed_lebesgue_norm, mixed_seq_norm,
                    oscillation, wiener_amalgam_norm)
from .spaces import (CoefficientArray, GeneratorBank, GramOperator,
                     NormEquivalence, build_gram, default_bank,
                     estimate_norm_equivalence, estimate_projection_norm,
                     project, synthesize)
from .sampling import (AveragingKernelSet, Bupu, SamplingSet, acquire_samples,
                       build_bupu, generate_sampling_set, load_sampling_set,
                       make_kernels, save_sampling_set, verify_density)
from .reconstruct import (ContractionEstimate, ReconstructionOptions,
                          ReconstructionReport, approx_operator,
                          estimate_contraction, fit_decay, quasi_interpolant,
                          reconstruct, spread)
from .config import (AveragingConfig, ConfigError, ExperimentConfig,
                     IterationConfig, SamplingConfig, build_pipeline,
                     config_for_combo, parse_config, parse_config_text,
                     render_config)

__version__ = "0.1.0"
