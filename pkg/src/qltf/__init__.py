"""Quasi-linear transfer functions (QLTFs) for Volterra-series systems."""

__version__ = "0.1.0"

from .spectral_core import (
    FrequencySet,
    IntervalUnion,
    LineSpectrum,
    MultitoneSignal,
    Tone,
    line_spectrum,
    normalize_interval_union,
)
from .gfrf import (
    DuffingParams,
    KernelTransferFunction,
    PhysicalParams,
    PoleError,
    constant_kernel,
    duffing_h1,
    duffing_h2,
    duffing_h3,
    duffing_kernel,
    normalize,
    symmetrize,
)
from .multitone import (
    compare_fingerprints,
    input_spectral_coeffs,
    output_spectral_coeffs,
    output_spectrum,
    qltf,
)
from .freq_range import (
    Band,
    band_output_range,
    band_output_range_nonneg,
    brute_force_multitone_freqs,
    multitone_gamma,
    multitone_output_freqs,
    multitone_output_freqs_full,
)
from .discrete import (
    DiscreteKernel,
    SampledSignal,
    dft,
    dqltf,
    idft,
    input_spectral_dft,
    output_spectral_dft,
    volterra_response,
)
from .simulator import SimConfig, simulate_duffing, export_phase_portrait
