"""Extractive summarization compiled to bounded-integer spin programs.

The library turns a relevance/redundancy sentence-selection model into a
quadratic binary program, folds the cardinality constraint in as a
penalty, rescales and rounds the coefficients into a hardware-style
integer window, and solves the result with exhaustive, tabu, or
coupled-oscillator backends — plus the iterative re-quantization and
windowed decomposition workflows built on top.
"""

from .bench import (
    BenchConfig,
    TtsEtsReport,
    compute_ets,
    compute_tts,
    estimate_p,
    first_success_iterations,
    hardware_projection,
    software_report,
    tts_multiplier,
)
from .errors import (
    ConfigError,
    DegenerateBoundsError,
    HardwareContractError,
    OracleSizeError,
    SpinsumError,
    ValidationError,
)
from .fileio import (
    load_campaign,
    load_instance,
    load_program,
    save_instance,
    save_program,
)
from .model import (
    EsInstance,
    IsingForm,
    QuboForm,
    Selection,
    build_qubo,
    default_bias,
    default_gamma,
    fp_objective,
    ising_energy,
    qubo_to_ising,
)
from .pipeline import (
    DecompositionPlan,
    IterationRecord,
    StageRecord,
    SuiteConfig,
    SuiteResult,
    VariantResult,
    VariantSpec,
    child_seed,
    compile_form,
    count_stages,
    decompose_summarize,
    iterate_solve,
    normalized_objective,
    run_variant_suite,
)
from .quantize import (
    QuantizedIsing,
    quantize,
    quantize_bits,
    range_for_bits,
)
from .solvers import (
    OracleBounds,
    OscillatorParams,
    SolveOutcome,
    TabuParams,
    random_selection,
    repair,
    run_backend,
    solve_exhaustive,
    solve_oscillator,
    solve_program_exact,
    solve_tabu,
)
from .synthetic import default_suite, make_instance

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BenchConfig",
    "TtsEtsReport",
    "compute_ets",
    "compute_tts",
    "estimate_p",
    "first_success_iterations",
    "hardware_projection",
    "software_report",
    "tts_multiplier",
    "ConfigError",
    "DegenerateBoundsError",
    "HardwareContractError",
    "OracleSizeError",
    "SpinsumError",
    "ValidationError",
    "load_campaign",
    "load_instance",
    "load_program",
    "save_instance",
    "save_program",
    "EsInstance",
    "IsingForm",
    "QuboForm",
    "Selection",
    "build_qubo",
    "default_bias",
    "default_gamma",
    "fp_objective",
    "ising_energy",
    "qubo_to_ising",
    "DecompositionPlan",
    "IterationRecord",
    "StageRecord",
    "SuiteConfig",
    "SuiteResult",
    "VariantResult",
    "VariantSpec",
    "child_seed",
    "compile_form",
    "count_stages",
    "decompose_summarize",
    "iterate_solve",
    "normalized_objective",
    "run_variant_suite",
    "QuantizedIsing",
    "quantize",
    "quantize_bits",
    "range_for_bits",
    "OracleBounds",
    "OscillatorParams",
    "SolveOutcome",
    "TabuParams",
    "random_selection",
    "repair",
    "run_backend",
    "solve_exhaustive",
    "solve_oscillator",
    "solve_program_exact",
    "solve_tabu",
    "default_suite",
    "make_instance",
]
