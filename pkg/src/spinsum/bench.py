"""Success-probability estimation and time/energy-to-solution projection.

A campaign's per-benchmark best-so-far curves are reduced to a Bernoulli
picture: the first iteration k_i at which benchmark i clears the success
threshold is one geometric sample, the MLE of the per-iteration success
probability is 1/mean(k_i), and the time to reach the target probability
multiplies the mean attempt runtime by ln(1-p_target)/ln(1-p_success).
Energy charges hardware seconds and CPU seconds at their own powers.

Hardware timings here are projections from configured constants (the
device is modeled, not measured); software timings come from the caller's
measurements.  Benchmarks that never clear the threshold are excluded
from the estimate with an audible warning instead of being assigned an
infinite iteration count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "BenchConfig",
    "TtsEtsReport",
    "first_success_iterations",
    "estimate_p",
    "compute_tts",
    "compute_ets",
    "hardware_projection",
    "software_report",
]


@dataclass(frozen=True)
class BenchConfig:
    """Cost-model constants: threshold, per-iteration times, powers (watts)."""

    p_target: float = 0.95
    success_threshold: float = 0.9
    hw_time_per_iter: float = 200e-6
    eval_time_per_iter: float = 18.9e-6
    p_hw: float = 0.025
    p_cpu: float = 20.0

    def __post_init__(self) -> None:
        if not 0.0 < self.p_target < 1.0:
            raise ValidationError(f"p_target must lie in (0, 1), got {self.p_target!r}")
        for field_name in ("hw_time_per_iter", "eval_time_per_iter", "p_hw", "p_cpu"):
            value = getattr(self, field_name)
            if not (np.isfinite(value) and value > 0.0):
                raise ValidationError(f"{field_name} must be positive, got {value!r}")
        if not np.isfinite(self.success_threshold):
            raise ValidationError("success_threshold must be finite")


@dataclass(frozen=True)
class TtsEtsReport:
    """Point estimates for one solver: k̂, p̂, projected time and energy."""

    solver: str
    k_list: tuple[int, ...]
    excluded: tuple[int, ...]
    k_hat: float
    p_success: float
    tts: float
    ets: float

    def __post_init__(self) -> None:
        if not self.k_list:
            raise ValidationError("a report needs at least one successful benchmark")
        if abs(self.p_success * self.k_hat - 1.0) > 1e-9:
            raise ValidationError("p_success must equal 1/k_hat")
        if not (self.tts > 0.0 and self.ets > 0.0):
            raise ValidationError("tts and ets must be positive")


def first_success_iterations(
    curves, threshold: float
) -> tuple[list[int], list[int]]:
    """First iteration (1-based) at which each curve clears the threshold.

    ``curves`` is one sequence per benchmark of best-so-far normalized
    objectives.  Benchmarks that never clear the threshold are returned
    as excluded row indices and flagged with a warning.
    """
    ks: list[int] = []
    excluded: list[int] = []
    for row, curve in enumerate(np.atleast_2d(np.asarray(curves, dtype=np.float64))):
        hits = np.nonzero(curve >= threshold)[0]
        if hits.size:
            ks.append(int(hits[0]) + 1)
        else:
            excluded.append(row)
    if excluded:
        warnings.warn(
            f"{len(excluded)} benchmark(s) never reached threshold {threshold}; "
            f"excluded rows {excluded}",
            UserWarning,
            stacklevel=2,
        )
    return ks, excluded


def estimate_p(k_list) -> tuple[float, float]:
    """Geometric-model MLE: k̂ = mean first-success count, p̂ = 1/k̂."""
    ks = np.asarray(list(k_list), dtype=np.float64)
    if ks.size == 0:
        raise ValidationError("cannot estimate success probability from zero samples")
    if np.any(ks < 1):
        raise ValidationError("first-success counts must be at least 1")
    k_hat = float(ks.mean())
    return k_hat, 1.0 / k_hat


def tts_multiplier(p_success: float, p_target: float) -> float:
    """Number of independent attempts to reach p_target (1 when p == 1)."""
    if not 0.0 < p_success <= 1.0:
        raise ValidationError(f"p_success must lie in (0, 1], got {p_success!r}")
    if not 0.0 < p_target < 1.0:
        raise ValidationError(f"p_target must lie in (0, 1), got {p_target!r}")
    if p_success == 1.0:
        return 1.0
    return math.log(1.0 - p_target) / math.log(1.0 - p_success)


def compute_tts(p_success: float, p_target: float, runtimes) -> float:
    """Projected time to hit the target probability at least once."""
    times = np.asarray(list(runtimes), dtype=np.float64)
    if times.size == 0 or np.any(times <= 0):
        raise ValidationError("runtimes must be a nonempty list of positive durations")
    return tts_multiplier(p_success, p_target) * float(times.mean())


def compute_ets(tts_hw: float, tts_sw: float, config: BenchConfig) -> float:
    """Energy: hardware seconds at p_hw plus CPU seconds at p_cpu."""
    if tts_hw < 0 or tts_sw < 0:
        raise ValidationError("time components must be nonnegative")
    return tts_hw * config.p_hw + tts_sw * config.p_cpu


def hardware_projection(
    curves, config: BenchConfig | None = None, solver: str = "oscillator-hw"
) -> TtsEtsReport:
    """Project TTS/ETS for the modeled device from campaign curves.

    Each attempt of benchmark i is modeled as k_i device iterations, each
    iteration costing ``hw_time_per_iter`` on the device plus
    ``eval_time_per_iter`` of CPU-side objective evaluation; the two
    components carry their own powers in the energy figure.
    """
    config = config or BenchConfig()
    k_list, excluded = first_success_iterations(curves, config.success_threshold)
    k_hat, p_success = estimate_p(k_list)
    ks = np.asarray(k_list, dtype=np.float64)
    mult = tts_multiplier(p_success, config.p_target)
    tts_device = mult * float((ks * config.hw_time_per_iter).mean())
    tts_eval = mult * float((ks * config.eval_time_per_iter).mean())
    return TtsEtsReport(
        solver=solver,
        k_list=tuple(k_list),
        excluded=tuple(excluded),
        k_hat=k_hat,
        p_success=p_success,
        tts=tts_device + tts_eval,
        ets=compute_ets(tts_device, tts_eval, config),
    )


def software_report(
    curves, per_iter_seconds, config: BenchConfig | None = None, solver: str = "tabu-cpu"
) -> TtsEtsReport:
    """TTS/ETS for a CPU solver from campaign curves and measured times.

    ``per_iter_seconds`` is a scalar or per-benchmark array of measured
    seconds per iteration; attempt runtimes are k_i times that.  All time
    is CPU time, so the energy term uses only p_cpu.
    """
    config = config or BenchConfig()
    k_list, excluded = first_success_iterations(curves, config.success_threshold)
    k_hat, p_success = estimate_p(k_list)
    ks = np.asarray(k_list, dtype=np.float64)
    per_iter = np.broadcast_to(
        np.asarray(per_iter_seconds, dtype=np.float64), ks.shape
    )
    if np.any(per_iter <= 0):
        raise ValidationError("per-iteration seconds must be positive")
    tts = compute_tts(p_success, config.p_target, ks * per_iter)
    return TtsEtsReport(
        solver=solver,
        k_list=tuple(k_list),
        excluded=tuple(excluded),
        k_hat=k_hat,
        p_success=p_success,
        tts=tts,
        ets=compute_ets(0.0, tts, config),
    )
