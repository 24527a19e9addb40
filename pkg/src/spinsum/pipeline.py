"""Quality-recovery strategies and campaign orchestration.

Two recovery loops sit on top of the compile/quantize/solve chain:

* **Iterative re-quantization** — with a random rounding rule, every
  iteration produces a different integer program; solving each and
  keeping the best full-precision objective recovers much of the quality
  a single low-precision shot loses.
* **Windowed decomposition** — long documents are condensed window by
  window: each stage takes a fixed-length run of surviving sentences
  (wrapping around the end of the survivor list), summarizes it down to
  a shorter list on the solver, and splices the survivors back in
  document order, until one final budget-sized solve remains.

``run_variant_suite`` runs a grid of such strategies over an instance
collection with split seeds and reports normalized objectives, where 1.0
is the exact optimum and 0.0 the worst feasible selection.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBoundsError, ValidationError
from .model import (
    EsInstance,
    IsingForm,
    Selection,
    build_qubo,
    default_bias,
    default_gamma,
    fp_objective,
    qubo_to_ising,
)
from .quantize import SCHEMES, QuantizedIsing, quantize, range_for_bits
from .solvers import (
    BACKENDS,
    OracleBounds,
    OscillatorParams,
    SolveOutcome,
    TabuParams,
    run_backend,
    solve_exhaustive,
)

__all__ = [
    "FORMULATIONS",
    "IterationRecord",
    "StageRecord",
    "DecompositionPlan",
    "VariantSpec",
    "SuiteConfig",
    "VariantResult",
    "SuiteResult",
    "child_seed",
    "form_digest",
    "normalized_objective",
    "compile_form",
    "iterate_solve",
    "count_stages",
    "decompose_summarize",
    "run_variant_suite",
]

FORMULATIONS = ("original", "improved")


def child_seed(root: int, *key: int) -> int:
    """Derive an independent stream seed from a root and an index path."""
    ss = np.random.SeedSequence(int(root), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def form_digest(form) -> str:
    """Stable content hash for either a quantized or a full-precision form."""
    if isinstance(form, QuantizedIsing):
        return form.digest()
    h = np.ascontiguousarray(np.asarray(form.h, dtype=np.float64))
    j = np.ascontiguousarray(np.asarray(form.j, dtype=np.float64))
    blob = b"fp:" + h.tobytes() + j.tobytes() + repr(float(form.offset)).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def normalized_objective(obj: float, bounds: OracleBounds) -> float:
    """Map an objective value onto [0, 1] between the oracle's worst and best."""
    span = bounds.obj_max - bounds.obj_min
    if span <= 0.0:
        raise DegenerateBoundsError(
            f"cannot normalize: obj_max == obj_min == {bounds.obj_max!r}"
        )
    return (float(obj) - bounds.obj_min) / span


def compile_form(instance: EsInstance, formulation: str) -> IsingForm:
    """Instance → spin program; 'improved' adds the median-aligning bias."""
    if formulation not in FORMULATIONS:
        raise ValidationError(
            f"formulation must be one of {FORMULATIONS}, got {formulation!r}"
        )
    gamma = default_gamma(instance)
    bias = default_bias(instance, gamma) if formulation == "improved" else 0.0
    return qubo_to_ising(build_qubo(instance, gamma, bias=bias))


# ---------------------------------------------------------------------------
# iterative re-quantization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IterationRecord:
    """One pass of the refinement loop (iteration numbers are 1-based)."""

    iteration: int
    digest: str
    outcome: SolveOutcome
    best_so_far: float


def iterate_solve(
    instance: EsInstance,
    formulation: str,
    scheme: str,
    range_w: int | None,
    iterations: int,
    backend: str,
    seed: int,
    tabu_params: TabuParams | None = None,
    oscillator_params: OscillatorParams | None = None,
) -> tuple[SolveOutcome, list[IterationRecord]]:
    """Re-quantize and solve ``iterations`` times; keep the best selection.

    Iteration variety comes from the rounding: iteration k rounds with a
    child seed derived from (seed, k), while the backend seed is derived
    from (seed, program digest).  Solving the identical program twice in
    one loop therefore runs the backend identically — with deterministic
    rounding the whole loop is one solve repeated, so its best-so-far
    curve is flat by construction.  ``range_w=None`` skips quantization
    and solves the full-precision program (the rounding scheme is then
    irrelevant).  Ties on the full-precision objective keep the earlier
    iteration.
    """
    if not (isinstance(iterations, (int, np.integer)) and iterations >= 1):
        raise ValidationError(f"iterations must be a positive integer, got {iterations!r}")
    if scheme not in SCHEMES:
        raise ValidationError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    form = compile_form(instance, formulation)
    best: SolveOutcome | None = None
    records: list[IterationRecord] = []
    for k in range(1, int(iterations) + 1):
        if range_w is None:
            program = form
        elif scheme == "deterministic":
            program = quantize(form, range_w, scheme="deterministic")
        else:
            program = quantize(form, range_w, scheme=scheme, seed=child_seed(seed, k, 0))
        digest = form_digest(program)
        outcome = run_backend(
            backend,
            instance,
            program,
            seed=child_seed(seed, int(digest, 16)),
            tabu_params=tabu_params,
            oscillator_params=oscillator_params,
        )
        if best is None or outcome.fp_objective > best.fp_objective:
            best = outcome
        records.append(
            IterationRecord(
                iteration=k,
                digest=digest,
                outcome=outcome,
                best_so_far=best.fp_objective,
            )
        )
    return best, records


# ---------------------------------------------------------------------------
# windowed decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageRecord:
    """One condensation stage: cursor position, window members, survivors."""

    start: int
    members: tuple[int, ...]
    selected: tuple[int, ...]


@dataclass(frozen=True)
class DecompositionPlan:
    window_len: int
    keep_per_window: int
    summary_len: int
    trace: tuple[StageRecord, ...]

    def __post_init__(self) -> None:
        if not self.keep_per_window < self.window_len:
            raise ValidationError("keep_per_window must be smaller than window_len")
        if not self.summary_len <= self.keep_per_window:
            raise ValidationError("summary_len must not exceed keep_per_window")

    @property
    def stages(self) -> int:
        return len(self.trace)


def count_stages(n: int, window_len: int, keep_per_window: int) -> int:
    """Number of solver calls a decomposition will make (windowed + final)."""
    stages = 1
    survivors = n - window_len + keep_per_window
    while survivors > window_len:
        stages += 1
        survivors -= window_len - keep_per_window
    return stages + 1


def decompose_summarize(
    instance: EsInstance,
    window_len: int,
    keep_per_window: int,
    backend: str,
    scheme: str,
    iters_per_stage: int,
    seed: int,
    range_w: int | None = 14,
    tabu_params: TabuParams | None = None,
    oscillator_params: OscillatorParams | None = None,
) -> tuple[Selection, DecompositionPlan]:
    """Condense a long document window by window, then solve the final cut.

    A working list of surviving sentence indices (document order) starts
    as 0..N-1 with a cursor at 0.  Each stage takes ``window_len``
    consecutive survivors from the cursor — wrapping past the end of the
    list to its beginning — keeps ``keep_per_window`` of them via
    ``iterate_solve`` on the exact restriction of the instance, splices
    the survivors back in document order, and moves the cursor to the
    position of the first sentence after the consumed window.  At least
    one windowed stage always runs; once no more than ``window_len``
    survivors remain, a final stage selects the ``summary_len`` output.
    Stage subproblems recompute their own penalty and bias (improved
    formulation).
    """
    n, m = instance.n, instance.summary_len
    p, q = int(window_len), int(keep_per_window)
    if not m <= q:
        raise ValidationError(f"keep_per_window={q} must be at least summary_len={m}")
    if not q < p:
        raise ValidationError(f"window_len={p} must exceed keep_per_window={q}")
    if not p <= n:
        raise ValidationError(f"window_len={p} must not exceed the document length {n}")
    working = list(range(n))
    cursor = 0
    trace: list[StageRecord] = []
    stage = 0
    while stage == 0 or len(working) > p:
        length = len(working)
        window = [working[(cursor + t) % length] for t in range(p)]
        members = sorted(window)
        sub = instance.restrict(members, q)
        best, _ = iterate_solve(
            sub,
            "improved",
            scheme,
            range_w,
            iters_per_stage,
            backend,
            child_seed(seed, stage),
            tabu_params=tabu_params,
            oscillator_params=oscillator_params,
        )
        kept = sorted(members[i] for i in best.selection.indices)
        trace.append(StageRecord(start=cursor, members=tuple(members), selected=tuple(kept)))
        window_set = set(window)
        survivors = sorted((set(working) - window_set) | set(kept))
        # next cursor: first surviving sentence at or after the window's end,
        # scanning the old circular order (when the window covered the whole
        # list, that is simply the first kept member from the old cursor on)
        survivor_set = set(survivors)
        cursor_target = None
        for t in range(length):
            candidate = working[(cursor + p + t) % length]
            if candidate in survivor_set:
                cursor_target = candidate
                break
        working = survivors
        cursor = working.index(cursor_target)
        stage += 1
    members = sorted(working)
    sub = instance.restrict(members, m)
    best, _ = iterate_solve(
        sub,
        "improved",
        scheme,
        range_w,
        iters_per_stage,
        backend,
        child_seed(seed, stage),
        tabu_params=tabu_params,
        oscillator_params=oscillator_params,
    )
    final = sorted(members[i] for i in best.selection.indices)
    trace.append(StageRecord(start=cursor, members=tuple(members), selected=tuple(final)))
    plan = DecompositionPlan(
        window_len=p, keep_per_window=q, summary_len=m, trace=tuple(trace)
    )
    return Selection.from_indices(n, final), plan


# ---------------------------------------------------------------------------
# variant campaigns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VariantSpec:
    """One strategy in a campaign grid.

    ``bits`` (if given) overrides ``range_w`` with the signed b-bit
    window; ``range_w=None`` and ``bits=None`` means full precision.
    ``decompose`` holds (window_len, keep_per_window) for the windowed
    workflow; ``iterations`` is then the total budget split evenly
    across stages (at least one per stage).
    """

    name: str
    backend: str
    formulation: str = "improved"
    scheme: str = "deterministic"
    iterations: int = 1
    range_w: int | None = 14
    bits: int | None = None
    decompose: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("variant name must be nonempty")
        if self.backend not in BACKENDS:
            raise ValidationError(f"backend must be one of {BACKENDS}, got {self.backend!r}")
        if self.formulation not in FORMULATIONS:
            raise ValidationError(
                f"formulation must be one of {FORMULATIONS}, got {self.formulation!r}"
            )
        if self.scheme not in SCHEMES:
            raise ValidationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (isinstance(self.iterations, (int, np.integer)) and self.iterations >= 1):
            raise ValidationError(
                f"iterations must be a positive integer, got {self.iterations!r}"
            )
        if self.bits is not None:
            range_for_bits(self.bits)  # bounds check
        if self.range_w is not None and (
            not isinstance(self.range_w, (int, np.integer)) or self.range_w < 1
        ):
            raise ValidationError(f"range_w must be a positive integer, got {self.range_w!r}")
        if self.decompose is not None:
            p, q = self.decompose
            if not (isinstance(p, (int, np.integer)) and isinstance(q, (int, np.integer)) and q < p):
                raise ValidationError(
                    f"decompose must be (window_len, keep_per_window) with keep < window, got {self.decompose!r}"
                )
            object.__setattr__(self, "decompose", (int(p), int(q)))

    def effective_range(self) -> int | None:
        if self.bits is not None:
            return range_for_bits(self.bits)
        return None if self.range_w is None else int(self.range_w)


@dataclass(frozen=True)
class SuiteConfig:
    variants: tuple[VariantSpec, ...]
    repeats: int = 1
    seed: int = 0
    tabu: TabuParams | None = None
    oscillator: OscillatorParams | None = None

    def __post_init__(self) -> None:
        variants = tuple(self.variants)
        if not variants:
            raise ValidationError("a campaign needs at least one variant")
        names = [v.name for v in variants]
        if len(set(names)) != len(names):
            raise ValidationError(f"variant names must be unique, got {names}")
        if not (isinstance(self.repeats, (int, np.integer)) and self.repeats >= 1):
            raise ValidationError(f"repeats must be a positive integer, got {self.repeats!r}")
        object.__setattr__(self, "variants", variants)


@dataclass(frozen=True)
class VariantResult:
    """Per-instance × per-repeat campaign outputs for one variant."""

    spec: VariantSpec
    instance_names: tuple[str, ...]
    finals: np.ndarray  # (instances, repeats) final normalized objective
    curves: np.ndarray | None  # (instances, repeats, iterations) best-so-far
    iter_seconds: float | None = None  # measured mean wall time per solver call

    def aggregate(self) -> dict[str, float]:
        flat = self.finals.ravel()
        return {
            "mean": float(flat.mean()),
            "median": float(np.median(flat)),
            "min": float(flat.min()),
            "max": float(flat.max()),
        }

    def mean_curves(self) -> np.ndarray:
        """Per-instance best-so-far curves averaged over repeats: (B, T)."""
        if self.curves is None:
            raise ValidationError(
                f"variant {self.spec.name!r} is a decomposition run and has no iteration curves"
            )
        return self.curves.mean(axis=1)


@dataclass(frozen=True)
class SuiteResult:
    config: SuiteConfig
    results: tuple[VariantResult, ...]
    skipped: tuple[tuple[str, str], ...]

    def variant(self, name: str) -> VariantResult:
        for res in self.results:
            if res.spec.name == name:
                return res
        raise KeyError(f"no variant named {name!r} in this campaign")

    def summary_rows(self) -> list[dict[str, object]]:
        rows = []
        for res in self.results:
            agg = res.aggregate()
            rows.append(
                {
                    "variant": res.spec.name,
                    "backend": res.spec.backend,
                    "formulation": res.spec.formulation,
                    "scheme": res.spec.scheme,
                    "iterations": res.spec.iterations,
                    "range_w": res.spec.effective_range(),
                    "decompose": res.spec.decompose,
                    **agg,
                }
            )
        return rows


def _run_variant_cell(
    spec: VariantSpec,
    instance: EsInstance,
    bounds: OracleBounds,
    root: int,
    tabu: TabuParams | None,
    oscillator: OscillatorParams | None,
) -> tuple[float, np.ndarray | None, float]:
    """One (variant, instance, repeat) cell → (final, optional curve, seconds/iter)."""
    range_w = spec.effective_range()
    if spec.decompose is not None:
        p, q = spec.decompose
        per_stage = max(1, spec.iterations // count_stages(instance.n, p, q))
        started = time.perf_counter()
        selection, _ = decompose_summarize(
            instance,
            p,
            q,
            spec.backend,
            spec.scheme,
            per_stage,
            root,
            range_w=range_w,
            tabu_params=tabu,
            oscillator_params=oscillator,
        )
        elapsed = time.perf_counter() - started
        final = normalized_objective(fp_objective(instance, selection), bounds)
        return final, None, elapsed
    best, records = iterate_solve(
        instance,
        spec.formulation,
        spec.scheme,
        range_w,
        spec.iterations,
        spec.backend,
        root,
        tabu_params=tabu,
        oscillator_params=oscillator,
    )
    curve = np.array([normalized_objective(r.best_so_far, bounds) for r in records])
    per_iter = sum(r.outcome.wall_time for r in records) / len(records)
    return float(curve[-1]), curve, per_iter


def run_variant_suite(
    instances, config: SuiteConfig, threads: int = 1
) -> SuiteResult:
    """Run every variant × instance × repeat cell with split seeds.

    Instances whose oracle bounds cannot be computed (too large) or are
    degenerate (max == min) are skipped and recorded with the reason;
    every surviving cell gets an independent seed derived from
    (config.seed, variant, instance, repeat), so results do not depend
    on execution order or thread count.
    """
    instances = list(instances)
    usable: list[tuple[int, EsInstance, OracleBounds]] = []
    skipped: list[tuple[str, str]] = []
    for b, inst in enumerate(instances):
        try:
            bounds = solve_exhaustive(inst)
            if bounds.obj_max - bounds.obj_min <= 0.0:
                raise DegenerateBoundsError(
                    "all feasible selections share one objective value"
                )
        except Exception as exc:  # noqa: BLE001 — reason lands in the report
            skipped.append((inst.name, f"{type(exc).__name__}: {exc}"))
            continue
        usable.append((b, inst, bounds))

    results: list[VariantResult] = []
    for v, spec in enumerate(config.variants):
        finals = np.zeros((len(usable), config.repeats))
        timings = np.zeros((len(usable), config.repeats))
        curves = (
            None
            if spec.decompose is not None
            else np.zeros((len(usable), config.repeats, spec.iterations))
        )

        def one_cell(task, spec=spec, finals=finals, curves=curves, timings=timings, v=v):
            row, (b, inst, bounds), r = task
            root = child_seed(config.seed, v, b, r)
            final, curve, per_iter = _run_variant_cell(
                spec, inst, bounds, root, config.tabu, config.oscillator
            )
            finals[row, r] = final
            timings[row, r] = per_iter
            if curves is not None:
                curves[row, r] = curve

        tasks = [
            (row, entry, r)
            for row, entry in enumerate(usable)
            for r in range(config.repeats)
        ]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(one_cell, tasks))
        else:
            for task in tasks:
                one_cell(task)
        results.append(
            VariantResult(
                spec=spec,
                instance_names=tuple(inst.name for _, inst, _ in usable),
                finals=finals,
                curves=curves,
                iter_seconds=float(timings.mean()) if timings.size else None,
            )
        )
    return SuiteResult(config=config, results=tuple(results), skipped=tuple(skipped))
