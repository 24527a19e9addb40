"""Pluggable selection/spin solvers and feasibility repair.

Four backends share one outcome shape:

* ``exhaustive`` — exact argmin of a spin program by full enumeration
  (and, separately, the subset-enumeration oracle used for normalization
  bounds).  Refuses oversized inputs instead of sampling.
* ``tabu`` — steepest-admissible single-flip search with a recency list
  and an aspiration rule, run for a bounded number of sweeps.
* ``oscillator`` — a desk-scale surrogate of coupled-oscillator hardware:
  Kuramoto phase dynamics with a ramped second-harmonic locking term and
  decaying noise, local fields encoded through one ancilla oscillator.
  Enforces the hardware contract (integer couplings within the range).
* ``random`` — uniform feasible selection, the control baseline.

Heuristic backends return spin vectors that may violate the cardinality
budget; ``repair`` greedily swaps by marginal objective contribution until
the budget holds, and ``run_backend`` packages everything into a
``SolveOutcome`` with the pre-repair energy kept for the record.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np
from numba import njit

from .errors import HardwareContractError, OracleSizeError, ValidationError
from .model import EsInstance, IsingForm, Selection, fp_objective, ising_energy
from .quantize import QuantizedIsing

__all__ = [
    "BACKENDS",
    "SolveOutcome",
    "OracleBounds",
    "TabuParams",
    "OscillatorParams",
    "solve_exhaustive",
    "solve_program_exact",
    "solve_tabu",
    "solve_oscillator",
    "random_selection",
    "repair",
    "run_backend",
]

BACKENDS = ("exhaustive", "tabu", "oscillator", "random")

ORACLE_CAP = 10_000_000


@dataclass(frozen=True)
class SolveOutcome:
    """One backend run: what was picked, how it scored, what repair did."""

    selection: Selection
    raw_energy: float
    fp_objective: float
    feasible_before_repair: bool
    repaired: bool
    solver_id: str
    seed: int
    wall_time: float


@dataclass(frozen=True)
class OracleBounds:
    """Exact best/worst feasible objective values plus one maximizer."""

    obj_max: float
    obj_min: float
    argmax: Selection

    def __post_init__(self) -> None:
        if not (np.isfinite(self.obj_max) and np.isfinite(self.obj_min)):
            raise ValidationError("oracle bounds must be finite")
        if self.obj_min > self.obj_max:
            raise ValidationError(
                f"obj_min={self.obj_min!r} exceeds obj_max={self.obj_max!r}"
            )


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------


def solve_exhaustive(instance: EsInstance, cap: int = ORACLE_CAP) -> OracleBounds:
    """Enumerate every feasible subset; exact bounds or an explicit refusal.

    Ties on the maximum go to the lexicographically smallest index set
    (enumeration order), so the argmax is deterministic.
    """
    n, m = instance.n, instance.summary_len
    total = math.comb(n, m)
    if total > cap:
        raise OracleSizeError(
            f"C({n},{m}) = {total} feasible subsets exceeds the oracle cap of {cap}"
        )
    mu, beta, lam = instance.mu, instance.beta, instance.lam
    best_val = -np.inf
    best_combo = None
    worst_val = np.inf
    combos = combinations(range(n), m)
    batch_size = 65536
    while True:
        batch = list(islice(combos, batch_size))
        if not batch:
            break
        idx = np.asarray(batch, dtype=np.intp)
        mu_part = mu[idx].sum(axis=1)
        sub = beta[idx[:, :, None], idx[:, None, :]]
        vals = mu_part - lam * sub.sum(axis=(1, 2))
        k_max = int(np.argmax(vals))
        if vals[k_max] > best_val:
            best_val = float(vals[k_max])
            best_combo = batch[k_max]
        k_min = int(np.argmin(vals))
        if vals[k_min] < worst_val:
            worst_val = float(vals[k_min])
    return OracleBounds(
        obj_max=best_val,
        obj_min=worst_val,
        argmax=Selection.from_indices(n, best_combo),
    )


def _spin_batches(n: int, batch: int = 1 << 16):
    """Yield ±1 matrices covering {0,1}^n in lexicographic vector order."""
    total = 1 << n
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint32)
    for start in range(0, total, batch):
        ks = np.arange(start, min(start + batch, total), dtype=np.uint32)
        bits = (ks[:, None] >> shifts[None, :]) & 1
        yield 2.0 * bits - 1.0


def solve_program_exact(form, cap_bits: int = 24) -> np.ndarray:
    """Exact argmin spins of a pairwise program by full 2^N enumeration.

    Ties go to the configuration whose 0/1 vector is lexicographically
    smallest.  Refuses programs beyond ``cap_bits`` variables.
    """
    h = np.asarray(form.h, dtype=np.float64)
    j = np.asarray(form.j, dtype=np.float64)
    n = h.shape[0]
    if n > cap_bits:
        raise OracleSizeError(
            f"2^{n} spin states exceed the exact-solve cap of 2^{cap_bits}"
        )
    best_energy = np.inf
    best = None
    for spins in _spin_batches(n):
        energies = spins @ h + 2.0 * ((spins @ j) * spins).sum(axis=1)
        k = int(np.argmin(energies))
        if energies[k] < best_energy:
            best_energy = float(energies[k])
            best = spins[k]
    return best.astype(np.int8)


# ---------------------------------------------------------------------------
# tabu search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TabuParams:
    tenure: int = 10
    max_sweeps: int = 500
    stall_limit: int = 100

    def __post_init__(self) -> None:
        if not (isinstance(self.tenure, (int, np.integer)) and self.tenure >= 0):
            raise ValidationError(f"tenure must be a nonnegative integer, got {self.tenure!r}")
        if not (isinstance(self.max_sweeps, (int, np.integer)) and self.max_sweeps >= 1):
            raise ValidationError(f"max_sweeps must be a positive integer, got {self.max_sweeps!r}")
        if not (isinstance(self.stall_limit, (int, np.integer)) and self.stall_limit >= 1):
            raise ValidationError(f"stall_limit must be a positive integer, got {self.stall_limit!r}")


@njit(cache=True, nogil=True)
def _tabu_kernel(h, jsym, s, tenure, max_steps, stall_steps):  # pragma: no cover
    n = s.shape[0]
    f2 = 2.0 * jsym.dot(s)
    energy = h.dot(s) + 0.5 * f2.dot(s)
    best_energy = energy
    best = s.copy()
    trace = np.empty(max_steps, dtype=np.float64)
    tabu_until = np.full(n, -1, dtype=np.int64)
    since_best = 0
    used = 0
    for step in range(max_steps):
        chosen = -1
        chosen_de = 0.0
        overall = -1
        overall_de = 0.0
        for i in range(n):
            de = -2.0 * s[i] * (h[i] + f2[i])
            if overall < 0 or de < overall_de:
                overall = i
                overall_de = de
            ok = tabu_until[i] < step or (energy + de < best_energy - 1e-12)
            if ok and (chosen < 0 or de < chosen_de):
                chosen = i
                chosen_de = de
        if chosen < 0:
            chosen = overall
            chosen_de = overall_de
        s[chosen] = -s[chosen]
        energy += chosen_de
        tabu_until[chosen] = step + tenure
        for k in range(n):
            f2[k] += 4.0 * jsym[k, chosen] * s[chosen]
        if energy < best_energy - 1e-12:
            best_energy = energy
            for k in range(n):
                best[k] = s[k]
            since_best = 0
        else:
            since_best += 1
        trace[step] = best_energy
        used = step + 1
        if since_best >= stall_steps:
            break
    return best, trace[:used]


def solve_tabu(form, params: TabuParams | None = None, seed: int = 0, with_trace: bool = False):
    """Steepest-admissible single-flip search; the seed fixes only the start.

    Each step flips the admissible spin with the largest energy drop; a
    flipped spin is then held for ``tenure`` steps unless flipping it
    again would beat the best energy seen (aspiration).  Stops after
    ``stall_limit`` sweeps without a new best or ``max_sweeps`` total.
    """
    params = params or TabuParams()
    h = np.asarray(form.h, dtype=np.float64)
    j = np.asarray(form.j, dtype=np.float64)
    n = h.shape[0]
    jsym = j + j.T
    rng = np.random.default_rng(seed)
    start = rng.choice(np.array([-1.0, 1.0]), size=n)
    best, trace = _tabu_kernel(
        h,
        jsym,
        start,
        int(params.tenure),
        int(params.max_sweeps) * n,
        int(params.stall_limit) * n,
    )
    spins = best.astype(np.int8)
    if with_trace:
        return spins, trace
    return spins


# ---------------------------------------------------------------------------
# coupled-oscillator surrogate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OscillatorParams:
    """Integration controls for the phase-dynamics surrogate.

    ``coupling_gain`` of None means 1/range_w, which normalizes the
    largest programmed coupling to unit strength.  ``lock_max`` is the
    final weight of the second-harmonic binarization term, ramped up
    linearly from zero; ``noise0`` is the initial noise amplitude, ramped
    down linearly to zero.
    """

    steps: int = 2000
    dt: float = 0.05
    coupling_gain: float | None = None
    lock_max: float = 2.0
    noise0: float = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.steps, (int, np.integer)) and self.steps >= 1):
            raise ValidationError(f"steps must be a positive integer, got {self.steps!r}")
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError(f"dt must be a positive real, got {self.dt!r}")
        if self.coupling_gain is not None and not (
            np.isfinite(self.coupling_gain) and self.coupling_gain > 0
        ):
            raise ValidationError(f"coupling_gain must be positive, got {self.coupling_gain!r}")
        if not (np.isfinite(self.lock_max) and self.lock_max >= 0):
            raise ValidationError(f"lock_max must be nonnegative, got {self.lock_max!r}")
        if not (np.isfinite(self.noise0) and self.noise0 >= 0):
            raise ValidationError(f"noise0 must be nonnegative, got {self.noise0!r}")


@njit(cache=True, nogil=True)
def _oscillator_kernel(coup, phases, noise, dt, gain, lock_max):  # pragma: no cover
    steps = noise.shape[0]
    n = phases.shape[0]
    for t in range(steps):
        lock = lock_max * (t / steps)
        cosv = np.cos(phases)
        sinv = np.sin(phases)
        a = coup.dot(cosv)
        b = coup.dot(sinv)
        for i in range(n):
            drift = gain * (sinv[i] * a[i] - cosv[i] * b[i]) - lock * np.sin(2.0 * phases[i])
            phases[i] += dt * drift + noise[t, i]
    return phases


def solve_oscillator(
    prog: QuantizedIsing, params: OscillatorParams | None = None, seed: int = 0
) -> np.ndarray:
    """Integrate coupled phases and read spins relative to the ancilla.

    The program's N fields become couplings from one extra oscillator, so
    the dynamics are purely pairwise as on the physical device.  Phases
    start uniformly at random (by seed), relax under the pairwise drift
    Σ_j C_ij sin(φ_i − φ_j) while a ramped sin(2φ) term pulls each phase
    toward {0, π} and i.i.d. Gaussian kicks (amplitude decaying linearly
    to zero) provide escape motion early on.  Readout is
    sign(cos(φ_i − φ_0)), which cancels the global spin-flip gauge.
    """
    if not isinstance(prog, QuantizedIsing):
        raise HardwareContractError(
            "the oscillator surrogate accepts only integer-quantized programs"
        )
    params = params or OscillatorParams()
    n = prog.n
    coup = np.zeros((n + 1, n + 1))
    coup[0, 1:] = prog.h
    coup[1:, 0] = prog.h
    pair = prog.j + prog.j.T
    coup[1:, 1:] = 2.0 * pair
    gain = params.coupling_gain
    if gain is None:
        gain = 1.0 / float(prog.range_w)
    rng = np.random.default_rng(seed)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n + 1)
    envelope = params.noise0 * np.sqrt(params.dt) * (1.0 - np.arange(params.steps) / params.steps)
    noise = rng.standard_normal((params.steps, n + 1)) * envelope[:, None]
    phases = _oscillator_kernel(
        coup, phases, noise, float(params.dt), float(gain), float(params.lock_max)
    )
    rel = np.cos(phases[1:] - phases[0])
    return np.where(rel >= 0.0, 1, -1).astype(np.int8)


# ---------------------------------------------------------------------------
# baseline and repair
# ---------------------------------------------------------------------------


def random_selection(n: int, m: int, seed) -> Selection:
    """Uniform random budgeted selection (m == n yields the full set)."""
    if not 1 <= m <= n:
        raise ValidationError(f"need 1 <= m <= n, got m={m}, n={n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    picked = rng.choice(n, size=m, replace=False)
    return Selection.from_indices(n, (int(i) for i in picked))


def repair(instance: EsInstance, sel: Selection) -> Selection:
    """Greedy budget repair by marginal objective contribution.

    Over budget: repeatedly drop the member whose removal costs least,
    μ_i − 2λ Σ_{j in sel, j≠i} β_ij.  Under budget: repeatedly add the
    outsider with the largest gain, μ_i − 2λ Σ_{j in sel} β_ij.  Ties go
    to the lowest index; feasible input is returned unchanged.
    """
    if sel.n != instance.n:
        raise ValidationError(f"selection has length {sel.n}, instance has n={instance.n}")
    m = instance.summary_len
    if sel.count == m:
        return sel
    x = sel.chosen.astype(np.float64)
    mu, beta, lam = instance.mu, instance.beta, instance.lam
    while int(x.sum()) > m:
        members = np.flatnonzero(x > 0)
        contrib = mu[members] - 2.0 * lam * (beta @ x)[members]
        x[members[int(np.argmin(contrib))]] = 0.0
    while int(x.sum()) < m:
        outside = np.flatnonzero(x == 0)
        gain = mu[outside] - 2.0 * lam * (beta @ x)[outside]
        x[outside[int(np.argmax(gain))]] = 1.0
    return Selection(x.astype(np.int8))


# ---------------------------------------------------------------------------
# unified dispatch
# ---------------------------------------------------------------------------


def run_backend(
    backend: str,
    instance: EsInstance,
    program,
    seed: int = 0,
    tabu_params: TabuParams | None = None,
    oscillator_params: OscillatorParams | None = None,
) -> SolveOutcome:
    """Run one backend on a compiled program and package a feasible outcome.

    ``program`` is the spin form the heuristic backends actually see
    (quantized or full precision); scoring always happens on the original
    instance at full precision, and infeasible raw answers are repaired.
    The exhaustive backend is the subset-enumeration oracle itself (it
    ignores the compiled program and is feasible by construction); the
    random baseline likewise only needs the budget.
    """
    if backend not in BACKENDS:
        raise ValidationError(f"backend must be one of {BACKENDS}, got {backend!r}")
    started = time.perf_counter()
    if backend == "exhaustive":
        spins = solve_exhaustive(instance).argmax.spins()
    elif backend == "tabu":
        spins = solve_tabu(program, params=tabu_params, seed=seed)
    elif backend == "oscillator":
        spins = solve_oscillator(program, params=oscillator_params, seed=seed)
    else:
        spins = random_selection(instance.n, instance.summary_len, seed).spins()
    raw = Selection.from_spins(spins)
    feasible = raw.is_feasible(instance.summary_len)
    final = raw if feasible else repair(instance, raw)
    elapsed = time.perf_counter() - started
    return SolveOutcome(
        selection=final,
        raw_energy=ising_energy(program, spins),
        fp_objective=fp_objective(instance, final),
        feasible_before_repair=feasible,
        repaired=not feasible,
        solver_id=backend,
        seed=int(seed),
        wall_time=elapsed,
    )
