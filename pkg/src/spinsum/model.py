"""Core sentence-selection model and its exact QUBO / Ising encodings.

A document of ``n`` sentences is summarized by choosing exactly
``summary_len`` of them.  Sentence ``i`` carries a relevance score
``mu[i]`` and each pair an off-diagonal redundancy score ``beta[i, j]``;
the selection objective over binary indicators ``x`` is

    sum_i mu[i] x[i]  -  lam * sum_{i != j} beta[i, j] x[i] x[j]

where the redundancy sum runs over ordered pairs, so each unordered pair
is charged twice.  The cardinality constraint is folded into an
unconstrained quadratic form with a penalty weight ``gamma``, optionally
augmented by a uniform relevance bias that recenters the linear
coefficients so that local fields and pair couplings occupy comparable
ranges (which is what makes joint integer scaling viable downstream).

Both compiled forms keep their constant terms in an explicit ``offset``
so that energies match the selection objective exactly for *every*
configuration, not merely up to a constant.  Conventions:

* ``QuboForm.quad`` is strictly upper-triangular and folds the two
  ordered contributions of a pair into one stored value.
* ``IsingForm.j`` is strictly upper-triangular and stores the
  *per-ordered-pair* coupling, so the energy charges each stored value
  twice: ``E(s) = h . s + 2 * sum_{i<j} j[i, j] s_i s_j + offset``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "EsInstance",
    "Selection",
    "QuboForm",
    "IsingForm",
    "fp_objective",
    "build_qubo",
    "default_gamma",
    "qubo_to_ising",
    "default_bias",
    "ising_energy",
]


def _finite_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must contain only finite values")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EsInstance:
    """A sentence-selection problem: relevance, redundancy, weight, budget."""

    mu: np.ndarray
    beta: np.ndarray
    summary_len: int
    lam: float = 1.0
    name: str = "instance"
    sentences: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        mu = _finite_array(self.mu, "mu")
        beta = _finite_array(self.beta, "beta")
        if mu.ndim != 1:
            raise ValidationError("mu must be a one-dimensional vector")
        n = mu.shape[0]
        if n < 2:
            raise ValidationError(f"an instance needs n >= 2 sentences, got n={n}")
        if beta.shape != (n, n):
            raise ValidationError(
                f"beta must be an {n}x{n} matrix to match mu, got shape {beta.shape}"
            )
        beta = beta.copy()
        # Self-redundancy carries no meaning in the ordered-pair sum.
        np.fill_diagonal(beta, 0.0)
        if not np.array_equal(beta, beta.T):
            i, j = map(int, np.argwhere(beta != beta.T)[0])
            raise ValidationError(
                "beta must be symmetric: "
                f"beta[{i}][{j}]={beta[i, j]!r} != beta[{j}][{i}]={beta[j, i]!r}"
            )
        if not isinstance(self.summary_len, (int, np.integer)):
            raise ValidationError(f"summary_len must be an integer, got {self.summary_len!r}")
        m = int(self.summary_len)
        if not 1 <= m < n:
            raise ValidationError(f"summary_len must satisfy 1 <= M < n={n}, got {m}")
        lam = float(self.lam)
        if not (np.isfinite(lam) and lam >= 0.0):
            raise ValidationError(f"lam must be a nonnegative real, got {self.lam!r}")
        sentences = self.sentences
        if sentences is not None:
            sentences = tuple(str(s) for s in sentences)
            if len(sentences) != n:
                raise ValidationError(
                    f"sentences has length {len(sentences)} but mu has n={n} entries"
                )
        object.__setattr__(self, "mu", _freeze(mu))
        object.__setattr__(self, "beta", _freeze(beta))
        object.__setattr__(self, "summary_len", m)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "sentences", sentences)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    def restrict(self, indices: Sequence[int], summary_len: int) -> "EsInstance":
        """Exact sub-instance over ``indices``: mu/beta are sliced, never recomputed."""
        idx = np.asarray(list(indices), dtype=np.intp)
        if idx.ndim != 1 or len(set(idx.tolist())) != idx.shape[0]:
            raise ValidationError("restriction indices must be a sequence of distinct integers")
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise ValidationError(f"restriction indices must lie in [0, {self.n})")
        sub_sentences = None
        if self.sentences is not None:
            sub_sentences = tuple(self.sentences[i] for i in idx)
        return EsInstance(
            mu=self.mu[idx],
            beta=self.beta[np.ix_(idx, idx)],
            summary_len=summary_len,
            lam=self.lam,
            name=f"{self.name}[{idx.size}]",
            sentences=sub_sentences,
        )


@dataclass(frozen=True)
class Selection:
    """A binary sentence choice; exposes the equivalent spin view s = 2x - 1."""

    chosen: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.chosen)
        if arr.ndim != 1:
            raise ValidationError("selection vector must be one-dimensional")
        if not np.isin(arr, (0, 1)).all():
            raise ValidationError("selection entries must all be 0 or 1")
        object.__setattr__(self, "chosen", _freeze(arr.astype(np.int8)))

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Selection":
        idx = list(indices)
        if len(set(idx)) != len(idx):
            raise ValidationError("selection indices must be distinct")
        chosen = np.zeros(n, dtype=np.int8)
        for i in idx:
            if not 0 <= i < n:
                raise ValidationError(f"selection index {i} out of range [0, {n})")
            chosen[i] = 1
        return cls(chosen)

    @classmethod
    def from_spins(cls, spins) -> "Selection":
        s = np.asarray(spins)
        if not np.isin(s, (-1, 1)).all():
            raise ValidationError("spins must all be -1 or +1")
        return cls(((s + 1) // 2).astype(np.int8))

    @property
    def n(self) -> int:
        return self.chosen.shape[0]

    @property
    def count(self) -> int:
        return int(self.chosen.sum())

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.chosen))

    def spins(self) -> np.ndarray:
        return (2 * self.chosen.astype(np.int16) - 1).astype(np.int8)

    def is_feasible(self, summary_len: int) -> bool:
        return self.count == summary_len


@dataclass(frozen=True)
class QuboForm:
    """Minimization form over binary x: linear . x + x' quad x + offset.

    ``quad`` is strictly upper-triangular; entry (i, j) folds both ordered
    contributions of the pair {i, j} into one stored coefficient.
    """

    linear: np.ndarray
    quad: np.ndarray
    offset: float = 0.0

    def __post_init__(self) -> None:
        linear = _finite_array(self.linear, "linear")
        quad = _finite_array(self.quad, "quad")
        if linear.ndim != 1:
            raise ValidationError("linear must be a one-dimensional vector")
        n = linear.shape[0]
        if quad.shape != (n, n):
            raise ValidationError(f"quad must be {n}x{n}, got shape {quad.shape}")
        if np.any(np.tril(quad) != 0.0):
            raise ValidationError("quad must be strictly upper-triangular")
        object.__setattr__(self, "linear", _freeze(linear))
        object.__setattr__(self, "quad", _freeze(quad.copy()))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.linear.shape[0]

    def energy(self, x) -> float:
        vec = np.asarray(x, dtype=np.float64)
        if vec.shape != (self.n,):
            raise ValidationError(f"configuration must have length {self.n}")
        return float(self.linear @ vec + vec @ self.quad @ vec + self.offset)


@dataclass(frozen=True)
class IsingForm:
    """Spin form: h . s + 2 * sum_{i<j} j[i,j] s_i s_j + offset.

    ``j`` stores the per-ordered-pair coupling, so each stored value is
    charged twice in the energy (once per ordered direction), matching
    the convention used by integer-coupling oscillator hardware.
    """

    h: np.ndarray
    j: np.ndarray
    offset: float = 0.0

    def __post_init__(self) -> None:
        h = _finite_array(self.h, "h")
        j = _finite_array(self.j, "j")
        if h.ndim != 1:
            raise ValidationError("h must be a one-dimensional vector")
        n = h.shape[0]
        if j.shape != (n, n):
            raise ValidationError(f"j must be {n}x{n}, got shape {j.shape}")
        if np.any(np.tril(j) != 0.0):
            raise ValidationError("j must be strictly upper-triangular")
        object.__setattr__(self, "h", _freeze(h))
        object.__setattr__(self, "j", _freeze(j.copy()))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n(self) -> int:
        return self.h.shape[0]

    def coupling_values(self) -> np.ndarray:
        """The n(n-1)/2 stored couplings as a flat vector (row-major upper triangle)."""
        iu = np.triu_indices(self.n, k=1)
        return self.j[iu]

    def stats(self) -> dict[str, float]:
        """Distribution diagnostics for the field/coupling imbalance."""
        couplings = self.coupling_values()
        return {
            "h_min": float(self.h.min()),
            "h_median": float(np.median(self.h)),
            "h_max": float(self.h.max()),
            "j_min": float(couplings.min()) if couplings.size else 0.0,
            "j_median": float(np.median(couplings)) if couplings.size else 0.0,
            "j_max": float(couplings.max()) if couplings.size else 0.0,
        }


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def fp_objective(instance: EsInstance, sel: Selection) -> float:
    """Full-precision selection objective; feasibility is NOT required.

    Returns sum_i mu_i x_i - lam * sum_{i != j} beta_ij x_i x_j (ordered
    pairs, so each unordered pair is counted twice).
    """
    if sel.n != instance.n:
        raise ValidationError(f"selection has length {sel.n}, instance has n={instance.n}")
    # Summed over the selected indices with the same reduction shape the
    # exhaustive oracle uses, so a selection equal to the oracle argmax
    # scores bitwise equal to the oracle bound (beta's zero diagonal makes
    # the submatrix sum exactly the ordered-pair sum).
    idx = np.flatnonzero(sel.chosen)
    mu_part = instance.mu[idx].sum()
    pair_part = instance.beta[np.ix_(idx, idx)].sum()
    return float(mu_part - instance.lam * pair_part)


def build_qubo(instance: EsInstance, gamma: float, bias: float = 0.0) -> QuboForm:
    """Compile the penalized selection problem into a minimization QUBO.

    ``gamma`` weights the squared cardinality violation; ``bias`` is the
    uniform relevance shift added to every mu (0 recovers the plain
    formulation).  The stored energy is the exact negation of the
    penalized maximization objective, constants included.
    """
    gamma = float(gamma)
    if not (np.isfinite(gamma) and gamma > 0.0):
        raise ValidationError(f"gamma must be a positive real, got {gamma!r}")
    bias = float(bias)
    if not np.isfinite(bias):
        raise ValidationError(f"bias must be finite, got {bias!r}")
    n, m, lam = instance.n, instance.summary_len, instance.lam
    linear = -instance.mu - bias - 2.0 * gamma * m + gamma
    quad = np.triu(2.0 * (lam * instance.beta + gamma), k=1)
    offset = gamma * float(m) * float(m)
    return QuboForm(linear=linear, quad=quad, offset=offset)


def default_gamma(instance: EsInstance) -> float:
    """Penalty weight making single-bit escapes from a feasible optimum unprofitable."""
    row_sums = np.abs(instance.beta).sum(axis=1)
    return float(instance.mu.max() + instance.lam * row_sums.max() + 1e-6)


def qubo_to_ising(q: QuboForm) -> IsingForm:
    """Exact change of variables x = (1 + s) / 2; energy preserved for every state.

    With folded pair coefficients F[i,j] = quad[i,j] the spin expansion gives
    h_i = linear[i]/2 + (1/4) sum_{k != i} F[i,k] and a per-unordered-pair
    spin coefficient F[i,j]/4; since the Ising energy charges each stored
    coupling twice, the stored value is j[i,j] = F[i,j]/8.
    """
    folded = q.quad + q.quad.T
    h = q.linear / 2.0 + folded.sum(axis=1) / 4.0
    j = q.quad / 8.0
    offset = q.offset + float(q.linear.sum()) / 2.0 + float(q.quad.sum()) / 4.0
    return IsingForm(h=h, j=j, offset=offset)


def default_bias(instance: EsInstance, gamma: float) -> float:
    """Relevance shift aligning the median local field with the median coupling.

    Computed on the bias-free spin form: 2 * (median(h) - median(j)), with
    the h-median over the n fields, the j-median over the n(n-1)/2 stored
    couplings, and even-count medians averaging the two middle values.
    """
    base = qubo_to_ising(build_qubo(instance, gamma, bias=0.0))
    return float(2.0 * (np.median(base.h) - np.median(base.coupling_values())))


def ising_energy(form, spins) -> float:
    """Energy of a spin configuration: h . s + 2 * sum_{i<j} j[i,j] s_i s_j + offset.

    Accepts any form exposing ``h``, ``j`` (strictly upper-triangular) and
    ``offset`` — both the real-valued and the integer-quantized kinds.
    """
    s = np.asarray(spins, dtype=np.float64)
    n = np.asarray(form.h).shape[0]
    if s.shape != (n,):
        raise ValidationError(f"spin vector must have length {n}, got shape {s.shape}")
    if not np.isin(s, (-1.0, 1.0)).all():
        raise ValidationError("spins must all be -1 or +1")
    h = np.asarray(form.h, dtype=np.float64)
    j = np.asarray(form.j, dtype=np.float64)
    return float(h @ s + 2.0 * (s @ j @ s) + float(form.offset))
