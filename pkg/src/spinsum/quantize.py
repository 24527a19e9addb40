"""Integer quantization of spin programs for range-limited hardware.

Real-valued fields and couplings are brought into a signed integer window
``[-range_w, +range_w]`` in two steps: a single joint scale factor applied
to every coefficient (fields and couplings together, so the argmin is
untouched), then one of three rounding rules:

* ``deterministic`` — nearest integer, exact halves away from zero;
* ``half`` — every non-integer goes up or down with probability 1/2;
* ``stochastic`` — up with probability equal to the fractional part, so
  the rounded value is unbiased in expectation.

The constant offset is carried through untouched: it shifts every state's
energy equally and therefore never affects which states are optimal.
Bit-width presets map ``b`` bits to ``range_w = 2**(b-1) - 1``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import IsingForm

__all__ = [
    "SCHEMES",
    "QuantizedIsing",
    "scale_to_range",
    "round_nearest",
    "round_half_split",
    "round_by_fraction",
    "quantize",
    "quantize_bits",
    "range_for_bits",
]

SCHEMES = ("deterministic", "half", "stochastic")


@dataclass(frozen=True)
class QuantizedIsing:
    """An integer-coupling spin program plus the provenance of its rounding."""

    h: np.ndarray
    j: np.ndarray
    range_w: int
    scale: float
    scheme: str
    seed: int | None
    source_offset: float = 0.0

    def __post_init__(self) -> None:
        h = np.asarray(self.h)
        j = np.asarray(self.j)
        if h.ndim != 1:
            raise ValidationError("h must be a one-dimensional vector")
        n = h.shape[0]
        if j.shape != (n, n):
            raise ValidationError(f"j must be {n}x{n}, got shape {j.shape}")
        if not (np.issubdtype(h.dtype, np.integer) or np.all(h == np.round(h))):
            raise ValidationError("quantized h must be integer-valued")
        if not (np.issubdtype(j.dtype, np.integer) or np.all(j == np.round(j))):
            raise ValidationError("quantized j must be integer-valued")
        h = h.astype(np.int64)
        j = j.astype(np.int64)
        if np.any(np.tril(j) != 0):
            raise ValidationError("quantized j must be strictly upper-triangular")
        if not isinstance(self.range_w, (int, np.integer)) or int(self.range_w) < 1:
            raise ValidationError(f"range_w must be a positive integer, got {self.range_w!r}")
        range_w = int(self.range_w)
        if np.abs(h).max(initial=0) > range_w or np.abs(j).max(initial=0) > range_w:
            raise ValidationError(f"quantized coefficients must lie within ±{range_w}")
        scale = float(self.scale)
        if not (np.isfinite(scale) and scale > 0.0):
            raise ValidationError(f"scale must be a positive real, got {self.scale!r}")
        if self.scheme not in SCHEMES:
            raise ValidationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        seed = self.seed
        if self.scheme == "deterministic":
            if seed is not None:
                raise ValidationError("deterministic rounding takes no seed")
        else:
            if not isinstance(seed, (int, np.integer)):
                raise ValidationError(f"scheme {self.scheme!r} requires an integer seed")
            seed = int(seed)
        if not np.isfinite(self.source_offset):
            raise ValidationError("source_offset must be finite")
        h.flags.writeable = False
        j.flags.writeable = False
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "range_w", range_w)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "seed", seed)
        object.__setattr__(self, "source_offset", float(self.source_offset))

    @property
    def n(self) -> int:
        return self.h.shape[0]

    @property
    def offset(self) -> float:
        """Alias so energy helpers accept quantized and real forms alike."""
        return self.source_offset

    def coupling_values(self) -> np.ndarray:
        iu = np.triu_indices(self.n, k=1)
        return self.j[iu]

    def digest(self) -> str:
        """Content hash of the integer program (seed-independent)."""
        head = f"{self.n} {self.range_w} {self.scale!r} {self.scheme}".encode()
        blob = head + self.h.tobytes() + self.coupling_values().tobytes()
        return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


def scale_to_range(form: IsingForm, range_w: int) -> tuple[IsingForm, float]:
    """Multiply every field and coupling by range_w / max|coefficient|.

    One joint factor for h and j: relative structure — and hence the
    argmin set — is preserved exactly.  An all-zero form gets scale 1.
    The offset is not scaled.
    """
    if not isinstance(range_w, (int, np.integer)) or int(range_w) < 1:
        raise ValidationError(f"range_w must be a positive integer, got {range_w!r}")
    magnitudes = np.abs(form.h).max(initial=0.0)
    couplings = form.coupling_values()
    if couplings.size:
        magnitudes = max(magnitudes, np.abs(couplings).max())
    scale = 1.0 if magnitudes == 0.0 else float(range_w) / float(magnitudes)
    scaled = IsingForm(h=form.h * scale, j=form.j * scale, offset=form.offset)
    return scaled, scale


# ---------------------------------------------------------------------------
# rounding rules (vector level)
# ---------------------------------------------------------------------------


def round_nearest(values: np.ndarray) -> np.ndarray:
    """Nearest integer, exact halves away from zero."""
    arr = np.asarray(values, dtype=np.float64)
    return np.copysign(np.floor(np.abs(arr) + 0.5), arr).astype(np.int64)


def round_half_split(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Non-integers go to floor or ceil with probability 1/2 each."""
    arr = np.asarray(values, dtype=np.float64)
    low = np.floor(arr)
    frac = arr - low
    up = rng.random(arr.shape) < 0.5
    out = np.where(frac == 0.0, arr, low + up)
    return out.astype(np.int64)


def round_by_fraction(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Round up with probability equal to the fractional part (unbiased)."""
    arr = np.asarray(values, dtype=np.float64)
    low = np.floor(arr)
    frac = arr - low
    up = rng.random(arr.shape) < frac
    return (low + up).astype(np.int64)


_ROUNDERS = {
    "half": round_half_split,
    "stochastic": round_by_fraction,
}


# ---------------------------------------------------------------------------
# quantization entry points
# ---------------------------------------------------------------------------


def quantize(
    form: IsingForm, range_w: int, scheme: str = "deterministic", seed: int | None = None
) -> QuantizedIsing:
    """Scale a real-valued form into ±range_w and round with the chosen rule.

    Random schemes consume one uniform draw per coefficient from a fresh
    generator seeded with ``seed`` (fields first, then couplings in
    row-major upper-triangular order), so identical seeds reproduce
    identical programs.
    """
    if scheme not in SCHEMES:
        raise ValidationError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    scaled, scale = scale_to_range(form, range_w)
    n = scaled.n
    flat = np.concatenate([scaled.h, scaled.coupling_values()])
    if scheme == "deterministic":
        if seed is not None:
            raise ValidationError("deterministic rounding takes no seed")
        rounded = round_nearest(flat)
    else:
        if seed is None:
            raise ValidationError(f"scheme {scheme!r} requires a seed")
        rounded = _ROUNDERS[scheme](flat, np.random.default_rng(int(seed)))
    rounded = np.clip(rounded, -int(range_w), int(range_w))
    h = rounded[:n]
    j = np.zeros((n, n), dtype=np.int64)
    j[np.triu_indices(n, k=1)] = rounded[n:]
    return QuantizedIsing(
        h=h,
        j=j,
        range_w=int(range_w),
        scale=scale,
        scheme=scheme,
        seed=None if scheme == "deterministic" else int(seed),
        source_offset=form.offset,
    )


def range_for_bits(bits: int) -> int:
    """Signed b-bit window: 2**(b-1) - 1 (6 bits → 31, 4 bits → 7)."""
    if not isinstance(bits, (int, np.integer)) or not 3 <= int(bits) <= 16:
        raise ValidationError(f"bits must be an integer in [3, 16], got {bits!r}")
    return 2 ** (int(bits) - 1) - 1


def quantize_bits(
    form: IsingForm, bits: int, scheme: str = "deterministic", seed: int | None = None
) -> QuantizedIsing:
    """Quantize to a signed b-bit coefficient window."""
    return quantize(form, range_for_bits(bits), scheme=scheme, seed=seed)
