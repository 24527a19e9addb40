"""Seeded synthetic instances with cosine-similarity structure.

Each instance draws one random unit vector per sentence: relevance is
the cosine of a sentence vector to the normalized document centroid, and
redundancy is the pairwise cosine between sentence vectors.  That mirrors
how embedding-based scores behave on real text (scores correlated through
shared geometry, relevance tied to redundancy mass) while staying fully
deterministic under a seed, which is what the directional benchmark
reproductions need.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .model import EsInstance

__all__ = ["make_instance", "default_suite"]


def make_instance(
    seed: int,
    n: int = 20,
    summary_len: int = 6,
    dim: int = 16,
    lam: float = 1.0,
    name: str | None = None,
) -> EsInstance:
    """One cosine-structured instance, fully determined by the seed."""
    if dim < 2:
        raise ValidationError(f"embedding dimension must be at least 2, got {dim}")
    rng = np.random.default_rng(seed)
    vecs = rng.normal(size=(n, dim))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    centroid = vecs.mean(axis=0)
    norm = np.linalg.norm(centroid)
    if norm < 1e-12:
        # essentially impossible under a continuous draw, but never divide by ~0
        centroid = vecs[0]
        norm = 1.0
    centroid = centroid / norm
    mu = np.clip(vecs @ centroid, -1.0, 1.0)
    sims = np.clip(vecs @ vecs.T, -1.0, 1.0)
    upper = np.triu(sims, k=1)
    beta = upper + upper.T  # exactly symmetric by construction
    return EsInstance(
        mu=mu,
        beta=beta,
        summary_len=summary_len,
        lam=lam,
        name=name or f"synth-{seed}",
    )


def default_suite(
    count: int = 20,
    base_seed: int = 1000,
    n: int = 20,
    summary_len: int = 6,
    dim: int = 16,
    lam: float = 1.0,
) -> list[EsInstance]:
    """The fixed benchmark collection: ``count`` instances at consecutive seeds."""
    if count < 1:
        raise ValidationError(f"count must be positive, got {count}")
    return [
        make_instance(base_seed + i, n=n, summary_len=summary_len, dim=dim, lam=lam)
        for i in range(count)
    ]
