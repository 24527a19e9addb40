"""Deterministic sentence embeddings and relevance/redundancy scoring.

The embedding "models" here are feature-hashing encoders: every token
(and adjacent token pair) is hashed into a signed coordinate of a fixed-
width vector, and the result is unit-normalized.  They need no weights,
no downloads, and produce bit-identical output for identical input,
which is what the instance-file determinism contract requires.  Anything
that consumes the scores should treat them as directional semantic
signals, not calibrated similarities.
"""

import hashlib
import re
from dataclasses import dataclass

import numpy as np

from .segment import split_sentences

UNIT_TOL = 1e-6

# model id -> embedding width
MODELS: dict[str, int] = {
    "hash-256": 256,
    "hash-64": 64,
}

_TOKEN = re.compile(r"[a-z0-9']+")


class EmbedError(ValueError):
    """Raised for invalid documents, sentences, or model ids."""


def resolve_model(model_id: str) -> int:
    try:
        return MODELS[model_id]
    except KeyError:
        known = ", ".join(sorted(MODELS))
        raise EmbedError(f"unknown embedding model '{model_id}' (available: {known})") from None


def _hash_into(vec: np.ndarray, feature: str, weight: float) -> None:
    digest = hashlib.sha256(feature.encode("utf-8")).digest()
    index = int.from_bytes(digest[:8], "big") % vec.shape[0]
    sign = 1.0 if digest[8] & 1 else -1.0
    vec[index] += sign * weight


def embed_sentence(sentence: str, dim: int) -> np.ndarray:
    """Unit-norm hashed bag of tokens and adjacent token pairs."""
    tokens = _TOKEN.findall(sentence.lower())
    vec = np.zeros(dim, dtype=np.float64)
    for tok in tokens:
        _hash_into(vec, tok, 1.0)
    for left, right in zip(tokens, tokens[1:]):
        _hash_into(vec, f"{left} {right}", 0.5)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise EmbedError(f"zero-norm embedding for sentence {sentence!r}")
    return vec / norm


@dataclass(frozen=True)
class EmbeddedDocument:
    """Sentences with unit embeddings plus the renormalized mean vector."""

    sentences: tuple[str, ...]
    embeddings: np.ndarray
    doc_embedding: np.ndarray

    def __post_init__(self) -> None:
        sentences = tuple(str(s) for s in self.sentences)
        emb = np.asarray(self.embeddings, dtype=np.float64)
        doc = np.asarray(self.doc_embedding, dtype=np.float64)
        if len(sentences) < 2:
            raise EmbedError(f"a document needs at least 2 sentences, got {len(sentences)}")
        if emb.ndim != 2 or emb.shape[0] != len(sentences):
            raise EmbedError(
                f"embeddings must be one row per sentence, got shape {emb.shape} "
                f"for {len(sentences)} sentences"
            )
        if doc.shape != (emb.shape[1],):
            raise EmbedError(
                f"doc_embedding must have width {emb.shape[1]}, got shape {doc.shape}"
            )
        norms = np.linalg.norm(emb, axis=1)
        if not np.all(np.abs(norms - 1.0) <= UNIT_TOL):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise EmbedError(
                f"embedding {worst} is not unit-norm (|e|={norms[worst]!r})"
            )
        if abs(float(np.linalg.norm(doc)) - 1.0) > UNIT_TOL:
            raise EmbedError("doc_embedding is not unit-norm")
        emb = emb.copy()
        emb.setflags(write=False)
        doc = doc.copy()
        doc.setflags(write=False)
        object.__setattr__(self, "sentences", sentences)
        object.__setattr__(self, "embeddings", emb)
        object.__setattr__(self, "doc_embedding", doc)

    @property
    def n(self) -> int:
        return len(self.sentences)

    @classmethod
    def from_text(
        cls,
        text: str,
        model_id: str = "hash-256",
        max_sentences: int | None = None,
    ) -> "EmbeddedDocument":
        dim = resolve_model(model_id)
        sentences = split_sentences(text, max_sentences)
        if len(sentences) < 2:
            raise EmbedError(
                f"text segments into only {len(sentences)} sentence(s); need at least 2"
            )
        emb = np.stack([embed_sentence(s, dim) for s in sentences])
        mean = emb.mean(axis=0)
        norm = float(np.linalg.norm(mean))
        if norm == 0.0:
            raise EmbedError("zero-norm embedding for the document mean")
        return cls(tuple(sentences), emb, mean / norm)


def score(doc: EmbeddedDocument) -> tuple[np.ndarray, np.ndarray]:
    """Relevance = cosine to the document vector; redundancy = pairwise cosine.

    The redundancy matrix is mirrored from its upper triangle so it is
    symmetric to the last bit, with an exactly zero diagonal.
    """
    mu = np.clip(doc.embeddings @ doc.doc_embedding, -1.0, 1.0)
    raw = np.clip(doc.embeddings @ doc.embeddings.T, -1.0, 1.0)
    upper = np.triu(raw, k=1)
    beta = upper + upper.T
    return mu, beta
