"""Text-to-instance front end for the sentence-selection solver.

Turns plain text into schema-version-1 instance files through a
deterministic pipeline: rule-based segmentation, feature-hashing
sentence embeddings, cosine relevance/redundancy scoring.
"""

from .build import SCHEMA_VERSION, build_instance, build_payload, write_instance
from .embed import (
    MODELS,
    EmbeddedDocument,
    EmbedError,
    embed_sentence,
    resolve_model,
    score,
)
from .segment import SEGMENTATION_RULE, split_sentences

__version__ = "0.1.0"

__all__ = [
    "EmbedError",
    "EmbeddedDocument",
    "MODELS",
    "SCHEMA_VERSION",
    "SEGMENTATION_RULE",
    "__version__",
    "build_instance",
    "build_payload",
    "embed_sentence",
    "resolve_model",
    "score",
    "split_sentences",
    "write_instance",
]
