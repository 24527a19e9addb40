"""Instance-file assembly: text in, schema-version-1 JSON out.

This is the only seam between the embedding front end and the solver
package: the file format.  Nothing here imports the solver; the payload
is written to match its documented schema, and the solver's own
validator is the authority on acceptance.
"""

import json
import os
import tempfile
from pathlib import Path

from .embed import EmbeddedDocument, EmbedError, score
from .segment import SEGMENTATION_RULE

SCHEMA_VERSION = 1


def build_payload(
    text: str,
    summary_len: int,
    lam: float = 1.0,
    model_id: str = "hash-256",
    max_sentences: int | None = None,
    name: str = "document",
) -> dict:
    """Score a text and assemble the instance payload (pure, no I/O)."""
    doc = EmbeddedDocument.from_text(text, model_id, max_sentences)
    if not isinstance(summary_len, int) or isinstance(summary_len, bool):
        raise EmbedError(f"summary_len must be an integer, got {summary_len!r}")
    if not 1 <= summary_len < doc.n:
        raise EmbedError(
            f"summary_len must satisfy 1 <= M < {doc.n} sentences, got {summary_len}"
        )
    lam = float(lam)
    if not lam >= 0.0:
        raise EmbedError(f"lambda must be nonnegative, got {lam!r}")
    mu, beta = score(doc)
    return {
        "schema_version": SCHEMA_VERSION,
        "name": str(name),
        "sentences": list(doc.sentences),
        "mu": [float(v) for v in mu],
        "beta": [[float(v) for v in row] for row in beta],
        "lambda": lam,
        "summary_length": summary_len,
        "metadata": {
            "model": model_id,
            "segmentation": SEGMENTATION_RULE,
        },
    }


def write_instance(payload: dict, path) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    target = Path(path)
    body = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    fd, tmp_name = tempfile.mkstemp(
        prefix=target.name + ".", suffix=".tmp", dir=target.parent or "."
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(body)
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def build_instance(
    text: str,
    summary_len: int,
    output_path,
    lam: float = 1.0,
    model_id: str = "hash-256",
    max_sentences: int | None = None,
    name: str = "document",
) -> dict:
    """Build and write an instance file; returns the payload written."""
    payload = build_payload(text, summary_len, lam, model_id, max_sentences, name)
    write_instance(payload, output_path)
    return payload
