"""Rule-based sentence segmentation.

The rule is deliberately simple and is recorded verbatim in every
instance file this package produces, so downstream consumers can tell
exactly how a text was cut.
"""

import re

# Split after terminal punctuation (optionally followed by one closing
# quote/bracket, which stays with its sentence) plus whitespace, or at
# blank lines.  Two fixed-width lookbehinds because re has no variable-
# width ones.
SEGMENTATION_RULE = "terminal-punctuation-v1"

_BOUNDARY = re.compile(r"(?<=[.!?])\s+|(?<=[.!?][\"'”\)\]])\s+|\n{2,}")


def split_sentences(text: str, max_sentences: int | None = None) -> list[str]:
    """Cut ``text`` into sentences; optionally keep only the first few.

    Whitespace-only pieces are dropped; a trailing fragment without
    terminal punctuation still counts as a sentence.
    """
    if max_sentences is not None and max_sentences < 1:
        raise ValueError(f"max_sentences must be positive, got {max_sentences}")
    pieces = [" ".join(p.split()) for p in _BOUNDARY.split(text)]
    sentences = [p for p in pieces if p]
    if max_sentences is not None:
        sentences = sentences[:max_sentences]
    return sentences
