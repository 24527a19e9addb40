"""Command line: text file in, instance file out.

Exit status is 0 exactly when the instance file was written; failures
print one ``error: <Type>: <message>`` line on stderr.
"""

import argparse
import sys
from pathlib import Path

from .build import build_instance
from .embed import MODELS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esembed",
        description="Embed a plain-text document into a sentence-selection instance file.",
    )
    parser.add_argument("input", help="plain-text file to embed")
    parser.add_argument(
        "--summary-len", type=int, required=True, metavar="M",
        help="number of sentences the summary must contain",
    )
    parser.add_argument(
        "--output", metavar="PATH",
        help="instance file to write (default: input name with .json)",
    )
    parser.add_argument(
        "--model", default="hash-256", choices=sorted(MODELS),
        help="embedding model id (default: %(default)s)",
    )
    parser.add_argument(
        "--max-sentences", type=int, default=None, metavar="K",
        help="only embed the first K sentences",
    )
    parser.add_argument(
        "--lambda", dest="lam", type=float, default=1.0, metavar="W",
        help="redundancy weight (default: %(default)s)",
    )
    parser.add_argument("--name", default=None, help="instance name (default: input stem)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    source = Path(args.input)
    output = Path(args.output) if args.output else source.with_suffix(".json")
    try:
        text = source.read_text(encoding="utf-8")
        payload = build_instance(
            text,
            summary_len=args.summary_len,
            output_path=output,
            lam=args.lam,
            model_id=args.model,
            max_sentences=args.max_sentences,
            name=args.name if args.name is not None else source.stem,
        )
    except (ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"sentences {len(payload['sentences'])}")
    print(f"model {payload['metadata']['model']}")
    print(f"wrote {output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
