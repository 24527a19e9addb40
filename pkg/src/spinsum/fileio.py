"""File formats: instance JSON, integer-program text, campaign configs.

Instance files are JSON with a full symmetric redundancy matrix (easier
to eyeball and diff than a packed triangle); loading runs the same
validation as constructing the in-memory instance, so a file parses iff
the model invariants hold.  Quantized programs use a terse line format
(header, fields, coupling triangle) that round-trips byte-identically —
the stand-in for a hardware programming file.  All writers emit
canonical bytes: fixed key order, round-trip-safe reals, no timestamps.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .bench import BenchConfig
from .errors import ConfigError, ValidationError
from .model import EsInstance
from .pipeline import SuiteConfig, VariantSpec
from .quantize import QuantizedIsing
from .solvers import OscillatorParams, TabuParams
from .synthetic import default_suite

__all__ = [
    "SCHEMA_VERSION",
    "fmt_real",
    "save_instance",
    "load_instance",
    "save_program",
    "load_program",
    "load_campaign",
]

SCHEMA_VERSION = 1

_INSTANCE_KEYS = {
    "schema_version",
    "name",
    "sentences",
    "mu",
    "beta",
    "lambda",
    "summary_length",
    "metadata",
}


def fmt_real(x: float) -> str:
    """Round-trip-safe decimal used in reports and delimited output."""
    return "%.17g" % float(x)


# ---------------------------------------------------------------------------
# instance files
# ---------------------------------------------------------------------------


def instance_to_payload(instance: EsInstance) -> dict:
    payload: dict = {
        "schema_version": SCHEMA_VERSION,
        "name": instance.name,
    }
    if instance.sentences is not None:
        payload["sentences"] = list(instance.sentences)
    payload["mu"] = [float(v) for v in instance.mu]
    payload["beta"] = [[float(v) for v in row] for row in instance.beta]
    payload["lambda"] = float(instance.lam)
    payload["summary_length"] = int(instance.summary_len)
    return payload


def save_instance(instance: EsInstance, path) -> None:
    text = json.dumps(instance_to_payload(instance), indent=2, ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def instance_from_payload(payload: dict, origin: str = "instance file") -> EsInstance:
    if not isinstance(payload, dict):
        raise ValidationError(f"{origin}: top level must be a JSON object")
    unknown = set(payload) - _INSTANCE_KEYS
    if unknown:
        raise ValidationError(f"{origin}: unknown keys {sorted(unknown)}")
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValidationError(
            f"{origin}: schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    for key in ("mu", "beta", "summary_length"):
        if key not in payload:
            raise ValidationError(f"{origin}: missing required key {key!r}")
    sentences = payload.get("sentences")
    return EsInstance(
        mu=np.asarray(payload["mu"], dtype=np.float64),
        beta=np.asarray(payload["beta"], dtype=np.float64),
        summary_len=payload["summary_length"],
        lam=float(payload.get("lambda", 1.0)),
        name=str(payload.get("name", "instance")),
        sentences=tuple(sentences) if sentences is not None else None,
    )


def load_instance(path) -> EsInstance:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
    return instance_from_payload(payload, origin=str(path))


# ---------------------------------------------------------------------------
# quantized program files
# ---------------------------------------------------------------------------


def program_to_text(prog: QuantizedIsing) -> str:
    """Header 'N RANGE_W SCALE SCHEME SEED', h line, then triangle rows.

    The offset is intentionally absent — it cannot change which states are
    optimal, and device programming files carry none; loading therefore
    reconstructs a program with source_offset 0.
    """
    seed = "-" if prog.seed is None else str(prog.seed)
    lines = [f"{prog.n} {prog.range_w} {float(prog.scale)!r} {prog.scheme} {seed}"]
    lines.append(" ".join(str(int(v)) for v in prog.h))
    for i in range(prog.n - 1):
        row = prog.j[i, i + 1 :]
        lines.append(" ".join(str(int(v)) for v in row))
    return "\n".join(lines) + "\n"


def save_program(prog: QuantizedIsing, path) -> None:
    Path(path).write_text(program_to_text(prog), encoding="utf-8")


def program_from_text(text: str, origin: str = "program file") -> QuantizedIsing:
    lines = [line for line in text.splitlines()]
    if not lines:
        raise ValidationError(f"{origin}: empty file")
    head = lines[0].split()
    if len(head) != 5:
        raise ValidationError(
            f"{origin}: header must be 'N RANGE_W SCALE SCHEME SEED', got {lines[0]!r}"
        )
    try:
        n = int(head[0])
        range_w = int(head[1])
        scale = float(head[2])
    except ValueError as exc:
        raise ValidationError(f"{origin}: bad header numbers: {exc}") from exc
    scheme = head[3]
    seed = None if head[4] == "-" else int(head[4])
    expected_lines = 1 + 1 + max(0, n - 1)
    if len(lines) < expected_lines:
        raise ValidationError(
            f"{origin}: expected {expected_lines} lines for N={n}, got {len(lines)}"
        )
    try:
        h = np.array([int(tok) for tok in lines[1].split()], dtype=np.int64)
    except ValueError as exc:
        raise ValidationError(f"{origin}: h line must be integers: {exc}") from exc
    if h.shape != (n,):
        raise ValidationError(f"{origin}: expected {n} fields, got {h.shape[0]}")
    j = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        try:
            row = [int(tok) for tok in lines[2 + i].split()]
        except ValueError as exc:
            raise ValidationError(f"{origin}: coupling row {i} must be integers: {exc}") from exc
        if len(row) != n - 1 - i:
            raise ValidationError(
                f"{origin}: coupling row {i} needs {n - 1 - i} entries, got {len(row)}"
            )
        j[i, i + 1 :] = row
    return QuantizedIsing(
        h=h, j=j, range_w=range_w, scale=scale, scheme=scheme, seed=seed,
        source_offset=0.0,
    )


def load_program(path) -> QuantizedIsing:
    path = Path(path)
    return program_from_text(path.read_text(encoding="utf-8"), origin=str(path))


# ---------------------------------------------------------------------------
# campaign configuration
# ---------------------------------------------------------------------------


def _build_params(cls, payload: dict | None, origin: str, section: str):
    if payload is None:
        return None
    if not isinstance(payload, dict):
        raise ConfigError(f"{origin}: {section!r} must be an object")
    try:
        return cls(**payload)
    except TypeError as exc:
        raise ConfigError(f"{origin}: bad {section!r} section: {exc}") from exc


def load_campaign(path) -> tuple[list[EsInstance], SuiteConfig, BenchConfig, int]:
    """Parse a campaign file → (instances, suite config, bench config, threads).

    The file is JSON: a ``variants`` list (VariantSpec fields), ``repeats``
    and ``seed``, an ``instances`` section that either lists ``paths``
    (relative to the config file) or describes a ``synthetic`` collection,
    plus optional ``bench``/``tabu``/``oscillator`` parameter overrides
    and a default ``threads`` count.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"campaign config not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")

    known = {"instances", "variants", "repeats", "seed", "threads", "bench", "tabu", "oscillator"}
    unknown = set(payload) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")

    source = payload.get("instances")
    if not isinstance(source, dict) or not ({"paths", "synthetic"} & set(source)):
        raise ConfigError(f"{path}: 'instances' must contain 'paths' or 'synthetic'")
    if "paths" in source:
        instances = [load_instance(path.parent / p) for p in source["paths"]]
    else:
        spec = dict(source["synthetic"])
        try:
            instances = default_suite(**spec)
        except TypeError as exc:
            raise ConfigError(f"{path}: bad 'synthetic' section: {exc}") from exc

    raw_variants = payload.get("variants")
    if not isinstance(raw_variants, list) or not raw_variants:
        raise ConfigError(f"{path}: 'variants' must be a nonempty list")
    variants = []
    for entry in raw_variants:
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: each variant must be an object")
        if "decompose" in entry and entry["decompose"] is not None:
            entry = dict(entry)
            entry["decompose"] = tuple(entry["decompose"])
        try:
            variants.append(VariantSpec(**entry))
        except TypeError as exc:
            raise ConfigError(f"{path}: bad variant entry: {exc}") from exc

    suite = SuiteConfig(
        variants=tuple(variants),
        repeats=int(payload.get("repeats", 1)),
        seed=int(payload.get("seed", 0)),
        tabu=_build_params(TabuParams, payload.get("tabu"), str(path), "tabu"),
        oscillator=_build_params(
            OscillatorParams, payload.get("oscillator"), str(path), "oscillator"
        ),
    )
    bench = _build_params(BenchConfig, payload.get("bench"), str(path), "bench") or BenchConfig()
    threads = int(payload.get("threads", 1))
    if threads < 1:
        raise ConfigError(f"{path}: threads must be positive, got {threads}")
    return instances, suite, bench, threads


def default_campaign_path() -> str | None:
    """Campaign path from the environment, if configured."""
    value = os.environ.get("SPINSUM_CONFIG", "").strip()
    return value or None
