"""Command-line front end.

Subcommands cover the whole workflow: ``formulate`` (inspect coefficient
distributions), ``quantize`` (emit an integer program file), ``oracle``
(exact bounds), ``solve`` (iterative quantize-and-solve), ``decompose``
(windowed condensation for long documents), ``bench`` (campaign runner
writing CSV tables and figures), and ``synth`` (generate the fixed
synthetic collection as instance files).

Output discipline: every report value is printed with round-trip-safe
17-significant-digit reals, identical invocations produce identical
bytes (measured wall-clock timings, which only appear in benchmark TTS
columns, are the one exception), and the exit status is 0 exactly when
the requested artifact was fully produced.  Failures are named
diagnostics on stderr with exit status 1.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import hardware_projection, software_report
from .errors import DegenerateBoundsError, OracleSizeError, SpinsumError
from .fileio import (
    default_campaign_path,
    fmt_real,
    load_campaign,
    load_instance,
    program_to_text,
    save_instance,
    save_program,
)
from .model import build_qubo, default_bias, default_gamma, qubo_to_ising
from .pipeline import (
    decompose_summarize,
    iterate_solve,
    normalized_objective,
)
from .quantize import quantize, range_for_bits
from .solvers import solve_exhaustive
from .synthetic import make_instance

__all__ = ["main", "build_parser"]


# ---------------------------------------------------------------------------
# shared option groups
# ---------------------------------------------------------------------------


def _add_formulation_options(parser: argparse.ArgumentParser, overrides: bool) -> None:
    parser.add_argument(
        "--improved",
        action="store_true",
        help="apply the default relevance shift that balances fields against couplings",
    )
    if overrides:
        parser.add_argument(
            "--gamma",
            type=float,
            default=None,
            help="constraint penalty weight (default: instance-derived safe value)",
        )
        parser.add_argument(
            "--mu-b",
            dest="mu_b",
            type=float,
            default=None,
            help="explicit relevance shift (overrides --improved)",
        )


def _add_window_options(parser: argparse.ArgumentParser, full_precision: bool) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--range",
        dest="range_w",
        type=int,
        default=14,
        help="integer coefficient window [-W, W] (default 14)",
    )
    group.add_argument(
        "--bits",
        type=int,
        default=None,
        help="signed bit width; sets the window to 2**(b-1) - 1",
    )
    if full_precision:
        group.add_argument(
            "--full-precision",
            action="store_true",
            help="skip quantization and solve the real-valued program",
        )


def _resolve_form(instance, args):
    gamma = args.gamma if getattr(args, "gamma", None) is not None else default_gamma(instance)
    mu_b = getattr(args, "mu_b", None)
    if mu_b is not None:
        bias = float(mu_b)
    elif args.improved:
        bias = default_bias(instance, gamma)
    else:
        bias = 0.0
    qubo = build_qubo(instance, gamma, bias)
    return gamma, bias, qubo, qubo_to_ising(qubo)


def _resolve_range(args) -> int | None:
    if getattr(args, "full_precision", False):
        return None
    if args.bits is not None:
        return range_for_bits(args.bits)
    return int(args.range_w)


def _print_selection_report(instance, selection, lines) -> None:
    for line in lines:
        print(line)
    if instance.sentences is not None:
        for i in selection.indices:
            print(f"text {i} {instance.sentences[i]}")


def _normalized_or_dash(instance, objective: float) -> str:
    try:
        bounds = solve_exhaustive(instance)
        return fmt_real(normalized_objective(objective, bounds))
    except (OracleSizeError, DegenerateBoundsError):
        return "-"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_formulate(args) -> int:
    instance = load_instance(args.instance)
    gamma, bias, qubo, ising = _resolve_form(instance, args)
    stats = ising.stats()
    print(f"instance {instance.name}")
    print(f"n {instance.n}")
    print(f"summary_length {instance.summary_len}")
    print(f"lambda {fmt_real(instance.lam)}")
    print(f"formulation {'improved' if bias != 0.0 else 'original'}")
    print(f"gamma {fmt_real(gamma)}")
    print(f"bias {fmt_real(bias)}")
    print(f"offset {fmt_real(ising.offset)}")
    for key in ("h_min", "h_median", "h_max", "j_min", "j_median", "j_max"):
        print(f"{key} {fmt_real(stats[key])}")
    if args.output:
        payload = {
            "schema_version": 1,
            "name": instance.name,
            "gamma": gamma,
            "bias": bias,
            "qubo": {
                "linear": [float(v) for v in qubo.linear],
                "couplings": [
                    float(v)
                    for v in qubo.quad[np.triu_indices(instance.n, k=1)]
                ],
                "offset": float(qubo.offset),
            },
            "ising": {
                "h": [float(v) for v in ising.h],
                "couplings": [float(v) for v in ising.coupling_values()],
                "offset": float(ising.offset),
            },
        }
        import json

        Path(args.output).write_text(
            json.dumps(payload, indent=2) + "\n", encoding="utf-8"
        )
        print(f"wrote {args.output}")
    return 0


def cmd_oracle(args) -> int:
    instance = load_instance(args.instance)
    bounds = solve_exhaustive(instance)
    print(f"instance {instance.name}")
    print(f"objective_max {fmt_real(bounds.obj_max)}")
    print(f"objective_min {fmt_real(bounds.obj_min)}")
    print("argmax " + " ".join(str(i) for i in bounds.argmax.indices))
    return 0


def cmd_quantize(args) -> int:
    instance = load_instance(args.instance)
    _, _, _, ising = _resolve_form(instance, args)
    prog = quantize(ising, _resolve_range(args), args.scheme, seed=args.seed)
    if args.output:
        save_program(prog, args.output)
        print(f"wrote {args.output}")
        print(f"digest {prog.digest()}")
    else:
        sys.stdout.write(program_to_text(prog))
    return 0


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    formulation = "improved" if args.improved else "original"
    range_w = _resolve_range(args)
    best, _records = iterate_solve(
        instance,
        formulation,
        args.scheme,
        range_w,
        args.iters,
        args.backend,
        args.seed,
    )
    lines = [
        f"instance {instance.name}",
        f"backend {args.backend}",
        f"formulation {formulation}",
        f"scheme {args.scheme}",
        f"range {'full' if range_w is None else range_w}",
        f"iterations {args.iters}",
        f"seed {args.seed}",
        "selection " + " ".join(str(i) for i in best.selection.indices),
        f"objective {fmt_real(best.fp_objective)}",
        f"normalized {_normalized_or_dash(instance, best.fp_objective)}",
        f"energy {fmt_real(best.raw_energy)}",
        f"feasible_before_repair {'true' if best.feasible_before_repair else 'false'}",
        f"repaired {'true' if best.repaired else 'false'}",
        f"solver {best.solver_id}",
    ]
    _print_selection_report(instance, best.selection, lines)
    return 0


def cmd_decompose(args) -> int:
    instance = load_instance(args.instance)
    range_w = _resolve_range(args)
    selection, plan = decompose_summarize(
        instance,
        args.p,
        args.q,
        args.backend,
        args.scheme,
        args.iters_per_stage,
        args.seed,
        range_w=range_w,
    )
    from .model import fp_objective

    objective = fp_objective(instance, selection)
    lines = [
        f"instance {instance.name}",
        f"backend {args.backend}",
        f"scheme {args.scheme}",
        f"range {'full' if range_w is None else range_w}",
        f"window {plan.window_len}",
        f"keep {plan.keep_per_window}",
        f"iters_per_stage {args.iters_per_stage}",
        f"seed {args.seed}",
        f"stages {plan.stages}",
        "selection " + " ".join(str(i) for i in selection.indices),
        f"objective {fmt_real(objective)}",
        f"normalized {_normalized_or_dash(instance, objective)}",
    ]
    for k, stage in enumerate(plan.trace, start=1):
        lines.append(
            f"stage {k} start {stage.start} members {len(stage.members)}"
            f" kept {len(stage.selected)}"
        )
    _print_selection_report(instance, selection, lines)
    return 0


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_bench(args) -> int:
    from .pipeline import run_variant_suite
    from .plots import save_convergence_figure, save_quality_figure

    config_path = args.config or default_campaign_path()
    if not config_path:
        from .errors import ConfigError

        raise ConfigError(
            "no campaign config given and SPINSUM_CONFIG is unset"
        )
    instances, suite_cfg, bench_cfg, threads = load_campaign(config_path)
    if args.threads is not None:
        threads = args.threads
    suite = run_variant_suite(instances, suite_cfg, threads=threads)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    used = len(suite.results[0].instance_names) if suite.results else 0
    print(f"instances {used} skipped {len(suite.skipped)}")

    summary_rows = []
    for row in suite.summary_rows():
        decompose = row["decompose"]
        summary_rows.append(
            [
                row["variant"],
                row["backend"],
                row["formulation"],
                row["scheme"],
                row["iterations"],
                "full" if row["range_w"] is None else row["range_w"],
                "-" if decompose is None else f"{decompose[0]}x{decompose[1]}",
                fmt_real(row["mean"]),
                fmt_real(row["median"]),
                fmt_real(row["min"]),
                fmt_real(row["max"]),
            ]
        )
        print(
            f"variant {row['variant']} mean {fmt_real(row['mean'])}"
            f" median {fmt_real(row['median'])}"
            f" min {fmt_real(row['min'])} max {fmt_real(row['max'])}"
        )
    summary_path = out_dir / "summary.csv"
    _write_csv(
        summary_path,
        [
            "variant",
            "backend",
            "formulation",
            "scheme",
            "iterations",
            "range_w",
            "decompose",
            "mean",
            "median",
            "min",
            "max",
        ],
        summary_rows,
    )
    written.append(summary_path)

    tts_rows = []
    for res in suite.results:
        if res.curves is None:
            continue
        flat = res.curves.reshape(-1, res.curves.shape[-1])
        name = res.spec.name
        try:
            if res.spec.backend == "oscillator":
                kind = "projected-hw"
                report = hardware_projection(flat, bench_cfg, solver=f"{name}-hw")
            else:
                kind = "measured-cpu"
                report = software_report(
                    flat, res.iter_seconds, bench_cfg, solver=f"{name}-cpu"
                )
        except SpinsumError as exc:
            print(f"tts {name} unavailable ({exc})")
            continue
        tts_rows.append(
            [
                name,
                kind,
                fmt_real(report.k_hat),
                fmt_real(report.p_success),
                len(report.k_list),
                len(report.excluded),
                fmt_real(report.tts),
                fmt_real(report.ets),
            ]
        )
        print(
            f"tts {name} kind {kind} k_hat {fmt_real(report.k_hat)}"
            f" p_success {fmt_real(report.p_success)}"
            f" tts_seconds {fmt_real(report.tts)} ets_joules {fmt_real(report.ets)}"
        )
    if tts_rows:
        tts_path = out_dir / "tts.csv"
        _write_csv(
            tts_path,
            [
                "variant",
                "kind",
                "k_hat",
                "p_success",
                "n_success",
                "n_excluded",
                "tts_seconds",
                "ets_joules",
            ],
            tts_rows,
        )
        written.append(tts_path)

    if suite.skipped:
        skipped_path = out_dir / "skipped.csv"
        _write_csv(skipped_path, ["instance", "reason"], list(suite.skipped))
        written.append(skipped_path)

    if args.emit_curves:
        curve_rows = []
        for res in suite.results:
            if res.curves is None:
                continue
            mean_curves = res.mean_curves()
            for b, inst_name in enumerate(res.instance_names):
                for t in range(mean_curves.shape[1]):
                    curve_rows.append(
                        [res.spec.name, inst_name, t + 1, fmt_real(mean_curves[b, t])]
                    )
        curves_path = out_dir / "curves.csv"
        _write_csv(
            curves_path, ["variant", "instance", "iteration", "mean_best"], curve_rows
        )
        written.append(curves_path)

    convergence_path = out_dir / "convergence.png"
    if save_convergence_figure(suite, convergence_path):
        written.append(convergence_path)
    quality_path = out_dir / "quality.png"
    if save_quality_figure(suite, quality_path):
        written.append(quality_path)

    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_synth(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for k in range(args.count):
        seed = args.base_seed + k
        instance = make_instance(
            seed, n=args.n, summary_len=args.summary_len, dim=args.dim, lam=args.lam
        )
        path = out_dir / f"{instance.name}.json"
        save_instance(instance, path)
        print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsum",
        description="Extractive summarization compiled to integer spin programs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("formulate", help="build a program and report coefficient stats")
    p.add_argument("instance", help="instance JSON file")
    _add_formulation_options(p, overrides=True)
    p.add_argument("--output", default=None, help="also dump the full forms as JSON")
    p.set_defaults(func=cmd_formulate)

    p = sub.add_parser("oracle", help="exact feasible bounds by enumeration")
    p.add_argument("instance", help="instance JSON file")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("quantize", help="emit an integer program file")
    p.add_argument("instance", help="instance JSON file")
    _add_formulation_options(p, overrides=True)
    _add_window_options(p, full_precision=False)
    p.add_argument("--scheme", default="deterministic", help="rounding scheme")
    p.add_argument("--seed", type=int, default=None, help="rounding seed (randomized schemes)")
    p.add_argument("--output", default=None, help="program file path (default: stdout)")
    p.set_defaults(func=cmd_quantize)

    p = sub.add_parser("solve", help="iterative quantize-and-solve")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument(
        "--backend",
        required=True,
        choices=("exhaustive", "tabu", "oscillator", "random"),
        help="solver backend",
    )
    _add_formulation_options(p, overrides=False)
    _add_window_options(p, full_precision=True)
    p.add_argument("--scheme", default="deterministic", help="rounding scheme")
    p.add_argument("--iters", type=int, default=1, help="re-quantization iterations")
    p.add_argument("--seed", type=int, default=0, help="root seed")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decompose", help="windowed condensation for long documents")
    p.add_argument("instance", help="instance JSON file")
    p.add_argument("--p", type=int, required=True, help="window length")
    p.add_argument("--q", type=int, required=True, help="sentences kept per window")
    p.add_argument("--iters-per-stage", type=int, default=1, help="iterations per stage")
    p.add_argument(
        "--backend",
        default="tabu",
        choices=("exhaustive", "tabu", "oscillator", "random"),
        help="solver backend (default tabu)",
    )
    _add_window_options(p, full_precision=True)
    p.add_argument("--scheme", default="deterministic", help="rounding scheme")
    p.add_argument("--seed", type=int, default=0, help="root seed")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("bench", help="run a campaign; write CSV tables and figures")
    p.add_argument(
        "config",
        nargs="?",
        default=None,
        help="campaign JSON (default: $SPINSUM_CONFIG)",
    )
    p.add_argument("--out-dir", default="bench-out", help="artifact directory")
    p.add_argument("--threads", type=int, default=None, help="worker threads")
    p.add_argument(
        "--emit-curves",
        action="store_true",
        help="also write per-iteration mean curves as CSV",
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="write the fixed synthetic instance collection")
    p.add_argument("--out-dir", default="instances", help="output directory")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--summary-len", type=int, default=6)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--base-seed", type=int, default=1000)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SpinsumError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
