"""Command-line driver: validate -> generate -> simulate -> report.

Exit codes: 0 success, 1 invalid configuration (or config/cost file
problem), 2 I/O or template trouble, 3 simulation runtime errors.
Diagnostics, including timings, go to stderr; everything printed to
stdout is reproducible across identical runs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from mppsoc.config import ConfigError, MppSoCConfig, parse_config
from mppsoc.errors import MppSocError
from mppsoc.rewrite import (
    TEMPLATE_FILES,
    RewriteError,
    generate,
    generate_in_memory,
)
from mppsoc.rules import validate
from mppsoc.simulator import (
    CostModel,
    SimMachine,
    SimulationError,
    load_program,
    reduce_sum,
    run,
)

_GEN_REPORT_NAME = "generation-report.kv"
_SIM_REPORT_NAME = "simulation-report.kv"


def _load_config(path_text: str) -> MppSoCConfig:
    path = Path(path_text)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    try:
        return parse_config(text)
    except ConfigError as err:
        location = f"{path}:{err.line}" if err.line else str(path)
        raise ConfigError(f"{location}: {err}") from err


def _parse_values(spec: str, count: int) -> list[int]:
    if spec.startswith("@"):
        tokens = Path(spec[1:]).read_text(encoding="utf-8").split()
        values = [int(t, 0) for t in tokens if not t.startswith("#")]
    elif ".." in spec:
        lo, hi = spec.split("..", 1)
        values = list(range(int(lo), int(hi) + 1))
    else:
        values = [int(t, 0) for t in spec.split(",") if t.strip()]
    if len(values) != count:
        raise SimulationError(
            f"--values supplied {len(values)} values, the array has {count} PEs")
    return values


def _cost_model(args) -> CostModel:
    if getattr(args, "cost_model", None):
        return CostModel.from_file(args.cost_model)
    return CostModel()


def _emit(args, text_form: str, kv_form: str):
    print(kv_form if args.report == "kv" else text_form)


def _cmd_validate(args) -> int:
    config = _load_config(args.config)
    report = validate(config)
    print(report)
    return 0 if report.is_valid else 1


def _cmd_generate(args) -> int:
    config = _load_config(args.config)
    report = validate(config)
    if not report.is_valid:
        print(report, file=sys.stderr)
        if not args.force_report_only:
            return 1
    template_dir = Path(args.templates) if args.templates else None
    search_dir = Path(args.config).resolve().parent

    if args.force_report_only:
        outputs, rewritten = generate_in_memory(config, template_dir, search_dir)
        lines = sum(text.count("\n") for text in outputs.values())
        print(f"{len(outputs)} files planned, {lines} lines, "
              f"{rewritten} lines rewritten (report only, nothing written)")
        return 0

    out_dir = Path(args.out)
    gen_report = generate(config, out_dir, template_dir, search_dir)
    _emit(args, gen_report.to_text(), gen_report.to_kv().rstrip("\n"))
    print(f"generation took {gen_report.elapsed_seconds:.3f}s", file=sys.stderr)
    (out_dir / _GEN_REPORT_NAME).write_text(gen_report.to_kv(), encoding="utf-8")
    if args.manifest:
        manifest = "".join(f"{out_dir / name}\n" for name in TEMPLATE_FILES)
        Path(args.manifest).write_text(manifest, encoding="utf-8")
    return 0


def _cmd_simulate(args) -> int:
    config = _load_config(args.config)
    report = validate(config)
    if not report.is_valid:
        print(report, file=sys.stderr)
        return 1
    cost = _cost_model(args)

    if args.app == "reduce" or args.app is None:
        values = (_parse_values(args.values, config.n_pes) if args.values
                  else list(range(config.n_pes)))
        outcome = reduce_sum(config, values, cost)
        _emit(args, outcome.to_text(), outcome.to_kv().rstrip("\n"))
        kv = outcome.to_kv()
    elif args.app.startswith("asm:"):
        program = load_program(Path(args.app[4:]).read_text(encoding="utf-8"))
        machine = SimMachine(config, cost)
        if args.values:
            machine.set_values(_parse_values(args.values, config.n_pes))
        outcome = run(machine, program)
        _emit(args, outcome.to_text(), outcome.to_kv().rstrip("\n"))
        kv = outcome.to_kv()
    else:
        raise SimulationError(f"unknown app {args.app!r} (reduce or asm:FILE)")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / _SIM_REPORT_NAME).write_text(kv, encoding="utf-8")
    return 0


def _cmd_report(args) -> int:
    out_dir = Path(args.out)
    found = False
    for name in (_GEN_REPORT_NAME, _SIM_REPORT_NAME):
        path = out_dir / name
        if path.is_file():
            found = True
            print(path.read_text(encoding="utf-8").rstrip("\n"))
    if not found:
        print(f"no reports in {out_dir}", file=sys.stderr)
        return 2
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mppsoc",
        description="Validate, generate and simulate parametric SIMD SoC "
                    "configurations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a configuration file")
    p_validate.add_argument("config")
    p_validate.set_defaults(func=_cmd_validate)

    p_generate = sub.add_parser("generate", help="emit the VHDL file set")
    p_generate.add_argument("config")
    p_generate.add_argument("-o", "--out", default="./out")
    p_generate.add_argument("--templates", default=None,
                            help="template directory (default: bundled)")
    p_generate.add_argument("--manifest", default=None,
                            help="write the generated file list here")
    p_generate.add_argument("--force-report-only", action="store_true",
                            help="report what would be generated, write nothing")
    p_generate.add_argument("--report", choices=("text", "kv"), default="text")
    p_generate.set_defaults(func=_cmd_generate)

    p_simulate = sub.add_parser("simulate", help="run a program on the array")
    p_simulate.add_argument("config")
    p_simulate.add_argument("--app", default="reduce",
                            help="'reduce' (default) or 'asm:FILE'")
    p_simulate.add_argument("--values", default=None,
                            help="A..B range, comma list, or @FILE")
    p_simulate.add_argument("--cost-model", default=None,
                            help="cycle-cost override file (key = value lines)")
    p_simulate.add_argument("-o", "--out", default="./out")
    p_simulate.add_argument("--report", choices=("text", "kv"), default="text")
    p_simulate.set_defaults(func=_cmd_simulate)

    p_report = sub.add_parser("report", help="re-print reports from a run directory")
    p_report.add_argument("-o", "--out", default="./out")
    p_report.add_argument("--report", choices=("text", "kv"), default="kv")
    p_report.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (RewriteError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except SimulationError as err:
        location = f" (line {err.line})" if getattr(err, "line", None) else ""
        print(f"error: {err}{location}", file=sys.stderr)
        return 3
    except MppSocError as err:
        # Topology/router errors surface while building or driving the
        # machine (e.g. a 1x2 ring passes the rules but cannot be built).
        print(f"error: {err}", file=sys.stderr)
        return 3


def script():
    raise SystemExit(main())


if __name__ == "__main__":
    script()
