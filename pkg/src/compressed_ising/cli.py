"""Command-line front end: sweep, compile, validate and tomo subcommands.

Data goes to CSV (RFC 4180, CRLF line ends) or the textual circuit format.
Outputs depend only on flags and seeds; run provenance, including an
optional timestamp, is written to a ``<out>.meta.json`` sidecar.

Exit codes: 0 success, 1 usage error, 2 computation failure, 3 constraint
violation (a compiled circuit over the depth limit).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, circuit_io, compressed, oracle
from .compiler import DEFAULT_BUDGET, SynthesisBudget, Topology, compile_full
from .config import DEPTH_LIMIT, MAX_SHOTS
from .noise import (
    NOISE_ENV_VAR,
    GATE_TABLE,
    NoiseModel,
    calibrate_eta,
    fidelity,
    gate_experiment,
    load_noise,
    overlap,
    sample_expectation,
    tomograph_qubit,
)
from .targets import (
    BUILTIN_NAMES,
    ISING_BUDGET,
    ISING_READOUT_QUBIT,
    builtin_target,
    circuit_magnetization,
    compile_ising,
    ising_coupling,
)
from .validate import (
    ValidatingSpec,
    ising_validating_set,
    evaluate_validating_set,
    generate_validating_set,
)

EXIT_OK, EXIT_USAGE, EXIT_FAILURE, EXIT_CONSTRAINT = 0, 1, 2, 3
SWEEP_MODES = ("exact-matrix", "compiled-circuit", "noisy-shots")


class UsageError(Exception):
    """Invalid flag combination, reported with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# output helpers


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(text.encode())


def _write_meta(args: argparse.Namespace, out: str | None, extra: dict | None = None) -> None:
    if out in (None, "-"):
        return
    meta = {
        "command": args.command,
        "arguments": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")},
        "version": __version__,
    }
    if extra:
        meta.update(extra)
    if not args.no_timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    Path(f"{out}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")


def _resolve_noise(spec: str | None, required: bool) -> NoiseModel | None:
    spec = spec or os.environ.get(NOISE_ENV_VAR)
    if spec is None:
        if required:
            raise UsageError(f"a noise model is required (--noise or ${NOISE_ENV_VAR})")
        return None
    try:
        return load_noise(spec)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot load noise config {spec!r}: {exc}") from None


def _check_shots(shots: int | None) -> None:
    if shots is not None and not 1 <= shots <= MAX_SHOTS:
        raise UsageError(f"--shots must be in 1..{MAX_SHOTS}")


# --------------------------------------------------------------------------
# sweep


def _sweep_point(task: tuple) -> list:
    J, n, schedule, modes, noise, shots, stream = task
    spec = compressed.CompressedSpec(n, schedule)
    row = [J, oracle.exact_ground_magnetization(oracle.IsingChainSpec(n, J))]
    row.append(compressed.magnetization(spec, J).M)
    compiled = None
    if "compiled-circuit" in modes or "noisy-shots" in modes:
        compiled = compile_ising(J, schedule)
    if "compiled-circuit" in modes:
        row += [circuit_magnetization(compiled.circuit), 2 * compiled.synthesis_error]
    if "noisy-shots" in modes:
        rng = np.random.default_rng(stream)
        res = sample_expectation(compiled.circuit, {ISING_READOUT_QUBIT: "Y"}, shots, noise, rng)
        row += [-res.estimate, res.stderr]
    return row


def cmd_sweep(args: argparse.Namespace) -> int:
    modes = tuple(dict.fromkeys(args.mode or ["exact-matrix"]))
    if args.n not in (4, 8):
        raise UsageError("--n must be 4 or 8")
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        schedule = compressed.Schedule(args.jmax, args.L, args.dt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.n != 4 and set(modes) & {"compiled-circuit", "noisy-shots"}:
        raise UsageError("compiled and noisy modes need a two-qubit W, i.e. --n 4")
    noise = None
    if "noisy-shots" in modes:
        noise = _resolve_noise(args.noise, required=True)
        _check_shots(args.shots)
    seed = args.seed if args.seed is not None else (noise.seed if noise else 0)

    header = ["J", "M_exact_oracle", "M_compressed"]
    if "compiled-circuit" in modes:
        header += ["M_compiled", "M_compiled_bound"]
    if "noisy-shots" in modes:
        header += ["M_noisy_mean", "M_noisy_stderr"]

    grid = compressed.default_grid(args.points, args.jmax)
    streams = np.random.SeedSequence(seed).spawn(len(grid))
    tasks = [(J, args.n, schedule, modes, noise, args.shots, s) for J, s in zip(grid, streams)]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    _emit(csv_text(header, rows), args.out)
    _write_meta(args, args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# compile


def _budget(args: argparse.Namespace, default: SynthesisBudget) -> SynthesisBudget:
    try:
        return SynthesisBudget(
            default.max_t_count if args.t_count is None else args.t_count,
            default.target_epsilon if args.epsilon is None else args.epsilon,
            default.max_total_length if args.length is None else args.length,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_compile(args: argparse.Namespace) -> int:
    if (args.builtin is None) == (args.input is None):
        raise UsageError("give exactly one of --builtin or --input")
    if args.builtin is not None:
        try:
            spec = builtin_target(args.builtin)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        target, topo, limit = spec.target, spec.topology, spec.max_depth
        default_budget = ISING_BUDGET if args.builtin.startswith("ising-j") else DEFAULT_BUDGET
        name = args.builtin
    else:
        try:
            target = circuit_io.read(args.input)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read {args.input}: {exc}") from None
        topo, limit, default_budget, name = Topology(target.num_qubits, 0), DEPTH_LIMIT, DEFAULT_BUDGET, args.input
    if args.cnot_target is not None:
        try:
            topo = Topology(topo.num_qubits, args.cnot_target)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.max_depth is not None:
        limit = None if args.max_depth <= 0 else args.max_depth
    result = compile_full(target, topo, _budget(args, default_budget), limit)
    meta = {
        "target": name,
        "num_qubits": result.circuit.num_qubits,
        "cnot_target": topo.cnot_target,
        "depth": result.depth,
        "max_depth": result.max_depth,
        "over_budget": result.over_budget,
        "t_count": result.t_count,
        "cnot_count": result.cnot_count,
        "routing_cnots": result.routing_cnots,
        "synthesis_error": result.synthesis_error,
        "gate_errors": result.gate_errors,
        "length_cap": result.length_cap,
    }
    _emit(circuit_io.dumps(result.circuit), args.out)
    if args.out not in (None, "-"):
        Path(f"{args.out}.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    else:
        sys.stderr.write(json.dumps(meta, sort_keys=True) + "\n")
    _write_meta(args, args.out)
    if result.over_budget:
        sys.stderr.write(
            f"warning: compiled depth {result.depth} exceeds the limit of {result.max_depth}\n"
        )
        return EXIT_CONSTRAINT
    return EXIT_OK


# --------------------------------------------------------------------------
# validate


def cmd_validate(args: argparse.Namespace) -> int:
    if args.shots is not None and args.analytic:
        raise UsageError("--analytic and --shots are exclusive")
    shots = None if args.analytic else (args.shots or MAX_SHOTS)
    _check_shots(shots)
    noise = _resolve_noise(args.noise, required=False)
    seed = args.seed if args.seed is not None else (noise.seed if noise else 0)
    if args.builtin == "ising-set":
        circuits, qubit = ising_validating_set(seed), ISING_READOUT_QUBIT
    else:
        if args.input is not None:
            try:
                base = circuit_io.read(args.input)
            except (OSError, ValueError) as exc:
                raise UsageError(f"cannot read {args.input}: {exc}") from None
            qubit = args.measured_qubit if args.measured_qubit is not None else 0
        elif args.builtin and args.builtin.startswith("ising-j") and args.builtin in BUILTIN_NAMES:
            k = int(args.builtin.removeprefix("ising-j"))
            base = compile_ising(ising_coupling(k)).circuit
            qubit = ISING_READOUT_QUBIT if args.measured_qubit is None else args.measured_qubit
        else:
            raise UsageError("give --input FILE or --builtin {ising-j1..ising-j12, ising-set}")
        try:
            spec = ValidatingSpec(base, args.count, qubit, seed)
            circuits = generate_validating_set(spec)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    report = evaluate_validating_set(circuits, noise, shots, qubit, seed)
    _emit(report.to_csv(), args.out)
    _write_meta(args, args.out, {"mean_error": report.mean_error, "max_error": report.max_error})
    if args.out not in (None, "-"):
        print(f"mean e = {report.mean_error:.4f}  max e = {report.max_error:.4f}  ({len(circuits)} circuits)")
    return EXIT_OK


# --------------------------------------------------------------------------
# tomo


def cmd_tomo(args: argparse.Namespace) -> int:
    if args.all == (args.gate is not None):
        raise UsageError("give exactly one of --gate or --all")
    gates = GATE_TABLE if args.all else (args.gate.upper(),)
    for g in gates:
        if g not in GATE_TABLE and g not in ("I", "Y", "Z", "TDG"):
            raise UsageError(f"unknown gate {g!r}")
    shots = None if args.analytic else args.shots
    _check_shots(shots)
    noise = _resolve_noise(args.noise, required=False)
    seed = args.seed if args.seed is not None else (noise.seed if noise else 0)
    streams = np.random.SeedSequence(seed).spawn(len(gates) + 1)
    eta = None
    if args.rescale:
        eta = calibrate_eta(noise, shots, np.random.default_rng(streams[-1]))
    rows = []
    for label, stream in zip(gates, streams):
        prep, qubit = gate_experiment(label)
        est = tomograph_qubit(prep, qubit, shots, noise, np.random.default_rng(stream))
        if eta is not None:
            est = est.rescale(eta)
        with warnings.catch_warnings():
            # clipping is visible in the overlap column
            warnings.simplefilter("ignore", UserWarning)
            f = fidelity(prep, est, qubit)
        rows.append([label, est.x, est.y, est.z, f, overlap(prep, est, qubit)])
    header = ["gate", "x", "y", "z", "F", "overlap"]
    _emit(csv_text(header, rows), args.out)
    _write_meta(args, args.out, {"eta": eta})
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="compressed-ising", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, help="root seed (default: the noise config's seed)")
        sp.add_argument("--no-timestamp", action="store_true", help="omit the timestamp from <out>.meta.json")

    s = sub.add_parser("sweep", help="magnetization versus J")
    s.add_argument("--n", type=int, default=4, help="chain length (4 or 8)")
    s.add_argument("--L", type=int, default=2400, help="adiabatic steps to reach j_max")
    s.add_argument("--dt", type=float, default=0.1, help="Trotter step")
    s.add_argument("--jmax", type=float, default=2.0, help="final coupling")
    s.add_argument("--points", type=int, default=12, help="grid J = jmax k / points, k = 1..points")
    s.add_argument("--mode", action="append", choices=SWEEP_MODES, help="repeatable; default exact-matrix")
    s.add_argument("--noise", help="noise config path, 'default', 'calibration' or 'off'")
    s.add_argument("--shots", type=int, default=MAX_SHOTS)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    common(s)
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("compile", help="compile a builtin target or a circuit file")
    c.add_argument("--builtin", help=f"one of: {', '.join(BUILTIN_NAMES)}")
    c.add_argument("--input", help="circuit file in the textual format")
    c.add_argument("--t-count", type=int, help="max T gates per synthesized gate")
    c.add_argument("--length", type=int, help="max sequence length per synthesized gate")
    c.add_argument("--epsilon", type=float, help="target synthesis error per gate")
    c.add_argument("--max-depth", type=int, help="depth limit (0 disables)")
    c.add_argument("--cnot-target", type=int, help="the only qubit allowed as CNOT target")
    common(c)
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("validate", help="evaluate a validating circuit set")
    v.add_argument("--builtin", help="ising-j1..ising-j12, or 'ising-set' for ten twins each of ising-j2 and ising-j3")
    v.add_argument("--input", help="base circuit file")
    v.add_argument("--count", type=int, default=10)
    v.add_argument("--measured-qubit", type=int)
    v.add_argument("--noise")
    v.add_argument("--shots", type=int)
    v.add_argument("--analytic", action="store_true", help="infinite-shot expectations")
    common(v)
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("tomo", help="single-gate tomography and fidelity")
    t.add_argument("--gate", help="gate applied to |0> (1, H, T, S, SDG, X, CNOT, ...)")
    t.add_argument("--all", action="store_true", help="every row of the gate table")
    t.add_argument("--noise")
    t.add_argument("--shots", type=int, default=MAX_SHOTS)
    t.add_argument("--analytic", action="store_true", help="infinite-shot expectations")
    t.add_argument("--rescale", action="store_true", help="divide Bloch vectors by eta")
    common(t)
    t.set_defaults(func=cmd_tomo)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - any computation failure maps to exit 2
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILURE


if __name__ == "__main__":
    raise SystemExit(main())
