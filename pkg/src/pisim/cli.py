"""Command-line front end: scenario files in, CSV tables out.

Scenario documents are flat ``key = value`` text with dotted keys; ``#``
starts a comment.  The four commands write deterministic CSV (12 significant
digits, newline-terminated), so identical scenario + seed reproduce output
byte for byte.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import (
    EntanglementReport,
    concurrence,
    fidelity,
    pure_state_from_density,
    sweep_pattern,
    three_tangle,
    visibility,
)
from .closed_form import (
    EntangledClass,
    EntangledClassId,
    bell_phi_minus,
    bell_psi_plus,
    entangled_class_state,
    ghz_class_three,
    predicted_output_state,
)
from .errors import ConfigError, PathIdentityError, ScenarioParseError
from .interferometer import (
    MAX_PARTICLES,
    DetectionOutcome,
    SchemeConfig,
    conditional_detected_state,
    detection_table,
    run_scheme,
)
from .states import PureState, aligned_beam, partial_trace, pure_state_from_terms, state_fidelity

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

COMMANDS = ("run", "sweep", "entangle", "oracle-check")
TARGET_NAMES = ("Psi+", "Phi-", "GHZ3", "F1", "F2", "F3", "F4")
DEFAULT_SEED = 42
ROW_SUM_TOLERANCE = 1e-9
ORACLE_TOLERANCE = 1e-9
_VISIBILITY_STEPS = 64


@dataclass(frozen=True)
class SweepSpec:
    """Phase sweep request: half-open grid [start, stop) with ``steps`` points."""

    variable: str
    start: float = 0.0
    stop: float = math.tau
    steps: int = 64


@dataclass(frozen=True)
class OracleSpec:
    """Ranges exercised by the oracle-check command."""

    cases: int = 100
    max_detected: int = 5
    max_aligned: int = 3


@dataclass(frozen=True)
class Scenario:
    """Validated scenario document."""

    command: str
    scheme: SchemeConfig | None
    sweep: SweepSpec | None = None
    target: str | None = None
    entangle_grid: tuple[float, ...] | None = None
    oracle: OracleSpec | None = None
    output_path: str | None = None


def _fmt(value: float) -> str:
    value = float(value)
    if value == 0.0:
        value = 0.0  # normalize -0.0
    return format(value, ".12g")


# ---------------------------------------------------------------------------
# scenario parsing


class _Entries:
    """Key/value pairs with line numbers and consumption tracking."""

    def __init__(self, text: str):
        self.pairs: dict[str, tuple[str, int]] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ScenarioParseError("expected 'key = value'", line=lineno)
            key, value = key.strip(), value.split("#", 1)[0].strip()
            if not key or not value:
                raise ScenarioParseError("missing key or value", key=key or None, line=lineno)
            if key in self.pairs:
                raise ScenarioParseError("duplicate key", key=key, line=lineno)
            self.pairs[key] = (value, lineno)
        self.consumed: set[str] = set()

    def take(self, key: str) -> tuple[str, int] | None:
        if key in self.pairs:
            self.consumed.add(key)
            return self.pairs[key]
        return None

    def take_str(self, key: str, default: str | None = None) -> str | None:
        found = self.take(key)
        return found[0] if found else default

    def take_int(self, key: str, default: int | None = None) -> int | None:
        found = self.take(key)
        if found is None:
            return default
        value, line = found
        try:
            return int(value)
        except ValueError:
            raise ScenarioParseError(f"expected an integer, got {value!r}", key=key, line=line)

    def take_float(self, key: str, default: float | None = None) -> float | None:
        found = self.take(key)
        if found is None:
            return default
        value, line = found
        try:
            return float(value)
        except ValueError:
            raise ScenarioParseError(f"expected a number, got {value!r}", key=key, line=line)

    def line_of(self, key: str) -> int | None:
        return self.pairs[key][1] if key in self.pairs else None

    def matching(self, prefix: str) -> list[str]:
        return [k for k in self.pairs if k.startswith(prefix)]

    def unconsumed(self) -> list[str]:
        return [k for k in self.pairs if k not in self.consumed]


def _parse_scheme(entries: _Entries, required: bool) -> SchemeConfig | None:
    has_any = bool(entries.matching("scheme."))
    if not has_any and not required:
        return None
    n = entries.take_int("scheme.n")
    m = entries.take_int("scheme.m")
    for key, value in (("scheme.n", n), ("scheme.m", m)):
        if value is None:
            raise ScenarioParseError("missing key", key=key)
    if not 1 <= n <= MAX_PARTICLES:
        raise ScenarioParseError(
            f"scheme.n must lie in [1, {MAX_PARTICLES}]", key="scheme.n", line=entries.line_of("scheme.n")
        )
    if not 0 <= m <= n:
        raise ScenarioParseError(
            f"scheme.m must lie in [0, {n}]", key="scheme.m", line=entries.line_of("scheme.m")
        )
    phi0 = entries.take_float("scheme.phi0", 0.0)
    phi = tuple(entries.take_float(f"scheme.phi.{j}", 0.0) for j in range(1, n - m + 1))
    theta = tuple(entries.take_float(f"scheme.theta.{l}", 0.0) for l in range(n - m + 1, n + 1))
    trans = []
    for l in range(n - m + 1, n + 1):
        key = f"scheme.transmission.{l}"
        value = entries.take_float(key, 1.0)
        if not 0.0 <= value <= 1.0:
            raise ScenarioParseError(
                f"transmission must lie in [0, 1], got {value}", key=key, line=entries.line_of(key)
            )
        trans.append(value)
    leftovers = [k for k in entries.matching("scheme.") if k not in entries.consumed]
    if leftovers:
        key = leftovers[0]
        raise ScenarioParseError("key does not fit this scheme", key=key, line=entries.line_of(key))
    try:
        return SchemeConfig(n, m, phi0=phi0, phi=phi, theta=theta, transmission=tuple(trans))
    except ConfigError as exc:
        raise ScenarioParseError(str(exc), key="scheme.n", line=entries.line_of("scheme.n"))


def _parse_sweep(entries: _Entries, scheme: SchemeConfig) -> SweepSpec:
    variable = entries.take_str("sweep.variable")
    if variable is None:
        raise ScenarioParseError("missing key", key="sweep.variable")
    try:
        scheme.replace_phase(variable, 0.0)
    except ValueError as exc:
        raise ScenarioParseError(
            str(exc), key="sweep.variable", line=entries.line_of("sweep.variable")
        )
    steps = entries.take_int("sweep.steps", 64)
    if steps < 8:
        raise ScenarioParseError(
            "sweep.steps must be >= 8", key="sweep.steps", line=entries.line_of("sweep.steps")
        )
    start = entries.take_float("sweep.start", 0.0)
    stop = entries.take_float("sweep.stop", math.tau)
    if not stop > start:
        raise ScenarioParseError(
            "sweep.stop must exceed sweep.start", key="sweep.stop", line=entries.line_of("sweep.stop")
        )
    return SweepSpec(variable, start, stop, steps)


def _parse_entangle_grid(entries: _Entries) -> tuple[float, ...] | None:
    found = entries.take("entangle.grid")
    if found is None:
        return None
    value, line = found
    try:
        grid = tuple(float(part) for part in value.split(","))
    except ValueError:
        raise ScenarioParseError(
            "expected comma-separated numbers", key="entangle.grid", line=line
        )
    if any(not 0.0 <= t <= 1.0 for t in grid):
        raise ScenarioParseError(
            "grid transmissions must lie in [0, 1]", key="entangle.grid", line=line
        )
    return grid


def _parse_oracle(entries: _Entries) -> OracleSpec:
    spec = OracleSpec(
        cases=entries.take_int("oracle.cases", 100),
        max_detected=entries.take_int("oracle.max_detected", 5),
        max_aligned=entries.take_int("oracle.max_aligned", 3),
    )
    checks = (
        ("oracle.cases", spec.cases, 1, 100000),
        ("oracle.max_detected", spec.max_detected, 1, 8),
        ("oracle.max_aligned", spec.max_aligned, 0, 8),
    )
    for key, value, low, high in checks:
        if not low <= value <= high:
            raise ScenarioParseError(
                f"value must lie in [{low}, {high}]", key=key, line=entries.line_of(key)
            )
    return spec


def _validate_target(name: str, scheme: SchemeConfig | None, entries: _Entries) -> None:
    line = entries.line_of("target")
    if name not in TARGET_NAMES:
        raise ScenarioParseError(
            f"unknown target {name!r} (expected one of {', '.join(TARGET_NAMES)})",
            key="target",
            line=line,
        )
    if scheme is None:
        return
    n = scheme.n_detected
    needs = {"Psi+": n == 2, "Phi-": n == 2, "GHZ3": n == 3}
    if name in needs and not needs[name]:
        raise ScenarioParseError(
            f"target {name} needs {'two' if name != 'GHZ3' else 'three'} detected particles, "
            f"scheme has {n}",
            key="target",
            line=line,
        )
    if name.startswith("F"):
        try:
            EntangledClass(EntangledClassId(name), n)
        except ValueError as exc:
            raise ScenarioParseError(str(exc), key="target", line=line)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises :class:`ScenarioParseError` naming the offending key and line for
    missing keys, type mismatches, and invariant violations.
    """
    entries = _Entries(text)
    command = entries.take_str("command")
    if command is None:
        raise ScenarioParseError("missing key", key="command")
    if command not in COMMANDS:
        raise ScenarioParseError(
            f"unknown command {command!r} (expected one of {', '.join(COMMANDS)})",
            key="command",
            line=entries.line_of("command"),
        )

    scheme = _parse_scheme(entries, required=command != "oracle-check")
    if command != "oracle-check" and scheme.n_detected == 0:
        raise ScenarioParseError(
            "the scheme must leave at least one detected particle (m < n)",
            key="scheme.m",
            line=entries.line_of("scheme.m"),
        )

    sweep = _parse_sweep(entries, scheme) if command == "sweep" else None
    for key in entries.matching("sweep."):
        if command != "sweep":
            raise ScenarioParseError(
                "sweep settings are only valid with 'command = sweep'",
                key=key,
                line=entries.line_of(key),
            )

    entangle_grid = _parse_entangle_grid(entries) if command == "entangle" else None
    oracle = _parse_oracle(entries) if command == "oracle-check" else None

    target = entries.take_str("target")
    if target is not None:
        _validate_target(target, scheme, entries)

    output_path = entries.take_str("output")

    for key in entries.unconsumed():
        raise ScenarioParseError("unknown key", key=key, line=entries.line_of(key))

    if command == "entangle":
        if scheme.n_aligned < 1:
            raise ScenarioParseError(
                "entangle needs at least one aligned particle",
                key="scheme.m",
                line=entries.line_of("scheme.m"),
            )
        if scheme.n_detected not in (2, 3):
            raise ScenarioParseError(
                "entangle supports two or three detected particles",
                key="scheme.n",
                line=entries.line_of("scheme.n"),
            )

    return Scenario(
        command=command,
        scheme=scheme,
        sweep=sweep,
        target=target,
        entangle_grid=entangle_grid,
        oracle=oracle,
        output_path=output_path,
    )


# ---------------------------------------------------------------------------
# command execution


def _target_state(name: str, n_detected: int) -> PureState:
    if name == "Psi+":
        return bell_psi_plus()
    if name == "Phi-":
        return bell_phi_minus()
    if name == "GHZ3":
        return ghz_class_three()
    return entangled_class_state(EntangledClass(EntangledClassId(name), n_detected))


def _write_lines(path: str, lines: list[str]) -> None:
    Path(path).write_text("\n".join(lines) + "\n")


def _row_sum_ok(probabilities: Sequence[float], lost: float) -> bool:
    return abs(sum(probabilities) + lost - 1.0) <= ROW_SUM_TOLERANCE


def _cmd_run(scenario: Scenario, path: str) -> int:
    state = run_scheme(scenario.scheme)
    table, lost = detection_table(state)
    if not _row_sum_ok(list(table.values()), lost):
        print("pisim: outcome probabilities do not sum to 1", file=sys.stderr)
        return EXIT_NUMERIC
    lines = ["outcome,probability"]
    lines += [f"{o.bitstring()},{_fmt(p)}" for o, p in table.items()]
    lines.append(f"loss,{_fmt(lost)}")
    _write_lines(path, lines)
    return EXIT_OK


def _sweep_grid(spec: SweepSpec) -> list[float]:
    width = (spec.stop - spec.start) / spec.steps
    return [spec.start + k * width for k in range(spec.steps)]


def _cmd_sweep(scenario: Scenario, path: str) -> int:
    scheme, spec = scenario.scheme, scenario.sweep
    outcomes = DetectionOutcome.all_outcomes(scheme.n_detected)
    lines = ["phase," + ",".join(f"P_{o.bitstring()}" for o in outcomes) + ",P_loss"]
    for phase in _sweep_grid(spec):
        state = run_scheme(scheme.replace_phase(spec.variable, phase))
        table, lost = detection_table(state)
        row = [table[o] for o in outcomes]
        if not _row_sum_ok(row, lost):
            print(f"pisim: probabilities at phase {phase} do not sum to 1", file=sys.stderr)
            return EXIT_NUMERIC
        lines.append(",".join([_fmt(phase)] + [_fmt(p) for p in row] + [_fmt(lost)]))
    _write_lines(path, lines)
    return EXIT_OK


def _entangle_report(cfg: SchemeConfig, target: PureState | None) -> EntanglementReport:
    sweep_variable = f"theta.{cfg.n_detected + 1}"
    grid = [k * math.tau / _VISIBILITY_STEPS for k in range(_VISIBILITY_STEPS)]
    curve = sweep_pattern(cfg, sweep_variable, grid)
    pattern_visibility = visibility(curve, DetectionOutcome((0,) * cfg.n_detected))

    rho = conditional_detected_state(run_scheme(cfg))
    if cfg.n_detected == 2:
        pair = concurrence(rho)
    else:
        pair = concurrence(partial_trace(rho, (1, 2)))

    tangle = None
    if cfg.n_detected == 3:
        try:
            tangle = three_tangle(pure_state_from_density(rho))
        except ValueError:
            tangle = None  # mixed state: pure-state tangle undefined

    overlap = fidelity(rho, target) if target is not None else None
    return EntanglementReport(
        concurrence=pair,
        three_tangle=tangle,
        fidelity_vs_target=overlap,
        visibility=pattern_visibility,
    )


def _cmd_entangle(scenario: Scenario) -> list[str]:
    scheme = scenario.scheme
    grid = scenario.entangle_grid or tuple(k / 10 for k in range(11))
    target = _target_state(scenario.target, scheme.n_detected) if scenario.target else None
    lines = ["transmission,visibility,concurrence,fidelity,three_tangle"]
    for t in grid:
        cfg = replace(scheme, transmission=(t,) * scheme.n_aligned)
        report = _entangle_report(cfg, target)
        cells = [
            _fmt(t),
            _fmt(report.visibility),
            _fmt(report.concurrence),
            "" if report.fidelity_vs_target is None else _fmt(report.fidelity_vs_target),
            "" if report.three_tangle is None else _fmt(report.three_tangle),
        ]
        lines.append(",".join(cells))
    return lines


def _oracle_fidelity(cfg: SchemeConfig) -> float:
    state = run_scheme(cfg)
    predicted = predicted_output_state(cfg.n_detected, cfg.xi)
    tail = tuple(aligned_beam(l) for l in cfg.aligned_range)
    full_prediction = pure_state_from_terms(
        [(outcome + tail, amp) for outcome, amp in predicted.terms()]
    )
    return state_fidelity(full_prediction, state)


def _cmd_oracle(scenario: Scenario, path: str, seed: int) -> int:
    spec = scenario.oracle or OracleSpec()
    lines = [f"# seed = {seed}", "n_detected,n_aligned,cases,max_infidelity,status"]
    all_pass = True
    for n in range(1, spec.max_detected + 1):
        for m in range(0, spec.max_aligned + 1):
            rng = np.random.default_rng([seed, n, m])
            worst = 0.0
            for _ in range(spec.cases):
                phases = rng.uniform(0.0, math.tau, size=1 + n + m)
                cfg = SchemeConfig(
                    n + m,
                    m,
                    phi0=phases[0],
                    phi=tuple(phases[1 : 1 + n]),
                    theta=tuple(phases[1 + n :]),
                )
                worst = max(worst, 1.0 - _oracle_fidelity(cfg))
            status = "pass" if worst <= ORACLE_TOLERANCE else "fail"
            all_pass = all_pass and status == "pass"
            lines.append(f"{n},{m},{spec.cases},{_fmt(worst)},{status}")
    _write_lines(path, lines)
    if not all_pass:
        print(f"pisim: oracle deviation above {ORACLE_TOLERANCE}; see {path}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def execute(scenario: Scenario, out_path: str | None = None, seed: int = DEFAULT_SEED) -> int:
    """Run a validated scenario and write its output file.

    Returns the process exit status: 0 success, 1 validation failure,
    2 numerical check failure, 3 I/O failure.
    """
    path = out_path or scenario.output_path
    if path is None:
        print("pisim: no output path (set 'output' in the scenario or pass --out)", file=sys.stderr)
        return EXIT_INVALID
    try:
        if scenario.command == "run":
            return _cmd_run(scenario, path)
        if scenario.command == "sweep":
            return _cmd_sweep(scenario, path)
        if scenario.command == "entangle":
            _write_lines(path, _cmd_entangle(scenario))
            return EXIT_OK
        return _cmd_oracle(scenario, path, seed)
    except OSError as exc:
        print(f"pisim: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except PathIdentityError as exc:
        print(f"pisim: {exc}", file=sys.stderr)
        return EXIT_INVALID


def _parse_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="pisim",
        description="Simulate two-source path-identity interferometers from scenario files.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--scenario", required=True, help="path to the scenario document")
        sub.add_argument("--out", default=None, help="output file (overrides the scenario)")
        sub.add_argument("--seed", type=_parse_seed, default=DEFAULT_SEED, help="64-bit seed")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID

    try:
        text = Path(args.scenario).read_text()
    except OSError as exc:
        print(f"pisim: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        scenario = parse_scenario(text)
    except ScenarioParseError as exc:
        print(f"pisim: scenario error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if scenario.command != args.command:
        print(
            f"pisim: scenario declares 'command = {scenario.command}' "
            f"but '{args.command}' was requested",
            file=sys.stderr,
        )
        return EXIT_INVALID
    return execute(scenario, out_path=args.out, seed=args.seed)


if __name__ == "__main__":
    raise SystemExit(main())
