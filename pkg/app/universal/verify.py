"""Run the universal system against the arithmetic oracle, boundary by boundary."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import structlog

from app.config import settings
from app.errors import EncodingError
from app.snp.engine import HaltReason, Policy, RuleSelector, Trace, run
from app.turing import (
    EncodedConfig,
    EncodingParams,
    TmConfig,
    TmSpec,
    decode_cells,
    encode_config,
    oracle_iterates,
    split_code,
    tm_run,
)
from app.universal.builder import UniversalSystem, build_pi_m

logger = structlog.get_logger()

LOAD_OFFSET = 5
# neurons read at every boundary, by id
TAPE_LEFT, TAPE_RIGHT, CODE_LEFT, CODE_RIGHT, TIMER = 1, 2, 4, 6, 10


def period(params: EncodingParams) -> int:
    return params.v + 9


def boundary(n: int, params: EncodingParams) -> int:
    """Time at which the n-th encoded configuration is held by the system."""
    return LOAD_OFFSET + n * period(params)


@dataclass(frozen=True)
class MacroSchedule:
    X: int
    Y: int
    code: int
    period: int

    @property
    def deliveries(self) -> dict[int, int]:
        return {1: self.X + 2, 2: self.Y, 4: self.code}

    def boundary(self, n: int) -> int:
        return LOAD_OFFSET + n * self.period


def build_schedule(enc: EncodedConfig, params: EncodingParams) -> MacroSchedule:
    return MacroSchedule(enc.X, enc.Y, enc.code, period(params))


def decode_output(emission: int, spec: TmSpec, params: EncodingParams) -> tuple[int, ...]:
    """Right-hand cells carried by a halting emission (outward from the head).

    Both Y and z*Y are accepted: low zero digits are stripped down to the first symbol code.
    """
    z = params.z
    if emission <= 0 or emission % z:
        raise EncodingError(f"emission {emission} is not a multiple of z={z}")
    while emission % (z * z) == 0:
        emission //= z
    return decode_cells(emission, spec, z)


@dataclass
class BoundaryCheck:
    n: int
    t: int
    expected: EncodedConfig
    observed: tuple[int, ...] | None
    ok: bool
    detail: str = ""


@dataclass
class VerifyReport:
    machine: str
    params: EncodingParams
    checks: list[BoundaryCheck] = field(default_factory=list)
    halted: bool = False
    output: tuple[int, ...] | None = None
    expected_output: tuple[int, ...] | None = None
    halt_reason: HaltReason | None = None
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems and all(check.ok for check in self.checks)

    @property
    def first_divergence(self) -> BoundaryCheck | None:
        return next((check for check in self.checks if not check.ok), None)


def _check(n: int, t: int, expected: EncodedConfig, contents: tuple[int, ...] | None) -> BoundaryCheck:
    if contents is None:
        return BoundaryCheck(n, t, expected, None, False, "run ended before this boundary")
    wanted = {
        TAPE_LEFT: expected.X,
        TAPE_RIGHT: expected.Y,
        CODE_LEFT: expected.code,
        CODE_RIGHT: expected.code,
        TIMER: 1,
    }
    wrong = [
        f"neuron {neuron} holds {contents[neuron - 1]}, expected {value}"
        for neuron, value in wanted.items()
        if contents[neuron - 1] != value
    ]
    return BoundaryCheck(n, t, expected, contents, not wrong, "; ".join(wrong))


def verify_against_oracle(
    spec: TmSpec,
    config: TmConfig,
    n_steps: int,
    universal: UniversalSystem | None = None,
) -> VerifyReport:
    """Load ``config``, run ``n_steps`` transitions under the strict policy and compare every boundary."""
    universal = universal or build_pi_m(spec)
    params = universal.params
    enc = encode_config(spec, config, params)
    expected = oracle_iterates(spec, enc, n_steps)
    halts = split_code(spec, expected[-1].code)[0] == spec.halt
    times = [boundary(n, params) for n in range(len(expected))]
    max_steps = min(times[-1] + 3, settings.verify_max_steps)

    trace = run(
        universal.system,
        schedule=build_schedule(enc, params).deliveries,
        selector=RuleSelector(Policy.STRICT),
        max_steps=max_steps,
        snapshots=set(times),
        stop_on_output=True,
    )
    report = VerifyReport(spec.name, params, halt_reason=trace.halt_reason)
    if trace.violation is not None:
        report.problems.append(str(trace.violation))

    for n, (t, target) in enumerate(zip(times, expected)):
        check = _check(n, t, target, trace.snapshot(t))
        report.checks.append(check)
        logger.debug("boundary_checked", machine=spec.name, n=n, t=t, ok=check.ok)

    _check_output(report, trace, spec, config, params, halts)
    if not report.ok:
        logger.warning("verify_failed", machine=spec.name, problems=report.problems)
    logger.info("verified", machine=spec.name, boundaries=len(report.checks), ok=report.ok)
    return report


def _check_output(
    report: VerifyReport, trace: Trace, spec: TmSpec, config: TmConfig, params: EncodingParams, halts: bool
) -> None:
    if not halts:
        if trace.output_events:
            report.problems.append(f"emission at t={trace.output_events[0][0]} before the machine halted")
        return
    report.halted = True
    report.expected_output = tm_run(spec, config)[0].right
    if not trace.output_events:
        report.problems.append("machine halts but the system never emitted")
        return
    try:
        report.output = decode_output(trace.output_events[0][1], spec, params)
    except EncodingError as e:
        report.problems.append(str(e))
        return
    if report.output != report.expected_output:
        report.problems.append(f"emitted tape {report.output}, expected {report.expected_output}")


def measure_space(spec: TmSpec, config: TmConfig, n_steps: int, universal: UniversalSystem | None = None) -> list[int]:
    """Largest spike total seen inside each macro step, for the space envelope."""
    universal = universal or build_pi_m(spec)
    params = universal.params
    enc = encode_config(spec, config, params)
    trace = run(
        universal.system,
        schedule=build_schedule(enc, params).deliveries,
        selector=RuleSelector(Policy.FIRST),
        max_steps=boundary(n_steps, params),
        stop_on_output=True,
    )
    peaks = [0] * (n_steps + 1)
    for record in trace.steps:
        n = max(0, (record.t - LOAD_OFFSET) // period(params))
        if n <= n_steps:
            peaks[n] = max(peaks[n], record.space)
    return peaks


@dataclass(frozen=True)
class VerifyJob:
    spec: TmSpec
    config: TmConfig
    n_steps: int


def run_suite(jobs: Iterable[VerifyJob]) -> list[VerifyReport]:
    """Verify several machines in parallel; reports come back in job order."""
    jobs = list(jobs)
    with ThreadPoolExecutor(max_workers=settings.verify_workers) as executor:
        futures = [executor.submit(verify_against_oracle, job.spec, job.config, job.n_steps) for job in jobs]
        return [future.result() for future in futures]
