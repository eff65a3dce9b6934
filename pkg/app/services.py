"""Operations shared by the HTTP routers, the MCP tools and the CLI.

Everything here takes source text or parsed objects and returns response models; domain errors
propagate as ``WorkbenchError`` and each surface maps them its own way.
"""

from __future__ import annotations

from typing import Callable, Mapping, Sequence, TypeVar

from app.config import settings
from app.counter.machine import CmSpec, validate_cm
from app.counter.translate import compare, materialize, translate
from app.dsl import Document, parse_document, print_cm, print_snp
from app.errors import DslSyntaxError, InsufficientOutput, SourceError
from app.schemas import (
    BoundaryResult,
    CompareResponse,
    Diagnostic,
    Divergence,
    EncodeResponse,
    InputEncoderResponse,
    RunResponse,
    SystemTextResponse,
    TraceRecord,
    TranslateResponse,
    ValidateResponse,
    VerifyResponse,
)
from app.snp.engine import RuleSelector, StepRecord, Trace, output_value, run
from app.snp.model import OutputConvention, SnpSystem, validate
from app.turing import TmSpec, check_conventions, encode_config, encode_params, initial_config
from app.universal.builder import build_pi_m
from app.universal.input_encoder import build_input_word, build_pi_input, expected_output
from app.universal.verify import build_schedule, period, verify_against_oracle

KINDS: dict[type, str] = {SnpSystem: "system", TmSpec: "tm", CmSpec: "cm"}

D = TypeVar("D", SnpSystem, TmSpec, CmSpec)


def load(source: str, expected: type[D]) -> D:
    """Parse ``source`` and insist on one document kind."""
    document = parse_document(source)
    if not isinstance(document, expected):
        raise DslSyntaxError(f"expected a {KINDS[expected]!r} document, got {KINDS[type(document)]!r}")
    return document


def problems_of(document: Document) -> list[str]:
    if isinstance(document, SnpSystem):
        return validate(document)
    if isinstance(document, TmSpec):
        return check_conventions(document)
    return validate_cm(document)


def validate_source(source: str) -> ValidateResponse:
    try:
        document = parse_document(source)
    except SourceError as e:
        return ValidateResponse(valid=False, problems=[Diagnostic(message=e.message, line=e.line, column=e.column)])
    problems = problems_of(document)
    return ValidateResponse(
        valid=not problems,
        kind=KINDS[type(document)],
        name=document.name,
        problems=[Diagnostic(message=p) for p in problems],
    )


# Engine


def execute_run(
    system: SnpSystem,
    schedule: Mapping[int, int] | None = None,
    policy: str | None = None,
    seed: int | None = None,
    max_steps: int | None = None,
    stop_on_output: bool | None = None,
    snapshots: bool | None = None,
    sink: Callable[[StepRecord], None] | None = None,
) -> Trace:
    """``run`` with every omitted knob taken from settings.

    Emission-events systems stop at their first emission unless told otherwise.
    """
    problems = validate(system)
    if problems:
        raise DslSyntaxError("; ".join(problems))
    if stop_on_output is None:
        stop_on_output = system.output_convention is OutputConvention.EMISSION_EVENTS
    selector = RuleSelector(policy or settings.default_policy, settings.default_seed if seed is None else seed)
    return run(
        system,
        schedule=schedule or {},
        selector=selector,
        max_steps=max_steps or settings.max_steps,
        snapshots=settings.snapshots if snapshots is None else snapshots,
        stop_on_output=stop_on_output,
        sink=sink,
    )


def run_response(system: SnpSystem, trace: Trace, include_trace: bool = False) -> RunResponse:
    try:
        value = output_value(trace, system.output_convention)
    except InsufficientOutput:
        value = None
    return RunResponse(
        output=value,
        output_events=trace.output_events,
        halt_reason=trace.halt_reason.value,
        steps=len(trace.steps),
        space=trace.space_used,
        lost=sum(record.lost for record in trace.steps),
        violation=str(trace.violation) if trace.violation else None,
        trace=[TraceRecord.from_step(r) for r in trace.steps] if include_trace else None,
    )


# Turing machines


def encode_tape(spec: TmSpec, tape: Sequence[int], head: int = 0, state: int = 1) -> EncodeResponse:
    config = initial_config(list(tape), head, state)
    params = encode_params(spec)
    enc = encode_config(spec, config, params)
    return EncodeResponse(
        X=enc.X,
        Y=enc.Y,
        code=enc.code,
        z=params.z,
        v=params.v,
        period=period(params),
        schedule=build_schedule(enc, params).deliveries,
    )


def universal_text(spec: TmSpec) -> SystemTextResponse:
    universal = build_pi_m(spec)
    system = universal.system
    return SystemTextResponse(
        name=system.name,
        neurons=system.size,
        rules=sum(len(n.rules) for n in system.neurons),
        text=print_snp(system, universal.notes()),
        overlaps=universal.overlaps,
    )


def input_encoder_text(spec: TmSpec, cells: Sequence[int] | None = None) -> InputEncoderResponse:
    encoder = build_pi_input(spec)
    system = encoder.system
    response = InputEncoderResponse(
        name=system.name,
        neurons=system.size,
        rules=sum(len(n.rules) for n in system.neurons),
        text=print_snp(system),
    )
    if cells:
        response.schedule = build_input_word(cells, encoder.params)
        response.expected_time, response.expected_spikes = expected_output(cells, encoder.params)
    return response


def verify_tape(spec: TmSpec, tape: Sequence[int], head: int = 0, state: int = 1, steps: int = 20) -> VerifyResponse:
    report = verify_against_oracle(spec, initial_config(list(tape), head, state), steps)
    return VerifyResponse(
        ok=report.ok,
        machine=report.machine,
        z=report.params.z,
        boundaries=[BoundaryResult(n=c.n, t=c.t, ok=c.ok, detail=c.detail) for c in report.checks],
        halted=report.halted,
        output=list(report.output) if report.output is not None else None,
        expected_output=list(report.expected_output) if report.expected_output is not None else None,
        problems=report.problems,
    )


# Counter machines


def translate_system(system: SnpSystem, with_program: bool = True, state_cap: int | None = None) -> TranslateResponse:
    translation = translate(system, state_cap)
    program = print_cm(materialize(translation)) if with_program else None
    return TranslateResponse(
        counters=translation.counters,
        m=translation.m,
        x_r=translation.x_r,
        states=translation.state_count if with_program else None,
        program=program,
    )


def compare_system(system: SnpSystem, schedule: Mapping[int, int] | None = None, max_T: int = 50) -> CompareResponse:
    report = compare(system, schedule or {}, max_T)
    divergence = None
    if report.divergence is not None:
        t, snp, cm = report.divergence
        divergence = Divergence(t=t, snp=list(snp), cm=list(cm))
    return CompareResponse(
        ok=report.ok,
        timesteps=report.timesteps,
        divergence=divergence,
        snp_output=report.snp_output,
        cm_output=report.cm_output,
        x_r=report.stats.x_r,
        m=report.stats.m,
        max_counter=report.max_counter,
        max_spikes=report.max_spikes,
        steps_per_timestep=report.steps_per_timestep,
    )
