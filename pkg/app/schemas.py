"""Pydantic request/response models for the API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from app.snp.engine import StepRecord

PolicyName = Literal["first", "seeded", "strict"]


class SourceRequest(BaseModel):
    """Request body carrying one document (system, tm or cm)."""

    source: str = Field(..., min_length=1, max_length=2_000_000)


class Diagnostic(BaseModel):
    message: str
    line: int | None = None
    column: int | None = None


class ValidateResponse(BaseModel):
    """Response for POST /systems/validate."""

    valid: bool
    kind: str | None = None
    name: str | None = None
    problems: list[Diagnostic] = []


# Engine runs


class RunRequest(SourceRequest):
    """Request body for POST /systems/run. Omitted knobs fall back to settings."""

    schedule: dict[int, int] = Field(default_factory=dict, description="time -> spikes into the input neuron")
    policy: PolicyName | None = None
    seed: int | None = None
    max_steps: int | None = Field(default=None, ge=1)
    stop_on_output: bool | None = None
    trace: bool = False


class TraceRecord(BaseModel):
    """One engine step; the CLI writes these one per line.

    Spike counts are decimal strings: universal-system contents outgrow 64-bit JSON numbers.
    """

    t: int
    contents: list[str] | None = None
    space: str
    selections: list[tuple[int, int, str]] = []
    firings: list[tuple[int, str]] = []
    output: str | None = None
    lost: str = "0"

    @classmethod
    def from_step(cls, record: StepRecord) -> "TraceRecord":
        return cls(
            t=record.t,
            contents=[str(c) for c in record.contents] if record.contents is not None else None,
            space=str(record.space),
            selections=[(neuron, rule, str(g)) for neuron, rule, g in record.selections],
            firings=[(neuron, str(spikes)) for neuron, spikes in record.firings],
            output=None if record.output is None else str(record.output),
            lost=str(record.lost),
        )


class RunResponse(BaseModel):
    """Response for POST /systems/run."""

    output: int | None
    output_events: list[tuple[int, int]]
    halt_reason: str
    steps: int
    space: int
    lost: int
    violation: str | None = None
    trace: list[TraceRecord] | None = None


# Turing machines and the universal construction


class ConfigRequest(SourceRequest):
    """A machine plus a raw tape; the head index points into ``tape``."""

    tape: list[int] = Field(default_factory=lambda: [1])
    head: int = Field(default=0, ge=0)
    state: int = Field(default=1, ge=1)


class EncodeResponse(BaseModel):
    """Response for POST /machines/encode."""

    X: int
    Y: int
    code: int
    z: int
    v: int
    period: int
    schedule: dict[int, int]


class SystemTextResponse(BaseModel):
    """A generated system in the workbench text format."""

    name: str
    neurons: int
    rules: int
    text: str
    overlaps: list[str] = []


class InputEncoderRequest(SourceRequest):
    cells: list[int] | None = Field(default=None, description="left tape a_{-x}..a_{-1}, tape order")


class InputEncoderResponse(SystemTextResponse):
    """Response for POST /machines/input-encoder."""

    schedule: dict[int, int] | None = None
    expected_time: int | None = None
    expected_spikes: int | None = None


class VerifyRequest(ConfigRequest):
    steps: int = Field(default=20, ge=0, le=10_000)


class BoundaryResult(BaseModel):
    n: int
    t: int
    ok: bool
    detail: str = ""


class VerifyResponse(BaseModel):
    """Response for POST /machines/verify."""

    ok: bool
    machine: str
    z: int
    boundaries: list[BoundaryResult]
    halted: bool
    output: list[int] | None = None
    expected_output: list[int] | None = None
    problems: list[str] = []


# Counter machines


class TranslateRequest(SourceRequest):
    materialize: bool = True
    state_cap: int | None = Field(default=None, ge=1)


class TranslateResponse(BaseModel):
    """Response for POST /counter/translate."""

    counters: int
    m: int
    x_r: int
    states: int | None = None
    program: str | None = None


class CompareRequest(SourceRequest):
    schedule: dict[int, int] = Field(default_factory=dict)
    max_T: int = Field(default=50, ge=1, le=100_000)


class Divergence(BaseModel):
    t: int
    snp: list[int]
    cm: list[int]


class CompareResponse(BaseModel):
    """Response for POST /counter/compare."""

    ok: bool
    timesteps: int
    divergence: Divergence | None = None
    snp_output: int | None
    cm_output: int | None
    x_r: int
    m: int
    max_counter: int
    max_spikes: int
    steps_per_timestep: list[int]
