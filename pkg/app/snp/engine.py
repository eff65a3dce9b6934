"""Discrete-time SN P engine.

One global step at time t runs three phases:
  1. environment delivery for t into the input neuron (lost if it is closed at t);
  2. every free neuron with applicable rules selects one and consumes spikes;
  3. every neuron whose firing time is t emits along its synapses; spikes land at t+1
     in receivers that are open at t.
A rule applied at t with delay d fires at t+d-1; the neuron is closed for sending-times
t..t+d-2 and may apply its next rule at t+d.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Collection, Mapping, Protocol

import structlog

from app.errors import InsufficientOutput, StrictPolicyViolation
from app.snp.model import Mode, Neuron, OutputConvention, SnpSystem
from app.unary import member

logger = structlog.get_logger()

Schedule = Mapping[int, int]


class Policy(str, Enum):
    FIRST = "first"
    SEEDED = "seeded"
    STRICT = "strict"


class HaltReason(str, Enum):
    QUIESCENT = "quiescent"
    MAX_STEPS = "max-steps"
    STRICT_VIOLATION = "strict-policy-violation"
    OUTPUT = "output"


class Selector(Protocol):
    def select(self, candidates: list[int], neuron: int, time: int) -> int: ...


def select_rule(policy: Policy, candidates: list[int], rng: random.Random | None = None) -> int:
    if not candidates:
        raise ValueError("no candidates to select from")
    if policy is Policy.FIRST:
        return min(candidates)
    if policy is Policy.STRICT:
        if len(candidates) > 1:
            raise StrictPolicyViolation(neuron=0, candidates=candidates)
        return candidates[0]
    return (rng or random.Random(0)).choice(sorted(candidates))


class RuleSelector:
    """Policy plus the named pseudorandom stream used by ``seeded``."""

    def __init__(self, policy: Policy | str = Policy.FIRST, seed: int = 0):
        self.policy = Policy(policy)
        self.seed = seed
        self._rng = random.Random(f"snp-select:{seed}")

    def select(self, candidates: list[int], neuron: int, time: int) -> int:
        try:
            return select_rule(self.policy, candidates, self._rng)
        except StrictPolicyViolation:
            raise StrictPolicyViolation(neuron, candidates, time) from None


@dataclass(frozen=True)
class NeuronState:
    content: int = 0
    fire_at: int | None = None
    pending: int = 0

    def closed_at(self, t: int) -> bool:
        return self.fire_at is not None and self.fire_at > t


@dataclass(frozen=True)
class SnpConfig:
    time: int
    neurons: tuple[NeuronState, ...]

    @property
    def contents(self) -> tuple[int, ...]:
        return tuple(n.content for n in self.neurons)

    @property
    def total_spikes(self) -> int:
        return sum(n.content + n.pending for n in self.neurons)

    @property
    def busy(self) -> bool:
        return any(n.fire_at is not None for n in self.neurons)


def initial_config(system: SnpSystem) -> SnpConfig:
    return SnpConfig(1, tuple(NeuronState(n.initial_spikes) for n in system.neurons))


def applicable_rules(neuron: Neuron, content: int, mode: Mode) -> list[int]:
    """Rule indices whose guard holds at ``content`` (standard forgetting needs an exact count)."""
    found = []
    for index, rule in enumerate(neuron.rules):
        if mode is Mode.STANDARD and rule.is_forgetting:
            if content == rule.consume:
                found.append(index)
        elif content >= rule.consume and member(rule.guard, content):
            found.append(index)
    return found


@dataclass
class StepRecord:
    t: int
    contents: tuple[int, ...] | None
    space: int
    selections: list[tuple[int, int, int]] = field(default_factory=list)  # (neuron, rule, g)
    firings: list[tuple[int, int]] = field(default_factory=list)  # (neuron, spikes)
    output: int | None = None
    lost: int = 0


def _delivered(system: SnpSystem, config: SnpConfig, schedule: Schedule) -> tuple[list[NeuronState], int]:
    t = config.time
    states = list(config.neurons)
    lost = 0
    arriving = schedule.get(t, 0)
    if arriving:
        i = system.input - 1
        if states[i].closed_at(t):
            lost = arriving
        else:
            states[i] = replace(states[i], content=states[i].content + arriving)
    return states, lost


def pending_choices(system: SnpSystem, config: SnpConfig, schedule: Schedule) -> dict[int, list[int]]:
    """Candidate rules per free neuron at the next step (after environment delivery)."""
    states, _ = _delivered(system, config, schedule)
    choices = {}
    for neuron, state in zip(system.neurons, states):
        if state.fire_at is None:
            candidates = applicable_rules(neuron, state.content, system.mode)
            if candidates:
                choices[neuron.id] = candidates
    return choices


def step(
    system: SnpSystem,
    config: SnpConfig,
    schedule: Schedule,
    selector: Selector,
    snapshot: bool = False,
) -> tuple[SnpConfig, StepRecord]:
    """Execute exactly one global timestep."""
    t = config.time
    states, lost = _delivered(system, config, schedule)
    record = StepRecord(
        t=t,
        contents=tuple(s.content for s in states) if snapshot else None,
        space=sum(s.content + s.pending for s in states),
        lost=lost,
    )

    exhaustive = system.mode is Mode.EXHAUSTIVE
    for index, neuron in enumerate(system.neurons):
        state = states[index]
        if state.fire_at is not None:
            continue
        candidates = applicable_rules(neuron, state.content, system.mode)
        if not candidates:
            continue
        chosen = selector.select(candidates, neuron.id, t)
        rule = neuron.rules[chosen]
        g = state.content // rule.consume if exhaustive else 1
        content = state.content - rule.consume * g
        if rule.is_forgetting:
            states[index] = replace(state, content=content)
        else:
            states[index] = NeuronState(content, t + rule.delay - 1, g * rule.emit)
        record.selections.append((neuron.id, chosen, g))

    incoming = [0] * len(states)
    for index, state in enumerate(states):
        if state.fire_at != t:
            continue
        neuron_id = index + 1
        spikes = state.pending
        record.firings.append((neuron_id, spikes))
        for target in system.adjacency[index]:
            if states[target - 1].closed_at(t):
                record.lost += spikes
            else:
                incoming[target - 1] += spikes
        if neuron_id == system.output:
            record.output = spikes
        states[index] = replace(state, fire_at=None, pending=0)

    landed = tuple(
        replace(s, content=s.content + extra) if extra else s for s, extra in zip(states, incoming)
    )
    return SnpConfig(t + 1, landed), record


@dataclass
class Trace:
    steps: list[StepRecord]
    output_events: list[tuple[int, int]]
    halt_reason: HaltReason
    final: SnpConfig
    space_used: int
    violation: StrictPolicyViolation | None = None

    def snapshot(self, t: int) -> tuple[int, ...] | None:
        for record in self.steps:
            if record.t == t:
                return record.contents
        return None


def is_quiescent(system: SnpSystem, config: SnpConfig, schedule: Schedule) -> bool:
    if config.busy or any(t >= config.time and n for t, n in schedule.items()):
        return False
    return not any(
        applicable_rules(neuron, state.content, system.mode)
        for neuron, state in zip(system.neurons, config.neurons)
    )


def run(
    system: SnpSystem,
    schedule: Schedule | None = None,
    selector: Selector | None = None,
    max_steps: int = 10_000,
    snapshots: bool | Collection[int] = False,
    stop_on_output: bool = False,
    sink: Callable[[StepRecord], None] | None = None,
    config: SnpConfig | None = None,
) -> Trace:
    """Iterate ``step`` until quiescence, ``max_steps`` or (optionally) the first output emission."""
    schedule = schedule or {}
    selector = selector or RuleSelector()
    config = config or initial_config(system)
    steps: list[StepRecord] = []
    outputs: list[tuple[int, int]] = []
    space = 0
    reason = HaltReason.MAX_STEPS
    violation = None

    for _ in range(max_steps):
        if is_quiescent(system, config, schedule):
            reason = HaltReason.QUIESCENT
            break
        wanted = snapshots if isinstance(snapshots, bool) else config.time in snapshots
        try:
            config, record = step(system, config, schedule, selector, snapshot=wanted)
        except StrictPolicyViolation as e:
            reason, violation = HaltReason.STRICT_VIOLATION, e
            logger.warning("strict_policy_violation", system=system.name, neuron=e.neuron, time=e.time)
            break
        space = max(space, record.space)
        steps.append(record)
        if sink is not None:
            sink(record)
        if record.output is not None:
            outputs.append((record.t, record.output))
            if stop_on_output:
                reason = HaltReason.OUTPUT
                break
    else:
        if is_quiescent(system, config, schedule):
            reason = HaltReason.QUIESCENT

    space = max(space, config.total_spikes)
    logger.debug("run_finished", system=system.name, steps=len(steps), halt_reason=reason.value)
    return Trace(steps, outputs, reason, config, space, violation)


def output_value(trace: Trace, convention: OutputConvention) -> int:
    events = trace.output_events
    if convention is OutputConvention.SPIKE_GAP:
        if len(events) < 2:
            raise InsufficientOutput(f"spike-gap output needs two firings, got {len(events)}")
        return events[1][0] - events[0][0]
    if not events:
        raise InsufficientOutput("no output emission")
    return events[0][1]


def space_used(trace: Trace) -> int:
    return trace.space_used


# Exhaustive-branching reference executor (small instances only)


class _Scripted:
    def __init__(self, choices: Mapping[int, int]):
        self._choices = choices

    def select(self, candidates: list[int], neuron: int, time: int) -> int:
        return self._choices[neuron]


@dataclass
class Exploration:
    levels: dict[int, set[tuple[int, ...]]]
    gap_outputs: set[int]


def explore(system: SnpSystem, schedule: Schedule | None = None, steps: int = 20) -> Exploration:
    """All reachable content vectors per step over every nondeterministic choice."""
    schedule = schedule or {}
    frontier = {(initial_config(system), None, 0)}
    levels: dict[int, set[tuple[int, ...]]] = {}
    gaps: set[int] = set()
    for _ in range(steps):
        following = set()
        for config, first_out, fired in frontier:
            choices = pending_choices(system, config, schedule)
            neurons = sorted(choices)
            for combo in itertools.product(*(choices[n] for n in neurons)):
                nxt, record = step(system, config, schedule, _Scripted(dict(zip(neurons, combo))), True)
                levels.setdefault(record.t, set()).add(record.contents)
                first, count = first_out, fired
                if record.output is not None and count < 2:
                    count += 1
                    if count == 1:
                        first = record.t
                    else:
                        gaps.add(record.t - first)
                following.add((nxt, first, count))
        frontier = following
    return Exploration(levels, gaps)