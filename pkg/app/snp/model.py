"""Static description of an SN P system and its validator."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from enum import Enum

from app.unary import EventuallyPeriodicSet, compile_guard, member, singleton


class Mode(str, Enum):
    STANDARD = "standard"
    EXTENDED = "extended"
    EXHAUSTIVE = "exhaustive"


class OutputConvention(str, Enum):
    SPIKE_GAP = "gap"
    EMISSION_EVENTS = "events"


@dataclass(frozen=True)
class RuleSpec:
    """E/s^b -> s^p;d. ``emit == 0`` is a forgetting rule (delay 0)."""

    expr: str
    consume: int
    emit: int
    delay: int
    guard: EventuallyPeriodicSet = field(compare=False, repr=False)

    @classmethod
    def of(cls, expr: str, consume: int, emit: int, delay: int) -> "RuleSpec":
        return cls(expr, consume, emit, delay, compile_guard(expr))

    @classmethod
    def forgetting(cls, e: int) -> "RuleSpec":
        """Standard s^e -> λ."""
        return cls(f"s^{e}" if e > 1 else "s", e, 0, 0, singleton(e))

    @property
    def is_forgetting(self) -> bool:
        return self.emit == 0

    def label(self) -> str:
        rhs = "λ" if self.is_forgetting else ("s" if self.emit == 1 else f"s^{self.emit}")
        return f"{self.expr}/s^{self.consume}->{rhs};{self.delay}"


@dataclass(frozen=True)
class Neuron:
    id: int
    rules: tuple[RuleSpec, ...] = ()
    initial_spikes: int = 0


@dataclass(frozen=True)
class SnpSystem:
    name: str
    neurons: tuple[Neuron, ...]
    synapses: frozenset[tuple[int, int]]
    input: int
    output: int
    mode: Mode = Mode.STANDARD
    output_convention: OutputConvention = OutputConvention.SPIKE_GAP

    @property
    def size(self) -> int:
        return len(self.neurons)

    def neuron(self, neuron_id: int) -> Neuron:
        return self.neurons[neuron_id - 1]

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted targets per neuron, indexed by id - 1."""
        return tuple(tuple(self.targets(n.id)) for n in self.neurons)

    def targets(self, neuron_id: int) -> list[int]:
        return sorted(j for (i, j) in self.synapses if i == neuron_id)


def validate(system: SnpSystem) -> list[str]:
    """Human-readable diagnostics; empty iff the system is well formed."""
    problems: list[str] = []
    ids = [n.id for n in system.neurons]
    if ids != list(range(1, len(ids) + 1)):
        problems.append(f"neuron ids must be 1..{len(ids)} in order, got {ids}")
    known = set(ids)
    for i, j in sorted(system.synapses):
        if i == j:
            problems.append(f"synapse ({i},{j}) is reflexive")
        if i not in known or j not in known:
            problems.append(f"synapse ({i},{j}) references an unknown neuron")
    for role, nid in (("input", system.input), ("output", system.output)):
        if nid not in known:
            problems.append(f"{role} neuron {nid} does not exist")

    for neuron in system.neurons:
        if neuron.initial_spikes < 0:
            problems.append(f"neuron {neuron.id}: negative initial spikes")
        for index, rule in enumerate(neuron.rules):
            where = f"neuron {neuron.id} rule {index}"
            if rule.consume < 1:
                problems.append(f"{where}: consumes {rule.consume} spikes, needs >= 1")
            if rule.is_forgetting and rule.delay != 0:
                problems.append(f"{where}: forgetting rule must have delay 0")
            if not rule.is_forgetting and rule.delay < 1:
                problems.append(f"{where}: spiking rule must have delay >= 1")
            if system.mode is Mode.STANDARD:
                if rule.emit > 1:
                    problems.append(f"{where}: standard rules emit a single spike")
                if rule.is_forgetting and rule.guard != singleton(rule.consume):
                    problems.append(f"{where}: standard forgetting guard must be exactly s^{rule.consume}")
            elif rule.consume < rule.emit:
                problems.append(f"{where}: extended rules need consume >= emit")
        if system.mode is Mode.STANDARD:
            spiking = [r for r in neuron.rules if not r.is_forgetting]
            for rule in neuron.rules:
                if rule.is_forgetting:
                    for other in spiking:
                        if member(other.guard, rule.consume):
                            problems.append(
                                f"neuron {neuron.id}: forgetting s^{rule.consume} lies in L({other.expr})"
                            )
    return problems
