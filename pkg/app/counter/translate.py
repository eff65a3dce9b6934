"""Compile a standard SN P system into a nondeterministic counter machine.

Counters 1..m mirror the neurons and counter m+1 accumulates the spike-gap output. The finite
control carries one G' state per rule, a firing countdown per neuron (0 free, 1 firing now,
d >= 2 closed) and a stage cursor. Each simulated timestep runs:

  select   per free neuron, one NULL entry per applicable rule, then b DECs; a DEC is
           preceded by a probe whenever some automaton of the neuron sits on its g_x and no
           chain state pins the count;
  fire     for each neuron firing now, one INC per open target;
  output   halt on the second output firing, else INC the output counter once the first
           firing happened;
  read     consume one input symbol, INC the input counter on '1' if the input neuron is open.

The probe DECs the counter until it reaches zero or the largest such x, then INCs it back.
Probe moves leave the automata alone; the learned count only resolves the next real DEC.
A probe only bottoms out at counts every automaton of the neuron agrees with and that cover
the spikes still to be consumed, so the enumerated control never holds an impossible count.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Hashable, Literal, Mapping

import structlog

from app.config import settings
from app.counter.machine import END_MARKER, CmConfig, CmEntry, CmSpec, Op, cm_initial, cm_step
from app.counter.automata import TrackingAutomaton, build_G, build_Gprime
from app.errors import StateSpaceExceeded, UnsupportedMode
from app.snp.engine import RuleSelector, run as run_snp
from app.snp.model import Mode, OutputConvention, SnpSystem

logger = structlog.get_logger()

HALT = "qh"
ALPHABET = ("0", "1", END_MARKER)

Phase = Literal["load", "select", "consume", "probe_down", "probe_up", "fire", "output", "read"]


@dataclass(frozen=True)
class Control:
    phase: Phase
    cursor: int = 0
    sub: int = 0
    remaining: int = 0
    known: int = -1
    probe: int = 0
    automata: tuple[tuple[int, ...], ...] = ()
    countdown: tuple[int, ...] = ()
    fired: int = 0


@dataclass
class TranslationStats:
    x_r: int
    m: int
    states: int = 0
    steps_per_timestep: list[int] = field(default_factory=list)


class Translation:
    """Counter machine for ``system`` whose control states are built on demand."""

    def __init__(self, system: SnpSystem, state_cap: int | None = None):
        if system.mode is not Mode.STANDARD:
            raise UnsupportedMode(f"translation needs a standard-mode system, got {system.mode.value}")
        self.system = system
        self.m = system.size
        self.counters = self.m + 1
        self.output = self.m + 1
        self.halt = HALT
        self.state_cap = state_cap or settings.cm_state_cap
        self.trackers: tuple[tuple[TrackingAutomaton, ...], ...] = tuple(
            tuple(build_Gprime(build_G(rule)) for rule in neuron.rules) for neuron in system.neurons
        )
        start = Control(
            phase="load",
            automata=tuple(
                tuple(t.g.state_for(neuron.initial_spikes) for t in trackers)
                for neuron, trackers in zip(system.neurons, self.trackers)
            ),
            countdown=(0,) * self.m,
        )
        self.initial = self._settle(start)
        self._memo: dict[tuple[str, Hashable], list[CmEntry]] = {}
        self._seen: set[Hashable] = {self.initial}

    @property
    def x_r(self) -> int:
        return max((t.g.x for trackers in self.trackers for t in trackers), default=0)

    @property
    def state_count(self) -> int:
        return len(self._seen)

    def stats(self) -> TranslationStats:
        return TranslationStats(x_r=self.x_r, m=self.m, states=self.state_count)

    def entries_for(self, symbol: str, state: Hashable) -> list[CmEntry]:
        key = (symbol, state)
        if key not in self._memo:
            entries = [] if state == HALT else self._entries(symbol, state)
            for entry in entries:
                if entry.next_state not in self._seen:
                    self._seen.add(entry.next_state)
                    if len(self._seen) > self.state_cap:
                        raise StateSpaceExceeded(
                            f"{self.system.name}: more than {self.state_cap} control states"
                        )
            self._memo[key] = entries
        return self._memo[key]

    # helpers over the control

    def _applicable(self, control: Control, i: int) -> list[int]:
        return [
            r
            for r, (t, state) in enumerate(zip(self.trackers[i], control.automata[i]))
            if state in t.g.accepts
        ]

    def _exact_count(self, control: Control, i: int) -> int | None:
        """Content of neuron i when some automaton is still on its chain."""
        return next(
            (state - 1 for t, state in zip(self.trackers[i], control.automata[i]) if state < t.g.x),
            None,
        )

    def _consistent(self, control: Control, i: int, count: int) -> bool:
        return count >= control.remaining and all(
            t.g.state_for(count) == state for t, state in zip(self.trackers[i], control.automata[i])
        )

    def _probe_depth(self, control: Control, i: int) -> int:
        """Largest x among automata of neuron i sitting on their g_x, or 0 when no probe is needed."""
        if self._exact_count(control, i) is not None:
            return 0
        return max(
            (t.g.x for t, state in zip(self.trackers[i], control.automata[i]) if state in t.ambiguous),
            default=0,
        )

    def _bump(self, control: Control, i: int) -> tuple[tuple[int, ...], ...]:
        automata = control.automata
        bumped = tuple(t.plus(state) for t, state in zip(self.trackers[i], automata[i]))
        return automata[:i] + (bumped,) + automata[i + 1 :]

    def _tick(self, control: Control) -> Control:
        countdown = tuple(c - 1 if c else 0 for c in control.countdown)
        return replace(control, phase="read", cursor=0, sub=0, countdown=countdown)

    def _settle(self, control: Control) -> Control:
        """Advance through bookkeeping that needs no counter machine step."""
        while True:
            phase = control.phase
            if phase == "load":
                if control.cursor == self.m:
                    return replace(control, phase="read", cursor=0, sub=0)
                if control.sub < self.system.neurons[control.cursor].initial_spikes:
                    return control
                control = replace(control, cursor=control.cursor + 1, sub=0)
            elif phase == "select":
                i = control.cursor
                if i == self.m:
                    control = replace(control, phase="fire", cursor=0, sub=0)
                elif control.countdown[i] == 0 and self._applicable(control, i):
                    return control
                else:
                    control = replace(control, cursor=i + 1)
            elif phase == "consume":
                i = control.cursor
                if control.remaining:
                    if control.known < 0 and self._probe_depth(control, i):
                        return replace(control, phase="probe_down", probe=0)
                    return control
                g = self.trackers[i][control.sub].g
                countdown = control.countdown
                if not g.forgetting:
                    countdown = countdown[:i] + (g.delay,) + countdown[i + 1 :]
                control = replace(control, phase="select", cursor=i + 1, sub=0, countdown=countdown)
            elif phase == "probe_up":
                if control.probe:
                    return control
                control = replace(control, phase="consume")
            elif phase == "fire":
                i, j = control.cursor, control.sub
                if i == self.m:
                    control = replace(control, phase="output", cursor=0, sub=0)
                    continue
                targets = self.system.adjacency[i]
                if control.countdown[i] != 1 or j >= len(targets):
                    control = replace(control, cursor=i + 1, sub=0)
                elif control.countdown[targets[j] - 1] >= 2:
                    control = replace(control, sub=j + 1)
                else:
                    return control
            elif phase == "output":
                if control.fired or control.countdown[self.system.output - 1] == 1:
                    return control
                control = self._tick(control)
            else:
                return control

    # entries per phase

    def _step(
        self,
        symbol: str,
        control: Control,
        after: Control | str,
        op: Op = "NULL",
        target: int | None = None,
        move: bool = False,
    ) -> list[CmEntry]:
        """Unconditional step: one entry per truth value of counter 1."""
        return [CmEntry(symbol, control, 1, truth, move, after, op, target) for truth in (True, False)]

    def _entries(self, symbol: str, control: Control) -> list[CmEntry]:
        phase = control.phase
        i = control.cursor
        if phase == "load":
            return self._step(symbol, control, self._settle(replace(control, sub=control.sub + 1)), "INC", i + 1)

        if phase == "select":
            entries = []
            for r in self._applicable(control, i):
                g = self.trackers[i][r].g
                chosen = replace(control, phase="consume", sub=r, remaining=g.consume, known=-1)
                entries += self._step(symbol, control, self._settle(chosen))
            return entries

        if phase == "probe_down":
            depth = control.probe + 1
            limit = self._probe_depth(control, i)
            if depth == limit:
                down = replace(control, phase="probe_up", known=limit, probe=limit)
            else:
                down = replace(control, probe=depth)
            entries = [CmEntry(symbol, control, i + 1, True, False, self._settle(down), "DEC", i + 1)]
            if self._consistent(control, i, control.probe):
                bottom = replace(control, phase="probe_up", known=control.probe)
                entries.append(CmEntry(symbol, control, i + 1, False, False, self._settle(bottom)))
            return entries

        if phase == "probe_up":
            return self._step(symbol, control, self._settle(replace(control, probe=control.probe - 1)), "INC", i + 1)

        if phase == "consume":
            known = control.known
            if known < 0:
                exact = self._exact_count(control, i)
                known = -1 if exact is None else exact
            moved = tuple(t.minus(state, known) for t, state in zip(self.trackers[i], control.automata[i]))
            automata = control.automata[:i] + (moved,) + control.automata[i + 1 :]
            after = replace(control, remaining=control.remaining - 1, known=-1, automata=automata)
            return [CmEntry(symbol, control, i + 1, True, False, self._settle(after), "DEC", i + 1)]

        if phase == "fire":
            target = self.system.adjacency[i][control.sub]
            after = replace(control, sub=control.sub + 1, automata=self._bump(control, target - 1))
            return self._step(symbol, control, self._settle(after), "INC", target)

        if phase == "output":
            if control.fired and control.countdown[self.system.output - 1] == 1:
                return self._step(symbol, control, HALT)
            after = self._tick(replace(control, fired=1))
            return self._step(symbol, control, self._settle(after), "INC", self.output)

        # read
        nxt = replace(control, phase="select", cursor=0)
        if symbol == END_MARKER:
            return self._step(symbol, control, self._settle(nxt))
        inp = self.system.input - 1
        if symbol == "1" and control.countdown[inp] <= 1:
            fed = replace(nxt, automata=self._bump(control, inp))
            return self._step(symbol, control, self._settle(fed), "INC", inp + 1, move=True)
        return self._step(symbol, control, self._settle(nxt), move=True)


def translate(system: SnpSystem, state_cap: int | None = None) -> Translation:
    translation = Translation(system, state_cap)
    logger.info("translated", system=system.name, counters=translation.counters, x_r=translation.x_r)
    return translation


def materialize(translation: Translation) -> CmSpec:
    """Enumerate the reachable control graph and name states q0, q1, ... with qh for halt."""
    names: dict[Hashable, str] = {translation.initial: "q0", HALT: HALT}
    queue = deque([translation.initial])
    entries: list[CmEntry] = []
    while queue:
        control = queue.popleft()
        for symbol in ALPHABET:
            for entry in translation.entries_for(symbol, control):
                if entry.next_state not in names:
                    names[entry.next_state] = f"q{len(names) - 1}"
                    queue.append(entry.next_state)
                entries.append(replace(entry, state=names[control], next_state=names[entry.next_state]))
    logger.info("materialized", system=translation.system.name, states=len(names), entries=len(entries))
    return CmSpec(
        name=f"{translation.system.name}-cm",
        counters=translation.counters,
        output=translation.output,
        initial="q0",
        halt=HALT,
        alphabet=ALPHABET,
        entries=tuple(entries),
    )


def schedule_to_word(schedule: Mapping[int, int]) -> str:
    if any(count not in (0, 1) for count in schedule.values()):
        raise UnsupportedMode("translated systems take at most one input spike per step")
    last = max((t for t, count in schedule.items() if count), default=0)
    return "".join("1" if schedule.get(t) else "0" for t in range(1, last + 1))


@dataclass
class CompareReport:
    ok: bool
    timesteps: int
    divergence: tuple[int, tuple[int, ...], tuple[int, ...]] | None
    snp_output: int | None
    cm_output: int | None
    stats: TranslationStats
    max_counter: int
    max_spikes: int
    space: int

    @property
    def steps_per_timestep(self) -> list[int]:
        return self.stats.steps_per_timestep


def compare(
    system: SnpSystem,
    schedule: Mapping[int, int] | None = None,
    max_T: int = 50,
    translation: Translation | None = None,
) -> CompareReport:
    """Run the system and its counter machine side by side for ``max_T`` simulated steps.

    Both sides resolve nondeterminism to the lowest rule index.
    """
    if system.output_convention is not OutputConvention.SPIKE_GAP:
        raise UnsupportedMode("counter machine comparison uses the spike-gap convention")
    schedule = schedule or {}
    translation = translation or translate(system)
    word = schedule_to_word(schedule)
    trace = run_snp(system, schedule, RuleSelector(), max_steps=max_T, snapshots=True)
    expected = {record.t: record.contents for record in trace.steps}

    config: CmConfig = cm_initial(translation)
    boundaries: list[tuple[int, ...]] = []
    steps_at: list[int] = []
    max_counter = 0
    while config.state != HALT and len(boundaries) < max_T and config.steps < settings.cm_max_steps:
        previous = config
        config = cm_step(translation, config, word)
        max_counter = max(max_counter, *config.counters)
        if isinstance(previous.state, Control) and previous.state.phase == "read":
            boundaries.append(config.counters[: translation.m])
            steps_at.append(config.steps)

    divergence = None
    for t, counters in enumerate(boundaries, start=1):
        contents = expected.get(t, trace.final.contents)
        if counters != contents:
            divergence = (t, contents, counters)
            break

    stats = translation.stats()
    stats.steps_per_timestep = [b - a for a, b in zip(steps_at, steps_at[1:])]
    events = trace.output_events
    snp_output = events[1][0] - events[0][0] if len(events) >= 2 else None
    cm_output = config.counters[translation.output - 1] if config.state == HALT else None
    ok = divergence is None and snp_output == cm_output
    if not ok:
        logger.warning("compare_mismatch", system=system.name, divergence=divergence,
                       snp_output=snp_output, cm_output=cm_output)
    observed = [*expected.values(), trace.final.contents]
    max_spikes = max((max(c) for c in observed if c), default=0)
    return CompareReport(
        ok=ok,
        timesteps=len(boundaries),
        divergence=divergence,
        snp_output=snp_output,
        cm_output=cm_output,
        stats=stats,
        max_counter=max_counter,
        max_spikes=max_spikes,
        space=trace.space_used,
    )
