"""Counter machine interpreter with a one-way input tape.

A transition entry is keyed by (read symbol, state, tested counter, truth of "counter > 0")
and carries a head move, a next state and at most one counter operation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Hashable, Literal, Protocol, Sequence

import structlog

from app.errors import CmCounterUnderflow, CmStuck
from app.snp.engine import RuleSelector, Selector

logger = structlog.get_logger()

END_MARKER = "#"

Op = Literal["INC", "DEC", "NULL"]


@dataclass(frozen=True)
class CmEntry:
    symbol: str
    state: Hashable
    counter: int
    truth: bool
    move: bool
    next_state: Hashable
    op: Op = "NULL"
    target: int | None = None


class CounterProgram(Protocol):
    """Anything that can list the entries for a (symbol, state) pair."""

    counters: int
    output: int
    initial: Hashable
    halt: Hashable

    def entries_for(self, symbol: str, state: Hashable) -> Sequence[CmEntry]: ...


@dataclass(frozen=True)
class CmSpec:
    name: str
    counters: int
    output: int
    initial: str
    halt: str
    alphabet: tuple[str, ...]
    entries: tuple[CmEntry, ...]

    @cached_property
    def _index(self) -> dict[tuple[str, Hashable], list[CmEntry]]:
        index: dict[tuple[str, Hashable], list[CmEntry]] = {}
        for entry in self.entries:
            index.setdefault((entry.symbol, entry.state), []).append(entry)
        return index

    def entries_for(self, symbol: str, state: Hashable) -> Sequence[CmEntry]:
        return self._index.get((symbol, state), [])

    @property
    def states(self) -> list[str]:
        seen = dict.fromkeys([self.initial])
        for entry in self.entries:
            seen.setdefault(entry.state)
            seen.setdefault(entry.next_state)
        seen.setdefault(self.halt)
        return list(seen)


def validate_cm(spec: CmSpec) -> list[str]:
    problems = []
    if END_MARKER not in spec.alphabet:
        problems.append(f"alphabet must contain the end marker {END_MARKER!r}")
    if not 1 <= spec.output <= spec.counters:
        problems.append(f"output counter c{spec.output} out of range 1..{spec.counters}")
    for n, entry in enumerate(spec.entries):
        where = f"entry {n}"
        if entry.symbol not in spec.alphabet:
            problems.append(f"{where}: symbol {entry.symbol!r} not in alphabet")
        if not 1 <= entry.counter <= spec.counters:
            problems.append(f"{where}: tests unknown counter c{entry.counter}")
        if entry.op == "NULL" and entry.target is not None:
            problems.append(f"{where}: NULL takes no counter")
        if entry.op != "NULL" and (entry.target is None or not 1 <= entry.target <= spec.counters):
            problems.append(f"{where}: {entry.op} on unknown counter")
        if entry.op == "DEC" and (entry.target != entry.counter or not entry.truth):
            problems.append(f"{where}: DEC must test its own counter for > 0")
        if entry.state == spec.halt:
            problems.append(f"{where}: no transitions leave the halt state")
    return problems


@dataclass(frozen=True)
class CmConfig:
    state: Hashable
    counters: tuple[int, ...]
    head: int = 0
    steps: int = 0


def cm_initial(program: CounterProgram) -> CmConfig:
    return CmConfig(program.initial, (0,) * program.counters)


def symbol_at(word: str, head: int) -> str:
    return word[head] if head < len(word) else END_MARKER


def matching_entries(program: CounterProgram, config: CmConfig, word: str) -> list[CmEntry]:
    symbol = symbol_at(word, config.head)
    return [
        entry
        for entry in program.entries_for(symbol, config.state)
        if (config.counters[entry.counter - 1] > 0) == entry.truth
    ]


def apply_entry(config: CmConfig, entry: CmEntry) -> CmConfig:
    counters = config.counters
    if entry.op != "NULL":
        i = entry.target - 1
        value = counters[i] + (1 if entry.op == "INC" else -1)
        if value < 0:
            raise CmCounterUnderflow(f"DEC on zero counter c{entry.target} at step {config.steps}")
        counters = counters[:i] + (value,) + counters[i + 1 :]
    return CmConfig(entry.next_state, counters, config.head + entry.move, config.steps + 1)


def cm_step(
    program: CounterProgram, config: CmConfig, word: str, selector: Selector | None = None
) -> CmConfig:
    matches = matching_entries(program, config, word)
    if not matches:
        raise CmStuck(
            f"no entry for symbol {symbol_at(word, config.head)!r} in state {config.state!r} "
            f"with counters {config.counters}"
        )
    chosen = 0
    if len(matches) > 1:
        chosen = (selector or RuleSelector()).select(list(range(len(matches))), 0, config.steps)
    return apply_entry(config, matches[chosen])


@dataclass(frozen=True)
class CmResult:
    halted: bool
    state: Hashable
    counters: tuple[int, ...]
    steps: int
    head: int
    output: int | None


def cm_run(
    program: CounterProgram,
    word: str = "",
    selector: Selector | None = None,
    max_steps: int = 1_000_000,
    observer: Callable[[CmConfig, CmConfig], None] | None = None,
) -> CmResult:
    """Run from the initial state until the halt state or ``max_steps``."""
    config = cm_initial(program)
    while config.state != program.halt and config.steps < max_steps:
        following = cm_step(program, config, word, selector)
        if observer is not None:
            observer(config, following)
        config = following
    halted = config.state == program.halt
    return CmResult(
        halted=halted,
        state=config.state,
        counters=config.counters,
        steps=config.steps,
        head=config.head,
        output=config.counters[program.output - 1] if halted else None,
    )


def cm_explore(program: CounterProgram, word: str = "", max_steps: int = 10_000) -> set[int]:
    """Output values of every halting run reachable within ``max_steps``."""
    start = cm_initial(program)
    seen = {replace(start, steps=0)}
    queue = deque([start])
    outputs: set[int] = set()
    while queue:
        config = queue.popleft()
        if config.state == program.halt:
            outputs.add(config.counters[program.output - 1])
            continue
        if config.steps >= max_steps:
            continue
        for entry in matching_entries(program, config, word):
            following = apply_entry(config, entry)
            key = replace(following, steps=0)
            if key not in seen:
                seen.add(key)
                queue.append(following)
    logger.debug("cm_explored", configurations=len(seen), outputs=sorted(outputs))
    return outputs
