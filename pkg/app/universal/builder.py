"""Ten-neuron universal system simulating a deterministic single-tape Turing machine.

A configuration (X, Y, code) is loaded through neuron 5 at t=1, 2 and 4. From t=5 on every
transition takes v+9 steps (z = 2^v): neurons 1 and 2 hold X and Y, neurons 4 and 6 hold the
state/symbol code at each boundary, neurons 7-9 multiply the shifted side by z through v
doublings and neuron 10 times the macro step and injects the written symbol and next state.
A halting code makes neuron 3 emit Y to the environment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import structlog

from app.errors import ConventionViolation
from app.snp.model import Mode, Neuron, OutputConvention, RuleSpec, SnpSystem, validate
from app.turing import (
    EncodingParams,
    TmSpec,
    Transition,
    check_conventions,
    encode_params,
    encode_state,
    encode_symbol,
)
from app.unary import intersects_from

logger = structlog.get_logger()

INPUT_NEURON = 5
OUTPUT_NEURON = 3
INITIAL_TIMER = 31

SYNAPSES = frozenset(
    {
        (1, 4), (1, 5),
        (2, 3), (2, 5), (2, 6),
        (4, 1),
        (5, 4), (5, 6), (5, 7), (5, 8), (5, 9),
        (6, 2),
        (7, 8), (7, 9), (7, 10),
        (8, 7), (8, 9),
        (9, 7), (9, 8), (9, 10),
        (10, 4), (10, 6),
    }
)


def s(n: int) -> str:
    if n == 0:
        return ""
    return "s" if n == 1 else f"s^{n}"


def star(p: int) -> str:
    return "(s)*" if p == 1 else f"(s^{p})*"


@dataclass
class _RuleBook:
    """Ordered rules of one neuron; identical rules are merged and keep every origin."""

    rules: list[RuleSpec] = field(default_factory=list)
    origins: list[list[str]] = field(default_factory=list)

    def add(self, expr: str, consume: int, emit: int, delay: int, origin: str) -> None:
        rule = RuleSpec.of(expr, consume, emit, delay)
        if rule in self.rules:
            self.origins[self.rules.index(rule)].append(origin)
            return
        self.rules.append(rule)
        self.origins.append([origin])

    def forget(self, expr: str, consume: int, origin: str) -> None:
        self.add(expr, consume, 0, 0, origin)


@dataclass
class UniversalSystem:
    system: SnpSystem
    params: EncodingParams
    spec: TmSpec
    provenance: dict[tuple[int, int], list[str]]
    overlaps: list[str]

    def notes(self) -> dict[tuple[int, int], str]:
        """One comment per rule for the printed form."""
        return {key: "; ".join(origins) for key, origins in self.provenance.items()}


@dataclass(frozen=True)
class _Move:
    code: int
    state: int
    symbol: int
    rule: Transition

    @property
    def label(self) -> str:
        return f"q{self.state},a{self.symbol} -> a{self.rule.write} {self.rule.move} q{self.rule.next_state}"


def _moves(spec: TmSpec) -> list[_Move]:
    return [
        _Move(encode_state(spec, state) + encode_symbol(symbol), state, symbol, rule)
        for (state, symbol), rule in sorted(spec.delta.items())
    ]


def find_overlaps(system: SnpSystem) -> list[str]:
    """Rule pairs of one neuron that can both be applicable at some content."""
    found = []
    for neuron in system.neurons:
        for (i, a), (j, b) in combinations(enumerate(neuron.rules), 2):
            if intersects_from(a.guard, b.guard, max(a.consume, b.consume)):
                found.append(f"neuron {neuron.id}: rule {i} {a.label()} and rule {j} {b.label()}")
    return found


def build_pi_m(spec: TmSpec) -> UniversalSystem:
    problems = check_conventions(spec)
    if problems:
        raise ConventionViolation(problems)
    params = encode_params(spec)
    z, v = params.z, params.v
    digits = [encode_symbol(a) for a in range(1, spec.symbols + 1)]
    moves = _moves(spec)
    left = [m for m in moves if m.rule.move == "L"]
    right = [m for m in moves if m.rule.move == "R"]
    halting = [encode_state(spec, spec.halt) + d for d in digits]
    codes = [m.code for m in moves] + halting
    book = {n: _RuleBook() for n in range(1, 11)}

    # 1 and 2: tape halves; the side being shifted divides by z after a long delay
    for side, shifted, relayed in ((1, left, right), (2, right, left)):
        rules = book[side]
        for m in shifted:
            rules.add(f"{s(2 * z)}{star(z)}{s(m.code)}", z, 1, v + 6, f"divide by z [{m.label}]")
            rules.add(
                s(z + m.code), z + m.code, z + 1, v + 6,
                f"regrow blank boundary [{m.label}]; deviation: emits z+1, not z; "
                "z rebuilds the blank cell, 1 is the a1 digit the division would have sent",
            )
        for m in relayed:
            rules.add(f"{star(z)}{s(m.code)}", 1, 1, 1, f"relay tape and code [{m.label}]")
        if side == 2:
            for code in halting:
                rules.add(f"{star(z)}{s(code)}", 1, 1, 1, f"relay tape and halting code {code}")
        for m in shifted:
            rules.forget(s(m.code), 1, f"drop leftover code [{m.label}]")

    # 3: output
    for code in halting:
        book[3].add(f"{star(z)}{s(code)}", z, z, 1, f"emit right tape on halting code {code}")
    for m in left:
        book[3].forget(f"{star(z)}{s(m.code)}", 1, f"drop right tape copy [{m.label}]")
    for d in digits:
        book[3].forget(f"{star(z)}{s(d)}", 1, f"drop shifted right tape, read digit {d}")

    # 4 and 6: code holders on the X and Y side
    book[4].add(f"s^2{star(z)}", z, z, 2, "load X, closed while Y passes")
    book[4].forget("s^2", 2, "load marker")
    book[6].forget(f"s^2{star(z)}", 1, "load X copy")
    for n, rebuilt in ((4, "X"), (6, "Y")):
        rules = book[n]
        rules.add(star(z), 1, 1, 1, "relay multiple of z (loaded Y, shifted tape, written digit)")
        for code in codes:
            rules.add(s(code), 1, 1, 1, f"relay code {code}")
        for m in moves:
            rules.forget(f"{s(z)}{star(z)}{s(m.code)}", 1, f"drop tape copy [{m.label}]")
        rules.forget("s", 1, "timer pulse")
        for d in digits:
            rules.add(f"{s(z)}{star(z)}{s(d)}", z, z, 1, f"rebuild {rebuilt} without read digit {d}")
            rules.forget(s(d), 1, f"drop read digit {d}")

    # 5: input and distribution
    rules = book[5]
    rules.add(f"s^2{star(z)}", 1, 1, 1, "load X+2")
    rules.add(
        f"{s(z)}{star(z)}", 1, 1, 1,
        "load Y; deviation: one guard from z upward replaces s^2z(s^z)* plus a forgetting rule for s^z",
    )
    for code in codes:
        rules.add(f"{star(z)}{s(code)}", 1, 1, 1, f"relay code {code} with tape copy")
    for d in digits:
        rules.forget(f"{s(z)}{star(z)}{s(d)}", z, f"strip tape, keep read digit {d}")
        rules.add(s(d), 1, 1, 1, f"relay read digit {d}")

    # 7-9: multiply the shifted side by z
    doubling = " | ".join(
        f"{s(z)}{star(z)}{s(2**j * m.code)}" for j in range(v) for m in moves
    )
    multipliers = ",".join(str(2 ** (j + 1)) for j in range(v))
    for n in (7, 8, 9):
        rules = book[n]
        rules.forget(f"s^2{star(z)}", 1, "load X copy")
        rules.forget(star(z), 1, "drop multiple of z")
        for code in codes:
            rules.forget(s(code), 1, f"drop loaded code {code}")
        for d in digits:
            rules.forget(s(d), 1, f"drop read digit {d}")
        if moves:
            rules.add(
                doubling, 1, 1, 1,
                f"double; multipliers {multipliers} over codes {sorted({m.code for m in moves})}"
                " merged into one guard",
            )

    # 10: timer, shift and state update
    rules = book[10]
    timer = INITIAL_TIMER
    while timer > 1:
        rules.forget(s(timer), timer // 2 + 1, f"countdown {timer} -> {timer // 2}")
        timer //= 2
    rules.add("s", 1, 1, v + 3, "pulse neurons 4 and 6 before the shift")
    for m in moves:
        rules.add(f"{star(z * z)}{s(z * m.code)}", z * z, z * z, 1, f"send z*(shifted side) [{m.label}]")
    for m in moves:
        target = encode_state(spec, m.rule.next_state)
        rules.add(
            s(z * m.code), z * m.code - target - 1, z * encode_symbol(m.rule.write), 1,
            f"write digit, keep next state [{m.label}]",
        )
    for target in sorted({encode_state(spec, m.rule.next_state) for m in moves}):
        rules.add(s(target + 1), target, target, 4, f"send next state code {target}")

    neurons = tuple(
        Neuron(n, tuple(book[n].rules), INITIAL_TIMER if n == 10 else 0) for n in range(1, 11)
    )
    system = SnpSystem(
        name=f"{spec.name}-universal",
        neurons=neurons,
        synapses=SYNAPSES,
        input=INPUT_NEURON,
        output=OUTPUT_NEURON,
        mode=Mode.EXHAUSTIVE,
        output_convention=OutputConvention.EMISSION_EVENTS,
    )
    provenance = {
        (n, index): origins for n in range(1, 11) for index, origins in enumerate(book[n].origins)
    }
    overlaps = find_overlaps(system)
    for overlap in overlaps:
        logger.warning("guard_overlap", machine=spec.name, overlap=overlap)
    problems = validate(system)
    if problems:
        raise ConventionViolation(problems)
    logger.info("universal_built", machine=spec.name, z=z, rules=sum(len(n.rules) for n in neurons))
    return UniversalSystem(system, params, spec, provenance, overlaps)
