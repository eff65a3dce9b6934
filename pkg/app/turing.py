"""Single-tape Turing machines: direct simulator and the base-z configuration encoding.

Symbols are 1-based indices (1 is the blank), states are 1-based and the last state halts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import structlog

from app.errors import EncodingError, MissingTransition

logger = structlog.get_logger()

Direction = Literal["L", "R"]


@dataclass(frozen=True)
class Transition:
    write: int
    move: Direction
    next_state: int


@dataclass(frozen=True)
class TmSpec:
    name: str
    states: int
    symbols: int
    delta: dict[tuple[int, int], Transition] = field(default_factory=dict, hash=False)

    @property
    def halt(self) -> int:
        return self.states

    def transition(self, state: int, symbol: int) -> Transition:
        try:
            return self.delta[(state, symbol)]
        except KeyError:
            raise MissingTransition(f"{self.name}: no transition for (q{state}, a{symbol})") from None


@dataclass(frozen=True)
class TmConfig:
    """``left`` is a_{-x}..a_{-1} in tape order, ``right`` is a_1..a_y."""

    left: tuple[int, ...]
    head: int
    right: tuple[int, ...]
    state: int

    @property
    def tape(self) -> tuple[int, ...]:
        return self.left + (self.head,) + self.right

    @property
    def has_boundaries(self) -> bool:
        return bool(self.left) and bool(self.right) and self.left[0] == 1 and self.right[-1] == 1


def initial_config(cells: list[int] | tuple[int, ...], head: int = 0, state: int = 1) -> TmConfig:
    """Split a raw tape at ``head`` and pad both ends with a blank boundary cell."""
    if not cells:
        cells = (1,)
    if not 0 <= head < len(cells):
        raise ValueError(f"head {head} outside tape of length {len(cells)}")
    left = tuple(cells[:head])
    right = tuple(cells[head + 1 :])
    if not left or left[0] != 1:
        left = (1,) + left
    if not right or right[-1] != 1:
        right = right + (1,)
    return TmConfig(left, cells[head], right, state)


def render_config(config: TmConfig) -> str:
    cells = [f"a{s}" for s in config.left] + [f"[a{config.head}]"] + [f"a{s}" for s in config.right]
    return f"{' '.join(cells)}  q{config.state}"


def tm_step(spec: TmSpec, config: TmConfig) -> TmConfig:
    if config.state == spec.halt:
        raise MissingTransition(f"{spec.name}: q{spec.halt} is the halt state")
    rule = spec.transition(config.state, config.head)
    if rule.move == "L":
        left = config.left or (1,)
        head, left = left[-1], left[:-1] or (1,)
        return TmConfig(left, head, (rule.write,) + config.right, rule.next_state)
    right = config.right or (1,)
    head, right = right[0], right[1:] or (1,)
    return TmConfig(config.left + (rule.write,), head, right, rule.next_state)


def tm_run(spec: TmSpec, config: TmConfig, max_steps: int = 10_000) -> tuple[TmConfig, int]:
    steps = 0
    while config.state != spec.halt and steps < max_steps:
        config = tm_step(spec, config)
        steps += 1
    return config, steps


def check_conventions(spec: TmSpec) -> list[str]:
    """Problems that stop ``spec`` from being compiled into a universal system."""
    problems = []
    if spec.states < 1 or spec.symbols < 1:
        problems.append("machine needs at least one state and one symbol")
    for (state, symbol), rule in sorted(spec.delta.items()):
        where = f"delta(q{state}, a{symbol})"
        if state == spec.halt:
            problems.append(f"{where}: transition out of the halt state q{spec.halt}")
        if not 1 <= state <= spec.states or not 1 <= symbol <= spec.symbols:
            problems.append(f"{where}: state or symbol out of range")
        if not 1 <= rule.write <= spec.symbols:
            problems.append(f"{where}: writes unknown symbol a{rule.write}")
        if not 1 <= rule.next_state <= spec.states:
            problems.append(f"{where}: moves to unknown state q{rule.next_state}")
        if rule.move not in ("L", "R"):
            problems.append(f"{where}: direction must be L or R")
    return problems


# Encoding


@dataclass(frozen=True)
class EncodingParams:
    v: int
    z: int


@dataclass(frozen=True)
class EncodedConfig:
    X: int
    Y: int
    code: int


def encode_params(spec: TmSpec) -> EncodingParams:
    v = (2 * spec.states * spec.symbols + 2 * spec.symbols - 1).bit_length()
    return EncodingParams(v, 2**v)


def encode_symbol(symbol: int) -> int:
    return 2 * symbol - 1


def encode_state(spec: TmSpec, state: int) -> int:
    return 2 * state * spec.symbols


def split_code(spec: TmSpec, code: int) -> tuple[int, int]:
    """Inverse of ``encode_state(r) + encode_symbol(i)``."""
    width = 2 * spec.symbols
    state, rest = divmod(code, width)
    if rest % 2 == 0 or not 1 <= state <= spec.states:
        raise EncodingError(f"{code} is not a state/symbol code for {spec.name}")
    return state, (rest + 1) // 2


def encode_cells(cells: tuple[int, ...], z: int) -> int:
    """Σ z^i·code(cells[i-1]) with cells listed outward from the head."""
    value = 0
    for symbol in reversed(cells):
        value = (value + encode_symbol(symbol)) * z
    return value


def decode_cells(value: int, spec: TmSpec, z: int) -> tuple[int, ...]:
    if value % z:
        raise EncodingError(f"{value} has a nonzero constant digit")
    cells = []
    value //= z
    while value:
        value, digit = divmod(value, z)
        if digit % 2 == 0 or digit >= 2 * spec.symbols:
            raise EncodingError(f"digit {digit} is not a symbol code")
        cells.append((digit + 1) // 2)
    return tuple(cells)


def check_config(spec: TmSpec, config: TmConfig) -> None:
    """Raise ``EncodingError`` for symbols or states the machine does not have."""
    unknown = sorted({s for s in config.tape if not 1 <= s <= spec.symbols})
    if unknown:
        raise EncodingError(f"{spec.name}: tape symbols {unknown} outside a1..a{spec.symbols}")
    if not 1 <= config.state <= spec.states:
        raise EncodingError(f"{spec.name}: state q{config.state} outside q1..q{spec.states}")


def encode_config(spec: TmSpec, config: TmConfig, params: EncodingParams | None = None) -> EncodedConfig:
    check_config(spec, config)
    z = (params or encode_params(spec)).z
    return EncodedConfig(
        X=encode_cells(tuple(reversed(config.left)), z),
        Y=encode_cells(config.right, z),
        code=encode_state(spec, config.state) + encode_symbol(config.head),
    )


def decode_config(enc: EncodedConfig, spec: TmSpec, params: EncodingParams | None = None) -> TmConfig:
    z = (params or encode_params(spec)).z
    state, head = split_code(spec, enc.code)
    left = tuple(reversed(decode_cells(enc.X, spec, z)))
    return TmConfig(left, head, decode_cells(enc.Y, spec, z), state)


def apply_transition_encoded(
    enc: EncodedConfig, spec: TmSpec, params: EncodingParams | None = None
) -> EncodedConfig:
    """One transition carried out on the numbers, with blank regrowth at either boundary."""
    z = (params or encode_params(spec)).z
    state, symbol = split_code(spec, enc.code)
    if state == spec.halt:
        raise MissingTransition(f"{spec.name}: encoded configuration is halted")
    rule = spec.transition(state, symbol)
    written = z * encode_symbol(rule.write)
    if rule.move == "L":
        shifted = enc.X // z
        read = shifted % z
        X = shifted - read or z
        return EncodedConfig(X, z * enc.Y + written, encode_state(spec, rule.next_state) + read)
    shifted = enc.Y // z
    read = shifted % z
    Y = shifted - read or z
    return EncodedConfig(z * enc.X + written, Y, encode_state(spec, rule.next_state) + read)


def oracle_iterates(spec: TmSpec, enc: EncodedConfig, steps: int) -> list[EncodedConfig]:
    """``enc`` followed by up to ``steps`` encoded transitions (stops at the halt state)."""
    params = encode_params(spec)
    out = [enc]
    for _ in range(steps):
        if split_code(spec, out[-1].code)[0] == spec.halt:
            break
        out.append(apply_transition_encoded(out[-1], spec, params))
    return out
