"""Six-neuron system turning a digit-spaced input word into X spikes.

Digits of the left tape arrive v steps apart. Neurons 2-4 double whatever they hold every step,
so after v steps a digit is worth z times more when it reaches neuron 5, which holds each new
digit for v steps before adding it. The closing 2 marks the end of the word.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from app.snp.model import Mode, Neuron, OutputConvention, RuleSpec, SnpSystem
from app.turing import EncodingParams, TmSpec, encode_cells, encode_params, encode_symbol
from app.universal.builder import s, star

END_OF_WORD = 2

SYNAPSES = frozenset(
    {
        (1, 2), (1, 3), (1, 4), (1, 5),
        (2, 3), (2, 4), (2, 5),
        (3, 2), (3, 4),
        (4, 2), (4, 3), (4, 5),
        (5, 6),
    }
)


@dataclass
class InputEncoderSystem:
    system: SnpSystem
    params: EncodingParams


def build_pi_input(spec: TmSpec) -> InputEncoderSystem:
    params = encode_params(spec)
    z, v = params.z, params.v
    digits = [encode_symbol(a) for a in range(1, spec.symbols + 1)]
    relay = RuleSpec.of("(s)*", 1, 1, 1)

    hold = tuple(RuleSpec.of(f"{star(z)}{s(d)}", 1, 1, v) for d in digits)
    neuron5 = hold + (RuleSpec.of(f"{star(z)}s^2", 1, 1, 1),)
    drop = tuple(RuleSpec.of(f"{star(z)}{s(d)}", 1, 0, 0) for d in digits)
    neuron6 = drop + (RuleSpec.of(f"{star(z)}s^2", z, z, 1),)

    neurons = (
        Neuron(1, (relay,)),
        Neuron(2, (relay,)),
        Neuron(3, (relay,)),
        Neuron(4, (relay,)),
        Neuron(5, neuron5),
        Neuron(6, neuron6),
    )
    system = SnpSystem(
        name=f"{spec.name}-input",
        neurons=neurons,
        synapses=SYNAPSES,
        input=1,
        output=6,
        mode=Mode.EXHAUSTIVE,
        output_convention=OutputConvention.EMISSION_EVENTS,
    )
    return InputEncoderSystem(system, params)


def build_input_word(cells: Sequence[int], params: EncodingParams) -> dict[int, int]:
    """Spike schedule for cells a_{-x}..a_{-1} (tape order): one digit every v steps, then 2."""
    if not cells:
        raise ValueError("the left tape holds at least one cell")
    schedule = {1 + n * params.v: encode_symbol(cell) for n, cell in enumerate(cells)}
    schedule[1 + len(cells) * params.v] = END_OF_WORD
    return schedule


def expected_output(cells: Sequence[int], params: EncodingParams) -> tuple[int, int]:
    """(time, spikes) of the encoder's emission for ``cells``."""
    return len(cells) * params.v + 3, encode_cells(tuple(reversed(cells)), params.z)
