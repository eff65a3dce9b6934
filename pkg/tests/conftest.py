import pytest

from app.dsl import parse_snp
from app.turing import TmSpec, Transition

# two spikes in neuron 1 reach the output neuron one step apart
PAIR = """
system pair input=1 output=2
neuron 1 spikes=2 {
  rule "(s)*" / 1 -> 1 ; 1
}
neuron 2 {
  rule "s" / 1 -> 1 ; 1
}
synapses { (1,2) }
"""

RELAY = """
system relay input=1 output=2
neuron 1 spikes=1 {
  rule "s" / 1 -> 1 ; 1
}
neuron 2 {
  rule "s" / 1 -> 1 ; 1
}
synapses { (1,2) }
"""

# input spikes at t and t' leave the output neuron at t+1 and t'+1
ECHO = """
system echo input=1 output=2
neuron 1 {
  rule "s" / 1 -> 1 ; 1
}
neuron 2 {
  rule "s" / 1 -> 1 ; 1
}
synapses { (1,2) }
"""


DESK = """
tm desk states=2 symbols=2
delta q1 a1 -> a2 L q2
delta q1 a2 -> a2 L q2
"""

# neuron 2 may hold its spike one extra step; when it does, the next spike is lost or delayed
BRANCHING = """
system branching input=1 output=3
neuron 1 spikes=2 {
  rule "(s)*" / 1 -> 1 ; 1
}
neuron 2 {
  rule "s" / 1 -> 1 ; 1
  rule "s" / 1 -> 1 ; 2
}
neuron 3 {
  rule "s" / 1 -> 1 ; 1
}
synapses { (1,2) (2,3) }
"""

# both rules apply to one spike
CHOICES = """
system choices input=1 output=1
neuron 1 spikes=1 {
  rule "s" / 1 -> 1 ; 1
  rule "(s)*" / 1 -> 1 ; 1
}
"""


@pytest.fixture
def desk_tm() -> TmSpec:
    """|Q|=2, |A|=2, z=16: moves left once, writing a2, and halts."""
    return TmSpec(
        "desk",
        states=2,
        symbols=2,
        delta={(1, 1): Transition(2, "L", 2), (1, 2): Transition(2, "L", 2)},
    )


@pytest.fixture
def right_walker() -> TmSpec:
    """Never halts; writes a2 and moves right forever."""
    return TmSpec(
        "right-walker",
        states=2,
        symbols=2,
        delta={(1, 1): Transition(2, "R", 1), (1, 2): Transition(2, "R", 1)},
    )


@pytest.fixture
def walker_tm() -> TmSpec:
    """|Q|=4, z=32: runs right over a2s, back left to the boundary, halts in q4."""
    return TmSpec(
        "walker",
        states=4,
        symbols=2,
        delta={
            (1, 2): Transition(2, "R", 1),
            (1, 1): Transition(2, "L", 2),
            (2, 2): Transition(2, "L", 2),
            (2, 1): Transition(1, "R", 4),
        },
    )


@pytest.fixture
def pair_system():
    return parse_snp(PAIR)


@pytest.fixture
def relay_system():
    return parse_snp(RELAY)


@pytest.fixture
def echo_system():
    return parse_snp(ECHO)
