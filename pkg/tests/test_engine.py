import pytest
from hypothesis import given, settings, strategies as st

from app.dsl import parse_snp
from app.errors import InsufficientOutput, StrictPolicyViolation
from app.snp.engine import (
    HaltReason,
    Policy,
    RuleSelector,
    explore,
    output_value,
    run,
    select_rule,
)
from app.snp.model import Mode, Neuron, OutputConvention, RuleSpec, SnpSystem, validate
from app.universal.builder import build_pi_m
from tests.conftest import BRANCHING

CLOSED_TARGET = """
system closed input=1 output=3
neuron 1 spikes=1 {
  rule "s" / 1 -> 1 ; 1
}
neuron 2 spikes=1 {
  rule "s" / 1 -> 1 ; 3
}
neuron 3 {
  rule "s" / 1 -> 1 ; 1
}
synapses { (1,2) (1,3) (2,3) }
"""

SLOW_INPUT = """
system slow input=1 output=1
neuron 1 {
  rule "s" / 1 -> 1 ; 3
}
"""

EXHAUSTIVE = """
system bulk mode=exhaustive input=1 output=1 output_convention=events
neuron 1 spikes=7 {
  rule "(s^2)*s" / 2 -> 1 ; 1
}
"""

FORGET = """
system forget input=1 output=1
neuron 1 spikes=2 {
  rule "s^2" / 2 -> 0 ; 0
  rule "s" / 1 -> 1 ; 1
}
"""

TWO_CHOICES = """
system choices input=1 output=1
neuron 1 spikes=1 {
  rule "s" / 1 -> 1 ; 1
  rule "(s)*" / 1 -> 1 ; 1
}
"""


def test_pair_output_gap(pair_system):
    trace = run(pair_system)
    assert trace.output_events == [(2, 1), (3, 1)]
    assert output_value(trace, OutputConvention.SPIKE_GAP) == 1
    assert trace.halt_reason is HaltReason.QUIESCENT
    assert trace.final.contents == (0, 0)


def test_single_firing_has_no_gap(relay_system):
    trace = run(relay_system)
    assert trace.output_events == [(2, 1)]
    with pytest.raises(InsufficientOutput):
        output_value(trace, OutputConvention.SPIKE_GAP)


def test_input_schedule_reaches_output(echo_system):
    trace = run(echo_system, schedule={1: 1, 4: 1})
    assert [t for t, _ in trace.output_events] == [2, 5]
    assert output_value(trace, OutputConvention.SPIKE_GAP) == 3


def test_snapshots_are_taken_after_delivery(echo_system):
    trace = run(echo_system, schedule={1: 1}, snapshots=True)
    assert trace.snapshot(1) == (1, 0)
    assert trace.snapshot(2) == (0, 1)


def test_spikes_to_closed_neuron_are_lost():
    trace = run(parse_snp(CLOSED_TARGET))
    assert trace.steps[0].lost == 1
    assert [t for t, _ in trace.output_events] == [2, 4]
    assert output_value(trace, OutputConvention.SPIKE_GAP) == 2


def test_environment_input_to_closed_neuron_is_lost():
    trace = run(parse_snp(SLOW_INPUT), schedule={1: 1, 2: 1})
    assert trace.steps[1].lost == 1
    assert trace.output_events == [(3, 1)]


def test_exhaustive_rule_consumes_whole_groups():
    system = parse_snp(EXHAUSTIVE)
    trace = run(system, snapshots=True)
    assert trace.steps[0].selections == [(1, 0, 3)]
    assert trace.output_events == [(1, 3)]
    assert trace.final.contents == (1,)
    assert output_value(trace, OutputConvention.EMISSION_EVENTS) == 3


def test_standard_forgetting_needs_exact_count():
    trace = run(parse_snp(FORGET))
    assert trace.steps[0].selections == [(1, 0, 1)]
    assert trace.output_events == []
    assert trace.final.contents == (0,)


def test_first_policy_takes_lowest_index():
    trace = run(parse_snp(TWO_CHOICES), selector=RuleSelector(Policy.FIRST))
    assert trace.steps[0].selections == [(1, 0, 1)]


def test_strict_policy_stops_on_choice():
    trace = run(parse_snp(TWO_CHOICES), selector=RuleSelector(Policy.STRICT))
    assert trace.halt_reason is HaltReason.STRICT_VIOLATION
    assert isinstance(trace.violation, StrictPolicyViolation)
    assert (trace.violation.neuron, trace.violation.time) == (1, 1)
    assert trace.violation.candidates == [0, 1]


def test_seeded_policy_is_reproducible():
    system = parse_snp(BRANCHING)
    first = run(system, selector=RuleSelector(Policy.SEEDED, seed=7), snapshots=True)
    again = run(system, selector=RuleSelector(Policy.SEEDED, seed=7), snapshots=True)
    assert [r.selections for r in first.steps] == [r.selections for r in again.steps]
    assert first.output_events == again.output_events


def test_select_rule_policies():
    assert select_rule(Policy.FIRST, [3, 1, 2]) == 1
    assert select_rule(Policy.STRICT, [2]) == 2
    with pytest.raises(StrictPolicyViolation):
        select_rule(Policy.STRICT, [0, 1])
    with pytest.raises(ValueError):
        select_rule(Policy.FIRST, [])


def test_max_steps_guard(echo_system):
    trace = run(echo_system, schedule={50: 1}, max_steps=10)
    assert trace.halt_reason is HaltReason.MAX_STEPS
    assert len(trace.steps) == 10


def test_stop_on_output():
    trace = run(parse_snp(BRANCHING), stop_on_output=True)
    assert trace.halt_reason is HaltReason.OUTPUT
    assert trace.output_events == [(3, 1)]


def test_sink_sees_every_step(pair_system):
    seen = []
    trace = run(pair_system, sink=seen.append)
    assert [r.t for r in seen] == [r.t for r in trace.steps] == [1, 2, 3]


def test_explore_deterministic_system(pair_system):
    result = explore(pair_system, steps=5)
    assert result.levels[1] == {(2, 0)}
    assert result.levels[2] == {(1, 1)}
    assert result.levels[3] == {(0, 1)}
    assert result.gap_outputs == {1}


def test_explore_collects_every_gap():
    result = explore(parse_snp(BRANCHING), steps=8)
    assert result.gap_outputs == {1, 2}
    assert run(parse_snp(BRANCHING)).output_events == [(3, 1), (4, 1)]


def test_space_counts_pending_spikes(pair_system):
    trace = run(pair_system)
    assert trace.space_used == 2


GUARDS = ["s", "s^2", "(s)*", "s(s)*", "(s^2)*s", "s^2(s)*", "(s^2)*"]
PAIRS = [(i, j) for i in range(1, 4) for j in range(1, 4) if i != j]


@st.composite
def small_systems(draw):
    neurons = []
    for nid in range(1, 4):
        rules = tuple(
            RuleSpec.of(draw(st.sampled_from(GUARDS)), draw(st.integers(1, 2)), 1, draw(st.integers(1, 3)))
            for _ in range(draw(st.integers(1, 2)))
        )
        neurons.append(Neuron(nid, rules, draw(st.integers(0, 10))))
    synapses = frozenset(draw(st.lists(st.sampled_from(PAIRS), min_size=1, unique=True)))
    return SnpSystem("random", tuple(neurons), synapses, input=1, output=3)


@settings(max_examples=30, deadline=None)
@given(small_systems(), st.integers(0, 1_000), st.integers(1, 20))
def test_seeded_runs_stay_inside_exploration(system, seed, steps):
    levels = explore(system, steps=steps).levels
    trace = run(system, selector=RuleSelector(Policy.SEEDED, seed=seed), max_steps=steps, snapshots=True)
    for record in trace.steps:
        assert record.contents in levels[record.t]


# Validation


def test_well_formed_system_has_no_problems(pair_system):
    assert validate(pair_system) == []


def test_forgetting_count_inside_spiking_guard():
    neuron = Neuron(1, (RuleSpec.of("(s)*", 1, 1, 1), RuleSpec.forgetting(2)))
    problems = validate(SnpSystem("clash", (neuron,), frozenset(), input=1, output=1))
    assert problems == ["neuron 1: forgetting s^2 lies in L((s)*)"]


def test_reflexive_synapse():
    neurons = (Neuron(1, (RuleSpec.of("s", 1, 1, 1),)), Neuron(2, (RuleSpec.of("s", 1, 1, 1),)))
    system = SnpSystem("loop", neurons, frozenset({(1, 2), (2, 2)}), input=1, output=2)
    assert validate(system) == ["synapse (2,2) is reflexive"]


def test_rule_shape_problems():
    rules = (
        RuleSpec.of("s^2", 2, 2, 1),
        RuleSpec.of("s", 1, 1, 0),
        RuleSpec("s^3", 3, 0, 1, RuleSpec.forgetting(3).guard),
    )
    system = SnpSystem("shapes", (Neuron(1, rules),), frozenset(), input=1, output=4)
    problems = validate(system)
    assert "output neuron 4 does not exist" in problems
    assert "neuron 1 rule 0: standard rules emit a single spike" in problems
    assert "neuron 1 rule 1: spiking rule must have delay >= 1" in problems
    assert "neuron 1 rule 2: forgetting rule must have delay 0" in problems


def test_extended_rules_cannot_emit_more_than_they_consume():
    neuron = Neuron(1, (RuleSpec.of("s^2", 2, 3, 1),))
    system = SnpSystem("ext", (neuron,), frozenset(), input=1, output=1, mode=Mode.EXTENDED)
    assert validate(system) == ["neuron 1 rule 0: extended rules need consume >= emit"]


def test_generated_universal_systems_validate(desk_tm, walker_tm, right_walker):
    for spec in (desk_tm, walker_tm, right_walker):
        assert validate(build_pi_m(spec).system) == []
