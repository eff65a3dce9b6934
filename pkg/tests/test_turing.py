import pytest
from hypothesis import given, settings, strategies as st

from app.errors import EncodingError, MissingTransition
from app.turing import (
    EncodedConfig,
    TmConfig,
    TmSpec,
    Transition,
    apply_transition_encoded,
    check_conventions,
    decode_cells,
    decode_config,
    encode_config,
    encode_params,
    encode_state,
    initial_config,
    oracle_iterates,
    render_config,
    split_code,
    tm_run,
    tm_step,
)


def test_radix_for_small_machines(desk_tm, walker_tm):
    assert (encode_params(desk_tm).v, encode_params(desk_tm).z) == (4, 16)
    assert (encode_params(walker_tm).v, encode_params(walker_tm).z) == (5, 32)


def test_radix_is_exact_at_powers_of_two():
    assert encode_params(TmSpec("m", 3, 2)).v == 4
    assert encode_params(TmSpec("m", 7, 2)).v == 5
    assert encode_params(TmSpec("m", 2**20 - 1, 2)).v == 22
    assert encode_params(TmSpec("m", 2**20, 2)).v == 23


def test_initial_config_pads_boundaries():
    config = initial_config([2, 2], head=0, state=1)
    assert config == TmConfig(left=(1,), head=2, right=(2, 1), state=1)
    assert config.has_boundaries


def test_initial_config_rejects_head_outside_tape():
    with pytest.raises(ValueError):
        initial_config([1, 2], head=2)


def test_render_config():
    assert render_config(initial_config([1, 2], head=1)) == "a1 [a2] a1  q1"


def test_encode_blank_tape(desk_tm):
    assert encode_config(desk_tm, initial_config([1])) == EncodedConfig(X=16, Y=16, code=5)
    assert encode_state(desk_tm, 2) == 8


def test_left_move_on_numbers(desk_tm):
    after = apply_transition_encoded(EncodedConfig(16, 16, 5), desk_tm)
    assert after == EncodedConfig(X=16, Y=304, code=9)
    assert split_code(desk_tm, after.code) == (2, 1)
    assert decode_cells(after.Y, desk_tm, 16) == (2, 1)


def test_right_move_regrows_boundary(right_walker):
    after = apply_transition_encoded(EncodedConfig(16, 16, 5), right_walker)
    assert after == EncodedConfig(X=304, Y=16, code=5)


def test_encoded_halt_is_final(desk_tm):
    with pytest.raises(MissingTransition):
        apply_transition_encoded(EncodedConfig(16, 304, 9), desk_tm)
    assert len(oracle_iterates(desk_tm, EncodedConfig(16, 16, 5), 5)) == 2


def test_encode_rejects_foreign_symbols_and_states(desk_tm):
    with pytest.raises(EncodingError):
        encode_config(desk_tm, initial_config([3]))
    with pytest.raises(EncodingError):
        encode_config(desk_tm, initial_config([1, 0, 2]))
    with pytest.raises(EncodingError):
        encode_config(desk_tm, initial_config([1], state=3))


@pytest.mark.parametrize("code", [6, 17, 3])
def test_split_code_rejects_non_codes(desk_tm, code):
    with pytest.raises(EncodingError):
        split_code(desk_tm, code)


def test_decode_rejects_bad_digits(desk_tm):
    with pytest.raises(EncodingError):
        decode_cells(17, desk_tm, 16)
    with pytest.raises(EncodingError):
        decode_cells(16 * 4, desk_tm, 16)


def test_direct_runs(desk_tm, walker_tm):
    final, steps = tm_run(desk_tm, initial_config([1]))
    assert (steps, final.right, final.state) == (1, (2, 1), 2)
    final, steps = tm_run(walker_tm, initial_config([2, 2], 0, 1))
    assert steps == 6
    assert final == TmConfig(left=(1, 1), head=2, right=(2, 2, 1), state=4)


def test_halt_state_has_no_step(desk_tm):
    with pytest.raises(MissingTransition):
        tm_step(desk_tm, TmConfig((1,), 1, (1,), 2))


def test_conventions():
    bad = TmSpec("bad", 2, 2, {(2, 1): Transition(1, "L", 1), (1, 1): Transition(3, "R", 1)})
    problems = check_conventions(bad)
    assert any("halt state" in p for p in problems)
    assert any("unknown symbol" in p for p in problems)


@st.composite
def machines_and_configs(draw):
    states = draw(st.integers(2, 4))
    symbols = draw(st.integers(1, 3))
    delta = {
        (q, a): Transition(
            draw(st.integers(1, symbols)), draw(st.sampled_from(["L", "R"])), draw(st.integers(1, states))
        )
        for q in range(1, states)
        for a in range(1, symbols + 1)
    }
    spec = TmSpec("random", states, symbols, delta)
    cells = draw(st.lists(st.integers(1, symbols), min_size=1, max_size=8))
    head = draw(st.integers(0, len(cells) - 1))
    state = draw(st.integers(1, states - 1))
    return spec, initial_config(cells, head, state)


@settings(max_examples=250, deadline=None)
@given(machines_and_configs())
def test_encoding_commutes_with_stepping(case):
    spec, config = case
    enc = encode_config(spec, config)
    assert decode_config(enc, spec) == config
    assert decode_config(apply_transition_encoded(enc, spec), spec) == tm_step(spec, config)


@settings(max_examples=50, deadline=None)
@given(machines_and_configs(), st.integers(1, 12))
def test_oracle_tracks_direct_run(case, steps):
    spec, config = case
    iterates = oracle_iterates(spec, encode_config(spec, config), steps)
    for enc in iterates:
        assert decode_config(enc, spec) == config
        if config.state == spec.halt:
            break
        config = tm_step(spec, config)
