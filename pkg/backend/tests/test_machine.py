import time
from functools import lru_cache

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from app.suites import ADD, MACHINE_CORPUS, corpus_descriptions, random_position, run_suite
from app.workbench import evaluate_source
from machine.compiler import compile_machine
from machine.jpa import JpaMachine, Motion, StackResult, Transition, decode_stack, dump_stack, execute
from machine.judge import (
    JStack, NumeralReader, RandomLegal, Scripted, argument_inners, count_answers, evaluate_numeral, interact,
    jsa_standalone_run,
)
from machine.tape import DOLLAR, START, decode_tape, encode_position, parse_tape, serialize_tape
from pcf.atomic import SuccRule
from pcf.denote import atomic_node, denote, denote_source, game_of, materialize
from pcf.syntax import parse_program
from semantics.constructions import Bang, Lolli
from semantics.games import OI, LazyNatGame, Move, Position, hide_game, view_indices
from semantics.strategies import Selector
from semantics.tags import thread
from setup.init import DEFAULT_SEED
from utils.errors import Diverged, IllegalPosition, MachineError, Unsupported

N = LazyNatGame()
ARG = thread()

# qhat_E, qhat_W@0, no_W@1 on !N -o N
PLAY = Position.of(
    (Move("qhat", "E"), None),
    (Move("qhat", "W", ARG), 0),
    (Move("no", "W", ARG), 1),
)


class Walker(JpaMachine):
    """Walks left until |-, then answers yes."""

    start = "walk"

    def transition(self, state, symbol, edge):
        if symbol == START:
            return Transition("done", ("i", "yes_E", DOLLAR), Motion.HALT)
        return Transition("walk")


class MotionScript(JpaMachine):
    """Runs a fixed list of motions, pushing nothing."""

    start = 0

    def __init__(self, motions):
        self.motions = motions

    def transition(self, state, symbol, edge):
        return Transition(state + 1, (), self.motions[state])


def machine_of(source):
    d = denote(parse_program(source))
    return compile_machine(d), game_of(d)


def test_tape_layout_and_text():
    tape = encode_position(PLAY.prefix(2))
    assert tape.cells == [START, "qhat_E", DOLLAR, "h", "]0", "[0", "qhat_W", DOLLAR]
    assert tape.dollars == [2, 7]
    assert serialize_tape(tape) == "TAPE\n|- qhat_E $ h ]0 [0 qhat_W $\nEDGES 7>2"
    assert decode_tape(parse_tape(serialize_tape(tape))) == PLAY.prefix(2)


def test_tapes_are_checked_against_the_game():
    assert decode_tape(encode_position(PLAY, Lolli(Bang(N), N))) == PLAY
    with pytest.raises(IllegalPosition):
        encode_position(Position.of((Move("no", "E"), None)), Lolli(Bang(N), N))


@pytest.mark.parametrize(
    "text",
    [
        "TAPE\n|- qhat_E\nEDGES",
        "TAPE\n|- qhat_E $\nEDGES 2>5",
        "TAPE\n|- $\nEDGES",
        "TAPE\nqhat_E $\nEDGES",
        "|- qhat_E $",
    ],
)
def test_malformed_tape_text(text):
    with pytest.raises(MachineError):
        parse_tape(text)


def test_stack_decoding():
    result = decode_stack([START, "iii", "q_W", "[0", "]0", "h", DOLLAR])
    assert result.selector is Selector.THIRD_LAST
    assert result.move == Move("q", "W", ARG)
    assert decode_stack([START, "ii", "yes_E", DOLLAR]).move == Move("yes", "E")
    assert decode_stack([START]) is None
    assert dump_stack([START, "i", "no_E", DOLLAR]) == "STACK\n|- i no_E $"


@pytest.mark.parametrize(
    "stack",
    [["i", "no_E", DOLLAR], [START, "vi", "no_E", DOLLAR], [START, "i", "no_E"], [START, "i", "no_E", "x", DOLLAR]],
)
def test_malformed_stacks(stack):
    with pytest.raises(MachineError):
        decode_stack(stack)


def test_leaving_an_o_block_follows_its_pointer():
    r = execute(Walker(), encode_position(PLAY), keep=True)
    assert r.visited == [12, 7, 2]
    assert r.configs[-1].head == 0
    assert r.result.move == Move("yes", "E")
    assert r.stack == (START, "i", "yes_E", DOLLAR)


def test_head_discipline_is_enforced():
    tape = encode_position(PLAY)
    with pytest.raises(MachineError, match="second rewind"):
        execute(MotionScript([Motion.REWIND, Motion.REWIND]), tape)
    with pytest.raises(MachineError, match="no edge"):
        execute(MotionScript([Motion.LEFT, Motion.JUMP]), tape)
    assert execute(MotionScript([Motion.JUMP, Motion.HALT]), tape).result is None


def test_the_head_only_moves_right_on_the_rewind():
    m, game = machine_of(f"({ADD}) (succ zero) (succ zero)")
    s = interact(m, game, NumeralReader()).position
    runs = 0
    for n in range(1, len(s) + 1, 2):
        tape = encode_position(s.prefix(n))
        r = execute(m, tape, keep=True)
        for before, after in zip(r.configs, r.configs[1:]):
            if after.head > before.head:
                assert after.rewound and not before.rewound
                assert after.head == tape.dollars[-1]
            assert after.stack[:len(before.stack)] == before.stack
        runs += 1
    assert runs > 10


def test_machines_that_never_halt_diverge():
    tape = encode_position(PLAY)
    with pytest.raises(Diverged):
        execute(MotionScript([Motion.REWIND] + [Motion.LEFT] * 5), tape, budget=3)


def test_compiled_numeral_plays_like_the_numeral():
    m, game = machine_of("succ (succ zero)")
    trace = interact(m, game, NumeralReader())
    assert [x.symbol for x in trace.external.moves] == ["qhat_E", "yes_E", "q_E", "yes_E", "q_E", "no_E"]
    assert trace.external.pointers == (None, 0, 1, 2, 3, 4)
    assert count_answers(trace.external) == 2
    assert len(trace.position) > len(trace.external)


def test_scripted_opponent_stops_early():
    m, game = machine_of("succ (succ zero)")
    trace = interact(m, game, Scripted([(Move("qhat", "E"), None)]))
    assert [x.symbol for x in trace.external.moves] == ["qhat_E", "yes_E"]
    with pytest.raises(MachineError):
        count_answers(trace.external)


def test_random_opponents_stay_legal():
    m, game = machine_of("fun x: nat. succ x")
    for seed in range(3):
        trace = interact(m, game, RandomLegal(seed, limit=8), budget=200)
        assert hide_game(game).accepts(trace.external)


def test_fixed_point_of_identity_diverges():
    m, game = machine_of("fix f. f")
    with pytest.raises(Diverged):
        interact(m, game, NumeralReader(), budget=50)


def test_argument_inners_of_first_order_functions():
    d, _ = denote_source(ADD)
    assert argument_inners(d.domain, d.codomain) == (["WE", "WEE"], "EEE")
    d, _ = denote_source("fun f: nat -> nat. f zero")
    with pytest.raises(Unsupported):
        argument_inners(d.domain, d.codomain)


@pytest.mark.parametrize(
    "source, inputs, expected",
    [
        ("fun x: nat. pred x", [3], 2),
        ("fun x: nat. pred x", [0], 0),
        ("fun x: nat. x", [4], 4),
        (ADD, [2, 3], 5),
        ("fun x: nat. fun y: nat. case y x (ifz x)", [0, 2], 2),
    ],
)
def test_standalone_runs(source, inputs, expected):
    d, _ = denote_source(source)
    assert jsa_standalone_run(d, inputs) == expected


def test_standalone_runs_check_their_inputs():
    d, _ = denote_source(ADD)
    with pytest.raises(MachineError):
        jsa_standalone_run(d, [1])
    with pytest.raises(MachineError):
        jsa_standalone_run(d, [1, -1])


def test_stack_reads_its_blocks_back_through_its_edges():
    stack = JStack()
    for move, j in zip(PLAY.moves, PLAY.pointers):
        stack.push(move, j)
    assert stack.cells == encode_position(PLAY).cells
    assert [stack[b] for b in range(len(stack))] == list(PLAY.moves)
    assert [stack.pointers[b] for b in range(len(stack))] == list(PLAY.pointers)
    assert stack.view() == [2, 1, 0]
    assert execute(Walker(), stack).result.move == Move("yes", "E")


def _numeral_source(n):
    return "succ (" * n + "zero" + ")" * n


@pytest.mark.parametrize(
    "source, inputs",
    [
        ("fun x: nat. pred x", [0]),
        ("fun x: nat. pred x", [5]),
        ("fun x: nat. x", [0]),
        ("fun x: nat. x", [5]),
        (ADD, [0, 4]),
        (ADD, [3, 2]),
        (ADD, [5, 1]),
    ],
)
def test_standalone_runs_agree_with_the_judge(source, inputs):
    d, _ = denote_source(source)
    applied = f"({source}) " + " ".join(f"({_numeral_source(n)})" for n in inputs)
    assert jsa_standalone_run(d, inputs) == evaluate_numeral(parse_program(applied))


def test_states_and_transitions_are_deterministic():
    d, _ = denote_source("(fun x: nat. succ x) zero")
    first, second = compile_machine(d), compile_machine(d)
    assert first.states() == second.states()
    assert first.transitions() == second.transitions()
    assert first.transitions()


def test_machine_suite_agrees_with_the_strategies():
    report = run_suite("machine", depth=8, seeds=2, seed=1)
    assert report.ok, report.failures


def test_machine_suite_at_full_depth():
    report = run_suite("machine", depth=24, seeds=100, seed=DEFAULT_SEED)
    assert report.ok, report.failures


def test_successor_replay_row_by_row():
    d = atomic_node("succ", SuccRule())
    script = [(Move("qhat", "E"), None), (Move("no", "W", ARG), 1), (Move("q", "E"), 3)]
    rows = []

    def observe(play, tape, r):
        allowed = {tape.dollars[i] for i in view_indices(play)}
        assert set(r.visited) <= allowed
        rows.append((serialize_tape(tape), r.stack, r.result))

    trace = interact(compile_machine(d), game_of(d), Scripted(script), observer=observe)
    assert rows[0] == (
        "TAPE\n|- qhat_E $\nEDGES",
        (START, "i", "qhat_W", "[0", "]0", "h", DOLLAR),
        StackResult(Selector.LAST, Move("qhat", "W", ARG)),
    )
    assert rows[1][0] == "TAPE\n|- qhat_E $ h ]0 [0 qhat_W $ h ]0 [0 no_W $\nEDGES 7>2 12>7"
    assert rows[1][2] == StackResult(Selector.JUSTIFIER_OF_SECOND_LAST, Move("yes", "E"))
    assert rows[2][0] == (
        "TAPE\n|- qhat_E $ h ]0 [0 qhat_W $ h ]0 [0 no_W $ yes_E $ q_E $\nEDGES 7>2 12>7 14>2 16>14"
    )
    assert rows[2][2] == StackResult(Selector.LAST, Move("no", "E"))
    assert trace.position.pointers == (None, 0, 1, 0, 3, 4)
    assert count_answers(trace.external) == 1


@lru_cache(maxsize=None)
def corpus_games():
    return tuple(materialize(d).game for d in corpus_descriptions())


@settings(max_examples=200, deadline=None)
@given(index=st.integers(0, len(MACHINE_CORPUS) - 1), length=st.integers(1, 16), rng=st.randoms(use_true_random=False))
def test_tapes_of_random_plays_read_back(index, length, rng):
    game = corpus_games()[index]
    s = random_position(game, rng, length)
    tape = encode_position(s, game)
    assert decode_tape(tape) == s
    assert decode_tape(parse_tape(serialize_tape(tape))) == s


@pytest.mark.parametrize(
    "source, expected",
    [
        ("(fix f: nat -> nat. fun x: nat. case zero (f (pred x)) (ifz x)) (succ zero)", 0),
        (f"({ADD}) (succ zero) (succ zero)", 2),
    ],
)
def test_dummies_inside_nested_composites_point_into_their_own_component(source, expected):
    m, game = machine_of(source)
    trace = interact(m, game, NumeralReader())
    assert count_answers(trace.external) == expected
    s = trace.position
    crossings = 0
    for i, move in enumerate(s.moves):
        if game.label(move) != OI:
            continue
        path, component, local = game.home(move)
        if not component.is_initial(local):
            crossings += 1
            assert game.descend(s[s.pointers[i]], path) is not None
    assert crossings


def test_machine_steps_are_shared_by_the_whole_play():
    m, game = machine_of("fix f. f")
    used = []
    with pytest.raises(Diverged):
        interact(m, game, NumeralReader(), observer=lambda play, tape, r: used.append(r.steps), machine_steps=5000)
    assert used
    assert sum(used) <= 5000


def test_eval_of_a_divergent_program_stops_at_the_step_budget():
    started = time.monotonic()
    with pytest.raises(Diverged):
        evaluate_source("fix f. f", max_steps=20_000)
    assert time.monotonic() - started < 60
