import pytest

from semantics.constructions import Bang, Lolli, concatenate_games
from semantics.games import (
    OE, PE, BooleanGame, LazyNatGame, Move, Position, TerminalGame, assert_legal, check_legal, enumerate_positions,
    hide_game, is_subgame, j_subsequence, o_view, p_view, parse_trace, render_trace, view_indices,
)
from semantics.tags import OuterTag, TagError, thread
from utils.errors import IllegalPosition

N = LazyNatGame()


def numeral_play(n):
    """qhat yes q yes ... no on the lazy naturals, every move pointing at the previous one."""
    s = Position.of((Move("qhat"), None))
    for _ in range(n):
        s = s.extend(Move("yes"), len(s) - 1).extend(Move("q"), len(s))
    return s.extend(Move("no"), len(s) - 1)


def test_base_labels():
    assert N.label(Move("qhat")) == OE
    assert N.label(Move("no")) == PE
    assert N.label(Move("qhat", "E")) is None
    assert BooleanGame().is_initial(Move("qhat"))
    assert TerminalGame().label(Move("qhat")) is None


def test_numeral_plays_are_legal():
    for n in range(5):
        assert N.accepts(numeral_play(n))


def test_lazy_naturals_reject_moves_after_no():
    s = numeral_play(0).extend(Move("q"), 1)
    verdict = N.accepts(s)
    assert not verdict
    assert verdict.index == 2


def test_alternation_and_justification_axioms():
    both_o = Position.of((Move("qhat"), None), (Move("q"), 0))
    assert "Alt" in check_legal(N, both_o).reason
    dangling = Position.of((Move("qhat"), None), (Move("yes"), None))
    assert "Jus" in check_legal(N, dangling).reason
    with pytest.raises(IllegalPosition):
        assert_legal(N, dangling)


def test_enumeration_counts_lazy_natural_positions():
    assert len(list(enumerate_positions(N, 4))) == 7
    assert all(N.accepts(s) for s in enumerate_positions(N, 6))


def test_boolean_game_has_three_nonempty_positions():
    assert sorted(len(s) for s in enumerate_positions(BooleanGame(), 4)) == [0, 1, 2, 2]


def test_views_of_an_implication_play():
    game = Lolli(Bang(N), N)
    arg = thread()
    s = Position.of(
        (Move("qhat", "E"), None),
        (Move("qhat", "W", arg), 0),
        (Move("yes", "W", arg), 1),
        (Move("q", "W", arg), 2),
        (Move("no", "W", arg), 3),
    )
    assert game.accepts(s)
    assert view_indices(s) == [4, 3, 2, 1, 0]
    assert p_view(s) == s
    assert len(o_view(s)) == 5


def test_p_view_skips_under_pointers():
    a, b, c, d, e = (Move(x) for x in "abcde")
    s = Position.of((a, None), (b, 0), (c, 1), (d, 2), (e, 1))
    assert view_indices(s) == [4, 1, 0]
    assert p_view(s) == Position.of((a, None), (b, 0), (e, 1))
    assert view_indices(s, 2) == [4, 1]


def test_j_subsequence_follows_justifier_chains():
    s = Position.of((Move("a"), None), (Move("b"), 0), (Move("c"), 1), (Move("d"), 2))
    assert j_subsequence(s, [0, 3]).pointers == (None, 0)


def test_trace_text_round_trip():
    s = Position.of((Move("qhat", "E"), None), (Move("qhat", "W", thread()), 0))
    text = render_trace(s)
    assert text.splitlines()[1] == "2: qhatW_{[0 ]0 h} @1"
    assert parse_trace(text) == s


def test_trace_text_rejects_misnumbered_lines():
    with pytest.raises(TagError):
        parse_trace("2: qhatE_{} @init")


def test_moves_parse_and_print():
    m = Move("yes", "WE", OuterTag.parse("[0 l ]0 h"))
    assert Move.parse(str(m)) == m
    assert Move.from_symbol(m.symbol, m.outer) == m


def test_every_game_is_its_own_subgame():
    assert is_subgame(N, N, 6)
    assert is_subgame(Lolli(Bang(N), N), Lolli(Bang(N), N), 4)


def dead_end_concatenation():
    """J: 2 -o T and K: T -o 2; J has no moves, so nothing can reach the left 2."""
    b, t = BooleanGame(), TerminalGame()
    return concatenate_games(Lolli(b, t), Lolli(t, b), b, t, b)


def test_hiding_needs_a_witness_in_the_underlying_game():
    concat = dead_end_concatenation()
    hidden = hide_game(concat)
    s = Position.of((Move("qhat", "E"), None), (Move("qhat", "W"), 0))
    assert concat.ambient.accepts(s)
    assert not concat.accepts(s)
    assert not hidden.accepts(s)
    assert hidden.accepts(s.prefix(1))
    assert hidden.witness(s.prefix(1)) == s.prefix(1)


def test_subgame_checks_are_not_reflexive_only():
    b = BooleanGame()
    hidden = hide_game(dead_end_concatenation())
    assert not is_subgame(Lolli(b, b), hidden, 4)
    assert is_subgame(hidden, Lolli(b, b), 4)
