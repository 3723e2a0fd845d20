import hypothesis.strategies as st
import pytest
from hypothesis import given

from semantics.constructions import (
    Bang, ConcatGame, CurryGame, Lolli, PairGame, Product, compose, concatenate_games, implication,
)
from semantics.games import OI, PE, LazyNatGame, Move, Position
from semantics.strategies import copy_cat, play
from semantics.tags import OuterTag, decode_tag, join_thread, thread
from utils.errors import StrategyError

N = LazyNatGame()


def in_thread(name, f, inner=""):
    return Move(name, inner, join_thread(OuterTag.parse(f), OuterTag(), "B"))


def input_one(game, s):
    """Opponent that asks the output and answers the input as the numeral 1."""
    if not len(s):
        return Move("qhat", "E"), None
    last = s.last
    if last.inner == "W":
        return Move("yes" if last.substance == "qhat" else "no", "W"), len(s) - 1
    if last.substance == "yes":
        return Move("q", "E"), len(s) - 1
    return None


def test_implication_moves_carry_threads():
    game = implication(N, N)
    assert game == Lolli(Bang(N), N)
    assert game.label(Move("qhat", "W", thread())) == PE
    assert game.label(Move("qhat", "W")) is None
    assert game.is_initial(Move("qhat", "E"))


def test_bang_rejects_threads_that_share_a_decoding():
    a, b = "l l l", "[0 l ]0"
    assert decode_tag(OuterTag.parse(a)) == decode_tag(OuterTag.parse(b))
    s = Position.of((in_thread("qhat", a), None), (in_thread("no", a), 0), (in_thread("qhat", b), None))
    verdict = Bang(N).accepts(s)
    assert not verdict
    assert "share a decoding" in verdict.reason


def test_bang_accepts_distinct_threads():
    s = Position.of((in_thread("qhat", ""), None), (in_thread("no", ""), 0), (in_thread("qhat", "l"), None))
    assert Bang(N).accepts(s)


def test_product_plays_stay_on_one_side():
    game = Product(N, N)
    assert game.accepts(Position.of((Move("qhat", "W"), None), (Move("no", "W"), 0)))
    s = Position.of((Move("qhat", "W"), None), (Move("no", "W"), 0), (Move("qhat", "E"), None))
    verdict = game.accepts(s)
    assert not verdict
    assert "both components" in verdict.reason


def test_concatenation_checks_the_middle_game():
    g = concatenate_games(Lolli(N, N), Lolli(N, N), N, N, N)
    assert g.ambient == Lolli(N, N)
    with pytest.raises(StrategyError, match="decomposition mismatch"):
        concatenate_games(Lolli(Bang(N), N), Lolli(Bang(N), N), Bang(N), N, N)


def test_concatenation_routes_inner_tags():
    g = ConcatGame(Lolli(N, N), Lolli(N, N), N, N, N)
    assert g.route("ES") == ("J", "E")
    assert g.route("W") == ("J", "W")
    assert g.route("WN") == ("K", "W")
    assert g.route("E") == ("K", "E")
    assert ConcatGame.lift_inner("J", "E") == "ES"
    assert ConcatGame.lift_inner("K", "W") == "WN"
    assert g.label(Move("qhat", "ES")) == OI
    assert g.dummy(Move("qhat", "ES")) == Move("qhat", "WN")


def test_pairing_routes_inner_tags():
    assert PairGame.route("WE") == [("L", "E")]
    assert PairGame.route("EE") == [("R", "E")]
    assert PairGame.route("W") == [("L", "W"), ("R", "W")]
    assert PairGame.route("ES") == [("L", "E")]
    assert PairGame.lift_inner("L", "E") == "WE"
    assert PairGame.lift_inner("R", "E") == "EE"
    assert PairGame.lift_inner("R", "W") == "W"


@given(
    st.text(alphabet="WENS", max_size=4),
    st.sampled_from(["E", "WW", "EW", "S", "N"]),
)
def test_uncurry_inverts_curry(prefix, suffix):
    inner = prefix + suffix
    assert CurryGame.uncurry_inner(CurryGame.curry_inner(inner)) == inner


def test_curry_moves_the_second_argument_out():
    assert CurryGame.curry_inner("WW") == "W"
    assert CurryGame.curry_inner("EW") == "WE"
    assert CurryGame.curry_inner("E") == "EE"


def test_composition_of_copy_cats_is_copy_cat():
    composed = compose(copy_cat(N), copy_cat(N), N, N, N)
    s = play(composed, input_one)
    assert s == play(copy_cat(N), input_one)
    assert [m.symbol for m in s.moves] == ["qhat_E", "qhat_W", "yes_W", "yes_E", "q_E", "q_W", "no_W", "no_E"]
