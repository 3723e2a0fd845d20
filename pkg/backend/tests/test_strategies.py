import pytest

from pcf.atomic import CaseRule, PredRule, SuccRule
from pcf.denote import denote, materialize
from pcf.syntax import parse_program
from semantics.games import LazyNatGame, Move, Position
from semantics.strategies import (
    Selector, ViewRuleStrategy, ViewWindow, boolean, check_strategy, copy_cat, dereliction, hide_strategy, numeral,
    play, resolve_selector, top, window_of,
)
from semantics.tags import EMPTY, thread
from utils.errors import StrategyError

N = LazyNatGame()


def reader(game, s):
    if not len(s):
        return Move("qhat", "E"), None
    if s.last.substance == "yes":
        return Move("q", "E"), len(s) - 1
    return None


def chain(n):
    return Position.of(*((Move(chr(ord("a") + i)), None if i == 0 else i - 1) for i in range(n)))


def test_selectors_on_a_chain():
    s = chain(5)
    assert resolve_selector(s, Selector.LAST) == 4
    assert resolve_selector(s, Selector.JUSTIFIER_OF_SECOND_LAST) == 2
    assert resolve_selector(s, Selector.THIRD_LAST) == 2
    assert resolve_selector(s, Selector.FIFTH_LAST) == 0


def test_selector_past_the_view_is_an_error():
    with pytest.raises(StrategyError):
        resolve_selector(chain(1), Selector.THIRD_LAST)
    with pytest.raises(StrategyError):
        resolve_selector(chain(3), Selector.EXPLICIT)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_numerals_answer_n_times(n):
    s = play(numeral(n), reader)
    assert [m.substance for m in s.moves[1::2]] == ["yes"] * n + ["no"]
    assert numeral(n).game.accepts(s)


def test_explicit_strategies_stay_in_their_games():
    assert check_strategy(numeral(2), 8)
    assert check_strategy(boolean(True), 4)
    assert check_strategy(top(), 4)
    assert play(boolean(False), reader).last == Move("ff", "E")


def test_copy_cat_and_dereliction():
    opening = Position.of((Move("qhat", "E"), None))
    reply = copy_cat(N).respond(opening)
    assert (reply.move, reply.justifier, reply.selector) == (Move("qhat", "W"), 0, Selector.LAST)
    reply = dereliction(N).respond(opening)
    assert reply.move == Move("qhat", "W", thread())
    assert check_strategy(copy_cat(N), 6)
    assert check_strategy(dereliction(N), 6)


def test_view_rule_strategy_for_successor():
    succ = ViewRuleStrategy(SuccRule(), SuccRule().game)
    s = Position.of((Move("qhat", "E"), None))
    first = succ.respond(s)
    assert first.move == Move("qhat", "W", thread())
    s = s.extend(first.move, first.justifier).extend(Move("no", "W", thread()), 1)
    window = window_of(s, [2, 1, 0], succ.game)
    assert window == ViewWindow(("no_W", "qhat_W", "qhat_E"), tuple(thread().tokens[:2]))
    second = succ.respond(s)
    assert (second.move, second.justifier, second.selector) == (Move("yes", "E", EMPTY), 0, Selector.JUSTIFIER_OF_SECOND_LAST)
    assert check_strategy(succ, 8)


def test_hiding_a_composite_gives_the_numeral():
    sigma = materialize(denote(parse_program("succ zero")))
    assert not sigma.game.normalized
    hidden = hide_strategy(sigma)
    assert play(hidden, reader) == play(numeral(1), reader)


def test_hidden_strategy_stays_in_the_hidden_game():
    sigma = materialize(denote(parse_program("pred (succ (succ zero))")))
    assert check_strategy(hide_strategy(sigma), 8)


def test_pred_answers_the_opening_question_after_the_swallowed_yes():
    pred = ViewRuleStrategy(PredRule(), PredRule().game)
    s = Position.of((Move("qhat", "E"), None))
    ask = pred.respond(s)
    s = s.extend(ask.move, ask.justifier).extend(Move("yes", "W", ask.move.outer), 1)
    again = pred.respond(s)
    assert again.move.symbol == "q_W"
    s = s.extend(again.move, again.justifier).extend(Move("yes", "W", ask.move.outer), 3)
    answer = pred.respond(s)
    assert (answer.move, answer.justifier, answer.selector) == (Move("yes", "E"), 0, Selector.FIFTH_LAST)


@pytest.mark.parametrize(
    "symbols, selector",
    [
        (("yes_WWW", "qhat_WWW", "tt_EW"), Selector.JUSTIFIER_OF_SECOND_LAST),
        (("no_EWW", "qhat_EWW", "ff_EW"), Selector.JUSTIFIER_OF_SECOND_LAST),
        (("yes_WWW", "q_WWW", "q_E"), Selector.THIRD_LAST),
    ],
)
def test_case_answers_point_back_to_the_question_they_answer(symbols, selector):
    decision = CaseRule(N).decide(ViewWindow(symbols))
    assert decision.selector is selector
    assert decision.symbol == f"{symbols[0].rpartition('_')[0]}_E"
