"""Strategies as next-move functions, view rules, hiding and the play driver.

A view rule names the justifier of its reply with a selector over the
current P-view, most recent move first:

    i    the last move
    ii   the justifier of the second-last move
    iii  the third-last move
    v    the fifth-last move

Only pred needs v. Its first answer comes right after the yes it swallowed
and the q_W it asked next, when the view reads

    yes_W q_W yes_W qhat_W qhat_E

so the qhat_E that answer justifies sits fifth.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from semantics.games import (
    BooleanGame, Game, LazyNatGame, Move, PI, Position, TerminalGame,
    dum_justifier, hide_game, render_trace, view_indices,
)
from semantics.tags import (
    IDENTITY, PREPEND_THREAD, STRIP_THREAD, Rewrite, Token,
)
from setup.init import INTERACT_BUDGET, MAX_STEPS
from utils.errors import Diverged, StrategyError, Verdict

logger = logging.getLogger(__name__)

# ===========================================================================================================================================================
# Replies and selectors
# ===========================================================================================================================================================


class Selector(str, Enum):
    """Where the justifier of a P-move sits, relative to the current P-view."""

    LAST = "i"
    JUSTIFIER_OF_SECOND_LAST = "ii"
    THIRD_LAST = "iii"
    FIFTH_LAST = "v"
    EXPLICIT = "explicit"


STACK_SELECTORS = {sel.value: sel for sel in Selector if sel is not Selector.EXPLICIT}


def resolve_selector(s: Position, selector: Selector, view: Optional[List[int]] = None) -> int:
    """Absolute justifier index named by a selector on an odd-length position."""
    view = view if view is not None else view_indices(s, 5)
    try:
        if selector is Selector.LAST:
            return view[0]
        if selector is Selector.JUSTIFIER_OF_SECOND_LAST:
            j = s.pointers[view[1]]
            if j is None:
                raise StrategyError("selector ii: second-last view move is initial")
            return j
        if selector is Selector.THIRD_LAST:
            return view[2]
        if selector is Selector.FIFTH_LAST:
            return view[4]
    except IndexError:
        raise StrategyError(f"selector {selector.value}: P-view has only {len(view)} moves")
    raise StrategyError(f"selector {selector.value} cannot be resolved from the view")


@dataclass(frozen=True)
class Reply:
    move: Move
    justifier: Optional[int]
    selector: Selector = Selector.EXPLICIT


class Strategy(ABC):
    game: Game

    @abstractmethod
    def respond(self, s: Position) -> Optional[Reply]:
        """P's answer to an odd-length position, or None when P stops."""


# ===========================================================================================================================================================
# View rules
# ===========================================================================================================================================================


@dataclass(frozen=True)
class ViewWindow:
    """What a view rule may read: up to three P-view move symbols, most recent first,
    and the first two tokens of the last move's tag."""

    symbols: Tuple[str, ...]
    lead: Tuple[Token, ...] = ()

    def __len__(self) -> int:
        return len(self.symbols)

    def substance(self, k: int) -> Optional[str]:
        return self.symbols[k].rpartition("_")[0] if k < len(self.symbols) else None

    def inner(self, k: int) -> Optional[str]:
        return self.symbols[k].rpartition("_")[2] if k < len(self.symbols) else None

    def move(self, k: int) -> Optional[Move]:
        return Move.from_symbol(self.symbols[k]) if k < len(self.symbols) else None


@dataclass(frozen=True)
class Decision:
    """A rule's answer: selector, output symbol, which view move the tag comes from, and its rewrite."""

    selector: Selector
    symbol: str
    source: int
    rewrite: Rewrite = IDENTITY


class ViewRule(ABC):
    """A finite table from view windows to decisions, shared by strategies and machines."""

    name: str = "rule"
    game: Game

    @abstractmethod
    def decide(self, window: ViewWindow) -> Optional[Decision]:
        ...

    @abstractmethod
    def table(self) -> List[str]:
        """Human-readable transition rows."""

    def initial(self, symbol: str) -> bool:
        return self.game.symbol_initial(symbol)


def window_of(s: Position, view: Sequence[int], game: Game) -> ViewWindow:
    """Window over a local P-view: at most three moves, never past the initial one."""
    symbols = []
    for i in view[:3]:
        symbols.append(s[i].symbol)
        if i % 2 == 0 and game.is_initial(s[i]):
            break
    return ViewWindow(tuple(symbols), s.last.outer.tokens[:2])


@dataclass(frozen=True)
class ViewRuleStrategy(Strategy):
    rule: ViewRule
    game: Game

    def respond(self, s: Position) -> Optional[Reply]:
        if len(s) % 2 == 0:
            return None
        view = view_indices(s, 5)
        decision = self.rule.decide(window_of(s, view, self.game))
        if decision is None:
            return None
        source = s[view[decision.source - 1]]
        move = Move.from_symbol(decision.symbol, decision.rewrite.apply(source.outer))
        return Reply(move, resolve_selector(s, decision.selector, view), decision.selector)


@dataclass(frozen=True)
class Link:
    """One copy-cat channel: moves ending in `here` are copied to `there` with `forth` applied."""

    here: str
    there: str
    forth: Rewrite
    back: Rewrite


@dataclass(frozen=True)
class CopyCatRule(ViewRule):
    """Copy-cat between inner-tag suffixes; the copy of an initial move points at it."""

    game: Game
    links: Tuple[Link, ...]
    name: str = "copycat"

    def _route(self, inner: str) -> Optional[Tuple[str, Rewrite]]:
        best = None
        for link in self.links:
            for src, dst, rw in ((link.here, link.there, link.forth), (link.there, link.here, link.back)):
                if inner.endswith(src) and (best is None or len(src) > len(best[0])):
                    best = (src, dst, rw)
        if best is None:
            return None
        src, dst, rw = best
        return inner[: len(inner) - len(src)] + dst, rw

    def decide(self, window):
        routed = self._route(window.inner(0))
        if routed is None:
            return None
        inner, rw = routed
        selector = Selector.LAST if self.initial(window.symbols[0]) else Selector.THIRD_LAST
        return Decision(selector, f"{window.substance(0)}_{inner}", 1, rw)

    def table(self):
        rows = []
        for link in self.links:
            rows.append(f"*{link.here} -> *{link.there}  tag {link.forth}  sel i if initial else iii")
            rows.append(f"*{link.there} -> *{link.here}  tag {link.back}  sel iii")
        return rows


def copy_cat(a: Game) -> ViewRuleStrategy:
    """Copy-cat on A -o A."""
    from semantics.constructions import Lolli

    if not a.normalized:
        raise StrategyError(f"copy-cat needs a normalized game, got {a}")
    game = Lolli(a, a)
    return ViewRuleStrategy(CopyCatRule(game, (Link("E", "W", IDENTITY, IDENTITY),), "cp"), game)


def dereliction(a: Game) -> ViewRuleStrategy:
    """Copy-cat on !A -o A through the thread [0 ]0 h."""
    from semantics.constructions import Bang, Lolli

    if not a.normalized:
        raise StrategyError(f"dereliction needs a normalized game, got {a}")
    game = Lolli(Bang(a), a)
    return ViewRuleStrategy(CopyCatRule(game, (Link("E", "W", PREPEND_THREAD, STRIP_THREAD),), "der"), game)


# ===========================================================================================================================================================
# Explicit strategies
# ===========================================================================================================================================================


def _numeral_game() -> Game:
    from semantics.constructions import Bang, Lolli

    return Lolli(Bang(TerminalGame()), LazyNatGame())


def _boolean_game() -> Game:
    from semantics.constructions import Bang, Lolli

    return Lolli(Bang(TerminalGame()), BooleanGame())


@dataclass(frozen=True)
class NumeralStrategy(Strategy):
    """The numeral n on T => N: n yes answers, then no."""

    n: int
    game: Game = field(default_factory=_numeral_game)

    def respond(self, s):
        if len(s) % 2 == 0 or s.last.substance not in ("qhat", "q"):
            return None
        answered = sum(1 for m in s.moves if m.substance == "yes")
        name = "yes" if answered < self.n else "no"
        return Reply(Move(name, "E"), len(s) - 1, Selector.LAST)


@dataclass(frozen=True)
class BooleanStrategy(Strategy):
    value: bool
    game: Game = field(default_factory=_boolean_game)

    def respond(self, s):
        if len(s) != 1:
            return None
        return Reply(Move("tt" if self.value else "ff", "E"), 0, Selector.LAST)


@dataclass(frozen=True)
class TopStrategy(Strategy):
    """The unique strategy on T: it never moves."""

    game: Game = field(default_factory=TerminalGame)

    def respond(self, s):
        return None


def numeral(n: int) -> NumeralStrategy:
    return NumeralStrategy(n)


def boolean(value: bool) -> BooleanStrategy:
    return BooleanStrategy(value)


def top() -> TopStrategy:
    return TopStrategy()


# ===========================================================================================================================================================
# Hiding
# ===========================================================================================================================================================


def _with_dummies(game: Game, s: Position) -> Position:
    while len(s) and game.label(s.last) == PI:
        s = s.extend(game.dummy(s.last), dum_justifier(game, s, len(s) - 1))
    return s


class HiddenStrategy(Strategy):
    """The hiding of a strategy: plays are replayed on the full game, internal dummies forced."""

    def __init__(self, sigma: Strategy, max_steps: int = MAX_STEPS):
        self.sigma = sigma
        self.game = hide_game(sigma.game)
        self.max_steps = max_steps
        self._cache: Dict[Position, Tuple[Position, List[int]]] = {}

    def unhide(self, hidden: Position) -> Tuple[Position, List[int]]:
        """Full position whose hiding is `hidden`, with the full index of each hidden occurrence."""
        if hidden in self._cache:
            return self._cache[hidden]
        if len(hidden) == 0:
            return Position(), []
        full, origin = self.unhide(hidden.prefix(len(hidden) - 1))
        i = len(hidden) - 1
        m, j = hidden[i], hidden.pointers[i]
        if i % 2 == 0:
            full = full.extend(m, None if j is None else origin[j])
        else:
            reply = self._advance(full)
            if reply is None or reply[0].last != m:
                raise StrategyError(f"hidden position is not a play of the strategy at {i + 1}")
            full = reply[0]
        result = (full, origin + [len(full) - 1])
        self._cache[hidden] = result
        return result

    def _advance(self, full: Position) -> Optional[Tuple[Position, int]]:
        """Runs P's internal moves until an external one; returns the extended play."""
        game = self.sigma.game
        for _ in range(self.max_steps):
            full = _with_dummies(game, full)
            reply = self.sigma.respond(full)
            if reply is None:
                return None
            full = full.extend(reply.move, reply.justifier)
            if game.label(reply.move).external:
                return full, len(full) - 1
        raise Diverged(f"no external move within {self.max_steps} internal steps")

    def respond(self, s: Position) -> Optional[Reply]:
        full, origin = self.unhide(s)
        advanced = self._advance(full)
        if advanced is None:
            return None
        full, p = advanced
        j = full.pointers[p]
        back = {g: h for h, g in enumerate(origin)}
        while j is not None and j not in back:
            j = full.pointers[j]
        return Reply(full[p], None if j is None else back[j], Selector.EXPLICIT)


def hide_strategy(sigma: Strategy) -> Strategy:
    if sigma.game.normalized:
        return sigma
    return HiddenStrategy(sigma)


# ===========================================================================================================================================================
# Playing and checking
# ===========================================================================================================================================================

Opponent = Callable[[Game, Position], Optional[Tuple[Move, Optional[int]]]]


def play(sigma: Strategy, opponent: Opponent, budget: int = INTERACT_BUDGET) -> Position:
    """Plays sigma against an opponent, inserting internal dummies as Dum dictates."""
    game = sigma.game
    s = Position()
    while True:
        if len(s) >= budget:
            raise Diverged(f"play exceeded {budget} occurrences")
        if len(s) and game.label(s.last) == PI:
            s = _with_dummies(game, s)
        else:
            nxt = opponent(game, s)
            if nxt is None:
                return s
            s = s.extend(*nxt)
        reply = sigma.respond(s)
        if reply is None:
            return s
        s = s.extend(reply.move, reply.justifier)


def check_strategy(sigma: Strategy, depth: int) -> Verdict:
    """Explores every O-extension up to depth and checks each response stays in the game."""
    game = sigma.game
    stack = [Position()]
    while stack:
        s = stack.pop()
        if len(s) >= depth:
            continue
        if len(s) and game.label(s.last) == PI:
            extensions = [(game.dummy(s.last), dum_justifier(game, s, len(s) - 1))]
        else:
            extensions = list(game.candidates(s))
        for m, j in extensions:
            t = s.extend(m, j)
            try:
                reply = sigma.respond(t)
            except StrategyError as e:
                return Verdict.reject(f"no legal response: {e}", len(t) - 1)
            if reply is None:
                continue
            u = t.extend(reply.move, reply.justifier)
            verdict = game.accepts(u)
            if not verdict:
                logger.debug(f"illegal response after\n{render_trace(t)}")
                return Verdict.reject(f"response {reply.move} leaves the game: {verdict.reason}", len(t) - 1)
            stack.append(u)
    return Verdict.accept()
