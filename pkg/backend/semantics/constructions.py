"""Game and strategy constructions.

Type constructors (tensor, exponential, linear implication, product) build
normalized games. The composite constructions (concatenation, pairing,
promotion, currying) keep internal moves and record an `ambient` normalized
game their hiding refines. Inner-tag surgery for every construction lives in
the `route`/`lift` helpers of the composite game classes; strategies and
compiled machines both go through them.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from semantics.games import (
    Game, Move, Position, Verdict, project, HiddenGame, hide_game,
)
from semantics.strategies import Reply, Strategy, HiddenStrategy
from semantics.tags import (
    ELL, OuterTag, TagError, check_wellformed, decode_tag, join_thread, split_thread,
)
from utils.errors import StrategyError

logger = logging.getLogger(__name__)


def _strip(move: Move, letter: str) -> Optional[Move]:
    if move.inner.endswith(letter):
        return move.with_inner(move.inner[:-1])
    return None


def _fresh_thread(used: Iterable[OuterTag]) -> OuterTag:
    codes = {decode_tag(f) for f in used}
    k = 0
    while (k,) in codes:
        k += 1
    return OuterTag((ELL,) * k)


# ===========================================================================================================================================================
# Type constructors
# ===========================================================================================================================================================


class _Binary(Game):
    """Moves of the left component end in W, of the right one in E."""

    left: Game
    right: Game

    def _part(self, move: Move) -> Tuple[Optional[Game], Optional[Move]]:
        if move.inner.endswith("W"):
            return self.left, _strip(move, "W")
        if move.inner.endswith("E"):
            return self.right, _strip(move, "E")
        return None, None

    def label(self, move):
        game, local = self._part(move)
        return game.label(local) if game else None

    def is_initial(self, move):
        game, local = self._part(move)
        return bool(game) and game.is_initial(local)

    def positions_ok(self, s):
        for letter, game in (("W", self.left), ("E", self.right)):
            proj, _ = project(s, lambda m: _strip(m, letter))
            verdict = game.accepts(proj)
            if not verdict:
                return Verdict.reject(f"tensor {letter}-projection: {verdict.reason}")
        return Verdict.accept()

    def move_candidates(self, s):
        for letter, game in (("W", self.left), ("E", self.right)):
            proj, _ = project(s, lambda m: _strip(m, letter))
            for m in game.move_candidates(proj):
                yield m.with_inner(m.inner + letter)


@dataclass(frozen=True)
class Tensor(_Binary):
    left: Game
    right: Game

    def __str__(self):
        return f"({self.left} (x) {self.right})"


@dataclass(frozen=True)
class Product(_Binary):
    left: Game
    right: Game

    def side(self, s: Position) -> Optional[str]:
        return s[0].inner[-1:] if len(s) else None

    def positions_ok(self, s):
        letter = self.side(s)
        if letter is None:
            return Verdict.accept()
        if any(not m.inner.endswith(letter) for m in s.moves):
            return Verdict.reject("product: play touches both components")
        game = self.left if letter == "W" else self.right
        proj, _ = project(s, lambda m: _strip(m, letter))
        verdict = game.accepts(proj)
        return verdict if verdict else Verdict.reject(f"product {letter}-projection: {verdict.reason}")

    def move_candidates(self, s):
        letter = self.side(s)
        for side, game in (("W", self.left), ("E", self.right)):
            if letter not in (None, side):
                continue
            proj, _ = project(s, lambda m: _strip(m, side))
            for m in game.move_candidates(proj):
                yield m.with_inner(m.inner + side)

    def __str__(self):
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Bang(Game):
    """The exponential: each move sits in a thread [0 f+ ]0 h."""

    game: Game

    def split(self, move: Move) -> Optional[Tuple[OuterTag, Move]]:
        try:
            f, local = split_thread(move.outer, "B")
        except TagError:
            return None
        if not check_wellformed(f) or not check_wellformed(local):
            return None
        return f, move.with_outer(local)

    def label(self, move):
        parts = self.split(move)
        return self.game.label(parts[1]) if parts else None

    def is_initial(self, move):
        return self.game.is_initial(move.with_outer(OuterTag()))

    def threads(self, s: Position) -> Dict[OuterTag, List[int]]:
        out: Dict[OuterTag, List[int]] = {}
        for i, m in enumerate(s.moves):
            out.setdefault(self.split(m)[0], []).append(i)
        return out

    def thread_projection(self, s: Position, f: OuterTag) -> Position:
        def select(m):
            parts = self.split(m)
            return parts[1] if parts and parts[0] == f else None

        return project(s, select)[0]

    def positions_ok(self, s):
        codes: Dict[Tuple[int, ...], OuterTag] = {}
        for f in self.threads(s):
            code = decode_tag(f)
            if code in codes and codes[code] != f:
                return Verdict.reject(f"exponential: threads {codes[code]} and {f} share a decoding")
            codes[code] = f
            verdict = self.game.accepts(self.thread_projection(s, f))
            if not verdict:
                return Verdict.reject(f"exponential thread [{f}]: {verdict.reason}")
        return Verdict.accept()

    def move_candidates(self, s):
        threads = self.threads(s)
        for f in list(threads) + [_fresh_thread(threads)]:
            for m in self.game.move_candidates(self.thread_projection(s, f)):
                yield m.with_outer(join_thread(f, m.outer, "B"))

    def __str__(self):
        return f"!{self.game}"


@dataclass(frozen=True)
class Lolli(Game):
    """Linear implication; the domain is a normalized game with O/P flipped."""

    domain: Game
    codomain: Game

    def label(self, move):
        if move.inner.endswith("W"):
            lab = self.domain.label(_strip(move, "W"))
            return lab.flipped() if lab else None
        if move.inner.endswith("E"):
            return self.codomain.label(_strip(move, "E"))
        return None

    def is_initial(self, move):
        return move.inner.endswith("E") and self.codomain.is_initial(_strip(move, "E"))

    def positions_ok(self, s):
        dom, dom_index = project(s, lambda m: _strip(m, "W"))
        for local, i in zip(dom.moves, dom_index):
            if self.domain.is_initial(local):
                j = s.pointers[i]
                if j is None or not s[j].inner.endswith("E") or not self.codomain.is_initial(_strip(s[j], "E")):
                    return Verdict.reject("linear implication: domain initial not justified by a codomain initial", i)
        verdict = self.domain.accepts(dom)
        if not verdict:
            return Verdict.reject(f"linear implication domain: {verdict.reason}")
        cod, _ = project(s, lambda m: _strip(m, "E"))
        verdict = self.codomain.accepts(cod)
        return verdict if verdict else Verdict.reject(f"linear implication codomain: {verdict.reason}")

    def move_candidates(self, s):
        for letter, game in (("W", self.domain), ("E", self.codomain)):
            proj, _ = project(s, lambda m: _strip(m, letter))
            for m in game.move_candidates(proj):
                yield m.with_inner(m.inner + letter)

    def __str__(self):
        return f"({self.domain} -o {self.codomain})"


def tensor(a: Game, b: Game) -> Tensor:
    return Tensor(a, b)


def exponential(a: Game) -> Bang:
    return Bang(a)


def linear_implication(a: Game, b: Game) -> Lolli:
    return Lolli(hide_game(a), b)


def product(a: Game, b: Game) -> Product:
    return Product(a, b)


def implication(a: Game, b: Game) -> Lolli:
    """A => B, i.e. !A -o B."""
    return Lolli(Bang(a), b)


# ===========================================================================================================================================================
# Composite games
# ===========================================================================================================================================================


class CompositeGame(Game):
    """Shared plumbing: route a move to a component, peel it, lift local moves back."""

    normalized = False

    def parts(self, move: Move) -> List[Tuple[str, Game, Move]]:
        raise NotImplementedError

    def lift(self, part: str, local: Move, context: Optional[Position] = None) -> Move:
        raise NotImplementedError

    def component(self, part: str) -> Game:
        raise NotImplementedError

    def project_part(self, s: Position, part: str) -> Tuple[Position, List[int]]:
        def select(m):
            for name, _, local in self.parts(m):
                if name == part:
                    return local
            return None

        return project(s, select)

    def _first(self, move: Move) -> Optional[Tuple[str, Game, Move]]:
        parts = self.parts(move)
        return parts[0] if parts else None

    def is_initial(self, move):
        first = self._first(move.with_outer(OuterTag()))
        return bool(first) and self.composite_initial(first[0], first[2]) and first[1].is_initial(first[2])

    def composite_initial(self, part: str, local: Move) -> bool:
        return True

    def crosses(self, part: str, local: Move) -> bool:
        """Whether a local move of `part` is a meeting move of this composite."""
        return False

    def home(self, move):
        first = self._first(move)
        if first is None:
            return None
        part, game, local = first
        if self.crosses(part, local):
            return (part,), game, local
        found = game.home(local)
        if found is None:
            return None
        return (part,) + found[0], found[1], found[2]

    def descend(self, move, path):
        for part, game, local in self.parts(move):
            if part != path[0]:
                continue
            return local if len(path) == 1 else game.descend(local, path[1:])
        return None


@dataclass(frozen=True)
class ConcatGame(CompositeGame):
    """J concatenated with K: J's codomain B meets K's domain B as internal moves.

    J-local inner tags stay as they are when they end in W and get S
    otherwise; K-local ones stay when they end in E and get N otherwise.
    """

    j: Game
    k: Game
    a: Game
    b: Game
    c: Game

    @property
    def ambient(self) -> Game:
        return Lolli(self.a, self.c)

    def route(self, inner: str) -> Optional[Tuple[str, str]]:
        if not inner:
            return None
        last = inner[-1]
        if last == "S":
            return "J", inner[:-1]
        if last == "W":
            return "J", inner
        if last == "N":
            return "K", inner[:-1]
        return "K", inner

    @staticmethod
    def lift_inner(part: str, inner: str) -> str:
        if part == "J":
            return inner if inner.endswith("W") else inner + "S"
        return inner if inner.endswith("E") else inner + "N"

    def component(self, part):
        return self.j if part == "J" else self.k

    def parts(self, move):
        routed = self.route(move.inner)
        if routed is None:
            return []
        part, inner = routed
        return [(part, self.component(part), move.with_inner(inner))]

    def lift(self, part, local, context=None):
        return local.with_inner(self.lift_inner(part, local.inner))

    def composite_initial(self, part, local):
        return part == "K" and local.inner.endswith("E")

    def crosses(self, part, local):
        return (part == "J" and local.inner.endswith("E")) or (part == "K" and local.inner.endswith("W"))

    def label(self, move):
        first = self._first(move)
        if first is None:
            return None
        part, game, local = first
        lab = game.label(local)
        if lab is None:
            return None
        return lab.internal() if self.crosses(part, local) else lab

    def dummy(self, move):
        part, game, local = self._first(move)
        if part == "J" and local.inner.endswith("E"):
            return self.lift("K", local.with_inner(local.inner[:-1] + "W"))
        if part == "K" and local.inner.endswith("W"):
            return self.lift("J", local.with_inner(local.inner[:-1] + "E"))
        return self.lift(part, game.dummy(local))

    def positions_ok(self, s):
        for part in ("J", "K"):
            proj, _ = self.project_part(s, part)
            verdict = self.component(part).accepts(proj)
            if not verdict:
                return Verdict.reject(f"concatenation {part}-projection: {verdict.reason}")
        return Verdict.accept()

    def move_candidates(self, s):
        for part in ("J", "K"):
            proj, _ = self.project_part(s, part)
            for m in self.component(part).move_candidates(proj):
                yield self.lift(part, m)

    def __str__(self):
        return f"({self.j} + {self.k})"


@dataclass(frozen=True)
class PairGame(CompositeGame):
    """Generalized pairing over a shared domain C; codomain A & B."""

    l: Game
    r: Game
    c: Game
    a: Game
    b: Game

    @property
    def ambient(self) -> Game:
        return Lolli(self.c, Product(self.a, self.b))

    @staticmethod
    def route(inner: str) -> List[Tuple[str, str]]:
        if not inner:
            return []
        last = inner[-1]
        if last == "S":
            return [("L", inner[:-1])]
        if last == "N":
            return [("R", inner[:-1])]
        if last == "W":
            return [("L", inner), ("R", inner)]
        if len(inner) < 2 or inner[-2] not in "WE":
            return []
        return [("L" if inner[-2] == "W" else "R", inner[:-2] + "E")]

    @staticmethod
    def lift_inner(part: str, inner: str) -> str:
        if inner.endswith("E"):
            return inner[:-1] + ("WE" if part == "L" else "EE")
        if inner.endswith("W"):
            return inner
        return inner + ("S" if part == "L" else "N")

    def component(self, part):
        return self.l if part == "L" else self.r

    def parts(self, move):
        return [(part, self.component(part), move.with_inner(inner)) for part, inner in self.route(move.inner)]

    def lift(self, part, local, context=None):
        return local.with_inner(self.lift_inner(part, local.inner))

    def composite_initial(self, part, local):
        return local.inner.endswith("E")

    def side_of(self, s: Position) -> Optional[str]:
        for m in s.moves:
            routes = self.route(m.inner)
            if len(routes) == 1:
                return routes[0][0]
        return None

    def label(self, move):
        first = self._first(move)
        return first[1].label(first[2]) if first else None

    def dummy(self, move):
        part, game, local = self._first(move)
        return self.lift(part, game.dummy(local))

    def positions_ok(self, s):
        sides = {routes[0][0] for routes in (self.route(m.inner) for m in s.moves) if len(routes) == 1}
        if len(sides) > 1:
            return Verdict.reject("pairing: play touches both components")
        for part in sides or {"L"}:
            proj, _ = self.project_part(s, part)
            verdict = self.component(part).accepts(proj)
            if not verdict:
                return Verdict.reject(f"pairing {part}-projection: {verdict.reason}")
        return Verdict.accept()

    def move_candidates(self, s):
        side = self.side_of(s)
        for part in ("L", "R"):
            if side not in (None, part):
                continue
            proj, _ = self.project_part(s, part)
            for m in self.component(part).move_candidates(proj):
                yield self.lift(part, m)

    def __str__(self):
        return f"<{self.l}, {self.r}>"


@dataclass(frozen=True)
class PromoteGame(CompositeGame):
    """G-dagger: every move carries a promotion thread g.

    Codomain and internal moves read [0 g+ ]0 h e; domain moves with local tag
    [0 f+ ]0 h e read [0 [1 g++ ]1 h [1 f++ ]1 ]0 h e.
    """

    g: Game
    x: Game
    y: Game

    @property
    def ambient(self) -> Game:
        return Lolli(Bang(self.x), Bang(self.y))

    @staticmethod
    def side(inner: str) -> str:
        return "A" if inner.endswith("W") else "B"

    def split(self, move: Move) -> Optional[Tuple[OuterTag, Move]]:
        try:
            f, local = split_thread(move.outer, self.side(move.inner))
        except TagError:
            return None
        if not check_wellformed(f):
            return None
        return f, move.with_outer(local)

    def component(self, part):
        return self.g

    def parts(self, move):
        parts = self.split(move)
        return [(parts[0], self.g, parts[1])] if parts else []

    def lift(self, part, local, context=None):
        return local.with_outer(join_thread(part, local.outer, self.side(local.inner)))

    def is_initial(self, move):
        return self.g.is_initial(move.with_outer(OuterTag()))

    def label(self, move):
        parts = self.split(move)
        return self.g.label(parts[1]) if parts else None

    def dummy(self, move):
        f, local = self.split(move)
        return self.lift(f, self.g.dummy(local))

    def threads(self, s: Position) -> Dict[OuterTag, List[int]]:
        out: Dict[OuterTag, List[int]] = {}
        for i, m in enumerate(s.moves):
            out.setdefault(self.split(m)[0], []).append(i)
        return out

    def positions_ok(self, s):
        codes: Dict[Tuple[int, ...], OuterTag] = {}
        for f in self.threads(s):
            code = decode_tag(f)
            if code in codes and codes[code] != f:
                return Verdict.reject(f"promotion: threads {codes[code]} and {f} share a decoding")
            codes[code] = f
            proj, _ = self.project_part(s, f)
            verdict = self.g.accepts(proj)
            if not verdict:
                return Verdict.reject(f"promotion thread [{f}]: {verdict.reason}")
        return Verdict.accept()

    def move_candidates(self, s):
        threads = self.threads(s)
        for f in list(threads) + [_fresh_thread(threads)]:
            proj, _ = self.project_part(s, f)
            for m in self.g.move_candidates(proj):
                yield self.lift(f, m)

    def __str__(self):
        return f"{self.g}^+"


@dataclass(frozen=True)
class CurryGame(CompositeGame):
    """Currying: !(X & A) -o Y becomes !X -o (!A -o Y) by inner retagging only."""

    g: Game
    x: Game
    a: Game
    y: Game

    @property
    def ambient(self) -> Game:
        return Lolli(Bang(self.x), Lolli(Bang(self.a), self.y))

    @staticmethod
    def curry_inner(inner: str) -> str:
        if inner.endswith(("S", "N")):
            return inner + "N"
        if inner.endswith("WW"):
            return inner[:-1]
        if inner.endswith("EW"):
            return inner[:-2] + "WE"
        return inner + "E"

    @staticmethod
    def uncurry_inner(inner: str) -> Optional[str]:
        if inner.endswith("N"):
            return inner[:-1]
        if inner.endswith("EE"):
            return inner[:-1]
        if inner.endswith("WE"):
            return inner[:-2] + "EW"
        if inner.endswith("W"):
            return inner + "W"
        return None

    def component(self, part):
        return self.g

    def parts(self, move):
        inner = self.uncurry_inner(move.inner)
        return [("G", self.g, move.with_inner(inner))] if inner is not None else []

    def lift(self, part, local, context=None):
        return local.with_inner(self.curry_inner(local.inner))

    def label(self, move):
        first = self._first(move)
        return self.g.label(first[2]) if first else None

    def dummy(self, move):
        return self.lift("G", self.g.dummy(self._first(move)[2]))

    def positions_ok(self, s):
        proj, _ = self.project_part(s, "G")
        if len(proj) != len(s):
            return Verdict.reject("currying: move outside the curried game")
        return self.g.accepts(proj)

    def move_candidates(self, s):
        proj, _ = self.project_part(s, "G")
        for m in self.g.move_candidates(proj):
            yield self.lift("G", m)

    def __str__(self):
        return f"L({self.g})"


def concatenate_games(j: Game, k: Game, a: Game, b: Game, c: Game) -> ConcatGame:
    _require(hide_game(j), Lolli(a, b), "concatenation J")
    _require(hide_game(k), Lolli(b, c), "concatenation K")
    return ConcatGame(j, k, a, b, c)


def pair_games(l: Game, r: Game, c: Game, a: Game, b: Game) -> PairGame:
    _require(hide_game(l), Lolli(c, a), "pairing L")
    _require(hide_game(r), Lolli(c, b), "pairing R")
    return PairGame(l, r, c, a, b)


def promote_game(g: Game, x: Game, y: Game) -> PromoteGame:
    _require(hide_game(g), Lolli(Bang(x), y), "promotion")
    return PromoteGame(g, x, y)


def curry_game(g: Game, x: Game, a: Game, y: Game) -> CurryGame:
    _require(hide_game(g), Lolli(Bang(Product(x, a)), y), "currying")
    return CurryGame(g, x, a, y)


def ambient_of(g: Game) -> Game:
    if isinstance(g, HiddenGame):
        return g.game.ambient
    return g if g.normalized else g.ambient


def _require(hidden: Game, expected: Game, node: str) -> None:
    """Decomposition side condition: the hiding refines the declared type game."""
    if ambient_of(hidden) != expected:
        raise StrategyError(f"{node}: decomposition mismatch, {ambient_of(hidden)} is not {expected}")


# ===========================================================================================================================================================
# Strategy constructions
# ===========================================================================================================================================================


class CompositeStrategy(Strategy):
    """Answers by projecting onto the component that owns the last move."""

    game: CompositeGame

    def owner(self, s: Position) -> Tuple[str, Strategy]:
        raise NotImplementedError

    def respond(self, s: Position) -> Optional[Reply]:
        if not len(s):
            return None
        part, sigma = self.owner(s)
        proj, origin = self.game.project_part(s, part)
        reply = sigma.respond(proj)
        if reply is None:
            return None
        justifier = None if reply.justifier is None else origin[reply.justifier]
        return Reply(self.game.lift(part, reply.move), justifier, reply.selector)


@dataclass(frozen=True)
class ConcatStrategy(CompositeStrategy):
    game: ConcatGame
    left: Strategy
    right: Strategy

    def owner(self, s):
        part, _ = self.game.route(s.last.inner)
        return part, self.left if part == "J" else self.right


@dataclass(frozen=True)
class PairStrategy(CompositeStrategy):
    game: PairGame
    left: Strategy
    right: Strategy

    def owner(self, s):
        side = self.game.side_of(s)
        if side is None:
            raise StrategyError("pairing: no side chosen yet")
        return side, self.left if side == "L" else self.right


@dataclass(frozen=True)
class PromoteStrategy(CompositeStrategy):
    game: PromoteGame
    body: Strategy

    def owner(self, s):
        parts = self.game.split(s.last)
        if parts is None:
            raise StrategyError(f"promotion: {s.last} carries no thread")
        return parts[0], self.body


@dataclass(frozen=True)
class CurryStrategy(CompositeStrategy):
    game: CurryGame
    body: Strategy

    def owner(self, s):
        return "G", self.body


def concatenate_strategies(sigma: Strategy, tau: Strategy, a: Game, b: Game, c: Game) -> ConcatStrategy:
    return ConcatStrategy(concatenate_games(sigma.game, tau.game, a, b, c), sigma, tau)


def compose(sigma: Strategy, tau: Strategy, a: Game, b: Game, c: Game) -> HiddenStrategy:
    return HiddenStrategy(concatenate_strategies(sigma, tau, a, b, c))


def pair_strategies(sigma: Strategy, tau: Strategy, c: Game, a: Game, b: Game) -> PairStrategy:
    return PairStrategy(pair_games(sigma.game, tau.game, c, a, b), sigma, tau)


def promote_strategy(phi: Strategy, x: Game, y: Game) -> PromoteStrategy:
    return PromoteStrategy(promote_game(phi.game, x, y), phi)


def curry_strategy(phi: Strategy, x: Game, a: Game, y: Game) -> CurryStrategy:
    return CurryStrategy(curry_game(phi.game, x, a, y), phi)


def uncurry_position(game: CurryGame, s: Position) -> Position:
    """The peel map of currying, applied to every occurrence."""
    proj, origin = game.project_part(s, "G")
    if len(origin) != len(s):
        raise StrategyError("uncurry: move outside the curried game")
    return proj


def curry_position(game: CurryGame, s: Position) -> Position:
    return Position(tuple(game.lift("G", m) for m in s.moves), s.pointers)
