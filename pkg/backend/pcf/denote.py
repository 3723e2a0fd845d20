"""Description trees, the call-by-name denotation of PCF terms and materialization.

A description is a tree over four formation rules:

    Atomic(name, rule)          a view-rule strategy on !X -o Y
    Curry(body)                 body on !(X & A) -o Y, seen on !X -o (!A -o Y)
    Pair(left, right)           shared domain X, codomain Y1 & Y2
    PromoteConcat(first, then)  first promoted, then concatenated with `then`

Contexts x1: A1, ..., xn: An are the left-nested product (..(T & A1) & ..) & An,
so variable i sits under the inner-tag path E W^(n-i).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

from pcf import atomic
from pcf.syntax import (
    App, Arrow, Base, Case, Ff, Fix, Fst, Ifz, Lam, Pair as PairTerm, PcfType, Pred, Prod, Snd,
    Succ, Term, Tt, Var, Zero, infer_type, parse_program, type_of,
)
from semantics.constructions import (
    Lolli, Bang, Product, curry_strategy, concatenate_strategies, pair_strategies, promote_strategy,
)
from semantics.games import BooleanGame, Game, LazyNatGame, TerminalGame
from semantics.strategies import Strategy, ViewRule, ViewRuleStrategy
from utils.errors import PcfTypeError, StrategyError

logger = logging.getLogger(__name__)

# ===========================================================================================================================================================
# Type games
# ===========================================================================================================================================================


def type_game(ty: PcfType) -> Game:
    if isinstance(ty, Base):
        return {"nat": LazyNatGame(), "bool": BooleanGame(), "unit": TerminalGame()}[ty.name]
    if isinstance(ty, Arrow):
        return Lolli(Bang(type_game(ty.dom)), type_game(ty.cod))
    if isinstance(ty, Prod):
        return Product(type_game(ty.left), type_game(ty.right))
    raise PcfTypeError(f"type {ty} has no game")


def context_game(types: Sequence[PcfType]) -> Game:
    game: Game = TerminalGame()
    for ty in types:
        game = Product(game, type_game(ty))
    return game


# ===========================================================================================================================================================
# Descriptions
# ===========================================================================================================================================================


@dataclass(frozen=True)
class Atomic:
    name: str
    rule: ViewRule
    domain: Game
    codomain: Game


@dataclass(frozen=True)
class Curry:
    body: "Description"
    domain: Game
    argument: Game
    result: Game

    @property
    def codomain(self) -> Game:
        return Lolli(Bang(self.argument), self.result)


@dataclass(frozen=True)
class Pair:
    left: "Description"
    right: "Description"

    @property
    def domain(self) -> Game:
        return self.left.domain

    @property
    def codomain(self) -> Game:
        return Product(self.left.codomain, self.right.codomain)


@dataclass(frozen=True)
class PromoteConcat:
    first: "Description"
    then: "Description"

    @property
    def domain(self) -> Game:
        return self.first.domain

    @property
    def codomain(self) -> Game:
        return self.then.codomain


Description = Union[Atomic, Curry, Pair, PromoteConcat]


def atomic_node(name: str, rule: ViewRule) -> Atomic:
    return Atomic(name, rule, rule.game.domain.game, rule.game.codomain)


def curry(body: "Description") -> Curry:
    dom = body.domain
    if not isinstance(dom, Product):
        raise StrategyError(f"curry: domain {dom} is not a product")
    return Curry(body, dom.left, dom.right, body.codomain)


def pair(left: "Description", right: "Description") -> Pair:
    if left.domain != right.domain:
        raise StrategyError(f"pair: domains {left.domain} and {right.domain} differ")
    return Pair(left, right)


def promote_concat(first: "Description", then: "Description") -> PromoteConcat:
    if then.domain != first.codomain:
        raise StrategyError(f"promote-concat: {first.codomain} does not feed {then.domain}")
    return PromoteConcat(first, then)


def describe(d: "Description", indent: int = 0) -> str:
    """Indented rendering of a description tree."""
    pad = "  " * indent
    head = f"{pad}{type(d).__name__}"
    if isinstance(d, Atomic):
        head += f" {d.name}"
    lines = [f"{head} : {d.domain} => {d.codomain}"]
    for child in children(d):
        lines.append(describe(child, indent + 1))
    return "\n".join(lines)


def children(d: "Description") -> List["Description"]:
    if isinstance(d, Curry):
        return [d.body]
    if isinstance(d, Pair):
        return [d.left, d.right]
    if isinstance(d, PromoteConcat):
        return [d.first, d.then]
    return []


def size(d: "Description") -> int:
    return 1 + sum(size(c) for c in children(d))


# ===========================================================================================================================================================
# Denotation (call-by-name)
# ===========================================================================================================================================================


def _zero(ctx: Game) -> Atomic:
    return atomic_node("zero", atomic.zero_rule(ctx))


def _then(d: "Description", name: str, rule: ViewRule) -> PromoteConcat:
    return promote_concat(d, atomic_node(name, rule))


def denote_in(t: Term, env: List[Tuple[str, PcfType]]) -> "Description":
    """Description of an elaborated term in a context of (name, type) bindings."""
    types = [ty for _, ty in env]
    ctx = context_game(types)
    if isinstance(t, Var):
        for i in range(len(env) - 1, -1, -1):
            if env[i][0] == t.name:
                path = "E" + "W" * (len(env) - 1 - i)
                return atomic_node(f"proj {t.name}", atomic.proj_rule(ctx, type_game(env[i][1]), path))
        raise PcfTypeError(f"unbound variable {t.name}", *t.loc)
    if isinstance(t, Lam):
        return curry(denote_in(t.body, env + [(t.name, t.ty)]))
    if isinstance(t, App):
        fn = type_of(t.fn, dict(env))
        ev = atomic.ev_rule(type_game(fn.dom), type_game(fn.cod))
        return promote_concat(pair(denote_in(t.fn, env), denote_in(t.arg, env)), atomic_node("ev", ev))
    if isinstance(t, Zero):
        return _zero(ctx)
    if isinstance(t, Succ):
        return _then(denote_in(t.body, env), "succ", atomic.SuccRule())
    if isinstance(t, Pred):
        return _then(denote_in(t.body, env), "pred", atomic.PredRule())
    if isinstance(t, Ifz):
        return _then(denote_in(t.body, env), "zero?", atomic.IfZeroRule())
    if isinstance(t, Tt):
        return _then(_zero(ctx), "zero?", atomic.IfZeroRule())
    if isinstance(t, Ff):
        return _then(_then(_zero(ctx), "succ", atomic.SuccRule()), "zero?", atomic.IfZeroRule())
    if isinstance(t, Case):
        a = type_game(type_of(t.then, dict(env)))
        branches = pair(pair(denote_in(t.then, env), denote_in(t.orelse, env)), denote_in(t.cond, env))
        return promote_concat(branches, atomic_node("case", atomic.CaseRule(a)))
    if isinstance(t, Fix):
        a = type_game(t.ty)
        return promote_concat(curry(denote_in(t.body, env + [(t.name, t.ty)])), atomic_node("fix", atomic.FixRule(a)))
    if isinstance(t, PairTerm):
        return pair(denote_in(t.left, env), denote_in(t.right, env))
    if isinstance(t, (Fst, Snd)):
        ty = type_of(t.body, dict(env))
        component, path = (ty.left, "W") if isinstance(t, Fst) else (ty.right, "E")
        rule = atomic.proj_rule(type_game(ty), type_game(component), path)
        return promote_concat(denote_in(t.body, env), atomic_node("fst" if isinstance(t, Fst) else "snd", rule))
    raise PcfTypeError(f"cannot denote {t!r}", *t.loc)


def denote(t: Term) -> "Description":
    """Denotation of a closed term; the term is type-checked first."""
    elaborated, ty = infer_type(t)
    d = denote_in(elaborated, [])
    logger.debug(f"denoted a {ty} term into {size(d)} nodes")
    return d


def denote_source(source: str) -> Tuple["Description", PcfType]:
    elaborated, ty = infer_type(parse_program(source))
    return denote_in(elaborated, []), ty


# ===========================================================================================================================================================
# Materialization
# ===========================================================================================================================================================


@lru_cache(maxsize=256)
def materialize(d: "Description") -> Strategy:
    """The strategy a description denotes, built with the checked game constructions.

    Raises:
        StrategyError: naming the node whose decomposition does not match.
    """
    try:
        if isinstance(d, Atomic):
            return ViewRuleStrategy(d.rule, d.rule.game)
        if isinstance(d, Curry):
            return curry_strategy(materialize(d.body), d.domain, d.argument, d.result)
        if isinstance(d, Pair):
            return pair_strategies(
                materialize(d.left), materialize(d.right), Bang(d.domain), d.left.codomain, d.right.codomain
            )
        if isinstance(d, PromoteConcat):
            first = promote_strategy(materialize(d.first), d.first.domain, d.first.codomain)
            return concatenate_strategies(
                first, materialize(d.then), Bang(d.first.domain), Bang(d.first.codomain), d.then.codomain
            )
    except StrategyError as e:
        raise StrategyError(f"{type(d).__name__} node {describe(d).splitlines()[0].strip()}: {e}")
    raise StrategyError(f"unknown description node {d!r}")


def game_of(d: "Description") -> Game:
    return materialize(d).game
