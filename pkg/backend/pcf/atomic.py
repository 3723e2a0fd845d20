"""Atomic PCF strategies as view rules.

Every rule reads at most the last three P-view moves (plus the first two tag
tokens of the last one) and names the justifier by a selector, so the same
rule objects drive both the strategies and the compiled machines.
"""

from dataclasses import dataclass
from typing import List, Optional

from semantics.constructions import Bang, Lolli, Product
from semantics.games import BooleanGame, Game, LazyNatGame
from semantics.strategies import (
    CopyCatRule, Decision, Link, Selector, ViewRule, ViewRuleStrategy, ViewWindow,
)
from semantics.tags import (
    C0, ELL, IDENTITY, NEST_PAIR, O0, O1, PREPEND_THREAD, STRIP_THREAD, UNNEST_PAIR,
    UNWRAP_ARGUMENT, WRAP_ARGUMENT, OuterTag, constant, thread,
)

NAT = LazyNatGame()
BOOL = BooleanGame()

LAST = Selector.LAST
II = Selector.JUSTIFIER_OF_SECOND_LAST
III = Selector.THIRD_LAST
V = Selector.FIFTH_LAST


def arrow(a: Game, b: Game) -> Lolli:
    return Lolli(Bang(a), b)


# ===========================================================================================================================================================
# Numeric rules
# ===========================================================================================================================================================


@dataclass(frozen=True)
class ZeroRule(ViewRule):
    game: Game
    name: str = "zero"

    def decide(self, w: ViewWindow) -> Optional[Decision]:
        if w.symbols[0] == "qhat_E":
            return Decision(LAST, "no_E", 1, IDENTITY)
        return None

    def table(self) -> List[str]:
        return ["qhat_E -> no_E  sel i  tag copy(1)"]


@dataclass(frozen=True)
class SuccRule(ViewRule):
    """Echoes every answer of the input as yes and closes with one extra no."""

    game: Game = arrow(NAT, NAT)
    name: str = "succ"

    def decide(self, w):
        top = w.symbols[0]
        if top == "qhat_E":
            return Decision(LAST, "qhat_W", 1, PREPEND_THREAD)
        if top in ("yes_W", "no_W") and len(w) > 1:
            if w.symbols[1] == "qhat_W":
                return Decision(II, "yes_E", 1, STRIP_THREAD)
            return Decision(III, "yes_E", 1, STRIP_THREAD)
        if top == "q_E" and len(w) > 2:
            if w.symbols[2] == "yes_W":
                return Decision(III, "q_W", 3, IDENTITY)
            if w.symbols[2] == "no_W":
                return Decision(LAST, "no_E", 1, IDENTITY)
        return None

    def table(self):
        return [
            "qhat_E -> qhat_W  sel i  tag enter-thread(1)",
            "x_W after qhat_W -> yes_E  sel ii  tag leave-thread(1)",
            "x_W after q_W -> yes_E  sel iii  tag leave-thread(1)",
            "q_E over yes_W -> q_W  sel iii  tag copy(3)",
            "q_E over no_W -> no_E  sel i  tag copy(1)",
        ]


@dataclass(frozen=True)
class PredRule(ViewRule):
    """Swallows the first yes of the input; zero stays zero."""

    game: Game = arrow(NAT, NAT)
    name: str = "pred"

    def decide(self, w):
        top = w.symbols[0]
        if top == "qhat_E":
            return Decision(LAST, "qhat_W", 1, PREPEND_THREAD)
        if top in ("yes_W", "no_W") and len(w) > 1 and w.symbols[1] == "qhat_W":
            if top == "no_W":
                return Decision(II, "no_E", 1, STRIP_THREAD)
            return Decision(LAST, "q_W", 1, IDENTITY)
        if top in ("yes_W", "no_W") and len(w) > 2 and w.symbols[1] == "q_W":
            answer = f"{w.substance(0)}_E"
            if w.symbols[2] == "yes_W":
                return Decision(V, answer, 1, STRIP_THREAD)
            if w.symbols[2] == "q_E":
                return Decision(III, answer, 1, STRIP_THREAD)
        if top == "q_E" and len(w) > 2:
            return Decision(III, "q_W", 3, IDENTITY)
        return None

    def table(self):
        return [
            "qhat_E -> qhat_W  sel i  tag enter-thread(1)",
            "no_W after qhat_W -> no_E  sel ii  tag leave-thread(1)",
            "yes_W after qhat_W -> q_W  sel i  tag copy(1)",
            "x_W after q_W over yes_W -> x_E  sel v  tag leave-thread(1)",
            "x_W after q_W over q_E -> x_E  sel iii  tag leave-thread(1)",
            "q_E -> q_W  sel iii  tag copy(3)",
        ]


@dataclass(frozen=True)
class IfZeroRule(ViewRule):
    game: Game = arrow(NAT, BOOL)
    name: str = "zero?"

    def decide(self, w):
        top = w.symbols[0]
        if top == "qhat_E":
            return Decision(LAST, "qhat_W", 1, PREPEND_THREAD)
        if len(w) > 1 and w.symbols[1] == "qhat_W":
            if top == "no_W":
                return Decision(II, "tt_E", 1, STRIP_THREAD)
            if top == "yes_W":
                return Decision(II, "ff_E", 1, STRIP_THREAD)
        return None

    def table(self):
        return [
            "qhat_E -> qhat_W  sel i  tag enter-thread(1)",
            "no_W -> tt_E  sel ii  tag leave-thread(1)",
            "yes_W -> ff_E  sel ii  tag leave-thread(1)",
        ]


# ===========================================================================================================================================================
# Case and fixed points
# ===========================================================================================================================================================

BOOL_THREAD = thread(OuterTag.of(ELL))


@dataclass(frozen=True)
class CaseRule(ViewRule):
    """Asks the boolean in its own thread, then derelicts into the chosen branch.

    Branch moves end in WWW (tt) or EWW (ff); the boolean sits at EW.
    """

    a: Game
    game: Game = None
    name: str = "case"

    def __post_init__(self):
        if self.game is None:
            object.__setattr__(self, "game", arrow(Product(Product(self.a, self.a), BOOL), self.a))

    def decide(self, w):
        sub, inner = w.substance(0), w.inner(0)
        if inner == "EW" and sub in ("tt", "ff"):
            if len(w) < 3:
                return None
            branch = "WWW" if sub == "tt" else "EWW"
            return Decision(III, f"{w.substance(2)}_{w.inner(2)[:-1]}{branch}", 3, PREPEND_THREAD)
        if inner.endswith(("WWW", "EWW")):
            asked = w.inner(1) or ""
            first = asked.endswith(("WWW", "EWW")) and self.a.symbol_initial(f"{w.substance(1)}_{asked[:-3]}")
            return Decision(II if first else III, f"{sub}_{inner[:-3]}E", 1, STRIP_THREAD)
        if inner.endswith("E"):
            if self.initial(w.symbols[0]):
                return Decision(LAST, "qhat_EW", 1, constant(BOOL_THREAD))
            if len(w) < 3 or not w.inner(2).endswith(("WWW", "EWW")):
                return None
            return Decision(III, f"{sub}_{inner[:-1]}{w.inner(2)[-3:]}", 1, PREPEND_THREAD)
        return None

    def table(self):
        return [
            f"a_E initial -> qhat_EW  sel i  tag {constant(BOOL_THREAD)}(1)",
            "tt_EW -> a_WWW of view move 3  sel iii  tag enter-thread(3)",
            "ff_EW -> a_EWW of view move 3  sel iii  tag enter-thread(3)",
            "x_E -> x_WWW or x_EWW as view move 3  sel iii  tag enter-thread(1)",
            "x_WWW, x_EWW -> x_E  sel ii after the branch's initial question, else iii  tag leave-thread(1)",
        ]


@dataclass(frozen=True)
class FixRule(ViewRule):
    """Copies the codomain into a thread of the argument and launches a new
    nested thread whenever the argument calls itself.

    Codomain moves end in E, the argument's codomain in EW, its domain in WW.
    """

    a: Game
    game: Game = None
    name: str = "fix"

    def __post_init__(self):
        if self.game is None:
            object.__setattr__(self, "game", arrow(arrow(self.a, self.a), self.a))

    def decide(self, w):
        sub, inner = w.substance(0), w.inner(0)
        if inner.endswith("EW"):
            if len(w) < 3:
                return None
            if w.lead[:2] == (O0, C0):
                return Decision(III, f"{sub}_{inner[:-2]}E", 1, STRIP_THREAD)
            if w.lead[:2] == (O0, O1):
                return Decision(III, f"{sub}_{inner[:-2]}WW", 1, UNNEST_PAIR)
            return None
        if inner.endswith("WW"):
            local = f"{sub}_{inner[:-2]}"
            selector = II if self.a.symbol_initial(local) else III
            return Decision(selector, f"{local}EW", 1, NEST_PAIR)
        if inner.endswith("E"):
            selector = LAST if self.initial(w.symbols[0]) else III
            return Decision(selector, f"{sub}_{inner[:-1]}EW", 1, PREPEND_THREAD)
        return None

    def table(self):
        return [
            "x_E -> x_EW  sel i if initial else iii  tag enter-thread(1)",
            "x_EW with [0 ]0 -> x_E  sel iii  tag leave-thread(1)",
            "x_EW with [0 [1 -> x_WW  sel iii  tag unnest-pair(1)",
            "x_WW -> x_EW  sel ii if x initial else iii  tag nest-pair(1)",
        ]


# ===========================================================================================================================================================
# Derelictions up to inner tags
# ===========================================================================================================================================================


def der_rule(a: Game) -> CopyCatRule:
    return CopyCatRule(arrow(a, a), (Link("E", "W", PREPEND_THREAD, STRIP_THREAD),), "der")


def proj_rule(ctx: Game, component: Game, path: str) -> CopyCatRule:
    """Projection onto the component of a context reached by `path` (letters innermost first)."""
    return CopyCatRule(arrow(ctx, component), (Link("E", path + "W", PREPEND_THREAD, STRIP_THREAD),), f"proj[{path}]")


def ev_rule(a: Game, b: Game) -> CopyCatRule:
    links = (
        Link("E", "EWW", PREPEND_THREAD, STRIP_THREAD),
        Link("WWW", "EW", WRAP_ARGUMENT, UNWRAP_ARGUMENT),
    )
    return CopyCatRule(arrow(Product(arrow(a, b), a), b), links, "ev")


def zero_rule(ctx: Game) -> ZeroRule:
    return ZeroRule(arrow(ctx, NAT))


# ===========================================================================================================================================================
# Strategies
# ===========================================================================================================================================================


def as_strategy(rule: ViewRule) -> ViewRuleStrategy:
    return ViewRuleStrategy(rule, rule.game)


def zero_strategy(a: Game) -> ViewRuleStrategy:
    return as_strategy(zero_rule(a))


def succ_strategy() -> ViewRuleStrategy:
    return as_strategy(SuccRule())


def pred_strategy() -> ViewRuleStrategy:
    return as_strategy(PredRule())


def ifzero_strategy() -> ViewRuleStrategy:
    return as_strategy(IfZeroRule())


def case_strategy(a: Game) -> ViewRuleStrategy:
    return as_strategy(CaseRule(a))


def fix_strategy(a: Game) -> ViewRuleStrategy:
    return as_strategy(FixRule(a))


def der_strategy(a: Game) -> ViewRuleStrategy:
    return as_strategy(der_rule(a))

