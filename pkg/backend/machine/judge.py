"""The Judge: plays a compiled machine against an opponent.

O-moves come from a policy; after every O-move the Judge lays the play out
on a tape, runs the machine and decodes the stack into P's move, resolving
the selector on the play. Internal P-moves are answered by their dummies,
justified as Dum dictates.
"""

import logging
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from machine.compiler import CompiledMachine, compile_machine
from machine.jpa import JpaMachine, Run, execute
from machine.tape import JTape, decode_tape
from pcf.denote import Description, denote, game_of
from pcf.syntax import BOOL, NAT, Term, infer_type
from semantics.constructions import Bang, Lolli, Product
from semantics.games import (
    PI, Game, LazyNatGame, Move, Position, TerminalGame, dum_justifier, external_indices, hide_position,
)
from semantics.strategies import resolve_selector
from semantics.tags import OuterTag, parse_token
from setup.init import DEFAULT_SEED, INTERACT_BUDGET, MAX_STEPS
from utils.errors import Diverged, MachineError, PcfTypeError, StrategyError, TagError, Unsupported

logger = logging.getLogger(__name__)

OMove = Tuple[Move, Optional[int]]
Observer = Callable[["Play", JTape, Run], None]


class Play:
    """A position under construction, grown in place."""

    def __init__(self):
        self.moves: List[Move] = []
        self.pointers: List[Optional[int]] = []

    def __len__(self):
        return len(self.moves)

    def __getitem__(self, i):
        return self.moves[i]

    @property
    def last(self) -> Move:
        return self.moves[-1]

    def append(self, move: Move, justifier: Optional[int]) -> None:
        self.moves.append(move)
        self.pointers.append(justifier)

    def freeze(self) -> Position:
        return Position(tuple(self.moves), tuple(self.pointers))


# ===========================================================================================================================================================
# Opponent policies
# ===========================================================================================================================================================


class OpponentPolicy(ABC):
    @abstractmethod
    def next_move(self, game: Game, s: Play) -> Optional[OMove]:
        """The next O-move with its justifier (a full-play index), or None to stop."""


@dataclass
class NumeralReader(OpponentPolicy):
    """Asks a natural-number answer at `inner` until it hears no."""

    inner: str = "E"

    def next_move(self, game, s):
        if not len(s):
            return Move("qhat", self.inner), None
        if s.last.inner == self.inner and s.last.substance == "yes":
            return Move("q", self.inner), len(s) - 1
        return None


@dataclass
class BooleanReader(OpponentPolicy):
    inner: str = "E"

    def next_move(self, game, s):
        if not len(s):
            return Move("qhat", self.inner), None
        return None


@dataclass
class Scripted(OpponentPolicy):
    """O-moves taken from a list, in order; justifiers index the full play."""

    script: Sequence[OMove]
    cursor: int = 0

    def next_move(self, game, s):
        if self.cursor >= len(self.script):
            return None
        self.cursor += 1
        return self.script[self.cursor - 1]


@dataclass
class RandomLegal(OpponentPolicy):
    """Uniformly random legal external O-moves, reproducible from the seed."""

    seed: int = DEFAULT_SEED
    limit: Optional[int] = None
    rng: random.Random = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    def next_move(self, game, s):
        full = s.freeze() if isinstance(s, Play) else s
        if self.limit is not None and len(external_indices(game, full)) >= self.limit:
            return None
        options = list(game.candidates(full))
        if not options:
            return None
        return self.rng.choice(options)


# ===========================================================================================================================================================
# Interaction
# ===========================================================================================================================================================


@dataclass(frozen=True)
class PlayTrace:
    position: Position
    external: Position


def drive(
    m: JpaMachine,
    game: Game,
    opponent: Callable[[Play], Optional[OMove]],
    budget: int = INTERACT_BUDGET,
    observer: Optional[Observer] = None,
    machine_steps: int = MAX_STEPS,
) -> Play:
    """Alternates O-moves and machine runs until either side stops.

    `machine_steps` bounds the steps of all runs together.
    """
    play, tape = Play(), JTape()
    remaining = machine_steps
    while True:
        if len(play) >= budget:
            raise Diverged(f"interaction exceeded {budget} occurrences")
        if len(play) and game.label(play.last) == PI:
            o_move = game.dummy(play.last), dum_justifier(game, play, len(play) - 1)
        else:
            o_move = opponent(play)
            if o_move is None:
                return play
        play.append(*o_move)
        tape.append(*o_move)
        r = execute(m, tape, remaining)
        remaining -= r.steps
        if observer is not None:
            observer(play, tape, r)
        if r.result is None:
            return play
        try:
            j = resolve_selector(play, r.result.selector)
        except StrategyError as e:
            raise MachineError(f"selector {r.result.selector.value} after {len(play)} moves: {e}")
        play.append(r.result.move, j)
        tape.append(r.result.move, j)


def interact(
    m: JpaMachine,
    game: Game,
    policy: OpponentPolicy,
    budget: int = INTERACT_BUDGET,
    observer: Optional[Observer] = None,
    machine_steps: int = MAX_STEPS,
) -> PlayTrace:
    position = drive(m, game, lambda s: policy.next_move(game, s), budget, observer, machine_steps).freeze()
    logger.info(f"interaction ended after {len(position)} occurrences")
    return PlayTrace(position, hide_position(game, position))


def count_answers(s: Position, inner: str = "E") -> int:
    """The numeral an external play reads at `inner`: its yes answers, closed by a no."""
    answers = [m.substance for m in s.moves if m.inner == inner and m.substance in ("yes", "no")]
    if not answers or answers[-1] != "no":
        raise MachineError(f"play at {inner} ends without a no answer")
    return len(answers) - 1


def _closed_machine(t: Term, expected) -> Tuple[CompiledMachine, Game]:
    _, ty = infer_type(t)
    if ty != expected:
        raise PcfTypeError(f"expected a closed term of type {expected}, got {ty}", *t.loc)
    d = denote(t)
    return compile_machine(d), game_of(d)


def evaluate_numeral(t: Term, budget: int = INTERACT_BUDGET) -> int:
    m, game = _closed_machine(t, NAT)
    return count_answers(interact(m, game, NumeralReader(), budget).external)


def evaluate_boolean(t: Term, budget: int = INTERACT_BUDGET) -> bool:
    m, game = _closed_machine(t, BOOL)
    answers = [x.substance for x in interact(m, game, BooleanReader(), budget).external.moves if x.inner == "E"]
    if "tt" in answers:
        return True
    if "ff" in answers:
        return False
    raise MachineError("boolean play ended without an answer")


# ===========================================================================================================================================================
# Standalone runs of first-order functions
# ===========================================================================================================================================================


@dataclass
class JStack(JTape):
    """A stack of blocks with stack-local edges, read back from its own cells.

    Block b is an O-block when b is even. Moves and pointers are decoded from
    the cells and edges, so a run on the stack never consults a play.
    """

    def push(self, move: Move, justifier: Optional[int]) -> int:
        return self.append(move, justifier)

    def __len__(self):
        return self.blocks

    def __getitem__(self, b: int) -> Move:
        start, dollar = self.starts[b], self.dollars[b]
        tags = self.cells[start:dollar - 1]
        try:
            return Move.from_symbol(self.cells[dollar - 1], OuterTag(tuple(parse_token(t) for t in reversed(tags))))
        except TagError as e:
            raise MachineError(f"stack block {b}: {e}")

    def justifier(self, b: int) -> Optional[int]:
        target = self.edges.get(self.dollars[b])
        return None if target is None else self.block_of_dollar(target)

    @property
    def pointers(self) -> "EdgePointers":
        return EdgePointers(self)

    def view(self, limit: Optional[int] = None) -> List[int]:
        """P-view blocks, topmost first, found by following the stack's edges."""
        out: List[int] = []
        b: Optional[int] = self.blocks - 1
        while b is not None and b >= 0 and (limit is None or len(out) < limit):
            out.append(b)
            b = b - 1 if b % 2 == 1 else self.justifier(b)
        return out


@dataclass(frozen=True)
class EdgePointers:
    """Justifier indices of a stack's blocks, read off its edges on demand."""

    stack: JStack

    def __len__(self):
        return self.stack.blocks

    def __getitem__(self, b: int) -> Optional[int]:
        return self.stack.justifier(b)


def _first_order(game: Game) -> Unsupported:
    return Unsupported(f"standalone runs read natural numbers only, got {game}")


def _leaves(game: Game, suffix: str) -> List[str]:
    if isinstance(game, Product):
        return _leaves(game.left, "W" + suffix) + _leaves(game.right, "E" + suffix)
    if isinstance(game, LazyNatGame):
        return [suffix]
    if isinstance(game, TerminalGame):
        return []
    raise _first_order(game)


def argument_inners(domain: Game, codomain: Game) -> Tuple[List[str], str]:
    """Inner tags of the argument questions and of the result, for N^k => N."""
    args = _leaves(domain, "W")
    suffix = "E"
    game = codomain
    while isinstance(game, Lolli):
        if not isinstance(game.domain, Bang) or not isinstance(game.domain.game, LazyNatGame):
            raise _first_order(game)
        args.append("W" + suffix)
        suffix = "E" + suffix
        game = game.codomain
    if not isinstance(game, LazyNatGame):
        raise _first_order(game)
    return args, suffix


def _answered(stack: JStack, b: int) -> int:
    """Yes answers on the edge chain of question block b inside its own argument."""
    home = stack[b].inner
    count = 0
    k = stack.justifier(b)
    while k is not None and stack[k].inner == home:
        if stack[k].substance == "yes":
            count += 1
        k = stack.justifier(k)
    return count


def _standalone_answer(stack: JStack, args: List[str], result: str, inputs: Sequence[int]) -> Optional[OMove]:
    b = stack.blocks - 1
    last = stack[b]
    if last.inner == result:
        return (Move("q", result), b) if last.substance == "yes" else None
    if last.inner in args and last.substance in ("qhat", "q"):
        n = inputs[args.index(last.inner)]
        return Move("yes" if _answered(stack, b) < n else "no", last.inner, last.outer), b
    raise MachineError(f"standalone run cannot answer {last}")


def jsa_standalone_run(
    d: Description,
    inputs: Sequence[int],
    budget: int = INTERACT_BUDGET,
    machine_steps: int = MAX_STEPS,
) -> int:
    """Runs the machine of an N^k => N description on its own stack against numeral inputs.

    Every block goes onto one JStack. The machine reads the stack as its tape,
    its selectors resolve on the stack's P-view and argument questions are
    answered by following stack edges: yes while the argument has been read
    fewer times than its input, then no.
    """
    args, result = argument_inners(d.domain, d.codomain)
    if len(args) != len(inputs):
        raise MachineError(f"{len(args)} arguments expected, {len(inputs)} given")
    if any(n < 0 for n in inputs):
        raise MachineError("inputs must be natural numbers")
    m, game = compile_machine(d), game_of(d)
    stack = JStack()
    stack.push(Move("qhat", result), None)
    remaining = machine_steps
    while True:
        if stack.blocks >= budget:
            raise Diverged(f"standalone run exceeded {budget} occurrences")
        r = execute(m, stack, remaining)
        remaining -= r.steps
        if r.result is None:
            break
        try:
            j = resolve_selector(stack, r.result.selector, stack.view(5))
        except StrategyError as e:
            raise MachineError(f"selector {r.result.selector.value} on a stack of {stack.blocks} blocks: {e}")
        stack.push(r.result.move, j)
        top = stack.blocks - 1
        if game.label(stack[top]) == PI:
            stack.push(game.dummy(stack[top]), dum_justifier(game, stack, top))
            continue
        o_move = _standalone_answer(stack, args, result, inputs)
        if o_move is None:
            break
        stack.push(*o_move)
    logger.info(f"standalone run on {list(inputs)} took {stack.blocks} occurrences")
    return count_answers(hide_position(game, decode_tape(stack)), result)
