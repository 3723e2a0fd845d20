"""J-pushdown automata: configurations, the interpreter and stack results.

The interpreter owns the head discipline. A machine may move left, jump
along the edge of the $ it stands on, rewind once to the rightmost $ or halt.
Leaving an O-block leftward lands on its justifier's $ (or on |- when the
block is initial), so every $ a run visits lies in the current P-view.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, List, Optional, Sequence, Tuple

from machine.tape import DOLLAR, START, JTape
from semantics.games import Move
from semantics.strategies import STACK_SELECTORS, Selector
from semantics.tags import OuterTag, parse_token
from setup.init import MAX_STEPS
from utils.errors import Diverged, MachineError, TagError

logger = logging.getLogger(__name__)


class Motion(str, Enum):
    LEFT = "left"
    JUMP = "jump"
    REWIND = "rewind"
    HALT = "halt"


@dataclass(frozen=True)
class Transition:
    state: Hashable
    push: Tuple[str, ...] = ()
    motion: Motion = Motion.LEFT


class JpaMachine(ABC):
    """Deterministic, push-only; sees the symbol under the head and whether it carries an edge."""

    @property
    @abstractmethod
    def start(self) -> Hashable:
        ...

    @abstractmethod
    def transition(self, state: Hashable, symbol: str, edge: bool) -> Optional[Transition]:
        ...


@dataclass(frozen=True)
class JpaConfig:
    state: Hashable
    head: int
    stack: Tuple[str, ...] = (START,)
    rewound: bool = False
    halted: bool = False


@dataclass(frozen=True)
class StackResult:
    selector: Selector
    move: Move


@dataclass
class Run:
    result: Optional[StackResult]
    stack: Tuple[str, ...]
    steps: int
    visited: List[int] = field(default_factory=list)
    configs: List[JpaConfig] = field(default_factory=list)


def initial_config(m: JpaMachine, t: JTape) -> JpaConfig:
    if not t.dollars:
        raise MachineError("empty tape")
    return JpaConfig(m.start, t.dollars[-1])


def _left(c: JpaConfig, t: JTape) -> int:
    if c.head == 0:
        raise MachineError("head discipline: cannot move left of |-")
    block = t.block_at_start(c.head)
    if block is not None and block % 2 == 0:
        return t.edges.get(t.dollars[block], 0)
    return c.head - 1


def step(m: JpaMachine, c: JpaConfig, t: JTape) -> JpaConfig:
    if c.halted:
        raise MachineError("step on a halted configuration")
    symbol = t.cells[c.head]
    edge = c.head in t.edges
    tr = m.transition(c.state, symbol, edge)
    if tr is None:
        raise MachineError(f"stuck in {c.state!r} reading {symbol!r} at cell {c.head}")
    stack = c.stack + tuple(tr.push)
    if tr.motion is Motion.LEFT:
        return JpaConfig(tr.state, _left(c, t), stack, c.rewound)
    if tr.motion is Motion.JUMP:
        if not edge:
            raise MachineError(f"head discipline: no edge to jump along at cell {c.head}")
        return JpaConfig(tr.state, t.edges[c.head], stack, c.rewound)
    if tr.motion is Motion.REWIND:
        if c.rewound:
            raise MachineError("head discipline: second rewind in one run")
        return JpaConfig(tr.state, t.dollars[-1], stack, True)
    if tr.motion is Motion.HALT:
        return JpaConfig(tr.state, c.head, stack, c.rewound, True)
    raise MachineError(f"head discipline: motion {tr.motion!r} is not allowed")


def execute(m: JpaMachine, t: JTape, budget: int = MAX_STEPS, keep: bool = False) -> Run:
    """Runs a machine to a halt, recording the $ cells it visits."""
    c = initial_config(m, t)
    visited = [c.head]
    configs = [c] if keep else []
    steps = 0
    while not c.halted:
        if steps >= budget:
            raise Diverged(f"machine ran {budget} steps without halting")
        nxt = step(m, c, t)
        if len(nxt.stack) < len(c.stack):
            raise MachineError("stack shrank")
        c = nxt
        steps += 1
        if t.cells[c.head] == DOLLAR and not c.halted:
            visited.append(c.head)
        if keep:
            configs.append(c)
    logger.debug(f"run halted after {steps} steps with {len(c.stack)} stack symbols")
    return Run(decode_stack(c.stack), c.stack, steps, visited, configs)


def run(m: JpaMachine, t: JTape, budget: int = MAX_STEPS) -> Optional[StackResult]:
    return execute(m, t, budget).result


def decode_stack(stack: Sequence[str]) -> Optional[StackResult]:
    """|- J p e1 .. ek $ to a result; a bare |- means P has no move."""
    if not stack or stack[0] != START:
        raise MachineError("stack does not start with |-")
    if len(stack) == 1:
        return None
    if len(stack) < 4 or stack[-1] != DOLLAR:
        raise MachineError(f"malformed stack {' '.join(stack)}")
    if stack[1] not in STACK_SELECTORS:
        raise MachineError(f"unknown selector {stack[1]!r}")
    try:
        outer = OuterTag(tuple(parse_token(tok) for tok in stack[3:-1]))
        move = Move.from_symbol(stack[2], outer)
    except TagError as e:
        raise MachineError(f"malformed stack move: {e}")
    return StackResult(STACK_SELECTORS[stack[1]], move)


def dump_stack(stack: Sequence[str]) -> str:
    return "STACK\n" + " ".join(stack)
