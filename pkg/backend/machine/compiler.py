"""Compiling description trees to j-pushdown automata.

The compiled machine mirrors the strategy tree: a leaf per atomic view rule
and one node per construction. A run makes two leftward sweeps:

1. survey: read the last O-block, route its symbol down the tree to a leaf
   (pairing may leave several candidate routes), strip the promotion threads
   off its tag to find the leaf-local lead tokens, then read further P-view
   blocks until every candidate has its window and only one candidate is left;
2. emit: rewind, push the selector and the lifted symbol, walk to the source
   block of the leaf's decision and stream its tag through the thread layers
   of the route onto the stack.
"""

import logging
from dataclasses import dataclass, field, replace
from itertools import count
from typing import Hashable, Iterator, List, Optional, Tuple, Union

from machine.jpa import JpaMachine, Motion, Transition
from machine.tape import DOLLAR, START
from pcf.denote import Description, materialize
from semantics.constructions import (
    ConcatGame, ConcatStrategy, CurryGame, CurryStrategy, PairGame, PairStrategy, PromoteGame, PromoteStrategy,
)
from semantics.games import Game
from semantics.strategies import Strategy, ViewRule, ViewRuleStrategy, ViewWindow
from semantics.tags import IDENTITY, Pipe, Rewrite, Token, parse_token, thread_layer, thread_strip
from utils.errors import MachineError, TagError, Unsupported

logger = logging.getLogger(__name__)

# ===========================================================================================================================================================
# Compiled nodes
# ===========================================================================================================================================================


@dataclass(frozen=True, eq=False)
class Leaf:
    uid: int
    rule: ViewRule
    game: Game

    def child(self, part: str):
        raise MachineError(f"leaf {self.uid} has no parts")


@dataclass(frozen=True, eq=False)
class ConcatNode:
    uid: int
    game: ConcatGame
    left: "Node"
    right: "Node"

    def child(self, part):
        return self.left if part == "J" else self.right


@dataclass(frozen=True, eq=False)
class PairNode:
    uid: int
    game: PairGame
    left: "Node"
    right: "Node"

    def child(self, part):
        return self.left if part == "L" else self.right


@dataclass(frozen=True, eq=False)
class PromoteNode:
    uid: int
    game: PromoteGame
    body: "Node"

    def child(self, part):
        return self.body


@dataclass(frozen=True, eq=False)
class CurryNode:
    uid: int
    game: CurryGame
    body: "Node"

    def child(self, part):
        return self.body


Node = Union[Leaf, ConcatNode, PairNode, PromoteNode, CurryNode]


def build_nodes(sigma: Strategy, uids: Optional[Iterator[int]] = None) -> "Node":
    uids = uids if uids is not None else count()
    uid = next(uids)
    if isinstance(sigma, ViewRuleStrategy):
        return Leaf(uid, sigma.rule, sigma.game)
    if isinstance(sigma, ConcatStrategy):
        return ConcatNode(uid, sigma.game, build_nodes(sigma.left, uids), build_nodes(sigma.right, uids))
    if isinstance(sigma, PairStrategy):
        return PairNode(uid, sigma.game, build_nodes(sigma.left, uids), build_nodes(sigma.right, uids))
    if isinstance(sigma, PromoteStrategy):
        return PromoteNode(uid, sigma.game, build_nodes(sigma.body, uids))
    if isinstance(sigma, CurryStrategy):
        return CurryNode(uid, sigma.game, build_nodes(sigma.body, uids))
    raise Unsupported(f"no machine for {type(sigma).__name__}")


def walk(node: "Node") -> Iterator["Node"]:
    yield node
    if isinstance(node, (ConcatNode, PairNode)):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, (PromoteNode, CurryNode)):
        yield from walk(node.body)


# ===========================================================================================================================================================
# Routes
# ===========================================================================================================================================================


@dataclass(frozen=True)
class Route:
    """Path of a composite move down to a leaf.

    `sides` lists the promotion side (A or B) at every promotion node, outermost
    first; `ambiguous` lists trail positions of pairings entered through a
    shared-domain move.
    """

    trail: Tuple[Tuple[int, str], ...]
    leaf: Leaf
    inner: str
    sides: Tuple[str, ...] = ()
    ambiguous: Tuple[int, ...] = ()


def _under(uid: int, part: str, r: Route, side: Optional[str] = None, ambiguous: bool = False) -> Route:
    return Route(
        ((uid, part),) + r.trail,
        r.leaf,
        r.inner,
        ((side,) if side else ()) + r.sides,
        ((0,) if ambiguous else ()) + tuple(i + 1 for i in r.ambiguous),
    )


def routes(node: "Node", inner: str) -> List[Route]:
    if isinstance(node, Leaf):
        return [Route((), node, inner)]
    if isinstance(node, ConcatNode):
        routed = node.game.route(inner)
        if routed is None:
            return []
        part, local = routed
        return [_under(node.uid, part, r) for r in routes(node.child(part), local)]
    if isinstance(node, PairNode):
        options = PairGame.route(inner)
        return [
            _under(node.uid, part, r, ambiguous=len(options) > 1)
            for part, local in options
            for r in routes(node.child(part), local)
        ]
    if isinstance(node, PromoteNode):
        return [_under(node.uid, "T", r, side=PromoteGame.side(inner)) for r in routes(node.body, inner)]
    local = CurryGame.uncurry_inner(inner)
    if local is None:
        return []
    return [_under(node.uid, "G", r) for r in routes(node.body, local)]


def lift(node: "Node", trail: Tuple[Tuple[int, str], ...], inner: str) -> Tuple[str, Tuple[str, ...]]:
    """Composite inner tag of a leaf-local one along a trail, with its promotion sides."""
    if not trail:
        return inner, ()
    part = trail[0][1]
    local, sides = lift(node.child(part), trail[1:], inner)
    if isinstance(node, ConcatNode):
        return ConcatGame.lift_inner(part, local), sides
    if isinstance(node, PairNode):
        return PairGame.lift_inner(part, local), sides
    if isinstance(node, PromoteNode):
        return local, (PromoteGame.side(local),) + sides
    return CurryGame.curry_inner(local), sides


def strip_layers(sides: Tuple[str, ...]) -> Rewrite:
    """Composite tag to leaf-local tag."""
    rw: Rewrite = IDENTITY
    for side in reversed(sides):
        rw = Pipe(thread_strip(side), rw)
    return rw


def layered(src: Tuple[str, ...], out: Tuple[str, ...], leaf: Rewrite) -> Rewrite:
    """A leaf rewrite wrapped in the thread layers of every promotion on the route."""
    rw = leaf
    for s, o in reversed(list(zip(src, out))):
        rw = thread_layer(s, o, rw)
    return rw


# ===========================================================================================================================================================
# Machine states
# ===========================================================================================================================================================


@dataclass(frozen=True)
class Candidate:
    route: Route
    pipe: Rewrite
    pipe_state: Hashable
    lead: Tuple[Token, ...] = ()
    window: Tuple[str, ...] = ()
    source_sides: Tuple[Tuple[str, ...], ...] = ()  # promotion sides of view blocks 1 and 3
    closed: bool = False
    unresolved: Tuple[int, ...] = ()


@dataclass(frozen=True)
class Survey:
    block: int = 0
    candidates: Tuple[Candidate, ...] = ()


@dataclass(frozen=True)
class Emit:
    target: int
    rewrite: Rewrite
    rw_state: Hashable
    block: int = 0
    started: bool = False


@dataclass(frozen=True)
class Halted:
    pass


def _symbol_parts(symbol: str) -> Tuple[str, str]:
    sub, _, inner = symbol.rpartition("_")
    return sub, inner


def _is_token(cell: str) -> bool:
    return "_" not in cell and cell not in (START, DOLLAR)


@dataclass(frozen=True, eq=False)
class CompiledMachine(JpaMachine):
    root: "Node"
    description: Optional[Description] = None
    nodes: Tuple["Node", ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(walk(self.root)))

    @property
    def start(self):
        return Survey()

    def transition(self, state, symbol, edge):
        if isinstance(state, Survey):
            return self._survey(state, symbol)
        if isinstance(state, Emit):
            return self._emit(state, symbol)
        return None

    # ----- survey sweep -------------------------------------------------------------------------------------------------------------------------------------

    def _survey(self, st: Survey, symbol: str) -> Optional[Transition]:
        if symbol in (DOLLAR, START):
            candidates = st.candidates
            if st.block == 1:
                candidates = tuple(c for c in map(self._close_lead, candidates) if c is not None)
                if not candidates:
                    raise MachineError("no route survives the last O-block's tag")
            if st.block >= 1 and (symbol == START or self._settled(candidates)):
                return self._decide(candidates)
            return Transition(Survey(st.block + 1, candidates), (), Motion.LEFT)
        if _is_token(symbol):
            if st.block != 1:
                return Transition(st, (), Motion.LEFT)
            fed = tuple(c for c in (self._feed_lead(c, symbol) for c in st.candidates) if c is not None)
            return Transition(replace(st, candidates=fed), (), Motion.LEFT)
        sub, inner = _symbol_parts(symbol)
        found = routes(self.root, inner)
        if st.block == 1:
            if not found:
                raise MachineError(f"{symbol} routes to no component")
            fresh = []
            for r in found:
                pipe = strip_layers(r.sides)
                local = f"{sub}_{r.inner}"
                fresh.append(Candidate(
                    r, pipe, pipe.start(), (), (local,), (r.sides,), r.leaf.rule.initial(local), r.ambiguous,
                ))
            return Transition(Survey(1, tuple(fresh)), (), Motion.LEFT)
        kept = []
        for c in st.candidates:
            c = self._observe(c, st.block, sub, found)
            if c is not None:
                kept.append(c)
        return Transition(Survey(st.block, tuple(kept)), (), Motion.LEFT)

    def _feed_lead(self, c: Candidate, symbol: str) -> Optional[Candidate]:
        try:
            state, out = c.pipe.feed(c.pipe_state, parse_token(symbol))
        except TagError:
            return None
        return replace(c, pipe_state=state, lead=(c.lead + out)[:2])

    def _close_lead(self, c: Candidate) -> Optional[Candidate]:
        try:
            out = c.pipe.finish(c.pipe_state)
        except TagError:
            return None
        return replace(c, pipe_state=None, lead=(c.lead + out)[:2])

    def _observe(self, c: Candidate, block: int, sub: str, found: List[Route]) -> Optional[Candidate]:
        """Extends a candidate's window with one more view block and settles pairing sides."""
        trail = c.route.trail
        if not c.closed:
            same = [r for r in found if r.trail == trail]
            if same:
                local = f"{sub}_{same[0].inner}"
                window = c.window + (local,)
                initial = block % 2 == 1 and c.route.leaf.rule.initial(local)
                sides = c.source_sides + ((same[0].sides,) if block == 3 else ())
                c = replace(c, window=window, source_sides=sides, closed=initial or len(window) == 3)
            else:
                c = replace(c, closed=True)
        unresolved = []
        for d in c.unresolved:
            uid, part = trail[d]
            hits = [r for r in found if len(r.trail) > d and r.trail[:d] == trail[:d] and r.trail[d][0] == uid]
            parts = {r.trail[d][1] for r in hits}
            if len(parts) != 1 or any(d in r.ambiguous for r in hits):
                unresolved.append(d)
            elif parts != {part}:
                return None
        return replace(c, unresolved=tuple(unresolved))

    @staticmethod
    def _settled(candidates: Tuple[Candidate, ...]) -> bool:
        if not all(c.closed for c in candidates):
            return False
        return len(candidates) <= 1 or not any(c.unresolved for c in candidates)

    def _decide(self, candidates: Tuple[Candidate, ...]) -> Transition:
        if not candidates:
            raise MachineError("every candidate route was eliminated")
        c = candidates[0]
        decision = c.route.leaf.rule.decide(ViewWindow(c.window, c.lead))
        if decision is None:
            return Transition(Halted(), (), Motion.HALT)
        if decision.source - 1 >= len(c.window) or (decision.source == 3 and len(c.source_sides) < 2):
            raise MachineError(f"rule {c.route.leaf.rule.name} reads view block {decision.source} past its window")
        sub, local_inner = _symbol_parts(decision.symbol)
        inner, out_sides = lift(self.root, c.route.trail, local_inner)
        src_sides = c.source_sides[0 if decision.source == 1 else 1]
        rewrite = layered(src_sides, out_sides, decision.rewrite)
        logger.debug(f"leaf {c.route.leaf.uid} {c.route.leaf.rule.name}: {c.window} -> {decision.symbol}")
        emit = Emit(decision.source, rewrite, rewrite.start())
        return Transition(emit, (decision.selector.value, f"{sub}_{inner}"), Motion.REWIND)

    # ----- emit sweep ---------------------------------------------------------------------------------------------------------------------------------------

    def _emit(self, st: Emit, symbol: str) -> Optional[Transition]:
        if symbol in (DOLLAR, START):
            if st.started:
                try:
                    tail = st.rewrite.finish(st.rw_state)
                except TagError as e:
                    raise MachineError(f"tag rewrite {st.rewrite} failed: {e}")
                return Transition(Halted(), tuple(str(t) for t in tail) + (DOLLAR,), Motion.HALT)
            if symbol == START:
                return None
            return Transition(replace(st, block=st.block + 1), (), Motion.LEFT)
        if not _is_token(symbol):
            return Transition(replace(st, started=st.block == st.target), (), Motion.LEFT)
        if not st.started:
            return Transition(st, (), Motion.LEFT)
        try:
            state, out = st.rewrite.feed(st.rw_state, parse_token(symbol))
        except TagError as e:
            raise MachineError(f"tag rewrite {st.rewrite} failed: {e}")
        return Transition(replace(st, rw_state=state), tuple(str(t) for t in out), Motion.LEFT)

    # ----- listings -----------------------------------------------------------------------------------------------------------------------------------------

    def states(self) -> List[str]:
        lines = [
            "survey(block, candidates: route x lead-pipe x window<=3 x unresolved pairings) --rewind--> "
            "emit(block, source, layered rewrite state) --halt-->",
        ]
        for node in self.nodes:
            lines.append(f"[{node.uid}] {_node_schema(node)}")
        return lines

    def transitions(self) -> List[str]:
        lines = []
        for node in self.nodes:
            if isinstance(node, Leaf):
                lines.append(f"[{node.uid}] {node.rule.name} on {node.game}")
                lines.extend(f"  {row}" for row in node.rule.table())
        return lines


def _node_schema(node: "Node") -> str:
    if isinstance(node, Leaf):
        return f"leaf {node.rule.name}: window of 3 view symbols + 2 lead tokens"
    if isinstance(node, ConcatNode):
        return f"concat -> [{node.left.uid}] on *S/*W, [{node.right.uid}] on *N/*E"
    if isinstance(node, PairNode):
        return f"pair -> [{node.left.uid}] on *S/*WE, [{node.right.uid}] on *N/*EE, both on *W"
    if isinstance(node, PromoteNode):
        return f"promote -> [{node.body.uid}], thread layer A on *W, B otherwise"
    return f"curry -> [{node.body.uid}], retag *WE<->*EW, *W<->*WW, *E<->*EE, *N<->*S|*N"


def compile_strategy(sigma: Strategy, description: Optional[Description] = None) -> CompiledMachine:
    return CompiledMachine(build_nodes(sigma), description)


def compile_machine(d: Description) -> CompiledMachine:
    """Machine realizing materialize(d)."""
    machine = compile_strategy(materialize(d), d)
    logger.debug(f"compiled {len(machine.nodes)} nodes")
    return machine
