"""Moves, positions, legality, views and the concrete base games."""

import re, logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

from semantics.tags import EMPTY, OuterTag, TagError, validate_inner
from utils.errors import IllegalPosition, Verdict

logger = logging.getLogger(__name__)

# ===========================================================================================================================================================
# Labels, moves and positions
# ===========================================================================================================================================================


class Player(str, Enum):
    O = "O"
    P = "P"

    def flip(self) -> "Player":
        return Player.P if self is Player.O else Player.O


class Locality(str, Enum):
    E = "E"
    I = "I"


@dataclass(frozen=True)
class Label:
    player: Player
    locality: Locality

    @property
    def external(self) -> bool:
        return self.locality is Locality.E

    def flipped(self) -> "Label":
        return Label(self.player.flip(), self.locality)

    def internal(self) -> "Label":
        return Label(self.player, Locality.I)

    def __str__(self) -> str:
        return f"{self.player.value}{self.locality.value}"


OE = Label(Player.O, Locality.E)
PE = Label(Player.P, Locality.E)
OI = Label(Player.O, Locality.I)
PI = Label(Player.P, Locality.I)

_TRACE_MOVE = re.compile(r"^([a-z][a-z0-9]*)([WENS]*)_\{(.*)\}$")


@dataclass(frozen=True)
class Move:
    """A tagged element: substance, inner tag (last letter outermost) and outer tag."""

    substance: str
    inner: str = ""
    outer: OuterTag = EMPTY

    def __post_init__(self):
        validate_inner(self.inner)

    @property
    def symbol(self) -> str:
        return f"{self.substance}_{self.inner}"

    def with_inner(self, inner: str) -> "Move":
        return Move(self.substance, inner, self.outer)

    def with_outer(self, outer: OuterTag) -> "Move":
        return Move(self.substance, self.inner, outer)

    @classmethod
    def from_symbol(cls, symbol: str, outer: OuterTag = EMPTY) -> "Move":
        substance, sep, inner = symbol.rpartition("_")
        if not sep or not substance:
            raise TagError(f"bad move symbol {symbol!r}")
        return cls(substance, inner, outer)

    @classmethod
    def parse(cls, text: str) -> "Move":
        match = _TRACE_MOVE.match(text.strip())
        if not match:
            raise TagError(f"bad move {text!r}")
        return cls(match.group(1), match.group(2), OuterTag.parse(match.group(3)))

    def __str__(self) -> str:
        return f"{self.substance}{self.inner}_{{{self.outer}}}"


@dataclass(frozen=True)
class Position:
    """Move occurrences with 0-based justifier indices (None for initial occurrences)."""

    moves: Tuple[Move, ...] = ()
    pointers: Tuple[Optional[int], ...] = ()

    def __len__(self) -> int:
        return len(self.moves)

    def __getitem__(self, i: int) -> Move:
        return self.moves[i]

    @property
    def last(self) -> Move:
        return self.moves[-1]

    def justifier(self, i: int) -> Optional[int]:
        return self.pointers[i]

    def extend(self, move: Move, justifier: Optional[int] = None) -> "Position":
        return Position(self.moves + (move,), self.pointers + (justifier,))

    def prefix(self, n: int) -> "Position":
        return Position(self.moves[:n], self.pointers[:n])

    @classmethod
    def of(cls, *occurrences: Tuple[Move, Optional[int]]) -> "Position":
        return cls(tuple(m for m, _ in occurrences), tuple(j for _, j in occurrences))


def project(s: Position, select: Callable[[Move], Optional[Move]]) -> Tuple[Position, List[int]]:
    """Keeps the occurrences `select` maps to a local move; pointers leaving the selection are dropped.

    Returns:
        The projected position and the global index of each local occurrence.
    """
    index: Dict[int, int] = {}
    moves, pointers, origin = [], [], []
    for i, (m, j) in enumerate(zip(s.moves, s.pointers)):
        local = select(m)
        if local is None:
            continue
        index[i] = len(moves)
        moves.append(local)
        pointers.append(index.get(j) if j is not None else None)
        origin.append(i)
    return Position(tuple(moves), tuple(pointers)), origin


# ===========================================================================================================================================================
# Games
# ===========================================================================================================================================================


class Game(ABC):
    """An arena together with its prefix-closed set of positions."""

    normalized: bool = True

    @abstractmethod
    def label(self, move: Move) -> Optional[Label]:
        """The (O/P, E/I) label, or None when the move is not in the arena."""

    @abstractmethod
    def is_initial(self, move: Move) -> bool:
        """Initiality only depends on substance and inner tag."""

    def dummy(self, move: Move) -> Move:
        raise IllegalPosition("Dum", detail=f"{move} has no dummy in {self}")

    @abstractmethod
    def positions_ok(self, s: Position) -> Verdict:
        """Game-specific membership of a legal position."""

    @abstractmethod
    def move_candidates(self, s: Position) -> Iterable[Move]:
        """A finite superset of the moves that may extend s."""

    def accepts(self, s: Position) -> Verdict:
        verdict = check_legal(self, s)
        if not verdict:
            return verdict
        return self.positions_ok(s)

    def candidates(self, s: Position, external_only: bool = True) -> Iterator[Tuple[Move, Optional[int]]]:
        """Accepted one-move extensions of s, with their justifiers."""
        parity = len(s) % 2
        seen = set()
        for m in self.move_candidates(s):
            if m in seen:
                continue
            seen.add(m)
            lab = self.label(m)
            if lab is None or (external_only and not lab.external):
                continue
            pointers = [None] + [j for j in range(len(s) - 1, -1, -1) if j % 2 != parity]
            for j in pointers:
                if self.accepts(s.extend(m, j)):
                    yield m, j

    def symbol_initial(self, symbol: str) -> bool:
        return self.is_initial(Move.from_symbol(symbol))

    def home(self, move: Move) -> Optional[Tuple[Tuple[Hashable, ...], "Game", Move]]:
        """Path to the component a dummy lands in, that component and the local move; None for atomic games."""
        return None

    def descend(self, move: Move, path: Tuple[Hashable, ...]) -> Optional[Move]:
        """The local move along `path`, or None when the move lies elsewhere."""
        return None


def labels_of(game: Game, s: Position) -> List[Optional[Label]]:
    return [game.label(m) for m in s.moves]


def dum_justifier(game: Game, s: Position, p: int) -> int:
    """Justifier Dum forces on the dummy of the internal P-move at index p.

    Inside nested composites the plain rule may name a move internal to a
    sibling component; the pointer then follows justifiers back to the first
    occurrence in the component the dummy lands in, unless the dummy is
    initial there.
    """
    o_prime = s.pointers[p]
    if o_prime is None:
        raise IllegalPosition("Dum", p, "internal P-move without a justifier")
    j = o_prime - 1 if game.label(s[o_prime]) == OI else p
    located = game.home(game.dummy(s[p]))
    if located is None:
        return j
    path, component, local = located
    if component.is_initial(local):
        return j
    k: Optional[int] = j
    while k is not None:
        if game.descend(s[k], path) is not None:
            return k
        k = s.pointers[k]
    return j


def check_legal(game: Game, s: Position) -> Verdict:
    """Membership in the arena plus the axioms Alt, Jus, EI and Dum."""
    labels = labels_of(game, s)
    for i, (m, j) in enumerate(zip(s.moves, s.pointers)):
        lab = labels[i]
        if lab is None:
            return Verdict.reject(f"membership: {m} is not a move", i)
        expected = Player.O if i % 2 == 0 else Player.P
        if lab.player is not expected:
            return Verdict.reject(f"Alt: expected an {expected.value}-move", i)
        if game.is_initial(m):
            if j is not None:
                return Verdict.reject("Jus: initial occurrence with a justifier", i)
        else:
            if j is None or not 0 <= j < i or (i - j) % 2 == 0:
                return Verdict.reject("Jus: missing or misplaced justifier", i)
            if labels[j].locality is not lab.locality and lab.player is not Player.P:
                return Verdict.reject("Jus: O-move justified across E/I", i)
        if i > 0 and labels[i - 1].locality is not lab.locality and labels[i - 1].player is not Player.O:
            return Verdict.reject("EI: E/I switch after a P-move", i)
        if lab == OI:
            if i == 0 or labels[i - 1] != PI:
                return Verdict.reject("Dum: internal O-move not after an internal P-move", i)
            try:
                expected_move = game.dummy(s[i - 1])
                expected_j = dum_justifier(game, s, i - 1)
            except IllegalPosition as e:
                return Verdict.reject(str(e), i)
            if m != expected_move or j != expected_j:
                return Verdict.reject(f"Dum: expected {expected_move} @{expected_j}", i)
    return Verdict.accept()


def assert_legal(game: Game, s: Position) -> None:
    verdict = game.accepts(s)
    if not verdict:
        axiom = verdict.reason.split(":", 1)[0]
        raise IllegalPosition(axiom, verdict.index, verdict.reason)


# ===========================================================================================================================================================
# Pointer surgery and views
# ===========================================================================================================================================================


def j_subsequence(s: Position, keep: Iterable[int]) -> Position:
    """Subsequence whose pointers skip deleted occurrences along justifier chains."""
    kept = sorted(set(keep))
    index = {old: new for new, old in enumerate(kept)}
    pointers = []
    for old in kept:
        j = s.pointers[old]
        while j is not None and j not in index:
            j = s.pointers[j]
        pointers.append(None if j is None else index[j])
    return Position(tuple(s.moves[i] for i in kept), tuple(pointers))


def view_indices(s: Position, limit: Optional[int] = None) -> List[int]:
    """P-view indices, most recent first."""
    out: List[int] = []
    i = len(s) - 1
    while i >= 0 and (limit is None or len(out) < limit):
        out.append(i)
        if i % 2 == 1:
            i -= 1
        else:
            j = s.pointers[i]
            if j is None:
                break
            i = j
    return out


def view_tail(s: Position, k: int) -> List[int]:
    """The last k indices of the P-view, oldest first."""
    return list(reversed(view_indices(s, k)))


def _restrict(s: Position, indices: Sequence[int]) -> Position:
    index = {old: new for new, old in enumerate(indices)}
    return Position(
        tuple(s.moves[i] for i in indices),
        tuple(index.get(s.pointers[i]) if s.pointers[i] is not None else None for i in indices),
    )


def p_view(s: Position) -> Position:
    return _restrict(s, list(reversed(view_indices(s))))


def o_view(s: Position) -> Position:
    out: List[int] = []
    i = len(s) - 1
    while i >= 0:
        out.append(i)
        if i % 2 == 0:
            i -= 1
        else:
            j = s.pointers[i]
            if j is None:
                break
            i = j
    return _restrict(s, list(reversed(out)))


def external_indices(game: Game, s: Position) -> List[int]:
    return [i for i, m in enumerate(s.moves) if game.label(m).external]


def hide_position(game: Game, s: Position) -> Position:
    return j_subsequence(s, external_indices(game, s))


# ===========================================================================================================================================================
# Base games
# ===========================================================================================================================================================


@dataclass(frozen=True)
class _FlatGame(Game):
    """Games whose moves carry no tags."""

    def _plain(self, move: Move) -> Optional[str]:
        if move.inner or len(move.outer):
            return None
        return move.substance

    def label(self, move: Move) -> Optional[Label]:
        return self.LABELS.get(self._plain(move))

    def is_initial(self, move: Move) -> bool:
        return self._plain(move) == "qhat"

    def move_candidates(self, s: Position) -> Iterable[Move]:
        return [Move(name) for name in self.LABELS]


@dataclass(frozen=True)
class BooleanGame(_FlatGame):
    LABELS = {"qhat": OE, "tt": PE, "ff": PE}

    def positions_ok(self, s: Position) -> Verdict:
        if len(s) > 2:
            return Verdict.reject("boolean game: play ends after the answer", 2)
        if len(s) >= 1 and s[0].substance != "qhat":
            return Verdict.reject("boolean game: must open with qhat", 0)
        if len(s) == 2 and s[1].substance not in ("tt", "ff"):
            return Verdict.reject("boolean game: answer must be tt or ff", 1)
        return Verdict.accept()

    def __str__(self) -> str:
        return "2"


@dataclass(frozen=True)
class LazyNatGame(_FlatGame):
    LABELS = {"qhat": OE, "yes": PE, "q": OE, "no": PE}

    def positions_ok(self, s: Position) -> Verdict:
        for i, m in enumerate(s.moves):
            if i == 0:
                want = ("qhat",)
            elif i % 2 == 1:
                want = ("yes", "no")
            else:
                want = ("q",)
            if m.substance not in want:
                return Verdict.reject(f"lazy naturals: expected {'/'.join(want)}", i)
            if i > 0 and s.pointers[i] != i - 1:
                return Verdict.reject("lazy naturals: justifier must be the previous occurrence", i)
            if m.substance == "no" and i != len(s) - 1:
                return Verdict.reject("lazy naturals: play ends after no", i + 1)
        return Verdict.accept()

    def __str__(self) -> str:
        return "N"


@dataclass(frozen=True)
class TerminalGame(_FlatGame):
    LABELS = {}

    def positions_ok(self, s: Position) -> Verdict:
        return Verdict.accept() if len(s) == 0 else Verdict.reject("terminal game has no moves", 0)

    def __str__(self) -> str:
        return "T"


def boolean_game() -> BooleanGame:
    return BooleanGame()


def lazy_nat_game() -> LazyNatGame:
    return LazyNatGame()


def terminal_game() -> TerminalGame:
    return TerminalGame()


# ===========================================================================================================================================================
# Hiding and subgames
# ===========================================================================================================================================================


WITNESS_GAP = 4


@dataclass(frozen=True)
class HiddenGame(Game):
    """The hiding of a game: s is a position when some position t of the game hides to s.

    Witnesses are searched depth first over the moves of s, backtracking into
    earlier gaps. Before each external P-move the search inserts at most
    `gap` internal P-moves, each followed by its dummy, shortest runs first.
    """

    game: Game
    gap: int = WITNESS_GAP
    _witnesses: Dict[Position, Optional[Position]] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def label(self, move: Move) -> Optional[Label]:
        lab = self.game.label(move)
        return lab if lab is not None and lab.external else None

    def is_initial(self, move: Move) -> bool:
        return self.game.is_initial(move)

    def positions_ok(self, s: Position) -> Verdict:
        if self.witness(s) is None:
            return Verdict.reject(f"no position of {self.game} hides to it within {self.gap} internal moves per gap")
        return Verdict.accept()

    def witness(self, s: Position) -> Optional[Position]:
        """A position of the underlying game whose hiding is s, or None."""
        if s not in self._witnesses:
            self._witnesses[s] = next(self._witnesses_of(s, len(s)), None)
        return self._witnesses[s]

    def _witnesses_of(self, s: Position, n: int) -> Iterator[Position]:
        """Witnesses of the first n moves of s, depth first, backtracking over earlier gaps."""
        if n == 0:
            yield Position()
            return
        for t in self._witnesses_of(s, n - 1):
            yield from self._extend(t, s.prefix(n))

    def _extend(self, t: Position, s: Position) -> Iterator[Position]:
        m, j = s.last, s.pointers[-1]
        target = None if j is None else external_indices(self.game, t)[j]
        runs = range(self.gap + 1) if len(s) % 2 == 0 else range(1)
        for n in runs:
            for u in self._internal_runs(t, n):
                for k in [None] + list(range(len(u) - 1, -1, -1)):
                    if _external_ancestor(self.game, u, k) != target:
                        continue
                    v = u.extend(m, k)
                    if self.game.accepts(v):
                        yield v

    def _internal_runs(self, t: Position, n: int) -> Iterator[Position]:
        """Extensions of t by exactly n internal P-moves and their dummies."""
        if n == 0:
            yield t
            return
        for move, k in self.game.candidates(t, external_only=False):
            if self.game.label(move) != PI:
                continue
            u = t.extend(move, k)
            u = u.extend(self.game.dummy(move), dum_justifier(self.game, u, len(u) - 1))
            if self.game.accepts(u):
                yield from self._internal_runs(u, n - 1)

    def move_candidates(self, s: Position) -> Iterable[Move]:
        return self.game.ambient.move_candidates(s)

    def __str__(self) -> str:
        return f"H({self.game})"


def _external_ancestor(game: Game, s: Position, k: Optional[int]) -> Optional[int]:
    while k is not None and not game.label(s[k]).external:
        k = s.pointers[k]
    return k


def hide_game(g: Game) -> Game:
    if g.normalized:
        return g
    if isinstance(g, HiddenGame):
        return g
    return HiddenGame(g)


def enumerate_positions(game: Game, depth: int, external_only: bool = False) -> Iterator[Position]:
    """Depth-first enumeration of accepted positions up to the given length."""
    stack = [Position()]
    while stack:
        s = stack.pop()
        yield s
        if len(s) >= depth:
            continue
        if s and game.label(s.last) == PI:
            stack.append(s.extend(game.dummy(s.last), dum_justifier(game, s, len(s) - 1)))
            continue
        for m, j in game.candidates(s, external_only=external_only):
            stack.append(s.extend(m, j))


def is_subgame(h: Game, g: Game, depth: int) -> bool:
    """Bounded check of H being a subgame of G: labels, dummies and positions up to depth."""
    for s in enumerate_positions(h, depth):
        if not g.accepts(s):
            logger.debug(f"position not in supergame: {render_trace(s)}")
            return False
        for m in s.moves:
            if h.label(m) != g.label(m):
                return False
            if h.label(m) == PI and h.dummy(m) != g.dummy(m):
                return False
    return True


# ===========================================================================================================================================================
# Trace text format
# ===========================================================================================================================================================


def render_trace(s: Position) -> str:
    lines = []
    for i, (m, j) in enumerate(zip(s.moves, s.pointers)):
        lines.append(f"{i + 1}: {m} @{'init' if j is None else j + 1}")
    return "\n".join(lines)


def parse_trace(text: str) -> Position:
    s = Position()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        head, _, rest = line.partition(":")
        move_text, _, pointer = rest.strip().rpartition(" @")
        if not head.strip().isdigit() or int(head) != len(s) + 1 or not move_text:
            raise TagError(f"trace line {lineno}: malformed {line!r}")
        j = None if pointer == "init" else int(pointer) - 1
        s = s.extend(Move.parse(move_text), j)
    return s
