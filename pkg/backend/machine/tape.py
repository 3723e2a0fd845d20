"""J-pointing tapes: positions laid out as blocks with edges between their $ cells.

A block is the reversed outer tag, the move symbol and `$`, so reading a block
leftward from its `$` yields the symbol and then the tag tokens in order.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from semantics.games import Game, Move, Position, assert_legal
from semantics.tags import OuterTag, parse_token
from utils.errors import MachineError, TagError

logger = logging.getLogger(__name__)

START = "|-"
DOLLAR = "$"


@dataclass
class JTape:
    """Cells plus edges from $ cells to earlier $ cells.

    `dollars[b]` and `starts[b]` are the $ cell and the leftmost cell of block b.
    The Judge grows a tape block by block; machines only read it.
    """

    cells: List[str] = field(default_factory=lambda: [START])
    edges: Dict[int, int] = field(default_factory=dict)
    dollars: List[int] = field(default_factory=list)
    starts: List[int] = field(default_factory=list)

    def append(self, move: Move, justifier: Optional[int]) -> int:
        """Appends a block for the next occurrence; returns its $ cell."""
        if justifier is not None and not 0 <= justifier < len(self.dollars):
            raise MachineError(f"justifier {justifier} is not an earlier block")
        self.starts.append(len(self.cells))
        self.cells.extend(str(t) for t in reversed(move.outer.tokens))
        self.cells.extend((move.symbol, DOLLAR))
        dollar = len(self.cells) - 1
        self.dollars.append(dollar)
        if justifier is not None:
            self.edges[dollar] = self.dollars[justifier]
        return dollar

    @property
    def blocks(self) -> int:
        return len(self.dollars)

    def block_of_dollar(self, cell: int) -> int:
        lo, hi = 0, len(self.dollars) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            if self.dollars[mid] == cell:
                return mid
            if self.dollars[mid] < cell:
                lo = mid + 1
            else:
                hi = mid - 1
        raise MachineError(f"cell {cell} is not a $ cell")

    def block_at_start(self, cell: int) -> Optional[int]:
        """The block whose leftmost cell is `cell`, if any."""
        lo, hi = 0, len(self.starts) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            if self.starts[mid] == cell:
                return mid
            if self.starts[mid] < cell:
                lo = mid + 1
            else:
                hi = mid - 1
        return None

    def copy(self) -> "JTape":
        return JTape(list(self.cells), dict(self.edges), list(self.dollars), list(self.starts))


def encode_position(s: Position, game: Optional[Game] = None) -> JTape:
    """Tape of a position; when a game is given the position is checked first."""
    if game is not None:
        assert_legal(game, s)
    tape = JTape()
    for m, j in zip(s.moves, s.pointers):
        tape.append(m, j)
    return tape


def decode_tape(tape: JTape) -> Position:
    if not tape.cells or tape.cells[0] != START:
        raise MachineError("tape does not start with |-")
    s = Position()
    tokens: List[str] = []
    index: Dict[int, int] = {}
    for i, cell in enumerate(tape.cells[1:], start=1):
        if cell == DOLLAR:
            if not tokens:
                raise MachineError(f"empty block ending at cell {i}")
            symbol, tags = tokens[-1], tokens[:-1]
            try:
                outer = OuterTag(tuple(parse_token(t) for t in reversed(tags)))
                move = Move.from_symbol(symbol, outer)
            except TagError as e:
                raise MachineError(f"block ending at cell {i}: {e}")
            j = tape.edges.get(i)
            if j is not None and j not in index:
                raise MachineError(f"edge {i}>{j} does not point at an earlier $")
            index[i] = len(s)
            s = s.extend(move, None if j is None else index[j])
            tokens = []
        else:
            tokens.append(cell)
    if tokens:
        raise MachineError("tape ends inside a block")
    return s


def serialize_tape(tape: JTape) -> str:
    edges = " ".join(f"{src}>{dst}" for src, dst in sorted(tape.edges.items()))
    return "\n".join(["TAPE", " ".join(tape.cells), f"EDGES {edges}".rstrip()])


def parse_tape(text: str) -> JTape:
    lines = text.strip("\n").split("\n")
    if len(lines) != 3 or lines[0] != "TAPE" or not lines[2].startswith("EDGES"):
        raise MachineError("tape text must have TAPE, cells and EDGES lines")
    tape = JTape(cells=lines[1].split(), edges={})
    for pair in lines[2].split()[1:]:
        src, _, dst = pair.partition(">")
        if not src.isdigit() or not dst.isdigit():
            raise MachineError(f"bad edge {pair!r}")
        tape.edges[int(src)] = int(dst)
    tape.starts, tape.dollars = [], []
    start = 1
    for i, cell in enumerate(tape.cells):
        if cell == DOLLAR:
            tape.starts.append(start)
            tape.dollars.append(i)
            start = i + 1
    decode_tape(tape)
    return tape
