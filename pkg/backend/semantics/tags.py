"""Tag calculus: inner tags, depth-annotated outer tags, the sequence codec,
and streaming tag rewrites shared by strategies and machines."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple, Union

from utils.errors import TagError, Verdict

INNER_LETTERS = frozenset("WENS")

# ===========================================================================================================================================================
# Inner tags
# ===========================================================================================================================================================


def validate_inner(tag: str) -> str:
    """Returns the tag unchanged if every letter is one of W/E/N/S."""
    bad = [c for c in tag if c not in INNER_LETTERS]
    if bad:
        raise TagError(f"inner tag {tag!r} contains {bad[0]!r}")
    return tag


# ===========================================================================================================================================================
# Tokens and extended outer tags
# ===========================================================================================================================================================


class Kind(str, Enum):
    ELL = "l"
    HBAR = "h"
    OPEN = "["
    CLOSE = "]"


@dataclass(frozen=True)
class Token:
    kind: Kind
    depth: int = -1  # brackets only

    def __str__(self) -> str:
        if self.kind in (Kind.OPEN, Kind.CLOSE):
            return f"{self.kind.value}{self.depth}"
        return self.kind.value

    @property
    def bracket(self) -> bool:
        return self.kind in (Kind.OPEN, Kind.CLOSE)

    def shifted(self, k: int) -> "Token":
        if not self.bracket or k == 0:
            return self
        if self.depth + k < 0:
            raise TagError(f"depth of {self} cannot drop by {-k}")
        return Token(self.kind, self.depth + k)


ELL = Token(Kind.ELL)
HBAR = Token(Kind.HBAR)


def opening(depth: int) -> Token:
    return Token(Kind.OPEN, depth)


def closing(depth: int) -> Token:
    return Token(Kind.CLOSE, depth)


def parse_token(text: str) -> Token:
    if text == "l":
        return ELL
    if text == "h":
        return HBAR
    if len(text) >= 2 and text[0] in "[]" and text[1:].isdigit():
        return Token(Kind.OPEN if text[0] == "[" else Kind.CLOSE, int(text[1:]))
    raise TagError(f"unknown tag token {text!r}")


@dataclass(frozen=True)
class OuterTag:
    """An extended outer tag: a token word with depth-annotated brackets."""

    tokens: Tuple[Token, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "OuterTag":
        return cls(tuple(parse_token(t) for t in text.split()))

    @classmethod
    def of(cls, *tokens: Token) -> "OuterTag":
        return cls(tuple(tokens))

    def __str__(self) -> str:
        return " ".join(str(t) for t in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __add__(self, other: "OuterTag") -> "OuterTag":
        return OuterTag(self.tokens + other.tokens)

    def promote(self, k: int = 1) -> "OuterTag":
        return OuterTag(tuple(t.shifted(k) for t in self.tokens))

    def decode(self) -> Tuple[int, ...]:
        return decode_tag(self)

    def check(self) -> Verdict:
        return check_wellformed(self)


EMPTY = OuterTag()


def thread(f: OuterTag = EMPTY) -> OuterTag:
    """The thread prefix Open(0) f+ Close(0) hbar."""
    return OuterTag((opening(0),) + f.promote().tokens + (closing(0), HBAR))


def promote_depths(e: OuterTag, k: int = 1) -> OuterTag:
    return e.promote(k)


# ===========================================================================================================================================================
# Grammar and well-formedness
# ===========================================================================================================================================================

Segment = Union[int, list]


def _parse_segments(tokens: Sequence[Token], pos: int, depth: int) -> Tuple[list, int]:
    """Parses ell-runs and bracket groups separated by hbar at one depth."""
    segments: list = []
    count, group, kind = 0, None, None
    while pos < len(tokens):
        tok = tokens[pos]
        if tok.kind is Kind.ELL:
            if kind == "group":
                raise TagError("ell cannot follow a bracket group", pos)
            count, kind = count + 1, "ell"
            pos += 1
        elif tok.kind is Kind.HBAR:
            segments.append(group if kind == "group" else count)
            count, group, kind = 0, None, None
            pos += 1
        elif tok.kind is Kind.OPEN:
            if tok.depth != depth:
                raise TagError(f"opening bracket should have depth {depth}", pos)
            if kind is not None:
                raise TagError("bracket group must stand alone between separators", pos)
            inner, end = _parse_segments(tokens, pos + 1, depth + 1)
            if end >= len(tokens):
                raise TagError("unclosed bracket", pos)
            if tokens[end].depth != depth:
                raise TagError(f"closing bracket should have depth {depth}", end)
            group, kind, pos = inner, "group", end + 1
        else:
            if depth == 0:
                raise TagError("unmatched closing bracket", pos)
            break
    segments.append(group if kind == "group" else count)
    return segments, pos


def _parse(e: OuterTag) -> list:
    segments, pos = _parse_segments(e.tokens, 0, 0)
    if pos != len(e.tokens):
        raise TagError("unmatched closing bracket", pos)
    return segments


def check_wellformed(e: OuterTag) -> Verdict:
    try:
        _parse(e)
    except TagError as err:
        return Verdict.reject(str(err), err.index)
    return Verdict.accept()


# ===========================================================================================================================================================
# Sequence codec and decoding
# ===========================================================================================================================================================


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(z: int) -> Tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def seq_encode(values: Iterable[int]) -> int:
    """Fold bijection from finite sequences of naturals onto the naturals."""
    code = 0
    for x in values:
        if x < 0:
            raise ValueError(f"negative entry {x}")
        code = cantor_pair(code, x) + 1
    return code


def seq_decode(n: int) -> Tuple[int, ...]:
    if n < 0:
        raise ValueError(f"negative code {n}")
    out = []
    while n > 0:
        n, x = cantor_unpair(n - 1)
        out.append(x)
    return tuple(reversed(out))


def _decode_segments(segments: list) -> Tuple[int, ...]:
    return tuple(s if isinstance(s, int) else seq_encode(_decode_segments(s)) for s in segments)


def decode_tag(e: OuterTag) -> Tuple[int, ...]:
    return _decode_segments(_parse(e))


# ===========================================================================================================================================================
# Streaming tag rewrites
# ===========================================================================================================================================================
# A rewrite is a finite-state transducer over tokens. States are hashable so
# that machine configurations embedding them stay comparable.


class Rewrite:
    def start(self):
        raise NotImplementedError

    def feed(self, state, tok: Token) -> Tuple[object, Tuple[Token, ...]]:
        raise NotImplementedError

    def finish(self, state) -> Tuple[Token, ...]:
        raise NotImplementedError

    def apply(self, e: OuterTag) -> OuterTag:
        state, out = self.start(), []
        for tok in e.tokens:
            state, emitted = self.feed(state, tok)
            out.extend(emitted)
        out.extend(self.finish(state))
        return OuterTag(tuple(out))


@dataclass(frozen=True)
class Emit:
    tokens: Tuple[Token, ...]


@dataclass(frozen=True)
class Expect:
    token: Token
    emit: Tuple[Token, ...] = ()


@dataclass(frozen=True)
class Group:
    """Runs to the close of the given depth; contents shifted, or dropped when shift is None."""

    close_depth: int
    shift: Optional[int] = 0
    emit: Tuple[Token, ...] = ()


@dataclass(frozen=True)
class Copy:
    pass


@dataclass(frozen=True)
class Drop:
    pass


Step = Union[Emit, Expect, Group, Copy, Drop]


@dataclass(frozen=True)
class Program(Rewrite):
    """A straight-line rewrite; a program without Copy/Drop ends after its last step."""

    name: str
    steps: Tuple[Step, ...]

    def start(self):
        return 0

    def _emits(self, i: int) -> Tuple[int, Tuple[Token, ...]]:
        out: Tuple[Token, ...] = ()
        while i < len(self.steps) and isinstance(self.steps[i], Emit):
            out += self.steps[i].tokens
            i += 1
        return i, out

    def done(self, state: int) -> bool:
        i, _ = self._emits(state)
        return i >= len(self.steps)

    def feed(self, state: int, tok: Token):
        i, out = self._emits(state)
        if i >= len(self.steps):
            raise TagError(f"{self.name}: unexpected trailing token {tok}")
        step = self.steps[i]
        if isinstance(step, Copy):
            return i, out + (tok,)
        if isinstance(step, Drop):
            return i, out
        if isinstance(step, Expect):
            if tok != step.token:
                raise TagError(f"{self.name}: expected {step.token}, read {tok}")
            return i + 1, out + step.emit
        if tok.kind is Kind.CLOSE and tok.depth == step.close_depth:
            return i + 1, out + step.emit
        if step.shift is None:
            return i, out
        return i, out + (tok.shifted(step.shift),)

    def finish(self, state: int) -> Tuple[Token, ...]:
        i, out = self._emits(state)
        if i < len(self.steps) and not isinstance(self.steps[i], (Copy, Drop)):
            raise TagError(f"{self.name}: tag ended early")
        if i < len(self.steps):
            _, tail = self._emits(i + 1)
            out += tail
        return out

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Pipe(Rewrite):
    """Output of first feeds second."""

    first: Rewrite
    second: Rewrite

    def start(self):
        return (self.first.start(), self.second.start())

    def _push(self, s2, toks):
        out: Tuple[Token, ...] = ()
        for t in toks:
            s2, emitted = self.second.feed(s2, t)
            out += emitted
        return s2, out

    def feed(self, state, tok):
        s1, s2 = state
        s1, mid = self.first.feed(s1, tok)
        s2, out = self._push(s2, mid)
        return (s1, s2), out

    def finish(self, state):
        s1, s2 = state
        s2, out = self._push(s2, self.first.finish(s1))
        return out + self.second.finish(s2)

    def __str__(self) -> str:
        return f"{self.first} | {self.second}"


@dataclass(frozen=True)
class Then(Rewrite):
    """Runs a terminating prefix program, then hands every later token to body."""

    prefix: Program
    body: Rewrite

    def start(self):
        return (self.prefix.start(), None)

    def feed(self, state, tok):
        ps, bs = state
        if bs is None:
            if not self.prefix.done(ps):
                ps, out = self.prefix.feed(ps, tok)
                return (ps, None), out
            bs = self.body.start()
            ps, pre = ps, self.prefix.finish(ps)
            bs, out = self.body.feed(bs, tok)
            return (ps, bs), pre + out
        bs, out = self.body.feed(bs, tok)
        return (ps, bs), out

    def finish(self, state):
        ps, bs = state
        if bs is None:
            pre = self.prefix.finish(ps)
            return pre + self.body.finish(self.body.start())
        return self.body.finish(bs)

    def __str__(self) -> str:
        return f"{self.prefix} ; {self.body}"


O0, O1, C0, C1 = opening(0), opening(1), closing(0), closing(1)

IDENTITY = Program("copy", (Copy(),))


def prepend(prefix: OuterTag, name: str = "") -> Program:
    return Program(name or f"prepend[{prefix}]", (Emit(prefix.tokens), Copy()))


def constant(tag: OuterTag) -> Program:
    return Program(f"const[{tag}]", (Emit(tag.tokens), Drop()))


PREPEND_THREAD = prepend(thread(), "enter-thread")
STRIP_THREAD = Program("leave-thread", (Expect(O0), Group(0, None), Expect(HBAR), Copy()))
# [0 a+ ]0 h [0 b+ ]0 h f  <->  [0 [1 a++ ]1 h [1 b++ ]1 ]0 h f
NEST_PAIR = Program(
    "nest-pair",
    (Expect(O0, (O0, O1)), Group(0, 1, (C1,)), Expect(HBAR, (HBAR,)), Expect(O0, (O1,)), Group(0, 1, (C1, C0)), Copy()),
)
UNNEST_PAIR = Program(
    "unnest-pair",
    (Expect(O0), Expect(O1, (O0,)), Group(1, -1, (C0,)), Expect(HBAR, (HBAR,)), Expect(O1, (O0,)), Group(1, -1, (C0,)), Expect(C0), Copy()),
)
# [0 ]0 h [0 g+ ]0 h e  <->  [0 [1 g++ ]1 ]0 h e
WRAP_ARGUMENT = Program(
    "wrap-argument",
    (Expect(O0), Group(0, None), Expect(HBAR), Expect(O0, (O0, O1)), Group(0, 1, (C1, C0)), Copy()),
)
UNWRAP_ARGUMENT = Program(
    "unwrap-argument",
    (Expect(O0, (O0, C0, HBAR, O0)), Expect(O1), Group(1, -1, (C0,)), Expect(C0), Copy()),
)


def _thread_prefix(src: str, out: Optional[str]) -> Program:
    """Reads the promotion thread of a composite tag and re-emits it for the output side."""
    keep = out is not None
    if src == "A":
        steps = (
            Expect(O0, (O0,) if out == "A" else ()),
            Expect(O1, (O1,) if out == "A" else (O0,) if keep else ()),
            Group(1, (0 if out == "A" else -1) if keep else None, ((C1,) if out == "A" else (C0,)) if keep else ()),
            Expect(HBAR, (HBAR,) if keep else ()),
        )
    else:
        steps = (
            Expect(O0, ((O0, O1) if out == "A" else (O0,)) if keep else ()),
            Group(0, (1 if out == "A" else 0) if keep else None, ((C1,) if out == "A" else (C0,)) if keep else ()),
            Expect(HBAR, (HBAR,) if keep else ()),
        )
    return Program(f"thread[{src}->{out or '-'}]", steps)


# local A-side tags [0 f+ ]0 h e sit in the composite as [1 f++ ]1 ]0 h e
_A_BODY_IN = Program("a-body-in", (Expect(O1, (O0,)), Group(1, -1, (C0,)), Expect(C0), Copy()))
_A_BODY_OUT = Program("a-body-out", (Expect(O0, (O1,)), Group(0, 1, (C1, C0)), Copy()))


def thread_layer(src: str, out: str, child: Rewrite) -> Rewrite:
    """Composite-level rewrite around a child rewrite working on local tags.

    Args:
        src: side ("A" or "B") of the block the tokens are read from.
        out: side of the move being written.
        child: the local rewrite.
    """
    body_in = _A_BODY_IN if src == "A" else IDENTITY
    body_out = _A_BODY_OUT if out == "A" else IDENTITY
    return Then(_thread_prefix(src, out), Pipe(Pipe(body_in, child), body_out))


def thread_strip(src: str) -> Rewrite:
    """Composite tag to local tag, dropping the thread."""
    return Then(_thread_prefix(src, None), _A_BODY_IN if src == "A" else IDENTITY)


def split_thread(e: OuterTag, side: str) -> Tuple[OuterTag, OuterTag]:
    """Splits a promoted tag into (thread f, local tag); f is returned undepthed (as f, not f+)."""
    toks = e.tokens
    start = 1 if side == "B" else 2
    close_depth = 0 if side == "B" else 1
    if len(toks) < start or toks[0] != O0 or (side == "A" and toks[1] != O1):
        raise TagError(f"tag {e} does not start a {side}-side thread")
    end = start
    while end < len(toks) and not (toks[end].kind is Kind.CLOSE and toks[end].depth == close_depth):
        end += 1
    if end + 1 >= len(toks) or toks[end + 1] != HBAR:
        raise TagError(f"tag {e} has no complete thread")
    f = OuterTag(toks[start:end]).promote(-(close_depth + 1))
    return f, thread_strip(side).apply(e)


def join_thread(f: OuterTag, local: OuterTag, side: str) -> OuterTag:
    """Inverse of split_thread."""
    if side == "B":
        return thread(f) + local
    return OuterTag((O0, O1) + f.promote(2).tokens + (C1, HBAR)) + _A_BODY_OUT.apply(local)
