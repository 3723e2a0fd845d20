"""PCF types, terms, the recursive-descent parser and type inference.

Concrete syntax:

    expr := fun x: T. expr | fix x [: T]. expr | app
    app  := (succ | pred | ifz | fst | snd) app | case atom atom atom | atom atom*
    atom := zero | tt | ff | x | ( expr ) | ( expr , expr )
    T    := P -> T | P            P := B * B * ...         B := nat | bool | unit | ( T )

`case e1 e2 b` yields e1 when b is tt and e2 when b is ff.
"""

import re, logging
from dataclasses import dataclass, field, replace
from itertools import count
from typing import Dict, List, Optional, Tuple, Union

from utils.errors import PcfSyntaxError, PcfTypeError

logger = logging.getLogger(__name__)

# ===========================================================================================================================================================
# Types
# ===========================================================================================================================================================


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "PcfType"
    cod: "PcfType"

    def __str__(self):
        dom = f"({self.dom})" if isinstance(self.dom, Arrow) else str(self.dom)
        return f"{dom} -> {self.cod}"


@dataclass(frozen=True)
class Prod:
    left: "PcfType"
    right: "PcfType"

    def __str__(self):
        left = f"({self.left})" if isinstance(self.left, Arrow) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, (Arrow, Prod)) else str(self.right)
        return f"{left} * {right}"


@dataclass(frozen=True)
class TVar:
    """Unification variable; never survives elaboration."""

    ident: int

    def __str__(self):
        return f"'t{self.ident}"


PcfType = Union[Base, Arrow, Prod, TVar]

NAT = Base("nat")
BOOL = Base("bool")
UNIT = Base("unit")

# ===========================================================================================================================================================
# Terms
# ===========================================================================================================================================================

Loc = Tuple[int, int]


@dataclass(frozen=True)
class Term:
    loc: Loc = field(default=(0, 0), compare=False, kw_only=True)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Lam(Term):
    name: str
    ty: PcfType
    body: Term


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Fst(Term):
    body: Term


@dataclass(frozen=True)
class Snd(Term):
    body: Term


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class Succ(Term):
    body: Term


@dataclass(frozen=True)
class Pred(Term):
    body: Term


@dataclass(frozen=True)
class Ifz(Term):
    body: Term


@dataclass(frozen=True)
class Case(Term):
    then: Term
    orelse: Term
    cond: Term


@dataclass(frozen=True)
class Fix(Term):
    name: str
    ty: Optional[PcfType]
    body: Term


@dataclass(frozen=True)
class Tt(Term):
    pass


@dataclass(frozen=True)
class Ff(Term):
    pass


def show(t: Term) -> str:
    """Source-like rendering, fully parenthesized."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"(fun {t.name}: {t.ty}. {show(t.body)})"
    if isinstance(t, Fix):
        ann = f": {t.ty}" if t.ty is not None else ""
        return f"(fix {t.name}{ann}. {show(t.body)})"
    if isinstance(t, App):
        return f"({show(t.fn)} {show(t.arg)})"
    if isinstance(t, Pair):
        return f"({show(t.left)}, {show(t.right)})"
    if isinstance(t, Case):
        return f"(case {show(t.then)} {show(t.orelse)} {show(t.cond)})"
    for cls, word in ((Fst, "fst"), (Snd, "snd"), (Succ, "succ"), (Pred, "pred"), (Ifz, "ifz")):
        if isinstance(t, cls):
            return f"({word} {show(t.body)})"
    return {Zero: "zero", Tt: "tt", Ff: "ff"}[type(t)]


# ===========================================================================================================================================================
# Tokenizer
# ===========================================================================================================================================================

KEYWORDS = {"fun", "fix", "zero", "succ", "pred", "ifz", "case", "tt", "ff", "fst", "snd", "nat", "bool", "unit"}
_TOKEN = re.compile(r"\s+|#[^\n]*|->|[A-Za-z_][A-Za-z0-9_']*|[():.,*]")


@dataclass(frozen=True)
class Lexeme:
    text: str
    line: int
    column: int


def tokenize(source: str) -> List[Lexeme]:
    out, line, col, pos = [], 1, 1, 0
    while pos < len(source):
        match = _TOKEN.match(source, pos)
        if not match:
            raise PcfSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        text = match.group()
        if not text[0].isspace() and text[0] != "#":
            out.append(Lexeme(text, line, col))
        for ch in text:
            line, col = (line + 1, 1) if ch == "\n" else (line, col + 1)
        pos = match.end()
    out.append(Lexeme("<eof>", line, col))
    return out


class TokenStream:
    def __init__(self, lexemes: List[Lexeme]):
        self.lexemes = lexemes
        self.pos = 0

    def peek(self) -> Lexeme:
        return self.lexemes[self.pos]

    def next(self) -> str:
        return self.peek().text

    def where(self) -> Loc:
        lx = self.peek()
        return lx.line, lx.column

    def fail(self, message: str):
        lx = self.peek()
        raise PcfSyntaxError(message, lx.line, lx.column)

    def eat(self, text: str) -> Lexeme:
        if self.next() != text:
            self.fail(f"expected {text!r}, found {self.next()!r}")
        lx = self.peek()
        self.pos += 1
        return lx

    def eat_name(self) -> str:
        text = self.next()
        if text in KEYWORDS or not (text[0].isalpha() or text[0] == "_"):
            self.fail(f"expected a variable name, found {text!r}")
        self.pos += 1
        return text


# ===========================================================================================================================================================
# Parser
# ===========================================================================================================================================================

_PREFIX = {"succ": Succ, "pred": Pred, "ifz": Ifz, "fst": Fst, "snd": Snd}
_ATOM_START = {"zero", "tt", "ff", "("}


def _starts_atom(text: str) -> bool:
    return text in _ATOM_START or (text not in KEYWORDS and (text[0].isalpha() or text[0] == "_"))


def parse_type(tokens: TokenStream) -> PcfType:
    left = _parse_prod_type(tokens)
    if tokens.next() == "->":
        tokens.eat("->")
        return Arrow(left, parse_type(tokens))
    return left


def _parse_prod_type(tokens: TokenStream) -> PcfType:
    ty = _parse_base_type(tokens)
    while tokens.next() == "*":
        tokens.eat("*")
        ty = Prod(ty, _parse_base_type(tokens))
    return ty


def _parse_base_type(tokens: TokenStream) -> PcfType:
    text = tokens.next()
    if text in ("nat", "bool", "unit"):
        tokens.eat(text)
        return Base(text)
    if text == "(":
        tokens.eat("(")
        ty = parse_type(tokens)
        tokens.eat(")")
        return ty
    tokens.fail(f"expected a type, found {text!r}")


def parse_expr(tokens: TokenStream) -> Term:
    where = tokens.where()
    if tokens.next() == "fun":
        tokens.eat("fun")
        name = tokens.eat_name()
        tokens.eat(":")
        ty = parse_type(tokens)
        tokens.eat(".")
        return Lam(name, ty, parse_expr(tokens), loc=where)
    if tokens.next() == "fix":
        tokens.eat("fix")
        name = tokens.eat_name()
        ty = None
        if tokens.next() == ":":
            tokens.eat(":")
            ty = parse_type(tokens)
        tokens.eat(".")
        return Fix(name, ty, parse_expr(tokens), loc=where)
    return parse_app(tokens)


def parse_app(tokens: TokenStream) -> Term:
    where = tokens.where()
    text = tokens.next()
    if text in _PREFIX:
        tokens.eat(text)
        return _PREFIX[text](parse_app(tokens), loc=where)
    if text == "case":
        tokens.eat("case")
        then = parse_atom(tokens)
        orelse = parse_atom(tokens)
        return Case(then, orelse, parse_atom(tokens), loc=where)
    term = parse_atom(tokens)
    while _starts_atom(tokens.next()):
        where = tokens.where()
        term = App(term, parse_atom(tokens), loc=where)
    return term


def parse_atom(tokens: TokenStream) -> Term:
    where = tokens.where()
    text = tokens.next()
    if text == "zero":
        tokens.eat(text)
        return Zero(loc=where)
    if text == "tt":
        tokens.eat(text)
        return Tt(loc=where)
    if text == "ff":
        tokens.eat(text)
        return Ff(loc=where)
    if text == "(":
        tokens.eat("(")
        first = parse_expr(tokens)
        if tokens.next() == ",":
            tokens.eat(",")
            second = parse_expr(tokens)
            tokens.eat(")")
            return Pair(first, second, loc=where)
        tokens.eat(")")
        return first
    if text == "<eof>":
        tokens.fail("unexpected end of input")
    return Var(tokens.eat_name(), loc=where)


def parse_program(source: str) -> Term:
    tokens = TokenStream(tokenize(source))
    if tokens.next() == "<eof>":
        tokens.fail("empty program")
    term = parse_expr(tokens)
    if tokens.next() != "<eof>":
        tokens.fail(f"unexpected {tokens.next()!r} after the end of the term")
    return term


def parse_type_text(source: str) -> PcfType:
    tokens = TokenStream(tokenize(source))
    ty = parse_type(tokens)
    if tokens.next() != "<eof>":
        tokens.fail(f"unexpected {tokens.next()!r} after the type")
    return ty


# ===========================================================================================================================================================
# Type inference
# ===========================================================================================================================================================


class _Inference:
    def __init__(self):
        self.subst: Dict[int, PcfType] = {}
        self.fresh = count()
        self.fix_types: Dict[int, PcfType] = {}

    def var(self) -> TVar:
        return TVar(next(self.fresh))

    def resolve(self, ty: PcfType) -> PcfType:
        while isinstance(ty, TVar) and ty.ident in self.subst:
            ty = self.subst[ty.ident]
        if isinstance(ty, Arrow):
            return Arrow(self.resolve(ty.dom), self.resolve(ty.cod))
        if isinstance(ty, Prod):
            return Prod(self.resolve(ty.left), self.resolve(ty.right))
        return ty

    def _occurs(self, ident: int, ty: PcfType) -> bool:
        ty = self.resolve(ty)
        if isinstance(ty, TVar):
            return ty.ident == ident
        if isinstance(ty, Arrow):
            return self._occurs(ident, ty.dom) or self._occurs(ident, ty.cod)
        if isinstance(ty, Prod):
            return self._occurs(ident, ty.left) or self._occurs(ident, ty.right)
        return False

    def unify(self, a: PcfType, b: PcfType, at: Term, what: str):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, TVar) or isinstance(b, TVar):
            v, other = (a, b) if isinstance(a, TVar) else (b, a)
            if self._occurs(v.ident, other):
                raise PcfTypeError(f"{what}: infinite type {v} = {other}", *at.loc)
            self.subst[v.ident] = other
            return
        if type(a) is type(b) and isinstance(a, Arrow):
            self.unify(a.dom, b.dom, at, what)
            self.unify(a.cod, b.cod, at, what)
            return
        if type(a) is type(b) and isinstance(a, Prod):
            self.unify(a.left, b.left, at, what)
            self.unify(a.right, b.right, at, what)
            return
        raise PcfTypeError(f"{what}: expected {self.show(b)}, found {self.show(a)}", *at.loc)

    def show(self, ty: PcfType) -> str:
        return str(self.resolve(ty))

    def infer(self, t: Term, env: Dict[str, PcfType]) -> PcfType:
        if isinstance(t, Var):
            if t.name not in env:
                raise PcfTypeError(f"unbound variable {t.name}", *t.loc)
            return env[t.name]
        if isinstance(t, Lam):
            return Arrow(t.ty, self.infer(t.body, {**env, t.name: t.ty}))
        if isinstance(t, Fix):
            ty = t.ty if t.ty is not None else self.var()
            self.fix_types[id(t)] = ty
            self.unify(self.infer(t.body, {**env, t.name: ty}), ty, t, "fix body")
            return ty
        if isinstance(t, App):
            fn = self.infer(t.fn, env)
            arg = self.infer(t.arg, env)
            result = self.var()
            self.unify(fn, Arrow(arg, result), t, "application")
            return result
        if isinstance(t, Pair):
            return Prod(self.infer(t.left, env), self.infer(t.right, env))
        if isinstance(t, (Fst, Snd)):
            left, right = self.var(), self.var()
            self.unify(self.infer(t.body, env), Prod(left, right), t, "projection")
            return left if isinstance(t, Fst) else right
        if isinstance(t, Zero):
            return NAT
        if isinstance(t, (Succ, Pred, Ifz)):
            self.unify(self.infer(t.body, env), NAT, t, type(t).__name__.lower())
            return BOOL if isinstance(t, Ifz) else NAT
        if isinstance(t, Case):
            self.unify(self.infer(t.cond, env), BOOL, t.cond, "case condition")
            then = self.infer(t.then, env)
            self.unify(self.infer(t.orelse, env), then, t.orelse, "case branches")
            return then
        if isinstance(t, (Tt, Ff)):
            return BOOL
        raise PcfTypeError(f"unknown term {t!r}", *t.loc)

    def ground(self, ty: PcfType) -> PcfType:
        """Resolved type with leftover variables defaulted to nat."""
        ty = self.resolve(ty)
        if isinstance(ty, TVar):
            return NAT
        if isinstance(ty, Arrow):
            return Arrow(self.ground(ty.dom), self.ground(ty.cod))
        if isinstance(ty, Prod):
            return Prod(self.ground(ty.left), self.ground(ty.right))
        return ty


def _elaborate(t: Term, inf: _Inference, fix_types: Dict[int, PcfType]) -> Term:
    if isinstance(t, Fix):
        return replace(t, ty=inf.ground(fix_types[id(t)]), body=_elaborate(t.body, inf, fix_types))
    kids = {}
    for name in ("body", "fn", "arg", "left", "right", "then", "orelse", "cond"):
        if hasattr(t, name):
            kids[name] = _elaborate(getattr(t, name), inf, fix_types)
    return replace(t, **kids) if kids else t


def infer_type(term: Term, env: Optional[Dict[str, PcfType]] = None) -> Tuple[Term, PcfType]:
    """Infers the type of a term and returns it elaborated: every fix binder annotated.

    Raises:
        PcfTypeError: with the location of the offending subterm.
    """
    inf = _Inference()
    ty = inf.infer(term, dict(env or {}))
    elaborated = _elaborate(term, inf, inf.fix_types)
    result = inf.ground(ty)
    logger.debug(f"{show(elaborated)} : {result}")
    return elaborated, result


def type_of(t: Term, env: Dict[str, PcfType]) -> PcfType:
    """Type of an elaborated term; every binder must carry its annotation."""
    _, ty = infer_type(t, env)
    return ty
