"""Invariant suites behind `verify`: codec, game axioms, machine-versus-strategy
agreement and PCF numeral identities."""

import logging
import random
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, List

from tqdm import tqdm

from machine.compiler import compile_machine
from machine.judge import Play, RandomLegal, evaluate_boolean, evaluate_numeral, interact, jsa_standalone_run
from machine.jpa import Run
from machine.tape import JTape, decode_tape, encode_position, parse_tape, serialize_tape
from pcf.atomic import PredRule
from pcf.denote import Description, atomic_node, denote_source, materialize
from pcf.syntax import parse_program
from semantics.constructions import ambient_of
from semantics.games import (
    PI, BooleanGame, Game, LazyNatGame, Position, check_legal, dum_justifier, enumerate_positions, hide_position,
    parse_trace, render_trace, view_indices,
)
from semantics.strategies import check_strategy, hide_strategy, resolve_selector
from semantics.tags import (
    HBAR, ELL, EMPTY, OuterTag, Token, check_wellformed, closing, decode_tag, join_thread, opening, seq_decode,
    seq_encode, split_thread, thread,
)
from setup.init import DEFAULT_SEED, VERIFY_DEPTH, VERIFY_SEEDS
from utils.errors import Diverged, WorkbenchError

logger = logging.getLogger(__name__)


@dataclass
class SuiteReport:
    name: str
    seed: int
    passed: int = 0
    total: int = 0
    failures: List[str] = field(default_factory=list)

    def check(self, ok: bool, what: str) -> None:
        self.total += 1
        if ok:
            self.passed += 1
        elif len(self.failures) < 20:
            self.failures.append(what)

    @property
    def ok(self) -> bool:
        return self.passed == self.total

    def summary(self) -> str:
        return f"{self.name}: {self.passed}/{self.total} checks passed (seed {self.seed})"


# ===========================================================================================================================================================
# Corpus
# ===========================================================================================================================================================

ADD = "fix add: nat -> nat -> nat. fun m: nat. fun n: nat. case n (succ (add (pred m) n)) (ifz m)"

MACHINE_CORPUS = [
    "zero",
    "succ zero",
    "succ (succ zero)",
    "pred zero",
    "pred (succ (succ zero))",
    "ifz zero",
    "ifz (succ zero)",
    "tt",
    "ff",
    "case zero (succ zero) tt",
    "case zero (succ zero) ff",
    "(fun x: nat. succ x) zero",
    "(fun x: nat. fun y: nat. y) zero (succ zero)",
    "fst (succ zero, zero)",
    "snd (zero, succ zero)",
    "fun x: nat. x",
    "fun x: nat. pred x",
    "fun x: nat. succ (succ x)",
    "fun x: nat. ifz x",
    "fun b: bool. case zero (succ zero) b",
    "fun x: nat. fun y: nat. case y x (ifz x)",
    f"({ADD}) (succ zero) zero",
]

# (word, hand-computed decoding)
DECODED_WORDS = [
    ("", (0,)),
    ("l", (1,)),
    ("l l l", (3,)),
    ("h", (0, 0)),
    ("l l h l", (2, 1)),
    ("l h h l l", (1, 0, 2)),
    ("[0 ]0 h", (1, 0)),
    ("[0 l ]0", (3,)),
    ("[0 h ]0", (2,)),
    ("[0 l l ]0 h l", (6, 1)),
]


def corpus_descriptions() -> List[Description]:
    return [denote_source(source)[0] for source in MACHINE_CORPUS]


def random_tag(rng: random.Random, depth: int = 0, size: int = 6) -> OuterTag:
    """A well-formed outer tag with brackets starting at `depth`."""
    tokens: List[Token] = []
    for i in range(rng.randint(1, 3)):
        if i:
            tokens.append(HBAR)
        if size > 2 and rng.random() < 0.4:
            tokens.append(opening(depth))
            tokens.extend(random_tag(rng, depth + 1, size // 2).tokens)
            tokens.append(closing(depth))
        else:
            tokens.extend([ELL] * rng.randint(0, 2))
    return OuterTag(tuple(tokens))


def random_position(game: Game, rng: random.Random, length: int) -> Position:
    """A random walk through the positions of a game, internal moves included; dummies follow Dum."""
    s = Position()
    while len(s) < length:
        if s and game.label(s.last) == PI:
            s = s.extend(game.dummy(s.last), dum_justifier(game, s, len(s) - 1))
            continue
        options = list(game.candidates(s, external_only=False))
        if not options:
            break
        s = s.extend(*rng.choice(options))
    return s


# ===========================================================================================================================================================
# Suites
# ===========================================================================================================================================================


def tags_suite(depth: int, seeds: int, seed: int) -> SuiteReport:
    report = SuiteReport("tags", seed)
    for n in range(10_000):
        report.check(seq_encode(seq_decode(n)) == n, f"seq_encode(seq_decode({n}))")
    for length in range(5):
        for values in product(range(9), repeat=length):
            report.check(seq_decode(seq_encode(values)) == values, f"seq_decode(seq_encode({values}))")
    for word, expected in DECODED_WORDS:
        tag = OuterTag.parse(word)
        report.check(bool(check_wellformed(tag)) and decode_tag(tag) == expected, f"decode_tag({word!r})")
    rng = random.Random(seed)
    for _ in tqdm(range(seeds), desc="tags", disable=seeds < 50):
        f = random_tag(rng)
        local = thread(random_tag(rng)) + random_tag(rng)
        for side in ("A", "B"):
            joined = join_thread(f, local, side)
            report.check(bool(check_wellformed(joined)), f"join_thread({f}, {local}, {side}) well-formed")
            report.check(split_thread(joined, side) == (f, local), f"split_thread of {joined}")
        report.check(OuterTag.parse(str(f)) == f, f"parse of {f}")
    report.check(decode_tag(EMPTY) == (0,), "empty tag")
    return report


def games_suite(depth: int, seeds: int, seed: int) -> SuiteReport:
    report = SuiteReport("games", seed)
    for game in (LazyNatGame(), BooleanGame()):
        for s in enumerate_positions(game, depth):
            report.check(bool(check_legal(game, s)), f"{game}: {render_trace(s)}")
            report.check(parse_trace(render_trace(s)) == s, f"trace text of {render_trace(s)}")
    shallow = min(depth, 8)
    for d in corpus_descriptions()[:8]:
        game = materialize(d).game
        for s in enumerate_positions(game, shallow):
            report.check(bool(game.accepts(s)), f"{game}: {render_trace(s)}")
            hidden = hide_position(game, s)
            report.check(bool(ambient_of(game).accepts(hidden)), f"hiding of {render_trace(s)}")
            if len(s) % 2:
                view = view_indices(s)
                report.check(view[0] == len(s) - 1 and s.pointers[view[-1]] is None, f"P-view of {render_trace(s)}")
    rng = random.Random(seed)
    for d in tqdm(corpus_descriptions(), desc="games", disable=seeds < 10):
        game = materialize(d).game
        for _ in range(seeds):
            s = random_position(game, rng, depth)
            report.check(bool(ambient_of(game).accepts(hide_position(game, s))), f"hiding of {render_trace(s)}")
    return report


def _agreement(d: Description, seed: int, depth: int, report: SuiteReport) -> Position:
    """Plays the compiled machine under random O-moves, comparing every run with the strategy."""
    sigma = materialize(d)
    machine = compile_machine(d)
    game = sigma.game
    seen: List[Play] = []

    def observe(play: Play, tape: JTape, r: Run) -> None:
        seen[:] = [play]
        s = play.freeze()
        expected = sigma.respond(s)
        got = r.result
        if expected is None or got is None:
            report.check(expected is None and got is None, f"halting after {len(s)} moves of {render_trace(s)}")
        else:
            same = got.move == expected.move and got.selector == expected.selector
            same = same and resolve_selector(play, got.selector) == expected.justifier
            report.check(same, f"reply after {render_trace(s)}: {got.move} vs {expected.move}")
        allowed = {tape.dollars[i] for i in view_indices(play)}
        report.check(set(r.visited) <= allowed, f"head left the P-view after {len(s)} moves")

    try:
        return interact(machine, game, RandomLegal(seed, limit=depth), budget=depth, observer=observe).position
    except Diverged:
        return seen[0].freeze() if seen else Position()


def machine_suite(depth: int, seeds: int, seed: int) -> SuiteReport:
    report = SuiteReport("machine", seed)
    corpus = corpus_descriptions() + [atomic_node("pred", PredRule())]
    for k in tqdm(range(seeds), desc="machine", disable=seeds < 10):
        for d in corpus:
            try:
                s = _agreement(d, seed + k, depth, report)
            except WorkbenchError as e:
                report.check(False, f"{e}")
                continue
            tape = encode_position(s)
            report.check(decode_tape(tape) == s, "tape round-trip")
            report.check(parse_tape(serialize_tape(tape)).cells == tape.cells, "tape text round-trip")
    pred = atomic_node("pred", PredRule())
    identity = denote_source("fun x: nat. x")[0]
    add = denote_source(ADD)[0]
    for n in range(6):
        report.check(jsa_standalone_run(pred, [n]) == max(n - 1, 0), f"standalone pred {n}")
        report.check(jsa_standalone_run(identity, [n]) == n, f"standalone identity {n}")
    for m, n in ((0, 0), (1, 2), (2, 1), (5, 0), (0, 5), (3, 2)):
        report.check(jsa_standalone_run(add, [m, n]) == m + n, f"standalone add {m} {n}")
    return report


def _numeral(k: int, inner: str = "zero") -> str:
    return "succ (" * k + inner + ")" * k


def pcf_suite(depth: int, seeds: int, seed: int) -> SuiteReport:
    report = SuiteReport("pcf", seed)
    for n in range(min(depth, 16) + 1):
        report.check(evaluate_numeral(parse_program(_numeral(n))) == n, f"succ^{n} zero")
    for n in range(min(depth // 2, 8) + 1):
        report.check(evaluate_numeral(parse_program(f"pred ({_numeral(n + 1)})")) == n, f"pred succ^{n + 1} zero")
    report.check(evaluate_numeral(parse_program("pred zero")) == 0, "pred zero")
    report.check(evaluate_boolean(parse_program("ifz zero")) is True, "ifz zero")
    report.check(evaluate_boolean(parse_program("ifz (succ zero)")) is False, "ifz (succ zero)")
    report.check(evaluate_numeral(parse_program("case (succ zero) zero tt")) == 1, "case on tt")
    report.check(evaluate_numeral(parse_program("case (succ zero) zero ff")) == 0, "case on ff")
    for m, n in ((0, 2), (2, 0), (1, 1), (2, 3)):
        value = evaluate_numeral(parse_program(f"({ADD}) ({_numeral(m)}) ({_numeral(n)})"))
        report.check(value == m + n, f"add {m} {n}")
    for d in tqdm(corpus_descriptions(), desc="hiding", disable=seeds < 10):
        verdict = check_strategy(hide_strategy(materialize(d)), min(depth, 10))
        report.check(bool(verdict), f"hiding of {materialize(d).game}: {verdict.reason}")
    return report


SUITES: Dict[str, Callable[[int, int, int], SuiteReport]] = {
    "tags": tags_suite,
    "games": games_suite,
    "machine": machine_suite,
    "pcf": pcf_suite,
}


def run_suite(name: str, depth: int = VERIFY_DEPTH, seeds: int = VERIFY_SEEDS, seed: int = DEFAULT_SEED) -> SuiteReport:
    report = SUITES[name](depth, seeds, seed)
    logger.info(report.summary())
    for failure in report.failures:
        logger.debug(f"{name} failure: {failure}")
    return report
