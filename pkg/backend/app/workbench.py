"""Source-level operations shared by the CLI and the HTTP API."""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from machine.compiler import compile_machine
from machine.jpa import Run, dump_stack
from machine.judge import BooleanReader, NumeralReader, OpponentPolicy, Play, RandomLegal, count_answers, interact
from machine.tape import JTape, serialize_tape
from pcf.denote import denote_source, describe, game_of
from pcf.syntax import BOOL, NAT, PcfType
from semantics.games import Position, hide_position, render_trace
from setup.init import DEFAULT_SEED, MAX_STEPS
from utils.errors import Diverged, MachineError, PcfTypeError
from utils.util import format_value, section, snapshot_text

logger = logging.getLogger(__name__)


@dataclass
class Evaluation:
    type: PcfType
    value: Union[int, bool]

    @property
    def text(self) -> str:
        return format_value(self.type, self.value)


@dataclass
class TraceReport:
    external: Position
    snapshots: List[Tuple[str, str]] = field(default_factory=list)
    truncated: bool = False

    @property
    def text(self) -> str:
        lines = [render_trace(self.external)] if len(self.external) else []
        lines.extend(snapshot_text(self.snapshots))
        if self.truncated:
            lines.append("TRUNCATED")
        return "\n".join(lines)


def _reader(ty: PcfType, seed: int) -> OpponentPolicy:
    if ty == NAT:
        return NumeralReader()
    if ty == BOOL:
        return BooleanReader()
    return RandomLegal(seed)


def evaluate_source(source: str, max_steps: int = MAX_STEPS) -> Evaluation:
    """Value of a closed nat or bool program, read off the machine's play.

    Raises:
        Diverged: when the machine runs take more than `max_steps` steps in all.
    """
    d, ty = denote_source(source)
    if ty not in (NAT, BOOL):
        raise PcfTypeError(f"eval needs a program of type nat or bool, got {ty}")
    trace = interact(compile_machine(d), game_of(d), _reader(ty, DEFAULT_SEED), machine_steps=max_steps)
    if ty == NAT:
        value: Union[int, bool] = count_answers(trace.external)
    else:
        answers = [m.substance for m in trace.external.moves if m.substance in ("tt", "ff")]
        if not answers:
            raise MachineError("boolean play ended without an answer")
        value = answers[0] == "tt"
    logger.info(f"evaluated a {ty} program to {value}")
    return Evaluation(ty, value)


def trace_source(source: str, max_steps: int = MAX_STEPS, seed: int = DEFAULT_SEED) -> TraceReport:
    """External play of a program with a tape and stack snapshot per P-move, cut at `max_steps` occurrences."""
    d, ty = denote_source(source)
    game = game_of(d)
    report = TraceReport(Position())
    latest: List[Play] = []

    def observe(play: Play, tape: JTape, r: Run) -> None:
        latest[:] = [play]
        if r.result is not None:
            report.snapshots.append((serialize_tape(tape), dump_stack(r.stack)))

    try:
        report.external = interact(compile_machine(d), game, _reader(ty, seed), max_steps, observe).external
    except Diverged:
        played = latest[0].freeze().prefix(max_steps) if latest else Position()
        report.external = hide_position(game, played)
        report.truncated = True
        logger.info(f"trace truncated at {max_steps} occurrences")
    return report


def dump_source(source: str) -> str:
    d, _ = denote_source(source)
    machine = compile_machine(d)
    return "\n".join([
        section("DESCRIPTION", [describe(d)]),
        section("STATES", machine.states()),
        section("TRANSITIONS", machine.transitions()),
    ])
