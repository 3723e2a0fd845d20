from pathlib import Path
from typing import Iterable, List, Tuple

from pcf.syntax import BOOL, NAT, PcfType
from utils.errors import PcfTypeError


def read_source(path: str) -> str:
    """Reads a PCF source file as UTF-8."""
    return Path(path).read_text(encoding="utf-8")


def format_value(ty: PcfType, value) -> str:
    """`nat:<n>` or `bool:<tt|ff>`."""
    if ty == NAT:
        return f"nat:{value}"
    if ty == BOOL:
        return f"bool:{'tt' if value else 'ff'}"
    raise PcfTypeError(f"no printed form for values of type {ty}")


def section(title: str, lines: Iterable[str]) -> str:
    return "\n".join([title, *lines])


def snapshot_text(snapshots: List[Tuple[str, str]]) -> List[str]:
    # one tape and stack per P-move, numbered from 1
    out = []
    for k, (tape, stack) in enumerate(snapshots, start=1):
        out.extend([f"P-MOVE {k}", tape, stack])
    return out
