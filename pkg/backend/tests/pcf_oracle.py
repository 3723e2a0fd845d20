"""Reference big-step call-by-name evaluator for PCF, used as a test oracle only."""

from dataclasses import dataclass
from typing import Dict, Optional

from pcf.syntax import (
    App, Case, Ff, Fix, Fst, Ifz, Lam, Pair, Pred, Snd, Succ, Term, Tt, Var, Zero, infer_type, parse_program,
)


class OutOfFuel(Exception):
    pass


@dataclass
class Thunk:
    term: Term
    env: Dict[str, "Thunk"]
    value: Optional[object] = None

    def force(self, fuel: "Fuel"):
        if self.value is None:
            self.value = evaluate(self.term, self.env, fuel)
        return self.value


@dataclass
class Closure:
    name: str
    body: Term
    env: Dict[str, Thunk]


@dataclass
class Fuel:
    left: int

    def burn(self):
        self.left -= 1
        if self.left < 0:
            raise OutOfFuel()


def evaluate(t: Term, env: Dict[str, Thunk], fuel: Fuel):
    fuel.burn()
    if isinstance(t, Var):
        return env[t.name].force(fuel)
    if isinstance(t, Zero):
        return 0
    if isinstance(t, Tt):
        return True
    if isinstance(t, Ff):
        return False
    if isinstance(t, Succ):
        return evaluate(t.body, env, fuel) + 1
    if isinstance(t, Pred):
        return max(evaluate(t.body, env, fuel) - 1, 0)
    if isinstance(t, Ifz):
        return evaluate(t.body, env, fuel) == 0
    if isinstance(t, Case):
        return evaluate(t.then if evaluate(t.cond, env, fuel) else t.orelse, env, fuel)
    if isinstance(t, Lam):
        return Closure(t.name, t.body, env)
    if isinstance(t, App):
        fn = evaluate(t.fn, env, fuel)
        return evaluate(fn.body, {**fn.env, fn.name: Thunk(t.arg, env)}, fuel)
    if isinstance(t, Fix):
        inner: Dict[str, Thunk] = dict(env)
        inner[t.name] = Thunk(t, env)
        return evaluate(t.body, inner, fuel)
    if isinstance(t, Pair):
        return (Thunk(t.left, env), Thunk(t.right, env))
    if isinstance(t, Fst):
        return evaluate(t.body, env, fuel)[0].force(fuel)
    if isinstance(t, Snd):
        return evaluate(t.body, env, fuel)[1].force(fuel)
    raise TypeError(f"cannot evaluate {t!r}")


def oracle_value(source: str, fuel: int = 100_000):
    """Value of a closed nat or bool program; raises OutOfFuel on divergence."""
    term, _ = infer_type(parse_program(source))
    return evaluate(term, {}, Fuel(fuel))
