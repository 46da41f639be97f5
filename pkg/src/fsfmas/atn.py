"""Flat augmented transition networks driving factual agents.

ATN files are line oriented::

    # fire factual agent
    param theta_ai = 2.0
    initial 1
    state 1 creation
    state 4 dead terminal enter=freeze
    transition 1 -> 2 when TRUE
    transition 2 -> 3 when AI >= $theta_ai AND PI >= $theta_pi

Transitions leaving a state are tried in file order; the first satisfied guard
fires. ``$name`` constants are resolved at parse time from ``param`` lines,
optionally overridden by the caller.

Guard atoms: ``AI PI dAI dPI lifeTime lowPIStreak removed qualifier(name)``.
``lowPIStreak`` counts consecutive cycles with PI under the death threshold and
``removed`` is 1 once the scenario withdrew the agent's object.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Union

from .errors import DanglingStateRef, SchemaError, TerminalWithOutgoing, UnknownState

ATOMS = ("AI", "PI", "dAI", "dPI", "lifeTime", "lowPIStreak", "removed")
OPS = ("<", "<=", "=", ">=", ">")
_OP_ALIASES = {"≤": "<=", "≥": ">=", "==": "="}


# --- guard expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Cmp:
    atom: str
    op: str
    value: float
    qualifier: str | None = None


@dataclass(frozen=True)
class Not:
    item: "Guard"


@dataclass(frozen=True)
class And:
    items: tuple["Guard", ...]


@dataclass(frozen=True)
class Or:
    items: tuple["Guard", ...]


Guard = Union[Const, Cmp, Not, And, Or]


@dataclass(frozen=True)
class AgentView:
    """Read-only agent properties a guard can look at."""

    state: int
    ai: float = 0.0
    pi: float = 0.0
    d_ai: float = 0.0
    d_pi: float = 0.0
    life_time: int = 0
    qualifiers: Mapping[str, object] = field(default_factory=dict)
    low_pi_streak: int = 0
    removed: bool = False

    def atom(self, name: str) -> float:
        if name == "removed":
            return 1 if self.removed else 0
        return getattr(self, _ATOM_FIELDS[name])


_ATOM_FIELDS = {"AI": "ai", "PI": "pi", "dAI": "d_ai", "dPI": "d_pi",
                "lifeTime": "life_time", "lowPIStreak": "low_pi_streak"}


def _compare(lhs, op, rhs) -> bool:
    if op == "<":
        return lhs < rhs
    if op == "<=":
        return lhs <= rhs
    if op == "=":
        return lhs == rhs
    if op == ">=":
        return lhs >= rhs
    return lhs > rhs


def evaluate(guard: Guard, view: AgentView) -> bool:
    if isinstance(guard, Const):
        return guard.value
    if isinstance(guard, Cmp):
        if guard.qualifier is not None:
            v = view.qualifiers.get(guard.qualifier)
            # absent or non-numeric qualifiers never satisfy a comparison
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                return False
        else:
            v = view.atom(guard.atom)
        return _compare(v, guard.op, guard.value)
    if isinstance(guard, Not):
        return not evaluate(guard.item, view)
    if isinstance(guard, And):
        for g in guard.items:
            if not evaluate(g, view):
                return False
        return True
    for g in guard.items:
        if evaluate(g, view):
            return True
    return False


def format_guard(guard: Guard) -> str:
    if isinstance(guard, Const):
        return "TRUE" if guard.value else "FALSE"
    if isinstance(guard, Cmp):
        lhs = f"qualifier({guard.qualifier})" if guard.qualifier else guard.atom
        return f"{lhs} {guard.op} {guard.value!r}"
    if isinstance(guard, Not):
        inner = format_guard(guard.item)
        if isinstance(guard.item, (And, Or)):
            inner = f"({inner})"
        return f"NOT {inner}"
    if isinstance(guard, And):
        return " AND ".join(f"({format_guard(g)})" if isinstance(g, Or) else format_guard(g)
                            for g in guard.items)
    return " OR ".join(format_guard(g) for g in guard.items)


_TOKEN = re.compile(r"""\s*(?:
    (?P<op><=|>=|==|≤|≥|<|>|=)
  | (?P<punct>[(),])
  | (?P<param>\$[A-Za-z_]\w*)
  | (?P<num>[-+]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?)
  | (?P<word>[A-Za-z_]\w*)
)""", re.VERBOSE)


def _tokenize(text):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SchemaError(f"cannot tokenize guard at {text[pos:]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
    return out


class _GuardParser:
    def __init__(self, text, params):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.params = params

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise SchemaError(f"unexpected {tok[1]!r} in guard {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> Guard:
        g = self.or_()
        if self.i != len(self.tokens):
            raise SchemaError(f"trailing tokens in guard {self.text!r}")
        return g

    def or_(self):
        items = [self.and_()]
        while self.peek() == ("word", "OR"):
            self.take()
            items.append(self.and_())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def and_(self):
        items = [self.not_()]
        while self.peek() == ("word", "AND"):
            self.take()
            items.append(self.not_())
        return items[0] if len(items) == 1 else And(tuple(items))

    def not_(self):
        if self.peek() == ("word", "NOT"):
            self.take()
            return Not(self.not_())
        return self.primary()

    def number(self):
        kind, val = self.take()
        if kind == "num":
            return float(val)
        if kind == "param":
            name = val[1:]
            if name not in self.params:
                raise SchemaError(f"undefined parameter ${name}")
            return float(self.params[name])
        raise SchemaError(f"expected a number in guard {self.text!r}, got {val!r}")

    def primary(self):
        kind, val = self.peek()
        if (kind, val) == ("punct", "("):
            self.take()
            g = self.or_()
            self.take("punct", ")")
            return g
        if kind != "word":
            raise SchemaError(f"unexpected {val!r} in guard {self.text!r}")
        self.take()
        if val in ("TRUE", "FALSE"):
            return Const(val == "TRUE")
        qualifier = None
        if val == "qualifier":
            self.take("punct", "(")
            qualifier = self.take("word")[1]
            self.take("punct", ")")
        elif val not in ATOMS:
            raise SchemaError(f"unknown guard atom {val!r}")
        op = self.take("op")[1]
        op = _OP_ALIASES.get(op, op)
        return Cmp("qualifier" if qualifier else val, op, self.number(), qualifier)


def parse_guard(text: str, params: Mapping[str, float] | None = None) -> Guard:
    return _GuardParser(text, dict(params or {})).parse()


# --- specs ----------------------------------------------------------------------

@dataclass(frozen=True)
class State:
    id: int
    label: str
    terminal: bool = False
    on_enter: tuple[str, ...] = ()


@dataclass(frozen=True)
class Transition:
    source: int
    target: int
    guard: Guard


@dataclass(frozen=True)
class AtnSpec:
    name: str
    states: tuple[State, ...]
    transitions: tuple[Transition, ...]
    initial: int
    params: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        ids = [s.id for s in self.states]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate state id")
        if self.initial not in ids:
            raise DanglingStateRef(f"initial state {self.initial} is not declared")
        terminal = {s.id for s in self.states if s.terminal}
        for t in self.transitions:
            for end in (t.source, t.target):
                if end not in ids:
                    raise DanglingStateRef(f"transition {t.source} -> {t.target} "
                                           f"references undeclared state {end}")
            if t.source in terminal:
                raise TerminalWithOutgoing(f"terminal state {t.source} has an outgoing transition")

    def state(self, sid: int) -> State:
        for s in self.states:
            if s.id == sid:
                return s
        raise UnknownState(f"{self.name}: no state {sid}")

    def is_terminal(self, sid: int) -> bool:
        return self.state(sid).terminal

    def outgoing(self, sid: int) -> list[Transition]:
        return [t for t in self.transitions if t.source == sid]

    def to_text(self) -> str:
        lines = [f"# {self.name}"]
        lines += [f"param {k} = {v!r}" for k, v in self.params]
        lines.append(f"initial {self.initial}")
        for s in self.states:
            extra = " terminal" if s.terminal else ""
            if s.on_enter:
                extra += " enter=" + ",".join(s.on_enter)
            lines.append(f"state {s.id} {s.label}{extra}")
        for t in self.transitions:
            lines.append(f"transition {t.source} -> {t.target} when {format_guard(t.guard)}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class StepResult:
    new_state: int
    fired: bool
    transition: Transition | None = None


def step_atn(spec: AtnSpec, view: AgentView) -> StepResult:
    current = spec.state(view.state)
    if current.terminal:
        return StepResult(current.id, False)
    for t in spec.outgoing(current.id):
        if evaluate(t.guard, view):
            return StepResult(t.target, True, t)
    return StepResult(current.id, False)


_TRANSITION = re.compile(r"transition\s+(-?\d+)\s*->\s*(-?\d+)\s+when\s+(.+)\Z")
_PARAM = re.compile(r"param\s+([A-Za-z_]\w*)\s*=\s*(\S+)\Z")


def parse_atn(text: str, overrides: Mapping[str, float] | None = None,
              name: str = "atn") -> AtnSpec:
    """Parse ATN text; ``overrides`` replace declared ``param`` defaults."""
    params: dict[str, float] = {}
    states: list[State] = []
    raw_transitions: list[tuple[int, int, str, int]] = []
    initial = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            if lineno == 1 and line.startswith("#") and name == "atn":
                name = line[1:].strip() or name
            continue
        word = line.split()[0]
        try:
            if word == "param":
                m = _PARAM.match(line)
                if not m:
                    raise SchemaError("expected 'param NAME = VALUE'")
                params[m.group(1)] = float(m.group(2))
            elif word == "initial":
                _, sid = line.split()
                initial = int(sid)
            elif word == "state":
                parts = line.split()
                if len(parts) < 3:
                    raise SchemaError("expected 'state ID LABEL [terminal] [enter=a,b]'")
                terminal, actions = False, ()
                for opt in parts[3:]:
                    if opt == "terminal":
                        terminal = True
                    elif opt.startswith("enter="):
                        actions = tuple(a for a in opt[6:].split(",") if a)
                    else:
                        raise SchemaError(f"unknown state option {opt!r}")
                states.append(State(int(parts[1]), parts[2], terminal, actions))
            elif word == "transition":
                m = _TRANSITION.match(line)
                if not m:
                    raise SchemaError("expected 'transition A -> B when GUARD'")
                raw_transitions.append((int(m.group(1)), int(m.group(2)), m.group(3), lineno))
            else:
                raise SchemaError(f"unknown directive {word!r}")
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from exc
        except SchemaError as exc:
            if isinstance(exc, (DanglingStateRef, TerminalWithOutgoing)):
                raise
            raise SchemaError(f"line {lineno}: {exc}") from exc
    if initial is None:
        raise SchemaError("missing 'initial' line")
    for k, v in (overrides or {}).items():
        if k in params:
            params[k] = float(v)
    transitions = []
    for src, dst, guard, lineno in raw_transitions:
        try:
            transitions.append(Transition(src, dst, parse_guard(guard, params)))
        except SchemaError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from exc
    return AtnSpec(name, tuple(states), tuple(transitions), initial, tuple(params.items()))


def load_atn(path, overrides=None) -> AtnSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_atn(fh.read(), overrides)


def default_atn(which: str, overrides=None) -> AtnSpec:
    """Shipped ``fire`` or ``brigade`` automaton."""
    text = resources.files("fsfmas.data").joinpath(f"{which}.atn").read_text("utf-8")
    return parse_atn(text, overrides)
