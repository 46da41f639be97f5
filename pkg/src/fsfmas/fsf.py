"""Factual Semantic Features: the observation tuples fed to the MAS.

Text form, one per line in ``.fsf`` files::

    (fire#14, fieriness, 1, inDangerNeighbours, 3, burningNeighbours, 2, localisation, 20|25, time, 7)

``localisation`` and ``time`` are lifted out of the qualifier list into
dedicated fields but are written back inside the tuple.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from .errors import BadCoordinate, InvalidFsf, MalformedTuple, UnknownQualifier
from .ontology import ClassRef, Ontology, RESERVED_KEYS, classify, default_ontology


class Coord(NamedTuple):
    x: int
    y: int

    def __str__(self):
        return f"{self.x}|{self.y}"


Value = Union[int, float, Coord, str]

_INT = re.compile(r"[-+]?\d+\Z")
_REAL = re.compile(r"[-+]?(\d+\.\d*|\.\d+|\d+)([eE][-+]?\d+)?\Z")
_COORD = re.compile(r"([-+]?\d+)\|([-+]?\d+)\Z")
_SYMBOL = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")
_OBJECT_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*#[A-Za-z0-9_\-]+\Z")


@dataclass(frozen=True)
class FSF:
    object_id: str
    cls: ClassRef
    qualifiers: tuple[tuple[str, Value], ...]
    location: Coord
    time: int

    def __post_init__(self):
        if not self.object_id:
            raise InvalidFsf("empty object id")
        if not isinstance(self.time, int) or isinstance(self.time, bool) or self.time < 0:
            raise InvalidFsf(f"time must be a non-negative integer, got {self.time!r}")
        names = [n for n, _ in self.qualifiers]
        if len(set(names)) != len(names):
            raise InvalidFsf(f"duplicate qualifier in {self.object_id}")
        for n, v in self.qualifiers:
            _check_value(n, v)

    def qualifier(self, name: str, default=None):
        for n, v in self.qualifiers:
            if n == name:
                return v
        return default

    @property
    def qualifier_map(self) -> dict[str, Value]:
        return dict(self.qualifiers)

    def __str__(self):
        return serialize_fsf(self)


def _check_value(name, value):
    if isinstance(value, bool):
        raise InvalidFsf(f"{name}: booleans are not qualifier values")
    if isinstance(value, Coord):
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in value):
            raise BadCoordinate(f"{name}: coordinates must be integers")
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidFsf(f"{name}: non-finite value")
    elif isinstance(value, str):
        if not _SYMBOL.match(value):
            raise InvalidFsf(f"{name}: {value!r} is not a valid symbol")
    elif not isinstance(value, int):
        raise InvalidFsf(f"{name}: unsupported value type {type(value).__name__}")


def make_fsf(object_id: str, qualifiers: Iterable[tuple[str, Value]] = (),
             location=(0, 0), time: int = 0, ontology: Ontology | None = None) -> FSF:
    """Build a validated FSF, resolving its class and qualifier names against ``ontology``."""
    onto = ontology or default_ontology()
    if not _OBJECT_ID.match(object_id or ""):
        raise MalformedTuple(f"bad object id {object_id!r}")
    ref = classify(object_id, onto)
    allowed = onto.qualifiers_for(ref.name)
    quals = []
    for name, value in qualifiers:
        name = onto.canonical_qualifier(name)
        if name not in allowed:
            raise UnknownQualifier(f"{name!r} is not a qualifier of {ref.name}")
        if isinstance(value, tuple) and not isinstance(value, Coord):
            value = Coord(*value)
        quals.append((name, value))
    try:
        loc = Coord(*location)
    except TypeError:
        raise BadCoordinate(f"bad location {location!r}") from None
    _check_value("localisation", loc)
    return FSF(object_id, ref, tuple(quals), loc, time)


def _parse_value(token: str) -> Value:
    if _INT.match(token):
        return int(token)
    if _REAL.match(token):
        return float(token)
    if "|" in token:
        m = _COORD.match(token)
        if not m:
            raise BadCoordinate(f"bad coordinate {token!r}")
        return Coord(int(m.group(1)), int(m.group(2)))
    if _SYMBOL.match(token):
        return token
    raise MalformedTuple(f"unparseable value {token!r}")


def parse_fsf(text: str, ontology: Ontology | None = None) -> FSF:
    """Parse one FSF tuple."""
    s = text.strip()
    if not s or s[0] != "(" or s[-1] != ")" or s.count("(") != 1 or s.count(")") != 1:
        raise MalformedTuple(f"not a parenthesized tuple: {text!r}")
    tokens = [t.strip() for t in s[1:-1].split(",")]
    if not tokens[0]:
        raise MalformedTuple("missing object id")
    object_id, rest = tokens[0], tokens[1:]
    if len(rest) % 2:
        raise MalformedTuple(f"odd number of qualifier tokens in {text!r}")
    location = time = None
    quals = []
    seen = set()
    for name, raw in zip(rest[::2], rest[1::2]):
        if not name:
            raise MalformedTuple("empty qualifier name")
        if name in seen:
            raise MalformedTuple(f"qualifier {name!r} repeated")
        seen.add(name)
        if name == "localisation":
            m = _COORD.match(raw)
            if not m:
                raise BadCoordinate(f"bad localisation {raw!r}")
            location = (int(m.group(1)), int(m.group(2)))
        elif name == "time":
            if not _INT.match(raw) or int(raw) < 0:
                raise MalformedTuple(f"time must be a non-negative integer, got {raw!r}")
            time = int(raw)
        else:
            if not raw:
                raise MalformedTuple(f"empty value for {name!r}")
            quals.append((name, _parse_value(raw)))
    if location is None or time is None:
        raise MalformedTuple("localisation and time are mandatory")
    return make_fsf(object_id, quals, location, time, ontology)


def _format_value(v: Value) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_fsf(fsf: FSF) -> str:
    parts = [fsf.object_id]
    for name, value in fsf.qualifiers:
        parts += [name, _format_value(value)]
    parts += ["localisation", str(fsf.location), "time", str(fsf.time)]
    return "(" + ", ".join(parts) + ")"


# --- JSONL ---------------------------------------------------------------------

def fsf_to_json(fsf: FSF) -> dict:
    def enc(v):
        return {"x": v.x, "y": v.y} if isinstance(v, Coord) else v

    return {
        "objectId": fsf.object_id,
        "class": fsf.cls.name,
        "qualifiers": [[n, enc(v)] for n, v in fsf.qualifiers],
        "location": {"x": fsf.location.x, "y": fsf.location.y},
        "time": fsf.time,
    }


def fsf_from_json(doc: dict, ontology: Ontology | None = None) -> FSF:
    try:
        quals = []
        for name, v in doc.get("qualifiers", []):
            if isinstance(v, dict):
                v = Coord(v["x"], v["y"])
            quals.append((name, v))
        loc = doc["location"]
        fsf = make_fsf(doc["objectId"], quals, (loc["x"], loc["y"]), doc["time"], ontology)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedTuple(f"bad JSON FSF: {exc}") from exc
    if "class" in doc and doc["class"] != fsf.cls.name:
        raise InvalidFsf(f"class {doc['class']!r} disagrees with ontology ({fsf.cls.name})")
    return fsf


def dumps_jsonl(fsf: FSF) -> str:
    return json.dumps(fsf_to_json(fsf), separators=(",", ":"))


def write_fsf_stream(path, fsfs: Iterable[FSF], header: str | None = None):
    """Write FSFs one per line; ``.jsonl`` paths get the JSON form."""
    as_json = str(path).endswith(".jsonl")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header and not as_json:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for f in fsfs:
            fh.write((dumps_jsonl(f) if as_json else serialize_fsf(f)) + "\n")


__all__ = [
    "Coord", "FSF", "Value", "make_fsf", "parse_fsf", "serialize_fsf",
    "fsf_to_json", "fsf_from_json", "dumps_jsonl", "write_fsf_stream", "RESERVED_KEYS",
]
