"""Semantic classes, the class tree, and the similarity tables behind P_s.

An ontology is loaded from a JSON document::

    {
      "name": "rcr-fires",
      "classes": {"Concrete": {"Actor": {"Humanoid": {"FireBrigade": {}}}},
                  "Virtual": {"Phenomenon": {"Fire": {}}}},
      "prefixes": {"fire": "Fire", "brigade": "FireBrigade"},
      "qualifiers": {"Fire": ["fieriness", "burningNeighbours"]},
      "aliases": {"fieryness": "fieriness"},
      "similarity": [["Fire", "FireBrigade", 0.2]],
      "same_class_similarity": {"Fire": 0.5},
      "default_similarity": 0.0,
      "default_same_class_similarity": 0.5
    }

The first two tree levels are fixed: the roots are the two families and their
children are the six observation kinds. Anything below is free.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError, UnknownClassPrefix


class Family(str, enum.Enum):
    CONCRETE = "Concrete"
    VIRTUAL = "Virtual"


class Kind(str, enum.Enum):
    OBJECT = "Object"
    ACTOR = "Actor"
    MEANS = "Means"
    PHENOMENON = "Phenomenon"
    ACTION = "Action"
    MESSAGE = "Message"

    @property
    def family(self) -> Family:
        if self in (Kind.OBJECT, Kind.ACTOR, Kind.MEANS):
            return Family.CONCRETE
        return Family.VIRTUAL


@dataclass(frozen=True)
class SemanticClass:
    family: Family
    kind: Kind

    def __post_init__(self):
        if self.kind.family is not self.family:
            raise ValueError(f"{self.kind.value} does not belong to {self.family.value}")

    @classmethod
    def of(cls, kind: Kind) -> "SemanticClass":
        return cls(kind.family, kind)


@dataclass(frozen=True)
class ClassRef:
    """Result of classifying an object id: ontology class name + its semantic class."""

    name: str
    semantic: SemanticClass


# Reserved tuple keys; never part of a class vocabulary.
RESERVED_KEYS = ("localisation", "time")


@dataclass
class Ontology:
    name: str
    parents: dict[str, str | None]
    prefixes: dict[str, str]
    qualifier_vocab: dict[str, tuple[str, ...]]
    aliases: dict[str, str] = field(default_factory=dict)
    class_similarity: dict[tuple[str, str], float] = field(default_factory=dict)
    same_class_similarity: dict[str, float] = field(default_factory=dict)
    default_similarity: float = 0.0
    default_same_class_similarity: float = 0.5

    def __post_init__(self):
        self._validate()
        self._semantic = {c: self._semantic_of(c) for c in self.parents
                          if c not in (f.value for f in Family)}

    # -- structure -----------------------------------------------------------

    def _validate(self):
        for c, p in self.parents.items():
            if p is None:
                if c not in (f.value for f in Family):
                    raise ConfigError(f"root class {c!r} must be Concrete or Virtual")
            elif p in (f.value for f in Family):
                try:
                    kind = Kind(c)
                except ValueError:
                    raise ConfigError(f"{c!r} is not one of the six kinds") from None
                if kind.family.value != p:
                    raise ConfigError(f"{c} must sit under {kind.family.value}, not {p}")
            elif p not in self.parents:
                raise ConfigError(f"class {c!r} has unknown parent {p!r}")
        for prefix, cls in self.prefixes.items():
            if cls not in self.parents or cls in (f.value for f in Family):
                raise ConfigError(f"prefix {prefix!r} maps to invalid class {cls!r}")
        for cls in self.qualifier_vocab:
            if cls not in self.parents:
                raise ConfigError(f"qualifiers declared for unknown class {cls!r}")
            for q in self.qualifier_vocab[cls]:
                if q in RESERVED_KEYS:
                    raise ConfigError(f"{q!r} is reserved")
        table = {}
        for (a, b), v in self.class_similarity.items():
            for c in (a, b):
                if c not in self.parents:
                    raise ConfigError(f"similarity entry names unknown class {c!r}")
            if not (-1.0 <= v <= 1.0) or math.isnan(v):
                raise ConfigError(f"similarity ({a}, {b}) = {v} outside [-1, 1]")
            if a == b and v != 1.0:
                raise ConfigError(f"similarity ({a}, {a}) must be 1")
            if (b, a) in table and table[(b, a)] != v:
                raise ConfigError(f"similarity table not symmetric for ({a}, {b})")
            table[(a, b)] = table[(b, a)] = float(v)
        self.class_similarity = table
        for v in (self.default_similarity, self.default_same_class_similarity,
                  *self.same_class_similarity.values()):
            if not (-1.0 <= v <= 1.0):
                raise ConfigError(f"similarity value {v} outside [-1, 1]")

    def ancestors(self, cls: str) -> list[str]:
        """``cls`` followed by its ancestors up to the family root."""
        chain = []
        node: str | None = cls
        while node is not None:
            chain.append(node)
            node = self.parents[node]
        return chain

    def _semantic_of(self, cls: str) -> SemanticClass:
        chain = self.ancestors(cls)
        # chain[-1] is the family, chain[-2] the kind
        return SemanticClass.of(Kind(chain[-2]))

    @property
    def classes(self) -> list[str]:
        """Classifiable classes (everything below the family roots), in declaration order."""
        return list(self._semantic)

    def semantic_class(self, cls: str) -> SemanticClass:
        try:
            return self._semantic[cls]
        except KeyError:
            raise UnknownClassPrefix(f"unknown class {cls!r}") from None

    def qualifiers_for(self, cls: str) -> set[str]:
        allowed: set[str] = set()
        for c in self.ancestors(cls):
            allowed.update(self.qualifier_vocab.get(c, ()))
        return allowed

    def canonical_qualifier(self, name: str) -> str:
        return self.aliases.get(name, name)

    # -- similarity ----------------------------------------------------------

    def similarity(self, a: str, b: str) -> float:
        """Class-level similarity; 1 on the diagonal."""
        if a == b:
            return 1.0
        return self.class_similarity.get((a, b), self.default_similarity)

    def distinct_object_similarity(self, a: str, b: str) -> float:
        """Similarity used for two *different* objects of classes ``a`` and ``b``."""
        if a == b:
            return self.same_class_similarity.get(a, self.default_same_class_similarity)
        return self.similarity(a, b)

    def classify(self, object_id: str) -> ClassRef:
        return classify(object_id, self)

    # -- (de)serialization ---------------------------------------------------

    @classmethod
    def from_dict(cls, doc: dict) -> "Ontology":
        parents: dict[str, str | None] = {}

        def walk(tree, parent):
            if not isinstance(tree, dict):
                raise ConfigError("class tree nodes must be objects")
            for name, sub in tree.items():
                if name in parents:
                    raise ConfigError(f"class {name!r} declared twice")
                parents[name] = parent
                walk(sub, name)

        try:
            walk(doc["classes"], None)
            sim = {}
            for entry in doc.get("similarity", []):
                a, b, v = entry
                if (a, b) in sim or (b, a) in sim:
                    prev = sim.get((a, b), sim.get((b, a)))
                    if prev != float(v):
                        raise ConfigError(f"similarity table not symmetric for ({a}, {b})")
                sim[(a, b)] = float(v)
            return cls(
                name=doc.get("name", "ontology"),
                parents=parents,
                prefixes=dict(doc.get("prefixes", {})),
                qualifier_vocab={k: tuple(v) for k, v in doc.get("qualifiers", {}).items()},
                aliases=dict(doc.get("aliases", {})),
                class_similarity=sim,
                same_class_similarity={k: float(v) for k, v in
                                       doc.get("same_class_similarity", {}).items()},
                default_similarity=float(doc.get("default_similarity", 0.0)),
                default_same_class_similarity=float(doc.get("default_same_class_similarity", 0.5)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"malformed ontology document: {exc}") from exc

    def to_dict(self) -> dict:
        def subtree(node):
            return {c: subtree(c) for c, p in self.parents.items() if p == node}

        seen = set()
        sim = []
        for (a, b), v in self.class_similarity.items():
            if (b, a) in seen or a == b:
                continue
            seen.add((a, b))
            sim.append([a, b, v])
        return {
            "name": self.name,
            "classes": subtree(None),
            "prefixes": dict(self.prefixes),
            "qualifiers": {k: list(v) for k, v in self.qualifier_vocab.items()},
            "aliases": dict(self.aliases),
            "similarity": sim,
            "same_class_similarity": dict(self.same_class_similarity),
            "default_similarity": self.default_similarity,
            "default_same_class_similarity": self.default_same_class_similarity,
        }


def load_ontology(path) -> Ontology:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return Ontology.from_dict(doc)


_DEFAULT: Ontology | None = None


def default_ontology() -> Ontology:
    """The shipped RoboCupRescue fire ontology (fires, fire brigades, buildings)."""
    global _DEFAULT
    if _DEFAULT is None:
        text = resources.files("fsfmas.data").joinpath("rcr_ontology.json").read_text("utf-8")
        _DEFAULT = Ontology.from_dict(json.loads(text))
    return _DEFAULT


def classify(object_id: str, ontology: Ontology) -> ClassRef:
    """Map ``prefix#n`` object ids to their ontology class."""
    prefix, sep, _ = object_id.partition("#")
    if not sep or prefix not in ontology.prefixes:
        raise UnknownClassPrefix(f"no class rule for object id {object_id!r}")
    name = ontology.prefixes[prefix]
    return ClassRef(name, ontology.semantic_class(name))


def data_path(name: str) -> Path:
    """Filesystem path of a shipped data file."""
    return Path(str(resources.files("fsfmas.data").joinpath(name)))
