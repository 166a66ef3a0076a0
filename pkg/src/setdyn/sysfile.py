"""Loading system definitions from YAML (or JSON) documents.

A document has a ``space`` and a ``relation`` mapping::

    name: tent-inverse-9
    space: {kind: grid, n: 9}
    relation: {kind: tent_inverse}

Space kinds: ``grid`` (``n``) and ``discrete`` (``n``, optional ``scale``).
Relation kinds: ``tent_inverse``, ``tent``, ``identity``, ``full``,
``constant`` (``target``), ``single_valued`` (``table`` of indices),
``adjacency`` (``lines`` in ``i : j1 j2 ...`` form) and ``random``
(``seed``, ``density``, ``surjective``).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import yaml

from .errors import InvalidArgumentError, SetDynError
from .metric_relation import (
    MetricSpace,
    Relation,
    build_discrete_space,
    build_grid_space,
    constant_relation,
    discretize_single_valued,
    full_relation,
    identity_relation,
    parse_adjacency_list,
    random_relation,
    tent_inverse_relation,
    tent_map,
)

__all__ = ["SystemFileError", "System", "load_systems", "loads_systems", "build_system"]


class SystemFileError(SetDynError):
    def __init__(self, message, line=None, column=None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class System:
    name: str
    space: MetricSpace
    relation: Relation
    definition: dict


def _build_space(spec: dict) -> MetricSpace:
    kind = spec.get("kind")
    if kind == "grid":
        return build_grid_space(int(spec["n"]))
    if kind == "discrete":
        return build_discrete_space(int(spec["n"]), Fraction(str(spec.get("scale", 1))))
    raise InvalidArgumentError(f"unknown space kind {kind!r}")


def _build_relation(space: MetricSpace, spec: dict) -> Relation:
    kind = spec.get("kind")
    if kind == "tent_inverse":
        return tent_inverse_relation(space, spec.get("off_grid", "floor"))
    if kind == "tent":
        return discretize_single_valued(space, tent_map)
    if kind == "identity":
        return identity_relation(space)
    if kind == "full":
        return full_relation(space)
    if kind == "constant":
        return constant_relation(space, int(spec.get("target", 0)))
    if kind == "single_valued":
        return discretize_single_valued(space, list(spec["table"]))
    if kind == "adjacency":
        return parse_adjacency_list(str(spec["lines"]), space)
    if kind == "random":
        return random_relation(
            space,
            Fraction(str(spec.get("density", "1/2"))),
            int(spec.get("seed", 0)),
            bool(spec.get("surjective", True)),
        )
    raise InvalidArgumentError(f"unknown relation kind {kind!r}")


def _mark_of(node, key):
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            if getattr(k, "value", None) == key:
                return v.start_mark
    return node.start_mark


def build_system(doc: dict, index: int = 0) -> System:
    if not isinstance(doc, dict):
        raise InvalidArgumentError("a system document must be a mapping")
    for key in ("space", "relation"):
        if not isinstance(doc.get(key), dict):
            raise InvalidArgumentError(f"missing or malformed '{key}' mapping")
    space = _build_space(doc["space"])
    relation = _build_relation(space, doc["relation"])
    return System(str(doc.get("name", f"system-{index}")), space, relation, doc)


def loads_systems(text: str) -> list:
    """Parse every document in ``text``; errors carry 1-based line/column."""
    try:
        nodes = list(yaml.compose_all(text, Loader=yaml.SafeLoader))
        docs = list(yaml.load_all(text, Loader=yaml.SafeLoader))
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise SystemFileError(str(exc.problem), mark.line + 1, mark.column + 1) from None
    systems = []
    pairs = [(node, doc) for node, doc in zip(nodes, docs) if node is not None]
    for i, (node, doc) in enumerate(pairs):
        stage = "document"
        try:
            if not isinstance(doc, dict):
                raise InvalidArgumentError("a system document must be a mapping")
            stage = "space"
            if not isinstance(doc.get("space"), dict):
                raise InvalidArgumentError("missing or malformed 'space' mapping")
            space = _build_space(doc["space"])
            stage = "relation"
            if not isinstance(doc.get("relation"), dict):
                raise InvalidArgumentError("missing or malformed 'relation' mapping")
            relation = _build_relation(space, doc["relation"])
        except (SetDynError, KeyError, TypeError, ValueError) as exc:
            mark = node.start_mark if stage == "document" else _mark_of(node, stage)
            msg = f"{stage}: missing field {exc}" if isinstance(exc, KeyError) else f"{stage}: {exc}"
            raise SystemFileError(msg, mark.line + 1, mark.column + 1) from None
        systems.append(System(str(doc.get("name", f"system-{i}")), space, relation, doc))
    if not systems:
        raise SystemFileError("no system document found", 1, 1)
    return systems


def load_systems(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return loads_systems(fh.read())
