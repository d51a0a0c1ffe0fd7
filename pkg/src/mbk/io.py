"""JSON interchange: models, tables, marginal vectors, moves and clique trees.

All files use 0-based variables and levels.

    model   {"levels": [2, 2, 2], "facets": [[0], [1], [2]]}
    table   {"cells": [[[0, 0, 0], 1], [[1, 1, 1], 1]]}
    margins {"margins": [[[[0], 1], [[1], 1]], ...]}    one list per facet
    moves   [{"pos": [[cell, count], ...], "neg": [...], "orbit": 0}, ...]
    tree    {"cliques": [[0, 1], [1, 2]], "edges": [[0, 1]]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Sequence

from .chordal import CliqueTree
from .core import MarginalVector, ModelSpec, Move, Table, compute_b
from .errors import ModelError

SCHEMAS = __doc__


class FormatError(ModelError):
    """A file does not follow the expected JSON layout."""


def read_json(path: str | Path) -> Any:
    with open(path) as fh:
        return json.load(fh)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=None, separators=(",", ":")) + "\n"


def _need(obj: Any, key: str, what: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{what} file needs a {key!r} field")
    return obj[key]


def model_from_json(obj: Any) -> ModelSpec:
    return ModelSpec(_need(obj, "levels", "model"), _need(obj, "facets", "model"))


def model_to_json(model: ModelSpec) -> dict:
    return {"levels": list(model.levels), "facets": [list(f) for f in model.facets]}


def _pairs(obj: Any, what: str) -> list[tuple[tuple[int, ...], int]]:
    try:
        return [(tuple(int(x) for x in cell), int(n)) for cell, n in obj]
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{what}: expected a list of [cell, count] pairs") from exc


def table_from_json(obj: Any, model: ModelSpec | None = None) -> Table:
    t = Table(_pairs(_need(obj, "cells", "table"), "table"))
    return model.check_table(t) if model is not None else t


def table_to_json(t: Table) -> dict:
    return {"cells": [[list(c), n] for c, n in t.items()]}


def margins_from_json(obj: Any, model: ModelSpec) -> MarginalVector:
    """Either an explicit margins file or a table whose margins are taken."""
    if isinstance(obj, dict) and "cells" in obj:
        return compute_b(table_from_json(obj, model), model)
    margins = _need(obj, "margins", "margins")
    if len(margins) != len(model.facets):
        raise FormatError(f"expected {len(model.facets)} facet margins, got {len(margins)}")
    return MarginalVector(model.facets, [dict(_pairs(mp, "margins")) for mp in margins])


def margins_to_json(b: MarginalVector) -> dict:
    return {"margins": [[[list(k), n] for k, n in mp] for mp in b.margins]}


def move_to_json(z: Move, orbit: int | None = None) -> dict:
    out = {"pos": table_to_json(z.pos)["cells"], "neg": table_to_json(z.neg)["cells"]}
    if orbit is not None:
        out["orbit"] = orbit
    return out


def moves_to_json(moves: Iterable[Move], orbits: Sequence[int] | None = None) -> list:
    moves = list(moves)
    if orbits is None:
        return [move_to_json(z) for z in moves]
    return [move_to_json(z, k) for z, k in zip(moves, orbits)]


def moves_from_json(obj: Any) -> list[Move]:
    if not isinstance(obj, list):
        raise FormatError("moves file must be a JSON list")
    out = []
    for item in obj:
        pos = Table(_pairs(_need(item, "pos", "move"), "move"))
        neg = Table(_pairs(_need(item, "neg", "move"), "move"))
        out.append(Move(pos, neg))
    return out


def tree_from_json(obj: Any) -> CliqueTree:
    return CliqueTree(_need(obj, "cliques", "tree"), _need(obj, "edges", "tree"))


def tree_to_json(tree: CliqueTree) -> dict:
    return {"cliques": [list(c) for c in tree.cliques], "edges": [list(e) for e in tree.edges]}
