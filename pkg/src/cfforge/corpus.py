"""Fixture corpus: stored (f, g, expected closed form) triples.

A corpus file is a JSON array of objects with keys ``id``, ``f``, ``g``,
optional ``closed_form`` and optional ``tags``.  Expression strings use the
exprlang grammar; ``z`` and ``v`` are accepted as aliases of ``n``.  The
bundled corpus carries the printed closed forms of the source identities;
the ``expect`` tags (expect:symbolic / expect:numeric) record which pipeline
outcome each fixture is known to have, for testing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .errors import CorpusError


@dataclass(frozen=True)
class Fixture:
    id: str
    f: str
    g: str
    closed_form: Optional[str] = None
    tags: tuple[str, ...] = ()


def bundled_corpus_path() -> Path:
    return Path(resources.files("cfforge").joinpath("data/corpus.json"))


def load_corpus(path: Union[str, Path]) -> list[Fixture]:
    """Load and structurally validate a corpus file.

    Per-fixture expression syntax is deliberately not validated here; a
    malformed fixture produces an error report at run time without aborting
    the batch."""
    try:
        raw = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise CorpusError("corpus must be a JSON array of fixture objects")
    fixtures: list[Fixture] = []
    seen: set[str] = set()
    for i, obj in enumerate(raw):
        if not isinstance(obj, dict):
            raise CorpusError(f"fixture #{i} is not an object")
        missing = {"id", "f", "g"} - obj.keys()
        if missing:
            raise CorpusError(f"fixture #{i} lacks keys {sorted(missing)}")
        if obj["id"] in seen:
            raise CorpusError(f"duplicate fixture id {obj['id']!r}")
        seen.add(obj["id"])
        fixtures.append(
            Fixture(
                id=str(obj["id"]),
                f=str(obj["f"]),
                g=str(obj["g"]),
                closed_form=(
                    str(obj["closed_form"]) if obj.get("closed_form") else None
                ),
                tags=tuple(obj.get("tags", ())),
            )
        )
    return fixtures
