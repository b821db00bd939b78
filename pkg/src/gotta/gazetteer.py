"""Entity dictionary loading and surface normalization.

The gazetteer file is UTF-8 text, one record per line:

    entity_id<TAB>surface

Lines starting with ``#`` are comments. A one-column variant (surface only)
is accepted; the entity id is then synthesized as ``L<line_number>``.
Dirty rows are counted and skipped, never fatal: a dictionary with tens of
millions of lines realistically contains malformed rows.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalizationOptions:
    """How surfaces are normalized before indexing and matching.

    Matching is case-sensitive unless ``case_fold`` is set; the fold is
    length-preserving per character (see :func:`fold_case`) so byte offsets
    reported by the matcher stay exact.
    """

    case_fold: bool = False
    collapse_internal_whitespace: bool = True
    min_surface_chars: int = 2


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    surface: str


@dataclass
class Gazetteer:
    """The loaded entity dictionary.

    ``records`` preserves file order of first occurrences. ``surface_index``
    maps each normalized surface to the ordered entity ids sharing it; when
    several ids share one surface, downstream matches report the first-listed
    id. ``rejected`` counts malformed or too-short rows, ``deduplicated``
    counts repeated (entity_id, surface) pairs, so that over the file's data
    lines: ``len(records) + rejected + deduplicated == data lines``.
    """

    records: list[EntityRecord] = field(default_factory=list)
    surface_index: dict[str, list[str]] = field(default_factory=dict)
    normalization: NormalizationOptions = field(default_factory=NormalizationOptions)
    rejected: int = 0
    deduplicated: int = 0

    def __len__(self) -> int:
        return len(self.records)


def fold_case(s: str) -> str:
    """Lowercase ``s`` without changing its UTF-8 byte length.

    Characters whose lowercase form expands to multiple characters or to a
    different number of bytes (e.g. U+0130) are left unfolded. This keeps
    byte offsets into folded text identical to offsets into the original.
    """
    out = []
    for ch in s:
        low = ch.lower()
        if len(low) == 1 and len(low.encode("utf-8")) == len(ch.encode("utf-8")):
            out.append(low)
        else:
            out.append(ch)
    return "".join(out)


def normalize_surface(s: str, opts: NormalizationOptions) -> str:
    """Normalize one surface form. Deterministic and idempotent."""
    if opts.collapse_internal_whitespace:
        s = " ".join(s.split())
    else:
        s = s.strip()
    if opts.case_fold:
        s = fold_case(s)
    return s


def load_gazetteer(path: str | Path, opts: NormalizationOptions | None = None) -> Gazetteer:
    """Load and index a gazetteer file.

    Record order matches file order. Surfaces shorter than
    ``opts.min_surface_chars`` after normalization are dropped and counted
    as rejected; duplicate (entity_id, surface) pairs keep the first
    occurrence. I/O failures are fatal; malformed rows are not.
    """
    opts = opts or NormalizationOptions()
    path = Path(path)
    gaz = Gazetteer(normalization=opts)
    seen: set[tuple[str, str]] = set()

    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise OSError(f"cannot read gazetteer file {path}: {exc}") from exc

    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) >= 2:
            entity_id, surface_raw = parts[0], parts[1]
        else:
            entity_id, surface_raw = f"L{lineno}", line
        entity_id = entity_id.strip()
        surface = normalize_surface(surface_raw, opts)
        if not entity_id or len(surface) < max(opts.min_surface_chars, 1):
            gaz.rejected += 1
            continue
        key = (entity_id, surface)
        if key in seen:
            gaz.deduplicated += 1
            continue
        seen.add(key)
        gaz.records.append(EntityRecord(entity_id=entity_id, surface=surface))
        gaz.surface_index.setdefault(surface, []).append(entity_id)

    if gaz.rejected:
        logger.warning("gazetteer %s: %d rows rejected", path, gaz.rejected)
    logger.info(
        "gazetteer %s: %d records, %d surfaces, %d deduplicated",
        path,
        len(gaz.records),
        len(gaz.surface_index),
        gaz.deduplicated,
    )
    return gaz
