"""Multi-pattern exact matching of gazetteer surfaces in context text.

The automaton is a classic Aho-Corasick machine built over the UTF-8 byte
sequences of all normalized surfaces:

    1. goto trie: one flat dict keyed by ``(state << 8) | byte``, so the
       hot scanning loop does a single int-keyed dict lookup per byte;
    2. failure links (BFS from root): longest proper suffix of the current
       path that is also a pattern prefix;
    3. output lists propagated along failure links, so every state knows
       every pattern ending there, including nested suffixes.

Operating on bytes makes all reported offsets byte offsets into the UTF-8
encoding of the context, and it is sound: a valid UTF-8 pattern can only
occur at character boundaries of valid UTF-8 text (continuation bytes never
start a pattern), so matches always align to characters.

A built automaton is immutable and safe to share across threads; scanning
is pure.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from hashlib import sha256

from gotta.gazetteer import Gazetteer, fold_case

__all__ = [
    "EntitySpan",
    "MatchAutomaton",
    "RawMatch",
    "build_automaton",
    "find_all",
    "resolve_spans",
]


@dataclass(frozen=True, order=True)
class RawMatch:
    """One occurrence of one pattern, byte offsets [start, end)."""

    start: int
    end: int
    surface: str
    entity_id: str


@dataclass(frozen=True)
class EntitySpan:
    """A match that survived boundary filtering and overlap resolution."""

    start: int
    end: int
    surface: str
    entity_id: str | None
    retained: bool = True


class MatchAutomaton:
    """Compiled Aho-Corasick automaton over all gazetteer surfaces.

    Do not construct directly; use :func:`build_automaton`.
    """

    def __init__(
        self,
        goto: dict[int, int],
        fail: array,
        out: dict[int, list[int]],
        patterns: list[str],
        pattern_lengths: list[int],
        entity_ids: list[str],
        build_options,
        content_hash: str,
    ) -> None:
        self._goto = goto
        self._fail = fail
        self._out = out
        self._patterns = patterns
        self._pattern_lengths = pattern_lengths
        self._entity_ids = entity_ids
        self.build_options = build_options
        self.content_hash = content_hash

    @property
    def pattern_count(self) -> int:
        return len(self._patterns)


def build_automaton(g: Gazetteer) -> MatchAutomaton:
    """Compile the gazetteer's distinct normalized surfaces into an automaton.

    Build time and memory are linear in the total surface byte length.
    Raises ValueError on an empty gazetteer: there is nothing to match.
    """
    if not g.surface_index:
        raise ValueError("cannot build a match automaton from an empty gazetteer")

    patterns: list[str] = []
    pattern_lengths: list[int] = []
    entity_ids: list[str] = []
    hasher = sha256()

    goto: dict[int, int] = {}
    parent = array("l", [0])
    inbyte = array("l", [0])
    by_depth: list[array] = []  # states grouped by trie depth, creation order
    n_states = 1
    out: dict[int, list[int]] = {}

    for surface, ids in g.surface_index.items():
        pid = len(patterns)
        patterns.append(surface)
        entity_ids.append(ids[0])
        data = surface.encode("utf-8")
        pattern_lengths.append(len(data))
        hasher.update(data)
        hasher.update(b"\x00")
        state = 0
        depth = 0
        for b in data:
            depth += 1
            key = (state << 8) | b
            nxt = goto.setdefault(key, n_states)
            if nxt == n_states:
                parent.append(state)
                inbyte.append(b)
                while len(by_depth) < depth:
                    by_depth.append(array("l"))
                by_depth[depth - 1].append(nxt)
                n_states += 1
            state = nxt
        out.setdefault(state, []).append(pid)

    # Failure links, processed in increasing depth so every failure target
    # (always strictly shallower) is final before it is consulted. A state's
    # failure link is the longest proper suffix of its path that is also a
    # pattern prefix, found by walking the parent's failure chain. Outputs
    # of the failure target are appended so nested patterns (e.g. "he"
    # inside "she") surface at the deeper state too.
    fail = array("l", [0]) * n_states
    if by_depth:
        for level, states in enumerate(by_depth):
            if level == 0:
                continue  # depth-1 states fail to the root
            for s in states:
                b = inbyte[s]
                f = fail[parent[s]]
                while True:
                    nxt = goto.get((f << 8) | b)
                    if nxt is not None:
                        fail[s] = nxt
                        break
                    if f == 0:
                        fail[s] = 0
                        break
                    f = fail[f]
                tgt_out = out.get(fail[s])
                if tgt_out:
                    if s in out:
                        out[s] = out[s] + tgt_out
                    else:
                        out[s] = tgt_out

    return MatchAutomaton(
        goto=goto,
        fail=fail,
        out=out,
        patterns=patterns,
        pattern_lengths=pattern_lengths,
        entity_ids=entity_ids,
        build_options=g.normalization,
        content_hash=hasher.hexdigest(),
    )


def find_all(a: MatchAutomaton, text: str) -> list[RawMatch]:
    """Report every occurrence of every pattern in ``text``, overlaps included.

    Single pass over the UTF-8 bytes of ``text`` (case-folded first when the
    automaton was built with case_fold). Results are ordered by (start, end).
    """
    if not text:
        return []
    raw = text.encode("utf-8")
    data = fold_case(text).encode("utf-8") if a.build_options.case_fold else raw

    goto = a._goto
    fail = a._fail
    out = a._out
    lengths = a._pattern_lengths
    entity_ids = a._entity_ids

    matches: list[RawMatch] = []
    append = matches.append
    state = 0
    pos = 0
    for b in data:
        pos += 1
        while True:
            nxt = goto.get((state << 8) | b)
            if nxt is not None:
                state = nxt
                break
            if state == 0:
                break
            state = fail[state]
        if state in out:
            for pid in out[state]:
                start = pos - lengths[pid]
                append(
                    RawMatch(
                        start=start,
                        end=pos,
                        surface=raw[start:pos].decode("utf-8"),
                        entity_id=entity_ids[pid],
                    )
                )
    matches.sort(key=lambda m: (m.start, m.end))
    return matches


def _alnum_flags(text: str) -> dict[int, tuple[bool, bool]]:
    """Map each character-boundary byte offset to (alnum before, alnum at)."""
    flags: dict[int, tuple[bool, bool]] = {}
    offset = 0
    prev_alnum = False
    for ch in text:
        flags[offset] = (prev_alnum, ch.isalnum())
        prev_alnum = ch.isalnum()
        offset += len(ch.encode("utf-8"))
    flags[offset] = (prev_alnum, False)
    return flags


def resolve_spans(matches: list[RawMatch], text: str) -> list[EntitySpan]:
    """Filter matches to word boundaries, then pick a non-overlapping set.

    A match is boundary-valid when neither its start nor its end offset
    falls strictly inside a Unicode alphanumeric run (this is what stops a
    gazetteer entry "Art" from matching inside "Artificial"). Selection is
    then greedy left to right: at each candidate start keep the longest
    boundary-valid match and drop everything overlapping it. Input must be
    sorted by (start, end); output is sorted and pairwise non-overlapping.
    """
    if not matches:
        return []
    flags = _alnum_flags(text)

    def boundary_ok(m: RawMatch) -> bool:
        before_s, at_s = flags[m.start]
        before_e, at_e = flags[m.end]
        return not (before_s and at_s) and not (before_e and at_e)

    valid = [m for m in matches if boundary_ok(m)]
    kept: list[EntitySpan] = []
    i = 0
    n = len(valid)
    last_end = -1
    while i < n:
        m = valid[i]
        if m.start < last_end:
            i += 1
            continue
        # Longest boundary-valid match at this start: candidates share
        # m.start and arrive end-ascending, so take the last of the group.
        j = i
        while j + 1 < n and valid[j + 1].start == m.start:
            j += 1
        best = valid[j]
        kept.append(
            EntitySpan(
                start=best.start,
                end=best.end,
                surface=best.surface,
                entity_id=best.entity_id,
                retained=True,
            )
        )
        last_end = best.end
        i = j + 1
    return kept
