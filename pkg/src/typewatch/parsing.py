"""Phrasal parsing and segment tiling over the sliding window.

A small context-free grammar over tags drives two phases: a bottom-up phrasal
phase that charts every complete constituent, and a tiling phase that breaks
the visible wordstring into maximal segments (greedy longest constituent left
to right, uncovered words standing as singletons). Because the window's right
edge is usually mid-phrase, trailing words that could still start or continue
a root constituent are held in an open segment together with the predicted
categories instead of being finalized. Constituents already derived for words
still in the window are kept and reused as the window grows; they are evicted
only when their leftmost word scrolls out.

A final phase proposes simple phrase repairs - deleting a doubled word or
inserting a common function word - each re-verified by re-parsing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

class GrammarError(ValueError):
    """Raised for malformed grammar files or useless grammars."""


@dataclass(frozen=True)
class Production:
    lhs: str
    rhs: tuple[str, ...]


class Grammar:
    """Context-free grammar over tags, with derived prediction relations."""

    def __init__(self, productions: list[Production], start: list[str],
                 function_words: list[str]):
        if not productions:
            raise GrammarError("no productions")
        self.productions = productions
        self.nonterminals = {p.lhs for p in productions}
        self.terminals = {s for p in productions for s in p.rhs} - self.nonterminals
        for sym in start:
            if sym not in self.nonterminals:
                raise GrammarError(f"start symbol {sym} has no production")
        self.start = start
        self.function_words = function_words
        self.nullable = self._nullable()
        self._check_productive()
        self.can_start = {nt: self._left_corner(nt) for nt in self.nonterminals}

    def _nullable(self) -> set[str]:
        nullable: set[str] = set()
        changed = True
        while changed:
            changed = False
            for p in self.productions:
                if p.lhs not in nullable and all(s in nullable for s in p.rhs):
                    nullable.add(p.lhs)
                    changed = True
        return nullable

    def _check_productive(self) -> None:
        productive = set(self.terminals)
        changed = True
        while changed:
            changed = False
            for p in self.productions:
                if p.lhs not in productive and all(s in productive for s in p.rhs):
                    productive.add(p.lhs)
                    changed = True
        dead = self.nonterminals - productive
        if dead:
            raise GrammarError(f"unproductive nonterminals: {sorted(dead)}")

    def _left_corner(self, root: str) -> frozenset[str]:
        """Terminals that can begin a phrase of the given category."""
        corners: set[str] = set()
        seen: set[str] = set()

        def visit(nt: str) -> None:
            if nt in seen:
                return
            seen.add(nt)
            for p in self.productions:
                if p.lhs != nt:
                    continue
                for sym in p.rhs:
                    if sym in self.terminals:
                        corners.add(sym)
                        break
                    visit(sym)
                    if sym not in self.nullable:
                        break
        visit(root)
        return frozenset(corners)

    def viable_prefix(self, root: str, seq: list[str]) -> bool:
        """Can `seq` be extended (possibly by nothing) into a complete `root`?"""

        def match(symbols: tuple[str, ...], pos: int, expanding: frozenset) -> bool:
            if pos == len(seq):
                return True
            if not symbols:
                return False
            head, rest = symbols[0], symbols[1:]
            if head in self.terminals:
                return head == seq[pos] and match(rest, pos + 1, frozenset())
            for p in self.productions:
                if p.lhs != head:
                    continue
                key = (head, p.rhs)
                if key in expanding:
                    continue
                if match(p.rhs + rest, pos, expanding | {key}):
                    return True
            return False

        return match((root,), 0, frozenset())


@dataclass(frozen=True)
class Constituent:
    """A complete phrase over window token indices [start, end)."""

    label: str
    start: int
    end: int
    children: tuple["Constituent", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children and self.end == self.start + 1


@dataclass(frozen=True)
class Segment:
    """One tile of the wordstring; root is None for an unattached word."""

    start: int
    end: int
    root: Optional[Constituent] = None


@dataclass
class PurviewParse:
    """Tiling of the window: closed tiles plus an optional open right edge."""

    segments: list[Segment]
    open_start: Optional[int] = None
    predictions: frozenset[str] = frozenset()


class Chart:
    """Incremental exhaustive chart: every complete constituent over the window.

    Positions are absolute token indices, so remembered constituents survive
    as the window slides; extending by one tag only adds items at the new
    position, and eviction just filters out items whose origin scrolled away.
    """

    def __init__(self, grammar: Grammar, origin: int = 0):
        self.grammar = grammar
        self.origin = origin
        self.tags: dict[int, str] = {}
        self.items: dict[int, set[tuple]] = {origin: set()}
        self.complete: set[tuple[str, int, int]] = set()
        self.extensions = 0
        self._close(origin)

    @property
    def end(self) -> int:
        return self.origin + len(self.tags)

    def _close(self, k: int) -> None:
        """Saturate position k with predictions and completions."""
        chart = self.items.setdefault(k, set())
        agenda = [(p.lhs, p.rhs, 0, k) for p in self.grammar.productions]
        agenda.extend(chart)
        chart.clear()
        while agenda:
            item = agenda.pop()
            if item in chart:
                continue
            chart.add(item)
            lhs, rhs, dot, org = item
            if dot == len(rhs):
                span = (lhs, org, k)
                if span not in self.complete:
                    self.complete.add(span)
                    for wl, wr, wd, worg in list(self.items.get(org, ())):
                        if wd < len(wr) and wr[wd] == lhs:
                            agenda.append((wl, wr, wd + 1, worg))
            else:
                # Items landing after an empty completion at k still advance.
                nxt = rhs[dot]
                if nxt in self.grammar.nonterminals and (nxt, k, k) in self.complete:
                    agenda.append((lhs, rhs, dot + 1, org))

    def extend(self, tag: str) -> None:
        """Scan one more tag at the current end position."""
        k = self.end
        self.tags[k] = tag
        nxt: set[tuple] = set()
        for lhs, rhs, dot, org in self.items.get(k, ()):
            if dot < len(rhs) and rhs[dot] == tag:
                nxt.add((lhs, rhs, dot + 1, org))
        self.items[k + 1] = nxt
        self.extensions += 1
        self._close(k + 1)

    def evict(self, new_origin: int) -> None:
        """Drop everything that mentions tokens before new_origin."""
        if new_origin <= self.origin:
            return
        self.origin = new_origin
        self.tags = {i: t for i, t in self.tags.items() if i >= new_origin}
        self.items = {
            k: {it for it in items if it[3] >= new_origin}
            for k, items in self.items.items() if k >= new_origin
        }
        self.complete = {(a, i, j) for (a, i, j) in self.complete if i >= new_origin}

    def constituents(self) -> list[Constituent]:
        """Non-empty complete constituents, with one derivation built each."""
        return [self.constituent(a, i, j)
                for (a, i, j) in sorted(self.complete) if j > i]

    def constituent(self, label: str, start: int, end: int) -> Constituent:
        built = self._derive(label, start, end, frozenset())
        if built is None:  # pragma: no cover - complete spans always derive
            raise GrammarError(f"span ({label},{start},{end}) not derivable")
        return built

    def _derive(self, label: str, start: int, end: int,
                active: frozenset) -> Optional[Constituent]:
        key = (label, start, end)
        if key in active:
            return None
        for p in self.grammar.productions:
            if p.lhs != label:
                continue
            children = self._fit(p.rhs, start, end, active | {key})
            if children is not None:
                return Constituent(label, start, end, tuple(children))
        return None

    def _fit(self, symbols: tuple[str, ...], start: int, end: int,
             active: frozenset) -> Optional[list[Constituent]]:
        if not symbols:
            return [] if start == end else None
        head, rest = symbols[0], symbols[1:]
        if head in self.grammar.terminals:
            if start < end and self.tags.get(start) == head:
                tail = self._fit(rest, start + 1, end, active)
                if tail is not None:
                    return [Constituent(head, start, start + 1)] + tail
            return None
        for mid in range(start, end + 1):
            if (head, start, mid) not in self.complete:
                continue
            sub = self._derive(head, start, mid, active)
            if sub is None:
                continue
            tail = self._fit(rest, mid, end, active)
            if tail is not None:
                return [sub] + tail
        return None


def phrasal_parse(tags: list[str], grammar: Grammar, origin: int = 0) -> Chart:
    """Chart every complete constituent derivable over the tag string."""
    if not tags:
        raise GrammarError("empty tag string")
    chart = Chart(grammar, origin)
    for tag in tags:
        chart.extend(tag)
    return chart


def partial_parse(chart: Chart, grammar: Grammar) -> list[Segment]:
    """Greedy left-to-right tiling into maximal segments.

    At each position the longest complete constituent rooted in a start
    category wins; ties go to the higher-ranked root. Words nothing covers
    become singleton segments.
    """
    segments: list[Segment] = []
    p = chart.origin
    end = chart.end
    while p < end:
        best: Optional[tuple[int, int, str]] = None
        for rank, root in enumerate(grammar.start):
            for (label, i, j) in chart.complete:
                if label == root and i == p and j > p:
                    cand = (-(j - p), rank, label)
                    if best is None or cand < best:
                        best = cand
        if best is not None:
            j = p + (-best[0])
            segments.append(Segment(p, j, chart.constituent(best[2], p, j)))
            p = j
        else:
            segments.append(Segment(p, p + 1, None))
            p += 1
    return segments


def purview_parse(chart: Chart, grammar: Grammar) -> PurviewParse:
    """Tile the window but keep a still-growable right edge open.

    Tiling proceeds as in `partial_parse`; at a position with no complete
    constituent, if the remaining tags form a viable prefix of some root
    category the rest of the window is held open with those categories
    predicted rather than split into singletons.
    """
    segments: list[Segment] = []
    p = chart.origin
    end = chart.end
    while p < end:
        best: Optional[tuple[int, int, str]] = None
        for rank, root in enumerate(grammar.start):
            for (label, i, j) in chart.complete:
                if label == root and i == p and j > p:
                    cand = (-(j - p), rank, label)
                    if best is None or cand < best:
                        best = cand
        if best is not None:
            j = p + (-best[0])
            segments.append(Segment(p, j, chart.constituent(best[2], p, j)))
            p = j
            continue
        suffix = [chart.tags[i] for i in range(p, end)]
        predicted = frozenset(root for root in grammar.start
                              if grammar.viable_prefix(root, suffix))
        if predicted:
            return PurviewParse(segments, open_start=p, predictions=predicted)
        segments.append(Segment(p, p + 1, None))
        p += 1
    return PurviewParse(segments)


def finalize(parse: PurviewParse, chart: Chart, grammar: Grammar) -> list[Segment]:
    """Close an open right edge by tiling it as if input had ended."""
    if parse.open_start is None:
        return parse.segments
    sub = Chart(grammar, parse.open_start)
    for i in range(parse.open_start, chart.end):
        sub.extend(chart.tags[i])
    return parse.segments + partial_parse(sub, grammar)


@dataclass(frozen=True)
class PhraseRepair:
    """A phrase-level repair: drop a doubled word or insert a function word."""

    kind: str  # "doubling" or "missing-word"
    position: int  # absolute token index of the deletion / insertion point
    word: str  # the word removed or inserted
    tiles_before: int
    tiles_after: int


def hypothesize_phrase_error(tokens: list[tuple[str, str]], grammar: Grammar,
                             origin: int = 0,
                             tags_of: Optional[Callable[[str], list[str]]] = None,
                             ) -> list[PhraseRepair]:
    """Propose phrase repairs for a window of (surface, tag) tokens.

    Doubled-word deletions are tried first, then insertion of each configured
    function word at each segment boundary; a repair is emitted only when
    re-parsing the repaired window yields fewer tiles.
    """
    surfaces = [s for s, _ in tokens]
    tags = [t for _, t in tokens]

    def tiles(tag_seq: list[str]) -> int:
        if not tag_seq:
            return 0
        return len(partial_parse(phrasal_parse(tag_seq, grammar), grammar))

    before = tiles(tags)
    repairs: list[PhraseRepair] = []
    for i in range(1, len(surfaces)):
        if surfaces[i] == surfaces[i - 1]:
            after = tiles(tags[:i] + tags[i + 1 :])
            if after < before:
                repairs.append(PhraseRepair("doubling", origin + i, surfaces[i], before, after))
    if tags_of is not None:
        boundaries = _segment_boundaries(tags, grammar)
        for b in boundaries:
            for word in grammar.function_words:
                for tag in tags_of(word):
                    after = tiles(tags[:b] + [tag] + tags[b:])
                    if after < before:
                        repairs.append(PhraseRepair("missing-word", origin + b, word, before, after))
                        break
    return repairs


def _segment_boundaries(tags: list[str], grammar: Grammar) -> list[int]:
    segments = partial_parse(phrasal_parse(tags, grammar), grammar) if tags else []
    return [seg.start for seg in segments[1:]]


def render_segments(segments: list[Segment], surfaces: dict[int, str]) -> str:
    """Human-readable tiling, e.g. "ate | the | nice | friendly"."""
    parts = []
    for seg in segments:
        parts.append(" ".join(surfaces[i] for i in range(seg.start, seg.end)))
    return " | ".join(parts)


def segment_counts(segments: list[Segment]) -> tuple[int, int]:
    """(tiles, phrases): all tiles vs tiles rooted in a grammar constituent."""
    return len(segments), sum(1 for seg in segments if seg.root is not None)


# ---------------------------------------------------------------------------
# Grammar file: LHS -> RHS... productions, %start roots, %function words.
# ---------------------------------------------------------------------------


def parse_grammar(lines: Iterable[str]) -> Grammar:
    productions: list[Production] = []
    start: list[str] = []
    function_words: list[str] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%start"):
            start.extend(line.split()[1:])
        elif line.startswith("%function"):
            function_words.extend(line.split()[1:])
        elif "->" in line:
            lhs, rhs = line.split("->", 1)
            lhs = lhs.strip()
            if not lhs:
                raise GrammarError(f"line {lineno}: missing left-hand side")
            productions.append(Production(lhs, tuple(rhs.split())))
        else:
            raise GrammarError(f"line {lineno}: not a production: {line!r}")
    if not start:
        raise GrammarError("no %start declaration")
    return Grammar(productions, start, function_words)


def load_grammar(path: str | Path) -> Grammar:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_grammar(fh)
