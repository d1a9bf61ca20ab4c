"""Morphological analysis over the letter graph, with single-error recovery.

A word is analyzed by walking the lexicon automaton letter by letter. At any
final state the walk may branch into a suffix rule (plural, past, progressive)
whose junction follows a declared spelling change, so "moving" is recognized
as move+ing with the stem's final e restored. When a walk dies, analysis is
resumed from the failure point with exactly one error rule - the four Damerau
transformations, tried in the order omission, insertion, transposition,
substitution - instantiating unknown letters only from the automaton's actual
transition options. Later failure points are retried before earlier ones, and
no analysis ever contains a second error.

Error rules are named for the typist's action: an "omission" analysis means
the typist left a letter out, so the analyzer supplies it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .lexicon import Dawg, Node, Payload

VOWELS = set("aeiou")

SPELLING_CHANGES = ("none", "e-deletion", "y-to-i", "consonant-doubling")


class RuleError(ValueError):
    """Raised for malformed suffix-rule files."""


@dataclass(frozen=True)
class SuffixRule:
    """An inflection: stem category + suffix string -> result category."""

    name: str
    stem_cat: str
    suffix: str
    result_cat: str
    change: str = "none"

    def __post_init__(self) -> None:
        if not self.suffix:
            raise RuleError(f"rule {self.name}: empty suffix")
        if self.change not in SPELLING_CHANGES:
            raise RuleError(f"rule {self.name}: unknown spelling change {self.change!r}")

    def matches(self, categories: frozenset[str]) -> bool:
        return any(cat == self.stem_cat or cat.split("[", 1)[0] == self.stem_cat for cat in categories)


@dataclass(frozen=True)
class ErrorRule:
    """One Damerau transformation in two-level form.

    The corrected template is the surface with the error removed; the error
    template is what was actually typed. `*` marks arbitrary context.
    """

    kind: str
    corrected: str
    error: str


OMISSION = ErrorRule("omission", "* X *", "* - *")
INSERTION = ErrorRule("insertion", "* - *", "* X *")
TRANSPOSITION = ErrorRule("transposition", "* X Y *", "* Y X *")
SUBSTITUTION = ErrorRule("substitution", "* X *", "* Y *")

ERROR_RULES = (OMISSION, INSERTION, TRANSPOSITION, SUBSTITUTION)
ERROR_KINDS = tuple(rule.kind for rule in ERROR_RULES)


@dataclass(frozen=True)
class ErrorInfo:
    """Where and what went wrong, in error-surface coordinates.

    `grapheme` holds the corrected letter for omission and substitution, the
    spurious typed letter for insertion, and the typed pair for transposition.
    """

    kind: str
    position: int
    grapheme: str


@dataclass(frozen=True)
class Analysis:
    surface: str
    recovered: str
    stem: str
    suffix: Optional[str]
    rule: Optional[str]
    categories: frozenset[str]
    frequency: int
    error: Optional[ErrorInfo] = None


class _Cursor:
    """A point in the nondeterministic walk: automaton node plus suffix state."""

    __slots__ = ("node", "phase", "stem", "corrected", "payload", "remaining", "rule", "last")

    def __init__(self, node: Node, phase: str = "stem", stem: str = "", corrected: str = "",
                 payload: Optional[Payload] = None, remaining: str = "",
                 rule: Optional[SuffixRule] = None, last: str = ""):
        self.node = node
        self.phase = phase
        self.stem = stem
        self.corrected = corrected
        self.payload = payload
        self.remaining = remaining
        self.rule = rule
        self.last = last

    # -- junctions -----------------------------------------------------------

    def _resolve(self, node: Node, stem: str, payload: Optional[Payload]) -> Optional[Payload]:
        if payload is not None:
            return payload
        return node.marks.get(stem)

    def _junctions(self, rules: tuple[SuffixRule, ...]) -> list[tuple[str, "_Cursor"]]:
        """Suffix-entry moves available here, as (surface letter, new cursor)."""
        out: list[tuple[str, _Cursor]] = []
        node, stem, payload = self.node, self.stem, self.payload
        # Plain attachment and consonant doubling need a final state here.
        if node.final:
            data = self._resolve(node, stem, payload)
            if data is not None:
                for rule in rules:
                    if not rule.matches(data[0]):
                        continue
                    if rule.change == "none":
                        out.append((rule.suffix[0], _Cursor(
                            node, "suffix", stem, self.corrected + rule.suffix[0],
                            data, rule.suffix[1:], rule, "")))
                    elif rule.change == "consonant-doubling" and self.last and self.last not in VOWELS:
                        out.append((self.last, _Cursor(
                            node, "suffix", stem, self.corrected + self.last,
                            data, rule.suffix, rule, "")))
        # e-deletion and y-to-i look one transition ahead to a final state.
        for lexical, surface_first in (("e", None), ("y", "i")):
            edge = node.edges.get(lexical)
            if edge is None or not edge[0].final:
                continue
            ahead, ahead_payload = edge
            data = self._resolve(ahead, stem + lexical, payload or ahead_payload)
            if data is None:
                continue
            for rule in rules:
                if not rule.matches(data[0]):
                    continue
                if lexical == "e" and rule.change == "e-deletion":
                    # Stem-final e is dropped: surface goes straight into the suffix.
                    out.append((rule.suffix[0], _Cursor(
                        ahead, "suffix", stem + "e", self.corrected + rule.suffix[0],
                        data, rule.suffix[1:], rule, "")))
                elif lexical == "y" and rule.change == "y-to-i":
                    # Lexical y surfaces as i; the suffix letters follow.
                    out.append((surface_first, _Cursor(
                        ahead, "suffix", stem + "y", self.corrected + "i",
                        data, rule.suffix, rule, "")))
        return out

    # -- walking --------------------------------------------------------------

    def advance(self, letter: str, rules: tuple[SuffixRule, ...]) -> list["_Cursor"]:
        if self.phase == "suffix":
            if self.remaining and self.remaining[0] == letter:
                return [_Cursor(self.node, "suffix", self.stem, self.corrected + letter,
                                self.payload, self.remaining[1:], self.rule, "")]
            return []
        out: list[_Cursor] = []
        edge = self.node.edges.get(letter)
        if edge is not None:
            target, payload = edge
            out.append(_Cursor(target, "stem", self.stem + letter, self.corrected + letter,
                               self.payload or payload, "", None, letter))
        for jletter, cursor in self._junctions(rules):
            if jletter == letter:
                out.append(cursor)
        return out

    def successor_letters(self, rules: tuple[SuffixRule, ...]) -> list[str]:
        """Letters the lexicon allows next; error rules instantiate from these."""
        if self.phase == "suffix":
            return [self.remaining[0]] if self.remaining else []
        letters = set(self.node.edges)
        letters.update(jletter for jletter, _ in self._junctions(rules))
        return sorted(letters)

    def completions(self) -> list[tuple[str, Optional[str], Optional[SuffixRule], Payload]]:
        """Accepting readings if the surface ended here: (stem, suffix, rule, data)."""
        if self.phase == "suffix":
            if not self.remaining and self.rule is not None:
                return [(self.stem, self.rule.suffix, self.rule, self.payload)]
            return []
        if self.node.final:
            data = self._resolve(self.node, self.stem, self.payload)
            if data is not None:
                return [(self.stem, None, None, data)]
        return []


class MorphAnalyzer:
    """Bundles the lexicon automaton with a suffix-rule set."""

    def __init__(self, dawg: Dawg, rules: Iterable[SuffixRule] = ()):
        self.dawg = dawg
        self.rules = tuple(rules)
        self._rule_order = {rule.name: i for i, rule in enumerate(self.rules)}

    def _start(self) -> _Cursor:
        return _Cursor(self.dawg.start)

    def _completion_analyses(self, surface: str, cursor: _Cursor,
                             error: Optional[ErrorInfo]) -> list[Analysis]:
        out = []
        for stem, suffix, rule, data in cursor.completions():
            if rule is None:
                categories, freq = data
            else:
                categories, freq = frozenset({rule.result_cat}), data[1]
            out.append(Analysis(
                surface=surface, recovered=cursor.corrected, stem=stem,
                suffix=suffix, rule=rule.name if rule else None,
                categories=categories, frequency=freq, error=error))
        return out

    def _sort_key(self, analysis: Analysis) -> tuple:
        rule_rank = -1 if analysis.rule is None else self._rule_order[analysis.rule]
        return (0 if analysis.rule is None else 1, rule_rank, -len(analysis.stem))

    def analyze(self, word: str) -> list[Analysis]:
        """Error-free readings of the word; empty list when it is not lexical."""
        if not word:
            return []
        cursors = [self._start()]
        for letter in word:
            cursors = [c2 for c in cursors for c2 in c.advance(letter, self.rules)]
            if not cursors:
                return []
        analyses = [a for c in cursors for a in self._completion_analyses(word, c, None)]
        analyses.sort(key=self._sort_key)
        return analyses

    def analyze_with_errors(self, word: str) -> Iterator[Analysis]:
        """Lazily enumerate single-error readings of a non-lexical word.

        Resume points run from the failure point backwards; at each point the
        rule kinds are tried in the fixed order, and ties inside one kind are
        broken by the alphabet of the instantiated grapheme. The continuation
        after the one postulated error is strictly error-free.
        """
        trace: list[list[_Cursor]] = [[self._start()]]
        for letter in word:
            nxt = [c2 for c in trace[-1] for c2 in c.advance(letter, self.rules)]
            if not nxt:
                break
            trace.append(nxt)
        seen: set[tuple] = set()
        for i in range(len(trace) - 1, -1, -1):
            for rule in ERROR_RULES:
                proposals: list[tuple[str, int, _Cursor, int]] = []
                for order, cursor in enumerate(trace[i]):
                    for grapheme, moved, consumed in apply_error_rule(
                            rule, word[i:], cursor, self.rules):
                        proposals.append((grapheme, order, moved, consumed))
                proposals.sort(key=lambda p: (p[0], p[1]))
                for grapheme, _, cursor, consumed in proposals:
                    error = ErrorInfo(rule.kind, i, grapheme)
                    for analysis in self._finish_clean(word, i + consumed, cursor, error):
                        key = (analysis.recovered, analysis.stem, analysis.suffix,
                               analysis.rule, analysis.error)
                        if key not in seen:
                            seen.add(key)
                            yield analysis

    def _finish_clean(self, word: str, pos: int, cursor: _Cursor,
                      error: ErrorInfo) -> list[Analysis]:
        cursors = [cursor]
        for letter in word[pos:]:
            cursors = [c2 for c in cursors for c2 in c.advance(letter, self.rules)]
            if not cursors:
                return []
        analyses = [a for c in cursors for a in self._completion_analyses(word, c, error)]
        analyses.sort(key=self._sort_key)
        return analyses


def apply_error_rule(rule: ErrorRule, fragment: str, cursor: _Cursor,
                     suffix_rules: tuple[SuffixRule, ...] = ()) -> list[tuple[str, _Cursor, int]]:
    """Apply one error rule at a resume point.

    `fragment` is the unconsumed error surface. Returns (grapheme, cursor,
    surface letters consumed) triples; an empty list means the rule cannot
    fire here. Omission consumes no surface letter and advances the walk on
    any lexical successor; insertion consumes the typed letter and stays put;
    transposition swaps the next two distinct letters; substitution consumes
    one letter and advances on any different successor.
    """
    out: list[tuple[str, _Cursor, int]] = []
    if rule.kind == "omission":
        for letter in cursor.successor_letters(suffix_rules):
            for moved in cursor.advance(letter, suffix_rules):
                out.append((letter, moved, 0))
    elif rule.kind == "insertion":
        if fragment:
            out.append((fragment[0], cursor, 1))
    elif rule.kind == "transposition":
        if len(fragment) >= 2 and fragment[0] != fragment[1]:
            pair = fragment[:2]
            for mid in cursor.advance(pair[1], suffix_rules):
                for moved in mid.advance(pair[0], suffix_rules):
                    out.append((pair, moved, 2))
    elif rule.kind == "substitution":
        if fragment:
            typed = fragment[0]
            for letter in cursor.successor_letters(suffix_rules):
                if letter == typed:
                    continue
                for moved in cursor.advance(letter, suffix_rules):
                    out.append((letter, moved, 1))
    else:  # pragma: no cover - the rule set is closed
        raise ValueError(f"unknown error rule kind {rule.kind!r}")
    return out


# ---------------------------------------------------------------------------
# Suffix-rule file: name<TAB>stem-cat<TAB>suffix<TAB>result-cat<TAB>change
# ---------------------------------------------------------------------------


def parse_suffix_rules(lines: Iterable[str]) -> list[SuffixRule]:
    rules = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise RuleError(f"line {lineno}: expected 5 tab-separated fields")
        rules.append(SuffixRule(*[p.strip() for p in parts]))
    return rules


def load_suffix_rules(path: str | Path) -> list[SuffixRule]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_suffix_rules(fh)
