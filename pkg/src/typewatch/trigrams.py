"""Positional binary letter trigrams: error spotting and cheap candidate generation.

Words are padded with start/end sentinels and every trigram is recorded under
its (clamped) start position. A trigram absent from the tables localizes an
error; reverse Damerau transformations applied around the failing positions
then propose lexical corrections, ranked by error-kind frequency weights and
a damped word-frequency preference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import log
from pathlib import Path
from typing import Callable, Iterable, Optional

from .lexicon import Dawg, lookup_payload

START = "^"
END = "$"

DEFAULT_POSITION_CLAMP = 12

# Stand-in weights for how often typists make each slip, following the usual
# omission > insertion > transposition > substitution ordering; configurable.
DEFAULT_KIND_WEIGHTS = {
    "omission": 0.40,
    "insertion": 0.30,
    "transposition": 0.18,
    "substitution": 0.12,
}

KIND_ORDER = ("omission", "insertion", "transposition", "substitution")


class ModelError(ValueError):
    """Raised for malformed trigram model files."""


@dataclass
class PbtTables:
    alphabet: str
    clamp: int = DEFAULT_POSITION_CLAMP
    members: set[tuple[int, str]] = field(default_factory=set)

    def has(self, position: int, trigram: str) -> bool:
        return (min(position, self.clamp), trigram) in self.members

    def add(self, position: int, trigram: str) -> None:
        self.members.add((min(position, self.clamp), trigram))


@dataclass(frozen=True)
class CandidateCorrection:
    word: str
    kind: str
    position: int
    kind_weight: float
    frequency: int

    @property
    def score(self) -> float:
        return self.kind_weight * log(1 + self.frequency)


def _padded_trigrams(word: str) -> Iterable[tuple[int, str]]:
    padded = START + word + END
    for i in range(len(padded) - 2):
        yield i, padded[i : i + 3]


def train_pbt(words: list[str], alphabet: str = "abcdefghijklmnopqrstuvwxyz'-",
              clamp: int = DEFAULT_POSITION_CLAMP) -> PbtTables:
    """Record every positional trigram of the training words."""
    if not words:
        raise ModelError("no training words")
    tables = PbtTables(alphabet=alphabet, clamp=clamp)
    for word in words:
        for pos, tri in _padded_trigrams(word):
            tables.add(pos, tri)
    return tables


def check_word(tables: PbtTables, word: str) -> list[int]:
    """Start positions (in the padded word) of untrained trigrams."""
    return [pos for pos, tri in _padded_trigrams(word) if not tables.has(pos, tri)]


def _edit_sites(tables: PbtTables, failing: list[int], length: int) -> range:
    """Word-index window implied by the failing trigram spans, widened by one.

    A failing trigram starting at padded position p covers word indices
    p-1..p+1; sites within one letter of any failing span are candidates. A
    clamped failing position could come from anywhere at or past the clamp.
    """
    lo = max(0, min(failing) - 2)
    if max(failing) >= tables.clamp:
        hi = length
    else:
        hi = min(length, max(failing) + 2)
    return range(lo, hi + 1)


def generate_candidates(word: str, dawg: Dawg, tables: PbtTables) -> set[CandidateCorrection]:
    """Lexical words one reverse Damerau transformation away from `word`.

    Edit sites are restricted to a window around the failing trigram spans;
    when no trigram fails, every site is scanned.
    """
    failing = check_word(tables, word)
    sites = _edit_sites(tables, failing, len(word)) if failing else range(len(word) + 1)
    return generate_candidates_full(word, dawg, sites=sites)


def generate_candidates_full(word: str, dawg: Dawg,
                             sites: Optional[range] = None) -> set[CandidateCorrection]:
    """Reverse-transformation scan over the given sites (all sites if None)."""
    if sites is None:
        sites = range(len(word) + 1)
    alphabet = sorted(set(dawg.alphabet))
    out: set[CandidateCorrection] = set()

    def propose(candidate: str, kind: str, position: int) -> None:
        if candidate == word:
            return
        payload = lookup_payload(dawg, candidate)
        if payload is not None:
            out.add(CandidateCorrection(candidate, kind, position,
                                        DEFAULT_KIND_WEIGHTS[kind], payload[1]))

    for i in sites:
        # Typist omitted a letter before position i: put each letter back.
        for letter in alphabet:
            propose(word[:i] + letter + word[i:], "omission", i)
        if i < len(word):
            # Typist inserted word[i]: drop it.
            propose(word[:i] + word[i + 1 :], "insertion", i)
            # Typist substituted word[i] for another letter: restore each.
            for letter in alphabet:
                if letter != word[i]:
                    propose(word[:i] + letter + word[i + 1 :], "substitution", i)
        if i + 1 < len(word) and word[i] != word[i + 1]:
            # Typist swapped a pair: swap it back.
            propose(word[:i] + word[i + 1] + word[i] + word[i + 2 :], "transposition", i)
    return out


def rank_candidates(candidates: Iterable[CandidateCorrection],
                    kind_weights: Optional[dict[str, float]] = None,
                    frequencies: Optional[dict[str, int]] = None,
                    prefer: Optional[Callable[[CandidateCorrection], bool]] = None,
                    ) -> list[CandidateCorrection]:
    """Order candidates by kind weight x log(1+frequency), descending.

    Ties break alphabetically, then by kind order and position, so the result
    is a total order independent of input permutation. `prefer` promotes
    matching candidates within an otherwise-tied score group (used for the
    session error log).
    """
    weights = kind_weights or DEFAULT_KIND_WEIGHTS
    for kind, weight in weights.items():
        if weight <= 0:
            raise ModelError(f"kind weight for {kind} must be positive")

    def rescored(c: CandidateCorrection) -> CandidateCorrection:
        freq = c.frequency if frequencies is None else frequencies.get(c.word, c.frequency)
        return CandidateCorrection(c.word, c.kind, c.position, weights[c.kind], freq)

    rescored_list = [rescored(c) for c in candidates]

    def key(c: CandidateCorrection) -> tuple:
        boost = 0 if prefer is not None and prefer(c) else 1
        return (-round(c.score, 12), boost, c.word, KIND_ORDER.index(c.kind), c.position)

    return sorted(rescored_list, key=key)


# ---------------------------------------------------------------------------
# Model file: header lines, then one pos<TAB>trigram line per member.
# ---------------------------------------------------------------------------

FORMAT_TAG = "#typewatch-pbt v1"


def save_pbt(tables: PbtTables, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FORMAT_TAG + "\n")
        fh.write(f"#alphabet: {tables.alphabet}\n")
        fh.write(f"#clamp: {tables.clamp}\n")
        for pos, tri in sorted(tables.members):
            fh.write(f"{pos}\t{tri}\n")


def load_pbt(path: str | Path) -> PbtTables:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != FORMAT_TAG:
            raise ModelError(f"not a trigram model: {path}")
        alphabet = "abcdefghijklmnopqrstuvwxyz'-"
        clamp = DEFAULT_POSITION_CLAMP
        members: set[tuple[int, str]] = set()
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if line.startswith("#alphabet:"):
                alphabet = line.split(":", 1)[1].strip()
            elif line.startswith("#clamp:"):
                clamp = int(line.split(":", 1)[1])
            elif line.startswith("#") or not line.strip():
                continue
            else:
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ModelError(f"line {lineno}: expected pos<TAB>trigram")
                members.add((int(parts[0]), parts[1]))
    return PbtTables(alphabet=alphabet, clamp=clamp, members=members)
