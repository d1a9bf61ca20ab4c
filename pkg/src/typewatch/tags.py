"""Category-to-tag mapping and positional tag-trigram validation.

Morphological categories are mapped onto a small tagset through an ordered
rule file; the resulting tag choices for a word are then checked against a
binary occurrence table of positional tag trigrams trained from a tagged
corpus. Positions count from the most recent sentence boundary and clamp at
a configurable depth. Checking is lazy: candidate tags are yielded one at a
time so a downstream failure can resume the enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

START = "^"
END = "$"

DEFAULT_POSITION_CLAMP = 20


class CorpusError(ValueError):
    """Raised for malformed tagged-corpus or mapping files."""


def _parse_label(label: str) -> tuple[str, frozenset[str]]:
    """Split a category label into base symbol and feature assignments."""
    if "[" in label and label.endswith("]"):
        base, feats = label.split("[", 1)
        items = frozenset(f.strip() for f in feats[:-1].split(",") if f.strip())
        return base, items
    return label, frozenset()


@dataclass(frozen=True)
class MappingRule:
    pattern: str
    tag: str

    def matches(self, category: str) -> bool:
        pbase, pfeats = _parse_label(self.pattern)
        cbase, cfeats = _parse_label(category)
        return pbase == cbase and pfeats <= cfeats


@dataclass
class TagMapping:
    """Ordered category-to-tag rules with a catch-all default."""

    rules: list[MappingRule]
    default: str

    def map_categories(self, categories: Iterable[str]) -> list[str]:
        return map_categories(categories, self)

    def tagset(self) -> set[str]:
        return {rule.tag for rule in self.rules} | {self.default}


def map_categories(categories: Iterable[str], mapping: TagMapping) -> list[str]:
    """Tags for a category set, in mapping-rule order, duplicates collapsed.

    The order defines the trial order for lazy tag checking. Categories no
    rule covers contribute the default tag.
    """
    cats = list(categories)
    out: list[str] = []
    covered: set[str] = set()
    for rule in mapping.rules:
        for cat in cats:
            if rule.matches(cat):
                covered.add(cat)
                if rule.tag not in out:
                    out.append(rule.tag)
    if any(cat not in covered for cat in cats) and mapping.default not in out:
        out.append(mapping.default)
    return out


@dataclass
class TagTrigramModel:
    tagset: set[str]
    clamp: int = DEFAULT_POSITION_CLAMP
    members: set[tuple[int, tuple[str, str, str]]] = field(default_factory=set)

    def has(self, position: int, trigram: tuple[str, str, str]) -> bool:
        return (min(position, self.clamp), trigram) in self.members

    def add(self, position: int, trigram: tuple[str, str, str]) -> None:
        self.members.add((min(position, self.clamp), trigram))


def train_tag_model(sentences: list[list[str]],
                    clamp: int = DEFAULT_POSITION_CLAMP) -> TagTrigramModel:
    """Record the positional tag trigrams of every training sentence."""
    if not sentences:
        raise CorpusError("empty corpus")
    model = TagTrigramModel(tagset=set(), clamp=clamp)
    for tags in sentences:
        if not tags:
            raise CorpusError("empty sentence in corpus")
        model.tagset.update(tags)
        padded = [START] + list(tags) + [END]
        for p in range(len(padded) - 2):
            model.add(p, tuple(padded[p : p + 3]))
    return model


def check_window(model: TagTrigramModel, left: list[str], candidates: list[str],
                 origin: int = 0) -> Iterator[str]:
    """Lazily yield the candidate tags for the focus word that fit the model.

    `left` holds the already-validated tags visible in the window, `origin`
    their first element's sentence-relative index (0 when the window reaches
    back to the sentence start). Only trigrams lying completely inside the
    window are checked, so the first word of a sentence passes freely and a
    window too narrow for any complete trigram constrains nothing.
    """
    focus = origin + len(left)
    for cand in candidates:
        if focus == 0 or not left:
            yield cand
            continue
        prev = left[-1]
        if len(left) >= 2:
            before = left[-2]
        elif focus == 1:
            before = START
        else:
            # The tag two back has scrolled out of the window: nothing
            # complete to check.
            yield cand
            continue
        if model.has(focus - 1, (before, prev, cand)):
            yield cand


# ---------------------------------------------------------------------------
# File formats. Tagged corpus: one sentence per line, word/TAG tokens.
# Mapping: category<TAB>tag lines plus a default<TAB>tag line.
# ---------------------------------------------------------------------------


def parse_tagged_corpus(lines: Iterable[str]) -> list[list[tuple[str, str]]]:
    sentences = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sentence = []
        for token in line.split():
            if "/" not in token:
                raise CorpusError(f"line {lineno}: token {token!r} lacks /TAG")
            word, tag = token.rsplit("/", 1)
            if not word or not tag:
                raise CorpusError(f"line {lineno}: malformed token {token!r}")
            sentence.append((word, tag))
        sentences.append(sentence)
    if not sentences:
        raise CorpusError("empty corpus")
    return sentences


def load_tagged_corpus(path: str | Path) -> list[list[tuple[str, str]]]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tagged_corpus(fh)


def train_from_corpus(path: str | Path, clamp: int = DEFAULT_POSITION_CLAMP) -> TagTrigramModel:
    sentences = load_tagged_corpus(path)
    return train_tag_model([[tag for _, tag in s] for s in sentences], clamp=clamp)


def parse_tag_mapping(lines: Iterable[str]) -> TagMapping:
    rules: list[MappingRule] = []
    default: Optional[str] = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"line {lineno}: expected category<TAB>tag")
        pattern, tag = parts[0].strip(), parts[1].strip()
        if pattern == "default":
            default = tag
        else:
            rules.append(MappingRule(pattern, tag))
    if default is None:
        raise CorpusError("mapping file lacks a default<TAB>tag line")
    return TagMapping(rules=rules, default=default)


def load_tag_mapping(path: str | Path) -> TagMapping:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_tag_mapping(fh)


# Model file: header plus one pos<TAB>t1 t2 t3 line per member.

FORMAT_TAG = "#typewatch-tags v1"


def save_tag_model(model: TagTrigramModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FORMAT_TAG + "\n")
        fh.write(f"#clamp: {model.clamp}\n")
        fh.write(f"#tagset: {' '.join(sorted(model.tagset))}\n")
        for pos, tri in sorted(model.members):
            fh.write(f"{pos}\t{' '.join(tri)}\n")


def load_tag_model(path: str | Path) -> TagTrigramModel:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != FORMAT_TAG:
            raise CorpusError(f"not a tag model: {path}")
        clamp = DEFAULT_POSITION_CLAMP
        tagset: set[str] = set()
        members: set[tuple[int, tuple[str, str, str]]] = set()
        for lineno, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if line.startswith("#clamp:"):
                clamp = int(line.split(":", 1)[1])
            elif line.startswith("#tagset:"):
                tagset = set(line.split(":", 1)[1].split())
            elif line.startswith("#") or not line.strip():
                continue
            else:
                pos_s, tri_s = line.split("\t")
                tri = tuple(tri_s.split())
                if len(tri) != 3:
                    raise CorpusError(f"line {lineno}: malformed trigram")
                members.add((int(pos_s), tri))
    return TagTrigramModel(tagset=tagset, clamp=clamp, members=members)
