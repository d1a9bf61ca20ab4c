"""Letter-graph lexicon: trie construction, suffix-merging minimization, lookup.

The lexicon is stored as a deterministic acyclic letter automaton. A trie is
built first, then equivalent suffix states are merged so that common endings
are shared. Category and frequency information for each word is attached to
the first transition of its path that no other word uses, which lets a reader
harvest the word's categories as soon as the initial letters make it unique
rather than at the end of the word. Words that are fully shared prefixes of
longer words (e.g. "do" inside "dog") keep their data on a word-keyed mark at
their final state instead.

Merging respects those payloads: a node whose incoming edge carries a payload
(or which carries word-keyed marks) is never merged, and two edges merge only
when their payload contents are identical. The result is minimal with respect
to the payload-decorated structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

DEFAULT_ALPHABET = "abcdefghijklmnopqrstuvwxyz'-"

FORMAT_TAG = "#typewatch-dawg v1"


class LexiconError(ValueError):
    """Raised for malformed lexicon input (duplicate words, bad characters)."""


@dataclass(frozen=True)
class LexiconEntry:
    """One lexicon word with its occurrence count and category labels."""

    word: str
    frequency: int
    categories: frozenset[str]

    def __post_init__(self) -> None:
        if not self.word:
            raise LexiconError("empty word")
        if self.frequency < 0:
            raise LexiconError(f"negative frequency for {self.word!r}")
        if not self.categories:
            raise LexiconError(f"no categories for {self.word!r}")


# Payload carried by a word's first unique transition: (categories, frequency).
Payload = tuple[frozenset[str], int]


class Node:
    """One automaton state. Edges map a letter to (target, payload or None)."""

    __slots__ = ("id", "edges", "final", "marks")

    def __init__(self, node_id: int) -> None:
        self.id = node_id
        self.edges: dict[str, tuple[Node, Optional[Payload]]] = {}
        self.final = False
        # Data for words whose whole path is shared with longer words.
        self.marks: dict[str, Payload] = {}

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Node({self.id}, final={self.final}, edges={sorted(self.edges)})"


class Dawg:
    """Deterministic acyclic letter automaton with early category payloads."""

    def __init__(self, start: Node, nodes: dict[int, Node], alphabet: str = DEFAULT_ALPHABET):
        self.start = start
        self.nodes = nodes
        self.alphabet = alphabet
        # Transition count of the trie this automaton was minimized from, for
        # compression reporting; equals own count for an unminimized trie.
        self.source_trie_transitions = self.transition_count()

    def transition_count(self) -> int:
        return sum(len(n.edges) for n in self.nodes.values())

    def state_count(self) -> int:
        return len(self.nodes)

    def lookup(self, word: str) -> Optional[Payload]:
        return lookup_payload(self, word)

    def __contains__(self, word: str) -> bool:
        return lookup_payload(self, word) is not None

    def words(self) -> Iterator[str]:
        """Enumerate the accepted language in depth-first letter order."""

        def walk(node: Node, prefix: str) -> Iterator[str]:
            if node.final:
                yield prefix
            for letter in sorted(node.edges):
                target, _ = node.edges[letter]
                yield from walk(target, prefix + letter)

        yield from walk(self.start, "")


def _check_word(word: str, alphabet: str) -> None:
    for pos, ch in enumerate(word):
        if ch not in alphabet:
            raise LexiconError(f"illegal character {ch!r} at position {pos} in {word!r}")


def build_trie(entries: list[LexiconEntry], alphabet: str = DEFAULT_ALPHABET) -> Dawg:
    """Build a tree-shaped automaton accepting exactly the entry words.

    Payloads are not placed here; `minimize` does that once edge sharing is
    known. Rejects duplicate words and characters outside the alphabet.
    """
    if not entries:
        raise LexiconError("empty lexicon")
    seen: set[str] = set()
    counter = iter(range(1, 1 << 30))
    start = Node(0)
    nodes = {0: start}
    entry_map: dict[str, LexiconEntry] = {}
    for entry in entries:
        word = entry.word
        if word in seen:
            raise LexiconError(f"duplicate word {word!r}")
        seen.add(word)
        _check_word(word, alphabet)
        entry_map[word] = entry
        node = start
        for letter in word:
            nxt = node.edges.get(letter)
            if nxt is None:
                child = Node(next(counter))
                nodes[child.id] = child
                node.edges[letter] = (child, None)
                node = child
            else:
                node = nxt[0]
        node.final = True
    dawg = Dawg(start, nodes, alphabet)
    dawg._entries = entry_map  # type: ignore[attr-defined]  # consumed by minimize
    return dawg


def _subtree_word_counts(start: Node) -> dict[int, int]:
    """Number of lexicon words whose path passes through each node."""
    counts: dict[int, int] = {}

    def walk(node: Node) -> int:
        total = 1 if node.final else 0
        for target, _ in node.edges.values():
            total += walk(target)
        counts[node.id] = total
        return total

    walk(start)
    return counts


def minimize(trie: Dawg) -> Dawg:
    """Merge equivalent suffix states of a trie and place category payloads.

    A word's data goes on the earliest edge of its path traversed by that word
    alone; words with no such edge (strict prefixes of other words) get a mark
    on their final state. Nodes entered through a payload edge, and nodes
    holding marks, stay unmerged so each payload keeps a single-word meaning.
    """
    entries: dict[str, LexiconEntry] = getattr(trie, "_entries", None) or {
        w: LexiconEntry(w, 0, frozenset({"?"})) for w in trie.words()
    }
    counts = _subtree_word_counts(trie.start)

    # Payload placement on the trie: walk each word, stamp the first edge
    # whose subtree contains only this word.
    pinned: set[int] = set()
    for word, entry in entries.items():
        payload: Payload = (entry.categories, entry.frequency)
        node = trie.start
        placed = False
        for letter in word:
            target, existing = node.edges[letter]
            if not placed and counts[target.id] == 1:
                node.edges[letter] = (target, payload)
                pinned.add(target.id)
                placed = True
            node = target
        if not placed:
            node.marks[word] = payload
            pinned.add(node.id)

    # Bottom-up merge by structural signature. Pinned nodes get a unique
    # signature so nothing merges with them.
    canon: dict[object, Node] = {}
    new_nodes: dict[int, Node] = {}
    counter = iter(range(0, 1 << 30))
    rebuilt: dict[int, Node] = {}

    def signature(node: Node, children: dict[str, tuple[Node, Optional[Payload]]]) -> object:
        if node.id in pinned or node.marks:
            return ("pin", node.id)
        return (
            node.final,
            tuple((letter, payload, child.id) for letter, (child, payload) in sorted(children.items())),
        )

    def rebuild(node: Node) -> Node:
        if node.id in rebuilt:
            return rebuilt[node.id]
        children = {
            letter: (rebuild(target), payload) for letter, (target, payload) in node.edges.items()
        }
        sig = signature(node, children)
        existing = canon.get(sig)
        if existing is not None:
            rebuilt[node.id] = existing
            return existing
        fresh = Node(next(counter))
        fresh.final = node.final
        fresh.marks = dict(node.marks)
        fresh.edges = dict(children)
        canon[sig] = fresh
        new_nodes[fresh.id] = fresh
        rebuilt[node.id] = fresh
        return fresh

    new_start = rebuild(trie.start)
    dawg = Dawg(new_start, new_nodes, trie.alphabet)
    dawg.source_trie_transitions = trie.transition_count()
    _renumber(dawg)
    return dawg


def _renumber(dawg: Dawg) -> None:
    """Assign canonical breadth-first ids so equal builds dump identically."""
    order: dict[int, Node] = {}
    queue = [dawg.start]
    seen = {dawg.start.id}
    while queue:
        node = queue.pop(0)
        order[len(order)] = node
        for letter in sorted(node.edges):
            target, _ = node.edges[letter]
            if target.id not in seen:
                seen.add(target.id)
                queue.append(target)
    for new_id, node in order.items():
        node.id = new_id
    dawg.nodes = {node.id: node for node in order.values()}


def lookup_payload(dawg: Dawg, word: str) -> Optional[Payload]:
    """Return (categories, frequency) if the word is accepted, else None."""
    node = dawg.start
    harvested: Optional[Payload] = None
    for letter in word:
        edge = node.edges.get(letter)
        if edge is None:
            return None
        node, payload = edge
        if payload is not None and harvested is None:
            harvested = payload
    if not node.final:
        return None
    if harvested is not None:
        return harvested
    return node.marks.get(word)


def lookup(dawg: Dawg, word: str) -> Optional[frozenset[str]]:
    """Category set of the word, or None when it is not in the lexicon."""
    payload = lookup_payload(dawg, word)
    return payload[0] if payload is not None else None


def successors(dawg: Dawg, state_id: int) -> list[tuple[str, int]]:
    """Outgoing (letter, target-state) edges of a state, letter-sorted."""
    node = dawg.nodes.get(state_id)
    if node is None:
        raise LexiconError(f"unknown state {state_id}")
    return [(letter, node.edges[letter][0].id) for letter in sorted(node.edges)]


def stats(dawg: Dawg) -> dict[str, int]:
    return {"state_count": dawg.state_count(), "transition_count": dawg.transition_count()}


# ---------------------------------------------------------------------------
# Lexicon file format: word<TAB>frequency<TAB>cat1,cat2  with # comments and
# an optional "#alphabet: ..." header.
# ---------------------------------------------------------------------------


def parse_lexicon(lines: Iterable[str]) -> tuple[list[LexiconEntry], str]:
    alphabet = DEFAULT_ALPHABET
    entries: list[LexiconEntry] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if line.startswith("#alphabet:"):
                alphabet = line.split(":", 1)[1].strip()
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconError(f"line {lineno}: expected word<TAB>frequency<TAB>categories")
        word, freq_s, cats_s = parts
        word = word.strip().lower()
        try:
            freq = int(freq_s)
        except ValueError as exc:
            raise LexiconError(f"line {lineno}: bad frequency {freq_s!r}") from exc
        cats = frozenset(c.strip() for c in cats_s.split(",") if c.strip())
        if not cats:
            raise LexiconError(f"line {lineno}: no categories for {word!r}")
        try:
            _check_word(word, alphabet)
        except LexiconError as exc:
            raise LexiconError(f"line {lineno}: {exc}") from exc
        entries.append(LexiconEntry(word, freq, cats))
    if not entries:
        raise LexiconError("empty lexicon")
    return entries, alphabet


def load_lexicon(path: str | Path) -> tuple[list[LexiconEntry], str]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_lexicon(fh)


def build_from_file(path: str | Path) -> Dawg:
    entries, alphabet = load_lexicon(path)
    return minimize(build_trie(entries, alphabet))


# ---------------------------------------------------------------------------
# Versioned text dump. Stats live in the header so compression reporting does
# not need to reload the whole graph.
# ---------------------------------------------------------------------------


def save_dawg(dawg: Dawg, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(FORMAT_TAG + "\n")
        fh.write(f"#alphabet: {dawg.alphabet}\n")
        fh.write(f"#states: {dawg.state_count()}\n")
        fh.write(f"#transitions: {dawg.transition_count()}\n")
        fh.write(f"#source-trie-transitions: {dawg.source_trie_transitions}\n")
        for node_id in sorted(dawg.nodes):
            node = dawg.nodes[node_id]
            flag = " F" if node.final else ""
            fh.write(f"S {node_id}{flag}\n")
        for node_id in sorted(dawg.nodes):
            node = dawg.nodes[node_id]
            for letter in sorted(node.edges):
                target, payload = node.edges[letter]
                if payload is None:
                    fh.write(f"E {node_id} {letter} {target.id}\n")
                else:
                    cats = ",".join(sorted(payload[0]))
                    fh.write(f"E {node_id} {letter} {target.id} {cats} {payload[1]}\n")
            for word in sorted(node.marks):
                cats, freq = node.marks[word]
                fh.write(f"M {node_id} {word} {','.join(sorted(cats))} {freq}\n")


def load_dawg(path: str | Path) -> Dawg:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != FORMAT_TAG:
            raise LexiconError(f"not a dawg dump: {path}")
        alphabet = DEFAULT_ALPHABET
        trie_transitions = None
        nodes: dict[int, Node] = {}

        def get(node_id: int) -> Node:
            node = nodes.get(node_id)
            if node is None:
                node = Node(node_id)
                nodes[node_id] = node
            return node

        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("#alphabet:"):
                alphabet = line.split(":", 1)[1].strip()
            elif line.startswith("#source-trie-transitions:"):
                trie_transitions = int(line.split(":", 1)[1])
            elif line.startswith("#"):
                continue
            elif line.startswith("S "):
                parts = line.split()
                node = get(int(parts[1]))
                node.final = len(parts) > 2 and parts[2] == "F"
            elif line.startswith("E "):
                parts = line.split()
                src, letter, dst = get(int(parts[1])), parts[2], get(int(parts[3]))
                payload = None
                if len(parts) == 6:
                    payload = (frozenset(parts[4].split(",")), int(parts[5]))
                src.edges[letter] = (dst, payload)
            elif line.startswith("M "):
                parts = line.split()
                node = get(int(parts[1]))
                node.marks[parts[2]] = (frozenset(parts[3].split(",")), int(parts[4]))
    dawg = Dawg(get(0), nodes, alphabet)
    if trie_transitions is not None:
        dawg.source_trie_transitions = trie_transitions
    return dawg
