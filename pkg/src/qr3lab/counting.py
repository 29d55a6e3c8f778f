"""Copies of small fixed patterns in a 3-graph."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from math import perm

from .core import Hypergraph3, HypergraphError, bits, popcount

MAX_PATTERN_VERTICES = 8


@dataclass(frozen=True)
class Pattern:
    v: int
    edges: tuple[tuple[int, int, int], ...]
    name: str = ""

    def __post_init__(self):
        if not 1 <= self.v <= MAX_PATTERN_VERTICES:
            raise HypergraphError(f"patterns are limited to 1..{MAX_PATTERN_VERTICES} vertices")
        # reuse the hypergraph validation, then keep the canonical edge list
        canon = Hypergraph3(self.v, self.edges).edges
        object.__setattr__(self, "edges", canon)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def as_hypergraph(self) -> Hypergraph3:
        return Hypergraph3(self.v, self.edges)

    def label(self) -> str:
        return self.name or f"v={self.v};" + ",".join(f"{a}{b}{c}" for a, b, c in self.edges)


K4 = Pattern(4, tuple(combinations(range(4), 3)), "k4")
K4MINUS = Pattern(4, ((0, 1, 2), (0, 1, 3), (0, 2, 3)), "k4minus")
EDGE = Pattern(3, ((0, 1, 2),), "edge")


def parse_pattern(text: str) -> Pattern:
    """``k4``, ``k4minus``, ``edge`` or an inline ``v=4;012,013,023``."""
    t = text.strip().lower()
    builtin = {"k4": K4, "k4minus": K4MINUS, "k4-": K4MINUS, "edge": EDGE}
    if t in builtin:
        return builtin[t]
    try:
        head, body = t.split(";", 1)
        key, v = head.split("=")
        if key.strip() != "v":
            raise ValueError
        edges = []
        for tok in filter(None, (s.strip() for s in body.split(","))):
            if len(tok) != 3 or not tok.isdigit():
                raise ValueError
            edges.append(tuple(int(ch) for ch in tok))
        return Pattern(int(v), tuple(edges))
    except ValueError:
        raise HypergraphError(f"cannot parse pattern {text!r}; expected k4, k4minus or "
                              f"'v=4;012,013,023'") from None


def automorphisms(F: Pattern) -> int:
    E = set(F.edges)
    total = 0
    for p in permutations(range(F.v)):
        if all(tuple(sorted((p[a], p[b], p[c]))) in E for a, b, c in F.edges):
            total += 1
    return total


def _plan(F: Pattern):
    """Mapping order by descending degree, and for each step the already-placed pairs it must close."""
    deg = [0] * F.v
    for e in F.edges:
        for u in e:
            deg[u] += 1
    order = sorted(range(F.v), key=lambda u: (-deg[u], u))
    pos = {u: i for i, u in enumerate(order)}
    closing = [[] for _ in order]
    for e in F.edges:
        last = max(e, key=pos.__getitem__)
        a, b = (pos[u] for u in e if u != last)
        closing[pos[last]].append((a, b))
    return order, closing


def count_labeled(F: Pattern, H: Hypergraph3) -> int:
    """Injective maps V(F) -> V(H) sending every edge of F onto an edge of H."""
    if F.v > H.n:
        return 0
    _, closing = _plan(F)
    full = (1 << H.n) - 1
    link = H.link_mask
    k = F.v

    def extend(placed: list[int], used: int) -> int:
        i = len(placed)
        cand = full & ~used
        for a, b in closing[i]:
            cand &= link(placed[a], placed[b])
            if not cand:
                return 0
        if i == k - 1:
            return popcount(cand)
        total = 0
        for w in bits(cand):
            placed.append(w)
            total += extend(placed, used | 1 << w)
            placed.pop()
        return total

    return extend([], 0)


def count_unordered(F: Pattern, H: Hypergraph3) -> int:
    labeled = count_labeled(F, H)
    aut = automorphisms(F)
    q, r = divmod(labeled, aut)
    if r:
        raise AssertionError(f"labeled count {labeled} not divisible by |Aut(F)| = {aut}")
    return q


def expected_labeled(F: Pattern, n: int, p: float) -> float:
    """Labeled copies expected in a p-random 3-graph: p^e_F * n(n-1)...(n-v_F+1)."""
    return p ** F.num_edges * perm(n, F.v)


def contains_K4(H: Hypergraph3):
    """A sorted quadruple spanning a tetrahedron, or None."""
    link = H.link_mask
    for u in range(H.n):
        for v in range(u + 1, H.n):
            luv = link(u, v) >> (v + 1) << (v + 1)
            if popcount(luv) < 2:
                continue
            for w in bits(luv):
                common = luv & link(u, w) & link(v, w)
                common >>= w + 1
                if common:
                    x = (common & -common).bit_length() + w
                    return (u, v, w, x)
    return None
