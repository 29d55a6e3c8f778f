"""Dense 3-uniform hypergraphs on vertices 0..n-1 and the set types used to probe them.

Edges are stored twice: as a sorted tuple of canonical triples (i < j < k) and as a
per-pair link index of Python-int bitsets, ``links[u][v]`` having bit ``w`` set iff
``{u, v, w}`` is an edge.  All membership and codegree queries go through the link
index.  The ordered indicator ``A(x, y, z)`` is available as a numpy tensor for the
deviation searches.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Iterable

import numpy as np


class HypergraphError(ValueError):
    """Invalid hypergraph construction or query."""


class ParseError(HypergraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class GuardError(ValueError):
    """An exact algorithm was asked to run above its feasibility guard."""


def as_fraction(x) -> Fraction:
    """Exact rational for a user-facing number; floats go through their repr so 0.1 -> 1/10."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def popcount(x: int) -> int:
    return x.bit_count()


def bits(x: int) -> list[int]:
    """Indices of set bits, ascending."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


class Hypergraph3:
    """Immutable 3-uniform hypergraph.

    >>> H = Hypergraph3(4, [(0, 1, 2), (0, 1, 3)])
    >>> H.num_edges, H.codegree(0, 1)
    (2, 2)
    """

    def __init__(self, n: int, triples: Iterable[Iterable[int]] = ()):
        if n < 0:
            raise HypergraphError(f"vertex count must be non-negative, got {n}")
        self.n = int(n)
        rows = [tuple(t) for t in triples]
        for t in rows:
            if len(t) != 3:
                raise HypergraphError(f"triple {t} does not have three vertices")
        arr = np.sort(np.array(rows, dtype=np.int64).reshape(-1, 3), axis=1)
        clash = (arr[:, 0] == arr[:, 1]) | (arr[:, 1] == arr[:, 2])
        if clash.any():
            t = rows[int(np.argmax(clash))]
            raise HypergraphError(f"triple {t} does not have three distinct vertices")
        out = (arr[:, 0] < 0) | (arr[:, 2] >= self.n)
        if out.any():
            t = rows[int(np.argmax(out))]
            raise HypergraphError(f"triple {t} has a vertex outside [0, {self.n})")
        uniq = np.unique(arr, axis=0) if len(arr) else arr
        self.edges: tuple[tuple[int, int, int], ...] = tuple(map(tuple, uniq.tolist()))

    @classmethod
    def _from_canonical(cls, n: int, arr: np.ndarray) -> Hypergraph3:
        """Skip validation for rows already sorted, distinct, in range and lexicographically unique."""
        H = cls.__new__(cls)
        H.n = int(n)
        H.edges = tuple(map(tuple, np.asarray(arr, dtype=np.int64).reshape(-1, 3).tolist()))
        return H

    @cached_property
    def _links(self) -> list[list[int]]:
        # links[u][v] has bit w set iff {u, v, w} is an edge
        links = [[0] * self.n for _ in range(self.n)]
        for a, b, c in self.edges:
            links[a][b] |= 1 << c
            links[b][a] |= 1 << c
            links[a][c] |= 1 << b
            links[c][a] |= 1 << b
            links[b][c] |= 1 << a
            links[c][b] |= 1 << a
        return links

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, Hypergraph3) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Hypergraph3(n={self.n}, |E|={self.num_edges})"

    def has_edge(self, x: int, y: int, z: int) -> bool:
        if x == y or x == z or y == z:
            return False
        return bool(self._links[x][y] >> z & 1)

    def indicator(self, x: int, y: int, z: int) -> int:
        """The ordered indicator A(x, y, z); zero on degenerate tuples."""
        return int(self.has_edge(x, y, z))

    def link_mask(self, u: int, v: int) -> int:
        """Bitset of vertices w with {u, v, w} an edge (0 when u == v)."""
        return self._links[u][v]

    def link(self, u: int, v: int) -> frozenset[int]:
        self._check_pair(u, v)
        return frozenset(bits(self._links[u][v]))

    def codegree(self, u: int, v: int) -> int:
        self._check_pair(u, v)
        return popcount(self._links[u][v])

    def degree(self, v: int) -> int:
        return sum(popcount(m) for m in self._links[v]) // 2

    def _check_pair(self, u: int, v: int) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise HypergraphError(f"pair ({u}, {v}) outside [0, {self.n})")
        if u == v:
            raise HypergraphError("codegree is undefined on a diagonal pair")

    def density(self) -> Fraction:
        if self.n < 3:
            raise HypergraphError("density needs at least 3 vertices")
        return Fraction(self.num_edges, comb(self.n, 3))

    @cached_property
    def tensor(self) -> np.ndarray:
        """A as an (n, n, n) int64 array, symmetric under all axis permutations."""
        A = np.zeros((self.n, self.n, self.n), dtype=np.int64)
        if self.edges:
            e = np.asarray(self.edges)
            for p in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
                A[e[:, p[0]], e[:, p[1]], e[:, p[2]]] = 1
        A.setflags(write=False)
        return A

    def induced(self, vertices: Iterable[int]) -> Hypergraph3:
        """Sub-hypergraph induced on ``vertices``, relabelled 0..k-1 in the given order."""
        vs = list(vertices)
        pos = {v: i for i, v in enumerate(vs)}
        return Hypergraph3(len(vs), [(pos[a], pos[b], pos[c]) for a, b, c in combinations(vs, 3)
                                     if self.has_edge(a, b, c)])

    def with_edge(self, triple) -> Hypergraph3:
        return Hypergraph3(self.n, list(self.edges) + [tuple(triple)])


def new_hypergraph(n: int, triples: Iterable[Iterable[int]] = ()) -> Hypergraph3:
    return Hypergraph3(n, triples)


def complete(n: int) -> Hypergraph3:
    return Hypergraph3(n, combinations(range(n), 3))


def codegree(H: Hypergraph3, u: int, v: int) -> int:
    return H.codegree(u, v)


def density(H: Hypergraph3) -> Fraction:
    return H.density()


@dataclass(frozen=True)
class VertexSet:
    """A subset of 0..n-1."""

    n: int
    members: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(v) for v in self.members))
        bad = [v for v in self.members if not 0 <= v < self.n]
        if bad:
            raise HypergraphError(f"vertices {sorted(bad)} outside [0, {self.n})")

    @classmethod
    def full(cls, n: int) -> VertexSet:
        return cls(n, frozenset(range(n)))

    @classmethod
    def from_indicator(cls, ind) -> VertexSet:
        ind = np.asarray(ind)
        return cls(len(ind), frozenset(np.flatnonzero(ind).tolist()))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def indicator(self) -> np.ndarray:
        ind = np.zeros(self.n, dtype=np.int64)
        ind[list(self.members)] = 1
        return ind

    def sorted(self) -> list[int]:
        return sorted(self.members)


@dataclass(frozen=True)
class OrderedPairSet:
    """A subset of V x V; diagonal pairs (y, y) are allowed and count toward the size."""

    n: int
    members: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset((int(y), int(z)) for y, z in self.members))
        bad = [p for p in self.members if not (0 <= p[0] < self.n and 0 <= p[1] < self.n)]
        if bad:
            raise HypergraphError(f"pairs {sorted(bad)} outside [0, {self.n})^2")

    @classmethod
    def full(cls, n: int) -> OrderedPairSet:
        return cls(n, frozenset((y, z) for y in range(n) for z in range(n)))

    @classmethod
    def product(cls, n: int, Y: Iterable[int], Z: Iterable[int]) -> OrderedPairSet:
        Z = list(Z)
        return cls(n, frozenset((y, z) for y in Y for z in Z))

    @classmethod
    def from_indicator(cls, ind) -> OrderedPairSet:
        ind = np.asarray(ind)
        return cls(ind.shape[0], frozenset(map(tuple, np.argwhere(ind).tolist())))

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, p) -> bool:
        return tuple(p) in self.members

    def indicator(self) -> np.ndarray:
        ind = np.zeros((self.n, self.n), dtype=np.int64)
        if self.members:
            idx = np.asarray(sorted(self.members))
            ind[idx[:, 0], idx[:, 1]] = 1
        return ind

    def sorted(self) -> list[list[int]]:
        return [list(p) for p in sorted(self.members)]


# --- .3hg text format ---------------------------------------------------------

def format_hypergraph(H: Hypergraph3) -> str:
    lines = [f"{H.n} {H.num_edges}"]
    lines += [f"{i} {j} {k}" for i, j, k in H.edges]
    return "\n".join(lines) + "\n"


def parse_hypergraph(text: str, lenient: bool = False) -> Hypergraph3:
    """Parse ``.3hg`` text.

    Canonical mode wants ascending vertices inside each line and rejects duplicate
    lines; lenient mode sorts each triple and collapses duplicates.
    """
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("missing header 'n m'", 1)
    head = lines[0].split()
    if len(head) != 2 or not all(tok.lstrip("-").isdigit() for tok in head):
        raise ParseError(f"malformed header {lines[0]!r}", 1)
    n, m = int(head[0]), int(head[1])
    if n < 0 or m < 0:
        raise ParseError("negative header value", 1)
    triples = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        toks = line.split()
        if len(toks) != 3 or not all(tok.lstrip("-").isdigit() for tok in toks):
            raise ParseError(f"expected three integers, got {line!r}", lineno)
        t = tuple(int(tok) for tok in toks)
        if min(t) < 0 or max(t) >= n:
            raise ParseError(f"triple {t} has a vertex outside [0, {n})", lineno)
        if len(set(t)) != 3:
            raise ParseError(f"triple {t} repeats a vertex", lineno)
        key = tuple(sorted(t))
        if not lenient:
            if t != key:
                raise ParseError(f"triple {t} is not in ascending order", lineno)
            if key in seen:
                raise ParseError(f"duplicate triple {t}", lineno)
        seen.add(key)
        triples.append(key)
    if len(triples) != m:
        raise ParseError(f"header announces {m} triples, found {len(triples)}", len(lines))
    return Hypergraph3(n, triples)


def read_hypergraph(path: str | os.PathLike, lenient: bool = False) -> Hypergraph3:
    with open(path) as fh:
        return parse_hypergraph(fh.read(), lenient=lenient)


def write_hypergraph(H: Hypergraph3, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_hypergraph(H))
