"""Extremal constructions and seeded random models.

Every random generator builds its own ``numpy.random.Generator`` (PCG64) from the
seed it is given and draws one vector in lexicographic order of the objects it
decides (triples ``i<j<k`` or pairs ``i<j``), so a (parameters, seed) pair fixes the
output across runs and platforms.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .core import Hypergraph3, HypergraphError, ParseError

RED, GREEN = 0, 1


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _triples(n: int) -> np.ndarray:
    """All i<j<k in lexicographic order as an (C(n,3), 3) array."""
    if n < 3:
        return np.zeros((0, 3), dtype=np.int64)
    return np.fromiter(combinations(range(n), 3), dtype=np.dtype((np.int64, 3)), count=comb(n, 3))


@dataclass(frozen=True)
class PairColouring:
    """Red/green colouring of the pairs of [n]; ``colour[i, j]`` is symmetric."""

    n: int
    colour: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.colour, dtype=np.int8)
        if c.shape != (self.n, self.n) or not np.array_equal(c, c.T):
            raise HypergraphError("colour matrix must be symmetric n x n")
        off = c[~np.eye(self.n, dtype=bool)]
        if off.size and not np.isin(off, (RED, GREEN)).all():
            raise HypergraphError("colours must be 0 (red) or 1 (green)")
        c.setflags(write=False)
        object.__setattr__(self, "colour", c)

    @classmethod
    def from_pairs(cls, n: int, values) -> PairColouring:
        """Build from one colour per pair i<j, lexicographic order."""
        c = np.zeros((n, n), dtype=np.int8)
        iu = np.triu_indices(n, 1)
        c[iu] = np.asarray(values, dtype=np.int8)
        return cls(n, c + c.T)

    def __getitem__(self, pair) -> int:
        i, j = pair
        return int(self.colour[i, j])

    def complement(self) -> PairColouring:
        c = (1 - self.colour).astype(np.int8)
        np.fill_diagonal(c, 0)
        return PairColouring(self.n, c)


@dataclass(frozen=True)
class Tournament:
    """``beats[i, j]`` is True iff the arc between i and j points from i to j."""

    n: int
    beats: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.beats, dtype=bool)
        if b.shape != (self.n, self.n):
            raise HypergraphError("beats must be n x n")
        off = ~np.eye(self.n, dtype=bool)
        if np.diag(b).any() or not np.array_equal((b ^ b.T)[off], np.ones(off.sum(), dtype=bool)):
            raise HypergraphError("a tournament has exactly one arc per pair and no loops")
        b.setflags(write=False)
        object.__setattr__(self, "beats", b)

    @classmethod
    def from_pairs(cls, n: int, values) -> Tournament:
        """One bit per pair i<j, lexicographic; 1 means i beats j."""
        b = np.zeros((n, n), dtype=bool)
        iu = np.triu_indices(n, 1)
        v = np.asarray(values, dtype=bool)
        b[iu] = v
        b[(iu[1], iu[0])] = ~v
        return cls(n, b)

    @classmethod
    def transitive(cls, n: int) -> Tournament:
        return cls.from_pairs(n, np.ones(comb(n, 2), dtype=bool))

    def reversed(self) -> Tournament:
        return Tournament(self.n, self.beats.T.copy())


def random_hypergraph(n: int, p: float, seed) -> Hypergraph3:
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    T = _triples(n)
    keep = _rng(seed).random(len(T)) < p
    return Hypergraph3._from_canonical(n, T[keep])


def random_colouring(n: int, seed) -> PairColouring:
    return PairColouring.from_pairs(n, _rng(seed).integers(0, 2, size=comb(n, 2)))


def random_tournament(n: int, seed) -> Tournament:
    return Tournament.from_pairs(n, _rng(seed).integers(0, 2, size=comb(n, 2)))


def bichromatic_hypergraph(phi: PairColouring) -> Hypergraph3:
    """Triple i<j<k is an edge iff pairs ij and ik get different colours.

    Only the two pairs at the smallest vertex are consulted, so no four vertices can
    carry all four triples.
    """
    T = _triples(phi.n)
    c = phi.colour
    keep = c[T[:, 0], T[:, 1]] != c[T[:, 0], T[:, 2]]
    return Hypergraph3._from_canonical(phi.n, T[keep])


def cyclic_triangle_hypergraph(T: Tournament) -> Hypergraph3:
    tri = _triples(T.n)
    b = T.beats
    i, j, k = tri[:, 0], tri[:, 1], tri[:, 2]
    ij, jk, ki = b[i, j], b[j, k], b[k, i]
    keep = (ij == jk) & (jk == ki)
    return Hypergraph3._from_canonical(T.n, tri[keep])


def turan_classes(n: int) -> list[list[int]]:
    return [list(range(c, n, 3)) for c in range(3)]


def turan_edge_count(sizes) -> int:
    s0, s1, s2 = sizes
    return s0 * s1 * s2 + comb(s0, 2) * s1 + comb(s1, 2) * s2 + comb(s2, 2) * s0


def turan_construction(n: int) -> Hypergraph3:
    """Turán's tetrahedron-free construction on three near-equal classes.

    Vertex v goes to class v mod 3.  A triple is an edge if it meets all three
    classes, or has two vertices in class c and one in class c+1 (mod 3).
    """
    if n < 3:
        raise HypergraphError("the construction needs n >= 3")
    T = _triples(n)
    cls = T % 3
    cls.sort(axis=1)
    transversal = (cls[:, 0] == 0) & (cls[:, 1] == 1) & (cls[:, 2] == 2)
    # two in c, one in c+1: sorted class patterns (0,0,1), (1,1,2), (0,2,2)
    pair_next = ((cls[:, 0] == cls[:, 1]) & (cls[:, 2] == cls[:, 0] + 1)) | \
                ((cls[:, 0] == 0) & (cls[:, 1] == 2) & (cls[:, 2] == 2))
    return Hypergraph3._from_canonical(n, T[transversal | pair_next])


# --- text serialisation --------------------------------------------------------

def _format_pairs(n: int, values) -> str:
    lines = [str(n)]
    lines += [f"{i} {j} {int(v)}" for (i, j), v in zip(combinations(range(n), 2), values)]
    return "\n".join(lines) + "\n"


def _parse_pairs(text: str) -> tuple[int, list[int]]:
    lines = [ln for ln in text.splitlines()]
    try:
        n = int(lines[0])
    except (IndexError, ValueError):
        raise ParseError("missing header 'n'", 1) from None
    expected = list(combinations(range(n), 2))
    body = [(no, ln.split()) for no, ln in enumerate(lines[1:], start=2) if ln.strip()]
    if len(body) != len(expected):
        raise ParseError(f"expected {len(expected)} pair lines, found {len(body)}", len(lines))
    values = [0] * len(expected)
    index = {p: t for t, p in enumerate(expected)}
    seen = set()
    for no, toks in body:
        if len(toks) != 3 or not all(t.isdigit() for t in toks):
            raise ParseError(f"expected 'i j c', got {' '.join(toks)!r}", no)
        i, j, c = map(int, toks)
        if (i, j) not in index or c not in (0, 1) or (i, j) in seen:
            raise ParseError(f"bad or repeated pair line {i} {j} {c}", no)
        seen.add((i, j))
        values[index[i, j]] = c
    return n, values


def format_colouring(phi: PairColouring) -> str:
    iu = np.triu_indices(phi.n, 1)
    return _format_pairs(phi.n, phi.colour[iu])


def format_tournament(T: Tournament) -> str:
    iu = np.triu_indices(T.n, 1)
    return _format_pairs(T.n, T.beats[iu].astype(int))


def parse_colouring(text: str) -> PairColouring:
    return PairColouring.from_pairs(*_parse_pairs(text))


def parse_tournament(text: str) -> Tournament:
    return Tournament.from_pairs(*_parse_pairs(text))


def write_text(text: str, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(text)
