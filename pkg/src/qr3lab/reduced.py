"""Reduced (m choose 2)-partite hypergraphs and the three-step tetrahedron-pattern search.

Vertices live in classes ``P[i, j]`` (0 <= i < j < m).  Hyperedges only occur in the
pieces ``A[i, j, k]`` (i < j < k) with one vertex from each of ``P[i, j]``,
``P[i, k]``, ``P[j, k]``; each piece is stored as a boolean array with axes in that
order.  A vertex is addressed by its class and its local index in that class.

The solver works in three steps: colour every index i >= 2 by the hole
sizes of ``A[0, 1, i]``, pick two indices of equal colour, fix the three vertices
in the classes touching the fourth index by codegree maximisation, and finally look
for an edge inside the three common neighbourhoods.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import ceil, comb, floor

import numpy as np

from . import _search
from .core import GuardError, Hypergraph3, HypergraphError, as_fraction

HOLE_GUARD = 12
BRUTE_FORCE_BUDGET = 10 ** 9


def _pairs(m):
    return list(combinations(range(m), 2))


class ReducedHypergraph:
    def __init__(self, m: int, sizes: dict, pieces: dict | None = None):
        if m < 3:
            raise HypergraphError("a reduced hypergraph needs m >= 3")
        self.m = m
        self.sizes = {}
        for ij in _pairs(m):
            s = int(sizes[ij])
            if s < 1:
                raise HypergraphError(f"class {ij} must be nonempty")
            self.sizes[ij] = s
        self.pieces = {}
        pieces = pieces or {}
        extra = set(pieces) - set(combinations(range(m), 3))
        if extra:
            raise HypergraphError(f"pieces {sorted(extra)} are not index triples i<j<k < m")
        for i, j, k in combinations(range(m), 3):
            shape = self.piece_shape(i, j, k)
            T = pieces.get((i, j, k))
            T = np.zeros(shape, bool) if T is None else np.asarray(T, bool)
            if T.shape != shape:
                raise HypergraphError(f"piece {(i, j, k)} must have shape {shape}, got {T.shape}")
            T.setflags(write=False)
            self.pieces[i, j, k] = T

    def piece_shape(self, i, j, k) -> tuple[int, int, int]:
        return self.sizes[i, j], self.sizes[i, k], self.sizes[j, k]

    def piece(self, i, j, k) -> np.ndarray:
        return self.pieces[tuple(sorted((i, j, k)))]

    def size(self, i, j) -> int:
        return self.sizes[min(i, j), max(i, j)]

    @property
    def num_edges(self) -> int:
        return int(sum(T.sum() for T in self.pieces.values()))

    def __repr__(self) -> str:
        return f"ReducedHypergraph(m={self.m}, |E|={self.num_edges})"

    @classmethod
    def uniform_sizes(cls, m: int, size: int) -> dict:
        return {ij: size for ij in _pairs(m)}

    @classmethod
    def complete(cls, m: int, size) -> ReducedHypergraph:
        sizes = size if isinstance(size, dict) else cls.uniform_sizes(m, size)
        A = cls(m, sizes)
        return A.with_pieces({t: np.ones(A.piece_shape(*t), bool) for t in A.pieces})

    @classmethod
    def random(cls, m: int, size, density: float, seed) -> ReducedHypergraph:
        """Each cross triple of each piece independently with probability ``density``.

        Pieces are drawn in lexicographic triple order from one PCG64 stream.
        """
        sizes = size if isinstance(size, dict) else cls.uniform_sizes(m, size)
        rng = np.random.Generator(np.random.PCG64(seed))
        A = cls(m, sizes)
        return A.with_pieces({t: rng.random(A.piece_shape(*t)) < density
                              for t in combinations(range(m), 3)})

    def with_pieces(self, updates: dict) -> ReducedHypergraph:
        pieces = dict(self.pieces)
        pieces.update({tuple(k): v for k, v in updates.items()})
        return ReducedHypergraph(self.m, self.sizes, pieces)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "class_sizes": {f"{i},{j}": s for (i, j), s in self.sizes.items()},
            "edges": {f"{i},{j},{k}": np.argwhere(T).tolist() for (i, j, k), T in self.pieces.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> ReducedHypergraph:
        m = int(doc["m"])
        raw = doc["class_sizes"]
        sizes = {tuple(int(t) for t in key.split(",")): v for key, v in raw.items()}
        A = cls(m, sizes)
        pieces = {}
        for key, edges in doc.get("edges", {}).items():
            t = tuple(int(x) for x in key.split(","))
            if t not in A.pieces:
                raise HypergraphError(f"edges given for {t}, which is not a triple i<j<k < m")
            T = np.zeros(A.piece_shape(*t), bool)
            for a, b, c in edges:
                if not (0 <= a < T.shape[0] and 0 <= b < T.shape[1] and 0 <= c < T.shape[2]):
                    raise HypergraphError(f"edge {(a, b, c)} outside the classes of piece {t}")
                T[a, b, c] = True
            pieces[t] = T
        return A.with_pieces(pieces)


def read_reduced(path) -> ReducedHypergraph:
    with open(path) as fh:
        return ReducedHypergraph.from_dict(json.load(fh))


def write_reduced(A: ReducedHypergraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(A.to_dict(), fh)


def from_partition(H: Hypergraph3, classes, parts: dict, d3) -> ReducedHypergraph:
    """Reduced hypergraph of a partition: vertex (i,j,alpha) is the bipartite part
    ``parts[i, j][alpha]``; parts alpha, beta, gamma of ij, ik, jk form an edge iff
    their triad has relative density at least d3 in H.
    """
    from .regularity import relative_density, triad_of

    d3 = as_fraction(d3)
    m = len(classes)
    sizes = {ij: len(parts[ij]) for ij in _pairs(m)}
    A = ReducedHypergraph(m, sizes)
    pieces = {}
    for i, j, k in combinations(range(m), 3):
        T = np.zeros(A.piece_shape(i, j, k), bool)
        for a, b, c in np.ndindex(*T.shape):
            T[a, b, c] = relative_density(H, triad_of(classes, parts, i, j, k, a, b, c)) >= d3
        pieces[i, j, k] = T
    return A.with_pieces(pieces)


# --- degree hypothesis ------------------------------------------------------------

def _role(A: ReducedHypergraph, ab: tuple[int, int], c: int):
    """Piece containing class ab and index c, the axis of ab in it, and the other two class sizes."""
    a, b = ab
    t = tuple(sorted((a, b, c)))
    i, j, k = t
    axis = {(i, j): 0, (i, k): 1, (j, k): 2}[ab]
    others = [A.size(*p) for p in ((i, j), (i, k), (j, k)) if p != ab]
    return A.pieces[t], axis, others[0] * others[1]


def degrees(A: ReducedHypergraph, ab, c) -> np.ndarray:
    T, axis, _ = _role(A, tuple(ab), c)
    return T.sum(axis=tuple(x for x in range(3) if x != axis))


def low_degree(A: ReducedHypergraph, ab, c, eps) -> list[int]:
    """The exception set: vertices of class ab with degree below (1/2+eps)|P_ac||P_bc| in the piece with c."""
    eps = as_fraction(eps)
    T, axis, vol = _role(A, tuple(ab), c)
    deg = T.sum(axis=tuple(x for x in range(3) if x != axis))
    bound = (Fraction(1, 2) + eps) * vol
    return [v for v, g in enumerate(deg.tolist()) if g < bound]


@dataclass
class DegreeCheck:
    ok: bool
    exceptions: dict  # ((a, b), c) -> low-degree vertices of class ab
    violations: list

    def to_dict(self) -> dict:
        return {"ok": self.ok,
                "exceptions": {f"{a},{b}|{c}": v for ((a, b), c), v in self.exceptions.items() if v},
                "violations": [f"{a},{b}|{c}" for (a, b), c in self.violations]}


def degree_hypothesis(A: ReducedHypergraph, eps, delta) -> DegreeCheck:
    eps, delta = as_fraction(eps), as_fraction(delta)
    if not (eps > 0 and 0 < delta < 1):
        raise ValueError("need eps > 0 and 0 < delta < 1")
    exc, bad = {}, []
    for i, j, k in combinations(range(A.m), 3):
        for ab, c in (((i, j), k), ((i, k), j), ((j, k), i)):
            low = low_degree(A, ab, c, eps)
            exc[ab, c] = low
            if len(low) > delta * A.size(*ab):
                bad.append((ab, c))
    return DegreeCheck(not bad, exc, bad)


# --- holes ------------------------------------------------------------------------

@dataclass(frozen=True)
class Hole:
    sets: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


def _independent(T: np.ndarray, I1, I2, I3) -> bool:
    if not (len(I1) and len(I2) and len(I3)):
        return True
    return not T[np.ix_(list(I1), list(I2), list(I3))].any()


def _extend(T: np.ndarray, sets) -> tuple:
    """Grow a hole to a maximal one, scanning classes and vertices in order."""
    sets = [list(s) for s in sets]
    for axis in range(3):
        for v in range(T.shape[axis]):
            if v in sets[axis]:
                continue
            trial = [list(s) for s in sets]
            trial[axis] = sorted(trial[axis] + [v])
            if _independent(T, *trial):
                sets = trial
    return tuple(tuple(s) for s in sets)


@dataclass
class HoleProfile:
    """best[t1][t2]: most third-class vertices avoiding every edge with some I1, I2 of sizes t1, t2."""

    best: np.ndarray
    arg1: np.ndarray
    arg2: np.ndarray


def hole_profile(T: np.ndarray) -> HoleProfile:
    s1, s2, s3 = T.shape
    if max(T.shape) > HOLE_GUARD:
        raise GuardError(f"exact hole search is limited to class sizes <= {HOLE_GUARD}")
    # forbidden third-class vertices for each I1 and single b: bitmasks over c
    touch = (_search.subset_rows(0, 1 << s1, s1) @ T.reshape(s1, s2 * s3).astype(np.float64)) > 0
    weights = (1 << np.arange(s3, dtype=np.int64))
    rowmask = (touch.reshape(-1, s2, s3) * weights).sum(-1)  # (2^s1, s2)
    forb = np.zeros((1 << s1, 1), dtype=np.int64)
    for b in range(s2):
        forb = np.concatenate([forb, forb | rowmask[:, b:b + 1]], axis=1)
    table = np.array([s3 - bin(x).count("1") for x in range(1 << s3)], dtype=np.int64)
    avail = table[forb]  # (2^s1, 2^s2)
    size1 = np.array([bin(x).count("1") for x in range(1 << s1)])
    size2 = np.array([bin(x).count("1") for x in range(1 << s2)])
    best = np.full((s1 + 1, s2 + 1), -1, dtype=np.int64)
    arg1 = np.zeros((s1 + 1, s2 + 1), dtype=np.int64)
    arg2 = np.zeros((s1 + 1, s2 + 1), dtype=np.int64)
    for t2 in range(s2 + 1):
        cols = np.flatnonzero(size2 == t2)
        sub = avail[:, cols]
        j = sub.argmax(1)
        vals = sub[np.arange(len(sub)), j]
        for t1 in range(s1 + 1):
            rows = np.flatnonzero(size1 == t1)
            r = rows[int(vals[rows].argmax())]
            best[t1, t2] = vals[r]
            arg1[t1, t2], arg2[t1, t2] = r, cols[j[r]]
    return HoleProfile(best, arg1, arg2)


def _thresholds(shape, p, q, r, delta: Fraction):
    return tuple(ceil(x * delta * s) for x, s in zip((p, q, r), shape))


def _bits_of(mask: int) -> list[int]:
    return [i for i in range(int(mask).bit_length()) if mask >> i & 1]


def find_hole(A: ReducedHypergraph, triple, p: int, q: int, r: int, delta, method="exact",
              *, restarts: int = 200, seed=0, profile: HoleProfile | None = None) -> Hole | None:
    """A (p,q,r)-hole of piece ``triple`` = (i,j,k): independent I1, I2, I3 in classes ij, ik, jk
    with |I1| >= p*delta*|P_ij| etc.  The hole returned is grown to a maximal one.

    ``None`` certifies absence only for ``method="exact"``; the greedy method can miss holes.
    """
    if min(p, q, r) < 1:
        raise ValueError("p, q, r must be positive integers")
    delta = as_fraction(delta)
    T = A.piece(*triple)
    t1, t2, t3 = _thresholds(T.shape, p, q, r, delta)
    if t1 > T.shape[0] or t2 > T.shape[1] or t3 > T.shape[2]:
        return None
    if method == "exact":
        prof = profile or hole_profile(T)
        if prof.best[t1, t2] < t3:
            return None
        I1 = _bits_of(prof.arg1[t1, t2])
        I2 = _bits_of(prof.arg2[t1, t2])
        forbidden = T[np.ix_(I1, I2)].any(axis=(0, 1)) if I1 and I2 else np.zeros(T.shape[2], bool)
        I3 = np.flatnonzero(~forbidden)[:t3].tolist()
        return Hole(_extend(T, (I1, I2, I3)))
    if method == "greedy":
        rng = np.random.default_rng(seed)
        need = (t1, t2, t3)
        verts = [(ax, v) for ax in range(3) for v in range(T.shape[ax])]
        for _ in range(restarts):
            sets = [[], [], []]
            for idx in rng.permutation(len(verts)):
                ax, v = verts[idx]
                if len(sets[ax]) >= need[ax]:
                    continue
                trial = [list(s) for s in sets]
                trial[ax].append(v)
                if _independent(T, *trial):
                    sets = trial
            if all(len(s) >= t for s, t in zip(sets, need)):
                return Hole(_extend(T, [sorted(s) for s in sets]))
        return None
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class HoleSignature:
    index: int
    delta: Fraction
    cells: frozenset

    def __contains__(self, cell) -> bool:
        return tuple(cell) in self.cells

    def __len__(self) -> int:
        return len(self.cells)

    def same_colour(self, other: HoleSignature) -> bool:
        return self.cells == other.cells


def hole_signature(A: ReducedHypergraph, i: int, delta, base=(0, 1)) -> HoleSignature:
    """All (p,q,r) in [1, floor(1/delta)]^3 for which piece (base, i) has a (p,q,r)-hole."""
    delta = as_fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("need 0 < delta < 1")
    triple = tuple(sorted((*base, i)))
    if len(set(triple)) != 3:
        raise ValueError("index must differ from the base indices")
    T = A.piece(*triple)
    prof = hole_profile(T)
    K = floor(1 / delta)
    s1, s2, s3 = T.shape
    cells = set()
    # downward closed in r: for each (p, q) only the largest admissible r is needed
    for p in range(1, K + 1):
        t1 = ceil(p * delta * s1)
        if t1 > s1:
            break
        for q in range(1, K + 1):
            t2 = ceil(q * delta * s2)
            if t2 > s2:
                break
            room = int(prof.best[t1, t2])
            if room < 1:
                continue
            rmax = min(K, floor(Fraction(room) / (delta * s3)))
            cells.update((p, q, r) for r in range(1, rmax + 1))
    return HoleSignature(i, delta, frozenset(cells))


# --- patterns ---------------------------------------------------------------------

PAIR_LABELS = ("12", "13", "14", "23", "24", "34")


@dataclass(frozen=True)
class K4Pattern:
    """Indices i1<i2<i3<i4 and one vertex per class, in the order 12, 13, 14, 23, 24, 34."""

    indices: tuple[int, int, int, int]
    vertices: tuple[int, int, int, int, int, int]
    trace: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def vertex(self, label: str) -> int:
        return self.vertices[PAIR_LABELS.index(label)]

    def triples(self):
        """The four required edges as (piece, (u, v, w)) with local indices."""
        i1, i2, i3, i4 = self.indices
        v = dict(zip(PAIR_LABELS, self.vertices))
        return [((i1, i2, i3), (v["12"], v["13"], v["23"])),
                ((i1, i2, i4), (v["12"], v["14"], v["24"])),
                ((i1, i3, i4), (v["13"], v["14"], v["34"])),
                ((i2, i3, i4), (v["23"], v["24"], v["34"]))]

    def to_dict(self) -> dict:
        return {"indices": list(self.indices),
                "vertices": dict(zip(PAIR_LABELS, self.vertices))}


def validate_pattern(A: ReducedHypergraph, pat: K4Pattern) -> bool:
    i = pat.indices
    if not (len(set(i)) == 4 and list(i) == sorted(i) and 0 <= i[0] and i[3] < A.m):
        return False
    for piece, (a, b, c) in pat.triples():
        T = A.pieces[piece]
        if not (0 <= a < T.shape[0] and 0 <= b < T.shape[1] and 0 <= c < T.shape[2]):
            return False
        if not T[a, b, c]:
            return False
    return True


@dataclass
class StepFailure:
    step: int
    reason: str
    witness: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"status": "step-failure", "step": self.step, "reason": self.reason,
                "witness": self.witness, "trace": self.trace}


def find_pattern_bruteforce(A: ReducedHypergraph) -> K4Pattern | None:
    """First pattern in lexicographic order of (indices, vertices), or None if there is none."""
    smax = max(A.sizes.values())
    if comb(A.m, 4) * smax ** 6 > BRUTE_FORCE_BUDGET:
        raise GuardError(f"brute force over C({A.m},4) * {smax}^6 cases exceeds {BRUTE_FORCE_BUDGET}")
    for i1, i2, i3, i4 in combinations(range(A.m), 4):
        T123 = A.pieces[i1, i2, i3]
        T124 = A.pieces[i1, i2, i4]
        T134 = A.pieces[i1, i3, i4]
        T234 = A.pieces[i2, i3, i4]
        for p12, p13, p23 in np.argwhere(T123).tolist():
            for p14, p24 in np.argwhere(T124[p12]).tolist():
                hit = np.flatnonzero(T134[p13, p14] & T234[p23, p24])
                if hit.size:
                    return K4Pattern((i1, i2, i3, i4), (p12, p13, p14, p23, p24, int(hit[0])))
    return None


def lemma_solver(A: ReducedHypergraph, eps, delta=None, base=(0, 1)):
    """Run the three-step construction; returns a K4Pattern or a StepFailure, both with a ``trace``.

    delta defaults to eps/4.  Step 1 can fail at small m because the pigeonhole
    guarantee needs m far beyond desk scale; Step 2 fails when no admissible vertex
    exists or the best third vertex scores below 1 + 2 eps.
    """
    eps = as_fraction(eps)
    delta = eps / 4 if delta is None else as_fraction(delta)
    i1, i2 = base
    trace: dict = {"eps": str(eps), "delta": str(delta)}
    check = degree_hypothesis(A, eps, delta)
    trace["degree_hypothesis"] = check.ok
    if not check.ok:
        warnings.warn("degree hypothesis fails; the solver runs without its guarantee", stacklevel=2)

    # step 1: two indices whose pieces with the base have the same hole signature
    rest = [i for i in range(A.m) if i not in base]
    sigs = {i: hole_signature(A, i, delta, base) for i in rest}
    trace["signature_sizes"] = {i: len(s) for i, s in sigs.items()}
    pair = next(((a, b) for a, b in combinations(rest, 2) if sigs[a].same_colour(sigs[b])), None)
    if pair is None:
        return StepFailure(1, "no two indices share a hole signature", trace=trace)
    i3, i4 = pair
    trace["i3"], trace["i4"] = i3, i4
    if not (i1 < i2 < i3 < i4):
        raise HypergraphError("base indices must precede all others")

    # step 2: P14, P24 of maximum codegree outside the exception sets, then P34
    T124 = A.pieces[i1, i2, i4]  # axes P12, P14, P24
    T134 = A.pieces[i1, i3, i4]  # axes P13, P14, P34
    T234 = A.pieces[i2, i3, i4]  # axes P23, P24, P34
    X14 = set(low_degree(A, (i1, i4), i3, eps))
    X24 = set(low_degree(A, (i2, i4), i3, eps))
    codeg = T124.sum(axis=0).astype(np.int64)
    allowed = np.ones_like(codeg, bool)
    allowed[sorted(X14), :] = False
    allowed[:, sorted(X24)] = False
    if not allowed.any():
        return StepFailure(2, "every P14 or every P24 vertex is low-degree", trace=trace)
    flat = np.where(allowed, codeg, -1).argmax()
    p14, p24 = (int(x) for x in np.unravel_index(flat, codeg.shape))
    s12, s13, s23 = A.size(i1, i2), A.size(i1, i3), A.size(i2, i3)
    trace["p14"], trace["p24"] = p14, p24
    trace["codegree_14_24"] = int(codeg[p14, p24])
    trace["p"] = floor(Fraction(int(codeg[p14, p24])) / (delta * s12))
    c1 = T134[:, p14, :].sum(axis=0)
    c2 = T234[:, p24, :].sum(axis=0)
    scores = [Fraction(int(a), s13) + Fraction(int(b), s23) for a, b in zip(c1, c2)]
    top = max(scores)
    p34 = scores.index(top)
    trace["p34"], trace["p34_score"] = p34, str(top)
    if top < 1 + 2 * eps:
        return StepFailure(2, f"best P34 scores {top} < 1 + 2 eps", trace=trace)

    # step 3: an edge of A[i1,i2,i3] inside the three common neighbourhoods
    I12 = np.flatnonzero(T124[:, p14, p24])
    I13 = np.flatnonzero(T134[:, p14, p34])
    I23 = np.flatnonzero(T234[:, p24, p34])
    T123 = A.pieces[i1, i2, i3]
    hits = np.argwhere(T123[np.ix_(I12, I13, I23)]) if len(I12) and len(I13) and len(I23) else []
    if len(hits) == 0:
        return StepFailure(3, "common neighbourhoods span no edge of A[i1,i2,i3]",
                           witness={"I12": I12.tolist(), "I13": I13.tolist(), "I23": I23.tolist()},
                           trace=trace)
    a, b, c = hits[0]
    pat = K4Pattern((i1, i2, i3, i4), (int(I12[a]), int(I13[b]), p14, int(I23[c]), p24, p34), trace)
    if not validate_pattern(A, pat):
        raise AssertionError("solver produced an invalid pattern")
    return pat
