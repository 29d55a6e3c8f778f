"""Bipartite regularity, triads, relative density and delta_3-regularity.

A triad is a tripartite graph on disjoint classes X, Y, Z given by three bipartite
edge sets.  Its triangles K3(P) are the triples (x, y, z) with all three pairs
present.  Sub-triads Q <= P are obtained by deleting bipartite edges; deleting a
vertex is the same as deleting all its edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _search
from .core import GuardError, Hypergraph3, HypergraphError, as_fraction

BIPARTITE_GUARD = 24
TRIAD_EDGE_GUARD = 24


@dataclass(frozen=True)
class Triad:
    X: tuple[int, ...]
    Y: tuple[int, ...]
    Z: tuple[int, ...]
    xy: np.ndarray = field(repr=False)
    xz: np.ndarray = field(repr=False)
    yz: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in "XYZ":
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))
        if len(set(self.X) | set(self.Y) | set(self.Z)) != len(self.X) + len(self.Y) + len(self.Z):
            raise HypergraphError("triad classes must be pairwise disjoint and duplicate-free")
        for name, shape in (("xy", (len(self.X), len(self.Y))), ("xz", (len(self.X), len(self.Z))),
                            ("yz", (len(self.Y), len(self.Z)))):
            m = np.asarray(getattr(self, name), dtype=bool)
            if m.shape != shape:
                raise HypergraphError(f"{name} must have shape {shape}, got {m.shape}")
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @classmethod
    def from_edges(cls, X, Y, Z, xy_edges=(), xz_edges=(), yz_edges=()) -> Triad:
        """Build from vertex labels; each edge list holds (u, v) label pairs across the named classes."""
        X, Y, Z = list(X), list(Y), list(Z)

        def matrix(A, B, edges, name):
            ia = {v: i for i, v in enumerate(A)}
            ib = {v: i for i, v in enumerate(B)}
            m = np.zeros((len(A), len(B)), dtype=bool)
            for u, v in edges:
                if u not in ia or v not in ib:
                    raise HypergraphError(f"{name} edge ({u}, {v}) does not respect the classes")
                m[ia[u], ib[v]] = True
            return m

        return cls(X, Y, Z, matrix(X, Y, xy_edges, "XY"), matrix(X, Z, xz_edges, "XZ"),
                   matrix(Y, Z, yz_edges, "YZ"))

    @classmethod
    def complete(cls, X, Y, Z) -> Triad:
        a, b, c = len(X), len(Y), len(Z)
        return cls(X, Y, Z, np.ones((a, b), bool), np.ones((a, c), bool), np.ones((b, c), bool))

    @property
    def sizes(self) -> tuple[int, int, int]:
        return len(self.X), len(self.Y), len(self.Z)

    @property
    def num_edges(self) -> int:
        return int(self.xy.sum() + self.xz.sum() + self.yz.sum())

    def sub(self, xy, xz, yz) -> Triad:
        """Sub-triad keeping only the given edges (masked by this triad's edges)."""
        return Triad(self.X, self.Y, self.Z, self.xy & np.asarray(xy, bool),
                     self.xz & np.asarray(xz, bool), self.yz & np.asarray(yz, bool))

    def to_dict(self) -> dict:
        def edges(m, A, B):
            return [[A[i], B[j]] for i, j in np.argwhere(m).tolist()]
        return {"X": list(self.X), "Y": list(self.Y), "Z": list(self.Z),
                "XY": edges(self.xy, self.X, self.Y), "XZ": edges(self.xz, self.X, self.Z),
                "YZ": edges(self.yz, self.Y, self.Z)}

    @classmethod
    def from_dict(cls, doc: dict) -> Triad:
        return cls.from_edges(doc["X"], doc["Y"], doc["Z"], map(tuple, doc.get("XY", [])),
                              map(tuple, doc.get("XZ", [])), map(tuple, doc.get("YZ", [])))


def read_triad(path) -> Triad:
    with open(path) as fh:
        return Triad.from_dict(json.load(fh))


def write_triad(P: Triad, path) -> None:
    with open(path, "w") as fh:
        json.dump(P.to_dict(), fh)


def _triangle_tensor(P: Triad) -> np.ndarray:
    return P.xy[:, :, None] & P.xz[:, None, :] & P.yz[None, :, :]


def triangles(P: Triad) -> int:
    """|K3(P)| via common neighbourhoods: sum over xy-edges of |N_xz(x) & N_yz(y)|."""
    common = P.xz.astype(np.int64) @ P.yz.T.astype(np.int64)
    return int((P.xy * common).sum())


def triangle_list(P: Triad) -> list[tuple[int, int, int]]:
    return [(P.X[a], P.Y[b], P.Z[c]) for a, b, c in np.argwhere(_triangle_tensor(P)).tolist()]


def _hyper_on_triad(H: Hypergraph3, P: Triad) -> np.ndarray:
    for v in P.X + P.Y + P.Z:
        if not 0 <= v < H.n:
            raise HypergraphError(f"triad vertex {v} is not a vertex of H")
    return H.tensor[np.ix_(P.X, P.Y, P.Z)].astype(bool)


def hyperedges_on_triangles(H: Hypergraph3, P: Triad) -> int:
    return int((_hyper_on_triad(H, P) & _triangle_tensor(P)).sum())


def relative_density(H: Hypergraph3, P: Triad) -> Fraction:
    """|E_H & K3(P)| / |K3(P)|, and 0 when P has no triangles."""
    k = triangles(P)
    if k == 0:
        return Fraction(0)
    return Fraction(hyperedges_on_triangles(H, P), k)


def tcl_check(P: Triad, d2, delta2) -> bool:
    """Upper bound |K3(P)| <= d2^3 |X||Y||Z| + 3 delta2 |X||Y||Z| for a (delta2, d2)-regular P."""
    d2, delta2 = as_fraction(d2), as_fraction(delta2)
    vol = P.sizes[0] * P.sizes[1] * P.sizes[2]
    return triangles(P) <= d2 ** 3 * vol + 3 * delta2 * vol


@dataclass
class RegularityReport:
    kind: str
    d: Fraction
    value: Fraction
    method: str
    witness: dict
    threshold: Fraction | None = None
    delta: Fraction | None = None
    seed: int | None = None

    @property
    def verdict(self) -> bool | None:
        """True if no violation of the delta bound was found, None if no delta was given."""
        if self.threshold is None:
            return None
        return self.value <= self.threshold

    def to_dict(self) -> dict:
        return {
            "schema": "qr3lab-report-1",
            "kind": self.kind,
            "d": float(self.d),
            "d_exact": str(self.d),
            "value": float(self.value),
            "value_exact": str(self.value),
            "method": self.method,
            "seed": self.seed,
            "delta": None if self.delta is None else float(self.delta),
            "threshold": None if self.threshold is None else float(self.threshold),
            "verdict": self.verdict,
            "witness": self.witness,
        }


def _check_d(d) -> Fraction:
    d = as_fraction(d)
    if not 0 <= d <= 1:
        raise ValueError(f"density must lie in [0, 1], got {d}")
    return d


def _heuristic(form: _search.Form, method: str, restarts: int, trials: int, seed) -> _search.Best:
    if method == "ascent":
        return _search.ascent(form, restarts, seed)
    if method == "sample":
        return _search.sample(form, trials, seed)
    raise ValueError(f"unknown method {method!r}")


# --- bipartite --------------------------------------------------------------------

def bipartite_deviation(G, d2, method="exact", *, restarts=20, trials=1000, seed=0, workers=1):
    """(value, X' indicator, Y' indicator) maximising |e(X',Y') - d2 |X'||Y'||."""
    G = np.asarray(G, dtype=bool)
    d2 = _check_d(d2)
    M = d2.denominator * G.astype(np.float64) - d2.numerator
    if method == "exact":
        r, c = M.shape
        flip = c < r
        if flip:
            M = M.T
        if min(r, c) > BIPARTITE_GUARD:
            raise GuardError(f"exact bipartite regularity needs a side of size <= {BIPARTITE_GUARD}")
        vp, ap, vn, an = _search.bilinear_extremes(M[None], workers)
        sign, mask, val = (1, ap[0], vp[0]) if vp[0] >= vn[0] else (-1, an[0], vn[0])
        rows = _search.mask_to_indicator(int(mask), M.shape[0])
        cols = _search.greedy_columns(M, rows, sign)
        if flip:
            rows, cols = cols, rows
    else:
        best = _heuristic(_search.Form(M, "ab", ("a", "b")), method, restarts, trials, seed)
        val, rows, cols = best.value, best.sets[0], best.sets[1]
    return Fraction(int(round(val)), d2.denominator), rows.astype(bool), cols.astype(bool)


def bipartite_regularity(G, d2, method="exact", delta2=None, **kw) -> RegularityReport:
    G = np.asarray(G, dtype=bool)
    d2 = _check_d(d2)
    value, rows, cols = bipartite_deviation(G, d2, method, **kw)
    threshold = None
    if delta2 is not None:
        delta2 = as_fraction(delta2)
        threshold = delta2 * G.shape[0] * G.shape[1]
    witness = {"X": np.flatnonzero(rows).tolist(), "Y": np.flatnonzero(cols).tolist()}
    return RegularityReport("bipartite", d2, value, method, witness, threshold,
                            delta2, kw.get("seed") if method != "exact" else None)


def measured_delta2(G, d2, **kw) -> Fraction:
    """Smallest delta2 for which G is (delta2, d2)-regular: exact deviation / (|X||Y|)."""
    G = np.asarray(G, dtype=bool)
    if G.size == 0:
        return Fraction(0)
    value, _, _ = bipartite_deviation(G, d2, "exact", **kw)
    return value / G.size


# --- triad regularity -----------------------------------------------------------

def _triad_weights(H: Hypergraph3, P: Triad, d3: Fraction) -> np.ndarray:
    h = _hyper_on_triad(H, P)
    return d3.denominator * h.astype(np.float64) - d3.numerator


def _triad_exact(W: np.ndarray, Sab: np.ndarray, Sac: np.ndarray, Sbc: np.ndarray, workers: int):
    """Exact max over sub-triads; enumerates subsets of the ab-edges.

    For fixed Qab the form splits over c into bilinear problems in Qac[:, c] (rows) and
    Qbc[:, c] (columns) with matrix Qab * W[:, :, c].
    """
    na, nb, nc = W.shape
    ab = np.argwhere(Sab)
    k = len(ab)
    rows_of = [np.flatnonzero(Sac[:, c]) for c in range(nc)]
    rmax = max((len(r) for r in rows_of), default=0)
    Qs = np.zeros((1 << k, na, nb))
    if k:
        sel = _search.subset_rows(0, 1 << k, k)
        Qs[:, ab[:, 0], ab[:, 1]] = sel
    # gathered matrices, padded with zero rows: (2^k, nc, rmax, nb)
    Ms = np.zeros((1 << k, nc, rmax, nb))
    for c in range(nc):
        r = rows_of[c]
        if len(r):
            Ms[:, c, :len(r), :] = Qs[:, r, :] * W[r, :, c][None] * Sbc[:, c][None, None, :]
    if rmax == 0 or nc == 0:
        Q = [np.zeros_like(Sab, float), np.zeros_like(Sac, float), np.zeros_like(Sbc, float)]
        return 0.0, 1, Q
    vp, ap, vn, an = _search.bilinear_extremes(Ms.reshape(-1, rmax, nb), workers)
    vp, vn = vp.reshape(-1, nc).sum(1), vn.reshape(-1, nc).sum(1)
    ip, ineg = int(vp.argmax()), int(vn.argmax())
    if vp[ip] >= vn[ineg]:
        sign, qi, masks, val = 1, ip, ap.reshape(-1, nc)[ip], vp[ip]
    else:
        sign, qi, masks, val = -1, ineg, an.reshape(-1, nc)[ineg], vn[ineg]
    Qab = Qs[qi]
    Qac = np.zeros((na, nc))
    Qbc = np.zeros((nb, nc))
    for c in range(nc):
        r = rows_of[c]
        if not len(r):
            continue
        chosen = _search.mask_to_indicator(int(masks[c]), rmax)[:len(r)]
        Qac[r, c] = chosen
        Mc = (Qab * W[:, :, c])[r] * Sbc[:, c][None, :]
        Qbc[:, c] = _search.greedy_columns(Mc, chosen, sign) * Sbc[:, c]
    return val, sign, [Qab, Qac, Qbc]


def triad_deviation(H: Hypergraph3, P: Triad, d3, method="exact", *, restarts=20, trials=1000,
                    seed=0, workers=1):
    """(value, sign, sub-triad) maximising | |E_H & K3(Q)| - d3 |K3(Q)| | over Q <= P."""
    d3 = _check_d(d3)
    W = _triad_weights(H, P, d3)
    if method == "exact":
        if P.num_edges > TRIAD_EDGE_GUARD:
            raise GuardError(f"exact triad regularity needs at most {TRIAD_EDGE_GUARD} bipartite "
                             f"edges (got {P.num_edges}); use ascent or sample")
        counts = [P.xy.sum(), P.xz.sum(), P.yz.sum()]
        piece = int(np.argmin(counts))
        if piece == 0:
            val, sign, (qxy, qxz, qyz) = _triad_exact(W, P.xy, P.xz, P.yz, workers)
        elif piece == 1:
            val, sign, (qxz, qxy, qzy) = _triad_exact(W.transpose(0, 2, 1), P.xz, P.xy, P.yz.T, workers)
            qyz = qzy.T
        else:
            val, sign, (qyz, qyx, qzx) = _triad_exact(W.transpose(1, 2, 0), P.yz, P.xy.T, P.xz.T, workers)
            qxy, qxz = qyx.T, qzx.T
        Q = P.sub(qxy, qxz, qyz)
    else:
        form = _search.Form(W, "abc", ("ab", "ac", "bc"), (P.xy, P.xz, P.yz))
        best = _heuristic(form, method, restarts, trials, seed)
        val, sign = best.value, best.sign
        Q = P.sub(*best.sets)
    return Fraction(int(round(val)), d3.denominator), sign, Q


def triad_regularity(H: Hypergraph3, P: Triad, d3, method="exact", delta3=None, **kw) -> RegularityReport:
    d3 = _check_d(d3)
    value, sign, Q = triad_deviation(H, P, d3, method, **kw)
    threshold = None
    if delta3 is not None:
        delta3 = as_fraction(delta3)
        threshold = delta3 * triangles(P)
    witness = {"sub_triad": Q.to_dict(), "sign": "excess" if sign > 0 else "deficit"}
    return RegularityReport("triad", d3, value, method, witness, threshold, delta3,
                            kw.get("seed") if method != "exact" else None)


def sub_triad_deviation(H: Hypergraph3, Q: Triad, d3) -> Fraction:
    """Signed |E_H & K3(Q)| - d3 |K3(Q)| for one explicit sub-triad."""
    return hyperedges_on_triangles(H, Q) - as_fraction(d3) * triangles(Q)


# --- embedding-lemma hypotheses and partition clauses ------------------------------

def triad_of(classes, parts: dict, i: int, j: int, k: int, alpha=0, beta=0, gamma=0) -> Triad:
    """Triad on classes i<j<k from the chosen bipartite parts of pairs ij, ik, jk.

    ``parts[(i, j)]`` is a list of boolean |V_i| x |V_j| matrices partitioning K(V_i, V_j).
    """
    return Triad(classes[i], classes[j], classes[k], parts[i, j][alpha], parts[i, k][beta],
                 parts[j, k][gamma])


@dataclass
class EmbeddingCheck:
    regular: dict
    dense: dict
    contains_k4: tuple | None

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.regular.values()) and all(self.dense.values())


def embedding_hypotheses(H: Hypergraph3, classes, parts: dict, d3, delta3, method="exact",
                         **kw) -> EmbeddingCheck:
    """Check, for a 4-partite graph, that every triad is delta3-regular and has density >= d3.

    ``parts[(i, j)]`` is a single boolean matrix here.  The conclusion is tested directly:
    does H, restricted to triangles of the four triads, contain a tetrahedron?
    """
    from .counting import contains_K4

    d3, delta3 = _check_d(d3), as_fraction(delta3)
    regular, dense, keep = {}, {}, []
    for i, j, k in combinations(range(4), 3):
        P = Triad(classes[i], classes[j], classes[k], parts[i, j], parts[i, k], parts[j, k])
        rd = relative_density(H, P)
        dense[i, j, k] = rd >= d3
        rep = triad_regularity(H, P, rd, method, delta3, **kw)
        regular[i, j, k] = bool(rep.verdict)
        keep += [t for t in triangle_list(P) if H.has_edge(*t)]
    return EmbeddingCheck(regular, dense, contains_K4(Hypergraph3(H.n, keep)))


@dataclass
class PartitionCheck:
    equal_classes: bool
    irregular_pairs: list
    sparse_or_dense: bool
    irregular_triads: dict
    clause4: bool

    @property
    def ok(self) -> bool:
        return self.equal_classes and not self.irregular_pairs and self.sparse_or_dense and self.clause4


def check_partition(H: Hypergraph3, classes, parts: dict, d2, delta2, d3, delta3,
                    method="exact", **kw) -> PartitionCheck:
    """Verify the cleaned-regularity clauses on an externally supplied partition.

    (i) equal class sizes; (ii) every bipartite part is (delta2, d2)-regular;
    (iii) every triad has relative density 0 or >= d3; (iv) per i<j<k at most
    delta3 * l^3 triads are delta3-irregular (l = parts per pair).
    """
    d3, delta3 = _check_d(d3), as_fraction(delta3)
    m = len(classes)
    equal = len({len(c) for c in classes}) <= 1
    bad_pairs = []
    for (i, j), plist in sorted(parts.items()):
        for a, G in enumerate(plist):
            if not bipartite_regularity(G, d2, method, delta2, **kw).verdict:
                bad_pairs.append((i, j, a))
    sparse_or_dense = True
    irregular = {}
    clause4 = True
    for i, j, k in combinations(range(m), 3):
        ell = len(parts[i, j])
        count_bad = 0
        for a in range(len(parts[i, j])):
            for b in range(len(parts[i, k])):
                for c in range(len(parts[j, k])):
                    P = triad_of(classes, parts, i, j, k, a, b, c)
                    rd = relative_density(H, P)
                    if rd != 0 and rd < d3:
                        sparse_or_dense = False
                    if not triad_regularity(H, P, rd, method, delta3, **kw).verdict:
                        count_bad += 1
        irregular[i, j, k] = count_bad
        if count_bad > delta3 * ell ** 3:
            clause4 = False
    return PartitionCheck(equal, bad_pairs, sparse_or_dense, irregular, clause4)


def partition_from_dict(doc: dict):
    """``{"classes": [[v,...],...], "parts": {"i,j": [[[u,v],...], ...]}}`` -> (classes, parts).

    Each part is an edge list of vertex labels across V_i x V_j; parts become boolean matrices.
    """
    classes = [list(map(int, c)) for c in doc["classes"]]
    parts = {}
    for key, plist in doc["parts"].items():
        i, j = (int(t) for t in key.split(","))
        if not 0 <= i < j < len(classes):
            raise HypergraphError(f"part key {key!r} must name classes i<j")
        A, B = classes[i], classes[j]
        parts[i, j] = [Triad.from_edges(A, B, [], edges).xy for edges in plist]
    for i, j in combinations(range(len(classes)), 2):
        if (i, j) not in parts:
            raise HypergraphError(f"no parts given for class pair {i},{j}")
    return classes, parts


def read_partition(path):
    with open(path) as fh:
        return partition_from_dict(json.load(fh))


def random_triad(t: int, p: float, seed, offset: int = 0) -> Triad:
    """Three independent p-random bipartite graphs on classes of size t (labels offset..)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    X = range(offset, offset + t)
    Y = range(offset + t, offset + 2 * t)
    Z = range(offset + 2 * t, offset + 3 * t)
    return Triad(X, Y, Z, rng.random((t, t)) < p, rng.random((t, t)) < p, rng.random((t, t)) < p)


__all__ = [
    "Triad", "RegularityReport", "triangles", "triangle_list", "relative_density", "tcl_check",
    "bipartite_regularity", "bipartite_deviation", "measured_delta2", "triad_regularity",
    "triad_deviation", "sub_triad_deviation", "embedding_hypotheses", "check_partition",
    "random_triad", "read_triad", "write_triad", "partition_from_dict", "read_partition",
]
