"""Deviation of a 3-graph from density d under the seven quasirandomness notions.

Each notion fixes the shape of its test arguments (vertex sets and/or ordered pair
sets) and a definitional count.  Writing ``W = A - d`` over all n^3 ordered triples,
every count-minus-prediction is a multilinear form in the argument indicators:

    v    sum_x X[x] W[x,.,.]              vv   sum Y[y] Z[z] W[.,y,z]
    vvv  sum X[x] Y[y] Z[z] W[x,y,z]      e    sum P[y,z] W[.,y,z]
    ev   sum X[x] P[y,z] W[x,y,z]         ee   sum P[x,y] Q[x,z] W[x,y,z]
    eee  sum P[x,y] Q[x,z] R[y,z] W[x,y,z]

(a dot means summing over all of V).  Internally W is scaled by the denominator of d
so the search runs on integers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from . import _search
from .core import GuardError, Hypergraph3, OrderedPairSet, VertexSet, as_fraction

SCHEMA = "qr3lab-report-1"


class Notion(str, Enum):
    V = "v"
    VV = "vv"
    VVV = "vvv"
    E = "e"
    EV = "ev"
    EE = "ee"
    EEE = "eee"

    @classmethod
    def parse(cls, name) -> Notion:
        if isinstance(name, Notion):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown notion {name!r}; expected one of "
                             f"{[m.value for m in cls]}") from None


VERTEX, PAIR = "vertex", "pair"

# (argument kinds, tensor reduction, tensor subscripts, argument subscripts)
_SHAPES = {
    Notion.V: ((VERTEX,), (1, 2), "x", ("x",)),
    Notion.VV: ((VERTEX, VERTEX), (0,), "yz", ("y", "z")),
    Notion.VVV: ((VERTEX, VERTEX, VERTEX), (), "xyz", ("x", "y", "z")),
    Notion.E: ((PAIR,), (0,), "yz", ("yz",)),
    Notion.EV: ((VERTEX, PAIR), (), "xyz", ("x", "yz")),
    Notion.EE: ((PAIR, PAIR), (), "xyz", ("xy", "xz")),
    Notion.EEE: ((PAIR, PAIR, PAIR), (), "xyz", ("xy", "xz", "yz")),
}

EXACT_GUARD = {
    Notion.V: None, Notion.E: None,
    Notion.VV: 24, Notion.EV: 24,
    Notion.VVV: 13, Notion.EE: 20, Notion.EEE: 3,
}


def arg_kinds(notion) -> tuple[str, ...]:
    return _SHAPES[Notion.parse(notion)][0]


def _form(notion: Notion, T: np.ndarray) -> _search.Form:
    _, axes, subs, args = _SHAPES[notion]
    base = T.sum(axis=axes) if axes else T
    return _search.Form(np.asarray(base, dtype=np.float64), subs, args)


def _indicators(notion: Notion, n: int, args) -> list[np.ndarray]:
    kinds = _SHAPES[notion][0]
    if len(args) != len(kinds):
        raise ValueError(f"notion {notion.value} takes {len(kinds)} argument(s), got {len(args)}")
    out = []
    for kind, a in zip(kinds, args):
        if isinstance(a, np.ndarray):
            want = (n,) if kind == VERTEX else (n, n)
            if a.shape != want:
                raise ValueError(f"{kind} indicator must have shape {want}, got {a.shape}")
            out.append(a.astype(np.int64))
        elif kind == VERTEX:
            if isinstance(a, OrderedPairSet):
                raise ValueError("expected a vertex set, got an ordered pair set")
            s = a if isinstance(a, VertexSet) else VertexSet(n, frozenset(a))
            if s.n != n:
                raise ValueError("vertex set over a different ground set")
            out.append(s.indicator())
        else:
            if isinstance(a, VertexSet):
                raise ValueError("expected an ordered pair set, got a vertex set")
            s = a if isinstance(a, OrderedPairSet) else OrderedPairSet(n, frozenset(map(tuple, a)))
            if s.n != n:
                raise ValueError("pair set over a different ground set")
            out.append(s.indicator())
    return out


class Count(NamedTuple):
    """Definitional count and the size it is compared against (d * size)."""

    hits: int
    size: int


def _size(notion: Notion, n: int, inds) -> int:
    s = [i.sum() for i in inds]
    if notion is Notion.V:
        return int(s[0]) * n * n
    if notion is Notion.VV:
        return int(s[0] * s[1]) * n
    if notion is Notion.VVV:
        return int(s[0] * s[1] * s[2])
    if notion is Notion.E:
        return int(s[0]) * n
    if notion is Notion.EV:
        return int(s[0] * s[1])
    if notion is Notion.EE:
        return int(np.einsum("xy,xz->", *inds))
    return int(np.einsum("xy,xz,yz->", *inds))


def count(notion, H: Hypergraph3, args: Sequence) -> Count:
    """Raw count e_notion(args) on H plus the matching size (|X||P|, |K(P,Q)|, ...)."""
    notion = Notion.parse(notion)
    inds = _indicators(notion, H.n, args)
    _, axes, subs, argsubs = _SHAPES[notion]
    A = H.tensor
    base = A.sum(axis=axes) if axes else A
    hits = int(np.einsum(",".join((subs,) + argsubs), base, *inds))
    return Count(hits, _size(notion, H.n, inds))


@dataclass
class DeviationReport:
    notion: Notion
    n: int
    d: Fraction
    value: Fraction
    method: str
    witnesses: tuple
    sign: str
    seed: int | None = None
    restarts: int | None = None
    trials: int | None = None
    eta_hat: Fraction = field(init=False)

    def __post_init__(self):
        self.eta_hat = self.value / self.n ** 3 if self.n else Fraction(0)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "notion": self.notion.value,
            "n": self.n,
            "d": float(self.d),
            "d_exact": str(self.d),
            "value": float(self.value),
            "value_exact": str(self.value),
            "eta_hat": float(self.eta_hat),
            "method": self.method,
            "seed": self.seed,
            "restarts": self.restarts,
            "trials": self.trials,
            "witnesses": [w.sorted() for w in self.witnesses],
            "sign": self.sign,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _scaled_weights(H: Hypergraph3, d) -> tuple[np.ndarray, Fraction]:
    d = as_fraction(d)
    if not 0 <= d <= 1:
        raise ValueError(f"reference density must lie in [0, 1], got {d}")
    q = d.denominator
    if q * max(H.n, 1) ** 3 >= 2 ** 52:
        raise ValueError(f"denominator of d={d} too large for exact search at n={H.n}")
    W = q * H.tensor.astype(np.float64) - d.numerator
    return W, d


def _report(notion, H, d, scaled: float, sign: int, sets, method, **extra) -> DeviationReport:
    kinds = _SHAPES[notion][0]
    wit = tuple(VertexSet.from_indicator(s) if k == VERTEX else OrderedPairSet.from_indicator(s)
                for k, s in zip(kinds, sets))
    value = Fraction(int(round(scaled)), d.denominator)
    return DeviationReport(notion, H.n, d, value, method, wit,
                           "excess" if sign > 0 else "deficit", **extra)


def default_d(H: Hypergraph3) -> Fraction:
    return H.density()


# --- exact -----------------------------------------------------------------------

def _exact_single(w: np.ndarray):
    pos = float(w[w > 0].sum())
    neg = float(-w[w < 0].sum())
    if pos >= neg:
        return pos, 1, [(w > 0).astype(np.float64)]
    return neg, -1, [(w < 0).astype(np.float64)]


def _exact_rows_greedy(M: np.ndarray, workers: int):
    """max over row subset S and greedy column set of +-1_S' M 1_T; returns (val, sign, S, T)."""
    r = M.shape[0]
    vp, ap, vn, an = _search.bilinear_extremes(M[None], workers)
    if vp[0] >= vn[0]:
        S = _search.mask_to_indicator(int(ap[0]), r)
        return vp[0], 1, S, _search.greedy_columns(M, S, 1)
    S = _search.mask_to_indicator(int(an[0]), r)
    return vn[0], -1, S, _search.greedy_columns(M, S, -1)


def _exact_vvv(W: np.ndarray, workers: int):
    n = W.shape[0]
    flat = W.reshape(n, n * n)
    best = (-1.0, 1, 0, 0)  # value, sign, X mask, Y mask
    batch = 256
    for start in range(0, 1 << n, batch):
        stop = min(start + batch, 1 << n)
        Ms = (_search.subset_rows(start, stop, n) @ flat).reshape(-1, n, n)
        vp, ap, vn, an = _search.bilinear_extremes(Ms, workers)
        i = int(vp.argmax())
        if vp[i] > best[0]:
            best = (vp[i], 1, start + i, int(ap[i]))
        i = int(vn.argmax())
        if vn[i] > best[0]:
            best = (vn[i], -1, start + i, int(an[i]))
    val, sign, xm, ym = best
    X = _search.mask_to_indicator(xm, n)
    Y = _search.mask_to_indicator(ym, n)
    M = np.einsum("x,xyz->yz", X, W)
    return val, sign, [X, Y, _search.greedy_columns(M, Y, sign)]


def _exact_ee(W: np.ndarray, workers: int):
    n = W.shape[0]
    vp, ap, vn, an = _search.bilinear_extremes(W, workers)
    pos, neg = float(vp.sum()), float(vn.sum())
    sign, masks = (1, ap) if pos >= neg else (-1, an)
    P = np.zeros((n, n))
    Q = np.zeros((n, n))
    for x in range(n):
        P[x] = _search.mask_to_indicator(int(masks[x]), n)
        Q[x] = _search.greedy_columns(W[x], P[x], sign)
    return max(pos, neg), sign, [P, Q]


def _exact_eee(W: np.ndarray, workers: int):
    n = W.shape[0]
    k = n * n
    Ps = _search.subset_rows(0, 1 << k, k).reshape(-1, n, n)  # (2^k, x, y)
    # for fixed P and z: rows x (Q[:, z]), columns y (R[:, z]), matrix P[x,y] W[x,y,z]
    Ms = np.einsum("pxy,xyz->pzxy", Ps, W).reshape(-1, n, n)
    vp, ap, vn, an = _search.bilinear_extremes(Ms, workers)
    vp, vn = vp.reshape(-1, n).sum(1), vn.reshape(-1, n).sum(1)
    ap, an = ap.reshape(-1, n), an.reshape(-1, n)
    ip, ineg = int(vp.argmax()), int(vn.argmax())
    if vp[ip] >= vn[ineg]:
        sign, pi, masks, val = 1, ip, ap[ip], vp[ip]
    else:
        sign, pi, masks, val = -1, ineg, an[ineg], vn[ineg]
    P = Ps[pi]
    Q = np.zeros((n, n))
    R = np.zeros((n, n))
    for z in range(n):
        Mz = P * W[:, :, z]
        Q[:, z] = _search.mask_to_indicator(int(masks[z]), n)
        R[:, z] = _search.greedy_columns(Mz, Q[:, z], sign)
    return val, sign, [P, Q, R]


def deviation_exact(H: Hypergraph3, d=None, notion="ev", workers: int = 1) -> DeviationReport:
    """True maximum of |count - d * size| with a witness attaining it."""
    notion = Notion.parse(notion)
    guard = EXACT_GUARD[notion]
    if guard is not None and H.n > guard:
        raise GuardError(f"exact {notion.value}-deviation is limited to n <= {guard} "
                         f"(got n={H.n}); use the ascent or sample method")
    W, d = _scaled_weights(H, default_d(H) if d is None else d)
    n = H.n
    if notion is Notion.V:
        val, sign, sets = _exact_single(W.sum(axis=(1, 2)))
    elif notion is Notion.E:
        val, sign, sets = _exact_single(W.sum(axis=0))
    elif notion is Notion.VV:
        val, sign, Y, Z = _exact_rows_greedy(W.sum(axis=0), workers)
        sets = [Y, Z]
    elif notion is Notion.EV:
        val, sign, X, P = _exact_rows_greedy(W.reshape(n, n * n), workers)
        sets = [X, P.reshape(n, n)]
    elif notion is Notion.VVV:
        val, sign, sets = _exact_vvv(W, workers)
    elif notion is Notion.EE:
        val, sign, sets = _exact_ee(W, workers)
    else:
        val, sign, sets = _exact_eee(W, workers)
    return _report(notion, H, d, val, sign, sets, "exact")


# --- heuristics -------------------------------------------------------------------

def deviation_ascent(H: Hypergraph3, d=None, notion="ev", restarts: int = 20, seed=0) -> DeviationReport:
    """Lower bound by coordinate ascent from the full sets plus ``restarts`` random starts."""
    notion = Notion.parse(notion)
    W, d = _scaled_weights(H, default_d(H) if d is None else d)
    if notion is Notion.EE:
        val, sign, sets = _ascent_ee(W, restarts, seed)
    else:
        best = _search.ascent(_form(notion, W), restarts, seed)
        val, sign, sets = best.value, best.sign, best.sets
    return _report(notion, H, d, val, sign, sets, "ascent", seed=seed, restarts=restarts)


def _ascent_ee(W: np.ndarray, restarts: int, seed):
    # the ee form is a sum of independent bilinear forms, one per anchor x
    n = W.shape[0]
    rng = np.random.default_rng(seed)
    per_anchor = [_search.ascent_by_sign(_search.Form(W[x], "yz", ("y", "z")), restarts, rng)
                  for x in range(n)]
    totals = {s: sum(b[s].value for b in per_anchor) for s in (1, -1)}
    sign = 1 if totals[1] >= totals[-1] else -1
    P = np.array([b[sign].sets[0] for b in per_anchor]).reshape(n, n)
    Q = np.array([b[sign].sets[1] for b in per_anchor]).reshape(n, n)
    return totals[sign], sign, [P, Q]


def deviation_sample(H: Hypergraph3, d=None, notion="ev", trials: int = 1000, seed=0) -> DeviationReport:
    """Lower bound from random arguments with the innermost argument greedily completed."""
    notion = Notion.parse(notion)
    W, d = _scaled_weights(H, default_d(H) if d is None else d)
    best = _search.sample(_form(notion, W), trials, seed)
    return _report(notion, H, d, best.value, best.sign, best.sets, "sample",
                   seed=seed, trials=trials)


def deviation(H: Hypergraph3, d=None, notion="ev", method="exact", *, restarts=20, trials=1000,
              seed=0, workers=1) -> DeviationReport:
    if method == "exact":
        return deviation_exact(H, d, notion, workers=workers)
    if method == "ascent":
        return deviation_ascent(H, d, notion, restarts=restarts, seed=seed)
    if method == "sample":
        return deviation_sample(H, d, notion, trials=trials, seed=seed)
    raise ValueError(f"unknown method {method!r}")


CERTIFIED_NO = "certified-no"
NOT_REFUTED = "not-refuted"


@dataclass
class Verdict:
    verdict: str
    eta: Fraction
    report: DeviationReport

    @property
    def refuted(self) -> bool:
        return self.verdict == CERTIFIED_NO


def is_quasirandom(H: Hypergraph3, d, eta, notion="ev", method="exact", **kw) -> Verdict:
    """Membership test for Q(d, eta, notion).

    ``certified-no`` means a witness with deviation above eta * n^3 was found.  With the
    exact method ``not-refuted`` certifies membership; with heuristics it does not.
    """
    eta = as_fraction(eta)
    rep = deviation(H, d, notion, method, **kw)
    bad = rep.value > eta * H.n ** 3
    return Verdict(CERTIFIED_NO if bad else NOT_REFUTED, eta, rep)


def reevaluate(H: Hypergraph3, report: DeviationReport) -> Fraction:
    """Signed deviation count(witnesses) - d * size(witnesses), from the definitional count."""
    c = count(report.notion, H, report.witnesses)
    return c.hits - report.d * c.size
