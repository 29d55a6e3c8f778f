"""Maximisation of multilinear forms over 0/1 indicator arguments.

A form is ``sum T[...] * S1[...] * S2[...] ...`` written as an einsum over a weight
tensor ``T`` and argument indicators.  Weights are integers stored in float64; every
partial sum stays far below 2**53 at the sizes the guards allow, so all values are
exact.  Because the form is linear in each argument separately, the best completion
of one argument given the others is the greedy one: keep an element iff its marginal
weight has the wanted sign (zero weight -> excluded).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

# elements per intermediate block in the enumeration kernels
_BLOCK = 1 << 22


def default_workers() -> int:
    env = os.environ.get("QR3LAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class Form:
    tensor: np.ndarray
    subs: str
    args: tuple[str, ...]
    supports: tuple[np.ndarray | None, ...] | None = None

    def shape(self, i: int) -> tuple[int, ...]:
        dims = dict(zip(self.subs, self.tensor.shape))
        return tuple(dims[c] for c in self.args[i])

    def support(self, i: int):
        return None if self.supports is None else self.supports[i]

    def value(self, sets) -> float:
        subscripts = ",".join((self.subs,) + self.args)
        return float(np.einsum(subscripts, self.tensor, *sets))

    def marginal(self, sets, i: int) -> np.ndarray:
        others = [a for j, a in enumerate(self.args) if j != i]
        subscripts = ",".join((self.subs, *others)) + "->" + self.args[i]
        return np.einsum(subscripts, self.tensor, *[s for j, s in enumerate(sets) if j != i])

    def greedy(self, sets, i: int, sign: int) -> np.ndarray:
        keep = sign * self.marginal(sets, i) > 0
        sup = self.support(i)
        if sup is not None:
            keep &= sup
        return keep.astype(np.float64)

    def random_sets(self, rng: np.random.Generator):
        out = []
        for i in range(len(self.args)):
            s = (rng.random(self.shape(i)) < 0.5).astype(np.float64)
            sup = self.support(i)
            if sup is not None:
                s *= sup
            out.append(s)
        return out

    def full_sets(self):
        out = []
        for i in range(len(self.args)):
            sup = self.support(i)
            out.append(np.ones(self.shape(i)) if sup is None else sup.astype(np.float64))
        return out


@dataclass
class Best:
    """Best signed value found; ``sign`` is +1 for excess, -1 for deficit."""

    value: float = -1.0
    sign: int = 1
    sets: list | None = None

    def offer(self, value: float, sign: int, sets) -> None:
        if value > self.value:
            self.value, self.sign, self.sets = value, sign, sets


def ascend(form: Form, sets, sign: int, max_rounds: int = 1000):
    """Coordinate ascent from ``sets`` in direction ``sign`` until a fixed point."""
    sets = [np.asarray(s, dtype=np.float64) for s in sets]
    for _ in range(max_rounds):
        changed = False
        for i in range(len(sets)):
            new = form.greedy(sets, i, sign)
            if not np.array_equal(new, sets[i]):
                sets[i] = new
                changed = True
        if not changed:
            break
    return sign * form.value(sets), sets


def ascent_by_sign(form: Form, restarts: int, rng: np.random.Generator) -> dict:
    """Best fixed point per sign over the full-set start plus ``restarts`` random starts."""
    starts = [form.full_sets()] + [form.random_sets(rng) for _ in range(restarts)]
    best = {1: Best(), -1: Best()}
    for start in starts:
        for sign in (1, -1):
            val, sets = ascend(form, start, sign)
            best[sign].offer(val, sign, sets)
    return best


def ascent(form: Form, restarts: int, seed) -> Best:
    by_sign = ascent_by_sign(form, restarts, np.random.default_rng(seed))
    pos, neg = by_sign[1], by_sign[-1]
    return pos if pos.value >= neg.value else neg


def sample(form: Form, trials: int, seed) -> Best:
    """Random arguments with the last one greedily completed, both signs."""
    rng = np.random.default_rng(seed)
    best = Best(0.0, 1, [np.zeros(form.shape(i)) for i in range(len(form.args))])
    last = len(form.args) - 1
    for _ in range(trials):
        sets = form.random_sets(rng)
        for sign in (1, -1):
            trial = list(sets)
            trial[last] = form.greedy(trial, last, sign)
            best.offer(sign * form.value(trial), sign, trial)
    return best


def subset_rows(start: int, stop: int, r: int) -> np.ndarray:
    """Indicator rows of the integers start..stop-1 read as r-bit subsets."""
    m = np.arange(start, stop, dtype=np.int64)
    return ((m[:, None] >> np.arange(r, dtype=np.int64)) & 1).astype(np.float64)


def mask_to_indicator(mask: int, r: int) -> np.ndarray:
    return ((mask >> np.arange(r, dtype=np.int64)) & 1).astype(np.float64)


def bilinear_extremes(Ms: np.ndarray, workers: int = 1):
    """For each matrix M in a stack, max over row subsets S, column subsets T of +-1_S' M 1_T.

    Row subsets are enumerated, columns are completed greedily.  Returns four arrays of
    length b: best excess, its row mask, best deficit, its row mask.  The first mask in
    enumeration order wins ties, so results do not depend on ``workers``.
    """
    Ms = np.asarray(Ms, dtype=np.float64)
    b, r, c = Ms.shape
    total = 1 << r
    step = max(1, min(total, _BLOCK // max(1, b * c)))
    chunks = [(s, min(s + step, total)) for s in range(0, total, step)]

    def run(chunk):
        s, e = chunk
        S = subset_rows(s, e, r) @ Ms  # (b, k, c)
        pos = np.where(S > 0, S, 0).sum(-1)
        neg = np.where(S < 0, -S, 0).sum(-1)
        ip, ineg = pos.argmax(1), neg.argmax(1)
        ar = np.arange(b)
        return pos[ar, ip], ip + s, neg[ar, ineg], ineg + s

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(run, chunks))
    else:
        results = [run(ch) for ch in chunks]

    best_pos = np.full(b, -1.0)
    arg_pos = np.zeros(b, dtype=np.int64)
    best_neg = np.full(b, -1.0)
    arg_neg = np.zeros(b, dtype=np.int64)
    for vp, ap, vn, an in results:  # chunk order == enumeration order
        up = vp > best_pos
        best_pos[up], arg_pos[up] = vp[up], ap[up]
        un = vn > best_neg
        best_neg[un], arg_neg[un] = vn[un], an[un]
    return best_pos, arg_pos, best_neg, arg_neg


def greedy_columns(M: np.ndarray, rows: np.ndarray, sign: int) -> np.ndarray:
    return (sign * (rows @ M) > 0).astype(np.float64)
