"""Desk-scale experiment recipes.

Each recipe returns an ``Experiment`` holding one row per run (written as CSV by the
CLI) and a summary with a pass/fail flag per check.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, perm

import numpy as np

from . import counting, generators, reduced, regularity
from .core import Hypergraph3
from .quasirandomness import Notion, deviation_ascent, deviation_exact, deviation_sample


@dataclass
class Experiment:
    name: str
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("passed"))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=self.columns, extrasaction="ignore")
            w.writeheader()
            w.writerows(self.rows)


def _finish(exp: Experiment, checks: dict, t0: float, limit: float | None = None, **metrics) -> Experiment:
    runtime = time.perf_counter() - t0
    if limit is not None:
        checks = dict(checks, runtime=runtime < limit)
    exp.summary = {"experiment": exp.name, "passed": all(checks.values()),
                   "checks": {k: bool(v) for k, v in checks.items()},
                   "runtime_s": round(runtime, 3), **metrics}
    return exp


def k4_freeness(n=30, seeds=100, seed0=0, **_):
    """Bichromatic hypergraphs of random colourings never contain a tetrahedron."""
    t0 = time.perf_counter()
    exp = Experiment("k4-freeness", ["seed", "n", "edges", "contains_k4"])
    for s in range(seed0, seed0 + seeds):
        H = generators.bichromatic_hypergraph(generators.random_colouring(n, s))
        exp.rows.append({"seed": s, "n": n, "edges": H.num_edges, "contains_k4": counting.contains_K4(H) is not None})
    return _finish(exp, {"no_k4": not any(r["contains_k4"] for r in exp.rows)}, t0, 30.0)


def bichromatic_density(n=60, seeds=50, seed0=0, band=0.06, mean_band=0.02, **_):
    t0 = time.perf_counter()
    exp = Experiment("bichromatic-density", ["seed", "n", "edges", "density"])
    for s in range(seed0, seed0 + seeds):
        H = generators.bichromatic_hypergraph(generators.random_colouring(n, s))
        exp.rows.append({"seed": s, "n": n, "edges": H.num_edges, "density": float(H.density())})
    dens = np.array([r["density"] for r in exp.rows])
    return _finish(exp, {"each_in_band": bool(np.all(np.abs(dens - 0.5) <= band)),
                         "mean_in_band": abs(dens.mean() - 0.5) <= mean_band},
                   t0, 10.0, mean_density=float(dens.mean()), min_density=float(dens.min()),
                   max_density=float(dens.max()))


# measured on seeds 0..9: mean eta_hat 0.212 at n=8, 0.117 at n=16 (other seed blocks: 0.108-0.117)
EV_TREND_CEILING = 0.12


def ev_trend(sizes=(8, 16), seeds=10, seed0=0, workers=1, ceiling=EV_TREND_CEILING, **_):
    """Exact EV deviation (d=1/2) of bichromatic hypergraphs shrinks relative to n^3 as n grows."""
    t0 = time.perf_counter()
    exp = Experiment("ev-trend", ["seed", "n", "value", "eta_hat", "sign"])
    for n in sizes:
        for s in range(seed0, seed0 + seeds):
            H = generators.bichromatic_hypergraph(generators.random_colouring(n, s))
            rep = deviation_exact(H, Fraction(1, 2), "ev", workers=workers)
            exp.rows.append({"seed": s, "n": n, "value": float(rep.value), "eta_hat": float(rep.eta_hat),
                             "sign": rep.sign})
    means = {n: float(np.mean([r["eta_hat"] for r in exp.rows if r["n"] == n])) for n in sizes}
    small, large = sizes[0], sizes[-1]
    return _finish(exp, {"decreasing": means[large] < means[small], "below_ceiling": means[large] < ceiling},
                   t0, 300.0, mean_eta_hat={str(k): v for k, v in means.items()})


ORACLE_NOTIONS = ("v", "e", "vv", "vvv", "ev", "ee")


def _random_instance(rng: np.random.Generator):
    n = int(rng.integers(4, 9))
    p = float(rng.uniform(0.2, 0.8))
    d = Fraction(round(float(rng.uniform(0.0, 1.0)), 2)).limit_denominator(100)
    seed = int(rng.integers(2 ** 31))
    return n, p, d, seed


def oracle_dominance(instances=200, seed0=0, restarts=20, trials=200, workers=1, **_):
    """Heuristic deviations never exceed the exact one; ascent usually attains it."""
    t0 = time.perf_counter()
    exp = Experiment("oracle-dominance",
                     ["instance", "n", "p", "d", "notion", "exact", "ascent", "sample", "ascent_matches"])
    rng = np.random.default_rng(seed0)
    for k in range(instances):
        n, p, d, seed = _random_instance(rng)
        H = generators.random_hypergraph(n, p, seed)
        for notion in ORACLE_NOTIONS:
            ex = deviation_exact(H, d, notion, workers=workers).value
            asc = deviation_ascent(H, d, notion, restarts=restarts, seed=seed).value
            smp = deviation_sample(H, d, notion, trials=trials, seed=seed).value
            exp.rows.append({"instance": k, "n": n, "p": round(p, 4), "d": str(d), "notion": notion,
                             "exact": float(ex), "ascent": float(asc), "sample": float(smp),
                             "ascent_matches": asc == ex})
    total = len(exp.rows)
    match_rate = sum(r["ascent_matches"] for r in exp.rows) / total
    dominated = all(r["ascent"] <= r["exact"] and r["sample"] <= r["exact"] for r in exp.rows)
    checks = {"dominance": dominated, "ascent_match_hard": match_rate >= 0.80}
    exp = _finish(exp, checks, t0, 300.0, ascent_match_rate=match_rate,
                  ascent_match_soft_target_met=match_rate >= 0.95)
    return exp


CHAIN = (("v", "vv"), ("vv", "vvv"), ("vvv", "ev"), ("vv", "e"), ("e", "ev"))
CHAIN_N3 = (("ev", "eee"), ("ee", "eee"))


def hierarchy(n=7, seeds=100, seed0=0, workers=1, **_):
    """Exact deviations respect the provable chain; EV versus EE is only recorded."""
    t0 = time.perf_counter()
    exp = Experiment("hierarchy", ["case", "n", "d", *Notion.__members__.keys(), "violations", "ev_le_ee"])
    rng = np.random.default_rng(seed0)
    violations = 0
    ev_le_ee = 0
    for s in range(seeds):
        H = generators.random_hypergraph(n, float(rng.uniform(0.1, 0.9)), int(rng.integers(2 ** 31)))
        d = Fraction(H.num_edges, comb(n, 3))
        dev = {x: deviation_exact(H, d, x, workers=workers).value for x in ("v", "vv", "vvv", "e", "ev", "ee")}
        bad = [f"{a}<={b}" for a, b in CHAIN if dev[a] > dev[b]]
        violations += len(bad)
        ev_le_ee += dev["ev"] <= dev["ee"]
        exp.rows.append({"case": s, "n": n, "d": str(d), **{k.upper(): float(v) for k, v in dev.items()},
                         "violations": ";".join(bad), "ev_le_ee": dev["ev"] <= dev["ee"]})
    # n=3: every hypergraph against a grid of densities
    grid = [Fraction(k, 12) for k in range(13)]
    for edges, d in product(((), ((0, 1, 2),)), grid):
        H = Hypergraph3(3, edges)
        dev = {x: deviation_exact(H, d, x).value for x in ("ev", "ee", "eee")}
        bad = [f"{a}<={b}" for a, b in CHAIN_N3 if dev[a] > dev[b]]
        violations += len(bad)
        exp.rows.append({"case": f"n3-{len(edges)}", "n": 3, "d": str(d),
                         **{k.upper(): float(v) for k, v in dev.items()}, "violations": ";".join(bad),
                         "ev_le_ee": dev["ev"] <= dev["ee"]})
    return _finish(exp, {"no_violations": violations == 0}, t0, 300.0,
                   violations=violations, ev_le_ee_fraction=ev_le_ee / seeds)


def tournament(n=60, seeds=20, seed0=0, band=0.03, **_):
    t0 = time.perf_counter()
    exp = Experiment("tournament", ["kind", "seed", "n", "cyclic_triangles", "k4minus", "density"])
    worst = 0
    for bits in product((0, 1), repeat=6):
        T = generators.Tournament.from_pairs(4, bits)
        H = generators.cyclic_triangle_hypergraph(T)
        k4m = counting.count_labeled(counting.K4MINUS, H)
        worst = max(worst, H.num_edges)
        exp.rows.append({"kind": "exhaustive", "seed": "".join(map(str, bits)), "n": 4,
                         "cyclic_triangles": H.num_edges, "k4minus": k4m, "density": float(H.density())})
    for s in range(seed0, seed0 + seeds):
        H = generators.cyclic_triangle_hypergraph(generators.random_tournament(n, s))
        exp.rows.append({"kind": "random", "seed": s, "n": n, "cyclic_triangles": H.num_edges,
                         "k4minus": "", "density": float(H.density())})
    rand = [r["density"] for r in exp.rows if r["kind"] == "random"]
    checks = {"at_most_two_cyclic": worst <= 2,
              "k4minus_free": all(r["k4minus"] == 0 for r in exp.rows if r["kind"] == "exhaustive"),
              "density_band": all(abs(x - 0.25) <= band for x in rand)}
    return _finish(exp, checks, t0, 10.0, max_cyclic_on_4=worst, mean_density=float(np.mean(rand)))


def turan(sizes=(9, 12, 15), n_density=30, band=0.05, **_):
    t0 = time.perf_counter()
    exp = Experiment("turan", ["n", "edges", "density", "contains_k4"])
    for n in (*sizes, n_density):
        H = generators.turan_construction(n)
        exp.rows.append({"n": n, "edges": H.num_edges, "density": float(H.density()),
                         "contains_k4": counting.contains_K4(H) is not None})
    dens = next(r["density"] for r in exp.rows if r["n"] == n_density)
    checks = {"k4_free": not any(r["contains_k4"] for r in exp.rows if r["n"] in sizes),
              "density": abs(dens - 5 / 9) <= band}
    return _finish(exp, checks, t0, 10.0, density=dens)


def copy_count(n=40, p=0.3, seeds=20, seed0=0, tolerance=0.15, pattern="k4", **_):
    """Labeled copies of a pattern in G(n, p) against p^e * n(n-1)...(n-v+1)."""
    t0 = time.perf_counter()
    F = counting.parse_pattern(pattern)
    exp = Experiment("copy-count", ["seed", "n", "p", "labeled", "normalised", "expected"])
    target = p ** F.num_edges
    for s in range(seed0, seed0 + seeds):
        H = generators.random_hypergraph(n, p, s)
        c = counting.count_labeled(F, H)
        exp.rows.append({"seed": s, "n": n, "p": p, "labeled": c, "normalised": c / perm(n, F.v),
                         "expected": target})
    mean = float(np.mean([r["normalised"] for r in exp.rows]))
    rel = abs(mean - target) / target
    return _finish(exp, {"relative_error": rel <= tolerance}, t0, 120.0, mean_normalised=mean,
                   expected=target, relative_error=rel)


def crafted_step3_instance(size=3) -> reduced.ReducedHypergraph:
    """m=4, pieces (0,1,2) and (0,1,3) empty, the other two complete.

    Both indices 2 and 3 then carry the full hole signature, so Step 1 matches them;
    piece (0,1,3) being empty leaves no common neighbour in P_01, so Step 3 finds no edge.
    """
    A = reduced.ReducedHypergraph.complete(4, size)
    empty = np.zeros((size, size, size), bool)
    return A.with_pieces({(0, 1, 2): empty, (0, 1, 3): empty})


def lemma_solver_run(m=6, size=8, density=0.75, eps=0.1, seeds=50, seed0=0, **_):
    """Solver soundness on random reduced instances, cross-checked by brute force."""
    import warnings

    t0 = time.perf_counter()
    exp = Experiment("lemma-solver", ["seed", "degree_hypothesis", "solver", "step", "brute_force",
                                      "valid", "consistent"])
    eps = Fraction(eps).limit_denominator(10 ** 6)
    for s in range(seed0, seed0 + seeds):
        A = reduced.ReducedHypergraph.random(m, size, density, s)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            out = reduced.lemma_solver(A, eps)
        brute = reduced.find_pattern_bruteforce(A)
        found = isinstance(out, reduced.K4Pattern)
        valid = reduced.validate_pattern(A, out) if found else True
        exp.rows.append({"seed": s, "degree_hypothesis": reduced.degree_hypothesis(A, eps, eps / 4).ok,
                         "solver": "pattern" if found else "failure", "step": "" if found else out.step,
                         "brute_force": brute is not None, "valid": valid,
                         "consistent": (brute is not None) or not found})
    complete = reduced.lemma_solver(reduced.ReducedHypergraph.complete(4, 3), eps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        crafted = reduced.lemma_solver(crafted_step3_instance(), eps)
    checks = {"patterns_valid": all(r["valid"] for r in exp.rows),
              "agrees_with_brute_force": all(r["consistent"] for r in exp.rows),
              "complete_instance": isinstance(complete, reduced.K4Pattern)
              and reduced.validate_pattern(reduced.ReducedHypergraph.complete(4, 3), complete),
              "crafted_step3": isinstance(crafted, reduced.StepFailure) and crafted.step == 3}
    outcomes = {}
    for r in exp.rows:
        key = r["solver"] if r["solver"] == "pattern" else f"step{r['step']}"
        outcomes[key] = outcomes.get(key, 0) + 1
    return _finish(exp, checks, t0, 300.0, outcomes=outcomes,
                   brute_force_positive=sum(r["brute_force"] for r in exp.rows))


def _triangles_by_enumeration(P: regularity.Triad) -> int:
    return sum(1 for a, b, c in product(range(len(P.X)), range(len(P.Y)), range(len(P.Z)))
               if P.xy[a, b] and P.xz[a, c] and P.yz[b, c])


def crafted_triad_instance():
    """Classes of size 2 and a hypergraph putting edges on half the triangles of the complete triad."""
    P = regularity.Triad.complete((0, 1), (2, 3), (4, 5))
    H = Hypergraph3(6, [(0, 2, 4), (0, 3, 5), (1, 2, 5), (1, 3, 4), (0, 2, 5)])
    return H, P


def triad_bruteforce(H: Hypergraph3, P: regularity.Triad, d3) -> Fraction:
    """max over all 2^|E(P)| edge subsets of |sub-triad deviation|."""
    cells = [("xy", idx) for idx in np.argwhere(P.xy).tolist()] + \
            [("xz", idx) for idx in np.argwhere(P.xz).tolist()] + \
            [("yz", idx) for idx in np.argwhere(P.yz).tolist()]
    best = Fraction(0)
    for mask in range(1 << len(cells)):
        mats = {"xy": np.zeros_like(P.xy), "xz": np.zeros_like(P.xz), "yz": np.zeros_like(P.yz)}
        for bit, (name, (a, b)) in enumerate(cells):
            if mask >> bit & 1:
                mats[name][a, b] = True
        Q = P.sub(mats["xy"], mats["xz"], mats["yz"])
        best = max(best, abs(regularity.sub_triad_deviation(H, Q, d3)))
    return best


def regularity_toolchain(t_max=12, triads=100, seed0=0, workers=1, **_):
    t0 = time.perf_counter()
    exp = Experiment("regularity", ["kind", "t", "seed", "triangles", "enumerated", "delta2", "tcl"])
    rng = np.random.default_rng(seed0)
    count_ok = True
    for t in range(1, t_max + 1):
        P = regularity.random_triad(t, float(rng.uniform(0.2, 0.9)), int(rng.integers(2 ** 31)))
        fast, slow = regularity.triangles(P), _triangles_by_enumeration(P)
        count_ok &= fast == slow
        exp.rows.append({"kind": "count", "t": t, "triangles": fast, "enumerated": slow})
    tcl_ok = True
    d2 = Fraction(1, 2)
    for s in range(seed0, seed0 + triads):
        t = int(rng.integers(2, 9))
        P = regularity.random_triad(t, float(rng.uniform(0.2, 0.8)), s)
        delta2 = max(regularity.measured_delta2(G, d2, workers=workers) for G in (P.xy, P.xz, P.yz))
        ok = regularity.tcl_check(P, d2, delta2)
        tcl_ok &= ok
        exp.rows.append({"kind": "tcl", "t": t, "seed": s, "triangles": regularity.triangles(P),
                         "delta2": float(delta2), "tcl": ok})
    H, P = crafted_triad_instance()
    d3 = Fraction(1, 2)
    exact = regularity.triad_regularity(H, P, d3, "exact").value
    brute = triad_bruteforce(H, P, d3)
    exp.rows.append({"kind": "triad", "t": 2, "triangles": float(exact), "enumerated": float(brute)})
    return _finish(exp, {"triangle_counts": count_ok, "tcl": tcl_ok, "triad_exact": exact == brute},
                   t0, 120.0, triad_exact=str(exact), triad_bruteforce=str(brute))


RECIPES = {
    "k4-freeness": k4_freeness,
    "bichromatic-density": bichromatic_density,
    "ev-trend": ev_trend,
    "oracle-dominance": oracle_dominance,
    "hierarchy": hierarchy,
    "tournament": tournament,
    "turan": turan,
    "copy-count": copy_count,
    "lemma-solver": lemma_solver_run,
    "regularity": regularity_toolchain,
}


def run(name: str, **params) -> Experiment:
    try:
        recipe = RECIPES[name]
    except KeyError:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(RECIPES)}") from None
    return recipe(**{k: v for k, v in params.items() if v is not None})

