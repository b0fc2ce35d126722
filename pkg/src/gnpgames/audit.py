"""Typicality audit for G(n,p) samples, plus binomial tail calculators.

A G(n,p) sample at sensible densities should satisfy a battery of
degree, set-density, expansion and cross-count properties (named P1-P9
here, together with three auxiliary checks).  ``audit_gnp_properties``
evaluates each one on a concrete graph and reports pass/fail with the
exact parameterization used, the checking method, and a re-checkable
witness on failure.

Methods are honest about their coverage:

* ``exhaustive``  - the full quantifier range was enumerated;
* ``sampled``     - uniformly sampled witness sets per size bucket
                    (count recorded); a pass is evidence, not proof;
* ``trivial``     - the claim holds for arithmetic reasons at this n;
* ``vacuous``     - the property's range is empty at this (n, p), which
                    is flagged rather than silently passed.

Set quantities are computed on packed-bit adjacency rows, so sampled
checks run at vector speed even with 10^4 samples per bucket.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graphs import Graph
from .rng import substream

__all__ = [
    "chernoff_lower_bound",
    "chernoff_upper_bound",
    "trivial_tail_bound",
    "AuditKnobs",
    "PropertyRecord",
    "AuditReport",
    "audit_gnp_properties",
    "report_to_text",
    "report_from_text",
]


# --- binomial tail calculators -----------------------------------------


def chernoff_lower_bound(n: int, p: float, a: float) -> float:
    """Bound on Pr(Bin(n,p) < (1-a)np): exp(-a^2 np / 2), clamped to [0,1]."""
    if a <= 0:
        raise ValueError("a must be > 0")
    return min(1.0, math.exp(-a * a * n * p / 2.0))


def chernoff_upper_bound(n: int, p: float, a: float) -> float:
    """Bound on Pr(Bin(n,p) > (1+a)np): exp(-a^2 np / 3); needs 0 < a < 1."""
    if not (0 < a < 1):
        raise ValueError("a must be in (0, 1)")
    return min(1.0, math.exp(-a * a * n * p / 3.0))


def trivial_tail_bound(n: int, p: float, k: int) -> float:
    """Bound on Pr(Bin(n,p) >= k): (e n p / k)^k, clamped to [0,1]."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if p == 0:
        return 0.0
    return min(1.0, (math.e * n * p / k) ** k)


# --- audit configuration and report ------------------------------------


@dataclass(frozen=True)
class AuditKnobs:
    """Parameterization of the audit.

    The properties are asymptotic statements; every constant that the
    finite-n check needs is an explicit knob recorded in the report.
    """

    samples_per_bucket: int = 10_000
    buckets_per_property: int = 4
    seed: int = 0
    p1_alpha: float = 0.5
    p1_heavy_fraction: float = 0.15
    p1_two_sided_alpha: float = 0.5
    p1_two_sided_min_f: float = 20.0
    p4_alpha: float = 0.5
    p4_eps: float = 0.1
    p6_eps: float = 0.05
    p7_eps: float = 1.0
    p8_alpha: float = 0.5
    p9_eps: float = 1.0
    p9_margin: float = 0.1
    harmonic_orderings: int = 200
    harmonic_ratio_max: float = 0.5
    claim2_c: float = 4.0


@dataclass
class PropertyRecord:
    name: str
    method: str
    passed: bool
    params: dict = field(default_factory=dict)
    witness: Optional[list] = None
    stats: dict = field(default_factory=dict)


@dataclass
class AuditReport:
    n: int
    p: float
    records: list[PropertyRecord]

    def record(self, name: str) -> PropertyRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def passed(self, name: str) -> bool:
        return self.record(name).passed

    def all_passed(self) -> bool:
        return all(r.passed for r in self.records)


def report_to_text(rep: AuditReport) -> str:
    """One property per line: name, method, PASS/FAIL, witness."""
    lines = [f"# audit n={rep.n} p={rep.p!r}"]
    for r in rep.records:
        wit = json.dumps(r.witness) if r.witness is not None else "-"
        lines.append(f"{r.name}\t{r.method}\t{'PASS' if r.passed else 'FAIL'}\t{wit}")
    return "\n".join(lines) + "\n"


def report_from_text(text: str) -> AuditReport:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# audit"):
        raise ValueError("missing audit header")
    head = dict(tok.split("=", 1) for tok in lines[0].split()[2:])
    records = []
    for ln in lines[1:]:
        name, method, verdict, wit = ln.split("\t")
        records.append(PropertyRecord(
            name=name, method=method, passed=(verdict == "PASS"),
            witness=None if wit == "-" else json.loads(wit)))
    return AuditReport(n=int(head["n"]), p=float(head["p"]), records=records)


# --- packed-bit helpers -------------------------------------------------


class _Bits:
    """Adjacency rows packed to little-endian uint64 words."""

    def __init__(self, g: Graph):
        n = g.n
        memb = np.zeros((n, n), dtype=bool)
        for (u, v) in g.edge_list:
            memb[u, v] = True
            memb[v, u] = True
        self.n = n
        self.rows = _pack_bool(memb)
        self.words = self.rows.shape[1]
        self.degrees = np.asarray(g.degrees(), dtype=np.int64)

    def sample_sets(self, rng: np.random.Generator, size: int,
                    count: int) -> np.ndarray:
        """(count, size) matrix of distinct vertex ids per row."""
        out = np.empty((count, size), dtype=np.int64)
        chunk = max(1, min(count, 4_000_000 // max(1, self.n)))
        done = 0
        while done < count:
            c = min(chunk, count - done)
            keys = rng.random((c, self.n))
            out[done:done + c] = np.argpartition(keys, size - 1, axis=1)[:, :size]
            done += c
        return out

    def masks_of(self, idx: np.ndarray) -> np.ndarray:
        """(count, words) set masks for the given index rows."""
        count = idx.shape[0]
        memb = np.zeros((count, self.n), dtype=bool)
        memb[np.arange(count)[:, None], idx] = True
        return _pack_bool(memb)

    def edges_within(self, idx: np.ndarray, masks: np.ndarray) -> np.ndarray:
        gathered = self.rows[idx]  # (count, size, words)
        inter = gathered & masks[:, None, :]
        return np.bitwise_count(inter).sum(axis=(1, 2)) // 2

    def neighborhood_size(self, idx: np.ndarray, masks: np.ndarray) -> np.ndarray:
        union = np.bitwise_or.reduce(self.rows[idx], axis=1)
        return np.bitwise_count(union & ~masks).sum(axis=1)

    def edges_between(self, idx_a: np.ndarray, masks_b: np.ndarray) -> np.ndarray:
        inter = self.rows[idx_a] & masks_b[:, None, :]
        return np.bitwise_count(inter).sum(axis=(1, 2))

    def degrees_into(self, masks: np.ndarray) -> np.ndarray:
        """(count, n) matrix of d(v, U) for each sampled mask row U."""
        count = masks.shape[0]
        out = np.empty((count, self.n), dtype=np.int64)
        chunk = max(1, 2_000_000 // max(1, self.n * self.words))
        for lo in range(0, count, chunk):
            hi = min(count, lo + chunk)
            inter = self.rows[None, :, :] & masks[lo:hi, None, :]
            out[lo:hi] = np.bitwise_count(inter).sum(axis=2)
        return out


def _pack_bool(memb: np.ndarray) -> np.ndarray:
    packed = np.packbits(memb, axis=1, bitorder="little")
    words = (memb.shape[1] + 63) // 64
    if packed.shape[1] % 8:
        pad = 8 * words - packed.shape[1]
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return packed.view(np.uint64)


def _bucket_sizes(lo: int, hi: int, count: int) -> list[int]:
    lo = max(1, lo)
    if hi < lo:
        return []
    if hi == lo:
        return [lo]
    sizes = {lo, hi}
    for i in range(1, count - 1):
        sizes.add(int(round(lo * (hi / lo) ** (i / (count - 1)))))
    return sorted(sizes)


# --- the audit ----------------------------------------------------------


def audit_gnp_properties(g: Graph, p: float,
                         knobs: AuditKnobs | None = None) -> AuditReport:
    """Evaluate the typicality battery on one graph sampled at density p."""
    knobs = knobs or AuditKnobs()
    n = g.n
    if n < 3:
        raise ValueError("audit needs n >= 3 so that ln n and ln ln n behave")
    bits = _Bits(g)
    ln_n = math.log(n)
    lnln_n = math.log(ln_n)
    np_ = n * p
    f = np_ / ln_n if ln_n > 0 else math.inf
    records: list[PropertyRecord] = []

    def sampled_check(tag: int, lo: int, hi: int, fail_fn) -> tuple[bool, Optional[list], str, dict]:
        """Run fail_fn(size, idx, masks) -> witness row index array over
        sampled buckets; returns (passed, witness, method, stats)."""
        sizes = _bucket_sizes(lo, min(hi, n), knobs.buckets_per_property)
        if not sizes:
            return True, None, "vacuous", {"range": [lo, hi]}
        rng = substream(knobs.seed, 0xA11D, tag)
        per = knobs.samples_per_bucket
        for size in sizes:
            idx = bits.sample_sets(rng, size, per)
            masks = bits.masks_of(idx)
            bad = fail_fn(size, idx, masks)
            if bad is not None and len(bad):
                wit = sorted(int(v) for v in idx[bad[0]])
                return (False, wit,
                        f"sampled:{per}x{len(sizes)}", {"buckets": sizes})
        return True, None, f"sampled:{per}x{len(sizes)}", {"buckets": sizes}

    # P1: degree ceiling, heavy-degree count, two-sided concentration
    degs = bits.degrees
    cap = 4 * np_
    ok_cap = bool((degs <= cap).all())
    heavy = int((degs >= (1 + knobs.p1_alpha) * np_).sum())
    ok_heavy = heavy <= knobs.p1_heavy_fraction * n
    two_sided_applies = f >= knobs.p1_two_sided_min_f
    ok_two = True
    if two_sided_applies:
        a = knobs.p1_two_sided_alpha
        ok_two = bool(((degs >= (1 - a) * np_) & (degs <= (1 + a) * np_)).all())
    witness = None if ok_cap else [int(np.argmax(degs))]
    records.append(PropertyRecord(
        "P1", "exhaustive", ok_cap and ok_heavy and ok_two,
        params={"alpha": knobs.p1_alpha,
                "heavy_fraction": knobs.p1_heavy_fraction,
                "two_sided": two_sided_applies},
        witness=witness,
        stats={"max_degree": int(degs.max(initial=0)), "cap": cap,
               "heavy_count": heavy}))

    # P2: e(U) <= max(3|U| ln n, 3|U|^2 p); exhaustive over singletons,
    # pairs, whole-vertex neighborhoods and V itself, sampled elsewhere
    def p2_bound(size: int) -> float:
        return max(3 * size * ln_n, 3 * size * size * p)

    exh_ok = True
    exh_wit = None
    m_all = g.num_edges
    if m_all > p2_bound(n):
        exh_ok, exh_wit = False, list(range(n))
    if exh_ok:
        for v in range(n):
            nb = g.neighbors(v)
            if not nb:
                continue
            idx = np.asarray(nb)[None, :]
            e_nb = int(bits.edges_within(idx, bits.masks_of(idx))[0])
            if e_nb > p2_bound(len(nb)):
                exh_ok, exh_wit = False, sorted(nb)
                break

    def p2_fail(size, idx, masks):
        e = bits.edges_within(idx, masks)
        return np.flatnonzero(e > p2_bound(size))

    ok_s, wit_s, method_s, stats_s = sampled_check(2, 3, n, p2_fail)
    records.append(PropertyRecord(
        "P2", f"exhaustive(singles,pairs,neighborhoods,V)+{method_s}",
        exh_ok and ok_s, params={}, witness=exh_wit or wit_s, stats=stats_s))

    # P3: e(U) <= 100 |U| f lnln n for |U| <= n lnln n / ln n
    if lnln_n <= 0:
        records.append(PropertyRecord("P3", "vacuous", True,
                                      params={"reason": "lnln n <= 0"}))
    else:
        hi3 = int(n * lnln_n / ln_n)

        def p3_fail(size, idx, masks):
            e = bits.edges_within(idx, masks)
            return np.flatnonzero(e > 100 * size * f * lnln_n)

        ok3, wit3, m3, s3 = sampled_check(3, 1, hi3, p3_fail)
        records.append(PropertyRecord("P3", m3, ok3,
                                      params={"hi": hi3}, witness=wit3, stats=s3))

    # P4: |N(U)| >= beta |U| n p for |U| <= alpha/p
    alpha4, eps4 = knobs.p4_alpha, knobs.p4_eps
    beta_root = (2 + eps4) * (alpha4 + 1) / f if f > 0 else math.inf
    beta = (1 - math.sqrt(beta_root)) / (alpha4 + 1) if beta_root < 1 else 0.0
    if beta <= 0 or p <= 0:
        records.append(PropertyRecord(
            "P4", "vacuous", True,
            params={"alpha": alpha4, "eps": eps4, "beta": beta,
                    "reason": "beta <= 0 at this f(n)"}))
    else:
        hi4 = int(alpha4 / p)

        def p4_fail(size, idx, masks):
            nb = bits.neighborhood_size(idx, masks)
            return np.flatnonzero(nb < beta * size * np_)

        ok4, wit4, m4, s4 = sampled_check(4, 1, hi4, p4_fail)
        records.append(PropertyRecord(
            "P4", m4, ok4, params={"alpha": alpha4, "eps": eps4, "beta": beta},
            witness=wit4, stats=s4))

    # P5: |N(U)| >= n/4 for 1/p <= |U| <= n / ln n
    if p <= 0:
        records.append(PropertyRecord("P5", "vacuous", True,
                                      params={"reason": "p=0"}))
    else:
        lo5, hi5 = math.ceil(1 / p), int(n / ln_n)

        def p5_fail(size, idx, masks):
            nb = bits.neighborhood_size(idx, masks)
            return np.flatnonzero(nb < n / 4)

        ok5, wit5, m5, s5 = sampled_check(5, lo5, hi5, p5_fail)
        records.append(PropertyRecord("P5", m5, ok5,
                                      params={"lo": lo5, "hi": hi5},
                                      witness=wit5, stats=s5))

    # P6: e(U, U^c) >= (1-alpha)|U|(n-|U|)p with alpha = sqrt(4/f) + eps
    alpha6 = (math.sqrt(4 / f) if f > 0 else math.inf) + knobs.p6_eps
    if alpha6 >= 1:
        records.append(PropertyRecord(
            "P6", "vacuous", True,
            params={"alpha": alpha6,
                    "reason": "alpha >= 1 at this f(n), flagged not guessed"}))
    else:
        cut_ok = True
        cut_wit = None
        cross_single = bits.degrees  # e({v}, complement) = d(v)
        bound1 = (1 - alpha6) * (n - 1) * p
        if (cross_single < bound1).any():
            cut_ok = False
            cut_wit = [int(np.argmin(cross_single))]

        def p6_fail(size, idx, masks):
            e_in = bits.edges_within(idx, masks)
            deg_sum = bits.degrees[idx].sum(axis=1)
            cross = deg_sum - 2 * e_in
            return np.flatnonzero(cross < (1 - alpha6) * size * (n - size) * p)

        ok6, wit6, m6, s6 = sampled_check(6, 2, n // 2, p6_fail)
        records.append(PropertyRecord(
            "P6", f"exhaustive(|U|=1)+{m6}", cut_ok and ok6,
            params={"alpha": alpha6}, witness=cut_wit or wit6, stats=s6))

    # P7: e(A,B) >= (1-alpha) m^2 p for disjoint |A| = |B| = m
    eps7 = knobs.p7_eps
    m7 = int(eps7 * n * lnln_n / ln_n) if lnln_n > 0 else 0
    alpha7 = (math.sqrt(4.4 / (eps7 * f)) if eps7 * f > 0 else math.inf)
    if m7 < 1 or 2 * m7 > n or alpha7 >= 1:
        records.append(PropertyRecord(
            "P7", "vacuous", True,
            params={"eps": eps7, "m": m7, "alpha": alpha7}))
    else:
        rng7 = substream(knobs.seed, 0xA11D, 7)
        per = knobs.samples_per_bucket
        pairs_idx = bits.sample_sets(rng7, 2 * m7, per)
        idx_a, idx_b = pairs_idx[:, :m7], pairs_idx[:, m7:]
        cross = bits.edges_between(idx_a, bits.masks_of(idx_b))
        bad = np.flatnonzero(cross < (1 - alpha7) * m7 * m7 * p)
        records.append(PropertyRecord(
            "P7", f"sampled:{per}x1", len(bad) == 0,
            params={"eps": eps7, "m": m7, "alpha": alpha7},
            witness=(sorted(int(v) for v in pairs_idx[bad[0]]) if len(bad) else None)))

    # P8: e(A,B) >= (1-alpha)|A||B|p at |A| = 10000 n / lnln n, |B| = n/10
    size_a = int(10000 * n / lnln_n) if lnln_n > 0 else n + 1
    size_b = n // 10
    if size_a + size_b > n or size_a < 1 or size_b < 1:
        records.append(PropertyRecord(
            "P8", "vacuous", True,
            params={"size_a": size_a, "size_b": size_b,
                    "reason": "ranges exceed n"}))
    else:
        rng8 = substream(knobs.seed, 0xA11D, 8)
        per = knobs.samples_per_bucket
        pairs_idx = bits.sample_sets(rng8, size_a + size_b, per)
        idx_a, idx_b = pairs_idx[:, :size_a], pairs_idx[:, size_a:]
        cross = bits.edges_between(idx_a, bits.masks_of(idx_b))
        bad = np.flatnonzero(cross < (1 - knobs.p8_alpha) * size_a * size_b * p)
        records.append(PropertyRecord(
            "P8", f"sampled:{per}x1", len(bad) == 0,
            params={"alpha": knobs.p8_alpha, "size_a": size_a, "size_b": size_b},
            witness=(sorted(int(v) for v in pairs_idx[bad[0]]) if len(bad) else None)))

    # P9: most vertices have few edges into any small U
    hi9 = int(n / (ln_n * ln_n))
    t9 = knobs.p9_eps * np_ / ln_n
    if hi9 < 1:
        records.append(PropertyRecord("P9", "vacuous", True,
                                      params={"hi": hi9}))
    else:
        need = (1 - knobs.p9_margin) * n

        def p9_fail(size, idx, masks):
            dint = bits.degrees_into(masks)
            low = (dint <= t9)
            # exclude U itself from the count
            low[np.arange(len(idx))[:, None], idx] = False
            counts = low.sum(axis=1)
            return np.flatnonzero(counts < need)

        ok9, wit9, m9, s9 = sampled_check(9, 1, hi9, p9_fail)
        records.append(PropertyRecord(
            "P9", f"{m9}, inner count exact per vertex", ok9,
            params={"eps": knobs.p9_eps, "threshold": t9,
                    "margin": knobs.p9_margin, "hi": hi9},
            witness=wit9, stats=s9))

    # AtLeast80: e(U, W) >= |U| n p / 50 for the worst half-neighborhood W
    lo_a, hi_a = (math.ceil(80 / p) if p > 0 else n + 1), int(n / ln_n)
    if lo_a > hi_a:
        records.append(PropertyRecord(
            "AtLeast80", "vacuous", True,
            params={"lo": lo_a, "hi": hi_a,
                    "reason": "needs p >= 80 ln n / n"}))
    else:
        def at80_fail(size, idx, masks):
            dint = bits.degrees_into(masks)  # d(v, U) for all v
            inU = np.zeros_like(dint, dtype=bool)
            inU[np.arange(len(idx))[:, None], idx] = True
            in_nbhd = (dint > 0) & ~inU
            bad_rows = []
            for r in range(len(idx)):
                nb = np.flatnonzero(in_nbhd[r])
                if len(nb) == 0:
                    bad_rows.append(r)
                    continue
                half = len(nb) // 2
                if half == 0:
                    continue
                worst = np.sort(dint[r, nb])[:half].sum()
                if worst < size * np_ / 50:
                    bad_rows.append(r)
            return np.asarray(bad_rows, dtype=np.int64)

        ok_a, wit_a, m_a, s_a = sampled_check(10, lo_a, hi_a, at80_fail)
        records.append(PropertyRecord(
            "AtLeast80", f"{m_a}, worst half-neighborhood exact", ok_a,
            params={"lo": lo_a, "hi": hi_a}, witness=wit_a, stats=s_a))

    # HarmonicDeg: prefix-degree harmonic sums stay small against np
    n_h = int(n / ln_n ** 3)
    if n_h < 1:
        records.append(PropertyRecord(
            "HarmonicDeg", "vacuous", True, params={"N": n_h}))
    else:
        rng_h = substream(knobs.seed, 0xA11D, 11)
        worst = 0.0
        count = knobs.harmonic_orderings
        adjsets = [set(g.neighbors(v)) for v in range(n)]
        for _ in range(count):
            order = [int(v) for v in rng_h.permutation(n)[:n_h]]
            total = 0.0
            prefix: set[int] = set()
            for j, v in enumerate(order, start=1):
                prefix.add(v)
                total += len(adjsets[v] & prefix) / j
            worst = max(worst, total / np_ if np_ > 0 else 0.0)
        passed_h = worst <= knobs.harmonic_ratio_max
        records.append(PropertyRecord(
            "HarmonicDeg", f"sampled:{count} orderings", passed_h,
            params={"N": n_h, "ratio_max": knobs.harmonic_ratio_max},
            stats={"max_ratio": worst}))

    # Claim "e(X) <= c|X|" for |X| <= n / ln^3 n, meaningful when np = O(ln^2 n)
    n_c = int(n / ln_n ** 3)
    c2 = knobs.claim2_c
    if n_c < 1:
        records.append(PropertyRecord(
            "SparseSetDensity", "vacuous", True, params={"hi": n_c, "c": c2}))
    elif n_c * (n_c - 1) // 2 <= c2 * n_c:
        records.append(PropertyRecord(
            "SparseSetDensity", "trivial", True,
            params={"hi": n_c, "c": c2,
                    "reason": "C(|X|,2) <= c|X| for all sizes in range"}))
    else:
        def claim2_fail(size, idx, masks):
            e = bits.edges_within(idx, masks)
            return np.flatnonzero(e > c2 * size)

        okc, witc, mc, sc = sampled_check(12, 1, n_c, claim2_fail)
        records.append(PropertyRecord(
            "SparseSetDensity", mc, okc, params={"hi": n_c, "c": c2},
            witness=witc, stats=sc))

    return AuditReport(n=n, p=p, records=records)
