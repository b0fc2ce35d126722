import math

import numpy as np
import pytest

from gnpgames.audit import (
    AuditKnobs,
    audit_gnp_properties,
    chernoff_lower_bound,
    chernoff_upper_bound,
    report_from_text,
    report_to_text,
    trivial_tail_bound,
    _Bits,
)
from gnpgames.graphs import (
    GnpParams,
    complete_graph,
    edges_between,
    edges_within,
    empty_graph,
    external_neighborhood,
    sample_gnp,
)
from gnpgames.rng import substream


# exact binomial tails, used as the independent oracle


def binom_pmf(n, p, i):
    return math.comb(n, i) * (p ** i) * ((1 - p) ** (n - i))


def binom_lt(n, p, t):
    """P(X < t) for real t."""
    k = math.ceil(t) - 1 if float(t).is_integer() is False else int(t) - 1
    k = min(k, n)
    return sum(binom_pmf(n, p, i) for i in range(0, max(0, k + 1)))


def binom_gt(n, p, t):
    k = math.floor(t) + 1 if float(t).is_integer() is False else int(t) + 1
    return sum(binom_pmf(n, p, i) for i in range(max(0, k), n + 1))


def binom_ge(n, p, k):
    return sum(binom_pmf(n, p, i) for i in range(max(0, k), n + 1))


def test_chernoff_example_values():
    assert chernoff_lower_bound(100, 0.5, 0.2) == pytest.approx(math.exp(-1))
    assert chernoff_upper_bound(100, 0.5, 0.2) == pytest.approx(math.exp(-2 / 3))
    assert trivial_tail_bound(10, 0.1, 10) == pytest.approx((math.e / 10) ** 10)


def test_chernoff_domain_checks():
    with pytest.raises(ValueError):
        chernoff_lower_bound(10, 0.5, 0)
    with pytest.raises(ValueError):
        chernoff_upper_bound(10, 0.5, 1.0)
    with pytest.raises(ValueError):
        trivial_tail_bound(10, 0.5, 0)


def test_chernoff_dominates_exact_tail_spot():
    # exact tail P(Bin(20,0.3) < 0.8*6) vs lower bound at a=0.2
    exact = binom_lt(20, 0.3, 0.8 * 6)
    assert exact <= chernoff_lower_bound(20, 0.3, 0.2) + 1e-12
    # P(Bin(10,0.1) >= 10) = 1e-10 vs the trivial bound
    assert binom_ge(10, 0.1, 10) == pytest.approx(1e-10)
    assert binom_ge(10, 0.1, 10) <= trivial_tail_bound(10, 0.1, 10)


def test_chernoff_bounds_clamped():
    assert trivial_tail_bound(50, 0.9, 1) == 1.0
    assert 0.0 <= chernoff_lower_bound(2, 0.01, 0.5) <= 1.0


def test_bits_primitives_match_reference():
    rng = substream(77, 0)
    g = sample_gnp(GnpParams(n=40, p=0.3, seed=11))
    bits = _Bits(g)
    for _ in range(20):
        size = int(rng.integers(1, 12))
        idx = bits.sample_sets(rng, size, 3)
        masks = bits.masks_of(idx)
        ew = bits.edges_within(idx, masks)
        nb = bits.neighborhood_size(idx, masks)
        for r in range(3):
            U = {int(v) for v in idx[r]}
            assert ew[r] == edges_within(g, U)
            assert nb[r] == len(external_neighborhood(g, U))
    idx_a = bits.sample_sets(rng, 5, 4)
    # build disjoint B sets by sampling complements
    for r in range(4):
        U = {int(v) for v in idx_a[r]}
        W = set(range(g.n)) - U
        W = set(sorted(W)[:7])
        mb = bits.masks_of(np.asarray(sorted(W))[None, :])
        got = bits.edges_between(idx_a[r][None, :], mb)[0]
        assert got == edges_between(g, U, W)


def small_knobs(seed=0):
    return AuditKnobs(samples_per_bucket=300, buckets_per_property=3,
                      seed=seed, harmonic_orderings=20)


def test_audit_complete_graph_p1_passes():
    rep = audit_gnp_properties(complete_graph(40), 1.0, small_knobs())
    assert rep.passed("P1")


def test_audit_empty_graph_p4_fails_with_witness():
    rep = audit_gnp_properties(empty_graph(100), 0.5, small_knobs())
    rec = rep.record("P4")
    assert not rec.passed
    assert rec.witness is not None
    U = set(rec.witness)
    assert len(external_neighborhood(empty_graph(100), U)) < rec.params["beta"] * len(U) * 100 * 0.5


def test_audit_vacuous_ranges_flagged():
    # at n=100, p=0.2: AtLeast80 needs |U| >= 400 > n/ln n, so vacuous
    g = sample_gnp(GnpParams(n=100, p=0.2, seed=3))
    rep = audit_gnp_properties(g, 0.2, small_knobs())
    rec = rep.record("AtLeast80")
    assert rec.passed and rec.method == "vacuous"
    assert rep.record("P8").method == "vacuous"


def test_audit_typical_sample_passes_battery():
    n = 300
    p = 5 * math.log(n) / n
    g = sample_gnp(GnpParams(n=n, p=p, seed=17))
    rep = audit_gnp_properties(g, p, small_knobs(seed=1))
    for rec in rep.records:
        assert rec.passed, (rec.name, rec.method, rec.witness)


def test_audit_report_round_trip():
    g = sample_gnp(GnpParams(n=60, p=0.2, seed=5))
    rep = audit_gnp_properties(g, 0.2, small_knobs())
    text = report_to_text(rep)
    back = report_from_text(text)
    assert back.n == rep.n and back.p == rep.p
    assert [(r.name, r.passed) for r in back.records] == \
        [(r.name, r.passed) for r in rep.records]
    assert len(text.splitlines()) == len(rep.records) + 1


def test_audit_deterministic():
    g = sample_gnp(GnpParams(n=80, p=0.25, seed=9))
    a = report_to_text(audit_gnp_properties(g, 0.25, small_knobs(seed=4)))
    b = report_to_text(audit_gnp_properties(g, 0.25, small_knobs(seed=4)))
    assert a == b
