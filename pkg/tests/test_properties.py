import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gnpgames.graphs import (
    GnpParams,
    Graph,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    empty_graph,
    external_neighborhood,
    path_graph,
    sample_gnp,
)
from gnpgames.properties import (
    booster_set,
    find_expansion_violation,
    ham_status,
    has_perfect_matching,
    is_connected,
    is_expander,
    is_hamiltonian,
    is_k_connected,
    is_two_connected,
    longest_path_length,
    maximum_matching,
    posa_explore,
)
from gnpgames.rng import substream


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    return Graph(10, outer + inner + spokes)


# ---- independent oracles used to freeze expected values ----


def brute_has_hamilton_cycle(g: Graph) -> bool:
    if g.n < 3:
        return False
    rest = list(range(1, g.n))
    for perm in itertools.permutations(rest):
        cyc = (0,) + perm
        if all(g.has_edge(cyc[i], cyc[(i + 1) % g.n]) for i in range(g.n)):
            return True
    return False


def brute_longest_path(g: Graph) -> int:
    best = 0

    def extend(v, visited, length):
        nonlocal best
        best = max(best, length)
        for w in g.neighbors(v):
            if w not in visited:
                extend(w, visited | {w}, length + 1)

    for s in range(g.n):
        extend(s, {s}, 0)
    return best


def brute_max_matching(g: Graph) -> int:
    edges = g.edge_list

    def rec(i, used):
        if i == len(edges):
            return 0
        u, v = edges[i]
        best = rec(i + 1, used)
        if u not in used and v not in used:
            best = max(best, 1 + rec(i + 1, used | {u, v}))
        return best

    return rec(0, frozenset())


def brute_k_connected(g: Graph, k: int) -> bool:
    if g.n <= k:
        return False
    verts = set(range(g.n))
    for r in range(k):
        for cut in itertools.combinations(range(g.n), r):
            keep = verts - set(cut)
            sub = Graph(g.n, [e for e in g.edge_list
                              if e[0] in keep and e[1] in keep])
            comp_sizes = []
            seen = set()
            for s in keep:
                if s in seen:
                    continue
                stack, comp = [s], {s}
                seen.add(s)
                while stack:
                    x = stack.pop()
                    for y in sub.neighbors(x):
                        if y in keep and y not in seen:
                            seen.add(y)
                            comp.add(y)
                            stack.append(y)
                comp_sizes.append(len(comp))
            if len(comp_sizes) > 1:
                return False
    return True


def random_small_graph(rng, n_lo=4, n_hi=10, p=None):
    n = int(rng.integers(n_lo, n_hi + 1))
    p = float(rng.uniform(0.2, 0.8)) if p is None else p
    return sample_gnp(GnpParams(n=n, p=p, seed=int(rng.integers(2**63))))


# ---- hamiltonicity ----


def test_hamiltonian_basics():
    assert is_hamiltonian(cycle_graph(5))
    assert not is_hamiltonian(path_graph(4))
    assert is_hamiltonian(complete_graph(4))
    assert not is_hamiltonian(complete_graph(2))
    assert not is_hamiltonian(empty_graph(5))


def test_petersen_not_hamiltonian():
    pet = petersen_graph()
    assert brute_has_hamilton_cycle(pet) is False  # independent confirmation
    assert is_hamiltonian(pet) is False


def test_ham_status_budget_unknown_is_none_or_exact():
    pet = petersen_graph()
    r = ham_status(pet, budget=1)
    assert r in (None, False)
    assert ham_status(pet, budget=None) is False


def test_hamiltonicity_matches_brute_force():
    rng = substream(2024, 1)
    for _ in range(60):
        g = random_small_graph(rng, 3, 8)
        assert is_hamiltonian(g) == brute_has_hamilton_cycle(g)


def test_two_connected():
    assert is_two_connected(cycle_graph(4))
    assert not is_two_connected(path_graph(4))
    assert not is_two_connected(Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]))


# ---- longest path ----


def test_longest_path_examples():
    assert longest_path_length(Graph(1, ())) == 0
    assert longest_path_length(path_graph(4)) == 3
    assert longest_path_length(cycle_graph(5)) == brute_longest_path(cycle_graph(5)) == 4


def test_longest_path_matches_brute_force():
    rng = substream(2024, 2)
    for _ in range(40):
        g = random_small_graph(rng, 2, 8)
        assert longest_path_length(g) == brute_longest_path(g)


# ---- boosters ----


def test_booster_path_examples():
    p4 = path_graph(4)
    rep = booster_set(p4)
    assert rep.longest_path_len == 3 and not rep.is_hamiltonian
    assert (0, 3) in rep.boosters
    assert (0, 2) not in rep.boosters


def test_booster_definition_recomputed_from_scratch():
    rng = substream(2024, 3)
    for _ in range(30):
        g = random_small_graph(rng, 4, 8)
        rep = booster_set(g)
        base = brute_longest_path(g)
        for uv in g.complement_non_edges():
            g2 = g.with_edge(*uv)
            truth = brute_has_hamilton_cycle(g2) or brute_longest_path(g2) > base
            assert (uv in rep.boosters) == truth, (g.edge_list, uv)


def test_booster_hamiltonian_input_returns_all_non_edges():
    g = cycle_graph(5)
    rep = booster_set(g)
    assert rep.is_hamiltonian
    assert rep.boosters == frozenset(g.complement_non_edges())


# ---- matching ----


def test_matching_examples():
    assert has_perfect_matching(complete_graph(4))
    assert not has_perfect_matching(complete_bipartite_graph(1, 3))
    assert has_perfect_matching(cycle_graph(5))


def test_matching_matches_brute_force():
    rng = substream(2024, 4)
    for _ in range(80):
        g = random_small_graph(rng, 2, 10)
        m = maximum_matching(g)
        used = [v for e in m for v in e]
        assert len(set(used)) == len(used)
        assert all(g.has_edge(u, v) for u, v in m)
        assert len(m) == brute_max_matching(g)


# ---- k-connectivity ----


def test_k_connectivity_examples():
    assert is_k_connected(complete_graph(5), 4)
    assert not is_k_connected(path_graph(3), 2)
    assert not is_k_connected(complete_graph(3), 3)  # needs n > k
    with pytest.raises(ValueError):
        is_k_connected(complete_graph(3), 0)


def test_k_connectivity_matches_brute_force():
    rng = substream(2024, 5)
    for _ in range(40):
        g = random_small_graph(rng, 3, 7)
        for k in (1, 2, 3):
            assert is_k_connected(g, k) == brute_k_connected(g, k), (g.edge_list, k)


# ---- expansion ----


def test_expander_examples():
    assert is_expander(complete_graph(4), 1, 2).holds
    w = is_expander(cycle_graph(5), 2, 2)
    assert not w.holds
    U = w.violating_set
    assert U is not None and len(external_neighborhood(cycle_graph(5), U)) < 2 * len(U)
    assert not is_expander(empty_graph(3), 1, 1).holds
    with pytest.raises(ValueError):
        is_expander(complete_graph(3), 5, 1)


def test_expander_witness_is_recheckable():
    rng = substream(2024, 6)
    for _ in range(30):
        g = random_small_graph(rng, 4, 9)
        w = is_expander(g, min(3, g.n), 1.5)
        if not w.holds:
            U = w.violating_set
            assert len(external_neighborhood(g, U)) < 1.5 * len(U)
        else:
            for size in (1, 2, 3):
                for U in itertools.combinations(range(g.n), min(size, g.n)):
                    assert len(external_neighborhood(g, U)) >= 1.5 * len(U)


def test_n5_expanders_are_connected():
    rng = substream(2024, 7)
    found = 0
    for _ in range(200):
        g = random_small_graph(rng, 5, 12)
        r = -(-g.n // 5)
        if is_expander(g, r, 2).holds:
            found += 1
            assert is_connected(g)
    assert found > 0


def test_expander_implies_k_connected_spot():
    # c >= k and R*c >= (n+k)/2 forces k-connectivity
    rng = substream(2024, 8)
    checked = 0
    for _ in range(150):
        g = random_small_graph(rng, 5, 10, p=0.7)
        n = g.n
        for k in (1, 2):
            c = k
            R = -(-(n + k) // (2 * c))
            if R <= n and is_expander(g, R, c).holds:
                checked += 1
                assert is_k_connected(g, k)
    assert checked > 0


def test_heuristic_violation_is_sound():
    rng = substream(2024, 9)
    for _ in range(40):
        g = random_small_graph(rng, 5, 12)
        v = find_expansion_violation(g, min(4, g.n), 2.0, seed=3)
        if v is not None:
            assert len(external_neighborhood(g, v)) < 2.0 * len(v)


# ---- rotation-extension search ----


def test_posa_finds_cycles_on_easy_graphs():
    for g in (cycle_graph(10), complete_graph(9)):
        res = posa_explore(g, seed=1)
        assert res.cycle is not None
        assert len(res.cycle) == g.n


def test_posa_endpoint_pairs_are_certified_boosters():
    # non-Hamiltonian graph with Hamilton paths: spanning-path endpoint
    # pairs must close a Hamilton cycle once added
    g = path_graph(8)
    res = posa_explore(g, seed=5, restarts=8)
    assert res.cycle is None
    for (u, v) in res.endpoint_pairs:
        assert is_hamiltonian(g.with_edge(u, v))
