import itertools
import math

import numpy as np
import pytest

from qfractal.errors import ClosureOverflow, InvalidInput, NotAScheme, NotCommutative, NotConnected
from qfractal.graphs import (WeightedGraph, complete_scheme_graph, cycle_graph, hypercube_graph,
                             path_graph)
from qfractal.qdecomp import extract_jacobi
from qfractal.scheme import (build_scheme, distance_matrices, duality_check, intersection_numbers,
                             krein_parameters, primitive_idempotents, scheme_report,
                             t_algebra_thin_check, verify_scheme)

SCHEMES = {
    "C5": cycle_graph(2), "C7": cycle_graph(3), "C9": cycle_graph(4),
    "H2": hypercube_graph(2), "H3": hypercube_graph(3), "H4": hypercube_graph(4),
    "K4": complete_scheme_graph(4), "K7": complete_scheme_graph(7),
}


@pytest.fixture(scope="module")
def built():
    return {name: build_scheme(g) for name, g in SCHEMES.items()}


def test_distance_matrices_examples():
    c5 = distance_matrices(cycle_graph(2))
    assert len(c5) == 3
    np.testing.assert_array_equal(c5[1], cycle_graph(2).matrix())
    np.testing.assert_array_equal(c5[2], np.ones((5, 5)) - np.eye(5) - c5[1])
    p2 = distance_matrices(path_graph(2))
    assert len(p2) == 2
    np.testing.assert_array_equal(p2[1], [[0, 1], [1, 0]])
    h3 = distance_matrices(hypercube_graph(3))
    assert [int(a[0].sum()) for a in h3] == [1, 3, 3, 1]


def test_distance_matrices_disconnected():
    g = WeightedGraph(3, ((0, 1, 1.0), (1, 0, 1.0)))
    with pytest.raises(NotConnected):
        distance_matrices(g)


def test_axioms_examples():
    assert verify_scheme(distance_matrices(cycle_graph(2))).is_scheme
    report = verify_scheme(distance_matrices(path_graph(4)))
    assert report.identity and report.partition and report.transpose_closed
    assert not report.product_closed
    assert not report.is_scheme
    complete = [np.eye(4), np.ones((4, 4)) - np.eye(4)]
    r = verify_scheme(complete)
    assert r.is_scheme and r.commutative


def test_axioms_reject_non_partition():
    with pytest.raises(InvalidInput):
        verify_scheme([np.eye(3), 0.5 * np.ones((3, 3))])
    r = verify_scheme([np.eye(3), np.ones((3, 3))])
    assert not r.partition and not r.is_scheme


def test_non_commutative_scheme_detected():
    # thin scheme of the group S3 acting on itself: classes are right-multiplication
    perms = list(itertools.permutations(range(3)))
    index = {p: k for k, p in enumerate(perms)}
    classes = []
    for g in perms:
        a = np.zeros((6, 6))
        for x in perms:
            y = tuple(x[g[i]] for i in range(3))
            a[index[x], index[y]] = 1
        classes.append(a)
    report = verify_scheme(classes)
    assert report.is_scheme and not report.commutative
    with pytest.raises(NotCommutative):
        primitive_idempotents(classes)


def test_intersection_numbers_examples(built):
    p = built["C5"].p_numbers
    assert (p[1, 1, 1], p[2, 1, 1], p[0, 1, 1]) == (0, 1, 2)
    assert built["H3"].p_numbers[1, 1, 2] == 2
    for data in built.values():
        for i in range(data.d + 1):
            for j in range(data.d + 1):
                expected = data.classes[i][0].sum() if i == j else 0
                assert data.p_numbers[0, i, j] == expected


def test_intersection_numbers_reject_path():
    with pytest.raises(NotAScheme):
        intersection_numbers(distance_matrices(path_graph(4)))
    with pytest.raises(NotAScheme):
        build_scheme(path_graph(4))


def test_p_numbers_symmetric(built):
    for data in built.values():
        np.testing.assert_array_equal(data.p_numbers, data.p_numbers.transpose(0, 2, 1))


def test_idempotent_examples(built):
    c5 = built["C5"]
    assert c5.ranks == [1, 2, 2]
    np.testing.assert_allclose(c5.eigenvalues, [2, 2 * math.cos(2 * math.pi / 5), 2 * math.cos(4 * math.pi / 5)],
                               atol=1e-12)
    assert built["H3"].ranks == [1, 3, 3, 1]
    assert built["K7"].ranks == [1, 6]
    np.testing.assert_allclose(c5.idempotents[0], np.ones((5, 5)) / 5, atol=1e-12)


def test_idempotent_completeness(built):
    for data in built.values():
        n = data.n
        np.testing.assert_allclose(sum(data.idempotents), np.eye(n), atol=1e-10)
        for e, m in zip(data.idempotents, data.ranks):
            np.testing.assert_array_equal(e, e.T)
            np.testing.assert_allclose(e @ e, e, atol=1e-10)
            assert abs(np.trace(e) - m) < 1e-8
        assert list(data.eigenvalues) == sorted(data.eigenvalues, reverse=True)


def test_krein_against_direct_hadamard(built):
    for data in built.values():
        n = data.n
        es = data.idempotents
        for i, j in itertools.product(range(data.d + 1), repeat=2):
            recon = sum(data.q_numbers[k, i, j] * es[k] for k in range(data.d + 1)) / n
            np.testing.assert_allclose(es[i] * es[j], recon, atol=1e-10)
        # E0 ∘ E0 = J/n^2 = E0 / n
        assert data.q_numbers[0, 0, 0] == pytest.approx(1, abs=1e-10)
        for k in range(1, data.d + 1):
            assert abs(data.q_numbers[k, 0, 0]) < 1e-10
        assert data.krein_nonnegative()


def test_krein_complete_graph_closed_form(built):
    for name, n in (("K4", 4), ("K7", 7)):
        q = built[name].q_numbers
        assert q[0, 1, 1] == pytest.approx(n - 1, abs=1e-10)
        assert q[1, 1, 1] == pytest.approx(n - 2, abs=1e-10)
        assert q[1, 0, 1] == pytest.approx(1, abs=1e-10)
        assert q[0, 0, 1] == pytest.approx(0, abs=1e-10)


def test_krein_residual_failure():
    bogus = [np.ones((3, 3)) / 3, np.eye(3) - np.ones((3, 3)) / 3 - np.diag([0.1, 0, -0.1])]
    from qfractal.errors import NumericalFailure

    with pytest.raises(NumericalFailure):
        krein_parameters(bogus)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_hamming_self_dual(built, d):
    data = build_scheme(hypercube_graph(d))
    ok, witness = duality_check(data)
    assert ok
    assert witness == tuple(range(d + 1))
    np.testing.assert_array_equal(np.round(data.q_numbers), data.p_numbers)


def test_c5_self_dual(built):
    ok, witness = duality_check(built["C5"])
    assert ok and witness is not None


def _brute_force_duality(data):
    d = data.d
    for rest in itertools.permutations(range(1, d + 1)):
        sigma = (0,) + rest
        if all(abs(data.q_numbers[sigma[k], sigma[i], sigma[j]] - data.p_numbers[k, i, j]) <= 1e-8
               for i, j, k in itertools.product(range(d + 1), repeat=3)):
            return True, sigma
    return False, None


@pytest.mark.parametrize("name", ["C5", "C7", "C9", "H3", "K4"])
def test_duality_matches_brute_force(built, name):
    assert duality_check(built[name]) == _brute_force_duality(built[name])


def test_c7_duality_frozen(built):
    # computed once by the brute-force permutation oracle
    ok, witness = _brute_force_duality(built["C7"])
    assert (ok, witness) == (True, (0, 1, 2, 3))
    assert duality_check(built["C7"]) == (ok, witness)


@pytest.mark.parametrize("N", range(1, 7))
def test_coefficient_formulas_cycles(N):
    g = cycle_graph(N)
    p = intersection_numbers(distance_matrices(g))
    gj = extract_jacobi(g)
    for n in range(1, N + 1):
        assert round(gj.omega[n - 1]) == p[n, 1, n - 1] * p[n - 1, 1, n]
        assert abs(gj.omega[n - 1] - round(gj.omega[n - 1])) < 1e-9
    for n in range(1, N + 2):
        assert round(gj.alpha[n - 1]) == p[n - 1, 1, n - 1]


@pytest.mark.parametrize("d", range(1, 6))
def test_coefficient_formulas_hamming(d):
    g = hypercube_graph(d)
    p = intersection_numbers(distance_matrices(g))
    gj = extract_jacobi(g)
    for n in range(1, d + 1):
        assert round(gj.omega[n - 1]) == p[n, 1, n - 1] * p[n - 1, 1, n] == n * (d - n + 1)
    for n in range(1, d + 2):
        assert round(gj.alpha[n - 1]) == p[n - 1, 1, n - 1] == 0


def test_thin_examples():
    h3 = t_algebra_thin_check(hypercube_graph(3))
    assert h3.thin
    assert h3.primary_profile == (1, 1, 1, 1)
    assert sum(sum(prof) for prof in h3.modules) == 8
    c5 = t_algebra_thin_check(cycle_graph(2))
    assert c5.thin
    assert c5.primary_profile == (1, 1, 1)
    assert sum(sum(prof) for prof in c5.modules) == 5


@pytest.mark.parametrize("g", [cycle_graph(3), cycle_graph(4), hypercube_graph(4), complete_scheme_graph(5)],
                         ids=["C7", "C9", "H4", "K5"])
def test_primary_module_profile_all_ones(g):
    report = t_algebra_thin_check(g)
    assert report.primary_profile == (1,) * len(stratify_sizes(g))
    assert report.thin


def stratify_sizes(g):
    from qfractal.qdecomp import stratify

    return stratify(g).sizes


def _tree(pairs, n, root):
    edges = []
    for u, v in pairs:
        edges += [(u, v, 1.0), (v, u, 1.0)]
    return WeightedGraph(n, tuple(edges), root)


def test_non_thin_detected():
    # rooted at 1, stratum 1 = {0, 2, 3}; vertex 0 is a leaf while 2 and 3
    # have one child each, so T separates them inside the primary module
    g = _tree(((0, 1), (1, 2), (1, 3), (3, 4), (2, 5)), 6, 1)
    report = t_algebra_thin_check(g)
    assert not report.thin
    assert report.primary_profile == (1, 2, 1)
    assert sorted(report.modules) == [(0, 1, 1), (1, 2, 1)]
    # path with a pendant at the root: one irreducible 5-dim module
    report = t_algebra_thin_check(_tree(((0, 1), (1, 2), (2, 3), (0, 4)), 5, 0))
    assert report.modules == [(1, 2, 1, 1)] and not report.thin


def test_thin_closure_overflow():
    with pytest.raises(ClosureOverflow):
        t_algebra_thin_check(hypercube_graph(3), cap=3)


def test_thin_deterministic():
    a = t_algebra_thin_check(cycle_graph(4), seed=7)
    b = t_algebra_thin_check(cycle_graph(4), seed=7)
    assert a.modules == b.modules and a.dim_t == b.dim_t


def test_scheme_report_shapes():
    rep = scheme_report(cycle_graph(2))
    assert rep["self_dual"] is True
    assert rep["ranks"] == [1, 2, 2]
    assert rep["thinness"]["thin"] is True
    bad = scheme_report(path_graph(4), thin=False)
    assert bad["axioms"]["axiom4_products"] is False
    assert "p_numbers" not in bad and "thinness" not in bad
