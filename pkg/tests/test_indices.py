"""Tests for UCSV/WCSV/UCV/WCV aggregation and report serialization."""

from __future__ import annotations

import json
import warnings

import numpy as np
import pytest

from csvnet.enrichment import (
    BETWEEN_UNDER,
    WITHIN_OVER,
    EnrichmentMatrix,
    EnrichmentResult,
    enrichment_matrix,
)
from csvnet.graph import Graph, Partition
from csvnet.indices import (
    csv_report,
    report_to_json,
    report_to_tsv,
    ucsv,
    ucv,
    wcsv,
    wcv,
)


def synthetic_matrix(q: int, adj: dict[tuple[int, int], float],
                     directed: bool = False,
                     degenerate: set[tuple[int, int]] = frozenset()) -> EnrichmentMatrix:
    """Build a matrix whose adjusted p-values are dictated directly."""
    results = []
    pairs = ([(r, r) for r in range(q)]
             + ([(r, s) for r in range(q) for s in range(q) if r != s] if directed
                else [(r, s) for r in range(q) for s in range(r + 1, q)]))
    for r, s in pairs:
        a = adj[(r, s)]
        deg = (r, s) in degenerate
        results.append(EnrichmentResult(
            r, s, WITHIN_OVER if r == s else BETWEEN_UNDER,
            n_obs=0, mu0=0.0, raw_p=min(a, 0.5 if deg else a), adj_p=a,
            degenerate=deg))
    return EnrichmentMatrix(tuple(results), q, directed)


def two_triangles() -> tuple[Graph, Partition]:
    g = Graph(tuple("abcdef"),
              [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    return g, Partition(np.array([0, 0, 0, 1, 1, 1]), 2)


def random_matrix(rng: np.random.Generator) -> EnrichmentMatrix:
    n = int(rng.integers(8, 16))
    pairs = set()
    while len(pairs) < 2 * n:
        u, v = rng.integers(0, n, size=2)
        if u != v:
            pairs.add((min(u, v), max(u, v)))
    g = Graph(tuple(f"n{i}" for i in range(n)), sorted(pairs))
    q = int(rng.integers(2, 5))
    with warnings.catch_warnings():
        # random assignments may leave a community empty, which is fine here
        warnings.simplefilter("ignore", UserWarning)
        return enrichment_matrix(g, Partition(rng.integers(0, q, size=n), q))


# --- whole-family indices ----------------------------------------------------


def test_ucsv_all_or_none():
    all_reject = synthetic_matrix(3, {k: 0.0 for k in
                                      [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]})
    assert ucsv(all_reject, 0.05) == 1.0
    none = synthetic_matrix(3, {k: 0.9 for k in
                                [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)]})
    assert ucsv(none, 0.05) == 0.0


def test_ucsv_five_of_six():
    adj = {(0, 0): 0.0, (1, 1): 0.0, (2, 2): 0.0,
           (0, 1): 0.01, (0, 2): 0.02, (1, 2): 0.9}
    assert ucsv(synthetic_matrix(3, adj), 0.05) == pytest.approx(5 / 6)


def test_wcsv_single_test():
    m = synthetic_matrix(1, {(0, 0): 0.01})
    assert wcsv(m, 0.05) == pytest.approx(0.8, abs=1e-14)


def test_wcsv_boundary_and_zero():
    m = synthetic_matrix(1, {(0, 0): 0.05})
    assert ucsv(m, 0.05) == 1.0
    assert wcsv(m, 0.05) == 0.0
    zeros = synthetic_matrix(2, {(0, 0): 0.0, (1, 1): 0.0, (0, 1): 0.0})
    assert wcsv(zeros, 0.05) == ucsv(zeros, 0.05) == 1.0


def test_degenerate_never_rejects():
    # alpha above the flagged raw value: only the live test may reject
    m = synthetic_matrix(2, {(0, 0): 0.5, (1, 1): 0.5, (0, 1): 0.5},
                         degenerate={(1, 1)})
    assert ucsv(m, 0.6) == pytest.approx(2 / 3)


def test_ucv_hand_cases():
    adj = {(0, 0): 0.0, (1, 1): 0.9, (2, 2): 0.9, (3, 3): 0.9,
           (0, 1): 0.9, (0, 2): 0.9, (0, 3): 0.9, (1, 2): 0.9,
           (1, 3): 0.9, (2, 3): 0.9}
    m = synthetic_matrix(4, adj)
    assert ucv(m, 0, 0.05) == pytest.approx(1 / 4)
    assert ucv(m, 1, 0.05) == 0.0
    all_reject = synthetic_matrix(2, {(0, 0): 0.0, (1, 1): 0.0, (0, 1): 0.0})
    assert ucv(all_reject, 0, 0.05) == 1.0


def test_wcv_hand_case():
    m = synthetic_matrix(2, {(0, 0): 0.025, (1, 1): 0.9, (0, 1): 0.05})
    assert wcv(m, 0, 0.05) == pytest.approx(0.25, abs=1e-14)
    assert ucv(m, 0, 0.05) == 1.0


def test_directed_ucv_uses_outgoing_orientation():
    adj = {(0, 0): 0.0, (1, 1): 0.9, (0, 1): 0.0, (1, 0): 0.9}
    m = synthetic_matrix(2, adj, directed=True)
    assert ucv(m, 0, 0.05) == 1.0
    assert ucv(m, 1, 0.05) == 0.0


def test_index_bounds_and_alpha_validation():
    m = synthetic_matrix(1, {(0, 0): 0.01})
    for bad in (0.0, 1.0, 1.5, -0.1):
        with pytest.raises(ValueError, match="alpha"):
            ucsv(m, bad)
    with pytest.raises(ValueError):
        ucv(m, 5, 0.05)


# --- invariants on real matrices ----------------------------------------------


def test_wcsv_le_ucsv_and_averaging_consistency():
    rng = np.random.default_rng(21)
    for _ in range(15):
        m = random_matrix(rng)
        alpha = float(rng.uniform(0.01, 0.6))
        u, w = ucsv(m, alpha), wcsv(m, alpha)
        assert 0.0 <= w <= u <= 1.0
        per = [ucv(m, r, alpha) for r in range(m.q)]
        for r in range(m.q):
            assert 0.0 <= wcv(m, r, alpha) <= per[r] <= 1.0
        within_hits = sum(res.rejected(alpha) for res in m.results if res.r == res.s)
        between_hits = sum(res.rejected(alpha) for res in m.results if res.r != res.s)
        assert sum(per) * m.q == pytest.approx(within_hits + 2 * between_hits)


def test_ucsv_monotone_in_alpha():
    rng = np.random.default_rng(22)
    m = random_matrix(rng)
    grid = np.linspace(0.01, 0.99, 25)
    values = [ucsv(m, a) for a in grid]
    assert all(b >= a for a, b in zip(values, values[1:]))


# --- reports -------------------------------------------------------------------


def test_csv_report_two_triangles():
    g, p = two_triangles()
    rep = csv_report(g, p, alpha=0.05)
    assert rep.ucsv == 1.0
    assert 0.0 <= rep.wcsv <= rep.ucsv
    assert [c.size for c in rep.per_community] == [3, 3]
    assert all(c.ucv == 1.0 for c in rep.per_community)


def test_csv_report_single_community():
    g, _ = two_triangles()
    rep = csv_report(g, Partition(np.zeros(6, dtype=int), 1))
    assert len(rep.matrix.results) == 1


def test_report_serialization_round_trip():
    g, p = two_triangles()
    rep = csv_report(g, p)
    text = report_to_json(rep)
    assert text == report_to_json(rep)
    payload = json.loads(text)
    assert list(payload) == ["schema_version", "alpha", "directed", "q",
                             "ucsv", "wcsv", "communities", "tests"]
    assert payload["schema_version"] == 1
    assert payload["ucsv"] == 1.0
    assert len(payload["tests"]) == 3

    tsv = report_to_tsv(rep)
    assert tsv == report_to_tsv(rep)
    lines = tsv.splitlines()
    assert lines[0].startswith("# csvnet report schema_version=1")
    kinds = [line.split("\t")[0] for line in lines[1:]]
    assert kinds == ["index"] * 3 + ["community"] * 2 + ["test"] * 3
