"""CSV indices: aggregate an enrichment test family into validation scores.

UCSV is the rejected fraction of the family; WCSV weights each rejection by
(alpha - adj_p) / alpha. UCV and WCV restrict the count to the q tests that
involve one community. Degenerate tests stay in every denominator but can
never reject, so partitions with dead communities score lower.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .enrichment import EnrichmentMatrix, enrichment_matrix
from .graph import Graph, Partition

SCHEMA_VERSION = 1


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha out of range (0, 1)")
    return alpha


def ucsv(matrix: EnrichmentMatrix, alpha: float) -> float:
    """Fraction of the test family rejected at level ``alpha``."""
    alpha = _check_alpha(alpha)
    hits = sum(res.rejected(alpha) for res in matrix.results)
    return hits / len(matrix.results)


def wcsv(matrix: EnrichmentMatrix, alpha: float) -> float:
    """Rejection fraction weighted by (alpha - adj_p) / alpha per test."""
    alpha = _check_alpha(alpha)
    total = sum((alpha - res.adj_p) / alpha
                for res in matrix.results if res.rejected(alpha))
    return total / len(matrix.results)


def _community_results(matrix: EnrichmentMatrix, r: int):
    """The q tests touching community r: its within test plus one between
    test per other community (r -> s orientation when directed)."""
    if not 0 <= r < matrix.q:
        raise ValueError(f"community id {r} out of range")
    yield matrix.result(r, r)
    for s in range(matrix.q):
        if s != r:
            yield matrix.result(r, s)


def ucv(matrix: EnrichmentMatrix, r: int, alpha: float) -> float:
    """Single-community validation: rejected fraction of the q tests on r."""
    alpha = _check_alpha(alpha)
    return sum(res.rejected(alpha) for res in _community_results(matrix, r)) / matrix.q


def wcv(matrix: EnrichmentMatrix, r: int, alpha: float) -> float:
    """Weighted single-community validation index."""
    alpha = _check_alpha(alpha)
    total = sum((alpha - res.adj_p) / alpha
                for res in _community_results(matrix, r) if res.rejected(alpha))
    return total / matrix.q


@dataclass(frozen=True)
class CommunityScore:
    community: int
    size: int
    ucv: float
    wcv: float


@dataclass(eq=False)
class CsvReport:
    """Full validation report for one (graph, partition) pair at one alpha."""

    alpha: float
    ucsv: float
    wcsv: float
    per_community: tuple[CommunityScore, ...]
    matrix: EnrichmentMatrix


def csv_report(graph: Graph, partition: Partition, alpha: float = 0.05) -> CsvReport:
    """Run the whole test family and compute every index."""
    alpha = _check_alpha(alpha)
    matrix = enrichment_matrix(graph, partition)
    sizes = partition.sizes()
    per_community = tuple(
        CommunityScore(r, int(sizes[r]), ucv(matrix, r, alpha), wcv(matrix, r, alpha))
        for r in range(partition.q))
    return CsvReport(alpha, ucsv(matrix, alpha), wcsv(matrix, alpha),
                     per_community, matrix)


def report_to_json(report: CsvReport) -> str:
    """Serialize with a fixed field order, trailing newline, LF only."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "alpha": report.alpha,
        "directed": report.matrix.directed,
        "q": report.matrix.q,
        "ucsv": report.ucsv,
        "wcsv": report.wcsv,
        "communities": [
            {"id": c.community, "size": c.size, "ucv": c.ucv, "wcv": c.wcv}
            for c in report.per_community
        ],
        "tests": [
            {"r": res.r, "s": res.s, "direction": res.direction,
             "n_obs": res.n_obs, "mu0": res.mu0, "raw_p": res.raw_p,
             "adj_p": res.adj_p, "degenerate": res.degenerate}
            for res in report.matrix.results
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))


def report_to_tsv(report: CsvReport) -> str:
    """Flat TSV: self-describing record rows behind a schema comment."""
    lines = [f"# csvnet report schema_version={SCHEMA_VERSION}",
             f"index\talpha\t{_fmt(report.alpha)}",
             f"index\tucsv\t{_fmt(report.ucsv)}",
             f"index\twcsv\t{_fmt(report.wcsv)}"]
    for c in report.per_community:
        lines.append(f"community\t{c.community}\t{c.size}\t{_fmt(c.ucv)}\t{_fmt(c.wcv)}")
    for res in report.matrix.results:
        lines.append("\t".join([
            "test", str(res.r), str(res.s), res.direction, str(res.n_obs),
            _fmt(res.mu0), _fmt(res.raw_p), _fmt(res.adj_p), str(int(res.degenerate)),
        ]))
    return "\n".join(lines) + "\n"
