"""Topology-recovery metrics: edge error, path-length error, conductance
error over the largest communities, assembled into a RecoveryReport.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import CommunityAssignment, Graph, all_pairs_distances, conductance

TOP_COMMUNITIES = 4


@dataclass(frozen=True)
class CommunityError:
    label: str
    size: int
    phi_orig: float
    phi_rec: float
    rel_err: float | None
    excluded: bool = False


@dataclass(frozen=True)
class RecoveryReport:
    err_a: float
    err_l: float
    err_phi_avg: float | None
    per_community: tuple[CommunityError, ...]
    connected_pairs_orig: int
    connected_pairs_rec: int
    meta: dict = field(default_factory=dict)

    def csv_row(self) -> dict[str, str]:
        """Flat string-valued row for sweep aggregation."""
        return {
            "err_A": f"{self.err_a:.9g}",
            "err_l": f"{self.err_l:.9g}",
            "err_phi_avg": "" if self.err_phi_avg is None else f"{self.err_phi_avg:.9g}",
        }

    def to_dict(self) -> dict:
        return {
            "err_A": self.err_a,
            "err_l": self.err_l,
            "err_phi_avg": self.err_phi_avg,
            "per_community": [
                {
                    "label": c.label,
                    "size": c.size,
                    "phi_orig": c.phi_orig,
                    "phi_rec": c.phi_rec,
                    "rel_err": c.rel_err,
                    "excluded": c.excluded,
                }
                for c in self.per_community
            ],
            "connected_pairs_orig": self.connected_pairs_orig,
            "connected_pairs_rec": self.connected_pairs_rec,
            "meta": self.meta,
        }


def relative_frobenius_error(g: Graph, g_hat: Graph) -> float:
    """||A - A_hat||_F / ||A||_F.

    For binary symmetric adjacencies this reduces to
    sqrt(|E symdiff E_hat| / m).
    """
    if g.n != g_hat.n:
        raise ValueError(f"node counts differ: {g.n} vs {g_hat.n}")
    edges = g.edge_set()
    if not edges:
        raise ValueError("original graph has no edges (zero denominator)")
    sym_diff = len(edges.symmetric_difference(g_hat.edge_set()))
    return math.sqrt(sym_diff / len(edges))


def average_path_length(g: Graph) -> tuple[float, int]:
    """Mean BFS distance over connected unordered pairs, with the pair count."""
    dist = all_pairs_distances(g)
    iu = np.triu_indices(g.n, k=1)
    finite = np.isfinite(dist[iu])
    count = int(finite.sum())
    if count == 0:
        return math.nan, 0
    return float(dist[iu][finite].mean()), count


def relative_path_length_error(g: Graph, g_hat: Graph) -> float:
    """|l(G) - l(G_hat)| / l(G), each graph averaged over its own connected
    pairs."""
    if g.n != g_hat.n:
        raise ValueError(f"node counts differ: {g.n} vs {g_hat.n}")
    l_orig, pairs_orig = average_path_length(g)
    if pairs_orig == 0 or l_orig == 0.0:
        raise ValueError("original graph has no connected pair")
    l_rec, pairs_rec = average_path_length(g_hat)
    if pairs_rec == 0:
        return 1.0
    return abs(l_orig - l_rec) / l_orig


def relative_conductance_error(g: Graph, g_hat: Graph, s) -> float:
    """|phi_G(S) - phi_Ghat(S)| / phi_G(S) for one community S."""
    phi_orig = conductance(g, s)
    if phi_orig == 0.0:
        raise ValueError("original conductance is zero; relative error undefined")
    phi_rec = conductance(g_hat, s)
    return abs(phi_orig - phi_rec) / phi_orig


def recovery_report(
    g: Graph,
    g_hat: Graph,
    labels: CommunityAssignment | None,
    meta: dict | None = None,
) -> RecoveryReport:
    """All three metrics over the top communities (largest first).

    Communities whose original conductance is zero are flagged and excluded
    from the average rather than silently biasing it. labels=None skips the
    conductance section entirely.
    """
    err_a = relative_frobenius_error(g, g_hat)
    l_orig, pairs_orig = average_path_length(g)
    if pairs_orig == 0:
        raise ValueError("original graph has no connected pair")
    l_rec, pairs_rec = average_path_length(g_hat)
    err_l = abs(l_orig - l_rec) / l_orig if pairs_rec else 1.0
    per_community: list[CommunityError] = []
    if labels is not None:
        for label, members in labels.top(TOP_COMMUNITIES):
            phi_orig = conductance(g, members)
            phi_rec = conductance(g_hat, members)
            if phi_orig == 0.0:
                per_community.append(
                    CommunityError(label, len(members), phi_orig, phi_rec, None, True)
                )
            else:
                rel = abs(phi_orig - phi_rec) / phi_orig
                per_community.append(
                    CommunityError(label, len(members), phi_orig, phi_rec, rel)
                )
    included = [c.rel_err for c in per_community if not c.excluded]
    err_phi_avg = float(np.mean(included)) if included else None
    return RecoveryReport(
        err_a=err_a,
        err_l=err_l,
        err_phi_avg=err_phi_avg,
        per_community=tuple(per_community),
        connected_pairs_orig=pairs_orig,
        connected_pairs_rec=pairs_rec,
        meta=meta or {},
    )
