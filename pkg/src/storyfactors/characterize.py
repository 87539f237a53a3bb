"""Cluster characterization by over-represented words (v-test).

The v-test compares a cluster's mean of some per-document value against
the global mean, standardized by the sampling variance of a mean of n_q
documents drawn without replacement from the N available:

    v = (mean_q - mean) / sqrt( ((N - n_q)/(N - 1)) * s^2 / n_q )

with s^2 the population variance.  |v| is mapped to a two-sided normal
p-value via the complementary error function, which stays accurate for
the very small p-values (~1e-13) that concentrated words produce.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .clustering import Partition
from .corpus import ContingencyTable


@dataclass(frozen=True)
class VTestEntry:
    cluster_id: int
    word: str
    v: float
    p: float
    cluster_mean: float
    global_mean: float


@dataclass(frozen=True)
class VTestReport:
    entries: tuple[VTestEntry, ...]  # sorted by (cluster_id, p ascending)
    alpha: float


def v_test(values, partition: Partition, cluster_id: int) -> tuple[float, float]:
    """v statistic and two-sided p-value for one cluster of a partition.

    ``values`` are per-document numbers in the partition's label order.
    Degenerate cases (cluster = everything, or constant values) return
    (0, 1).
    """
    values = np.asarray(values, dtype=float)
    N = len(values)
    if len(partition.assignment) != N:
        raise ValueError(f"{N} values for {len(partition.assignment)} documents")
    mask = np.array([cid == cluster_id for cid in partition.assignment.values()])
    n_q = int(mask.sum())
    if n_q == 0:
        raise ValueError(f"cluster {cluster_id} is empty")
    variance = float(np.var(values))  # population variance
    if n_q == N or variance == 0.0:
        return 0.0, 1.0
    v = (float(values[mask].mean()) - float(values.mean())) / math.sqrt(
        ((N - n_q) / (N - 1)) * variance / n_q
    )
    return v, math.erfc(abs(v) / math.sqrt(2.0))


def characterize_clusters(
    table: ContingencyTable,
    partition: Partition,
    alpha: float,
    normalize: bool = False,
    include_all: bool = False,
) -> VTestReport:
    """v-test every (cluster, word) pair; keep entries with p < alpha.

    ``normalize`` switches the tested values from raw counts to
    within-document frequencies.  ``include_all`` keeps the full report
    regardless of significance.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if set(partition.assignment) != set(table.row_labels):
        missing = set(table.row_labels) - set(partition.assignment)
        extra = set(partition.assignment) - set(table.row_labels)
        raise ValueError(f"partition does not cover table rows (missing {sorted(missing)[:3]}, extra {sorted(extra)[:3]})")

    cluster_ids = np.array([partition.assignment[label] for label in table.row_labels])
    values = table.counts.astype(float)
    if normalize:
        values = values / values.sum(axis=1, keepdims=True)
    N = len(table.row_labels)
    global_means = values.mean(axis=0)
    variances = values.var(axis=0)

    entries: list[VTestEntry] = []
    for cid in range(1, partition.k + 1):
        mask = cluster_ids == cid
        n_q = int(mask.sum())
        if n_q == 0:
            raise ValueError(f"cluster {cid} is empty")
        cluster_means = values[mask].mean(axis=0)
        if n_q == N:
            v_all = np.zeros(len(table.col_labels))
        else:
            scale = np.sqrt(((N - n_q) / (N - 1)) * variances / n_q)
            with np.errstate(divide="ignore", invalid="ignore"):
                v_all = np.where(scale > 0, (cluster_means - global_means) / scale, 0.0)
        for j, word in enumerate(table.col_labels):
            v = float(v_all[j])
            p = math.erfc(abs(v) / math.sqrt(2.0)) if v != 0.0 else 1.0
            if include_all or p < alpha:
                entries.append(
                    VTestEntry(cid, word, v, p, float(cluster_means[j]), float(global_means[j]))
                )
    entries.sort(key=lambda e: (e.cluster_id, e.p, e.word))
    return VTestReport(tuple(entries), alpha)


def report_to_csv(report: VTestReport) -> str:
    """CSV ``cluster,word,v,p,cluster_mean,global_mean`` with p as 1.234567e-08."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["cluster", "word", "v", "p", "cluster_mean", "global_mean"])
    for e in report.entries:
        writer.writerow(
            [
                e.cluster_id,
                e.word,
                format(e.v, ".12g"),
                format(e.p, ".6e"),
                format(e.cluster_mean, ".12g"),
                format(e.global_mean, ".12g"),
            ]
        )
    return buffer.getvalue()
