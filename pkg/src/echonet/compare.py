"""Partition similarity and rater agreement: Rand index, Cohen's kappa, and
the uniform random-partition baseline."""

from __future__ import annotations

import warnings

import numpy as np

from .graphs import Partition


class DegenerateDataWarning(UserWarning):
    """Emitted when a measure is defined only by convention on the input."""


def _comb2(n: int) -> int:
    return n * (n - 1) // 2


def rand_index(p: Partition, q: Partition) -> float:
    """Fraction of node pairs on which two partitions agree.

    Computed from the contingency table (O(n + cells)), never by pair
    enumeration. 1 means identical up to relabeling; two-way random baselines
    sit near 0.5.
    """
    pn, qn = set(p.nodes), set(q.nodes)
    if pn != qn:
        diff = sorted(pn.symmetric_difference(qn))
        raise ValueError(f"partitions cover different node sets; difference: {diff}")
    n = len(pn)
    if n < 2:
        raise ValueError("rand index needs at least 2 nodes")
    qmap = q.as_dict()
    table: dict[tuple[int, int], int] = {}
    rows: dict[int, int] = {}
    cols: dict[int, int] = {}
    for node, a in zip(p.nodes, p.labels):
        b = qmap[node]
        table[(a, b)] = table.get((a, b), 0) + 1
        rows[a] = rows.get(a, 0) + 1
        cols[b] = cols.get(b, 0) + 1
    sum_cells = sum(_comb2(c) for c in table.values())
    sum_rows = sum(_comb2(c) for c in rows.values())
    sum_cols = sum(_comb2(c) for c in cols.values())
    total = _comb2(n)
    agreements = total + 2 * sum_cells - sum_rows - sum_cols
    return agreements / total


def cohen_kappa(r1: dict, r2: dict) -> float:
    """Cohen's chance-corrected agreement between two labelings.

    kappa = (p_o - p_e) / (1 - p_e) with product-marginal chance agreement.
    When both raters are constant and identical (p_e = 1) the value is 1 by
    convention, flagged as degenerate.
    """
    if set(r1) != set(r2):
        diff = sorted(set(r1).symmetric_difference(set(r2)))
        raise ValueError(f"raters cover different node sets; difference: {diff}")
    if not r1:
        raise ValueError("kappa needs at least one rated item")
    n = len(r1)
    agree = 0
    marg1: dict = {}
    marg2: dict = {}
    for node, a in r1.items():
        b = r2[node]
        if a == b:
            agree += 1
        marg1[a] = marg1.get(a, 0) + 1
        marg2[b] = marg2.get(b, 0) + 1
    p_o = agree / n
    p_e = sum(marg1.get(lab, 0) * marg2.get(lab, 0) for lab in marg1) / (n * n)
    if p_e == 1.0:
        warnings.warn("both raters constant and equal; kappa = 1 by convention",
                      DegenerateDataWarning)
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def kappa_from_confusion(counts) -> float:
    """Kappa from a square confusion matrix (rows rater 1, cols rater 2)."""
    counts = np.asarray(counts, dtype=float)
    n = counts.sum()
    p_o = np.trace(counts) / n
    p_e = float((counts.sum(axis=1) / n) @ (counts.sum(axis=0) / n))
    if p_e == 1.0:
        warnings.warn("degenerate confusion matrix; kappa = 1 by convention",
                      DegenerateDataWarning)
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def random_partition(nodes, k: int, seed: int) -> Partition:
    """Assign each node independently and uniformly to one of k communities.

    Empty communities are permitted by the draw and compacted away to keep
    ids contiguous.
    """
    node_list = sorted(nodes)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k > len(node_list):
        raise ValueError(f"k = {k} exceeds the {len(node_list)} nodes")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, k, size=len(node_list))
    return Partition.from_labels(node_list, draws.tolist())
