"""Evaluation metrics: 2-section graph, modularity family, type histograms, CCDF tables.

All functions are pure: they read the hypergraph and a node partition and
return numbers or plain data.  Partitions are given as an integer label per
node; labels are normalized internally, so any labeling scheme works.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assignment import log_binomial
from .config import GeneratorParams, WeightMatrix, lowest_majority_count
from .errors import UndefinedInputError
from .sampling import truncated_power_law
from .structures import CommunityAssignment, Hypergraph


def _normalize_partition(labels, n: int):
    """Contiguous 0-based part labels plus the part count."""
    arr = np.asarray(labels)
    if isinstance(labels, CommunityAssignment):
        arr = labels.member_of
    if arr.shape != (n,):
        raise ValueError(f"partition must label all {n} nodes, got shape {arr.shape}")
    uniq, parts = np.unique(arr, return_inverse=True)
    return parts.astype(np.int64), len(uniq)


def _size_class_rows(hg: Hypergraph, idx: np.ndarray, d: int) -> np.ndarray:
    """Member matrix (len(idx), d) for the size-d edges listed in idx."""
    return hg.members[hg.offsets[idx][:, None] + np.arange(d, dtype=np.int64)]


def _part_runs(prows: np.ndarray):
    """Run lengths of equal labels in row-sorted label rows, plus run row ids.

    Rows are sorted ascending, so equal labels sit next to each other; each
    run is one (edge, part) overlap and its length is the overlap size.
    """
    starts = np.ones(prows.shape, dtype=bool)
    starts[:, 1:] = prows[:, 1:] != prows[:, :-1]
    flat = starts.ravel()
    pos = np.flatnonzero(flat)
    lengths = np.diff(pos, append=prows.size)
    runs_per_row = starts.sum(axis=1)
    return lengths, runs_per_row


@dataclass
class TwoSection:
    """Weighted multigraph obtained by replacing each edge with a clique.

    Parallel pairs coming from different hyperedges accumulate weight;
    repeated slots within one hyperedge are collapsed first, so a single
    hyperedge contributes each unordered pair at most once.
    """

    n: int
    pair_u: np.ndarray
    pair_v: np.ndarray
    weight: np.ndarray
    degree: np.ndarray        # weighted degree per node
    total_weight: int


def two_section(hg: Hypergraph) -> TwoSection:
    """Clique expansion of the hypergraph; each deduplicated edge gives unit pairs."""
    sizes = hg.sizes()
    us, vs = [], []
    for d in np.unique(sizes):
        d = int(d)
        if d < 2:
            continue
        idx = np.nonzero(sizes == d)[0]
        rows = _size_class_rows(hg, idx, d)
        firsts = np.ones(rows.shape, dtype=bool)
        firsts[:, 1:] = rows[:, 1:] != rows[:, :-1]
        for i in range(d):
            for j in range(i + 1, d):
                sel = firsts[:, i] & firsts[:, j]
                us.append(rows[sel, i])
                vs.append(rows[sel, j])
    if us:
        u = np.concatenate(us).astype(np.int64)
        v = np.concatenate(vs).astype(np.int64)
        key = u * hg.n + v
        uniq, counts = np.unique(key, return_counts=True)
        pair_u = uniq // hg.n
        pair_v = uniq % hg.n
        weight = counts.astype(np.int64)
    else:
        pair_u = np.empty(0, dtype=np.int64)
        pair_v = np.empty(0, dtype=np.int64)
        weight = np.empty(0, dtype=np.int64)
    degree = (np.bincount(pair_u, weights=weight, minlength=hg.n)
              + np.bincount(pair_v, weights=weight, minlength=hg.n))
    return TwoSection(hg.n, pair_u, pair_v, weight, degree, int(weight.sum()))


def graph_modularity(graph: TwoSection, partition) -> float:
    """Within-part edge fraction minus the squared volume fractions."""
    if graph.total_weight == 0:
        raise UndefinedInputError("graph modularity needs at least one edge")
    parts, k = _normalize_partition(partition, graph.n)
    same = parts[graph.pair_u] == parts[graph.pair_v]
    internal = graph.weight[same].sum() / graph.total_weight
    vol_part = np.bincount(parts, weights=graph.degree, minlength=k)
    tax = ((vol_part / graph.degree.sum()) ** 2).sum()
    return float(internal - tax)


def hypergraph_modularity(hg: Hypergraph, partition, u: WeightMatrix) -> float:
    """Size-and-type weighted modularity of a node partition.

    For each edge size d and majority count c, the observed number of edges
    with exactly c member slots in one part is compared against the binomial
    null expectation at that part's volume fraction; the differences are
    weighted by u[c, d] and scaled by the total edge count.
    """
    if hg.edge_count == 0:
        raise UndefinedInputError("hypergraph modularity needs at least one edge")
    parts, k = _normalize_partition(partition, hg.n)
    vol_part = np.bincount(parts[hg.members], minlength=k).astype(np.float64)
    p = vol_part / hg.volume
    sizes = hg.sizes()
    total = 0.0
    for d in np.unique(sizes):
        d = int(d)
        if d < 2:
            continue
        if d > u.max_edge_size:
            raise ValueError(
                f"edge size {d} exceeds the weight matrix limit {u.max_edge_size}")
        idx = np.nonzero(sizes == d)[0]
        prows = np.sort(parts[_size_class_rows(hg, idx, d)], axis=1)
        lengths, _ = _part_runs(prows)
        observed = np.bincount(lengths, minlength=d + 1)
        edge_total = len(idx)
        for c in range(lowest_majority_count(d), d + 1):
            ucd = u.values[c, d]
            if ucd == 0.0:
                continue
            if c == d:
                null = float((p ** d).sum())
            else:
                with np.errstate(divide="ignore"):
                    logpmf = (log_binomial(d, c) + c * np.log(p)
                              + (d - c) * np.log1p(-p))
                null = float(np.exp(logpmf).sum())
            total += ucd * (int(observed[c]) - edge_total * null) / hg.edge_count
    return float(total)


def type_histogram(hg: Hypergraph, partition) -> dict[tuple[int, int], int]:
    """Edge counts keyed by (majority count, size); key (0, d) means no strict majority.

    For every edge size present, all legal keys appear, zero counts included.
    """
    parts, _ = _normalize_partition(partition, hg.n)
    sizes = hg.sizes()
    out: dict[tuple[int, int], int] = {}
    for d in np.unique(sizes):
        d = int(d)
        idx = np.nonzero(sizes == d)[0]
        prows = np.sort(parts[_size_class_rows(hg, idx, d)], axis=1)
        lengths, runs_per_row = _part_runs(prows)
        row_start = np.zeros(len(idx), dtype=np.int64)
        np.cumsum(runs_per_row[:-1], out=row_start[1:])
        top = np.maximum.reduceat(lengths, row_start)
        majority = np.where(2 * top > d, top, 0)
        counts = np.bincount(majority, minlength=d + 1)
        if d > 1:
            out[(0, d)] = int(counts[0])
        for c in range(lowest_majority_count(d), d + 1):
            out[(c, d)] = int(counts[c])
    return out


@dataclass
class StatsReport:
    """Distributional statistics of one generated hypergraph."""

    node_count: int
    edge_count: int
    community_count: int
    degree_k: np.ndarray
    degree_ccdf: np.ndarray
    degree_ccdf_model: np.ndarray
    community_size_k: np.ndarray
    community_size_ccdf: np.ndarray
    community_size_ccdf_model: np.ndarray
    volume_share: np.ndarray       # fraction of slot volume per edge size, index 0 = size 1
    edge_size_counts: np.ndarray   # number of edges per size, index 0 = size 1


def _tail_fraction(values: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Fraction of entries >= k for k = lo .. hi."""
    top = max(hi, int(values.max()) if len(values) else hi)
    hist = np.bincount(values, minlength=top + 1)
    tail = np.cumsum(hist[::-1])[::-1]
    return tail[lo: hi + 1] / max(len(values), 1)


def ccdf_report(hg: Hypergraph, truth: CommunityAssignment,
                params: GeneratorParams) -> StatsReport:
    """Empirical degree / community-size CCDFs with their model curves, plus
    per-size volume shares."""
    degrees = hg.degrees()
    deg_table = truncated_power_law(params.gamma, params.min_degree, params.max_degree)
    size_table = truncated_power_law(params.beta, params.min_size, params.max_size)
    sizes = hg.sizes()
    by_size = np.bincount(sizes, minlength=params.max_edge_size + 1)
    slot_volume = np.bincount(sizes, weights=sizes.astype(np.float64),
                              minlength=params.max_edge_size + 1)
    share = slot_volume / max(hg.volume, 1)
    return StatsReport(
        node_count=hg.n,
        edge_count=hg.edge_count,
        community_count=len(truth.sizes),
        degree_k=np.arange(params.min_degree, params.max_degree + 1),
        degree_ccdf=_tail_fraction(degrees, params.min_degree, params.max_degree),
        degree_ccdf_model=deg_table.ccdf(),
        community_size_k=np.arange(params.min_size, params.max_size + 1),
        community_size_ccdf=_tail_fraction(truth.sizes, params.min_size, params.max_size),
        community_size_ccdf_model=size_table.ccdf(),
        volume_share=share[1:],
        edge_size_counts=by_size[1:],
    )
