"""Splitting degrees into community/background shares and placing nodes into communities.

A node with community share y and background share z fits community j only if
the expected number of majority slots its points would occupy, linear in
(y, z), stays below the number of member configurations the community offers.
The caps grow combinatorially, so they are kept in log space; the linear left
side is compared through its own log.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .config import GeneratorParams, lowest_majority_count
from .errors import InfeasibleError
from .sampling import stochastic_round_array
from .structures import CommunityAssignment

# Spots-proportional draws attempted before falling back to an exhaustive scan.
FAST_PATH_TRIES = 10


def split_degrees(degrees: np.ndarray, xi: float, rng: np.random.Generator):
    """Split each degree into (community, background) = (y, z), z = round(xi * degree).

    Rounding is stochastic and independent per node, so E[z] = xi * degree.
    Returns (y, z) as int64 arrays.
    """
    z = stochastic_round_array(xi * degrees, rng)
    y = degrees - z
    return y, z


def log_binomial(m, k):
    """log of (m choose k), elementwise; -inf outside 0 <= k <= m."""
    m = np.asarray(m, dtype=float)
    k = np.asarray(k, dtype=float)
    bad = (k < 0) | (k > m)
    kk = np.where(bad, 0.0, k)
    out = gammaln(m + 1) - gammaln(kk + 1) - gammaln(m - kk + 1)
    return np.where(bad, -np.inf, out)


@dataclass
class FeasibilityConstants:
    """Linear admissibility bounds per community.

    Column t covers one (edge size d, majority count c) combination with
    positive size share; node (y, z) is admissible for community j iff for
    every t:  y * slope_y[j, t] + z * slope_z[j, t] <= exp(log_cap[j, t]).
    """

    pair_d: np.ndarray    # int64, edge size per column
    pair_c: np.ndarray    # int64, majority count per column
    slope_y: np.ndarray   # float64, (communities, columns)
    slope_z: np.ndarray
    log_cap: np.ndarray

    @property
    def column_count(self) -> int:
        return len(self.pair_d)


def precompute_feasibility(sizes: np.ndarray, params: GeneratorParams) -> FeasibilityConstants:
    """Build FeasibilityConstants for the given community sizes.

    Work is quadratic in max_edge_size (one column per admissible (c, d))
    and linear in the number of communities.
    """
    n = params.n
    q = params.normalized_q()
    w_norm = params.w.normalized()
    cj = np.asarray(sizes, dtype=np.int64)
    frac = cj / n
    rest = (n - cj) / n

    cols_d, cols_c, a_cols, b_cols, cap_cols = [], [], [], [], []
    for d in range(2, params.max_edge_size + 1):
        qd = q[d - 1]
        if qd == 0.0:
            continue
        lo = lowest_majority_count(d)
        counts = np.arange(lo, d + 1)
        k = len(counts)
        # core[j, ci] = sum_f w[f, d] * C(d - f, c - f) * frac_j**(c - f), via
        # shift[ci, t] = w[c - t, d] * C(d - c + t, t) so the sum becomes a product
        shift = np.zeros((k, k))
        for ci, c in enumerate(counts):
            for t in range(c - lo + 1):
                shift[ci, t] = w_norm[c - t, d] * math.comb(d - c + t, t)
        powers = frac[:, None] ** np.arange(k)[None, :]
        core = powers @ shift.T
        tail = rest[:, None] ** (d - counts)[None, :]
        a_cols.append(qd * tail * core)
        b_cols.append(
            qd
            * np.array([float(math.comb(d - 1, c - 1)) for c in counts])[None, :]
            * frac[:, None] ** (counts - 1)[None, :]
            * tail
        )
        cap_cols.append(
            log_binomial(cj[:, None] - 1, (counts - 1)[None, :])
            + log_binomial((n - cj)[:, None], (d - counts)[None, :])
        )
        cols_d.extend([d] * k)
        cols_c.extend(counts.tolist())

    if cols_d:
        slope_y = np.concatenate(a_cols, axis=1)
        slope_z = np.concatenate(b_cols, axis=1)
        log_cap = np.concatenate(cap_cols, axis=1)
    else:
        slope_y = np.zeros((len(cj), 0))
        slope_z = np.zeros((len(cj), 0))
        log_cap = np.zeros((len(cj), 0))
    return FeasibilityConstants(
        np.asarray(cols_d, dtype=np.int64),
        np.asarray(cols_c, dtype=np.int64),
        slope_y,
        slope_z,
        log_cap,
    )


def is_admissible(y: int, z: int, j: int, consts: FeasibilityConstants) -> bool:
    """Direct evaluation of the admissibility bound for one node split and community."""
    lhs = y * consts.slope_y[j] + z * consts.slope_z[j]
    with np.errstate(divide="ignore"):
        return bool(np.all(np.log(lhs) <= consts.log_cap[j]))


def admissibility_table(y_vals: np.ndarray, z_vals: np.ndarray,
                        consts: FeasibilityConstants) -> np.ndarray:
    """Boolean (splits, communities) table; row u is the verdict for (y_vals[u], z_vals[u]).

    This is the memo behind node placement: each distinct (y, z) split is
    evaluated once against every community.
    """
    y_vals = np.asarray(y_vals, dtype=float)
    z_vals = np.asarray(z_vals, dtype=float)
    n_comm = consts.slope_y.shape[0]
    ok = np.ones((len(y_vals), n_comm), dtype=bool)
    with np.errstate(divide="ignore"):
        for t in range(consts.column_count):
            lhs = np.outer(y_vals, consts.slope_y[:, t]) + np.outer(z_vals, consts.slope_z[:, t])
            ok &= np.log(lhs) <= consts.log_cap[None, :, t]
    return ok


def assign_communities(y: np.ndarray, z: np.ndarray, sizes: np.ndarray,
                       consts: FeasibilityConstants,
                       rng: np.random.Generator) -> CommunityAssignment:
    """Place every node into a community, spots-proportionally among admissible ones.

    Nodes are processed in non-increasing order of y + z (ties: larger y
    first).  Each node first tries FAST_PATH_TRIES spots-proportional draws
    with replacement, accepting the first admissible community; if none hits,
    an exhaustive scan collects the admissible communities with free spots and
    draws one spots-proportionally.  Both paths together sample exactly
    proportionally to spots among admissible communities.

    The run of trailing nodes (in processing order) whose split admits every
    community is filled in one shot by dealing the remaining spot multiset
    uniformly, which is distributionally identical to continuing one by one.

    Raises InfeasibleError naming the first node that fits nowhere.
    """
    n = len(y)
    x = y + z
    order = np.lexsort((-y, -x))

    key = y.astype(np.int64) * (int(x.max()) + 1 if n else 1) + z
    uniq, inverse = np.unique(key, return_inverse=True)
    u_y = uniq // (int(x.max()) + 1 if n else 1)
    u_z = uniq % (int(x.max()) + 1 if n else 1)
    adm = admissibility_table(u_y, u_z, consts)

    all_ok = adm.all(axis=1)
    proc_ok = all_ok[inverse[order]]
    blocked = np.nonzero(~proc_ok)[0]
    cut = int(blocked[-1]) + 1 if len(blocked) else 0

    spots = np.asarray(sizes, dtype=np.int64).copy()
    member_of = np.full(n, -1, dtype=np.int32)

    for node in order[:cut]:
        row = adm[inverse[node]]
        running = np.cumsum(spots)
        total = running[-1]
        placed = -1
        for _ in range(FAST_PATH_TRIES):
            j = int(np.searchsorted(running, rng.random() * total, side="right"))
            if row[j]:
                placed = j
                break
        if placed < 0:
            weights = np.where(row, spots, 0)
            running = np.cumsum(weights)
            if running[-1] == 0:
                raise InfeasibleError(
                    f"node {node} with split (y={y[node]}, z={z[node]}) "
                    "fits no community with free spots")
            placed = int(np.searchsorted(running, rng.random() * running[-1], side="right"))
        member_of[node] = placed
        spots[placed] -= 1

    tail = order[cut:]
    if len(tail):
        pool = np.repeat(np.arange(len(spots), dtype=np.int32), spots)
        member_of[tail] = rng.permutation(pool)

    return CommunityAssignment(np.asarray(sizes, dtype=np.int64), member_of)
