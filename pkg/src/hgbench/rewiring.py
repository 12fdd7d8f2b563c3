"""Repair pass turning the raw hypergraph into a simple one.

Generation fills member slots independently, so an edge can hit the same node
twice and two edges of one size can coincide.  The repair loop merges each
defective edge with a random intact one, reshuffles the union of their slots,
and keeps the re-split only when it strictly lowers the total defect score.
Everything operates in place on the member array: edge sizes, and therefore
offsets, never change, and per-node incidence counts are preserved exactly.
"""
from __future__ import annotations

from collections import deque

import numpy as np

from .errors import UnrepairableError
from .structures import Hypergraph

BUDGET_PER_BAD = 100


def polynomial_hash(rows: np.ndarray) -> np.ndarray:
    """Uint64 rolling hash of each row of a 2-D int array."""
    mult = np.uint64(0x9E3779B97F4A7C15)
    acc = np.zeros(len(rows), dtype=np.uint64)
    for col in range(rows.shape[1]):
        acc = acc * mult + rows[:, col].astype(np.uint64) + np.uint64(1)
    return acc


class SizeClassIndex:
    """Membership index over the intact edges of one size class.

    Holds a snapshot of the intact rows sorted by hash; every hit is verified
    against the snapshot, so hash collisions cost a comparison, never a wrong
    answer.  Later inserts and removals live in a small delta dict keyed by
    the row bytes.
    """

    def __init__(self, rows: np.ndarray, hash_fn=polynomial_hash):
        self.hash_fn = hash_fn
        if len(rows):
            hashes = hash_fn(rows)
            order = np.argsort(hashes, kind="stable")
            self.base_hashes = hashes[order]
            self.base_rows = np.ascontiguousarray(rows[order])
        else:
            self.base_hashes = np.empty(0, dtype=np.uint64)
            self.base_rows = rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0)
        self.delta: dict[bytes, int] = {}

    def _in_base(self, row: np.ndarray) -> bool:
        h = self.hash_fn(row[None, :])[0]
        lo = int(np.searchsorted(self.base_hashes, h, side="left"))
        hi = int(np.searchsorted(self.base_hashes, h, side="right"))
        for i in range(lo, hi):
            if np.array_equal(self.base_rows[i], row):
                return True
        return False

    def contains(self, row: np.ndarray) -> bool:
        count = 1 if self._in_base(row) else 0
        count += self.delta.get(row.tobytes(), 0)
        return count > 0

    def shift(self, key: bytes, step: int) -> None:
        """Add (+1) or remove (-1) one occurrence of a row, by its bytes."""
        self.delta[key] = self.delta.get(key, 0) + step


class _GoodPool:
    """Uniform sampling with removal over the intact edge ids."""

    def __init__(self, ids: np.ndarray):
        self.arr = ids.astype(np.int64)
        self.size = len(ids)
        self.extra: list[int] = []

    def __len__(self) -> int:
        return self.size + len(self.extra)

    def pick_out(self, rng: np.random.Generator) -> int:
        pos = int(rng.integers(len(self)))
        if pos < self.size:
            val = int(self.arr[pos])
            self.size -= 1
            self.arr[pos] = self.arr[self.size]
            return val
        pos -= self.size
        val = self.extra[pos]
        self.extra[pos] = self.extra[-1]
        self.extra.pop()
        return val

    def put(self, idx: int) -> None:
        self.extra.append(idx)


def indisposition(row: np.ndarray, index: SizeClassIndex) -> int:
    """Defect score: repeated slots plus a collision with an intact edge.

    ``row`` must be sorted.  An intact pool never holds rows with repeats, so
    the collision term can only fire when the repeat count is zero.
    """
    dup = int(np.sum(row[1:] == row[:-1])) if len(row) > 1 else 0
    if dup:
        return dup
    return 1 if index.contains(row) else 0


def _classify(hg: Hypergraph, hash_fn):
    """Split edges into intact and defective; build per-size membership indexes."""
    sizes = hg.sizes()
    classes: dict[int, SizeClassIndex] = {}
    good_parts = []
    bad_parts = []
    for d in np.unique(sizes):
        d = int(d)
        idx = np.nonzero(sizes == d)[0]
        rows = hg.members[hg.offsets[idx][:, None] + np.arange(d, dtype=np.int64)]
        dup = (rows[:, 1:] == rows[:, :-1]).sum(axis=1) if d > 1 else np.zeros(len(idx), dtype=np.int64)
        first = np.ones(len(idx), dtype=bool)
        if len(idx) > 1:
            order = np.lexsort(rows.T[::-1])
            srows = rows[order]
            first_sorted = np.ones(len(idx), dtype=bool)
            first_sorted[1:] = ~(srows[1:] == srows[:-1]).all(axis=1)
            first[order] = first_sorted
        good_mask = (dup == 0) & first
        classes[d] = SizeClassIndex(np.ascontiguousarray(rows[good_mask]), hash_fn)
        good_parts.append(idx[good_mask])
        bad_parts.append(idx[~good_mask])
    good = np.sort(np.concatenate(good_parts)) if good_parts else np.empty(0, dtype=np.int64)
    bad = np.sort(np.concatenate(bad_parts)) if bad_parts else np.empty(0, dtype=np.int64)
    return classes, good, bad


def rewire(hg: Hypergraph, rng: np.random.Generator, *,
           budget_per_bad: int = BUDGET_PER_BAD,
           hash_fn=polynomial_hash) -> int:
    """Repair the hypergraph in place; returns how many defective edges remain.

    Defective edges are processed in a queue; each attempt merges the front
    defective edge with an intact edge picked uniformly at random, shuffles
    the union of their member slots, re-splits into the original two sizes,
    and accepts only if the two results score strictly below the defective
    edge alone.  Rejected attempts are rolled back and the edge re-queued.
    The loop runs at most ``budget_per_bad`` times the initial queue length;
    a nonzero return means the budget ran out.  Member slots within each edge
    stay sorted throughout.

    Raises UnrepairableError when no intact edge is available to merge with.
    """
    classes, good_ids, bad_ids = _classify(hg, hash_fn)
    if len(bad_ids) == 0:
        return 0
    pool = _GoodPool(good_ids)
    bad = deque(int(b) for b in bad_ids)
    budget = budget_per_bad * len(bad)
    offsets = hg.offsets
    members = hg.members

    steps = 0
    while bad and steps < budget:
        steps += 1
        b = bad.popleft()
        row_b = members[offsets[b]: offsets[b + 1]]
        bcls = classes[len(row_b)]
        ib = indisposition(row_b, bcls)
        if ib == 0:
            # a former duplicate whose counterpart has since changed
            bcls.shift(row_b.tobytes(), +1)
            pool.put(b)
            continue
        if len(pool) == 0:
            raise UnrepairableError(
                "no intact edge left to merge with while defective edges remain")
        g = pool.pick_out(rng)
        save_b = row_b.copy()
        save_g = members[offsets[g]: offsets[g + 1]].copy()
        gcls = classes[len(save_g)]

        journal: list[tuple[SizeClassIndex, bytes, int]] = []
        gcls.shift(save_g.tobytes(), -1)
        journal.append((gcls, save_g.tobytes(), -1))

        merged = np.concatenate([save_b, save_g])
        rng.shuffle(merged)
        new_b = np.sort(merged[: len(save_b)])
        new_g = np.sort(merged[len(save_b):])
        members[offsets[b]: offsets[b + 1]] = new_b
        members[offsets[g]: offsets[g + 1]] = new_g

        i1 = indisposition(new_b, bcls)
        if i1 == 0:
            bcls.shift(new_b.tobytes(), +1)
            journal.append((bcls, new_b.tobytes(), +1))
        i2 = indisposition(new_g, gcls)

        if i1 + i2 < ib:
            if i2 == 0:
                gcls.shift(new_g.tobytes(), +1)
                pool.put(g)
            else:
                bad.append(g)
            if i1 == 0:
                pool.put(b)
            else:
                bad.append(b)
        else:
            for cls, key, step in reversed(journal):
                cls.shift(key, -step)
            members[offsets[b]: offsets[b + 1]] = save_b
            members[offsets[g]: offsets[g + 1]] = save_g
            pool.put(g)
            bad.append(b)
    return len(bad)
