"""Cost construction, optimal assignment, and similarity gating."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Rectangular matrices are padded square with this constant.  Padded rows
# and columns contribute a fixed total whatever the solver picks, so the
# value never changes which real pairs win; it only needs to be a valid
# finite cost.  4.0 sits above the largest cost reachable from a
# similarity in [-1, 1].
PAD_COST = 4.0


@dataclass
class Assignment:
    """One-to-one matching outcome between track rows and detection columns."""

    pairs: list[tuple[int, int]] = field(default_factory=list)
    unmatched_tracks: list[int] = field(default_factory=list)
    unmatched_detections: list[int] = field(default_factory=list)


def similarity_matrix(prototypes: np.ndarray, embeddings: np.ndarray) -> np.ndarray:
    """Dot-product similarity of every prototype row against every embedding row.

    Both arguments are (n, d) arrays of unit-norm rows; entry (i, j) is
    the cosine similarity of prototype i and embedding j.
    """
    p = np.asarray(prototypes, dtype=np.float64)
    e = np.asarray(embeddings, dtype=np.float64)
    if p.ndim != 2 or e.ndim != 2:
        raise ValueError("similarity_matrix expects 2-d arrays")
    if p.shape[1] != e.shape[1]:
        raise ValueError(f"dimension mismatch: {p.shape[1]} vs {e.shape[1]}")
    return p @ e.T


def cost_from_similarity(similarity: np.ndarray) -> np.ndarray:
    """Turn similarities into assignment costs via cost = 1 - similarity."""
    s = np.asarray(similarity, dtype=np.float64)
    if not np.all(np.isfinite(s)):
        raise ValueError("invalid cost: non-finite similarity entry")
    return 1.0 - s


def hungarian(cost: np.ndarray) -> Assignment:
    """Minimum-total-cost one-to-one assignment over a cost matrix.

    Rectangular matrices are supported: exactly min(rows, cols) pairs are
    produced and the surplus rows or columns are reported unmatched.
    The solver is deterministic; ties between equally cheap optima
    resolve toward lower row and column indices.

    Args:
        cost: (rows, cols) matrix of finite costs.

    Returns:
        Assignment with pairs sorted by row index and unmatched index
        lists sorted ascending.

    Raises:
        ValueError: on an empty matrix or any NaN / non-finite entry.
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] == 0 or c.shape[1] == 0:
        raise ValueError("cost matrix must be 2-d and non-empty")
    if np.isnan(c).any():
        raise ValueError("invalid cost: NaN entry")
    if not np.all(np.isfinite(c)):
        raise ValueError("invalid cost: non-finite entry")
    rows, cols = c.shape
    n = max(rows, cols)
    padded = np.full((n, n), PAD_COST)
    padded[:rows, :cols] = c
    col_of_row = _solve_square(padded.tolist(), n)
    pairs = []
    matched_cols = set()
    for i in range(rows):
        j = col_of_row[i]
        if j < cols:
            pairs.append((i, j))
            matched_cols.add(j)
    matched_rows = {i for i, _ in pairs}
    return Assignment(
        pairs=sorted(pairs),
        unmatched_tracks=[i for i in range(rows) if i not in matched_rows],
        unmatched_detections=[j for j in range(cols) if j not in matched_cols],
    )


def _solve_square(cost: list[list[float]], n: int) -> list[int]:
    """Exact O(n^3) square solver; returns the column chosen for each row.

    Shortest augmenting path formulation with row/column potentials.
    Rows are inserted in ascending order and column scans run ascending
    with strict improvement, which fixes the tie-breaking order.
    """
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row owning column j, 1-based, 0 = free
    parent = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [math.inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            row = cost[i0 - 1]
            delta = math.inf
            j1 = -1
            for j in range(1, n + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    parent[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = parent[j0]
            match[j0] = match[j1]
            j0 = j1
    col_of_row = [0] * n
    for j in range(1, n + 1):
        if match[j]:
            col_of_row[match[j] - 1] = j - 1
    return col_of_row


def gate_assignment(assignment: Assignment, similarity: np.ndarray, tau_s: float) -> Assignment:
    """Reject matched pairs whose similarity falls below the gate.

    A pair with similarity exactly tau_s survives; strictly below is
    rejected and both its track and detection move to the unmatched
    lists.  Unmatched entries of the input are carried through.
    """
    s = np.asarray(similarity, dtype=np.float64)
    kept = []
    freed_tracks = []
    freed_dets = []
    for ti, dj in assignment.pairs:
        if s[ti, dj] < tau_s:
            freed_tracks.append(ti)
            freed_dets.append(dj)
        else:
            kept.append((ti, dj))
    return Assignment(
        pairs=kept,
        unmatched_tracks=sorted(assignment.unmatched_tracks + freed_tracks),
        unmatched_detections=sorted(assignment.unmatched_detections + freed_dets),
    )
