"""Independent brute-force oracles for rectangular grid partitions.

Deliberately implemented with unit-coverage counting and BFS flood fill so
they share no code path with the union-find grid builder they check.
"""

from __future__ import annotations

from collections import deque


def check_rectangular_partition(n_rows: int, n_cols: int, spans) -> tuple[bool, str]:
    """Every grid unit must be covered by exactly one span."""
    counts = [[0] * n_cols for _ in range(n_rows)]
    for r0, r1, c0, c1 in spans:
        if not (0 <= r0 < r1 <= n_rows and 0 <= c0 < c1 <= n_cols):
            return False, f"span ({r0},{r1},{c0},{c1}) out of bounds"
        for r in range(r0, r1):
            for c in range(c0, c1):
                counts[r][c] += 1
    for r in range(n_rows):
        for c in range(n_cols):
            if counts[r][c] != 1:
                return False, f"unit ({r},{c}) covered {counts[r][c]} times"
    return True, ""


def partition_from_edge_maps(n_rows, n_cols, h_edges, v_edges):
    """Expected partition for given edge-presence maps, or None if invalid.

    ``h_edges[i][c]`` is True when the separator between units (i, c) and
    (i+1, c) is present; ``v_edges[r][j]`` likewise between (r, j) and
    (r, j+1). Units connected across absent edges are flood-filled into
    groups; the partition is valid only if every group fills its bounding
    rectangle exactly.
    """
    seen = [[False] * n_cols for _ in range(n_rows)]
    spans = []
    for sr in range(n_rows):
        for sc in range(n_cols):
            if seen[sr][sc]:
                continue
            group = []
            queue = deque([(sr, sc)])
            seen[sr][sc] = True
            while queue:
                r, c = queue.popleft()
                group.append((r, c))
                if r + 1 < n_rows and not h_edges[r][c] and not seen[r + 1][c]:
                    seen[r + 1][c] = True
                    queue.append((r + 1, c))
                if r - 1 >= 0 and not h_edges[r - 1][c] and not seen[r - 1][c]:
                    seen[r - 1][c] = True
                    queue.append((r - 1, c))
                if c + 1 < n_cols and not v_edges[r][c] and not seen[r][c + 1]:
                    seen[r][c + 1] = True
                    queue.append((r, c + 1))
                if c - 1 >= 0 and not v_edges[r][c - 1] and not seen[r][c - 1]:
                    seen[r][c - 1] = True
                    queue.append((r, c - 1))
            r0 = min(r for r, _ in group)
            r1 = max(r for r, _ in group) + 1
            c0 = min(c for _, c in group)
            c1 = max(c for _, c in group) + 1
            if len(group) != (r1 - r0) * (c1 - c0):
                return None
            spans.append((r0, r1, c0, c1))
    # a group might fill its own bounding box yet overlap another group's box
    ok, _ = check_rectangular_partition(n_rows, n_cols, spans)
    return tuple(sorted(spans)) if ok else None
