"""Canonical labelling of decorated multigraphs (colour refinement + backtracking)."""

from __future__ import annotations

from typing import Hashable, Sequence


def _refine(colors: list[int], adj: list[dict[int, int]]) -> list[int]:
    # iterate until the partition stops splitting; colour ids stay canonical
    while True:
        sigs = [
            (colors[v], tuple(sorted((colors[u], c) for u, c in adj[v].items())))
            for v in range(len(colors))
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _twins(u: int, v: int, labels, adj) -> bool:
    if labels[u] != labels[v]:
        return False
    au = {w: c for w, c in adj[u].items() if w != v}
    av = {w: c for w, c in adj[v].items() if w != u}
    return au == av


def canonical_order(labels: Sequence[Hashable], adj: list[dict[int, int]]) -> tuple[tuple, list[int]]:
    """Return (certificate, vertex order) minimal over all refinement leaves.

    ``labels[v]`` is any sortable decoration, ``adj[v]`` maps neighbours
    (loops excluded) to edge multiplicities.
    """
    k = len(labels)
    if k == 0:
        return ((), ()), []
    ranks = {s: i for i, s in enumerate(sorted(set(labels)))}
    start = _refine([ranks[s] for s in labels], adj)
    best: list = [None, None]

    def certificate(order: list[int]):
        pos = {v: i for i, v in enumerate(order)}
        verts = tuple(labels[v] for v in order)
        edges = tuple(sorted(
            (min(pos[v], pos[u]), max(pos[v], pos[u]), c)
            for v in range(k) for u, c in adj[v].items() if v < u
        ))
        return (verts, edges)

    def search(colors: list[int]) -> None:
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1:
                target = c
                break
        if target is None:
            order = sorted(range(k), key=lambda v: colors[v])
            cert = certificate(order)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, order
            return
        reps: list[int] = []
        for v in cells[target]:
            if any(_twins(v, r, labels, adj) for r in reps):
                continue
            reps.append(v)
        for v in reps:
            ind = [2 * c + (0 if u == v else 1) for u, c in enumerate(colors)]
            search(_refine(ind, adj))

    search(start)
    return best[0], best[1]
