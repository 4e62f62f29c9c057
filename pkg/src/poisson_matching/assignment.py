"""Exact min-cost bipartite matchings on finite point sets.

The scaled solver delegates to scipy's shortest-augmenting-path assignment
routine; the factorial brute-force enumerator is kept fully independent as
the oracle. Cost ties (within EPS_TIE) are broken toward the edge list that
is lexicographically earliest in point coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

FORMAT_VERSION = 1
EPS_TIE = 1e-9
BRUTE_FORCE_MAX = 9

TWO_COLOR = "two_color"
ONE_COLOR = "one_color"


@dataclass
class Matching:
    """Edges between a red and a blue point list (or red-red pairs when
    color_mode is ONE_COLOR). Partial matchings may leave points unmatched."""

    reds: np.ndarray
    blues: np.ndarray
    edges: List[Tuple[int, int]]
    kind: str = "perfect"  # "perfect" | "partial"
    color_mode: str = TWO_COLOR
    unmatched_reds: List[int] = field(default_factory=list)
    unmatched_blues: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.reds = np.asarray(self.reds, dtype=float).reshape(-1, 2)
        self.blues = np.asarray(self.blues, dtype=float).reshape(-1, 2)
        seen_r, seen_b = set(), set()
        rs = self.reds
        bs = self.blues if self.color_mode == TWO_COLOR else self.reds
        for i, j in self.edges:
            if not (0 <= i < len(rs) and 0 <= j < len(bs)):
                raise ValueError(f"edge ({i},{j}) out of range")
            if i in seen_r or j in seen_b:
                raise ValueError("a point appears in two edges")
            seen_r.add(i)
            seen_b.add(j)
        if self.kind == "perfect" and self.color_mode == TWO_COLOR:
            if len(self.edges) != len(self.reds) or len(self.edges) != len(self.blues):
                raise ValueError("perfect matching must cover all points")

    def endpoint_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        bs = self.blues if self.color_mode == TWO_COLOR else self.reds
        if not self.edges:
            return np.empty((0, 2)), np.empty((0, 2))
        e = np.asarray(self.edges, dtype=int)
        return self.reds[e[:, 0]], bs[e[:, 1]]

    @property
    def total_length(self) -> float:
        p, q = self.endpoint_arrays()
        if not len(p):
            return 0.0
        return float(np.hypot(*(p - q).T).sum())

    def edge_length(self, k: int) -> float:
        bs = self.blues if self.color_mode == TWO_COLOR else self.reds
        i, j = self.edges[k]
        return float(math.hypot(*(self.reds[i] - bs[j])))

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "kind": self.kind,
            "color_mode": self.color_mode,
            "edges": [[int(i), int(j)] for i, j in self.edges],
            "total_length": self.total_length,
            "unmatched_reds": [int(i) for i in self.unmatched_reds],
            "unmatched_blues": [int(i) for i in self.unmatched_blues],
        }

    @staticmethod
    def from_json(d: dict, reds, blues) -> "Matching":
        return Matching(
            reds=reds,
            blues=blues,
            edges=[tuple(e) for e in d["edges"]],
            kind=d["kind"],
            color_mode=d.get("color_mode", TWO_COLOR),
            unmatched_reds=list(d.get("unmatched_reds", [])),
            unmatched_blues=list(d.get("unmatched_blues", [])),
        )


def _cost_matrix(reds: np.ndarray, blues: np.ndarray) -> np.ndarray:
    diff = reds[:, None, :] - blues[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _edges_cost(cost: np.ndarray, assign: np.ndarray) -> float:
    return float(cost[np.arange(len(assign)), assign].sum())


def _lex_key(reds: np.ndarray, blues: np.ndarray, assign) -> tuple:
    """Edge list ordered by red coordinates; key is the partner sequence."""
    order = np.lexsort((reds[:, 1], reds[:, 0]))
    return tuple((blues[assign[i]][0], blues[assign[i]][1]) for i in order)


def _canonicalize_ties(reds, blues, cost, assign) -> np.ndarray:
    """Pairwise-swap pass: among cost-preserving 2-swaps prefer the
    lexicographically earlier partner sequence. Random-real inputs have no
    ties, so this only matters for handcrafted configurations."""
    assign = assign.copy()
    n = len(assign)
    order = np.lexsort((reds[:, 1], reds[:, 0]))
    changed = True
    while changed:
        changed = False
        for ai in range(n):
            for aj in range(ai + 1, n):
                i, j = order[ai], order[aj]
                cur = cost[i, assign[i]] + cost[j, assign[j]]
                alt = cost[i, assign[j]] + cost[j, assign[i]]
                if abs(alt - cur) <= EPS_TIE:
                    pi = tuple(blues[assign[i]])
                    pj = tuple(blues[assign[j]])
                    if pj < pi:
                        assign[i], assign[j] = assign[j], assign[i]
                        changed = True
    return assign


def min_cost_perfect(reds, blues) -> Matching:
    """Perfect matching of minimum total Euclidean length."""
    reds = np.asarray(reds, dtype=float).reshape(-1, 2)
    blues = np.asarray(blues, dtype=float).reshape(-1, 2)
    if len(reds) != len(blues):
        raise ValueError(f"size mismatch: {len(reds)} reds vs {len(blues)} blues")
    if len(reds) == 0:
        return Matching(reds, blues, [], kind="perfect")
    cost = _cost_matrix(reds, blues)
    rows, cols = linear_sum_assignment(cost)
    assign = np.empty(len(reds), dtype=int)
    assign[rows] = cols
    assign = _canonicalize_ties(reds, blues, cost, assign)
    return Matching(reds, blues, [(i, int(assign[i])) for i in range(len(reds))],
                    kind="perfect")


def brute_force_min(reds, blues) -> Matching:
    """Exhaustive minimum over all permutations; independent oracle."""
    reds = np.asarray(reds, dtype=float).reshape(-1, 2)
    blues = np.asarray(blues, dtype=float).reshape(-1, 2)
    n = len(reds)
    if n != len(blues):
        raise ValueError("size mismatch")
    if n > BRUTE_FORCE_MAX:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX}")
    if n == 0:
        return Matching(reds, blues, [], kind="perfect")
    cost = _cost_matrix(reds, blues)
    rows = cost.tolist()  # plain-float rows keep the n! loop cheap
    best = None
    best_cost = math.inf
    best_key = None
    for perm in itertools.permutations(range(n)):
        c = 0.0
        for i, j in enumerate(perm):
            c += rows[i][j]
        if c < best_cost - EPS_TIE:
            best, best_cost = perm, c
            best_key = _lex_key(reds, blues, perm)
        elif c <= best_cost + EPS_TIE:
            best_cost = min(best_cost, c)
            key = _lex_key(reds, blues, perm)
            if best_key is None or key < best_key:
                best, best_key = perm, key
    return Matching(reds, blues, [(i, int(best[i])) for i in range(n)], kind="perfect")


def min_cost_all_blue(reds, blues) -> Matching:
    """Min-length partial matching of maximum cardinality with every blue
    point matched; requires at least as many reds as blues."""
    reds = np.asarray(reds, dtype=float).reshape(-1, 2)
    blues = np.asarray(blues, dtype=float).reshape(-1, 2)
    if len(reds) < len(blues):
        raise ValueError("need |reds| >= |blues|")
    if len(blues) == 0:
        return Matching(reds, blues, [], kind="partial",
                        unmatched_reds=list(range(len(reds))))
    cost = _cost_matrix(blues, reds)  # rows = blues (the saturated side)
    rows, cols = linear_sum_assignment(cost)
    edges = sorted((int(r), int(b)) for b, r in zip(rows, cols))
    used = {r for r, _ in edges}
    return Matching(
        reds, blues, edges,
        kind="partial" if len(blues) < len(reds) else "perfect",
        unmatched_reds=[i for i in range(len(reds)) if i not in used],
    )


def max_cardinality_min_cost(reds, blues) -> Matching:
    """Min-length matching of maximum cardinality; the smaller color class is
    fully matched and the excess of the other is left unmatched."""
    reds = np.asarray(reds, dtype=float).reshape(-1, 2)
    blues = np.asarray(blues, dtype=float).reshape(-1, 2)
    if len(reds) == 0 or len(blues) == 0:
        return Matching(reds, blues, [], kind="partial",
                        unmatched_reds=list(range(len(reds))),
                        unmatched_blues=list(range(len(blues))))
    cost = _cost_matrix(reds, blues)
    rows, cols = linear_sum_assignment(cost)
    edges = sorted((int(i), int(j)) for i, j in zip(rows, cols))
    used_r = {i for i, _ in edges}
    used_b = {j for _, j in edges}
    return Matching(
        reds, blues, edges,
        kind="perfect" if len(reds) == len(blues) else "partial",
        unmatched_reds=[i for i in range(len(reds)) if i not in used_r],
        unmatched_blues=[j for j in range(len(blues)) if j not in used_b],
    )


def improvable_pair(m: Matching) -> Optional[Tuple[int, int]]:
    """First edge pair (scan order) whose partner swap strictly shortens the
    matching by more than EPS_TIE; None is necessary for minimality."""
    bs = m.blues if m.color_mode == TWO_COLOR else m.reds
    for a in range(len(m.edges)):
        i, j = m.edges[a]
        for b in range(a + 1, len(m.edges)):
            u, v = m.edges[b]
            cur = math.hypot(*(m.reds[i] - bs[j])) + math.hypot(*(m.reds[u] - bs[v]))
            alt = math.hypot(*(m.reds[i] - bs[v])) + math.hypot(*(m.reds[u] - bs[j]))
            if alt < cur - EPS_TIE:
                return (a, b)
    return None
