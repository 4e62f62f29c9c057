"""Line and strip constructions driven by the red-minus-blue counting walk.

The walk steps up at red x-coordinates and down at blue ones, anchored to 0
at the window's left edge. Zero sets, cut-times and excursions of this walk
drive the zero-block, cut-time and excursion matchings; nesting depths and
lowest intervening points give heights for non-crossing polygonal arcs.

Finite-window truncation policy: rules defined via inf/sup over the whole
real line are restricted to the window, and points they leave unresolved
(open excursions, points outside the outermost zeros or cut-times) stay
unmatched and are flagged, never force-matched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .assignment import (EPS_TIE, Matching, ONE_COLOR, brute_force_min,
                         min_cost_all_blue, min_cost_perfect)
from .geometry import LINE, STRIP, Segment, Point
from .sampling import ColoredPointSet, derived_rng
from .verify import VerificationReport


@dataclass
class StepWalk:
    """Piecewise-constant right-continuous walk: sorted jump locations with
    +/-1 signs, value 0 at the window's left edge."""

    xs: np.ndarray
    signs: np.ndarray
    x_left: float
    base: int = 0

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.signs = np.asarray(self.signs, dtype=int)
        if len(self.xs) > 1 and not (np.diff(self.xs) > 0).all():
            raise ValueError("jump locations must be strictly increasing")

    @property
    def values(self) -> np.ndarray:
        """Walk value immediately after each jump."""
        return self.base + np.cumsum(self.signs)

    def value(self, t: float) -> int:
        """F(t): right-continuous, so jumps at t are included."""
        k = int(np.searchsorted(self.xs, t, side="right"))
        return self.base + int(self.signs[:k].sum())

    def value_left(self, t: float) -> int:
        """F(t-): limit from the left."""
        k = int(np.searchsorted(self.xs, t, side="left"))
        return self.base + int(self.signs[:k].sum())


def build_walk(ps: ColoredPointSet) -> StepWalk:
    if ps.domain.kind not in (LINE, STRIP):
        raise ValueError("walk requires a line or strip domain")
    xs = np.concatenate([ps.reds[:, 0], ps.blues[:, 0]])
    signs = np.concatenate([np.ones(ps.n_red, int), -np.ones(ps.n_blue, int)])
    order = np.argsort(xs, kind="stable")
    xs, signs = xs[order], signs[order]
    if len(xs) > 1 and (np.diff(xs) == 0).any():
        raise ValueError("duplicate x-coordinates (probability-zero event)")
    return StepWalk(xs, signs, x_left=ps.domain.x0)


def _points_in_interval(pts: np.ndarray, lo: float, hi: float,
                        left_open: bool = True) -> np.ndarray:
    """Indices of points with x in (lo, hi] (the between-zeros convention)."""
    if not len(pts):
        return np.empty(0, dtype=int)
    x = pts[:, 0]
    mask = (x > lo) & (x <= hi) if left_open else (x >= lo) & (x < hi)
    return np.nonzero(mask)[0]


def zero_block_matching(ps: ColoredPointSet) -> Matching:
    """Split the window at the walk's return-to-zero locations and take the
    min-length perfect matching inside each balanced block. Points to the
    right of the last zero are left unmatched."""
    walk = build_walk(ps)
    vals = walk.values
    zero_xs = walk.xs[vals == 0]  # steps are +/-1, so the prior value is nonzero
    boundaries = [ps.domain.x0] + list(zero_xs)
    edges: List[Tuple[int, int]] = []
    for lo, hi in zip(boundaries, boundaries[1:]):
        ridx = _points_in_interval(ps.reds, lo, hi)
        bidx = _points_in_interval(ps.blues, lo, hi)
        if len(ridx) != len(bidx):
            raise AssertionError("zero block is not balanced")
        sub = min_cost_perfect(ps.reds[ridx], ps.blues[bidx])
        edges.extend((int(ridx[i]), int(bidx[j])) for i, j in sub.edges)
    matched_r = {i for i, _ in edges}
    matched_b = {j for _, j in edges}
    un_r = [i for i in range(ps.n_red) if i not in matched_r]
    un_b = [j for j in range(ps.n_blue) if j not in matched_b]
    return Matching(ps.reds, ps.blues, sorted(edges),
                    kind="perfect" if not (un_r or un_b) else "partial",
                    unmatched_reds=un_r, unmatched_blues=un_b)


def one_color_pairing(ps: ColoredPointSet, coin: int) -> Matching:
    """Pair x-consecutive red points; the coin selects one of the two phase
    classes. Leftover endpoint reds stay unmatched (window truncation)."""
    if coin not in (0, 1):
        raise ValueError("coin must be 0 or 1")
    n = ps.n_red
    edges = [(i, i + 1) for i in range(coin, n - 1, 2)]
    used = {k for e in edges for k in e}
    return Matching(ps.reds, ps.blues, edges, kind="partial",
                    color_mode=ONE_COLOR,
                    unmatched_reds=[i for i in range(n) if i not in used])


def cut_times(walk: StepWalk) -> np.ndarray:
    """Jump locations where the walk's past supremum equals its value just
    before the jump and its future infimum equals its value at the jump."""
    vals = walk.values
    if not len(vals):
        return np.empty(0)
    prev = np.concatenate([[walk.base], vals[:-1]])
    past_sup = np.maximum.accumulate(np.concatenate([[walk.base], vals]))[:-1]
    future_inf = np.minimum.accumulate(vals[::-1])[::-1]
    mask = (walk.signs == 1) & (past_sup == prev) & (future_inf == vals)
    return walk.xs[mask]


def cut_time_matching(ps: ColoredPointSet) -> Matching:
    """Between consecutive cut-times each block holds strictly more reds than
    blues; match all its blues at minimum length. Points outside the outermost
    cut-times stay unmatched."""
    walk = build_walk(ps)
    cuts = cut_times(walk)
    edges: List[Tuple[int, int]] = []
    for lo, hi in zip(cuts, cuts[1:]):
        ridx = _points_in_interval(ps.reds, lo, hi)
        bidx = _points_in_interval(ps.blues, lo, hi)
        if len(ridx) <= len(bidx):
            raise AssertionError("cut block must have a strict red excess")
        sub = min_cost_all_blue(ps.reds[ridx], ps.blues[bidx])
        edges.extend((int(ridx[i]), int(bidx[j])) for i, j in sub.edges)
    matched_r = {i for i, _ in edges}
    matched_b = {j for _, j in edges}
    return Matching(ps.reds, ps.blues, sorted(edges), kind="partial",
                    unmatched_reds=[i for i in range(ps.n_red) if i not in matched_r],
                    unmatched_blues=[j for j in range(ps.n_blue) if j not in matched_b])


def excursion_matching(ps: ColoredPointSet) -> Matching:
    """Match each red to the blue ending its upward excursion: the first
    point to the right where the walk returns to its pre-red level. Edge
    x-intervals are pairwise disjoint or nested (bracket matching)."""
    walk = build_walk(ps)
    red_at = {float(x): i for i, x in enumerate(ps.reds[:, 0])}
    blue_at = {float(x): j for j, x in enumerate(ps.blues[:, 0])}
    stack: List[int] = []
    edges: List[Tuple[int, int]] = []
    orphan_blues: List[int] = []
    for x, s in zip(walk.xs, walk.signs):
        if s == 1:
            stack.append(red_at[float(x)])
        else:
            j = blue_at[float(x)]
            if stack:
                edges.append((stack.pop(), j))
            else:
                orphan_blues.append(j)  # excursion opened left of the window
    un_r = sorted(stack)  # excursions not closed within the window
    return Matching(ps.reds, ps.blues, sorted(edges),
                    kind="perfect" if not (un_r or orphan_blues) else "partial",
                    unmatched_reds=un_r, unmatched_blues=sorted(orphan_blues))


@dataclass
class ArcSpec:
    """Four-vertex polyline joining a matched pair below all intervening
    arcs: down from the red to height H, across, and up to the blue, where
    H = (lowest intervening point height) / (maximum nesting depth)."""

    edge: Tuple[int, int]
    height: float
    lowest: float
    depth: int
    vertices: List[Tuple[float, float]]

    def segments(self) -> List[Segment]:
        segs = []
        for a, b in zip(self.vertices, self.vertices[1:]):
            if a != b:
                segs.append(Segment(Point(*a), Point(*b)))
        return segs

    def to_json(self) -> dict:
        return {
            "edge": [int(self.edge[0]), int(self.edge[1])],
            "height": self.height,
            "lowest": self.lowest,
            "depth": self.depth,
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
        }


def polygonal_arcs(m: Matching, ps: ColoredPointSet) -> List[ArcSpec]:
    """Arcs for an excursion matching on the strip; pairwise disjoint."""
    walk = build_walk(ps)
    vals = walk.values
    allpts = np.concatenate([ps.reds, ps.blues]) if ps.n_red + ps.n_blue else np.empty((0, 2))
    arcs = []
    for (i, j) in m.edges:
        r = ps.reds[i]
        b = ps.blues[j]
        x_lo, x_hi = r[0], b[0]
        if x_lo > x_hi:
            raise ValueError("excursion edges run left to right")
        between = allpts[(allpts[:, 0] >= x_lo) & (allpts[:, 0] <= x_hi)]
        lowest = float(between[:, 1].min())
        k_lo = int(np.searchsorted(walk.xs, x_lo, side="left"))
        k_hi = int(np.searchsorted(walk.xs, x_hi, side="right"))
        base_level = walk.value_left(x_lo)
        depth = int(vals[k_lo:k_hi].max() - base_level)
        if depth < 1:
            raise AssertionError("edge interval must contain the red's up-step")
        h = lowest / depth
        arcs.append(ArcSpec(
            edge=(i, j), height=h, lowest=lowest, depth=depth,
            vertices=[(float(r[0]), float(r[1])), (float(r[0]), h),
                      (float(b[0]), h), (float(b[0]), float(b[1]))],
        ))
    return arcs


@dataclass
class CrossingProfile:
    """Piecewise-constant count of edges covering each location on the line."""

    breakpoints: np.ndarray
    values: np.ndarray  # len(breakpoints) - 1 interval values

    def integral(self) -> float:
        widths = np.diff(self.breakpoints)
        return float((widths * self.values).sum())

    def value_at(self, t: float) -> int:
        if t <= self.breakpoints[0] or t >= self.breakpoints[-1]:
            return 0
        k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        return int(self.values[k])


def crossing_profile(m: Matching) -> CrossingProfile:
    """h(t) = number of matched intervals covering t; its integral equals the
    total edge length of a line matching."""
    if not m.edges:
        return CrossingProfile(np.asarray([0.0, 0.0]), np.asarray([], dtype=int))
    bs = m.blues if m.color_mode == "two_color" else m.reds
    lo = np.minimum(m.reds[[i for i, _ in m.edges], 0], bs[[j for _, j in m.edges], 0])
    hi = np.maximum(m.reds[[i for i, _ in m.edges], 0], bs[[j for _, j in m.edges], 0])
    breaks = np.unique(np.concatenate([lo, hi]))
    mids = (breaks[:-1] + breaks[1:]) / 2
    values = ((lo[None, :] <= mids[:, None]) & (mids[:, None] <= hi[None, :])).sum(axis=1)
    return CrossingProfile(breaks, values.astype(int))


def minimality_certificate_d1(m: Matching, ps: ColoredPointSet, k: int,
                              trials: int, seed: int = 0) -> VerificationReport:
    """Check random k-subsets of edges against the brute-force rematch
    minimum; a violating subset witnesses non-minimality."""
    if k > 8:
        raise ValueError("k <= 8 (factorial oracle)")
    rng = derived_rng(seed, 91)
    violations = []
    n_edges = len(m.edges)
    for t in range(trials):
        size = min(k, n_edges)
        if size == 0:
            break
        idx = rng.choice(n_edges, size=size, replace=False)
        ridx = [m.edges[a][0] for a in idx]
        bidx = [m.edges[a][1] for a in idx]
        own = sum(m.edge_length(a) for a in idx)
        best = brute_force_min(ps.reds[ridx], ps.blues[bidx]).total_length
        if own > best + EPS_TIE:
            violations.append({
                "trial": t,
                "edges": sorted(int(a) for a in idx),
                "cost": own,
                "minimum": best,
            })
    return VerificationReport(
        property_name="minimality_d1",
        trials=trials,
        violations=violations,
    )


def laminate_strips(results: Sequence[Tuple[ColoredPointSet, Matching, Optional[List[ArcSpec]]]],
                    shift: float) -> Tuple[ColoredPointSet, Matching, List[ArcSpec]]:
    """Stack independent strip constructions into unit-height plane bands and
    apply a global vertical shift. Bands are disjoint, so per-band planarity
    and arc-disjointness carry over."""
    if not 0.0 <= shift < 1.0:
        raise ValueError("shift must lie in [0, 1)")
    if not results:
        raise ValueError("need at least one strip result")
    x0 = results[0][0].domain.x0
    x1 = results[0][0].domain.x1
    reds, blues, edges, arcs = [], [], [], []
    red_off = blue_off = 0
    from .geometry import Domain
    for band, (ps, m, band_arcs) in enumerate(results):
        if ps.domain.kind != STRIP or (ps.domain.x0, ps.domain.x1) != (x0, x1):
            raise ValueError("all bands must share the same strip window")
        dy = band + shift
        reds.append(ps.reds + [0.0, dy])
        blues.append(ps.blues + [0.0, dy])
        edges.extend((i + red_off, j + blue_off) for i, j in m.edges)
        for arc in band_arcs or []:
            arcs.append(ArcSpec(
                edge=(arc.edge[0] + red_off, arc.edge[1] + blue_off),
                height=arc.height + dy, lowest=arc.lowest + dy, depth=arc.depth,
                vertices=[(x, y + dy) for x, y in arc.vertices],
            ))
        red_off += ps.n_red
        blue_off += ps.n_blue
    red_arr = np.concatenate(reds) if reds else np.empty((0, 2))
    blue_arr = np.concatenate(blues) if blues else np.empty((0, 2))
    # Re-sort into the canonical (x, y) order and remap indices.
    r_order = np.lexsort((red_arr[:, 1], red_arr[:, 0]))
    b_order = np.lexsort((blue_arr[:, 1], blue_arr[:, 0]))
    r_map = {int(old): new for new, old in enumerate(r_order)}
    b_map = {int(old): new for new, old in enumerate(b_order)}
    domain = Domain.plane(x0, x1, shift, len(results) + shift)
    combined = ColoredPointSet(domain, red_arr[r_order], blue_arr[b_order],
                               seed=results[0][0].seed)
    new_edges = sorted((r_map[i], b_map[j]) for i, j in edges)
    matched_r = {i for i, _ in new_edges}
    matched_b = {j for _, j in new_edges}
    matching = Matching(
        combined.reds, combined.blues, new_edges,
        kind="perfect" if len(new_edges) == combined.n_red == combined.n_blue else "partial",
        unmatched_reds=[i for i in range(combined.n_red) if i not in matched_r],
        unmatched_blues=[j for j in range(combined.n_blue) if j not in matched_b],
    )
    for arc in arcs:
        arc.edge = (r_map[arc.edge[0]], b_map[arc.edge[1]])
    return combined, matching, arcs
