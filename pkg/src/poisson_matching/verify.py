"""Property verifiers and quantitative estimators.

Verification reports carry explicit violation witnesses; statistics reports
(average edge length, crossing counts) are diagnostics and never assert
infinite-volume claims.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from .assignment import Matching, min_cost_perfect
from .geometry import (EPS_GEOM, Point, Rect, Region, Segment,
                       edge_crosses_region, segments_intersect)
from .sampling import ColoredPointSet, derived_rng

FORMAT_VERSION = 1


@dataclass
class VerificationReport:
    property_name: str
    trials: int
    violations: List = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "property": self.property_name,
            "trials": self.trials,
            "pass": self.passed,
            "violations": self.violations,
        }


@dataclass
class StatsReport:
    name: str
    payload: dict

    def to_json(self) -> dict:
        return {"format": FORMAT_VERSION, "name": self.name, **self.payload}


def _matching_segments(m: Matching) -> List[Segment]:
    p, q = m.endpoint_arrays()
    return [Segment(Point(*a), Point(*b)) for a, b in zip(p, q)]


def _pairwise_hits(segs: Sequence[Segment], skip_same_group=None) -> List[Tuple[int, int]]:
    """All-pairs closed-segment intersections, with a vectorized orientation
    prefilter and scalar confirmation of near-degenerate candidates."""
    n = len(segs)
    if n < 2:
        return []
    P = np.asarray([[s.a.x, s.a.y] for s in segs])
    Q = np.asarray([[s.b.x, s.b.y] for s in segs])

    def cross3(A, B, C):
        return ((B[:, None, 0] - A[:, None, 0]) * (C[None, :, 1] - A[:, None, 1])
                - (B[:, None, 1] - A[:, None, 1]) * (C[None, :, 0] - A[:, None, 0]))

    d1 = cross3(P, Q, P)  # orient(Pi,Qi,Pj)
    d2 = cross3(P, Q, Q)

    def sgn(d):
        return (d > EPS_GEOM).astype(np.int8) - (d < -EPS_GEOM).astype(np.int8)

    s1, s2 = sgn(d1), sgn(d2)
    s3, s4 = s1.T, s2.T
    proper = (s1 * s2 == -1) & (s3 * s4 == -1)
    touchy = (s1 == 0) | (s2 == 0) | (s3 == 0) | (s4 == 0)
    candidate = proper | touchy
    hits = []
    ii, jj = np.nonzero(np.triu(candidate, k=1))
    for i, j in zip(ii.tolist(), jj.tolist()):
        if skip_same_group is not None and skip_same_group[i] == skip_same_group[j]:
            continue
        if segments_intersect(segs[i], segs[j]):
            hits.append((i, j))
    return hits


def check_planarity(m: Matching, arcs=None) -> VerificationReport:
    """All-pairs edge intersection scan; witnesses are intersecting pairs.

    When ``arcs`` is given the edges are taken with their polygonal-arc
    geometry (the planar drawing of nested strip matchings) instead of
    straight chords; segments belonging to the same edge are exempt.
    """
    if arcs is None:
        segs = _matching_segments(m)
        hits = _pairwise_hits(segs)
        n_pairs = len(segs) * (len(segs) - 1) // 2
    else:
        segs, owner = [], []
        for k, arc in enumerate(arcs):
            for s in arc.segments():
                segs.append(s)
                owner.append(k)
        raw = _pairwise_hits(segs, skip_same_group=owner)
        hits = sorted({(owner[i], owner[j]) for i, j in raw})
        n_pairs = len(arcs) * (len(arcs) - 1) // 2
    return VerificationReport(
        property_name="planarity",
        trials=n_pairs,
        violations=[{"edges": [i, j]} for i, j in hits],
    )


def check_arc_disjointness(arcs) -> VerificationReport:
    """Pairwise intersection scan over all polyline segments of all arcs;
    segments of the same arc are exempt (they share vertices)."""
    segs: List[Segment] = []
    owner: List[int] = []
    for k, arc in enumerate(arcs):
        for s in arc.segments():
            segs.append(s)
            owner.append(k)
    hits = _pairwise_hits(segs, skip_same_group=owner)
    return VerificationReport(
        property_name="arc_disjointness",
        trials=len(segs) * (len(segs) - 1) // 2,
        violations=[{"arcs": [owner[i], owner[j]]} for i, j in hits],
    )


@dataclass(frozen=True)
class ChernoffParams:
    lam: float
    mu: float

    def __post_init__(self):
        if not (0 < self.mu <= self.lam):
            raise ValueError("need 0 < mu <= lam")


def chernoff_bound(p: ChernoffParams) -> float:
    """exp(-mu^2 / (6 lam)), the tail bound for P(X - X' >= Y)."""
    return math.exp(-p.mu ** 2 / (6.0 * p.lam))


def chernoff_mc(p: ChernoffParams, trials: int, seed: int = 0) -> StatsReport:
    """Monte Carlo frequency of X - X' >= Y for independent Poisson draws
    with means (lam, lam, mu), compared against the analytic bound."""
    if trials < 10_000:
        raise ValueError("need at least 1e4 trials")
    rng = derived_rng(seed, 7)
    x = rng.poisson(p.lam, size=trials)
    xp = rng.poisson(p.lam, size=trials)
    y = rng.poisson(p.mu, size=trials)
    est = float(np.mean(x - xp >= y))
    sigma = math.sqrt(max(est * (1.0 - est), 1e-12) / trials)
    bound = chernoff_bound(p)
    return StatsReport("chernoff_mc", {
        "lam": p.lam,
        "mu": p.mu,
        "trials": trials,
        "estimate": est,
        "sigma": sigma,
        "bound": bound,
        "within_bound": est <= bound + 3 * sigma,
    })


def interior_window(ps: ColoredPointSet, fraction: float = 0.5) -> Rect:
    """Centered subwindow at the given linear fraction of the full window."""
    d = ps.domain
    cx = (d.x0 + d.x1) / 2
    hw = (d.x1 - d.x0) * fraction / 2
    if d.kind == "line":
        return Rect(cx - hw, cx + hw, -0.5, 0.5)
    cy = (d.y0 + d.y1) / 2
    hh = (d.y1 - d.y0) * fraction / 2
    return Rect(cx - hw, cx + hw, cy - hh, cy + hh)


def estimate_eta(pairs: Sequence[Tuple[ColoredPointSet, Matching]],
                 fraction: float = 0.5) -> StatsReport:
    """Average total edge length per unit area from red points in an interior
    subwindow (boundary truncation suppressed by the interior restriction).

    ``eta_per_matched_red`` is the ratio estimator total length / matched
    interior reds pooled over all windows; at red intensity lambda it
    estimates eta / lambda with much lower variance than the area-normalized
    ``eta_hat`` because Poisson count fluctuations cancel.
    """
    per_window = []
    skipped = 0
    pooled_total = 0.0
    pooled_matched = 0
    for ps, m in pairs:
        s = interior_window(ps, fraction)
        total = 0.0
        for k, (i, j) in enumerate(m.edges):
            if s.contains(ps.reds[i]):
                total += m.edge_length(k)
                pooled_matched += 1
        pooled_total += total
        skipped += sum(1 for i in m.unmatched_reds if s.contains(ps.reds[i]))
        per_window.append(total / s.area)
    return StatsReport("eta", {
        "eta_hat": float(np.mean(per_window)) if per_window else 0.0,
        "eta_per_matched_red": pooled_total / max(pooled_matched, 1),
        "per_window": per_window,
        "unmatched_reds_in_interior": skipped,
        "fraction": fraction,
    })


def crossing_stats(m: Matching, regions: Sequence[Region]) -> StatsReport:
    """Edges crossing each query region, with a small tail summary."""
    segs = _matching_segments(m)
    counts = []
    for region in regions:
        counts.append(sum(1 for s in segs if edge_crosses_region(s, region)))
    arr = np.asarray(counts, dtype=float) if counts else np.zeros(0)
    return StatsReport("crossings", {
        "counts": counts,
        "mean": float(arr.mean()) if len(arr) else 0.0,
        "max": int(arr.max()) if len(arr) else 0,
        "tail_ge_10": int((arr >= 10).sum()),
    })


@dataclass
class BoxRematchResult:
    length_before: float
    length_after: float
    cell_improvements: List[float]
    matching: Matching

    @property
    def improvement(self) -> float:
        return self.length_before - self.length_after


def box_rematch_experiment(ps: ColoredPointSet, m: Matching, t: float) -> BoxRematchResult:
    """Partition the window into side-t squares; inside each square, replace
    the edges lying entirely within it by the min-length matching of their
    endpoints. Edges crossing square boundaries are untouched."""
    if t <= 0:
        raise ValueError("square side must be positive")
    d = ps.domain
    nx = max(1, int(math.ceil((d.x1 - d.x0) / t)))
    ny = max(1, int(math.ceil((d.y1 - d.y0) / t))) if d.kind != "line" else 1
    cell_of = {}
    for k, (i, j) in enumerate(m.edges):
        r, b = ps.reds[i], ps.blues[j]
        cr = (int((r[0] - d.x0) // t), int((r[1] - d.y0) // t))
        cb = (int((b[0] - d.x0) // t), int((b[1] - d.y0) // t))
        if cr == cb:
            cell_of.setdefault(cr, []).append(k)
    new_edges = list(m.edges)
    improvements = []
    for cell, ks in sorted(cell_of.items()):
        ridx = [m.edges[k][0] for k in ks]
        bidx = [m.edges[k][1] for k in ks]
        before = sum(m.edge_length(k) for k in ks)
        sub = min_cost_perfect(ps.reds[ridx], ps.blues[bidx])
        after = sub.total_length
        improvements.append(before - after)
        for (a, b) in sub.edges:
            new_edges[ks[a]] = (ridx[a], bidx[b])
    rematched = Matching(ps.reds, ps.blues, new_edges, kind=m.kind,
                         unmatched_reds=list(m.unmatched_reds),
                         unmatched_blues=list(m.unmatched_blues))
    return BoxRematchResult(m.total_length, rematched.total_length,
                            improvements, rematched)
