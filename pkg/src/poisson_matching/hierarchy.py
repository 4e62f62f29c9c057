"""Factorial block hierarchy and the staged unmatch/rematch construction.

Level-n blocks are n!-by-(n-1)! rectangles (sides swapped for odd n) on a
randomly offset grid; each block splits exactly into n(n-1) children, whose
left-most (even level) or bottom-most (odd level) member is its heir. Stages
1..N build a partial matching whose edges never leave their level-n block,
with unmatched points funneled into heirs; a block is bad when the rematch
step cannot absorb its excess, and dodgy when one of its children is bad.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .assignment import Matching
from .geometry import Domain, Rect
from .sampling import ColoredPointSet, derived_rng

BIG = 1e15  # forbidden-cell cost in padded assignment problems


@dataclass(frozen=True)
class Block:
    level: int
    ix: int
    iy: int
    rect: Rect

    @property
    def key(self) -> Tuple[int, int, int]:
        return (self.level, self.ix, self.iy)


@dataclass
class BlockSystem:
    """Factorial grids: a[n] = n!, random offsets r[n], accumulated shifts
    t[n] = r[n]*a[n-2] + t[n-2]."""

    N: int
    a: List[int]
    r: List[int]
    t: List[int]

    def dims(self, n: int) -> Tuple[int, int]:
        """(width, height) of a level-n block."""
        if n % 2 == 0:
            return self.a[n], self.a[n - 1]
        return self.a[n - 1], self.a[n]

    def offsets(self, n: int) -> Tuple[int, int]:
        if n % 2 == 0:
            return self.t[n], self.t[n - 1]
        return self.t[n - 1], self.t[n]

    def block(self, n: int, ix: int, iy: int) -> Block:
        w, h = self.dims(n)
        xo, yo = self.offsets(n)
        return Block(n, ix, iy, Rect(xo + ix * w, xo + (ix + 1) * w,
                                     yo + iy * h, yo + (iy + 1) * h))

    def block_containing(self, n: int, x: float, y: float) -> Block:
        w, h = self.dims(n)
        xo, yo = self.offsets(n)
        return self.block(n, int(math.floor((x - xo) / w)),
                          int(math.floor((y - yo) / h)))

    def children(self, block: Block) -> List[Block]:
        """The n(n-1) level-(n-1) blocks tiling a level-n block, ordered
        left-to-right (even level) or bottom-to-top (odd level)."""
        n = block.level
        if n < 2:
            raise ValueError("level-1 blocks have no children")
        count = self.a[n] // self.a[n - 2]
        w, h = self.dims(n - 1)
        xo, yo = self.offsets(n - 1)
        # Children align flush with the parent (t[n] = t[n-2] mod a[n-2]).
        ix0 = round((block.rect.x0 - xo) / w)
        iy0 = round((block.rect.y0 - yo) / h)
        if n % 2 == 0:
            return [self.block(n - 1, ix0 + k, iy0) for k in range(count)]
        return [self.block(n - 1, ix0, iy0 + k) for k in range(count)]

    def heir_of(self, block: Block) -> Block:
        """Left-most child for even levels, bottom-most for odd levels."""
        return self.children(block)[0]


def build_block_system(seed: int, N: int) -> BlockSystem:
    if N < 2:
        raise ValueError("need N >= 2")
    a = [math.factorial(n) for n in range(N + 1)]
    rng = derived_rng(seed, 3)
    r = [0, 0]
    t = [0, 0]
    for n in range(2, N + 1):
        rn = int(rng.integers(0, a[n] // a[n - 2]))
        r.append(rn)
        t.append(rn * a[n - 2] + t[n - 2])
    return BlockSystem(N=N, a=a, r=r, t=t)


def heir_of(system: BlockSystem, block: Block) -> Block:
    return system.heir_of(block)


def aligned_window(system: BlockSystem, ix: int = 0, iy: int = 0) -> Domain:
    """Plane domain equal to one level-N block (the truncation policy)."""
    rect = system.block(system.N, ix, iy).rect
    return Domain.plane(rect.x0, rect.x1, rect.y0, rect.y1)


def _grid_start(t: np.ndarray, period: int) -> np.ndarray:
    """Left/bottom coordinate of the grid cell containing 0."""
    s = t % period
    return np.where(s > 0, s - period, 0)


def heir_frequency(n: int, trials: int, seed: int = 0) -> float:
    """Monte Carlo frequency of the unit square [0,1)^2 lying in the heir of
    its (n+1)-block, i.e. its n-block being the heir; equals 1/(n(n+1))."""
    rng = derived_rng(seed, 11, n)
    a = [math.factorial(k) for k in range(n + 2)]
    t = [np.zeros(trials, dtype=np.int64), np.zeros(trials, dtype=np.int64)]
    for m in range(2, n + 2):
        rm = rng.integers(0, a[m] // a[m - 2], size=trials)
        t.append(rm * a[m - 2] + t[m - 2])
    lo_child = _grid_start(t[n - 1], a[n - 1])
    lo_parent = _grid_start(t[n + 1], a[n + 1])
    return float(np.mean(lo_child == lo_parent))


def bad_block_bound(system: BlockSystem, n: int) -> float:
    """Analytic tail bound on the probability that a fixed unit square lies
    in a bad level-n block."""
    a = system.a
    num = (a[n - 2] * a[n - 3]) ** 2
    den = 6.0 * (a[n] * a[n - 1] - a[n - 1] * a[n - 2])
    return 2.0 * math.exp(-num / den)


@dataclass
class BlockRecord:
    key: Tuple[int, int, int]
    n_red: int
    n_blue: int
    unmatched: int
    bad: bool
    dodgy: bool
    new_edges: List[Tuple[int, int]]
    unmatched_in_heir: Optional[bool]
    new_edges_in_heirs: Optional[bool]


@dataclass
class StageState:
    """Mutable matching state across stages: partner index arrays (-1 for
    unmatched) plus per-point unmatch-event counters and block statuses."""

    ps: ColoredPointSet
    system: BlockSystem
    red_partner: np.ndarray
    blue_partner: np.ndarray
    red_unmatch_events: np.ndarray
    blue_unmatch_events: np.ndarray
    stage: int = 0
    status: Dict[Tuple[int, int, int], str] = field(default_factory=dict)
    records: List[List[BlockRecord]] = field(default_factory=list)

    def matched_count(self) -> int:
        return int((self.red_partner >= 0).sum())

    def to_matching(self) -> Matching:
        edges = sorted((i, int(j)) for i, j in enumerate(self.red_partner) if j >= 0)
        un_r = [i for i, j in enumerate(self.red_partner) if j < 0]
        un_b = [j for j, i in enumerate(self.blue_partner) if i < 0]
        return Matching(self.ps.reds, self.ps.blues, edges,
                        kind="perfect" if not (un_r or un_b) else "partial",
                        unmatched_reds=un_r, unmatched_blues=un_b)


def _in_rect(pts: np.ndarray, rect: Rect) -> np.ndarray:
    if not len(pts):
        return np.empty(0, dtype=int)
    m = ((pts[:, 0] >= rect.x0) & (pts[:, 0] < rect.x1)
         & (pts[:, 1] >= rect.y0) & (pts[:, 1] < rect.y1))
    return np.nonzero(m)[0]


def _match_max_cardinality(state: StageState, ridx: np.ndarray, bidx: np.ndarray
                           ) -> List[Tuple[int, int]]:
    """Min-length matching of maximum cardinality between the given unmatched
    index sets; applies it to the state and returns the new edges."""
    if len(ridx) == 0 or len(bidx) == 0:
        return []
    rpts = state.ps.reds[ridx]
    bpts = state.ps.blues[bidx]
    diff = rpts[:, None, :] - bpts[None, :, :]
    cost = np.hypot(diff[..., 0], diff[..., 1])
    rows, cols = linear_sum_assignment(cost)
    new = []
    for i, j in zip(rows, cols):
        ri, bj = int(ridx[i]), int(bidx[j])
        state.red_partner[ri] = bj
        state.blue_partner[bj] = ri
        new.append((ri, bj))
    return sorted(new)


def init_state(ps: ColoredPointSet, system: BlockSystem) -> StageState:
    window = ps.domain.window_rect()
    probe = system.block_containing(system.N, window.x0, window.y0)
    if probe.rect != window:
        raise ValueError("window must coincide with a single level-N block")
    return StageState(
        ps=ps, system=system,
        red_partner=np.full(ps.n_red, -1, dtype=int),
        blue_partner=np.full(ps.n_blue, -1, dtype=int),
        red_unmatch_events=np.zeros(ps.n_red, dtype=int),
        blue_unmatch_events=np.zeros(ps.n_blue, dtype=int),
    )


def _blocks_at_level(state: StageState, n: int) -> List[Block]:
    window = state.ps.domain.window_rect()
    top = state.system.block_containing(state.system.N, window.x0, window.y0)
    blocks = [top]
    for level in range(state.system.N, n, -1):
        blocks = [c for b in blocks for c in state.system.children(b)]
    return blocks


def stage1(state: StageState) -> StageState:
    """Within each unit square, match as many red-blue pairs as possible,
    minimum length among maximum-cardinality matchings."""
    if state.stage != 0:
        raise ValueError("stage 1 must run first")
    records = []
    for block in _blocks_at_level(state, 1):
        ridx = _in_rect(state.ps.reds, block.rect)
        bidx = _in_rect(state.ps.blues, block.rect)
        new = _match_max_cardinality(state, ridx, bidx)
        state.status[block.key] = "ok"
        records.append(BlockRecord(
            key=block.key, n_red=len(ridx), n_blue=len(bidx),
            unmatched=len(ridx) + len(bidx) - 2 * len(new),
            bad=False, dodgy=False, new_edges=new,
            unmatched_in_heir=None, new_edges_in_heirs=None,
        ))
    state.stage = 1
    state.records.append(records)
    return state


def classify_dodgy(state: StageState, block: Block) -> bool:
    """A block is dodgy when at least one of its children is bad."""
    if block.level < 2:
        return False
    return any(state.status.get(c.key) == "bad" for c in state.system.children(block))


def _unmatched_in(state: StageState, rect: Rect) -> Tuple[np.ndarray, np.ndarray]:
    ridx = _in_rect(state.ps.reds, rect)
    bidx = _in_rect(state.ps.blues, rect)
    return (ridx[state.red_partner[ridx] < 0], bidx[state.blue_partner[bidx] < 0])


def _rect_minus(pts_idx: np.ndarray, pts: np.ndarray, inner: Rect) -> np.ndarray:
    if not len(pts_idx):
        return pts_idx
    p = pts[pts_idx]
    inside = ((p[:, 0] >= inner.x0) & (p[:, 0] < inner.x1)
              & (p[:, 1] >= inner.y0) & (p[:, 1] < inner.y1))
    return pts_idx[~inside]


def _saturating_match(state: StageState, r1, b1, r2, b2) -> List[Tuple[int, int]]:
    """Min-length matching covering every point of (r1, b1), with partners
    drawn from (r1, b1) themselves or from the reserve pools (r2, b2).
    Reserve-reserve and dummy pairings cost nothing and add no edge."""
    reds = np.concatenate([r1, r2]).astype(int)
    blues = np.concatenate([b1, b2]).astype(int)
    nr, nb = len(reds), len(blues)
    size = max(nr, nb)
    cost = np.zeros((size, size))
    if nr and nb:
        rpts = state.ps.reds[reds]
        bpts = state.ps.blues[blues]
        diff = rpts[:, None, :] - bpts[None, :, :]
        cost[:nr, :nb] = np.hypot(diff[..., 0], diff[..., 1])
        cost[len(r1):nr, len(b1):nb] = 0.0  # reserve-reserve: both unused
    cost[:len(r1), nb:] = BIG   # mandatory reds cannot go unmatched
    cost[nr:, :len(b1)] = BIG   # mandatory blues cannot go unmatched
    rows, cols = linear_sum_assignment(cost)
    new = []
    for i, j in zip(rows, cols):
        if i >= nr or j >= nb:
            continue
        if i >= len(r1) and j >= len(b1):
            continue  # reserve pair at zero cost: not an edge
        ri, bj = int(reds[i]), int(blues[j])
        state.red_partner[ri] = bj
        state.blue_partner[bj] = ri
        new.append((ri, bj))
    return sorted(new)


def stage_n(state: StageState, block: Block) -> BlockRecord:
    """One level-n block of stage n: unmatch the heir, absorb the rest of the
    block's unmatched points using the heir's heir as reserve, then match as
    many leftovers as possible."""
    system = state.system
    n = block.level
    B = system.heir_of(block)
    C = system.heir_of(B) if n > 2 else B

    # (i) unmatch all points in the heir
    for idx in _in_rect(state.ps.reds, B.rect):
        j = state.red_partner[idx]
        if j >= 0:
            state.red_partner[idx] = -1
            state.blue_partner[j] = -1
            state.red_unmatch_events[idx] += 1
            state.blue_unmatch_events[j] += 1

    # (ii) match everything unmatched in A \ B into (A \ B) u C
    un_r, un_b = _unmatched_in(state, block.rect)
    r1 = _rect_minus(un_r, state.ps.reds, B.rect)
    b1 = _rect_minus(un_b, state.ps.blues, B.rect)
    r2 = _in_rect(state.ps.reds, C.rect)
    b2 = _in_rect(state.ps.blues, C.rect)
    excess = len(r1) - len(b1)
    feasible = excess <= len(b2) if excess >= 0 else -excess <= len(r2)
    new_edges: List[Tuple[int, int]] = []
    if feasible:
        new_edges.extend(_saturating_match(state, r1, b1, r2, b2))
        state.status[block.key] = "ok"
    else:
        state.status[block.key] = "bad"

    # (iii) match as many of the remaining unmatched points in A as possible
    un_r, un_b = _unmatched_in(state, block.rect)
    new_edges.extend(_match_max_cardinality(state, un_r, un_b))

    # bookkeeping for verification
    ridx = _in_rect(state.ps.reds, block.rect)
    bidx = _in_rect(state.ps.blues, block.rect)
    un_r, un_b = _unmatched_in(state, block.rect)
    bad = state.status[block.key] == "bad"
    dodgy = classify_dodgy(state, block)
    heir_rect = B.rect
    unmatched_in_heir = all(heir_rect.contains(state.ps.reds[i]) for i in un_r) and \
        all(heir_rect.contains(state.ps.blues[j]) for j in un_b)
    heir_rects = [heir_rect] + [system.heir_of(c).rect for c in system.children(block)
                                if c.level >= 2]
    if n == 2:
        heir_rects = [heir_rect]

    def in_heirs(p):
        return any(h.contains(p) for h in heir_rects)

    confined = all(in_heirs(state.ps.reds[i]) and in_heirs(state.ps.blues[j])
                   for i, j in new_edges)
    return BlockRecord(
        key=block.key, n_red=len(ridx), n_blue=len(bidx),
        unmatched=len(un_r) + len(un_b), bad=bad, dodgy=dodgy,
        new_edges=sorted(new_edges), unmatched_in_heir=unmatched_in_heir,
        new_edges_in_heirs=confined,
    )


def run_stage(state: StageState, n: int) -> StageState:
    if n != state.stage + 1:
        raise ValueError("stages must run in order")
    records = [stage_n(state, block) for block in _blocks_at_level(state, n)]
    state.stage = n
    state.records.append(records)
    return state


def run_hierarchical(ps: ColoredPointSet, seed: int, N: int,
                     system: Optional[BlockSystem] = None
                     ) -> Tuple[Matching, dict, StageState]:
    """Run stages 1..N on a window equal to one level-N block. Returns the
    final partial matching, JSON-ready diagnostics, and the full state."""
    if system is None:
        system = build_block_system(seed, N)
    state = init_state(ps, system)
    stage1(state)
    for n in range(2, N + 1):
        run_stage(state, n)
    diagnostics = {"levels": {}, "offsets": {"r": system.r, "t": system.t}}
    for n, records in zip(range(1, N + 1), state.records):
        diagnostics["levels"][n] = {
            "blocks": len(records),
            "bad_count": sum(rec.bad for rec in records),
            "dodgy_count": sum(rec.dodgy for rec in records),
            "unmatched": sum(rec.unmatched for rec in records),
        }
    m = state.to_matching()
    diagnostics["unmatched_red"] = len(m.unmatched_reds)
    diagnostics["unmatched_blue"] = len(m.unmatched_blues)
    diagnostics["total_length"] = m.total_length
    return m, diagnostics, state
