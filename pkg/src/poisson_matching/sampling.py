"""Seeded Poisson sampling of two-color point configurations.

Every random stream is derived from (master seed, path indices) so sweeps
replay deterministically and trials can run in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .geometry import Domain, Rect, LINE, STRIP

FORMAT_VERSION = 1


def derived_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *path)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


@dataclass(frozen=True)
class SampleConfig:
    lambda_red: float
    lambda_blue: float
    domain: Domain
    seed: int

    def __post_init__(self):
        if self.lambda_red <= 0 or self.lambda_blue <= 0:
            raise ValueError("intensities must be positive")


@dataclass
class ColoredPointSet:
    """A sampled red/blue configuration; point arrays are (n, 2) and sorted
    by x then y so downstream constructions are deterministic."""

    domain: Domain
    reds: np.ndarray
    blues: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.reds = _canonical(self.reds)
        self.blues = _canonical(self.blues)
        for pts in (self.reds, self.blues):
            if pts.size and not np.isfinite(pts).all():
                raise ValueError("non-finite coordinates")
        allpts = np.concatenate([self.reds, self.blues])
        if len(allpts) != len({(x, y) for x, y in allpts}):
            raise ValueError("duplicate points: configuration is not simple")

    @property
    def n_red(self) -> int:
        return len(self.reds)

    @property
    def n_blue(self) -> int:
        return len(self.blues)

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "domain": self.domain.to_json(),
            "seed": self.seed,
            "reds": self.reds.tolist(),
            "blues": self.blues.tolist(),
        }

    @staticmethod
    def from_json(d: dict) -> "ColoredPointSet":
        return ColoredPointSet(
            domain=Domain.from_json(d["domain"]),
            reds=np.asarray(d["reds"], dtype=float).reshape(-1, 2),
            blues=np.asarray(d["blues"], dtype=float).reshape(-1, 2),
            seed=d["seed"],
        )

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.to_json(), f, indent=1, sort_keys=True)
            f.write("\n")

    @staticmethod
    def load(path) -> "ColoredPointSet":
        with open(path) as f:
            return ColoredPointSet.from_json(json.load(f))


def _canonical(pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if len(pts):
        order = np.lexsort((pts[:, 1], pts[:, 0]))
        pts = pts[order]
    return pts


def _uniform_points(rng: np.random.Generator, n: int, domain: Domain) -> np.ndarray:
    xs = rng.uniform(domain.x0, domain.x1, size=n)
    if domain.kind == LINE:
        ys = np.zeros(n)
    elif domain.kind == STRIP:
        ys = rng.uniform(0.0, 1.0, size=n)
    else:
        ys = rng.uniform(domain.y0, domain.y1, size=n)
    return np.column_stack([xs, ys])


def sample(config: SampleConfig) -> ColoredPointSet:
    """Draw independent Poisson configurations of both colors on the domain."""
    area = config.domain.measure
    if area <= 0:
        raise ValueError("window has zero measure")
    rng = derived_rng(config.seed)
    n_red = rng.poisson(config.lambda_red * area)
    n_blue = rng.poisson(config.lambda_blue * area)
    reds = _uniform_points(rng, n_red, config.domain)
    blues = _uniform_points(rng, n_blue, config.domain)
    return ColoredPointSet(config.domain, reds, blues, seed=config.seed)


def count_diff(ps: ColoredPointSet, rect: Rect) -> int:
    """(#reds - #blues) inside the half-open rectangle."""
    return _count_in(ps.reds, rect) - _count_in(ps.blues, rect)


def _count_in(pts: np.ndarray, rect: Rect) -> int:
    if not len(pts):
        return 0
    inside = (
        (pts[:, 0] >= rect.x0)
        & (pts[:, 0] < rect.x1)
        & (pts[:, 1] >= rect.y0)
        & (pts[:, 1] < rect.y1)
    )
    return int(inside.sum())
