"""Seeded random geometry helpers.

All randomness in the package flows through Philox (a counter-based generator
with a platform-independent stream), so transcripts reproduce bit-for-bit
across machines for a given seed.  The generator identity is part of the
external contract.
"""

from __future__ import annotations

import functools

import numpy as np

from .hyperboloid import HPoint, HTangent, exp, _mink, _point_unchecked

__all__ = [
    "make_rng",
    "spawn_rng",
    "random_unit_tangent",
    "random_tangent",
    "random_point_in_ball",
    "ball_radius_sampler",
]


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator for the given seed."""
    return np.random.Generator(np.random.Philox(int(seed)))


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for a (seed, key...) pair, e.g. one grid cell."""
    return np.random.Generator(np.random.Philox(key=np.array([seed, *key], dtype=np.uint64)))


def random_unit_tangent(rng: np.random.Generator, x: HPoint) -> HTangent:
    """Uniform unit tangent vector at x (rotation-invariant)."""
    while True:
        g = rng.standard_normal(x.coords.size)
        g = g + _mink(g, x.coords) * x.coords
        n = np.sqrt(max(_mink(g, g), 0.0))
        if n > 1e-12:
            return HTangent(x, g / n)


def random_tangent(rng: np.random.Generator, x: HPoint, scale: float = 1.0) -> HTangent:
    """Tangent vector with uniform direction and length uniform on [0, scale]."""
    u = random_unit_tangent(rng, x)
    return u.scaled(scale * rng.uniform())


@functools.lru_cache(maxsize=64)
def ball_radius_sampler(d: int, radius: float, grid_size: int = 4096):
    """Sampler for the radial law of the uniform distribution on a ball.

    The hyperbolic volume element gives radial density proportional to
    sinh^{d-1}(t); inversion interpolates a dense cumulative-trapezoid grid,
    which is deterministic and accurate enough for sampling purposes.
    """
    ts = np.linspace(0.0, radius, grid_size)
    dens = np.sinh(ts) ** (d - 1)
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(ts))])
    cdf /= cdf[-1]

    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.uniform(size=n)
        return np.clip(np.interp(u, cdf, ts), 0.0, radius)

    return sample


def random_point_in_ball(rng: np.random.Generator, center: HPoint, radius: float,
                         sampler=None) -> HPoint:
    """Uniform (volume-measure) random point in B(center, radius)."""
    if sampler is None:
        sampler = ball_radius_sampler(center.d, radius)
    t = float(sampler(rng, 1)[0])
    if t == 0.0:
        return center
    c = center.coords
    if c[0] == 1.0 and not np.any(c[1:]):
        # canonical center: build the coordinates directly
        u = rng.standard_normal(center.d)
        u /= np.linalg.norm(u)
        return _point_unchecked(np.concatenate([[np.cosh(t)], np.sinh(t) * u]))
    return exp(center, random_unit_tangent(rng, center).scaled(t))
