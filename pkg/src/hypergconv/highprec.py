"""Arbitrary-precision replay of the worst-function construction.

Hyperboloid coordinates at radius r carry cosh(r)-scale entries, and the
bilinear forms of the worst-function fan cancel pairs of them, so double
precision loses roughly 2 r / ln(10) digits: exact-trajectory certificates at
r = 20 are out of reach of float64 no matter how the forms are evaluated.
This module replays the construction and the Polyak recursion with mpmath
reals and reports the measured deviations, which the float64 implementation
is cross-checked against at small radii.

Only the pieces the replay needs are implemented (the construction is all
closed-form); the general-purpose float64 API lives in ``resisting``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from mpmath import mp, mpf

from .hyperboloid import DomainError, zeta

__all__ = ["WorstReplayReport", "worst_trajectory_report"]


def _mdot(u, v):
    s = mpf(0)
    for a, b in zip(u[1:], v[1:]):
        s += a * b
    return s - u[0] * v[0]


def _dist(x, y):
    u = -_mdot(x, y)
    if u < 1:
        u = mpf(1)
    return mp.acosh(u)


def _exp(x, v):
    t = mp.sqrt(_mdot(v, v))
    if t == 0:
        return list(x)
    c, s = mp.cosh(t), mp.sinh(t) / t
    return [c * xi + s * vi for xi, vi in zip(x, v)]


def _log(x, y):
    d = _dist(x, y)
    if d == 0:
        return [mpf(0)] * len(x)
    c = mp.cosh(d)
    w = [yi - c * xi for yi, xi in zip(y, x)]
    nw = mp.sqrt(max(_mdot(w, w), mpf(0)))
    return [wi * d / nw for wi in w]


def _transport(x, y, u):
    alpha = -_mdot(x, y)
    coef = _mdot(y, u) / (1 + alpha)
    return [ui + coef * (xi + yi) for ui, xi, yi in zip(u, x, y)]


@dataclass(frozen=True)
class WorstReplayReport:
    """Measured deviations of the Polyak run from the predicted ladder."""

    d: int
    M: float
    gaps: list[float]
    radii: list[float]
    max_ladder_dist: float
    max_radius_err: float
    max_step_err: float
    max_gap_err: float
    min_gap: float


def worst_trajectory_report(eps: float, r: float, pick: int = +1,
                            dps: int = 60) -> WorstReplayReport:
    """Build the instance, run Polyak subgradient descent, measure deviations.

    The subgradient at the k-th ladder point is the committed answer
    -e_{k+1}/cos(theta) in the transported frame; the run should reproduce
    the ladder exactly, with the certified radius matching the ladder radius
    and each step length matching the ladder edge.
    """
    if not (0.0 < eps <= 1.0 / (4.0 * np.sqrt(2.0)) + 1e-15):
        raise DomainError("eps must lie in (0, 1/(4 sqrt(2))]")
    d = int(np.floor(float(zeta(r)) / (32.0 * eps * eps)))
    if d < 2:
        raise DomainError(f"eps={eps} too large for r={r}")
    with mp.workdps(dps):
        costh = 4 * mpf(repr(eps))
        rr = mpf(repr(r))
        sinth = mp.sqrt(1 - costh * costh)
        D = d + 1

        e = [[mpf(1 if i == j + 1 else 0) for i in range(D)] for j in range(d)]
        y = [[mpf(1 if i == 0 else 0) for i in range(D)]]
        radii = [rr]
        deltas = []
        frames = [e]
        for k in range(1, d):
            delta = mp.atanh(costh * mp.tanh(radii[k - 1]))
            rk = mp.asinh(sinth * mp.sinh(radii[k - 1]))
            deltas.append(delta)
            radii.append(rk)
            c, s = mp.cosh(delta), mp.sinh(delta)
            prev = frames[k - 1]
            yk = [c * a + s * b for a, b in zip(y[k - 1], prev[k - 1])]
            fr = [list(row) for row in prev]
            fr[k - 1] = [s * a + c * b for a, b in zip(y[k - 1], prev[k - 1])]
            for i in range(k - 1):
                fr[i] = _transport(y[k - 1], yk, prev[i])
            frames.append(fr)
            y.append(yk)

        xs = [mp.cosh(radii[-1]) * a + pick * mp.sinh(radii[-1]) * b
              for a, b in zip(y[-1], frames[-1][d - 1])]

        # unit inward normals of the committed half-spaces at each ladder point
        normals = []
        for k in range(d - 1):
            lg = _log(y[k], xs)
            dk = mp.sqrt(_mdot(lg, lg))
            V = [a / costh - b / dk for a, b in zip(frames[k][k], lg)]
            nV = mp.sqrt(_mdot(V, V))
            normals.append([v / nV for v in V])

        def value(x):
            term = mpf(0)
            for n in normals:
                m = _mdot(x, n)
                if m < 0:
                    term = max(term, mp.asinh(-m))
            return _dist(x, xs) + term / costh

        # acosh amplifies roundoff to 10^(-dps/2) near coincident points, so
        # the match tolerance must sit well above that floor
        ladder_tol = mpf(10) ** (-(dps // 2 - 5))

        def answer(x):
            for k in range(d):
                if _dist(x, y[k]) <= ladder_tol:
                    if k <= d - 2:
                        return [-v / costh for v in frames[k][k]]
                    break
            lgx = _log(x, xs)
            dd = mp.sqrt(_mdot(lgx, lgx))
            if dd == 0:
                return [mpf(0)] * len(x)
            return [-v / dd for v in lgx]

        x, s = list(y[0]), rr
        iterates = [list(x)]
        gaps, ss, etas = [], [], []
        for k in range(d):
            F = value(x)
            gaps.append(F)
            ss.append(s)
            if k == d - 1:
                break
            g = answer(x)
            gn = mp.sqrt(_mdot(g, g))
            c = min(F / (s * gn), mpf(1))
            eta_g = mp.atanh(c * mp.tanh(s))
            etas.append(eta_g)
            x = _exp(x, [-eta_g / gn * gi for gi in g])
            nq = mp.sqrt(-_mdot(x, x))
            x = [xi / nq for xi in x]
            s = mp.asinh(mp.sqrt(max(1 - c * c, mpf(0))) * mp.sinh(s))
            iterates.append(list(x))

        max_ld = max(_dist(a, yk) for a, yk in zip(iterates, y))
        max_re = max(abs(a - b) for a, b in zip(ss, radii))
        max_se = max(abs(a - b) for a, b in zip(etas, deltas)) if etas else mpf(0)
        max_ge = max(abs(a - b) for a, b in zip(gaps, radii))
        return WorstReplayReport(
            d=d,
            M=float(2 / costh),
            gaps=[float(g) for g in gaps],
            radii=[float(rk) for rk in radii],
            max_ladder_dist=float(max_ld),
            max_radius_err=float(max_re),
            max_step_err=float(max_se),
            max_gap_err=float(max_ge),
            min_gap=float(min(gaps)),
        )
