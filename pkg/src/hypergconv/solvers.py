"""Reference players: Polyak-step subgradient descent, fixed-step RGD, and
the strongly-convex regularization wrapper.

The Polyak step is derived from the minimal-ball geometry: knowing
``f(x_k) - f*`` and a certified radius ``s_k`` of a ball around ``x_k``
containing the minimizer, the next iterate is the center of the smallest ball
containing the intersection of ``B(x_k, s_k)`` with the subgradient
half-space, which gives

    cos(theta_k) = (f(x_k) - f*) / (s_k |g_k|) = tanh(eta_k |g_k|) / tanh(s_k),
    sinh(s_{k+1}) = sin(theta_k) sinh(s_k).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hyperboloid import R_MAX, HPoint, HTangent, dist, exp, log, zeta
from .oracles import FnOracle, OracleSample

__all__ = [
    "CertificateError",
    "PolyakState",
    "Trace",
    "polyak_sgd",
    "rgd",
    "regularize",
    "polyak_guarantee",
]

# Violations of the Polyak cosine bound beyond this slack falsify the
# certified-radius invariant and raise instead of clamping.
COS_CLAMP_SLACK = 1e-12
GAP_SLACK = 1e-9


class CertificateError(RuntimeError):
    """The supplied f*/radius certificate is inconsistent with observed values."""


@dataclass(frozen=True)
class PolyakState:
    """Iterate, certified radius of a ball containing the minimizer, and step index."""

    x: HPoint
    s: float
    k: int


@dataclass
class Trace:
    """Ordered oracle answers along a run, with gaps when f* is known."""

    samples: list[OracleSample] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)
    radii: list[float] = field(default_factory=list)
    step_lengths: list[float] = field(default_factory=list)

    def queries(self) -> list[HPoint]:
        return [s.x for s in self.samples]

    def min_gap(self) -> float:
        return min(self.gaps) if self.gaps else np.inf

    def __len__(self) -> int:
        return len(self.samples)


def polyak_guarantee(s0: float, M: float, T: int) -> float:
    """Upper bound on min_k (f(x_k)-f*)^2 after T Polyak steps: 2 zeta(s0) s0^2 M^2 / T."""
    return 2.0 * zeta(s0) * s0 * s0 * M * M / T


def polyak_sgd(f: FnOracle, fstar: float, x0: HPoint, s0: float, T: int,
               step_rule=None) -> Trace:
    """Subgradient descent with exact-f* Polyak step; stops early at the minimizer.

    ``step_rule`` optionally overrides the step length: a callable
    ``(gap, s, gnorm) -> eta`` (exploratory hook; the certified-radius update
    is only maintained for the default rule).
    """
    if s0 <= 0:
        raise CertificateError("initial radius must be positive")
    trace = Trace()
    x, s = x0, float(s0)
    for k in range(T):
        F, g = f.eval(x)
        gap = F - fstar
        trace.samples.append(OracleSample(F, x, g))
        trace.gaps.append(gap)
        trace.radii.append(s)
        if gap < -GAP_SLACK * max(1.0, abs(fstar)):
            raise CertificateError(f"observed value below the supplied f* by {-gap}")
        gnorm = g.norm
        if gap <= 0.0 or gnorm == 0.0:
            break
        if k == T - 1:
            break
        if s <= 0.0:
            raise CertificateError("certified radius hit zero with a positive gap")
        if step_rule is not None:
            eta = float(step_rule(gap, s, gnorm))
            trace.step_lengths.append(eta * gnorm)
            x = exp(x, g.scaled(-eta))
            continue
        c = gap / (s * gnorm)
        # the certified-cosine noise floor grows with the coordinate scale
        # cosh(s); only violations beyond it falsify the certificate
        slack = max(COS_CLAMP_SLACK, 64.0 * np.finfo(float).eps * np.cosh(min(s, R_MAX)) ** 2)
        if c > 1.0 + slack:
            raise CertificateError(
                f"cos(theta)={c} > 1: f* or the radius certificate is wrong")
        c = min(c, 1.0)
        eta_g = float(np.arctanh(c * np.tanh(s)))
        trace.step_lengths.append(eta_g)
        x = exp(x, g.scaled(-eta_g / gnorm))
        s = float(np.arcsinh(np.sqrt(max(1.0 - c * c, 0.0)) * np.sinh(s)))
    return trace


def rgd(f: FnOracle, step: float, x0: HPoint, T: int) -> Trace:
    """Fixed-step gradient descent x_{k+1} = exp_{x_k}(-step g_k)."""
    trace = Trace()
    x = x0
    for _ in range(T):
        F, g = f.eval(x)
        trace.samples.append(OracleSample(F, x, g))
        if f.fmin is not None:
            trace.gaps.append(F - f.fmin)
        x = exp(x, g.scaled(-step))
    return trace


class _Regularized(FnOracle):
    """(1/sigma) f + (1/2) dist(., xref)^2: 1-strongly g-convex."""

    strong_convexity = 1.0

    def __init__(self, f: FnOracle, sigma: float, xref: HPoint):
        self.f = f
        self.sigma = float(sigma)
        self.xref = xref

    def eval(self, x):
        F, g = self.f.eval(x)
        d = dist(x, self.xref)
        vec = g.vec / self.sigma - log(x, self.xref).vec
        return F / self.sigma + 0.5 * d * d, HTangent(x, vec)

    def smoothness_in(self, radius: float) -> float | None:
        """Smoothness bound L/sigma + zeta(radius) inside B(xref, radius)."""
        if self.f.smoothness is None:
            return None
        return self.f.smoothness / self.sigma + float(zeta(radius))


def regularize(f: FnOracle, sigma: float, xref: HPoint) -> _Regularized:
    """Reduction from g-convex to 1-strongly g-convex minimization."""
    if sigma <= 0:
        raise CertificateError("sigma must be positive")
    if not f.gconvex:
        raise CertificateError("regularize requires a g-convex oracle")
    return _Regularized(f, sigma, xref)
