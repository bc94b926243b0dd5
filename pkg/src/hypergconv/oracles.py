"""First-order oracles for the g-convex function families used by the adversaries.

Every oracle returns ``(value, subgradient)`` pairs; subgradients satisfy
``f(y) >= f(x) + <g, log_x(y)>`` whenever the oracle is flagged g-convex.
Oracles are immutable after construction and safe to evaluate concurrently.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .hyperboloid import (
    R_MAX,
    RANK_TOL,
    DomainError,
    HPoint,
    HTangent,
    TotallyGeodesicSub,
    _dist_coords,
    _mink,
    _mink_x,
    dist,
    exp,
    gspan,
    log,
    ptransport,
    sub_dist,
)

__all__ = [
    "FnOracle",
    "OracleSample",
    "MoreauParams",
    "ProxConvergenceError",
    "fn_constant",
    "fn_dist_point",
    "fn_sqdist_point",
    "fn_dist_sub",
    "fn_shifted_max",
    "fn_moreau",
    "fn_pseudo_affine",
    "taper",
    "subgradient_gap",
    "midpoint_convexity_gap",
]

logger = logging.getLogger(__name__)

# Two parts of a max within this of each other count as a tie.
TIE_TOL = 1e-12


class ProxConvergenceError(RuntimeError):
    """Inner prox solve did not converge; carries the best iterate found."""

    def __init__(self, msg, best: HPoint, value: float, residual: float):
        super().__init__(msg)
        self.best = best
        self.value = value
        self.residual = residual


@dataclass(frozen=True, eq=False)
class OracleSample:
    """One oracle answer: value F and subgradient g at the query point x."""

    F: float
    x: HPoint
    g: HTangent

    def __post_init__(self):
        if self.g.base is not self.x and not np.allclose(
                self.g.base.coords, self.x.coords, atol=1e-12, rtol=0.0):
            raise DomainError("sample subgradient is not based at the query point")


@dataclass(frozen=True)
class MoreauParams:
    """Smoothing width and inner prox-solver controls."""

    lam: float
    prox_tol: float = 1e-10
    prox_max_iter: int = 10_000

    def __post_init__(self):
        if not (0.0 < self.lam <= R_MAX):
            raise DomainError(f"lambda must lie in (0, {R_MAX}]")


class FnOracle:
    """First-order oracle interface with optional metadata.

    Attributes left ``None`` are unknown, not asserted to be absent.
    """

    gconvex: bool = True
    lipschitz: float | None = None
    smoothness: float | None = None
    strong_convexity: float = 0.0
    minimizer: HPoint | None = None
    fmin: float | None = None

    def eval(self, x: HPoint) -> tuple[float, HTangent]:
        raise NotImplementedError

    def value(self, x: HPoint) -> float:
        return self.eval(x)[0]

    def grad(self, x: HPoint) -> HTangent:
        return self.eval(x)[1]

    # -- optional structure hooks used by the Moreau envelope -------------
    def prox_pair(self, x: HPoint, lam: float) -> tuple[HPoint, float] | None:
        """Exact prox (argmin point, envelope value) if a closed form is known."""
        return None

    def max_sub_pieces(self) -> list[tuple[TotallyGeodesicSub, float]] | None:
        """Decomposition f = max_l { dist(., S_l) - c_l } if the oracle has one."""
        return None


class _Constant(FnOracle):
    def __init__(self, c: float):
        self.c = float(c)
        self.lipschitz = 0.0
        self.smoothness = 0.0

    def eval(self, x):
        return self.c, HTangent(x, np.zeros_like(x.coords))


def fn_constant(c: float) -> FnOracle:
    """The constant function (0 is a subgradient everywhere)."""
    return _Constant(c)


class DistToSub(FnOracle):
    """f(x) = dist(x, S) - shift for a totally geodesic S; 1-Lipschitz, g-convex.

    On S the zero vector is returned (a valid minimal-norm subgradient);
    off S the gradient is the unit vector pointing away from the foot.
    """

    lipschitz = 1.0

    def __init__(self, S: TotallyGeodesicSub, shift: float = 0.0):
        self.S = S
        self.shift = float(shift)

    def eval(self, x):
        d, foot = sub_dist(x, self.S)
        if d <= 1e-14:
            return -self.shift, HTangent(x, np.zeros_like(x.coords))
        g = log(x, foot).scaled(-1.0 / d)
        return d - self.shift, g

    def prox_pair(self, x, lam):
        # prox reduces to one dimension along the perpendicular geodesic
        d, foot = sub_dist(x, self.S)
        t = min(lam, d)
        if d <= 1e-14 or t == 0.0:
            return x, -self.shift
        y = exp(x, log(x, foot).scaled(t / d))
        if d >= lam:
            return y, (d - lam / 2.0) - self.shift
        return y, d * d / (2.0 * lam) - self.shift

    def max_sub_pieces(self):
        return [(self.S, self.shift)]


def fn_dist_sub(S: TotallyGeodesicSub, shift: float = 0.0) -> DistToSub:
    """Distance to a totally geodesic submanifold, minus a constant."""
    return DistToSub(S, shift)


def fn_dist_point(z: HPoint) -> DistToSub:
    """Distance to a point (a 0-dimensional totally geodesic submanifold)."""
    o = DistToSub(gspan([z], []), 0.0)
    o.minimizer = z
    o.fmin = 0.0
    return o


class SqDistToPoint(FnOracle):
    """f(x) = dist(x, z)^2 / 2; gradient -log_x(z); 1-strongly g-convex."""

    strong_convexity = 1.0

    def __init__(self, z: HPoint):
        self.z = z
        self.minimizer = z
        self.fmin = 0.0

    def eval(self, x):
        d = dist(x, self.z)
        return 0.5 * d * d, log(x, self.z).scaled(-1.0)


def fn_sqdist_point(z: HPoint) -> SqDistToPoint:
    return SqDistToPoint(z)


@dataclass(frozen=True)
class MaxInfo:
    value: float
    grad: HTangent
    argmax: int
    ties: tuple[int, ...]


class ShiftedMax(FnOracle):
    """f(x) = max_i { f_i(x) - offset_i }; subgradient from the achieving part.

    Exact ties break to the lowest index; near-ties (within TIE_TOL) are
    reported and logged, since in the adversarial constructions they signal a
    violated separation margin.
    """

    def __init__(self, parts: list[tuple[FnOracle, float]], warn_on_ties: bool = True):
        if not parts:
            raise DomainError("max oracle needs at least one part")
        self.parts = [(o, float(c)) for o, c in parts]
        self.warn_on_ties = warn_on_ties
        self.gconvex = all(o.gconvex for o, _ in self.parts)
        lips = [o.lipschitz for o, _ in self.parts]
        self.lipschitz = max(lips) if all(l is not None for l in lips) else None
        self.strong_convexity = min(o.strong_convexity for o, _ in self.parts)

    def eval_detailed(self, x) -> MaxInfo:
        evals = [o.eval(x) for o, _ in self.parts]
        vals = np.array([F - c for (F, _), (_, c) in zip(evals, self.parts)])
        best = int(np.argmax(vals))
        ties = tuple(i for i, v in enumerate(vals)
                     if v >= vals[best] - TIE_TOL and i != best)
        if ties and self.warn_on_ties:
            logger.warning("max oracle tie at value %.17g between parts %s",
                           vals[best], (best,) + ties)
        return MaxInfo(float(vals[best]), evals[best][1], best, ties)

    def eval(self, x):
        info = self.eval_detailed(x)
        return info.value, info.grad

    def max_sub_pieces(self):
        pieces = []
        for o, c in self.parts:
            sub = o.max_sub_pieces()
            if sub is None or len(sub) != 1:
                return None
            S, shift = sub[0]
            pieces.append((S, shift + c))
        return pieces


def fn_shifted_max(parts: list[tuple[FnOracle, float]]) -> ShiftedMax:
    """Pointwise maximum of parts, each lowered by its offset."""
    return ShiftedMax(parts)


class _Sum(FnOracle):
    """Weighted sum of oracles sharing a base point convention."""

    def __init__(self, parts: list[tuple[float, FnOracle]], gconvex: bool = True):
        self.parts = parts
        self.gconvex = gconvex
        lips = [abs(w) * o.lipschitz for w, o in parts if o.lipschitz is not None]
        self.lipschitz = sum(lips) if len(lips) == len(parts) else None

    def eval(self, x):
        total = 0.0
        vec = np.zeros_like(x.coords)
        for w, o in self.parts:
            F, g = o.eval(x)
            total += w * F
            vec = vec + w * g.vec
        return total, HTangent(x, vec)


def fn_sum(parts: list[tuple[float, FnOracle]], gconvex: bool = True) -> FnOracle:
    return _Sum(parts, gconvex=gconvex)


class PseudoAffine(FnOracle):
    """f(x) = <g, log_y(x)>: Lipschitz and smooth with constant |g|, NOT g-convex.

    The gradient is the adjoint inverse differential of exp applied to g:
    transport g along the geodesic, keep the radial component, and scale the
    orthogonal component by dist/sinh(dist).
    """

    gconvex = False

    def __init__(self, y: HPoint, g: HTangent):
        if g.base is not y and not np.allclose(g.base.coords, y.coords,
                                               atol=1e-12, rtol=0.0):
            raise DomainError("anchor gradient must be based at the anchor point")
        self.y = y
        self.g = g
        self.lipschitz = g.norm
        self.smoothness = g.norm

    def eval(self, x):
        D = dist(self.y, x)
        if D == 0.0:
            return 0.0, HTangent(x, self.g.vec.copy())
        s = log(self.y, x)
        val = float(_mink(self.g.vec, s.vec))
        pg = ptransport(self.y, x, self.g)
        radial = log(x, self.y).scaled(-1.0 / D)  # transported direction of s
        coef = float(_mink(pg.vec, radial.vec))
        par = coef * radial.vec
        perp = pg.vec - par
        grad = HTangent(x, par + (D / np.sinh(D)) * perp)
        return val, grad


def fn_pseudo_affine(y: HPoint, g: HTangent) -> PseudoAffine:
    return PseudoAffine(y, g)


# ---------------------------------------------------------------------------
# Moreau envelope
# ---------------------------------------------------------------------------


class MoreauEnvelope(FnOracle):
    """f_lam(x) = min_{y in B(x, lam)} { f(y) + dist(x,y)^2 / (2 lam) }.

    Requires f g-convex and 1-Lipschitz; the envelope is then g-convex,
    1-Lipschitz and 1/tanh(lam)-smooth with gradient -(1/lam) log_x(y*).
    Shares minimizer and minimum value with f.
    """

    def __init__(self, f: FnOracle, params: MoreauParams):
        if not f.gconvex:
            raise DomainError("Moreau envelope requires a g-convex oracle")
        if f.lipschitz is None or f.lipschitz > 1.0 + 1e-12:
            raise DomainError("Moreau envelope requires lipschitz <= 1 metadata")
        self.f = f
        self.params = params
        self.lam = params.lam
        self.gconvex = True
        self.lipschitz = min(1.0, f.lipschitz)
        self.smoothness = 1.0 / np.tanh(params.lam)
        self.minimizer = f.minimizer
        self.fmin = f.fmin
        self._pieces = f.max_sub_pieces()

    def prox_point(self, x: HPoint) -> HPoint:
        return self._prox(x)[0]

    def eval(self, x):
        y, val = self._prox(x)
        return val, log(x, y).scaled(-1.0 / self.lam)

    def value(self, x):
        # candidate-based upper bound; skips the gradient-grade polish
        return self._prox(x, need_gradient=False)[1]

    def _prox(self, x: HPoint, need_gradient: bool = True) -> tuple[HPoint, float]:
        exact = self.f.prox_pair(x, self.lam)
        if exact is not None:
            return exact
        if self._pieces is not None:
            return _prox_max_pieces(self.f, x, self.lam, self._pieces,
                                    polish=need_gradient)
        return _prox_subgradient(self.f, x, self.lam,
                                 self.params.prox_tol, self.params.prox_max_iter)


def fn_moreau(f: FnOracle, p: MoreauParams) -> MoreauEnvelope:
    """Moreau smoothing of a 1-Lipschitz g-convex oracle."""
    return MoreauEnvelope(f, p)


def _tangent_frame(x: HPoint) -> np.ndarray:
    """Orthonormal tangent rows at x (d rows of length d+1).

    Closed form: the coordinate frame at the reference point transported to
    x, u_i = e_i + x_i/(1+x_0) (e_0 + x), which is exactly orthonormal.
    """
    xc = x.coords
    D = xc.size
    shift = xc.copy()
    shift[0] += 1.0
    out = np.eye(D)[1:, :] + np.outer(xc[1:] / (1.0 + xc[0]), shift)
    return out


def _prox_objective(f: FnOracle, x: HPoint, lam: float, y: HPoint) -> float:
    return f.value(y) + dist(x, y) ** 2 / (2.0 * lam)


def _project_ball(x: HPoint, y: HPoint, radius: float) -> HPoint:
    d = dist(x, y)
    if d <= radius:
        return y
    return exp(x, log(x, y).scaled(radius / d))


def _prox_subgradient(f: FnOracle, x: HPoint, lam: float,
                      tol: float, max_iter: int) -> tuple[HPoint, float]:
    """Projected subgradient descent with best-iterate tracking.

    The prox objective is (1/lam)-strongly g-convex on B(x, lam); the classic
    2/(mu (j+1)) schedule applies.  Returns once the step displacement falls
    below tol or improvement stalls; raises if neither happens in max_iter.
    """
    y = x
    best_y, best_val = x, _prox_objective(f, x, lam, x)
    stall = 0
    disp = np.inf
    for j in range(1, max_iter + 1):
        _, gf = f.eval(y)
        gvec = gf.vec - log(y, x).vec / lam
        gnorm = np.sqrt(max(_mink(gvec, gvec), 0.0))
        if gnorm == 0.0:
            return y, _prox_objective(f, x, lam, y)
        eta = 2.0 * lam / (j + 1)
        y = _project_ball(x, exp(y, HTangent(y, -eta * gvec)), lam)
        disp = eta * gnorm
        val = _prox_objective(f, x, lam, y)
        if val < best_val - 1e-16 * max(1.0, abs(best_val)):
            best_y, best_val = y, val
            stall = 0
        else:
            stall += 1
        if disp < tol or stall > 200:
            return best_y, best_val
    raise ProxConvergenceError(
        f"prox did not converge in {max_iter} iterations", best_y, best_val, disp)


def _prox_max_pieces(f: FnOracle, x: HPoint, lam: float,
                     pieces: list[tuple[TotallyGeodesicSub, float]],
                     polish: bool = True) -> tuple[HPoint, float]:
    """High-accuracy prox for f = max_l { dist(., S_l) - c_l }.

    Three stages: closed-form single-piece candidates, an SLSQP solve of the
    smooth epigraph reformulation in tangent coordinates (with analytic
    jacobians), then a Newton polish of the active-set stationarity system
    (skipped for value-only queries).  The returned value is the best
    candidate objective, so it upper-bounds the true envelope and never
    exceeds f(x).
    """
    D = x.coords.size
    J = np.ones(D)
    J[0] = -1.0
    mats = [S.normals * J[None, :] for S, _ in pieces]   # q_l(y) = mats[l] @ y
    cs = np.array([c for _, c in pieces])
    U = _tangent_frame(x)
    xc = x.coords
    # hyperplane pieces (one normal each) admit a fully stacked evaluation
    stacked = np.vstack([m[0] for m in mats]) if all(
        m.shape[0] == 1 for m in mats) else None

    def y_of(u: np.ndarray) -> np.ndarray:
        rho = np.linalg.norm(u)
        if rho < 1e-18:
            return xc
        p = np.cosh(rho) * xc + (np.sinh(rho) / rho) * (u @ U)
        return p / np.sqrt(-_mink(p, p))

    def piece_vals(y: np.ndarray) -> np.ndarray:
        if stacked is not None:
            return np.arcsinh(np.abs(stacked @ y)) - cs
        return np.array([np.arcsinh(np.linalg.norm(A @ y)) for A in mats]) - cs

    def phi(y: np.ndarray) -> float:
        dd = _dist_coords(xc, y)
        return float(np.max(piece_vals(y))) + dd * dd / (2.0 * lam)

    # stage 0: candidates (the query point and the proxes of the pieces
    # nearest the max, which are the only ones the minimizer can activate)
    candidates = [xc]
    base_vals = piece_vals(xc)
    for idx in np.argsort(base_vals)[::-1][:3]:
        yc, _ = DistToSub(*pieces[idx]).prox_pair(x, lam)
        candidates.append(yc.coords)
    vals = [phi(y) for y in candidates]
    best = int(np.argmin(vals))
    y_best, v_best = candidates[best], vals[best]

    # stage 1: SLSQP on the epigraph form  min t + |u|^2/(2 lam)
    u0 = U @ (J * _log_coords(xc, y_best))
    t_lb = float(-np.min(cs))
    t0 = max(float(np.max(piece_vals(y_best))), t_lb) + 1e-9
    cache: dict = {}

    def _prep(z):
        key = z.tobytes()
        if cache.get("key") != key:
            u = z[:-1]
            rho = np.linalg.norm(u)
            if rho < 1e-18:
                y, dy = xc, U.T
            else:
                w = u @ U
                s = np.sinh(rho) / rho
                ds = (np.cosh(rho) * rho - np.sinh(rho)) / rho ** 2
                y = np.cosh(rho) * xc + s * w
                dy = (np.outer(xc, u) * (np.sinh(rho) / rho)
                      + np.outer(w, u) * (ds / rho) + s * U.T)
            qs = (stacked @ y) if stacked is not None else [A @ y for A in mats]
            cache.update(key=key, y=y, dy=dy, qs=qs)
        return cache

    def objective(z):
        return z[-1] + float(z[:-1] @ z[:-1]) / (2.0 * lam)

    def objective_jac(z):
        return np.concatenate([z[:-1] / lam, [1.0]])

    def constraints(z):
        st = _prep(z)
        t = z[-1]
        if stacked is not None:
            cons = np.sinh(t + cs) ** 2 - st["qs"] ** 2
        else:
            cons = np.array([np.sinh(t + c) ** 2 - float(q @ q)
                             for q, c in zip(st["qs"], cs)])
        return np.concatenate([cons, [lam * lam - float(z[:-1] @ z[:-1])]])

    def constraints_jac(z):
        st = _prep(z)
        t = z[-1]
        Jm = np.zeros((len(cs) + 1, z.size))
        if stacked is not None:
            Jm[:-1, :-1] = -2.0 * st["qs"][:, None] * (stacked @ st["dy"])
            Jm[:-1, -1] = np.sinh(2.0 * (t + cs))
        else:
            for i, (A, q, c) in enumerate(zip(mats, st["qs"], cs)):
                Jm[i, :-1] = -2.0 * (st["dy"].T @ (A.T @ q))
                Jm[i, -1] = np.sinh(2.0 * (t + c))
        Jm[-1, :-1] = -2.0 * z[:-1]
        return Jm

    res = optimize.minimize(
        objective, np.concatenate([u0, [t0]]), method="SLSQP",
        jac=objective_jac,
        constraints=[{"type": "ineq", "fun": constraints, "jac": constraints_jac}],
        bounds=[(None, None)] * len(u0) + [(t_lb, None)],
        options={"ftol": 1e-14, "maxiter": 120})
    y_s = y_of(res.x[:-1])
    v_s = phi(y_s)
    if v_s < v_best:
        y_best, v_best = y_s, v_s

    # stage 2: Newton polish of the active-set stationarity system
    if polish:
        polished = _polish_active_set(y_best, xc, U, mats, cs, lam, phi, y_of)
        if polished is not None:
            y_p, v_p = polished
            if v_p <= v_best + 1e-15:
                y_best, v_best = y_p, v_p

    yb = HPoint(y_best / np.sqrt(-_mink_x(y_best, y_best)))
    return yb, min(v_best, phi(yb.coords))


def _log_coords(xc: np.ndarray, yc: np.ndarray) -> np.ndarray:
    u = -_mink(xc, yc)
    if u <= 1.0 + 1e-16:
        return np.zeros_like(xc)
    Dd = np.log(u + np.sqrt((u - 1.0) * (u + 1.0)))
    w = yc - u * xc
    nw = np.sqrt(max(_mink(w, w), 0.0))
    return (Dd / nw) * w if nw > 0 else np.zeros_like(xc)


def _polish_active_set(y_start, xc, U, mats, cs, lam, phi, y_of):
    """Solve the KKT system of the prox on the detected active set."""
    d = U.shape[0]
    vals = np.array([np.arcsinh(np.linalg.norm(A @ y_start)) for A in mats]) - cs
    t = float(np.max(vals))
    active = [i for i, v in enumerate(vals) if v >= t - 1e-6 * max(1.0, abs(t))]
    if not active:
        return None
    m = len(active)
    J = np.ones(U.shape[1])
    J[0] = -1.0

    def grads_and_vals(u):
        rho = np.linalg.norm(u)
        if rho < 1e-18:
            y = xc
            dy = U.T.copy()
        else:
            w = u @ U
            s, ds = np.sinh(rho) / rho, (np.cosh(rho) * rho - np.sinh(rho)) / rho ** 2
            y = np.cosh(rho) * xc + s * w
            dy = (np.outer(xc, u) * (np.sinh(rho) / rho)
                  + np.outer(w, u) * (ds / rho) + s * U.T)
        vlist, glist = [], []
        for A, c in zip(mats, cs):
            q = A @ y
            nq = np.linalg.norm(q)
            vlist.append(np.arcsinh(nq) - c)
            if nq < 1e-300:
                glist.append(np.zeros(d))
            else:
                gy = (A.T @ (q / nq)) / np.sqrt(1.0 + nq * nq)
                glist.append(dy.T @ gy)
        return np.array(vlist), np.array(glist)

    def residual(z):
        u, wf = z[:d], z[d:]
        w = np.concatenate([wf, [1.0 - np.sum(wf)]])
        vlist, glist = grads_and_vals(u)
        stat = u / lam
        for wi, idx in zip(w, active):
            stat = stat + wi * glist[idx]
        eq = vlist[active[:-1]] - vlist[active[-1]]
        return np.concatenate([stat, eq])

    u0 = U @ (J * _log_coords(xc, y_start))
    z0 = np.concatenate([u0, np.full(m - 1, 1.0 / m)])
    try:
        sol = optimize.root(residual, z0, method="hybr", tol=1e-13)
    except Exception:
        return None
    if not sol.success and np.linalg.norm(sol.fun) > 1e-9:
        return None
    u = sol.x[:d]
    w = np.concatenate([sol.x[d:], [1.0 - np.sum(sol.x[d:])]])
    if np.any(w < -1e-8) or np.any(w > 1.0 + 1e-8):
        return None
    if np.linalg.norm(u) > lam * (1.0 + 1e-8):
        return None
    vlist, _ = grads_and_vals(u)
    t_new = np.max(vlist[active])
    if np.max(vlist) > t_new + 1e-8:
        return None
    y = y_of(u)
    return y, phi(y)


# ---------------------------------------------------------------------------
# scaling taper
# ---------------------------------------------------------------------------


def taper(D, R: float):
    """C-infinity taper applied to half-squared-distance to cap quadratic growth.

    Equals 1 for D <= R^2/2 and 1 - exp(-4/sqrt(2 D/R^2 - 1)) beyond; returns
    (value, first derivative, second derivative) in D.  The derivative combos
    appearing in the gradient/Hessian of tapered functions stay sign-definite
    (see the scalar-identity tests).
    """
    if R <= 0.0:
        raise DomainError("taper radius must be positive")
    Darr = np.asarray(D, dtype=float)
    scalar = Darr.ndim == 0
    Darr = np.atleast_1d(Darr)
    half = 0.5 * R * R
    u = np.ones_like(Darr)
    du = np.zeros_like(Darr)
    d2u = np.zeros_like(Darr)
    m = Darr > half
    if np.any(m):
        w = 2.0 * Darr[m] / (R * R) - 1.0
        tau = 1.0 / np.sqrt(w)
        e = np.exp(-4.0 * tau)
        u[m] = 1.0 - e
        du[m] = -4.0 * tau ** 3 * e / R ** 2
        d2u[m] = 4.0 * tau ** 5 * e * (3.0 - 4.0 * tau) / R ** 4
    if scalar:
        return float(u[0]), float(du[0]), float(d2u[0])
    return u, du, d2u


# ---------------------------------------------------------------------------
# sampled verification helpers (used by tests and the validation harness)
# ---------------------------------------------------------------------------


def subgradient_gap(f: FnOracle, x: HPoint, y: HPoint) -> float:
    """Slack f(y) - f(x) - <g, log_x(y)>; nonnegative for g-convex oracles."""
    Fx, g = f.eval(x)
    Fy = f.value(y)
    return Fy - Fx - float(_mink(g.vec, log(x, y).vec))


def midpoint_convexity_gap(f: FnOracle, x: HPoint, y: HPoint) -> float:
    """Slack (f(x)+f(y))/2 - f(midpoint); nonnegative for g-convex oracles."""
    mid = exp(x, log(x, y).scaled(0.5))
    return 0.5 * (f.value(x) + f.value(y)) - f.value(mid)
