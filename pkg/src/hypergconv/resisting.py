"""Adversarial first-order oracles.

Three constructions:

* a nonsmooth resisting oracle that lazily builds a max of shifted
  distances to orthogonally-arranged hyperplanes, forcing a gap of at least
  ``r / (2 zeta(r) sqrt(T))`` for T queries;
* its Moreau-smoothed variant with smoothness ``1/tanh(a/(8T))`` and gap
  at least ``(L r^2 / T^2) / (16 zeta(r)^2)``;
* a fixed "worst function" ``dist(., x*) + max_k dist(., L_k)/cos(theta)``
  whose carefully selected subgradients keep span-respecting players (Polyak
  subgradient descent in particular) on a predetermined ladder of points.

Games are sequential-query objects; finalized functions are immutable oracles.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .hyperboloid import (
    R_MAX,
    DomainError,
    GeometryViolation,
    HalfSpace,
    HPoint,
    HTangent,
    RangeLimitError,
    TotallyGeodesicSub,
    _mink,
    _mink_x,
    base_point,
    dist,
    exp,
    frame_at_base,
    gspan,
    halfspace_dist,
    log,
    ptransport,
    right_triangle,
    sub_dist,
    zeta,
)
from .oracles import (
    FnOracle,
    MoreauParams,
    OracleSample,
    ShiftedMax,
    fn_dist_sub,
    fn_moreau,
)
from .solvers import Trace

__all__ = [
    "BudgetExhausted",
    "NonsmoothGame",
    "SmoothGame",
    "GameOracle",
    "WorstInstance",
    "nonsmooth_new",
    "smooth_new",
    "nonsmooth_gap_bound",
    "smooth_gap_bound",
    "worst_build",
    "worst_oracle",
    "a2_check",
    "gap_bound_check",
    "export_transcript_jsonl",
]

logger = logging.getLogger(__name__)

# Queries are accepted as lying on a submanifold / inside a half-space
# within these residuals.
MEMBERSHIP_TOL = 1e-9


class BudgetExhausted(RuntimeError):
    """More adversarial queries were made than the game's budget T."""


def _rebase(x: HPoint, vec: np.ndarray) -> HTangent:
    """Tangent at x from an ambient vector that is tangent only approximately."""
    v = vec + _mink_x(vec, x.coords) * x.coords
    return HTangent(x, v)


class _GameBase:
    """Shared state for the max-of-hyperplane-distance resisting games."""

    def __init__(self, T: int, r: float):
        if T < 2:
            raise DomainError("the construction needs T = d >= 2")
        if not (0.0 < r <= R_MAX):
            raise RangeLimitError(f"radius must lie in (0, {R_MAX}]")
        self.T = T
        self.d = T
        self.r = float(r)
        self.a = float(np.arctanh(np.tanh(r) / np.sqrt(self.d)))
        self.delta = self.a / (2.0 * T)
        self.xref = base_point(self.d)
        self.frame = frame_at_base(self.d)
        # hyperplane through z_i^s orthogonal to the geodesic back to x_ref
        self._subs: dict[tuple[int, int], TotallyGeodesicSub] = {}
        self._z: dict[tuple[int, int], HPoint] = {}
        for i in range(1, self.d + 1):
            for s in (+1, -1):
                z = exp(self.xref, self.frame[i - 1].scaled(self.a * s))
                n = log(z, self.xref)
                self._z[(i, s)] = z
                self._subs[(i, s)] = HalfSpace(z, n.scaled(1.0 / n.norm)).boundary
        self.remaining: list[int] = list(range(1, self.d + 1))
        self.chosen: list[tuple[int, int]] = []
        self.history: list[OracleSample] = []
        self.selection_margins: list[dict] = []
        self._final = None

    # -- construction pieces ------------------------------------------------

    def _h_value(self, i: int, s: int, x: HPoint) -> float:
        return sub_dist(x, self._subs[(i, s)])[0] - self.a

    def _piece(self, i: int, s: int) -> FnOracle:
        return fn_dist_sub(self._subs[(i, s)], self.a)

    def running_max(self, k: int) -> ShiftedMax:
        """The committed function after k+1 selections (pieces 0..k)."""
        parts = [(self._piece(i, s), ell * self.delta)
                 for ell, (i, s) in enumerate(self.chosen[:k + 1])]
        return ShiftedMax(parts)

    def _select(self, x: HPoint) -> tuple[int, int]:
        best = None
        best_val = -np.inf
        runner = -np.inf
        for i in self.remaining:
            for s in (+1, -1):
                v = self._h_value(i, s, x)
                if v > best_val:
                    runner = best_val
                    best, best_val = (i, s), v
                elif v > runner:
                    runner = v
        if best_val < -MEMBERSHIP_TOL:
            logger.warning("selected h value %.3e is negative beyond tolerance", best_val)
        self.selection_margins.append(
            {"h_selected": best_val, "runner_up_gap": best_val - runner})
        return best

    def _advance(self, x: HPoint) -> ShiftedMax:
        if len(self.chosen) >= self.T:
            raise BudgetExhausted(f"all {self.T} adversarial responses consumed")
        i, s = self._select(x)
        self.chosen.append((i, s))
        self.remaining.remove(i)
        return self.running_max(len(self.chosen) - 1)

    def _pad(self) -> None:
        for i in list(self.remaining):
            self.chosen.append((i, +1))
            self.remaining.remove(i)

    def _xstar(self) -> HPoint:
        vec = np.zeros(self.d + 1)
        for (i, s) in self.chosen:
            vec += s * self.frame[i - 1].vec
        return exp(self.xref, HTangent(self.xref, vec * (self.r / np.sqrt(self.d))))

    def finalize(self):
        """Commit to the final function; returns (oracle, minimizer, minimum)."""
        if self._final is None:
            self._pad()
            f = self._final_oracle()
            xstar = self._xstar()
            fstar = -self.a
            f.minimizer = xstar
            f.fmin = fstar
            self._final = (f, xstar, fstar)
        return self._final

    def certificate(self) -> dict:
        """Measured finalize-time certificates (distances, minimum, law-of-cosines)."""
        f, xstar, fstar = self.finalize()
        fx, _ = f.eval(xstar)
        subdists = [sub_dist(xstar, self._subs[key])[0] for key in self.chosen]
        lawcos = []
        for key in self.chosen:
            b = dist(xstar, self._z[key])
            lawcos.append(abs(np.cosh(b) - np.cosh(self.r) / np.cosh(self.a)))
        return {
            "dist_xref_xstar": dist(self.xref, xstar),
            "f_at_xstar": fx,
            "fstar": fstar,
            "max_subdist_xstar": max(subdists),
            "max_lawcos_residual": max(lawcos),
            "gap_bound": self.gap_bound(),
            "min_recorded_gap": min((s.F - fstar for s in self.history), default=np.inf),
        }

    def gap_bound(self) -> float:
        raise NotImplementedError


class NonsmoothGame(_GameBase):
    """Resisting oracle for Lipschitz g-convex optimization (budget T queries)."""

    def respond(self, x: HPoint) -> OracleSample:
        fk = self._advance(x)
        F, g = fk.eval(x)
        sample = OracleSample(F, x, g)
        self.history.append(sample)
        return sample

    def _final_oracle(self) -> ShiftedMax:
        f = self.running_max(self.T - 1)
        f.lipschitz = 1.0
        return f

    def gap_bound(self) -> float:
        """Certified floor on every recorded gap: r / (2 zeta(r) sqrt(T))."""
        return self.r / (2.0 * float(zeta(self.r)) * np.sqrt(self.T))


class SmoothGame(_GameBase):
    """Moreau-smoothed resisting oracle; responses come from the running envelope."""

    def __init__(self, T: int, r: float, prox_tol: float = 1e-10,
                 prox_max_iter: int = 10_000):
        super().__init__(T, r)
        self.lam = self.delta / 4.0
        self.smoothness = 1.0 / np.tanh(self.lam)
        self._params = MoreauParams(self.lam, prox_tol, prox_max_iter)

    def running_envelope(self, k: int):
        return fn_moreau(self.running_max(k), self._params)

    def respond(self, x: HPoint) -> OracleSample:
        self._advance(x)
        env = self.running_envelope(len(self.chosen) - 1)
        F, g = env.eval(x)
        sample = OracleSample(F, x, g)
        self.history.append(sample)
        return sample

    def _final_oracle(self):
        f = fn_moreau(self._final_nonsmooth(), self._params)
        return f

    def _final_nonsmooth(self) -> ShiftedMax:
        f = self.running_max(self.T - 1)
        f.lipschitz = 1.0
        return f

    def gap_bound(self) -> float:
        """Certified floor on every recorded gap: (L r^2 / T^2) / (16 zeta(r)^2)."""
        L = self.smoothness
        return 0.5 * (L * self.r ** 2 / self.T ** 2) / (8.0 * float(zeta(self.r)) ** 2)


def nonsmooth_new(T: int, r: float) -> NonsmoothGame:
    return NonsmoothGame(T, r)


def smooth_new(T: int, r: float, **kw) -> SmoothGame:
    return SmoothGame(T, r, **kw)


def nonsmooth_gap_bound(T: int, r: float) -> float:
    return NonsmoothGame(T, r).gap_bound()


def smooth_gap_bound(T: int, r: float) -> float:
    return SmoothGame(T, r).gap_bound()


class GameOracle(FnOracle):
    """FnOracle facade over a game: adversarial for the first T queries, then frozen.

    The optimum value -a is known before play starts (it depends only on T
    and r), so exact-f* players can run against the adversary.
    """

    def __init__(self, game: _GameBase):
        self.game = game
        self.gconvex = True
        self.lipschitz = 1.0
        self.fmin = -game.a
        self.smoothness = getattr(game, "smoothness", None)

    def eval(self, x):
        if len(self.game.chosen) < self.game.T and self.game._final is None:
            s = self.game.respond(x)
            return s.F, s.g
        f, _, _ = self.game.finalize()
        return f.eval(x)


def export_transcript_jsonl(game: _GameBase, path) -> None:
    """One JSON record per query: k, x, F, g, chosen pair, selection margins."""
    with open(path, "w") as fh:
        for k, sample in enumerate(game.history):
            i, s = game.chosen[k]
            rec = {
                "k": k,
                "x": sample.x.coords.tolist(),
                "F": sample.F,
                "g": sample.g.vec.tolist(),
                "chosen_i": i,
                "chosen_s": s,
                "margins": game.selection_margins[k],
            }
            fh.write(json.dumps(rec) + "\n")


# ---------------------------------------------------------------------------
# Worst function in the world
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WorstInstance:
    """Predetermined query ladder and half-space fan for the worst function.

    ``frames[k]`` holds the transported orthonormal frame at ``ladder[k]``
    (row i-1 is the i-th frame vector in ambient coordinates).
    """

    theta: float
    eps: float
    r: float
    d: int
    M: float
    ladder: list[HPoint]
    radii: list[float]
    deltas: list[float]
    frames: list[np.ndarray]
    xstar: HPoint
    halfspaces: list[HalfSpace]

    @property
    def T(self) -> int:
        return self.d

    def gtilde(self, k: int) -> np.ndarray:
        """Ambient coordinates of the oracle's answer at ladder point k."""
        return -self.frames[k][k] / np.cos(self.theta)


def worst_build(eps: float, r: float, pick: int = +1) -> WorstInstance:
    """Build the worst-function geometry for accuracy eps and radius r.

    The ladder holds d = floor(zeta(r) / (32 eps^2)) points; each step is a
    right hyperbolic triangle with angle theta = arccos(4 eps) at the current
    point, so radii shrink by sinh(r_k) = sin(theta) sinh(r_{k-1}) while
    staying at least r/2.
    """
    if not (0.0 < eps <= 1.0 / (4.0 * np.sqrt(2.0)) + 1e-15):
        raise DomainError("eps must lie in (0, 1/(4 sqrt(2))]")
    # the fan of half-spaces multiplies two cosh(r)-size coordinate scales, so
    # double precision only supports the construction up to r ~ 14 (certificates
    # are criterion-grade up to r ~ 10); highprec.worst_trajectory_report covers
    # larger radii
    if not (0.0 < r <= 14.0):
        raise RangeLimitError(
            "worst_build supports r <= 14 in double precision; "
            "use highprec.worst_trajectory_report for larger radii")
    if pick not in (+1, -1):
        raise DomainError("pick must be +1 or -1")
    costh = 4.0 * eps
    theta = float(np.arccos(costh))
    d = int(np.floor(float(zeta(r)) / (32.0 * eps * eps)))
    if d < 2:
        raise DomainError(f"eps={eps} too large for r={r}: ladder has d={d} < 2 levels")

    D = d + 1
    y = [base_point(d)]
    radii = [float(r)]
    deltas: list[float] = []
    frame0 = np.eye(D)[1:, :]
    frames = [frame0]
    for k in range(1, d):
        delta, rk = right_triangle(radii[k - 1], theta)
        deltas.append(delta)
        radii.append(rk)
        yk = np.cosh(delta) * y[k - 1].coords + np.sinh(delta) * frames[k - 1][k - 1]
        ykp = HPoint(yk / np.sqrt(-_mink_x(yk, yk)))
        fr = frames[k - 1].copy()
        fr[k - 1] = np.sinh(delta) * y[k - 1].coords + np.cosh(delta) * frames[k - 1][k - 1]
        for i in range(k - 1):
            fr[i] = ptransport(y[k - 1], ykp, _rebase(y[k - 1], frames[k - 1][i])).vec
        frames.append(fr)
        y.append(ykp)

    xs = np.cosh(radii[-1]) * y[-1].coords + pick * np.sinh(radii[-1]) * frames[-1][d - 1]
    xstar = HPoint(xs / np.sqrt(-_mink_x(xs, xs)))

    halfspaces = []
    for k in range(d - 1):
        lg = log(y[k], xstar)
        dk = lg.norm
        V = frames[k][k] / costh - lg.vec / dk
        nV = np.sqrt(max(_mink_x(V, V), 0.0))
        if abs(nV - np.tan(theta)) > 1e-6 * max(1.0, np.tan(theta)):
            raise GeometryViolation("half-space normal norm deviates from tan(theta)")
        halfspaces.append(HalfSpace(y[k], _rebase(y[k], V / nV)))

    inst = WorstInstance(theta=theta, eps=eps, r=float(r), d=d, M=2.0 / costh,
                         ladder=y, radii=radii, deltas=deltas, frames=frames,
                         xstar=xstar, halfspaces=halfspaces)
    _verify_instance(inst)
    return inst


def _verify_instance(inst: WorstInstance) -> None:
    """Build-time invariant checks; raises GeometryViolation on failure."""
    d, D = inst.d, inst.d + 1
    for k in range(1, d):
        lhs = np.cosh(inst.radii[k - 1])
        rhs = np.cosh(inst.radii[k]) * np.cosh(inst.deltas[k - 1])
        if abs(lhs - rhs) > 1e-9 * max(1.0, lhs):
            raise GeometryViolation("triangle identity failed in the ladder")
    if min(inst.radii) < inst.r / 2.0 - 1e-9:
        raise GeometryViolation("ladder radius fell below r/2")
    for k in range(d):
        fr = inst.frames[k]
        gram = np.array([[_mink_x(fr[i], fr[j]) for j in range(d)] for i in range(d)])
        if np.max(np.abs(gram - np.eye(d))) > 1e-8:
            raise GeometryViolation("transported frame lost orthonormality")
        for i in range(k + 1, d):
            if np.max(np.abs(fr[i] - np.eye(D)[i + 1])) > 1e-9:
                raise GeometryViolation("frame vectors beyond the step index moved")
        for i in range(1, k + 1):
            if abs(_mink_x(inst.ladder[k].coords, inst.frames[i][i - 1])) > 1e-8:
                raise GeometryViolation("ladder point left its orthogonality slab")
    lg_last = log(inst.ladder[-1], inst.xstar)
    for i in range(d - 1):
        if abs(_mink_x(lg_last.vec, inst.frames[d - 1][i])) > 1e-8:
            raise GeometryViolation("x* direction is not orthogonal to the ladder span")
    for k, L in enumerate(inst.halfspaces):
        if abs(L.margin(inst.xstar)) > 1e-8:
            raise GeometryViolation("x* is not on a half-space boundary")


class WorstFunctionOracle(FnOracle):
    """Honest oracle for dist(., x*) + max_k dist(., L_k)/cos(theta).

    The subgradient selection is the information-hiding one: at a point of
    the k-th ladder span that satisfies all past half-space constraints, the
    answer combines the transported half-space normal with the direction to
    x*, leaving the next span tangent.  Off that locus the oracle falls back
    to plain max-rule subgradients; if the query violates a half-space
    constraint the fallback is flagged (the hiding guarantee needs queries to
    stay inside all committed half-spaces).
    """

    def __init__(self, inst: WorstInstance):
        self.inst = inst
        self.gconvex = True
        self.lipschitz = inst.M
        self.minimizer = inst.xstar
        self.fmin = 0.0
        self._costh = np.cos(inst.theta)

    def _value_and_term(self, x: HPoint):
        hs = np.array([halfspace_dist(x, L) for L in self.inst.halfspaces])
        term = float(np.max(hs)) / self._costh
        return dist(x, self.inst.xstar) + term, hs

    def _span_index(self, x: HPoint) -> int | None:
        # ladder span k is M intersect span(e_0..e_k); membership means the
        # coordinates beyond index k vanish
        for k in range(self.inst.d - 1):
            tail = x.coords[k + 1:]
            if np.arcsinh(np.linalg.norm(tail)) <= MEMBERSHIP_TOL:
                return k
        return None

    def eval_detailed(self, x: HPoint):
        inst = self.inst
        F, hs = self._value_and_term(x)
        margins = np.array([L.margin(x) for L in inst.halfspaces])
        inside = bool(np.all(margins >= -MEMBERSHIP_TOL))

        for k, yk in enumerate(inst.ladder):
            if dist(x, yk) <= MEMBERSHIP_TOL:
                if k <= inst.d - 2:
                    g = _rebase(x, inst.gtilde(k))
                    return F, g, {"branch": "ladder", "k": k, "a2_ok": True}
                break

        k = self._span_index(x)
        if k is not None and inside:
            dyx = dist(x, inst.xstar)
            lg = log(x, inst.xstar)
            yk1 = inst.ladder[k + 1]
            lk1 = log(x, yk1)
            dk1 = lk1.norm
            if dyx > 0 and dk1 > 0:
                c = _mink_x(lk1.vec, lg.vec) / (dk1 * dyx)
                c = min(max(c, -1.0), 1.0)
                sin_ty = np.sqrt(max(1.0 - c * c, 0.0))
                pn = ptransport(inst.halfspaces[k].anchor, x, inst.halfspaces[k].normal)
                ghat = -(sin_ty / self._costh) * pn.vec
                g = _rebase(x, ghat - lg.vec / dyx)
                return F, g, {"branch": "span", "k": k, "a2_ok": True}

        # fallback: max-rule subgradient of the half-space term plus the
        # distance gradient
        vec = np.zeros_like(x.coords)
        dyx = dist(x, inst.xstar)
        if dyx > 1e-14:
            vec -= log(x, inst.xstar).vec / dyx
        mx = float(np.max(hs))
        if mx > 0.0:
            kk = int(np.argmax(hs))
            dsub, foot = sub_dist(x, inst.halfspaces[kk].boundary)
            if dsub > 1e-14:
                vec -= log(x, foot).vec / (dsub * self._costh)
        if not inside:
            logger.warning("query outside a committed half-space "
                           "(min margin %.3e): hiding guarantee void", margins.min())
        return F, _rebase(x, vec), {"branch": "fallback", "k": None, "a2_ok": inside}

    def eval(self, x):
        F, g, _ = self.eval_detailed(x)
        return F, g


def worst_oracle(inst: WorstInstance) -> WorstFunctionOracle:
    return WorstFunctionOracle(inst)


# ---------------------------------------------------------------------------
# trace checks
# ---------------------------------------------------------------------------


@dataclass
class QueryCheck:
    k: int
    a1_ok: bool
    a1_residual: float
    a2_ok: bool
    min_margin: float


@dataclass
class TraceReport:
    rows: list[QueryCheck] = field(default_factory=list)

    @property
    def a1_all(self) -> bool:
        return all(r.a1_ok for r in self.rows)

    @property
    def a2_all(self) -> bool:
        return all(r.a2_ok for r in self.rows)


def a2_check(inst: WorstInstance, trace: Trace) -> TraceReport:
    """Per-query containment report: half-space membership and span containment.

    The span condition requires each query to lie in the minimal totally
    geodesic submanifold of all previous queries and answers (residual 1e-7);
    the membership condition requires each query x_k to lie inside every
    half-space committed before step k (translated margin tolerance 1e-9).
    An empty trace passes vacuously.
    """
    report = TraceReport()
    pts: list[HPoint] = []
    vecs: list[HTangent] = []
    for k, sample in enumerate(trace.samples):
        x = sample.x
        if k == 0:
            a1_res = dist(x, inst.ladder[0])
        else:
            span = gspan(pts, [v for v in vecs if v.norm > 0])
            a1_res = sub_dist(x, span)[0]
        a1_ok = a1_res <= 1e-7
        upto = min(k, len(inst.halfspaces))
        margins = [inst.halfspaces[i].margin(x) for i in range(upto)]
        mm = min(margins) if margins else np.inf
        report.rows.append(QueryCheck(k, a1_ok, float(a1_res),
                                      bool(mm >= -MEMBERSHIP_TOL), float(mm)))
        pts.append(x)
        vecs.append(sample.g)
    return report


@dataclass
class GapBoundReport:
    ok: bool
    gap: float
    bound: float


def gap_bound_check(f: FnOracle, xref: HPoint, r: float,
                    slack: float = 1e-6) -> GapBoundReport:
    """Check f(xref) - f* <= (1/2) L r^2 * 8/zeta(r) for smooth g-convex f."""
    if f.fmin is None or f.smoothness is None:
        raise DomainError("gap bound check needs fmin and smoothness metadata")
    gap = f.value(xref) - f.fmin
    bound = 0.5 * f.smoothness * r * r * 8.0 / float(zeta(r))
    return GapBoundReport(gap <= bound + slack, gap, bound)
