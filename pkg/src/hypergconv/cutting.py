"""The cutting-planes game: a consistency-maintaining adversary on a ball packing.

The adversary seeds candidate targets from a greedy maximal packing of
B(x_ref, r - eps r) with separation 2 eps r, then answers each query with a
separating hyperplane normal chosen (by sampling) to graze as few candidate
balls as possible, keeping the side with more survivors.  Quantitative
survival laws hold only at astronomically large radii, so the module reports
empirical survival statistics and enforces just the structural invariants:
every surviving candidate is consistent with the full history, exactly.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .hyperboloid import DomainError, HPoint, HTangent, base_point, _mink
from .sampling import ball_radius_sampler, make_rng

__all__ = [
    "AdversaryExhausted",
    "CutConfig",
    "CutGameState",
    "RoundRecord",
    "GameTranscript",
    "default_eps",
    "packing_floor",
    "packing_build",
    "adversary_respond",
    "volume_ball",
    "play_game",
    "repeat_center_player",
    "random_ball_player",
    "write_transcript_json",
    "write_summary_csv",
]


class AdversaryExhausted(RuntimeError):
    """No sampled normal keeps any candidate alive: the player has won."""


def default_eps(d: int) -> float:
    return 1.0 / (320.0 * (d - 1))


@dataclass(frozen=True)
class CutConfig:
    """Game parameters; ``eps=None`` selects the canonical 1/(320(d-1)).

    ``max_centers`` caps the greedy packing: saturated packings at desk
    parameters run to 1e5+ centers, which buys nothing for the structural
    invariants the game certifies but costs minutes per seed.
    """

    d: int
    r: float
    eps: float | None = None
    n_normal_samples: int = 512
    seed: int = 0
    n_fail_factor: int = 200
    max_centers: int = 2048
    max_rounds: int = 200

    def __post_init__(self):
        if self.d < 3:
            raise DomainError("the game needs d >= 3")
        if self.r <= 0:
            raise DomainError("r must be positive")
        if self.eps is None:
            object.__setattr__(self, "eps", default_eps(self.d))
        if not (0.0 < self.eps < 1.0):
            raise DomainError("eps must lie in (0, 1)")

    @property
    def ball_radius(self) -> float:
        return self.eps * self.r

    def target_rounds(self) -> float:
        """The large-radius query floor (d-1) r / 32, reported, never asserted."""
        return (self.d - 1) * self.r / 32.0


def packing_floor(cfg: CutConfig) -> float:
    """Counting floor exp((d-1) r / 4) / 4 valid at the theorem's radii."""
    return 0.25 * np.exp(0.25 * (cfg.d - 1) * cfg.r)


def packing_build(cfg: CutConfig) -> list[HPoint]:
    """Greedy maximal packing by seeded rejection sampling.

    Samples volume-uniform points in B(x_ref, r - eps r), accepts a proposal
    if it keeps distance >= 2 eps r from all accepted centers, and stops after
    n_fail_factor * (current size) consecutive rejections.  Deterministic for
    a given seed.
    """
    rng = make_rng(cfg.seed)
    coords = _packing_coords(cfg, rng)
    return [HPoint(c) for c in coords]


def _packing_coords(cfg: CutConfig, rng: np.random.Generator) -> np.ndarray:
    d = cfg.d
    eff_r = cfg.r - cfg.ball_radius
    if eff_r <= 0:
        return base_point(d).coords[None, :]
    min_cosh = np.cosh(2.0 * cfg.ball_radius)
    sampler = ball_radius_sampler(d, eff_r)
    buf = np.empty((cfg.max_centers, d + 1))
    n_acc = 0
    fails = 0
    batch = 4096
    stop = False
    while not stop:
        ts = sampler(rng, batch)
        dirs = rng.standard_normal((batch, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pts = np.column_stack([np.cosh(ts), np.sinh(ts)[:, None] * dirs])
        # -<p, a> = p0 a0 - p.a ; conflict when any -<p,a> < cosh(2 eps r)
        n_old = n_acc
        if n_old:
            gram = pts[:, 0:1] @ buf[:n_old, 0:1].T - pts[:, 1:] @ buf[:n_old, 1:].T
            old_conflict = (gram < min_cosh).any(axis=1)
        else:
            old_conflict = np.zeros(batch, dtype=bool)
        for i in range(batch):
            conflict = bool(old_conflict[i])
            if not conflict and n_acc > n_old:
                fm = buf[n_old:n_acc]
                q = pts[i, 0] * fm[:, 0] - fm[:, 1:] @ pts[i, 1:]
                conflict = bool((q < min_cosh).any())
            if conflict:
                fails += 1
                if fails >= cfg.n_fail_factor * max(1, n_acc):
                    stop = True
                    break
            else:
                buf[n_acc] = pts[i]
                n_acc += 1
                fails = 0
                if n_acc >= cfg.max_centers:
                    stop = True
                    break
    return buf[:n_acc].copy() if n_acc else base_point(d).coords[None, :]


@dataclass
class RoundRecord:
    k: int
    x: np.ndarray
    g: np.ndarray
    hits: int
    survivors: int
    quarter_ok: bool


@dataclass
class CutGameState:
    """Surviving candidate centers plus the complete query/response history."""

    cfg: CutConfig
    candidates: np.ndarray
    history: list[RoundRecord] = field(default_factory=list)
    round: int = 0

    @property
    def n_candidates(self) -> int:
        return self.candidates.shape[0]

    def candidate_points(self) -> list[HPoint]:
        return [HPoint(c) for c in self.candidates]

    def verify_consistency(self) -> bool:
        """Exact re-check: every survivor respects every recorded half-space."""
        sh = np.sinh(self.cfg.ball_radius)
        for rec in self.history[:self.round]:
            q = _form(self.candidates, rec.g)
            if not bool(np.all(q < -sh)):
                return False
        return True


def _form(mat: np.ndarray, vec: np.ndarray) -> np.ndarray:
    return mat[:, 1:] @ vec[1:] - mat[:, 0] * vec[0]


def new_game(cfg: CutConfig) -> CutGameState:
    return CutGameState(cfg, _packing_coords(cfg, make_rng(cfg.seed)))


def adversary_respond(state: CutGameState, x_k: HPoint,
                      rng: np.random.Generator) -> HTangent:
    """Pick the sampled unit normal grazing the fewest candidate balls.

    The returned vector is signed so that every surviving candidate ball lies
    strictly on the nonpositive side; survivors are pruned in place and the
    round is recorded.  Raises AdversaryExhausted when no sampled normal
    keeps a candidate alive.
    """
    cfg = state.cfg
    if state.n_candidates == 0:
        raise AdversaryExhausted("no candidates remain")
    xc = x_k.coords
    n = cfg.n_normal_samples
    raw = rng.standard_normal((n, cfg.d + 1))
    # project to the tangent space at x and normalize
    ip = _form(raw, xc)
    raw = raw + ip[:, None] * xc[None, :]
    norms = np.sqrt(np.maximum(np.einsum("ij,ij->i", raw[:, 1:], raw[:, 1:])
                               - raw[:, 0] ** 2, 1e-300))
    raw /= norms[:, None]
    # q[c, j] = <cand_c, normal_j>; ball hit when |q| <= sinh(eps r)
    q = state.candidates[:, 1:] @ raw[:, 1:].T - np.outer(state.candidates[:, 0], raw[:, 0])
    sh = np.sinh(cfg.ball_radius)
    hits = (np.abs(q) <= sh).sum(axis=0)
    best = int(np.argmin(hits))
    col = q[:, best]
    surv_plus = int((col < -sh).sum())    # survivors if g = +normal
    surv_minus = int((col > sh).sum())    # survivors if g = -normal
    if max(surv_plus, surv_minus) == 0:
        raise AdversaryExhausted("every sampled normal eliminates all candidates")
    if surv_plus >= surv_minus:
        g_vec, keep = raw[best], col < -sh
        survivors = surv_plus
    else:
        g_vec, keep = -raw[best], col > sh
        survivors = surv_minus
    quarter_ok = survivors >= state.n_candidates / 4.0
    state.candidates = state.candidates[keep]
    state.history.append(RoundRecord(state.round, xc.copy(), g_vec.copy(),
                                     int(hits[best]), survivors, bool(quarter_ok)))
    state.round += 1
    if not state.verify_consistency():
        raise AssertionError("survivor consistency invariant broken")
    return HTangent(x_k, g_vec)


def _adaptive_simpson(f, a: float, b: float, rel_tol: float) -> float:
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fb, fm, whole, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        if depth > 48 or abs(left + right - whole) <= \
                15.0 * rel_tol * max(abs(left + right), 1e-300):
            return left + right + (left + right - whole) / 15.0
        return (recurse(a, m, fa, fm, flm, left, depth + 1)
                + recurse(m, b, fm, fb, frm, right, depth + 1))

    return recurse(a, b, fa, fb, fm, whole, 0)


def volume_ball(d: int, r: float) -> float:
    """Hyperbolic ball volume omega_d * integral_0^r sinh^{d-1}(t) dt.

    Adaptive Simpson quadrature with relative tolerance 1e-8.
    """
    if d < 2:
        raise DomainError("volume needs d >= 2")
    if r < 0:
        raise DomainError("radius must be nonnegative")
    if r == 0.0:
        return 0.0
    omega = np.pi ** (d / 2.0) / special.gamma(d / 2.0 + 1.0)
    return omega * _adaptive_simpson(lambda t: np.sinh(t) ** (d - 1), 0.0, r, 1e-8)


def repeat_center_player(cfg: CutConfig):
    """Queries the reference point forever."""
    center = base_point(cfg.d)

    def pick(state: CutGameState, rng: np.random.Generator) -> HPoint:
        return center

    return pick


def random_ball_player(cfg: CutConfig):
    """Queries volume-uniform random points of B(x_ref, r)."""
    center = base_point(cfg.d)
    sampler = ball_radius_sampler(cfg.d, cfg.r)

    def pick(state: CutGameState, rng: np.random.Generator) -> HPoint:
        t = float(sampler(rng, 1)[0])
        dirs = rng.standard_normal(cfg.d)
        dirs /= np.linalg.norm(dirs)
        return HPoint(np.concatenate([[np.cosh(t)], np.sinh(t) * dirs]))

    return pick


@dataclass
class GameTranscript:
    cfg: CutConfig
    packing_size: int
    floor: float
    rounds_survived: int
    exhausted: bool
    quarter_violations: int
    xstar: np.ndarray | None
    state: CutGameState

    def replay_ok(self) -> bool:
        """Exact consistency of the selected target with the verified history."""
        if self.xstar is None:
            return False
        sh = np.sinh(self.cfg.ball_radius)
        for rec in self.state.history[:self.rounds_survived]:
            if not (_form(self.xstar[None, :], rec.g)[0] < -sh):
                return False
        return True


def play_game(cfg: CutConfig, player=None) -> GameTranscript:
    """Run rounds until the adversary is exhausted or max_rounds is reached.

    The adversary's RNG stream is derived from the seed and is independent of
    the packing stream, so transcripts are reproducible.
    """
    if player is None:
        player = repeat_center_player(cfg)
    state = new_game(cfg)
    packing_size = state.n_candidates
    adv_rng = make_rng(cfg.seed + 0x9E3779B9)
    player_rng = make_rng(cfg.seed + 0x61C88647)
    exhausted = False
    while state.round < cfg.max_rounds and state.n_candidates > 0:
        x = player(state, player_rng)
        try:
            adversary_respond(state, x, adv_rng)
        except AdversaryExhausted:
            exhausted = True
            break
    rounds = state.round
    xstar = state.candidates[0].copy() if state.n_candidates else None
    quarter_violations = sum(1 for rec in state.history if not rec.quarter_ok)
    return GameTranscript(cfg, packing_size, packing_floor(cfg), rounds,
                          exhausted, quarter_violations, xstar, state)


def write_transcript_json(tr: GameTranscript, path) -> None:
    doc = {
        "config": {"d": tr.cfg.d, "r": tr.cfg.r, "eps": tr.cfg.eps,
                   "n_normal_samples": tr.cfg.n_normal_samples, "seed": tr.cfg.seed},
        "packing_size": tr.packing_size,
        "theoretical_floor": tr.floor,
        "target_rounds": tr.cfg.target_rounds(),
        "rounds_survived": tr.rounds_survived,
        "exhausted": tr.exhausted,
        "xstar": None if tr.xstar is None else tr.xstar.tolist(),
        "rounds": [
            {"k": rec.k, "x": rec.x.tolist(), "g": rec.g.tolist(),
             "hits": rec.hits, "survivors": rec.survivors,
             "quarter_ok": rec.quarter_ok}
            for rec in tr.state.history
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def write_summary_csv(transcripts: list[GameTranscript], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["seed", "d", "r", "eps", "rounds_survived",
                    "quarter_law_violations"])
        for tr in transcripts:
            w.writerow([tr.cfg.seed, tr.cfg.d, f"{tr.cfg.r:.17g}",
                        f"{tr.cfg.eps:.17g}", tr.rounds_survived,
                        tr.quarter_violations])
