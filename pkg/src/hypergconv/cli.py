"""Batch experiment driver: JSON config in, CSV summary + JSON transcript out.

Exit codes: 0 all checks passed, 1 at least one check failed (the failing
row is printed), 2 unusable config.  Reruns with the same config and seed
produce byte-identical CSV bodies except for the runtime column, which is
excluded from the determinism contract.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import itertools
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import cutting, interpolation, resisting, solvers
from .hyperboloid import _mink_x, base_point, dist, exp, zeta
from .hyperboloid import log as hlog
from .oracles import (
    MoreauParams,
    fn_dist_point,
    fn_moreau,
    fn_shifted_max,
    fn_sqdist_point,
    midpoint_convexity_gap,
    subgradient_gap,
    taper,
)
from .sampling import ball_radius_sampler, make_rng, random_point_in_ball, \
    random_unit_tangent
from .instances import max_of_distances_instance

KINDS = ["lb-nonsmooth", "lb-smooth", "polyak-worst", "cut-game", "interp",
         "zoo-validate", "sweep"]

CSV_COLUMNS = ["kind", "case", "measured", "bound", "passed", "runtime_s"]


def _row(kind, case, measured, bound, passed, runtime):
    return {
        "kind": kind,
        "case": case,
        "measured": f"{measured:.17g}",
        "bound": f"{bound:.17g}",
        "passed": str(bool(passed)),
        "runtime_s": f"{runtime:.3f}",
    }


# ---------------------------------------------------------------------------
# experiment runners: each returns (rows, transcript)
# ---------------------------------------------------------------------------


def _players_for_game(names, game, seed):
    out = {}
    for name in names:
        if name == "polyak":
            out[name] = lambda go, g=game: solvers.polyak_sgd(
                go, fstar=-g.a, x0=g.xref, s0=g.r, T=g.T)
        elif name == "rgd":
            out[name] = lambda go, g=game: solvers.rgd(
                go, step=g.r / (4.0 * g.T), x0=g.xref, T=g.T)
        elif name == "random":
            def rand_player(go, g=game, s=seed):
                rng = make_rng(s)
                sampler = ball_radius_sampler(g.d, g.r)
                tr = solvers.Trace()
                for _ in range(g.T):
                    p = random_point_in_ball(rng, g.xref, g.r, sampler)
                    F, gr = go.eval(p)
                    tr.samples.append(resisting.OracleSample(F, p, gr))
                return tr
            out[name] = rand_player
        else:
            raise ValueError(f"unknown player {name!r}")
    return out


def _game_rows(kind, game_factory, players, seed, extra_checks=None):
    rows, transcript = [], {}
    for name in players:
        t0 = time.perf_counter()
        game = game_factory()
        go = resisting.GameOracle(game)
        _players_for_game([name], game, seed)[name](go)
        f, xstar, fstar = game.finalize()
        cert = game.certificate()
        bound = game.gap_bound()
        min_gap = cert["min_recorded_gap"]
        replay = max(abs(f.value(s.x) - s.F) for s in game.history)
        cert_ok = (abs(cert["dist_xref_xstar"] - game.r) <= 1e-9
                   and abs(cert["f_at_xstar"] - fstar) <= 1e-8
                   and cert["max_subdist_xstar"] <= 1e-8
                   and cert["max_lawcos_residual"] <= 1e-9)
        gaps_ok = min_gap >= bound - 1e-9
        extra_ok, extra_info = True, {}
        if extra_checks is not None:
            extra_ok, extra_info = extra_checks(game, seed)
        dt = time.perf_counter() - t0
        rows.append(_row(kind, f"player={name}", min_gap, bound,
                         gaps_ok and cert_ok and replay <= 1e-9 and extra_ok, dt))
        transcript[name] = {
            "certificate": cert,
            "replay_residual": replay,
            "chosen": game.chosen,
            **extra_info,
        }
    return rows, transcript


def run_lb_nonsmooth(params, seed):
    T, r = int(params["T"]), float(params["r"])
    players = params.get("players", ["polyak", "rgd", "random"])
    return _game_rows("lb-nonsmooth", lambda: resisting.nonsmooth_new(T, r),
                      players, seed)


def run_lb_smooth(params, seed):
    T, r = int(params["T"]), float(params["r"])
    players = params.get("players", ["polyak"])
    n_sandwich = int(params.get("sandwich_samples", 20))
    n_chords = int(params.get("chord_samples", 12))

    def extra(game, seed):
        rng = make_rng(seed + 1)
        lam = game.lam
        L = game.smoothness
        worst_sandwich = 0.0
        for k in range(game.T):
            fk = game.running_max(k)
            env = game.running_envelope(k)
            xk = game.history[k].x
            for _ in range(n_sandwich):
                p = random_point_in_ball(rng, xk, game.delta / 2.0)
                fv, ev = fk.value(p), env.value(p)
                worst_sandwich = max(worst_sandwich, ev - fv, (fv - lam) - ev)
        f, _, _ = game.finalize()
        worst_slope = 0.0
        for _ in range(n_chords):
            p = random_point_in_ball(rng, game.xref, game.r / 2.0)
            u = random_unit_tangent(rng, p)
            h = lam * (1.0 + 3.0 * rng.uniform())
            q = exp(p, u.scaled(h))
            _, gp = f.eval(p)
            _, gq = f.eval(q)
            diffvec = resisting.ptransport(p, q, gp).vec - gq.vec
            slope = np.sqrt(max(float(np.sum(diffvec[1:] ** 2) - diffvec[0] ** 2), 0.0)) / h
            worst_slope = max(worst_slope, slope)
        ok = worst_sandwich <= 1e-9 and worst_slope <= L + 1e-3
        return ok, {"worst_sandwich": worst_sandwich,
                    "worst_chord_slope": worst_slope, "L": L}

    return _game_rows("lb-smooth", lambda: resisting.smooth_new(T, r),
                      players, seed, extra_checks=extra)


def run_polyak_worst(params, seed):
    eps, r = float(params["eps"]), float(params["r"])
    use_hp = bool(params.get("highprec", r > 10.0))
    t0 = time.perf_counter()
    if use_hp:
        from .highprec import worst_trajectory_report
        rep = worst_trajectory_report(eps, r)
        d = rep.d
        ladder_err, radius_err = rep.max_ladder_dist, rep.max_radius_err
        step_err, gap_err, min_gap = rep.max_step_err, rep.max_gap_err, rep.min_gap
    else:
        inst = resisting.worst_build(eps, r)
        f = resisting.worst_oracle(inst)
        trace = solvers.polyak_sgd(f, fstar=0.0, x0=inst.ladder[0],
                                   s0=inst.r, T=inst.T)
        d = inst.d
        ladder_err = max(dist(s.x, y) for s, y in zip(trace.samples, inst.ladder))
        radius_err = max(abs(s - rk) for s, rk in zip(trace.radii, inst.radii))
        step_err = max(abs(e - dk) for e, dk
                       in zip(trace.step_lengths[:inst.d - 1], inst.deltas))
        gap_err = max(abs(g - rk) for g, rk in zip(trace.gaps, inst.radii))
        min_gap = min(trace.gaps)
    dt = time.perf_counter() - t0
    rows = [
        _row("polyak-worst", f"eps={eps},r={r},trajectory", ladder_err, 1e-6,
             ladder_err <= 1e-6, dt),
        _row("polyak-worst", f"eps={eps},r={r},radii", radius_err, 1e-8,
             radius_err <= 1e-8, 0.0),
        _row("polyak-worst", f"eps={eps},r={r},steps", step_err, 1e-8,
             step_err <= 1e-8, 0.0),
        _row("polyak-worst", f"eps={eps},r={r},gap=floor(r/2)", min_gap, r / 2.0,
             min_gap >= r / 2.0 - 1e-6 and gap_err <= 1e-6, 0.0),
    ]
    transcript = {"d": d, "highprec": use_hp, "ladder_err": ladder_err,
                  "radius_err": radius_err, "step_err": step_err,
                  "gap_err": gap_err, "min_gap": min_gap}
    return rows, transcript


def run_cut_game(params, seed):
    d, r = int(params.get("d", 3)), float(params.get("r", 6.0))
    eps = params.get("eps", 0.1)
    games = int(params.get("games", 5))
    max_rounds = int(params.get("max_rounds", 40))
    player_name = params.get("player", "random")
    rows, games_t = [], []
    total_rounds = quarter_ok_rounds = 0
    all_consistent = all_replay = True
    for i in range(games):
        t0 = time.perf_counter()
        cfg = cutting.CutConfig(d=d, r=r, eps=eps, seed=seed + i,
                                max_rounds=max_rounds)
        player = (cutting.random_ball_player(cfg) if player_name == "random"
                  else cutting.repeat_center_player(cfg))
        tr = cutting.play_game(cfg, player)
        dt = time.perf_counter() - t0
        consistent = tr.state.verify_consistency()
        replay = tr.replay_ok() if tr.xstar is not None else tr.exhausted
        nrounds = len(tr.state.history)
        nquarter = sum(1 for rec in tr.state.history if rec.quarter_ok)
        total_rounds += nrounds
        quarter_ok_rounds += nquarter
        all_consistent &= consistent
        all_replay &= replay
        rows.append(_row("cut-game", f"seed={seed + i}",
                         nquarter / max(nrounds, 1), 0.25,
                         consistent and replay, dt))
        games_t.append({"seed": seed + i, "packing_size": tr.packing_size,
                        "floor": tr.floor, "rounds": tr.rounds_survived,
                        "exhausted": tr.exhausted,
                        "quarter_violations": tr.quarter_violations,
                        "target_rounds": cfg.target_rounds()})
    frac = quarter_ok_rounds / max(total_rounds, 1)
    rows.append(_row("cut-game", "aggregate-quarter-law", frac, 0.9,
                     frac >= 0.9 and all_consistent and all_replay, 0.0))
    return rows, {"games": games_t, "quarter_fraction": frac}


def run_interp(params, seed):
    lo, hi, n = params.get("theta_grid", [0.1, 1.4, 14])
    triples = int(params.get("triples", 100))
    rows = []
    t0 = time.perf_counter()
    worst_margin = np.inf
    ok = True
    for theta in np.linspace(lo, hi, int(n)):
        data, lower, upper = interpolation.obstruction_certificate(float(theta))
        rep = interpolation.check_necessary(data)
        ok &= rep.ok and lower > upper
        worst_margin = min(worst_margin, lower - upper)
    rows.append(_row("interp", "obstruction-grid", worst_margin, 0.0, ok,
                     time.perf_counter() - t0))

    t0 = time.perf_counter()
    rng = make_rng(seed)
    x0 = base_point(3)
    z = exp(x0, random_unit_tangent(rng, x0).scaled(0.7))
    src = fn_sqdist_point(z)
    items = []
    for _ in range(6):
        p = random_point_in_ball(rng, z, 0.45)
        F, g = src.eval(p)
        items.append(interpolation.OracleSample(F, p, g))
    data = interpolation.InterpData(items, mu=1.0)
    f = interpolation.construct_sufficient(data)
    applicable = not isinstance(f, interpolation.NotApplicable)
    max_err = max(abs(f.value(s.x) - s.F) for s in items) if applicable else np.inf
    slack = min(subgradient_gap(f, s.x, random_point_in_ball(rng, x0, 2.0))
                for s in items for _ in range(20)) if applicable else -np.inf
    rows.append(_row("interp", "construct-roundtrip", max_err, 1e-9,
                     applicable and max_err <= 1e-9 and slack >= -1e-8,
                     time.perf_counter() - t0))

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(triples):
        y = random_point_in_ball(rng, x0, 1.0)
        g = random_unit_tangent(rng, y).scaled(2.0 * rng.uniform())
        x = random_point_in_ball(rng, x0, 1.5)
        if dist(x, y) < 1e-8:
            continue
        fmin, val = interpolation.minimal_function(rng.uniform(-1, 1), y, g, x)
        target = fmin.value(y) + _mink_x(g.vec, hlog(y, x).vec)
        worst = max(worst, abs(val - target))
    rows.append(_row("interp", "minimal-values", worst, 1e-8, worst <= 1e-8,
                     time.perf_counter() - t0))
    return rows, {"rows": len(rows)}


def run_zoo_validate(params, seed):
    d = int(params.get("d", 4))
    n = int(params.get("samples", 200))
    rng = make_rng(seed)
    x0 = base_point(d)
    rows = []

    z = random_point_in_ball(rng, x0, 1.2)
    S = resisting.HalfSpace(z, random_unit_tangent(rng, z)).boundary
    oracles = {
        "dist-point": fn_dist_point(z),
        "sqdist-point": fn_sqdist_point(z),
        "dist-sub": resisting.fn_dist_sub(S, 0.3),
        "max": fn_shifted_max([(fn_dist_point(z), 0.1),
                               (resisting.fn_dist_sub(S, 0.0), 0.2)]),
    }
    for name, o in oracles.items():
        t0 = time.perf_counter()
        worst = np.inf
        lip_ok = True
        for _ in range(n):
            a = random_point_in_ball(rng, x0, 2.0)
            b = random_point_in_ball(rng, x0, 2.0)
            worst = min(worst, subgradient_gap(o, a, b),
                        midpoint_convexity_gap(o, a, b))
            if o.lipschitz is not None:
                lip_ok &= o.grad(a).norm <= o.lipschitz + 1e-9
        rows.append(_row("zoo-validate", f"gconvex-{name}", worst, -1e-8,
                         worst >= -1e-8 and lip_ok, time.perf_counter() - t0))

    t0 = time.perf_counter()
    lam = 0.25
    env = fn_moreau(fn_dist_point(z), MoreauParams(lam))
    worst = 0.0
    for _ in range(n):
        p = random_point_in_ball(rng, x0, 2.0)
        fv = dist(p, z)
        ev = env.value(p)
        worst = max(worst, ev - fv, fv - lam - ev)
    rows.append(_row("zoo-validate", "moreau-sandwich", worst, 1e-9,
                     worst <= 1e-9, time.perf_counter() - t0))

    t0 = time.perf_counter()
    grid = np.linspace(0.0, 30.0, 301)
    zb = float(np.max(zeta(grid) - (1.0 + grid)))
    Ds = np.geomspace(0.51, 1e6, 400)
    ok_taper = True
    for R in (1.0, 10.0):
        u, du, d2u = taper(Ds * R * R, R)
        ok_taper &= bool(np.all(u + Ds * R * R * du >= -1e-12))
        ok_taper &= bool(np.all(2 * du + Ds * R * R * d2u <= 1e-12))
    rows.append(_row("zoo-validate", "scalar-bounds", zb, 0.0,
                     zb <= 1e-12 and ok_taper, time.perf_counter() - t0))
    return rows, {"suites": len(rows)}


RUNNERS = {
    "lb-nonsmooth": run_lb_nonsmooth,
    "lb-smooth": run_lb_smooth,
    "polyak-worst": run_polyak_worst,
    "cut-game": run_cut_game,
    "interp": run_interp,
    "zoo-validate": run_zoo_validate,
}


def run_sweep(params, seed):
    kind = params["kind"]
    if kind not in RUNNERS:
        raise ValueError(f"sweep over unknown kind {kind!r}")
    base = dict(params.get("base", {}))
    grid = params.get("grid", {})
    keys = sorted(grid)
    rows, transcript = [], []
    # empty grid means an empty sweep (header-only CSV)
    cells = list(itertools.product(*(grid[k] for k in keys))) if keys else []
    threads = int(os.environ.get("HYPERGCONV_THREADS", "1"))

    def one(idx_cell):
        idx, cell = idx_cell
        cell_params = dict(base)
        cell_params.update(dict(zip(keys, cell)))
        r, t = RUNNERS[kind](cell_params, seed + idx)
        label = ",".join(f"{k}={v}" for k, v in zip(keys, cell))
        for row in r:
            row["case"] = f"{label}|{row['case']}" if label else row["case"]
        return idx, r, {"cell": label, "transcript": t}

    jobs = list(enumerate(cells))
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            results = sorted(ex.map(one, jobs), key=lambda t: t[0])
    else:
        results = [one(j) for j in jobs]
    for _, r, t in results:
        rows.extend(r)
        transcript.append(t)
    return rows, {"cells": transcript}


def run(kind: str, config: dict, seed: int | None, out_dir: Path) -> int:
    params = dict(config)
    eff_seed = int(seed if seed is not None else params.pop("seed", 0))
    params.pop("seed", None)
    runner = run_sweep if kind == "sweep" else RUNNERS[kind]
    rows, transcript = runner(params, eff_seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "summary.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    with open(out_dir / "transcript.json", "w") as fh:
        json.dump({"kind": kind, "seed": eff_seed, "params": params,
                   "transcript": transcript}, fh, indent=1, default=str)
    failures = [r for r in rows if r["passed"] != "True"]
    for r in failures:
        print(f"FAIL {r['kind']} {r['case']}: measured={r['measured']} "
              f"bound={r['bound']}", file=sys.stderr)
    print(f"{kind}: {len(rows) - len(failures)}/{len(rows)} checks passed; "
          f"summary at {csv_path}")
    return 1 if failures else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="hypergconv",
        description="desk-scale experiments for g-convex lower-bound machinery")
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--config", required=True, help="JSON parameter file")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out", default="hypergconv-out")
    args = ap.parse_args(argv)
    try:
        config = json.loads(Path(args.config).read_text())
        if not isinstance(config, dict):
            raise ValueError("config must be a JSON object")
    except (OSError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    try:
        return run(args.kind, config, args.seed, Path(args.out))
    except KeyError as e:
        print(f"config error: missing parameter {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
