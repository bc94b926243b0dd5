"""Acceptance suite: one test per criterion, each printing a pass line and
asserting its stated tolerances and runtime budget.

Number 4 runs the float64 path at r=10 and the high-precision replay at r=20:
radius-20 hyperboloid coordinates are not representable in doubles (the sheet
sits within one ulp of the light cone), see README numerical notes.
"""

import csv
import json
import time

import numpy as np
import pytest

import hypergconv as hg
from hypergconv import base_point, dist, exp, frame_at_base, gspan, log, \
    mink_inner, sub_dist, zeta
from hypergconv import cli
from hypergconv.cutting import CutConfig, play_game, random_ball_player, volume_ball
from hypergconv.highprec import worst_trajectory_report
from hypergconv.instances import max_of_distances_instance
from hypergconv.interpolation import (
    InterpData,
    NotApplicable,
    check_necessary,
    construct_sufficient,
    minimal_function,
    obstruction_certificate,
)
from hypergconv.oracles import (
    OracleSample,
    fn_sqdist_point,
    subgradient_gap,
    taper,
)
from hypergconv.resisting import (
    GameOracle,
    gap_bound_check,
    nonsmooth_new,
    smooth_new,
    worst_build,
    worst_oracle,
)
from hypergconv.sampling import make_rng, random_point_in_ball, random_unit_tangent
from hypergconv.solvers import polyak_guarantee, polyak_sgd, rgd, Trace

from conftest import rand_point, rand_tangent, rand_unit


def report(n, label, elapsed, budget):
    print(f"ACCEPTANCE {n} PASS: {label} ({elapsed:.2f}s < {budget:.0f}s)")
    assert elapsed < budget


def test_criterion_1_manifold_identities():
    # 1000 randomized cases per identity, spread over d in {2, 5, 10};
    # tolerances as stated per op, over the float64-certified ranges
    # (see README numerical notes)
    t0 = time.perf_counter()
    for d in (2, 5, 10):
        rng = make_rng(100 + d)
        x0 = base_point(d)
        # exp/log inversion: tangent recovery at 1e-8, point recovery at 1e-7
        for _ in range(334):
            x = rand_point(rng, d, 1.0)
            v = rand_tangent(rng, x, 8.5)
            w = log(x, exp(x, v))
            diff = w.vec - v.vec
            assert np.sqrt(abs(mink_inner(diff, diff))) <= 1e-8
        for _ in range(334):
            x = rand_point(rng, d, 1.0)
            y = exp(x0, rand_tangent(rng, x0, 9.5))
            assert dist(exp(x, log(x, y)), y) <= 1e-7
        # parallel transport is a Minkowski isometry
        for _ in range(334):
            x, y = rand_point(rng, d, 2.5), rand_point(rng, d, 2.5)
            u, w = rand_tangent(rng, x, 2.0), rand_tangent(rng, x, 2.0)
            lhs = mink_inner(hg.ptransport(x, y, u).vec, hg.ptransport(x, y, w).vec)
            assert abs(lhs - mink_inner(u.vec, w.vec)) <= 1e-9
        # gspan contains its generating geodesics
        for _ in range(334 // 4 + 1):
            x = rand_point(rng, d, 1.0)
            vs = [rand_unit(rng, x) for _ in range(2)]
            S = gspan([x], vs)
            for t in (-5.0, -1.3, 2.1, 5.0):
                assert sub_dist(exp(x, vs[0].scaled(t)), S)[0] <= 1e-9
    report(1, "manifold identities at d in {2,5,10}", time.perf_counter() - t0, 5.0)


def play_nonsmooth_cell(T, r, player, seed):
    game = nonsmooth_new(T, r)
    go = GameOracle(game)
    if player == "polyak":
        polyak_sgd(go, fstar=-game.a, x0=game.xref, s0=r, T=T)
    elif player == "rgd":
        rgd(go, step=r / (4 * T), x0=game.xref, T=T)
    else:
        rng = make_rng(seed)
        for _ in range(T):
            go.eval(random_point_in_ball(rng, game.xref, r))
    return game


def test_criterion_2_nonsmooth_lower_bound():
    t0 = time.perf_counter()
    for T in (4, 8, 16):
        for r in (1.0, 2.0, 5.0):
            for player in ("polyak", "rgd", "random"):
                game = play_nonsmooth_cell(T, r, player, seed=T * 100 + int(r))
                f, xstar, fstar = game.finalize()
                bound = game.gap_bound()
                assert all(s.F - fstar >= bound - 1e-9 for s in game.history)
                cert = game.certificate()
                assert abs(cert["dist_xref_xstar"] - r) <= 1e-9
                assert abs(cert["f_at_xstar"] - fstar) <= 1e-8
                assert cert["max_subdist_xstar"] <= 1e-8
                assert cert["max_lawcos_residual"] <= 1e-9
    report(2, "nonsmooth resisting oracle vs 3 players on 3x3 grid",
           time.perf_counter() - t0, 30.0)


def test_criterion_3_smoothed_lower_bound():
    t0 = time.perf_counter()
    for T in (4, 8, 16):
        for r in (1.0, 2.0, 5.0):
            game = smooth_new(T, r)
            go = GameOracle(game)
            polyak_sgd(go, fstar=-game.a, x0=game.xref, s0=r, T=T)
            f, xstar, fstar = game.finalize()
            lam, L = game.lam, game.smoothness
            assert L == pytest.approx(1.0 / np.tanh(game.a / (8 * T)))
            bound = game.gap_bound()
            assert all(s.F - fstar >= bound - 1e-6 for s in game.history)
            rng = make_rng(1000 + T + int(r))
            for k in range(T):
                fk = game.running_max(k)
                env = game.running_envelope(k)
                xk = game.history[k].x
                for _ in range(100):
                    p = random_point_in_ball(rng, xk, game.delta / 2)
                    fv, ev = fk.value(p), env.value(p)
                    assert fv - lam - 1e-12 <= ev <= fv + 1e-12
            worst_slope = 0.0
            for _ in range(10):
                p = random_point_in_ball(rng, game.xref, r / 2)
                u = random_unit_tangent(rng, p)
                h = lam * (1.0 + 3.0 * rng.uniform())
                q = exp(p, u.scaled(h))
                diffvec = hg.ptransport(p, q, f.grad(p)).vec - f.grad(q).vec
                worst_slope = max(worst_slope, np.sqrt(
                    max(mink_inner(diffvec, diffvec), 0.0)) / h)
            assert worst_slope <= L + 1e-3
    report(3, "smoothed resisting oracle: sandwich, gap, smoothness",
           time.perf_counter() - t0, 300.0)


def test_criterion_4_exact_trajectory():
    t0 = time.perf_counter()
    for eps in (0.15, 0.17):
        # float64 carries the construction at r=10
        inst = worst_build(eps, 10.0)
        assert inst.T == int(np.floor(float(zeta(10.0)) / (32 * eps * eps)))
        f = worst_oracle(inst)
        tr = polyak_sgd(f, fstar=0.0, x0=inst.ladder[0], s0=inst.r, T=inst.T)
        assert max(dist(s.x, y) for s, y in zip(tr.samples, inst.ladder)) <= 1e-6
        assert max(abs(s - rk) for s, rk in zip(tr.radii, inst.radii)) <= 1e-8
        assert max(abs(e - dk) for e, dk
                   in zip(tr.step_lengths[:inst.d - 1], inst.deltas)) <= 1e-8
        assert all(abs(g - rk) <= 1e-6 and rk >= 5.0
                   for g, rk in zip(tr.gaps, inst.radii))
        # r=20 exceeds double precision; certified by the exact replay
        rep = worst_trajectory_report(eps, 20.0)
        assert rep.d == int(np.floor(float(zeta(20.0)) / (32 * eps * eps)))
        assert rep.max_ladder_dist <= 1e-6
        assert rep.max_radius_err <= 1e-8
        assert rep.max_step_err <= 1e-8
        assert rep.max_gap_err <= 1e-6
        assert all(rk >= 10.0 for rk in rep.radii)
    report(4, "Polyak trajectory equals the predicted ladder (r in {10,20})",
           time.perf_counter() - t0, 10.0)


def test_criterion_5_polyak_guarantee():
    t0 = time.perf_counter()
    rng = make_rng(55)
    x0 = base_point(3)
    for T in (10, 100):
        for _ in range(20):
            center = rand_point(rng, 3, 1.5)
            fobj, xstar, fstar = max_of_distances_instance(rng, center)
            s0 = dist(x0, xstar) + 1.0
            tr = polyak_sgd(fobj, fstar, x0, s0, T=T)
            assert min(g * g for g in tr.gaps) <= polyak_guarantee(s0, 1.0, T) + 1e-12
    report(5, "Polyak guarantee on 20 seeded instances, T in {10,100}",
           time.perf_counter() - t0, 10.0)


def test_criterion_6_volumes_and_cut_games():
    from scipy.special import gamma
    t0 = time.perf_counter()
    for d in range(3, 9):
        omega = np.pi ** (d / 2) / gamma(d / 2 + 1)
        for r in np.linspace(4 * np.log(d), 20.0, 5):
            v = volume_ball(d, r)
            ub = omega * np.exp(r * (d - 1)) / ((d - 1) * 2 ** (d - 1))
            assert v <= ub * (1 + 1e-6)
            assert v >= 0.25 * ub * (1 - 1e-6)
    total_rounds = quarter_rounds = 0
    for seed in range(50):
        cfg = CutConfig(d=3, r=6.0, eps=0.1, seed=seed, max_rounds=12)
        tr = play_game(cfg, random_ball_player(cfg))
        assert tr.state.verify_consistency()
        assert tr.replay_ok()
        total_rounds += len(tr.state.history)
        quarter_rounds += sum(1 for rec in tr.state.history if rec.quarter_ok)
    assert quarter_rounds >= 0.9 * total_rounds
    report(6, f"volume bounds and 50 cut games "
              f"(quarter law in {quarter_rounds}/{total_rounds} rounds)",
           time.perf_counter() - t0, 120.0)


def test_criterion_7_interpolation():
    t0 = time.perf_counter()
    for theta in np.linspace(0.1, 1.4, 14):
        data, lower, upper = obstruction_certificate(float(theta))
        assert check_necessary(data).ok
        assert lower > upper
    rng = make_rng(70)
    z = rand_point(rng, 3, 1.0)
    src = fn_sqdist_point(z)
    items = []
    for _ in range(6):
        p = random_point_in_ball(rng, z, 0.45)
        F, g = src.eval(p)
        items.append(OracleSample(F, p, g))
    f = construct_sufficient(InterpData(items, mu=1.0))
    assert not isinstance(f, NotApplicable)
    for s in items:
        assert f.value(s.x) == pytest.approx(s.F, abs=1e-12)
        for _ in range(20):
            q = rand_point(rng, 3, 2.0)
            assert f.value(q) - s.F - mink_inner(s.g.vec, log(s.x, q).vec) >= -1e-8
    worst = 0.0
    count = 0
    while count < 1000:
        y = rand_point(rng, 3, 1.0)
        g = rand_tangent(rng, y, 2.0)
        x = rand_point(rng, 3, 1.5)
        if dist(x, y) < 1e-6:
            continue
        count += 1
        fmin, val = minimal_function(0.2, y, g, x)
        worst = max(worst, abs(val - (0.2 + mink_inner(g.vec, log(y, x).vec))))
    assert worst <= 1e-8
    report(7, "interpolation: obstruction grid, reconstruction, minimal values",
           time.perf_counter() - t0, 30.0)


def test_criterion_8_scalar_suite():
    t0 = time.perf_counter()
    for R in (1.0, 10.0):
        D = np.geomspace(0.5000001 * R * R, 1e6 * R * R, 1000)
        u, du, d2u = taper(D, R)
        assert np.all(u + D * du >= -1e-12)
        assert np.all(2 * du + D * d2u <= 1e-12)
        assert np.all((u + D * du) + (2 * du + D * d2u) * 2 * D > 0.0)
        assert np.all((u + D * du) * 2 * np.sqrt(2 * D) <= 4 * R + 1e-12)
    t = np.linspace(0.0, 30.0, 1000)
    assert np.all(zeta(t) <= 1.0 + t + 1e-12)
    # quadratic-growth gap bound on a squared distance and a smoothed game
    r = 1.5
    xref = base_point(3)
    z = exp(xref, frame_at_base(3)[0].scaled(r))
    f = fn_sqdist_point(z)
    f.smoothness = float(zeta(r))
    assert gap_bound_check(f, xref, r).ok
    game = smooth_new(4, 1.0)
    go = GameOracle(game)
    polyak_sgd(go, fstar=-game.a, x0=game.xref, s0=1.0, T=4)
    fearly, _, _ = game.finalize()
    assert gap_bound_check(fearly, game.xref, game.r).ok
    report(8, "scalar taper/zeta inequalities and gap bounds",
           time.perf_counter() - t0, 5.0)


def test_criterion_9_determinism(tmp_path):
    t0 = time.perf_counter()
    configs = {
        "lb-nonsmooth": {"T": 4, "r": 2.0, "players": ["polyak", "random"]},
        "lb-smooth": {"T": 2, "r": 1.0, "sandwich_samples": 4, "chord_samples": 4},
        "polyak-worst": {"eps": 0.17, "r": 5.0},
        "cut-game": {"d": 3, "r": 4.0, "eps": 0.12, "games": 2, "max_rounds": 5},
        "interp": {"theta_grid": [0.2, 1.2, 4], "triples": 25},
        "zoo-validate": {"d": 3, "samples": 50},
    }
    for kind, cfg in configs.items():
        outs = []
        for tag in ("a", "b"):
            cfg_path = tmp_path / f"{kind}-{tag}.json"
            cfg_path.write_text(json.dumps(cfg))
            out = tmp_path / f"{kind}-{tag}"
            assert cli.main([kind, "--config", str(cfg_path), "--seed", "11",
                             "--out", str(out)]) == 0
            with open(out / "summary.csv") as fh:
                rows = [{k: v for k, v in row.items() if k != "runtime_s"}
                        for row in csv.DictReader(fh)]
            outs.append(rows)
        assert outs[0] == outs[1], f"{kind} rerun differs"
    report(9, "seeded reruns byte-identical (runtime column excluded)",
           time.perf_counter() - t0, 120.0)
