"""Tour of the hyperboloid-model primitives.

Points live on {<x,x> = -1, x0 > 0} with the Minkowski form; exp/log/transport
are exact closed forms, and distances to totally geodesic submanifolds have
the arcsinh closed form, cross-checked here against a direct minimization.
"""

import numpy as np
from scipy import optimize

import hypergconv as hg

d = 3
x = hg.base_point(d)
e = hg.frame_at_base(d)

print("== geodesics ==")
v = e[0].scaled(0.9)
y = hg.exp(x, v)
print(f"dist(x, exp_x(0.9 e1)) = {hg.dist(x, y):.12f}  (unit speed)")
w = hg.log(x, y)
print(f"log recovers the tangent: |w - v| = {np.abs(w.vec - v.vec).max():.2e}")

print("\n== parallel transport preserves the metric ==")
rng = hg.make_rng(0)
from hypergconv.sampling import random_unit_tangent
u1, u2 = random_unit_tangent(rng, x), random_unit_tangent(rng, x)
t1, t2 = hg.ptransport(x, y, u1), hg.ptransport(x, y, u2)
print(f"<u1,u2> = {hg.mink_inner(u1.vec, u2.vec):+.12f}")
print(f"<Pu1,Pu2> = {hg.mink_inner(t1.vec, t2.vec):+.12f}")

print("\n== totally geodesic spans and distances ==")
S = hg.gspan([x], [e[0], e[1]])
print(f"gspan of a point and two directions: dimension {S.dim}")
p = hg.exp(x, e[2].scaled(1.4))
dS, foot = hg.sub_dist(p, S)
print(f"closed-form distance to the span: {dS:.12f}")


def by_minimization(c):
    return hg.dist(p, hg.sub_exp(S, c))


res = optimize.minimize(by_minimization, np.zeros(S.dim), method="Nelder-Mead",
                        options={"xatol": 1e-12, "fatol": 1e-14})
print(f"direct minimization agrees:      {res.fun:.12f}")

print("\n== half-spaces ==")
L = hg.HalfSpace(x, e[0])
inside = hg.exp(x, e[0].scaled(0.5))
outside = hg.exp(x, e[0].scaled(-0.5))
print(f"dist to half-space from inside:  {hg.halfspace_dist(inside, L):.3f}")
print(f"dist to half-space from outside: {hg.halfspace_dist(outside, L):.3f}")

print("\n== right-triangle trigonometry ==")
delta, r1 = hg.right_triangle(1.0, np.arccos(0.5))
print(f"legs for hypotenuse 1, angle arccos(1/2): delta={delta:.6f} r1={r1:.6f}")
print(f"cosh identity residual: {np.cosh(1.0) - np.cosh(r1)*np.cosh(delta):.2e}")
