import numpy as np

import framelab.gauss_map as gm
import framelab.omn_geometry as og
import framelab.operators as ops
from framelab.submanifold import builtin_submanifold

np.set_printoptions(precision=3, suppress=True)


def check(label, val, tol=1e-8):
    ok = "ok " if val < tol else "FAIL"
    print(f"{ok} {label}: {val:.3e}")


# 1. plane pushforward and tension
pl = builtin_submanifold("plane")
u0 = np.array([0.3, -0.7])
v = gm.gauss_pushforward(pl, u0, [1.0, 2.0])
check("plane push horiz", np.max(np.abs(v.horizontal - np.array([1.0, 2.0, 0.0]))))
check("plane push vert", np.max(np.abs(v.vertical.mat)))
tau = gm.tension_field(pl, u0)
check("plane tension", tau.norm())
r = gm.harmonicity_residuals(pl, u0)
check("plane residuals", max(r))

# 2. circle pushforward vertical = S_{e_1}
ci = builtin_submanifold("circle")
uc = np.array([0.4])
fd = ci.frame_data(uc)
e1_chart = fd.C.val @ np.array([1.0])
v = gm.gauss_pushforward(ci, uc, e1_chart)
check("circle push vert = Smats[0]", np.max(np.abs(v.vertical.mat - fd.Smats.val[0])))

# 3. isometry on all builtins
names = ["plane", "plane3", "circle", "sphere2", "catenoid", "clifford"]
worst = 0.0
rng = np.random.default_rng(5)
for nm in names + ["great2"]:
    M = builtin_submanifold("great2(0.7)") if nm == "great2" else builtin_submanifold(nm)
    for u in og.domain_samples(M, 3, seed=2):
        fd = M.frame_data(u)
        x = rng.standard_normal(M.p)
        gv = gm.gauss_pushforward(M, u, x)
        gt = float(x @ fd.gt_chart.val @ x)
        worst = max(worst, abs(gm.grassmann_inner(gv, gv) - gt))
check("isometry all builtins", worst, 1e-9)

# 4. sphere2 residuals
sp = builtin_submanifold("sphere2")
us = np.array([1.1, 0.3])
r = gm.harmonicity_residuals(sp, us)
print("sphere2 residuals:", r)
check("sphere2 r_h1 = 2/3", abs(r[0] - 2.0 / 3.0))
check("sphere2 r_h2", r[1])
check("sphere2 r_h3", r[2])
tau = gm.tension_field(sp, us)
d = gm.residual_data(sp, us)
check("sphere2 tau norm = 2/3", abs(tau.norm() - 2.0 / 3.0))

# 5. Pythagoras + two-route tau on curved set
CURVED = [
    ("sphere2", builtin_submanifold("sphere2"), np.array([1.0, 0.5])),
    ("catenoid", builtin_submanifold("catenoid"), np.array([0.4, -0.6])),
    ("clifford", builtin_submanifold("clifford"), np.array([0.5, -0.8])),
    ("great2", builtin_submanifold("great2(0.7)"), np.array([0.3, -0.2])),
    ("plane3", builtin_submanifold("plane3"), np.array([0.2, 0.5, -0.3])),
]
for nm, M, u in CURVED:
    tau = gm.tension_field(M, u)
    r = gm.harmonicity_residuals(M, u)
    check(f"{nm} pythagoras", abs(tau.norm() ** 2 - sum(x * x for x in r)), 1e-8)
    tb = gm.tension_field_pullback(M, u)
    check(f"{nm} two-route tau", (tau - tb).norm(), 1e-8)
    Q, _ = np.linalg.qr(np.random.default_rng(3).standard_normal((M.p, M.p)))
    taur = gm.tension_field(M, u, rotation=Q)
    check(f"{nm} rotation invariance", (tau - taur).norm(), 1e-8)

# 6. space-form hv horizontal = -kappa T(X)
for nm, kap in [("great2", 0.7), ("clifford", 1.0)]:
    M = builtin_submanifold("great2(0.7)") if nm == "great2" else builtin_submanifold(nm)
    u = np.array([0.3, -0.4])
    fd = M.frame_data(u)
    T = ops.basis_T(fd.d, 0, fd.p)
    x = np.array([0.7, -0.2])
    gv = gm.grassmann_nabla(M, u, "hv", fd.uspace.constant(x), T)
    xF = np.concatenate([fd.Dmat.val @ x, np.zeros(fd.d - fd.p)])
    expect = fd.ambient_components(-kap * (T @ xF))
    check(f"{nm} hv horizontal -kappa T(X)", np.max(np.abs(gv.horizontal - expect)), 1e-7)

# 7. mean-curvature pairings vs residual vectors
for nm, M, u in CURVED[:3]:
    mc = og.mean_curvature_OMN(M, u)
    d = gm.residual_data(M, u)
    fd = M.frame_data(u)
    check(f"{nm} z = h1 comps", np.max(np.abs(mc.z_pairings - d.h1[fd.p:])), 1e-10)
    werr = 0.0
    for A in range(fd.p):
        for j, al in enumerate(range(fd.p, fd.d)):
            t_ref = ops.skew_inner(d.m2, ops.basis_T(fd.d, A, al))
            werr = max(werr, abs(mc.t_pairings[A, j] - t_ref))
    check(f"{nm} t = <m2,T>", werr, 1e-10)

# 8. identities m2 = h3 - S_{h2}, P h2 = S_{m2}
for nm, M, u in CURVED:
    d = gm.residual_data(M, u)
    fd = M.frame_data(u)
    s_h2 = ops.s_field_matrix(fd, fd.uspace.constant(fd.C.val @ d.h2[: fd.p])).val
    check(f"{nm} m2 = h3 - S_h2", np.max(np.abs(d.m2 - (d.h3 - s_h2))), 1e-10)
    svec = 2.0 * np.einsum("Aij,jA->i", fd.Smats.val, d.m2[:, : fd.p])
    check(f"{nm} P h2 = S_m2", np.max(np.abs(fd.Pfr.val @ d.h2[: fd.p] - svec[: fd.p])), 1e-10)

# 9. theorem check
for nm in ["plane", "sphere2", "clifford", "catenoid"]:
    M = builtin_submanifold(nm)
    rep = gm.theorem_check(M, samples=30)
    print(
        f"{nm}: minimal={rep.minimal} harmonic={rep.harmonic} agree={rep.agree} "
        f"sep={rep.separated} mc={rep.max_mean_curvature:.3e} "
        f"hr={rep.max_harmonicity_residual:.3e} id_m2={rep.m2_identity_residual:.2e} "
        f"id_h2={rep.h2_recovery_residual:.2e}"
    )
