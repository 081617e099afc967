import numpy as np

from framelab.submanifold import builtin_submanifold
from framelab import operators as ops
from framelab.frame_bundle import (
    decompose_OMN,
    nabla_ON_primed,
    sasaki_mok_inner,
    tangent_generators,
    lifted,
)
from framelab import omn_geometry as og


def vfields(names):
    return names


def check(label, a, b, tol=1e-6):
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        r = abs(a - b)
    else:
        r = (a - b).norm()
    flag = "OK " if r < tol else "FAIL"
    print(f"{flag} {label}: {r:.3e}")
    return r < tol


# --- nabla_OMN vs tangent part of composed ambient connection ---
cases = [
    ("clifford", np.array([0.3, -0.7])),
    ("catenoid", np.array([0.4, 0.2])),
    ("great2(0.7)", np.array([0.25, -0.3])),
    ("plane3", np.array([0.5, -0.3, 0.8])),
]

for name, u in cases:
    M = builtin_submanifold(name)
    p = M.p
    d = M.ambient.dim
    Xf = ["1.0", "u1*u2"] if p == 2 else ["1.0", "u1*u2", "u2"]
    Yf = ["u2", "0.5"] if p == 2 else ["u2", "0.5", "u1"]

    def Tfield(fd, scale=1.0):
        # h-type varying endo field
        base = np.zeros((fd.d, fd.d))
        base[0, 1], base[1, 0] = 1.0, -1.0
        if fd.d - fd.p >= 2:
            base[fd.p, fd.p + 1], base[fd.p + 1, fd.p] = 0.7, -0.7
        f = fd.uv[0] * fd.uv[min(1, fd.p - 1)] + 1.3
        return jetmat(fd, base) * f * scale

    def jetmat(fd, m):
        return fd.uspace.constant(m)

    def Tf(fd):
        return Tfield(fd)

    def Tpf(fd):
        base = np.zeros((d, d))
        base[0, 1], base[1, 0] = -0.4, 0.4
        if p >= 3:
            base[0, 2], base[2, 0] = 1.1, -1.1
        f = fd.uv[0] + 0.8
        return fd.uspace.constant(base) * f

    for case, args in [
        ("hh", (Xf, Yf)),
        ("hv", (Xf, Tf)),
        ("vh", (Tf, Yf)),
        ("vv", (Tf, Tpf)),
    ]:
        got = og.nabla_OMN(M, u, case, *args)
        full = nabla_ON_primed(M, u, case, *args)
        tan, nor = decompose_OMN(full)
        check(f"{name} nabla_OMN {case}", got, tan, 1e-6)
        if case in ("hh", "hv"):
            pi = og.second_fundamental_OMN(M, u, case, *args)
            check(f"{name} Pi {case}", pi, nor, 1e-6)
        if case == "vv":
            pi = og.second_fundamental_OMN(M, u, case, Tf, Tpf)
            check(f"{name} Pi vv zero", pi.norm(), 0.0, 1e-12)
            check(f"{name} Pi vv oracle", nor.norm(), 0.0, 1e-10)

# --- sectional examples ---
M = builtin_submanifold("great2(0.5)")
u = np.array([0.2, -0.35])
pl = og.omn_plane(M, u, ("hprime", [1.0, 0.0]), ("hprime", [0.0, 1.0]))
check("great2(0.5) sectional hh = 1/8", og.sectional_OMN(pl), 0.125, 1e-9)

M3 = builtin_submanifold("plane3")
u3 = np.array([0.1, 0.2, -0.4])
T12 = ops.basis_T(4, 0, 1)
T13 = ops.basis_T(4, 0, 2)
pl3 = og.omn_plane(M3, u3, ("vertical", T12), ("vertical", T13))
check("plane3 sectional vv = 1/16", og.sectional_OMN(pl3), 1.0 / 16.0, 1e-12)

# sectional vs curvature_OMN (hh, hv, vv)
for name, u in [("catenoid", np.array([0.4, 0.2])), ("clifford", np.array([0.3, -0.7]))]:
    M = builtin_submanifold(name)
    fd = M.frame_data(u)
    pl = og.omn_plane(M, u, ("hprime", [1.0, 0.3]), ("hprime", [-0.2, 1.0]))
    R = og.curvature_OMN(M, u, "hhh", pl.xc, pl.yc, pl.yc)
    check(f"{name} sectional hh vs curvature", og.sectional_OMN(pl), sasaki_mok_inner(R, pl.v1), 1e-6)

    Th = ops.hm_split_mat(np.einsum("ijl,l->ij", np.einsum("ijkl,k->ijl", fd.Rfr.val, np.random.default_rng(0).normal(size=M.ambient.dim)), np.random.default_rng(1).normal(size=M.ambient.dim)), M.p)[0]
    if np.max(np.abs(Th)) < 1e-8:
        Th = ops.basis_T(M.ambient.dim, 0, 1)
    plm = og.omn_plane(M, u, ("hprime", [1.0, 0.3]), ("vertical", Th))
    Rm = og.curvature_OMN(M, u, "hvv", plm.xc, plm.T, plm.T)
    check(f"{name} sectional hv vs curvature", og.sectional_OMN(plm), sasaki_mok_inner(Rm, plm.v1), 1e-6)

# vertical curvature route value (classical bi-invariant: 2x the displayed sectional)
R3 = og.curvature_OMN(M3, u3, "vvv", T12, T13, T13)
print("plane3 vv curvature-route pairing:", sasaki_mok_inner(R3, pl3.v1), "(display gives 1/16)")

# --- great2 hhh closed form ---
M = builtin_submanifold("great2(0.7)")
u = np.array([0.25, -0.3])
fd = M.frame_data(u)
kap = 0.7
rng = np.random.default_rng(7)
Xc, Yc, Zc = rng.normal(size=(3, 2))
got = og.curvature_OMN(M, u, "hhh", Xc, Yc, Zc)
gt = fd.gt_chart.val
coef = kap - 1.5 * kap * kap
want_chart = coef * ((Yc @ gt @ Zc) * Xc - (Xc @ gt @ Zc) * Yc)
want = og._as_lifted(M, u, fd, want_chart, np.zeros((3, 3)))
check("great2 hhh closed form", got, want, 1e-6)

# --- antisymmetry ---
M = builtin_submanifold("catenoid")
u = np.array([0.4, 0.2])
a = og.curvature_OMN(M, u, "hhh", ["1.0", "u2"], ["u1", "0.3"], ["0.2", "1.0"])
b = og.curvature_OMN(M, u, "hhh", ["u1", "0.3"], ["1.0", "u2"], ["0.2", "1.0"])
check("hhh antisym", a, -1.0 * b, 1e-6)

# --- sphere2 mean curvature ---
M = builtin_submanifold("sphere2")
u = np.array([0.9, 0.3])
rep = og.mean_curvature_OMN(M, u)
print("sphere2 z_pairings:", rep.z_pairings, "norm:", rep.norm)
check("sphere2 z = -2/3", float(rep.z_pairings[0]), -2.0 / 3.0, 1e-8)
check("sphere2 t pairings", float(np.max(np.abs(rep.t_pairings))), 0.0, 1e-8)

# pairings reproduce g_SM with generators
from framelab.frame_bundle import normal_generators

gens = normal_generators(M, u)
print("normal gens:", len(gens))
vals = [sasaki_mok_inner(rep.H, g) for g in gens]
print("pairings via inner:", np.round(vals, 6))

# --- plane flat ---
M = builtin_submanifold("plane")
u = np.array([0.3, -0.4])
z = og.nabla_OMN(M, u, "hh", ["1.0", "0.0"], ["u2", "u1"])
w = og.nabla_OMN(M, u, "hh", ["1.0", "0.0"], ["u2", "u1"])
pi = og.second_fundamental_OMN(M, u, "hh", ["1.0", "u2"], ["u1", "0.3"])
check("plane Pi hh = 0", pi.norm(), 0.0, 1e-12)

rep = og.mean_curvature_OMN(M, u)
check("plane H = 0", rep.norm, 0.0, 1e-12)
