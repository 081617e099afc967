import numpy as np

from framelab.jets import jstack, jet_einsum
from framelab.submanifold import builtin_submanifold, adapted_frame_at, tensor_S
from framelab import operators as ops

rng = np.random.default_rng(7)


def chart_const(fd, xc):
    return fd.uspace.constant(np.asarray(xc, float))


# 1. circle: P(e1) = 3 e1, S_{S_{e1}} = -2 e1
M = builtin_submanifold("circle")
u = np.array([0.3])
fd = M.frame_data(u)
fr = adapted_frame_at(M, u)
e1 = fr.vectors[0]
Pv = ops.P_op(M, u, e1)
print("P(e1) vs 3 e1:", np.max(np.abs(Pv.ambient - 3.0 * e1)))

Se1 = ops.s_of_field(["1"])  # d/du1 has |d/du1|=1 on circle; e1 = ∂1 here
Smat = ops.s_field_matrix(fd, chart_const(fd, [1.0])).val
St = ops.S_Tm_vector(M, u, Smat)
print("S_{S_{e1}} vs -2 e1:", np.max(np.abs(St.ambient + 2.0 * e1)))

# dualities on great2 (curved ambient): g(R_T(X),Y) = <R(X,Y),T>
M2 = builtin_submanifold("great2(0.5)")
u2 = np.array([0.2, -0.4])
fd2 = M2.frame_data(u2)
d = fd2.d
Tm = rng.normal(size=(d, d))
Tm = 0.5 * (Tm - Tm.T)
X = rng.normal(size=2)
Y = rng.normal(size=2)
xfr = ops.frame_of_chart(fd2, chart_const(fd2, X)).val
yfr = ops.frame_of_chart(fd2, chart_const(fd2, Y)).val
xfull = np.zeros(d); xfull[:2] = xfr
yfull = np.zeros(d); yfull[:2] = yfr
RT = ops.rt_matrix_jet(fd2, fd2.uspace.constant(Tm)).val
lhs = (RT @ xfull) @ yfull  # g = identity in frame
RXY = np.einsum("ijkl,k,l->ij", fd2.Rfr.val[:, :, :2, :2], xfr, yfr)
rhs = ops.skew_inner(RXY, Tm)
print("duality R_T:", abs(lhs - rhs), "lhs", lhs)

# duality S_{T_m}: g(S_{T_m}, X) = -<T_m, S_X>
Tmm = ops.hm_split_mat(Tm, 2)[1]
Sv = ops.S_Tm_vector(M2, u2, Tm)
svfr = fd2.frame_components(Sv.ambient)
lhs2 = svfr @ xfull
SX = ops.s_field_matrix(fd2, chart_const(fd2, X)).val
rhs2 = -ops.skew_inner(Tmm, SX)
print("duality S_Tm:", abs(lhs2 - rhs2), "lhs", lhs2)

# 3. sphere2: L ~ 0
M3 = builtin_submanifold("sphere2")
u3 = np.array([1.0, 0.5])
Xf = ["u2", "1+u1*u2"]
Yf = ["sin(u1)", "u2-u1"]
L = ops.L_op(M3, u3, Xf, Yf)
tn = ops.tilde_nabla(M3, u3, Xf, Yf)
npr = ops.nabla_prime_tangent(M3, u3, Xf, Yf)
print("sphere2 |L|:", np.max(np.abs(L.ambient)), " |tilde-prime|:", np.max(np.abs(tn.ambient - npr.ambient)))

# 4. clifford + catenoid: L = tilde_nabla - nabla_prime
for name, up in [("clifford", np.array([0.4, -0.7])), ("catenoid", np.array([0.35, -0.2])), ("great2(0.5)", np.array([0.2, -0.4]))]:
    Mx = builtin_submanifold(name)
    L = ops.L_op(Mx, up, Xf, Yf)
    tn = ops.tilde_nabla(Mx, up, Xf, Yf)
    npr = ops.nabla_prime_tangent(Mx, up, Xf, Yf)
    diff = np.max(np.abs(L.ambient - (tn.ambient - npr.ambient)))
    print(f"{name}: |L - (tilde - prime)| = {diff:.3e}  |L| = {np.max(np.abs(L.ambient)):.3e}")

# 5. Gauss via independent F' route, Codazzi
for name, up in [("clifford", np.array([0.4, -0.7])), ("catenoid", np.array([0.35, -0.2])), ("great2(0.5)", np.array([0.2, -0.4]))]:
    Mx = builtin_submanifold(name)
    fdx = Mx.frame_data(up)
    p, dd = fdx.p, fdx.d
    a, b = 0, 1
    omh = fdx.omega * fdx.hmask
    Fp = omh[b].d(a) - omh[a].d(b) + (
        jet_einsum("ik,kj->ij", omh[a], omh[b]) - jet_einsum("ik,kj->ij", omh[b], omh[a])
    )
    ea = np.zeros(p); ea[a] = 1.0
    eb = np.zeros(p); eb[b] = 1.0
    Rp = ops.curvature_prime_jet(fdx, chart_const(fdx, ea), chart_const(fdx, eb)).val
    print(f"{name} Gauss (F' vs Rh-[S,S]):", np.max(np.abs(Fp.val - Rp)))
    # Codazzi: R(∂a,∂b)_m = ∇'_a S_b - ∇'_b S_a  (coordinate fields)
    Sb = fdx.omega[b] * fdx.mmask
    Sa = fdx.omega[a] * fdx.mmask
    DaSb = ops.endo_deriv_jet(fdx, Sb, a, "prime").val
    DbSa = ops.endo_deriv_jet(fdx, Sa, b, "prime").val
    xfr_a = fdx.Dmat.val[:, a]; xfr_b = fdx.Dmat.val[:, b]
    Rab = np.einsum("ijkl,k,l->ij", fdx.Rfr.val[:, :, :p, :p], xfr_a, xfr_b)
    Rm = Rab * fdx.mmask
    print(f"{name} Codazzi:", np.max(np.abs(Rm - (DaSb - DbSa))))

# 6. Q_T duality (h case): gtilde(Q_{T_h}X, Y) = <R'(X,Y), T_h>
for name, up in [("clifford", np.array([0.4, -0.7])), ("great2(0.5)", np.array([0.2, -0.4])), ("catenoid", np.array([0.35, -0.2]))]:
    Mx = builtin_submanifold(name)
    fdx = Mx.frame_data(up)
    dd, p = fdx.d, fdx.p
    Th = rng.normal(size=(dd, dd)); Th = 0.5 * (Th - Th.T)
    Th = ops.hm_split_mat(Th, p)[0]
    X = rng.normal(size=p); Y = rng.normal(size=p)
    # T extended with constant frame components
    Tfield = lambda f: f.uspace.constant(Th)
    q = ops.q_t_chart_jet(fdx, fdx.uspace.constant(Th), chart_const(fdx, X)).val
    qfr = fdx.Dmat.val @ q
    yfr = fdx.Dmat.val @ Y
    lhs = qfr @ fdx.Pfr.val @ yfr
    Rp = ops.curvature_prime_jet(fdx, chart_const(fdx, X), chart_const(fdx, Y)).val
    rhs = ops.skew_inner(Rp, Th)
    print(f"{name} Q_T h-duality: {abs(lhs - rhs):.3e}  (lhs {lhs:.6f})")

# 7. P lemma derivative + Gil-Medrano on catenoid
Mx = builtin_submanifold("catenoid")
up = np.array([0.35, -0.2])
fdx = Mx.frame_data(up)
p = fdx.p
Xf = ["u2", "1+u1*u2"]; Yf = ["sin(u1)", "u2-u1"]; Zf = ["cos(u2)", "u1"]
Xc = ops.as_chart_field(fdx, Xf); Yc = ops.as_chart_field(fdx, Yf); Zc = ops.as_chart_field(fdx, Zf)
xfr = ops.frame_of_chart(fdx, Xc); yfr = ops.frame_of_chart(fdx, Yc); zfr = ops.frame_of_chart(fdx, Zc)

# (∇'_X P)Y in tangent frame coords: X^a (∂_a Pfr + [ω^a_tan, Pfr]) yfr
omt = fdx.omega[:, :p, :p]
DP = jstack([fdx.Pfr.d(a) + jet_einsum("ik,kj->ij", omt[a], fdx.Pfr) - jet_einsum("ik,kj->ij", fdx.Pfr, omt[a]) for a in range(p)], axis=0)
lhs = jet_einsum("a,aij->ij", Xc, DP)
lhsv = (jet_einsum("ij,j->i", lhs, yfr) * zfr).sum(-1).val
SY = ops.s_field_matrix(fdx, Yc); SZ = ops.s_field_matrix(fdx, Zc)
nXSY = ops.nabla_t_field_jet(fdx, SY, Xc, "prime")
nXSZ = ops.nabla_t_field_jet(fdx, SZ, Xc, "prime")
SnXY = ops.s_field_matrix(fdx, ops.vec_nabla_prime_jet(fdx, Xc, Yc))
SnXZ = ops.s_field_matrix(fdx, ops.vec_nabla_prime_jet(fdx, Xc, Zc))
def sk_in(Aj, Bj):
    return -jet_einsum("ij,ji->", Aj, Bj).val
rhsv = sk_in(SZ, nXSY - SnXY) + sk_in(SY, nXSZ - SnXZ)
print("P-derivative lemma:", abs(lhsv - rhsv), " lhs", lhsv)

# Gil-Medrano: g(tilde∇_XY - ∇'_XY, P Z) = 1/2( g((∇'_XP)Y,Z) + g((∇'_YP)X,Z) - g(X,(∇'_ZP)Y) )
tn = ops.vec_tilde_nabla_jet(fdx, Xc, Yc)
npr = ops.vec_nabla_prime_jet(fdx, Xc, Yc)
difr = ops.frame_of_chart(fdx, tn - npr)
gl = (jet_einsum("ij,j->i", fdx.Pfr, ops.frame_of_chart(fdx, tn) - ops.frame_of_chart(fdx, npr)) * zfr).sum(-1).val

def dP_pair(Ac, Bc, Cc):
    # g((∇'_A P)B, C)
    Da = jet_einsum("a,aij->ij", Ac, DP)
    bfr = ops.frame_of_chart(fdx, Bc); cfr = ops.frame_of_chart(fdx, Cc)
    return (jet_einsum("ij,j->i", Da, bfr) * cfr).sum(-1).val

gr = 0.5 * (dP_pair(Xc, Yc, Zc) + dP_pair(Yc, Xc, Zc) - dP_pair(Zc, Yc, Xc))
print("Gil-Medrano:", abs(gl - gr), " lhs", gl)
