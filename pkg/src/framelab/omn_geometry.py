"""Intrinsic and extrinsic geometry of the adapted-frame subbundle.

The tangent space of the subbundle at an adapted frame is spanned by primed
horizontal lifts and block-diagonal vertical fields, so every field here is a
pair: a tangent vector field on M (chart coefficients) plus a block-diagonal
skew endomorphism field (frame components). The Levi-Civita connection, the
curvature tensor, sectional curvatures, the second fundamental form in the
ambient frame bundle, and the mean curvature all come as closed formulas in
the operator algebra; each one is cross-checked elsewhere against the
tangent/normal projection of the ambient bundle connection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import operators as ops
from .frame_bundle import LiftedVector, lifted, sasaki_mok_inner
from .jets import Jet, jet_einsum, jet_solve
from .operators import OperatorError, hm_split_mat, skew_inner
from .submanifold import FramePointData, ImmersedSubmanifold

__all__ = [
    "OmnError",
    "OmnPlane",
    "omn_plane",
    "MeanCurvatureReport",
    "TotallyGeodesicReport",
    "MinimalityReport",
    "nabla_OMN",
    "curvature_OMN",
    "sectional_OMN",
    "second_fundamental_OMN",
    "mean_curvature_OMN",
    "is_minimal",
    "is_totally_geodesic",
    "domain_samples",
    "tilde_frame_fields",
]


class OmnError(ValueError):
    pass


def domain_samples(M: ImmersedSubmanifold, n: int, seed: int = 0, pad: float = 0.05):
    """Low-discrepancy sample points in the chart domain, shrunk at the rim."""
    lo, hi = M.chart_domain[:, 0], M.chart_domain[:, 1]
    width = hi - lo
    sampler = qmc.Halton(d=M.p, scramble=True, seed=seed)
    pts = sampler.random(n)
    return lo + pad * width + pts * (1.0 - 2.0 * pad) * width


# -- field-pair plumbing --------------------------------------------------------


def _chart_field(fd: FramePointData, spec) -> Jet:
    if spec is None:
        return fd.uspace.constant(np.zeros(fd.p))
    return ops.as_chart_field(fd, spec)


def _h_endo_field(fd: FramePointData, spec) -> Jet:
    if spec is None:
        return fd.uspace.constant(np.zeros((fd.d, fd.d)))
    j = spec(fd) if callable(spec) else fd.uspace.constant(np.asarray(ops._mat(spec), dtype=float))
    m_part = hm_split_mat(j.val, fd.p)[1]
    if np.max(np.abs(m_part)) > 1e-10:
        raise OmnError("vertical field must be block-diagonal (h-type)")
    return j


def _as_lifted(M, u, fd, chart_val, vert_val) -> LiftedVector:
    """(chart)^{h'} + bar(vert) assembled as a bundle vector."""
    smat = ops.s_field_matrix(fd, fd.uspace.constant(np.asarray(chart_val, float))).val
    return lifted(
        M,
        u,
        horizontal=fd.J.val @ np.asarray(chart_val, float),
        vertical=smat + vert_val,
    )


def _pair_nabla(fd, Xc, A, Yc, B):
    """Connection on field pairs: direction (Xc, A), field (Yc, B).

    chart part: tilde_nabla_X Y + (Q_B(X) + Q_A(Y))/2
    vertical (h) part: -R'(X,Y)/2 + nabla'_X B + [B, A]/2
    """
    chart = ops.vec_tilde_nabla_jet(fd, Xc, Yc)
    chart = chart + 0.5 * ops.q_t_chart_jet(fd, B, Xc) + 0.5 * ops.q_t_chart_jet(fd, A, Yc)
    vert = (-0.5) * ops.curvature_prime_jet(fd, Xc, Yc)
    vert = vert + ops.nabla_t_field_jet(fd, B, Xc, "prime")
    vert = vert + 0.5 * (jet_einsum("ik,kj->ij", B, A) - jet_einsum("ik,kj->ij", A, B))
    return chart, vert


def nabla_OMN(M: ImmersedSubmanifold, u, case: str, *args) -> LiftedVector:
    """Levi-Civita connection of the subbundle metric.

    case "hh", args (Xf, Yf):  (tilde nabla_X Y)^{h'} - 1/2 bar(R'(X, Y))
    case "hv", args (Xf, T):   1/2 Q_T(X)^{h'} + bar(nabla'_X T)
    case "vh", args (T, Yf):   1/2 Q_T(Y)^{h'}
    case "vv", args (T, Tp):   1/2 bar([T', T])

    Vertical specs must be h-type endo fields.
    """
    fd = M.frame_data(np.asarray(u, dtype=float))
    if case == "hh":
        Xf, Yf = args
        dirp = (_chart_field(fd, Xf), _h_endo_field(fd, None))
        fldp = (_chart_field(fd, Yf), _h_endo_field(fd, None))
    elif case == "hv":
        Xf, T = args
        dirp = (_chart_field(fd, Xf), _h_endo_field(fd, None))
        fldp = (_chart_field(fd, None), _h_endo_field(fd, T))
    elif case == "vh":
        T, Yf = args
        dirp = (_chart_field(fd, None), _h_endo_field(fd, T))
        fldp = (_chart_field(fd, Yf), _h_endo_field(fd, None))
    elif case == "vv":
        T, Tp = args
        dirp = (_chart_field(fd, None), _h_endo_field(fd, T))
        fldp = (_chart_field(fd, None), _h_endo_field(fd, Tp))
    else:
        raise OmnError(f"unknown case {case!r}")
    chart, vert = _pair_nabla(fd, dirp[0], dirp[1], fldp[0], fldp[1])
    return _as_lifted(M, u, fd, chart.val, vert.val)


# -- curvature -------------------------------------------------------------------


def _d_x_r_prime(fd, Xc, Yc, Zc):
    """(D_X R')(Y,Z) = nabla'_X R'(Y,Z) - R'(tilde_X Y, Z) - R'(Y, tilde_X Z)."""
    RYZ = ops.curvature_prime_jet(fd, Yc, Zc)
    out = ops.nabla_t_field_jet(fd, RYZ, Xc, "prime")
    out = out - ops.curvature_prime_jet(fd, ops.vec_tilde_nabla_jet(fd, Xc, Yc), Zc)
    out = out - ops.curvature_prime_jet(fd, Yc, ops.vec_tilde_nabla_jet(fd, Xc, Zc))
    return out


def _d_x_q_t(fd, Xc, Tj, Yc):
    """(D_X Q_T)(Y) = tilde_X Q_T(Y) - Q_{nabla'_X T}(Y) - Q_T(tilde_X Y)."""
    QY = ops.q_t_chart_jet(fd, Tj, Yc)
    out = ops.vec_tilde_nabla_jet(fd, Xc, QY)
    dT = ops.nabla_t_field_jet(fd, Tj, Xc, "prime")
    out = out - ops.q_t_chart_jet(fd, dT, Yc)
    out = out - ops.q_t_chart_jet(fd, Tj, ops.vec_tilde_nabla_jet(fd, Xc, Yc))
    return out


def _tilde_curvature_apply(fd, Xc, Yc, Zc):
    """Chart components of tilde-R(X, Y)Z from the deformed-metric curvature."""
    step = jet_einsum("cdab,a->cdb", fd.Rt_chart, Xc)
    step = jet_einsum("cdb,b->cd", step, Yc)
    return jet_einsum("cd,d->c", step, Zc)


def curvature_OMN(M: ImmersedSubmanifold, u, case: str, *args) -> LiftedVector:
    """Curvature tensor of the subbundle, by argument pattern.

    case "hhh": (Xf, Yf, Zf)     R(X^{h'}, Y^{h'}) Z^{h'}
    case "hhv": (Xf, Yf, T)      R(X^{h'}, Y^{h'}) bar T
    case "hvh": (Xf, T, Zf)      R(X^{h'}, bar T) Z^{h'}
    case "hvv": (Xf, T, Tp)      R(X^{h'}, bar T) bar T'
    case "vvh": (T, Tp, Zf)      R(bar T, bar T') Z^{h'}
    case "vvv": (T, Tp, Tpp)     R(bar T, bar T') bar T''
    """
    fd = M.frame_data(np.asarray(u, dtype=float))
    if case == "hhh":
        Xf, Yf, Zf = args
        Xc, Yc, Zc = (_chart_field(fd, f) for f in (Xf, Yf, Zf))
        chart = _tilde_curvature_apply(fd, Xc, Yc, Zc)
        q = (
            ops.q_t_chart_jet(fd, ops.curvature_prime_jet(fd, Yc, Zc), Xc)
            - ops.q_t_chart_jet(fd, ops.curvature_prime_jet(fd, Xc, Zc), Yc)
            - 2.0 * ops.q_t_chart_jet(fd, ops.curvature_prime_jet(fd, Xc, Yc), Zc)
        )
        chart = chart - 0.25 * q
        vert = -0.5 * (_d_x_r_prime(fd, Xc, Yc, Zc) - _d_x_r_prime(fd, Yc, Xc, Zc))
        return _as_lifted(M, u, fd, chart.val, vert.val)
    if case == "hhv":
        Xf, Yf, T = args
        Xc, Yc = _chart_field(fd, Xf), _chart_field(fd, Yf)
        Tj = _h_endo_field(fd, T)
        chart = 0.5 * (_d_x_q_t(fd, Xc, Tj, Yc) - _d_x_q_t(fd, Yc, Tj, Xc))
        RXY = ops.curvature_prime_jet(fd, Xc, Yc)
        vert = 0.5 * (jet_einsum("ik,kj->ij", RXY, Tj) - jet_einsum("ik,kj->ij", Tj, RXY))
        QTX = ops.q_t_chart_jet(fd, Tj, Xc)
        QTY = ops.q_t_chart_jet(fd, Tj, Yc)
        vert = vert - 0.25 * (
            ops.curvature_prime_jet(fd, Xc, QTY) - ops.curvature_prime_jet(fd, Yc, QTX)
        )
        return _as_lifted(M, u, fd, chart.val, vert.val)
    if case == "hvh":
        Xf, T, Zf = args
        Xc, Zc = _chart_field(fd, Xf), _chart_field(fd, Zf)
        Tj = _h_endo_field(fd, T)
        chart = 0.5 * _d_x_q_t(fd, Xc, Tj, Zc)
        QTZ = ops.q_t_chart_jet(fd, Tj, Zc)
        RXZ = ops.curvature_prime_jet(fd, Xc, Zc)
        comm = jet_einsum("ik,kj->ij", RXZ, Tj) - jet_einsum("ik,kj->ij", Tj, RXZ)
        vert = -0.25 * (ops.curvature_prime_jet(fd, Xc, QTZ) - comm)
        return _as_lifted(M, u, fd, chart.val, vert.val)
    if case == "hvv":
        Xf, T, Tp = args
        Xc = _chart_field(fd, Xf)
        Tj, Tpj = _h_endo_field(fd, T), _h_endo_field(fd, Tp)
        commTT = jet_einsum("ik,kj->ij", Tj, Tpj) - jet_einsum("ik,kj->ij", Tpj, Tj)
        chart = -0.25 * (
            ops.q_t_chart_jet(fd, commTT, Xc)
            + ops.q_t_chart_jet(fd, Tj, ops.q_t_chart_jet(fd, Tpj, Xc))
        )
        return _as_lifted(M, u, fd, chart.val, np.zeros((fd.d, fd.d)))
    if case == "vvh":
        T, Tp, Zf = args
        Zc = _chart_field(fd, Zf)
        Tj, Tpj = _h_endo_field(fd, T), _h_endo_field(fd, Tp)
        commTT = jet_einsum("ik,kj->ij", Tj, Tpj) - jet_einsum("ik,kj->ij", Tpj, Tj)
        chart = 0.25 * (
            ops.q_t_chart_jet(fd, Tj, ops.q_t_chart_jet(fd, Tpj, Zc))
            - ops.q_t_chart_jet(fd, Tpj, ops.q_t_chart_jet(fd, Tj, Zc))
        ) + 0.5 * ops.q_t_chart_jet(fd, commTT, Zc)
        return _as_lifted(M, u, fd, chart.val, np.zeros((fd.d, fd.d)))
    if case == "vvv":
        T, Tp, Tpp = args
        A = _h_endo_field(fd, T).val
        B = _h_endo_field(fd, Tp).val
        C = _h_endo_field(fd, Tpp).val
        comm = A @ B - B @ A
        nested = comm @ C - C @ comm
        return lifted(M, u, vertical=-0.25 * nested)
    raise OmnError(f"unknown case {case!r}")


# -- sectional curvature ----------------------------------------------------------


@dataclass(frozen=True)
class OmnPlane:
    """g_SM-orthonormal 2-plane spanned by primed lifts and/or h-verticals."""

    sub: ImmersedSubmanifold
    u: np.ndarray
    kind: str  # "hh", "hv", "vv"
    xc: np.ndarray | None
    yc: np.ndarray | None
    T: np.ndarray | None
    Tp: np.ndarray | None
    v1: LiftedVector
    v2: LiftedVector


def _gtilde(fd, a, b) -> float:
    return float(a @ fd.gt_chart.val @ b)


def omn_plane(M: ImmersedSubmanifold, u, spec1, spec2) -> OmnPlane:
    """Build a sectional plane from ("hprime", chart coeffs) / ("vertical", mat)
    specs, orthonormalizing with respect to the Sasaki-Mok metric."""
    u = np.asarray(u, dtype=float)
    fd = M.frame_data(u)
    kinds = (spec1[0], spec2[0])
    if kinds == ("vertical", "hprime"):
        return omn_plane(M, u, spec2, spec1)
    if kinds == ("hprime", "hprime"):
        x = np.asarray(spec1[1], dtype=float)
        y = np.asarray(spec2[1], dtype=float)
        x = x / np.sqrt(_gtilde(fd, x, x))
        y = y - _gtilde(fd, x, y) * x
        ny = np.sqrt(_gtilde(fd, y, y))
        if ny < 1e-12:
            raise OmnError("plane vectors are linearly dependent")
        y = y / ny
        v1 = _as_lifted(M, u, fd, x, np.zeros((fd.d, fd.d)))
        v2 = _as_lifted(M, u, fd, y, np.zeros((fd.d, fd.d)))
        plane = OmnPlane(M, u, "hh", x, y, None, None, v1, v2)
    elif kinds == ("hprime", "vertical"):
        x = np.asarray(spec1[1], dtype=float)
        x = x / np.sqrt(_gtilde(fd, x, x))
        T = _h_endo_field(fd, np.asarray(spec2[1], dtype=float)).val
        nt = np.sqrt(skew_inner(T, T))
        if nt < 1e-12:
            raise OmnError("vertical direction vanishes")
        T = T / nt
        v1 = _as_lifted(M, u, fd, x, np.zeros((fd.d, fd.d)))
        v2 = lifted(M, u, vertical=T)
        plane = OmnPlane(M, u, "hv", x, None, T, None, v1, v2)
    elif kinds == ("vertical", "vertical"):
        T = _h_endo_field(fd, np.asarray(spec1[1], dtype=float)).val
        Tp = _h_endo_field(fd, np.asarray(spec2[1], dtype=float)).val
        T = T / np.sqrt(skew_inner(T, T))
        Tp = Tp - skew_inner(T, Tp) * T
        nt = np.sqrt(skew_inner(Tp, Tp))
        if nt < 1e-12:
            raise OmnError("plane vectors are linearly dependent")
        Tp = Tp / nt
        v1 = lifted(M, u, vertical=T)
        v2 = lifted(M, u, vertical=Tp)
        plane = OmnPlane(M, u, "vv", None, None, T, Tp, v1, v2)
    else:
        raise OmnError("plane specs must be ('hprime', coeffs) or ('vertical', matrix)")
    for a, b, want in ((plane.v1, plane.v1, 1.0), (plane.v2, plane.v2, 1.0), (plane.v1, plane.v2, 0.0)):
        if abs(sasaki_mok_inner(a, b) - want) > 1e-10:
            raise OmnError("plane failed to orthonormalize")
    return plane


def sectional_OMN(plane: OmnPlane) -> float:
    """Sectional curvature of the plane by the closed formulas."""
    M, u = plane.sub, plane.u
    fd = M.frame_data(u)
    if plane.kind == "hh":
        Xc = fd.uspace.constant(plane.xc)
        Yc = fd.uspace.constant(plane.yc)
        RYYX = _tilde_curvature_apply(fd, Xc, Yc, Yc).val
        kt = float(plane.xc @ fd.gt_chart.val @ RYYX)
        Rp = ops.curvature_prime_jet(fd, Xc, Yc).val
        return kt - 0.75 * skew_inner(Rp, Rp)
    if plane.kind == "hv":
        Xc = fd.uspace.constant(plane.xc)
        q = ops.q_t_chart_jet(fd, fd.uspace.constant(plane.T), Xc).val
        return 0.25 * float(q @ fd.gt_chart.val @ q)
    comm = plane.T @ plane.Tp - plane.Tp @ plane.T
    return 0.125 * skew_inner(comm, comm)


# -- second fundamental form --------------------------------------------------------


def _sigma_s2(fd, vtan: Jet) -> Jet:
    """sum_A S_{e_A}^2 applied to a tangent-frame vector: (id - P)/2."""
    return 0.5 * (vtan - jet_einsum("ij,j->i", fd.Pfr, vtan))


def _pi_hh_jets(fd, Xc, Yc):
    """Horizontal (frame, d) and vertical (d, d) jets of Pi(X^{h'}, Y^{h'})."""
    p, d = fd.p, fd.d
    from .frame_bundle import _ambient_deriv_frame, _full_frame_field

    xF = _full_frame_field(fd, Xc)
    yF = _full_frame_field(fd, Yc)
    SX = ops.s_field_matrix(fd, Xc)
    SY = ops.s_field_matrix(fd, Yc)

    nmask = np.concatenate([np.zeros(p), np.ones(d - p)])
    embed = np.eye(d)[:, :p]
    PiXY = _ambient_deriv_frame(fd, Xc, yF) * nmask

    rsum = jet_einsum("ij,j->i", ops.rt_matrix_jet(fd, SX), yF) + jet_einsum(
        "ij,j->i", ops.rt_matrix_jet(fd, SY), xF
    )

    sym = ops.vec_nabla_prime_jet(fd, Xc, Yc) + ops.vec_nabla_prime_jet(fd, Yc, Xc)
    w = jet_einsum("Aa,a->A", fd.Dmat, sym) + rsum[:p]
    pinv_w = jet_solve(fd.Pfr, w)
    S_pinv_w = ops.s_field_matrix(fd, jet_einsum("aA,A->a", fd.C, pinv_w))

    m_endo = ops.nabla_t_field_jet(fd, SY, Xc, "prime") + ops.nabla_t_field_jet(
        fd, SX, Yc, "prime"
    )
    s_m = ops.s_tm_tangent_jet(fd, m_endo)
    pinv_sm = jet_solve(fd.Pfr, s_m)
    S_pinv_sm = ops.s_field_matrix(fd, jet_einsum("aA,A->a", fd.C, pinv_sm))

    tan_part = (-1.0) * _sigma_s2(fd, pinv_w) + 0.5 * s_m + _sigma_s2(fd, pinv_sm)
    horiz = PiXY + 0.5 * rsum * nmask + jet_einsum("iA,A->i", embed, tan_part)
    vert = (-0.5) * S_pinv_w + 0.5 * m_endo + 0.5 * S_pinv_sm
    return horiz, vert


def _pi_hv_jets(fd, Xc, Tj):
    """Pi(X^{h'}, bar T) = 1/2 (R_T(X) - Q_T(X))^h
    + 1/2 bar((nabla_X T)_m - S_{Q_T(X)})."""
    p, d = fd.p, fd.d
    from .frame_bundle import _full_frame_field

    xF = _full_frame_field(fd, Xc)
    RTX = jet_einsum("ij,j->i", ops.rt_matrix_jet(fd, Tj), xF)
    q = ops.q_t_chart_jet(fd, Tj, Xc)
    qfr = jet_einsum("Aa,a->A", fd.Dmat, q)
    qF = jet_einsum("iA,A->i", np.eye(d)[:, :p], qfr)
    horiz = 0.5 * (RTX - qF)
    dT_m = ops.nabla_t_field_jet(fd, Tj, Xc, "ambient") * fd.mmask
    vert = 0.5 * (dT_m - ops.s_field_matrix(fd, q))
    return horiz, vert


def second_fundamental_OMN(M: ImmersedSubmanifold, u, case: str, *args) -> LiftedVector:
    """Second fundamental form of the subbundle in the ambient frame bundle.

    case "hh": (Xf, Yf); case "hv": (Xf, T) with T h-type; case "vv": (T, Tp) -> 0.
    """
    fd = M.frame_data(np.asarray(u, dtype=float))
    if case == "hh":
        Xc = _chart_field(fd, args[0])
        Yc = _chart_field(fd, args[1])
        horiz, vert = _pi_hh_jets(fd, Xc, Yc)
    elif case == "hv":
        Xc = _chart_field(fd, args[0])
        Tj = _h_endo_field(fd, args[1])
        horiz, vert = _pi_hv_jets(fd, Xc, Tj)
    elif case == "vv":
        return lifted(M, u)
    else:
        raise OmnError(f"unknown case {case!r}")
    return lifted(
        M,
        u,
        horizontal=fd.ambient_components(horiz.val),
        vertical=0.5 * (vert.val - vert.val.T),
    )


# -- mean curvature and verdicts -------------------------------------------------


@dataclass(frozen=True)
class MeanCurvatureReport:
    """Mean curvature of the subbundle at one frame, resolved against the
    normal generators: pairings with the normal horizontal lifts and with the
    corrected off-diagonal verticals."""

    u: np.ndarray
    H: LiftedVector
    z_pairings: np.ndarray  # (n,) g_SM(H, e_alpha^h)
    t_pairings: np.ndarray  # (p, n) g_SM(H, bar(T_{A alpha}) + (S_.)^h)
    norm: float


def tilde_frame_fields(fd) -> list[Jet]:
    """Chart-coefficient jets of the deformed-metric orthonormal frame."""
    return [fd.Wchart[:, A] for A in range(fd.p)]


def mean_curvature_OMN(M: ImmersedSubmanifold, u) -> MeanCurvatureReport:
    """Trace of the second fundamental form over a deformed-orthonormal
    horizontal frame (vertical directions contribute nothing)."""
    u = np.asarray(u, dtype=float)
    fd = M.frame_data(u)
    p, d = fd.p, fd.d
    frames = tilde_frame_fields(fd)
    horiz = None
    vert = None
    for Ec in frames:
        h, v = _pi_hh_jets(fd, Ec, Ec)
        horiz = h if horiz is None else horiz + h
        vert = v if vert is None else vert + v
    hval, vval = horiz.val, 0.5 * (vert.val - vert.val.T)
    H = lifted(M, u, horizontal=fd.ambient_components(hval), vertical=vval)
    z = hval[p:].copy()
    t = np.zeros((p, d - p))
    for A in range(p):
        for j, al in enumerate(range(p, d)):
            Tm = ops.basis_T(d, A, al)
            svec = 2.0 * np.einsum("Bij,jB->i", fd.Smats.val, Tm[:, :p])
            t[A, j] = skew_inner(vval, Tm) + float(hval @ svec)
    return MeanCurvatureReport(u, H, z, t, H.norm())


@dataclass(frozen=True)
class MinimalityReport:
    minimal: bool
    max_residual: float
    samples: int
    tol: float


def is_minimal(M: ImmersedSubmanifold, samples: int = 200, tol: float = 1e-6, seed: int = 0) -> MinimalityReport:
    """Largest mean-curvature norm over sampled frames, compared to tol."""
    worst = 0.0
    for u in domain_samples(M, samples, seed=seed):
        worst = max(worst, mean_curvature_OMN(M, u).norm)
    return MinimalityReport(worst < tol, worst, samples, tol)


@dataclass(frozen=True)
class TotallyGeodesicReport:
    totally_geodesic: bool
    max_pi_residual: float
    base_pi_residual: float
    r_condition_residual: float
    samples: int
    tol: float


def is_totally_geodesic(M: ImmersedSubmanifold, samples: int = 50, tol: float = 1e-6, seed: int = 0) -> TotallyGeodesicReport:
    """Sampled norm of the subbundle second fundamental form, together with
    the base criterion: M totally geodesic and tangential (R(U,V)W) = 0 for
    normal U, V, W."""
    worst = 0.0
    base = 0.0
    rcond = 0.0
    for u in domain_samples(M, samples, seed=seed):
        fd = M.frame_data(u)
        p, d = fd.p, fd.d
        # base second fundamental form of M: S-matrices carry it all
        base = max(base, float(np.max(np.abs(fd.Smats.val))) if p < d else 0.0)
        frames = tilde_frame_fields(fd)
        for A in range(p):
            for B in range(A, p):
                pi = second_fundamental_OMN(M, u, "hh", frames[A], frames[B])
                worst = max(worst, pi.norm())
        for A in range(p):
            for i in range(d):
                for j in range(i + 1, d):
                    if (i < p) != (j < p):
                        continue
                    pi = second_fundamental_OMN(M, u, "hv", frames[A], ops.basis_T(d, i, j))
                    worst = max(worst, pi.norm())
        for al in range(p, d):
            for be in range(p, d):
                for ga in range(p, d):
                    r = fd.Rfr.val[:p, ga, al, be]
                    rcond = max(rcond, float(np.max(np.abs(r))) if r.size else 0.0)
    return TotallyGeodesicReport(worst < tol, worst, base, rcond, samples, tol)
