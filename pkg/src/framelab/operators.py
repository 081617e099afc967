"""Operator algebra on skew endomorphisms of TN along M.

Skew endomorphisms are handled as matrices in the adapted frame, where the
metric is the identity: the h-part is the pair of diagonal blocks (tangent
and normal), the m-part the off-diagonal blocks. The inner product is
<T, T'> = -tr(T T').

Tangent vector fields on M are chart-coefficient jet fields; endomorphism
fields are frame-component jet fields. Covariant derivatives act in frame
components through the connection matrices omega^a (full ambient connection)
or their block-diagonal part (the connection preserving the splitting).

Tolerance ladder used by the identity checks downstream: 1e-8 for identities
with one derivative, 1e-7 with two, 1e-6 with three.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet, jet_einsum, jet_inv, jet_solve, jstack
from .submanifold import (
    AdaptedFrame,
    FramePointData,
    ImmersedSubmanifold,
    TangentVectorM,
    adapted_frame_at,
)

__all__ = [
    "TOL_FIRST",
    "TOL_SECOND",
    "TOL_THIRD",
    "OperatorError",
    "SkewEndo",
    "skew_inner",
    "hm_decompose",
    "basis_T",
    "R_T",
    "S_Tm_vector",
    "P_op",
    "P_inverse",
    "modified_metric",
    "nabla_endo",
    "tilde_nabla",
    "L_op",
    "Q_T",
    "curvature_prime",
    "s_of_field",
    "as_chart_field",
    "rt_matrix_jet",
    "s_field_matrix",
    "s_tm_tangent_jet",
    "endo_deriv_jet",
    "vec_nabla_prime_jet",
    "vec_tilde_nabla_jet",
    "q_t_chart_jet",
    "curvature_prime_jet",
    "pinv_jet",
    "frame_of_chart",
    "chart_of_frame",
]

TOL_FIRST = 1e-8
TOL_SECOND = 1e-7
TOL_THIRD = 1e-6


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class SkewEndo:
    """Skew endomorphism of T_x N in adapted-frame components."""

    frame: AdaptedFrame
    mat: np.ndarray  # (d, d), antisymmetric
    p: int

    def __post_init__(self):
        m = self.mat
        if np.max(np.abs(m + m.T)) > 1e-12:
            raise OperatorError("endomorphism matrix is not antisymmetric")

    @property
    def h_part(self) -> np.ndarray:
        out = np.zeros_like(self.mat)
        out[: self.p, : self.p] = self.mat[: self.p, : self.p]
        out[self.p:, self.p:] = self.mat[self.p:, self.p:]
        return out

    @property
    def m_part(self) -> np.ndarray:
        return self.mat - self.h_part


def _mat(T) -> np.ndarray:
    return T.mat if isinstance(T, SkewEndo) else np.asarray(T, dtype=float)


def skew_inner(T, Tp) -> float:
    """<T, T'> = -tr(T T')."""
    return -float(np.einsum("ij,ji->", _mat(T), _mat(Tp)))


def hm_decompose(T):
    """Split into (h-part, m-part) SkewEndo pair."""
    if not isinstance(T, SkewEndo):
        raise OperatorError("hm_decompose needs a SkewEndo (the split depends on p)")
    return (
        SkewEndo(T.frame, T.h_part, T.p),
        SkewEndo(T.frame, T.m_part, T.p),
    )


def hm_split_mat(mat: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    h = np.zeros_like(mat)
    h[:p, :p] = mat[:p, :p]
    h[p:, p:] = mat[p:, p:]
    return h, mat - h


def basis_T(d: int, i: int, j: int) -> np.ndarray:
    """T_{ij} = (E^i_j - E^j_i)/sqrt(2), unit-norm skew basis element."""
    out = np.zeros((d, d))
    out[i, j] = 1.0 / np.sqrt(2.0)
    out[j, i] = -1.0 / np.sqrt(2.0)
    return out


# -- jet-level building blocks -------------------------------------------------


def frame_of_chart(fd: FramePointData, xc) -> Jet:
    """Chart coefficients -> tangent-frame coefficients (jets)."""
    return jet_einsum("Aa,a->A", fd.Dmat, xc)


def chart_of_frame(fd: FramePointData, xfr) -> Jet:
    return jet_einsum("aA,A->a", fd.C, xfr)


def as_chart_field(fd: FramePointData, field) -> Jet:
    """Normalize a tangent-field spec to a (p,) chart-coefficient jet.

    Accepts a callable of the coordinate jets, a list of chart-coefficient
    expression strings in u, or a plain constant coefficient array.
    """
    from .expr import eval_expr, parse

    if isinstance(field, Jet):
        return field
    if callable(field):
        return field(fd.uv)
    arr = field
    if all(isinstance(c, str) for c in arr):
        comps = [eval_expr(parse(c, fd.p, var_prefix="u"), fd.uv, fd.uspace) for c in arr]
        return jstack(comps, axis=-1)
    return fd.uspace.constant(np.asarray(arr, dtype=float))


def s_field_matrix(fd: FramePointData, Xc: Jet) -> Jet:
    """Frame matrix jet of the endomorphism field u -> S_{X(u)}."""
    return jet_einsum("a,aij->ij", Xc, fd.omega) * fd.mmask


def rt_matrix_jet(fd: FramePointData, Tj: Jet) -> Jet:
    """Frame matrix of X -> sum_i R(e_i, T e_i) X."""
    return jet_einsum("abij,ji->ab", fd.Rfr, Tj)


def endo_deriv_jet(fd: FramePointData, Tj: Jet, a: int, which: str = "ambient") -> Jet:
    """Frame components of (nabla_{d_a} T) for an endo field, full or primed."""
    om = fd.omega[a]
    if which == "prime":
        om = om * fd.hmask
    elif which != "ambient":
        raise OperatorError(f"unknown connection {which!r}")
    comm = jet_einsum("ik,kj->ij", om, Tj) - jet_einsum("ik,kj->ij", Tj, om)
    return Tj.d(a) + comm


def s_tm_tangent_jet(fd: FramePointData, Tm: Jet) -> Jet:
    """Tangent-frame coefficients of S_{T_m} = 2 sum_A S_{e_A}(T_m e_A)."""
    vec = 2.0 * jet_einsum("Aij,jA->i", fd.Smats, Tm[:, : fd.p])
    return vec[: fd.p]


def pinv_jet(fd: FramePointData) -> Jet:
    cached = getattr(fd, "_pinv_jet", None)
    if cached is None:
        if np.linalg.cond(fd.Pfr.val) > 1e12:
            raise OperatorError("operator P is numerically singular")
        cached = jet_inv(fd.Pfr)
        fd._pinv_jet = cached
    return cached


def vec_nabla_prime_jet(fd: FramePointData, Xc: Jet, Yc: Jet) -> Jet:
    """Chart coefficients of nabla'_X Y for tangent fields (jets)."""
    dY = jstack([Yc.d(a) for a in range(fd.p)], axis=0)
    return jet_einsum("a,ac->c", Xc, dY) + jet_einsum(
        "cab,ab->c", fd.Gam_chart, jet_einsum("a,b->ab", Xc, Yc)
    )


def vec_tilde_nabla_jet(fd: FramePointData, Xc: Jet, Yc: Jet) -> Jet:
    """Chart coefficients of the deformed-metric connection applied to fields."""
    dY = jstack([Yc.d(a) for a in range(fd.p)], axis=0)
    return jet_einsum("a,ac->c", Xc, dY) + jet_einsum(
        "cab,ab->c", fd.Gamt, jet_einsum("a,b->ab", Xc, Yc)
    )


def bracket_jet(fd: FramePointData, Xc: Jet, Yc: Jet) -> Jet:
    """[X, Y] in chart coefficients."""
    dY = jstack([Yc.d(a) for a in range(fd.p)], axis=0)
    dX = jstack([Xc.d(a) for a in range(fd.p)], axis=0)
    return jet_einsum("a,ac->c", Xc, dY) - jet_einsum("a,ac->c", Yc, dX)


def nabla_t_field_jet(fd: FramePointData, Tj: Jet, Xc: Jet, which: str = "ambient") -> Jet:
    """(nabla_X T) for an endo field along a tangent field, frame components."""
    terms = [Xc[a] * endo_deriv_jet(fd, Tj, a, which) for a in range(fd.p)]
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def q_t_chart_jet(fd: FramePointData, Tj: Jet, Xc: Jet) -> Jet:
    """Q_T(X) in chart coefficients, everything jet-valued.

    Q_T(X) = P^{-1}((R_T X)^T - S_{(nabla_X T)_m}).
    """
    RT = rt_matrix_jet(fd, Tj)
    xfr = frame_of_chart(fd, Xc)
    rt_top = jet_einsum("AB,B->A", RT[: fd.p, : fd.p], xfr)
    nabT = nabla_t_field_jet(fd, Tj, Xc, "ambient")
    svec = s_tm_tangent_jet(fd, nabT * fd.mmask)
    if np.linalg.cond(fd.Pfr.val) > 1e12:
        raise OperatorError("operator P is numerically singular")
    qfr = jet_solve(fd.Pfr, rt_top - svec)
    return chart_of_frame(fd, qfr)


def curvature_prime_jet(fd: FramePointData, Xc: Jet, Yc: Jet) -> Jet:
    """R'(X, Y) as a frame-matrix jet: R(X,Y)_h - [S_X, S_Y]."""
    xfr, yfr = frame_of_chart(fd, Xc), frame_of_chart(fd, Yc)
    RXY = jet_einsum(
        "ijl,l->ij", jet_einsum("ijkl,k->ijl", fd.Rfr[:, :, : fd.p, : fd.p], xfr), yfr
    )
    Sx = jet_einsum("a,aij->ij", Xc, fd.omega) * fd.mmask
    Sy = jet_einsum("a,aij->ij", Yc, fd.omega) * fd.mmask
    comm = jet_einsum("ik,kj->ij", Sx, Sy) - jet_einsum("ik,kj->ij", Sy, Sx)
    return RXY * fd.hmask - comm


# -- public pointwise operations ------------------------------------------------


def _skew_endo_at(M: ImmersedSubmanifold, u, mat: np.ndarray) -> SkewEndo:
    return SkewEndo(adapted_frame_at(M, u), 0.5 * (mat - mat.T), M.p)


def R_T(M: ImmersedSubmanifold, u, T, X) -> np.ndarray:
    """sum_i R(e_i, T e_i) X, ambient components."""
    fd = M.frame_data(u)
    RT = rt_matrix_jet(fd, fd.uspace.constant(_mat(T))).val
    return fd.ambient_components(RT @ fd.frame_components(X))


def S_Tm_vector(M: ImmersedSubmanifold, u, T) -> TangentVectorM:
    fd = M.frame_data(u)
    Tm = hm_split_mat(_mat(T), fd.p)[1]
    vec = 2.0 * np.einsum("Aij,jA->i", fd.Smats.val, Tm[:, : fd.p])
    amb = fd.ambient_components(vec)
    return TangentVectorM(amb, fd.chart_of_tangent(amb))


def P_op(M: ImmersedSubmanifold, u, X) -> TangentVectorM:
    fd = M.frame_data(u)
    xfr = fd.frame_components(X)[: fd.p]
    out = np.zeros(fd.d)
    out[: fd.p] = fd.Pfr.val @ xfr
    amb = fd.ambient_components(out)
    return TangentVectorM(amb, fd.chart_of_tangent(amb))


def P_inverse(M: ImmersedSubmanifold, u, X) -> TangentVectorM:
    fd = M.frame_data(u)
    if np.linalg.cond(fd.Pfr.val) > 1e12:
        raise OperatorError("operator P is numerically singular")
    xfr = fd.frame_components(X)[: fd.p]
    out = np.zeros(fd.d)
    out[: fd.p] = np.linalg.solve(fd.Pfr.val, xfr)
    amb = fd.ambient_components(out)
    return TangentVectorM(amb, fd.chart_of_tangent(amb))


def modified_metric(M: ImmersedSubmanifold, u, X, Y) -> float:
    fd = M.frame_data(u)
    xfr = fd.frame_components(X)[: fd.p]
    yfr = fd.frame_components(Y)[: fd.p]
    return float(xfr @ fd.Pfr.val @ yfr)


def nabla_endo(M: ImmersedSubmanifold, T, u, X, which: str = "ambient") -> SkewEndo:
    """(nabla_X T) or (nabla'_X T) for an endomorphism field T.

    T is a callable mapping FramePointData to a (d, d) frame-component jet.
    """
    fd = M.frame_data(u)
    Tj = T(fd)
    xc = fd.chart_of_tangent(X)
    out = sum(xc[a] * endo_deriv_jet(fd, Tj, a, which).val for a in range(fd.p))
    return _skew_endo_at(M, u, out)


def s_of_field(field) -> "callable":
    """Endomorphism field u -> S_{Y(u)} from a tangent vector field."""

    def endo(fd: FramePointData) -> Jet:
        return s_field_matrix(fd, as_chart_field(fd, field))

    return endo


def tilde_nabla(M: ImmersedSubmanifold, u, Xf, Yf) -> TangentVectorM:
    """Levi-Civita connection of the deformed metric, via its Christoffels."""
    fd = M.frame_data(u)
    Xc, Yc = as_chart_field(fd, Xf), as_chart_field(fd, Yf)
    out_c = vec_tilde_nabla_jet(fd, Xc, Yc).val
    amb = fd.J.val @ out_c
    return TangentVectorM(amb, out_c)


def nabla_prime_tangent(M: ImmersedSubmanifold, u, Xf, Yf) -> TangentVectorM:
    fd = M.frame_data(u)
    Xc, Yc = as_chart_field(fd, Xf), as_chart_field(fd, Yf)
    out_c = vec_nabla_prime_jet(fd, Xc, Yc).val
    amb = fd.J.val @ out_c
    return TangentVectorM(amb, out_c)


def L_op(M: ImmersedSubmanifold, u, Xf, Yf) -> TangentVectorM:
    """L_X Y = (Q_{S_X}(Y) + Q_{S_Y}(X) + P^{-1} S_{S_{nabla'_X Y + nabla'_Y X}})/2."""
    fd = M.frame_data(u)
    Xc, Yc = as_chart_field(fd, Xf), as_chart_field(fd, Yf)
    TX = s_field_matrix(fd, Xc)
    TY = s_field_matrix(fd, Yc)
    q1 = q_t_chart_jet(fd, TX, Yc).val
    q2 = q_t_chart_jet(fd, TY, Xc).val
    Zc = vec_nabla_prime_jet(fd, Xc, Yc) + vec_nabla_prime_jet(fd, Yc, Xc)
    SZ = s_field_matrix(fd, Zc)
    svec = s_tm_tangent_jet(fd, SZ).val
    q3fr = np.linalg.solve(fd.Pfr.val, svec)
    q3 = fd.C.val @ q3fr
    out_c = 0.5 * (q1 + q2 + q3)
    amb = fd.J.val @ out_c
    return TangentVectorM(amb, out_c)


def Q_T(M: ImmersedSubmanifold, u, T, X) -> TangentVectorM:
    """Q_T(X) = P^{-1}((R_T X)^T - S_{(nabla_X T)_m}) for an endo field T."""
    fd = M.frame_data(u)
    Tj = T(fd) if callable(T) else fd.uspace.constant(_mat(T))
    xc = fd.chart_of_tangent(_amb_of(X))
    out_c = q_t_chart_jet(fd, Tj, fd.uspace.constant(xc)).val
    amb = fd.J.val @ out_c
    return TangentVectorM(amb, out_c)


def curvature_prime(M: ImmersedSubmanifold, u, X, Y) -> SkewEndo:
    """R'(X, Y) = R(X,Y)_h - [S_X, S_Y] on the splitting-compatible connection."""
    fd = M.frame_data(u)
    xc = fd.uspace.constant(fd.chart_of_tangent(_amb_of(X)))
    yc = fd.uspace.constant(fd.chart_of_tangent(_amb_of(Y)))
    return _skew_endo_at(M, u, curvature_prime_jet(fd, xc, yc).val)


def _amb_of(v) -> np.ndarray:
    if isinstance(v, TangentVectorM):
        return v.ambient
    return np.asarray(v, dtype=float)
