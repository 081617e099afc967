"""Tangent vectors of the ambient orthonormal frame bundle at adapted frames.

A tangent vector of O(N) at a frame splits into a horizontal part (an ambient
vector at the base point) and a vertical part (a skew matrix of frame
components). The Sasaki-Mok metric pairs horizontal parts with the base
metric and vertical parts with -tr(V V').

Everything is evaluated at adapted frames over a submanifold M, where the
useful lifts are X^h (zero vertical), X^{h'} = X^h + bar(S_X) for tangent X,
and the invariant vertical fields bar(T).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jets import Jet, jet_einsum, jstack
from . import operators as ops
from .operators import OperatorError, SkewEndo, hm_split_mat, skew_inner
from .submanifold import (
    AdaptedFrame,
    FramePointData,
    ImmersedSubmanifold,
    TangentVectorM,
    adapted_frame_at,
)

__all__ = [
    "FrameBundleError",
    "LiftedVector",
    "VerticalComponents",
    "lifted",
    "sasaki_mok_inner",
    "vertical_from_tensor",
    "vertical_from_frame_matrix",
    "horizontal_lift",
    "horizontal_lift_prime",
    "nabla_ON",
    "nabla_ON_primed",
    "nabla_ON_section",
    "section_velocity",
    "decompose_OMN",
    "tangent_generators",
    "normal_generators",
]


class FrameBundleError(ValueError):
    pass


@dataclass(frozen=True)
class VerticalComponents:
    """Frame components u^{-1} T u of an endomorphism T at the frame u."""

    matrix: np.ndarray


@dataclass(frozen=True)
class LiftedVector:
    """Tangent vector of the frame bundle at an adapted frame.

    horizontal: ambient components of the horizontal part at the base point.
    vertical: skew matrix of frame components of the vertical part.
    """

    sub: ImmersedSubmanifold
    base: AdaptedFrame
    horizontal: np.ndarray
    vertical: SkewEndo

    def _fd(self) -> FramePointData:
        return self.sub.frame_data(self.base.u)

    def __add__(self, other: "LiftedVector") -> "LiftedVector":
        _same_base(self, other)
        return LiftedVector(
            self.sub,
            self.base,
            self.horizontal + other.horizontal,
            SkewEndo(self.base, self.vertical.mat + other.vertical.mat, self.vertical.p),
        )

    def __sub__(self, other: "LiftedVector") -> "LiftedVector":
        return self + (-1.0) * other

    def __rmul__(self, c: float) -> "LiftedVector":
        return LiftedVector(
            self.sub,
            self.base,
            c * self.horizontal,
            SkewEndo(self.base, c * self.vertical.mat, self.vertical.p),
        )

    def norm(self) -> float:
        return float(np.sqrt(max(sasaki_mok_inner(self, self), 0.0)))


def _same_base(v: LiftedVector, w: LiftedVector):
    if v.sub is not w.sub or not np.array_equal(v.base.u, w.base.u):
        raise FrameBundleError("lifted vectors live at different frames")


def lifted(M: ImmersedSubmanifold, u, horizontal=None, vertical=None) -> LiftedVector:
    """Assemble a LiftedVector from ambient horizontal and frame vertical parts."""
    fd = M.frame_data(np.asarray(u, dtype=float))
    fr = adapted_frame_at(M, u)
    h = np.zeros(fd.d) if horizontal is None else np.asarray(horizontal, dtype=float)
    vmat = np.zeros((fd.d, fd.d)) if vertical is None else np.asarray(vertical, dtype=float)
    return LiftedVector(M, fr, h, SkewEndo(fr, vmat, fd.p))


def sasaki_mok_inner(v: LiftedVector, w: LiftedVector) -> float:
    """g(h, h') at the base point plus <V, V'> on the vertical parts."""
    _same_base(v, w)
    fd = v._fd()
    hv = fd.frame_components(v.horizontal)
    hw = fd.frame_components(w.horizontal)
    return float(hv @ hw) + skew_inner(v.vertical, w.vertical)


def vertical_from_tensor(M: ImmersedSubmanifold, u, T_ambient) -> LiftedVector:
    """bar(T) for an endomorphism given by its ambient coordinate matrix."""
    fd = M.frame_data(np.asarray(u, dtype=float))
    E = fd.E.val
    comps = fd.Einv.val @ np.asarray(T_ambient, dtype=float) @ E
    if np.max(np.abs(comps + comps.T)) > 1e-10:
        raise FrameBundleError("tensor is not skew with respect to the metric")
    comps = 0.5 * (comps - comps.T)
    return lifted(M, u, vertical=comps)


def vertical_from_frame_matrix(M: ImmersedSubmanifold, u, mat) -> LiftedVector:
    """bar(T) for an endomorphism given directly by frame components."""
    return lifted(M, u, vertical=mat)


def horizontal_lift(M: ImmersedSubmanifold, u, X) -> LiftedVector:
    """X^h: horizontal part X, zero vertical part."""
    return lifted(M, u, horizontal=_amb(X))


def horizontal_lift_prime(M: ImmersedSubmanifold, u, X) -> LiftedVector:
    """X^{h'} = X^h + bar(S_X) for X tangent to M."""
    fd = M.frame_data(np.asarray(u, dtype=float))
    Xa = _amb(X)
    xc = fd.chart_of_tangent(Xa)
    if np.max(np.abs(fd.J.val @ xc - Xa)) > 1e-8:
        raise FrameBundleError("horizontal_lift_prime needs a tangent vector")
    smat = ops.s_field_matrix(fd, fd.uspace.constant(xc)).val
    return lifted(M, u, horizontal=Xa, vertical=smat)


def _amb(X) -> np.ndarray:
    if isinstance(X, TangentVectorM):
        return X.ambient
    return np.asarray(X, dtype=float)


def _endo_jet(fd: FramePointData, T) -> Jet:
    """Normalize an endo-field spec to a (d, d) frame-component jet."""
    if callable(T):
        return T(fd)
    if isinstance(T, SkewEndo):
        return fd.uspace.constant(T.mat)
    return fd.uspace.constant(np.asarray(T, dtype=float))


def _full_frame_field(fd: FramePointData, Xc: Jet) -> Jet:
    """Frame components (length d) of a tangent chart-coefficient field."""
    xfr = jet_einsum("Aa,a->A", fd.Dmat, Xc)
    zeros = fd.uspace.constant(np.zeros(fd.d - fd.p))
    return jstack([xfr[i] for i in range(fd.p)] + [zeros[i] for i in range(fd.d - fd.p)], axis=0)


def _ambient_deriv_frame(fd: FramePointData, Xc: Jet, yF: Jet) -> Jet:
    """Frame components of nabla_X Y for a full frame-component field yF."""
    terms = [Xc[a] * (yF.d(a) + jet_einsum("ij,j->i", fd.omega[a], yF)) for a in range(fd.p)]
    out = terms[0]
    for t in terms[1:]:
        out = out + t
    return out


def _curvature_matrix(fd: FramePointData, xF: Jet, yF: Jet) -> Jet:
    """Frame matrix of R(X, Y) for full frame-component vectors."""
    return jet_einsum("ijl,l->ij", jet_einsum("ijkl,k->ijl", fd.Rfr, xF), yF)


def nabla_ON(M: ImmersedSubmanifold, u, case: str, *args) -> LiftedVector:
    """Levi-Civita connection of the Sasaki-Mok metric on lifted fields.

    case "hh", args (Xf, Yf):  nabla_{X^h} Y^h = (nabla_X Y)^h - 1/2 bar(R(X,Y))
    case "vh", args (T, Xf):   nabla_{bar T} X^h = 1/2 R_T(X)^h
    case "hv", args (Xf, T):   nabla_{X^h} bar T = 1/2 R_T(X)^h + bar(nabla_X T)
    case "vv", args (T, Tp):   nabla_{bar T} bar T' = 1/2 bar([T', T])

    Vector fields are chart-coefficient specs; T specs are endo fields
    (callables of FramePointData) or constant frame matrices.
    """
    fd = M.frame_data(np.asarray(u, dtype=float))
    if case == "hh":
        Xf, Yf = args
        Xc = ops.as_chart_field(fd, Xf)
        Yc = ops.as_chart_field(fd, Yf)
        xF = _full_frame_field(fd, Xc)
        yF = _full_frame_field(fd, Yc)
        dy = _ambient_deriv_frame(fd, Xc, yF).val
        Rm = _curvature_matrix(fd, xF, yF).val
        return lifted(M, u, horizontal=fd.ambient_components(dy), vertical=-0.5 * Rm)
    if case == "vh":
        T, Xf = args
        Tj = _endo_jet(fd, T)
        Xc = ops.as_chart_field(fd, Xf)
        xF = _full_frame_field(fd, Xc).val
        RT = ops.rt_matrix_jet(fd, Tj).val
        return lifted(M, u, horizontal=fd.ambient_components(0.5 * RT @ xF))
    if case == "hv":
        Xf, T = args
        Xc = ops.as_chart_field(fd, Xf)
        Tj = _endo_jet(fd, T)
        xF = _full_frame_field(fd, Xc).val
        RT = ops.rt_matrix_jet(fd, Tj).val
        dT = ops.nabla_t_field_jet(fd, Tj, Xc, "ambient").val
        return lifted(M, u, horizontal=fd.ambient_components(0.5 * RT @ xF), vertical=dT)
    if case == "vv":
        T, Tp = args
        A = _endo_jet(fd, T).val
        B = _endo_jet(fd, Tp).val
        return lifted(M, u, vertical=0.5 * (B @ A - A @ B))
    raise FrameBundleError(f"unknown case {case!r}")


def nabla_ON_primed(M: ImmersedSubmanifold, u, case: str, *args) -> LiftedVector:
    """Ambient connection evaluated on primed lifts by bilinear expansion.

    X^{h'} = X^h + bar(S_X) both as direction and as field, so each case is a
    sum of the four basic cases. case "hh": (Xf, Yf) differentiates Y^{h'}
    along X^{h'}; "hv": (Xf, T); "vh": (T, Yf); "vv": (T, Tp).
    """
    if case == "hh":
        Xf, Yf = args
        sx, sy = ops.s_of_field(Xf), ops.s_of_field(Yf)
        out = nabla_ON(M, u, "hh", Xf, Yf)
        out = out + nabla_ON(M, u, "hv", Xf, sy)
        out = out + nabla_ON(M, u, "vh", sx, Yf)
        return out + nabla_ON(M, u, "vv", sx, sy)
    if case == "hv":
        Xf, T = args
        sx = ops.s_of_field(Xf)
        return nabla_ON(M, u, "hv", Xf, T) + nabla_ON(M, u, "vv", sx, T)
    if case == "vh":
        T, Yf = args
        sy = ops.s_of_field(Yf)
        return nabla_ON(M, u, "vh", T, Yf) + nabla_ON(M, u, "vv", T, sy)
    if case == "vv":
        return nabla_ON(M, u, "vv", *args)
    raise FrameBundleError(f"unknown case {case!r}")


def section_velocity(fd: FramePointData, Xc: Jet) -> np.ndarray:
    """Vertical frame components of the adapted-section velocity over X.

    Moving the base point with X drags the adapted frame; the resulting
    bundle velocity is X^h + bar(omega_X) with omega_X the connection form.
    """
    return jet_einsum("a,aij->ij", Xc, fd.omega).val


def nabla_ON_section(M: ImmersedSubmanifold, u, Xf, yframe, endof) -> LiftedVector:
    """Covariant derivative along the adapted section of a lifted field.

    The field is V(u) = (sum_i yframe_i(u) e_i(u))^h + bar(T(u)) with yframe a
    callable of the coordinate jets giving (d,) frame components and endof an
    endo field. The direction is the section velocity over the tangent field
    Xf. Combines all four connection cases plus the component derivatives.
    """
    fd = M.frame_data(np.asarray(u, dtype=float))
    Xc = ops.as_chart_field(fd, Xf)
    xF = _full_frame_field(fd, Xc)
    yF = yframe(fd)
    Tj = _endo_jet(fd, endof)
    omX = jet_einsum("a,aij->ij", Xc, fd.omega)

    # horizontal-direction pieces
    dy = _ambient_deriv_frame(fd, Xc, yF)
    Rxy = _curvature_matrix(fd, xF, yF)
    RT = ops.rt_matrix_jet(fd, Tj)
    dT = ops.nabla_t_field_jet(fd, Tj, Xc, "ambient")
    # vertical-direction pieces along bar(omega_X)
    Rom = ops.rt_matrix_jet(fd, omX)

    horiz = dy + 0.5 * jet_einsum("ij,j->i", RT, xF) + 0.5 * jet_einsum("ij,j->i", Rom, yF)
    vert = dT - 0.5 * Rxy + 0.5 * (jet_einsum("ik,kj->ij", Tj, omX) - jet_einsum("ik,kj->ij", omX, Tj))
    return lifted(M, u, horizontal=fd.ambient_components(horiz.val), vertical=vert.val)


def decompose_OMN(v: LiftedVector) -> tuple[LiftedVector, LiftedVector]:
    """Split a bundle tangent vector into parts tangent and normal to the
    adapted subbundle.

    The tangent space at an adapted frame is spanned by primed horizontal
    lifts and the block-diagonal vertical fields; the normal space by
    horizontal lifts of normal vectors and the off-diagonal vertical fields
    corrected by (S_{T_m})^h.
    """
    M, u = v.sub, v.base.u
    fd = M.frame_data(u)
    p, d = fd.p, fd.d
    hfr = fd.frame_components(v.horizontal)
    Vh, Vm = hm_split_mat(v.vertical.mat, p)
    svec = 2.0 * np.einsum("Aij,jA->i", fd.Smats.val, Vm[:, :p])[:p]
    if np.linalg.cond(fd.Pfr.val) > 1e12:
        raise OperatorError("operator P is numerically singular")
    xtan = np.linalg.solve(fd.Pfr.val, hfr[:p] - svec)
    xc = fd.C.val @ xtan
    SX = ops.s_field_matrix(fd, fd.uspace.constant(xc)).val
    xfull = np.zeros(d)
    xfull[:p] = xtan
    tangent = lifted(M, u, horizontal=fd.ambient_components(xfull), vertical=SX + Vh)
    normal = lifted(
        M,
        u,
        horizontal=v.horizontal - tangent.horizontal,
        vertical=v.vertical.mat - tangent.vertical.mat,
    )
    return tangent, normal


def tangent_generators(M: ImmersedSubmanifold, u) -> list[LiftedVector]:
    """Primed lifts of the tangent frame plus block-diagonal vertical basis."""
    fd = M.frame_data(np.asarray(u, dtype=float))
    p, d = fd.p, fd.d
    out = []
    for A in range(p):
        xa = fd.ambient_components(np.eye(d)[A])
        out.append(horizontal_lift_prime(M, u, xa))
    for i in range(d):
        for j in range(i + 1, d):
            if (i < p) == (j < p):
                out.append(lifted(M, u, vertical=ops.basis_T(d, i, j)))
    return out


def normal_generators(M: ImmersedSubmanifold, u) -> list[LiftedVector]:
    """Horizontal lifts of normal frame vectors plus corrected off-diagonal
    vertical fields bar(T) + (S_{T_m})^h."""
    fd = M.frame_data(np.asarray(u, dtype=float))
    p, d = fd.p, fd.d
    out = []
    for al in range(p, d):
        out.append(horizontal_lift(M, u, fd.ambient_components(np.eye(d)[al])))
    for A in range(p):
        for al in range(p, d):
            Tm = ops.basis_T(d, A, al)
            svec = 2.0 * np.einsum("Aij,jA->i", fd.Smats.val, Tm[:, :p])
            out.append(lifted(M, u, horizontal=fd.ambient_components(svec), vertical=Tm))
    return out
