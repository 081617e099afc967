"""The tangent-plane map into the Grassmann bundle and its tension field.

The map sends a point of M to its tangent space, viewed inside the bundle of
p-plane subspaces of TN. Tangent vectors of that bundle split into a
horizontal part (an ambient vector) and an off-diagonal vertical part (a skew
endomorphism with zero diagonal blocks in the adapted frame); the diagonal
blocks are quotiented away. The deformed metric on M is exactly the pullback
of the bundle metric under the map, which is why the tension field is taken
with respect to it. The module evaluates the pushforward, the bundle
connection, the tension field in two ways, the three harmonicity residuals,
the two minimality residuals, and the equivalence between harmonicity and
minimality of the adapted-frame subbundle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import omn_geometry as og
from . import operators as ops
from .frame_bundle import _ambient_deriv_frame, _curvature_matrix, _full_frame_field
from .jets import Jet, jet_einsum
from .operators import SkewEndo, hm_split_mat, skew_inner
from .submanifold import AdaptedFrame, FramePointData, ImmersedSubmanifold, adapted_frame_at

__all__ = [
    "GaussMapError",
    "GrassmannVector",
    "grassmann_vector",
    "grassmann_inner",
    "grassmann_nabla",
    "gauss_pushforward",
    "tension_field",
    "tension_field_pullback",
    "HarmonicityData",
    "harmonicity_residuals",
    "minimality_residuals",
    "HarmonicityReport",
    "is_harmonic",
    "TheoremReport",
    "theorem_check",
]


class GaussMapError(ValueError):
    pass


@dataclass(frozen=True)
class GrassmannVector:
    """Tangent vector of the plane bundle at a point of M.

    horizontal: ambient components at the base point.
    vertical: skew endomorphism in frame components, zero diagonal blocks.
    """

    sub: ImmersedSubmanifold
    base: AdaptedFrame
    horizontal: np.ndarray
    vertical: SkewEndo

    def __add__(self, other: "GrassmannVector") -> "GrassmannVector":
        _same_base(self, other)
        return GrassmannVector(
            self.sub,
            self.base,
            self.horizontal + other.horizontal,
            SkewEndo(self.base, self.vertical.mat + other.vertical.mat, self.vertical.p),
        )

    def __sub__(self, other: "GrassmannVector") -> "GrassmannVector":
        return self + (-1.0) * other

    def __rmul__(self, c: float) -> "GrassmannVector":
        return GrassmannVector(
            self.sub,
            self.base,
            c * self.horizontal,
            SkewEndo(self.base, c * self.vertical.mat, self.vertical.p),
        )

    def norm(self) -> float:
        return float(np.sqrt(max(grassmann_inner(self, self), 0.0)))


def _same_base(v: GrassmannVector, w: GrassmannVector):
    if v.sub is not w.sub or not np.array_equal(v.base.u, w.base.u):
        raise GaussMapError("vectors live over different points")


def grassmann_vector(M: ImmersedSubmanifold, u, horizontal=None, vertical=None) -> GrassmannVector:
    """Assemble a vector; the vertical matrix must have zero diagonal blocks."""
    fd = M.frame_data(np.asarray(u, dtype=float))
    fr = adapted_frame_at(M, u)
    h = np.zeros(fd.d) if horizontal is None else np.asarray(horizontal, dtype=float)
    vmat = np.zeros((fd.d, fd.d)) if vertical is None else np.asarray(vertical, dtype=float)
    h_part = hm_split_mat(0.5 * (vmat - vmat.T), fd.p)[0]
    if np.max(np.abs(h_part)) > 1e-10:
        raise GaussMapError("vertical part must have zero diagonal blocks")
    return GrassmannVector(M, fr, h, SkewEndo(fr, vmat * fd.mmask, fd.p))


def grassmann_inner(v: GrassmannVector, w: GrassmannVector) -> float:
    _same_base(v, w)
    fd = v.sub.frame_data(v.base.u)
    hv = fd.frame_components(v.horizontal)
    hw = fd.frame_components(w.horizontal)
    return float(hv @ hw) + skew_inner(v.vertical, w.vertical)


# -- connection --------------------------------------------------------------


def grassmann_nabla(M: ImmersedSubmanifold, u, case: str, *args) -> GrassmannVector:
    """Levi-Civita connection of the plane bundle on lifted fields.

    case "hh", (Xf, Yf): (nabla_X Y)^{hGr} - 1/2 hat(R(X,Y))
    case "hv", (Xf, T):  hat(nabla'_X T_m) + 1/2 R_{T_m}(X)^{hGr}
    case "vh", (T, Yf):  1/2 R_{T_m}(Y)^{hGr}
    case "vv", (T, Tp):  0
    """
    fd = M.frame_data(np.asarray(u, dtype=float))
    mm = fd.mmask

    def endo(T) -> Jet:
        j = T(fd) if callable(T) else fd.uspace.constant(np.asarray(ops._mat(T), dtype=float))
        return j * mm

    if case == "hh":
        Xf, Yf = args
        Xc = ops.as_chart_field(fd, Xf)
        yF = _full_frame_field(fd, ops.as_chart_field(fd, Yf))
        xF = _full_frame_field(fd, Xc)
        dy = _ambient_deriv_frame(fd, Xc, yF).val
        Rm = _curvature_matrix(fd, xF, yF).val * mm
        return grassmann_vector(M, u, horizontal=fd.ambient_components(dy), vertical=-0.5 * Rm)
    if case == "hv":
        Xf, T = args
        Xc = ops.as_chart_field(fd, Xf)
        Tj = endo(T)
        xF = _full_frame_field(fd, Xc).val
        RT = ops.rt_matrix_jet(fd, Tj).val
        dT = ops.nabla_t_field_jet(fd, Tj, Xc, "prime").val * mm
        return grassmann_vector(M, u, horizontal=fd.ambient_components(0.5 * RT @ xF), vertical=dT)
    if case == "vh":
        T, Yf = args
        Tj = endo(T)
        yF = _full_frame_field(fd, ops.as_chart_field(fd, Yf)).val
        RT = ops.rt_matrix_jet(fd, Tj).val
        return grassmann_vector(M, u, horizontal=fd.ambient_components(0.5 * RT @ yF))
    if case == "vv":
        return grassmann_vector(M, u)
    raise GaussMapError(f"unknown case {case!r}")


def gauss_pushforward(M: ImmersedSubmanifold, u, X) -> GrassmannVector:
    """Pushforward of a tangent vector: X^{hGr} + hat(S_X)."""
    fd = M.frame_data(np.asarray(u, dtype=float))
    Xa = X.ambient if hasattr(X, "ambient") else np.asarray(X, dtype=float)
    if Xa.shape == (fd.p,):
        xc = Xa
        Xa = fd.J.val @ xc
    else:
        xc = fd.chart_of_tangent(Xa)
        if np.max(np.abs(fd.J.val @ xc - Xa)) > 1e-8:
            raise GaussMapError("pushforward needs a tangent vector")
    smat = ops.s_field_matrix(fd, fd.uspace.constant(xc)).val
    return grassmann_vector(M, u, horizontal=Xa, vertical=smat)


# -- tension field -----------------------------------------------------------


def _tilde_frames(fd: FramePointData, rotation=None) -> list[Jet]:
    frames = [fd.Wchart[:, A] for A in range(fd.p)]
    if rotation is None:
        return frames
    Q = np.asarray(rotation, dtype=float)
    if np.max(np.abs(Q.T @ Q - np.eye(fd.p))) > 1e-10:
        raise GaussMapError("frame rotation must be orthogonal")
    rotated = []
    for B in range(fd.p):
        acc = Q[0, B] * frames[0]
        for A in range(1, fd.p):
            acc = acc + Q[A, B] * frames[A]
        rotated.append(acc)
    return rotated


def _tension_parts(fd: FramePointData, rotation=None):
    """Per-frame pieces shared by the tension field and the residuals.

    Returns summed jets: full ambient derivative (frame comps), tilde and
    prime derivatives (chart), the curvature term R_{S_e}(e) (frame comps),
    and the two vertical endomorphisms nabla'_e S_e and S of the derivative
    fields.
    """
    p, d = fd.p, fd.d
    zero_vec = fd.uspace.constant(np.zeros(d))
    zero_p = fd.uspace.constant(np.zeros(p))
    zero_mat = fd.uspace.constant(np.zeros((d, d)))
    amb = zero_vec
    rterm = zero_vec
    tilde = zero_p
    prime = zero_p
    dS = zero_mat
    for Ec in _tilde_frames(fd, rotation):
        EF = _full_frame_field(fd, Ec)
        SE = ops.s_field_matrix(fd, Ec)
        amb = amb + _ambient_deriv_frame(fd, Ec, EF)
        rterm = rterm + jet_einsum("ij,j->i", ops.rt_matrix_jet(fd, SE), EF)
        tilde = tilde + ops.vec_tilde_nabla_jet(fd, Ec, Ec)
        prime = prime + ops.vec_nabla_prime_jet(fd, Ec, Ec)
        dS = dS + ops.nabla_t_field_jet(fd, SE, Ec, "prime")
    return amb, rterm, tilde, prime, dS


def tension_field(M: ImmersedSubmanifold, u, rotation=None) -> GrassmannVector:
    """Closed-form tension of the plane map from (M, deformed metric).

    sum over a deformed-orthonormal frame e of
    (nabla_e e - tilde_e e + R_{S_e}(e))^{hGr}
    + hat(nabla'_e S_e) - hat(S_{tilde_e e}).
    """
    u = np.asarray(u, dtype=float)
    fd = M.frame_data(u)
    amb, rterm, tilde, _, dS = _tension_parts(fd, rotation)
    tilde_fr = np.concatenate([fd.Dmat.val @ tilde.val, np.zeros(fd.d - fd.p)])
    horiz = amb.val - tilde_fr + rterm.val
    vert = dS.val * fd.mmask - ops.s_field_matrix(fd, tilde).val
    return grassmann_vector(M, u, horizontal=fd.ambient_components(horiz), vertical=vert)


def tension_field_pullback(M: ImmersedSubmanifold, u) -> GrassmannVector:
    """Tension assembled from the connection cases and the pushforward.

    For each frame field e, the pushforward field splits into a horizontal
    lift and a vertical part, so its derivative along the pushforward of e is
    a sum of the four connection cases. Subtracting the pushforward of
    tilde_e e leaves the tension summand.
    """
    u = np.asarray(u, dtype=float)
    fd = M.frame_data(u)
    total = grassmann_vector(M, u)
    for A in range(fd.p):
        Ec = fd.Wchart[:, A]
        SE = lambda q, A=A: ops.s_field_matrix(q, q.Wchart[:, A])
        total = total + grassmann_nabla(M, u, "hh", Ec, Ec)
        total = total + grassmann_nabla(M, u, "hv", Ec, SE)
        total = total + grassmann_nabla(M, u, "vh", SE, Ec)
        total = total + grassmann_nabla(M, u, "vv", SE, SE)
        tl = ops.vec_tilde_nabla_jet(fd, Ec, Ec)
        total = total - gauss_pushforward(M, u, tl.val)
    return total


# -- harmonicity and minimality residuals --------------------------------------


@dataclass(frozen=True)
class HarmonicityData:
    """All residual vectors at one point, in frame components.

    h1: normal vector, sum of Pi(e, e) + R_{S_e}(e)^perp.
    h2: tangent vector, sum of nabla'_e e - tilde_e e + R_{S_e}(e)^top.
    h3: off-diagonal endomorphism, sum of nabla'_e S_e - S_{tilde_e e}.
    m2: off-diagonal endomorphism, sum of
        nabla'_e S_e - S_{nabla'_e e} - S_{R_{S_e}(e)^top}.
    m1 is h1 itself (the expressions coincide term by term).
    """

    u: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    m2: np.ndarray

    @property
    def r_h1(self) -> float:
        return float(np.linalg.norm(self.h1))

    @property
    def r_h2(self) -> float:
        return float(np.linalg.norm(self.h2))

    @property
    def r_h3(self) -> float:
        return float(np.sqrt(max(skew_inner(self.h3, self.h3), 0.0)))

    @property
    def r_m1(self) -> float:
        return self.r_h1

    @property
    def r_m2(self) -> float:
        return float(np.sqrt(max(skew_inner(self.m2, self.m2), 0.0)))


def _residual_data(M: ImmersedSubmanifold, u) -> HarmonicityData:
    u = np.asarray(u, dtype=float)
    fd = M.frame_data(u)
    p, d = fd.p, fd.d
    amb, rterm, tilde, prime, dS = _tension_parts(fd)
    ambv, rv = amb.val, rterm.val
    h1 = ambv.copy()
    h1[:p] = 0.0
    h1 = h1 + np.concatenate([np.zeros(p), rv[p:]])
    tilde_fr = fd.Dmat.val @ tilde.val
    prime_fr = fd.Dmat.val @ prime.val
    h2 = np.concatenate([prime_fr - tilde_fr + rv[:p], np.zeros(d - p)])
    s_of = lambda vec_chart: ops.s_field_matrix(fd, fd.uspace.constant(vec_chart)).val
    h3 = dS.val * fd.mmask - s_of(tilde.val)
    rtop_chart = fd.C.val @ rv[:p]
    m2 = dS.val * fd.mmask - s_of(prime.val) - s_of(rtop_chart)
    return HarmonicityData(u, h1, h2, h3, m2)


def harmonicity_residuals(M: ImmersedSubmanifold, u) -> tuple[float, float, float]:
    """Norms of the three conditions whose joint vanishing is harmonicity."""
    data = _residual_data(M, u)
    return (data.r_h1, data.r_h2, data.r_h3)


def minimality_residuals(M: ImmersedSubmanifold, u) -> tuple[float, float]:
    """Norms of the two conditions equivalent to minimality upstairs; the
    first is the same expression as the first harmonicity condition."""
    data = _residual_data(M, u)
    return (data.r_m1, data.r_m2)


def residual_data(M: ImmersedSubmanifold, u) -> HarmonicityData:
    return _residual_data(M, u)


@dataclass(frozen=True)
class HarmonicityReport:
    harmonic: bool
    max_residual: float
    samples: int
    tol: float


def is_harmonic(M: ImmersedSubmanifold, samples: int = 200, tol: float = 1e-6, seed: int = 0) -> HarmonicityReport:
    worst = 0.0
    for u in og.domain_samples(M, samples, seed=seed):
        worst = max(worst, max(harmonicity_residuals(M, u)))
    return HarmonicityReport(worst < tol, worst, samples, tol)


# -- the equivalence ------------------------------------------------------------


@dataclass(frozen=True)
class TheoremReport:
    minimal: bool
    harmonic: bool
    agree: bool
    separated: bool
    max_mean_curvature: float
    max_harmonicity_residual: float
    m2_identity_residual: float
    h2_recovery_residual: float
    samples: int
    tol: float


def theorem_check(M: ImmersedSubmanifold, samples: int = 50, tol: float = 1e-6, seed: int = 0) -> TheoremReport:
    """Minimality of the subbundle vs harmonicity of the plane map.

    The two verdicts must agree. The separated flag asks the outcome to be
    decisive: both residual sups below tol, or both at least 1e3 times tol.
    Two exact identities from the equivalence proof ride along: m2 = h3 -
    S_{h2} and P(h2) = S_{m2}, which give the two implication directions
    between the condition sets.
    """
    mrep = og.is_minimal(M, samples=samples, tol=tol, seed=seed)
    hrep = is_harmonic(M, samples=samples, tol=tol, seed=seed)
    id_m2 = 0.0
    id_h2 = 0.0
    for u in og.domain_samples(M, min(samples, 10), seed=seed + 1):
        fd = M.frame_data(u)
        data = _residual_data(M, u)
        s_h2 = ops.s_field_matrix(fd, fd.uspace.constant(fd.C.val @ data.h2[: fd.p])).val
        id_m2 = max(id_m2, float(np.max(np.abs(data.m2 - (data.h3 - s_h2)))))
        svec = 2.0 * np.einsum("Aij,jA->i", fd.Smats.val, data.m2[:, : fd.p])
        lhs = fd.Pfr.val @ data.h2[: fd.p]
        id_h2 = max(id_h2, float(np.max(np.abs(lhs - svec[: fd.p]))))
    lo = min(mrep.max_residual, hrep.max_residual)
    hi = max(mrep.max_residual, hrep.max_residual)
    separated = hi < tol or lo >= 1e3 * tol
    return TheoremReport(
        minimal=mrep.minimal,
        harmonic=hrep.harmonic,
        agree=mrep.minimal == hrep.harmonic,
        separated=separated,
        max_mean_curvature=mrep.max_residual,
        max_harmonicity_residual=hrep.max_residual,
        m2_identity_residual=id_m2,
        h2_recovery_residual=id_h2,
        samples=samples,
        tol=tol,
    )
