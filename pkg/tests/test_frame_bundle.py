import numpy as np
import pytest

from framelab import operators as ops
from framelab.expr import eval_expr, parse
from framelab.frame_bundle import (
    FrameBundleError,
    decompose_OMN,
    horizontal_lift,
    horizontal_lift_prime,
    lifted,
    nabla_ON,
    nabla_ON_section,
    normal_generators,
    sasaki_mok_inner,
    tangent_generators,
    vertical_from_frame_matrix,
    vertical_from_tensor,
)
from framelab.jets import jstack
from framelab.operators import basis_T, modified_metric, skew_inner
from framelab.submanifold import adapted_frame_at, builtin_submanifold

ALL_BUILTINS = [
    ("plane", np.array([0.3, -0.5])),
    ("plane3", np.array([0.2, 0.1, -0.4])),
    ("circle", np.array([0.4])),
    ("sphere2", np.array([1.1, 0.6])),
    ("catenoid", np.array([0.35, -0.2])),
    ("great2(0.5)", np.array([0.2, -0.4])),
    ("clifford", np.array([0.4, -0.7])),
]


def random_skew(rng, d):
    a = rng.normal(size=(d, d))
    return 0.5 * (a - a.T)


def frame_field(exprs):
    """(d,) frame-component field from expression strings in the chart."""

    def field(fd):
        comps = [eval_expr(parse(s, fd.p, var_prefix="u"), fd.uv, fd.uspace) for s in exprs]
        return jstack(comps, axis=0)

    return field


def varying_skew_field(mat):
    def field(fd):
        s = 1.0 + 0.4 * fd.uv[0]
        if fd.p > 1:
            s = s + 0.1 * fd.uv[0] * fd.uv[1]
        return s * fd.uspace.constant(mat)

    return field


# -- construction and the metric ---------------------------------------------


def test_lifted_rejects_symmetric_vertical():
    M = builtin_submanifold("sphere2")
    with pytest.raises(Exception):
        lifted(M, np.array([1.0, 0.5]), vertical=np.eye(3))


def test_horizontal_vertical_orthogonal():
    rng = np.random.default_rng(0)
    M = builtin_submanifold("clifford")
    u = np.array([0.4, -0.7])
    fd = M.frame_data(u)
    h = horizontal_lift(M, u, fd.ambient_components(rng.normal(size=3)))
    v = lifted(M, u, vertical=random_skew(rng, 3))
    assert sasaki_mok_inner(h, v) == 0.0


def test_vertical_basis_norm():
    M = builtin_submanifold("sphere2")
    u = np.array([1.0, 0.5])
    t12 = lifted(M, u, vertical=basis_T(3, 0, 1))
    assert abs(sasaki_mok_inner(t12, t12) - 1.0) < 1e-14


def test_circle_primed_lift_norm():
    """1 from the horizontal part plus 2 from the S-matrix."""
    M = builtin_submanifold("circle")
    u = np.array([0.3])
    e1 = adapted_frame_at(M, u).vectors[0]
    v = horizontal_lift_prime(M, u, e1)
    assert abs(sasaki_mok_inner(v, v) - 3.0) < 1e-12


def test_primed_lift_metric_matches_modified_metric():
    rng = np.random.default_rng(1)
    for name, u in ALL_BUILTINS:
        M = builtin_submanifold(name)
        fd = M.frame_data(u)
        for _ in range(3):
            X = fd.J.val @ rng.normal(size=fd.p)
            Y = fd.J.val @ rng.normal(size=fd.p)
            lhs = sasaki_mok_inner(
                horizontal_lift_prime(M, u, X), horizontal_lift_prime(M, u, Y)
            )
            assert abs(lhs - modified_metric(M, u, X, Y)) < 1e-10


# -- vertical fields from tensors ------------------------------------------


def test_vertical_from_tensor_zero():
    M = builtin_submanifold("sphere2")
    v = vertical_from_tensor(M, np.array([1.0, 0.5]), np.zeros((3, 3)))
    assert np.max(np.abs(v.vertical.mat)) == 0.0
    assert np.max(np.abs(v.horizontal)) == 0.0


def test_vertical_from_tensor_rejects_non_skew():
    M = builtin_submanifold("sphere2")
    u = np.array([1.0, 0.5])
    with pytest.raises(FrameBundleError):
        vertical_from_tensor(M, u, np.diag([1.0, 2.0, 3.0]))


def test_vertical_of_S_has_zero_diagonal_blocks():
    M = builtin_submanifold("catenoid")
    u = np.array([0.35, -0.2])
    fd = M.frame_data(u)
    smat = ops.s_field_matrix(fd, fd.uspace.constant(np.array([1.0, -0.5]))).val
    T_amb = fd.E.val @ smat @ fd.Einv.val
    v = vertical_from_tensor(M, u, T_amb)
    p = fd.p
    assert np.max(np.abs(v.vertical.mat[:p, :p])) < 1e-10
    assert np.max(np.abs(v.vertical.mat[p:, p:])) < 1e-10
    assert np.max(np.abs(v.vertical.mat - smat)) < 1e-10


def test_vertical_components_equivariance():
    """Conjugating the frame by a block rotation conjugates the components."""
    rng = np.random.default_rng(2)
    M = builtin_submanifold("clifford")
    u = np.array([0.4, -0.7])
    fd = M.frame_data(u)
    d, p = fd.d, fd.p
    T_amb = fd.E.val @ random_skew(rng, d) @ fd.Einv.val
    comps = fd.Einv.val @ T_amb @ fd.E.val
    g = np.eye(d)
    th = 0.8
    g[0, 0], g[0, 1], g[1, 0], g[1, 1] = np.cos(th), -np.sin(th), np.sin(th), np.cos(th)
    E_rot = fd.E.val @ g
    comps_rot = np.linalg.inv(E_rot) @ T_amb @ E_rot
    assert np.max(np.abs(comps_rot - g.T @ comps @ g)) < 1e-12


# -- the connection ------------------------------------------------------------


def test_nabla_ON_flat_reductions():
    """Euclidean ambient kills every curvature term."""
    rng = np.random.default_rng(3)
    M = builtin_submanifold("plane")
    u = np.array([0.2, -0.3])
    fd = M.frame_data(u)
    Xf, Yf = ["u2", "1-u1"], ["u1*u2", "u1"]
    T = random_skew(rng, 3)
    Tp = random_skew(rng, 3)

    hh = nabla_ON(M, u, "hh", Xf, Yf)
    assert np.max(np.abs(hh.vertical.mat)) < 1e-12

    vh = nabla_ON(M, u, "vh", T, Xf)
    assert np.max(np.abs(vh.horizontal)) < 1e-12
    assert np.max(np.abs(vh.vertical.mat)) < 1e-12

    hv = nabla_ON(M, u, "hv", Xf, T)
    assert np.max(np.abs(hv.horizontal)) < 1e-12
    # constant frame components over the plane: nabla_X T = 0
    assert np.max(np.abs(hv.vertical.mat)) < 1e-12

    vv = nabla_ON(M, u, "vv", T, Tp)
    want = 0.5 * (Tp @ T - T @ Tp)
    assert np.max(np.abs(vv.vertical.mat - want)) < 1e-12
    assert np.max(np.abs(vv.horizontal)) < 1e-12


def test_nabla_ON_vertical_commutator_value():
    """bar(T_12) against bar(T_13): the result is bar(T_23)/(2 sqrt 2)."""
    M = builtin_submanifold("plane3")
    u = np.array([0.2, 0.1, -0.4])
    T, Tp = basis_T(4, 0, 1), basis_T(4, 0, 2)
    out = nabla_ON(M, u, "vv", T, Tp)
    comm = Tp @ T - T @ Tp
    assert np.max(np.abs(comm - basis_T(4, 1, 2) / np.sqrt(2.0))) < 1e-15
    assert np.max(np.abs(out.vertical.mat - 0.5 * comm)) < 1e-15


def test_nabla_ON_torsion_identity():
    """nabla_{X^h}Y^h - nabla_{Y^h}X^h = [X,Y]^h - bar(R(X,Y))."""
    for name, u in [("great2(0.5)", np.array([0.2, -0.4])), ("clifford", np.array([0.4, -0.7]))]:
        M = builtin_submanifold(name)
        fd = M.frame_data(u)
        Xf, Yf = ["u2", "1-u1"], ["u1*u2", "u1"]
        a = nabla_ON(M, u, "hh", Xf, Yf)
        b = nabla_ON(M, u, "hh", Yf, Xf)
        Xc = ops.as_chart_field(fd, Xf)
        Yc = ops.as_chart_field(fd, Yf)
        br = ops.bracket_jet(fd, Xc, Yc).val
        br_amb = fd.J.val @ br
        diff_h = a.horizontal - b.horizontal
        assert np.max(np.abs(diff_h - br_amb)) < 1e-7
        xfr = fd.Dmat.val @ Xc.val
        yfr = fd.Dmat.val @ Yc.val
        Rm = np.einsum("ijkl,k,l->ij", fd.Rfr.val[:, :, : fd.p, : fd.p], xfr, yfr)
        diff_v = a.vertical.mat - b.vertical.mat
        assert np.max(np.abs(diff_v + Rm)) < 1e-7


@pytest.mark.parametrize(
    "name,u",
    [("great2(0.5)", np.array([0.2, -0.4])), ("clifford", np.array([0.4, -0.7]))],
)
def test_nabla_ON_metric_compatibility(name, u):
    """Derivative of g_SM(V, W) along the adapted section against the
    connection applied to each side, curved ambient."""
    rng = np.random.default_rng(4)
    M = builtin_submanifold(name)
    fd = M.frame_data(u)
    d = fd.d
    Xf = ["u2", "1-u1"]
    yV = frame_field(["u1", "sin(u2)", "u1*u2"][:d] + ["1"] * max(0, d - 3))
    yW = frame_field(["cos(u1)", "u2", "1-u1"][:d] + ["u1"] * max(0, d - 3))
    AV = varying_skew_field(random_skew(rng, d))
    AW = varying_skew_field(random_skew(rng, d))

    Xc = ops.as_chart_field(fd, Xf)
    f = (yV(fd) * yW(fd)).sum(-1) - ops.jet_einsum("ij,ji->", AV(fd), AW(fd))
    lhs = sum(Xc.val[a] * f.d(a).val for a in range(fd.p))

    dV = nabla_ON_section(M, u, Xf, yV, AV)
    dW = nabla_ON_section(M, u, Xf, yW, AW)
    V0 = lifted(M, u, horizontal=fd.ambient_components(yV(fd).val), vertical=AV(fd).val)
    W0 = lifted(M, u, horizontal=fd.ambient_components(yW(fd).val), vertical=AW(fd).val)
    rhs = sasaki_mok_inner(dV, W0) + sasaki_mok_inner(V0, dW)
    assert abs(lhs - rhs) < 1e-7


# -- decomposition ---------------------------------------------------------------


def test_decompose_plane_tangent_untouched():
    M = builtin_submanifold("plane")
    u = np.array([0.2, -0.3])
    v = horizontal_lift(M, u, np.array([1.0, 2.0, 0.0]))
    t, n = decompose_OMN(v)
    assert np.max(np.abs(t.horizontal - v.horizontal)) < 1e-12
    assert np.max(np.abs(t.vertical.mat)) < 1e-12
    assert np.max(np.abs(n.horizontal)) < 1e-12
    assert np.max(np.abs(n.vertical.mat)) < 1e-12


def test_decompose_circle_horizontal_lift():
    """e1^h splits into (1/3)e1^{h'} and the S-corrected remainder."""
    M = builtin_submanifold("circle")
    u = np.array([0.3])
    e1 = adapted_frame_at(M, u).vectors[0]
    t, n = decompose_OMN(horizontal_lift(M, u, e1))
    third = (1.0 / 3.0) * horizontal_lift_prime(M, u, e1)
    assert np.max(np.abs(t.horizontal - third.horizontal)) < 1e-12
    assert np.max(np.abs(t.vertical.mat - third.vertical.mat)) < 1e-12
    assert np.max(np.abs(n.horizontal - (2.0 / 3.0) * e1)) < 1e-12
    fd = M.frame_data(u)
    smat = ops.s_field_matrix(fd, fd.uspace.constant(np.array([1.0]))).val
    assert np.max(np.abs(n.vertical.mat + smat / 3.0)) < 1e-12


def test_decompose_h_type_vertical_is_tangent():
    M = builtin_submanifold("plane3")
    u = np.array([0.2, 0.1, -0.4])
    v = vertical_from_frame_matrix(M, u, basis_T(4, 0, 1))
    t, n = decompose_OMN(v)
    assert np.max(np.abs(t.vertical.mat - v.vertical.mat)) < 1e-12
    assert np.max(np.abs(n.vertical.mat)) < 1e-12
    assert np.max(np.abs(n.horizontal)) < 1e-12


@pytest.mark.parametrize("name,u", ALL_BUILTINS)
def test_decompose_reconstructs_and_orthogonal(name, u):
    rng = np.random.default_rng(5)
    M = builtin_submanifold(name)
    fd = M.frame_data(u)
    d = fd.d
    for _ in range(3):
        v = lifted(
            M,
            u,
            horizontal=fd.ambient_components(rng.normal(size=d)),
            vertical=random_skew(rng, d),
        )
        t, n = decompose_OMN(v)
        assert np.max(np.abs(t.horizontal + n.horizontal - v.horizontal)) < 1e-12
        assert np.max(np.abs(t.vertical.mat + n.vertical.mat - v.vertical.mat)) < 1e-12
        assert abs(sasaki_mok_inner(t, n)) < 1e-10
        t2, n2 = decompose_OMN(t)
        assert np.max(np.abs(t2.horizontal - t.horizontal)) < 1e-10
        assert np.max(np.abs(t2.vertical.mat - t.vertical.mat)) < 1e-10
        assert np.max(np.abs(n2.horizontal)) < 1e-10
        assert np.max(np.abs(n2.vertical.mat)) < 1e-10


@pytest.mark.parametrize("name,u", ALL_BUILTINS)
def test_decompose_against_generators(name, u):
    """The tangent part pairs to zero with every normal generator and the
    normal part with every tangent generator."""
    rng = np.random.default_rng(6)
    M = builtin_submanifold(name)
    fd = M.frame_data(u)
    v = lifted(
        M,
        u,
        horizontal=fd.ambient_components(rng.normal(size=fd.d)),
        vertical=random_skew(rng, fd.d),
    )
    t, n = decompose_OMN(v)
    for gen in normal_generators(M, u):
        assert abs(sasaki_mok_inner(t, gen)) < 1e-10
    for gen in tangent_generators(M, u):
        assert abs(sasaki_mok_inner(n, gen)) < 1e-10


@pytest.mark.parametrize("name,u", ALL_BUILTINS)
def test_generator_families_orthogonal(name, u):
    M = builtin_submanifold(name)
    tg = tangent_generators(M, u)
    ng = normal_generators(M, u)
    p, d = M.p, M.frame_data(u).d
    assert len(tg) + len(ng) == d + d * (d - 1) // 2
    for a in tg:
        for b in ng:
            assert abs(sasaki_mok_inner(a, b)) < 1e-10


def test_generator_counts():
    M = builtin_submanifold("clifford")
    u = np.array([0.4, -0.7])
    assert len(tangent_generators(M, u)) == 2 + 1  # p lifts + dim so(2), so(1) empty
    assert len(normal_generators(M, u)) == 1 + 2  # one normal lift + p*n verticals
