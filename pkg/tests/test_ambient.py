import numpy as np
import pytest

from framelab.ambient import (
    AmbientError,
    AmbientSpace,
    ambient_from_name,
    christoffel_at,
    cov_deriv_ambient,
    curvature_apply,
    curvature_at,
    euclidean,
    metric_at,
    sphere_chart,
)
from framelab.jets import get_space, jexp, jsin, jstack


def test_euclidean_is_flat():
    N = euclidean(3)
    x = [0.3, -1.0, 2.0]
    assert np.array_equal(metric_at(N, x), np.eye(3))
    assert np.max(np.abs(christoffel_at(N, x))) == 0.0
    assert np.max(np.abs(curvature_at(N, x).components)) == 0.0


def test_sphere_chart_metric_values():
    S = sphere_chart(1.0, 3)
    assert np.allclose(metric_at(S, [0, 0, 0]), 4 * np.eye(3), atol=1e-14)
    # at |x| = 1 the conformal factor is 1
    assert np.allclose(metric_at(S, [1.0, 0, 0]), np.eye(3), atol=1e-14)
    assert np.max(np.abs(christoffel_at(S, [0, 0, 0]))) < 1e-14


def test_christoffel_symmetric_lower_indices():
    S = sphere_chart(1.7, 4)
    rng = np.random.default_rng(5)
    for _ in range(5):
        x = rng.uniform(-1, 1, 4)
        Gam = christoffel_at(S, x)
        assert np.max(np.abs(Gam - Gam.transpose(0, 2, 1))) < 1e-14


@pytest.mark.parametrize("radius", [1.0, 2.0, 0.5])
def test_sphere_sectional_curvature(radius):
    S = sphere_chart(radius, 3)
    rng = np.random.default_rng(42)
    for _ in range(100):
        x = rng.uniform(-1.2, 1.2, 3)
        G = metric_at(S, x)
        C = curvature_at(S, x)
        X = rng.standard_normal(3)
        Y = rng.standard_normal(3)
        num = C.apply(X, Y, Y) @ G @ X
        den = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
        assert abs(num / den - 1 / radius**2) < 1e-8


def test_space_form_identity():
    kappa = 1 / 2.0**2
    S = sphere_chart(2.0, 3)
    rng = np.random.default_rng(9)
    for _ in range(20):
        x = rng.uniform(-0.8, 0.8, 3)
        G = metric_at(S, x)
        X, Y, Z = rng.standard_normal((3, 3))
        lhs = curvature_apply(S, x, X, Y, Z)
        rhs = kappa * ((Y @ G @ Z) * X - (X @ G @ Z) * Y)
        assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_curvature_symmetries_and_bianchi():
    rng = np.random.default_rng(3)
    for N in (sphere_chart(1.0, 3), sphere_chart(2.0, 4), euclidean(3)):
        for _ in range(10):
            x = rng.uniform(-1, 1, N.dim)
            G = metric_at(N, x)
            R = curvature_at(N, x).components
            # lower the first index: R_{ijkl} = g_{im} R^m_{jkl}
            Rl = np.einsum("im,mjkl->ijkl", G, R)
            assert np.max(np.abs(Rl + Rl.transpose(0, 1, 3, 2))) < 1e-9  # antisym (X,Y)
            assert np.max(np.abs(Rl + Rl.transpose(1, 0, 2, 3))) < 1e-9  # antisym (Z,W)
            bianchi = R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2)
            assert np.max(np.abs(bianchi)) < 1e-9


def test_christoffel_against_fd_of_metric():
    rng = np.random.default_rng(17)
    for N in (sphere_chart(1.0, 3), sphere_chart(0.8, 2)):
        for _ in range(100):
            x = rng.uniform(-1, 1, N.dim)
            h = 1e-4
            d = N.dim
            dg = np.zeros((d, d, d))
            for a in range(d):
                e = np.zeros(d)
                e[a] = h
                dg[a] = (metric_at(N, x + e) - metric_at(N, x - e)) / (2 * h)
            Ginv = np.linalg.inv(metric_at(N, x))
            fd = 0.5 * (
                np.einsum("il,jlk->ijk", Ginv, dg)
                + np.einsum("il,klj->ijk", Ginv, dg)
                - np.einsum("il,ljk->ijk", Ginv, dg)
            )
            assert np.max(np.abs(christoffel_at(N, x) - fd)) < 1e-6


def test_cov_deriv_constant_field_euclidean():
    N = euclidean(3)
    out = cov_deriv_ambient(N, ["1", "2", "3"], [0.5, -0.5, 0.25], [1.0, 2.0, 0.0])
    assert np.max(np.abs(out)) == 0.0


def test_cov_deriv_leibniz():
    S = sphere_chart(1.0, 3)
    rng = np.random.default_rng(8)

    def Y(v):
        return jstack([jsin(v[0]) + v[1], jexp(0.3 * v[2]), v[0] * v[1]], axis=-1)

    def f(v):
        return jsin(v[1] * v[2]) + 2

    def fY(v):
        ff, Yv = f(v), Y(v)
        return jstack([Yv[i] * ff for i in range(3)], axis=-1)

    for _ in range(10):
        x = rng.uniform(-0.7, 0.7, 3)
        X = rng.standard_normal(3)
        sp = get_space(3, 1)
        vj = sp.variables(x)
        f0 = f(vj)
        Xf = sum(X[a] * f0.d(a).val for a in range(3))
        lhs = cov_deriv_ambient(S, fY, x, X)
        rhs = Xf * Y(vj).val + f0.val * cov_deriv_ambient(S, Y, x, X)
        assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_cov_deriv_metric_compatibility():
    S = sphere_chart(1.0, 3)
    rng = np.random.default_rng(21)

    def Y(v):
        return jstack([jsin(v[0]) + v[1], jexp(0.3 * v[2]), v[0] * v[1]], axis=-1)

    def Z(v):
        return jstack([v[2] * v[0], 1 + v[1], jsin(v[0])], axis=-1)

    from framelab.jets import jet_einsum

    for _ in range(10):
        x = rng.uniform(-0.7, 0.7, 3)
        X = rng.standard_normal(3)
        sp = get_space(3, 1)
        vj = sp.variables(x)
        Gj = S.metric_jets(x, 1)
        inner = jet_einsum("i,i->", Y(vj), jet_einsum("ij,j->i", Gj, Z(vj)))
        lhs = sum(X[a] * inner.d(a).val for a in range(3))
        G0 = metric_at(S, x)
        rhs = cov_deriv_ambient(S, Y, x, X) @ G0 @ Z(vj).val
        rhs += Y(vj).val @ G0 @ cov_deriv_ambient(S, Z, x, X)
        assert abs(lhs - rhs) < 1e-8


def test_non_positive_definite_rejected():
    bad = AmbientSpace.from_strings(2, [["x1", "0"], ["0", "1"]])
    with pytest.raises(AmbientError, match="positive definite"):
        metric_at(bad, [-1.0, 0.0])


def test_asymmetric_grid_rejected():
    with pytest.raises(AmbientError, match="differ"):
        AmbientSpace.from_strings(2, [["1", "x1"], ["x2", "1"]])


def test_dimension_bounds():
    with pytest.raises(AmbientError):
        euclidean(1)
    with pytest.raises(AmbientError):
        euclidean(10)


def test_catalog_names():
    assert ambient_from_name("euclidean", 3).tag == "euclidean"
    S = ambient_from_name("sphere(2.5)", 3)
    assert S.tag == "sphere(2.5)"
    assert np.allclose(metric_at(S, [0, 0, 0]), (2 * 2.5**2 / 2.5**2) ** 2 * np.eye(3))
    with pytest.raises(AmbientError):
        ambient_from_name("hyperbolic", 3)
    with pytest.raises(AmbientError):
        ambient_from_name("sphere(abc)", 3)
