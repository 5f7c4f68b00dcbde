import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurigreen.complex_core import Domain
from plurigreen.errors import DomainError, GeometryError, InvalidParameterError
from plurigreen.green import (
    ComanBallParams,
    PoleConfiguration,
    coman_E,
    coman_S_membership,
    green_ball_single,
    green_bidisc_equal,
    green_bidisc_maxform,
    green_bidisc_weighted,
    green_branches,
    green_polydisc_axis,
)

A, B, GAMMA = 0.5, -0.5, 0.3
STD = PoleConfiguration.axis([A, B])
Z0 = np.array([0, GAMMA], dtype=complex)


def random_bidisc(n, rng, level=0.999):
    r = level * np.sqrt(rng.uniform(size=(n, 2)))
    return r * np.exp(2j * np.pi * rng.uniform(size=(n, 2)))


def naive_green(a, nu, z):
    """Telescoping formula written out directly from T_i and log|z2|."""
    order = sorted(range(len(nu)), key=lambda i: -nu[i])
    a = [a[i] for i in order]
    nu = [nu[i] for i in order]
    T = [np.log(abs((z[0] - ai) / (1 - np.conj(ai) * z[0]))) for ai in a]
    v = np.log(abs(z[1]))
    h = [max(sum(T[: j + 1]), v) for j in range(len(a))]
    k = len(a)
    return nu[-1] * h[-1] + sum((nu[j] - nu[j + 1]) * h[j] for j in range(k - 1))


def test_standard_values():
    assert green_bidisc_equal(STD, Z0) == pytest.approx(np.log(GAMMA), abs=1e-15)
    assert green_bidisc_weighted(STD, (2, 1), Z0) == pytest.approx(np.log(0.15), abs=1e-14)
    assert green_bidisc_maxform(STD, (2, 1), Z0) == pytest.approx(np.log(0.15), abs=1e-14)
    assert green_bidisc_weighted(STD, (1, 0), Z0) == pytest.approx(np.log(0.5), abs=1e-15)


def test_pole_is_minus_inf():
    for nu in [(1, 1), (2, 1), (1, 3)]:
        assert green_bidisc_weighted(STD, nu, (A, 0)) == -np.inf
        assert green_bidisc_maxform(STD, nu, (B, 0)) == -np.inf
    assert green_bidisc_equal(STD, (A, 0)) == -np.inf


def test_single_pole_equal_matches_weighted():
    cfg = PoleConfiguration.axis([0.3 - 0.2j])
    rng = np.random.default_rng(3)
    Z = random_bidisc(200, rng)
    T = np.log(np.abs((Z[:, 0] - (0.3 - 0.2j)) / (1 - (0.3 + 0.2j) * Z[:, 0])))
    want = np.maximum(T, np.log(np.abs(Z[:, 1])))
    assert np.max(np.abs(green_bidisc_equal(cfg, Z) - want)) < 1e-14
    assert np.max(np.abs(green_bidisc_weighted(cfg, [1.0], Z) - want)) < 1e-14


def test_matches_naive_formula():
    rng = np.random.default_rng(11)
    a = [0.5, -0.3 + 0.4j, 0.1j]
    cfg = PoleConfiguration.axis(a)
    nu = [1.5, 3.0, 0.5]
    for z in random_bidisc(50, rng):
        assert green_bidisc_weighted(cfg, nu, z) == pytest.approx(naive_green(a, nu, z), abs=1e-13)


def test_equal_weights_reduce_to_equal_form():
    rng = np.random.default_rng(0)
    Z = random_bidisc(300, rng)
    g1 = green_bidisc_equal(STD, Z)
    assert np.max(np.abs(green_bidisc_weighted(STD, (1, 1), Z) - g1)) < 1e-14
    assert np.max(np.abs(green_bidisc_maxform(STD, (1, 1), Z) - g1)) < 1e-14
    assert np.max(np.abs(green_bidisc_weighted(STD, (3, 3), Z) - 3 * g1)) < 1e-13


def test_distinguished_boundary_log_z2_dominates():
    z = np.array([0.05, 0.999 * np.exp(0.7j)])
    v = np.log(abs(z[1]))
    assert green_bidisc_weighted(STD, (1, 0.5), z) == pytest.approx(v, abs=1e-15)
    assert green_bidisc_maxform(STD, (1, 0.5), z) == pytest.approx(v, abs=1e-15)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_form_equivalence(k):
    rng = np.random.default_rng(100 + k)
    a = 0.9 * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))
    cfg = PoleConfiguration.axis(a)
    Z = random_bidisc(1000, rng)
    for _ in range(5):
        nu = rng.uniform(0.1, 3.0, size=k)
        d = green_bidisc_weighted(cfg, nu, Z) - green_bidisc_maxform(cfg, nu, Z)
        assert np.max(np.abs(d)) < 1e-12


weights = st.lists(st.floats(0.05, 5.0), min_size=3, max_size=3)
points = st.tuples(st.floats(0, 0.99), st.floats(0, 2 * np.pi), st.floats(0, 0.99),
                   st.floats(0, 2 * np.pi)).map(
    lambda t: np.array([t[0] * np.exp(1j * t[1]), t[2] * np.exp(1j * t[3])]))
CFG3 = PoleConfiguration.axis([0.5, -0.3 + 0.4j, -0.6j])


@settings(max_examples=200, deadline=None)
@given(weights, points, st.floats(0.01, 50))
def test_homogeneity(nu, z, c):
    g = green_bidisc_weighted(CFG3, nu, z)
    gc = green_bidisc_weighted(CFG3, c * np.asarray(nu), z)
    assert gc == pytest.approx(c * g, rel=1e-13, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(weights, st.lists(st.floats(0, 2.0), min_size=3, max_size=3), points)
def test_weight_monotonicity(nu, extra, z):
    big = np.asarray(nu) + np.asarray(extra)
    assert green_bidisc_weighted(CFG3, big, z) <= green_bidisc_weighted(CFG3, nu, z) + 1e-13


@settings(max_examples=200, deadline=None)
@given(weights, points)
def test_forms_agree_property(nu, z):
    assert green_bidisc_maxform(CFG3, nu, z) == pytest.approx(
        green_bidisc_weighted(CFG3, nu, z), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(weights, weights, points)
def test_decomposition_same_order(lam_raw, mu_raw, z):
    # sort both the same way so lam and mu are comonotone
    lam = np.sort(lam_raw)[::-1]
    mu = np.sort(mu_raw)[::-1]
    lhs = green_bidisc_weighted(CFG3, lam + mu, z)
    rhs = green_bidisc_weighted(CFG3, lam, z) + green_bidisc_weighted(CFG3, mu, z)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_nonpositive_and_boundary_decay():
    rng = np.random.default_rng(5)
    Z = random_bidisc(2000, rng)
    assert np.all(green_bidisc_weighted(STD, (2, 1), Z) <= 0)
    th = 2 * np.pi * rng.uniform(size=200)
    inner = 0.999 * np.sqrt(rng.uniform(size=200)) * np.exp(2j * np.pi * rng.uniform(size=200))
    for Zb in (np.column_stack([0.999 * np.exp(1j * th), inner]),
               np.column_stack([inner, 0.999 * np.exp(1j * th)])):
        assert np.max(np.abs(green_bidisc_weighted(STD, (2, 1), Zb))) < 0.05


def test_pole_asymptotics_bounded():
    dirs = np.exp(1j * np.linspace(0, 2 * np.pi, 9))[:, None] * np.array([0.6, 0.8j])
    for nu in [(2, 1), (1, 1)]:
        for j, w in enumerate(STD.locations):
            diffs = []
            for rho in (1e-3, 1e-5, 1e-7):
                g = green_bidisc_weighted(STD, nu, w + rho * dirs)
                diffs.append(g - nu[j] * np.log(rho))
            assert np.max(np.abs(diffs[-1] - diffs[-2])) < 1e-4
            assert np.all(np.isfinite(diffs[-1]))


def test_polydisc_axis():
    cfg3 = PoleConfiguration.axis([0.5, -0.5], domain=Domain.polydisc(3))
    z = np.array([0.1, 0.4j, 0.0])
    assert green_polydisc_axis(cfg3, (2, 1), z) == pytest.approx(
        green_bidisc_weighted(STD, (2, 1), z[:2]), abs=1e-15)
    z = np.array([0.1, 0.2, -0.7])
    g = green_polydisc_axis(cfg3, (1, 1), z)
    T = np.log(abs((0.1 - 0.5) / (1 - 0.05))) + np.log(abs((0.1 + 0.5) / (1 + 0.05)))
    assert g == pytest.approx(max(T, np.log(0.7)), abs=1e-15)
    assert green_polydisc_axis(cfg3, (1, 1), (0.5, 0, 0)) == -np.inf
    cfg2 = PoleConfiguration.axis([0.5, -0.5], domain=Domain.polydisc(2))
    rng = np.random.default_rng(2)
    Z = random_bidisc(100, rng)
    assert np.array_equal(green_polydisc_axis(cfg2, (2, 1), Z),
                          green_bidisc_weighted(STD, (2, 1), Z))


def test_branches_shape():
    Z = random_bidisc(7, np.random.default_rng(1))
    assert green_branches(STD, (2, 1), Z).shape == (7, 2, 2)
    assert green_branches(STD, (1, 1), Z).shape == (7, 1, 2)


def test_errors():
    with pytest.raises(InvalidParameterError):
        PoleConfiguration.axis([0.5, -0.5], [1.0, 0.0])
    with pytest.raises(InvalidParameterError):
        green_bidisc_weighted(STD, (1, -1), Z0)
    with pytest.raises(GeometryError):
        PoleConfiguration.axis([0.5, 0.5])
    with pytest.raises(DomainError):
        PoleConfiguration.axis([1.0])
    with pytest.raises(DomainError):
        green_bidisc_weighted(STD, (1, 1), (0.2, 1.0))
    off = PoleConfiguration(Domain.bidisc(), [[0.1, 0.2]])
    with pytest.raises(GeometryError):
        green_bidisc_weighted(off, None, Z0)
    with pytest.raises(InvalidParameterError):
        green_bidisc_equal(PoleConfiguration.axis([0.5], [2.0]), Z0)


def test_ball_single_pole_against_formula():
    w = np.array([0.3, -0.2j])
    cfg = PoleConfiguration(Domain.unit_ball(2), [w])
    rng = np.random.default_rng(8)
    X = rng.normal(size=(300, 4))
    X = X / np.linalg.norm(X, axis=1, keepdims=True) * rng.uniform(0, 0.99, size=(300, 1))
    Z = X[:, :2] + 1j * X[:, 2:]
    inner = Z @ np.conj(w)
    # 1 - |phi_w(z)|^2 = (1-|w|^2)(1-|z|^2) / |1 - <z,w>|^2
    s = (1 - np.vdot(w, w).real) * (1 - np.sum(np.abs(Z) ** 2, axis=1)) / np.abs(1 - inner) ** 2
    want = 0.5 * np.log(1 - s)
    assert np.max(np.abs(green_ball_single(cfg, Z) - want)) < 1e-12
    assert green_ball_single(cfg, w) == -np.inf
    centred = PoleConfiguration(Domain.unit_ball(2), [[0, 0]], [2.0])
    assert green_ball_single(centred, (0.3, 0.4)) == pytest.approx(2 * np.log(0.5), abs=1e-15)


def coman_oracle(s, t, c, d):
    # expanded in real arithmetic, t = x + iy, c and d real
    x, y = t.real, t.imag
    m1 = (1 - s * x) ** 2 + (s * y) ** 2
    m2 = (s * x + d) ** 2 + (s * y) ** 2
    return (s * s - c) * (x * x + y * y - c) * m1 - (1 - s * s) * (1 - x * x - y * y) * m2


@settings(max_examples=300, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0, 0.99), st.floats(0, 2 * np.pi),
       st.floats(-1, 1), st.floats(-2, 2))
def test_coman_E_matches_expansion(s, r, th, c, d):
    t = r * np.exp(1j * th)
    p = ComanBallParams(c, d)
    assert coman_E(s, t, p) == pytest.approx(coman_oracle(s, t, c, d), abs=1e-12)


def test_coman_special_cases():
    p = ComanBallParams(c=0.25, d=0.1)
    t = 0.3 + 0.4j
    v = coman_E(0.5, t, p)  # s^2 = c
    assert v == pytest.approx(-(0.75) * (1 - 0.25) * abs(0.5 * t + 0.1) ** 2, abs=1e-15)
    assert v <= 0
    assert coman_E(0.7, 0.5, p) <= 0  # |t|^2 = c
    assert not coman_S_membership(0.6, 0.6, p)
    assert not coman_S_membership(0.4, 0.9, p)
    s, t = 0.9, -0.95
    assert coman_E(s, t, p) > 0
    assert coman_S_membership(s, t, p)
    with pytest.raises(InvalidParameterError):
        coman_E(1.0, 0.1, p)
    with pytest.raises(InvalidParameterError):
        coman_E(0.5, 1.0, p)
