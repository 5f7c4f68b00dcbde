import json

import numpy as np
import pytest

from plurigreen.errors import GeometryError, InvalidParameterError
from plurigreen.green import PoleConfiguration, green_bidisc_weighted
from plurigreen.harness import (
    FAIL,
    PASS,
    SKIP,
    VerificationReport,
    bidisc_sample,
    comonotone,
    convexity_check,
    counterexample_experiment,
    decomposition_check,
    dirichlet_checklist,
    jsonable,
    pole_lelong_report,
)
from plurigreen.lempert import SolverConfig

CFG = PoleConfiguration.axis([0.5, -0.5])
G21 = lambda Z: green_bidisc_weighted(CFG, (2, 1), Z)  # noqa: E731


@pytest.fixture(scope="module")
def dirichlet_g21():
    return dirichlet_checklist(G21, CFG, (2, 1))


def test_dirichlet_accepts_green(dirichlet_g21):
    rep = dirichlet_g21
    assert rep.passed, rep.to_dict()["checks"]
    w = rep.checks["pole_asymptotics"]["value"]["measured_weights"]
    assert w == pytest.approx([2, 1], rel=0.02)


def test_dirichlet_rejects_shifted_candidate():
    g = lambda Z: green_bidisc_weighted(CFG, (1, 0), Z) + 0.1  # noqa: E731
    rep = dirichlet_checklist(g, CFG, (1, 0))
    assert rep.status("boundary_decay") == FAIL
    assert rep.checks["boundary_decay"]["witnesses"]


def test_dirichlet_rejects_wrong_weights():
    g = lambda Z: 0.5 * G21(Z)  # noqa: E731
    rep = dirichlet_checklist(g, CFG, (2, 1))
    assert rep.status("pole_asymptotics") == FAIL
    w = rep.checks["pole_asymptotics"]["value"]["measured_weights"]
    assert w == pytest.approx([1, 0.5], rel=0.02)
    assert rep.status("maximality") == PASS


def test_comonotone():
    assert comonotone([2, 1], [1, 0])
    assert comonotone([1, 1], [3, 0])
    assert not comonotone([1, 0], [0, 1])


def test_decomposition_identity_and_strict_case():
    rep = decomposition_check(CFG, (2, 1), (1, 1))
    assert rep.status("identity") == PASS
    assert rep.checks["identity"]["value"] < 1e-12
    rep = decomposition_check(CFG, (2, 1), (1, 0.5))
    assert rep.status("identity") == PASS
    rep = decomposition_check(CFG, (1, 1), (1, 0))
    assert rep.status("identity") == SKIP
    assert rep.status("strict_inequality") == PASS
    assert rep.checks["strict_inequality"]["value"]["n_strict"] > 0
    with pytest.raises(InvalidParameterError):
        decomposition_check(CFG, (1, 1), (2, 0))


@pytest.mark.parametrize("s", [0.0, 0.3, 0.5, 1.0])
def test_convexity(s):
    rep = convexity_check(CFG, (2, 1), (1, 0), s)
    assert rep.status("identity") == PASS
    rep = convexity_check(CFG, (1, 0), (0, 1), s)
    assert rep.status("identity") == SKIP


def test_convexity_errors():
    with pytest.raises(InvalidParameterError):
        convexity_check(CFG, (1, 1), (1, 0), 1.5)


def test_bidisc_sample_includes_axis():
    Z = bidisc_sample()
    assert np.all(np.abs(Z) < 1)
    assert np.any(Z[:, 1] == 0)
    assert len(np.unique(Z[:, 0])) == 1 + 5 * 8


@pytest.mark.parametrize("nu", [(1, 1), (2, 1)])
def test_pole_lelong_report(nu):
    rep = pole_lelong_report(CFG, nu)
    assert rep.passed
    for j, w in enumerate(nu):
        est = rep.checks[f"pole_{j}"]["value"]["estimates"]
        assert np.allclose(est, w, rtol=0.05)


def test_report_json_is_deterministic():
    a = decomposition_check(CFG, (2, 1), (1, 1)).to_json()
    b = decomposition_check(CFG, (2, 1), (1, 1)).to_json()
    assert a == b
    d = json.loads(a)
    assert d["checks"]["identity"]["status"] == PASS


def test_report_basics():
    rep = VerificationReport("x")
    rep.add("a", PASS, 1.0, 0.5)
    rep.add("b", SKIP, None, None)
    assert rep.passed and rep.status("b") == SKIP
    rep.add("c", FAIL, np.inf, 1e-12, [np.array([0.5 + 1j, 0])])
    assert not rep.passed
    d = json.loads(rep.to_json())
    assert d["checks"]["c"]["value"] == "inf"
    with pytest.raises(InvalidParameterError):
        rep.add("d", "maybe", 0, 0)


def test_jsonable():
    assert jsonable(np.float64(1.5)) == 1.5
    assert jsonable(-np.inf) == "-inf"
    assert jsonable(1 + 2j) == [1.0, 2.0]
    assert jsonable({(0, 1): np.arange(2)}) == {"0,1": [0, 1]}


def test_counterexample_geometry_error():
    with pytest.raises(GeometryError):
        counterexample_experiment(0.5, -0.5, 0.1)


@pytest.fixture(scope="module")
def quick_counterexample():
    return counterexample_experiment(sc=SolverConfig(n_radii=32, n_angles=32))


def test_counterexample_quick(quick_counterexample):
    rep = quick_counterexample
    assert rep.passed, {k: v["status"] for k, v in rep.checks.items()}
    gap = rep.checks["strict_gap"]["value"]["gap"]
    assert gap > 1e-2
    ext = rep.data["extremal_discs"]
    # equality cases use different subsets
    assert ext["delta_10"]["subset"] == [0]
    assert ext["delta_11"]["subset"] == [0, 1]
    json.loads(rep.to_json())
