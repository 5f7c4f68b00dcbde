"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed
with output capture disabled so they show up in any mode.
"""
import time

import numpy as np
import pytest

from plurigreen.complex_core import Domain
from plurigreen.green import (
    PoleConfiguration,
    green_bidisc_maxform,
    green_bidisc_weighted,
    green_branches,
)
from plurigreen.harness import (
    PASS,
    convexity_check,
    counterexample_experiment,
    decomposition_check,
    pole_lelong_report,
)
from plurigreen.lempert import SolverConfig, explicit_disc, lempert_subset_min
from plurigreen.monge_ampere import (
    GridRegion,
    annulus_from_data,
    annulus_solution,
    control_field,
    log_abs_z1,
    ma_det,
    h_tilde,
    maximality_scan,
    section3_hessian_det,
    section3_u,
    slice_laplacian,
)

A, B, GAMMA = 0.5, -0.5, 0.3
STD = PoleConfiguration.axis([A, B])
Z0 = np.array([0, GAMMA], dtype=complex)


@pytest.fixture
def verdict(capsys):
    def emit(n, title, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {n} [{title}]: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def test_criterion_1_closed_forms(verdict):
    g11 = green_bidisc_weighted(STD, (1, 1), Z0)
    g10 = green_bidisc_weighted(STD, (1, 0), Z0)
    g21 = green_bidisc_weighted(STD, (2, 1), Z0)
    errs = [abs(g11 - np.log(GAMMA)), abs(g10 - np.log(A)), abs(g21 - np.log(0.15)),
            abs(g21 - (np.log(GAMMA) + np.log(A)))]
    verdict(1, "closed forms", max(errs) <= 1e-14, f"max error {max(errs):.3g}")


def test_criterion_2_form_equivalence(verdict):
    rng = np.random.default_rng(2024)
    worst, t0 = 0.0, time.perf_counter()
    for k in (2, 3, 4):
        a = 0.9 * np.sqrt(rng.uniform(size=k)) * np.exp(2j * np.pi * rng.uniform(size=k))
        nu = rng.uniform(0.2, 3.0, size=k)
        cfg = PoleConfiguration.axis(a)
        r = np.sqrt(rng.uniform(size=(1000, 2)))
        Z = r * np.exp(2j * np.pi * rng.uniform(size=(1000, 2)))
        d = np.abs(green_bidisc_weighted(cfg, nu, Z) - green_bidisc_maxform(cfg, nu, Z))
        worst = max(worst, float(d.max()))
    dt = time.perf_counter() - t0
    verdict(2, "form equivalence", worst < 1e-12 and dt < 1.0,
            f"max residual {worst:.3g}, {dt:.2f} s")


def test_criterion_3_explicit_disc(verdict):
    d = explicit_disc(A, B, GAMMA)
    want = [(0, GAMMA), (A, 0), (B, 0)]
    err = max(abs(f[0] - t[0]) + abs(f[1] - t[1])
              for f, t in zip((d(c) for c in (0.0, *d.nodes)), want))
    derr = abs(d.objective((1, 1)) - np.log(GAMMA))
    r = lempert_subset_min(Z0, STD, (1, 1))
    serr = abs(r.value - np.log(GAMMA))
    verdict(3, "explicit disc", err < 1e-12 and derr < 1e-14 and serr < 1e-4,
            f"interpolation {err:.3g}, d(f) error {derr:.3g}, solver error {serr:.3g}")


def test_criterion_4_counterexample(verdict):
    t0 = time.perf_counter()
    rep = counterexample_experiment(A, B, GAMMA)
    dt = time.perf_counter() - t0
    v = rep.checks["strict_gap"]["value"]
    verdict(4, "counterexample", rep.status("strict_gap") == PASS and rep.passed and dt < 60,
            f"delta_21 - g_21 = {v['gap']:.6g}, doubling shift {v['doubled_shift']:.3g}, "
            f"{dt:.1f} s")


def test_criterion_5_decomposition(verdict):
    d = decomposition_check(STD, (2, 1), (1, 1))
    c = [convexity_check(STD, (2, 1), (1, 0), s) for s in (0.25, 0.5, 0.75)]
    strict = decomposition_check(STD, (1, 1), (1, 0))
    res = max([d.checks["identity"]["value"]] + [r.checks["identity"]["value"] for r in c])
    ok = (d.passed and all(r.passed for r in c)
          and strict.status("strict_inequality") == PASS)
    n = strict.checks["strict_inequality"]["value"]["n_strict"]
    verdict(5, "decomposition", ok, f"identity residual {res:.3g}, {n} strict witnesses")


def test_criterion_6_lelong(verdict):
    reps = [pole_lelong_report(STD, nu) for nu in ((1, 1), (2, 1))]
    ok = all(r.passed for r in reps)
    worst = 0.0
    for r, nu in zip(reps, ((1, 1), (2, 1))):
        for j, w in enumerate(nu):
            est = r.checks[f"pole_{j}"]["value"]["estimates"]
            worst = max(worst, max(abs(e - w) / w for e in est))
    verdict(6, "Lelong numbers", ok, f"worst relative deviation {worst:.3g}")


def test_criterion_7_maximality(verdict):
    t0 = time.perf_counter()
    dom = Domain.bidisc()
    region = GridRegion((0, 0), (0.8,) * 4, 0.2,
                        exclusions=[((A, 0), 0.05), ((B, 0), 0.05)])
    out = {}
    for name, nu in (("g21", (2, 1)), ("g11", (1, 1)), ("g10", (1, 0))):
        out[name] = maximality_scan(lambda Z, nu=nu: green_bidisc_weighted(STD, nu, Z), region,
                                    branches=lambda Z, nu=nu: green_branches(STD, nu, Z),
                                    domain=dom)
    out["log|z1|"] = maximality_scan(log_abs_z1, region, domain=dom)
    control = maximality_scan(control_field, region, domain=dom)
    xi = np.linspace(np.exp(-1) + 0.02, 0.97, 10) * np.exp(1j * np.linspace(0, 6, 10))
    lap = max(float(np.max(np.abs(slice_laplacian(section3_u, z, xi))))
              for z in [(1, 0), (0.6, 0.8j)])
    dt = time.perf_counter() - t0
    ok = (all(r.passed for r in out.values()) and not control.passed
          and abs(control.control_det - 1) < 1e-6 and lap < 1e-4 and dt < 60)
    detail = ", ".join(f"{k} {r.max_abs_det:.2g}" for k, r in out.items())
    verdict(7, "maximality", ok,
            f"max|det|: {detail}; threshold {control.threshold:.2g}; slice Laplacian {lap:.2g}")


def test_criterion_8_annulus(verdict):
    def v(w):
        return (1.0 / (1.0 - 2.0 * np.asarray(w))).real

    th = np.exp(1j * np.linspace(0, 2 * np.pi, 64, endpoint=False))
    ok, worst = True, 0.0
    for t in (0.1, 0.2, 0.3):
        sol = annulus_from_data(v, t, 16)
        e_in = float(np.max(np.abs(annulus_solution(sol, t * th) - v(t * th))))
        e_out = float(np.max(np.abs(annulus_solution(sol, np.e * t * th))))
        ok &= e_in <= sol.tolerance and e_out <= sol.tolerance
        worst = max(worst, e_in, e_out)
    const = annulus_from_data(lambda w: np.full(np.shape(w), -1.0), 0.2)
    ec = max(float(np.max(np.abs(annulus_solution(const, 0.2 * th) + 1.0))),
             float(np.max(np.abs(annulus_solution(const, 0.2 * np.e * th)))))
    verdict(8, "annulus solution", ok and ec < 1e-12,
            f"worst boundary error {worst:.3g}, constant case {ec:.3g}")


def test_criterion_9_determinant_formula(verdict):
    h = 1e-3
    polys = [[0, 1], [0.3, -0.5j, 0.2], [0, 0.1, 0, 0.4 - 0.2j]]
    rng = np.random.default_rng(9)
    W = 0.6 * (rng.uniform(-1, 1, (20, 2)) + 1j * rng.uniform(-1, 1, (20, 2)))
    worst, top = 0.0, -np.inf
    for g in polys:
        for w in W:
            want = section3_hessian_det(g, w)
            got = ma_det(h_tilde(g), w, h)
            worst = max(worst, abs(got - want) / max(1.0, abs(want)))
            top = max(top, want)
    verdict(9, "determinant formula", worst <= 10 * h**2 and top <= 0.0,
            f"max scaled FD error {worst:.3g} (bound {10 * h**2:.0e}), max value {top:.3g}")
