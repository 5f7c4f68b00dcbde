"""Verification reports: Dirichlet checklist, decomposition and convexity
identities, pole Lelong numbers and the bidisc counterexample experiment."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .complex_core import as_point
from .errors import InvalidParameterError
from .green import PoleConfiguration, green_bidisc_weighted, green_branches, weight_vector
from .lelong import (
    RadialScan,
    evaluate_scan,
    log_bound_check,
    monotone_ok,
    recenter,
    slice_scale,
)
from .lempert import (
    SolverConfig,
    check_counterexample_geometry,
    explicit_disc,
    lempert_bidisc_axis,
    lempert_subset_min,
    two_pole_lower_bound,
)
from .monge_ampere import DEFAULT_C, DEFAULT_H, GridRegion, maximality_scan

PASS, FAIL, SKIP = "pass", "fail", "skip"


def jsonable(x):
    """Recursively convert numpy/complex/non-finite values for ``json``."""
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonable(v)
                for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [jsonable(float(x.real)), jsonable(float(x.imag))]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x


@dataclass
class VerificationReport:
    """Named checks ``name -> {status, value, tolerance, witnesses}``."""

    title: str
    checks: dict = field(default_factory=dict)
    configs: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)

    def add(self, name: str, status: str, value, tolerance, witnesses=None, **details):
        if status not in (PASS, FAIL, SKIP):
            raise InvalidParameterError(f"bad status {status!r}")
        entry = {"status": status, "value": value, "tolerance": tolerance,
                 "witnesses": list(witnesses or [])}
        entry.update(details)
        self.checks[name] = entry
        return entry

    def status(self, name: str) -> str:
        return self.checks[name]["status"]

    @property
    def passed(self) -> bool:
        return all(c["status"] != FAIL for c in self.checks.values())

    def to_dict(self) -> dict:
        return jsonable({"title": self.title, "passed": self.passed, "checks": self.checks,
                         "configs": self.configs, "data": self.data})

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)


def _pt(z):
    z = np.asarray(z, dtype=complex)
    return [[float(c.real), float(c.imag)] for c in z]


def _sphere_directions(count: int = 64, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(count, 4))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    return X[:, 0::2] + 1j * X[:, 1::2]


def _boundary_points(n: int = 2, samples: int = 24, level: float = 0.999) -> np.ndarray:
    """Points with ``max_i |z_i| = level`` (each coordinate in turn)."""
    th = 2 * np.pi * np.arange(samples) / samples
    radii = level * np.linspace(0.0, 1.0, 7)
    inner = (radii[:, None] * np.exp(1j * (th[None, :] + 0.3))).ravel()
    outer = level * np.exp(1j * th)
    rows = []
    for i in range(n):
        for o in outer:
            for w in inner:
                p = np.full(n, w, dtype=complex)
                p[i] = o
                rows.append(p)
    return np.array(rows)


def default_region(cfg: PoleConfiguration, step: float = 0.15, half_width: float = 0.9,
                   exclusion: float = 0.05) -> GridRegion:
    return GridRegion(np.zeros(2), (half_width,) * 4, step,
                      exclusions=[(w, exclusion) for w in cfg.locations])


# ------------------------------------------------------------ Dirichlet

def dirichlet_checklist(candidate, cfg: PoleConfiguration, nu=None, region: GridRegion | None = None,
                        h: float = DEFAULT_H, branches=None, C: float = DEFAULT_C,
                        scales=(1e-2, 5e-3), pole_radii=(1e-3, 1e-4, 1e-5, 1e-6),
                        weight_tol: float = 0.02, boundary_tol: float = 0.05) -> VerificationReport:
    """Grid checks of the four conditions characterising ``g_nu``.

    1. continuity proxy: finite values and max oscillation over the
       3-point stencils shrinking with the stencil size;
    2. maximality scan off poles and branch crossings (crossings located
       with ``branches``, by default those of ``g_nu`` itself);
    3. pole asymptotics: measured weight ``d max_sphere u / d log rho``
       close to ``nu_j`` and ``u - nu_j log rho`` settling on small spheres;
    4. boundary decay: ``|u| < boundary_tol`` where ``max|z_i| = 0.999``.
    """
    nu = weight_vector(cfg, nu)
    region = region or default_region(cfg)
    if branches is None and cfg.domain.kind == "bidisc" and cfg.is_axis():
        branches = lambda Z: green_branches(cfg, nu, Z)  # noqa: E731
    rep = VerificationReport("dirichlet_checklist")
    rep.configs = {"weights": nu, "poles": cfg.locations, "h": h, "C": C,
                   "region": {"center": region.center, "half_widths": region.half_widths,
                              "step": region.step},
                   "scales": list(scales), "pole_radii": list(pole_radii)}

    # 1. continuity proxy
    Z = region.points(cfg.domain, margin=2 * max(scales))
    E = np.array([[1, 0], [1j, 0], [0, 1], [0, 1j]], dtype=complex)
    osc = []
    worst = None
    for s in scales:
        c = np.asarray(candidate(Z), dtype=float)
        o = np.zeros(Z.shape[0])
        for e in E:
            for sg in (1, -1):
                o = np.maximum(o, np.abs(np.asarray(candidate(Z + sg * s * e), dtype=float) - c))
        osc.append(float(np.nanmax(np.where(np.isfinite(o), o, np.inf))))
        if worst is None:
            worst = Z[int(np.argmax(np.where(np.isfinite(o), o, np.inf)))]
    ratio = osc[1] / osc[0] if osc[0] > 0 else 0.0
    target = 1.5 * scales[1] / scales[0]
    ok = all(np.isfinite(osc)) and ratio <= target
    rep.add("continuity", PASS if ok else FAIL, {"oscillation": osc, "ratio": ratio},
            {"max_ratio": target}, [] if ok else [_pt(worst)],
            note="oscillation on 3-point stencils at two scales; proxy only")

    # 2. maximality
    mr = maximality_scan(candidate, region, h, branches=branches, C=C, domain=cfg.domain)
    rep.add("maximality", PASS if mr.passed else FAIL, mr.max_abs_det, mr.threshold,
            [v["point"] for v in mr.violations], report=mr.to_dict())

    # 3. pole asymptotics
    dirs = _sphere_directions()
    measured, drift, wit = [], [], []
    radii = np.asarray(pole_radii, dtype=float)
    for j, w in enumerate(cfg.locations):
        M = []
        D = []
        for rho in radii:
            vals = np.asarray(candidate(w + rho * dirs), dtype=float)
            M.append(vals.max())
            D.append(vals - nu[j] * math.log(rho))
        slope = (M[-2] - M[-1]) / (math.log(radii[-2]) - math.log(radii[-1]))
        measured.append(float(slope))
        d = float(np.max(np.abs(D[-1] - D[-2])))
        drift.append(d)
        if abs(slope - nu[j]) > weight_tol * max(nu[j], 1.0) or not d < 1e-2:
            wit.append(_pt(w))
    rep.add("pole_asymptotics", PASS if not wit else FAIL,
            {"measured_weights": measured, "drift": drift},
            {"weight_rel": weight_tol, "drift": 1e-2}, wit, expected_weights=nu)

    # 4. boundary decay
    B = _boundary_points(cfg.domain.n)
    bv = np.abs(np.asarray(candidate(B), dtype=float))
    i = int(np.argmax(bv))
    ok = bool(bv[i] < boundary_tol)
    rep.add("boundary_decay", PASS if ok else FAIL, float(bv[i]), boundary_tol,
            [] if ok else [_pt(B[i])])
    return rep


# ------------------------------------------------------------ identities

def comonotone(x, y) -> bool:
    """True when some common ordering sorts both vectors non-increasingly."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    return bool(np.all(dx * dy >= 0))


def bidisc_sample(n_r: int = 6, n_t: int = 8, level: float = 0.95) -> np.ndarray:
    """Product polar grid in the bidisc (includes the axis ``z2 = 0``)."""
    r = level * np.arange(n_r) / (n_r - 1)
    t = 2 * np.pi * np.arange(n_t) / n_t
    ring = np.unique(np.round((r[:, None] * np.exp(1j * t[None, :])).ravel(), 15))
    A, B = np.meshgrid(ring, ring, indexing="ij")
    return np.column_stack([A.ravel(), B.ravel()])


def _finite_diff(a, b):
    both_inf = np.isinf(a) & np.isinf(b) & (np.sign(a) == np.sign(b))
    with np.errstate(invalid="ignore"):
        d = a - b
    return np.where(both_inf, 0.0, d)


def decomposition_check(cfg: PoleConfiguration, nu, lam, grid=None,
                        tol: float = 1e-12) -> VerificationReport:
    """``g_nu`` versus ``g_lam + g_{nu-lam}`` on a grid.

    For comonotone ``lam`` and ``nu - lam`` the identity must hold to
    ``tol``. Otherwise the check records where ``g_nu`` is strictly larger
    (the sum is always a competitor, so it never exceeds ``g_nu``).
    """
    nu = weight_vector(cfg, nu)
    lam = weight_vector(cfg, lam)
    if np.any(lam > nu):
        raise InvalidParameterError("need lam <= nu componentwise")
    mu = nu - lam
    Z = bidisc_sample() if grid is None else np.atleast_2d(np.asarray(grid, dtype=complex))
    g = green_bidisc_weighted(cfg, nu, Z)
    s = green_bidisc_weighted(cfg, lam, Z) + green_bidisc_weighted(cfg, mu, Z)
    d = _finite_diff(g, s)
    rep = VerificationReport("decomposition_check")
    rep.configs = {"nu": nu, "lam": lam, "rest": mu, "n_points": Z.shape[0]}
    same = comonotone(lam, mu)
    res = float(np.nanmax(np.abs(d)))
    i = int(np.nanargmax(np.abs(d)))
    if same:
        ok = res < tol
        rep.add("identity", PASS if ok else FAIL, res, tol, [] if ok else [_pt(Z[i])])
    else:
        rep.add("identity", SKIP, res, tol, note="weights not comonotone")
        strict = d > 1e-9
        lower = float(np.nanmin(d))
        ok = bool(strict.any()) and lower > -tol
        rep.add("strict_inequality", PASS if ok else FAIL,
                {"max_gap": float(np.nanmax(d)), "min_gap": lower,
                 "n_strict": int(strict.sum())},
                {"strict": 1e-9, "sum_above": tol},
                [_pt(Z[i])] if strict.any() else [])
    return rep


def convexity_check(cfg: PoleConfiguration, mu, lam, s: float, grid=None,
                    tol: float = 1e-12) -> VerificationReport:
    """``s g_mu + (1-s) g_lam = g_{s mu + (1-s) lam}`` for comonotone weights."""
    if not 0.0 <= s <= 1.0:
        raise InvalidParameterError("s must lie in [0, 1]")
    mu = weight_vector(cfg, mu)
    lam = weight_vector(cfg, lam)
    Z = bidisc_sample() if grid is None else np.atleast_2d(np.asarray(grid, dtype=complex))
    lhs = s * green_bidisc_weighted(cfg, mu, Z) + (1 - s) * green_bidisc_weighted(cfg, lam, Z)
    rhs = green_bidisc_weighted(cfg, s * mu + (1 - s) * lam, Z)
    d = np.abs(_finite_diff(lhs, rhs))
    rep = VerificationReport("convexity_check")
    rep.configs = {"mu": mu, "lam": lam, "s": s, "n_points": Z.shape[0]}
    if not comonotone(mu, lam):
        rep.add("identity", SKIP, float(np.nanmax(d)), tol, note="weights not comonotone")
        return rep
    res = float(np.nanmax(d))
    ok = res < tol
    rep.add("identity", PASS if ok else FAIL, res, tol,
            [] if ok else [_pt(Z[int(np.nanargmax(d))])])
    return rep


# ------------------------------------------------------------ Lelong

def pole_lelong_report(cfg: PoleConfiguration, nu=None, directions=None, r_min: float = 1e-12,
                       count: int = 25, samples: int = 256, rel_tol: float = 0.05) -> VerificationReport:
    """Lelong numbers of ``g_nu`` at each pole from radial scans.

    Each direction is rescaled so that the whole slice disc lies in the
    domain (then ``Psi`` is monotone); scans run from radius 0.999 down
    to ``r_min``.
    """
    nu = weight_vector(cfg, nu)
    if directions is None:
        directions = [(1, 1), (0.6, 0.8j), (1, 0), (0, 1), (0.3 + 0.4j, -0.2)]
    dom = cfg.domain
    g = lambda Z: green_bidisc_weighted(cfg, nu, Z)  # noqa: E731
    rep = VerificationReport("pole_lelong")
    rep.configs = {"weights": nu, "r_min": r_min, "count": count, "samples": samples}
    for j, w in enumerate(cfg.locations):
        if nu[j] == 0:
            continue
        u = recenter(g, w)
        est, mono, bound, wit = [], [], [], []
        for d in directions:
            z = as_point(d, dom.n)
            z = z * slice_scale(dom, w, z)
            scan = evaluate_scan(u, RadialScan.geometric(z, 0.999, count, r_min, samples))
            a = float(scan.values[-1])
            ok_m = monotone_ok(scan)
            ok_b = log_bound_check(u, z, nu[j])
            est.append(a)
            mono.append(ok_m)
            bound.append(ok_b)
            if abs(a - nu[j]) > rel_tol * nu[j] or not ok_m or not ok_b:
                wit.append(_pt(z))
        rep.add(f"pole_{j}", PASS if not wit else FAIL,
                {"estimates": est, "monotone": mono, "log_bound": bound},
                {"rel": rel_tol}, wit, weight=nu[j], pole=_pt(w))
    return rep


# ------------------------------------------------------------ counterexample

def _result_summary(res) -> dict:
    d = res.to_dict()
    d.pop("subset_values", None)
    return d


def counterexample_experiment(a=0.5, b=-0.5, gamma=0.3, sc: SolverConfig | None = None,
                              lower_bound_width: float = 1e-7) -> VerificationReport:
    """Numerical gap between the Lempert and Green functions on the bidisc.

    Poles ``(a, 0)`` (weight ``p``) and ``(b, 0)`` (weight ``q``), point
    ``z = (0, gamma)``. Raises :class:`GeometryError` unless
    ``|ab| < |gamma| < min(|a|, |b|)``.
    """
    a, b, gamma = check_counterexample_geometry(a, b, gamma)
    sc = sc or SolverConfig()
    cfg = PoleConfiguration.axis([a, b])
    z = np.array([0.0, gamma], dtype=complex)
    rep = VerificationReport("counterexample")
    rep.configs = {"a": a, "b": b, "gamma": gamma, "point": z, "solver": asdict(sc),
                   "solver_doubled": asdict(sc.doubled())}
    vt = sc.value_tol

    # closed forms
    g21 = green_bidisc_weighted(cfg, (2, 1), z)
    g11 = green_bidisc_weighted(cfg, (1, 1), z)
    g10 = green_bidisc_weighted(cfg, (1, 0), z)
    exact = {"g21": math.log(abs(gamma)) + math.log(abs(a)), "g11": math.log(abs(gamma)),
             "g10": math.log(abs(a))}
    err = max(abs(g21 - exact["g21"]), abs(g11 - exact["g11"]), abs(g10 - exact["g10"]))
    rep.add("closed_forms", PASS if err < 1e-14 else FAIL,
            {"g21": g21, "g11": g11, "g10": g10}, 1e-14, expected=exact)

    # explicit disc through the three points
    disc = explicit_disc(a, b, gamma)
    imgs = [disc(c) for c in (0.0, *disc.nodes)]
    want = [(0, gamma), (a, 0), (b, 0)]
    derr = max(abs(f[0] - t[0]) + abs(f[1] - t[1]) for f, t in zip(imgs, want))
    dval = disc.objective((1, 1))
    ok = derr < 1e-12 and abs(dval - exact["g11"]) < 1e-12
    rep.add("explicit_disc", PASS if ok else FAIL, {"interpolation_error": derr, "d_f": dval},
            1e-12, nodes=list(disc.nodes), boundary_modulus=disc.boundary_modulus())

    # solver values
    r11 = lempert_subset_min(z, cfg, (1, 1), sc)
    r10 = lempert_subset_min(z, cfg, (1, 0), sc)
    r21 = lempert_subset_min(z, cfg, (2, 1), sc)
    r21d = lempert_subset_min(z, cfg, (2, 1), sc.doubled())
    full21 = r21.subset_values[(0, 1)]
    rep.data = {
        "delta_11": _result_summary(r11), "delta_10": _result_summary(r10),
        "delta_21": _result_summary(r21), "delta_21_doubled": _result_summary(r21d),
        "subset_values_21": r21.subset_values,
    }
    e11 = abs(r11.value - g11)
    rep.add("delta_11_equals_g11", PASS if e11 < vt else FAIL, r11.value, vt,
            [] if e11 < vt else [_pt(z)], reference=g11)
    e10 = abs(r10.value - g10)
    rep.add("delta_10_equals_g10", PASS if e10 < vt else FAIL, r10.value, vt,
            [] if e10 < vt else [_pt(z)], reference=g10)

    gap = r21.value - g21
    shift = abs(r21d.value - r21.value)
    margin = max(10 * sc.refine_tol, shift)
    need = max(margin, 10 * vt)
    ok = gap > need and shift < vt
    rep.add("strict_gap", PASS if ok else FAIL,
            {"delta_21": r21.value, "g21": g21, "gap": gap, "doubled_shift": shift,
             "margin": margin},
            {"gap_above": need, "shift_below": vt},
            [_pt(z)], subset=list(r21.subset))

    chain_ok = full21 + 1e-12 >= r21.value and r21.value + 1e-12 >= g21
    rep.add("chain", PASS if chain_ok else FAIL,
            {"delta": full21, "delta_A": r21.value, "g": g21}, 1e-12,
            [] if chain_ok else [_pt(z)])

    lb = two_pole_lower_bound(z, cfg, (2, 1), width=lower_bound_width)
    lb_ok = lb["min"] <= r21.value + 1e-12 and lb["min"] > g21
    rep.add("lower_bound", PASS if lb_ok else FAIL,
            {"bound": lb["min"], "per_subset": {k: v for k, v in lb.items() if k != "min"},
             "bound_minus_g": lb["min"] - g21},
            {"width": lower_bound_width}, [] if lb_ok else [_pt(z)],
            note="relaxation: a rigorous lower bound for delta_A")

    # the equality cases are attained by different discs
    rep.data["extremal_discs"] = {
        "delta_11": {"subset": list(r11.subset), "nodes": r11.best_nodes,
                     "pick": list(r11.certificate)},
        "delta_10": {"subset": list(r10.subset), "nodes": r10.best_nodes,
                     "pick": list(r10.certificate)},
    }
    return rep


def full_set_value(z, cfg, nu, sc=None) -> float:
    """``delta(z, A)`` with every pole required (no subset minimum)."""
    return lempert_bidisc_axis(z, cfg, nu, None, sc).value


__all__ = [
    "VerificationReport", "dirichlet_checklist", "decomposition_check", "convexity_check",
    "pole_lelong_report", "counterexample_experiment", "comonotone", "bidisc_sample",
    "default_region", "jsonable", "full_set_value", "PASS", "FAIL", "SKIP",
]
