"""Lempert function of the bidisc for poles on the first axis.

An analytic disc ``f = (f1, f2): D -> D x D`` through ``z`` at 0 and through
the poles ``(a_j, 0)`` at nodes ``zeta_j`` exists iff both scalar
interpolation problems

    f1: 0 -> z1, zeta_j -> a_j          f2: 0 -> z2, zeta_j -> 0

are solvable by holomorphic self-maps of the disc, which is decided by the
sign of the smallest eigenvalue of the associated Pick matrices. The
infinite-dimensional infimum over discs therefore becomes a finite search
over node positions, done here by a deterministic polar grid followed by a
derivative-free pattern search that tracks the Pick certificate, and a
short SLSQP polish of the best few candidates.
"""
from __future__ import annotations

import heapq
import itertools
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .complex_core import (
    NEG_INF,
    POS_INF,
    as_point,
    blaschke_eval,
    mobius,
    require_in_domain,
)
from .errors import GeometryError, InvalidParameterError
from .green import PoleConfiguration, weight_vector


class ZeroNodeError(InvalidParameterError):
    """A node sits at the origin, where the disc objective is -inf."""


# ---------------------------------------------------------------- objective

def disc_objective(nu, nodes) -> float:
    """``sum_j nu_j log|zeta_j|`` for nodes in the punctured unit disc."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    nodes = np.atleast_1d(np.asarray(nodes, dtype=complex))
    if nu.shape != nodes.shape:
        raise InvalidParameterError("one weight per node is required")
    r = np.abs(nodes)
    if np.any(r >= 1.0):
        raise InvalidParameterError("nodes must lie in the open unit disc")
    if np.any(r == 0.0):
        raise ZeroNodeError("node at the origin: objective is -inf")
    return float(np.sum(nu * np.log(r)))


# ------------------------------------------------------------------- Pick

@dataclass(frozen=True)
class PickProblem:
    """Interpolation data ``nodes[i] -> targets[i]`` for a self-map of D."""

    nodes: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=complex))
        targets = np.atleast_1d(np.asarray(self.targets, dtype=complex))
        if nodes.shape != targets.shape or nodes.ndim != 1:
            raise InvalidParameterError("nodes and targets must be 1-d of equal length")
        if np.any(np.abs(nodes) >= 1.0):
            raise InvalidParameterError("Pick nodes must lie in the open unit disc")
        if np.any(np.abs(targets) > 1.0):
            raise InvalidParameterError("Pick targets must lie in the closed unit disc")
        diff = np.abs(nodes[:, None] - nodes[None, :]) + np.eye(nodes.size)
        if np.any(diff == 0.0):
            raise InvalidParameterError("Pick nodes must be pairwise distinct")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", targets)

    def matrix(self) -> np.ndarray:
        return pick_matrix(self.nodes, self.targets)


def pick_matrix(nodes, targets) -> np.ndarray:
    """Hermitian matrices ``(1 - t_i conj(t_j)) / (1 - z_i conj(z_j))``.

    Works on stacks: ``nodes``/``targets`` of shape ``(..., m)`` give
    ``(..., m, m)``.
    """
    nodes = np.asarray(nodes, dtype=complex)
    targets = np.asarray(targets, dtype=complex)
    num = 1.0 - targets[..., :, None] * np.conj(targets[..., None, :])
    den = 1.0 - nodes[..., :, None] * np.conj(nodes[..., None, :])
    return num / den


def normalized_pick_matrix(nodes, targets) -> np.ndarray:
    """Pick matrix congruence-scaled to unit diagonal.

    ``D^-1/2 M D^-1/2`` has the same inertia as ``M`` but stays well
    conditioned when nodes approach the unit circle, where the entries of
    ``M`` blow up like ``1 / (1 - |z|^2)``. Needs all targets inside D.
    """
    M = pick_matrix(nodes, targets)
    d = 1.0 / np.sqrt(np.real(np.diagonal(M, axis1=-2, axis2=-1)))
    return M * d[..., :, None] * d[..., None, :]


def pick_min_eigenvalue(nodes, targets, normalize: bool = False) -> np.ndarray:
    M = normalized_pick_matrix(nodes, targets) if normalize else pick_matrix(nodes, targets)
    return np.linalg.eigvalsh(M)[..., 0]


def pick_feasible(p: PickProblem, tol: float = 1e-10, normalize: bool = False):
    """Return ``(feasible, smallest eigenvalue)`` of the Pick matrix of ``p``.

    With ``normalize=True`` the eigenvalue is that of the unit-diagonal
    scaling (requires every target strictly inside D).
    """
    if tol < 0:
        raise InvalidParameterError("tol must be >= 0")
    if normalize and np.any(np.abs(p.targets) >= 1.0):
        raise InvalidParameterError("normalised Pick test needs targets inside the open disc")
    lam = float(pick_min_eigenvalue(p.nodes, p.targets, normalize))
    return lam >= -tol, lam


# --------------------------------------------------------------- discs

@dataclass(frozen=True)
class DiscSpec:
    """Analytic disc in the bidisc with Blaschke-product components.

    ``component1``/``component2`` are ``(zeros, rotation)`` pairs; ``nodes``
    are the points of D mapped onto the poles.
    """

    nodes: tuple
    component1: tuple
    component2: tuple

    def __call__(self, zeta):
        z1 = blaschke_eval(self.component1[0], self.component1[1], zeta)
        z2 = blaschke_eval(self.component2[0], self.component2[1], zeta)
        return z1, z2

    def objective(self, nu) -> float:
        return disc_objective(nu, self.nodes)

    def boundary_modulus(self, samples: int = 1024) -> float:
        """Largest component modulus over ``samples`` points of the unit circle."""
        circle = np.exp(2j * np.pi * np.arange(samples) / samples)
        f1, f2 = self(circle)
        return float(max(np.max(np.abs(f1)), np.max(np.abs(f2))))


def explicit_disc(a, b, gamma) -> DiscSpec:
    """Disc through ``(0, gamma)`` at 0, ``(a, 0)`` at ``zeta_1`` and ``(b, 0)``
    at ``zeta_2`` with ``|zeta_1 zeta_2| = |gamma|``.

    ``zeta_1`` is the principal square root of ``gamma a / b``,
    ``zeta_2 = gamma / zeta_1``, and the disc is
    ``zeta -> (beta zeta, b_{zeta_1}(zeta) b_{zeta_2}(zeta))`` with
    ``beta = a / zeta_1``.
    """
    a, b, gamma = complex(a), complex(b), complex(gamma)
    check_counterexample_geometry(a, b, gamma)
    zeta1 = np.sqrt(gamma * a / b)
    zeta2 = gamma / zeta1
    beta = a / zeta1
    return DiscSpec(nodes=(complex(zeta1), complex(zeta2)),
                    component1=((0j,), complex(beta)),
                    component2=((complex(zeta1), complex(zeta2)), 1.0 + 0j))


def check_counterexample_geometry(a, b, gamma):
    """Raise :class:`GeometryError` unless ``0 < |ab| < |gamma| < min(|a|,|b|) < 1``
    and ``a != b``; returns the three values as complex numbers."""
    a, b, gamma = complex(a), complex(b), complex(gamma)
    if a == 0 or b == 0:
        raise GeometryError("a and b must be non-zero")
    if a == b:
        raise GeometryError("a and b must be distinct")
    if abs(a) >= 1 or abs(b) >= 1:
        raise GeometryError("poles must lie in the unit disc: need |a| < 1 and |b| < 1")
    if not abs(a * b) < abs(gamma):
        raise GeometryError(f"need |ab| < |gamma|, got |ab| = {abs(a * b):.17g} >= {abs(gamma):.17g}")
    if not abs(gamma) < min(abs(a), abs(b)):
        raise GeometryError(
            f"need |gamma| < min(|a|, |b|), got {abs(gamma):.17g} >= {min(abs(a), abs(b)):.17g}")
    return a, b, gamma


# ---------------------------------------------------------------- solver

@dataclass(frozen=True)
class SolverConfig:
    """Search settings for :func:`lempert_bidisc_axis`.

    ``n_radii`` x ``n_angles`` is the polar grid per node; ``n_keep`` grid
    optima are refined until the pattern step drops below ``refine_tol``;
    the best ``n_polish`` of those then get an SLSQP polish.
    ``value_tol`` is the agreement tolerance used when comparing solver
    values with exact ones. Grids larger than ``max_grid_points`` are
    subsampled with a scrambled Halton sequence seeded by ``seed``.
    """

    n_radii: int = 64
    n_angles: int = 64
    n_keep: int = 32
    n_polish: int = 4
    refine_tol: float = 1e-7
    max_iter: int = 20000
    psd_tol: float = 1e-10
    seed: int = 0
    value_tol: float = 1e-4
    max_grid_points: int = 1 << 22
    chunk: int = 1 << 16

    def __post_init__(self):
        if self.n_radii < 0 or self.n_angles < 0:
            raise InvalidParameterError("grid resolutions must be >= 0")
        if self.n_polish < 0:
            raise InvalidParameterError("n_polish must be >= 0")
        if self.n_keep < 1 or self.max_iter < 1 or self.chunk < 1 or self.max_grid_points < 1:
            raise InvalidParameterError("n_keep, max_iter, chunk and max_grid_points must be positive")
        if not self.refine_tol > 0 or not self.value_tol > 0:
            raise InvalidParameterError("tolerances must be positive")
        if self.psd_tol < 0:
            raise InvalidParameterError("psd_tol must be >= 0")

    def doubled(self) -> "SolverConfig":
        return replace(self, n_radii=2 * self.n_radii, n_angles=2 * self.n_angles)


@dataclass
class LempertResult:
    """Outcome of a Lempert search.

    ``value`` is ``+inf`` when no feasible disc was found at the configured
    resolution (``feasible`` is then False) and ``-inf`` when ``z`` is a
    pole of positive weight. ``certificate`` holds the smallest eigenvalues
    of the two coordinate Pick matrices (unit-diagonal scaling, see
    :func:`normalized_pick_matrix`) at the reported nodes.
    """

    value: float
    best_nodes: list
    subset: tuple
    certificate: tuple
    feasible: bool = True
    grid_value: float = POS_INF
    weights: tuple = ()
    n_grid_points: int = 0
    subset_values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": _json_float(self.value),
            "feasible": self.feasible,
            "subset": list(self.subset),
            "weights": [float(w) for w in self.weights],
            "node_moduli": [abs(n) for n in self.best_nodes],
            "nodes": [[n.real, n.imag] for n in self.best_nodes],
            "pick_min_eigenvalues": [_json_float(c) for c in self.certificate],
            "grid_value": _json_float(self.grid_value),
            "n_grid_points": self.n_grid_points,
            "subset_values": {",".join(map(str, k)): _json_float(v)
                              for k, v in self.subset_values.items()},
        }


def _json_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


class _NodeProblem:
    """Vectorised feasibility/objective evaluation for a fixed pole subset.

    Parameters are ``x = (s_1, s_2, t_2, ..., s_m, t_m)`` with
    ``zeta_1 = exp(s_1)`` and ``zeta_j = exp(s_j + i t_j)``: a common rotation
    of all nodes maps discs to discs, so the first node is kept real.
    """

    def __init__(self, z, a, nu, psd_tol):
        self.z = z
        self.a = np.asarray(a, dtype=complex)
        self.nu = np.asarray(nu, dtype=float)
        self.m = self.a.size
        self.psd_tol = psd_tol
        self.t1 = np.concatenate([[z[0]], self.a])
        self.t2 = np.concatenate([[z[1]], np.zeros(self.m)])

    def nodes_from_polar(self, r, theta):
        """``r``, ``theta`` of shape ``(N, m)`` (``theta[:, 0]`` ignored)."""
        theta = theta.copy()
        theta[:, 0] = 0.0
        return r * np.exp(1j * theta)

    def nodes_from_x(self, X):
        X = np.atleast_2d(X)
        r = np.exp(np.concatenate([X[:, :1], X[:, 1::2]], axis=1))
        theta = np.zeros_like(r)
        theta[:, 1:] = X[:, 2::2]
        return r * np.exp(1j * theta)

    def evaluate(self, nodes):
        """Objective, feasibility mask and both Pick certificates for a batch."""
        N = nodes.shape[0]
        r = np.abs(nodes)
        valid = np.all((r > 0) & (r < 1.0), axis=1)
        if self.m > 1:
            gaps = np.abs(nodes[:, :, None] - nodes[:, None, :])
            gaps[:, np.arange(self.m), np.arange(self.m)] = np.inf
            valid &= np.min(gaps.reshape(N, -1), axis=1) > 1e-12
        obj = np.full(N, np.inf)
        lam1 = np.full(N, -np.inf)
        lam2 = np.full(N, -np.inf)
        if np.any(valid):
            nv = nodes[valid]
            ext = np.concatenate([np.zeros((nv.shape[0], 1), dtype=complex), nv], axis=1)
            lam1[valid] = pick_min_eigenvalue(ext, np.broadcast_to(self.t1, ext.shape), True)
            lam2[valid] = pick_min_eigenvalue(ext, np.broadcast_to(self.t2, ext.shape), True)
            with np.errstate(divide="ignore"):
                obj[valid] = np.log(np.abs(nv)) @ self.nu
        feasible = valid & (lam1 >= -self.psd_tol) & (lam2 >= -self.psd_tol)
        return obj, feasible, lam1, lam2


def _grid_axes(sc: SolverConfig, m: int):
    radii = np.arange(1, sc.n_radii + 1) / (sc.n_radii + 1)
    angles = 2 * np.pi * np.arange(sc.n_angles) / max(sc.n_angles, 1)
    # node 1 contributes radii only; later nodes a full polar grid
    sizes = [sc.n_radii] + [sc.n_radii * sc.n_angles] * (m - 1)
    return radii, angles, sizes


def _decode(flat, radii, angles, sizes, m):
    """Mixed-radix decoding of flat grid indices into polar node coordinates."""
    r = np.empty((flat.size, m))
    th = np.zeros((flat.size, m))
    rem = flat.copy()
    for j in range(m - 1, -1, -1):
        idx = rem % sizes[j]
        rem //= sizes[j]
        if j == 0:
            r[:, 0] = radii[idx]
        else:
            r[:, j] = radii[idx // len(angles)]
            th[:, j] = angles[idx % len(angles)]
    return r, th


def _grid_indices(total: int, sizes, sc: SolverConfig, m: int):
    """Yield chunks of flat grid indices: the full grid when it fits the
    budget, otherwise a deterministic quasi-random subsample."""
    if total <= sc.max_grid_points:
        for start in range(0, total, sc.chunk):
            yield np.arange(start, min(start + sc.chunk, total), dtype=np.int64)
        return
    from scipy.stats import qmc

    dims = 2 * m - 1
    sampler = qmc.Halton(d=dims, scramble=True, seed=sc.seed)
    left = sc.max_grid_points
    while left > 0:
        n = min(sc.chunk, left)
        U = sampler.random(n)
        flat = np.zeros(n, dtype=np.int64)
        col = 0
        for j in range(m):
            if j == 0:
                idx = np.minimum((U[:, col] * sizes[0]).astype(np.int64), sizes[0] - 1)
                col += 1
            else:
                n_a = sizes[j] // sc.n_radii
                ir = np.minimum((U[:, col] * sc.n_radii).astype(np.int64), sc.n_radii - 1)
                ia = np.minimum((U[:, col + 1] * n_a).astype(np.int64), n_a - 1)
                idx = ir * n_a + ia
                col += 2
            flat = flat * sizes[j] + idx
        left -= n
        yield flat


def _pattern_directions(n: int) -> np.ndarray:
    dirs = []
    for i in range(n):
        for s in (1.0, -1.0):
            d = np.zeros(n)
            d[i] = s
            dirs.append(d)
    for i, j in itertools.combinations(range(n), 2):
        for si in (1.0, -1.0):
            for sj in (1.0, -1.0):
                d = np.zeros(n)
                d[i], d[j] = si, sj
                dirs.append(d)
    return np.array(dirs)


def _refine(prob: _NodeProblem, x0, f0, step0, sc: SolverConfig):
    """Pattern search from a feasible point; never leaves the feasible set."""
    x, f = x0.copy(), f0
    dirs = _pattern_directions(x.size)
    step = step0
    it = 0
    while step >= sc.refine_tol and it < sc.max_iter:
        it += 1
        trial = x[None, :] + step * dirs
        obj, feas, _, _ = prob.evaluate(prob.nodes_from_x(trial))
        obj = np.where(feas, obj, np.inf)
        best = int(np.argmin(obj))  # first index wins ties
        if obj[best] < f:
            x, f = trial[best], float(obj[best])
        else:
            step *= 0.5
    return x, f


# log-radius box used by the polishing step
_POLISH_ROUNDS = 8
_TRUST = 0.05
_S_MIN, _S_MAX = math.log(1e-12), math.log1p(-1e-12)


def _polish(prob: _NodeProblem, x0, f0, sc: SolverConfig):
    """SLSQP on the smooth Pick-eigenvalue constraints, started from a
    pattern-search optimum.

    Pattern search stalls on curved edges where both coordinate constraints
    are active; SLSQP follows them. The answer is pulled back towards ``x0``
    by bisection until the Pick oracle certifies it, so the result is never
    less feasible than the input.
    """
    from scipy.optimize import minimize

    n = x0.size
    grad = np.zeros(n)
    grad[0] = prob.nu[0]
    grad[1::2] = prob.nu[1:]
    eye = np.eye(n)
    fd = 1e-7

    def fun(x):
        r = np.exp(np.concatenate([x[:1], x[1::2]]))
        return float(np.log(r) @ prob.nu)

    def _lams(X):
        _, _, lam1, lam2 = prob.evaluate(prob.nodes_from_x(X))
        return np.nan_to_num(np.column_stack([lam1, lam2]), nan=-1.0, neginf=-1.0)

    def cons(x):
        return _lams(x[None, :])[0]

    def cons_jac(x):
        L = _lams(np.vstack([x + fd * eye, x - fd * eye]))
        return ((L[:n] - L[n:]) / (2 * fd)).T

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            # trust box: the eigenvalue constraints are only locally smooth
            glob = [(_S_MIN, _S_MAX)] + [(_S_MIN, _S_MAX), (-np.inf, np.inf)] * ((n - 1) // 2)
            bounds = [(max(lo, xi - _TRUST), min(hi, xi + _TRUST))
                      for (lo, hi), xi in zip(glob, x0)]
            res = minimize(fun, x0, jac=lambda x: grad, method="SLSQP", bounds=bounds,
                           constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
                           options={"ftol": 1e-15, "maxiter": 200})
    except (ValueError, np.linalg.LinAlgError):
        return x0, f0
    if not np.all(np.isfinite(res.x)):
        return x0, f0
    d = res.x - x0
    obj, feas, _, _ = prob.evaluate(prob.nodes_from_x(x0 + d))
    if feas[0]:
        t = 1.0
    else:
        # largest certified step along the segment; t = 0 is feasible
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if prob.evaluate(prob.nodes_from_x(x0 + mid * d))[1][0]:
                lo = mid
            else:
                hi = mid
        t = lo
        if t == 0.0:
            return x0, f0
        obj = prob.evaluate(prob.nodes_from_x(x0 + t * d))[0]
    x1, f1 = x0 + t * d, float(obj[0])
    return (x1, f1) if f1 < f0 else (x0, f0)


def _x_from_nodes(nodes):
    x = [math.log(abs(nodes[0]))]
    for zj in nodes[1:]:
        x.extend([math.log(abs(zj)), float(np.angle(zj))])
    return np.array(x)


def lempert_bidisc_axis(z, cfg: PoleConfiguration, nu=None, subset=None,
                        sc: SolverConfig | None = None) -> LempertResult:
    """Lempert function ``delta(z, B)`` of the bidisc for the poles in ``subset``.

    Minimises ``sum_{j in B} nu_j log|zeta_j|`` over distinct nodes for which
    both coordinate Pick matrices are positive semidefinite (up to
    ``sc.psd_tol``). The returned value is attained by a feasible disc, so
    it is an upper bound on the true infimum.
    """
    sc = sc or SolverConfig()
    if cfg.domain.kind != "bidisc":
        raise InvalidParameterError("the Lempert solver handles the bidisc only")
    if not cfg.is_axis():
        raise GeometryError("the Lempert solver needs every pole on the axis z_2 = 0")
    z = require_in_domain(cfg.domain, z)
    nu = weight_vector(cfg, nu)
    subset = tuple(range(cfg.k)) if subset is None else tuple(sorted(set(int(i) for i in subset)))
    if not subset:
        raise InvalidParameterError("subset must be non-empty")
    if min(subset) < 0 or max(subset) >= cfg.k:
        raise InvalidParameterError(f"subset indices must lie in [0, {cfg.k})")
    a = cfg.axis_coords[list(subset)]
    w = nu[list(subset)]
    m = len(subset)

    for j, aj in enumerate(a):
        if z[1] == 0 and z[0] == aj and w[j] > 0:
            nodes = [0j] * m
            return LempertResult(NEG_INF, nodes, subset, (math.nan, math.nan),
                                 True, NEG_INF, tuple(w), 0)

    prob = _NodeProblem(z, a, w, sc.psd_tol)
    radii, angles, sizes = _grid_axes(sc, m)
    total = int(np.prod(sizes, dtype=object)) if sc.n_radii and (m == 1 or sc.n_angles) else 0

    # best n_keep feasible grid points, ties broken by grid index
    keep_obj = np.empty(0)
    keep_idx = np.empty(0, dtype=np.int64)
    evaluated = 0
    if total > 0:
        for flat in _grid_indices(total, sizes, sc, m):
            r, th = _decode(flat, radii, angles, sizes, m)
            obj, feas, _, _ = prob.evaluate(prob.nodes_from_polar(r, th))
            evaluated += flat.size
            if not np.any(feas):
                continue
            keep_obj = np.concatenate([keep_obj, obj[feas]])
            keep_idx = np.concatenate([keep_idx, flat[feas]])
            order = np.lexsort((keep_idx, keep_obj))[: sc.n_keep]
            keep_obj, keep_idx = keep_obj[order], keep_idx[order]

    if keep_idx.size == 0:
        return LempertResult(POS_INF, [], subset, (math.nan, math.nan), False,
                             POS_INF, tuple(w), evaluated)

    grid_value = float(keep_obj[0])
    step0 = max(2 * np.pi / max(sc.n_angles, 1), 1.0 / (sc.n_radii + 1))
    best_x, best_f = None, np.inf
    r, th = _decode(keep_idx, radii, angles, sizes, m)
    starts = prob.nodes_from_polar(r, th)
    refined = [_refine(prob, _x_from_nodes(n0), float(f0), step0, sc)
               for n0, f0 in zip(starts, keep_obj)]
    order = sorted(range(len(refined)), key=lambda i: (refined[i][1], i))
    for i in order[: sc.n_polish]:
        x, f = refined[i]
        # SLSQP stalls early when both constraints are active; restart it
        for _ in range(_POLISH_ROUNDS):
            x1, f1 = _polish(prob, x, f, sc)
            done = f - f1 < sc.refine_tol
            x, f = x1, f1
            if done:
                break
        if f < best_f:
            best_x, best_f = x, f

    best_nodes = prob.nodes_from_x(best_x)
    obj, feas, lam1, lam2 = prob.evaluate(best_nodes)
    return LempertResult(float(obj[0]), [complex(c) for c in best_nodes[0]], subset,
                         (float(lam1[0]), float(lam2[0])), True, grid_value,
                         tuple(w), evaluated)


def lempert_subset_min(z, cfg: PoleConfiguration, nu=None,
                       sc: SolverConfig | None = None, threads: int = 1) -> LempertResult:
    """``min`` of :func:`lempert_bidisc_axis` over all non-empty pole subsets.

    Subsets are enumerated by size, then lexicographically; ties keep the
    first subset. Every subset's value is recorded in ``subset_values``.
    ``threads > 1`` solves subsets concurrently; the result does not depend
    on the thread count.
    """
    if cfg.k > 8:
        raise InvalidParameterError("subset enumeration is limited to k <= 8 poles")
    if threads < 1:
        raise InvalidParameterError("threads must be >= 1")
    sc = sc or SolverConfig()
    subsets = [s for size in range(1, cfg.k + 1)
               for s in itertools.combinations(range(cfg.k), size)]

    def solve(subset):
        return lempert_bidisc_axis(z, cfg, nu, subset, sc)

    if threads == 1:
        results = [solve(s) for s in subsets]
    else:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(solve, subsets))
    best = None
    for res in results:
        if best is None or res.value < best.value:
            best = res
    best.subset_values = {s: r.value for s, r in zip(subsets, results)}
    return best


# ----------------------------------------------------- analytic lower bound

def _rho(x, y):
    """Pseudo-hyperbolic distance of two points of [0, 1)."""
    x, y = (x, y) if x >= y else (y, x)
    if x >= 1.0:
        return 1.0
    return (x - y) / (1.0 - x * y)


def _pair_cell_ok(r1lo, r1hi, r2lo, r2hi, X, Y, g2):
    # conservative: may keep infeasible cells, never drops a feasible one
    if r1hi * r2hi < g2 * (1 - 1e-14):
        return False
    xlo, xhi = X / r1hi, min(1.0, X / r1lo)
    ylo, yhi = Y / r2hi, min(1.0, Y / r2lo)
    if xlo > 1.0 or ylo > 1.0:
        return False
    if xlo > yhi:
        lhs = _rho(xlo, yhi)
    elif ylo > xhi:
        lhs = _rho(ylo, xhi)
    else:
        lhs = 0.0
    rhs = (r1hi + r2hi) / (1.0 + r1hi * r2hi)
    return lhs <= rhs * (1 + 1e-14)


def pair_lower_bound(X: float, Y: float, g2: float, p: float, q: float,
                     width: float = 1e-7, max_cells: int = 2_000_000) -> float:
    """Rigorous lower bound for ``p log r1 + q log r2`` over the relaxed
    two-node problem.

    The constraints are the necessary conditions ``r1 >= X``, ``r2 >= Y``,
    ``r1 r2 >= g2`` and ``rho(X/r1, Y/r2) <= (r1 + r2) / (1 + r1 r2)`` on node
    moduli, where ``X``, ``Y`` are the moduli of the Schur-reduced first
    coordinate targets. Solved by best-first branch and bound on cells of
    ``(r1, r2)``.
    """
    if X <= 0 or Y <= 0:
        return NEG_INF
    heap = [(p * math.log(X) + q * math.log(Y), X, 1.0, Y, 1.0)]
    popped = 0
    while heap:
        bound, a1, b1, a2, b2 = heapq.heappop(heap)
        popped += 1
        if max(b1 - a1, b2 - a2) < width or popped > max_cells:
            return bound
        m1, m2 = 0.5 * (a1 + b1), 0.5 * (a2 + b2)
        for lo1, hi1 in ((a1, m1), (m1, b1)):
            for lo2, hi2 in ((a2, m2), (m2, b2)):
                if _pair_cell_ok(lo1, hi1, lo2, hi2, X, Y, g2):
                    heapq.heappush(heap, (p * math.log(lo1) + q * math.log(lo2),
                                          lo1, hi1, lo2, hi2))
    return POS_INF


def two_pole_lower_bound(z, cfg: PoleConfiguration, nu=None, width: float = 1e-7) -> dict:
    """Lower bounds for every subset of a two-pole axis configuration.

    Single-pole values are exact (Schwarz lemma in each coordinate); the
    two-pole value comes from :func:`pair_lower_bound`. Returns a mapping
    ``subset -> bound`` plus ``"min"``, a lower bound for ``delta^A(z)``.
    """
    if cfg.k != 2:
        raise InvalidParameterError("two_pole_lower_bound needs exactly two poles")
    z = as_point(z, 2)
    nu = weight_vector(cfg, nu)
    X, Y = (abs(mobius(complex(z[0]), complex(aj))) for aj in cfg.axis_coords)
    g2 = abs(z[1])

    def single(Xj, wj):
        rmin = max(Xj, g2)
        if wj == 0:
            return 0.0
        return NEG_INF if rmin == 0 else wj * math.log(rmin)

    out = {(0,): single(X, nu[0]), (1,): single(Y, nu[1]),
           (0, 1): pair_lower_bound(X, Y, g2, nu[0], nu[1], width)}
    out["min"] = min(out[(0,)], out[(1,)], out[(0, 1)])
    return out
