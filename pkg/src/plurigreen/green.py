"""Closed-form pluricomplex Green functions for poles on the first axis.

For poles ``w_i = (a_i, 0, ..., 0)`` in the bidisc/polydisc with weights
``nu_1 >= ... >= nu_k`` the Green function is a non-negative combination of
the equal-weight functions

    h_j(z) = max(T_1(z_1) + ... + T_j(z_1), v(z)),

where ``T_i`` is the disc Green function with pole ``a_i`` and
``v(z) = max_{m >= 2} log|z_m|``. Two equivalent expressions are provided:
the telescoping sum (:func:`green_bidisc_weighted`) and a single max of
affine branches (:func:`green_bidisc_maxform`).

All evaluators accept one point of shape ``(n,)`` (returning a float) or a
batch of shape ``(N, n)`` (returning an array).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex_core import (
    BOUNDARY_EPS,
    Domain,
    disc_green,
    in_domain,
)
from .errors import DimensionError, DomainError, GeometryError, InvalidParameterError


@dataclass(frozen=True)
class PoleConfiguration:
    """Poles ``locations[j]`` with weights ``weights[j]`` in ``domain``.

    ``locations`` has shape ``(k, n)``. Weights must be strictly positive;
    weight vectors passed separately to the evaluators may contain zeros.
    """

    domain: Domain
    locations: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        locs = np.atleast_2d(np.asarray(self.locations, dtype=complex))
        if locs.shape[0] == 0:
            raise InvalidParameterError("at least one pole is required")
        if locs.shape[1] != self.domain.n:
            raise DimensionError(
                f"poles have {locs.shape[1]} coordinates, domain needs {self.domain.n}")
        w = np.ones(locs.shape[0]) if self.weights is None else np.asarray(self.weights, float)
        if w.shape != (locs.shape[0],):
            raise DimensionError("one weight per pole is required")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidParameterError(f"pole weights must be positive, got {w.tolist()}")
        for j, p in enumerate(locs):
            if not in_domain(self.domain, p):
                raise DomainError(f"pole {j} = {p.tolist()} lies outside the {self.domain.kind}")
        for i in range(len(locs)):
            for j in range(i):
                if np.allclose(locs[i], locs[j], rtol=0, atol=BOUNDARY_EPS):
                    raise GeometryError(f"poles {j} and {i} coincide")
        locs.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "weights", w)

    @classmethod
    def axis(cls, a, weights=None, domain: Domain | None = None) -> "PoleConfiguration":
        """Poles ``(a_j, 0, ..., 0)``; the default domain is the bidisc."""
        domain = domain or Domain.bidisc()
        a = np.atleast_1d(np.asarray(a, dtype=complex))
        locs = np.zeros((a.size, domain.n), dtype=complex)
        locs[:, 0] = a
        return cls(domain, locs, weights)

    @property
    def k(self) -> int:
        return self.locations.shape[0]

    @property
    def axis_coords(self) -> np.ndarray:
        """First coordinates ``a_j`` of the poles."""
        return self.locations[:, 0]

    def is_axis(self) -> bool:
        return bool(np.all(np.abs(self.locations[:, 1:]) <= BOUNDARY_EPS))

    def subset(self, indices) -> "PoleConfiguration":
        idx = list(indices)
        return PoleConfiguration(self.domain, self.locations[idx], self.weights[idx])


@dataclass(frozen=True)
class ComanBallParams:
    """Constants of the two-pole ball computation.

    ``c`` and ``d`` are supplied by the caller; nothing here derives them
    from ``beta`` and ``gamma``.
    """

    c: float
    d: float
    beta: float = 0.5
    gamma: complex = 0.0

    def __post_init__(self):
        for name in ("c", "d", "beta"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if not 0.0 < self.beta < 1.0:
            raise InvalidParameterError(f"beta must lie in (0, 1), got {self.beta}")


def weight_vector(cfg: PoleConfiguration, nu=None) -> np.ndarray:
    """Validate a weight vector for ``cfg`` (zeros allowed, negatives not)."""
    if nu is None:
        return np.array(cfg.weights, dtype=float)
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if nu.shape != (cfg.k,):
        raise DimensionError(f"expected {cfg.k} weights, got {nu.shape[0]}")
    if not np.all(np.isfinite(nu)) or np.any(nu < 0):
        raise InvalidParameterError(f"weights must be finite and >= 0, got {nu.tolist()}")
    return nu


def descending_order(nu) -> np.ndarray:
    """Pole permutation sorting weights descending; ties keep pole index order."""
    return np.argsort(-np.asarray(nu, dtype=float), kind="stable")


def _points(domain: Domain, z):
    Z = np.asarray(z, dtype=complex)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    if Z.shape[-1] != domain.n:
        raise DimensionError(f"{domain.kind} expects {domain.n} coordinates, got {Z.shape[-1]}")
    if not np.all(np.isfinite(Z)):
        raise InvalidParameterError("point has non-finite coordinates")
    if not np.all(np.abs(Z) < 1.0 - BOUNDARY_EPS):
        raise DomainError(f"point(s) outside the open {domain.kind}")
    return Z, single


def _require_axis(cfg: PoleConfiguration):
    if not cfg.domain.is_product or cfg.domain.n < 2:
        raise InvalidParameterError("closed forms need a bidisc or polydisc configuration")
    if not cfg.is_axis():
        raise GeometryError("closed forms need every pole on the axis z_2 = ... = z_n = 0")


def _branch_data(cfg: PoleConfiguration, nu, Z):
    """Sorted weights, per-pole ``T_i(z_1)`` columns and ``v(z)`` for a batch."""
    order = descending_order(nu)
    a = cfg.axis_coords[order]
    T = np.column_stack([disc_green(ai, Z[:, 0]) for ai in a])
    with np.errstate(divide="ignore"):
        V = np.max(np.log(np.abs(Z[:, 1:])), axis=1)
    return np.asarray(nu, dtype=float)[order], T, V


def _scaled(c, x):
    # zero coefficients must not turn -inf into nan
    return np.zeros_like(x) if c == 0 else c * x


def _telescoping(nu_sorted, T, V):
    k = nu_sorted.size
    cum = np.cumsum(T, axis=1)
    out = np.zeros(T.shape[0])
    for j in range(k):
        coeff = nu_sorted[j] - nu_sorted[j + 1] if j < k - 1 else nu_sorted[k - 1]
        if coeff != 0:
            out = out + coeff * np.maximum(cum[:, j], V)
    return out


def _maxform(nu_sorted, T, V):
    k = nu_sorted.size
    u1 = np.zeros(T.shape[0])
    for i in range(k):
        u1 = u1 + _scaled(nu_sorted[i], T[:, i])
    # the bare log|z_2| branch assumes nu_1 = 1; scale it to stay homogeneous
    branches = [u1, _scaled(nu_sorted[0], V)]
    for j in range(1, k):
        uj = _scaled(nu_sorted[j], V)
        for i in range(j):
            uj = uj + _scaled(nu_sorted[i] - nu_sorted[j], T[:, i])
        branches.append(uj)
    return np.max(np.column_stack(branches), axis=1)


def _finish(values, single):
    return float(values[0]) if single else values


def green_bidisc_equal(cfg: PoleConfiguration, z):
    """``max(sum_i T_i(z_1), log|z_2|)`` for unit weights on the bidisc."""
    _require_axis(cfg)
    if not np.all(cfg.weights == 1.0):
        raise InvalidParameterError("green_bidisc_equal needs all pole weights equal to 1")
    Z, single = _points(cfg.domain, z)
    _, T, V = _branch_data(cfg, cfg.weights, Z)
    return _finish(np.maximum(np.sum(T, axis=1), V), single)


def green_bidisc_weighted(cfg: PoleConfiguration, nu, z):
    """Telescoping form ``nu_k h_k + sum_{j<k} (nu_j - nu_{j+1}) h_j``.

    Weights are sorted descending internally (stable in pole index), so any
    order is accepted. Zero weights drop the corresponding pole.
    """
    _require_axis(cfg)
    nu = weight_vector(cfg, nu)
    Z, single = _points(cfg.domain, z)
    nu_s, T, V = _branch_data(cfg, nu, Z)
    return _finish(_telescoping(nu_s, T, V), single)


def green_bidisc_maxform(cfg: PoleConfiguration, nu, z):
    """Max of the affine branches ``u_1, ..., u_k`` and ``nu_1 log|z_2|``, where
    ``u_1 = sum_i nu_i T_i`` and
    ``u_j = nu_j log|z_2| + sum_{i<j} (nu_i - nu_j) T_i`` for ``j >= 2``
    (weights sorted descending). With the normalisation ``nu_1 = 1`` the last
    branch is plain ``log|z_2|``.
    """
    _require_axis(cfg)
    nu = weight_vector(cfg, nu)
    Z, single = _points(cfg.domain, z)
    nu_s, T, V = _branch_data(cfg, nu, Z)
    return _finish(_maxform(nu_s, T, V), single)


def green_polydisc_axis(cfg: PoleConfiguration, nu, z):
    """Polydisc version: ``log|z_2|`` replaced by ``max_{m>=2} log|z_m|``."""
    return green_bidisc_weighted(cfg, nu, z)


def green_branches(cfg: PoleConfiguration, nu, z):
    """Branch values of every max appearing in the telescoping form.

    Returns an array of shape ``(N, k_eff, 2)`` holding ``(sum_{i<=j} T_i, v)``
    for each ``h_j`` with a non-zero coefficient. Used to locate the
    non-smooth loci of the Green function.
    """
    _require_axis(cfg)
    nu = weight_vector(cfg, nu)
    Z, single = _points(cfg.domain, z)
    nu_s, T, V = _branch_data(cfg, nu, Z)
    k = nu_s.size
    cum = np.cumsum(T, axis=1)
    keep = [j for j in range(k) if (nu_s[j] - (nu_s[j + 1] if j < k - 1 else 0.0)) != 0]
    if not keep:
        return np.zeros((Z.shape[0], 0, 2))
    out = np.stack([np.column_stack([cum[:, j], V]) for j in keep], axis=1)
    return out[0] if single else out


def _ball_automorphism(a: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Involutive ball automorphism exchanging ``a`` and 0 (rows of ``Z``)."""
    na2 = float(np.vdot(a, a).real)
    if na2 == 0.0:
        return Z.copy()
    s = np.sqrt(1.0 - na2)
    inner = Z @ np.conj(a)  # <z, a>
    P = inner[:, None] * a[None, :] / na2
    Q = Z - P
    return (a[None, :] - P - s * Q) / (1.0 - inner)[:, None]


def green_ball_single(cfg: PoleConfiguration, z):
    """Single-pole Green function of the unit ball, ``nu log|phi_w(z)|``."""
    if cfg.domain.kind != "ball" or cfg.k != 1:
        raise InvalidParameterError("green_ball_single needs one pole in a ball configuration")
    Z = np.atleast_2d(np.asarray(z, dtype=complex))
    single = np.asarray(z).ndim == 1
    if Z.shape[-1] != cfg.domain.n:
        raise DimensionError(f"ball expects {cfg.domain.n} coordinates")
    if not np.all(np.sum(np.abs(Z) ** 2, axis=1) < 1.0 - BOUNDARY_EPS):
        raise DomainError("point(s) outside the open ball")
    phi = _ball_automorphism(cfg.locations[0], Z)
    with np.errstate(divide="ignore"):
        vals = cfg.weights[0] * np.log(np.linalg.norm(phi, axis=1))
    return _finish(vals, single)


def green_function(cfg: PoleConfiguration, z, nu=None):
    """Dispatch to the closed form available for ``cfg``."""
    if cfg.domain.kind == "ball":
        return green_ball_single(cfg, z)
    return green_bidisc_weighted(cfg, nu, z)


def _check_coman_args(s, t):
    s = float(s)
    t = complex(t)
    if not 0.0 < s < 1.0:
        raise InvalidParameterError(f"s must lie in (0, 1), got {s}")
    if not abs(t) < 1.0:
        raise InvalidParameterError(f"|t| must be < 1, got {abs(t)}")
    return s, t


def coman_E(s, t, p: ComanBallParams) -> float:
    """``(s^2-c)(|t|^2-c)|1-st|^2 - (1-s^2)(1-|t|^2)|st+d|^2``."""
    s, t = _check_coman_args(s, t)
    c, d = p.c, p.d
    t2 = abs(t) ** 2
    return ((s * s - c) * (t2 - c) * abs(1.0 - s * t) ** 2
            - (1.0 - s * s) * (1.0 - t2) * abs(s * t + d) ** 2)


def coman_S_membership(s, t, p: ComanBallParams) -> bool:
    """Whether ``(s, t)`` belongs to the admissible node set of the ball problem."""
    s, t = _check_coman_args(s, t)
    if s == t:
        return False
    if not (s * s > p.c and abs(t) ** 2 > p.c):
        return False
    return coman_E(s, t, p) >= 0.0
