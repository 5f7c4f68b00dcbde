"""Finite-difference complex Hessians, Monge-Ampere maximality scans, and
the annulus / determinant computations for the ball's truncated log.

Fields are vectorised callables on ``(M, 2)`` complex arrays.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .complex_core import Domain, as_point, in_domain
from .errors import (
    DomainError,
    EmptyGridError,
    InvalidParameterError,
    SingularStencilError,
)

DEFAULT_H = 1e-3
#: Pass constant for maximality scans: ``max|det| <= C h^2 * control``.
DEFAULT_C = 10.0
#: Points whose top two max-branches are closer than this many ``h`` are skipped.
CROSSING_FACTOR = 10.0


def _unit_vectors():
    # real coordinates (x1, y1, x2, y2) as complex displacements of (z1, z2)
    return np.array([[1, 0], [1j, 0], [0, 1], [0, 1j]], dtype=complex)


def _stencil(h: float) -> np.ndarray:
    """Offsets of the second-order stencil, shape ``(33, 2)``.

    Row 0 is the centre, rows 1..8 the axis points ``+-h e_k`` and the rest
    the four corners ``(+-h e_k +-h e_l)`` of every pair ``k < l``.
    """
    E = _unit_vectors() * h
    rows = [np.zeros(2, complex)]
    for k in range(4):
        rows += [E[k], -E[k]]
    for k, l in itertools.combinations(range(4), 2):
        rows += [E[k] + E[l], E[k] - E[l], -E[k] + E[l], -E[k] - E[l]]
    return np.array(rows)


_PAIRS = list(itertools.combinations(range(4), 2))


def _eval_stencil(u, Z: np.ndarray, h: float) -> np.ndarray:
    S = _stencil(h)
    P = (Z[:, None, :] + S[None, :, :]).reshape(-1, 2)
    vals = np.asarray(u(P), dtype=float).reshape(Z.shape[0], S.shape[0])
    return vals


def _hessians_from_values(vals: np.ndarray, h: float) -> np.ndarray:
    N = vals.shape[0]
    c = vals[:, 0]
    R = np.empty((N, 4, 4))
    for k in range(4):
        R[:, k, k] = (vals[:, 1 + 2 * k] - 2 * c + vals[:, 2 + 2 * k]) / h**2
    for p, (k, l) in enumerate(_PAIRS):
        b = 9 + 4 * p
        m = (vals[:, b] - vals[:, b + 1] - vals[:, b + 2] + vals[:, b + 3]) / (4 * h**2)
        R[:, k, l] = R[:, l, k] = m
    # d2u/dz_i dzbar_j = (u_xixj + u_yiyj + i(u_xiyj - u_yixj)) / 4
    H = np.empty((N, 2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            xi, yi, xj, yj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
            H[:, i, j] = 0.25 * (R[:, xi, xj] + R[:, yi, yj]
                                 + 1j * (R[:, xi, yj] - R[:, yi, xj]))
    return 0.5 * (H + np.conj(np.swapaxes(H, 1, 2)))


def _batch(z):
    Z = np.asarray(z, dtype=complex)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    if Z.shape[1] != 2:
        raise InvalidParameterError(f"expected points of C^2, got shape {Z.shape}")
    return Z, single


def complex_hessian(u, z, h: float = DEFAULT_H) -> np.ndarray:
    """Matrix of ``d^2 u / dz_i dzbar_j`` by centred second differences.

    ``z`` is a point ``(2,)`` or a batch ``(N, 2)``; returns ``(2, 2)`` or
    ``(N, 2, 2)`` Hermitian matrices (symmetrised).
    """
    if not h > 0:
        raise InvalidParameterError("h must be positive")
    Z, single = _batch(z)
    vals = _eval_stencil(u, Z, h)
    bad = ~np.isfinite(vals)
    if bad.any():
        i = int(np.argmax(bad.any(axis=1)))
        raise SingularStencilError(f"stencil around {Z[i].tolist()} hit a non-finite value")
    H = _hessians_from_values(vals, h)
    return H[0] if single else H


def _det2(H: np.ndarray) -> np.ndarray:
    return (H[..., 0, 0] * H[..., 1, 1] - H[..., 0, 1] * H[..., 1, 0]).real


def ma_det(u, z, h: float = DEFAULT_H):
    """Determinant of :func:`complex_hessian` (real; float or array)."""
    d = _det2(complex_hessian(u, z, h))
    return float(d) if np.ndim(d) == 0 else d


def control_field(Z):
    """``|z1|^2 + |z2|^2``; complex Hessian is the identity."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    return np.sum(np.abs(Z) ** 2, axis=1)


@dataclass(frozen=True)
class GridRegion:
    """Rectangular grid in C^2 = R^4.

    ``step`` is the grid spacing. Points are ``center + offsets`` with
    offsets ``i * step`` in each real coordinate ``(x1, y1, x2, y2)`` up to
    the half-width. ``exclusions`` lists ``(point, radius)`` balls to drop.
    """

    center: np.ndarray
    half_widths: tuple
    step: float
    exclusions: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center, 2))
        hw = tuple(float(x) for x in self.half_widths)
        if len(hw) != 4 or any(x < 0 for x in hw):
            raise InvalidParameterError("need four non-negative half-widths")
        object.__setattr__(self, "half_widths", hw)
        if not self.step > 0:
            raise InvalidParameterError("step must be positive")
        ex = tuple((as_point(p, 2), float(r)) for p, r in self.exclusions)
        if any(r <= 0 for _, r in ex):
            raise InvalidParameterError("exclusion radii must be positive")
        object.__setattr__(self, "exclusions", ex)

    def axes(self):
        out = []
        c = self.center
        centre_re = [c[0].real, c[0].imag, c[1].real, c[1].imag]
        for cr, w in zip(centre_re, self.half_widths):
            m = int(np.floor(w / self.step + 1e-9))
            out.append(cr + self.step * np.arange(-m, m + 1))
        return out

    def points(self, domain: Domain | None = None, margin: float = 0.0) -> np.ndarray:
        """Grid points in lexicographic index order, exclusions removed.

        With ``domain`` given, points closer than ``margin`` to its boundary
        are dropped too.
        """
        ax = self.axes()
        G = np.stack(np.meshgrid(*ax, indexing="ij"), axis=-1).reshape(-1, 4)
        Z = np.column_stack([G[:, 0] + 1j * G[:, 1], G[:, 2] + 1j * G[:, 3]])
        keep = np.ones(Z.shape[0], bool)
        for p, r in self.exclusions:
            keep &= np.linalg.norm(Z - p, axis=1) > r
        if domain is not None:
            keep &= _inside(domain, Z, margin)
        return Z[keep]

    def check_in_domain(self, domain: Domain):
        """Raise :class:`DomainError` if a grid corner leaves ``domain``."""
        c = self.center
        hw = self.half_widths
        for signs in itertools.product((-1, 1), repeat=4):
            p = np.array([c[0] + signs[0] * hw[0] + 1j * signs[1] * hw[1],
                          c[1] + signs[2] * hw[2] + 1j * signs[3] * hw[3]])
            if not in_domain(domain, p):
                raise DomainError(f"region corner {p.tolist()} lies outside the {domain.kind}")


def _inside(domain: Domain, Z: np.ndarray, margin: float) -> np.ndarray:
    if domain.is_product:
        return np.all(np.abs(Z) < 1.0 - margin, axis=1)
    return np.linalg.norm(Z, axis=1) < 1.0 - margin


@dataclass
class MaximalityReport:
    h: float
    threshold: float
    n_points: int
    n_skipped: int
    max_abs_det: float
    quantiles: dict
    violations: list
    control_det: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "h": self.h,
            "threshold": self.threshold,
            "n_points": self.n_points,
            "n_skipped": self.n_skipped,
            "max_abs_det": self.max_abs_det,
            "quantiles": self.quantiles,
            "violations": self.violations,
            "control_det": self.control_det,
            "passed": self.passed,
        }


def smooth_mask(branches, Z: np.ndarray, h: float,
                factor: float = CROSSING_FACTOR) -> np.ndarray:
    """Points where every max in ``branches`` has a unique, stable winner.

    ``branches(Z)`` returns ``(N, m, 2)`` pairs of branch values. A point
    is kept when each pair differs by at least ``factor * h`` at the centre
    and the winning branch is the same at every stencil point.
    """
    S = _stencil(h)
    P = (Z[:, None, :] + S[None, :, :]).reshape(-1, 2)
    B = np.asarray(branches(P), dtype=float)
    B = B.reshape(Z.shape[0], S.shape[0], -1, 2)
    if B.shape[2] == 0:
        return np.ones(Z.shape[0], bool)
    with np.errstate(invalid="ignore"):
        gap = np.abs(B[:, 0, :, 0] - B[:, 0, :, 1])
        win = B[..., 0] >= B[..., 1]
    same = np.all(win == win[:, :1, :], axis=1)
    ok = np.where(np.isnan(gap), False, gap >= factor * h) | (
        np.isinf(B[:, 0, :, 0]) & np.isinf(B[:, 0, :, 1]))
    return np.all(ok & same, axis=1)


def maximality_scan(u, region: GridRegion, h: float = DEFAULT_H, branches=None,
                    C: float = DEFAULT_C, domain: Domain | None = None,
                    max_violations: int = 10) -> MaximalityReport:
    """Check ``det(dd^c u) ~ 0`` over a grid.

    Passes iff ``max|det| <= C h^2 * control`` where ``control`` is the
    discrete determinant of the control field (exactly 1 up to rounding).
    Points whose stencil leaves ``domain`` or touches ``-inf`` are dropped
    as are, when ``branches`` is given, points near a branch crossing.
    """
    if not h > 0:
        raise InvalidParameterError("h must be positive")
    Z = region.points(domain, margin=3 * h)
    n_total = Z.shape[0]
    if branches is not None and n_total:
        Z = Z[smooth_mask(branches, Z, h)]
    if Z.shape[0]:
        vals = _eval_stencil(u, Z, h)
        fin = np.all(np.isfinite(vals), axis=1)
        Z, vals = Z[fin], vals[fin]
    if Z.shape[0] == 0:
        raise EmptyGridError("no grid points left after exclusions")
    det = _det2(_hessians_from_values(vals, h))
    ctrl = float(_det2(complex_hessian(control_field, region.center, h)))
    threshold = C * h**2 * ctrl
    a = np.abs(det)
    order = np.argsort(-a, kind="stable")
    viol = [
        {"point": [Z[i, 0].real, Z[i, 0].imag, Z[i, 1].real, Z[i, 1].imag],
         "det": float(det[i])}
        for i in order[:max_violations] if a[i] > threshold
    ]
    q = {str(p): float(np.quantile(a, p)) for p in (0.5, 0.9, 0.99)}
    return MaximalityReport(
        h=h, threshold=threshold, n_points=int(Z.shape[0]),
        n_skipped=int(n_total - Z.shape[0]), max_abs_det=float(a.max()),
        quantiles=q, violations=viol, control_det=ctrl,
        passed=bool(a.max() <= threshold),
    )


def ma_values(u, Z, h: float = DEFAULT_H) -> np.ndarray:
    """Discrete determinant at each row of ``Z``; NaN where the stencil is singular."""
    Z, _ = _batch(Z)
    vals = _eval_stencil(u, Z, h)
    fin = np.all(np.isfinite(vals), axis=1)
    out = np.full(Z.shape[0], np.nan)
    if fin.any():
        out[fin] = _det2(_hessians_from_values(vals[fin], h))
    return out


def log_abs_z1(Z):
    """``log|z1|`` (``-inf`` on ``z1 = 0``)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    with np.errstate(divide="ignore"):
        return np.log(np.abs(Z[:, 0]))


# -- the ball's truncated log and its annulus problem ------------------------

def section3_u(z):
    """``max(log ||z||, -1)`` on the unit ball; float or array for a batch."""
    Z = np.asarray(z, dtype=complex)
    single = Z.ndim == 1
    Z = np.atleast_2d(Z)
    nrm = np.linalg.norm(Z, axis=1)
    if np.any(nrm >= 1.0) or not np.all(np.isfinite(nrm)):
        raise DomainError("point outside the open unit ball")
    with np.errstate(divide="ignore"):
        out = np.maximum(np.log(nrm), -1.0)
    return float(out[0]) if single else out


def annulus_coefficients(v, N: int = 32, quad: int = 1024) -> np.ndarray:
    """Fourier coefficients ``c_n`` of ``t -> v(e^{-1+it})`` for ``|n| <= N``.

    Trapezoid rule with ``quad`` nodes (an FFT). Returned array is indexed
    ``c[N + n]``.
    """
    if N < 1:
        raise InvalidParameterError("N must be >= 1")
    if quad < 2 * N + 1:
        raise InvalidParameterError("quad must exceed 2N")
    t = 2 * np.pi * np.arange(quad) / quad
    vals = np.asarray(v(np.exp(-1.0 + 1j * t)), dtype=complex)
    F = np.fft.fft(vals) / quad
    n = np.arange(-N, N + 1)
    return F[n % quad]


@dataclass(frozen=True)
class AnnulusSolution:
    """Truncated series for the harmonic ``H_t`` on ``t < |w| < e t``.

    ``coeffs[N + n]`` holds ``c_n``; ``tail`` is the bound used as the
    truncation tolerance (see :func:`annulus_from_data`).
    """

    t: float
    coeffs: np.ndarray
    tail: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        if c.size < 3 or c.size % 2 == 0:
            raise InvalidParameterError("coefficients must cover -N..N with N >= 1")
        object.__setattr__(self, "coeffs", c)
        if not 0.0 < self.t < np.exp(-1.0):
            raise InvalidParameterError("t must lie in (0, 1/e)")

    @property
    def N(self) -> int:
        return (self.coeffs.size - 1) // 2

    def c(self, n: int) -> complex:
        return complex(self.coeffs[self.N + n])

    @property
    def tolerance(self) -> float:
        return float(self.tail)


def annulus_from_data(v, t: float, N: int = 32, quad: int = 1024) -> AnnulusSolution:
    """Solution for boundary data ``v`` (harmonic on ``|w| <= 1/e``).

    The tolerance is ``sum_{N < |n| <= quad/2} |c_n| (e t)^|n|`` plus a
    rounding floor; ``(e t)^|n|`` is the largest modulus a truncated mode
    attains on the closed annulus.
    """
    M = quad // 2 - 1
    full = annulus_coefficients(v, M, quad)
    n = np.abs(np.arange(-M, M + 1))
    tail = np.abs(full) * (np.e * t) ** n
    tol = float(tail[n > N].sum()) + 64 * np.finfo(float).eps * float(np.abs(full).sum())
    return AnnulusSolution(t, full[M - N: M + N + 1], tol)


def annulus_solution(sol: AnnulusSolution, w, eps: float = 1e-12):
    """Evaluate the truncated ``H_t`` series at ``w`` (closed annulus)."""
    W = np.asarray(w, dtype=complex)
    scalar = W.ndim == 0
    W = np.atleast_1d(W)
    t = sol.t
    a = np.abs(W)
    if np.any(a < t * (1 - eps)) or np.any(a > np.e * t * (1 + eps)):
        raise DomainError("w must lie in the closed annulus t <= |w| <= e t")
    out = -sol.c(0).real * np.log(a / (np.e * t))
    for n in range(1, sol.N + 1):
        bracket = ((np.e * t / a) ** (2 * n) - 1.0) / (np.e ** (2 * n) - 1.0)
        term = sol.c(n) * (np.e * W) ** n + sol.c(-n) * (np.e * np.conj(W)) ** n
        out = out + term.real * bracket
    return float(out[0]) if scalar else out


def fourier_synthesis(sol: AnnulusSolution, w):
    """``sum_n c_n (e|w|)^|n| e^{i n arg w}``: the data ``v`` rebuilt from ``c_n``."""
    W = np.atleast_1d(np.asarray(w, dtype=complex))
    r, th = np.abs(W), np.angle(W)
    out = np.zeros(W.shape, dtype=complex)
    for n in range(-sol.N, sol.N + 1):
        out += sol.c(n) * (np.e * r) ** abs(n) * np.exp(1j * n * th)
    return out.real


# -- determinant formula in the (w1, w2) chart --------------------------------

def section3_hessian_det(g_coeffs, w) -> float:
    """``-|conj(w1) (D1 + D2 conj(w2) (1 + |w1|^2))|^2``.

    ``g_coeffs`` are ascending polynomial coefficients of ``g``; ``D_j`` is
    the ``j``-th derivative of ``g`` at ``conj(w2) (1 + |w1|^2)``.
    """
    w1, w2 = as_point(w, 2)
    p = np.polynomial.Polynomial(np.asarray(g_coeffs, dtype=complex))
    s = np.conj(w2) * (1.0 + abs(w1) ** 2)
    D1 = p.deriv(1)(s) if p.degree() >= 1 else 0.0
    D2 = p.deriv(2)(s) if p.degree() >= 2 else 0.0
    return float(-abs(np.conj(w1) * (D1 + D2 * np.conj(w2) * (1.0 + abs(w1) ** 2))) ** 2)


def h_tilde(g_coeffs):
    """Field ``w -> 2 Re g(conj(w2) (1 + |w1|^2))`` for polynomial ``g``."""
    p = np.polynomial.Polynomial(np.asarray(g_coeffs, dtype=complex))

    def field(W):
        W = np.atleast_2d(np.asarray(W, dtype=complex))
        s = np.conj(W[:, 1]) * (1.0 + np.abs(W[:, 0]) ** 2)
        return 2.0 * p(s).real

    return field


def slice_laplacian(u, z, xi, h: float = DEFAULT_H) -> np.ndarray:
    """Five-point Laplacian of ``lambda -> u(lambda z)`` at each ``xi``."""
    z = as_point(z)
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    offs = np.array([0, h, -h, 1j * h, -1j * h])
    L = (xi[:, None] + offs[None, :]).ravel()
    vals = np.asarray(u(L[:, None] * z[None, :]), dtype=float).reshape(xi.size, 5)
    return (vals[:, 1:].sum(axis=1) - 4 * vals[:, 0]) / h**2
