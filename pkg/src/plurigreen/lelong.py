"""Radial functional Psi_u(z, r) and Lelong number estimates.

Scalar fields are vectorised callables: ``u(Z)`` takes an ``(M, n)`` complex
array and returns ``M`` real values (``-inf`` allowed).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .complex_core import as_point
from .errors import DegenerateSliceError, InvalidParameterError

DEFAULT_SAMPLES = 256
MIN_SAMPLES = 16
#: Smallest radius of a default scan, relative to its largest radius.
DEFAULT_MIN_RATIO = 1e-4


def _circle(samples: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(samples) / samples)


def _circle_max(u, z: np.ndarray, r: float, samples: int) -> tuple[float, float]:
    """Max of ``u(xi z)`` over ``samples`` and over the even-indexed half."""
    xi = r * _circle(samples)
    vals = np.asarray(u(xi[:, None] * z[None, :]), dtype=float).reshape(samples)
    if np.any(np.isnan(vals)):
        raise InvalidParameterError("field returned NaN on the slice")
    if np.all(vals == -np.inf):
        raise DegenerateSliceError(f"u(xi z) is -inf at every sample of |xi| = {r}")
    return float(vals.max()), float(vals[::2].max())


def _check_radius(r) -> float:
    r = float(r)
    if not 0.0 < r < 1.0:
        raise InvalidParameterError(f"radius must lie in (0, 1), got {r}")
    return r


def psi(u, z, r: float, samples: int = DEFAULT_SAMPLES) -> float:
    """``(1 / log r) * max_{|xi| = r} u(xi z)`` over equispaced samples.

    The circle maximum equals the disc supremum for subharmonic slices.
    Sampling can only miss the true supremum from below, so the returned
    value errs upward.
    """
    r = _check_radius(r)
    if samples < MIN_SAMPLES:
        raise InvalidParameterError(f"need at least {MIN_SAMPLES} samples")
    m, _ = _circle_max(u, as_point(z), r, samples)
    return m / np.log(r)


@dataclass(frozen=True)
class RadialScan:
    """Decreasing radii for a fixed direction ``z``.

    ``values`` and ``errors`` are filled in by :func:`evaluate_scan`;
    ``errors[i]`` is the change in Psi when half of the circle samples are
    dropped, used as the sampling-error proxy.
    """

    z: np.ndarray
    radii: np.ndarray
    samples: int = DEFAULT_SAMPLES
    values: np.ndarray | None = field(default=None, compare=False)
    errors: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "z", as_point(self.z))
        radii = np.asarray(self.radii, dtype=float).ravel()
        if radii.size == 0:
            raise InvalidParameterError("scan needs at least one radius")
        if np.any(radii <= 0) or np.any(radii >= 1):
            raise InvalidParameterError("radii must lie in (0, 1)")
        if np.any(np.diff(radii) >= 0):
            raise InvalidParameterError("radii must be strictly decreasing")
        if self.samples < MIN_SAMPLES:
            raise InvalidParameterError(f"need at least {MIN_SAMPLES} samples per circle")
        object.__setattr__(self, "radii", radii)

    @classmethod
    def geometric(cls, z, r_max: float, count: int = 25, r_min: float | None = None,
                  samples: int = DEFAULT_SAMPLES) -> "RadialScan":
        """Log-spaced radii from ``r_max`` down to ``r_min``.

        ``r_min`` defaults to ``1e-4 * r_max``.
        """
        if r_min is None:
            r_min = DEFAULT_MIN_RATIO * r_max
        if count < 2:
            raise InvalidParameterError("count must be >= 2")
        radii = np.geomspace(r_max, r_min, count)
        return cls(z, radii, samples)

    @property
    def smallest_radius(self) -> float:
        return float(self.radii[-1])


def evaluate_scan(u, scan: RadialScan) -> RadialScan:
    """Return a copy of ``scan`` with Psi values and sampling errors."""
    vals = np.empty(scan.radii.size)
    errs = np.empty(scan.radii.size)
    for i, r in enumerate(scan.radii):
        m_full, m_half = _circle_max(u, scan.z, r, scan.samples)
        lr = np.log(r)
        vals[i] = m_full / lr
        errs[i] = abs(m_full - m_half) / abs(lr)
    return replace(scan, values=vals, errors=errs)


def monotone_ok(scan: RadialScan, factor: float = 10.0, floor: float = 1e-12) -> bool:
    """Psi non-increasing as the radius shrinks, up to ``factor`` sampling errors."""
    if scan.values is None:
        raise InvalidParameterError("scan has not been evaluated")
    v, e = scan.values, scan.errors
    if v.size < 2:
        return True
    slack = factor * np.maximum(e[:-1], e[1:]) + floor * np.maximum(1.0, np.abs(v[:-1]))
    return bool(np.all(v[1:] - v[:-1] <= slack))


def lelong_estimate(u, z=None, scan: RadialScan | None = None):
    """Lelong number estimate from a radial scan.

    Returns ``(alpha_hat, monotone_ok)``; ``alpha_hat`` is Psi at the
    smallest radius (no extrapolation). ``z`` may be omitted when the scan
    is given; otherwise a default geometric scan of direction ``z`` with
    ``r_max = 0.5`` is used.
    """
    if scan is None:
        if z is None:
            raise InvalidParameterError("need a direction or a scan")
        scan = RadialScan.geometric(z, 0.5)
    elif z is not None and not np.allclose(as_point(z), scan.z):
        raise InvalidParameterError("direction disagrees with the scan's direction")
    done = evaluate_scan(u, scan)
    return float(done.values[-1]), monotone_ok(done)


def log_bound_check(u, z, alpha: float, radii=None, samples: int = 64,
                    tol: float = 1e-12) -> bool:
    """True iff ``u(xi z) <= alpha log|xi| + tol`` at every sampled ``xi``.

    ``radii`` defaults to 40 values spread over (0, 1).
    """
    z = as_point(z)
    if radii is None:
        radii = np.concatenate([np.geomspace(1e-6, 0.5, 30), np.linspace(0.55, 0.999, 10)])
    radii = np.asarray(radii, dtype=float).ravel()
    if np.any(radii <= 0) or np.any(radii >= 1):
        raise InvalidParameterError("radii must lie in (0, 1)")
    xi = (radii[:, None] * _circle(samples)[None, :]).ravel()
    vals = np.asarray(u(xi[:, None] * z[None, :]), dtype=float)
    bound = alpha * np.log(np.abs(xi))
    return bool(np.all(vals <= bound + tol * np.maximum(1.0, np.abs(bound))))


def recenter(u, center, scale: float = 1.0):
    """Field ``zeta -> u(center + scale * zeta)``.

    With ``scale`` the radius of a ball around ``center`` inside the domain,
    the result lives on the unit ball and has its singularity at 0.
    """
    c = as_point(center)
    scale = float(scale)
    if scale <= 0:
        raise InvalidParameterError("scale must be positive")

    def shifted(Z):
        Z = np.asarray(Z, dtype=complex)
        return u(c + scale * Z)

    return shifted


def norm_log(Z):
    """``log ||z||`` row-wise (``-inf`` at the origin)."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    with np.errstate(divide="ignore"):
        return np.log(np.linalg.norm(Z, axis=1))


def slice_scale(domain, center, z) -> float:
    """Largest ``s`` with ``center + xi * s * z`` in the closed domain for ``|xi| <= 1``.

    Scanning along ``s * z`` puts the whole slice disc inside the domain,
    which is what makes Psi monotone for negative fields.
    """
    w = as_point(center, domain.n)
    z = as_point(z, domain.n)
    if not np.any(z):
        raise InvalidParameterError("direction must be non-zero")
    if domain.is_product:
        az = np.abs(z)
        nz = az > 0
        return float(np.min((1.0 - np.abs(w[nz])) / az[nz]))
    p = abs(np.vdot(z, w))
    zz = float(np.vdot(z, z).real)
    ww = float(np.vdot(w, w).real)
    return float((-p + np.sqrt(p * p + zz * (1.0 - ww))) / zz)
