"""Disc automorphisms, Blaschke products and domain predicates.

Scalars are plain Python/numpy complex numbers and points of C^n are 1-d
complex arrays. Pole values are the IEEE ``-inf``; every routine in the
package keeps that marker intact (no clipping to large negative floats).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, InvalidParameterError

NEG_INF = float("-inf")
POS_INF = float("inf")

#: Slack used by all open-domain membership tests.
BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class Domain:
    """Model domain tag: ``disc``, ``bidisc``, ``polydisc`` or ``ball``."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("disc", "bidisc", "polydisc", "ball"):
            raise InvalidParameterError(f"unknown domain kind {self.kind!r}")
        expected = {"disc": 1, "bidisc": 2}.get(self.kind)
        if expected is not None and self.n != expected:
            raise InvalidParameterError(f"{self.kind} has dimension {expected}, got {self.n}")
        if self.kind in ("polydisc", "ball") and self.n < 2:
            raise InvalidParameterError(f"{self.kind} needs n >= 2, got {self.n}")

    @classmethod
    def unit_disc(cls) -> "Domain":
        return cls("disc", 1)

    @classmethod
    def bidisc(cls) -> "Domain":
        return cls("bidisc", 2)

    @classmethod
    def polydisc(cls, n: int) -> "Domain":
        return cls("polydisc", n)

    @classmethod
    def unit_ball(cls, n: int) -> "Domain":
        return cls("ball", n)

    @property
    def is_product(self) -> bool:
        return self.kind in ("disc", "bidisc", "polydisc")


def as_point(z, n: int | None = None) -> np.ndarray:
    """Coerce ``z`` to a 1-d complex array, optionally checking its length."""
    p = np.atleast_1d(np.asarray(z, dtype=complex))
    if p.ndim != 1:
        raise DimensionError(f"a point must be 1-d, got shape {p.shape}")
    if n is not None and p.shape[0] != n:
        raise DimensionError(f"expected {n} coordinates, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise InvalidParameterError("point has non-finite coordinates")
    return p


def _check_in_disc(a, name: str = "a") -> complex:
    a = complex(a)
    if not (np.isfinite(a.real) and np.isfinite(a.imag)) or abs(a) >= 1.0:
        raise InvalidParameterError(f"{name} must lie in the open unit disc, got {a!r}")
    return a


def _check_in_closed_disc(z, eps: float = BOUNDARY_EPS):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)) or np.any(np.abs(z) > 1.0 + eps):
        raise InvalidParameterError("argument must lie in the closed unit disc")
    return z


def mobius(a, z):
    """Disc automorphism ``(z - a) / (1 - conj(a) z)``.

    Accepts scalar or array ``z``; returns the same shape. ``mobius(-a, .)``
    is the inverse map.
    """
    a = _check_in_disc(a)
    z = _check_in_closed_disc(z)
    w = (z - a) / (1.0 - np.conj(a) * z)
    return complex(w) if w.ndim == 0 else w


def disc_green(a, z):
    """Green function of the unit disc with pole ``a``: ``log|mobius(a, z)|``.

    Exactly ``-inf`` at ``z == a``.
    """
    w = mobius(a, z)
    with np.errstate(divide="ignore"):
        out = np.log(np.abs(w))
    return float(out) if np.ndim(out) == 0 else out


def blaschke_eval(zeros, rotation, zeta):
    """Finite Blaschke product ``rotation * prod_j mobius(zeros[j], zeta)``."""
    rotation = complex(rotation)
    if abs(rotation) > 1.0 + BOUNDARY_EPS:
        raise InvalidParameterError(f"|rotation| must be <= 1, got {abs(rotation)}")
    zeta = _check_in_closed_disc(zeta)
    out = np.full(zeta.shape, rotation, dtype=complex)
    for zj in zeros:
        out = out * mobius(_check_in_disc(zj, "Blaschke zero"), zeta)
    return complex(out) if out.ndim == 0 else out


def in_domain(domain: Domain, z, eps: float = BOUNDARY_EPS) -> bool:
    """Strict membership in the open domain, with ``eps`` slack at the boundary."""
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if z.shape[-1] != domain.n:
        raise DimensionError(f"{domain.kind} expects {domain.n} coordinates, got {z.shape[-1]}")
    if domain.is_product:
        return bool(np.all(np.abs(z) < 1.0 - eps))
    return bool(np.sum(np.abs(z) ** 2) < 1.0 - eps)


def require_in_domain(domain: Domain, z, eps: float = BOUNDARY_EPS) -> np.ndarray:
    z = as_point(z, domain.n)
    if not in_domain(domain, z, eps):
        raise DomainError(f"point {z.tolist()} is not inside the open {domain.kind}")
    return z
