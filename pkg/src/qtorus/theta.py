"""Classical theta functions on H_n and their symmetric variants.

All lattice sums run over an ellipsoid (k - c)^t Q (k - c) <= R^2 and carry a
rigorous bound on the omitted tail.  The bound counts lattice points in unit
shells around the centre, at most (2j + 3)^d in shell j, and weights each by
exp(-pi * max(R^2, lam_min * j^2)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .siegel import SiegelPoint, embed, hermitian_form, real_form_matrix
from .symplectic import SymplecticMatrix, act_coord, act_siegel

__all__ = [
    "TruncationParams",
    "TruncationError",
    "ThetaNearZeroError",
    "LatticeSum",
    "QuasiPeriod",
    "gaussian_tail_bound",
    "ellipsoid_points",
    "choose_radius",
    "theta",
    "theta_sum",
    "quasi_period_check",
    "modular_ratio",
    "averaged_theta",
    "averaged_theta_terms",
    "invariant_theta",
    "invariant_theta_sum",
]

MAX_RADIUS = 60.0


class TruncationError(RuntimeError):
    """The requested radius cannot meet the tail tolerance."""


class ThetaNearZeroError(ValueError):
    """theta(z, T) is too close to zero for a stable ratio."""


@dataclass(frozen=True)
class TruncationParams:
    """Lattice-ball radius (in the quadratic-form metric) and tail tolerance.

    ``radius=None`` picks the smallest radius, in steps of 0.25, whose tail
    bound meets ``tail_tolerance``.
    """

    radius: float | None = None
    tail_tolerance: float = 1e-14

    def __post_init__(self):
        if self.radius is not None and self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.tail_tolerance <= 0:
            raise ValueError("tail_tolerance must be positive")


@dataclass(frozen=True)
class LatticeSum:
    value: complex
    bound: float
    radius: float
    terms: int


@dataclass(frozen=True)
class QuasiPeriod:
    """lambda = T m for an integer vector m."""

    m: tuple[int, ...]
    T: SiegelPoint

    @property
    def vector(self) -> np.ndarray:
        return self.T.matrix @ np.asarray(self.m, dtype=float)


def gaussian_tail_bound(Q: np.ndarray, radius: float, decay: float = 1.0) -> float:
    """Upper bound on sum of exp(-pi*decay*q(k - c)) over k in Z^d with q > radius^2.

    Valid for any centre c.
    """
    d = Q.shape[0]
    lam = float(np.linalg.eigvalsh(Q)[0])
    if lam <= 0:
        raise ValueError("quadratic form is not positive definite")
    R2 = radius * radius
    total = 0.0
    j = 0
    while True:
        expo = -math.pi * decay * max(R2, lam * j * j)
        term = (2 * j + 3) ** d * math.exp(expo)
        total += term
        if lam * j * j > R2 and term < 1e-30 * max(total, 1e-300):
            break
        if j > 10_000_000:
            break
        j += 1
    return total


def choose_radius(Q: np.ndarray, tolerance: float, decay: float = 1.0, scale: float = 1.0) -> float:
    """Smallest radius on a 0.25 grid with scale * tail bound <= tolerance."""
    r = 0.25
    while r <= MAX_RADIUS:
        if scale * gaussian_tail_bound(Q, r, decay) <= tolerance:
            return r
        r += 0.25
    raise TruncationError(f"no radius up to {MAX_RADIUS} meets tail tolerance {tolerance:g}")


def _resolve_radius(Q, trunc: TruncationParams, decay: float = 1.0, scale: float = 1.0) -> tuple[float, float]:
    if trunc.radius is None:
        r = choose_radius(Q, trunc.tail_tolerance, decay, scale)
    else:
        r = float(trunc.radius)
    bound = scale * gaussian_tail_bound(Q, r, decay)
    if bound > trunc.tail_tolerance:
        raise TruncationError(
            f"radius {r:g} leaves a tail bound {bound:.3g} above tolerance {trunc.tail_tolerance:g}"
        )
    return r, bound


def ellipsoid_points(Q: np.ndarray, radius: float, center=None) -> np.ndarray:
    """Integer points k with (k - c)^t Q (k - c) <= radius^2, lexicographically ordered."""
    d = Q.shape[0]
    c = np.zeros(d) if center is None else np.asarray(center, dtype=float)
    half = radius * np.sqrt(np.diag(np.linalg.inv(Q)))
    axes = [np.arange(math.ceil(c[i] - half[i]), math.floor(c[i] + half[i]) + 1) for i in range(d)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    diff = grid - c
    q = np.einsum("ij,jk,ik->i", diff, Q, diff)
    return grid[q <= radius * radius + 1e-12]


# --- classical theta -----------------------------------------------------------


def theta_sum(z, T: SiegelPoint, trunc: TruncationParams = TruncationParams()) -> LatticeSum:
    """sum_k exp(pi i (k^t T k + 2 k^t z)) with its truncation bound.

    The ellipsoid is centred at the maximum of |term|, -Y^{-1} Im z.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (T.n,):
        raise ValueError(f"z must have shape ({T.n},)")
    Y = T.im
    c = -T.im_solve(z.imag)
    peak = float(z.imag @ T.im_solve(z.imag))
    scale = math.exp(math.pi * peak)
    r, bound = _resolve_radius(Y, trunc, scale=scale)
    k = ellipsoid_points(Y, r, c).astype(float)
    phase = np.einsum("ij,jk,ik->i", k, T.matrix, k) + 2 * (k @ z)
    terms = np.exp(1j * np.pi * phase)
    return LatticeSum(complex(np.sum(terms)), bound, r, len(k))


def theta(z, T: SiegelPoint, trunc: TruncationParams = TruncationParams()) -> complex:
    """Classical Riemann theta function theta(z, T)."""
    return theta_sum(z, T, trunc).value


def quasi_period_check(z, T: SiegelPoint, shift, trunc: TruncationParams = TruncationParams()) -> float:
    """Residual of the lattice transformation law.

    ``shift`` is either an integer vector (a period in Z^n, theta unchanged) or
    a :class:`QuasiPeriod` T m (theta picks up exp(-pi i m^t T m - 2 pi i m^t z)).
    The residual is divided by max(1, |theta(z + shift)|), since the
    quasi-periodic factor can make both sides very large.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    base = theta(z, T, trunc)
    if isinstance(shift, QuasiPeriod):
        m = np.asarray(shift.m, dtype=float)
        factor = np.exp(-1j * np.pi * (m @ T.matrix @ m) - 2j * np.pi * (m @ z))
        moved = theta(z + shift.vector, T, trunc)
        return float(abs(moved - factor * base) / max(1.0, abs(moved)))
    lam = np.atleast_1d(np.asarray(shift))
    if not np.all(np.equal(np.mod(lam, 1), 0)):
        raise ValueError("period shifts must be integer vectors")
    moved = theta(z + lam, T, trunc)
    return float(abs(moved - base) / max(1.0, abs(moved)))


def modular_ratio(
    g: SymplecticMatrix,
    z,
    T: SiegelPoint,
    trunc: TruncationParams = TruncationParams(),
    min_abs: float = 1e-6,
) -> complex:
    """theta(z', g.T) / [det(CT+D)^{1/2} exp(pi i z^t (CT+D)^{-1} C z) theta(z, T)].

    Uses the principal square root.  For g in the theta group the result is an
    eighth root of unity independent of z.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    base = theta(z, T, trunc)
    if abs(base) < min_abs:
        raise ThetaNearZeroError(f"|theta(z, T)| = {abs(base):.3g} at the sample point")
    A, B, C, D = g.float_blocks()
    P = C @ T.matrix + D
    zp = act_coord(g, z, T)
    Tp = act_siegel(g, T)
    quad = z @ np.linalg.solve(P, C @ z)
    denom = np.sqrt(complex(np.linalg.det(P))) * np.exp(1j * np.pi * quad) * base
    return complex(theta(zp, Tp, trunc) / denom)


def _check_closed(group: list[SymplecticMatrix]) -> None:
    members = set(group)
    for a in group:
        for b in group:
            if a @ b not in members:
                raise ValueError("group list is not closed under multiplication")


def averaged_theta_terms(
    z, T: SiegelPoint, group: list[SymplecticMatrix], trunc: TruncationParams = TruncationParams()
) -> dict[SymplecticMatrix, complex]:
    """Map g -> theta(g.z, g.T) for each g in a finite group."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    group = list(dict.fromkeys(group))
    _check_closed(group)
    return {g: theta(act_coord(g, z, T), act_siegel(g, T), trunc) for g in group}


def averaged_theta(z, T: SiegelPoint, group: list[SymplecticMatrix], trunc: TruncationParams = TruncationParams()) -> complex:
    """Group average sum_g theta(g.z, g.T) over a finite group."""
    terms = averaged_theta_terms(z, T, group, trunc)
    keys = sorted(terms, key=lambda g: g.entries)
    return complex(np.sum([terms[g] for g in keys]))


# --- invariant theta -----------------------------------------------------------


def invariant_theta_sum(x1, x2, T: SiegelPoint, trunc: TruncationParams = TruncationParams()) -> LatticeSum:
    """Full-lattice sum of exp(-pi H_T(k, k) + 2 pi i Im H_T(k, x)), k in Z^2n."""
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    M = real_form_matrix(T)
    r, bound = _resolve_radius(M, trunc)
    k = ellipsoid_points(M, r)
    n = T.n
    kz = embed(k[:, :n], k[:, n:], T)
    xz = embed(x1, x2, T)
    h_kk = np.real(hermitian_form(T, kz, kz))
    h_kx = hermitian_form(T, kz, np.broadcast_to(xz, kz.shape))
    terms = np.exp(-np.pi * h_kk + 2j * np.pi * np.imag(h_kx))
    return LatticeSum(complex(np.sum(terms)), bound, r, len(k))


def invariant_theta(x1, x2, T: SiegelPoint, trunc: TruncationParams = TruncationParams()) -> complex:
    return invariant_theta_sum(x1, x2, T, trunc).value
