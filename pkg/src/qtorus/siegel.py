"""Geometry of the Siegel upper half space.

Points x = (x1, x2) of R^n x R^n embed into C^n as T x1 + x2.  The Hermitian
form H_T(s, z) = s^t (Im T)^{-1} conj(z) is evaluated through a Cholesky
factor of Im T; no explicit inverse is formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

__all__ = [
    "SiegelPoint",
    "NotSiegelError",
    "embed",
    "hermitian_form",
    "real_form_matrix",
    "symplectic_pairing",
    "im_transform_identity",
    "im_inversion_identity",
    "hermitian_invariance_residual",
    "lemma1_residual",
    "random_siegel",
]

SYMMETRY_TOL = 1e-12


class NotSiegelError(ValueError):
    """T is not symmetric or Im T is not positive definite."""


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """Complex symmetric n x n matrix with positive-definite imaginary part."""

    matrix: np.ndarray

    def __init__(self, T, check: bool = True):
        T = np.atleast_2d(np.asarray(T, dtype=complex)).copy()
        T.setflags(write=False)
        object.__setattr__(self, "matrix", T)
        if check:
            self._validate()

    def _validate(self) -> None:
        T = self.matrix
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise NotSiegelError(f"T must be square, got shape {T.shape}")
        if not np.all(np.isfinite(T)):
            raise NotSiegelError("T has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(T))))
        if np.max(np.abs(T - T.T)) > SYMMETRY_TOL * scale:
            raise NotSiegelError("T is not symmetric")
        try:
            cho_factor(self.im, lower=True)
        except LinAlgError as exc:
            raise NotSiegelError("Im T is not positive definite") from exc

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def re(self) -> np.ndarray:
        return self.matrix.real

    @property
    def im(self) -> np.ndarray:
        return 0.5 * (self.matrix.imag + self.matrix.imag.T)

    @cached_property
    def _im_cho(self):
        return cho_factor(self.im, lower=True)

    def im_solve(self, b: np.ndarray) -> np.ndarray:
        """(Im T)^{-1} b for b of shape (n,) or (n, k)."""
        return cho_solve(self._im_cho, b)

    def allclose(self, other: SiegelPoint, tol: float = 1e-10) -> bool:
        return self.n == other.n and float(np.max(np.abs(self.matrix - other.matrix))) <= tol

    def to_json(self) -> list:
        return [[[float(v.real), float(v.imag)] for v in row] for row in self.matrix]

    @classmethod
    def from_json(cls, data) -> SiegelPoint:
        arr = np.asarray(data, dtype=float)
        if arr.ndim == 3 and arr.shape[-1] == 2:
            return cls(arr[..., 0] + 1j * arr[..., 1])
        if arr.shape == (1, 2):
            # shorthand for n = 1: [[re, im]]
            return cls([[arr[0, 0] + 1j * arr[0, 1]]])
        if arr.ndim == 1 and arr.shape == (2,):
            return cls([[arr[0] + 1j * arr[1]]])
        raise NotSiegelError(f"cannot read a Siegel point from an array of shape {arr.shape}")

    def __repr__(self) -> str:
        return f"SiegelPoint({self.matrix.tolist()})"


def random_siegel(n: int, rng: np.random.Generator, spread: float = 0.5) -> SiegelPoint:
    """A random, reasonably conditioned point of H_n."""
    X = rng.uniform(-spread, spread, size=(n, n))
    X = 0.5 * (X + X.T)
    R = rng.uniform(-spread, spread, size=(n, n))
    Y = R @ R.T + rng.uniform(0.6, 1.4) * np.eye(n)
    return SiegelPoint(X + 1j * Y)


def embed(x1, x2, T: SiegelPoint) -> np.ndarray:
    """T x1 + x2, batched over leading dimensions."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if x1.shape != x2.shape or x1.shape[-1] != T.n:
        raise ValueError(f"coordinate shapes {x1.shape}, {x2.shape} do not match n={T.n}")
    return x1 @ T.matrix.T + x2


def hermitian_form(T: SiegelPoint, s, z) -> np.ndarray | complex:
    """H_T(s, z) = s^t (Im T)^{-1} conj(z); broadcast over leading dimensions."""
    s = np.asarray(s, dtype=complex)
    z = np.asarray(z, dtype=complex)
    s, z = np.broadcast_arrays(s, z)
    lead = s.shape[:-1]
    zc = np.conj(z).reshape(-1, T.n).T
    solved = T.im_solve(zc).T.reshape(*lead, T.n)
    out = np.sum(s * solved, axis=-1)
    return complex(out) if out.ndim == 0 else out


def real_form_matrix(T: SiegelPoint) -> np.ndarray:
    """Real symmetric M with H_T(x, x) = q^t M q, q = (x1, x2).

    With T = X + iY: M = [[X Y^-1 X + Y, X Y^-1], [Y^-1 X, Y^-1]], det M = 1.
    """
    X, Y = T.re, T.im
    YiX = T.im_solve(X)
    Yi = T.im_solve(np.eye(T.n))
    M = np.block([[X @ YiX + Y, YiX.T], [YiX, Yi]])
    return 0.5 * (M + M.T)


def symplectic_pairing(T: SiegelPoint, k1, k2, x1, x2, tol: float = 1e-10) -> float:
    """Im H_T(k, x); asserted equal to the T-free value k1.x2 - k2.x1."""
    kz = embed(k1, k2, T)
    xz = embed(x1, x2, T)
    val = float(np.imag(hermitian_form(T, kz, xz)))
    exact = float(np.dot(k1, x2) - np.dot(k2, x1))
    assert abs(val - exact) < tol * max(1.0, abs(exact)), (val, exact)
    return val


def im_transform_identity(g, T: SiegelPoint) -> float:
    """|| Im(g.T) - (C conj(T) + D)^{-t} Im T (CT + D)^{-1} ||."""
    from .symplectic import act_siegel

    A, B, C, D = g.float_blocks()
    left = act_siegel(g, T).im
    P = C @ T.matrix + D
    Pbar = C @ np.conj(T.matrix) + D
    # (Pbar)^{-t} Y P^{-1}
    right = np.linalg.solve(Pbar.T, np.linalg.solve(P.T, T.im.T).T)
    return float(np.max(np.abs(left - right)))


def im_inversion_identity(T: SiegelPoint) -> float:
    """Residual of Im(-T^{-1}) = conj(T)^{-1} (Im T) T^{-1}, checked directly."""
    Tp = -np.linalg.solve(T.matrix, np.eye(T.n))
    right = np.linalg.solve(np.conj(T.matrix), np.linalg.solve(T.matrix.T, T.im.T).T)
    # equivalently conj(T) Im(T') T = Im T
    return float(max(np.max(np.abs(Tp.imag - right)), np.max(np.abs(np.conj(T.matrix) @ Tp.imag @ T.matrix - T.im))))


def hermitian_invariance_residual(g, T: SiegelPoint, x, y) -> float:
    """|H_T(x, y) - H_{g.T}(g.x, g.y)| for real coordinate pairs x, y."""
    from .symplectic import act_real, act_siegel

    gT = act_siegel(g, T)
    left = hermitian_form(T, embed(*x, T), embed(*y, T))
    gx = act_real(g, *x)
    gy = act_real(g, *y)
    right = hermitian_form(gT, embed(*gx, gT), embed(*gy, gT))
    return float(abs(left - right))


# interface name kept for callers that expect it
lemma1_residual = hermitian_invariance_residual
