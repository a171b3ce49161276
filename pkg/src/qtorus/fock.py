"""The holomorphic Fock module over H_n and its crossed-product structure.

Test functions are closed-form evaluators f(x1, x2, T) on real coordinates,
with x = T x1 + x2.  The operators pi_w and u(g) wrap evaluators exactly, so
quadrature only enters through scalar products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import (
    AlgebraBundle,
    AlgebraElement,
    LatticePoint,
    eps_action,
    lattice_ball,
    quantum_theta_radius,
)
from .siegel import SiegelPoint, embed, real_form_matrix
from .symplectic import SymplecticMatrix, act_real, act_siegel
from .theta import TruncationParams

__all__ = [
    "TestFunction",
    "QuadratureGrid",
    "GridMismatchError",
    "constant_one",
    "monomial",
    "coherent",
    "scalar_product",
    "op_pi",
    "op_pi_algebra",
    "op_u",
    "algebra_inner",
    "composition_cocycle",
    "check_covariance",
    "conjugation_residual",
    "scalar_product_invariance",
    "lemma2_check",
    "inner_consistency_check",
    "DEFAULT_ORDER",
    "RESOLUTION",
]

DEFAULT_ORDER = {1: 40, 2: 20}
# coefficients of algebra_inner below this are under quadrature resolution
RESOLUTION = 1e-12


class GridMismatchError(ValueError):
    pass


Evaluator = Callable[[np.ndarray, np.ndarray, SiegelPoint], np.ndarray]


@dataclass(frozen=True)
class TestFunction:
    """f(x1, x2, T) evaluated on batches of real coordinates of shape (N, n)."""

    __test__ = False  # not a pytest class

    fn: Evaluator
    label: str

    def __call__(self, x1, x2, T: SiegelPoint) -> np.ndarray:
        x1 = np.atleast_2d(np.asarray(x1, dtype=float))
        x2 = np.atleast_2d(np.asarray(x2, dtype=float))
        return np.asarray(self.fn(x1, x2, T), dtype=complex)


def constant_one() -> TestFunction:
    return TestFunction(lambda x1, x2, T: np.ones(x1.shape[0], dtype=complex), "1")


def monomial(alpha: Sequence[int]) -> TestFunction:
    """x^alpha for a multi-index alpha."""
    alpha = tuple(int(a) for a in alpha)

    def fn(x1, x2, T):
        z = embed(x1, x2, T)
        return np.prod(z ** np.array(alpha), axis=-1)

    return TestFunction(fn, f"x^{alpha}")


def coherent(center) -> TestFunction:
    """exp(pi H_T(x, c)); holomorphic in x."""
    c = np.atleast_1d(np.asarray(center, dtype=complex))

    def fn(x1, x2, T):
        z = embed(x1, x2, T)
        return np.exp(np.pi * (z @ T.im_solve(np.conj(c))))

    return TestFunction(fn, f"coherent({c.tolist()})")


def op_pi(w: LatticePoint, f: TestFunction) -> TestFunction:
    """(pi_w f)(x, T) = exp(-pi H_T(x, w) - (pi/2) H_T(w, w)) f(x + w, T)."""
    w1 = np.array(w.w1, dtype=float)
    w2 = np.array(w.w2, dtype=float)

    def fn(x1, x2, T):
        z = embed(x1, x2, T)
        wz = embed(w1, w2, T)
        # H_T(x, w) = x^t [(Im T)^{-1} conj(w)]
        yw = T.im_solve(np.conj(wz))
        expo = -np.pi * (z @ yw) - 0.5 * np.pi * (wz @ yw).real
        return np.exp(expo) * f(x1 + w1, x2 + w2, T)

    return TestFunction(fn, f"pi_{w.vector}({f.label})")


def op_pi_algebra(a, f: TestFunction) -> TestFunction:
    """(pi(a) f)(x, T) = sum_w a(T)_w (pi_w f)(x, T).

    ``a`` is an :class:`AlgebraBundle`, or an :class:`AlgebraElement` pinned to
    its own fiber.
    """

    def fn(x1, x2, T):
        if isinstance(a, AlgebraBundle):
            elem = a(T)
        else:
            if not a.T.allclose(T, 1e-12):
                raise GridMismatchError("algebra element evaluated off its fiber")
            elem = a
        out = np.zeros(x1.shape[0], dtype=complex)
        for w, c in elem.coeffs.items():
            out += c * op_pi(w, f)(x1, x2, T)
        return out

    return TestFunction(fn, f"pi(a)({f.label})")


def op_u(g: SymplecticMatrix, f: TestFunction) -> TestFunction:
    """(u(g) f)(x, T) = f(g.x, g.T).  Composition: u(g) u(h) = u(hg)."""

    def fn(x1, x2, T):
        y1, y2 = act_real(g, x1, x2)
        return f(y1, y2, act_siegel(g, T))

    return TestFunction(fn, f"u({g.to_json()})({f.label})")


# --- quadrature ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor Gauss-Hermite rule for the weight exp(-pi H_T(x, x)) dx1 dx2.

    The real form q^t M q is Cholesky-factored, M = L L^t, and physicists'
    Hermite nodes s are mapped to q = L^{-t} s / sqrt(pi).
    """

    T: SiegelPoint
    order: int
    x1: np.ndarray
    x2: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, T: SiegelPoint, order: int | None = None) -> QuadratureGrid:
        n = T.n
        order = DEFAULT_ORDER.get(n, 12) if order is None else int(order)
        nodes, w = np.polynomial.hermite.hermgauss(order)
        d = 2 * n
        S = np.stack(np.meshgrid(*([nodes] * d), indexing="ij"), axis=-1).reshape(-1, d)
        W = np.prod(np.stack(np.meshgrid(*([w] * d), indexing="ij"), axis=-1).reshape(-1, d), axis=-1)
        M = real_form_matrix(T)
        L = np.linalg.cholesky(M)
        # q = L^{-t} s / sqrt(pi), dq = ds / (pi^n det L)
        Q = np.linalg.solve(L.T, S.T).T / math.sqrt(math.pi)
        weights = W / (math.pi**n * np.prod(np.diag(L)))
        return cls(T, order, Q[:, :n], Q[:, n:], weights)

    def total_mass(self) -> float:
        """Integral of the weight; equals 1 because the lattice has covolume 1."""
        return float(np.sum(self.weights))

    def integrate(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))


def _check_grid(grid: QuadratureGrid, T: SiegelPoint) -> None:
    if not grid.T.allclose(T, 1e-12):
        raise GridMismatchError("quadrature grid was built for a different fiber")


def scalar_product(f: TestFunction, h: TestFunction, T: SiegelPoint, grid: QuadratureGrid) -> complex:
    """<f, h>_T = integral f conj(h) exp(-pi H_T(x, x)) dnu."""
    _check_grid(grid, T)
    return grid.integrate(f(grid.x1, grid.x2, T) * np.conj(h(grid.x1, grid.x2, T)))


def algebra_inner(
    f: TestFunction,
    h: TestFunction,
    T: SiegelPoint,
    trunc: TruncationParams = TruncationParams(),
    grid: QuadratureGrid | None = None,
) -> AlgebraElement:
    """<<f, h>>(T) = sum_w <f, pi_w h>_T e(w) over the quantum-theta support ball."""
    grid = QuadratureGrid.build(T) if grid is None else grid
    _check_grid(grid, T)
    r, _ = quantum_theta_radius(T, trunc)
    fx = f(grid.x1, grid.x2, T)
    coeffs = {}
    for w in lattice_ball(T, r):
        coeffs[w] = grid.integrate(fx * np.conj(op_pi(w, h)(grid.x1, grid.x2, T)))
    return AlgebraElement(coeffs, T)


# --- consistency checks --------------------------------------------------------


def composition_cocycle(w: LatticePoint, v: LatticePoint, T: SiegelPoint, x1, x2, f: TestFunction | None = None) -> np.ndarray:
    """alpha(w, v) recovered as (pi_w pi_v f) / (pi_{w+v} f) at sample points."""
    f = coherent(np.zeros(T.n)) if f is None else f
    lhs = op_pi(w, op_pi(v, f))(x1, x2, T)
    rhs = op_pi(w + v, f)(x1, x2, T)
    return lhs / rhs


def _grouped(samples):
    for x1, x2, T in samples:
        yield np.atleast_2d(x1), np.atleast_2d(x2), T


def _pointwise_gap(lhs: TestFunction, rhs: TestFunction, samples) -> float:
    """max |lhs - rhs| / max(1, max |rhs|) per sample batch.

    Values of pi_w f grow like exp(pi H_T(x, w)), so an absolute gap would only
    measure the size of the sample points.
    """
    worst = 0.0
    for x1, x2, T in _grouped(samples):
        a, b = lhs(x1, x2, T), rhs(x1, x2, T)
        scale = max(1.0, float(np.max(np.abs(b))))
        worst = max(worst, float(np.max(np.abs(a - b))) / scale)
    return worst


def check_covariance(g: SymplecticMatrix, a: AlgebraBundle, f: TestFunction, samples) -> float:
    """Gap between u(g) pi(a) u(g^{-1}) f and pi(eps(g) a) f over (x1, x2, T) samples.

    Scaled as in :func:`_pointwise_gap`.
    """
    lhs = op_u(g, op_pi_algebra(a, op_u(g.inverse(), f)))
    rhs = op_pi_algebra(eps_action(g, a), f)
    return _pointwise_gap(lhs, rhs, samples)


def conjugation_residual(g: SymplecticMatrix, w: LatticePoint, f: TestFunction, samples) -> float:
    """Gap between u(g) pi_w u(g^{-1}) f and pi_{g^{-1}.w} f over samples."""
    lhs = op_u(g, op_pi(w, op_u(g.inverse(), f)))
    rhs = op_pi(w.act(g.inverse()), f)
    return _pointwise_gap(lhs, rhs, samples)


def scalar_product_invariance(g: SymplecticMatrix, f: TestFunction, h: TestFunction, T: SiegelPoint, order: int | None = None) -> float:
    """|<f, h>_{g.T} - <u(g) f, u(g) h>_T|, each side on its own grid."""
    gT = act_siegel(g, T)
    left = scalar_product(f, h, gT, QuadratureGrid.build(gT, order))
    right = scalar_product(op_u(g, f), op_u(g, h), T, QuadratureGrid.build(T, order))
    return float(abs(left - right))


def inner_consistency_check(
    g: SymplecticMatrix,
    f: TestFunction,
    h: TestFunction,
    T: SiegelPoint,
    trunc: TruncationParams = TruncationParams(),
    order: int | None = None,
) -> float:
    """Max coefficient gap between eps(g)<<f, h>> and <<u(g) f, u(g) h>> at T.

    The left side needs <<f, h>> at g.T, computed on a grid for that fiber and
    relabelled; for g in G_T both sides live over the same grid.
    """
    inner = AlgebraBundle(lambda S: algebra_inner(f, h, S, trunc, QuadratureGrid.build(S, order)))
    left = eps_action(g, inner)(T)
    right = algebra_inner(op_u(g, f), op_u(g, h), T, trunc, QuadratureGrid.build(T, order))
    return left.distance(right)


# interface name kept for callers that expect it
lemma2_check = scalar_product_invariance
