"""The noncommutative torus algebra S(D) over a fiber T and its crossed products.

D is Z^n x Z^n, with w = (w1, w2) embedded as T w1 + w2.  Generators multiply as
e(w) e(v) = alpha(w, v) e(w + v) where alpha(w, v) = exp(-pi i Im H_T(w, v)).
This closed form comes from composing the operators pi_w of the Fock module;
:mod:`qtorus.fock` recovers it numerically from operator composition.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .siegel import SiegelPoint, embed, hermitian_form, real_form_matrix
from .symplectic import SymplecticMatrix, act_lattice, act_siegel
from .theta import TruncationParams, _resolve_radius, ellipsoid_points

__all__ = [
    "LatticePoint",
    "AlgebraElement",
    "AlgebraBundle",
    "CrossedElement",
    "FiberMismatchError",
    "NotInStabilizerError",
    "PRUNE",
    "cocycle",
    "cocycle_numeric",
    "algebra_mul",
    "eps_action",
    "quantum_theta",
    "quantum_theta_radius",
    "crossed_mul",
    "lattice_ball",
]

PRUNE = 1e-15
STABILIZER_TOL = 1e-10


class FiberMismatchError(ValueError):
    pass


class NotInStabilizerError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class LatticePoint:
    w1: tuple[int, ...]
    w2: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "w1", tuple(int(v) for v in self.w1))
        object.__setattr__(self, "w2", tuple(int(v) for v in self.w2))
        if len(self.w1) != len(self.w2):
            raise ValueError("w1 and w2 must have the same length")

    @classmethod
    def from_vector(cls, v: Iterable[int]) -> LatticePoint:
        v = [int(a) for a in v]
        n = len(v) // 2
        return cls(tuple(v[:n]), tuple(v[n:]))

    @classmethod
    def zero(cls, n: int) -> LatticePoint:
        return cls((0,) * n, (0,) * n)

    @property
    def n(self) -> int:
        return len(self.w1)

    @property
    def vector(self) -> tuple[int, ...]:
        return self.w1 + self.w2

    def __add__(self, other: LatticePoint) -> LatticePoint:
        return LatticePoint.from_vector(a + b for a, b in zip(self.vector, other.vector))

    def __neg__(self) -> LatticePoint:
        return LatticePoint.from_vector(-a for a in self.vector)

    def embed(self, T: SiegelPoint) -> np.ndarray:
        return embed(np.array(self.w1, float), np.array(self.w2, float), T)

    def act(self, g: SymplecticMatrix) -> LatticePoint:
        """g . w = g^{-t} w, exact."""
        return LatticePoint.from_vector(act_lattice(g, self.vector))


def cocycle(T: SiegelPoint, w: LatticePoint, v: LatticePoint) -> complex:
    """alpha(w, v) = exp(-pi i Im H_T(w, v)).

    Im H_T(w, v) = w1.v2 - w2.v1 for every T, so the integer pairing is used
    directly and alpha is exactly +1 or -1 on D.
    """
    pairing = sum(a * b for a, b in zip(w.w1, v.w2)) - sum(a * b for a, b in zip(w.w2, v.w1))
    return 1.0 + 0j if pairing % 2 == 0 else -1.0 + 0j


def cocycle_numeric(T: SiegelPoint, w: LatticePoint, v: LatticePoint) -> complex:
    """alpha evaluated through the Hermitian form in floating point."""
    h = hermitian_form(T, w.embed(T), v.embed(T))
    return cmath.exp(-1j * math.pi * h.imag)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Finite sum sum_w a_w e(w) over the fiber T."""

    coeffs: Mapping[LatticePoint, complex]
    T: SiegelPoint

    def __init__(self, coeffs: Mapping[LatticePoint, complex], T: SiegelPoint, prune: float = PRUNE):
        kept = {w: complex(c) for w, c in coeffs.items() if abs(c) > prune}
        object.__setattr__(self, "coeffs", dict(sorted(kept.items())))
        object.__setattr__(self, "T", T)

    @classmethod
    def generator(cls, w: LatticePoint, T: SiegelPoint, coeff: complex = 1.0) -> AlgebraElement:
        return cls({w: coeff}, T)

    @classmethod
    def unit(cls, T: SiegelPoint) -> AlgebraElement:
        return cls.generator(LatticePoint.zero(T.n), T)

    @classmethod
    def zero(cls, T: SiegelPoint) -> AlgebraElement:
        return cls({}, T)

    def __getitem__(self, w: LatticePoint) -> complex:
        return self.coeffs.get(w, 0j)

    def __len__(self) -> int:
        return len(self.coeffs)

    def _same_fiber(self, other: AlgebraElement) -> None:
        if not self.T.allclose(other.T, 1e-12):
            raise FiberMismatchError("elements live over different fibers")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._same_fiber(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            out[w] = out.get(w, 0j) + c
        return AlgebraElement(out, self.T)

    def __sub__(self, other: AlgebraElement) -> AlgebraElement:
        return self + (-1) * other

    def __rmul__(self, scalar: complex) -> AlgebraElement:
        return AlgebraElement({w: scalar * c for w, c in self.coeffs.items()}, self.T)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return algebra_mul(self, other)
        return self.__rmul__(other)

    def distance(self, other: AlgebraElement) -> float:
        """Max coefficient difference over the union of supports."""
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self[w] - other[w]) for w in keys), default=0.0)

    def to_json(self) -> list[dict]:
        return [
            {"w1": list(w.w1), "w2": list(w.w2), "re": c.real, "im": c.imag}
            for w, c in self.coeffs.items()
        ]

    @classmethod
    def from_json(cls, data, T: SiegelPoint) -> AlgebraElement:
        return cls({LatticePoint(d["w1"], d["w2"]): complex(d["re"], d["im"]) for d in data}, T)


def algebra_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Twisted convolution: (ab)_u = sum_{w+v=u} a_w b_v alpha(w, v)."""
    a._same_fiber(b)
    out: dict[LatticePoint, complex] = {}
    for w, aw in a.coeffs.items():
        for v, bv in b.coeffs.items():
            u = w + v
            out[u] = out.get(u, 0j) + aw * bv * cocycle(a.T, w, v)
    return AlgebraElement(out, a.T)


@dataclass(frozen=True)
class AlgebraBundle:
    """A section T -> AlgebraElement over H_n."""

    section: Callable[[SiegelPoint], AlgebraElement]

    def __call__(self, T: SiegelPoint) -> AlgebraElement:
        return self.section(T)

    @classmethod
    def constant(cls, coeffs: Mapping[LatticePoint, complex]) -> AlgebraBundle:
        return cls(lambda T: AlgebraElement(coeffs, T))


def _relabel(g: SymplecticMatrix, a: AlgebraElement, T: SiegelPoint) -> AlgebraElement:
    ginv = g.inverse()
    return AlgebraElement({w.act(ginv): c for w, c in a.coeffs.items()}, T)


def eps_action(g: SymplecticMatrix, a):
    """(eps(g) a)(T) = sum_w a_{g.T, w} e(g^{-1}.w).

    On an :class:`AlgebraBundle` this returns the transformed section.  On a
    single :class:`AlgebraElement` over T it requires g.T = T and relabels the
    support.  Note eps(g) eps(h) = eps(hg).
    """
    if isinstance(a, AlgebraBundle):
        return AlgebraBundle(lambda T: _relabel(g, a(act_siegel(g, T)), T))
    if not act_siegel(g, a.T).allclose(a.T, STABILIZER_TOL):
        raise NotInStabilizerError("g does not fix the fiber T")
    return _relabel(g, a, a.T)


def lattice_ball(T: SiegelPoint, radius: float) -> list[LatticePoint]:
    """Lattice points with H_T(w, w) <= radius^2."""
    pts = ellipsoid_points(real_form_matrix(T), radius)
    return [LatticePoint.from_vector(p) for p in pts]


def quantum_theta(T: SiegelPoint, trunc: TruncationParams = TruncationParams()) -> AlgebraElement:
    """sum_w exp(-(pi/2) H_T(w, w)) e(w) over a truncated H_T-ball."""
    M = real_form_matrix(T)
    r, _ = _resolve_radius(M, trunc, decay=0.5)
    pts = ellipsoid_points(M, r)
    n = T.n
    z = embed(pts[:, :n].astype(float), pts[:, n:].astype(float), T)
    h = np.real(hermitian_form(T, z, z))
    coeffs = np.exp(-0.5 * np.pi * h)
    return AlgebraElement({LatticePoint.from_vector(p): c for p, c in zip(pts, coeffs)}, T)


def quantum_theta_radius(T: SiegelPoint, trunc: TruncationParams = TruncationParams()) -> tuple[float, float]:
    """(radius, tail bound) used by :func:`quantum_theta`."""
    return _resolve_radius(real_form_matrix(T), trunc, decay=0.5)


@dataclass(frozen=True, eq=False)
class CrossedElement:
    """Finite sum sum_g b_g g with b_g in S(D) over a common fiber, g in G_T."""

    terms: Mapping[SymplecticMatrix, AlgebraElement]
    T: SiegelPoint

    def __init__(self, terms: Mapping[SymplecticMatrix, AlgebraElement], T: SiegelPoint):
        for g, b in terms.items():
            if not act_siegel(g, T).allclose(T, STABILIZER_TOL):
                raise NotInStabilizerError(f"{g} does not fix T")
            if not b.T.allclose(T, 1e-12):
                raise FiberMismatchError("coefficient over a different fiber")
        kept = {g: b for g, b in terms.items() if len(b)}
        object.__setattr__(self, "terms", dict(sorted(kept.items(), key=lambda kv: kv[0].entries)))
        object.__setattr__(self, "T", T)

    @classmethod
    def unit(cls, T: SiegelPoint) -> CrossedElement:
        return cls({SymplecticMatrix.identity(T.n): AlgebraElement.unit(T)}, T)

    @classmethod
    def monomial(cls, b: AlgebraElement, g: SymplecticMatrix) -> CrossedElement:
        return cls({g: b}, b.T)

    def __getitem__(self, g: SymplecticMatrix) -> AlgebraElement:
        return self.terms.get(g, AlgebraElement.zero(self.T))

    def __add__(self, other: CrossedElement) -> CrossedElement:
        out = dict(self.terms)
        for g, b in other.terms.items():
            out[g] = out[g] + b if g in out else b
        return CrossedElement(out, self.T)

    def __mul__(self, other: CrossedElement) -> CrossedElement:
        return crossed_mul(self, other)

    def distance(self, other: CrossedElement) -> float:
        keys = set(self.terms) | set(other.terms)
        return max((self[g].distance(other[g]) for g in keys), default=0.0)

    def to_json(self) -> list[dict]:
        return [{"g": g.to_json(), "element": b.to_json()} for g, b in self.terms.items()]

    @classmethod
    def from_json(cls, data, T: SiegelPoint) -> CrossedElement:
        return cls({SymplecticMatrix(d["g"]): AlgebraElement.from_json(d["element"], T) for d in data}, T)


def crossed_mul(b: CrossedElement, c: CrossedElement) -> CrossedElement:
    """d_h = sum_g b_g eps(g)(c_{g^{-1} h}).

    Associative whenever eps restricted to the labels involved is a homomorphism.
    Since eps(g) eps(h) = eps(hg), that holds on abelian subgroups such as <J>.
    """
    if not b.T.allclose(c.T, 1e-12):
        raise FiberMismatchError("crossed elements over different fibers")
    out: dict[SymplecticMatrix, AlgebraElement] = {}
    for g, bg in b.terms.items():
        for k, ck in c.terms.items():
            h = g @ k
            term = algebra_mul(bg, eps_action(g, ck))
            out[h] = out[h] + term if h in out else term
    return CrossedElement(out, b.T)
