"""Verification suites shared by the CLI and the acceptance tests.

Each check yields a :class:`CheckResult`; a check passes when its residual is
below tolerance, or above it for the must-fail checks (``expect="above"``).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from . import algebra as alg
from . import fock
from .siegel import (
    SiegelPoint,
    hermitian_form,
    im_inversion_identity,
    im_transform_identity,
    hermitian_invariance_residual,
    random_siegel,
)
from .symplectic import (
    SymplecticMatrix,
    act_coord,
    act_real,
    act_siegel,
    element_order,
    generator,
    is_symplectic,
    random_word,
    stabilizer_search,
    standard_generators,
    theta_group_generators,
)
from .theta import (
    QuasiPeriod,
    ThetaNearZeroError,
    TruncationParams,
    averaged_theta,
    averaged_theta_terms,
    invariant_theta,
    modular_ratio,
    quasi_period_check,
)

__all__ = ["CheckResult", "SuiteConfig", "SUITES", "run_suite", "standard_fibers"]


@dataclass(frozen=True)
class CheckResult:
    check: str
    parameters: dict
    residual: float
    tolerance: float
    expect: str = "below"

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.residual):
            return False
        if self.expect == "above":
            return self.residual > self.tolerance
        return self.residual < self.tolerance

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "parameters": self.parameters,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "pass": self.passed,
        }


@dataclass
class SuiteConfig:
    seed: int = 0
    n: int | None = None
    T: SiegelPoint | None = None
    trunc: TruncationParams = field(default_factory=TruncationParams)
    order: int | None = None
    tol: float | None = None
    samples: int = 100

    def ns(self) -> list[int]:
        if self.T is not None:
            return [self.T.n]
        return [self.n] if self.n else [1, 2]

    def tolerance(self, default: float) -> float:
        return default if self.tol is None else self.tol


def standard_fibers() -> list[SiegelPoint]:
    return [SiegelPoint([[1j]]), SiegelPoint([[2j]]), SiegelPoint([[1 + 1j]])]


def _t(T: SiegelPoint) -> list:
    return T.to_json()


def _sample_x(rng, n, scale=1.0):
    return rng.normal(size=n) * scale, rng.normal(size=n) * scale


def _fiber(cfg: SuiteConfig, rng, n):
    return cfg.T if cfg.T is not None else random_siegel(n, rng)


# --- classical -----------------------------------------------------------------


def classical_checks(cfg: SuiteConfig) -> Iterator[CheckResult]:
    rng = np.random.default_rng(cfg.seed)
    for n in cfg.ns():
        worst_herm = worst_im = worst_aux = 0.0
        closure_ok = True
        for _ in range(cfg.samples):
            g = random_word(n, int(rng.integers(1, 5)), rng).evaluate()
            h = random_word(n, int(rng.integers(1, 5)), rng).evaluate()
            closure_ok &= is_symplectic((g @ h).array)
            T = _fiber(cfg, rng, n)
            worst_herm = max(worst_herm, hermitian_invariance_residual(g, T, _sample_x(rng, n), _sample_x(rng, n)))
            worst_im = max(worst_im, im_transform_identity(g, T))
            worst_aux = max(worst_aux, im_inversion_identity(T))
        yield CheckResult("symplectic_closure", {"n": n}, 0.0 if closure_ok else 1.0, 0.5)
        yield CheckResult("hermitian_invariance", {"n": n, "samples": cfg.samples}, worst_herm, cfg.tolerance(1e-10))
        yield CheckResult("im_transform", {"n": n, "samples": cfg.samples}, worst_im, cfg.tolerance(1e-10))
        yield CheckResult("im_inversion", {"n": n, "samples": cfg.samples}, worst_aux, cfg.tolerance(1e-10))

        # lattice transformation laws
        worst_period = 0.0
        for _ in range(10):
            T = _fiber(cfg, rng, n)
            z = rng.normal(size=n) * 0.5 + 1j * rng.normal(size=n) * 0.3
            shift = rng.integers(-2, 3, size=n)
            m = tuple(int(v) for v in rng.integers(-1, 2, size=n))
            worst_period = max(
                worst_period,
                quasi_period_check(z, T, shift, cfg.trunc),
                quasi_period_check(z, T, QuasiPeriod(m, T), cfg.trunc),
            )
        yield CheckResult("theta_quasi_periodicity", {"n": n}, worst_period, cfg.tolerance(1e-9))

        # modular law over theta-group generators and words
        alphabet = theta_group_generators(n)
        elements = [("generator", generator(n, k, None if p is None else np.array(p))) for k, p in alphabet]
        elements += [("word", random_word(n, int(rng.integers(2, 4)), rng, alphabet).evaluate()) for _ in range(5)]
        for label, g in elements:
            T = _fiber(cfg, rng, n)
            xis = []
            while len(xis) < 5:
                z = rng.normal(size=n) * 0.4 + 1j * rng.normal(size=n) * 0.2
                try:
                    xis.append(modular_ratio(g, z, T, cfg.trunc))
                except ThetaNearZeroError:
                    continue
            xis = np.array(xis)
            res = max(
                float(np.max(np.abs(np.abs(xis) - 1))),
                float(np.max(np.abs(xis**8 - 1))),
                float(np.max(np.abs(xis - xis[0]))),
            )
            yield CheckResult("modular_ratio", {"n": n, "kind": label, "g": g.to_json()}, res, cfg.tolerance(1e-7))

        # invariant theta
        worst_inv = 0.0
        for k, p in standard_generators(n):
            g = generator(n, k, None if p is None else np.array(p))
            T = _fiber(cfg, rng, n)
            x = _sample_x(rng, n, 0.5)
            base = invariant_theta(*x, T, cfg.trunc)
            worst_inv = max(worst_inv, abs(invariant_theta(*act_real(g, *x), act_siegel(g, T), cfg.trunc) - base))
            e = np.zeros(n)
            e[int(rng.integers(n))] = 1
            worst_inv = max(worst_inv, abs(invariant_theta(x[0] + e, x[1], T, cfg.trunc) - base))
            worst_inv = max(worst_inv, abs(invariant_theta(x[0], x[1] + e, T, cfg.trunc) - base))
        yield CheckResult("invariant_theta", {"n": n}, worst_inv, cfg.tolerance(1e-8))

    # group average over <J> at T = i
    Ti = SiegelPoint([[1j]])
    G = stabilizer_search(Ti, 1)
    J = SymplecticMatrix.J(1)
    z = np.array([0.23 + 0.11j])
    terms = averaged_theta_terms(z, Ti, G, cfg.trunc)
    moved = averaged_theta_terms(act_coord(J, z, Ti), Ti, G, cfg.trunc)
    perm = max(abs(moved[g] - terms[g @ J]) for g in G)
    yield CheckResult("averaged_theta_invariance", {"T": _t(Ti), "z": [z[0].real, z[0].imag]}, perm, cfg.tolerance(1e-12))
    gap = abs(averaged_theta(z + 1, Ti, G, cfg.trunc) - averaged_theta(z, Ti, G, cfg.trunc))
    yield CheckResult("averaged_theta_period_violation", {"T": _t(Ti)}, gap, 0.01, expect="above")


# --- quantum -------------------------------------------------------------------


def _fibers_for(cfg: SuiteConfig) -> list[SiegelPoint]:
    if cfg.T is not None:
        return [cfg.T]
    if cfg.n == 2:
        return [SiegelPoint(1j * np.eye(2)), SiegelPoint([[1 + 1.2j, 0.3 + 0.1j], [0.3 + 0.1j, 0.5 + 0.9j]])]
    return standard_fibers()


def quantum_checks(cfg: SuiteConfig) -> Iterator[CheckResult]:
    rng = np.random.default_rng(cfg.seed)
    for T in _fibers_for(cfg):
        n = T.n
        grid = fock.QuadratureGrid.build(T, cfg.order)
        yield CheckResult("grid_mass", {"T": _t(T)}, abs(grid.total_mass() - 1), cfg.tolerance(1e-8))

        small = [p for p in itertools.product(range(-2, 3), repeat=2 * n) if sum(v * v for v in p) <= 4]
        if n > 1:
            small = small[:: max(1, len(small) // 12)]
        pts = [alg.LatticePoint.from_vector(p) for p in small]
        x1, x2 = rng.normal(size=(5, n)) * 0.5, rng.normal(size=(5, n)) * 0.5
        worst = 0.0
        for w, v in itertools.product(pts, pts):
            oracle = fock.composition_cocycle(w, v, T, x1, x2)
            worst = max(worst, float(np.max(np.abs(oracle - alg.cocycle(T, w, v)))))
            worst = max(worst, abs(alg.cocycle_numeric(T, w, v) - alg.cocycle(T, w, v)))
        yield CheckResult("cocycle_composition_oracle", {"T": _t(T), "pairs": len(pts) ** 2}, worst, cfg.tolerance(1e-10))

        worst = 0.0
        for _ in range(50):
            a, b, c = (alg.AlgebraElement.generator(alg.LatticePoint.from_vector(rng.integers(-3, 4, size=2 * n)), T) for _ in range(3))
            worst = max(worst, ((a * b) * c).distance(a * (b * c)))
        yield CheckResult("algebra_associativity", {"T": _t(T)}, worst, cfg.tolerance(1e-12))

        one = fock.constant_one()
        # the radius-3 ball in dimension 4 has ~700 points; n = 2 uses radius 2
        radius = 3.0 if n == 1 else 2.0
        worst = 0.0
        for w in alg.lattice_ball(T, radius):
            q = fock.scalar_product(one, fock.op_pi(w, one), T, grid)
            exact = np.exp(-0.5 * np.pi * np.real(hermitian_form(T, w.embed(T), w.embed(T))))
            worst = max(worst, abs(q - exact))
        yield CheckResult("quantum_theta_oracle", {"T": _t(T), "radius": radius}, worst, cfg.tolerance(1e-7))

        if n == 1:
            qt = alg.quantum_theta(T, cfg.trunc)
            inner = fock.algebra_inner(one, one, T, cfg.trunc, grid)
            yield CheckResult("algebra_inner_is_quantum_theta", {"T": _t(T)}, qt.distance(inner), cfg.tolerance(1e-7))

        worst = 0.0
        for k, p in standard_generators(n)[:: max(1, len(standard_generators(n)) // 4)]:
            g = generator(n, k, None if p is None else np.array(p))
            for f, h in [(one, one), (fock.monomial([1] * n), fock.coherent([0.5] * n))]:
                worst = max(worst, fock.scalar_product_invariance(g, f, h, T, cfg.order))
        yield CheckResult("scalar_product_invariance", {"T": _t(T)}, worst, cfg.tolerance(1e-7))


# --- crossed -------------------------------------------------------------------


def crossed_checks(cfg: SuiteConfig) -> Iterator[CheckResult]:
    rng = np.random.default_rng(cfg.seed)
    T = cfg.T if cfg.T is not None else SiegelPoint([[1j]])
    n = T.n
    G = stabilizer_search(T, 2 if n > 1 else 4)
    x1, x2 = rng.normal(size=(5, n)) * 0.5, rng.normal(size=(5, n)) * 0.5
    samples = [(x1, x2, T)]
    one = fock.constant_one()

    worst_cov = worst_conj = 0.0
    qbundle = alg.AlgebraBundle(lambda S: alg.quantum_theta(S, alg.TruncationParams(tail_tolerance=1e-10)))
    for g in G:
        a = alg.AlgebraBundle.constant({alg.LatticePoint.from_vector([1] + [0] * (2 * n - 1)): 1.0})
        worst_cov = max(worst_cov, fock.check_covariance(g, a, one, samples))
        worst_cov = max(worst_cov, fock.check_covariance(g, qbundle, fock.coherent([0.2j] * n), samples))
        for _ in range(3):
            w = alg.LatticePoint.from_vector(rng.integers(-2, 3, size=2 * n))
            worst_conj = max(worst_conj, fock.conjugation_residual(g, w, fock.monomial([1] * n), samples))
    yield CheckResult("covariance", {"T": _t(T), "group_order": len(G)}, worst_cov, cfg.tolerance(1e-10))
    yield CheckResult("conjugation_identity", {"T": _t(T)}, worst_conj, cfg.tolerance(1e-10))

    # both sides share a G_T-invariant support, so n > 1 compares on the radius-3 ball only
    inner_trunc = cfg.trunc if n == 1 else TruncationParams(radius=3.0, tail_tolerance=1.0)
    worst = 0.0
    for g in G[:4]:
        worst = max(worst, fock.inner_consistency_check(g, one, one, T, inner_trunc, cfg.order))
    yield CheckResult("inner_product_consistency", {"T": _t(T)}, worst, cfg.tolerance(1e-7))

    qt = alg.quantum_theta(T, cfg.trunc)
    worst = max(alg.eps_action(g, qt).distance(qt) for g in G)
    yield CheckResult("quantum_theta_eps_invariance", {"T": _t(T), "group_order": len(G)}, worst, cfg.tolerance(1e-12))

    abelian = all(a @ b == b @ a for a in G for b in G)
    if abelian:
        worst = 0.0
        for _ in range(30):
            elems = []
            for _ in range(3):
                terms = {}
                for _ in range(int(rng.integers(1, 4))):
                    g = G[int(rng.integers(len(G)))]
                    w = alg.LatticePoint.from_vector(rng.integers(-2, 3, size=2 * n))
                    c = complex(rng.normal(), rng.normal())
                    terms[g] = terms[g] + alg.AlgebraElement.generator(w, T, c) if g in terms else alg.AlgebraElement.generator(w, T, c)
                elems.append(alg.CrossedElement(terms, T))
            b, c, d = elems
            worst = max(worst, ((b * c) * d).distance(b * (c * d)))
        yield CheckResult("crossed_associativity", {"T": _t(T)}, worst, cfg.tolerance(1e-12))

    orders = sorted(element_order(g) or 0 for g in G)
    yield CheckResult("stabilizer", {"T": _t(T), "order": len(G), "element_orders": orders}, 0.0, 0.5)


SUITES = {"classical": classical_checks, "quantum": quantum_checks, "crossed": crossed_checks}


def run_suite(name: str, cfg: SuiteConfig) -> Iterator[CheckResult]:
    names = list(SUITES) if name == "all" else [name]
    for key in names:
        yield from SUITES[key](cfg)
