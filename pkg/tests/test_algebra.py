import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtorus.algebra import (
    AlgebraBundle,
    AlgebraElement,
    CrossedElement,
    FiberMismatchError,
    LatticePoint,
    NotInStabilizerError,
    cocycle,
    cocycle_numeric,
    crossed_mul,
    eps_action,
    lattice_ball,
    quantum_theta,
)
from qtorus.siegel import SiegelPoint, hermitian_form, random_siegel
from qtorus.symplectic import SymplecticMatrix, generator, stabilizer_search

lattice_vec = st.lists(st.integers(-6, 6), min_size=2, max_size=2)


def lp(*v):
    return LatticePoint.from_vector(v)


def test_lattice_point_basics():
    w = lp(1, -2)
    assert w + (-w) == LatticePoint.zero(1)
    assert w.vector == (1, -2) and w.n == 1
    with pytest.raises(ValueError):
        LatticePoint.from_vector([1, 2, 3])


def test_embed(T_i):
    assert np.allclose(lp(1, 0).embed(T_i), [1j])
    assert np.allclose(lp(0, 1).embed(T_i), [1])


def test_cocycle_values(T_i):
    # Im H_i((1,0), (0,1)) = 1
    assert cocycle(T_i, lp(1, 0), lp(0, 1)) == -1
    assert cocycle(T_i, lp(1, 0), lp(1, 0)) == 1
    assert cocycle(T_i, lp(0, 0), lp(3, -5)) == 1


@settings(max_examples=80, deadline=None)
@given(lattice_vec, lattice_vec, lattice_vec, st.integers(0, 2**32 - 1))
def test_cocycle_properties(a, b, c, seed):
    T = random_siegel(1, np.random.default_rng(seed))
    w, v, u = lp(*a), lp(*b), lp(*c)
    assert cocycle(T, w, v) in (1, -1)
    assert abs(cocycle_numeric(T, w, v) - cocycle(T, w, v)) < 1e-10
    # bicharacter, so in particular a 2-cocycle
    assert cocycle(T, w + v, u) == cocycle(T, w, u) * cocycle(T, v, u)
    assert cocycle(T, w, v) * cocycle(T, w + v, u) == cocycle(T, v, u) * cocycle(T, w, v + u)


def test_generators_commute_on_integer_lattice():
    # alpha(w, v) / alpha(v, w) = exp(-2 pi i (integer)) = 1 for any fiber
    for T in (SiegelPoint([[2j]]), SiegelPoint([[0.3 + 1.7j]])):
        for a, b in itertools.product(itertools.product(range(-2, 3), repeat=2), repeat=2):
            w, v = lp(*a), lp(*b)
            ew, ev = AlgebraElement.generator(w, T), AlgebraElement.generator(v, T)
            assert (ew * ev).distance(ev * ew) == 0
    T = SiegelPoint([[2j]])
    e1, e2 = AlgebraElement.generator(lp(1, 0), T), AlgebraElement.generator(lp(0, 1), T)
    assert (e1 * e2)[lp(1, 1)] == -1


def test_algebra_arithmetic(T_i):
    one = AlgebraElement.unit(T_i)
    a = AlgebraElement({lp(1, 0): 2.0, lp(0, 1): 1j}, T_i)
    assert (one * a).distance(a) == 0 and (a * one).distance(a) == 0
    assert (a - a).distance(AlgebraElement.zero(T_i)) == 0
    assert len(a - a) == 0
    assert (3 * a)[lp(1, 0)] == 6
    # (e1 + e2)^2 = e1^2 + e2^2 + e1 e2 + e2 e1 = e(2,0) + e(0,2) + (-1 - 1) e(1,1)
    s = AlgebraElement({lp(1, 0): 1, lp(0, 1): 1}, T_i)
    sq = s * s
    assert sq[lp(2, 0)] == 1 and sq[lp(0, 2)] == 1 and sq[lp(1, 1)] == -2


def test_fiber_mismatch():
    a = AlgebraElement.unit(SiegelPoint([[1j]]))
    b = AlgebraElement.unit(SiegelPoint([[2j]]))
    with pytest.raises(FiberMismatchError):
        a * b
    with pytest.raises(FiberMismatchError):
        a + b


def test_associativity_random(rng):
    for n in (1, 2):
        T = random_siegel(n, rng)
        for _ in range(20):
            a, b, c = (
                AlgebraElement({LatticePoint.from_vector(rng.integers(-3, 4, size=2 * n)): complex(*rng.normal(size=2)) for _ in range(3)}, T)
                for _ in range(3)
            )
            assert ((a * b) * c).distance(a * (b * c)) < 1e-12


def test_json_round_trip(T_i):
    a = AlgebraElement({lp(1, 0): 2.5 - 1j, lp(-3, 2): 0.25j}, T_i)
    back = AlgebraElement.from_json(json.loads(json.dumps(a.to_json())), T_i)
    assert back.distance(a) == 0


def test_quantum_theta_coefficients(T_i):
    qt = quantum_theta(T_i)
    assert qt[lp(0, 0)] == pytest.approx(1.0)
    assert qt[lp(1, 0)] == pytest.approx(math.exp(-math.pi / 2), abs=1e-15)
    assert qt[lp(1, 0)] == pytest.approx(0.20787957635076193, abs=1e-15)
    assert qt[lp(1, 1)] == pytest.approx(math.exp(-math.pi), abs=1e-15)
    # dropped mass is below the tail tolerance
    kept = sum(qt.coeffs.values())
    full = sum(math.exp(-math.pi / 2 * (a * a + b * b)) for a in range(-40, 41) for b in range(-40, 41))
    assert abs(full - kept) < 1e-13


def test_lattice_ball_metric(rng):
    T = random_siegel(1, rng)
    for w in lattice_ball(T, 2.0):
        z = w.embed(T)
        assert hermitian_form(T, z, z).real <= 4 + 1e-9


def test_eps_relabels_by_transpose(T_i):
    J = SymplecticMatrix.J(1)
    a = AlgebraElement.generator(lp(1, 2), T_i, 3.0)
    # eps(J) e(v) = e(J^t v), J^t (v1, v2) = (v2, -v1)
    assert eps_action(J, a).distance(AlgebraElement.generator(lp(2, -1), T_i, 3.0)) == 0


def test_eps_composition_is_reversed(T_i):
    a = AlgebraBundle.constant({lp(1, 2): 1.0, lp(-1, 0): 0.5})
    g = generator(1, "ii", [[1]])
    h = SymplecticMatrix.J(1)
    T = SiegelPoint([[0.2 + 1.3j]])
    lhs = eps_action(g, eps_action(h, a))(T)
    assert lhs.distance(eps_action(h @ g, a)(T)) == 0
    assert lhs.distance(eps_action(g @ h, a)(T)) > 0


def test_eps_on_element_requires_stabilizer(T_i):
    a = AlgebraElement.unit(T_i)
    with pytest.raises(NotInStabilizerError):
        eps_action(generator(1, "ii", [[1]]), a)


def test_quantum_theta_is_eps_invariant():
    for T in (SiegelPoint([[1j]]), SiegelPoint(1j * np.eye(2))):
        qt = quantum_theta(T)
        for g in stabilizer_search(T, 2):
            assert eps_action(g, qt).distance(qt) < 1e-12


def test_crossed_product_hand_expansion(T_i):
    J = SymplecticMatrix.J(1)
    b = CrossedElement.monomial(AlgebraElement.generator(lp(1, 0), T_i), J)
    c = CrossedElement.monomial(AlgebraElement.generator(lp(1, 2), T_i), J)
    # e(w) J * e(v) J = e(w) eps(J)(e(v)) J^2 = alpha(w, (2, -1)) e(3, -1) (-I)
    prod = crossed_mul(b, c)
    expected = CrossedElement.monomial(AlgebraElement.generator(lp(3, -1), T_i, -1.0), -SymplecticMatrix.identity(1))
    assert prod.distance(expected) == 0


def test_crossed_unit_and_validation(T_i):
    J = SymplecticMatrix.J(1)
    b = CrossedElement.monomial(AlgebraElement.generator(lp(1, 0), T_i, 2j), J)
    one = CrossedElement.unit(T_i)
    assert (one * b).distance(b) == 0 and (b * one).distance(b) == 0
    with pytest.raises(NotInStabilizerError):
        CrossedElement.monomial(AlgebraElement.unit(T_i), generator(1, "ii", [[1]]))
    data = json.loads(json.dumps(b.to_json()))
    assert CrossedElement.from_json(data, T_i).distance(b) == 0


def test_crossed_associativity_on_cyclic_stabilizer(T_i, rng):
    G = stabilizer_search(T_i, 1)
    for _ in range(30):
        elems = []
        for _ in range(3):
            terms = {}
            for g in rng.choice(len(G), size=2, replace=False):
                w = LatticePoint.from_vector(rng.integers(-2, 3, size=2))
                terms[G[g]] = AlgebraElement.generator(w, T_i, complex(*rng.normal(size=2)))
            elems.append(CrossedElement(terms, T_i))
        b, c, d = elems
        assert ((b * c) * d).distance(b * (c * d)) < 1e-12
