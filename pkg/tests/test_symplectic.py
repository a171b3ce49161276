import json
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qtorus.siegel import SiegelPoint, embed, random_siegel
from qtorus.symplectic import (
    DimensionError,
    GroupWord,
    SymplecticMatrix,
    act_coord,
    act_lattice,
    act_real,
    act_siegel,
    element_order,
    generated_group,
    generator,
    in_theta_group,
    is_symplectic,
    random_word,
    stabilizer_search,
    standard_form,
    standard_generators,
    theta_group_generators,
)


def test_is_symplectic_examples():
    assert is_symplectic(np.eye(4, dtype=int))
    assert is_symplectic(standard_form(2))
    assert not is_symplectic(np.diag([2, 1, 1, 1]))


def test_is_symplectic_rejects_odd_side():
    with pytest.raises(DimensionError):
        is_symplectic(np.eye(3, dtype=int))


def test_generators_match_blocks():
    assert generator(1, "ii", [[1]]).to_json() == [[1, 1], [0, 1]]
    assert generator(1, "iii").to_json() == [[0, -1], [1, 0]]
    assert generator(2, "i", np.eye(2, dtype=int)) == SymplecticMatrix.identity(2)
    A = np.array([[1, 1], [0, 1]])
    g = generator(2, "i", A)
    assert np.array_equal(g.A, A)
    assert np.array_equal(g.D, np.array([[1, 0], [-1, 1]]))


@pytest.mark.parametrize(
    "kind,param",
    [("ii", [[0, 1], [0, 0]]), ("i", [[2, 0], [0, 1]]), ("i", [[1, 2], [2, 1]])],
)
def test_generator_rejects_bad_params(kind, param):
    with pytest.raises(ValueError):
        generator(2, kind, np.array(param))


def test_non_symplectic_matrix_rejected():
    with pytest.raises(ValueError):
        SymplecticMatrix([[2, 0], [0, 1]])


def test_inverse_is_exact(rng):
    for n in (1, 2, 3):
        for _ in range(20):
            g = random_word(n, 6, rng).evaluate()
            assert (g @ g.inverse()).is_identity()
            assert (g.inverse() @ g).is_identity()


def test_words_stay_symplectic(rng):
    for n in (1, 2):
        alphabet = standard_generators(n)
        for _ in range(100):
            g = random_word(n, int(rng.integers(1, 5)), rng, alphabet).evaluate()
            h = random_word(n, int(rng.integers(1, 5)), rng, alphabet).evaluate()
            assert is_symplectic((g @ h).array)


def test_large_entries_fall_back_to_python_ints():
    T = generator(1, "ii", [[2**40]])
    g = T @ T @ T @ T
    assert g.to_json() == [[1, 4 * 2**40], [0, 1]]
    big = SymplecticMatrix([[1, 2**70], [0, 1]])
    assert is_symplectic(big.array)
    assert (big @ big).entries[0][1] == 2**71


def test_group_word_evaluates_left_to_right():
    w = GroupWord((("iii", None), ("ii", ((1,),))), 1)
    assert w.evaluate() == generator(1, "iii") @ generator(1, "ii", [[1]])
    assert len(w) == 2


def test_act_siegel_examples():
    J = SymplecticMatrix.J(1)
    assert act_siegel(J, SiegelPoint([[1j]])).allclose(SiegelPoint([[1j]]), 1e-15)
    # -1/(2i) = i/2
    assert act_siegel(J, SiegelPoint([[2j]])).allclose(SiegelPoint([[0.5j]]), 1e-15)
    tau = SiegelPoint([[0.3 + 0.8j]])
    assert act_siegel(generator(1, "ii", [[2]]), tau).allclose(SiegelPoint([[2.3 + 0.8j]]), 1e-15)


def test_act_siegel_is_left_action(rng):
    worst = 0.0
    for i in range(100):
        n = 1 + i % 2
        g = random_word(n, 3, rng).evaluate()
        h = random_word(n, 3, rng).evaluate()
        T = random_siegel(n, rng)
        lhs = act_siegel(g, act_siegel(h, T))
        rhs = act_siegel(g @ h, T)
        assert np.allclose(lhs.matrix, lhs.matrix.T)
        assert np.all(np.linalg.eigvalsh(lhs.im) > 0)
        worst = max(worst, float(np.max(np.abs(lhs.matrix - rhs.matrix))))
    assert worst < 1e-10


def test_act_coord_examples(T_i):
    z = np.array([0.4 - 0.2j])
    assert np.allclose(act_coord(SymplecticMatrix.identity(1), z, T_i), z)
    # (C tau + D)^{-t} = 1/i = -i
    assert np.allclose(act_coord(SymplecticMatrix.J(1), z, T_i), -1j * z)
    T2 = SiegelPoint([[1 + 2j, 0.5], [0.5, 1j]])
    z2 = np.array([0.1 + 0.3j, -0.7j])
    assert np.allclose(act_coord(generator(2, "ii", [[1, 0], [0, 2]]), z2, T2), z2)


def test_act_real_examples():
    x1, x2 = np.array([0.3]), np.array([0.7])
    y1, y2 = act_real(SymplecticMatrix.identity(1), x1, x2)
    assert np.array_equal(y1, x1) and np.array_equal(y2, x2)
    # J^{-t} = J: (x1, x2) -> (-x2, x1)
    y1, y2 = act_real(SymplecticMatrix.J(1), x1, x2)
    assert np.allclose(y1, [-0.7]) and np.allclose(y2, [0.3])


def test_real_and_complex_actions_agree(rng, T_i):
    J = SymplecticMatrix.J(1)
    x1, x2 = np.array([0.3]), np.array([0.7])
    lhs = embed(*act_real(J, x1, x2), act_siegel(J, T_i))
    rhs = act_coord(J, embed(x1, x2, T_i), T_i)
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    for n in (1, 2):
        for _ in range(50):
            g = random_word(n, 4, rng).evaluate()
            T = random_siegel(n, rng)
            x1, x2 = rng.normal(size=n), rng.normal(size=n)
            lhs = embed(*act_real(g, x1, x2), act_siegel(g, T))
            rhs = act_coord(g, embed(x1, x2, T), T)
            assert np.max(np.abs(lhs - rhs)) < 1e-9 * (1 + np.max(np.abs(rhs)))


def test_act_lattice_composes_exactly(rng):
    for n in (1, 2):
        for _ in range(100):
            g = random_word(n, 4, rng).evaluate()
            h = random_word(n, 4, rng).evaluate()
            w = tuple(int(v) for v in rng.integers(-5, 6, size=2 * n))
            assert act_lattice(g, act_lattice(h, w)) == act_lattice(g @ h, w)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_act_real_composition_property(seed, n):
    rng = np.random.default_rng(seed)
    g = random_word(n, 3, rng).evaluate()
    h = random_word(n, 3, rng).evaluate()
    q = rng.integers(-9, 10, size=(4, 2 * n)).astype(float)
    a = act_real(g, *act_real(h, q[:, :n], q[:, n:]))
    b = act_real(g @ h, q[:, :n], q[:, n:])
    # integer inputs and integer matrices: exact in double precision
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


def test_ill_conditioned_action_warns():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        act_siegel(SymplecticMatrix.J(2), SiegelPoint(1j * np.eye(2)))
    # CT + D = T has condition number ~ 1/eps
    eps = 1e-14
    T = SiegelPoint([[1 + eps * 1j, 1], [1, 1 + eps * 1j]])
    with pytest.warns(RuntimeWarning):
        act_siegel(SymplecticMatrix.J(2), T)


def test_theta_group_membership():
    assert in_theta_group(SymplecticMatrix.J(2))
    assert in_theta_group(generator(1, "ii", [[2]]))
    assert not in_theta_group(generator(1, "ii", [[1]]))
    rng = np.random.default_rng(1)
    for n in (1, 2):
        for _ in range(30):
            assert in_theta_group(random_word(n, 4, rng, theta_group_generators(n)).evaluate())


def test_stabilizer_at_i_is_cyclic_of_order_four(T_i):
    J = SymplecticMatrix.J(1)
    G = stabilizer_search(T_i, 1)
    assert J in G
    assert len(G) == 4
    assert set(G) == {J, J @ J, J @ J @ J, SymplecticMatrix.identity(1)}
    assert element_order(J) == 4


def test_stabilizer_raw_words_contain_plus_minus_identity(T_i):
    G = stabilizer_search(T_i, 1, close=False)
    assert SymplecticMatrix.identity(1) in G and -SymplecticMatrix.identity(1) in G
    assert SymplecticMatrix.J(1) in G


def test_stabilizer_generic_point_is_trivial():
    T = SiegelPoint([[np.sqrt(2) / 7 + 1j * np.pi / 2.5]])
    G = stabilizer_search(T, 3)
    assert set(G) == {SymplecticMatrix.identity(1), -SymplecticMatrix.identity(1)}


def test_stabilizer_elements_fix_T():
    T = SiegelPoint(1j * np.eye(2))
    G = stabilizer_search(T, 3)
    for g in G:
        assert np.max(np.abs(act_siegel(g, T).matrix - T.matrix)) < 1e-10
    assert SymplecticMatrix.J(2) in G
    assert any(a @ b != b @ a for a in G for b in G)


def test_stabilizer_requires_positive_length(T_i):
    with pytest.raises(ValueError):
        stabilizer_search(T_i, 0)


def test_generated_group_closure():
    G = generated_group([SymplecticMatrix.J(1)])
    assert len(G) == 4


def test_json_round_trip():
    g = generator(2, "i", np.array([[0, 1], [1, 0]])) @ SymplecticMatrix.J(2)
    data = json.loads(json.dumps(g.to_json()))
    assert SymplecticMatrix.from_json(data) == g
