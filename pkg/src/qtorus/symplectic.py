"""Exact integer arithmetic for Sp(2n, Z) and its actions.

Matrices are stored as tuples of Python ints so that membership tests and
equality never go through floating point.  Products use int64 numpy kernels
when the result provably fits, and fall back to object arrays otherwise.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .siegel import SiegelPoint

__all__ = [
    "SymplecticMatrix",
    "GroupWord",
    "DimensionError",
    "is_symplectic",
    "standard_form",
    "generator",
    "standard_generators",
    "theta_group_generators",
    "in_theta_group",
    "act_siegel",
    "act_coord",
    "act_real",
    "act_lattice",
    "stabilizer_search",
    "generated_group",
    "element_order",
    "random_word",
]

_INT64_SAFE = 2**62
COND_WARN = 1e12


class DimensionError(ValueError):
    pass


def _as_int_array(M) -> np.ndarray:
    arr = np.asarray(M)
    if arr.dtype == object:
        if not all(isinstance(v, (int, np.integer)) for v in arr.flat):
            raise TypeError("matrix entries must be integers")
        return arr
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise TypeError("matrix entries must be integers")
        arr = arr.astype(np.int64)
    return arr


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer product with overflow detection."""
    if a.size == 0 or b.size == 0:
        return a @ b
    bound = int(np.max(np.abs(a.astype(object)))) * int(np.max(np.abs(b.astype(object)))) * a.shape[-1]
    if bound < _INT64_SAFE and a.dtype != object and b.dtype != object:
        return a.astype(np.int64) @ b.astype(np.int64)
    return np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)


def standard_form(n: int) -> np.ndarray:
    """J = (0, -I; I, 0)."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    J[:n, n:] = -np.eye(n, dtype=np.int64)
    J[n:, :n] = np.eye(n, dtype=np.int64)
    return J


def is_symplectic(M) -> bool:
    """True iff M^t J M = J exactly."""
    arr = _as_int_array(M)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] % 2:
        raise DimensionError(f"side length {arr.shape[0]} is odd")
    J = standard_form(arr.shape[0] // 2)
    lhs = _matmul(_matmul(arr.T, J), arr)
    return bool(np.array_equal(np.asarray(lhs, dtype=object), J.astype(object)))


@dataclass(frozen=True)
class SymplecticMatrix:
    """An element of Sp(2n, Z), validated on construction."""

    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries, check: bool = True):
        rows = tuple(tuple(int(v) for v in row) for row in np.asarray(entries, dtype=object).tolist())
        object.__setattr__(self, "entries", rows)
        if check and not is_symplectic(self.array):
            raise ValueError("matrix is not symplectic")

    @classmethod
    def identity(cls, n: int) -> SymplecticMatrix:
        return cls(np.eye(2 * n, dtype=np.int64), check=False)

    @classmethod
    def J(cls, n: int) -> SymplecticMatrix:
        return cls(standard_form(n), check=False)

    @property
    def n(self) -> int:
        return len(self.entries) // 2

    @property
    def array(self) -> np.ndarray:
        flat = [v for row in self.entries for v in row]
        big = any(abs(v) >= _INT64_SAFE for v in flat)
        return np.array(self.entries, dtype=object if big else np.int64)

    @property
    def A(self) -> np.ndarray:
        return self.array[: self.n, : self.n]

    @property
    def B(self) -> np.ndarray:
        return self.array[: self.n, self.n :]

    @property
    def C(self) -> np.ndarray:
        return self.array[self.n :, : self.n]

    @property
    def D(self) -> np.ndarray:
        return self.array[self.n :, self.n :]

    def __matmul__(self, other: SymplecticMatrix) -> SymplecticMatrix:
        if other.n != self.n:
            raise DimensionError("block sizes differ")
        return SymplecticMatrix(_matmul(self.array, other.array), check=False)

    def __neg__(self) -> SymplecticMatrix:
        return SymplecticMatrix(-self.array, check=False)

    def inverse(self) -> SymplecticMatrix:
        # g^{-1} = J^{-1} g^t J = -J g^t J
        J = standard_form(self.n)
        return SymplecticMatrix(-_matmul(_matmul(J, self.array.T), J), check=False)

    def inverse_transpose(self) -> np.ndarray:
        return self.inverse().array.T

    def is_identity(self) -> bool:
        return self == SymplecticMatrix.identity(self.n)

    def float_blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        a = self.array.astype(float)
        n = self.n
        return a[:n, :n], a[:n, n:], a[n:, :n], a[n:, n:]

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.entries]

    @classmethod
    def from_json(cls, data) -> SymplecticMatrix:
        return cls(data)

    def __repr__(self) -> str:
        return f"SymplecticMatrix({self.to_json()})"


def _check_unimodular(A: np.ndarray) -> None:
    det = round(float(np.linalg.det(A.astype(float))))
    if det not in (1, -1):
        raise ValueError(f"A must lie in GL(n, Z); det = {det}")


def _int_inverse_unimodular(A: np.ndarray) -> np.ndarray:
    """Exact inverse of a unimodular integer matrix, verified by multiplication."""
    inv = np.rint(np.linalg.inv(A.astype(float))).astype(np.int64)
    if not np.array_equal(_matmul(A, inv), np.eye(len(A), dtype=np.int64)):
        raise ValueError("A is not invertible over Z")
    return inv


def generator(n: int, kind: str, param=None) -> SymplecticMatrix:
    """The three generator families of Sp(2n, Z).

    ``kind="i"``: (A, 0; 0, A^{-t}) for A in GL(n, Z);
    ``kind="ii"``: (I, B; 0, I) for symmetric integer B;
    ``kind="iii"``: J = (0, -I; I, 0).
    """
    if n < 1:
        raise DimensionError("n must be positive")
    I = np.eye(n, dtype=np.int64)
    Z = np.zeros((n, n), dtype=np.int64)
    if kind == "i":
        A = _as_int_array(np.atleast_2d(param))
        if A.shape != (n, n):
            raise DimensionError(f"A must be {n}x{n}")
        _check_unimodular(A)
        Ainv_t = _int_inverse_unimodular(A).T
        return SymplecticMatrix(np.block([[A, Z], [Z, Ainv_t]]), check=False)
    if kind == "ii":
        B = _as_int_array(np.atleast_2d(param))
        if B.shape != (n, n):
            raise DimensionError(f"B must be {n}x{n}")
        if not np.array_equal(B, B.T):
            raise ValueError("B must be symmetric")
        return SymplecticMatrix(np.block([[I, B], [Z, I]]), check=False)
    if kind == "iii":
        return SymplecticMatrix.J(n)
    raise ValueError(f"unknown generator kind {kind!r}")


@dataclass(frozen=True)
class GroupWord:
    """An ordered product of generator letters ``(kind, param)``."""

    letters: tuple[tuple[str, tuple | None], ...]
    n: int

    def evaluate(self) -> SymplecticMatrix:
        g = SymplecticMatrix.identity(self.n)
        for kind, param in self.letters:
            g = g @ generator(self.n, kind, None if param is None else np.array(param))
        return g

    def __len__(self) -> int:
        return len(self.letters)


def _freeze(M: np.ndarray) -> tuple:
    return tuple(tuple(int(v) for v in row) for row in M.tolist())


def standard_generators(n: int) -> list[tuple[str, tuple | None]]:
    """A finite generating alphabet used for word enumeration.

    kind i: -I, adjacent swaps, elementary transvections I +/- E_ij, sign flips;
    kind ii: +/- E_ii and +/- (E_ij + E_ji); kind iii: J.
    """
    letters: list[tuple[str, tuple | None]] = []
    I = np.eye(n, dtype=np.int64)
    letters.append(("i", _freeze(-I)))
    for a in range(n):
        if n > 1:
            flip = I.copy()
            flip[a, a] = -1
            letters.append(("i", _freeze(flip)))
    for a in range(n - 1):
        swap = I.copy()
        swap[[a, a + 1]] = swap[[a + 1, a]]
        letters.append(("i", _freeze(swap)))
    for a, b in itertools.permutations(range(n), 2):
        for s in (1, -1):
            E = I.copy()
            E[a, b] = s
            letters.append(("i", _freeze(E)))
    for a in range(n):
        for s in (1, -1):
            B = np.zeros((n, n), dtype=np.int64)
            B[a, a] = s
            letters.append(("ii", _freeze(B)))
    for a, b in itertools.combinations(range(n), 2):
        for s in (1, -1):
            B = np.zeros((n, n), dtype=np.int64)
            B[a, b] = B[b, a] = s
            letters.append(("ii", _freeze(B)))
    letters.append(("iii", None))
    return letters


def theta_group_generators(n: int) -> list[tuple[str, tuple | None]]:
    """Alphabet whose words stay in the theta group (B with even diagonal)."""
    letters = []
    for kind, param in standard_generators(n):
        if kind == "ii":
            B = np.array(param)
            if np.any(np.diag(B) != 0):
                B = 2 * B
            param = _freeze(B)
        letters.append((kind, param))
    return letters


def in_theta_group(g: SymplecticMatrix) -> bool:
    """True iff A B^t and C D^t have even diagonals."""
    A, B, C, D = g.A, g.B, g.C, g.D
    return bool(np.all(np.diag(_matmul(A, B.T)) % 2 == 0) and np.all(np.diag(_matmul(C, D.T)) % 2 == 0))


def random_word(n: int, length: int, rng: np.random.Generator, alphabet=None) -> GroupWord:
    alphabet = standard_generators(n) if alphabet is None else alphabet
    idx = rng.integers(len(alphabet), size=length)
    return GroupWord(tuple(alphabet[i] for i in idx), n)


# --- group actions -----------------------------------------------------------


def _automorphy(g: SymplecticMatrix, T: SiegelPoint) -> np.ndarray:
    A, B, C, D = g.float_blocks()
    return C @ T.matrix + D


def act_siegel(g: SymplecticMatrix, T: SiegelPoint) -> SiegelPoint:
    """g . T = (AT + B)(CT + D)^{-1}."""
    if g.n != T.n:
        raise DimensionError("g and T have different n")
    A, B, C, D = g.float_blocks()
    num = A @ T.matrix + B
    den = C @ T.matrix + D
    cond = np.linalg.cond(den)
    if not np.isfinite(cond) or cond > COND_WARN:
        warnings.warn(f"CT+D is ill-conditioned (cond={cond:.3g})", RuntimeWarning, stacklevel=2)
    # X den = num  <=>  den^t X^t = num^t
    X = np.linalg.solve(den.T, num.T).T
    return SiegelPoint(0.5 * (X + X.T), check=False)


def act_coord(g: SymplecticMatrix, z, T: SiegelPoint) -> np.ndarray:
    """(CT + D)^{-t} z; ``z`` may carry leading batch dimensions."""
    z = np.asarray(z, dtype=complex)
    den = _automorphy(g, T)
    return np.linalg.solve(den.T, z.T).T if z.ndim > 1 else np.linalg.solve(den.T, z)


def act_real(g: SymplecticMatrix, x1, x2) -> tuple[np.ndarray, np.ndarray]:
    """(x1; x2) -> g^{-t} (x1; x2); batched over leading dimensions."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    q = np.concatenate([x1, x2], axis=-1)
    # rows: q' = g^{-t} q  <=>  q'^t = q^t g^{-1}
    out = q @ g.inverse().array.astype(float)
    n = g.n
    return out[..., :n], out[..., n:]


def act_lattice(g: SymplecticMatrix, w: Sequence[int]) -> tuple[int, ...]:
    """Exact g^{-t} w on an integer 2n-vector."""
    vec = np.asarray(list(w), dtype=object)
    out = g.inverse_transpose().astype(object) @ vec
    return tuple(int(v) for v in out)


# --- stabilizers ---------------------------------------------------------------


def _batch_fixes(stack: np.ndarray, T: SiegelPoint, tol: float) -> np.ndarray:
    n = T.n
    g = stack.astype(float)
    A, B, C, D = g[:, :n, :n], g[:, :n, n:], g[:, n:, :n], g[:, n:, n:]
    num = A @ T.matrix + B
    den = C @ T.matrix + D
    X = np.swapaxes(np.linalg.solve(np.swapaxes(den, 1, 2), np.swapaxes(num, 1, 2)), 1, 2)
    err = np.max(np.abs(X - T.matrix), axis=(1, 2))
    return np.isfinite(err) & (err < tol)


def generated_group(elements: Iterable[SymplecticMatrix], max_size: int = 100_000) -> list[SymplecticMatrix]:
    """Closure under multiplication of a finite set of elements of a finite group."""
    elements = list(elements)
    if not elements:
        return []
    n = elements[0].n
    group = {SymplecticMatrix.identity(n)}
    frontier = list(group)
    gens = list(dict.fromkeys(elements))
    while frontier:
        new = []
        for a in frontier:
            for s in gens:
                p = a @ s
                if p not in group:
                    group.add(p)
                    new.append(p)
        if len(group) > max_size:
            raise RuntimeError("closure exceeded max_size; group is probably infinite")
        frontier = new
    return sorted(group, key=lambda m: m.entries)


def element_order(g: SymplecticMatrix, limit: int = 1000) -> int | None:
    """Multiplicative order of g, or None if above ``limit``."""
    e = SymplecticMatrix.identity(g.n)
    p = g
    for k in range(1, limit + 1):
        if p == e:
            return k
        p = p @ g
    return None


def stabilizer_search(
    T: SiegelPoint,
    max_word_length: int,
    tol: float = 1e-10,
    alphabet=None,
    close: bool = True,
) -> list[SymplecticMatrix]:
    """Elements g with g . T = T among generator words of bounded length.

    Words are enumerated breadth first with exact deduplication, so each
    distinct matrix is expanded once.  With ``close=True`` the result is the
    subgroup generated by the fixed elements found (stabilizers in Sp(2n, Z)
    are finite, so the closure terminates).
    """
    if max_word_length < 1:
        raise ValueError("max_word_length must be >= 1")
    n = T.n
    alphabet = standard_generators(n) if alphabet is None else alphabet
    gens = np.stack([generator(n, k, None if p is None else np.array(p)).array for k, p in alphabet]).astype(np.int64)
    eye = np.eye(2 * n, dtype=np.int64)
    seen = {eye.tobytes()}
    frontier = eye[None]
    fixed = [eye, -eye]
    for _ in range(max_word_length):
        bound = int(np.abs(frontier).max()) * int(np.abs(gens).max()) * 2 * n
        if bound >= _INT64_SAFE:
            raise OverflowError("word entries too large for checked int64 arithmetic")
        prods = np.einsum("aij,bjk->abik", frontier, gens).reshape(-1, 2 * n, 2 * n)
        prods = np.unique(prods, axis=0)
        keep = np.array([p.tobytes() not in seen for p in prods], dtype=bool)
        prods = prods[keep]
        if len(prods) == 0:
            break
        seen.update(p.tobytes() for p in prods)
        fixed.extend(prods[_batch_fixes(prods, T, tol)])
        frontier = prods
    found = {SymplecticMatrix(m, check=False) for m in fixed}
    if close:
        return generated_group(found)
    return sorted(found, key=lambda m: m.entries)
