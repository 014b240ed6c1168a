"""Fock-space enumeration and the permanent-based lift of mode unitaries.

An ``n``-photon, ``m``-mode linear optical network with scattering matrix
``S`` acts on the ``M = C(m+n-1, n)`` dimensional Fock space through the
multi-photon unitary ``phi(S)`` whose entries are

    <B|phi(S)|A> = Per(S_{B,A}) / sqrt(b_1! ... b_m! a_1! ... a_m!)

Creation operators transform as ``a_i^dag -> sum_j S[j, i] a_j^dag``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionMismatchError, NotUnitaryError, ResourceLimitError

DEFAULT_MAX_DIM = 512
MAX_PHOTONS = 20
UNITARY_ATOL = 1e-10

_FACTORIALS = np.array([float(math.factorial(k)) for k in range(MAX_PHOTONS + 1)])


@dataclass(frozen=True)
class FockState:
    """Occupation vector ``|n_1, ..., n_m>``."""

    occupations: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(k) for k in self.occupations)
        if any(k < 0 for k in occ):
            raise ValueError(f"negative occupation in {occ}")
        object.__setattr__(self, "occupations", occ)

    @property
    def total(self) -> int:
        return sum(self.occupations)

    @property
    def modes(self) -> int:
        return len(self.occupations)

    def __iter__(self) -> Iterator[int]:
        return iter(self.occupations)

    def __len__(self) -> int:
        return len(self.occupations)

    def __str__(self) -> str:
        return "|" + ",".join(map(str, self.occupations)) + ">"


def _as_fock_state(state) -> FockState:
    return state if isinstance(state, FockState) else FockState(tuple(state))


def _compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    # Decreasing lexicographic order, first mode most significant.
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    """Ordered basis of all ``n``-photon occupation vectors over ``m`` modes."""

    n: int
    m: int
    states: tuple[FockState, ...]
    _index: dict = field(repr=False, compare=False, hash=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    M = dim

    def index(self, state) -> int:
        """Position of ``state`` in the basis (dict lookup)."""
        key = tuple(state.occupations) if isinstance(state, FockState) else tuple(state)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"{key} is not a {self.n}-photon {self.m}-mode state") from None

    def occupation_array(self) -> np.ndarray:
        """``(M, m)`` integer array of occupations in basis order."""
        return np.array([s.occupations for s in self.states], dtype=int).reshape(self.dim, self.m)

    def __len__(self) -> int:
        return self.dim

    def __iter__(self) -> Iterator[FockState]:
        return iter(self.states)

    def __getitem__(self, i: int) -> FockState:
        return self.states[i]


def fock_dimension(n: int, m: int) -> int:
    return comb(m + n - 1, n)


def enumerate_fock_basis(n: int, m: int, max_dim: int = DEFAULT_MAX_DIM) -> FockBasis:
    """Enumerate the ``n``-photon ``m``-mode Fock basis.

    States are ordered decreasing-lexicographically, so for two photons in
    two modes the order is ``|2,0>, |1,1>, |0,2>``.

    Raises:
        ValueError: if ``m < 1`` or ``n < 0``.
        ResourceLimitError: if the dimension exceeds ``max_dim``.
    """
    if m < 1:
        raise ValueError("mode count must be at least 1")
    if n < 0:
        raise ValueError("photon number must be non-negative")
    if n > MAX_PHOTONS:
        raise ResourceLimitError(f"photon number {n} exceeds factorial table limit {MAX_PHOTONS}")
    dim = fock_dimension(n, m)
    if dim > max_dim:
        raise ResourceLimitError(f"Fock dimension M={dim} exceeds cap {max_dim}")
    states = tuple(FockState(occ) for occ in _compositions(n, m))
    index = {s.occupations: i for i, s in enumerate(states)}
    return FockBasis(n=n, m=m, states=states, _index=index)


def permanent(A) -> complex:
    """Permanent by Ryser's formula with Gray-code subset updates.

    Cost is ``O(2^k k)`` for a ``k x k`` matrix; the empty matrix has
    permanent 1.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"permanent needs a square matrix, got shape {A.shape}")
    k = A.shape[0]
    if k == 0:
        return 1.0 + 0j
    if k == 1:
        return complex(A[0, 0])

    row_sums = np.zeros(k, dtype=complex)
    in_subset = np.zeros(k, dtype=bool)
    total = 0j
    sign = 1.0  # (-1)^{|subset|}, subset starts empty
    gray_prev = 0
    for step in range(1, 1 << k):
        gray = step ^ (step >> 1)
        col = (gray ^ gray_prev).bit_length() - 1
        gray_prev = gray
        if in_subset[col]:
            row_sums -= A[:, col]
        else:
            row_sums += A[:, col]
        in_subset[col] = not in_subset[col]
        sign = -sign
        total += sign * np.prod(row_sums)
    return complex((-1) ** k * total)


def submatrix_for_transition(S, input_state, output_state) -> np.ndarray:
    """Build ``S_{B,A}``: column ``i`` repeated ``a_i`` times, then row ``j`` repeated ``b_j`` times."""
    S = _as_matrix(S)
    a = _as_fock_state(input_state)
    b = _as_fock_state(output_state)
    if a.total != b.total:
        raise DimensionMismatchError(f"photon number mismatch: {a} has {a.total}, {b} has {b.total}")
    if len(a) != S.shape[1] or len(b) != S.shape[0]:
        raise DimensionMismatchError("occupation vectors do not match the scattering matrix size")
    cols = np.repeat(np.arange(len(a)), a.occupations)
    rows = np.repeat(np.arange(len(b)), b.occupations)
    return S[np.ix_(rows, cols)]


@dataclass(frozen=True)
class ScatteringUnitary:
    """An ``m x m`` mode unitary, optionally with a Hermitian generator ``h`` (``S = exp(ih)``)."""

    matrix: np.ndarray
    generator: np.ndarray | None = None

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        check_unitary(mat)
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_generator(cls, h) -> "ScatteringUnitary":
        from scipy.linalg import expm

        h = np.array(h, dtype=complex)
        if not np.allclose(h, h.conj().T, atol=1e-10):
            raise ValueError("generator must be Hermitian")
        return cls(expm(1j * h), h)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class MultiPhotonUnitary:
    """The lifted ``M x M`` unitary together with the basis that indexes it."""

    matrix: np.ndarray
    basis: FockBasis

    @property
    def dim(self) -> int:
        return self.basis.dim

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, (ScatteringUnitary, MultiPhotonUnitary)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def check_unitary(U, atol: float = UNITARY_ATOL) -> None:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise NotUnitaryError(f"expected a square matrix, got shape {U.shape}")
    err = np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()
    if err >= atol:
        raise NotUnitaryError(f"matrix is not unitary: max|U^dag U - I| = {err:.2e}")


def photonic_homomorphism(S, n: int, max_dim: int = DEFAULT_MAX_DIM,
                          basis: FockBasis | None = None) -> MultiPhotonUnitary:
    """Lift a scattering unitary to the ``n``-photon Fock space.

    Args:
        S: ``m x m`` unitary (array or :class:`ScatteringUnitary`).
        n: photon number.
        max_dim: cap on the Fock dimension.
        basis: reuse a precomputed basis for ``(n, m)``.

    Returns:
        MultiPhotonUnitary with ``V[idx(B), idx(A)] = <B|phi(S)|A>``.
    """
    S = _as_matrix(S)
    check_unitary(S)
    m = S.shape[0]
    if basis is None:
        basis = enumerate_fock_basis(n, m, max_dim=max_dim)
    elif (basis.n, basis.m) != (n, m):
        raise DimensionMismatchError("basis does not match (n, m)")

    occ = basis.occupation_array()
    idx = [np.repeat(np.arange(m), row) for row in occ]
    norms = np.sqrt(np.prod(_FACTORIALS[occ], axis=1))
    dim = basis.dim
    V = np.empty((dim, dim), dtype=complex)
    for a in range(dim):
        S_A = S[:, idx[a]]
        for b in range(dim):
            V[b, a] = permanent(S_A[idx[b], :]) / (norms[a] * norms[b])
    V.setflags(write=False)
    return MultiPhotonUnitary(V, basis)


def random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``m x m`` unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def fock_state_vector(state: Sequence[int], basis: FockBasis) -> np.ndarray:
    vec = np.zeros(basis.dim, dtype=complex)
    vec[basis.index(state)] = 1.0
    return vec
