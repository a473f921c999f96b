"""Qubit and oscillator operators on a truncated product space.

Basis ordering: qubit factors first (qubit 0 slowest), Fock factor last.
Each qubit factor is ordered (up, down) so that ``sigma_z = diag(+1, -1)``.
All operators are real; the lone ``sigma_y`` is refused.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import BasisMismatchError, ComplexOperatorError

UP = 0
DOWN = 1


@dataclass(frozen=True)
class BasisSpec:
    """Shape of the truncated Hilbert space ``(C^2)^n_qubits (x) C^N``."""

    n_qubits: int
    fock_cutoff: int

    def __post_init__(self):
        if int(self.n_qubits) != self.n_qubits or self.n_qubits < 0:
            raise ValueError(f"n_qubits must be a non-negative integer, got {self.n_qubits}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 1:
            raise ValueError(f"fock_cutoff must be a positive integer, got {self.fock_cutoff}")

    @property
    def dim(self) -> int:
        return 2**self.n_qubits * self.fock_cutoff

    def index(self, spins: Sequence[int], n: int) -> int:
        """Flat index of ``|s_0, ..., s_{k-1}, n>`` with ``s = UP (0)`` or ``DOWN (1)``."""
        if len(spins) != self.n_qubits:
            raise ValueError(f"expected {self.n_qubits} spin labels, got {len(spins)}")
        if not 0 <= n < self.fock_cutoff:
            raise ValueError(f"Fock level {n} outside 0..{self.fock_cutoff - 1}")
        q = 0
        for s in spins:
            if s not in (UP, DOWN):
                raise ValueError(f"spin label must be 0 (up) or 1 (down), got {s}")
            q = 2 * q + s
        return q * self.fock_cutoff + n

    def label(self, index: int) -> tuple[tuple[int, ...], int]:
        if not 0 <= index < self.dim:
            raise IndexError(index)
        q, n = divmod(index, self.fock_cutoff)
        spins = tuple((q >> (self.n_qubits - 1 - k)) & 1 for k in range(self.n_qubits))
        return spins, n

    def labels(self) -> list[tuple[tuple[int, ...], int]]:
        return [
            (spins, n)
            for spins in itertools.product((UP, DOWN), repeat=self.n_qubits)
            for n in range(self.fock_cutoff)
        ]

    def fock_levels(self) -> np.ndarray:
        """Fock quantum number of every basis index."""
        return np.tile(np.arange(self.fock_cutoff), 2**self.n_qubits)

    def interior(self, margin: int) -> np.ndarray:
        """Indices whose Fock level is at most ``N - margin``."""
        return np.flatnonzero(self.fock_levels() <= self.fock_cutoff - margin)


class Symmetry(enum.Enum):
    SYMMETRIC = "symmetric"
    ANTISYMMETRIC = "antisymmetric"
    GENERAL = "general"


def _detect_symmetry(data: np.ndarray) -> Symmetry:
    if np.array_equal(data, data.T):
        return Symmetry.SYMMETRIC
    if np.array_equal(data, -data.T):
        return Symmetry.ANTISYMMETRIC
    return Symmetry.GENERAL


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense real matrix over a :class:`BasisSpec`.

    ``symmetry`` is detected exactly from the data when not given. Passing
    ``SYMMETRIC`` or ``ANTISYMMETRIC`` explicitly projects the data onto that
    part, which is exact for matrices that are (anti)symmetric up to rounding.
    """

    basis: BasisSpec
    data: np.ndarray
    symmetry: Symmetry = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.shape != (self.basis.dim, self.basis.dim):
            raise BasisMismatchError(
                f"data shape {data.shape} does not match basis dimension {self.basis.dim}"
            )
        if self.symmetry is Symmetry.SYMMETRIC:
            data = 0.5 * (data + data.T)
        elif self.symmetry is Symmetry.ANTISYMMETRIC:
            data = 0.5 * (data - data.T)
        sym = self.symmetry if self.symmetry is not None else _detect_symmetry(data)
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "symmetry", sym)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def T(self) -> Operator:
        return Operator(self.basis, self.data.T)

    def _check(self, other: Operator) -> None:
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if other.basis != self.basis:
            raise BasisMismatchError(f"basis mismatch: {self.basis} vs {other.basis}")

    def __matmul__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.basis, self.data @ other.data)

    def __add__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.basis, self.data + other.data)

    def __sub__(self, other: Operator) -> Operator:
        self._check(other)
        return Operator(self.basis, self.data - other.data)

    def __neg__(self) -> Operator:
        return Operator(self.basis, -self.data)

    def __mul__(self, c: float) -> Operator:
        return Operator(self.basis, float(c) * self.data)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"Operator(n_qubits={self.basis.n_qubits}, N={self.basis.fock_cutoff}, {self.symmetry.value})"


class PauliAxis(enum.Enum):
    X = "x"
    Y = "y"
    Z = "z"
    PLUS = "plus"
    MINUS = "minus"


_PAULI = {
    PauliAxis.X: np.array([[0.0, 1.0], [1.0, 0.0]]),
    PauliAxis.Z: np.array([[1.0, 0.0], [0.0, -1.0]]),
    # sigma^+ = |up><down|
    PauliAxis.PLUS: np.array([[0.0, 1.0], [0.0, 0.0]]),
    PauliAxis.MINUS: np.array([[0.0, 0.0], [1.0, 0.0]]),
}


def _embed(basis: BasisSpec, qubit_factors: dict[int, np.ndarray], fock_factor: np.ndarray | None) -> np.ndarray:
    factors = [qubit_factors.get(k, np.eye(2)) for k in range(basis.n_qubits)]
    factors.append(np.eye(basis.fock_cutoff) if fock_factor is None else fock_factor)
    return reduce(np.kron, factors)


def identity(basis: BasisSpec) -> Operator:
    return Operator(basis, np.eye(basis.dim))


def zero(basis: BasisSpec) -> Operator:
    return Operator(basis, np.zeros((basis.dim, basis.dim)))


def annihilator(basis: BasisSpec) -> Operator:
    """Truncated ``a`` with ``<n-1|a|n> = sqrt(n)``, identity on the qubits."""
    a = np.diag(np.sqrt(np.arange(1, basis.fock_cutoff, dtype=float)), 1)
    return Operator(basis, _embed(basis, {}, a))


def creator(basis: BasisSpec) -> Operator:
    return annihilator(basis).T


def number(basis: BasisSpec) -> Operator:
    return Operator(basis, np.diag(basis.fock_levels().astype(float)))


def position(basis: BasisSpec) -> Operator:
    """``a + a^dagger`` (dimensionless quadrature)."""
    a = annihilator(basis)
    return Operator(basis, a.data + a.data.T, Symmetry.SYMMETRIC)


def pauli(basis: BasisSpec, qubit_index: int, axis: PauliAxis | str) -> Operator:
    axis = PauliAxis(axis)
    if axis is PauliAxis.Y:
        raise ComplexOperatorError("complex operator unsupported: lone sigma_y is not real")
    if not 0 <= qubit_index < basis.n_qubits:
        raise IndexError(f"qubit_index {qubit_index} outside 0..{basis.n_qubits - 1}")
    return Operator(basis, _embed(basis, {qubit_index: _PAULI[axis]}, None))


def commutator(a: Operator, b: Operator) -> Operator:
    a._check(b)
    return Operator(a.basis, a.data @ b.data - b.data @ a.data)


def apply_composite(terms: Iterable[tuple[float, Operator]]) -> Operator:
    """Weighted sum ``sum_i c_i A_i`` over operators sharing one basis."""
    terms = list(terms)
    if not terms:
        raise ValueError("apply_composite needs at least one term")
    basis = terms[0][1].basis
    out = np.zeros((basis.dim, basis.dim))
    for c, op in terms:
        if op.basis != basis:
            raise BasisMismatchError(f"basis mismatch: {basis} vs {op.basis}")
        out += float(c) * op.data
    return Operator(basis, out)


def rotating(basis: BasisSpec, qubit_index: int, sign: int) -> Operator:
    """``X_pm = sigma^- a^dagger pm sigma^+ a`` on one qubit."""
    a = annihilator(basis).data
    sm = pauli(basis, qubit_index, PauliAxis.MINUS).data
    sp = pauli(basis, qubit_index, PauliAxis.PLUS).data
    return Operator(basis, sm @ a.T + sign * (sp @ a))


def counter_rotating(basis: BasisSpec, qubit_index: int, sign: int) -> Operator:
    """Counter-rotating pair: ``Y_+ = sigma^+ a^dagger + sigma^- a`` and
    ``Y_- = sigma^- a - sigma^+ a^dagger``.

    ``Y_-`` carries this sign so that ``[H_0, Y_-] = -(eps + omega) Y_+``,
    which is what makes it cancel the counter-rotating coupling.
    """
    a = annihilator(basis).data
    sm = pauli(basis, qubit_index, PauliAxis.MINUS).data
    sp = pauli(basis, qubit_index, PauliAxis.PLUS).data
    if sign > 0:
        return Operator(basis, sp @ a.T + sm @ a)
    return Operator(basis, sm @ a - sp @ a.T)


def excitation_number(basis: BasisSpec) -> Operator:
    """``sum_j (sigma^z_j + 1)/2 + a^dagger a``."""
    diag = basis.fock_levels().astype(float)
    for j in range(basis.n_qubits):
        diag = diag + 0.5 * (np.diag(pauli(basis, j, PauliAxis.Z).data) + 1.0)
    return Operator(basis, np.diag(diag))
