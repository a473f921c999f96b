"""Physical parameters of a qubit(s)-oscillator model. Units: hbar = 1, energies in units of omega."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .errors import ZeroDetuningError
from .operators import BasisSpec


class Spin(enum.IntEnum):
    """Qubit state, valued as the sigma_z eigenvalue."""

    UP = 1
    DOWN = -1

    @property
    def index(self) -> int:
        # position inside the (up, down) qubit factor
        return 0 if self is Spin.UP else 1

    @classmethod
    def parse(cls, value) -> Spin:
        if isinstance(value, Spin):
            return value
        key = str(value).strip().lower()
        if key in ("up", "+1", "1", "u"):
            return cls.UP
        if key in ("down", "-1", "d"):
            return cls.DOWN
        raise ValueError(f"unknown spin {value!r}; use 'up' or 'down'")


@dataclass(frozen=True)
class QubitParams:
    epsilon: float
    g: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError(f"qubit splitting must be >= 0, got {self.epsilon}")
        if self.g < 0:
            raise ValueError(f"coupling must be >= 0, got {self.g}")


@dataclass(frozen=True)
class SystemSpec:
    qubits: tuple[QubitParams, ...]
    omega: float = 1.0
    fock_cutoff: int = 40

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if not self.qubits:
            raise ValueError("at least one qubit is required")
        if not self.omega > 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if int(self.fock_cutoff) != self.fock_cutoff or self.fock_cutoff < 2:
            raise ValueError(f"fock_cutoff must be an integer >= 2, got {self.fock_cutoff}")

    @classmethod
    def single(cls, epsilon: float, g: float, omega: float = 1.0, fock_cutoff: int = 40) -> SystemSpec:
        return cls((QubitParams(epsilon, g),), omega, fock_cutoff)

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def basis(self) -> BasisSpec:
        return BasisSpec(self.n_qubits, self.fock_cutoff)

    def detuning(self, j: int) -> float:
        return self.qubits[j].epsilon - self.omega

    def detuning_sum(self, j: int) -> float:
        return self.qubits[j].epsilon + self.omega

    def require_detuned(self) -> None:
        for j in range(self.n_qubits):
            if self.detuning(j) == 0:
                raise ZeroDetuningError(f"qubit {j} is resonant with the oscillator (epsilon == omega)")

    def with_cutoff(self, fock_cutoff: int) -> SystemSpec:
        return replace(self, fock_cutoff=fock_cutoff)

    def scaled_coupling(self, factor: float) -> SystemSpec:
        return replace(self, qubits=tuple(QubitParams(q.epsilon, q.g * factor) for q in self.qubits))
