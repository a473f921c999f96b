"""Closed-form dispersive predictions.

Sign convention for frequency shifts: the oscillator frequency seen with the
qubit in state ``spin`` is ``omega + spin * chi`` where ``spin`` is the
sigma_z eigenvalue (+1 up, -1 down) and

* ``chi = g**2 / Delta``                 within the rotating-wave approximation,
* ``chi = g**2 * (1/Delta + 1/nu)``      with counter-rotating terms kept,

with ``Delta = eps - omega`` and ``nu = eps + omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroDetuningError
from .system import Spin, SystemSpec

DEFAULT_LAMBDA_MAX = 0.2
DEFAULT_RWA_RATIO_MAX = 0.2


@dataclass(frozen=True)
class DispersiveParams:
    lam: float
    lam_bar: float
    n_crit: float  # math.inf when lam == 0


def dispersive_params(epsilon: float, omega: float, g: float) -> DispersiveParams:
    delta = epsilon - omega
    if delta == 0:
        raise ZeroDetuningError("dispersive parameters need epsilon != omega")
    lam = g / delta
    lam_bar = g / (epsilon + omega)
    half = math.inf if lam == 0 else 0.5 / abs(lam)
    n_crit = half * half  # 1/(4 lam^2) without rounding the square first
    return DispersiveParams(lam, lam_bar, n_crit)


def chi_rwa(epsilon: float, omega: float, g: float) -> float:
    delta = epsilon - omega
    if delta == 0:
        raise ZeroDetuningError("RWA shift diverges at epsilon == omega")
    return g * g / delta


def chi_nonrwa(epsilon: float, omega: float, g: float) -> float:
    delta = epsilon - omega
    if delta == 0:
        raise ZeroDetuningError("dispersive shift diverges at epsilon == omega")
    return g * g * (1.0 / delta + 1.0 / (epsilon + omega))


@dataclass(frozen=True)
class ShiftPrediction:
    spin: Spin
    omega_bar_rwa: float
    omega_bar_nonrwa: float
    omega_bar_sqrt: float | None  # None when the curvature goes negative
    radicand: float


def shift_prediction(epsilon: float, omega: float, g: float, spin) -> ShiftPrediction:
    """Dressed oscillator frequency for one qubit state.

    Returns the linear RWA and non-RWA values together with the unexpanded
    square-root form ``omega * sqrt(1 + 2 s chi / omega)``. A non-positive
    radicand leaves ``omega_bar_sqrt`` as None; the linear values are always
    returned.
    """
    spin = Spin.parse(spin)
    s = int(spin)
    chi = chi_nonrwa(epsilon, omega, g)
    rwa = omega + s * chi_rwa(epsilon, omega, g)
    nonrwa = omega + s * chi
    radicand = 1.0 + 2.0 * s * chi / omega
    root = omega * math.sqrt(radicand) if radicand > 0 else None
    return ShiftPrediction(spin, rwa, nonrwa, root, radicand)


def coupling_matrix(spec: SystemSpec, rwa: bool) -> np.ndarray:
    """Qubit-qubit exchange constants mediated by the oscillator.

    ``rwa=True`` gives ``g_j g_k (1/D_j + 1/D_k)`` (coefficient of the XY
    term); otherwise the counter-rotating denominators are subtracted,
    ``g_j g_k (1/D_j + 1/D_k - 1/nu_j - 1/nu_k)`` (coefficient of the Ising
    term). Diagonal is zero.
    """
    if spec.n_qubits < 2:
        raise ValueError("coupling_matrix needs at least two qubits")
    spec.require_detuned()
    n = spec.n_qubits
    g = np.array([q.g for q in spec.qubits])
    inv = np.array([1.0 / spec.detuning(j) for j in range(n)])
    if not rwa:
        inv = inv - np.array([1.0 / spec.detuning_sum(j) for j in range(n)])
    J = np.outer(g, g) * (inv[:, None] + inv[None, :])
    np.fill_diagonal(J, 0.0)
    return J


def energy_offset(spec: SystemSpec, rwa: bool) -> float:
    """c-number dropped by the printed dispersive Hamiltonians.

    The second-order frame transformation produces an extra multiple of the
    identity, ``g^2/(2 Delta)`` per qubit with RWA and
    ``(g^2/2)(1/Delta - 1/nu)`` without. It shifts every level equally.
    """
    spec.require_detuned()
    total = 0.0
    for j, q in enumerate(spec.qubits):
        d = spec.detuning(j)
        total += 0.5 * q.g**2 / d if rwa else 0.5 * q.g**2 * (1.0 / d - 1.0 / spec.detuning_sum(j))
    return total


@dataclass(frozen=True)
class QubitValidity:
    index: int
    lam: float
    lam_bar: float
    n_crit: float
    rwa_ratio: float
    dispersive: bool
    rwa_valid: bool
    linear: bool


def validity_report(
    spec: SystemSpec,
    mean_photons: float,
    lambda_max: float = DEFAULT_LAMBDA_MAX,
    rwa_ratio_max: float = DEFAULT_RWA_RATIO_MAX,
) -> list[QubitValidity]:
    """Annotate each qubit with the regime checks; never raises on bad regimes.

    * ``dispersive``: ``|g / Delta| <= lambda_max``
    * ``rwa_valid``: ``|Delta| / nu <= rwa_ratio_max`` (always true at g = 0)
    * ``linear``: ``mean_photons < n_crit``
    """
    out = []
    for j, q in enumerate(spec.qubits):
        delta = spec.detuning(j)
        nu = spec.detuning_sum(j)
        if q.g == 0:
            lam = 0.0
        elif delta == 0:
            lam = math.inf
        else:
            lam = q.g / delta
        half = math.inf if lam == 0 else 0.5 / abs(lam)
        n_crit = half * half  # 1/(4 lam^2) without rounding the square first
        ratio = abs(delta) / nu
        out.append(
            QubitValidity(
                index=j,
                lam=lam,
                lam_bar=q.g / nu,
                n_crit=n_crit,
                rwa_ratio=ratio,
                dispersive=abs(lam) <= lambda_max,
                rwa_valid=q.g == 0 or ratio <= rwa_ratio_max + 1e-12,
                linear=mean_photons < n_crit,
            )
        )
    return out
