"""Hamiltonians and frame-transformation generators as :class:`Operator` objects."""

from __future__ import annotations

import enum

import numpy as np

from . import operators as ops
from .errors import ModelKindError
from .formulas import coupling_matrix
from .linalg import expm
from .operators import Operator, PauliAxis, Symmetry
from .system import SystemSpec


class ModelKind(enum.Enum):
    FULL_RABI = "full_rabi"
    JAYNES_CUMMINGS_RWA = "jaynes_cummings"
    TAVIS_CUMMINGS_RWA = "tavis_cummings"
    DISPERSIVE_RWA = "dispersive_rwa"
    DISPERSIVE_NONRWA = "dispersive_nonrwa"


def bare_hamiltonian(spec: SystemSpec) -> Operator:
    """``sum_j eps_j/2 sigma^z_j + omega a^dagger a``."""
    basis = spec.basis
    terms = [(spec.omega, ops.number(basis))]
    terms += [(0.5 * q.epsilon, ops.pauli(basis, j, PauliAxis.Z)) for j, q in enumerate(spec.qubits)]
    return ops.apply_composite(terms)


def _pair_terms(spec: SystemSpec, J: np.ndarray, basis, xy: bool) -> list:
    terms = []
    for j in range(spec.n_qubits):
        for k in range(j):
            if J[j, k] == 0:
                continue
            if xy:
                sp_j, sm_j = ops.pauli(basis, j, "plus"), ops.pauli(basis, j, "minus")
                sp_k, sm_k = ops.pauli(basis, k, "plus"), ops.pauli(basis, k, "minus")
                terms.append((J[j, k], sm_j @ sp_k + sp_j @ sm_k))
            else:
                terms.append((J[j, k], ops.pauli(basis, j, "x") @ ops.pauli(basis, k, "x")))
    return terms


def build_hamiltonian(spec: SystemSpec, kind: ModelKind | str) -> Operator:
    """Assemble one of the model Hamiltonians (hbar = 1).

    ``FULL_RABI``
        ``H_0 + sum_j g_j sigma^x_j (a + a^dagger)``
    ``JAYNES_CUMMINGS_RWA`` (one qubit) / ``TAVIS_CUMMINGS_RWA``
        ``H_0 + sum_j g_j (sigma^-_j a^dagger + sigma^+_j a)``
    ``DISPERSIVE_RWA``
        ``omega a^dag a + 1/2 sum_j (eps_j + g_j^2/D_j) sigma^z_j
        + sum_j g_j^2/D_j a^dag a sigma^z_j + sum_{j>k} J_jk (s^-_j s^+_k + s^+_j s^-_k)``
    ``DISPERSIVE_NONRWA``
        ``H_0 + 1/2 sum_j g_j^2 (1/D_j + 1/nu_j) sigma^z_j (a + a^dag)^2
        + sum_{j>k} Jbar_jk sigma^x_j sigma^x_k``

    The dispersive forms omit the constant returned by
    :func:`dispersive.formulas.energy_offset`.
    """
    kind = ModelKind(kind)
    basis = spec.basis
    if kind is ModelKind.JAYNES_CUMMINGS_RWA and spec.n_qubits != 1:
        raise ModelKindError(f"{kind.value} is a single-qubit model; got {spec.n_qubits} qubits")

    h0 = bare_hamiltonian(spec)
    terms: list[tuple[float, Operator]] = [(1.0, h0)]
    if kind is ModelKind.FULL_RABI:
        x = ops.position(basis)
        terms += [(q.g, ops.pauli(basis, j, "x") @ x) for j, q in enumerate(spec.qubits)]
    elif kind in (ModelKind.JAYNES_CUMMINGS_RWA, ModelKind.TAVIS_CUMMINGS_RWA):
        terms += [(q.g, ops.rotating(basis, j, +1)) for j, q in enumerate(spec.qubits)]
    elif kind is ModelKind.DISPERSIVE_RWA:
        spec.require_detuned()
        n = ops.number(basis)
        for j, q in enumerate(spec.qubits):
            chi = q.g**2 / spec.detuning(j)
            sz = ops.pauli(basis, j, "z")
            terms += [(0.5 * chi, sz), (chi, n @ sz)]
        if spec.n_qubits > 1:
            terms += _pair_terms(spec, coupling_matrix(spec, rwa=True), basis, xy=True)
    else:
        spec.require_detuned()
        x = ops.position(basis)
        x2 = x @ x
        for j, q in enumerate(spec.qubits):
            chi = q.g**2 * (1.0 / spec.detuning(j) + 1.0 / spec.detuning_sum(j))
            terms.append((0.5 * chi, ops.pauli(basis, j, "z") @ x2))
        if spec.n_qubits > 1:
            terms += _pair_terms(spec, coupling_matrix(spec, rwa=False), basis, xy=False)
    h = ops.apply_composite(terms)
    return Operator(basis, h.data, Symmetry.SYMMETRIC)


def build_generator(spec: SystemSpec, rwa_only: bool = False) -> Operator:
    """Antisymmetric generator ``G`` of the frame change ``D = exp(G)``.

    ``sum_j lam_j X^j_-`` when ``rwa_only``, else ``sum_j lam_j X^j_- + lam_bar_j Y^j_-``
    with ``lam_j = g_j / D_j`` and ``lam_bar_j = g_j / nu_j``.
    """
    spec.require_detuned()
    basis = spec.basis
    terms: list[tuple[float, Operator]] = []
    for j, q in enumerate(spec.qubits):
        terms.append((q.g / spec.detuning(j), ops.rotating(basis, j, -1)))
        if not rwa_only:
            terms.append((q.g / spec.detuning_sum(j), ops.counter_rotating(basis, j, -1)))
    g = ops.apply_composite(terms)
    return Operator(basis, g.data, Symmetry.ANTISYMMETRIC)


def transform_frame(h: Operator, generator: Operator) -> Operator:
    """``D^T H D`` with ``D = expm(generator)``."""
    h._check(generator)
    d = expm(generator).data
    return Operator(h.basis, d.T @ h.data @ d, Symmetry.SYMMETRIC)
