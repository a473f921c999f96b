"""Physics extracted from exact spectra.

Eigenstates are matched to bare product states ``|spins, n>`` by squared
overlap. Degenerate eigenvalues are grouped first and matched through the
projector onto the whole cluster, so results never depend on how the
solver picks vectors inside a degenerate subspace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import formulas
from .errors import ClassificationError, TruncationError, ZeroDetuningError
from .linalg import EigenDecomposition, eig_sym
from .models import ModelKind, bare_hamiltonian, build_generator, build_hamiltonian, transform_frame
from .operators import UP, BasisSpec
from .system import Spin, SystemSpec

MIN_OVERLAP = 0.5
CUTOFF_STEP = 10
CUTOFF_CAP = 200
CONVERGENCE_TOL = 1e-9
RESIDUAL_MARGIN = 4


# -- solving -----------------------------------------------------------------


def solve(spec: SystemSpec, kind: ModelKind | str) -> EigenDecomposition:
    return eig_sym(build_hamiltonian(spec, kind))


def converged_solve(
    spec: SystemSpec,
    kind: ModelKind | str,
    count: int,
    step: int = CUTOFF_STEP,
    cap: int = CUTOFF_CAP,
    tol: float = CONVERGENCE_TOL,
) -> tuple[EigenDecomposition, SystemSpec]:
    """Raise the Fock cutoff until the lowest ``count`` eigenvalues are stable.

    Starting from ``spec.fock_cutoff``, the cutoff N is accepted once every
    one of the lowest ``count`` eigenvalues moves by less than ``tol`` when N
    grows to N + ``step``. Returns the decomposition at the accepted N.
    """
    n = spec.fock_cutoff
    current = spec.with_cutoff(n)
    decomp = solve(current, kind)
    while True:
        if n + step > cap:
            raise TruncationError(
                f"eigenvalues not converged to {tol:g} below the Fock cutoff cap {cap}"
            )
        bigger = spec.with_cutoff(n + step)
        decomp_big = solve(bigger, kind)
        m = min(count, decomp.dim)
        if np.max(np.abs(decomp.eigenvalues[:m] - decomp_big.eigenvalues[:m])) < tol:
            return decomp, current
        n, current, decomp = n + step, bigger, decomp_big


# -- branch classification -------------------------------------------------------


@dataclass(frozen=True)
class BranchLabel:
    spins: tuple[Spin, ...]
    n: int

    def __str__(self) -> str:
        return "".join("u" if s is Spin.UP else "d" for s in self.spins) + f":{self.n}"


@dataclass(frozen=True)
class Branch:
    label: BranchLabel
    energy: float
    overlap: float
    state: int  # column in the eigendecomposition


@dataclass(frozen=True)
class Classification:
    branches: tuple[Branch, ...]
    min_overlap: float
    reliable: bool
    contested: tuple[BranchLabel, ...] = field(default=())

    def find(self, label: BranchLabel) -> Branch:
        for b in self.branches:
            if b.label == label:
                return b
        raise KeyError(f"label {label} not among the classified states")


def _clusters(values: np.ndarray, rtol: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= rtol * max(1.0, abs(values[i])):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _to_label(basis: BasisSpec, index: int) -> BranchLabel:
    spins, n = basis.label(index)
    return BranchLabel(tuple(Spin.UP if s == UP else Spin.DOWN for s in spins), n)


def classify_branches(
    decomp: EigenDecomposition,
    basis: BasisSpec,
    count: int,
    min_overlap: float = MIN_OVERLAP,
    degeneracy_rtol: float = 1e-9,
) -> Classification:
    """Label the lowest ``count`` eigenstates with bare states ``|spins, n>``.

    Each eigenstate (or degenerate cluster) receives the bare label with the
    largest squared overlap. Conflicts are resolved greedily in order of
    decreasing overlap; labels wanted by more than one eigenstate are listed
    in ``contested``. If the last requested state sits inside a degenerate
    cluster the whole cluster is classified.
    """
    if decomp.dim != basis.dim:
        raise ValueError(f"decomposition dimension {decomp.dim} does not match basis {basis.dim}")
    count = min(count, decomp.dim)
    groups = [g for g in _clusters(decomp.eigenvalues, degeneracy_rtol) if g[0] < count]
    vecs = decomp.eigenvectors
    weights = np.array([np.sum(vecs[:, g] ** 2, axis=1) for g in groups])

    wanted: dict[int, int] = {}
    for c, g in enumerate(groups):
        for lab in np.argsort(-weights[c], kind="stable")[: len(g)]:
            wanted[int(lab)] = wanted.get(int(lab), 0) + 1
    contested = tuple(_to_label(basis, lab) for lab, k in sorted(wanted.items()) if k > 1)

    capacity = [len(g) for g in groups]
    taken: set[int] = set()
    assigned: list[list[tuple[int, float]]] = [[] for _ in groups]
    flat = np.argsort(-weights, axis=None, kind="stable")
    remaining = sum(capacity)
    for pos in flat:
        if remaining == 0:
            break
        c, lab = divmod(int(pos), basis.dim)
        if capacity[c] == 0 or lab in taken:
            continue
        taken.add(lab)
        capacity[c] -= 1
        remaining -= 1
        assigned[c].append((lab, float(weights[c, lab])))

    branches = []
    for c, g in enumerate(groups):
        for state, (lab, w) in zip(g, sorted(assigned[c])):
            branches.append(Branch(_to_label(basis, lab), float(decomp.eigenvalues[state]), w, state))
    branches.sort(key=lambda b: b.state)
    worst = min(b.overlap for b in branches)
    return Classification(tuple(branches), worst, worst >= min_overlap, contested)


# -- oscillator frequency shift -------------------------------------------------


@dataclass(frozen=True)
class ShiftMeasurement:
    value: float
    min_overlap: float
    reliable: bool
    n_used: int


def _levels_needed(spec: SystemSpec, spin: Spin) -> int:
    # Bare states up to one quantum above |spin, 1> cover the labels and their mixing partners.
    eps, w = spec.qubits[0].epsilon, spec.omega
    ceiling = int(spin) * eps / 2 + 2 * w + 1e-12
    n = np.arange(spec.fock_cutoff)
    return int(np.sum(eps / 2 + n * w <= ceiling) + np.sum(-eps / 2 + n * w <= ceiling))


def measure_shift(
    spec: SystemSpec,
    spin,
    auto_cutoff: bool = False,
    min_overlap: float = MIN_OVERLAP,
) -> ShiftMeasurement:
    """Dressed oscillator frequency ``E(spin, 1) - E(spin, 0)`` of the full Rabi model."""
    if spec.n_qubits != 1:
        raise ValueError("frequency shifts are defined here for a single qubit")
    spin = Spin.parse(spin)
    count = _levels_needed(spec, spin)
    if auto_cutoff:
        decomp, used = converged_solve(spec, ModelKind.FULL_RABI, count)
    else:
        decomp, used = solve(spec, ModelKind.FULL_RABI), spec
    cls = classify_branches(decomp, used.basis, count, min_overlap)
    e0 = cls.find(BranchLabel((spin,), 0))
    e1 = cls.find(BranchLabel((spin,), 1))
    # only the labels that enter the difference decide reliability
    worst = min(e0.overlap, e1.overlap)
    reliable = worst >= min_overlap and not any(lab in cls.contested for lab in (e0.label, e1.label))
    # omega plus the difference of dressing energies: same value, but exact when nothing is dressed
    bare = np.diag(bare_hamiltonian(used).data)
    s = spin.index
    dressing = [b.energy - bare[used.basis.index((s,), b.label.n)] for b in (e0, e1)]
    return ShiftMeasurement(spec.omega + (dressing[1] - dressing[0]), worst, reliable, used.fock_cutoff)


def numeric_shift(spec: SystemSpec, spin, auto_cutoff: bool = False) -> float:
    m = measure_shift(spec, spin, auto_cutoff)
    if not m.reliable:
        raise ClassificationError(
            f"branch classification unreliable (minimum overlap {m.min_overlap:.3f}); "
            "outside the dispersive regime?"
        )
    return m.value


@dataclass(frozen=True)
class ShiftRecord:
    epsilon: float
    omega: float
    g: float
    spin: Spin
    shift_rwa: float | None
    shift_nonrwa: float | None
    shift_sqrt: float | None
    shift_numeric: float | None
    err_rwa: float | None
    err_nonrwa: float | None
    overlap_min: float | None
    n_used: int | None
    flag: str = "ok"


def shift_record(spec: SystemSpec, spin, auto_cutoff: bool = False) -> ShiftRecord:
    """Analytic and numerical dressed frequencies for one sweep point.

    Problems are recorded in ``flag`` rather than raised: ``zero_detuning``
    (analytic fields empty), ``non_dispersive`` (annotation only, ``|g/Delta|``
    above the default threshold), ``unreliable`` (numeric fields empty) and
    ``truncation`` (cutoff cap reached).
    """
    spin = Spin.parse(spin)
    q = spec.qubits[0]
    flags = []
    try:
        pred = formulas.shift_prediction(q.epsilon, spec.omega, q.g, spin)
        rwa, nonrwa, root = pred.omega_bar_rwa, pred.omega_bar_nonrwa, pred.omega_bar_sqrt
    except ZeroDetuningError:
        rwa = nonrwa = root = None
        flags.append("zero_detuning")
    if not formulas.validity_report(spec, 0.0)[0].dispersive:
        flags.append("non_dispersive")
    numeric = overlap = n_used = None
    try:
        m = measure_shift(spec, spin, auto_cutoff)
        overlap, n_used = m.min_overlap, m.n_used
        if m.reliable:
            numeric = m.value
        else:
            flags.append("unreliable")
    except TruncationError:
        flags.append("truncation")
    err_rwa = abs(rwa - numeric) if rwa is not None and numeric is not None else None
    err_nonrwa = abs(nonrwa - numeric) if nonrwa is not None and numeric is not None else None
    return ShiftRecord(
        q.epsilon, spec.omega, q.g, spin, rwa, nonrwa, root, numeric,
        err_rwa, err_nonrwa, overlap, n_used, ";".join(flags) or "ok",
    )


# -- two-qubit entanglement ----------------------------------------------------

# sigma^y (x) sigma^y is real: (i)(i) = -1 on the anti-diagonal corners, +1 inside.
_SYSY = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Real density matrix on (uu, ud, du, dd)."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.shape != (4, 4):
            raise ValueError(f"two-qubit density matrix must be 4x4, got {rho.shape}")
        if np.abs(rho - rho.T).max() > 1e-10:
            raise ValueError("density matrix is not symmetric")
        rho = 0.5 * (rho + rho.T)
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise ValueError(f"density matrix trace {np.trace(rho)} != 1")
        if eig_sym(rho).eigenvalues[0] < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)


def reduced_two_qubit_state(state, basis: BasisSpec) -> TwoQubitState:
    """Trace out the oscillator from a pure state of two qubits and one mode."""
    if basis.n_qubits != 2:
        raise ValueError(f"need exactly two qubits, basis has {basis.n_qubits}")
    psi = np.asarray(state, dtype=float).reshape(4, basis.fock_cutoff)
    norm = float(np.sum(psi * psi))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state is not normalized (norm^2 = {norm})")
    return TwoQubitState(psi @ psi.T)


def concurrence(rho: TwoQubitState | np.ndarray) -> float:
    """Wootters concurrence of a real two-qubit density matrix.

    The eigenvalues of ``rho rho~`` (``rho~ = YY rho YY``) are obtained from
    the symmetric similar matrix ``sqrt(rho) rho~ sqrt(rho)``.
    """
    if not isinstance(rho, TwoQubitState):
        rho = TwoQubitState(rho)
    r = rho.rho
    w, v = eig_sym(r)
    sqrt_r = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    tilde = _SYSY @ r @ _SYSY
    m = sqrt_r @ tilde @ sqrt_r
    mu = eig_sym(0.5 * (m + m.T)).eigenvalues
    lam = np.sqrt(np.clip(mu, 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class GroundState:
    kind: ModelKind
    energy: float
    concurrence: float
    amp_dd: float
    amp_uu: float
    predicted_amp_uu: float | None
    n_used: int


def ground_state(spec: SystemSpec, kind: ModelKind | str, auto_cutoff: bool = False) -> GroundState:
    """Ground state of a two-qubit model: energy, concurrence and the
    ``|dd,0>`` / ``|uu,0>`` amplitudes (sign fixed so ``amp_dd >= 0``).

    ``predicted_amp_uu`` is the perturbative admixture ``-Jbar/(eps_1 + eps_2)``
    for the Ising-coupled dispersive model, zero for RWA models and ``None``
    for the full model, whose lab-frame admixture (``+g^2 / (eps nu)`` for
    identical qubits) comes from two counter-rotating steps instead.
    """
    kind = ModelKind(kind)
    if spec.n_qubits != 2:
        raise ValueError("ground_state analysis needs exactly two qubits")
    if auto_cutoff:
        decomp, used = converged_solve(spec, kind, 6)
    else:
        decomp, used = solve(spec, kind), spec
    psi = decomp.eigenvectors[:, 0]
    basis = used.basis
    dd = psi[basis.index((1, 1), 0)]
    uu = psi[basis.index((0, 0), 0)]
    if dd < 0:
        dd, uu = -dd, -uu
    conc = concurrence(reduced_two_qubit_state(psi, basis))
    if kind is ModelKind.DISPERSIVE_NONRWA:
        jbar = formulas.coupling_matrix(spec, rwa=False)[0, 1]
        predicted = float(-jbar / (spec.qubits[0].epsilon + spec.qubits[1].epsilon))
    elif kind is ModelKind.FULL_RABI:
        # lab-frame admixture differs from the dispersive-frame one; no first-order prediction
        predicted = None
    else:
        predicted = 0.0
    return GroundState(kind, float(decomp.eigenvalues[0]), conc, float(dd), float(uu), predicted, used.fock_cutoff)


# -- second-order accuracy of the frame transformation ---------------------------------


@dataclass(frozen=True)
class FrameResidual:
    residual: float
    residual_half: float
    scaling_exponent: float  # nan when both residuals vanish


def frame_residual_at(spec: SystemSpec, rwa: bool = False, margin: int = RESIDUAL_MARGIN) -> float:
    """Largest entry of ``D^T H D - H_disp`` on Fock levels ``n <= N - margin``.

    ``H`` is the full (or, with ``rwa``, the rotating-wave) model, ``D`` the
    matching second-order generator exponentiated, and ``H_disp`` the
    dispersive Hamiltonian plus its constant energy offset.
    """
    if all(q.g == 0 for q in spec.qubits):
        return 0.0
    exact_kind = ModelKind.TAVIS_CUMMINGS_RWA if rwa else ModelKind.FULL_RABI
    disp_kind = ModelKind.DISPERSIVE_RWA if rwa else ModelKind.DISPERSIVE_NONRWA
    h = build_hamiltonian(spec, exact_kind)
    rotated = transform_frame(h, build_generator(spec, rwa_only=rwa))
    target = build_hamiltonian(spec, disp_kind).data + formulas.energy_offset(spec, rwa) * np.eye(spec.basis.dim)
    idx = spec.basis.interior(margin)
    diff = (rotated.data - target)[np.ix_(idx, idx)]
    return float(np.abs(diff).max())


def frame_residual(spec: SystemSpec, rwa: bool = False, margin: int = RESIDUAL_MARGIN) -> FrameResidual:
    """Residual at the given couplings and at half of them, with
    ``scaling_exponent = log2(r(g) / r(g/2))`` (about 3 for a correct
    second-order transformation)."""
    r1 = frame_residual_at(spec, rwa, margin)
    r2 = frame_residual_at(spec.scaled_coupling(0.5), rwa, margin)
    exponent = math.log2(r1 / r2) if r1 > 0 and r2 > 0 else math.nan
    return FrameResidual(r1, r2, exponent)
