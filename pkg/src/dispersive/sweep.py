"""Run configurations and deterministic CSV output for parameter sweeps.

Config format: UTF-8 text, one ``key = value`` per line, ``#`` starts a
comment, keys are case-sensitive. Lists are comma separated.

==================  ==========================================================
key                 meaning
==================  ==========================================================
mode                shift_sweep | spectrum | effective_model | ground_state |
                    residual_scan (required)
omega               oscillator frequency (default 1.0)
epsilon_min         first qubit splitting of the grid
epsilon_max         last qubit splitting of the grid (inclusive)
epsilon_step        grid spacing, > 0
epsilon_list        explicit splittings instead of min/max/step
g                   coupling strengths (list)
spin                down | up | both (default down)
fock_cutoff         integer N, or ``auto`` (default) to raise N until the
                    reported eigenvalues move by < 1e-9 under N -> N+10
fock_start          first N tried by ``auto`` (default 20)
qubit_epsilons      per-qubit splittings (multi-qubit modes)
qubit_couplings     per-qubit couplings (multi-qubit modes)
model               Hamiltonian for ``spectrum`` (default full_rabi)
levels              eigenvalues listed per point by ``spectrum`` (default 6)
output              output CSV path (overridden by ``--out``)
==================  ==========================================================
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import formulas, spectra
from .errors import ConfigError, TruncationError, ZeroDetuningError
from .linalg import norms
from .models import ModelKind, build_hamiltonian
from .operators import commutator, excitation_number
from .system import QubitParams, Spin, SystemSpec

MODES = ("shift_sweep", "spectrum", "effective_model", "ground_state", "residual_scan")

SHIFT_COLUMNS = (
    "epsilon", "delta", "g", "spin", "shift_rwa", "shift_nonrwa", "shift_sqrt", "shift_numeric",
    "err_rwa", "err_nonrwa", "overlap_min", "n_used", "flag",
)
SPECTRUM_COLUMNS = ("epsilon", "g", "model", "index", "energy", "label", "overlap", "n_used", "flag")
EFFECTIVE_COLUMNS = ("record", "model", "j", "k", "J", "Jbar", "index", "value", "n_used")
GROUND_COLUMNS = ("model", "ground_energy", "concurrence", "amp_dd", "amp_uu", "predicted_amp_uu", "n_used")
RESIDUAL_COLUMNS = ("epsilon", "g", "chain", "residual", "residual_half", "scaling_exponent", "n_used", "flag")

SPECTRUM_MODELS = tuple(k.value for k in ModelKind)
EFFECTIVE_MODELS = (
    ModelKind.FULL_RABI,
    ModelKind.TAVIS_CUMMINGS_RWA,
    ModelKind.DISPERSIVE_RWA,
    ModelKind.DISPERSIVE_NONRWA,
)
EIGENVALUES_REPORTED = 6

_KEYS = {
    "mode", "omega", "epsilon_min", "epsilon_max", "epsilon_step", "epsilon_list", "g", "spin",
    "fock_cutoff", "fock_start", "qubit_epsilons", "qubit_couplings", "model", "levels", "output",
}


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    omega: float = 1.0
    epsilons: tuple[float, ...] = ()
    couplings: tuple[float, ...] = ()
    spins: tuple[Spin, ...] = (Spin.DOWN,)
    fock_cutoff: int | None = None  # None means auto
    fock_start: int = 20
    qubits: tuple[QubitParams, ...] = ()
    model: str = "full_rabi"
    levels: int = 6
    output: str | None = None

    @property
    def auto_cutoff(self) -> bool:
        return self.fock_cutoff is None

    @property
    def start_cutoff(self) -> int:
        return self.fock_start if self.fock_cutoff is None else self.fock_cutoff


# -- parsing -----------------------------------------------------------------------


def _float(value: str, key: str, line: int) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"{key}: malformed number {value!r}", line) from None
    if not math.isfinite(x):
        raise ConfigError(f"{key}: value must be finite, got {value!r}", line)
    return x


def _int(value: str, key: str, line: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: malformed integer {value!r}", line) from None


def _floats(value: str, key: str, line: int) -> tuple[float, ...]:
    items = [v.strip() for v in value.split(",")]
    if not items or any(not v for v in items):
        raise ConfigError(f"{key}: empty entry in list {value!r}", line)
    return tuple(_float(v, key, line) for v in items)


def epsilon_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive grid ``start, start + step, ...`` rounded to 12 decimals."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(count))


def parse_config(text: str) -> SweepConfig:
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r} (first on line {raw[key][1]})", lineno)
        if not value:
            raise ConfigError(f"{key}: missing value", lineno)
        raw[key] = (value, lineno)

    def has(key):
        return key in raw

    def line_of(key):
        return raw[key][1]

    if "mode" not in raw:
        raise ConfigError("missing required key 'mode'")
    mode, mline = raw["mode"]
    if mode not in MODES:
        raise ConfigError(f"mode: unknown mode {mode!r}; expected one of {', '.join(MODES)}", mline)

    kw: dict = {"mode": mode}
    if has("omega"):
        kw["omega"] = _float(raw["omega"][0], "omega", line_of("omega"))
        if kw["omega"] <= 0:
            raise ConfigError("omega must be > 0", line_of("omega"))

    range_keys = [k for k in ("epsilon_min", "epsilon_max", "epsilon_step") if has(k)]
    if has("epsilon_list") and range_keys:
        raise ConfigError("give either epsilon_list or epsilon_min/max/step, not both", line_of("epsilon_list"))
    if has("epsilon_list"):
        kw["epsilons"] = _floats(raw["epsilon_list"][0], "epsilon_list", line_of("epsilon_list"))
    elif range_keys:
        for k in ("epsilon_min", "epsilon_max", "epsilon_step"):
            if not has(k):
                raise ConfigError(f"missing required key {k!r} (epsilon range is incomplete)")
        lo = _float(raw["epsilon_min"][0], "epsilon_min", line_of("epsilon_min"))
        hi = _float(raw["epsilon_max"][0], "epsilon_max", line_of("epsilon_max"))
        step = _float(raw["epsilon_step"][0], "epsilon_step", line_of("epsilon_step"))
        if step <= 0:
            raise ConfigError("epsilon_step must be > 0", line_of("epsilon_step"))
        if hi < lo:
            raise ConfigError("epsilon_max must be >= epsilon_min", line_of("epsilon_max"))
        kw["epsilons"] = epsilon_grid(lo, hi, step)
    if any(e < 0 for e in kw.get("epsilons", ())):
        raise ConfigError("qubit splittings must be >= 0", line_of("epsilon_list" if has("epsilon_list") else "epsilon_min"))

    if has("g"):
        kw["couplings"] = _floats(raw["g"][0], "g", line_of("g"))
        if any(g < 0 for g in kw["couplings"]):
            raise ConfigError("couplings must be >= 0", line_of("g"))

    if has("spin"):
        value, line = raw["spin"]
        if value == "both":
            kw["spins"] = (Spin.DOWN, Spin.UP)
        elif value in ("up", "down"):
            kw["spins"] = (Spin.parse(value),)
        else:
            raise ConfigError(f"spin: expected down, up or both, got {value!r}", line)

    if has("fock_cutoff"):
        value, line = raw["fock_cutoff"]
        if value != "auto":
            n = _int(value, "fock_cutoff", line)
            if n < 2:
                raise ConfigError("fock_cutoff must be >= 2", line)
            kw["fock_cutoff"] = n
    if has("fock_start"):
        n = _int(raw["fock_start"][0], "fock_start", line_of("fock_start"))
        if n < 2:
            raise ConfigError("fock_start must be >= 2", line_of("fock_start"))
        kw["fock_start"] = n

    if has("qubit_epsilons") != has("qubit_couplings"):
        present = "qubit_epsilons" if has("qubit_epsilons") else "qubit_couplings"
        raise ConfigError("qubit_epsilons and qubit_couplings must be given together", line_of(present))
    if has("qubit_epsilons"):
        eps = _floats(raw["qubit_epsilons"][0], "qubit_epsilons", line_of("qubit_epsilons"))
        gs = _floats(raw["qubit_couplings"][0], "qubit_couplings", line_of("qubit_couplings"))
        if len(eps) != len(gs):
            raise ConfigError(
                f"qubit_couplings has {len(gs)} entries but qubit_epsilons has {len(eps)}",
                line_of("qubit_couplings"),
            )
        try:
            kw["qubits"] = tuple(QubitParams(e, g) for e, g in zip(eps, gs))
        except ValueError as exc:
            raise ConfigError(str(exc), line_of("qubit_epsilons")) from None

    if has("model"):
        value, line = raw["model"]
        if value not in SPECTRUM_MODELS:
            raise ConfigError(f"model: unknown model {value!r}; expected one of {', '.join(SPECTRUM_MODELS)}", line)
        kw["model"] = value
    if has("levels"):
        n = _int(raw["levels"][0], "levels", line_of("levels"))
        if n < 1:
            raise ConfigError("levels must be >= 1", line_of("levels"))
        kw["levels"] = n
    if has("output"):
        kw["output"] = raw["output"][0]

    cfg = SweepConfig(**kw)
    _check_mode(cfg, raw)
    return cfg


def _check_mode(cfg: SweepConfig, raw: dict) -> None:
    if cfg.mode in ("shift_sweep", "spectrum", "residual_scan"):
        if not cfg.epsilons:
            raise ConfigError(f"missing required key 'epsilon_min'/'epsilon_max'/'epsilon_step' or 'epsilon_list' for {cfg.mode}")
        if not cfg.couplings:
            raise ConfigError(f"missing required key 'g' for {cfg.mode}")
    if cfg.mode in ("effective_model", "ground_state"):
        if not cfg.qubits:
            raise ConfigError(f"missing required key 'qubit_epsilons'/'qubit_couplings' for {cfg.mode}")
        if len(cfg.qubits) < 2:
            raise ConfigError(f"{cfg.mode} needs at least two qubits", raw["qubit_epsilons"][1])
        if cfg.mode == "ground_state" and len(cfg.qubits) != 2:
            raise ConfigError("ground_state needs exactly two qubits", raw["qubit_epsilons"][1])
    if cfg.mode == "residual_scan" and cfg.auto_cutoff:
        line = raw["fock_cutoff"][1] if "fock_cutoff" in raw else None
        raise ConfigError("residual_scan needs an integer fock_cutoff (no eigenvalues to converge)", line)


# -- CSV ----------------------------------------------------------------------------


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        if math.isnan(x):
            return ""
        if x == 0:
            x = 0.0  # no "-0"
        return f"{x:.15g}"
    return str(value)


def to_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _ordered_map(fn: Callable, items: Sequence, jobs: int) -> list:
    # results come back in input order whatever the completion order
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _spin_name(spin: Spin) -> str:
    return "up" if spin is Spin.UP else "down"


def _single(cfg: SweepConfig, epsilon: float, g: float) -> SystemSpec:
    return SystemSpec.single(epsilon, g, cfg.omega, cfg.start_cutoff)


def _multi(cfg: SweepConfig) -> SystemSpec:
    return SystemSpec(cfg.qubits, cfg.omega, cfg.start_cutoff)


# -- modes ---------------------------------------------------------------------------


def run_shift_sweep(cfg: SweepConfig, jobs: int = 1) -> str:
    points = [(g, e, s) for g in cfg.couplings for e in cfg.epsilons for s in cfg.spins]

    def evaluate(point):
        g, e, s = point
        r = spectra.shift_record(_single(cfg, e, g), s, cfg.auto_cutoff)
        return (
            e, e - cfg.omega, g, _spin_name(s), r.shift_rwa, r.shift_nonrwa, r.shift_sqrt,
            r.shift_numeric, r.err_rwa, r.err_nonrwa, r.overlap_min, r.n_used, r.flag,
        )

    return to_csv(SHIFT_COLUMNS, _ordered_map(evaluate, points, jobs))


def run_spectrum(cfg: SweepConfig, jobs: int = 1) -> str:
    points = [(g, e) for g in cfg.couplings for e in cfg.epsilons]
    kind = ModelKind(cfg.model)

    def evaluate(point):
        g, e = point
        spec = _single(cfg, e, g)
        try:
            if cfg.auto_cutoff:
                decomp, used = spectra.converged_solve(spec, kind, cfg.levels)
            else:
                decomp, used = spectra.solve(spec, kind), spec
        except ZeroDetuningError:
            return [(e, g, kind.value, None, None, None, None, None, "zero_detuning")]
        except TruncationError:
            return [(e, g, kind.value, None, None, None, None, None, "truncation")]
        cls = spectra.classify_branches(decomp, used.basis, cfg.levels)
        return [
            (e, g, kind.value, b.state, b.energy, str(b.label), b.overlap, used.fock_cutoff,
             "ok" if b.overlap >= spectra.MIN_OVERLAP else "unreliable")
            for b in cls.branches[: cfg.levels]
        ]

    rows = [row for block in _ordered_map(evaluate, points, jobs) for row in block]
    return to_csv(SPECTRUM_COLUMNS, rows)


def excitation_commutator_norm(spec: SystemSpec, kind: ModelKind) -> float:
    """Largest entry of ``[H, N_exc]``; zero when ``H`` conserves excitations."""
    h = build_hamiltonian(spec, kind)
    return norms(commutator(h, excitation_number(spec.basis))).max_abs


def run_effective_model(cfg: SweepConfig, jobs: int = 1) -> str:
    spec = _multi(cfg)
    J = formulas.coupling_matrix(spec, rwa=True)
    Jbar = formulas.coupling_matrix(spec, rwa=False)
    rows: list[tuple] = []
    for j in range(spec.n_qubits):
        for k in range(j):
            rows.append(("coupling", None, j + 1, k + 1, J[j, k], Jbar[j, k], None, None, None))
    for kind in EFFECTIVE_MODELS:
        value = excitation_commutator_norm(spec, kind)
        rows.append(("excitation_commutator", kind.value, None, None, None, None, None, value, spec.fock_cutoff))

    def evaluate(kind):
        if cfg.auto_cutoff:
            return spectra.converged_solve(spec, kind, EIGENVALUES_REPORTED)
        return spectra.solve(spec, kind), spec

    for kind, (decomp, used) in zip(EFFECTIVE_MODELS, _ordered_map(evaluate, EFFECTIVE_MODELS, jobs)):
        for i, e in enumerate(decomp.eigenvalues[:EIGENVALUES_REPORTED]):
            rows.append(("eigenvalue", kind.value, None, None, None, None, i, e, used.fock_cutoff))
    return to_csv(EFFECTIVE_COLUMNS, rows)


def run_ground_state(cfg: SweepConfig, jobs: int = 1) -> str:
    spec = _multi(cfg)

    def evaluate(kind):
        gs = spectra.ground_state(spec, kind, cfg.auto_cutoff)
        return (kind.value, gs.energy, gs.concurrence, gs.amp_dd, gs.amp_uu, gs.predicted_amp_uu, gs.n_used)

    return to_csv(GROUND_COLUMNS, _ordered_map(evaluate, EFFECTIVE_MODELS, jobs))


def run_residual_scan(cfg: SweepConfig, jobs: int = 1) -> str:
    points = [(g, e, chain) for g in cfg.couplings for e in cfg.epsilons for chain in ("rwa", "nonrwa")]

    def evaluate(point):
        g, e, chain = point
        spec = _single(cfg, e, g)
        try:
            r = spectra.frame_residual(spec, rwa=chain == "rwa")
        except ZeroDetuningError:
            return (e, g, chain, None, None, None, spec.fock_cutoff, "zero_detuning")
        return (e, g, chain, r.residual, r.residual_half, r.scaling_exponent, spec.fock_cutoff, "ok")

    return to_csv(RESIDUAL_COLUMNS, _ordered_map(evaluate, points, jobs))


RUNNERS = {
    "shift_sweep": run_shift_sweep,
    "spectrum": run_spectrum,
    "effective_model": run_effective_model,
    "ground_state": run_ground_state,
    "residual_scan": run_residual_scan,
}


def run(cfg: SweepConfig, jobs: int = 1) -> str:
    return RUNNERS[cfg.mode](cfg, jobs)
