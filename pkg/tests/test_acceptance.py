"""Acceptance checks, one per criterion, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -v`` for the pass/fail summary (printed
after the test report), or ``python3 tests/test_acceptance.py`` for the
summary alone.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from dispersive import formulas
from dispersive import operators as ops
from dispersive.models import ModelKind
from dispersive.spectra import frame_residual, ground_state, measure_shift
from dispersive.sweep import excitation_commutator_norm, parse_config, run
from dispersive.system import QubitParams, SystemSpec

SWEEP_CONFIG = Path(__file__).resolve().parent.parent / "configs" / "dispersive_shift_sweep.cfg"
GRID = (0.5, 0.7, 1.3, 1.5, 2.0)
TWO_QUBITS = SystemSpec((QubitParams(1.5, 0.05),) * 2, 1.0, 20)

RESULTS: dict[int, tuple[bool, str]] = {}


def shifts(eps, g):
    # closed forms and the exact dressed frequency, qubit down, converged cutoff
    pred = formulas.shift_prediction(eps, 1.0, g, "down")
    m = measure_shift(SystemSpec.single(eps, g, 1.0, 20), "down", auto_cutoff=True)
    assert m.reliable, f"classification unreliable at eps={eps}, g={g}"
    return pred.omega_bar_rwa, pred.omega_bar_nonrwa, m.value


def check_1():
    spec = SystemSpec.single(0.0, 0.1, 1.0, 60)
    numeric = measure_shift(spec, "down").value
    rwa = formulas.shift_prediction(0.0, 1.0, 0.1, "down").omega_bar_rwa
    ok = abs(numeric - 1.0) <= 1e-8 and abs(abs(rwa - numeric) - 0.01) <= 1e-8 and abs(abs(rwa - 1.0) - 0.01) <= 1e-15
    return ok, f"numeric={numeric:.15g} |rwa-numeric|={abs(rwa - numeric):.3e}"


def check_2():
    errs = {}
    for e in GRID:
        rwa, _, numeric = shifts(e, 0.025)
        errs[e] = abs(rwa - numeric)
    worst = max(errs.values())
    return worst <= 5e-4, "max |rwa-numeric| = %.3e at eps=%g" % (worst, max(errs, key=errs.get))


def check_3():
    lines, ok = [], True
    for e in GRID:
        rwa, nonrwa, numeric = shifts(e, 0.1)
        err_n, err_r = abs(nonrwa - numeric), abs(rwa - numeric)
        good = err_n <= 3e-3 and err_n < err_r
        ok &= good
        lines.append(f"eps={e}: nonrwa {err_n:.2e} rwa {err_r:.2e}{'' if good else ' <- miss'}")
    return ok, "; ".join(lines)


def check_4():
    ok, marks = True, []
    for e in GRID:
        rwa, _, numeric = shifts(e, 0.1)
        over = abs(1.0 - rwa) > abs(1.0 - numeric)
        expected = e < 1.0  # blue detuning: RWA overestimates the shift
        ok &= over == expected
        marks.append(f"{e}:{'over' if over else 'under'}")
    return ok, " ".join(marks)


def check_5():
    spec = SystemSpec.single(1.5, 0.05, 1.0, 40)
    rwa = frame_residual(spec, rwa=True).scaling_exponent
    full = frame_residual(spec, rwa=False).scaling_exponent
    return 2.5 <= rwa <= 3.5 and 2.5 <= full <= 3.5, f"exponents rwa={rwa:.3f} nonrwa={full:.3f}"


def check_6():
    basis = ops.BasisSpec(1, 20)
    idx = basis.interior(2)
    a = ops.annihilator(basis).data
    sz = ops.pauli(basis, 0, "z").data
    one = np.eye(basis.dim)
    n = ops.number(basis).data
    eps, omega = 1.5, 1.0
    h0 = ops.apply_composite([(eps / 2, ops.pauli(basis, 0, "z")), (omega, ops.number(basis))])
    xp, xm = ops.rotating(basis, 0, +1), ops.rotating(basis, 0, -1)
    yp, ym = ops.counter_rotating(basis, 0, +1), ops.counter_rotating(basis, 0, -1)
    squeeze = sz @ (a @ a + a.T @ a.T)

    def dev(lhs, rhs):
        return float(np.abs((lhs - rhs)[np.ix_(idx, idx)]).max())

    devs = {
        "[Y+,Y-]": dev(ops.commutator(yp, ym).data, sz @ (2 * n + one) - one),
        "[H0,Y-]": dev(ops.commutator(h0, ym).data, -(eps + omega) * yp.data),
        "[Y+,X-]": dev(ops.commutator(yp, xm).data, squeeze),
        # the lower-sign member, with Y- fixed by the two relations above, carries the opposite sign
        "[Y-,X+]": dev(ops.commutator(ym, xp).data, -squeeze),
    }
    return max(devs.values()) <= 1e-12, " ".join(f"{k}:{v:.1e}" for k, v in devs.items())


def check_7():
    J = formulas.coupling_matrix(TWO_QUBITS, rwa=True)[0, 1]
    Jbar = formulas.coupling_matrix(TWO_QUBITS, rwa=False)[0, 1]
    return abs(J - 0.01) <= 1e-12 and abs(Jbar - 0.008) <= 1e-12, f"J={J:.15g} Jbar={Jbar:.15g}"


def check_8():
    rwa = excitation_commutator_norm(TWO_QUBITS, ModelKind.DISPERSIVE_RWA)
    full = excitation_commutator_norm(TWO_QUBITS, ModelKind.DISPERSIVE_NONRWA)
    return rwa <= 1e-12 and full >= 1e-4, f"xy={rwa:.1e} ising={full:.3e}"


def check_9():
    target = 0.008 / 1.5
    ising = ground_state(TWO_QUBITS, ModelKind.DISPERSIVE_NONRWA, auto_cutoff=True).concurrence
    xy = ground_state(TWO_QUBITS, ModelKind.DISPERSIVE_RWA, auto_cutoff=True).concurrence
    rabi = ground_state(TWO_QUBITS, ModelKind.FULL_RABI, auto_cutoff=True).concurrence
    ok = abs(ising - target) <= 0.25 * target and xy <= 1e-9 and rabi > 1e-4
    return ok, f"ising={ising:.6f} (target {target:.6f}) xy={xy:.1e} rabi={rabi:.3e}"


def check_10():
    p = formulas.dispersive_params(1.5, 1.0, 0.05)
    return p.lam == 0.1 and p.n_crit == 25.0, f"lambda={p.lam!r} n_crit={p.n_crit!r}"


def check_11():
    cfg = parse_config(SWEEP_CONFIG.read_text())
    first, second = run(cfg).encode(), run(cfg).encode()
    threaded = run(cfg, jobs=4).encode()
    rows = first.count(b"\n") - 1
    return first == second == threaded, f"{rows} rows, {len(first)} bytes, serial/serial/threaded identical"


CHECKS = {n: globals()[f"check_{n}"] for n in range(1, 12)}
TITLES = {
    1: "zero-splitting limit",
    2: "weak-coupling RWA accuracy",
    3: "strong-coupling non-RWA accuracy",
    4: "RWA error sign pattern",
    5: "second-order frame accuracy",
    6: "commutator identities",
    7: "qubit-qubit coupling constants",
    8: "excitation conservation split",
    9: "ground-state entanglement",
    10: "critical photon number",
    11: "deterministic sweep output",
}


def evaluate(n: int) -> tuple[bool, str]:
    try:
        ok, detail = CHECKS[n]()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"error: {exc!r}"
    RESULTS[n] = (bool(ok), detail)
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d} {TITLES[n]}: {detail}"
    print(line)
    return bool(ok), line


@pytest.mark.parametrize("n", list(CHECKS), ids=[f"criterion_{n}" for n in CHECKS])
def test_criterion(n):
    ok, line = evaluate(n)
    assert ok, line


if __name__ == "__main__":
    outcomes = [evaluate(n)[0] for n in CHECKS]
    print(f"{sum(outcomes)}/{len(outcomes)} criteria pass")
    raise SystemExit(0 if all(outcomes) else 1)
