from functools import reduce

import numpy as np
import pytest
import scipy.linalg

from dispersive import operators as ops
from dispersive.errors import ModelKindError, ZeroDetuningError
from dispersive.models import ModelKind, bare_hamiltonian, build_generator, build_hamiltonian, transform_frame
from dispersive.operators import Symmetry
from dispersive.system import QubitParams, SystemSpec

# Independent assembly from raw numpy blocks, ordering (up, down) (x) Fock.
SZ = np.diag([1.0, -1.0])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SP = np.array([[0.0, 1.0], [0.0, 0.0]])
SM = SP.T
I2 = np.eye(2)


def raw(nq, N, qubit_ops=None, fock=None):
    qubit_ops = qubit_ops or {}
    fs = [qubit_ops.get(j, I2) for j in range(nq)] + [np.eye(N) if fock is None else fock]
    return reduce(np.kron, fs)


def ladder(N):
    return np.diag(np.sqrt(np.arange(1.0, N)), 1)


def interior(m, basis, margin=2):
    idx = basis.interior(margin)
    return m[np.ix_(idx, idx)]


class TestSingleQubitMatrices:
    spec = SystemSpec.single(1.5, 0.05, fock_cutoff=2)

    def test_full_rabi_by_hand(self):
        h = build_hamiltonian(self.spec, ModelKind.FULL_RABI).data
        hand = np.diag([0.75, 1.75, -0.75, 0.25])
        hand[0, 3] = hand[3, 0] = 0.05  # |up,0> <-> |down,1>
        hand[1, 2] = hand[2, 1] = 0.05  # |up,1> <-> |down,0>
        np.testing.assert_allclose(h, hand, atol=1e-15)

    def test_jaynes_cummings_by_hand(self):
        h = build_hamiltonian(self.spec, ModelKind.JAYNES_CUMMINGS_RWA).data
        hand = np.diag([0.75, 1.75, -0.75, 0.25])
        hand[0, 3] = hand[3, 0] = 0.05
        np.testing.assert_allclose(h, hand, atol=1e-15)

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_uncoupled_reduces_to_bare(self, kind):
        spec = SystemSpec.single(1.5, 0.0, fock_cutoff=6)
        np.testing.assert_array_equal(build_hamiltonian(spec, kind).data, bare_hamiltonian(spec).data)

    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_symmetric(self, kind):
        h = build_hamiltonian(SystemSpec.single(0.7, 0.08, fock_cutoff=9), kind)
        assert h.symmetry is Symmetry.SYMMETRIC
        assert np.abs(h.data - h.data.T).max() == 0.0

    def test_dispersive_nonrwa_independent_assembly(self):
        N, eps, g = 12, 1.5, 0.05
        spec = SystemSpec.single(eps, g, fock_cutoff=N)
        a = ladder(N)
        x = a + a.T
        expected = (
            eps / 2 * raw(1, N, {0: SZ})
            + raw(1, N, fock=a.T @ a)
            + g**2 / 2 * (1 / 0.5 + 1 / 2.5) * raw(1, N, {0: SZ}, x @ x)
        )
        np.testing.assert_allclose(build_hamiltonian(spec, ModelKind.DISPERSIVE_NONRWA).data, expected, atol=1e-14)

    def test_dispersive_rwa_independent_assembly(self):
        N, eps, g = 12, 0.6, 0.03
        d = eps - 1.0
        spec = SystemSpec.single(eps, g, fock_cutoff=N)
        a = ladder(N)
        expected = (
            (eps / 2 + g**2 / (2 * d)) * raw(1, N, {0: SZ})
            + raw(1, N, fock=a.T @ a)
            + g**2 / d * raw(1, N, {0: SZ}, a.T @ a)
        )
        np.testing.assert_allclose(build_hamiltonian(spec, ModelKind.DISPERSIVE_RWA).data, expected, atol=1e-14)

    def test_nonrwa_minus_rwa(self):
        N, eps, g = 15, 1.5, 0.05
        d, nu = eps - 1.0, eps + 1.0
        spec = SystemSpec.single(eps, g, fock_cutoff=N)
        diff = (
            build_hamiltonian(spec, ModelKind.DISPERSIVE_NONRWA).data
            - build_hamiltonian(spec, ModelKind.DISPERSIVE_RWA).data
        )
        a = ladder(N)
        expected = g**2 / 2 * (1 / d + 1 / nu) * raw(1, N, {0: SZ}, a @ a + a.T @ a.T) + g**2 / (2 * nu) * raw(
            1, N, {0: SZ}, 2 * a.T @ a + np.eye(N)
        )
        # (a + a^dag)^2 differs from its normal-ordered form on the top level only
        np.testing.assert_allclose(interior(diff, spec.basis), interior(expected, spec.basis), atol=1e-14)

    def test_kind_mismatch(self):
        spec = SystemSpec((QubitParams(1.5, 0.05),) * 2, fock_cutoff=3)
        with pytest.raises(ModelKindError):
            build_hamiltonian(spec, ModelKind.JAYNES_CUMMINGS_RWA)

    def test_zero_detuning(self):
        spec = SystemSpec.single(1.0, 0.05, fock_cutoff=4)
        for kind in (ModelKind.DISPERSIVE_RWA, ModelKind.DISPERSIVE_NONRWA):
            with pytest.raises(ZeroDetuningError):
                build_hamiltonian(spec, kind)
        build_hamiltonian(spec, ModelKind.FULL_RABI)


class TestMultiQubit:
    qubits = (QubitParams(1.5, 0.05), QubitParams(1.8, 0.04))
    N = 6

    @property
    def spec(self):
        return SystemSpec(self.qubits, 1.0, self.N)

    def test_full_rabi_assembly(self):
        N = self.N
        a = ladder(N)
        expected = raw(2, N, fock=a.T @ a)
        for j, q in enumerate(self.qubits):
            expected = expected + q.epsilon / 2 * raw(2, N, {j: SZ}) + q.g * raw(2, N, {j: SX}, a + a.T)
        np.testing.assert_allclose(build_hamiltonian(self.spec, ModelKind.FULL_RABI).data, expected, atol=1e-15)

    def test_nonrwa_ising_assembly(self):
        N = self.N
        a = ladder(N)
        x2 = (a + a.T) @ (a + a.T)
        (e1, g1), (e2, g2) = [(q.epsilon, q.g) for q in self.qubits]
        d1, d2, n1, n2 = e1 - 1, e2 - 1, e1 + 1, e2 + 1
        jbar = g1 * g2 * (1 / d1 + 1 / d2 - 1 / n1 - 1 / n2)
        expected = (
            raw(2, N, fock=a.T @ a)
            + e1 / 2 * raw(2, N, {0: SZ})
            + e2 / 2 * raw(2, N, {1: SZ})
            + g1**2 / 2 * (1 / d1 + 1 / n1) * raw(2, N, {0: SZ}, x2)
            + g2**2 / 2 * (1 / d2 + 1 / n2) * raw(2, N, {1: SZ}, x2)
            + jbar * raw(2, N, {0: SX, 1: SX})
        )
        np.testing.assert_allclose(
            build_hamiltonian(self.spec, ModelKind.DISPERSIVE_NONRWA).data, expected, atol=1e-14
        )

    def test_rwa_xy_assembly(self):
        N = self.N
        a = ladder(N)
        n = a.T @ a
        expected = raw(2, N, fock=n)
        for j, q in enumerate(self.qubits):
            chi = q.g**2 / (q.epsilon - 1)
            expected = expected + (q.epsilon + chi) / 2 * raw(2, N, {j: SZ}) + chi * raw(2, N, {j: SZ}, n)
        (e1, g1), (e2, g2) = [(q.epsilon, q.g) for q in self.qubits]
        J = g1 * g2 * (1 / (e1 - 1) + 1 / (e2 - 1))
        expected = expected + J * (raw(2, N, {0: SP, 1: SM}) + raw(2, N, {0: SM, 1: SP}))
        np.testing.assert_allclose(build_hamiltonian(self.spec, ModelKind.DISPERSIVE_RWA).data, expected, atol=1e-14)

    def test_ising_minus_xy(self):
        # Ising = XY + (s+ s+ + s- s-): the two effective models differ by the fast pair terms
        spec = self.spec
        diff = (
            build_hamiltonian(spec, ModelKind.DISPERSIVE_NONRWA).data
            - build_hamiltonian(spec, ModelKind.DISPERSIVE_RWA).data
        )
        N = self.N
        a = ladder(N)
        x2 = (a + a.T) @ (a + a.T)
        n = a.T @ a
        (e1, g1), (e2, g2) = [(q.epsilon, q.g) for q in self.qubits]
        J = g1 * g2 * (1 / (e1 - 1) + 1 / (e2 - 1))
        jbar = J - g1 * g2 * (1 / (e1 + 1) + 1 / (e2 + 1))
        single = np.zeros_like(diff)
        for j, (e, g) in enumerate([(e1, g1), (e2, g2)]):
            d, nu = e - 1, e + 1
            single += g**2 / 2 * (1 / d + 1 / nu) * raw(2, N, {j: SZ}, x2)
            single -= g**2 / (2 * d) * raw(2, N, {j: SZ}) + g**2 / d * raw(2, N, {j: SZ}, n)
        xy = raw(2, N, {0: SP, 1: SM}) + raw(2, N, {0: SM, 1: SP})
        pair = raw(2, N, {0: SP, 1: SP}) + raw(2, N, {0: SM, 1: SM})
        expected = single + (jbar - J) * xy + jbar * pair
        np.testing.assert_allclose(diff, expected, atol=1e-14)

    def test_excitation_conservation(self):
        spec = SystemSpec((QubitParams(1.5, 0.05),) * 2, 1.0, 8)
        nexc = ops.excitation_number(spec.basis)

        def comm(kind):
            return np.abs(ops.commutator(build_hamiltonian(spec, kind), nexc).data).max()

        assert comm(ModelKind.TAVIS_CUMMINGS_RWA) <= 1e-12
        assert comm(ModelKind.DISPERSIVE_RWA) <= 1e-12
        assert comm(ModelKind.DISPERSIVE_NONRWA) > 0
        assert comm(ModelKind.FULL_RABI) > 0


class TestGenerator:
    def test_rwa_only(self):
        spec = SystemSpec.single(1.5, 0.05, fock_cutoff=5)
        g = build_generator(spec, rwa_only=True)
        a = ladder(5)
        expected = 0.1 * (raw(1, 5, {0: SM}, a.T) - raw(1, 5, {0: SP}, a))
        np.testing.assert_allclose(g.data, expected, atol=1e-15)
        assert g.symmetry is Symmetry.ANTISYMMETRIC

    def test_full(self):
        spec = SystemSpec.single(1.5, 0.05, fock_cutoff=5)
        a = ladder(5)
        xm = raw(1, 5, {0: SM}, a.T) - raw(1, 5, {0: SP}, a)
        ym = raw(1, 5, {0: SM}, a) - raw(1, 5, {0: SP}, a.T)
        np.testing.assert_allclose(build_generator(spec).data, 0.1 * xm + 0.02 * ym, atol=1e-15)

    def test_uncoupled(self):
        g = build_generator(SystemSpec.single(1.5, 0.0, fock_cutoff=5))
        assert np.all(g.data == 0)
        assert g.symmetry is Symmetry.ANTISYMMETRIC

    def test_zero_detuning(self):
        with pytest.raises(ZeroDetuningError):
            build_generator(SystemSpec.single(1.0, 0.05, fock_cutoff=5))

    def test_generator_cancels_coupling_to_first_order(self):
        # [H_0, G] = -V on the interior block
        spec = SystemSpec((QubitParams(1.5, 0.05), QubitParams(0.4, 0.03)), 1.0, 10)
        h0 = bare_hamiltonian(spec)
        v = build_hamiltonian(spec, ModelKind.FULL_RABI) - h0
        lhs = ops.commutator(h0, build_generator(spec)).data
        np.testing.assert_allclose(interior(lhs + v.data, spec.basis), 0.0, atol=1e-15)


class TestTransformFrame:
    def test_identity_generator(self):
        spec = SystemSpec.single(1.5, 0.05, fock_cutoff=8)
        h = build_hamiltonian(spec, ModelKind.FULL_RABI)
        zero = build_generator(SystemSpec.single(1.5, 0.0, fock_cutoff=8))
        np.testing.assert_allclose(transform_frame(h, zero).data, h.data, atol=1e-15)

    def test_spectrum_preserved(self):
        spec = SystemSpec.single(1.5, 0.1, fock_cutoff=25)
        h = build_hamiltonian(spec, ModelKind.FULL_RABI)
        out = transform_frame(h, build_generator(spec))
        assert out.symmetry is Symmetry.SYMMETRIC
        np.testing.assert_allclose(np.linalg.eigvalsh(out.data), np.linalg.eigvalsh(h.data), atol=1e-9)

    def test_third_order_residual_oracle(self):
        # oracle: scipy expm + raw numpy assembly, independent of the package path
        def residual(g, N=30, margin=4):
            eps = 1.5
            d, nu = eps - 1, eps + 1
            a = ladder(N)
            x = a + a.T
            h = eps / 2 * raw(1, N, {0: SZ}) + raw(1, N, fock=a.T @ a) + g * raw(1, N, {0: SX}, x)
            gen = g / d * (raw(1, N, {0: SM}, a.T) - raw(1, N, {0: SP}, a)) + g / nu * (
                raw(1, N, {0: SM}, a) - raw(1, N, {0: SP}, a.T)
            )
            u = scipy.linalg.expm(gen)
            disp = (
                eps / 2 * raw(1, N, {0: SZ})
                + raw(1, N, fock=a.T @ a)
                + g**2 / 2 * (1 / d + 1 / nu) * raw(1, N, {0: SZ}, x @ x)
                + g**2 / 2 * (1 / d - 1 / nu) * np.eye(2 * N)
            )
            basis = ops.BasisSpec(1, N)
            return np.abs(interior(u.T @ h @ u - disp, basis, margin)).max()

        r1, r2 = residual(0.05), residual(0.025)
        assert 2.5 <= np.log2(r1 / r2) <= 3.5

        spec = SystemSpec.single(1.5, 0.05, fock_cutoff=30)
        from dispersive import formulas

        ours = transform_frame(build_hamiltonian(spec, ModelKind.FULL_RABI), build_generator(spec)).data
        target = build_hamiltonian(spec, ModelKind.DISPERSIVE_NONRWA).data + formulas.energy_offset(spec, False) * np.eye(60)
        assert np.abs(interior(ours - target, spec.basis, 4)).max() == pytest.approx(r1, rel=1e-8)
