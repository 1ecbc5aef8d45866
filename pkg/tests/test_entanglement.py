import math

import numpy as np
import pytest

from trotter_scope import linalg
from trotter_scope.entanglement import (
    energy_entropy_scan,
    entropy_trace,
    induced_state,
    middle_cut,
)
from trotter_scope.formula import make_spec, split_eigs
from trotter_scope.hamiltonians import qimf, zz_corr

from conftest import kron_label


class TestInducedState:
    def test_identity_returns_state(self, rng):
        psi = linalg.haar_state(3, rng)
        assert np.allclose(induced_state(np.eye(8), psi), psi)

    def test_z_on_plus_gives_minus(self):
        plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
        minus = np.array([1, -1], dtype=complex) / math.sqrt(2)
        assert np.allclose(induced_state(kron_label("Z"), plus), minus)

    def test_zz_sum_entangles_plus_product(self):
        n = 4
        o = zz_corr(n)
        od = o.to_dense() / linalg.spectral_norm(o.to_dense())
        plus = np.full(1 << n, 1.0 / math.sqrt(1 << n), dtype=complex)
        cut = frozenset({0, 1})
        s_before = linalg.von_neumann_entropy(linalg.partial_trace(plus, cut))
        s_after = linalg.von_neumann_entropy(
            linalg.partial_trace(induced_state(od, plus), cut)
        )
        assert s_before == pytest.approx(0.0, abs=1e-10)
        assert s_after > s_before + 0.1

    def test_annihilation_raises(self):
        # (Z - I)/2 annihilates |0>
        proj = (kron_label("Z") - np.eye(2)) / 2
        psi0 = np.array([1, 0], dtype=complex)
        with pytest.raises(ValueError):
            induced_state(proj, psi0)

    def test_projective_invariance(self, rng):
        a = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        psi = linalg.haar_state(3, rng)
        base = induced_state(a, psi)
        scaled = induced_state(-2.7 * a, psi)
        # equal up to the sign of the scalar
        assert np.allclose(np.abs(np.vdot(base, scaled)), 1.0, atol=1e-12)


class TestEntropyTrace:
    def test_product_input_starts_at_zero(self):
        h = qimf(4, 0.809, 0.9045, 1.0)
        od = zz_corr(4).to_dense()
        plus = np.full(16, 0.25, dtype=complex)
        tr = entropy_trace(h, make_spec(1, 2), plus, od, (1, 2), 0.1, 3)
        assert tr.s_state[0] == pytest.approx(0.0, abs=1e-10)
        assert len(tr.times) == 4
        assert tr.cut == (1, 2)

    def test_full_cut_entropy_zero(self):
        # the whole chain stays pure under exact evolution
        h = qimf(3, 0.809, 0.9045, 1.0)
        od = zz_corr(3).to_dense()
        plus = np.full(8, 1 / math.sqrt(8), dtype=complex)
        tr = entropy_trace(h, make_spec(1, 2), plus, od, (0, 1, 2), 0.1, 5)
        assert np.all(tr.s_state < 1e-8)

    def test_entries_within_cut_bound(self):
        h = qimf(5, 0.809, 0.9045, 1.0)
        od = zz_corr(5).to_dense()
        neel = np.zeros(32, dtype=complex)
        neel[0b01010] = 1.0
        tr = entropy_trace(h, make_spec(1, 2), neel, od, (1, 2, 3), 0.1, 10)
        cap = 3 * math.log(2) + 1e-9
        for arr in (tr.s_state, tr.s_induced_o, tr.s_induced_m):
            assert len(arr) == len(tr.times)
            assert np.all(arr >= -1e-12) and np.all(arr <= cap)

    def test_middle_cut(self):
        assert middle_cut(10) == (3, 4, 5, 6)
        assert middle_cut(4, 4) == (0, 1, 2, 3)
        assert middle_cut(3, 4) == (0, 1, 2)


class TestEnergyEntropyScan:
    def test_eigenstate_entropy_stationary(self):
        h = qimf(4, 0.809, 0.9045, 1.0)
        w, v = split_eigs(h)["total"]
        psi = v[:, 3].astype(complex)
        cut = frozenset({1, 2})
        entropies = []
        for t in (0.0, 0.7, 2.3):
            evolved = linalg.phase_apply(w, v, t, psi)
            entropies.append(
                linalg.von_neumann_entropy(linalg.partial_trace(evolved, cut))
            )
        assert max(entropies) - min(entropies) < 1e-8

    def test_zeros_state_has_zero_energy(self):
        # X, Y and XX all have zero diagonal in the computational basis
        h = qimf(4, 0.809, 0.9045, 1.0)
        psi = np.zeros(16, dtype=complex)
        psi[0] = 1.0
        assert abs(np.vdot(psi, h.total.to_dense() @ psi)) < 1e-12

    def test_peak_entropy_sits_near_zero_energy(self, rng):
        h = qimf(6, 0.809, 0.9045, 1.0)
        pairs = energy_entropy_scan(h, 60, 6.0, middle_cut(6, 2), rng, n_steps=25)
        energies = np.array([e for e, _ in pairs])
        entropies = np.array([s for _, s in pairs])
        top = np.argsort(entropies)[-10:]
        assert np.mean(np.abs(energies[top])) < np.mean(np.abs(energies))

    def test_sample_count_and_determinism(self):
        h = qimf(4, 0.809, 0.9045, 1.0)
        a = energy_entropy_scan(h, 5, 2.0, (1, 2), np.random.default_rng(3))
        b = energy_entropy_scan(h, 5, 2.0, (1, 2), np.random.default_rng(3))
        assert len(a) == 5
        assert a == b
