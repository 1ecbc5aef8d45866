import math

import numpy as np
import pytest

from trotter_scope import linalg
from trotter_scope.hamiltonians import (
    HamiltonianSplit,
    fig1_hamiltonian,
    model_from_spec,
    qimf,
    scale,
)
from trotter_scope.pauli import PauliString, commutator, dump_pauli_sum

from conftest import expected_ab


class TestQimf:
    def test_pure_field_split(self):
        h = qimf(2, 0.0, 1.0, 0.0)
        a, b = h.terms
        assert not a
        assert b.strings() == {
            PauliString.from_label("YI"),
            PauliString.from_label("IY"),
        }

    def test_term_counts(self):
        h = qimf(3, 0.809, 0.9045, 1.0)
        assert len(h.terms[0]) == 5  # 3 X fields + 2 XX couplings
        assert len(h.terms[1]) == 3

    def test_total_is_symbolic_sum(self):
        h = qimf(4, 0.5, 0.7, 1.1)
        assert h.total.isclose(h.terms[0] + h.terms[1], tol=0.0)

    def test_frobenius_matches_dense_oracle(self):
        h = qimf(10, 0.809, 0.9045, 1.0)
        dense = h.total.to_dense()
        oracle = math.sqrt(np.trace(dense.conj().T @ dense).real / dense.shape[0])
        assert h.total.frobenius_norm() == pytest.approx(oracle, abs=1e-9)

    def test_total_hermitian_traceless(self):
        h = qimf(4, 0.809, 0.9045, 1.0)
        assert h.total.is_hermitian()
        assert abs(np.trace(h.total.to_dense())) < 1e-12

    def test_rejects_single_site(self):
        with pytest.raises(ValueError):
            qimf(1, 1.0, 1.0, 1.0)

    def test_ab_commutator_families(self):
        # only {Z_j, Z_j X_{j+1}, X_j Z_{j+1}} strings, exact coefficients
        n, hx, hy, J = 5, 0.809, 0.9045, 1.0
        h = qimf(n, hx, hy, J)
        ab = commutator(h.terms[0], h.terms[1])
        assert ab.isclose(expected_ab(n, hx, hy, J), tol=1e-12)


class TestScale:
    def test_identity(self):
        h = qimf(3, 0.4, 0.6, 0.8)
        assert scale(h, 1.0).total.isclose(h.total, tol=0.0)

    def test_frobenius_scales_linearly(self):
        h = qimf(4, 0.4, 0.6, 0.8)
        assert scale(h, 1.4).total.frobenius_norm() == pytest.approx(
            1.4 * h.total.frobenius_norm()
        )

    def test_leading_commutator_scales_quadratically(self):
        h = qimf(4, 0.4, 0.6, 0.8)
        h2 = scale(h, 1.4)
        ab = commutator(h.terms[0], h.terms[1])
        ab2 = commutator(h2.terms[0], h2.terms[1])
        assert ab2.isclose(1.4**2 * ab, tol=1e-12)


class TestFig1:
    def test_matches_qimf(self):
        assert fig1_hamiltonian(4).total.isclose(
            qimf(4, 0.809, 0.9045, 1.0).total, tol=0.0
        )

    def test_term_counts(self):
        h = fig1_hamiltonian(4)
        assert len(h.terms[0]) == 7 and len(h.terms[1]) == 4


class TestModelSpec:
    def test_qimf_spec(self):
        h = model_from_spec({"model": "qimf", "n": 4, "hx": 0.1, "hy": 0.2, "j": 0.3})
        assert h.n_sites == 4

    def test_missing_key(self):
        with pytest.raises(ValueError):
            model_from_spec({"model": "qimf", "n": 4})

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            model_from_spec({"model": "heisenberg"})

    def test_file_model_round_trip(self, tmp_path):
        h = qimf(3, 0.809, 0.9045, 1.0)
        for name, term in zip(("a.pauli", "b.pauli"), h.terms):
            (tmp_path / name).write_text(dump_pauli_sum(term))
        back = model_from_spec(
            {"model": "file", "terms": ["a.pauli", "b.pauli"]}, base_dir=tmp_path
        )
        assert back.total.isclose(h.total, tol=0.0)
        assert len(back.terms) == 2


class TestSplitInvariants:
    def test_needs_terms(self):
        with pytest.raises(ValueError):
            HamiltonianSplit(())

    def test_mixed_sizes_rejected(self):
        from trotter_scope.hamiltonians import sum_x

        with pytest.raises(ValueError):
            HamiltonianSplit((sum_x(3), sum_x(4)))

    def test_dense_matches_symbolic(self):
        h = qimf(5, 0.809, 0.9045, 1.0)
        total = sum((t.to_dense() for t in h.terms), np.zeros((32, 32), complex))
        assert np.allclose(h.total.to_dense(), total, atol=1e-12)
        assert linalg.hermiticity_defect(total) < 1e-12
