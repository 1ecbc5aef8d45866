import numpy as np
import pytest

from trotter_scope.pauli import PauliString, PauliSum

# dense single-qubit matrices used by independent oracles
SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_label(label: str) -> np.ndarray:
    """Independent dense oracle: site 0 is the least significant factor."""
    out = np.eye(1, dtype=complex)
    for ch in label:
        out = np.kron(SIGMA[ch], out)
    return out


def random_pauli_sum(
    rng: np.random.Generator, n: int, n_terms: int, hermitian: bool = False
) -> PauliSum:
    terms = {}
    for _ in range(n_terms):
        x = int(rng.integers(0, 1 << n))
        z = int(rng.integers(0, 1 << n))
        c = complex(rng.standard_normal(), 0.0 if hermitian else rng.standard_normal())
        ps = PauliString(n, x, z)
        terms[ps] = terms.get(ps, 0j) + c
    s = PauliSum(n, terms)
    if not s:
        s = PauliSum(n, {PauliString.single(n, 0, "Z"): 1.0 + 0j})
    return s


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# hand-assembled QIMF commutator expansions (independent of the engine);
# site j is 0-based, labels have site 0 leftmost


def _site_label(n: int, placed: dict[int, str]) -> str:
    return "".join(placed.get(i, "I") for i in range(n))


def _hand_sum(n: int, terms) -> PauliSum:
    return PauliSum.from_label_terms(
        n, [(c, _site_label(n, placed)) for c, placed in terms]
    )


def expected_ab(n: int, hx: float, hy: float, J: float) -> PauliSum:
    """[A, B] = 2i hx hy sum Z_j + 2i J hy sum (Z_j X_{j+1} + X_j Z_{j+1})."""
    terms = [(2j * hx * hy, {j: "Z"}) for j in range(n)]
    for j in range(n - 1):
        terms.append((2j * J * hy, {j: "Z", j + 1: "X"}))
        terms.append((2j * J * hy, {j: "X", j + 1: "Z"}))
    return _hand_sum(n, terms)


def expected_aab(n: int, hx: float, hy: float, J: float) -> PauliSum:
    """[A, [A, B]] expansion: Y fields, YX/XY pairs and XYX triples."""
    terms = [(4 * hx**2 * hy, {j: "Y"}) for j in range(n)]
    terms += [(4 * J**2 * hy, {j: "Y"}) for j in range(n - 1)]
    terms += [(4 * J**2 * hy, {j: "Y"}) for j in range(1, n)]
    for j in range(n - 1):
        terms.append((8 * J * hx * hy, {j: "Y", j + 1: "X"}))
        terms.append((8 * J * hx * hy, {j: "X", j + 1: "Y"}))
    for j in range(n - 2):
        terms.append((8 * J**2 * hy, {j: "X", j + 1: "Y", j + 2: "X"}))
    return _hand_sum(n, terms)


def expected_bab(n: int, hx: float, hy: float, J: float) -> PauliSum:
    """[B, [A, B]] = -4 hx hy^2 sum X_j + 8 J hy^2 sum (Z_j Z_{j+1} - X_j X_{j+1})."""
    terms = [(-4 * hx * hy**2, {j: "X"}) for j in range(n)]
    for j in range(n - 1):
        terms.append((8 * J * hy**2, {j: "Z", j + 1: "Z"}))
        terms.append((-8 * J * hy**2, {j: "X", j + 1: "X"}))
    return _hand_sum(n, terms)
