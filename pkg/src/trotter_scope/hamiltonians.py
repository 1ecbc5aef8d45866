"""Model builders and Hamiltonian splittings.

The canonical instance is the one-dimensional quantum Ising model with
mixed transverse/longitudinal fields (QIMF) on an open chain,

    H = h_x sum_j X_j + h_y sum_j Y_j + J sum_j X_j X_{j+1},

split into the non-commuting parts A (all X-type terms) and B (the Y
field).  Sites are 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .pauli import PauliString, PauliSum, parse_pauli_sum


@dataclass(eq=False)
class HamiltonianSplit:
    """Ordered summands H_1..H_L plus their symbolic total."""

    terms: tuple[PauliSum, ...]
    total: PauliSum = field(init=False)
    n_sites: int = field(init=False)

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a split needs at least one term")
        n = self.terms[0].n_sites
        total = PauliSum.zero(n)
        for t in self.terms:
            if t.n_sites != n:
                raise ValueError("all split terms must share n_sites")
            total = total + t
        self.terms = tuple(self.terms)
        self.total = total
        self.n_sites = n

    def __len__(self) -> int:
        return len(self.terms)


def _sum_single(n: int, letter: str, coef: float) -> PauliSum:
    acc = {PauliString.single(n, j, letter): complex(coef) for j in range(n)}
    return PauliSum(n, acc)


def _sum_nn(n: int, letter: str, coef: float) -> PauliSum:
    acc = {}
    for j in range(n - 1):
        ps = PauliString.from_label(
            "I" * j + letter + letter + "I" * (n - j - 2)
        )
        acc[ps] = complex(coef)
    return PauliSum(n, acc)


def qimf(n: int, h_x: float, h_y: float, j: float) -> HamiltonianSplit:
    """QIMF split [A, B] with A = h_x sum X + J sum XX, B = h_y sum Y.

    Open boundary: the XX coupling runs over the n-1 adjacent pairs.
    """
    if n < 2:
        raise ValueError(f"qimf needs at least 2 sites, got {n}")
    a = _sum_single(n, "X", h_x) + _sum_nn(n, "X", j)
    b = _sum_single(n, "Y", h_y)
    return HamiltonianSplit((a, b))


def fig1_hamiltonian(n: int) -> HamiltonianSplit:
    """The induced-entanglement benchmark instance, h_x=0.809, h_y=0.9045, J=1."""
    return qimf(n, 0.809, 0.9045, 1.0)


def scale(h: HamiltonianSplit, c: float) -> HamiltonianSplit:
    """Every coefficient multiplied by ``c`` (strong/weak-coupling scans)."""
    return HamiltonianSplit(tuple(float(c) * t for t in h.terms))


def sum_x(n: int) -> PauliSum:
    return _sum_single(n, "X", 1.0)


def sum_z(n: int) -> PauliSum:
    return _sum_single(n, "Z", 1.0)


def xx_corr(n: int) -> PauliSum:
    return _sum_nn(n, "X", 1.0)


def zz_corr(n: int) -> PauliSum:
    return _sum_nn(n, "Z", 1.0)


def pauli_global(n: int, letter: str = "X") -> PauliSum:
    ps = PauliString.from_label(letter * n)
    return PauliSum(n, {ps: 1.0 + 0j})


def model_from_spec(spec: dict, base_dir: Path | None = None) -> HamiltonianSplit:
    """Build a split from a JSON-style model spec.

    ``{"model": "qimf", "n": 10, "hx": 0.809, "hy": 0.9045, "j": 1.0}``
    or ``{"model": "fig1", "n": 10}``
    or ``{"model": "file", "terms": ["a.pauli", "b.pauli"]}``.
    """
    kind = spec.get("model")
    if kind == "qimf":
        try:
            return qimf(int(spec["n"]), float(spec["hx"]), float(spec["hy"]),
                        float(spec["j"]))
        except KeyError as exc:
            raise ValueError(f"qimf model spec missing key {exc}") from None
    if kind == "fig1":
        return fig1_hamiltonian(int(spec.get("n", 10)))
    if kind == "file":
        paths: Sequence[str] = spec.get("terms", [])
        if not paths:
            raise ValueError("file model spec needs a non-empty 'terms' list")
        sums = []
        for p in paths:
            path = Path(p)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            sums.append(parse_pauli_sum(path.read_text()))
        return HamiltonianSplit(tuple(sums))
    raise ValueError(f"unknown model kind {kind!r}")
