"""Exact symbolic algebra over N-qubit Pauli strings and weighted Pauli sums.

A Pauli string is stored as a pair of bit masks ``(x_mask, z_mask)`` over
``n_sites`` qubits: bit ``i`` of ``x_mask`` (``z_mask``) marks an X (Z)
factor on site ``i``; both bits set encode Y, both clear encode identity.
The string represents the Hermitian tensor product of I/X/Y/Z matrices,
i.e. the canonical operator ``i**popcount(x & z) * X^x Z^z``.

All group phases stay in ``{1, i, -1, -i}`` and are tracked exactly;
real/complex weights live in the coefficient map of :class:`PauliSum`.
Site 0 is the least significant mask bit and the leftmost letter in text
labels such as ``"XIZY"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

#: Coefficients with modulus at or below this are dropped after every
#: add/commutator; far below any physics scale used in the experiments.
PRUNE_TOL = 1e-12

#: Largest qubit count converted to a dense 2^N x 2^N matrix by default.
DENSE_CAP = 14

_LETTER = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_MASKS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_PHASE = (1.0 + 0j, 1j, -1.0 + 0j, -1j)  # i**k for k = 0..3


@dataclass(frozen=True)
class PauliString:
    """Single N-qubit Pauli string, phase-free (the operator is Hermitian)."""

    n_sites: int
    x_mask: int
    z_mask: int

    def __post_init__(self) -> None:
        if self.n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {self.n_sites}")
        top = 1 << self.n_sites
        if not (0 <= self.x_mask < top and 0 <= self.z_mask < top):
            raise ValueError(
                f"masks out of range for {self.n_sites} sites: "
                f"x={self.x_mask:#x} z={self.z_mask:#x}"
            )

    @classmethod
    def identity(cls, n_sites: int) -> "PauliString":
        return cls(n_sites, 0, 0)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse a label like ``"IXYZ"`` (site 0 leftmost)."""
        x = z = 0
        for i, ch in enumerate(label):
            try:
                bx, bz = _MASKS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
            x |= bx << i
            z |= bz << i
        return cls(len(label), x, z)

    @classmethod
    def single(cls, n_sites: int, site: int, letter: str) -> "PauliString":
        """One non-identity letter at ``site``, identity elsewhere."""
        if not 0 <= site < n_sites:
            raise ValueError(f"site {site} out of range for {n_sites} sites")
        bx, bz = _MASKS[letter]
        return cls(n_sites, bx << site, bz << site)

    def label(self) -> str:
        return "".join(
            _LETTER[((self.x_mask >> i) & 1, (self.z_mask >> i) & 1)]
            for i in range(self.n_sites)
        )

    def support(self) -> frozenset[int]:
        """Sites carrying a non-identity factor."""
        mask = self.x_mask | self.z_mask
        return frozenset(i for i in range(self.n_sites) if (mask >> i) & 1)

    def weight(self) -> int:
        return (self.x_mask | self.z_mask).bit_count()

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def commutes_with(self, other: "PauliString") -> bool:
        """Symplectic criterion: commute iff the crossing count is even."""
        if self.n_sites != other.n_sites:
            raise ValueError("size mismatch")
        crossings = (self.x_mask & other.z_mask).bit_count() + (
            self.z_mask & other.x_mask
        ).bit_count()
        return crossings % 2 == 0

    def __str__(self) -> str:
        return self.label()


def mul(p: PauliString, q: PauliString) -> tuple[complex, PauliString]:
    """Exact product ``p @ q = phase * r`` with ``phase in {1, i, -1, -i}``.

    Per site ``sigma_{x,z} = i**(x z) X^x Z^z``, so the group law gives a
    power of i computed from four popcounts over the masks.
    """
    if p.n_sites != q.n_sites:
        raise ValueError(f"size mismatch: {p.n_sites} vs {q.n_sites}")
    x3 = p.x_mask ^ q.x_mask
    z3 = p.z_mask ^ q.z_mask
    k = (
        (p.x_mask & p.z_mask).bit_count()
        + (q.x_mask & q.z_mask).bit_count()
        + 2 * (p.z_mask & q.x_mask).bit_count()
        - (x3 & z3).bit_count()
    )
    return _PHASE[k % 4], PauliString(p.n_sites, x3, z3)


class PauliSum:
    """Complex-weighted sum of Pauli strings, immutable after construction.

    Coefficients with modulus <= :data:`PRUNE_TOL` are dropped.  Not
    necessarily Hermitian: multiplicative-error operators are built from
    anti-Hermitian combinations; use :meth:`is_hermitian` to test.
    """

    __slots__ = ("n_sites", "_terms")

    def __init__(
        self, n_sites: int, terms: Mapping[PauliString, complex] | None = None
    ):
        if n_sites < 1:
            raise ValueError(f"n_sites must be positive, got {n_sites}")
        clean: dict[PauliString, complex] = {}
        for ps, c in (terms or {}).items():
            if ps.n_sites != n_sites:
                raise ValueError(
                    f"term on {ps.n_sites} sites in a {n_sites}-site sum"
                )
            c = complex(c)
            if abs(c) > PRUNE_TOL:
                clean[ps] = c
        object.__setattr__(self, "n_sites", n_sites)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("PauliSum is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n_sites: int) -> "PauliSum":
        return cls(n_sites, {})

    @classmethod
    def from_label_terms(
        cls, n_sites: int, terms: Iterable[tuple[complex, str]]
    ) -> "PauliSum":
        acc: dict[PauliString, complex] = {}
        for c, label in terms:
            ps = PauliString.from_label(label)
            if ps.n_sites != n_sites:
                raise ValueError(f"label {label!r} has wrong length")
            acc[ps] = acc.get(ps, 0j) + complex(c)
        return cls(n_sites, acc)

    # -- mapping-ish access -----------------------------------------------

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        return iter(self._terms.items())

    def coefficient(self, ps: PauliString) -> complex:
        return self._terms.get(ps, 0j)

    def strings(self) -> frozenset[PauliString]:
        return frozenset(self._terms)

    def parts(self) -> list["PauliSum"]:
        """Finest decomposition: one single-string sum per stored term."""
        return [PauliSum(self.n_sites, {ps: c}) for ps, c in self._terms.items()]

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- algebra -----------------------------------------------------------

    def _check(self, other: "PauliSum") -> None:
        if self.n_sites != other.n_sites:
            raise ValueError(f"size mismatch: {self.n_sites} vs {other.n_sites}")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check(other)
        acc = dict(self._terms)
        for ps, c in other._terms.items():
            acc[ps] = acc.get(ps, 0j) + c
        return PauliSum(self.n_sites, acc)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: complex) -> "PauliSum":
        s = complex(scalar)
        return PauliSum(self.n_sites, {ps: c * s for ps, c in self._terms.items()})

    __rmul__ = __mul__

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        """Full operator product, exact phases."""
        self._check(other)
        acc: dict[PauliString, complex] = {}
        for p, cp in self._terms.items():
            for q, cq in other._terms.items():
                ph, r = mul(p, q)
                acc[r] = acc.get(r, 0j) + ph * cp * cq
        return PauliSum(self.n_sites, acc)

    def adjoint(self) -> "PauliSum":
        return PauliSum(
            self.n_sites, {ps: c.conjugate() for ps, c in self._terms.items()}
        )

    def is_hermitian(self, tol: float = PRUNE_TOL) -> bool:
        """A = A+ iff every coefficient is real (strings are Hermitian)."""
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def frobenius_norm(self) -> float:
        """Normalized Frobenius norm sqrt(tr(A+ A)/2^N) = sqrt(sum |c|^2)."""
        return math.sqrt(sum((c * c.conjugate()).real for c in self._terms.values()))

    def isclose(self, other: "PauliSum", tol: float = 1e-12) -> bool:
        self._check(other)
        for ps in self.strings() | other.strings():
            if abs(self.coefficient(ps) - other.coefficient(ps)) > tol:
                return False
        return True

    # -- dense conversion ---------------------------------------------------

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        """Dense 2^N x 2^N matrix; refuses above ``cap`` qubits.

        Each string contributes one entry per column:
        ``(X^x Z^z)|j> = (-1)^{popcount(z & j)} |j ^ x>``.
        """
        n = self.n_sites
        if n > cap:
            raise ValueError(f"dense conversion capped at {cap} sites, got {n}")
        dim = 1 << n
        out = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim, dtype=np.uint64)
        for ps, c in self._terms.items():
            rows = cols ^ np.uint64(ps.x_mask)
            signs = 1.0 - 2.0 * (
                np.bitwise_count(cols & np.uint64(ps.z_mask)).astype(np.int64) & 1
            )
            w = c * _PHASE[(ps.x_mask & ps.z_mask).bit_count() % 4]
            out[rows, cols] += w * signs
        return out

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Matrix-free action on a state vector, O(terms * 2^N)."""
        n = self.n_sites
        if vec.shape != (1 << n,):
            raise ValueError("state dimension mismatch")
        idx = np.arange(1 << n, dtype=np.uint64)
        out = np.zeros_like(vec, dtype=complex)
        for ps, c in self._terms.items():
            src = idx ^ np.uint64(ps.x_mask)
            signs = 1.0 - 2.0 * (
                np.bitwise_count(src & np.uint64(ps.z_mask)).astype(np.int64) & 1
            )
            w = c * _PHASE[(ps.x_mask & ps.z_mask).bit_count() % 4]
            out += (w * signs) * vec[src]
        return out

    def __repr__(self) -> str:
        body = " + ".join(f"({c:g})*{ps.label()}" for ps, c in self._terms.items())
        return f"PauliSum({self.n_sites}, {body or '0'})"


def commutator(a: PauliSum, b: PauliSum) -> PauliSum:
    """Exact ``ab - ba``; commuting string pairs contribute nothing.

    When strings anticommute, ``pq = -qp``, so each crossing pair
    contributes ``2 * phase * c_p * c_q`` on the product string.
    """
    if a.n_sites != b.n_sites:
        raise ValueError(f"size mismatch: {a.n_sites} vs {b.n_sites}")
    acc: dict[PauliString, complex] = {}
    for p, cp in a.items():
        for q, cq in b.items():
            if p.commutes_with(q):
                continue
            ph, r = mul(p, q)
            acc[r] = acc.get(r, 0j) + 2.0 * ph * cp * cq
    return PauliSum(a.n_sites, acc)


def nested_commutator(ops: Sequence[PauliSum]) -> PauliSum:
    """Right-nested bracket [a1, [a2, ..., [a_{k-1}, a_k]]], k >= 2."""
    if len(ops) < 2:
        raise ValueError("nested_commutator needs at least two operands")
    out = ops[-1]
    for op in reversed(ops[:-1]):
        out = commutator(op, out)
    return out


# -- textual serialization ---------------------------------------------------
#
# One term per line: "<coef_re> <coef_im> <string>", string letters with
# site 0 leftmost, '#' starts a comment.


def dump_pauli_sum(a: PauliSum) -> str:
    lines = []
    for ps in sorted(a.strings(), key=lambda s: (s.z_mask, s.x_mask)):
        c = a.coefficient(ps)
        lines.append(f"{c.real!r} {c.imag!r} {ps.label()}")
    return "\n".join(lines) + "\n"


def parse_pauli_sum(text: str, n_sites: int | None = None) -> PauliSum:
    acc: list[tuple[complex, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise ValueError(f"line {lineno}: expected 're im string', got {raw!r}")
        re_s, im_s, label = fields
        acc.append((complex(float(re_s), float(im_s)), label))
    if not acc:
        raise ValueError("no terms found")
    n = n_sites if n_sites is not None else len(acc[0][1])
    return PauliSum.from_label_terms(n, acc)
