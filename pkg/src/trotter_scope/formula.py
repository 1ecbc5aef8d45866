"""Product-formula construction, one-segment unitaries, leading error terms.

A :class:`FormulaSpec` lists stages ``(l, a)`` meaning the factor
``exp(-i * a * dt * H_l)``; the physical operator is the left-to-right
matrix product of the stage factors.  Order 1 is the plain forward sweep,
order 2 the palindromic sweep with merged half steps, and higher even
orders follow the 5-fold recursion

    S_{2k}(dt) = S_{2k-2}(p_k dt)^2  S_{2k-2}((1-4 p_k) dt)  S_{2k-2}(p_k dt)^2

with p_k = 1/(4 - 4^(1/(2k-1))).
"""

from __future__ import annotations

import itertools
import threading
import weakref
from dataclasses import dataclass

import numpy as np

from . import linalg
from .hamiltonians import HamiltonianSplit
from .pauli import DENSE_CAP, PauliSum, commutator, nested_commutator

Stage = tuple[int, float]


@dataclass(frozen=True)
class FormulaSpec:
    """Stage description of a product formula of the given order."""

    order: int
    stages: tuple[Stage, ...]

    def stage_sums(self, n_terms: int) -> list[float]:
        """Total coefficient per Hamiltonian term; each must equal 1."""
        acc = [0.0] * n_terms
        for l, a in self.stages:
            acc[l] += a
        return acc


def _merge(stages: list[Stage]) -> list[Stage]:
    out: list[Stage] = []
    for l, a in stages:
        if out and out[-1][0] == l:
            out[-1] = (l, out[-1][1] + a)
        else:
            out.append((l, a))
    return [(l, a) for l, a in out if a != 0.0]


def suzuki_p(k: int) -> float:
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * k - 1)))


def make_spec(order: int, n_terms: int) -> FormulaSpec:
    if n_terms < 1:
        raise ValueError("need at least one Hamiltonian term")
    if order == 1:
        return FormulaSpec(1, tuple((l, 1.0) for l in range(n_terms)))
    if order < 2 or order % 2:
        raise ValueError(f"order must be 1 or even >= 2, got {order}")
    forward = [(l, 0.5) for l in range(n_terms)]
    stages = _merge(forward + forward[::-1])
    k = 1
    while 2 * k < order:
        k += 1
        p = suzuki_p(k)
        scaled = lambda c: [(l, a * c) for l, a in stages]
        stages = _merge(
            scaled(p) + scaled(p) + scaled(1.0 - 4.0 * p) + scaled(p) + scaled(p)
        )
    return FormulaSpec(order, tuple(stages))


@dataclass
class SegmentUnitaries:
    """One-segment data: ideal u0, product-formula up, and m = u0+ up - I."""

    u0: np.ndarray
    up: np.ndarray
    m: np.ndarray
    dt: float
    order: int


class _EigCache:
    """Per-split eigendecompositions of the dense total and term matrices.

    Keyed weakly on the HamiltonianSplit object and lock-protected, so
    segments for different dt can be built concurrently.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._store: "weakref.WeakKeyDictionary[HamiltonianSplit, dict]" = (
            weakref.WeakKeyDictionary()
        )

    def get(self, h: HamiltonianSplit, cap: int) -> dict:
        with self._lock:
            entry = self._store.get(h)
            if entry is None:
                if h.n_sites > cap:
                    raise ValueError(
                        f"dense cap {cap} exceeded for {h.n_sites} sites"
                    )
                entry = {
                    "total": linalg.eigh_hermitian(h.total.to_dense(cap)),
                    "terms": [
                        linalg.eigh_hermitian(t.to_dense(cap)) for t in h.terms
                    ],
                }
                self._store[h] = entry
            return entry


_EIGS = _EigCache()


def split_eigs(h: HamiltonianSplit, cap: int = DENSE_CAP) -> dict:
    """Cached ``{"total": (w, v), "terms": [(w, v), ...]}`` for a split."""
    return _EIGS.get(h, cap)


def ideal_unitary(h: HamiltonianSplit, t: float, cap: int = DENSE_CAP) -> np.ndarray:
    w, v = split_eigs(h, cap)["total"]
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def segment(
    h: HamiltonianSplit, spec: FormulaSpec, dt: float, cap: int = DENSE_CAP
) -> SegmentUnitaries:
    """Build u0 = exp(-i H dt), the stage product up, and m = u0+ up - I."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    eigs = split_eigs(h, cap)
    w, v = eigs["total"]
    u0 = (v * np.exp(-1j * w * dt)) @ v.conj().T
    dim = u0.shape[0]
    up = np.eye(dim, dtype=complex)
    factors: dict[tuple[int, float], np.ndarray] = {}
    for l, a in spec.stages:
        key = (l, a * dt)
        f = factors.get(key)
        if f is None:
            wl, vl = eigs["terms"][l]
            f = (vl * np.exp(-1j * wl * (a * dt))) @ vl.conj().T
            factors[key] = f
        up = up @ f
    m = u0.conj().T @ up - np.eye(dim)
    return SegmentUnitaries(u0=u0, up=up, m=m, dt=dt, order=spec.order)


def _two_term(h: HamiltonianSplit) -> tuple[PauliSum, PauliSum]:
    if len(h.terms) != 2:
        raise ValueError("leading error terms are defined for two-term splits")
    return h.terms[0], h.terms[1]


def pf1_leading(h: HamiltonianSplit) -> PauliSum:
    """Leading multiplicative error sum M of PF1: m = M dt^2 + O(dt^3).

    M = -[A, B]/2; the caller supplies the dt power.
    """
    a, b = _two_term(h)
    return -0.5 * commutator(a, b)


def pf2_leading(h: HamiltonianSplit) -> PauliSum:
    """Leading multiplicative error sum M of PF2: m = M dt^3 + O(dt^4).

    M = [-iB, [-iB, -iA]]/12 + [iA, [iA, iB]]/24, with the i factors
    carried exactly by the string algebra.
    """
    a, b = _two_term(h)
    ia, ib = 1j * a, 1j * b
    return (1.0 / 12.0) * nested_commutator([-ib, -ib, -ia]) + (
        1.0 / 24.0
    ) * nested_commutator([ia, ia, ib])


def leading_error_sum(h: HamiltonianSplit, order: int) -> PauliSum:
    if order == 1:
        return pf1_leading(h)
    if order == 2:
        return pf2_leading(h)
    raise ValueError(f"leading error sum implemented for orders 1 and 2, got {order}")


def alpha_comm(h: HamiltonianSplit, p: int, cap: int = DENSE_CAP) -> float:
    """Nested-commutator sum alpha_{p+2} entering the remainder scaling.

    Enumerates all L^(p+2) index tuples (a superset of the minimal index
    set, which can only loosen the estimate) and adds the spectral norm of
    each (p+2)-fold nested commutator; norms come from dense conversion
    when the chain fits the cap, else from the coefficient 1-norm bound.
    """
    terms = h.terms
    depth = p + 2
    total = 0.0
    for tup in itertools.product(range(len(terms)), repeat=depth):
        nc = nested_commutator([terms[l] for l in tup])
        if not nc:
            continue
        if h.n_sites <= cap:
            total += linalg.spectral_norm(nc.to_dense(cap))
        else:
            total += sum(abs(c) for _, c in nc.items())
    return total
