"""Observable Trotter error and the full hierarchy of certified bounds.

For a segment unitary pair (u0, up) with up = u0 (I + m), the one-step
error of a Hermitian observable O in state psi obeys the exact chain

    exact <= ||[O(dt), m] psi||  <=  ||[O(dt), m]||,

the state-resolved scrambling bound and its worst-case (spectral norm)
envelope.  On top sit the vector-norm bound, the entanglement (Pinsker)
bound, the Haar-average bound, the accumulated multi-segment bounds and
the closed-form PF1/PF2 bounds built from nested-commutator norms.
All bound evaluations are pure functions.
"""

from __future__ import annotations

import functools
import math
import threading
import weakref
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import linalg
from .formula import (
    FormulaSpec,
    SegmentUnitaries,
    ideal_unitary,
    leading_error_sum,
    segment,
    split_eigs,
)
from .hamiltonians import HamiltonianSplit
from .pauli import DENSE_CAP, PauliString, PauliSum, commutator, mul, nested_commutator

#: Below this, a normalized intermediate state is treated as annihilated and
#: the bound term it multiplies is set to zero (the exact contribution
#: vanishes in the same limit).
DEGENERATE_TOL = 1e-13

_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# report record and CSV schema


CSV_COLUMNS = (
    "t",
    "exact",
    "scrambling",
    "scrambling_local",
    "worst",
    "haar_mean",
    "vecnorm",
    "entanglement",
    "frobprod",
)


@dataclass
class BoundReport:
    """Per-time-point record of the exact error and every bound."""

    t: float
    exact_error: float
    scrambling: float
    scrambling_local: float
    worst_case: float
    haar_mean: float
    vector_norm_bound: float
    entanglement_bound: float
    frobenius_product: float
    notes: dict[str, float] = field(default_factory=dict)

    def values(self) -> tuple[float, ...]:
        return (
            self.t,
            self.exact_error,
            self.scrambling,
            self.scrambling_local,
            self.worst_case,
            self.haar_mean,
            self.vector_norm_bound,
            self.entanglement_bound,
            self.frobenius_product,
        )

    def aux_keys(self) -> list[str]:
        return sorted(self.notes)

    def csv_row(self) -> str:
        cells = [repr(float(v)) for v in self.values()]
        cells += [repr(float(self.notes[k])) for k in self.aux_keys()]
        return ",".join(cells)

    def csv_header(self) -> str:
        return ",".join(CSV_COLUMNS + tuple(f"aux_{k}" for k in self.aux_keys()))


# ---------------------------------------------------------------------------
# one-step quantities


def heisenberg(o: np.ndarray, u0: np.ndarray) -> np.ndarray:
    """Ideal Heisenberg step O(dt) = u0+ O u0."""
    return u0.conj().T @ o @ u0


def exact_error(
    psi: np.ndarray, o: np.ndarray, seg: SegmentUnitaries, k_segments: int
) -> float:
    """|<psi| (up+^k O up^k - u0+^k O u0^k) |psi>| by direct evolution."""
    if o.shape[0] != psi.shape[0]:
        raise ValueError("dimension mismatch")
    if k_segments < 0:
        raise ValueError("segment count must be non-negative")
    phi_p = psi.copy()
    phi_0 = psi.copy()
    for _ in range(k_segments):
        phi_p = seg.up @ phi_p
        phi_0 = seg.u0 @ phi_0
    val = np.vdot(phi_p, o @ phi_p) - np.vdot(phi_0, o @ phi_0)
    return abs(val.real) if abs(val.imag) < 1e-9 else abs(val)


def scrambling_bound(psi: np.ndarray, o_dt: np.ndarray, m: np.ndarray) -> float:
    """||[O(dt), m] psi||, the state-resolved scrambling bound."""
    vec = o_dt @ (m @ psi) - m @ (o_dt @ psi)
    return float(np.linalg.norm(vec))


def scrambling_bound_local(
    psi: np.ndarray,
    o_dt: np.ndarray,
    leading_parts: Sequence[PauliSum],
    dt: float,
    p: int,
) -> float:
    """Triangle-inequality form sum_j ||[O(dt), M_j] psi|| dt^(p+1).

    Leading part only; the dt^(p+2) remainder is reported separately.
    Each M_j acts matrix-free, so the cost is one dense matvec per part.
    """
    o_psi = o_dt @ psi
    total = 0.0
    for part in leading_parts:
        m_psi = part.apply(psi)
        total += float(np.linalg.norm(o_dt @ m_psi - part.apply(o_psi)))
    return total * dt ** (p + 1)


def worst_case_bound(o_dt: np.ndarray, m: np.ndarray) -> float:
    """Spectral norm ||[O(dt), m]||: the scrambling bound maximized over states."""
    return linalg.spectral_norm(o_dt @ m - m @ o_dt)


def difference_operator(o: np.ndarray, seg: SegmentUnitaries) -> np.ndarray:
    """Hermitian one-step difference up+ O up - u0+ O u0."""
    return heisenberg(o, seg.up) - heisenberg(o, seg.u0)


def worst_case_state(o: np.ndarray, seg: SegmentUnitaries) -> np.ndarray:
    """Eigenvector of the one-step difference with largest |eigenvalue|.

    Ties break toward the lowest index in the ascending eigh ordering.
    The returned state attains exact_error(k=1) == worst_case_bound.
    """
    diff = difference_operator(o, seg)
    w, v = linalg.eigh_hermitian(diff)
    idx = int(np.argmax(np.abs(w)))  # argmax returns the first maximizer
    return v[:, idx].copy()


def leading_remainder_norm(seg: SegmentUnitaries, m_leading: np.ndarray) -> float:
    """Exact dense ||m - M dt^(p+1)||, the remainder past the leading sum."""
    return linalg.spectral_norm(seg.m - m_leading * seg.dt ** (seg.order + 1))


def haar_average(o_dt: np.ndarray, m: np.ndarray) -> tuple[float, float]:
    """1-design mean bound and 2-design second-moment bound.

    mean  = ||[O(dt), m]||_F (normalized Frobenius),
    var   = sqrt(2d/(d+1)) * mean^2.
    """
    c = o_dt @ m - m @ o_dt
    d = c.shape[0]
    mean = linalg.normalized_frobenius(c)
    return mean, math.sqrt(2.0 * d / (d + 1.0)) * mean**2


def vector_norm_bound(
    psi: np.ndarray,
    o: np.ndarray,
    seg: SegmentUnitaries,
    o_dt: np.ndarray | None = None,
) -> float:
    """||O psi(dt)|| ||m psi_O'|| + ||m psi|| ||O u0 psi_m||, exact in m.

    Evaluated in the unnormalized form ||m O' psi|| + ||O u0 m psi||, which
    is identical and makes degenerate normalizations (annihilated psi_O' or
    psi_m) vanish automatically.  Pass ``o_dt`` to reuse a precomputed
    Heisenberg step across a sweep.
    """
    if o_dt is None:
        o_dt = heisenberg(o, seg.u0)
    term1 = float(np.linalg.norm(seg.m @ (o_dt @ psi)))
    term2 = float(np.linalg.norm(o @ (seg.u0 @ (seg.m @ psi))))
    return term1 + term2


# ---------------------------------------------------------------------------
# entanglement machinery


def _single_parts(parts: Sequence[PauliSum]) -> list[tuple[complex, PauliString]]:
    out = []
    for part in parts:
        items = list(part.items())
        if len(items) != 1:
            raise ValueError(
                "entanglement parts must be single Pauli strings; "
                f"got a part with {len(items)} terms"
            )
        ps, c = items[0]
        out.append((c, ps))
    return out


def _pair_weight_key(singles) -> tuple:
    return tuple((ps.n_sites, ps.x_mask, ps.z_mask, c) for c, ps in singles)


@functools.lru_cache(maxsize=128)
def _pair_weights(key: tuple) -> tuple[tuple[frozenset[int], float], ...]:
    """State-independent pair weights: support -> sum over ordered pairs of
    |c_j c_j'| whose product string lives on that support."""
    singles = [
        (c, PauliString(n, x, z)) for (n, x, z, c) in key
    ]
    acc: dict[frozenset[int], float] = {}
    for cj, pj in singles:
        for ck, pk in singles:
            _, prod = mul(pj, pk)
            supp = prod.support()
            if not supp:
                continue
            acc[supp] = acc.get(supp, 0.0) + abs(cj) * abs(ck)
    return tuple(acc.items())


def delta_entanglement(parts: Sequence[PauliSum], chi: np.ndarray) -> float:
    """Pinsker correction Delta_A = sum_{j,j'} |c_j c_j'| sqrt(2 log d - 2 S).

    The support of each product string A_j+ A_j' fixes the reduced state of
    chi whose entropy enters; identity products (d = 1) contribute nothing.
    The pair weights are state-independent and cached, so one call costs a
    single partial trace per distinct support.
    """
    weights = _pair_weights(_pair_weight_key(_single_parts(parts)))
    total = 0.0
    for supp, weight in weights:
        s = linalg.von_neumann_entropy(linalg.partial_trace(chi, supp))
        total += weight * math.sqrt(max(0.0, 2.0 * len(supp) * _LN2 - 2.0 * s))
    return total


def entanglement_bound(
    psi: np.ndarray,
    o: PauliSum,
    seg: SegmentUnitaries,
    m_leading: PauliSum,
    cap: int = DENSE_CAP,
    remainder: float | None = None,
) -> float:
    """Pinsker-relaxed bound of Theorem-2 form, with exact dense remainder.

    leading = [ sqrt(||O||_F^2 + Delta_O(u0 psi)) sqrt(||M||_F^2 + Delta_M(psi_O'))
              + sqrt(||O||_F^2 + Delta_O(u0 psi_M)) sqrt(||M||_F^2 + Delta_M(psi)) ]
              * dt^(p+1)
    plus 2 ||O|| ||m - M dt^(p+1)||.  The normalized intermediate states use
    the leading sum M, which keeps every factor a rigorous upper bound of the
    corresponding vector norm; degenerate states zero their product term.

    ``remainder`` lets sweeps precompute the state-independent
    2 ||O|| ||m - M dt^(p+1)|| once instead of per call.
    """
    dt, p = seg.dt, seg.order
    od = o.to_dense(cap)
    md = m_leading.to_dense(cap)
    o_parts = o.parts()
    m_parts = m_leading.parts()
    of2 = o.frobenius_norm() ** 2
    mf2 = m_leading.frobenius_norm() ** 2

    psi_dt = seg.u0 @ psi
    o_psi = seg.u0.conj().T @ (od @ psi_dt)  # O(dt) psi
    m_psi = md @ psi

    n_o = float(np.linalg.norm(o_psi))
    n_m = float(np.linalg.norm(m_psi))

    term1 = 0.0
    if n_o > DEGENERATE_TOL:
        term1 = math.sqrt(of2 + delta_entanglement(o_parts, psi_dt)) * math.sqrt(
            mf2 + delta_entanglement(m_parts, o_psi / n_o)
        )
    term2 = 0.0
    if n_m > DEGENERATE_TOL:
        term2 = math.sqrt(
            of2 + delta_entanglement(o_parts, seg.u0 @ (m_psi / n_m))
        ) * math.sqrt(mf2 + delta_entanglement(m_parts, psi))

    if remainder is None:
        remainder = 2.0 * linalg.spectral_norm(od) * leading_remainder_norm(seg, md)
    return (term1 + term2) * dt ** (p + 1) + remainder


def frobenius_product(o: PauliSum, m_leading: PauliSum, dt: float, p: int) -> float:
    """Scrambled-regime scale 2 ||O||_F ||M||_F dt^(p+1)."""
    return 2.0 * o.frobenius_norm() * m_leading.frobenius_norm() * dt ** (p + 1)


# ---------------------------------------------------------------------------
# accumulated (multi-segment) bounds


def _trotter_state_chunks(
    up: np.ndarray, psi: np.ndarray, r: int, chunk: int
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (k values, columns psi_k = up^(r-k) psi) for k = r down to 1."""
    cur = psi
    kbuf: list[int] = []
    cols: list[np.ndarray] = []
    for step, k in enumerate(range(r, 0, -1)):
        if step > 0:
            cur = up @ cur
        kbuf.append(k)
        cols.append(cur)
        if len(cols) == chunk:
            yield np.array(kbuf, dtype=float), np.stack(cols, axis=1)
            kbuf, cols = [], []
    if cols:
        yield np.array(kbuf, dtype=float), np.stack(cols, axis=1)


def accumulated_scrambling(
    psi: np.ndarray,
    o: np.ndarray,
    h: HamiltonianSplit,
    spec: FormulaSpec,
    dt: float,
    r: int,
    cap: int = DENSE_CAP,
    chunk: int = 256,
    baseline: bool = False,
) -> float:
    """Accumulated scrambling bound sum_k sqrt(C_k) dt^(p+1) + 2 r ||O|| ||m_Re||.

    C_k = ||[O(k dt), M] psi_k||^2 with psi_k = up^(r-k) psi and M the
    symbolic leading sum; the remainder uses the exact dense
    ||m - M dt^(p+1)||.  Ideal-evolution powers act in the eigenbasis of H,
    so the cost is O(r d^2) with a handful of matrix products per chunk.

    With ``baseline=True`` the state-resolved sqrt(C_k) is replaced by the
    spectral norm ||[O(k dt), M]||, the worst-case accumulation used as the
    comparison baseline (cost O(r d^3)).
    """
    if r < 1:
        raise ValueError("need at least one segment")
    seg = segment(h, spec, dt, cap)
    m_sym = leading_error_sum(h, spec.order)
    md = m_sym.to_dense(cap)
    w, v = split_eigs(h, cap)["total"]
    p1 = spec.order + 1

    total = 0.0
    if baseline:
        u_dt = seg.u0
        o_k = o.copy()
        for _ in range(1, r + 1):
            o_k = u_dt.conj().T @ o_k @ u_dt
            total += linalg.spectral_norm(o_k @ md - md @ o_k)
    else:
        for ks, states in _trotter_state_chunks(seg.up, psi, r, chunk):
            fwd = linalg.phase_apply(w, v, ks * dt, states)
            o_fwd = o @ fwd
            ok_psi = linalg.phase_apply(w, v, -ks * dt, o_fwd)
            m_states = md @ states
            fwd_m = linalg.phase_apply(w, v, ks * dt, m_states)
            o_fwd_m = o @ fwd_m
            ok_m_psi = linalg.phase_apply(w, v, -ks * dt, o_fwd_m)
            comm = ok_m_psi - md @ ok_psi
            total += float(np.sum(np.linalg.norm(comm, axis=0)))
    remainder = 2.0 * r * linalg.spectral_norm(o) * leading_remainder_norm(seg, md)
    return total * dt**p1 + remainder


@dataclass
class AccumulatedEntanglement:
    """Accumulated vector-norm bound with its per-segment diagnostics.

    Arrays are indexed by segment k = 1..r: ``v_o[k-1] = ||O psi~_{r_k}||``,
    ``v_o_m`` the M-kicked analogue, ``v_m = ||m psi_k||`` and ``v_m_on_o``
    the norm of m on the normalized O_k psi_k.
    """

    total: float
    ks: np.ndarray
    v_o: np.ndarray
    v_o_m: np.ndarray
    v_m: np.ndarray
    v_m_on_o: np.ndarray


def accumulated_entanglement(
    psi: np.ndarray,
    o: PauliSum,
    h: HamiltonianSplit,
    spec: FormulaSpec,
    dt: float,
    r: int,
    cap: int = DENSE_CAP,
    chunk: int = 256,
) -> AccumulatedEntanglement:
    """Accumulated vector-norm bound sum_k ||m O_k psi_k|| + ||O u0^k m psi_k||.

    Exact in the full multiplicative error m (no remainder).  Also emits the
    per-k vector norms, whose concentration near ||O||_F for entangled final
    states is the Observation diagnostic.
    """
    if r < 1:
        raise ValueError("need at least one segment")
    seg = segment(h, spec, dt, cap)
    od = o.to_dense(cap)
    w, v = split_eigs(h, cap)["total"]

    ks_all: list[np.ndarray] = []
    vo, vom, vm, vmo = [], [], [], []
    total = 0.0
    for ks, states in _trotter_state_chunks(seg.up, psi, r, chunk):
        fwd = linalg.phase_apply(w, v, ks * dt, states)  # u0^k psi_k
        ok_psi = linalg.phase_apply(w, v, -ks * dt, od @ fwd)  # O_k psi_k
        m_states = seg.m @ states
        o_fwd_m = od @ linalg.phase_apply(w, v, ks * dt, m_states)
        m_ok = seg.m @ ok_psi

        n_vo = np.linalg.norm(od @ fwd, axis=0)
        n_vm = np.linalg.norm(m_states, axis=0)
        n_mok = np.linalg.norm(m_ok, axis=0)
        n_ofm = np.linalg.norm(o_fwd_m, axis=0)

        total += float(np.sum(n_mok) + np.sum(n_ofm))
        ks_all.append(ks)
        vo.append(n_vo)
        vm.append(n_vm)
        with np.errstate(divide="ignore", invalid="ignore"):
            vom.append(np.where(n_vm > DEGENERATE_TOL, n_ofm / n_vm, 0.0))
            vmo.append(np.where(n_vo > DEGENERATE_TOL, n_mok / n_vo, 0.0))

    order = np.argsort(np.concatenate(ks_all))
    return AccumulatedEntanglement(
        total=total,
        ks=np.concatenate(ks_all)[order].astype(int),
        v_o=np.concatenate(vo)[order],
        v_o_m=np.concatenate(vom)[order],
        v_m=np.concatenate(vm)[order],
        v_m_on_o=np.concatenate(vmo)[order],
    )


# ---------------------------------------------------------------------------
# closed-form PF1/PF2 bounds


class _CommNormCache:
    """Spectral norms of the nested commutators of a two-term split."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._store: "weakref.WeakKeyDictionary[HamiltonianSplit, dict]" = (
            weakref.WeakKeyDictionary()
        )

    def get(self, h: HamiltonianSplit, word: str, cap: int) -> float:
        with self._lock:
            entry = self._store.setdefault(h, {})
            val = entry.get(word)
            if val is None:
                ops = {"A": h.terms[0], "B": h.terms[1]}
                chain = [ops[ch] for ch in word]
                nc = nested_commutator(chain)
                val = linalg.spectral_norm(nc.to_dense(cap)) if nc else 0.0
                entry[word] = val
            return val


_COMM_NORMS = _CommNormCache()


def comm_norm(h: HamiltonianSplit, word: str, cap: int = DENSE_CAP) -> float:
    """||[W_1, [W_2, ..., W_k]]|| for a word over {A, B} in a two-term split."""
    if len(h.terms) != 2:
        raise ValueError("commutator words are defined for two-term splits")
    return _COMM_NORMS.get(h, word, cap)


def pf1_concrete(
    h: HamiltonianSplit,
    o: np.ndarray,
    psi: np.ndarray,
    dt: float,
    o_norm: float | None = None,
    cap: int = DENSE_CAP,
) -> float:
    """Closed-form PF1 bound (1/2) ||[O(dt), [A,B]] psi|| dt^2 + O_Re.

    O_Re = ||O|| (1 + ||[A,B]||^2 dt^2)
           (dt^3/6 ||[A,[A,B]]|| + dt^3/3 ||[B,[A,B]]||)
         + dt^4/2 ||O|| ||[A,B]||^2.
    """
    if len(h.terms) != 2:
        raise ValueError("pf1_concrete needs a two-term split")
    a, b = h.terms
    if o_norm is None:
        o_norm = linalg.spectral_norm(o)
    u0 = ideal_unitary(h, dt, cap)
    o_dt = heisenberg(o, u0)
    ab = commutator(a, b).to_dense(cap)
    lead = 0.5 * float(np.linalg.norm(o_dt @ (ab @ psi) - ab @ (o_dt @ psi))) * dt**2
    n_ab = comm_norm(h, "AB", cap)
    n_aab = comm_norm(h, "AAB", cap)
    n_bab = comm_norm(h, "BAB", cap)
    o_re = (
        o_norm
        * (1.0 + n_ab**2 * dt**2)
        * (dt**3 / 6.0 * n_aab + dt**3 / 3.0 * n_bab)
        + dt**4 / 2.0 * o_norm * n_ab**2
    )
    return lead + o_re


def pf2_zetas(h: HamiltonianSplit, dt: float, cap: int = DENSE_CAP) -> dict[str, float]:
    """The four PF2 remainder terms, assembled term by term."""
    n_bba = comm_norm(h, "BBA", cap)
    n_aab = comm_norm(h, "AAB", cap)
    n_abba = comm_norm(h, "ABBA", cap)
    n_bbba = comm_norm(h, "BBBA", cap)
    n_baab = comm_norm(h, "BAAB", cap)
    n_aaab = comm_norm(h, "AAAB", cap)
    zeta_1 = dt**4 / 32.0 * n_abba + dt**4 / 12.0 * n_bbba
    zeta_2 = dt**4 / 32.0 * n_baab + dt**4 / 48.0 * n_aaab
    inner = (
        dt**6 / 144.0 * n_bba
        + dt**6 / 288.0 * n_aab
        + dt**7 / 384.0 * n_abba
        + dt**7 / 144.0 * n_bbba
        + dt**7 / 384.0 * n_baab
        + dt**7 / 576.0 * n_aaab
    )
    zeta_s21 = inner * n_bba
    inner2 = (
        dt**6 / 288.0 * n_bba
        + dt**6 / 576.0 * n_aab
        + dt**7 / 768.0 * n_abba
        + dt**7 / 288.0 * n_bbba
        + dt**7 / 768.0 * n_baab
        + dt**7 / 1152.0 * n_aaab
    )
    zeta_s22 = inner2 * n_aab
    return {
        "zeta_re_1": zeta_1,
        "zeta_re_2": zeta_2,
        "zeta_star_21": zeta_s21,
        "zeta_star_22": zeta_s22,
    }


def pf2_concrete(
    h: HamiltonianSplit,
    o: np.ndarray,
    psi: np.ndarray,
    dt: float,
    o_norm: float | None = None,
    cap: int = DENSE_CAP,
) -> float:
    """Closed-form PF2 bound with the printed zeta remainder terms.

    (1/12) ||[O(dt), [B,[B,A]]] psi|| dt^3
    + (1/24) ||[O(dt), [A,[A,B]]] psi|| dt^3
    + 2 ||O|| (zeta_re1 + zeta_re2 + zeta*_21 + zeta*_22).
    """
    if len(h.terms) != 2:
        raise ValueError("pf2_concrete needs a two-term split")
    a, b = h.terms
    if o_norm is None:
        o_norm = linalg.spectral_norm(o)
    u0 = ideal_unitary(h, dt, cap)
    o_dt = heisenberg(o, u0)
    bba = nested_commutator([b, b, a]).to_dense(cap)
    aab = nested_commutator([a, a, b]).to_dense(cap)

    def comm_vec(x: np.ndarray) -> float:
        return float(np.linalg.norm(o_dt @ (x @ psi) - x @ (o_dt @ psi)))

    lead = (comm_vec(bba) / 12.0 + comm_vec(aab) / 24.0) * dt**3
    zetas = pf2_zetas(h, dt, cap)
    return lead + 2.0 * o_norm * sum(zetas.values())
