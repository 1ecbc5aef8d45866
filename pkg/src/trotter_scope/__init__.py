"""Exact Trotter observable errors and their certified bound hierarchy.

Symbolic Pauli-string algebra, dense spin-chain evolution at desk scale,
product-formula segments, and the scrambling / entanglement / Haar /
worst-case bounds on observable Trotterization errors, with a CLI that
emits reproducible CSV artifacts.
"""

from .bounds import (
    BoundReport,
    accumulated_entanglement,
    accumulated_scrambling,
    delta_entanglement,
    entanglement_bound,
    exact_error,
    haar_average,
    pf1_concrete,
    pf2_concrete,
    scrambling_bound,
    scrambling_bound_local,
    vector_norm_bound,
    worst_case_bound,
    worst_case_state,
)
from .formula import (
    FormulaSpec,
    SegmentUnitaries,
    alpha_comm,
    make_spec,
    pf1_leading,
    pf2_leading,
    segment,
)
from .hamiltonians import HamiltonianSplit, fig1_hamiltonian, qimf, scale
from .pauli import (
    PauliString,
    PauliSum,
    commutator,
    mul,
    nested_commutator,
    parse_pauli_sum,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "FormulaSpec",
    "HamiltonianSplit",
    "PauliString",
    "PauliSum",
    "SegmentUnitaries",
    "accumulated_entanglement",
    "accumulated_scrambling",
    "alpha_comm",
    "commutator",
    "delta_entanglement",
    "entanglement_bound",
    "exact_error",
    "fig1_hamiltonian",
    "haar_average",
    "make_spec",
    "mul",
    "nested_commutator",
    "parse_pauli_sum",
    "pf1_concrete",
    "pf1_leading",
    "pf2_concrete",
    "pf2_leading",
    "qimf",
    "scale",
    "scrambling_bound",
    "scrambling_bound_local",
    "segment",
    "vector_norm_bound",
    "worst_case_bound",
    "worst_case_state",
]
