"""
Floquet theory for T-diagonal-periodic recurrences.
"""

from multitime.floquet.decomposition import (
    FloquetDecomposition,
    PeriodicityReport,
    check_diagonal_periodicity,
    floquet_B,
    floquet_multipliers,
    floquet_P,
    monodromy,
    tilde_A,
    transport_solution,
    verify_proposition_power,
)

__all__ = [
    "FloquetDecomposition",
    "PeriodicityReport",
    "check_diagonal_periodicity",
    "floquet_B",
    "floquet_multipliers",
    "floquet_P",
    "monodromy",
    "tilde_A",
    "transport_solution",
    "verify_proposition_power",
]
