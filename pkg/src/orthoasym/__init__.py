"""Asymptotics of monic orthogonal polynomials from three-term recurrences.

Exact and arbitrary-precision evaluation of the Legendre, Hermite and
Ismail monic families, closed-form outer and oscillatory approximants, and
checks comparing the two.
"""

from .asymptotics import DEFAULT_ZONES, OSCILLATORY, OUTER, Zones, approximant
from .numerics import DomainError, PrecisionError, SignedLog, arccos_principal, log_gamma, sl_rel_err, sqrt_cut
from .recurrence import FAMILIES, HERMITE, ISMAIL, LEGENDRE, Point, eval_sequence, evaluate, find_zeros, ratio_sequence
from .verify import compare, convergence_sweep

__all__ = [
    "DEFAULT_ZONES",
    "OSCILLATORY",
    "OUTER",
    "Zones",
    "approximant",
    "DomainError",
    "PrecisionError",
    "SignedLog",
    "arccos_principal",
    "log_gamma",
    "sl_rel_err",
    "sqrt_cut",
    "FAMILIES",
    "HERMITE",
    "ISMAIL",
    "LEGENDRE",
    "Point",
    "eval_sequence",
    "evaluate",
    "find_zeros",
    "ratio_sequence",
    "compare",
    "convergence_sweep",
]
