"""Rational linear forms in odd zeta values.

Construction of a family of rational functions whose summed second
derivatives produce linear forms in odd zeta values with controlled
denominators; exact certification of the coefficient arithmetic; two
independent high-precision evaluation routes (series and contour); and
the saddle-point asymptotics of the forms' decay.
"""

from zetaforms.bigmath import (
    DEFAULT_CONTEXT,
    DomainError,
    ExactRational,
    PrecisionContext,
    TruncatedSeries,
)
from zetaforms.rfunc import (
    CertificationError,
    Parameters,
    PartialFractionTable,
    PoleError,
    partial_fractions,
)
from zetaforms.forms import (
    EliminationForm,
    IntegerForm,
    LinearForm,
    S_direct,
    S_via_zeta,
    eliminate,
    integerize,
    q_coefficients,
)

__all__ = [
    "DEFAULT_CONTEXT",
    "DomainError",
    "ExactRational",
    "PrecisionContext",
    "TruncatedSeries",
    "CertificationError",
    "Parameters",
    "PartialFractionTable",
    "PoleError",
    "partial_fractions",
    "EliminationForm",
    "IntegerForm",
    "LinearForm",
    "S_direct",
    "S_via_zeta",
    "eliminate",
    "integerize",
    "q_coefficients",
]

__version__ = "0.1.0"
