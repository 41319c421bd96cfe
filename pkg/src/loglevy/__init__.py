"""Logarithmic Lévy process ``L``, the negative binomial process ``X``, and
the subordinated processes ``Y = X(Gamma)`` and ``Z = L(Poisson)``.

Submodules:

* ``combinatorics``: exact Stirling numbers, partial Bell polynomials, harmonic numbers
* ``charfun``: Lévy measures and Bernstein functions
* ``transition``: transition probabilities, each by two independent formulas
* ``montecarlo``: samplers and empirical comparison
* ``verify``: the identity catalog
* ``cli``: command-line front end
"""

__version__ = "0.1.0"

from .charfun import (  # noqa: E402
    PROCESSES,
    ParameterDomainError,
    ProcessParams,
    bernstein,
    levy_measure,
    selection_a,
    selection_b,
)
from .transition import PmfTable, cross_checked_table, pmf_point, pmf_table  # noqa: E402

__all__ = [
    "PROCESSES",
    "ParameterDomainError",
    "ProcessParams",
    "PmfTable",
    "bernstein",
    "cross_checked_table",
    "levy_measure",
    "pmf_point",
    "pmf_table",
    "selection_a",
    "selection_b",
]
