"""Exact statevector simulator for extended Wigner's-friend experiments.

The heavy lifting lives in the compiled extension; this package simply
re-exports its surface.  See ``wfsim.chsh`` and ``wfsim.correlations`` for
the main entry points, and ``wfsim.parse`` for the protocol file format.
"""

from wfsim._core import (
    CLASSICAL_BOUND,
    TSIRELSON_BOUND,
    Protocol,
    __version__,
    chsh,
    correlations,
    diagnostics,
    exact_correlation,
    healey,
    lhv_bound,
    modified,
    optimal_angles,
    parse,
    register_correlation,
    register_probabilities,
    run,
    sequential_correlations,
    state_after,
)

__all__ = [
    "CLASSICAL_BOUND",
    "TSIRELSON_BOUND",
    "Protocol",
    "__version__",
    "chsh",
    "correlations",
    "diagnostics",
    "exact_correlation",
    "healey",
    "lhv_bound",
    "modified",
    "optimal_angles",
    "parse",
    "register_correlation",
    "register_probabilities",
    "run",
    "sequential_correlations",
    "state_after",
]
