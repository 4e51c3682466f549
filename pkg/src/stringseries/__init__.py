"""Fourier sine-series solutions of the fixed-end wave equation.

Modules:
    fnspace: function specifications, registry, one-sided derivatives.
    extend: odd/even extensions and seam smoothness checks.
    decompose: boundary-matching polynomial split f = f1 + f2.
    fourier: coefficients, decay bounds, partial sums.
    wave: modal solution, traveling-wave oracle, residual, energy.
    cli: JSON-configured experiment runner.
"""

__version__ = "0.1.0"
