"""
banana - arbitrary-precision checks for the three-banana integral and modular L-values

Evaluates eta quotients, Eichler integrals, L-functions, the banana integral
I(t) and related Mahler measures with error radii, and verifies each identity
between them as a digits-counted check.

Usage:
    python -m banana list                          # List registered checks
    python -m banana run --all --digits 100        # Run the full suite
    python -m banana run --check thm1.1 --digits 50
    python -m banana eval eta --tau 0,1 --digits 40
    python -m banana cache stat                    # Constant cache summary
    python -m banana history                       # Recent runs
"""

__version__ = "1.0.0"
