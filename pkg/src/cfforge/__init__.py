"""cfforge: continued-fraction identities of the -f(n)^2 / telescoping family.

Library layout:

* exprlang   — expression language (parse/render/eval) for f, g and constants
* qpoly      — exact polynomial and rational-function arithmetic over Q
* mpval      — arbitrary-precision constants and elementary functions
* cfengine   — convergent recurrences, exact partial sums, series summation
* closedform — Q-linear combinations of constant atoms (zeta, log p, ...)
* telescope  — partial fractions and telescoping to exact closed forms
* solver     — reverse direction: recover (f, g) from conjectured (a_n, b_n)
* recognizer — PSLQ integer-relation detection and constant recognition
* cli        — batch verifier / prover / recognizer command line
"""

__version__ = "0.1.0"
