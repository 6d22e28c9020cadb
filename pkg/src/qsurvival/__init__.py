"""Numerical laboratory for the survival probability of a local excitation
in multi-qubit models.

The package computes the probability that a single initially excited qubit,
embedded in an environment of qubits, is still found excited at a later time.
It provides exact finite-size dynamics, closed-form chain results, the
infinite-environment limit via complex analysis, perturbative approximations,
speed-limit bounds, and recurrence-time estimates, with every quantity
cross-checkable through at least two independent routes.
"""

__version__ = "0.1.0"
