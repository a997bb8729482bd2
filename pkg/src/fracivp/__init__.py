"""Solver and certificate toolkit for fractional initial value problems
with right-hand sides that are singular at the origin."""

__version__ = "0.1.0"
