"""Satisfiability, interpolation and definability for contiguous arrays with maxdiff."""

from ._cardinterp import CardError, beth, bench, check, interpolate, oracle

__all__ = ["CardError", "beth", "bench", "check", "interpolate", "oracle"]
