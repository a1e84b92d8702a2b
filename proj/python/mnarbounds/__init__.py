"""Partial-identification bounds for means under outcome-dependent missingness."""

from ._core import BoundsError, base_bounds, set_expansion, shadow_bounds, svd_values

__all__ = ["BoundsError", "base_bounds", "set_expansion", "shadow_bounds", "svd_values"]
