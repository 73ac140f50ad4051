"""Density bounds for integers represented by diagonal forms a_1 x_1^k + ... + a_s x_s^k."""

__version__ = "0.1.0"

from diagdensity.local import FormSpec

__all__ = ["FormSpec", "__version__"]
