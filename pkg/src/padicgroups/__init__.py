"""Exact p-adic arithmetic, truncated Tate series, finite-group order bounds,
and analytic flows for groups of polynomial automorphisms."""

from .padic import PadicInt, PrecisionPolicy, binom_padic, flow_threshold, vp, vp_factorial

__all__ = [
    "PadicInt",
    "PrecisionPolicy",
    "binom_padic",
    "flow_threshold",
    "vp",
    "vp_factorial",
]
