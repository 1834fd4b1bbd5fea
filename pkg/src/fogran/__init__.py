"""Memory-load tradeoff analysis for cache-aided fog networks: exact outer
bounds, achievable schemes with symmetric and partitioned subpacketization,
explicit delivery plans, and bit-exact finite-field verification."""

from .core import DemandVector, MemoryLoadPoint, Rational, Topology, binom, \
    lower_convex_envelope

__all__ = ["DemandVector", "MemoryLoadPoint", "Rational", "Topology", "binom",
           "lower_convex_envelope"]
__version__ = "0.1.0"
