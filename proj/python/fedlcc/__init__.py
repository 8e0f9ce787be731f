"""Lagrange-coded federated clustering.

Clients share only Lagrange-encoded data; the server reconstructs the exact
global pairwise squared-distance matrix and any distance-based clustering
backend runs on it.
"""

from ._core import (
    DEFAULT_PRIME,
    DEFAULT_Q,
    ConfigError,
    DataError,
    InfeasibleError,
    audit_privacy,
    cluster,
    kappa,
    nmi,
    pairwise_sq_distances,
    reconstruct_distances,
)

__all__ = [
    "DEFAULT_PRIME",
    "DEFAULT_Q",
    "ConfigError",
    "DataError",
    "InfeasibleError",
    "audit_privacy",
    "cluster",
    "kappa",
    "nmi",
    "pairwise_sq_distances",
    "reconstruct_distances",
]
