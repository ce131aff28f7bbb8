"""(a,r)-energy layouts and modularity clusterings of weighted networks."""
from .clustering import (agglomerate, exhaustive_best_clustering, join_delta,
                         maximize_modularity, modularity, move_delta, refine)
from .energy import BHTree, EnergyParams, ar_energy, ar_forces, ar_gradient, net_force
from .equivalence import (clustering_to_simplex_layout, consistency_report,
                          normalized_energy, verify_equivalence)
from .graph import (Clustering, InputError, Layout, Network, NumericError, build_network,
                    connected_components, degree, density_between, density_within,
                    double_network, subdivide_edge)
from .kernels import BACKEND
from .layout import LayoutOptions, minimize_energy

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BHTree", "Clustering", "EnergyParams", "InputError", "Layout",
    "LayoutOptions", "Network", "NumericError", "agglomerate", "ar_energy", "ar_forces",
    "ar_gradient", "build_network", "clustering_to_simplex_layout", "connected_components",
    "consistency_report", "degree", "density_between", "density_within", "double_network",
    "exhaustive_best_clustering", "join_delta", "maximize_modularity", "minimize_energy",
    "modularity", "move_delta", "net_force", "normalized_energy", "refine",
    "subdivide_edge", "verify_equivalence",
]
