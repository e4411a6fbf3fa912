"""Random walks on weighted graphs: heat kernels, exit times, resistance and
the measured constants of the heat-kernel and Harnack conditions."""
from .graph_core import (
    VertexSet,
    WeightedGraph,
    annulus_volume,
    ball,
    bfs_distances,
    build_graph,
    check_p0,
    closure_and_boundary,
    read_edges,
    volume,
    volume_profile,
    write_edges,
)
from .generators import glue, lattice, path_graph, sierpinski_gasket, vicsek_tree
from .markov_kernel import dirichlet_kernel, evolve_cylinder, heat_kernel, kernel_series, tilde
from .potential_theory import (
    DirichletSolver,
    annulus_resistance,
    effective_resistance,
    green,
    harmonic_solve,
    mean_exit_time,
    poisson_kernel,
    smallest_eigenvalue,
)
from .scaling_laws import (
    ScalingTable,
    build_scaling_table,
    fit_exponents,
    global_m,
    inverse_scaling,
    sub_gaussian_k,
    sub_gaussian_l,
    sub_gaussian_l_set,
)
from .verify import ConditionReport, VerifierConfig, coherence, run_conditions
from .monte_carlo import McEstimate, mc_exit_site, mc_exit_time, mc_kernel

__version__ = "0.1.0"

__all__ = [
    "VertexSet", "WeightedGraph", "annulus_volume", "ball", "bfs_distances", "build_graph",
    "check_p0", "closure_and_boundary", "read_edges", "volume", "volume_profile", "write_edges",
    "glue", "lattice", "path_graph", "sierpinski_gasket", "vicsek_tree",
    "dirichlet_kernel", "evolve_cylinder", "heat_kernel", "kernel_series", "tilde",
    "DirichletSolver", "annulus_resistance", "effective_resistance", "green", "harmonic_solve",
    "mean_exit_time", "poisson_kernel", "smallest_eigenvalue",
    "ScalingTable", "build_scaling_table", "fit_exponents", "global_m", "inverse_scaling",
    "sub_gaussian_k", "sub_gaussian_l", "sub_gaussian_l_set",
    "ConditionReport", "VerifierConfig", "coherence", "run_conditions",
    "McEstimate", "mc_exit_site", "mc_exit_time", "mc_kernel",
]
