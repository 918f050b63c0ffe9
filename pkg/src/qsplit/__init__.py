"""Splitting heuristics that fit dense Ising problems onto sparse annealer graphs."""

from .ising import IsingModel, QuboModel, WeightedGraph, energy, maxcut_to_ising, qubo_to_ising
from .splitting import LambdaMode, SplitConfig, run_splitting
from .subsolver import SolverConfig, SimulatedAnnealingSampler, BruteForceSampler
from .topology import HardwareMask, chimera_mask, mask_for_problem, pegasus_mask

__all__ = [
    "BruteForceSampler",
    "HardwareMask",
    "IsingModel",
    "LambdaMode",
    "QuboModel",
    "SimulatedAnnealingSampler",
    "SolverConfig",
    "SplitConfig",
    "WeightedGraph",
    "chimera_mask",
    "energy",
    "mask_for_problem",
    "maxcut_to_ising",
    "pegasus_mask",
    "qubo_to_ising",
    "run_splitting",
]
