"""Disjoint (A, ell)-path packing: exact solvers, verifiers and hardness-instance generators."""
