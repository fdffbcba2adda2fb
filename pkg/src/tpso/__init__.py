"""Tunable swarm-size PSO wrapper feature selection with ADT evaluation."""

__version__ = "0.1.0"
