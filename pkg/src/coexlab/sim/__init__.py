"""Seeded slot-level simulator of bf/ax channel contention."""

from coexlab.sim.backend import BACKEND
from coexlab.sim.engine import ap_generators, build_kernel, mean_decrement_interval, run

__all__ = ["BACKEND", "ap_generators", "build_kernel", "mean_decrement_interval", "run"]
