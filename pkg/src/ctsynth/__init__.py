"""Exact synthesis and verification of Clifford+T reversible circuits."""

from ctsynth.ring import RingScalar, omega_power

__all__ = ["RingScalar", "omega_power"]
