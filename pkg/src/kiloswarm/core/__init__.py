"""
Core definitions for KiloSwarm: constants, exceptions and shared value types.
The configuration layer lives in ``kiloswarm.core.config``.
"""
