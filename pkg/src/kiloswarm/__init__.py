"""
KiloSwarm: a seedable simulator and Monte Carlo harness for studying
individuality in minimal swarm robots.
"""

from .core.constants import APP_VERSION as __version__

__all__ = ['__version__']
