"""
Simulation modules: motion, light field, controllers, sensing, oscillators,
bias estimation and the Monte Carlo harness.
"""
