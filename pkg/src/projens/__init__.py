"""Numerical laboratory for classically-enhanced projected ensembles.

Simulates chaotic qubit dynamics, builds projected state ensembles with
injected classical randomness, measures their distance to Haar k-designs
against closed-form benchmarks, and drives a shadow-tomography
application on top of the same machinery.
"""

__version__ = "0.1.0"
