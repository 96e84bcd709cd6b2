"""Lévy-type nonlocal operators: symbols, quadrature and Liouville classification."""
from ._accel import BACKEND

__version__ = "0.1.0"
