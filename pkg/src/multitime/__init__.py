"""
Multitime Core

Linear discrete multitime diagonal recurrences on N^m, Floquet analysis of
T-diagonal-periodic systems, and generating functions for discrete multitime
Samuelson-Hicks models.
"""

__version__ = "0.1.0"
