"""
CroDomSc - Cross-Domain Sparse Coding
Main source package
"""

__version__ = "1.0.0"
