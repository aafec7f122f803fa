"""Workbench for constrained quantum systems and quantum reference frames."""
__version__ = "0.1.0"
