"""Lipschitz constants in conjugacy classes of interval maps."""
__version__ = "0.1.0"
