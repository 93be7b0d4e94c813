"""Simulator and global-existence certifier for the Gierer-Meinhardt system."""

__version__ = "0.1.0"
