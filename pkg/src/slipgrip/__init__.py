"""Slip-aware parallel gripper simulation and control."""

__version__ = "0.1.0"
