"""Spin dynamics of an NV center coupled to a driven quantum pendulum."""

__version__ = "0.1.0"
