"""Kinematic dynamo models on twisted flux tubes and curved vortex filaments."""

__version__ = "0.1.0"
