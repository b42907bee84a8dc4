"""Topology-aware 3D skeletonization, metrics and benchmarking toolkit."""

__version__ = "0.1.0"
