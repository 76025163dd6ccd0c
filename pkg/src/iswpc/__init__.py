"""Multi-UAV joint sensing / wireless-powered-communication design toolkit."""

__version__ = "0.1.0"
