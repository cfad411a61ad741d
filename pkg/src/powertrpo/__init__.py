"""Trust-region deep RL for multi-cell downlink power allocation."""
__version__ = "0.1.0"
