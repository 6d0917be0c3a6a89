"""Power and sample size for cluster-randomized trials with two co-primary outcomes."""
__version__ = "0.1.0"
