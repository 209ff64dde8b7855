"""localdbn - dynamic Bayesian network structure learning from time series."""

__version__ = "0.1.0"
