"""Discrete-event simulator for decentralized probabilistic auto-scaling of
batch services across federated clouds, with analytic M/M/m baselines."""

__version__ = "0.1.0"
